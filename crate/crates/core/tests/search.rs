use stabspan::dense::DenseState;
use stabspan::povm::{span_dimension, AncillaSpec};
use stabspan::search::*;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn task(kind: SearchKind, n: usize, t: &[usize]) -> SearchTask {
    let mut task = SearchTask::new(kind, n);
    task.t = t.to_vec();
    task
}

#[test]
fn ic_needs_two_n_for_small_n() {
    let r = run_task(&task(SearchKind::Conjecture2n, 1, &[0, 1, 2])).unwrap();
    assert_eq!(r.verdict, Verdict::Consistent);
    assert_eq!(r.sections[1].ic_count, 0);
    assert_eq!(r.sections[1].candidates, 1);
    assert!(r.sections[2].ic_count >= 1);
    assert_eq!(r.witnesses.len(), 1);
    assert!(r.witnesses[0].verified);
    assert_eq!(r.witnesses[0].report.s_mu, 4);

    let r = run_task(&task(SearchKind::Conjecture2n, 2, &[2, 3, 4])).unwrap();
    assert_eq!(r.verdict, Verdict::Consistent, "{:?}", r.notes);
    assert_eq!(r.sections[0].ic_count + r.sections[1].ic_count, 0);
    assert_eq!(r.witnesses.len(), 1);
    assert_eq!(r.witnesses[0].report.s_mu, 16);
    assert_eq!(r.witnesses[0].report.oracle_checked, Some(true));
}

#[test]
fn exhaustive_without_symmetry_counts_all_subgroups() {
    let mut t = task(SearchKind::Conjecture2n, 2, &[3]);
    t.symmetry = false;
    let r = run_task(&t).unwrap();
    assert_eq!(r.sections[0].candidates, 63);
    assert_eq!(r.sections[0].ic_count, 0);
}

#[test]
fn shards_partition_the_scan() {
    let mut base = task(SearchKind::Conjecture2n, 1, &[3]);
    base.symmetry = false;
    base.stop_at_first = false;
    let full = run_task(&base).unwrap();
    let mut total = 0;
    let mut hist = std::collections::BTreeMap::new();
    for k in 0..3 {
        let mut t = base.clone();
        t.shard = Shard { index: k, count: 3 };
        let r = run_task(&t).unwrap();
        total += r.sections[0].candidates;
        for (s, c) in &r.sections[0].histogram {
            *hist.entry(*s).or_insert(0) += c;
        }
    }
    assert_eq!(total, full.sections[0].candidates);
    assert_eq!(hist, full.sections[0].histogram);
}

#[test]
fn summaries_are_deterministic() {
    let mut t = task(SearchKind::RandomDopedScan, 1, &[1, 2]);
    t.m = 1;
    t.samples = 200;
    t.seed = 11;
    t.layout = Layout::Both;
    let a = run_task(&t).unwrap();
    let b = run_task(&t).unwrap();
    assert_eq!(a.summary(), b.summary());
    assert_eq!(a.sections.len(), 4);
}

#[test]
fn budget_marks_incomplete() {
    let mut t = task(SearchKind::RandomDopedScan, 1, &[1]);
    t.m = 1;
    t.samples = 100;
    t.budget.max_candidates = Some(10);
    let r = run_task(&t).unwrap();
    assert_eq!(r.verdict, Verdict::Incomplete);
    assert_eq!(r.verdict.exit_code(), 3);
    assert_eq!(r.candidates_examined, 10);
}

#[test]
fn stabilizer_ancillas_never_beat_two_to_the_n() {
    let mut t = task(SearchKind::ConjectureMaxent, 2, &[]);
    t.m = 2;
    t.samples = 20;
    t.ensemble = Ensemble::Stabilizer;
    let r = run_task(&t).unwrap();
    assert_eq!(r.verdict, Verdict::Consistent);
    for s in &r.sections {
        assert_eq!(s.histogram.keys().copied().collect::<Vec<_>>(), vec![4], "{}", s.label);
    }
}

#[test]
fn coset_formula_matches_span_engine() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for m in 1..=3 {
        for ell in 0..=m {
            for h in enumerate_abelian_subgroups(m, ell).unwrap().iter().step_by(7) {
                let psi = DenseState::haar(m, &mut rng);
                let n = m - ell + 1;
                let s = group_from_ancilla_part(h, n).unwrap();
                let direct = span_dimension(&s, n, &AncillaSpec::Dense(psi.clone())).unwrap().s_mu;
                assert_eq!(s_mu_from_ancilla_part(h, n, &psi).unwrap(), direct);
            }
        }
    }
}

#[test]
fn shard_spec_parsing() {
    assert_eq!(Shard::parse("2/5").unwrap(), Shard { index: 2, count: 5 });
    assert!(Shard::parse("5/5").is_err());
    assert!(Shard::parse("x").is_err());
}

#[test]
fn task_requires_budget() {
    let ok = r#"{"kind":"conjecture_2n","n":1,"t":[2],"budget":{"max_candidates":null,"max_seconds":null}}"#;
    assert!(serde_json::from_str::<SearchTask>(ok).is_ok());
    let missing = r#"{"kind":"conjecture_2n","n":1,"t":[2]}"#;
    assert!(serde_json::from_str::<SearchTask>(missing).is_err());
}

#[test]
fn random_mode_samples_subgroups() {
    let mut t = task(SearchKind::Conjecture2n, 2, &[3, 4]);
    t.mode = ScanMode::Random;
    t.samples = 300;
    t.seed = 3;
    t.stop_at_first = false;
    let r = run_task(&t).unwrap();
    assert!(r.statistical);
    assert_eq!(r.verdict, Verdict::Consistent, "{:?}", r.notes);
    assert_eq!(r.sections[0].candidates, 300);
    assert_eq!(r.sections[0].ic_count, 0);
    assert!(r.sections[1].ic_count > 0);
    assert!(r.witnesses[0].verified);

    let mut hist = std::collections::BTreeMap::new();
    for k in 0..2 {
        let mut s = t.clone();
        s.shard = Shard { index: k, count: 2 };
        for (v, c) in &run_task(&s).unwrap().sections[1].histogram {
            *hist.entry(*v).or_insert(0) += c;
        }
    }
    assert_eq!(hist, r.sections[1].histogram);
}
