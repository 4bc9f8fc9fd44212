//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fails.

use std::time::Instant;

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use stabspan::circuit::{heisenberg_evolve, random_clifford, DopedCircuit, Direction, Gate};
use stabspan::dense::{self, DenseOperator, DenseState, DEFAULT_DENSE_CAP};
use stabspan::fixtures::{run_fixtures, FixtureOutcome};
use stabspan::group::{align_generators, entanglement, entanglement_decomposition, zfree_centralizer_count, PauliSubgroup};
use stabspan::povm::*;
use stabspan::search::{run_task, Ensemble, Layout, SearchKind, SearchReport, SearchTask, Section, Verdict};
use stabspan::{Letter, PauliString, ProjectivePauli};

/// Agreement tolerance for floating-point operator identities.
const OP_TOL: f64 = 1e-10;
/// Smallest eigenvalue accepted for a POVM element.
const PSD_TOL: f64 = 1e-10;
/// Sample count of the statistical n = 4, t = 7 scan.
const STAT_SAMPLES: u64 = 100_000;

type Outcome = Result<String, String>;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn random_stabilizer(q: usize, rng: &mut ChaCha8Rng) -> PauliSubgroup {
    heisenberg_evolve(&random_clifford(q, rng), &computational_basis(q), Direction::Forward).expect("clifford image")
}

fn random_doped(rng: &mut ChaCha8Rng, n: usize, m: usize, t: usize) -> DopedCircuit {
    let q = n + m;
    let mut gates = random_clifford(q, rng).gates().to_vec();
    for _ in 0..t {
        gates.push(Gate::T(rng.gen_range(0..q)));
        gates.extend(random_clifford(q, rng).gates().iter().cloned());
    }
    DopedCircuit::new(n, m, gates).expect("valid circuit")
}

fn fixtures_pass(outs: &[FixtureOutcome], expected_len: usize) -> Outcome {
    ensure(outs.len() == expected_len, || format!("{} fixtures, expected {expected_len}", outs.len()))?;
    for o in outs {
        ensure(o.pass, || format!("{}: expected {} computed {}", o.name, o.expected, o.computed))?;
    }
    let oracles = outs.iter().filter(|o| o.oracle.is_some()).count();
    Ok(format!("{} fixtures, {oracles} with dense cross-check", outs.len()))
}

fn category(cat: &str) -> Vec<FixtureOutcome> {
    run_fixtures(Some(cat), DEFAULT_DENSE_CAP).into_iter().filter(|o| o.category == cat).collect()
}

fn criterion_1() -> Outcome {
    fixtures_pass(&category("worked"), 11)
}

fn criterion_2() -> Outcome {
    let fixed = fixtures_pass(&category("zfree_counts"), 4)?;
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for i in 0..200 {
        let t = rng.gen_range(1..=5);
        let d = rng.gen_range(0..=t);
        let s = random_stabilizer(t, &mut rng);
        let h = PauliSubgroup::new(t, s.generators()[..d].to_vec(), false).map_err(err)?;
        let formula = zfree_centralizer_count(&h).map_err(err)?;
        let brute = zfree_coset_count(&PauliSubgroup::trivial(t), &h.centralizer()).map_err(err)?;
        ensure(formula == brute as u128, || format!("instance {i}: formula {formula}, scan {brute}"))?;
    }
    Ok(format!("{fixed}; 200 random H agree with the brute-force scan"))
}

fn criterion_3() -> Outcome {
    let outs = category("universal");
    let s = fixtures_pass(&outs, 4)?;
    for name in ["universal_n1", "universal_n2"] {
        let o = outs.iter().find(|o| o.name == name).ok_or("missing fixture")?;
        ensure(o.oracle == Some(true), || format!("{name}: dense check missing"))?;
    }
    Ok(format!("{s}; frame within {OP_TOL:e}"))
}

fn criterion_4() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut dense_checked = 0;
    for i in 0..1000 {
        let n = rng.gen_range(1..=4);
        let m = rng.gen_range(0..=4);
        let c = DopedCircuit::new(n, m, random_clifford(n + m, &mut rng).gates().to_vec()).map_err(err)?;
        let anc = AncillaSpec::Stabilizer(random_stabilizer(m, &mut rng));
        let meas = random_stabilizer(n + m, &mut rng);
        let r = analyze_doped(&c, &meas, &anc).map_err(err)?;
        ensure(r.s_mu == 1 << n, || format!("instance {i}: n={n} m={m} s_mu={}", r.s_mu))?;
        if n + m <= DEFAULT_DENSE_CAP {
            let d = oracle_doped_rank(&c, &meas, &anc, DEFAULT_DENSE_CAP).map_err(err)?;
            ensure(d == 1 << n, || format!("instance {i}: dense rank {d}"))?;
            dense_checked += 1;
        }
    }
    Ok(format!("1000 instances give 2^n, {dense_checked} dense ranks agree"))
}

fn criterion_5() -> Outcome {
    let outs = run_fixtures(None, DEFAULT_DENSE_CAP);
    let with_oracle = outs.iter().filter(|o| o.oracle.is_some()).count();
    for o in &outs {
        ensure(o.oracle != Some(false), || format!("fixture {}: dense mismatch", o.name))?;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for i in 0..500 {
        let (group_s, oracle) = if i % 5 == 4 {
            let n = rng.gen_range(1..=3);
            let m = rng.gen_range(1..=3);
            let s = random_stabilizer(n + m, &mut rng);
            let anc = if i % 10 == 4 {
                AncillaSpec::MaximallyMixed(m)
            } else {
                AncillaSpec::Dense(DenseState::haar(m, &mut rng))
            };
            let r = span_dimension(&s, n, &anc).map_err(err)?;
            (r.s_mu, oracle_span_rank(&s, n, &anc, DEFAULT_DENSE_CAP).map_err(err)?)
        } else {
            let n = rng.gen_range(1..=3);
            let m = rng.gen_range(0..=2);
            let t = rng.gen_range(0..=4);
            let c = random_doped(&mut rng, n, m, t);
            let meas = if i % 2 == 0 { computational_basis(n + m) } else { random_stabilizer(n + m, &mut rng) };
            let anc = match i % 5 {
                0 => AncillaSpec::Stabilizer(random_stabilizer(m, &mut rng)),
                1 => AncillaSpec::Dense(DenseState::haar(m, &mut rng)),
                2 => AncillaSpec::MagicT(m),
                _ => AncillaSpec::MaximallyMixed(m),
            };
            let r = analyze_doped(&c, &meas, &anc).map_err(err)?;
            (r.s_mu, oracle_doped_rank(&c, &meas, &anc, DEFAULT_DENSE_CAP).map_err(err)?)
        };
        ensure(group_s as usize == oracle, || format!("instance {i}: group {group_s}, dense {oracle}"))?;
    }
    Ok(format!("{with_oracle} fixture cross-checks and 500 random instances, zero exceptions"))
}

/// Sections whose T count makes IC impossible must contain no IC instance.
fn necessity_violations(sections: &[Section]) -> Vec<String> {
    sections
        .iter()
        .filter(|s| (s.t as u32) < necessary_t(s.n as u32) && s.ic_count > 0)
        .map(|s| format!("{} n={} has {} IC", s.label, s.n, s.ic_count))
        .collect()
}

fn task(kind: SearchKind, n: usize, t: &[usize]) -> SearchTask {
    let mut task = SearchTask::new(kind, n);
    task.t = t.to_vec();
    task
}

fn criterion_6(all: &mut Vec<Section>) -> Outcome {
    let mut found = Vec::new();
    for (n, t, want) in [(1, 1, 3u64), (2, 1, 6), (2, 2, 9)] {
        let r = run_task(&task(SearchKind::BoundSaturation, n, &[t])).map_err(err)?;
        ensure(r.complete, || format!("n={n} t={t}: scan incomplete"))?;
        let max = r.sections.iter().filter_map(|s| s.max_s_mu).max().unwrap_or(0);
        ensure(max == want, || format!("n={n} t={t}: max {max}, expected {want}"))?;
        ensure(max as u128 == bound_t_le_n(n as u32, t as u32).map_err(err)?, || "formula mismatch".into())?;
        found.push(format!("({n},{t})->{max}"));
        all.extend(r.sections);
    }
    let bad = necessity_violations(all);
    ensure(bad.is_empty(), || bad.join("; "))?;
    Ok(format!("maxima {}; no IC with 3^t < 4^n in {} sections", found.join(" "), all.len()))
}

fn criterion_7(all: &mut Vec<Section>) -> Outcome {
    let mut parts = Vec::new();
    for (n, ts) in [(1, vec![0, 1]), (2, vec![2, 3])] {
        let mut t = task(SearchKind::Conjecture2n, n, &ts);
        t.stop_at_first = false;
        t.symmetry = false;
        let r = run_task(&t).map_err(err)?;
        ensure(r.complete, || format!("n={n}: exhaustive scan incomplete"))?;
        let ic: u64 = r.sections.iter().map(|s| s.ic_count).sum();
        ensure(ic == 0, || format!("n={n}: {ic} IC candidates below 2n"))?;
        let cands: u64 = r.sections.iter().map(|s| s.candidates).sum();
        parts.push(format!("n={n} t<={}: 0 IC in {cands}", ts.last().unwrap()));
        all.extend(r.sections);
    }
    for n in 1..=3 {
        let r = run_task(&task(SearchKind::Conjecture2n, n, &[2 * n])).map_err(err)?;
        let w = r.witnesses.first().ok_or_else(|| format!("n={n}: no t=2n witness"))?;
        ensure(w.verified && w.report.ic && w.report.s_mu == 1 << (2 * n), || format!("n={n}: witness not IC"))?;
        all.extend(r.sections);
    }
    parts.push("t=2n witnesses for n=1,2,3".into());
    let mut t = task(SearchKind::RandomDopedScan, 4, &[7]);
    t.m = 4;
    t.samples = STAT_SAMPLES;
    t.seed = 2024;
    t.layout = Layout::Serial;
    let start = Instant::now();
    let r: SearchReport = run_task(&t).map_err(err)?;
    let sec = &r.sections[0];
    ensure(r.complete && sec.candidates == STAT_SAMPLES, || "statistical scan incomplete".into())?;
    ensure(sec.ic_count == 0 && sec.violations == 0, || format!("n=4 t=7: {} IC, {} violations", sec.ic_count, sec.violations))?;
    parts.push(format!(
        "statistical n=4 t=7: 0 IC in {STAT_SAMPLES} samples, max s_mu {} ({:.0}s)",
        sec.max_s_mu.unwrap_or(0),
        start.elapsed().as_secs_f64()
    ));
    all.extend(r.sections.clone());
    let bad = necessity_violations(all);
    ensure(bad.is_empty(), || bad.join("; "))?;
    Ok(parts.join("; "))
}

fn criterion_8() -> Outcome {
    let mut t = task(SearchKind::ConjectureMaxent, 2, &[]);
    t.m = 2;
    t.samples = 500;
    t.seed = 8;
    t.ensemble = Ensemble::Haar;
    let r = run_task(&t).map_err(err)?;
    let violations: u64 = r.sections.iter().map(|s| s.violations).sum();
    ensure(r.verdict == Verdict::Consistent && violations == 0, || format!("{violations} violations"))?;
    let bell = PauliSubgroup::from_strs(&["XX", "ZZ"], true).map_err(err)?;
    let anc = AncillaSpec::MaximallyMixed(1);
    let s_mu = span_dimension(&bell, 1, &anc).map_err(err)?.s_mu;
    let d = oracle_span_rank(&bell, 1, &anc, DEFAULT_DENSE_CAP).map_err(err)?;
    ensure(s_mu == 1 && d == 1, || format!("Bell with mixed ancilla: s_mu {s_mu}, dense {d}"))?;
    Ok("500 Haar samples, 0 violations; mixed-ancilla Bell s_mu = 1".into())
}

fn all_paulis(n: usize) -> Vec<PauliString> {
    (0..1usize << (2 * n))
        .map(|code| {
            let letters: Vec<Letter> =
                (0..n).map(|q| Letter::from_bits((code >> (2 * q)) & 1 == 1, (code >> (2 * q + 1)) & 1 == 1)).collect();
            PauliString::from_letters(&letters, 0)
        })
        .collect()
}

fn min_eigenvalue(op: &DenseOperator) -> f64 {
    let d = op.dim();
    let m = DMatrix::from_fn(d, d, |i, j| op.get(i, j));
    m.symmetric_eigenvalues().iter().cloned().fold(f64::INFINITY, f64::min)
}

fn product(gens: &[PauliString], mask: usize, q: usize) -> PauliString {
    let mut g = PauliString::identity(q);
    for (j, x) in gens.iter().enumerate() {
        if (mask >> j) & 1 == 1 {
            g.mul_assign(x);
        }
    }
    g
}

fn criterion_9() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut counts = [0usize; 5];
    for i in 0..300 {
        let n = rng.gen_range(1..=3);
        let m = rng.gen_range(1..=3);
        let q = n + m;
        let s = random_stabilizer(q, &mut rng);

        // multiples rule
        let anc = match i % 3 {
            0 => AncillaSpec::Dense(DenseState::haar(m, &mut rng)),
            1 => AncillaSpec::MagicT(m),
            _ => AncillaSpec::Stabilizer(random_stabilizer(m, &mut rng)),
        };
        let r = span_dimension(&s, n, &anc).map_err(err)?;
        let p = r.p.ok_or("missing p")?;
        let k = r.k.ok_or_else(|| format!("instance {i}: s_mu {} is not a multiple of 2^(n-p)", r.s_mu))?;
        ensure(r.s_mu == k << (n - p), || format!("instance {i}: k inconsistent"))?;
        ensure((1 << p) <= k && k <= 1 << (2 * p), || format!("instance {i}: k={k} outside [2^p, 4^p], p={p}"))?;
        counts[0] += 1;

        // entanglement relations
        let dec = entanglement_decomposition(&s, n).map_err(err)?;
        ensure(2 * dec.p + dec.s_a.dim() + dec.s_b.dim() == q, || format!("instance {i}: 2p + dims != n + m"))?;
        ensure(s.project_range(0, n).dim() == n + dec.p, || format!("instance {i}: dim pi_n(S) != n + p"))?;
        ensure(s.project_range(n, q).dim() == m + dec.p, || format!("instance {i}: dim pi_m(S) != m + p"))?;
        ensure(entanglement(&s, n).map_err(err)? == dec.p, || format!("instance {i}: p disagrees"))?;
        counts[1] += 1;

        // generator alignment against I ⊗ Z
        let zanc = random_stabilizer(m, &mut rng);
        let z = zanc.embed(q, n);
        let al = align_generators(&s, &z).map_err(err)?;
        ensure(al.g_tilde.len() == al.h_tilde.len(), || "unpaired tilde generators".into())?;
        for (a, gt) in al.g_tilde.iter().enumerate() {
            for (b, ht) in al.h_tilde.iter().enumerate() {
                ensure(gt.commutes(ht) == (a != b), || format!("instance {i}: pattern broken at ({a},{b})"))?;
            }
        }
        let s_rebuilt: Vec<PauliString> = al.h.iter().chain(&al.g).chain(&al.g_tilde).cloned().collect();
        let z_rebuilt: Vec<PauliString> = al.h.iter().chain(&al.h_tilde).cloned().collect();
        ensure(
            PauliSubgroup::new(q, s_rebuilt, false).map_err(err)?.same_elements(&s.unsigned())
                && PauliSubgroup::new(q, z_rebuilt, false).map_err(err)?.same_elements(&z.unsigned()),
            || format!("instance {i}: aligned generators do not rebuild the inputs"),
        )?;
        counts[2] += 1;

        if i % 3 != 0 {
            continue;
        }
        // dense POVM: completeness, positivity, Fourier round trip and structure
        let id = DopedCircuit::new(n, m, Vec::new()).map_err(err)?;
        let basis = dense::basis_states(&s, DEFAULT_DENSE_CAP).map_err(err)?;
        let psi = DenseState::stabilizer_state(&zanc).map_err(err)?;
        let ops = dense::effective_povm(&id, &psi, &basis, DEFAULT_DENSE_CAP).map_err(err)?;
        let dim = 1 << n;
        let mut total = DenseOperator::zeros(dim);
        for op in &ops {
            total.add_assign(op, 1.0);
            ensure(op.max_abs_diff(&op.adjoint()) < OP_TOL, || format!("instance {i}: element not hermitian"))?;
            ensure(min_eigenvalue(op) > -PSD_TOL, || format!("instance {i}: negative eigenvalue"))?;
        }
        ensure(total.max_abs_diff(&DenseOperator::identity(dim)) < OP_TOL, || format!("instance {i}: incomplete"))?;
        counts[3] += 1;

        let primed = group_fourier(&ops, true).map_err(err)?;
        let back = group_fourier(&primed, false).map_err(err)?;
        for (a, b) in ops.iter().zip(&back) {
            ensure(a.max_abs_diff(b) < OP_TOL, || format!("instance {i}: Fourier round trip"))?;
        }
        let paulis = all_paulis(n);
        for (xi, op) in primed.iter().enumerate() {
            let g = product(s.generators(), xi, q);
            let (data, anc_part) = g.projective().split_at(n);
            let survives = zanc.contains_projective(&anc_part);
            let coeffs: Vec<(ProjectivePauli, f64)> = paulis
                .iter()
                .map(|p| (p.projective(), dense::trace_product(p, op).norm() / dim as f64))
                .filter(|(_, c)| *c > OP_TOL)
                .collect();
            let ok = if survives {
                coeffs.len() == 1 && coeffs[0].0 == data && (coeffs[0].1 - 1.0).abs() < OP_TOL
            } else {
                coeffs.is_empty()
            };
            ensure(ok, || format!("instance {i}: transformed element {xi} is not the predicted Pauli"))?;
        }
        counts[4] += 1;
    }
    Ok(format!(
        "multiples {}, entanglement relations {}, alignment {}, completeness/positivity {}, Fourier {}",
        counts[0], counts[1], counts[2], counts[3], counts[4]
    ))
}

fn main() {
    let suite_start = Instant::now();
    let mut sections = Vec::new();
    let criteria: Vec<(&str, Box<dyn FnOnce(&mut Vec<Section>) -> Outcome>)> = vec![
        ("golden worked examples", Box::new(|_| criterion_1())),
        ("Z-free centralizer counts", Box::new(|_| criterion_2())),
        ("universal circuit frame operator and IC", Box::new(|_| criterion_3())),
        ("stabilizer ancillas give 2^n", Box::new(|_| criterion_4())),
        ("group engine equals dense rank", Box::new(|_| criterion_5())),
        ("rank bound saturation and IC necessity", Box::new(criterion_6)),
        ("no IC below 2n at desk scale", Box::new(criterion_7)),
        ("maximal entanglement maximizes s_mu", Box::new(|_| criterion_8())),
        ("structural invariants", Box::new(|_| criterion_9())),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.into_iter().enumerate() {
        let start = Instant::now();
        let outcome = std::panic::catch_unwind(std::panic::AssertUnwindSafe(|| run(&mut sections)))
            .unwrap_or_else(|_| Err("panicked".into()));
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {}: PASS {name}: {detail} [{secs:.1}s]", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {}: FAIL {name}: {why} [{secs:.1}s]", i + 1);
            }
        }
    }
    println!("acceptance: {} of 9 passed in {:.0}s", 9 - failed, suite_start.elapsed().as_secs_f64());
    if failed > 0 {
        std::process::exit(1);
    }
}
