use criterion::{black_box, criterion_group, criterion_main, BatchSize, Criterion};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use stabspan::circuit::{evolve_paulis, random_clifford_seeded, universal_2n_circuit, Direction};
use stabspan::group::{zfree_centralizer_count, PauliSubgroup};
use stabspan::povm::{analyze_doped, computational_basis, oracle_doped_rank, span_dimension, AncillaSpec};
use stabspan::search::{random_doped_circuit, run_task, Layout, SearchKind, SearchTask};

fn span(c: &mut Criterion) {
    let s = PauliSubgroup::from_strs(&["ZXZZY", "XIIIZ", "XIIZZ", "ZXYZX", "ZIYZX"], true).unwrap();
    c.bench_function("span_dimension 2+3 T^3", |b| b.iter(|| span_dimension(black_box(&s), 2, &AncillaSpec::MagicT(3))));
}

fn doped(c: &mut Criterion) {
    let meas = computational_basis(8);
    let anc = AncillaSpec::Stabilizer(computational_basis(4));
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    c.bench_function("analyze_doped n=m=4 t=7", |b| {
        b.iter_batched(
            || random_doped_circuit(4, 4, 7, Layout::Serial, &mut rng),
            |circ| analyze_doped(&circ, &meas, &anc).unwrap(),
            BatchSize::SmallInput,
        )
    });
    let u = universal_2n_circuit(2);
    let anc2 = AncillaSpec::Stabilizer(computational_basis(2));
    let meas2 = computational_basis(4);
    c.bench_function("dense oracle universal n=2", |b| {
        b.iter(|| oracle_doped_rank(black_box(&u), &meas2, &anc2, 14).unwrap())
    });
}

fn evolution(c: &mut Criterion) {
    let circ = random_clifford_seeded(16, 3);
    let strings: Vec<_> = (0..16).map(|q| stabspan::PauliString::single(16, q, stabspan::Letter::Z)).collect();
    c.bench_function("evolve 16 strings through 1028 gates", |b| {
        b.iter(|| evolve_paulis(black_box(&circ), &strings, Direction::Forward).unwrap())
    });
}

fn counting(c: &mut Criterion) {
    let h = PauliSubgroup::from_strs(&["IIXZIIXZ", "XZIIXZII"], false).unwrap();
    c.bench_function("zfree centralizer count t=8", |b| b.iter(|| zfree_centralizer_count(black_box(&h)).unwrap()));
}

fn search(c: &mut Criterion) {
    let mut task = SearchTask::new(SearchKind::Conjecture2n, 2);
    task.t = vec![3];
    task.symmetry = false;
    c.bench_function("exhaustive conjecture scan n=2 t=3", |b| b.iter(|| run_task(black_box(&task)).unwrap()));
}

criterion_group!(benches, span, doped, evolution, counting, search);
criterion_main!(benches);
