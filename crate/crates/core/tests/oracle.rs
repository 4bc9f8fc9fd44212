use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use stabspan::circuit::{random_clifford, universal_2n_circuit, DopedCircuit, Gate};
use stabspan::dense::{self, DenseState, DEFAULT_DENSE_CAP};
use stabspan::group::PauliSubgroup;
use stabspan::povm::*;

#[test]
fn gadget_example_is_ic() {
    let c = universal_2n_circuit(1);
    let meas = computational_basis(2);
    let anc = AncillaSpec::Stabilizer(computational_basis(1));
    let r = analyze_doped(&c, &meas, &anc).unwrap();
    assert_eq!(r.s_mu, 4);
    assert!(r.ic);
    assert_eq!(oracle_doped_rank(&c, &meas, &anc, DEFAULT_DENSE_CAP).unwrap(), 4);
}

#[test]
fn universal_circuits() {
    for n in 1..=3 {
        let c = universal_2n_circuit(n);
        let r = analyze_doped(&c, &computational_basis(2 * n), &AncillaSpec::Stabilizer(computational_basis(n))).unwrap();
        assert_eq!(r.s_mu, 1 << (2 * n), "n={n}");
    }
}

fn random_doped(rng: &mut ChaCha8Rng, n: usize, m: usize, t: usize) -> DopedCircuit {
    let q = n + m;
    let mut gates = random_clifford(q, rng).gates().to_vec();
    for _ in 0..t {
        gates.push(Gate::T(rng.gen_range(0..q)));
        gates.extend(random_clifford(q, rng).gates().iter().cloned());
    }
    DopedCircuit::new(n, m, gates).unwrap()
}

#[test]
fn random_doped_against_dense() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for i in 0..150 {
        let n = rng.gen_range(1..=3);
        let m = rng.gen_range(0..=2);
        let t = rng.gen_range(0..=4);
        let c = random_doped(&mut rng, n, m, t);
        let meas = computational_basis(n + m);
        let anc = match i % 3 {
            0 => AncillaSpec::Stabilizer(computational_basis(m)),
            1 => AncillaSpec::Dense(DenseState::haar(m, &mut rng)),
            _ => AncillaSpec::MagicT(m),
        };
        let r = analyze_doped(&c, &meas, &anc).unwrap();
        let d = oracle_doped_rank(&c, &meas, &anc, DEFAULT_DENSE_CAP).unwrap();
        assert_eq!(r.s_mu as usize, d, "instance {i}: n={n} m={m} t={t} {:?}", anc.label());
    }
}

#[test]
fn normal_form_matches_dense() {
    let s = PauliSubgroup::from_strs(&["ZZI", "ZIZ", "XXX"], true).unwrap();
    let z = PauliSubgroup::from_strs(&["X"], true).unwrap();
    let form = stabilizer_effective_povm(&s, &z, 2).unwrap();
    let id = DopedCircuit::new(2, 1, vec![]).unwrap();
    let basis = dense::basis_states(&s, 14).unwrap();
    let psi = DenseState::stabilizer_state(&z).unwrap();
    let ops = dense::effective_povm(&id, &psi, &basis, 14).unwrap();
    for (b, op) in ops.iter().enumerate() {
        let pred = form.element(b as u64).unwrap();
        assert!(pred.max_abs_diff(op) < 1e-10, "outcome {b}");
    }
}
