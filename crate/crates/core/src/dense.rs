//! Dense state-vector reference implementation.
//!
//! Everything here works on explicit amplitudes and matrices and shares no logic with
//! the symplectic code beyond reading the bits of a [`PauliString`]. It is the oracle
//! the group-theoretic results are checked against.
//!
//! Qubit 0 is the most significant bit of a basis index, so `XZ` acts as `X ⊗ Z`.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::circuit::{Circuit, DopedCircuit, Gate, GadgetizedCircuit};
use crate::error::{Error, Result};
use crate::exact::rank_real;
use crate::group::PauliSubgroup;
use crate::pauli::PauliString;

/// Default ceiling on the number of qubits the dense oracle will simulate.
pub const DEFAULT_DENSE_CAP: usize = 14;

/// Relative pivot tolerance for numerical ranks.
pub const RANK_TOL: f64 = 1e-9;

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

fn check_cap(qubits: usize, cap: usize) -> Result<()> {
    if qubits > cap {
        return Err(Error::DenseCap { qubits, cap });
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq)]
pub struct DenseState {
    n: usize,
    amps: Vec<Complex64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DenseOperator {
    dim: usize,
    data: Vec<Complex64>,
}

impl DenseState {
    pub fn zero_state(n: usize) -> Self {
        let mut amps = vec![ZERO; 1 << n];
        amps[0] = Complex64::new(1.0, 0.0);
        DenseState { n, amps }
    }

    pub fn basis_state(n: usize, index: usize) -> Self {
        let mut amps = vec![ZERO; 1 << n];
        amps[index] = Complex64::new(1.0, 0.0);
        DenseState { n, amps }
    }

    /// Normalizes the given amplitudes; their count must be a power of two.
    pub fn from_amplitudes(amps: Vec<Complex64>) -> Result<Self> {
        let len = amps.len();
        if len == 0 || !len.is_power_of_two() {
            return Err(Error::Invalid(format!("{len} amplitudes is not a power of two")));
        }
        let mut s = DenseState { n: len.trailing_zeros() as usize, amps };
        let norm = s.norm();
        if norm < 1e-12 {
            return Err(Error::Invalid("zero state vector".into()));
        }
        s.scale(1.0 / norm);
        Ok(s)
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    fn scale(&mut self, k: f64) {
        for a in &mut self.amps {
            *a *= k;
        }
    }

    pub fn tensor(&self, other: &DenseState) -> DenseState {
        let mut amps = Vec::with_capacity(self.amps.len() * other.amps.len());
        for a in &self.amps {
            for b in &other.amps {
                amps.push(a * b);
            }
        }
        DenseState { n: self.n + other.n, amps }
    }

    pub fn inner(&self, other: &DenseState) -> Complex64 {
        self.amps.iter().zip(&other.amps).map(|(a, b)| a.conj() * b).sum()
    }

    /// Haar-random pure state from normalized complex Gaussian amplitudes.
    pub fn haar<R: Rng>(n: usize, rng: &mut R) -> Self {
        let amps = (0..1usize << n)
            .map(|_| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
            .collect();
        DenseState::from_amplitudes(amps).expect("gaussian vector is nonzero")
    }

    /// `(T|+>)^{⊗t}`.
    pub fn t_power(t: usize) -> Self {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let one = DenseState { n: 1, amps: vec![Complex64::new(h, 0.0), Complex64::from_polar(h, std::f64::consts::FRAC_PI_4)] };
        (0..t).fold(DenseState { n: 0, amps: vec![Complex64::new(1.0, 0.0)] }, |acc, _| acc.tensor(&one))
    }

    /// The `+1` eigenstate of a maximal signed stabilizer group.
    pub fn stabilizer_state(group: &PauliSubgroup) -> Result<Self> {
        let states = basis_states(group, group.num_qubits() + 1)?;
        Ok(states.into_iter().next().expect("at least one outcome"))
    }

    fn apply_gate(&mut self, gate: &Gate, adjoint: bool) {
        let n = self.n;
        let mask = |q: usize| 1usize << (n - 1 - q);
        match *gate {
            Gate::H(q) => {
                let m = mask(q);
                let h = std::f64::consts::FRAC_1_SQRT_2;
                for i in 0..self.amps.len() {
                    if i & m == 0 {
                        let (a, b) = (self.amps[i], self.amps[i | m]);
                        self.amps[i] = (a + b) * h;
                        self.amps[i | m] = (a - b) * h;
                    }
                }
            }
            Gate::S(q) | Gate::T(q) => {
                let angle = if matches!(gate, Gate::S(_)) { std::f64::consts::FRAC_PI_2 } else { std::f64::consts::FRAC_PI_4 };
                let ph = Complex64::from_polar(1.0, if adjoint { -angle } else { angle });
                let m = mask(q);
                for (i, a) in self.amps.iter_mut().enumerate() {
                    if i & m != 0 {
                        *a *= ph;
                    }
                }
            }
            Gate::Cnot { control, target } => {
                let (mc, mt) = (mask(control), mask(target));
                for i in 0..self.amps.len() {
                    if i & mc != 0 && i & mt == 0 {
                        self.amps.swap(i, i | mt);
                    }
                }
            }
        }
    }

    /// Projects qubits `keep..n` onto `|0...0>` and drops them (no renormalization).
    fn project_tail_zero(&self, keep: usize) -> DenseState {
        let tail = self.n - keep;
        let amps = (0..1usize << keep).map(|i| self.amps[i << tail]).collect();
        DenseState { n: keep, amps }
    }
}

impl DenseOperator {
    pub fn zeros(dim: usize) -> Self {
        DenseOperator { dim, data: vec![ZERO; dim * dim] }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = DenseOperator::zeros(dim);
        for i in 0..dim {
            m.data[i * dim + i] = Complex64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_rows(dim: usize, data: Vec<Complex64>) -> Result<Self> {
        if data.len() != dim * dim {
            return Err(Error::Invalid(format!("{} entries for a {dim}x{dim} matrix", data.len())));
        }
        Ok(DenseOperator { dim, data })
    }

    pub fn outer(v: &[Complex64]) -> Self {
        let dim = v.len();
        let mut data = Vec::with_capacity(dim * dim);
        for a in v {
            for b in v {
                data.push(a * b.conj());
            }
        }
        DenseOperator { dim, data }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.data[i * self.dim + j]
    }

    pub fn data(&self) -> &[Complex64] {
        &self.data
    }

    pub fn add_assign(&mut self, other: &DenseOperator, k: f64) {
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a += b * k;
        }
    }

    pub fn max_abs_diff(&self, other: &DenseOperator) -> f64 {
        self.data.iter().zip(&other.data).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }

    pub fn adjoint(&self) -> DenseOperator {
        let d = self.dim;
        let data = (0..d * d).map(|k| self.data[(k % d) * d + k / d].conj()).collect();
        DenseOperator { dim: d, data }
    }

    pub fn matmul(&self, other: &DenseOperator) -> DenseOperator {
        let d = self.dim;
        let mut out = DenseOperator::zeros(d);
        for i in 0..d {
            for k in 0..d {
                let a = self.data[i * d + k];
                if a == ZERO {
                    continue;
                }
                for j in 0..d {
                    out.data[i * d + j] += a * other.data[k * d + j];
                }
            }
        }
        out
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim).map(|i| self.data[i * self.dim + i]).sum()
    }

    /// Real coordinates of a hermitian matrix in an orthonormal basis of hermitian matrices.
    pub fn hermitian_coordinates(&self) -> Vec<f64> {
        let d = self.dim;
        let r2 = std::f64::consts::SQRT_2;
        let mut v = Vec::with_capacity(d * d);
        for i in 0..d {
            v.push(self.data[i * d + i].re);
            for j in i + 1..d {
                let z = self.data[i * d + j];
                v.push(z.re * r2);
                v.push(z.im * r2);
            }
        }
        v
    }
}

/// Dense matrix of a Pauli operator.
pub fn pauli_matrix(p: &PauliString) -> DenseOperator {
    let n = p.num_qubits();
    let dim = 1usize << n;
    let (xm, zm) = masks(p);
    let ph = phase_of(p.phase_exp());
    let mut m = DenseOperator::zeros(dim);
    for k in 0..dim {
        let sign = if (k & zm).count_ones() % 2 == 1 { -1.0 } else { 1.0 };
        m.data[(k ^ xm) * dim + k] = ph * sign;
    }
    m
}

fn phase_of(k: u8) -> Complex64 {
    match k & 3 {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, 1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, -1.0),
    }
}

fn masks(p: &PauliString) -> (usize, usize) {
    let n = p.num_qubits();
    let mut xm = 0usize;
    let mut zm = 0usize;
    for q in 0..n {
        let bit = 1usize << (n - 1 - q);
        if p.x().get(q) {
            xm |= bit;
        }
        if p.z().get(q) {
            zm |= bit;
        }
    }
    (xm, zm)
}

/// `P |psi>`.
pub fn apply_pauli(p: &PauliString, psi: &DenseState) -> DenseState {
    let (xm, zm) = masks(p);
    let ph = phase_of(p.phase_exp());
    let mut out = vec![ZERO; psi.amps.len()];
    for (i, a) in psi.amps.iter().enumerate() {
        let sign = if (i & zm).count_ones() % 2 == 1 { -1.0 } else { 1.0 };
        out[i ^ xm] = a * ph * sign;
    }
    DenseState { n: psi.n, amps: out }
}

/// `<psi| P |psi>`.
pub fn pauli_expectation(psi: &DenseState, p: &PauliString) -> Complex64 {
    psi.inner(&apply_pauli(p, psi))
}

/// `U |psi>` for a Clifford+T circuit.
pub fn simulate(circuit: &Circuit, psi: &DenseState, cap: usize) -> Result<DenseState> {
    check_cap(circuit.num_qubits(), cap)?;
    if psi.n != circuit.num_qubits() {
        return Err(Error::SizeMismatch { expected: circuit.num_qubits(), got: psi.n });
    }
    let mut out = psi.clone();
    for g in circuit.gates() {
        out.apply_gate(g, false);
    }
    Ok(out)
}

/// `U^dagger |psi>`.
pub fn simulate_adjoint(circuit: &Circuit, psi: &DenseState, cap: usize) -> Result<DenseState> {
    check_cap(circuit.num_qubits(), cap)?;
    if psi.n != circuit.num_qubits() {
        return Err(Error::SizeMismatch { expected: circuit.num_qubits(), got: psi.n });
    }
    let mut out = psi.clone();
    for g in circuit.gates().iter().rev() {
        out.apply_gate(g, true);
    }
    Ok(out)
}

/// Runs the gadgetized Clifford circuit with `T|+>` gadget inputs and projects every
/// gadget onto `|0>`. The result is `2^{-t/2} U |psi>` for the original circuit `U`.
pub fn simulate_gadgetized(g: &GadgetizedCircuit, psi: &DenseState, cap: usize) -> Result<DenseState> {
    let base = g.n_data + g.n_ancilla;
    if psi.n != base {
        return Err(Error::SizeMismatch { expected: base, got: psi.n });
    }
    let full = psi.tensor(&DenseState::t_power(g.t_count()));
    let out = simulate(&g.clifford, &full, cap)?;
    Ok(out.project_tail_zero(base))
}

/// Orthonormal eigenbasis of a maximal signed stabilizer group. Entry `b` is the joint
/// eigenvector where generator `j` has eigenvalue `(-1)^{bit j of b}`.
pub fn basis_states(group: &PauliSubgroup, cap: usize) -> Result<Vec<DenseState>> {
    let n = group.num_qubits();
    check_cap(n, cap)?;
    if !group.is_maximal() {
        return Err(Error::NotMaximal { dim: group.dim(), n });
    }
    let gens = group.generators();
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut out = Vec::with_capacity(1 << n);
    for b in 0..1usize << n {
        let mut attempt = 0;
        loop {
            let mut v = DenseState::haar(n, &mut rng);
            for (j, g) in gens.iter().enumerate() {
                let gv = apply_pauli(g, &v);
                let s = if (b >> j) & 1 == 1 { -0.5 } else { 0.5 };
                for (a, x) in v.amps.iter_mut().zip(&gv.amps) {
                    *a = *a * 0.5 + x * s;
                }
            }
            let norm = v.norm();
            if norm > 1e-6 {
                v.scale(1.0 / norm);
                out.push(v);
                break;
            }
            attempt += 1;
            if attempt > 16 {
                return Err(Error::Invalid("failed to construct a stabilizer basis state".into()));
            }
        }
    }
    Ok(out)
}

/// Effective POVM on the data register:
/// `mu_b = (I ⊗ <psi|) U^dagger |Phi_b><Phi_b| U (I ⊗ |psi>)`.
pub fn effective_povm(
    circuit: &DopedCircuit,
    psi: &DenseState,
    basis: &[DenseState],
    cap: usize,
) -> Result<Vec<DenseOperator>> {
    let (n, m) = (circuit.n_data, circuit.n_ancilla);
    check_cap(n + m, cap)?;
    if psi.n != m {
        return Err(Error::SizeMismatch { expected: m, got: psi.n });
    }
    let dm = 1usize << m;
    basis
        .iter()
        .map(|phi| {
            let v = simulate_adjoint(&circuit.circuit, phi, cap)?;
            let w: Vec<Complex64> = (0..1usize << n)
                .map(|i| (0..dm).map(|j| psi.amps[j].conj() * v.amps[i * dm + j]).sum())
                .collect();
            Ok(DenseOperator::outer(&w))
        })
        .collect()
}

/// Same as [`effective_povm`] with a mixed ancilla state `rho`.
pub fn effective_povm_mixed(
    circuit: &DopedCircuit,
    rho: &DenseOperator,
    basis: &[DenseState],
    cap: usize,
) -> Result<Vec<DenseOperator>> {
    let (n, m) = (circuit.n_data, circuit.n_ancilla);
    check_cap(n + m, cap)?;
    let dm = 1usize << m;
    if rho.dim != dm {
        return Err(Error::SizeMismatch { expected: dm, got: rho.dim });
    }
    let dn = 1usize << n;
    basis
        .iter()
        .map(|phi| {
            let v = simulate_adjoint(&circuit.circuit, phi, cap)?;
            let mut out = DenseOperator::zeros(dn);
            for i in 0..dn {
                for i2 in 0..dn {
                    let mut acc = ZERO;
                    for j in 0..dm {
                        for k in 0..dm {
                            acc += v.amps[i * dm + j] * v.amps[i2 * dm + k].conj() * rho.get(k, j);
                        }
                    }
                    out.data[i * dn + i2] = acc;
                }
            }
            Ok(out)
        })
        .collect()
}

/// Dimension of the real span of hermitian operators.
pub fn span_rank(ops: &[DenseOperator], tol: f64) -> usize {
    let rows: Vec<Vec<f64>> = ops.iter().map(|o| o.hermitian_coordinates()).collect();
    rank_real(&rows, tol)
}

/// Frame operator `sum_b |mu_b>><<mu_b|` in the orthonormal Pauli basis `P / sqrt(d)`,
/// basis ordered `I, X, Y, Z` per qubit with qubit 0 most significant.
pub fn frame_operator(ops: &[DenseOperator]) -> Vec<Vec<f64>> {
    let Some(first) = ops.first() else {
        return Vec::new();
    };
    let d = first.dim;
    let n = d.trailing_zeros() as usize;
    let paulis: Vec<PauliString> = (0..1usize << (2 * n))
        .map(|idx| {
            let letters: Vec<crate::pauli::Letter> = (0..n)
                .map(|q| match (idx >> (2 * (n - 1 - q))) & 3 {
                    0 => crate::pauli::Letter::I,
                    1 => crate::pauli::Letter::X,
                    2 => crate::pauli::Letter::Y,
                    _ => crate::pauli::Letter::Z,
                })
                .collect();
            PauliString::from_letters(&letters, 0)
        })
        .collect();
    let norm = (d as f64).sqrt();
    let coords: Vec<Vec<f64>> = ops
        .iter()
        .map(|mu| paulis.iter().map(|p| trace_product(p, mu).re / norm).collect())
        .collect();
    let k = paulis.len();
    let mut f = vec![vec![0.0; k]; k];
    for c in &coords {
        for i in 0..k {
            for j in 0..k {
                f[i][j] += c[i] * c[j];
            }
        }
    }
    f
}

/// `Tr(P mu)`.
pub fn trace_product(p: &PauliString, mu: &DenseOperator) -> Complex64 {
    let (xm, zm) = masks(p);
    let ph = phase_of(p.phase_exp());
    let mut acc = ZERO;
    for k in 0..mu.dim {
        let sign = if (k & zm).count_ones() % 2 == 1 { -1.0 } else { 1.0 };
        acc += ph * sign * mu.get(k, k ^ xm);
    }
    acc
}

/// JSON dump of a matrix: `{"dim": d, "data": [[re, im], ...]}` in row-major order.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct MatrixDump {
    pub dim: usize,
    pub data: Vec<[f64; 2]>,
}

impl From<&DenseOperator> for MatrixDump {
    fn from(m: &DenseOperator) -> Self {
        MatrixDump { dim: m.dim, data: m.data.iter().map(|z| [z.re, z.im]).collect() }
    }
}

impl MatrixDump {
    pub fn to_operator(&self) -> Result<DenseOperator> {
        DenseOperator::from_rows(self.dim, self.data.iter().map(|[re, im]| Complex64::new(*re, *im)).collect())
    }
}

/// File format of a dense ancilla: `{"qubits": m, "amplitudes": [[re, im], ...]}`.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct StateFile {
    pub qubits: usize,
    pub amplitudes: Vec<[f64; 2]>,
}

impl StateFile {
    pub fn to_state(&self) -> Result<DenseState> {
        if self.amplitudes.len() != 1usize << self.qubits {
            return Err(Error::Invalid(format!(
                "{} amplitudes for {} qubits",
                self.amplitudes.len(),
                self.qubits
            )));
        }
        DenseState::from_amplitudes(self.amplitudes.iter().map(|[re, im]| Complex64::new(*re, *im)).collect())
    }

    pub fn from_state(s: &DenseState) -> Self {
        StateFile { qubits: s.n, amplitudes: s.amps.iter().map(|z| [z.re, z.im]).collect() }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::{gadgetize, random_clifford_seeded, universal_2n_circuit, Direction};
    use crate::pauli::pauli;

    fn close(a: Complex64, b: Complex64) -> bool {
        (a - b).norm() < 1e-10
    }

    #[test]
    fn pauli_matrices_multiply_like_paulis() {
        for (a, b) in [("XY", "ZY"), ("YI", "XZ"), ("-iZX", "YY")] {
            let (pa, pb) = (pauli(a), pauli(b));
            let lhs = pauli_matrix(&pa).matmul(&pauli_matrix(&pb));
            let rhs = pauli_matrix(&(&pa * &pb));
            assert!(lhs.max_abs_diff(&rhs) < 1e-12, "{a} * {b}");
        }
    }

    #[test]
    fn clifford_simulation_matches_heisenberg_picture() {
        let c = random_clifford_seeded(3, 11);
        let psi = DenseState::haar(3, &mut ChaCha8Rng::seed_from_u64(3));
        let u_psi = simulate(&c, &psi, DEFAULT_DENSE_CAP).unwrap();
        for s in ["XIZ", "YYI", "IZX"] {
            let p = pauli(s);
            let evolved = crate::circuit::evolve_pauli(&c, &p, Direction::Adjoint).unwrap();
            // <U psi| P |U psi> = <psi| U^dagger P U |psi>
            assert!(close(pauli_expectation(&u_psi, &p), pauli_expectation(&psi, &evolved)));
        }
    }

    #[test]
    fn gadgets_reproduce_t_gates() {
        let c = universal_2n_circuit(1);
        let g = gadgetize(&c);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..50 {
            let psi = DenseState::haar(2, &mut rng);
            let direct = simulate(&c.circuit, &psi, DEFAULT_DENSE_CAP).unwrap();
            let mut via = simulate_gadgetized(&g, &psi, DEFAULT_DENSE_CAP).unwrap();
            via.scale(2f64.powf(g.t_count() as f64 / 2.0));
            for (a, b) in direct.amplitudes().iter().zip(via.amplitudes()) {
                assert!(close(*a, *b));
            }
        }
    }

    #[test]
    fn stabilizer_basis_is_orthonormal_eigenbasis() {
        let g = PauliSubgroup::from_strs(&["XX", "-ZZ"], true).unwrap();
        let states = basis_states(&g, DEFAULT_DENSE_CAP).unwrap();
        for (b, s) in states.iter().enumerate() {
            for (j, gen) in g.generators().iter().enumerate() {
                let want = if (b >> j) & 1 == 1 { -1.0 } else { 1.0 };
                assert!(close(pauli_expectation(s, gen), Complex64::new(want, 0.0)));
            }
            for s2 in &states[b + 1..] {
                assert!(s.inner(s2).norm() < 1e-10);
            }
        }
    }

    #[test]
    fn cap_is_enforced() {
        let c = Circuit::empty(3);
        assert!(matches!(simulate(&c, &DenseState::zero_state(3), 2), Err(Error::DenseCap { .. })));
    }

    #[test]
    fn matrix_dump_roundtrip() {
        let m = pauli_matrix(&pauli("Y"));
        let d = MatrixDump::from(&m);
        assert_eq!(d.data[1], [0.0, -1.0]);
        assert_eq!(d.to_operator().unwrap(), m);
    }
}
