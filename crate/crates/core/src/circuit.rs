//! Clifford+T circuits, Heisenberg evolution of Pauli groups, and T-gadgets.
//!
//! Gate lists are in execution order: the first gate acts first on the input state.

use std::fmt;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::bits::BitVec;
use crate::error::{Error, Result};
use crate::group::PauliSubgroup;
use crate::pauli::PauliString;

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Gate {
    H(usize),
    S(usize),
    Cnot { control: usize, target: usize },
    T(usize),
}

impl Gate {
    pub fn qubits(&self) -> Vec<usize> {
        match *self {
            Gate::H(q) | Gate::S(q) | Gate::T(q) => vec![q],
            Gate::Cnot { control, target } => vec![control, target],
        }
    }

    pub fn is_clifford(&self) -> bool {
        !matches!(self, Gate::T(_))
    }
}

impl fmt::Display for Gate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Gate::H(q) => write!(f, "H {q}"),
            Gate::S(q) => write!(f, "S {q}"),
            Gate::T(q) => write!(f, "T {q}"),
            Gate::Cnot { control, target } => write!(f, "CNOT {control} {target}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Circuit {
    n: usize,
    gates: Vec<Gate>,
}

impl Circuit {
    pub fn new(n: usize, gates: Vec<Gate>) -> Result<Self> {
        for g in &gates {
            for q in g.qubits() {
                if q >= n {
                    return Err(Error::QubitOutOfRange { index: q, n });
                }
            }
            if let Gate::Cnot { control, target } = g {
                if control == target {
                    return Err(Error::Invalid(format!("CNOT with control = target = {control}")));
                }
            }
        }
        Ok(Circuit { n, gates })
    }

    pub fn empty(n: usize) -> Self {
        Circuit { n, gates: Vec::new() }
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn push(&mut self, g: Gate) -> Result<()> {
        for q in g.qubits() {
            if q >= self.n {
                return Err(Error::QubitOutOfRange { index: q, n: self.n });
            }
        }
        self.gates.push(g);
        Ok(())
    }

    pub fn extend(&mut self, other: &Circuit) -> Result<()> {
        if other.n != self.n {
            return Err(Error::SizeMismatch { expected: self.n, got: other.n });
        }
        self.gates.extend_from_slice(&other.gates);
        Ok(())
    }

    pub fn t_count(&self) -> usize {
        self.gates.iter().filter(|g| !g.is_clifford()).count()
    }

    pub fn is_clifford(&self) -> bool {
        self.gates.iter().all(Gate::is_clifford)
    }

    /// Same gates acting on a larger register, shifted by `offset`.
    pub fn widen(&self, total: usize, offset: usize) -> Circuit {
        let shift = |q: usize| q + offset;
        let gates = self
            .gates
            .iter()
            .map(|g| match *g {
                Gate::H(q) => Gate::H(shift(q)),
                Gate::S(q) => Gate::S(shift(q)),
                Gate::T(q) => Gate::T(shift(q)),
                Gate::Cnot { control, target } => Gate::Cnot { control: shift(control), target: shift(target) },
            })
            .collect();
        Circuit { n: total, gates }
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Direction {
    /// `P -> U P U^dagger`
    Forward,
    /// `P -> U^dagger P U`
    Adjoint,
}

/// `P -> G P G^dagger`, or `G^dagger P G` when `adjoint`, in place.
fn conjugate_in_place(gate: &Gate, p: &mut PauliString, adjoint: bool) -> Result<()> {
    let (x, z, phase) = p.raw_mut();
    match *gate {
        Gate::H(q) => {
            // H X^a Z^b H = Z^a X^b = (-1)^{ab} X^b Z^a
            let (a, b) = (x.get(q), z.get(q));
            if a && b {
                *phase = (*phase + 2) & 3;
            }
            x.set(q, b);
            z.set(q, a);
        }
        Gate::S(q) => {
            // S X S^dagger = Y = i X Z, S^dagger X S = -Y
            if x.get(q) {
                *phase = (*phase + if adjoint { 3 } else { 1 }) & 3;
                z.flip(q);
            }
        }
        Gate::Cnot { control, target } => {
            if x.get(control) {
                x.flip(target);
            }
            if z.get(target) {
                z.flip(control);
            }
        }
        Gate::T(q) => {
            if x.get(q) {
                return Err(Error::Invalid(format!("T on qubit {q} does not map {p} to a Pauli")));
            }
        }
    }
    Ok(())
}

/// `P -> G P G^dagger` for a single Clifford gate.
pub fn conjugate(gate: &Gate, p: &PauliString) -> Result<PauliString> {
    let mut out = p.clone();
    conjugate_in_place(gate, &mut out, false)?;
    Ok(out)
}

/// `P -> G^dagger P G` for a single Clifford gate.
pub fn conjugate_adjoint(gate: &Gate, p: &PauliString) -> Result<PauliString> {
    let mut out = p.clone();
    conjugate_in_place(gate, &mut out, true)?;
    Ok(out)
}

pub fn evolve_pauli(circuit: &Circuit, p: &PauliString, direction: Direction) -> Result<PauliString> {
    if p.num_qubits() != circuit.num_qubits() {
        return Err(Error::SizeMismatch { expected: circuit.num_qubits(), got: p.num_qubits() });
    }
    let adjoint = direction == Direction::Adjoint;
    let gates: Box<dyn Iterator<Item = &Gate>> =
        if adjoint { Box::new(circuit.gates().iter().rev()) } else { Box::new(circuit.gates().iter()) };
    if p.num_qubits() <= 64 {
        return evolve_packed(gates, p, adjoint);
    }
    let mut out = p.clone();
    for g in gates {
        conjugate_in_place(g, &mut out, adjoint)?;
    }
    Ok(out)
}

/// [`conjugate_in_place`] on single-word bit masks.
fn evolve_packed<'a>(gates: impl Iterator<Item = &'a Gate>, p: &PauliString, adjoint: bool) -> Result<PauliString> {
    let n = p.num_qubits();
    let word = |b: &BitVec| b.words().first().copied().unwrap_or(0);
    let (mut x, mut z, mut phase) = (word(p.x()), word(p.z()), p.phase_exp());
    for g in gates {
        match *g {
            Gate::H(q) => {
                let (a, b) = ((x >> q) & 1, (z >> q) & 1);
                if a & b == 1 {
                    phase = (phase + 2) & 3;
                }
                x ^= (a ^ b) << q;
                z ^= (a ^ b) << q;
            }
            Gate::S(q) => {
                if (x >> q) & 1 == 1 {
                    phase = (phase + if adjoint { 3 } else { 1 }) & 3;
                    z ^= 1 << q;
                }
            }
            Gate::Cnot { control, target } => {
                x ^= ((x >> control) & 1) << target;
                z ^= ((z >> target) & 1) << control;
            }
            Gate::T(q) => {
                if (x >> q) & 1 == 1 {
                    return Err(Error::Invalid(format!("T on qubit {q} does not map the evolved {p} to a Pauli")));
                }
            }
        }
    }
    Ok(PauliString::from_xz(BitVec::from_u64(n, x), BitVec::from_u64(n, z), phase))
}

/// Evolves up to 64 Pauli strings at once, bit-sliced across strings: word `q` of `xs`
/// holds the `X` bit of qubit `q` for every string, and the phase is a 2-bit counter.
pub fn evolve_paulis(circuit: &Circuit, ps: &[PauliString], direction: Direction) -> Result<Vec<PauliString>> {
    if ps.len() > 64 {
        return ps.iter().map(|p| evolve_pauli(circuit, p, direction)).collect();
    }
    let n = circuit.num_qubits();
    if let Some(p) = ps.iter().find(|p| p.num_qubits() != n) {
        return Err(Error::SizeMismatch { expected: n, got: p.num_qubits() });
    }
    let (mut xs, mut zs) = (vec![0u64; n], vec![0u64; n]);
    let (mut ph0, mut ph1) = (0u64, 0u64);
    for (i, p) in ps.iter().enumerate() {
        for q in p.x().iter_ones() {
            xs[q] |= 1 << i;
        }
        for q in p.z().iter_ones() {
            zs[q] |= 1 << i;
        }
        ph0 |= ((p.phase_exp() & 1) as u64) << i;
        ph1 |= ((p.phase_exp() >> 1) as u64) << i;
    }
    let adjoint = direction == Direction::Adjoint;
    let gates: Box<dyn Iterator<Item = &Gate>> =
        if adjoint { Box::new(circuit.gates().iter().rev()) } else { Box::new(circuit.gates().iter()) };
    for g in gates {
        match *g {
            Gate::H(q) => {
                ph1 ^= xs[q] & zs[q];
                std::mem::swap(&mut xs[q], &mut zs[q]);
            }
            Gate::S(q) => {
                let mask = xs[q];
                if adjoint {
                    ph1 ^= !ph0 & mask;
                } else {
                    ph1 ^= ph0 & mask;
                }
                ph0 ^= mask;
                zs[q] ^= mask;
            }
            Gate::Cnot { control, target } => {
                xs[target] ^= xs[control];
                zs[control] ^= zs[target];
            }
            Gate::T(q) => {
                if xs[q] != 0 {
                    return Err(Error::Invalid(format!("T on qubit {q} does not map every string to a Pauli")));
                }
            }
        }
    }
    Ok((0..ps.len())
        .map(|i| {
            let bits = |w: &[u64]| BitVec::from_bools(&w.iter().map(|v| (v >> i) & 1 == 1).collect::<Vec<_>>());
            let phase = (((ph1 >> i) & 1) << 1 | ((ph0 >> i) & 1)) as u8;
            PauliString::from_xz(bits(&xs), bits(&zs), phase)
        })
        .collect())
}

/// Evolves every generator of `group`, keeping signs and generator order.
pub fn heisenberg_evolve(circuit: &Circuit, group: &PauliSubgroup, direction: Direction) -> Result<PauliSubgroup> {
    if !circuit.is_clifford() {
        return Err(Error::Invalid("Heisenberg evolution needs a Clifford circuit; gadgetize T gates first".into()));
    }
    let gens = group
        .generators()
        .iter()
        .map(|g| evolve_pauli(circuit, g, direction))
        .collect::<Result<Vec<_>>>()?;
    PauliSubgroup::new(group.num_qubits(), gens, group.is_signed())
}

/// Random Clifford circuit of `4 n^2 + 4` gates drawn uniformly from `{H, S, CNOT}`;
/// empty when `n = 0`.
pub fn random_clifford<R: Rng>(n: usize, rng: &mut R) -> Circuit {
    if n == 0 {
        return Circuit::empty(0);
    }
    let len = 4 * n * n + 4;
    let mut gates = Vec::with_capacity(len);
    for _ in 0..len {
        let kind = if n >= 2 { rng.gen_range(0..3) } else { rng.gen_range(0..2) };
        let q = rng.gen_range(0..n);
        gates.push(match kind {
            0 => Gate::H(q),
            1 => Gate::S(q),
            _ => {
                let mut t = rng.gen_range(0..n - 1);
                if t >= q {
                    t += 1;
                }
                Gate::Cnot { control: q, target: t }
            }
        });
    }
    Circuit { n, gates }
}

pub fn random_clifford_seeded(n: usize, seed: u64) -> Circuit {
    random_clifford(n, &mut ChaCha8Rng::seed_from_u64(seed))
}

/// Clifford+T circuit on `n_data` data qubits followed by `n_ancilla` ancilla qubits.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DopedCircuit {
    pub n_data: usize,
    pub n_ancilla: usize,
    pub circuit: Circuit,
}

impl DopedCircuit {
    pub fn new(n_data: usize, n_ancilla: usize, gates: Vec<Gate>) -> Result<Self> {
        Ok(DopedCircuit { n_data, n_ancilla, circuit: Circuit::new(n_data + n_ancilla, gates)? })
    }

    pub fn num_qubits(&self) -> usize {
        self.n_data + self.n_ancilla
    }

    pub fn t_count(&self) -> usize {
        self.circuit.t_count()
    }

    pub fn gates(&self) -> &[Gate] {
        self.circuit.gates()
    }
}

/// Clifford circuit on `n + m + t` qubits where the `k`-th T gate on qubit `q` became
/// `CNOT(q -> n + m + k)`. Each gadget qubit starts in `T|+>` and is projected onto `|0>`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GadgetizedCircuit {
    pub n_data: usize,
    pub n_ancilla: usize,
    pub clifford: Circuit,
    /// Qubit each T gate acted on, in execution order.
    pub t_sites: Vec<usize>,
}

impl GadgetizedCircuit {
    pub fn t_count(&self) -> usize {
        self.t_sites.len()
    }

    pub fn gadget_qubits(&self) -> std::ops::Range<usize> {
        let base = self.n_data + self.n_ancilla;
        base..base + self.t_sites.len()
    }

    /// Index of the gadget qubit that hosts the `k`-th T gate.
    pub fn gadget_qubit(&self, k: usize) -> usize {
        self.n_data + self.n_ancilla + k
    }

    /// Removes the gadget qubits and puts the T gates back.
    pub fn ungadgetize(&self) -> Result<DopedCircuit> {
        let base = self.n_data + self.n_ancilla;
        let mut gates = Vec::new();
        for g in self.clifford.gates() {
            match *g {
                Gate::Cnot { control, target } if target >= base => {
                    let k = target - base;
                    if self.t_sites.get(k) != Some(&control) {
                        return Err(Error::Invalid(format!("gadget {k} is not driven by its T site")));
                    }
                    gates.push(Gate::T(control));
                }
                _ => {
                    if g.qubits().iter().any(|&q| q >= base) {
                        return Err(Error::Invalid(format!("gate {g} touches a gadget qubit")));
                    }
                    gates.push(*g);
                }
            }
        }
        DopedCircuit::new(self.n_data, self.n_ancilla, gates)
    }
}

pub fn gadgetize(circuit: &DopedCircuit) -> GadgetizedCircuit {
    let base = circuit.num_qubits();
    let total = base + circuit.t_count();
    let mut gates = Vec::with_capacity(circuit.gates().len());
    let mut t_sites = Vec::new();
    for g in circuit.gates() {
        match *g {
            Gate::T(q) => {
                gates.push(Gate::Cnot { control: q, target: base + t_sites.len() });
                t_sites.push(q);
            }
            other => gates.push(other),
        }
    }
    GadgetizedCircuit {
        n_data: circuit.n_data,
        n_ancilla: circuit.n_ancilla,
        clifford: Circuit { n: total, gates },
        t_sites,
    }
}

/// Tensor power of the two-qubit block `(H T)_d CX(a -> d) (H T H)_a CX(d -> a)` pairing
/// data qubit `i` with ancilla `n + i`; `m = n` and `t = 2n`.
pub fn universal_2n_circuit(n: usize) -> DopedCircuit {
    let mut gates = Vec::with_capacity(7 * n);
    for i in 0..n {
        let a = n + i;
        gates.extend([
            Gate::Cnot { control: i, target: a },
            Gate::H(a),
            Gate::T(a),
            Gate::H(a),
            Gate::Cnot { control: a, target: i },
            Gate::T(i),
            Gate::H(i),
        ]);
    }
    DopedCircuit::new(n, n, gates).expect("well-formed construction")
}

/// Parses the text circuit format: a `qubits <n> <m>` header followed by one gate per
/// line (`H q`, `S q`, `T q`, `CNOT c t`). `#` starts a comment.
pub fn parse_circuit(text: &str) -> Result<DopedCircuit> {
    let mut header: Option<(usize, usize)> = None;
    let mut gates = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let lineno = i + 1;
        let body = line.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let toks: Vec<&str> = body.split_whitespace().collect();
        let num = |s: &str| -> Result<usize> {
            s.parse::<usize>().map_err(|_| Error::Parse(format!("line {lineno}: expected a qubit index, got {s:?}")))
        };
        let want = |k: usize| -> Result<()> {
            if toks.len() != k + 1 {
                return Err(Error::Parse(format!("line {lineno}: {} takes {k} argument(s)", toks[0])));
            }
            Ok(())
        };
        match toks[0].to_ascii_uppercase().as_str() {
            "QUBITS" => {
                want(2)?;
                if header.is_some() {
                    return Err(Error::Parse(format!("line {lineno}: duplicate header")));
                }
                header = Some((num(toks[1])?, num(toks[2])?));
                continue;
            }
            _ if header.is_none() => {
                return Err(Error::Parse(format!("line {lineno}: missing `qubits n m` header")));
            }
            "H" => {
                want(1)?;
                gates.push(Gate::H(num(toks[1])?));
            }
            "S" => {
                want(1)?;
                gates.push(Gate::S(num(toks[1])?));
            }
            "T" => {
                want(1)?;
                gates.push(Gate::T(num(toks[1])?));
            }
            "CNOT" | "CX" => {
                want(2)?;
                gates.push(Gate::Cnot { control: num(toks[1])?, target: num(toks[2])? });
            }
            other => return Err(Error::Parse(format!("line {lineno}: unknown gate {other:?}"))),
        }
        let (n, m) = header.expect("checked above");
        for q in gates.last().expect("just pushed").qubits() {
            if q >= n + m {
                return Err(Error::Parse(format!("line {lineno}: qubit {q} out of range for {} qubits", n + m)));
            }
        }
    }
    let (n, m) = header.ok_or_else(|| Error::Parse("missing `qubits n m` header".into()))?;
    DopedCircuit::new(n, m, gates).map_err(|e| Error::Parse(e.to_string()))
}

pub fn format_circuit(c: &DopedCircuit) -> String {
    let mut s = format!("qubits {} {}\n", c.n_data, c.n_ancilla);
    for g in c.gates() {
        s.push_str(&g.to_string());
        s.push('\n');
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pauli::pauli;

    fn conj(g: Gate, p: &str) -> String {
        conjugate(&g, &pauli(p)).unwrap().to_string()
    }

    #[test]
    fn batch_evolution_matches_single() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let c = random_clifford(5, &mut rng);
        let ps: Vec<PauliString> = ["XYZIX", "ZZIYY", "IIIII", "YXXZI"].iter().map(|s| s.parse().unwrap()).collect();
        let ps: Vec<PauliString> = ps.into_iter().enumerate().map(|(i, p)| p.with_phase(i as u8)).collect();
        for dir in [Direction::Forward, Direction::Adjoint] {
            let batch = evolve_paulis(&c, &ps, dir).unwrap();
            for (p, b) in ps.iter().zip(&batch) {
                assert_eq!(&evolve_pauli(&c, p, dir).unwrap(), b);
            }
        }
    }

    #[test]
    fn single_gate_rules() {
        assert_eq!(conj(Gate::H(0), "X"), "Z");
        assert_eq!(conj(Gate::H(0), "Z"), "X");
        assert_eq!(conj(Gate::H(0), "Y"), "-Y");
        assert_eq!(conj(Gate::S(0), "X"), "Y");
        assert_eq!(conj(Gate::S(0), "Y"), "-X");
        assert_eq!(conj(Gate::S(0), "Z"), "Z");
        let cx = Gate::Cnot { control: 0, target: 1 };
        assert_eq!(conj(cx, "XI"), "XX");
        assert_eq!(conj(cx, "IZ"), "ZZ");
        assert_eq!(conj(cx, "YY"), "-XZ");
        assert_eq!(conjugate_adjoint(&Gate::S(0), &pauli("X")).unwrap().to_string(), "-Y");
    }

    #[test]
    fn adjoint_undoes_forward() {
        let c = random_clifford_seeded(4, 7);
        for s in ["XIYZ", "-ZZII", "IYIY"] {
            let p = pauli(s);
            let f = evolve_pauli(&c, &p, Direction::Forward).unwrap();
            assert_eq!(evolve_pauli(&c, &f, Direction::Adjoint).unwrap(), p);
        }
    }

    #[test]
    fn gadget_roundtrip() {
        let c = universal_2n_circuit(2);
        let g = gadgetize(&c);
        assert_eq!(g.t_count(), 4);
        assert_eq!(g.clifford.num_qubits(), 8);
        assert_eq!(g.ungadgetize().unwrap(), c);
    }

    #[test]
    fn circuit_text_format() {
        let text = "# demo\nqubits 1 1\nCNOT 0 1\nH 1 # hadamard\nT 1\n";
        let c = parse_circuit(text).unwrap();
        assert_eq!(c.gates().len(), 3);
        assert_eq!(parse_circuit(&format_circuit(&c)).unwrap(), c);
        let err = parse_circuit("qubits 1 0\nH 3\n").unwrap_err().to_string();
        assert!(err.contains("line 2"), "{err}");
        assert!(parse_circuit("H 0\n").is_err());
        assert!(parse_circuit("qubits 2 0\nFOO 1\n").unwrap_err().to_string().contains("line 2"));
    }
}
