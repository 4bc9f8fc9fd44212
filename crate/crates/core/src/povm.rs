//! Effective POVMs of stabilizer measurements with pre-projected ancillas.
//!
//! The central quantity is `s_mu`, the dimension of the operator span of the effective
//! POVM elements on the data register. Three routes compute it:
//!
//! * [`span_dimension`] for a maximal group with every generator free, via the double
//!   cosets of `S / S_n S_m` and a per-coset survival test;
//! * [`analyze_doped`] for Clifford+T circuits, via the gadget picture where some
//!   generators carry fixed `+1` syndromes; the span is computed exactly by
//!   [`fixed_syndrome_span`];
//! * [`stabilizer_effective_povm`] for stabilizer ancillas, which returns the explicit
//!   normal form of every element.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive};
use serde::{Deserialize, Serialize};

use crate::bits::{BitVec, Echelon, WordEchelon};
use crate::circuit::{evolve_paulis, gadgetize, universal_2n_circuit, Direction, DopedCircuit};
use crate::dense::{self, DenseOperator, DenseState};
use crate::error::{Error, Result};
use crate::exact::{rank_real, rank_zsqrt2, ZSqrt2};
use crate::group::{align_generators, double_coset_table, entanglement_decomposition, PauliSubgroup};
use crate::pauli::{Letter, PauliString, ProjectivePauli};

/// Expectations with modulus at or below this count as zero for dense ancillas.
pub const SURVIVAL_TOL: f64 = 1e-9;

/// Version tag of the serialized report shape.
pub const REPORT_VERSION: u32 = 1;

/// State of the pre-projected register.
#[derive(Clone, Debug)]
pub enum AncillaSpec {
    /// Joint `+1` eigenstate of a maximal signed group.
    Stabilizer(PauliSubgroup),
    /// `(T|+>)^{⊗t}`.
    MagicT(usize),
    /// Arbitrary pure state.
    Dense(DenseState),
    /// A state with every Pauli expectation nonzero.
    Generic(usize),
    /// `I / 2^m`; the only mixed state supported.
    MaximallyMixed(usize),
}

/// Expectation of a letter string on one register, split into an exact part and an
/// optional floating-point factor.
#[derive(Clone, Copy, Debug, PartialEq)]
enum Expectation {
    Zero,
    /// `sign * 2^{-t_weight / 2}`.
    Exact { sign: i8, t_weight: u32 },
    Numeric(f64),
}

impl AncillaSpec {
    pub fn num_qubits(&self) -> usize {
        match self {
            AncillaSpec::Stabilizer(z) => z.num_qubits(),
            AncillaSpec::MagicT(t) => *t,
            AncillaSpec::Dense(psi) => psi.num_qubits(),
            AncillaSpec::Generic(m) | AncillaSpec::MaximallyMixed(m) => *m,
        }
    }

    /// Short description in the command-line ancilla syntax.
    pub fn label(&self) -> String {
        match self {
            AncillaSpec::Stabilizer(z) => {
                let gens: Vec<String> = z.generators().iter().map(|g| g.to_string()).collect();
                format!("stab:<{}>", gens.join(","))
            }
            AncillaSpec::MagicT(t) => format!("T^{t}"),
            AncillaSpec::Dense(psi) => format!("dense:{}", psi.num_qubits()),
            AncillaSpec::Generic(m) => format!("generic:{m}"),
            AncillaSpec::MaximallyMixed(m) => format!("mixed:{m}"),
        }
    }

    pub fn is_pure(&self) -> bool {
        !matches!(self, AncillaSpec::MaximallyMixed(m) if *m > 0)
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            AncillaSpec::Stabilizer(z) => {
                if !z.is_signed() {
                    return Err(Error::Invalid("stabilizer ancilla needs a signed group".into()));
                }
                if !z.is_maximal() {
                    return Err(Error::NotMaximal { dim: z.dim(), n: z.num_qubits() });
                }
                Ok(())
            }
            AncillaSpec::Dense(psi) => {
                if (psi.norm() - 1.0).abs() > 1e-12 {
                    return Err(Error::Invalid(format!("dense ancilla has norm {}", psi.norm())));
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }

    /// Whether `<psi| L |psi>` is nonzero for the hermitian letter string `L`.
    pub fn survives(&self, l: &ProjectivePauli) -> bool {
        match self {
            AncillaSpec::Stabilizer(z) => z.contains_projective(l),
            AncillaSpec::MagicT(_) => l.is_z_free(),
            AncillaSpec::Dense(psi) => dense::pauli_expectation(psi, &l.lift()).norm() > SURVIVAL_TOL,
            AncillaSpec::Generic(_) => true,
            AncillaSpec::MaximallyMixed(_) => l.is_identity(),
        }
    }

    fn expectation(&self, l: &ProjectivePauli) -> Result<Expectation> {
        Ok(match self {
            AncillaSpec::Stabilizer(z) => match z.sign_of(&l.lift()) {
                Some(s) => Expectation::Exact { sign: s, t_weight: 0 },
                None => Expectation::Zero,
            },
            AncillaSpec::MagicT(_) => {
                if l.is_z_free() {
                    let (_, nx, ny, _) = l.weight_counts();
                    Expectation::Exact { sign: 1, t_weight: (nx + ny) as u32 }
                } else {
                    Expectation::Zero
                }
            }
            AncillaSpec::Dense(psi) => {
                let v = dense::pauli_expectation(psi, &l.lift()).re;
                if v.abs() <= SURVIVAL_TOL {
                    Expectation::Zero
                } else {
                    Expectation::Numeric(v)
                }
            }
            AncillaSpec::MaximallyMixed(_) => {
                if l.is_identity() {
                    Expectation::Exact { sign: 1, t_weight: 0 }
                } else {
                    Expectation::Zero
                }
            }
            AncillaSpec::Generic(_) => {
                return Err(Error::Invalid("a generic ancilla has no definite expectation values".into()))
            }
        })
    }

    /// A concrete state for the dense oracle; `None` for generic and mixed ancillas.
    pub fn dense_state(&self) -> Result<Option<DenseState>> {
        Ok(match self {
            AncillaSpec::Stabilizer(z) => Some(DenseState::stabilizer_state(z)?),
            AncillaSpec::MagicT(t) => Some(DenseState::t_power(*t)),
            AncillaSpec::Dense(psi) => Some(psi.clone()),
            AncillaSpec::Generic(_) | AncillaSpec::MaximallyMixed(_) => None,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CosetSummary {
    /// Distinct data-register parts of the members.
    pub data: Vec<ProjectivePauli>,
    /// Distinct ancilla-register parts of the members.
    pub ancilla: Vec<ProjectivePauli>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundSummary {
    /// Smallest `t` with `3^t >= 4^n`.
    pub necessary_t: u32,
    /// `2^{n+p}` when `p` is known.
    pub entanglement_ceiling: Option<u128>,
    /// `2^{n-t} 3^t` when `t <= n`.
    pub t_le_n_ceiling: Option<u128>,
    /// Constructive target for `t > n`; not a proven ceiling.
    pub t_gt_n_target: Option<u128>,
}

impl BoundSummary {
    pub fn new(n: usize, t: usize, p: Option<usize>) -> Self {
        BoundSummary {
            necessary_t: necessary_t(n as u32),
            entanglement_ceiling: p.and_then(|p| 1u128.checked_shl((n + p) as u32)),
            t_le_n_ceiling: if t <= n { bound_t_le_n(n as u32, t as u32).ok() } else { None },
            t_gt_n_target: if t > n { bound_t_gt_n(n as u32, t as u32).ok() } else { None },
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EffectivePovmReport {
    pub version: u32,
    /// `"stabilizer-group"` or `"doped-circuit"`.
    pub source: String,
    pub n: usize,
    pub m: usize,
    pub t: usize,
    pub ancilla: String,
    pub s_mu: u64,
    pub p: Option<usize>,
    /// `s_mu / 2^{n-p}` when that is an integer.
    pub k: Option<u64>,
    pub ic: bool,
    pub reconstructed_directions: Vec<ProjectivePauli>,
    pub surviving_cosets: Vec<CosetSummary>,
    pub killed_cosets: Vec<CosetSummary>,
    pub free_generators: usize,
    pub fixed_syndromes: usize,
    /// Whether `s_mu` came from exact arithmetic.
    pub exact: bool,
    pub bounds: BoundSummary,
    pub oracle_checked: Option<bool>,
    pub oracle_rank: Option<u64>,
    pub warnings: Vec<String>,
}

impl EffectivePovmReport {
    /// Records a dense-oracle rank and whether it agrees with `s_mu`.
    pub fn attach_oracle(&mut self, rank: usize) {
        self.oracle_rank = Some(rank as u64);
        self.oracle_checked = Some(rank as u64 == self.s_mu);
    }
}

fn pow2(e: usize) -> Result<u64> {
    1u64.checked_shl(e as u32).filter(|_| e < 64).ok_or(Error::TooLarge { dim: e, limit: 63 })
}

fn check_maximal_abelian(s: &PauliSubgroup) -> Result<()> {
    if !s.is_abelian() {
        return Err(Error::NonAbelian);
    }
    if !s.is_maximal() {
        return Err(Error::NotMaximal { dim: s.dim(), n: s.num_qubits() });
    }
    Ok(())
}

/// `s_mu` of the measurement in the eigenbasis of `s` (all generators free) with the
/// last `ancilla.num_qubits()` qubits projected onto the ancilla state.
pub fn span_dimension(s: &PauliSubgroup, n: usize, ancilla: &AncillaSpec) -> Result<EffectivePovmReport> {
    let total = s.num_qubits();
    if n > total {
        return Err(Error::InvalidSplit(format!("{n} data qubits out of {total}")));
    }
    let m = total - n;
    if ancilla.num_qubits() != m {
        return Err(Error::SizeMismatch { expected: m, got: ancilla.num_qubits() });
    }
    check_maximal_abelian(s)?;
    ancilla.validate()?;
    let dec = entanglement_decomposition(s, n)?;
    let table = double_coset_table(s, &dec.s_a, &dec.s_b)?;
    let mut surviving = Vec::new();
    let mut killed = Vec::new();
    let mut directions = BTreeSet::new();
    for coset in &table.cosets {
        let mut data = BTreeSet::new();
        let mut anc = BTreeSet::new();
        for member in &coset.members {
            let (d, a) = member.split_at(n);
            data.insert(d);
            anc.insert(a);
        }
        let alive = anc.iter().any(|a| ancilla.survives(a));
        let summary = CosetSummary { data: data.iter().cloned().collect(), ancilla: anc.into_iter().collect() };
        if alive {
            directions.extend(data);
            surviving.push(summary);
        } else {
            killed.push(summary);
        }
    }
    let p = dec.p;
    let k = surviving.len() as u64;
    let s_mu = k * pow2(n - p)?;
    debug_assert_eq!(s_mu as usize, directions.len());
    let t = if let AncillaSpec::MagicT(t) = ancilla { *t } else { 0 };
    let mut warnings = Vec::new();
    if ancilla.is_pure() && !(pow2(n)? <= s_mu && s_mu <= pow2(n + p)?) {
        warnings.push(format!("s_mu = {s_mu} lies outside [2^n, 2^(n+p)]"));
    }
    Ok(EffectivePovmReport {
        version: REPORT_VERSION,
        source: "stabilizer-group".into(),
        n,
        m,
        t,
        ancilla: ancilla.label(),
        s_mu,
        p: Some(p),
        k: Some(k),
        ic: 2 * n < 64 && s_mu == 1u64 << (2 * n),
        reconstructed_directions: directions.into_iter().collect(),
        surviving_cosets: surviving,
        killed_cosets: killed,
        free_generators: total,
        fixed_syndromes: 0,
        exact: !matches!(ancilla, AncillaSpec::Dense(_)),
        bounds: BoundSummary::new(n, t, Some(p)),
        oracle_checked: None,
        oracle_rank: None,
        warnings,
    })
}

/// A stabilizer measurement in which some generators have their outcome pinned to `+1`.
///
/// The effective POVM elements are `mu_b ∝ (I ⊗ <R|) P_b (I ⊗ |R>)` where `P_b` projects
/// onto outcome `b` of the free generators and onto `+1` of every fixed one.
#[derive(Clone, Debug, PartialEq)]
pub struct FixedSyndromeMeasurement {
    pub n_qubits: usize,
    /// Generators whose outcomes vary; signs are irrelevant.
    pub free: Vec<PauliString>,
    /// Signed generators pinned to `+1`.
    pub fixed: Vec<PauliString>,
}

impl FixedSyndromeMeasurement {
    /// The measurement with all generators of `s` free.
    pub fn all_free(s: &PauliSubgroup) -> Self {
        FixedSyndromeMeasurement { n_qubits: s.num_qubits(), free: s.generators().to_vec(), fixed: Vec::new() }
    }

    /// All generators as one unsigned group.
    pub fn group(&self) -> Result<PauliSubgroup> {
        let gens = self.free.iter().chain(&self.fixed).cloned().collect();
        PauliSubgroup::new(self.n_qubits, gens, false)
    }

    fn fixed_group(&self) -> Result<PauliSubgroup> {
        PauliSubgroup::new(self.n_qubits, self.fixed.clone(), true)
    }

    fn validate(&self) -> Result<()> {
        let g = self.group()?;
        if !g.is_abelian() {
            return Err(Error::NonAbelian);
        }
        if g.dim() != self.free.len() + self.fixed.len() {
            return Err(Error::Invalid("measurement generators are not independent".into()));
        }
        self.fixed_group()?;
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpanOutcome {
    pub s_mu: u64,
    /// Data Paulis carrying a nonzero coefficient in some element.
    pub directions: Vec<ProjectivePauli>,
    pub exact: bool,
}

/// Coefficient field used by the span engine.
trait Coef: Copy + PartialEq + std::ops::AddAssign + std::ops::Neg<Output = Self> {
    fn zero() -> Self;
    fn is_zero(&self) -> bool;
    fn is_negative_leading(&self) -> bool;
    fn from_exp(e: Expectation, scale: u32) -> Self;
    fn rank(rows: &[Vec<Self>]) -> usize;
    fn key(&self) -> (i128, i128);
}

impl Coef for ZSqrt2 {
    fn zero() -> Self {
        ZSqrt2::ZERO
    }
    fn is_zero(&self) -> bool {
        ZSqrt2::is_zero(self)
    }
    fn is_negative_leading(&self) -> bool {
        ZSqrt2::is_negative_leading(self)
    }
    fn from_exp(e: Expectation, scale: u32) -> Self {
        match e {
            Expectation::Exact { sign, t_weight } => ZSqrt2::inv_sqrt2_pow(t_weight, scale) * sign as i128,
            _ => ZSqrt2::ZERO,
        }
    }
    fn rank(rows: &[Vec<Self>]) -> usize {
        rank_zsqrt2(rows)
    }
    fn key(&self) -> (i128, i128) {
        (self.a, self.b)
    }
}

impl Coef for f64 {
    fn zero() -> Self {
        0.0
    }
    fn is_zero(&self) -> bool {
        self.abs() <= 1e-12
    }
    fn is_negative_leading(&self) -> bool {
        *self < 0.0
    }
    fn from_exp(e: Expectation, _scale: u32) -> Self {
        match e {
            Expectation::Exact { sign, t_weight } => sign as f64 * 2f64.powf(-(t_weight as f64) / 2.0),
            Expectation::Numeric(v) => v,
            Expectation::Zero => 0.0,
        }
    }
    fn rank(rows: &[Vec<Self>]) -> usize {
        rank_real(rows, dense::RANK_TOL)
    }
    fn key(&self) -> (i128, i128) {
        ((self * 1e9).round() as i128, 0)
    }
}

/// Product of per-register expectations of the letter string `r`.
fn joint_expectation(registers: &[AncillaSpec], r: &ProjectivePauli) -> Result<Expectation> {
    let mut rest = r.clone();
    let mut sign = 1i8;
    let mut t_weight = 0u32;
    let mut numeric: Option<f64> = None;
    for reg in registers {
        let (head, tail) = rest.split_at(reg.num_qubits());
        match reg.expectation(&head)? {
            Expectation::Zero => return Ok(Expectation::Zero),
            Expectation::Exact { sign: s, t_weight: w } => {
                sign *= s;
                t_weight += w;
            }
            Expectation::Numeric(v) => numeric = Some(numeric.unwrap_or(1.0) * v),
        }
        rest = tail;
    }
    Ok(match numeric {
        None => Expectation::Exact { sign, t_weight },
        Some(v) => Expectation::Numeric(v * sign as f64 * 2f64.powf(-(t_weight as f64) / 2.0)),
    })
}

/// Span dimension of the effective POVM of a fixed-syndrome measurement whose qubits
/// `n_data..` are projected onto the product of `registers`.
///
/// With `F` the signed group of fixed generators, the span equals the span of
/// `M_g = sum_{f in F} <R| g f |R>` over the free group. Elements whose data parts lie
/// in different cosets of `pi_D(F)` have disjoint supports, so the rank is a sum of
/// per-coset ranks. Stabilizer, `T`-power and maximally mixed registers are handled
/// exactly over `Q(sqrt 2)`; dense registers numerically.
pub fn fixed_syndrome_span(
    meas: &FixedSyndromeMeasurement,
    n_data: usize,
    registers: &[AncillaSpec],
) -> Result<SpanOutcome> {
    meas.validate()?;
    let reg_qubits: usize = registers.iter().map(|r| r.num_qubits()).sum();
    if n_data + reg_qubits != meas.n_qubits {
        return Err(Error::SizeMismatch { expected: meas.n_qubits - n_data.min(meas.n_qubits), got: reg_qubits });
    }
    for r in registers {
        r.validate()?;
    }
    let exact = !registers.iter().any(|r| matches!(r, AncillaSpec::Dense(_)));
    if let [AncillaSpec::MagicT(t)] = registers {
        if n_data <= 32 && meas.n_qubits <= 64 {
            return span_engine_magic(meas, n_data, *t);
        }
    }
    if exact {
        span_engine::<ZSqrt2>(meas, n_data, registers, true)
    } else {
        span_engine::<f64>(meas, n_data, registers, false)
    }
}

fn span_engine<C: Coef>(
    meas: &FixedSyndromeMeasurement,
    n: usize,
    registers: &[AncillaSpec],
    exact: bool,
) -> Result<SpanOutcome> {
    let fixed = meas.fixed_group()?;
    let f_elems = fixed.elements()?;
    let scale: u32 = registers
        .iter()
        .map(|r| if let AncillaSpec::MagicT(t) = r { *t as u32 } else { 0 })
        .sum();
    let a_group = fixed.project_range(0, n);
    let nfree = meas.free.len();
    if nfree > crate::group::ENUMERATION_LIMIT {
        return Err(Error::TooLarge { dim: nfree, limit: crate::group::ENUMERATION_LIMIT });
    }
    // rows grouped by the coset of pi_D(F) holding their support
    let mut blocks: HashMap<ProjectivePauli, HashSet<Vec<(ProjectivePauli, (i128, i128))>>> = HashMap::new();
    let mut block_rows: HashMap<ProjectivePauli, Vec<BTreeMap<ProjectivePauli, C>>> = HashMap::new();
    let mut directions = BTreeSet::new();
    let mut g = PauliString::identity(meas.n_qubits);
    for i in 0usize..(1 << nfree) {
        if i > 0 {
            g.mul_assign(&meas.free[i.trailing_zeros() as usize]);
        }
        let mut row: BTreeMap<ProjectivePauli, C> = BTreeMap::new();
        for f in &f_elems {
            let e = g.multiply(f);
            let (lp, d, r) = e.split_at(n);
            let val = joint_expectation(registers, &r)?;
            if val == Expectation::Zero {
                continue;
            }
            let mut c = C::from_exp(val, scale);
            match lp {
                0 => {}
                2 => c = -c,
                _ => return Err(Error::NonHermitian(e.to_string())),
            }
            *row.entry(d).or_insert_with(C::zero) += c;
        }
        row.retain(|_, c| !c.is_zero());
        let Some(first) = row.keys().next() else {
            continue;
        };
        let key = a_group.coset_key(first);
        let flip = row.values().next().is_some_and(|c| c.is_negative_leading());
        let sig: Vec<(ProjectivePauli, (i128, i128))> =
            row.iter().map(|(p, c)| (p.clone(), if flip { (-*c).key() } else { c.key() })).collect();
        if blocks.entry(key.clone()).or_default().insert(sig) {
            directions.extend(row.keys().cloned());
            block_rows.entry(key).or_default().push(row);
        }
    }
    let mut s_mu = 0u64;
    for rows in block_rows.values() {
        let cols: BTreeSet<&ProjectivePauli> = rows.iter().flat_map(|r| r.keys()).collect();
        if cols.len() == 1 {
            s_mu += 1;
            continue;
        }
        let index: HashMap<&ProjectivePauli, usize> = cols.iter().enumerate().map(|(i, p)| (*p, i)).collect();
        let mat: Vec<Vec<C>> = rows
            .iter()
            .map(|r| {
                let mut v = vec![C::zero(); cols.len()];
                for (p, c) in r {
                    v[index[p]] = *c;
                }
                v
            })
            .collect();
        s_mu += C::rank(&mat) as u64;
    }
    Ok(SpanOutcome { s_mu, directions: directions.into_iter().collect(), exact })
}

/// Pauli on at most 64 qubits as single-word masks, `i^phase X^x Z^z`.
#[derive(Copy, Clone, Debug)]
struct Packed {
    x: u64,
    z: u64,
    phase: u8,
}

impl Packed {
    fn of(p: &PauliString) -> Self {
        let word = |b: &BitVec| b.words().first().copied().unwrap_or(0);
        Packed { x: word(p.x()), z: word(p.z()), phase: p.phase_exp() }
    }

    fn mul(self, o: Packed) -> Packed {
        let swap = ((self.z & o.x).count_ones() % 2) as u8 * 2;
        Packed { x: self.x ^ o.x, z: self.z ^ o.z, phase: (self.phase + o.phase + swap) & 3 }
    }

    fn letter_phase(self) -> u8 {
        (self.phase + 4 - ((self.x & self.z).count_ones() % 4) as u8) & 3
    }
}

fn group_words(gens: &[Packed]) -> Vec<Packed> {
    let mut out = vec![Packed { x: 0, z: 0, phase: 0 }];
    for &g in gens {
        let more: Vec<Packed> = out.iter().map(|e| e.mul(g)).collect();
        out.extend(more);
    }
    out
}

/// [`span_engine`] for a single `T^{⊗t}` register on single-word masks.
fn span_engine_magic(meas: &FixedSyndromeMeasurement, n: usize, t: usize) -> Result<SpanOutcome> {
    let fixed = meas.fixed_group()?;
    let nfree = meas.free.len();
    if nfree > crate::group::ENUMERATION_LIMIT {
        return Err(Error::TooLarge { dim: nfree, limit: crate::group::ENUMERATION_LIMIT });
    }
    let f_elems = group_words(&fixed.generators().iter().map(Packed::of).collect::<Vec<_>>());
    let free: Vec<Packed> = meas.free.iter().map(Packed::of).collect();
    let dmask = if n == 0 { 0 } else { u64::MAX >> (64 - n) };
    let data_key = |e: Packed| (e.x & dmask) | ((e.z & dmask) << n);
    let mut a_group = WordEchelon::default();
    for f in &f_elems {
        a_group.insert(data_key(*f));
    }
    let scale = t as u32;
    let mut blocks: HashMap<u64, HashSet<Vec<(u64, (i128, i128))>>> = HashMap::new();
    let mut block_rows: HashMap<u64, Vec<Vec<(u64, ZSqrt2)>>> = HashMap::new();
    let mut directions = BTreeSet::new();
    let mut g = Packed { x: 0, z: 0, phase: 0 };
    let mut entries: Vec<(u64, ZSqrt2)> = Vec::with_capacity(f_elems.len());
    for i in 0usize..(1 << nfree) {
        if i > 0 {
            g = g.mul(free[i.trailing_zeros() as usize]);
        }
        entries.clear();
        for f in &f_elems {
            let e = g.mul(*f);
            let (rx, rz) = (e.x >> n, e.z >> n);
            // <T|Z|T> = 0 while X and Y both have expectation 1/sqrt 2
            if rz & !rx != 0 {
                continue;
            }
            let mut c = ZSqrt2::inv_sqrt2_pow(rx.count_ones(), scale);
            match e.letter_phase() {
                0 => {}
                2 => c = -c,
                _ => return Err(Error::NonHermitian(format!("element with phase i^{}", e.phase))),
            }
            entries.push((data_key(e), c));
        }
        entries.sort_unstable_by_key(|e| e.0);
        let mut row: Vec<(u64, ZSqrt2)> = Vec::with_capacity(entries.len());
        for &(k, c) in &entries {
            match row.last_mut() {
                Some(last) if last.0 == k => last.1 += c,
                _ => row.push((k, c)),
            }
        }
        row.retain(|e| !e.1.is_zero());
        let Some(&(first, lead)) = row.first() else {
            continue;
        };
        let key = a_group.reduce(first);
        let flip = lead.is_negative_leading();
        let sig: Vec<(u64, (i128, i128))> =
            row.iter().map(|&(k, c)| (k, if flip { ((-c).a, (-c).b) } else { (c.a, c.b) })).collect();
        if blocks.entry(key).or_default().insert(sig) {
            directions.extend(row.iter().map(|e| e.0));
            block_rows.entry(key).or_default().push(row);
        }
    }
    let mut s_mu = 0u64;
    for rows in block_rows.values() {
        let cols: BTreeSet<u64> = rows.iter().flat_map(|r| r.iter().map(|e| e.0)).collect();
        if cols.len() == 1 {
            s_mu += 1;
            continue;
        }
        let index: HashMap<u64, usize> = cols.iter().enumerate().map(|(i, &p)| (p, i)).collect();
        let mat: Vec<Vec<ZSqrt2>> = rows
            .iter()
            .map(|r| {
                let mut v = vec![ZSqrt2::ZERO; cols.len()];
                for &(p, c) in r {
                    v[index[&p]] = c;
                }
                v
            })
            .collect();
        s_mu += rank_zsqrt2(&mat) as u64;
    }
    let directions = directions
        .into_iter()
        .map(|k| {
            let x = BitVec::from_u64(n, k & dmask);
            let z = BitVec::from_u64(n, (k >> n) & dmask);
            ProjectivePauli::from_xz(x, z)
        })
        .collect::<BTreeSet<_>>();
    Ok(SpanOutcome { s_mu, directions: directions.into_iter().collect(), exact: true })
}

/// `lambda * sign_Z(L_M)` for `s = lambda L_D ⊗ L_M ⊗ L_G` with `L_M` on `offset..offset+m`.
fn register_character(s: &PauliString, offset: usize, z: &PauliSubgroup) -> Option<i8> {
    let m = z.num_qubits();
    let qs: Vec<usize> = (offset..offset + m).collect();
    let lm = s.projective().restrict(&qs);
    let sz = z.sign_of(&lm.lift())?;
    match s.letter_phase() {
        0 => Some(sz),
        2 => Some(-sz),
        _ => None,
    }
}

/// `sigma(s) = <psi| s |psi>` taken on the register `offset..offset+m` only, for `s`
/// commuting with the stabilizers of `psi`.
fn contract_register(s: &PauliSubgroup, offset: usize, z: &PauliSubgroup, p: &PauliString) -> Result<PauliString> {
    let total = s.num_qubits();
    let m = z.num_qubits();
    let sign = register_character(p, offset, z)
        .ok_or_else(|| Error::Invalid(format!("{p} does not commute with the ancilla stabilizers")))?;
    let keep: Vec<usize> = (0..offset).chain(offset + m..total).collect();
    let rest = p.projective().restrict(&keep).lift();
    let phase = rest.phase_exp();
    Ok(rest.with_phase(if sign < 0 { phase + 2 } else { phase }))
}

/// Result of projecting a stabilizer register out of a fixed-syndrome measurement.
#[derive(Clone, Debug, PartialEq)]
pub struct Projection {
    pub measurement: FixedSyndromeMeasurement,
    /// The projection has zero probability: some fixed element evaluates to `-1`.
    pub vanishes: bool,
}

/// Contracts qubits `offset..offset+m` against the stabilizer state of `z`.
///
/// Only elements commuting with `I ⊗ Z ⊗ I` survive. Fixed syndromes map to fixed
/// syndromes; those that become `+I` are consumed. The free generators of the result
/// complete the image of the surviving fixed subgroup.
pub fn project_stabilizer_register(
    meas: &FixedSyndromeMeasurement,
    offset: usize,
    z: &PauliSubgroup,
) -> Result<Projection> {
    meas.validate()?;
    let total = meas.n_qubits;
    let m = z.num_qubits();
    if offset + m > total {
        return Err(Error::InvalidSplit(format!("register {offset}..{} exceeds {total} qubits", offset + m)));
    }
    AncillaSpec::Stabilizer(z.clone()).validate()?;
    let zp = z.embed(total, offset);
    let s = meas.group()?;
    let fixed = meas.fixed_group()?;
    let fixed_k = fixed.centralizer_within(&zp);
    let k = s.centralizer_within(&zp);
    let out_n = total - m;
    let mut vanishes = false;
    let mut new_fixed = Vec::new();
    for f in fixed_k.basis() {
        let c = contract_register(&s, offset, z, f)?;
        if c.projective().is_identity() {
            vanishes |= c.phase_exp() == 2;
        } else {
            new_fixed.push(c);
        }
    }
    let mut new_free = Vec::new();
    if !vanishes {
        // canonicalize so that dependent fixed images are checked for consistency
        let fg = match PauliSubgroup::new(out_n, new_fixed.clone(), true) {
            Ok(g) => g,
            Err(Error::Contradiction(_)) => {
                return Ok(Projection {
                    measurement: FixedSyndromeMeasurement { n_qubits: out_n, free: Vec::new(), fixed: Vec::new() },
                    vanishes: true,
                })
            }
            Err(e) => return Err(e),
        };
        new_fixed = fg.generators().to_vec();
        let mut ech = Echelon::new(crate::pauli::symplectic_row_len(out_n), new_fixed.len() + k.dim());
        for f in &new_fixed {
            let _ = ech.insert(&f.symplectic_row());
        }
        for b in k.basis() {
            let c = contract_register(&s, offset, z, b)?;
            if ech.insert(&c.symplectic_row()).is_ok() {
                new_free.push(c.projective().lift());
            }
        }
    }
    Ok(Projection {
        measurement: FixedSyndromeMeasurement { n_qubits: out_n, free: new_free, fixed: new_fixed },
        vanishes,
    })
}

/// Heisenberg-evolved gadget-picture measurement of a doped circuit: the measurement
/// generators and the gadget `Z` projections, all pulled back through the Clifford part.
pub fn gadget_measurement(circuit: &DopedCircuit, measurement: &PauliSubgroup) -> Result<FixedSyndromeMeasurement> {
    let base = circuit.n_data + circuit.n_ancilla;
    if measurement.num_qubits() != base {
        return Err(Error::SizeMismatch { expected: base, got: measurement.num_qubits() });
    }
    if !measurement.is_maximal() || !measurement.is_abelian() {
        return Err(Error::NotMaximal { dim: measurement.dim(), n: base });
    }
    let g = gadgetize(circuit);
    let t = g.t_count();
    let total = base + t;
    let pad = PauliString::identity(t);
    let mut strings: Vec<PauliString> = measurement
        .generators()
        .iter()
        .map(|gen| if gen.is_hermitian() { gen.clone() } else { gen.projective().lift() }.tensor(&pad))
        .collect();
    strings.extend(g.gadget_qubits().map(|q| PauliString::single(total, q, Letter::Z)));
    let mut free = evolve_paulis(&g.clifford, &strings, Direction::Adjoint)?;
    let fixed = free.split_off(base);
    Ok(FixedSyndromeMeasurement { n_qubits: total, free, fixed })
}

/// Full analysis of a Clifford+T circuit followed by a stabilizer-basis measurement.
///
/// Stabilizer ancillas are contracted first, leaving a fixed-syndrome measurement on the
/// data and gadget registers; other ancilla kinds are evaluated jointly with the gadgets.
pub fn analyze_doped(
    circuit: &DopedCircuit,
    measurement: &PauliSubgroup,
    ancilla: &AncillaSpec,
) -> Result<EffectivePovmReport> {
    let (n, m, t) = (circuit.n_data, circuit.n_ancilla, circuit.t_count());
    if ancilla.num_qubits() != m {
        return Err(Error::SizeMismatch { expected: m, got: ancilla.num_qubits() });
    }
    ancilla.validate()?;
    let meas = gadget_measurement(circuit, measurement)?;
    let mut warnings = Vec::new();
    let (final_meas, outcome) = match ancilla {
        AncillaSpec::Stabilizer(z) => {
            let proj = project_stabilizer_register(&meas, n, z)?;
            if proj.vanishes {
                warnings.push("the ancilla and gadget projections have zero probability".into());
                (proj.measurement, SpanOutcome { s_mu: 0, directions: Vec::new(), exact: true })
            } else {
                let out = fixed_syndrome_span(&proj.measurement, n, &[AncillaSpec::MagicT(t)])?;
                (proj.measurement, out)
            }
        }
        AncillaSpec::Generic(_) => {
            return Err(Error::Invalid("doped circuits need a concrete ancilla state".into()));
        }
        other => {
            let out = fixed_syndrome_span(&meas, n, &[other.clone(), AncillaSpec::MagicT(t)])?;
            (meas, out)
        }
    };
    let group = final_meas.group()?;
    let p = if group.is_maximal() && group.is_abelian() {
        Some(crate::group::entanglement(&group, n)?)
    } else {
        None
    };
    let k = p.and_then(|p| {
        let unit = 1u64 << (n - p);
        (outcome.s_mu % unit == 0).then_some(outcome.s_mu / unit)
    });
    if outcome.s_mu > 0 && outcome.s_mu < pow2(n)? && ancilla.is_pure() {
        warnings.push(format!("s_mu = {} is below 2^n", outcome.s_mu));
    }
    Ok(EffectivePovmReport {
        version: REPORT_VERSION,
        source: "doped-circuit".into(),
        n,
        m,
        t,
        ancilla: ancilla.label(),
        s_mu: outcome.s_mu,
        p,
        k,
        ic: 2 * n < 64 && outcome.s_mu == 1u64 << (2 * n),
        reconstructed_directions: outcome.directions,
        surviving_cosets: Vec::new(),
        killed_cosets: Vec::new(),
        free_generators: final_meas.free.len(),
        fixed_syndromes: final_meas.fixed.len(),
        exact: outcome.exact,
        bounds: BoundSummary::new(n, t, p),
        oracle_checked: None,
        oracle_rank: None,
        warnings,
    })
}

/// Computational-basis measurement `<Z_0, ..., Z_{n-1}>`.
pub fn computational_basis(n: usize) -> PauliSubgroup {
    let gens = (0..n).map(|q| PauliString::single(n, q, Letter::Z)).collect();
    PauliSubgroup::new(n, gens, true).expect("independent commuting generators")
}

/// Hermitian `+` lifts of the generators of `s` as a signed group.
pub fn signed_lift(s: &PauliSubgroup) -> Result<PauliSubgroup> {
    if s.is_signed() {
        return Ok(s.clone());
    }
    let gens = s.generators().iter().map(|g| g.projective().lift()).collect();
    PauliSubgroup::new(s.num_qubits(), gens, true)
}

/// Dense-oracle span rank for a doped circuit; generic ancillas are replaced by a seeded
/// Haar-random state.
pub fn oracle_doped_rank(
    circuit: &DopedCircuit,
    measurement: &PauliSubgroup,
    ancilla: &AncillaSpec,
    cap: usize,
) -> Result<usize> {
    let basis = dense::basis_states(&signed_lift(measurement)?, cap)?;
    let ops = match ancilla {
        AncillaSpec::MaximallyMixed(m) => {
            let dim = 1usize << m;
            let mut rho = DenseOperator::zeros(dim);
            rho.add_assign(&DenseOperator::identity(dim), 1.0 / dim as f64);
            dense::effective_povm_mixed(circuit, &rho, &basis, cap)?
        }
        AncillaSpec::Generic(m) => {
            use rand::SeedableRng;
            let psi = DenseState::haar(*m, &mut rand_chacha::ChaCha8Rng::seed_from_u64(0x9e37));
            dense::effective_povm(circuit, &psi, &basis, cap)?
        }
        other => {
            let psi = other.dense_state()?.expect("pure ancilla");
            dense::effective_povm(circuit, &psi, &basis, cap)?
        }
    };
    Ok(dense::span_rank(&ops, dense::RANK_TOL))
}

/// Dense-oracle span rank for the eigenbasis of `s` with the last qubits projected.
pub fn oracle_span_rank(s: &PauliSubgroup, n: usize, ancilla: &AncillaSpec, cap: usize) -> Result<usize> {
    let m = s.num_qubits() - n;
    let id = DopedCircuit::new(n, m, Vec::new())?;
    oracle_doped_rank(&id, s, ancilla, cap)
}

/// Normal form of a stabilizer POVM with a stabilizer ancilla.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StabilizerPovmForm {
    pub n: usize,
    pub m: usize,
    /// `dim(S ∩ Z')`.
    pub ell: usize,
    pub h: Vec<PauliString>,
    pub g: Vec<PauliString>,
    pub g_tilde: Vec<PauliString>,
    pub h_tilde: Vec<PauliString>,
    /// `pi_n(g_k)`.
    pub effective_generators: Vec<ProjectivePauli>,
    /// `d_j = 1` when `h_j` has eigenvalue `-1` on the ancilla state.
    pub d: Vec<bool>,
    /// `d'_k = 1` when the ancilla part of `g_k` contributes a `-1`.
    pub d_prime: Vec<bool>,
    /// Per physical outcome, omitted above 16 qubits.
    pub outcome_relabel: Vec<OutcomeEntry>,
    pub nonzero_outcomes: u64,
    pub multiplicity: u64,
    /// The nonzero elements are `2^{scale_log2} prod_k (I + (-1)^{c_k} pi_n(g_k)) / 2`.
    pub scale_log2: i64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OutcomeEntry {
    /// Physical outcome; bit `j` is the eigenvalue bit of generator `j` of `S`.
    pub outcome: u64,
    pub nonzero: bool,
    /// Effective outcome bits `c_k`.
    pub effective: Vec<bool>,
}

impl StabilizerPovmForm {
    /// Dense matrix of the element for `outcome`.
    pub fn element(&self, outcome: u64) -> Result<DenseOperator> {
        let entry = self
            .outcome_relabel
            .iter()
            .find(|e| e.outcome == outcome)
            .ok_or_else(|| Error::Invalid(format!("outcome {outcome} not tabulated")))?;
        let dim = 1usize << self.n;
        if !entry.nonzero {
            return Ok(DenseOperator::zeros(dim));
        }
        let mut acc = DenseOperator::identity(dim);
        for (g, &c) in self.effective_generators.iter().zip(&entry.effective) {
            let mut factor = DenseOperator::identity(dim);
            factor.add_assign(&dense::pauli_matrix(&g.lift()), if c { -1.0 } else { 1.0 });
            acc = acc.matmul(&factor);
        }
        let mut out = DenseOperator::zeros(dim);
        out.add_assign(&acc, 2f64.powi(self.scale_log2 as i32 - self.n as i32));
        Ok(out)
    }
}

/// Expresses each target as `sign * prod_j gens[j]^{c_j}`; returns `(c, sign is -1)`.
fn decompose(gens: &[PauliString], targets: &[PauliString]) -> Result<Vec<(BitVec, bool)>> {
    let n = gens.first().map(|g| g.num_qubits()).unwrap_or(0);
    let mut ech = Echelon::new(crate::pauli::symplectic_row_len(n), gens.len());
    for g in gens {
        ech.insert(&g.symplectic_row())
            .map_err(|_| Error::Invalid("dependent measurement generators".into()))?;
    }
    targets
        .iter()
        .map(|t| {
            let (res, combo) = ech.reduce(&t.symplectic_row());
            if !res.is_zero() {
                return Err(Error::NotSubgroup(format!("{t} is not in the measurement group")));
            }
            let mut prod = PauliString::identity(n);
            for j in combo.iter_ones() {
                prod.mul_assign(&gens[j]);
            }
            let diff = (t.phase_exp() + 4 - prod.phase_exp()) & 3;
            match diff {
                0 => Ok((combo, false)),
                2 => Ok((combo, true)),
                _ => Err(Error::NonHermitian(t.to_string())),
            }
        })
        .collect()
}

/// Normal form of the effective POVM of the eigenbasis of `s` (outcome bit `j` belongs to
/// generator `j`) with qubits `n..` projected onto the stabilizer state of `z`.
pub fn stabilizer_effective_povm(s: &PauliSubgroup, z: &PauliSubgroup, n: usize) -> Result<StabilizerPovmForm> {
    let total = s.num_qubits();
    let m = z.num_qubits();
    if n + m != total {
        return Err(Error::SizeMismatch { expected: total - n.min(total), got: m });
    }
    check_maximal_abelian(s)?;
    AncillaSpec::Stabilizer(z.clone()).validate()?;
    let s_signed = signed_lift(s)?;
    let zp = z.embed(total, n);
    let al = align_generators(&s_signed, &zp)?;
    let gens: Vec<PauliString> = s_signed.generators().to_vec();
    let character = |p: &PauliString| -> Result<bool> {
        register_character(p, n, z)
            .map(|c| c < 0)
            .ok_or_else(|| Error::Invalid(format!("{p} does not commute with the ancilla stabilizers")))
    };
    let d = al.h.iter().map(character).collect::<Result<Vec<_>>>()?;
    let d_prime = al.g.iter().map(character).collect::<Result<Vec<_>>>()?;
    let h_dec = decompose(&gens, &al.h)?;
    let g_dec = decompose(&gens, &al.g)?;
    let ell = al.h.len();
    let mut table = Vec::new();
    if total <= 16 {
        for b in 0u64..(1 << total) {
            let bv = BitVec::from_u64(total, b);
            let bit = |(c, neg): &(BitVec, bool)| c.dot(&bv) ^ neg;
            let nonzero = h_dec.iter().zip(&d).all(|(hd, &dj)| bit(hd) == dj);
            let effective = g_dec.iter().zip(&d_prime).map(|(gd, &dk)| bit(gd) ^ dk).collect();
            table.push(OutcomeEntry { outcome: b, nonzero, effective });
        }
    }
    Ok(StabilizerPovmForm {
        n,
        m,
        ell,
        effective_generators: al.g.iter().map(|g| g.projective().split_at(n).0).collect(),
        h: al.h,
        g: al.g,
        g_tilde: al.g_tilde,
        h_tilde: al.h_tilde,
        d,
        d_prime,
        outcome_relabel: table,
        nonzero_outcomes: pow2(total - ell)?,
        multiplicity: pow2(m - ell)?,
        scale_log2: ell as i64 - m as i64,
    })
}

/// Group Fourier transform over `{0,1}^d`.
///
/// Forward: `mu_b = 2^{-d} sum_xi (-1)^{xi . b} mu'_xi`. Inverse:
/// `mu'_xi = sum_b (-1)^{xi . b} mu_b`.
pub fn group_fourier(family: &[DenseOperator], inverse: bool) -> Result<Vec<DenseOperator>> {
    let len = family.len();
    if len == 0 || !len.is_power_of_two() {
        return Err(Error::Invalid(format!("family of size {len} is not indexed by bit strings")));
    }
    let dim = family[0].dim();
    let norm = if inverse { 1.0 } else { 1.0 / len as f64 };
    Ok((0..len)
        .map(|b| {
            let mut acc = DenseOperator::zeros(dim);
            for (xi, op) in family.iter().enumerate() {
                let sign = if (xi & b).count_ones() % 2 == 1 { -norm } else { norm };
                acc.add_assign(op, sign);
            }
            acc
        })
        .collect())
}

fn big_pow(base: u32, e: u32) -> BigUint {
    num_traits::pow(BigUint::from(base), e as usize)
}

fn to_u128(v: BigUint) -> Result<u128> {
    v.to_u128().ok_or(Error::Invalid("bound exceeds 128 bits".into()))
}

/// Smallest `t` with `3^t >= 4^n`.
pub fn necessary_t(n: u32) -> u32 {
    let target = big_pow(4, n);
    let mut t = 0;
    let mut v = BigUint::one();
    while v < target {
        v *= 3u32;
        t += 1;
    }
    t
}

/// `2^{n-t} 3^t`, the ceiling on `s_mu` for `t <= n`.
pub fn bound_t_le_n(n: u32, t: u32) -> Result<u128> {
    if t > n {
        return Err(Error::Invalid(format!("t = {t} exceeds n = {n}")));
    }
    to_u128(big_pow(2, n - t) * big_pow(3, t))
}

/// `2^{-l} (3^{a+1} - 1)^r (3^a - 1)^{l-r}` with `l = t - n`, `a = floor(t / l)`,
/// `r = t - a l`: the value reached by the disjoint-support construction for `t > n`.
pub fn bound_t_gt_n(n: u32, t: u32) -> Result<u128> {
    if t <= n {
        return Err(Error::Invalid(format!("t = {t} does not exceed n = {n}")));
    }
    let l = t - n;
    let a = t / l;
    let r = t - a * l;
    let num = num_traits::pow(big_pow(3, a + 1) - 1u32, r as usize) * num_traits::pow(big_pow(3, a) - 1u32, (l - r) as usize);
    let den = big_pow(2, l);
    debug_assert!((&num % &den) == BigUint::from(0u32));
    to_u128(num / den)
}

/// Number of cosets of `h` in `parent` that contain a `Z`-free element.
pub fn zfree_coset_count(h: &PauliSubgroup, parent: &PauliSubgroup) -> Result<u64> {
    if h.num_qubits() != parent.num_qubits() {
        return Err(Error::SizeMismatch { expected: parent.num_qubits(), got: h.num_qubits() });
    }
    if let Some(b) = h.basis().iter().find(|b| !parent.contains(b)) {
        return Err(Error::NotSubgroup(format!("{b} is not an element of the parent group")));
    }
    let hu = h.unsigned();
    let mut keys = HashSet::new();
    for e in parent.projective_elements()? {
        if e.is_z_free() {
            keys.insert(hu.coset_key(&e));
        }
    }
    Ok(keys.len() as u64)
}

/// Whether every coset of `pi_t(S_t)` in `pi_t(S)` has a `Z`-free member.
pub fn ic_condition_check(st_projection: &PauliSubgroup, s_projection: &PauliSubgroup) -> Result<bool> {
    let count = zfree_coset_count(st_projection, s_projection)?;
    Ok(count == pow2(s_projection.dim() - st_projection.dim())?)
}

/// [`ic_condition_check`] with `pi_t(S)` the full centralizer, as for maximal entanglement.
pub fn ic_condition_from_st(st_projection: &PauliSubgroup) -> Result<bool> {
    if !st_projection.is_abelian() {
        return Err(Error::NonAbelian);
    }
    ic_condition_check(st_projection, &st_projection.centralizer())
}

/// Maximal group on `n + t` qubits with `S_t = I ⊗ h`, pairing data `X_i, Z_i` with the
/// given anticommuting pairs of `C(h) / h`.
pub fn attach_data_with_pairs(
    h: &PauliSubgroup,
    pairs: &[(ProjectivePauli, ProjectivePauli)],
) -> Result<PauliSubgroup> {
    let t = h.num_qubits();
    let n = pairs.len();
    let id_n = PauliString::identity(n);
    let mut gens: Vec<PauliString> = h.basis().iter().map(|b| id_n.tensor(&b.projective().lift())).collect();
    for (i, (a, b)) in pairs.iter().enumerate() {
        if a.num_qubits() != t || b.num_qubits() != t {
            return Err(Error::SizeMismatch { expected: t, got: a.num_qubits() });
        }
        gens.push(PauliString::single(n, i, Letter::X).tensor(&a.lift()).projective().lift());
        gens.push(PauliString::single(n, i, Letter::Z).tensor(&b.lift()).projective().lift());
    }
    let s = PauliSubgroup::new(n + t, gens, false)?;
    check_maximal_abelian(&s)?;
    Ok(s)
}

/// Symplectic basis `(a_i, b_i)` of `C(h) / h`.
pub fn symplectic_pairs(h: &PauliSubgroup) -> Result<Vec<(ProjectivePauli, ProjectivePauli)>> {
    if !h.is_abelian() {
        return Err(Error::NonAbelian);
    }
    let c = h.centralizer();
    let mut ech = Echelon::new(crate::pauli::symplectic_row_len(h.num_qubits()), h.dim() + c.dim());
    for b in h.basis() {
        let _ = ech.insert(&b.symplectic_row());
    }
    let mut rest: Vec<ProjectivePauli> = Vec::new();
    for b in c.basis() {
        if ech.insert(&b.symplectic_row()).is_ok() {
            rest.push(b.projective());
        }
    }
    let mut pairs = Vec::new();
    while !rest.is_empty() {
        let a = rest.remove(0);
        let idx = rest
            .iter()
            .position(|b| !b.commutes(&a))
            .ok_or_else(|| Error::Invalid("degenerate quotient".into()))?;
        let b = rest.remove(idx);
        for v in &mut rest {
            let (va, vb) = (v.commutes(&a), v.commutes(&b));
            if !va {
                v.mul_assign(&b);
            }
            if !vb {
                v.mul_assign(&a);
            }
        }
        pairs.push((a, b));
    }
    Ok(pairs)
}

/// Maximal group on `n + t` qubits with maximal entanglement and `pi_t(S_t) = h`, where
/// `n = t - dim h`.
pub fn attach_data(h: &PauliSubgroup) -> Result<PauliSubgroup> {
    attach_data_with_pairs(h, &symplectic_pairs(h)?)
}

/// `<X_{2i} Z_{2i+1} : i < n>` on `2n` qubits.
pub fn ic_witness_generators(n: usize) -> PauliSubgroup {
    let t = 2 * n;
    let gens = (0..n)
        .map(|i| {
            let mut letters = vec![Letter::I; t];
            letters[2 * i] = Letter::X;
            letters[2 * i + 1] = Letter::Z;
            PauliString::from_letters(&letters, 0)
        })
        .collect();
    PauliSubgroup::new(t, gens, false).expect("disjoint supports")
}

/// Abstract `S_t` projection and explicit circuit reaching IC with `t = 2n`.
pub fn ic_witness(n: usize) -> Result<(PauliSubgroup, DopedCircuit)> {
    if n == 0 {
        return Err(Error::Invalid("n must be positive".into()));
    }
    Ok((ic_witness_generators(n), universal_2n_circuit(n)))
}
