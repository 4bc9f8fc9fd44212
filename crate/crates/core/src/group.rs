//! Subgroups of the Pauli group in row-reduced symplectic form.
//!
//! A [`PauliSubgroup`] keeps the independent generators it was built from together
//! with a reduced row echelon basis. For signed groups every basis element is an
//! actual (hermitian) group element, so membership queries also recover the sign.
//! Unsigned groups are treated projectively and their basis elements are the
//! hermitian `+1` lifts.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::bits::{left_nullspace, right_nullspace, BitVec};
use crate::error::{Error, Result};
use crate::pauli::{PauliString, ProjectivePauli};

/// Largest group dimension any routine will enumerate element by element.
pub const ENUMERATION_LIMIT: usize = 22;

#[derive(Clone, Debug)]
pub struct PauliSubgroup {
    n: usize,
    signed: bool,
    abelian: bool,
    generators: Vec<PauliString>,
    basis: Vec<PauliString>,
    pivots: Vec<usize>,
    dropped: usize,
}

/// Column `c` of the padded symplectic row of `p`.
fn row_bit(p: &PauliString, c: usize) -> bool {
    let half = 64 * p.x().words().len();
    if c < half {
        p.x().get(c)
    } else {
        p.z().get(c - half)
    }
}

fn first_col(p: &PauliString) -> Option<usize> {
    let half = 64 * p.x().words().len();
    p.x().first_one().or_else(|| p.z().first_one().map(|q| q + half))
}

/// `x` bits followed by `z` bits, no padding.
pub(crate) fn compact_row(x: &BitVec, z: &BitVec) -> BitVec {
    x.concat(z)
}

fn from_compact(n: usize, v: &BitVec) -> ProjectivePauli {
    ProjectivePauli::from_xz(v.slice(0, n), v.slice(n, 2 * n))
}

fn product_of(n: usize, elems: &[PauliString], combo: &BitVec) -> PauliString {
    let mut acc = PauliString::identity(n);
    for i in combo.iter_ones() {
        acc.mul_assign(&elems[i]);
    }
    acc
}

fn commutes_on(a: &PauliString, b: &PauliString, start: usize, end: usize) -> bool {
    let (ax, az) = (a.x().slice(start, end), a.z().slice(start, end));
    let (bx, bz) = (b.x().slice(start, end), b.z().slice(start, end));
    ax.dot(&bz) == az.dot(&bx)
}

fn check_len(n: usize, p: &PauliString) -> Result<()> {
    if p.num_qubits() != n {
        return Err(Error::SizeMismatch { expected: n, got: p.num_qubits() });
    }
    Ok(())
}

impl PauliSubgroup {
    /// Canonicalizes `generators` into reduced form.
    ///
    /// In signed mode every generator must be hermitian and the generators must commute;
    /// a dependent generator whose sign disagrees with the product of the others is a
    /// contradiction. In unsigned mode dependent generators are dropped silently.
    pub fn new(n: usize, generators: Vec<PauliString>, signed: bool) -> Result<Self> {
        for g in &generators {
            check_len(n, g)?;
        }
        let mut abelian = true;
        'outer: for (i, a) in generators.iter().enumerate() {
            for b in &generators[i + 1..] {
                if !a.commutes(b) {
                    abelian = false;
                    break 'outer;
                }
            }
        }
        if signed {
            if let Some(g) = generators.iter().find(|g| !g.is_hermitian()) {
                return Err(Error::NonHermitian(g.to_string()));
            }
            if !abelian {
                return Err(Error::NotAStabilizer("generators do not commute".into()));
            }
        }
        let mut group = PauliSubgroup {
            n,
            signed,
            abelian,
            generators: Vec::new(),
            basis: Vec::new(),
            pivots: Vec::new(),
            dropped: 0,
        };
        for g in generators {
            let lifted = if signed { g.clone() } else { g.projective().lift() };
            match group.insert_basis(lifted) {
                Ok(()) => group.generators.push(g),
                Err(residual) => {
                    if signed && residual.phase_exp() != 0 {
                        return Err(Error::Contradiction(format!(
                            "{g} is a product of the other generators up to the sign {residual}"
                        )));
                    }
                    group.dropped += 1;
                }
            }
        }
        if !signed {
            for b in &mut group.basis {
                *b = b.projective().lift();
            }
        }
        Ok(group)
    }

    pub fn from_strs(gens: &[&str], signed: bool) -> Result<Self> {
        let parsed: Vec<PauliString> = gens.iter().map(|s| s.parse()).collect::<Result<_>>()?;
        let n = parsed.first().map(|p| p.num_qubits()).ok_or_else(|| {
            Error::Invalid("cannot infer the qubit count of an empty generator list".into())
        })?;
        PauliSubgroup::new(n, parsed, signed)
    }

    pub fn trivial(n: usize) -> Self {
        PauliSubgroup::new(n, Vec::new(), true).expect("empty group is valid")
    }

    /// Reduces `g` against the current basis; on dependence returns the residual (`+-I`).
    fn insert_basis(&mut self, g: PauliString) -> std::result::Result<(), PauliString> {
        let r = self.reduce(&g);
        let Some(p) = first_col(&r) else {
            return Err(r);
        };
        for b in &mut self.basis {
            if row_bit(b, p) {
                b.mul_assign(&r);
            }
        }
        let pos = self.pivots.partition_point(|&q| q < p);
        self.pivots.insert(pos, p);
        self.basis.insert(pos, r);
        Ok(())
    }

    fn reduce(&self, g: &PauliString) -> PauliString {
        let mut r = g.clone();
        for (b, &p) in self.basis.iter().zip(&self.pivots) {
            if row_bit(&r, p) {
                r.mul_assign(b);
            }
        }
        r
    }

    /// Canonical representative of the coset `g H` of this group `H`, ignoring phases.
    pub fn coset_key(&self, g: &ProjectivePauli) -> ProjectivePauli {
        self.reduce(&g.lift()).projective()
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn is_signed(&self) -> bool {
        self.signed
    }

    pub fn is_abelian(&self) -> bool {
        self.abelian
    }

    /// Abelian with `n` independent generators.
    pub fn is_maximal(&self) -> bool {
        self.abelian && self.dim() == self.n
    }

    /// Independent input generators, in input order.
    pub fn generators(&self) -> &[PauliString] {
        &self.generators
    }

    /// Number of input generators dropped as dependent.
    pub fn dropped(&self) -> usize {
        self.dropped
    }

    /// Reduced row echelon basis.
    pub fn basis(&self) -> &[PauliString] {
        &self.basis
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    /// Canonical phase-free basis; two groups are projectively equal iff these agree.
    pub fn canonical_form(&self) -> Vec<ProjectivePauli> {
        self.basis.iter().map(|b| b.projective()).collect()
    }

    pub fn same_elements(&self, other: &PauliSubgroup) -> bool {
        self.n == other.n && self.canonical_form() == other.canonical_form()
    }

    /// Drops all sign information.
    pub fn unsigned(&self) -> PauliSubgroup {
        PauliSubgroup::new(self.n, self.generators.clone(), false).expect("unsigned rebuild")
    }

    pub fn contains(&self, g: &PauliString) -> bool {
        g.num_qubits() == self.n && self.reduce(g).is_identity()
    }

    pub fn contains_projective(&self, g: &ProjectivePauli) -> bool {
        self.contains(&g.lift())
    }

    /// If `g` is, up to phase, an element of the group, returns `k` with `g = i^k h`
    /// for the group element `h`. For unsigned groups `h` is the hermitian lift.
    pub fn membership_phase(&self, g: &PauliString) -> Option<u8> {
        if g.num_qubits() != self.n {
            return None;
        }
        let r = self.reduce(g);
        if !r.is_identity() {
            return None;
        }
        if self.signed {
            Some(r.phase_exp())
        } else {
            Some(g.letter_phase())
        }
    }

    /// `Some(+1)` or `Some(-1)` when `g` or `-g` is a group element.
    pub fn sign_of(&self, g: &PauliString) -> Option<i8> {
        match self.membership_phase(g)? {
            0 => Some(1),
            2 => Some(-1),
            _ => None,
        }
    }

    /// Group element whose projective class is `g`, with its sign in this group.
    pub fn element_for(&self, g: &ProjectivePauli) -> Option<PauliString> {
        let lift = g.lift();
        let k = self.membership_phase(&lift)?;
        let ph = lift.phase_exp();
        Some(lift.with_phase(ph + 4 - k))
    }

    fn check_enumerable(&self) -> Result<()> {
        if self.dim() > ENUMERATION_LIMIT {
            return Err(Error::TooLarge { dim: self.dim(), limit: ENUMERATION_LIMIT });
        }
        Ok(())
    }

    /// All `2^dim` elements. Element `i` is the product of the basis elements selected
    /// by the bits of `i`.
    pub fn elements(&self) -> Result<Vec<PauliString>> {
        self.check_enumerable()?;
        let d = self.dim();
        let mut out = Vec::with_capacity(1 << d);
        out.push(PauliString::identity(self.n));
        for i in 1usize..(1 << d) {
            let j = i.trailing_zeros() as usize;
            let mut e = out[i ^ (1 << j)].clone();
            e.mul_assign(&self.basis[j]);
            out.push(e);
        }
        if !(self.signed || self.abelian) {
            for e in &mut out {
                *e = e.projective().lift();
            }
        }
        Ok(out)
    }

    pub fn projective_elements(&self) -> Result<Vec<ProjectivePauli>> {
        Ok(self.elements()?.iter().map(|e| e.projective()).collect())
    }

    /// Element selected by the bits of `combo` over [`PauliSubgroup::basis`].
    pub fn element(&self, combo: &BitVec) -> PauliString {
        product_of(self.n, &self.basis, combo)
    }

    /// Subgroup `{ a in self : a commutes with every element of other }`.
    pub fn centralizer_within(&self, other: &PauliSubgroup) -> PauliSubgroup {
        let rows: Vec<BitVec> = self
            .basis
            .iter()
            .map(|a| BitVec::from_bools(&other.basis.iter().map(|b| !a.commutes(b)).collect::<Vec<_>>()))
            .collect();
        let combos = left_nullspace(&rows);
        let gens = combos.iter().map(|c| product_of(self.n, &self.basis, c)).collect();
        PauliSubgroup::new(self.n, gens, self.signed && self.abelian).expect("subgroup of a valid group")
    }

    /// Full centralizer of the group inside the projective Pauli group on `n` qubits.
    pub fn centralizer(&self) -> PauliSubgroup {
        let n = self.n;
        // v commutes with b iff v . (b.z, b.x) = 0
        let rows: Vec<BitVec> = self.basis.iter().map(|b| compact_row(b.z(), b.x())).collect();
        let gens = right_nullspace(&rows, 2 * n).iter().map(|v| from_compact(n, v).lift()).collect();
        PauliSubgroup::new(n, gens, false).expect("centralizer")
    }

    /// `self ∩ other`. Elements carry the signs they have in `self`.
    pub fn intersect(&self, other: &PauliSubgroup) -> Result<PauliSubgroup> {
        if self.n != other.n {
            return Err(Error::SizeMismatch { expected: self.n, got: other.n });
        }
        let rows: Vec<BitVec> = self
            .basis
            .iter()
            .chain(other.basis.iter())
            .map(|p| compact_row(p.x(), p.z()))
            .collect();
        let k = self.dim();
        let gens = left_nullspace(&rows)
            .iter()
            .map(|c| product_of(self.n, &self.basis, &c.slice(0, k)))
            .collect();
        PauliSubgroup::new(self.n, gens, self.signed && self.abelian)
    }

    /// Group generated by the union of both generator sets.
    pub fn join(&self, other: &PauliSubgroup) -> Result<PauliSubgroup> {
        let mut gens = self.basis.clone();
        gens.extend(other.basis.iter().cloned());
        PauliSubgroup::new(self.n, gens, self.signed && other.signed)
    }

    /// Elements supported inside `start..end` (as a subgroup on all `n` qubits).
    pub fn local_subgroup(&self, start: usize, end: usize) -> PauliSubgroup {
        let outside: Vec<usize> = (0..self.n).filter(|q| *q < start || *q >= end).collect();
        let rows: Vec<BitVec> = self
            .basis
            .iter()
            .map(|b| {
                let r = b.projective().restrict(&outside);
                compact_row(r.x(), r.z())
            })
            .collect();
        let gens = left_nullspace(&rows).iter().map(|c| product_of(self.n, &self.basis, c)).collect();
        PauliSubgroup::new(self.n, gens, self.signed && self.abelian).expect("subgroup of a valid group")
    }

    /// Image under restriction to `qubits` (unsigned).
    pub fn project(&self, qubits: &[usize]) -> PauliSubgroup {
        let gens = self.basis.iter().map(|b| b.projective().restrict(qubits).lift()).collect();
        PauliSubgroup::new(qubits.len(), gens, false).expect("projection")
    }

    pub fn project_range(&self, start: usize, end: usize) -> PauliSubgroup {
        let qs: Vec<usize> = (start..end).collect();
        self.project(&qs)
    }

    /// Embeds into `total` qubits, occupying `offset..offset + n`.
    pub fn embed(&self, total: usize, offset: usize) -> PauliSubgroup {
        let gens = self
            .generators
            .iter()
            .map(|g| {
                let left = PauliString::identity(offset);
                let right = PauliString::identity(total - offset - self.n);
                left.tensor(g).tensor(&right)
            })
            .collect();
        PauliSubgroup::new(total, gens, self.signed).expect("embedding")
    }
}

impl PartialEq for PauliSubgroup {
    /// Projective equality, plus equal signs when both groups are signed.
    fn eq(&self, other: &Self) -> bool {
        if !self.same_elements(other) {
            return false;
        }
        if self.signed && other.signed {
            return self.basis.iter().all(|b| other.sign_of(b) == Some(1));
        }
        true
    }
}

/// Parses a signed group file: one Pauli per line, `#` starts a comment.
pub fn parse_group(text: &str, signed: bool) -> Result<PauliSubgroup> {
    let mut gens = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let body = line.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let p: PauliString = body
            .parse()
            .map_err(|e| Error::Parse(format!("line {}: {e}", lineno + 1)))?;
        gens.push(p);
    }
    let n = gens
        .first()
        .map(|g| g.num_qubits())
        .ok_or_else(|| Error::Parse("group file contains no generators".into()))?;
    PauliSubgroup::new(n, gens, signed)
}

pub fn format_group(g: &PauliSubgroup) -> String {
    let mut s = String::new();
    for b in g.generators() {
        s.push_str(&b.to_string());
        s.push('\n');
    }
    s
}

/// Split of a stabilizer group across the cut `0..split | split..n`.
#[derive(Clone, Debug)]
pub struct EntanglementDecomposition {
    pub split: usize,
    /// Elements supported on the left block.
    pub s_a: PauliSubgroup,
    /// Elements supported on the right block.
    pub s_b: PauliSubgroup,
    /// Number of nonlocal generator pairs.
    pub p: usize,
    /// Pairs `(g_i, gbar_i)` whose left parts anticommute pairwise and commute across pairs.
    pub pairs: Vec<(PauliString, PauliString)>,
}

impl EntanglementDecomposition {
    pub fn local_a(&self) -> PauliSubgroup {
        self.s_a.project_range(0, self.split)
    }

    pub fn local_b(&self) -> PauliSubgroup {
        self.s_b.project_range(self.split, self.s_b.num_qubits())
    }
}

/// Greedily extends `base` with elements of `candidates`; returns the added ones.
fn extend_basis(n: usize, base: &[PauliString], candidates: &[PauliString]) -> Vec<PauliString> {
    let mut acc = PauliSubgroup::new(n, base.to_vec(), false).expect("base");
    let mut added = Vec::new();
    for c in candidates {
        if !acc.contains(c) {
            added.push(c.clone());
            acc = acc.join(&PauliSubgroup::new(n, vec![c.clone()], false).expect("single")).expect("join");
        }
    }
    added
}

/// Entanglement `p` of an abelian group across `0..split | split..n`, from the ranks
/// of the two projections: `dim pi_A(S) + dim pi_B(S) = dim S + 2p`.
pub fn entanglement(s: &PauliSubgroup, split: usize) -> Result<usize> {
    let n = s.num_qubits();
    if split > n {
        return Err(Error::InvalidSplit(format!("split {split} exceeds {n} qubits")));
    }
    if !s.is_abelian() {
        return Err(Error::NonAbelian);
    }
    let twice = s.project_range(0, split).dim() + s.project_range(split, n).dim() - s.dim();
    debug_assert!(twice % 2 == 0);
    Ok(twice / 2)
}

pub fn entanglement_decomposition(s: &PauliSubgroup, split: usize) -> Result<EntanglementDecomposition> {
    let n = s.num_qubits();
    if split > n {
        return Err(Error::InvalidSplit(format!("split {split} exceeds {n} qubits")));
    }
    if !s.is_abelian() {
        return Err(Error::NonAbelian);
    }
    let s_a = s.local_subgroup(0, split);
    let s_b = s.local_subgroup(split, n);
    let local = s_a.join(&s_b)?;
    let twice_p = s.dim() - local.dim();
    debug_assert!(twice_p % 2 == 0);
    let candidates: Vec<PauliString> = s.generators().iter().chain(s.basis()).cloned().collect();
    let mut rest = extend_basis(n, local.basis(), &candidates);
    let mut pairs = Vec::new();
    while !rest.is_empty() {
        let a = rest.remove(0);
        let idx = rest
            .iter()
            .position(|b| !commutes_on(&a, b, 0, split))
            .ok_or_else(|| Error::Invalid("degenerate nonlocal part".into()))?;
        let b = rest.remove(idx);
        for c in &mut rest {
            let ca = commutes_on(c, &a, 0, split);
            let cb = commutes_on(c, &b, 0, split);
            if !cb {
                c.mul_assign(&a);
            }
            if !ca {
                c.mul_assign(&b);
            }
        }
        pairs.push((a, b));
    }
    Ok(EntanglementDecomposition { split, s_a, s_b, p: twice_p / 2, pairs })
}

/// Generators of `S` and `Z` aligned so that
/// `S = <h, g, gt>`, `Z = <h, ht>`, `S ∩ Z = <h>`, `S ∩ C(Z) = <h, g>`, and
/// `gt[i]` anticommutes with `ht[j]` exactly when `i == j`.
#[derive(Clone, Debug)]
pub struct AlignedGenerators {
    pub h: Vec<PauliString>,
    pub g: Vec<PauliString>,
    pub g_tilde: Vec<PauliString>,
    pub h_tilde: Vec<PauliString>,
}

/// Aligns a maximal stabilizer group `s` with an abelian group `z` on the same qubits.
pub fn align_generators(s: &PauliSubgroup, z: &PauliSubgroup) -> Result<AlignedGenerators> {
    let n = s.num_qubits();
    if z.num_qubits() != n {
        return Err(Error::SizeMismatch { expected: n, got: z.num_qubits() });
    }
    if !s.is_maximal() {
        return Err(Error::NotMaximal { dim: s.dim(), n });
    }
    if !z.is_abelian() {
        return Err(Error::NonAbelian);
    }
    let h_group = s.intersect(z)?;
    let h: Vec<PauliString> = h_group.basis().to_vec();
    let sc = s.centralizer_within(z);
    let sc_candidates: Vec<PauliString> =
        s.generators().iter().filter(|x| sc.contains(x)).chain(sc.basis()).cloned().collect();
    let g = extend_basis(n, &h, &sc_candidates);
    let mut sc_all = h.clone();
    sc_all.extend(g.iter().cloned());
    let s_candidates: Vec<PauliString> = s.generators().iter().chain(s.basis()).cloned().collect();
    let mut g_tilde = extend_basis(n, &sc_all, &s_candidates);
    // signs of ht are irrelevant to the alignment; take z's own elements
    let z_candidates: Vec<PauliString> = z.generators().iter().chain(z.basis()).cloned().collect();
    let h_in_z: Vec<PauliString> = h
        .iter()
        .map(|e| z.element_for(&e.projective()).expect("h lies in z"))
        .collect();
    let mut h_tilde = extend_basis(n, &h_in_z, &z_candidates);
    if g_tilde.len() != h_tilde.len() {
        return Err(Error::Invalid("alignment failed: unequal complement sizes".into()));
    }
    for k in 0..h_tilde.len() {
        for j in 0..k {
            if !h_tilde[k].commutes(&g_tilde[j]) {
                let hj = h_tilde[j].clone();
                h_tilde[k].mul_assign(&hj);
            }
        }
        let i = (k..g_tilde.len())
            .find(|&i| !g_tilde[i].commutes(&h_tilde[k]))
            .ok_or_else(|| Error::Invalid("alignment failed: no anticommuting partner".into()))?;
        g_tilde.swap(k, i);
        let gk = g_tilde[k].clone();
        for gi in g_tilde.iter_mut().skip(k + 1) {
            if !gi.commutes(&h_tilde[k]) {
                gi.mul_assign(&gk);
            }
        }
    }
    Ok(AlignedGenerators { h, g, g_tilde, h_tilde })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Coset {
    /// Lexicographically smallest member under `I < X < Y < Z`.
    pub representative: ProjectivePauli,
    pub members: Vec<ProjectivePauli>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CosetTable {
    pub cosets: Vec<Coset>,
}

impl CosetTable {
    pub fn len(&self) -> usize {
        self.cosets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cosets.is_empty()
    }
}

/// Cosets of `h` in `s`, sorted by representative; members sorted within each coset.
pub fn coset_table(s: &PauliSubgroup, h: &PauliSubgroup) -> Result<CosetTable> {
    if s.num_qubits() != h.num_qubits() {
        return Err(Error::SizeMismatch { expected: s.num_qubits(), got: h.num_qubits() });
    }
    if let Some(b) = h.basis().iter().find(|b| !s.contains(b)) {
        return Err(Error::NotSubgroup(format!("{b} is not an element of the parent group")));
    }
    let hu = h.unsigned();
    let mut buckets: BTreeMap<ProjectivePauli, Vec<ProjectivePauli>> = BTreeMap::new();
    for e in s.projective_elements()? {
        let key = hu.reduce(&e.lift()).projective();
        buckets.entry(key).or_default().push(e);
    }
    let mut cosets: Vec<Coset> = buckets
        .into_values()
        .map(|mut members| {
            members.sort();
            Coset { representative: members[0].clone(), members }
        })
        .collect();
    cosets.sort_by(|a, b| a.representative.cmp(&b.representative));
    Ok(CosetTable { cosets })
}

/// Cosets of `S_A S_B` in `S`.
pub fn double_coset_table(s: &PauliSubgroup, s_a: &PauliSubgroup, s_b: &PauliSubgroup) -> Result<CosetTable> {
    coset_table(s, &s_a.join(s_b)?)
}

/// `|<psi_1|psi_2>|^2` for two stabilizer states given by maximal signed groups.
pub fn stabilizer_overlap(s1: &PauliSubgroup, s2: &PauliSubgroup) -> Result<f64> {
    for s in [s1, s2] {
        if !s.is_signed() {
            return Err(Error::Invalid("overlap needs signed groups".into()));
        }
        if !s.is_maximal() {
            return Err(Error::NotMaximal { dim: s.dim(), n: s.num_qubits() });
        }
    }
    let common = s1.intersect(s2)?;
    if common.basis().iter().any(|h| s2.sign_of(h) != Some(1)) {
        return Ok(0.0);
    }
    Ok(2f64.powi(common.dim() as i32 - s1.num_qubits() as i32))
}

/// Number of `Z`-free Paulis commuting with every element of the abelian group `h`,
/// via `(1/|H|) sum_h 3^{n_I(h)} (-1)^{n_Z(h)}`.
pub fn zfree_centralizer_count(h: &PauliSubgroup) -> Result<u128> {
    if !h.is_abelian() {
        return Err(Error::NonAbelian);
    }
    let mut total: i128 = 0;
    for e in h.projective_elements()? {
        let (ni, _, _, nz) = e.weight_counts();
        let term = 3i128.pow(ni as u32);
        total += if nz % 2 == 0 { term } else { -term };
    }
    let order = 1i128 << h.dim();
    debug_assert_eq!(total % order, 0);
    Ok((total / order) as u128)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pauli::pauli;

    fn group(gens: &[&str]) -> PauliSubgroup {
        PauliSubgroup::from_strs(gens, true).unwrap()
    }

    #[test]
    fn signed_contradictions() {
        assert!(matches!(PauliSubgroup::from_strs(&["Z", "-Z"], true), Err(Error::Contradiction(_))));
        assert!(matches!(PauliSubgroup::from_strs(&["X", "Z"], true), Err(Error::NotAStabilizer(_))));
        assert!(matches!(
            PauliSubgroup::from_strs(&["XX", "ZZ", "YY"], true),
            Err(Error::Contradiction(_))
        ));
        assert!(PauliSubgroup::from_strs(&["XX", "ZZ", "-YY"], true).is_ok());
        assert!(matches!(PauliSubgroup::from_strs(&["iZ"], true), Err(Error::NonHermitian(_))));
        let u = PauliSubgroup::from_strs(&["X", "Z", "Y"], false).unwrap();
        assert_eq!(u.dim(), 2);
        assert_eq!(u.dropped(), 1);
        assert!(!u.is_abelian());
    }

    #[test]
    fn membership_with_sign() {
        let s = group(&["XX", "ZZ"]);
        assert_eq!(s.sign_of(&pauli("YY")), Some(-1));
        assert_eq!(s.sign_of(&pauli("-YY")), Some(1));
        assert_eq!(s.sign_of(&pauli("XY")), None);
    }

    #[test]
    fn elements_of_example_group() {
        let s = group(&["ZZI", "ZIZ", "XXX"]);
        let e = s.elements().unwrap();
        assert_eq!(e.len(), 8);
        assert!(e.iter().all(|x| x.is_hermitian() && s.sign_of(x) == Some(1)));
    }

    #[test]
    fn intersection_and_centralizer() {
        let s = group(&["ZZI", "ZIZ", "XXX"]);
        let z = group(&["IXX", "IYY"]);
        let i = s.intersect(&z).unwrap();
        assert_eq!(i.canonical_form(), vec!["IZZ".parse().unwrap()]);
        let c = s.centralizer_within(&z);
        assert_eq!(c.dim(), 2);
        assert!(c.contains(&pauli("XXX")) && c.contains(&pauli("IZZ")));
        let full = group(&["XZ"]).centralizer();
        assert_eq!(full.dim(), 3);
    }

    #[test]
    fn entanglement_of_example_group() {
        let s = group(&["XIII", "IIXI", "IXIX", "IYIY"]);
        let d = entanglement_decomposition(&s, 2).unwrap();
        assert_eq!(d.p, 1);
        assert_eq!(d.s_a.dim(), 1);
        assert_eq!(d.s_b.dim(), 1);
        let (a, b) = &d.pairs[0];
        assert!(!commutes_on(a, b, 0, 2));
    }

    #[test]
    fn alignment_properties() {
        let s = group(&["ZZI", "ZIZ", "XXX"]);
        let z = group(&["IIX"]);
        let a = align_generators(&s, &z).unwrap();
        assert!(a.h.is_empty());
        assert_eq!(a.g.len(), 2);
        assert_eq!(a.g_tilde, vec![pauli("ZIZ")]);
        assert_eq!(a.g, vec![pauli("ZZI"), pauli("XXX")]);
    }

    #[test]
    fn coset_table_of_xz() {
        let h = PauliSubgroup::from_strs(&["XZ"], false).unwrap();
        let c = h.centralizer();
        let t = coset_table(&c, &h).unwrap();
        let reps: Vec<String> = t.cosets.iter().map(|c| c.representative.to_string()).collect();
        assert_eq!(reps, ["II", "IZ", "YX", "YY"]);
        assert!(matches!(coset_table(&h, &c), Err(Error::NotSubgroup(_))));
    }

    #[test]
    fn overlap_of_simple_states() {
        let z = group(&["Z"]);
        let x = group(&["X"]);
        let mz = group(&["-Z"]);
        assert_eq!(stabilizer_overlap(&z, &x).unwrap(), 0.5);
        assert_eq!(stabilizer_overlap(&z, &z).unwrap(), 1.0);
        assert_eq!(stabilizer_overlap(&z, &mz).unwrap(), 0.0);
    }

    #[test]
    fn zfree_counts_match_examples() {
        let count = |gens: &[&str]| zfree_centralizer_count(&PauliSubgroup::from_strs(gens, false).unwrap()).unwrap();
        assert_eq!(count(&["IIZX"]), 36);
        assert_eq!(count(&["IZZX"]), 42);
        assert_eq!(count(&["IIZZ"]), 45);
        assert_eq!(zfree_centralizer_count(&PauliSubgroup::trivial(4)).unwrap(), 81);
        assert_eq!(count(&["IIXZ", "XZII"]), 16);
    }

    #[test]
    fn group_file_roundtrip() {
        let g = parse_group("# comment\nXX\n-ZZ  # trailing\n\n", true).unwrap();
        assert_eq!(g.dim(), 2);
        assert_eq!(format_group(&g), "XX\n-ZZ\n");
        assert!(parse_group("XX\nQQ\n", true).unwrap_err().to_string().contains("line 2"));
    }
}
