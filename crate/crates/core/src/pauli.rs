//! Pauli strings with an explicit `i^k` phase, and their phase-free counterparts.
//!
//! A [`PauliString`] on `n` qubits stores packed `x` and `z` bit vectors and a phase
//! exponent `k` mod 4. It denotes the operator `i^k * prod_q X_q^{x_q} Z_q^{z_q}`, with
//! the `X` factor written before the `Z` factor on every qubit. Under this convention
//! `Y = i X Z`, so the hermitian operator `Y` has `k = 1`.
//!
//! The text form is `[+-]?i?[IXYZ]+`, where the prefix is the phase in front of the
//! *letters* (so `XY` formats as `iZ`).

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::bits::{word_count, BitVec};
use crate::error::{Error, Result};

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Letter {
    I,
    X,
    Y,
    Z,
}

impl Letter {
    pub fn from_bits(x: bool, z: bool) -> Letter {
        match (x, z) {
            (false, false) => Letter::I,
            (true, false) => Letter::X,
            (true, true) => Letter::Y,
            (false, true) => Letter::Z,
        }
    }

    pub fn bits(self) -> (bool, bool) {
        match self {
            Letter::I => (false, false),
            Letter::X => (true, false),
            Letter::Y => (true, true),
            Letter::Z => (false, true),
        }
    }

    pub fn as_char(self) -> char {
        match self {
            Letter::I => 'I',
            Letter::X => 'X',
            Letter::Y => 'Y',
            Letter::Z => 'Z',
        }
    }

    pub fn from_char(c: char) -> Option<Letter> {
        match c {
            'I' => Some(Letter::I),
            'X' => Some(Letter::X),
            'Y' => Some(Letter::Y),
            'Z' => Some(Letter::Z),
            _ => None,
        }
    }
}

/// Pauli operator with phase. See the module docs for the encoding.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PauliString {
    n: usize,
    x: BitVec,
    z: BitVec,
    phase: u8,
}

/// Pauli operator up to phase: an element of the quotient `P_n / <iI>`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ProjectivePauli {
    n: usize,
    x: BitVec,
    z: BitVec,
}

/// Counts of `(I, X, Y, Z)` letters.
pub type WeightCounts = (usize, usize, usize, usize);

fn weight_counts_of(x: &BitVec, z: &BitVec, n: usize) -> WeightCounts {
    let y = x.and_count(z) as usize;
    let nx = x.count_ones() as usize - y;
    let nz = z.count_ones() as usize - y;
    (n - nx - y - nz, nx, y, nz)
}

fn parse_letters(body: &str) -> Result<(BitVec, BitVec)> {
    let n = body.chars().count();
    let mut x = BitVec::zeros(n);
    let mut z = BitVec::zeros(n);
    for (q, c) in body.chars().enumerate() {
        let l = Letter::from_char(c).ok_or_else(|| Error::Parse(format!("unexpected character {c:?} in {body:?}")))?;
        let (xb, zb) = l.bits();
        x.set(q, xb);
        z.set(q, zb);
    }
    Ok((x, z))
}

fn write_letters(f: &mut fmt::Formatter<'_>, x: &BitVec, z: &BitVec) -> fmt::Result {
    for q in 0..x.len() {
        write!(f, "{}", Letter::from_bits(x.get(q), z.get(q)).as_char())?;
    }
    Ok(())
}

/// Lexicographic comparison under the letter order `I < X < Y < Z`, qubit 0 first.
fn lex_cmp(ax: &BitVec, az: &BitVec, bx: &BitVec, bz: &BitVec) -> Ordering {
    debug_assert_eq!(ax.len(), bx.len());
    let words = ax.words().iter().zip(bx.words()).zip(az.words().iter().zip(bz.words()));
    for (wi, ((xa, xb), (za, zb))) in words.enumerate() {
        let w = (xa ^ xb) | (za ^ zb);
        if w != 0 {
            let q = wi * 64 + w.trailing_zeros() as usize;
            let la = Letter::from_bits(ax.get(q), az.get(q));
            let lb = Letter::from_bits(bx.get(q), bz.get(q));
            return la.cmp(&lb);
        }
    }
    Ordering::Equal
}

impl PauliString {
    pub fn identity(n: usize) -> Self {
        PauliString { n, x: BitVec::zeros(n), z: BitVec::zeros(n), phase: 0 }
    }

    /// Builds `i^phase * X^x Z^z` directly from the raw encoding.
    pub fn from_xz(x: BitVec, z: BitVec, phase: u8) -> Self {
        assert_eq!(x.len(), z.len());
        PauliString { n: x.len(), x, z, phase: phase & 3 }
    }

    /// Builds `i^letter_phase` times the letter string.
    pub fn from_letters(letters: &[Letter], letter_phase: u8) -> Self {
        let n = letters.len();
        let mut x = BitVec::zeros(n);
        let mut z = BitVec::zeros(n);
        for (q, l) in letters.iter().enumerate() {
            let (xb, zb) = l.bits();
            x.set(q, xb);
            z.set(q, zb);
        }
        let y = x.and_count(&z) as u8;
        PauliString { n, x, z, phase: (letter_phase.wrapping_add(y)) & 3 }
    }

    pub(crate) fn raw_mut(&mut self) -> (&mut BitVec, &mut BitVec, &mut u8) {
        (&mut self.x, &mut self.z, &mut self.phase)
    }

    /// Single-qubit letter `l` on qubit `q`, identity elsewhere, hermitian with sign `+1`.
    pub fn single(n: usize, q: usize, l: Letter) -> Self {
        let mut letters = vec![Letter::I; n];
        letters[q] = l;
        PauliString::from_letters(&letters, 0)
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn x(&self) -> &BitVec {
        &self.x
    }

    pub fn z(&self) -> &BitVec {
        &self.z
    }

    /// Phase exponent `k` of `i^k X^x Z^z`.
    pub fn phase_exp(&self) -> u8 {
        self.phase
    }

    /// Phase `k` such that the operator equals `i^k` times its letter string.
    pub fn letter_phase(&self) -> u8 {
        let y = self.x.and_count(&self.z) as u8 & 3;
        (self.phase + 4 - y) & 3
    }

    pub fn letter(&self, q: usize) -> Letter {
        Letter::from_bits(self.x.get(q), self.z.get(q))
    }

    pub fn letters(&self) -> Vec<Letter> {
        (0..self.n).map(|q| self.letter(q)).collect()
    }

    pub fn is_identity(&self) -> bool {
        self.x.is_zero() && self.z.is_zero()
    }

    pub fn is_hermitian(&self) -> bool {
        (self.phase as u32 + self.x.and_count(&self.z)) % 2 == 0
    }

    pub fn with_phase(mut self, phase: u8) -> Self {
        self.phase = phase & 3;
        self
    }

    pub fn negate(&self) -> Self {
        let mut out = self.clone();
        out.phase = (out.phase + 2) & 3;
        out
    }

    pub fn multiply(&self, other: &PauliString) -> PauliString {
        assert_eq!(self.n, other.n, "qubit count mismatch");
        // Z^{z1} X^{x2} = (-1)^{z1.x2} X^{x2} Z^{z1}
        let swap = if self.z.dot(&other.x) { 2 } else { 0 };
        let mut x = self.x.clone();
        x.xor_assign(&other.x);
        let mut z = self.z.clone();
        z.xor_assign(&other.z);
        PauliString { n: self.n, x, z, phase: (self.phase + other.phase + swap) & 3 }
    }

    /// In-place right multiplication `self <- self * other`.
    pub fn mul_assign(&mut self, other: &PauliString) {
        let swap = if self.z.dot(&other.x) { 2 } else { 0 };
        self.x.xor_assign(&other.x);
        self.z.xor_assign(&other.z);
        self.phase = (self.phase + other.phase + swap) & 3;
    }

    pub fn commutes(&self, other: &PauliString) -> bool {
        symplectic_commutes(&self.x, &self.z, &other.x, &other.z)
    }

    pub fn weight_counts(&self) -> WeightCounts {
        weight_counts_of(&self.x, &self.z, self.n)
    }

    /// Number of non-identity letters.
    pub fn weight(&self) -> usize {
        let (ni, ..) = self.weight_counts();
        self.n - ni
    }

    /// Tensor factor on `qubits` (in the given order). The letter phase is kept only when
    /// every other qubit carries the identity; otherwise the hermitian `+1` lift is returned.
    pub fn restrict(&self, qubits: &[usize]) -> PauliString {
        let m = qubits.len();
        let mut x = BitVec::zeros(m);
        let mut z = BitVec::zeros(m);
        let mut inside = BitVec::zeros(self.n);
        for (i, &q) in qubits.iter().enumerate() {
            x.set(i, self.x.get(q));
            z.set(i, self.z.get(q));
            inside.set(q, true);
        }
        let complement_identity =
            self.x.iter_ones().chain(self.z.iter_ones()).all(|q| inside.get(q));
        let lp = if complement_identity { self.letter_phase() } else { 0 };
        let y = x.and_count(&z) as u8;
        PauliString { n: m, x, z, phase: (lp + y) & 3 }
    }

    /// Restriction to the contiguous block `start..end`; see [`PauliString::restrict`].
    pub fn restrict_range(&self, start: usize, end: usize) -> PauliString {
        let qs: Vec<usize> = (start..end).collect();
        self.restrict(&qs)
    }

    pub fn tensor(&self, other: &PauliString) -> PauliString {
        PauliString {
            n: self.n + other.n,
            x: self.x.concat(&other.x),
            z: self.z.concat(&other.z),
            phase: (self.phase + other.phase) & 3,
        }
    }

    pub fn projective(&self) -> ProjectivePauli {
        ProjectivePauli { n: self.n, x: self.x.clone(), z: self.z.clone() }
    }

    /// Symplectic row: `x` words followed by `z` words, each block padded to 64 bits.
    pub fn symplectic_row(&self) -> BitVec {
        symplectic_row(&self.x, &self.z)
    }

    /// True when no letter is `Z` (identity, `X` and `Y` are allowed).
    pub fn is_z_free(&self) -> bool {
        z_free(&self.x, &self.z)
    }

    /// Splits the operator into `(letter_phase, left letters, right letters)` at qubit `k`.
    pub fn split_at(&self, k: usize) -> (u8, ProjectivePauli, ProjectivePauli) {
        let lp = self.letter_phase();
        let p = self.projective();
        let (a, b) = p.split_at(k);
        (lp, a, b)
    }
}

#[inline]
pub(crate) fn symplectic_commutes(ax: &BitVec, az: &BitVec, bx: &BitVec, bz: &BitVec) -> bool {
    ax.dot(bz) == az.dot(bx)
}

pub(crate) fn symplectic_row(x: &BitVec, z: &BitVec) -> BitVec {
    let w = word_count(x.len());
    let mut words = Vec::with_capacity(2 * w);
    words.extend_from_slice(x.words());
    words.extend_from_slice(z.words());
    BitVec::from_raw(128 * w, words)
}

fn from_symplectic_row(n: usize, row: &BitVec) -> (BitVec, BitVec) {
    let w = word_count(n);
    let x = BitVec::from_raw(n, row.words()[..w].to_vec());
    let z = BitVec::from_raw(n, row.words()[w..2 * w].to_vec());
    (x, z)
}

/// Length of a padded symplectic row for `n` qubits.
pub fn symplectic_row_len(n: usize) -> usize {
    128 * word_count(n)
}

fn z_free(x: &BitVec, z: &BitVec) -> bool {
    // a Z letter is z=1, x=0
    z.words().iter().zip(x.words()).all(|(zw, xw)| zw & !xw == 0)
}

impl ProjectivePauli {
    pub fn identity(n: usize) -> Self {
        ProjectivePauli { n, x: BitVec::zeros(n), z: BitVec::zeros(n) }
    }

    pub fn from_xz(x: BitVec, z: BitVec) -> Self {
        assert_eq!(x.len(), z.len());
        ProjectivePauli { n: x.len(), x, z }
    }

    pub fn from_letters(letters: &[Letter]) -> Self {
        PauliString::from_letters(letters, 0).projective()
    }

    /// Inverse of [`ProjectivePauli::symplectic_row`].
    pub fn from_symplectic_row(n: usize, row: &BitVec) -> Self {
        let (x, z) = from_symplectic_row(n, row);
        ProjectivePauli { n, x, z }
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn x(&self) -> &BitVec {
        &self.x
    }

    pub fn z(&self) -> &BitVec {
        &self.z
    }

    pub fn letter(&self, q: usize) -> Letter {
        Letter::from_bits(self.x.get(q), self.z.get(q))
    }

    pub fn is_identity(&self) -> bool {
        self.x.is_zero() && self.z.is_zero()
    }

    /// Hermitian representative with leading sign `+1` (phase exponent `#Y mod 4`).
    pub fn lift(&self) -> PauliString {
        let y = self.x.and_count(&self.z) as u8;
        PauliString { n: self.n, x: self.x.clone(), z: self.z.clone(), phase: y & 3 }
    }

    pub fn multiply(&self, other: &ProjectivePauli) -> ProjectivePauli {
        let mut x = self.x.clone();
        x.xor_assign(&other.x);
        let mut z = self.z.clone();
        z.xor_assign(&other.z);
        ProjectivePauli { n: self.n, x, z }
    }

    pub fn mul_assign(&mut self, other: &ProjectivePauli) {
        self.x.xor_assign(&other.x);
        self.z.xor_assign(&other.z);
    }

    pub fn commutes(&self, other: &ProjectivePauli) -> bool {
        symplectic_commutes(&self.x, &self.z, &other.x, &other.z)
    }

    pub fn weight_counts(&self) -> WeightCounts {
        weight_counts_of(&self.x, &self.z, self.n)
    }

    pub fn is_z_free(&self) -> bool {
        z_free(&self.x, &self.z)
    }

    pub fn symplectic_row(&self) -> BitVec {
        symplectic_row(&self.x, &self.z)
    }

    pub fn restrict(&self, qubits: &[usize]) -> ProjectivePauli {
        let mut x = BitVec::zeros(qubits.len());
        let mut z = BitVec::zeros(qubits.len());
        for (i, &q) in qubits.iter().enumerate() {
            x.set(i, self.x.get(q));
            z.set(i, self.z.get(q));
        }
        ProjectivePauli { n: qubits.len(), x, z }
    }

    pub fn split_at(&self, k: usize) -> (ProjectivePauli, ProjectivePauli) {
        let a = ProjectivePauli { n: k, x: self.x.slice(0, k), z: self.z.slice(0, k) };
        let b = ProjectivePauli { n: self.n - k, x: self.x.slice(k, self.n), z: self.z.slice(k, self.n) };
        (a, b)
    }

    pub fn tensor(&self, other: &ProjectivePauli) -> ProjectivePauli {
        ProjectivePauli { n: self.n + other.n, x: self.x.concat(&other.x), z: self.z.concat(&other.z) }
    }
}

impl Ord for ProjectivePauli {
    fn cmp(&self, other: &Self) -> Ordering {
        self.n.cmp(&other.n).then_with(|| lex_cmp(&self.x, &self.z, &other.x, &other.z))
    }
}

impl PartialOrd for ProjectivePauli {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for ProjectivePauli {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_letters(f, &self.x, &self.z)
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let prefix = match self.letter_phase() {
            0 => "",
            1 => "i",
            2 => "-",
            _ => "-i",
        };
        f.write_str(prefix)?;
        write_letters(f, &self.x, &self.z)
    }
}

impl FromStr for PauliString {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (neg, rest) = match s.as_bytes().first() {
            Some(b'+') => (false, &s[1..]),
            Some(b'-') => (true, &s[1..]),
            _ => (false, s),
        };
        let (imag, body) = match rest.strip_prefix('i') {
            Some(b) => (true, b),
            None => (false, rest),
        };
        if body.is_empty() {
            return Err(Error::Parse(format!("empty Pauli string {s:?}")));
        }
        let (x, z) = parse_letters(body)?;
        let lp = (if neg { 2 } else { 0 }) + u8::from(imag);
        let y = x.and_count(&z) as u8;
        Ok(PauliString { n: x.len(), x, z, phase: (lp + y) & 3 })
    }
}

impl FromStr for ProjectivePauli {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.is_empty() {
            return Err(Error::Parse("empty Pauli string".into()));
        }
        let (x, z) = parse_letters(s)?;
        Ok(ProjectivePauli { n: x.len(), x, z })
    }
}

impl std::ops::Mul for &PauliString {
    type Output = PauliString;
    fn mul(self, rhs: &PauliString) -> PauliString {
        self.multiply(rhs)
    }
}

impl std::ops::Mul for &ProjectivePauli {
    type Output = ProjectivePauli;
    fn mul(self, rhs: &ProjectivePauli) -> ProjectivePauli {
        self.multiply(rhs)
    }
}

macro_rules! string_serde {
    ($t:ty) => {
        impl Serialize for $t {
            fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
                s.serialize_str(&self.to_string())
            }
        }
        impl<'de> Deserialize<'de> for $t {
            fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
                let s = String::deserialize(d)?;
                s.parse().map_err(serde::de::Error::custom)
            }
        }
    };
}

string_serde!(PauliString);
string_serde!(ProjectivePauli);

/// Parses a Pauli string, panicking on malformed input. Intended for literals in tests.
pub fn pauli(s: &str) -> PauliString {
    s.parse().unwrap_or_else(|e| panic!("bad Pauli literal {s:?}: {e}"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn x_times_y_is_iz() {
        assert_eq!((&pauli("X") * &pauli("Y")).to_string(), "iZ");
        assert_eq!((&pauli("Y") * &pauli("X")).to_string(), "-iZ");
        assert_eq!((&pauli("Z") * &pauli("Z")).to_string(), "I");
    }

    #[test]
    fn hermiticity_follows_phase_and_y_count() {
        assert!(pauli("Y").is_hermitian());
        assert_eq!(pauli("Y").phase_exp(), 1);
        assert!(!pauli("iY").is_hermitian());
        assert!(pauli("-XYZ").is_hermitian());
    }

    #[test]
    fn parse_format_roundtrip() {
        for s in ["I", "-X", "iZZ", "-iYXI", "XYZI"] {
            assert_eq!(pauli(s).to_string(), s);
        }
        assert_eq!(pauli("+XZ").to_string(), "XZ");
        assert!("".parse::<PauliString>().is_err());
        assert!("XQ".parse::<PauliString>().is_err());
        assert!("i-X".parse::<PauliString>().is_err());
    }

    #[test]
    fn weights_and_z_free() {
        let p = pauli("IXYZZ");
        assert_eq!(p.weight_counts(), (1, 1, 1, 2));
        assert_eq!(p.weight(), 4);
        assert!(!p.is_z_free());
        assert!(pauli("XYI").is_z_free());
    }

    #[test]
    fn restrict_keeps_phase_only_without_support_outside() {
        let p = pauli("-IXY");
        assert_eq!(p.restrict(&[1, 2]).to_string(), "-XY");
        assert_eq!(p.restrict(&[2]).to_string(), "Y");
        assert_eq!(p.restrict(&[2, 1]).to_string(), "-YX");
    }

    #[test]
    fn lexicographic_order() {
        let mut v: Vec<ProjectivePauli> =
            ["ZI", "XY", "IZ", "YI", "XX"].iter().map(|s| s.parse().unwrap()).collect();
        v.sort();
        let s: Vec<String> = v.iter().map(|p| p.to_string()).collect();
        assert_eq!(s, ["IZ", "XX", "XY", "YI", "ZI"]);
    }

    #[test]
    fn words_beyond_64_qubits() {
        let mut a = vec![Letter::I; 130];
        a[100] = Letter::X;
        a[3] = Letter::Z;
        let mut b = vec![Letter::I; 130];
        b[100] = Letter::Z;
        let pa = PauliString::from_letters(&a, 0);
        let pb = PauliString::from_letters(&b, 0);
        assert!(!pa.commutes(&pb));
        let row = pa.symplectic_row();
        assert_eq!(row.len(), symplectic_row_len(130));
        assert_eq!(ProjectivePauli::from_symplectic_row(130, &row), pa.projective());
    }
}
