//! Packed GF(2) vectors and the handful of elimination routines the group code needs.

use serde::{Deserialize, Serialize};

/// Fixed-length bit vector packed into `u64` words. Bits past `len` are always zero.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct BitVec {
    len: usize,
    words: Vec<u64>,
}

#[inline]
pub(crate) fn word_count(len: usize) -> usize {
    len.div_ceil(64)
}

impl BitVec {
    pub fn zeros(len: usize) -> Self {
        BitVec { len, words: vec![0; word_count(len)] }
    }

    pub fn from_bools(bits: &[bool]) -> Self {
        let mut v = BitVec::zeros(bits.len());
        for (i, &b) in bits.iter().enumerate() {
            if b {
                v.set(i, true);
            }
        }
        v
    }

    /// Builds a vector from the low `len` bits of `value` (bit `i` of the integer is entry `i`).
    pub fn from_u64(len: usize, value: u64) -> Self {
        assert!(len <= 64);
        let mut v = BitVec::zeros(len);
        if len > 0 {
            v.words[0] = if len == 64 { value } else { value & ((1u64 << len) - 1) };
        }
        v
    }

    pub(crate) fn from_raw(len: usize, words: Vec<u64>) -> Self {
        debug_assert_eq!(words.len(), word_count(len));
        BitVec { len, words }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        debug_assert!(i < self.len);
        (self.words[i / 64] >> (i % 64)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, value: bool) {
        debug_assert!(i < self.len);
        let mask = 1u64 << (i % 64);
        if value {
            self.words[i / 64] |= mask;
        } else {
            self.words[i / 64] &= !mask;
        }
    }

    #[inline]
    pub fn flip(&mut self, i: usize) {
        self.words[i / 64] ^= 1u64 << (i % 64);
    }

    #[inline]
    pub fn xor_assign(&mut self, other: &BitVec) {
        debug_assert_eq!(self.len, other.len);
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= *b;
        }
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn count_ones(&self) -> u32 {
        self.words.iter().map(|w| w.count_ones()).sum()
    }

    /// Parity of the bitwise AND, i.e. the GF(2) dot product.
    #[inline]
    pub fn dot(&self, other: &BitVec) -> bool {
        let mut acc = 0u64;
        for (a, b) in self.words.iter().zip(&other.words) {
            acc ^= a & b;
        }
        acc.count_ones() & 1 == 1
    }

    pub fn and_count(&self, other: &BitVec) -> u32 {
        self.words.iter().zip(&other.words).map(|(a, b)| (a & b).count_ones()).sum()
    }

    pub fn first_one(&self) -> Option<usize> {
        for (wi, &w) in self.words.iter().enumerate() {
            if w != 0 {
                return Some(wi * 64 + w.trailing_zeros() as usize);
            }
        }
        None
    }

    pub fn iter_ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut rest = w;
            std::iter::from_fn(move || {
                if rest == 0 {
                    None
                } else {
                    let tz = rest.trailing_zeros() as usize;
                    rest &= rest - 1;
                    Some(wi * 64 + tz)
                }
            })
        })
    }

    /// Copies `other` into positions `offset..offset + other.len()`.
    pub fn splice(&mut self, offset: usize, other: &BitVec) {
        for i in other.iter_ones() {
            self.set(offset + i, true);
        }
    }

    pub fn slice(&self, start: usize, end: usize) -> BitVec {
        let mut out = BitVec::zeros(end - start);
        for i in self.iter_ones() {
            if i >= start && i < end {
                out.set(i - start, true);
            }
        }
        out
    }

    pub fn concat(&self, other: &BitVec) -> BitVec {
        let mut out = BitVec::zeros(self.len + other.len);
        out.splice(0, self);
        out.splice(self.len, other);
        out
    }
}

/// Reduces `rows` in place to reduced row echelon form and drops zero rows.
/// Returns the pivot column of every surviving row.
pub fn rref(rows: &mut Vec<BitVec>) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut r = 0;
    let ncols = rows.first().map_or(0, |v| v.len());
    for c in 0..ncols {
        let Some(p) = (r..rows.len()).find(|&i| rows[i].get(c)) else {
            continue;
        };
        rows.swap(r, p);
        let pivot = rows[r].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i != r && row.get(c) {
                row.xor_assign(&pivot);
            }
        }
        pivots.push(c);
        r += 1;
        if r == rows.len() {
            break;
        }
    }
    rows.truncate(r);
    pivots
}

pub fn rank(rows: &[BitVec]) -> usize {
    let mut tmp = rows.to_vec();
    rref(&mut tmp).len()
}

/// Basis of `{ a : sum_i a_i rows[i] = 0 }`, each vector of length `rows.len()`.
pub fn left_nullspace(rows: &[BitVec]) -> Vec<BitVec> {
    let k = rows.len();
    let ncols = rows.first().map_or(0, |v| v.len());
    let mut aug: Vec<BitVec> = rows
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut tag = BitVec::zeros(k);
            tag.set(i, true);
            row.concat(&tag)
        })
        .collect();
    let mut r = 0;
    for c in 0..ncols {
        let Some(p) = (r..aug.len()).find(|&i| aug[i].get(c)) else {
            continue;
        };
        aug.swap(r, p);
        let pivot = aug[r].clone();
        for (i, row) in aug.iter_mut().enumerate() {
            if i != r && row.get(c) {
                row.xor_assign(&pivot);
            }
        }
        r += 1;
    }
    aug[r..].iter().map(|row| row.slice(ncols, ncols + k)).collect()
}

/// Basis of `{ v : rows[i] . v = 0 for all i }` for vectors of length `ncols`.
pub fn right_nullspace(rows: &[BitVec], ncols: usize) -> Vec<BitVec> {
    let mut r = rows.to_vec();
    let pivots = rref(&mut r);
    let mut is_pivot = vec![false; ncols];
    for &p in &pivots {
        is_pivot[p] = true;
    }
    let mut out = Vec::new();
    for f in (0..ncols).filter(|&c| !is_pivot[c]) {
        let mut v = BitVec::zeros(ncols);
        v.set(f, true);
        for (row, &p) in r.iter().zip(&pivots) {
            if row.get(f) {
                v.set(p, true);
            }
        }
        out.push(v);
    }
    out
}

/// Incrementally built echelon basis that remembers, for each stored row, which
/// inserted vectors it is the sum of.
#[derive(Clone, Debug)]
pub struct Echelon {
    ncols: usize,
    rows: Vec<BitVec>,
    pivots: Vec<usize>,
    combos: Vec<BitVec>,
    inserted: usize,
    capacity: usize,
}

impl Echelon {
    /// `capacity` bounds the number of vectors that will be inserted (for combo tracking).
    pub fn new(ncols: usize, capacity: usize) -> Self {
        Echelon { ncols, rows: Vec::new(), pivots: Vec::new(), combos: Vec::new(), inserted: 0, capacity }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Reduces `v` against the basis. Returns the residual and the combination of
    /// previously inserted vectors that was subtracted.
    pub fn reduce(&self, v: &BitVec) -> (BitVec, BitVec) {
        let mut v = v.clone();
        let mut combo = BitVec::zeros(self.capacity);
        for (i, &p) in self.pivots.iter().enumerate() {
            if v.get(p) {
                v.xor_assign(&self.rows[i]);
                combo.xor_assign(&self.combos[i]);
            }
        }
        (v, combo)
    }

    /// Inserts `v`. On dependence returns `Err(combo)` with the inserted vectors summing to `v`.
    pub fn insert(&mut self, v: &BitVec) -> Result<(), BitVec> {
        debug_assert_eq!(v.len(), self.ncols);
        let idx = self.inserted;
        self.inserted += 1;
        let (res, mut combo) = self.reduce(v);
        match res.first_one() {
            None => Err(combo),
            Some(p) => {
                combo.set(idx, true);
                // keep the stored rows reduced with respect to the new pivot
                for i in 0..self.rows.len() {
                    if self.rows[i].get(p) {
                        let (r, c) = (res.clone(), combo.clone());
                        self.rows[i].xor_assign(&r);
                        self.combos[i].xor_assign(&c);
                    }
                }
                let pos = self.pivots.partition_point(|&q| q < p);
                self.pivots.insert(pos, p);
                self.rows.insert(pos, res);
                self.combos.insert(pos, combo);
                Ok(())
            }
        }
    }

    pub fn contains(&self, v: &BitVec) -> bool {
        self.reduce(v).0.is_zero()
    }
}

/// Fully reduced basis of a subspace of `GF(2)^64`; reduction gives canonical coset keys.
#[derive(Clone, Debug, Default)]
pub(crate) struct WordEchelon {
    rows: Vec<(u64, u64)>,
}

impl WordEchelon {
    pub(crate) fn reduce(&self, mut v: u64) -> u64 {
        for &(pivot, row) in &self.rows {
            if v & pivot != 0 {
                v ^= row;
            }
        }
        v
    }

    pub(crate) fn insert(&mut self, v: u64) -> bool {
        let r = self.reduce(v);
        if r == 0 {
            return false;
        }
        let pivot = 1u64 << (63 - r.leading_zeros());
        for row in &mut self.rows {
            if row.1 & pivot != 0 {
                row.1 ^= r;
            }
        }
        self.rows.push((pivot, r));
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rref_and_nullspace() {
        let rows = vec![
            BitVec::from_u64(4, 0b0011),
            BitVec::from_u64(4, 0b0110),
            BitVec::from_u64(4, 0b0101),
        ];
        assert_eq!(rank(&rows), 2);
        let ns = left_nullspace(&rows);
        assert_eq!(ns.len(), 1);
        assert_eq!(ns[0], BitVec::from_u64(3, 0b111));
    }

    #[test]
    fn right_nullspace_is_orthogonal() {
        let rows = vec![BitVec::from_u64(5, 0b10110), BitVec::from_u64(5, 0b01011)];
        let ns = right_nullspace(&rows, 5);
        assert_eq!(ns.len(), 3);
        for v in &ns {
            for r in &rows {
                assert!(!r.dot(v));
            }
        }
        assert_eq!(rank(&ns), 3);
    }

    #[test]
    fn echelon_reports_combination() {
        let mut e = Echelon::new(5, 3);
        e.insert(&BitVec::from_u64(5, 0b10001)).unwrap();
        e.insert(&BitVec::from_u64(5, 0b00110)).unwrap();
        let combo = e.insert(&BitVec::from_u64(5, 0b10111)).unwrap_err();
        assert_eq!(combo, BitVec::from_u64(3, 0b011));
    }

    #[test]
    fn ones_iterator_crosses_words() {
        let mut v = BitVec::zeros(130);
        v.set(3, true);
        v.set(64, true);
        v.set(129, true);
        assert_eq!(v.iter_ones().collect::<Vec<_>>(), vec![3, 64, 129]);
        assert_eq!(v.slice(60, 130).iter_ones().collect::<Vec<_>>(), vec![4, 69]);
    }
}
