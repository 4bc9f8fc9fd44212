//! Exact arithmetic in `Z[sqrt 2]` and rank computations over `Q(sqrt 2)`.
//!
//! Expectation values of Pauli strings on products of stabilizer states and `T|+>`
//! states are signed powers of `1/sqrt 2`, so after multiplying by a common power of
//! two every quantity the span engine sees is an element of `Z[sqrt 2]`.

use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Zero};

/// `a + b sqrt 2` with integer coefficients.
#[derive(Copy, Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct ZSqrt2 {
    pub a: i128,
    pub b: i128,
}

impl ZSqrt2 {
    pub const ZERO: ZSqrt2 = ZSqrt2 { a: 0, b: 0 };

    pub fn new(a: i128, b: i128) -> Self {
        ZSqrt2 { a, b }
    }

    pub fn is_zero(&self) -> bool {
        self.a == 0 && self.b == 0
    }

    /// `2^{scale - w/2}`, i.e. `(1/sqrt 2)^w` in units of `2^-scale`. Needs `w <= 2 scale`.
    pub fn inv_sqrt2_pow(w: u32, scale: u32) -> Self {
        debug_assert!(w <= 2 * scale);
        if w % 2 == 0 {
            ZSqrt2 { a: 1i128 << (scale - w / 2), b: 0 }
        } else {
            ZSqrt2 { a: 0, b: 1i128 << (scale - w.div_ceil(2)) }
        }
    }

    pub fn to_f64(&self) -> f64 {
        self.a as f64 + self.b as f64 * std::f64::consts::SQRT_2
    }

    /// Canonical sign so that rows differing by an overall `-1` compare equal.
    pub fn is_negative_leading(&self) -> bool {
        self.a < 0 || (self.a == 0 && self.b < 0)
    }
}

impl Add for ZSqrt2 {
    type Output = ZSqrt2;
    fn add(self, o: ZSqrt2) -> ZSqrt2 {
        ZSqrt2 { a: self.a + o.a, b: self.b + o.b }
    }
}

impl AddAssign for ZSqrt2 {
    fn add_assign(&mut self, o: ZSqrt2) {
        self.a += o.a;
        self.b += o.b;
    }
}

impl Sub for ZSqrt2 {
    type Output = ZSqrt2;
    fn sub(self, o: ZSqrt2) -> ZSqrt2 {
        ZSqrt2 { a: self.a - o.a, b: self.b - o.b }
    }
}

impl Neg for ZSqrt2 {
    type Output = ZSqrt2;
    fn neg(self) -> ZSqrt2 {
        ZSqrt2 { a: -self.a, b: -self.b }
    }
}

impl Mul<i128> for ZSqrt2 {
    type Output = ZSqrt2;
    fn mul(self, k: i128) -> ZSqrt2 {
        ZSqrt2 { a: self.a * k, b: self.b * k }
    }
}

/// Element of the field `Q(sqrt 2)`.
#[derive(Clone, Debug, PartialEq)]
struct QSqrt2 {
    a: BigRational,
    b: BigRational,
}

impl QSqrt2 {
    fn from_z(z: ZSqrt2) -> Self {
        QSqrt2 { a: BigRational::from_integer(BigInt::from(z.a)), b: BigRational::from_integer(BigInt::from(z.b)) }
    }

    fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    fn mul(&self, o: &QSqrt2) -> QSqrt2 {
        let two = BigRational::from_integer(BigInt::from(2));
        QSqrt2 { a: &self.a * &o.a + two * &self.b * &o.b, b: &self.a * &o.b + &self.b * &o.a }
    }

    fn sub(&self, o: &QSqrt2) -> QSqrt2 {
        QSqrt2 { a: &self.a - &o.a, b: &self.b - &o.b }
    }

    /// `(a - b sqrt 2) / (a^2 - 2 b^2)`; the norm vanishes only at zero.
    fn inv(&self) -> QSqrt2 {
        let two = BigRational::from_integer(BigInt::from(2));
        let norm = &self.a * &self.a - two * &self.b * &self.b;
        QSqrt2 { a: &self.a / &norm, b: -(&self.b / &norm) }
    }
}

impl ZSqrt2 {
    fn checked_mul(self, o: ZSqrt2) -> Option<ZSqrt2> {
        let a = self.a.checked_mul(o.a)?.checked_add(self.b.checked_mul(o.b)?.checked_mul(2)?)?;
        let b = self.a.checked_mul(o.b)?.checked_add(self.b.checked_mul(o.a)?)?;
        Some(ZSqrt2 { a, b })
    }

    fn checked_sub(self, o: ZSqrt2) -> Option<ZSqrt2> {
        Some(ZSqrt2 { a: self.a.checked_sub(o.a)?, b: self.b.checked_sub(o.b)? })
    }
}

fn gcd(mut a: i128, mut b: i128) -> i128 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a.abs()
}

/// Fraction-free elimination in `Z[sqrt 2]`; `None` on overflow.
fn rank_fraction_free(rows: &[Vec<ZSqrt2>]) -> Option<usize> {
    let ncols = rows.first().map_or(0, |r| r.len());
    let mut m: Vec<Vec<ZSqrt2>> = rows.iter().filter(|r| !r.iter().all(ZSqrt2::is_zero)).cloned().collect();
    let mut rank = 0;
    for c in 0..ncols {
        let Some(i) = (rank..m.len()).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(rank, i);
        let (head, tail) = m.split_at_mut(rank + 1);
        let prow = &head[rank];
        let p = prow[c];
        for row in tail.iter_mut() {
            let f = row[c];
            if f.is_zero() {
                continue;
            }
            let mut g = 0i128;
            for (e, q) in row.iter_mut().zip(prow).skip(c) {
                *e = e.checked_mul(p)?.checked_sub(q.checked_mul(f)?)?;
                g = gcd(gcd(g, e.a), e.b);
            }
            if g > 1 {
                for e in row.iter_mut().skip(c) {
                    e.a /= g;
                    e.b /= g;
                }
            }
        }
        rank += 1;
        if rank == m.len() {
            break;
        }
    }
    Some(rank)
}

/// Rank over `Q(sqrt 2)` of the matrix whose rows are given.
pub fn rank_zsqrt2(rows: &[Vec<ZSqrt2>]) -> usize {
    rank_fraction_free(rows).unwrap_or_else(|| rank_rational(rows))
}

fn rank_rational(rows: &[Vec<ZSqrt2>]) -> usize {
    let Some(ncols) = rows.first().map(|r| r.len()) else {
        return 0;
    };
    let mut basis: Vec<(usize, Vec<QSqrt2>)> = Vec::new();
    for row in rows {
        if row.iter().all(ZSqrt2::is_zero) {
            continue;
        }
        let mut v: Vec<QSqrt2> = row.iter().map(|&z| QSqrt2::from_z(z)).collect();
        for (p, b) in &basis {
            if !v[*p].is_zero() {
                let f = v[*p].clone();
                for c in 0..ncols {
                    if !b[c].is_zero() {
                        v[c] = v[c].sub(&f.mul(&b[c]));
                    }
                }
            }
        }
        if let Some(p) = v.iter().position(|e| !e.is_zero()) {
            let inv = v[p].inv();
            for e in v.iter_mut() {
                if !e.is_zero() {
                    *e = e.mul(&inv);
                }
            }
            debug_assert!(v[p].a.is_one() && v[p].b.is_zero());
            basis.push((p, v));
            if basis.len() == ncols {
                break;
            }
        }
    }
    basis.len()
}

/// Numerical rank with partial pivoting. Entries below `tol * max|entry|` count as zero.
pub fn rank_complex(rows: &[Vec<Complex64>], tol: f64) -> usize {
    let Some(ncols) = rows.first().map(|r| r.len()) else {
        return 0;
    };
    let scale = rows.iter().flatten().map(|z| z.norm()).fold(0.0, f64::max);
    if scale == 0.0 {
        return 0;
    }
    let thresh = tol * scale;
    let mut m: Vec<Vec<Complex64>> = rows.to_vec();
    let mut rank = 0;
    for c in 0..ncols {
        if rank == m.len() {
            break;
        }
        let (best, val) = (rank..m.len())
            .map(|i| (i, m[i][c].norm()))
            .fold((rank, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
        if val <= thresh {
            continue;
        }
        m.swap(rank, best);
        let pivot = m[rank][c];
        let prow = m[rank].clone();
        for row in m.iter_mut().skip(rank + 1) {
            let f = row[c] / pivot;
            if f.norm() > 0.0 {
                for (e, p) in row.iter_mut().zip(&prow).skip(c) {
                    *e -= f * p;
                }
            }
        }
        rank += 1;
    }
    rank
}

/// Numerical rank of real rows; see [`rank_complex`].
pub fn rank_real(rows: &[Vec<f64>], tol: f64) -> usize {
    let c: Vec<Vec<Complex64>> = rows.iter().map(|r| r.iter().map(|&x| Complex64::new(x, 0.0)).collect()).collect();
    rank_complex(&c, tol)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inverse_powers_of_sqrt2() {
        let s = 4;
        assert_eq!(ZSqrt2::inv_sqrt2_pow(0, s), ZSqrt2::new(16, 0));
        assert_eq!(ZSqrt2::inv_sqrt2_pow(1, s), ZSqrt2::new(0, 8));
        assert_eq!(ZSqrt2::inv_sqrt2_pow(2, s), ZSqrt2::new(8, 0));
        let v = ZSqrt2::inv_sqrt2_pow(3, s).to_f64() / 16.0;
        assert!((v - 2f64.powf(-1.5)).abs() < 1e-15);
    }

    #[test]
    fn exact_rank_sees_irrational_dependence() {
        let r = |a: i128, b: i128| ZSqrt2::new(a, b);
        // second row is sqrt2 times the first
        let rows = vec![vec![r(1, 0), r(0, 1)], vec![r(0, 1), r(2, 0)]];
        assert_eq!(rank_zsqrt2(&rows), 1);
        let rows = vec![vec![r(1, 0), r(0, 1)], vec![r(0, 1), r(1, 0)]];
        assert_eq!(rank_zsqrt2(&rows), 2);
        assert_eq!(rank_zsqrt2(&[vec![r(0, 0)]]), 0);
    }

    #[test]
    fn fraction_free_agrees_with_rational() {
        let mut state = 7u64;
        let mut next = || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((state >> 33) % 5) as i128 - 2
        };
        for _ in 0..200 {
            let rows: Vec<Vec<ZSqrt2>> = (0..6).map(|_| (0..5).map(|_| ZSqrt2::new(next(), next())).collect()).collect();
            // force dependence through a sqrt 2 multiple of the first row
            let mut rows = rows;
            rows[5] = rows[0].iter().map(|z| ZSqrt2::new(2 * z.b, z.a)).collect();
            assert_eq!(rank_fraction_free(&rows), Some(rank_rational(&rows)));
        }
    }

    #[test]
    fn numerical_rank() {
        let rows = vec![vec![1.0, 2.0, 3.0], vec![2.0, 4.0, 6.0], vec![0.0, 1.0, 0.0]];
        assert_eq!(rank_real(&rows, 1e-9), 2);
    }
}
