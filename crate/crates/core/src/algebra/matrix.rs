use alloc::vec::Vec;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use super::{Monomial, Rational, SparsePoly, Var};

/// Dense rectangular matrix over ℚ.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RatMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<Rational>,
}

impl RatMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, entries: alloc::vec![Rational::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, Rational::one());
        }
        m
    }

    /// Panics if the rows have different lengths.
    pub fn from_rows(rows: Vec<Vec<Rational>>) -> Self {
        let cols = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|r| r.len() == cols), "ragged matrix");
        let n = rows.len();
        Self { rows: n, cols, entries: rows.into_iter().flatten().collect() }
    }

    /// Coefficient matrix of a list of polynomials: one row per polynomial,
    /// one column per monomial occurring in any of them.
    pub fn from_polys(polys: &[SparsePoly]) -> Self {
        let basis: alloc::collections::BTreeSet<Monomial> =
            polys.iter().flat_map(|p| p.terms().map(|(m, _)| m.clone())).collect();
        let basis: Vec<Monomial> = basis.into_iter().collect();
        let rows = polys
            .iter()
            .map(|p| basis.iter().map(|m| p.coeff(m)).collect())
            .collect::<Vec<Vec<Rational>>>();
        let mut m = Self::from_rows(rows);
        m.cols = basis.len();
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &Rational {
        &self.entries[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Rational) {
        self.entries[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[Rational] {
        &self.entries[i * self.cols..(i + 1) * self.cols]
    }

    pub fn select_rows(&self, idx: &[usize]) -> RatMatrix {
        RatMatrix::from_rows(idx.iter().map(|&i| self.row(i).to_vec()).collect())
    }

    /// Each row scaled by the lcm of its denominators.
    fn integer_rows(&self) -> Vec<Vec<BigInt>> {
        (0..self.rows)
            .map(|i| {
                let row = self.row(i);
                let l = row.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
                row.iter().map(|x| x.numer() * (&l / x.denom())).collect()
            })
            .collect()
    }

    /// Rank over ℚ by fraction-free (Bareiss) elimination.
    pub fn rank(&self) -> usize {
        let mut a = self.integer_rows();
        let (rows, cols) = (self.rows, self.cols);
        let mut prev = BigInt::one();
        let mut r = 0;
        for c in 0..cols {
            if r == rows {
                break;
            }
            let Some(p) = (r..rows).find(|&i| !a[i][c].is_zero()) else {
                continue;
            };
            a.swap(r, p);
            let pivot = a[r][c].clone();
            for i in r + 1..rows {
                let lead = a[i][c].clone();
                for j in c + 1..cols {
                    let v = &pivot * &a[i][j] - &lead * &a[r][j];
                    a[i][j] = v / &prev;
                }
                a[i][c] = BigInt::zero();
            }
            prev = pivot;
            r += 1;
        }
        r
    }

    /// Row indices of a maximal independent set of rows, chosen greedily in
    /// order.
    pub fn independent_rows(&self) -> Vec<usize> {
        let mut chosen: Vec<usize> = Vec::new();
        for i in 0..self.rows {
            let mut cand = chosen.clone();
            cand.push(i);
            if self.select_rows(&cand).rank() == cand.len() {
                chosen = cand;
            }
        }
        chosen
    }

    /// Inverse by Gauss-Jordan elimination; `None` if singular or not square.
    pub fn inverse(&self) -> Option<RatMatrix> {
        if self.rows != self.cols {
            return None;
        }
        let n = self.rows;
        let mut a = self.clone();
        let mut inv = RatMatrix::identity(n);
        for c in 0..n {
            let p = (c..n).find(|&i| !a.get(i, c).is_zero())?;
            if p != c {
                for j in 0..n {
                    a.entries.swap(c * n + j, p * n + j);
                    inv.entries.swap(c * n + j, p * n + j);
                }
            }
            let piv = a.get(c, c).recip();
            for j in 0..n {
                let v = a.get(c, j) * &piv;
                a.set(c, j, v);
                let v = inv.get(c, j) * &piv;
                inv.set(c, j, v);
            }
            for i in 0..n {
                if i == c || a.get(i, c).is_zero() {
                    continue;
                }
                let f = a.get(i, c).clone();
                for j in 0..n {
                    let v = a.get(i, j) - &f * a.get(c, j);
                    a.set(i, j, v);
                    let v = inv.get(i, j) - &f * inv.get(c, j);
                    inv.set(i, j, v);
                }
            }
        }
        Some(inv)
    }

    pub fn mul_vec(&self, v: &[Rational]) -> Vec<Rational> {
        (0..self.rows)
            .map(|i| self.row(i).iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }
}

/// `det(var·I − m)` for a square matrix of polynomials, computed with the
/// division-free Berkowitz recurrence.
///
/// Panics if `m` is not square.
pub fn charpoly(m: &[Vec<SparsePoly>], var: Var) -> SparsePoly {
    let n = m.len();
    assert!(m.iter().all(|r| r.len() == n), "charpoly needs a square matrix");
    if n == 0 {
        return SparsePoly::one();
    }
    // Coefficient vector (highest degree first) of the trailing principal
    // submatrix m[k.., k..], built from k = n-1 down to 0.
    let mut vec: Vec<SparsePoly> = alloc::vec![SparsePoly::one(), -&m[n - 1][n - 1]];
    for k in (0..n - 1).rev() {
        let s = n - k;
        let a = &m[k][k];
        let row: Vec<&SparsePoly> = (k + 1..n).map(|j| &m[k][j]).collect();
        let mut col: Vec<SparsePoly> = (k + 1..n).map(|i| m[i][k].clone()).collect();
        let mut diags: Vec<SparsePoly> = Vec::with_capacity(s + 1);
        diags.push(SparsePoly::one());
        diags.push(-a);
        for step in 0..s - 1 {
            let mut dot = SparsePoly::zero();
            for (r, c) in row.iter().zip(&col) {
                dot += &(*r * c);
            }
            diags.push(-&dot);
            if step + 1 < s - 1 {
                col = (k + 1..n)
                    .map(|i| {
                        let mut acc = SparsePoly::zero();
                        for (j, c) in (k + 1..n).zip(&col) {
                            acc += &(&m[i][j] * c);
                        }
                        acc
                    })
                    .collect();
            }
        }
        // Lower-triangular Toeplitz (s+1)×s matrix times the previous vector.
        vec = (0..=s)
            .map(|i| {
                let mut acc = SparsePoly::zero();
                for j in 0..s.min(i + 1) {
                    acc += &(&diags[i - j] * &vec[j]);
                }
                acc
            })
            .collect();
    }
    SparsePoly::from_coeff_vector(&vec, var)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::rat;

    fn ints(rows: &[&[i64]]) -> RatMatrix {
        RatMatrix::from_rows(rows.iter().map(|r| r.iter().map(|&x| rat(x)).collect()).collect())
    }

    #[test]
    fn rank_examples() {
        assert_eq!(RatMatrix::identity(2).rank(), 2);
        assert_eq!(RatMatrix::zeros(2, 2).rank(), 0);
        assert_eq!(ints(&[&[1, 2, 3], &[2, 4, 6], &[1, 0, 1]]).rank(), 2);
        assert_eq!(ints(&[&[0, 0, 1], &[0, 0, 2]]).rank(), 1);
    }

    #[test]
    fn delta_vectors_n1_have_full_rank() {
        // −(1+U₁) and 1 over the basis {1, U₁}.
        let u = SparsePoly::var(Var::Param(2));
        let d1 = -&(&SparsePoly::one() + &u);
        let m = RatMatrix::from_polys(&[d1, SparsePoly::one()]);
        assert_eq!((m.rows(), m.cols()), (2, 2));
        assert_eq!(m.rank(), 2);
    }

    #[test]
    fn inverse_roundtrip() {
        let m = ints(&[&[2, 1], &[7, 4]]);
        let inv = m.inverse().unwrap();
        assert_eq!(inv, ints(&[&[4, -1], &[-7, 2]]));
        assert!(ints(&[&[1, 2], &[2, 4]]).inverse().is_none());
    }

    #[test]
    fn charpoly_small() {
        let t = SparsePoly::var(Var::Param(1));
        let y = SparsePoly::var(Var::Y);
        assert_eq!(charpoly(&[alloc::vec![t.clone()]], Var::Y), &y - &t);
        let a = SparsePoly::var(Var::Param(2));
        let b = SparsePoly::var(Var::Param(3));
        let z = SparsePoly::zero();
        let m = alloc::vec![alloc::vec![a.clone(), z.clone()], alloc::vec![z, b.clone()]];
        assert_eq!(charpoly(&m, Var::Y), &(&y - &a) * &(&y - &b));
    }
}
