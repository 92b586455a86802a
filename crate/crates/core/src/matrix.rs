//! Dense matrices over a `Coeff` domain, plus conversions to nalgebra for the
//! double-precision kernels.

use std::fmt;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::numf::CDMat;
use crate::poly::UniPoly;
use crate::scalar::Coeff;

/// Row-major dense matrix.
#[derive(Clone, PartialEq, Debug)]
pub struct CMat<C: Coeff> {
    pub nrows: usize,
    pub ncols: usize,
    data: Vec<C>,
}

impl<C: Coeff> CMat<C> {
    pub fn zeros(nrows: usize, ncols: usize) -> Self {
        CMat {
            nrows,
            ncols,
            data: vec![C::zero(); nrows * ncols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = C::one();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<C>>) -> Result<Self> {
        let nrows = rows.len();
        let ncols = rows.first().map(|r| r.len()).unwrap_or(0);
        let mut data = Vec::with_capacity(nrows * ncols);
        for (i, row) in rows.into_iter().enumerate() {
            if row.len() != ncols {
                return Err(Error::RaggedInput(i, ncols));
            }
            data.extend(row);
        }
        Ok(CMat { nrows, ncols, data })
    }

    pub fn from_fn(nrows: usize, ncols: usize, f: impl Fn(usize, usize) -> C) -> Self {
        let mut m = Self::zeros(nrows, ncols);
        for i in 0..nrows {
            for j in 0..ncols {
                m[(i, j)] = f(i, j);
            }
        }
        m
    }

    pub fn is_square(&self) -> bool {
        self.nrows == self.ncols
    }

    pub fn add(&self, rhs: &Self) -> Self {
        debug_assert_eq!((self.nrows, self.ncols), (rhs.nrows, rhs.ncols));
        Self::from_fn(self.nrows, self.ncols, |i, j| {
            self[(i, j)].clone() + rhs[(i, j)].clone()
        })
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        debug_assert_eq!((self.nrows, self.ncols), (rhs.nrows, rhs.ncols));
        Self::from_fn(self.nrows, self.ncols, |i, j| {
            self[(i, j)].clone() - rhs[(i, j)].clone()
        })
    }

    pub fn scale(&self, c: &C) -> Self {
        Self::from_fn(self.nrows, self.ncols, |i, j| {
            self[(i, j)].clone() * c.clone()
        })
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        debug_assert_eq!(self.ncols, rhs.nrows);
        let mut out = Self::zeros(self.nrows, rhs.ncols);
        for i in 0..self.nrows {
            for k in 0..self.ncols {
                let a = self[(i, k)].clone();
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.ncols {
                    out[(i, j)] = out[(i, j)].clone() + a.clone() * rhs[(k, j)].clone();
                }
            }
        }
        out
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.ncols, self.nrows, |i, j| self[(j, i)].conj())
    }

    pub fn trace(&self) -> C {
        let mut t = C::zero();
        for i in 0..self.nrows.min(self.ncols) {
            t = t + self[(i, i)].clone();
        }
        t
    }

    pub fn is_zero_matrix(&self) -> bool {
        self.data.iter().all(|c| c.is_zero())
    }

    pub fn is_hermitian(&self) -> bool {
        if !self.is_square() {
            return false;
        }
        for i in 0..self.nrows {
            for j in 0..self.ncols {
                if self[(i, j)] != self[(j, i)].conj() {
                    return false;
                }
            }
        }
        true
    }

    pub fn frob_norm(&self) -> f64 {
        self.data
            .iter()
            .map(|c| c.abs().powi(2))
            .sum::<f64>()
            .sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|c| c.abs()).fold(0.0, f64::max)
    }

    /// Determinant by Gaussian elimination with pivoting (largest |entry| in
    /// float mode, first nonzero in exact mode).
    pub fn det(&self) -> Result<C> {
        if !self.is_square() {
            return Err(Error::DimensionMismatch(format!(
                "determinant of a {}x{} matrix",
                self.nrows, self.ncols
            )));
        }
        let n = self.nrows;
        let mut a = self.clone();
        let mut det = C::one();
        for col in 0..n {
            let pivot_row = if C::EXACT {
                (col..n).find(|&r| !a[(r, col)].is_zero())
            } else {
                (col..n)
                    .filter(|&r| !a[(r, col)].is_zero())
                    .max_by(|&r1, &r2| {
                        a[(r1, col)].abs().partial_cmp(&a[(r2, col)].abs()).unwrap()
                    })
            };
            let Some(p) = pivot_row else {
                return Ok(C::zero());
            };
            if p != col {
                a.swap_rows(p, col);
                det = -det;
            }
            let piv = a[(col, col)].clone();
            det = det * piv.clone();
            let inv = piv.inv().ok_or(Error::DivisionByZero)?;
            for r in col + 1..n {
                let factor = a[(r, col)].clone() * inv.clone();
                if factor.is_zero() {
                    continue;
                }
                for c in col..n {
                    a[(r, c)] = a[(r, c)].clone() - factor.clone() * a[(col, c)].clone();
                }
            }
        }
        Ok(det)
    }

    /// Inverse by Gauss-Jordan; `None` when singular (exact zero pivot or, in
    /// float mode, pivot below `tol`).
    pub fn inverse(&self, tol: f64) -> Option<Self> {
        if !self.is_square() {
            return None;
        }
        let n = self.nrows;
        let mut a = self.clone();
        let mut inv = Self::identity(n);
        for col in 0..n {
            let p = (col..n)
                .filter(|&r| !a[(r, col)].is_zero())
                .max_by(|&r1, &r2| {
                    a[(r1, col)].abs().partial_cmp(&a[(r2, col)].abs()).unwrap()
                })?;
            if !C::EXACT && a[(p, col)].abs() <= tol {
                return None;
            }
            a.swap_rows(p, col);
            inv.swap_rows(p, col);
            let pinv = a[(col, col)].inv()?;
            for c in 0..n {
                a[(col, c)] = a[(col, c)].clone() * pinv.clone();
                inv[(col, c)] = inv[(col, c)].clone() * pinv.clone();
            }
            for r in 0..n {
                if r == col || a[(r, col)].is_zero() {
                    continue;
                }
                let f = a[(r, col)].clone();
                for c in 0..n {
                    a[(r, c)] = a[(r, c)].clone() - f.clone() * a[(col, c)].clone();
                    inv[(r, c)] = inv[(r, c)].clone() - f.clone() * inv[(col, c)].clone();
                }
            }
        }
        Some(inv)
    }

    fn swap_rows(&mut self, r1: usize, r2: usize) {
        if r1 == r2 {
            return;
        }
        for c in 0..self.ncols {
            self.data.swap(r1 * self.ncols + c, r2 * self.ncols + c);
        }
    }

    pub fn pow(&self, k: usize) -> Self {
        debug_assert!(self.is_square());
        let mut acc = Self::identity(self.nrows);
        for _ in 0..k {
            acc = acc.mul(self);
        }
        acc
    }

    pub fn to_c64(&self) -> CMat<Complex64> {
        CMat::from_fn(self.nrows, self.ncols, |i, j| self[(i, j)].to_c64())
    }

    pub fn to_dmatrix(&self) -> CDMat {
        CDMat::from_fn(self.nrows, self.ncols, |i, j| self[(i, j)].to_c64())
    }

    pub fn entries(&self) -> impl Iterator<Item = &C> {
        self.data.iter()
    }
}

impl CMat<Complex64> {
    pub fn from_dmatrix(m: &CDMat) -> Self {
        CMat::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)])
    }
}

impl<C: Coeff> std::ops::Index<(usize, usize)> for CMat<C> {
    type Output = C;
    fn index(&self, (i, j): (usize, usize)) -> &C {
        &self.data[i * self.ncols + j]
    }
}

impl<C: Coeff> std::ops::IndexMut<(usize, usize)> for CMat<C> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C {
        &mut self.data[i * self.ncols + j]
    }
}

impl<C: Coeff> fmt::Display for CMat<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.nrows {
            write!(f, "[")?;
            for j in 0..self.ncols {
                if j > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{}", self[(i, j)])?;
            }
            writeln!(f, "]")?;
        }
        Ok(())
    }
}

/// Evaluates a scalar polynomial at a square matrix by Horner's rule.
pub fn poly_at_matrix<C: Coeff>(p: &UniPoly<C>, a: &CMat<C>) -> CMat<C> {
    debug_assert!(a.is_square());
    let n = a.nrows;
    let mut acc = CMat::zeros(n, n);
    for c in p.coeffs.iter().rev() {
        acc = acc.mul(a);
        for i in 0..n {
            acc[(i, i)] = acc[(i, i)].clone() + c.clone();
        }
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Exact;

    fn em(rows: &[&[i64]]) -> CMat<Exact> {
        CMat::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&v| Exact::from_ints(v, 0)).collect())
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn det_exact() {
        let m = em(&[&[1, 2], &[3, 4]]);
        assert_eq!(m.det().unwrap(), Exact::from_ints(-2, 0));
        let s = em(&[&[1, 2], &[2, 4]]);
        assert!(s.det().unwrap().is_zero());
    }

    #[test]
    fn det_float_matches_nalgebra() {
        let m = CMat::<Complex64>::from_fn(4, 4, |i, j| {
            Complex64::new(((i * 7 + j * 3) % 5) as f64, (i as f64) - (j as f64))
        });
        let ours = m.det().unwrap();
        let theirs = m.to_dmatrix().lu().determinant();
        assert!((ours - theirs).norm() < 1e-10);
    }

    #[test]
    fn inverse_roundtrip() {
        let m = em(&[&[2, 1, 0], &[0, 1, 1], &[1, 0, 3]]);
        let inv = m.inverse(0.0).unwrap();
        assert_eq!(m.mul(&inv), CMat::identity(3));
        let sing = em(&[&[1, 1], &[1, 1]]);
        assert!(sing.inverse(0.0).is_none());
    }

    #[test]
    fn horner_matches_direct() {
        // p(z) = z^2 - 3z + 2 at A
        let a = em(&[&[1, 1], &[0, 2]]);
        let p = UniPoly::new(vec![
            Exact::from_ints(2, 0),
            Exact::from_ints(-3, 0),
            Exact::from_ints(1, 0),
        ]);
        let direct = a
            .mul(&a)
            .sub(&a.scale(&Exact::from_ints(3, 0)))
            .add(&CMat::identity(2).scale(&Exact::from_ints(2, 0)));
        assert_eq!(poly_at_matrix(&p, &a), direct);
    }

    #[test]
    fn hermitian_detection() {
        let h = CMat::<Complex64>::from_rows(vec![
            vec![Complex64::new(1.0, 0.0), Complex64::new(0.0, 1.0)],
            vec![Complex64::new(0.0, -1.0), Complex64::new(2.0, 0.0)],
        ])
        .unwrap();
        assert!(h.is_hermitian());
        let nh = CMat::<Complex64>::from_rows(vec![
            vec![Complex64::new(1.0, 0.0), Complex64::new(0.0, 1.0)],
            vec![Complex64::new(0.0, 1.0), Complex64::new(2.0, 0.0)],
        ])
        .unwrap();
        assert!(!nh.is_hermitian());
    }
}
