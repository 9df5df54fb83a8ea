use nalgebra::DMatrix;
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

/// Dense complex matrix, the operator carrier at truncation.
///
/// Wraps a column-major `nalgebra` matrix; the public accessors speak
/// row/column indices so callers never see the storage order.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexMatrix {
    pub(crate) m: DMatrix<C64>,
}

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { m: DMatrix::zeros(rows, cols) }
    }

    pub fn identity(n: usize) -> Self {
        Self { m: DMatrix::identity(n, n) }
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        Self { m: DMatrix::from_fn(rows, cols, |i, j| f(i, j)) }
    }

    /// Row-major entry list.
    pub fn from_rows(rows: usize, cols: usize, entries: &[C64]) -> Result<Self> {
        if entries.len() != rows * cols {
            return Err(Error::ShapeMismatch(format!(
                "{} entries for a {}x{} matrix",
                entries.len(),
                rows,
                cols
            )));
        }
        Ok(Self::from_fn(rows, cols, |i, j| entries[i * cols + j]))
    }

    pub fn from_real_diag(d: &[f64]) -> Self {
        Self::from_fn(d.len(), d.len(), |i, j| {
            if i == j { C64::new(d[i], 0.0) } else { C64::new(0.0, 0.0) }
        })
    }

    pub fn from_complex_diag(d: &[C64]) -> Self {
        Self::from_fn(d.len(), d.len(), |i, j| if i == j { d[i] } else { C64::new(0.0, 0.0) })
    }

    pub fn rows(&self) -> usize {
        self.m.nrows()
    }

    pub fn cols(&self) -> usize {
        self.m.ncols()
    }

    pub fn is_square(&self) -> bool {
        self.rows() == self.cols()
    }

    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.m[(i, j)]
    }

    pub fn set(&mut self, i: usize, j: usize, v: C64) {
        self.m[(i, j)] = v;
    }

    pub fn adjoint(&self) -> Self {
        Self { m: self.m.adjoint() }
    }

    pub fn transpose(&self) -> Self {
        Self { m: self.m.transpose() }
    }

    pub fn scale(&self, c: C64) -> Self {
        Self { m: self.m.map(|x| x * c) }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same_shape(other)?;
        Ok(Self { m: &self.m + &other.m })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_same_shape(other)?;
        Ok(Self { m: &self.m - &other.m })
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.cols() != other.rows() {
            return Err(Error::ShapeMismatch(format!(
                "{}x{} * {}x{}",
                self.rows(),
                self.cols(),
                other.rows(),
                other.cols()
            )));
        }
        Ok(Self { m: &self.m * &other.m })
    }

    /// self * other scanning only the nonzero entries of self; pays off for
    /// banded/shift operators against dense right factors.
    pub fn mul_sparse(&self, other: &Self) -> Result<Self> {
        if self.cols() != other.rows() {
            return Err(Error::ShapeMismatch(format!(
                "{}x{} * {}x{}",
                self.rows(),
                self.cols(),
                other.rows(),
                other.cols()
            )));
        }
        let mut out = Self::zeros(self.rows(), other.cols());
        for i in 0..self.rows() {
            for k in 0..self.cols() {
                let v = self.m[(i, k)];
                if v.re == 0.0 && v.im == 0.0 {
                    continue;
                }
                for j in 0..other.cols() {
                    out.m[(i, j)] += v * other.m[(k, j)];
                }
            }
        }
        Ok(out)
    }

    /// self^* self scanning the nonzero rows of self; O(sum_r nnz(row_r)^2).
    pub fn gram_sparse(&self) -> Self {
        let n = self.cols();
        let mut out = Self::zeros(n, n);
        for r in 0..self.rows() {
            let nz: Vec<usize> = (0..n)
                .filter(|&c| {
                    let v = self.m[(r, c)];
                    v.re != 0.0 || v.im != 0.0
                })
                .collect();
            for &c1 in &nz {
                let v1 = self.m[(r, c1)].conj();
                for &c2 in &nz {
                    out.m[(c1, c2)] += v1 * self.m[(r, c2)];
                }
            }
        }
        out
    }

    pub fn commutator(&self, other: &Self) -> Result<Self> {
        self.mul(other)?.sub(&other.mul(self)?)
    }

    pub fn anticommutator(&self, other: &Self) -> Result<Self> {
        self.mul(other)?.add(&other.mul(self)?)
    }

    pub fn trace(&self) -> C64 {
        self.m.diagonal().iter().sum()
    }

    pub fn diagonal(&self) -> Vec<C64> {
        self.m.diagonal().iter().copied().collect()
    }

    pub fn kron(&self, other: &Self) -> Self {
        Self { m: self.m.kronecker(&other.m) }
    }

    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> Self {
        Self::from_fn(rows.len(), cols.len(), |i, j| self.m[(rows[i], cols[j])])
    }

    pub fn max_abs(&self) -> f64 {
        self.m.iter().map(|x| x.norm()).fold(0.0, f64::max)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.m.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Largest singular value by power iteration on A*A.
    pub fn spectral_norm(&self) -> f64 {
        let (r, c) = (self.rows(), self.cols());
        if r == 0 || c == 0 {
            return 0.0;
        }
        let scale = self.max_abs();
        if scale == 0.0 {
            return 0.0;
        }
        let mut v: Vec<C64> = (0..c)
            .map(|j| C64::new(1.0 + (j as f64 * 0.7).sin(), (j as f64 * 0.3).cos()))
            .collect();
        let mut norm_v = v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
        for x in v.iter_mut() {
            *x /= norm_v;
        }
        let mut est = 0.0f64;
        for _ in 0..200 {
            // w = A v ; v' = A* w
            let mut w = vec![C64::new(0.0, 0.0); r];
            for i in 0..r {
                let mut acc = C64::new(0.0, 0.0);
                for j in 0..c {
                    acc += self.m[(i, j)] * v[j];
                }
                w[i] = acc;
            }
            let mut v2 = vec![C64::new(0.0, 0.0); c];
            for j in 0..c {
                let mut acc = C64::new(0.0, 0.0);
                for i in 0..r {
                    acc += self.m[(i, j)].conj() * w[i];
                }
                v2[j] = acc;
            }
            norm_v = v2.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
            if norm_v == 0.0 {
                return 0.0;
            }
            let new_est = norm_v.sqrt();
            for x in v2.iter_mut() {
                *x /= norm_v;
            }
            v = v2;
            if (new_est - est).abs() <= 1e-13 * new_est.max(1.0) {
                return new_est;
            }
            est = new_est;
        }
        est
    }

    pub fn hermiticity_defect(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let mut worst = 0.0f64;
        for i in 0..self.rows() {
            for j in 0..=i {
                let d = (self.m[(i, j)] - self.m[(j, i)].conj()).norm();
                worst = worst.max(d);
            }
        }
        worst
    }

    /// max|M - M*| <= tol * max|M| (absolute tol floor for the zero matrix).
    pub fn is_hermitian(&self, rel_tol: f64) -> bool {
        self.is_square() && self.hermiticity_defect() <= rel_tol * self.max_abs().max(1e-300)
    }

    /// Replace by the Hermitian part (M + M*)/2.
    pub fn hermitized(&self) -> Self {
        Self { m: (&self.m + self.m.adjoint()).map(|x| x * 0.5) }
    }

    pub fn has_finite_entries(&self) -> bool {
        self.m.iter().all(|x| x.re.is_finite() && x.im.is_finite())
    }

    pub(crate) fn check_same_shape(&self, other: &Self) -> Result<()> {
        if self.rows() != other.rows() || self.cols() != other.cols() {
            return Err(Error::ShapeMismatch(format!(
                "{}x{} vs {}x{}",
                self.rows(),
                self.cols(),
                other.rows(),
                other.cols()
            )));
        }
        Ok(())
    }
}
