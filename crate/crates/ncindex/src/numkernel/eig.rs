use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64 as C64;

use super::matrix::ComplexMatrix;
use crate::error::{Error, Result};

/// Eigendecomposition of a Hermitian matrix: real ascending eigenvalues and a
/// unitary matrix of column eigenvectors.
#[derive(Clone, Debug)]
pub struct HermEig {
    pub values: Vec<f64>,
    pub vectors: ComplexMatrix,
}

const HERM_INPUT_TOL: f64 = 1e-8;

/// Eigendecomposition of a Hermitian matrix.
///
/// The sparsity pattern is first split into connected components, so block
/// structure (mode-number conservation, chiral squares, diagonal operators)
/// is solved block by block. Components that are purely real are routed
/// through the real symmetric solver.
pub fn eig_hermitian(m: &ComplexMatrix) -> Result<HermEig> {
    if !m.is_square() {
        return Err(Error::ShapeMismatch(format!("{}x{} not square", m.rows(), m.cols())));
    }
    if !m.is_hermitian(HERM_INPUT_TOL) {
        return Err(Error::NonHermitianInput(format!(
            "defect {:.3e} vs max entry {:.3e}",
            m.hermiticity_defect(),
            m.max_abs()
        )));
    }
    let n = m.rows();
    if n == 0 {
        return Ok(HermEig { values: vec![], vectors: ComplexMatrix::zeros(0, 0) });
    }
    let h = m.hermitized();

    let comps = components(&h);
    // (eigenvalue, component id, position within component) for global sort
    let mut vals: Vec<(f64, usize, usize)> = Vec::with_capacity(n);
    let mut comp_vecs: Vec<DMatrix<C64>> = Vec::with_capacity(comps.len());
    for (ci, idx) in comps.iter().enumerate() {
        let k = idx.len();
        let sub = DMatrix::<C64>::from_fn(k, k, |a, b| h.m[(idx[a], idx[b])]);
        let all_real = sub.iter().all(|x| x.im == 0.0);
        let (ev, vv) = if all_real {
            let rs = DMatrix::<f64>::from_fn(k, k, |a, b| sub[(a, b)].re);
            let se = SymmetricEigen::new(rs);
            let vv = DMatrix::<C64>::from_fn(k, k, |a, b| C64::new(se.eigenvectors[(a, b)], 0.0));
            (se.eigenvalues.iter().copied().collect::<Vec<_>>(), vv)
        } else {
            let se = SymmetricEigen::new(sub);
            (se.eigenvalues.iter().copied().collect::<Vec<_>>(), se.eigenvectors)
        };
        if ev.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonConvergence(format!("component {ci} of size {k}")));
        }
        for (p, &val) in ev.iter().enumerate() {
            vals.push((val, ci, p));
        }
        comp_vecs.push(vv);
    }
    vals.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());

    let mut vectors = ComplexMatrix::zeros(n, n);
    let mut values = Vec::with_capacity(n);
    for (col, &(val, ci, p)) in vals.iter().enumerate() {
        values.push(val);
        for (row_local, &row_global) in comps[ci].iter().enumerate() {
            vectors.set(row_global, col, comp_vecs[ci][(row_local, p)]);
        }
    }
    Ok(HermEig { values, vectors })
}

/// Connected components of the nonzero pattern (union-find).
fn components(h: &ComplexMatrix) -> Vec<Vec<usize>> {
    let n = h.rows();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut Vec<usize>, mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    for i in 0..n {
        for j in 0..i {
            if h.get(i, j).norm() != 0.0 {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                if a != b {
                    parent[a] = b;
                }
            }
        }
    }
    let mut buckets: std::collections::BTreeMap<usize, Vec<usize>> = Default::default();
    for i in 0..n {
        let r = find(&mut parent, i);
        buckets.entry(r).or_default().push(i);
    }
    buckets.into_values().collect()
}

impl HermEig {
    pub fn dim(&self) -> usize {
        self.values.len()
    }

    /// V f(Lambda) V* for a real-valued scalar function.
    pub fn apply(&self, f: impl Fn(f64) -> f64) -> Result<ComplexMatrix> {
        let d: Vec<f64> = self.values.iter().map(|&x| f(x)).collect();
        if d.iter().any(|x| !x.is_finite()) {
            let bad = self
                .values
                .iter()
                .find(|&&x| !f(x).is_finite())
                .copied()
                .unwrap_or(f64::NAN);
            return Err(Error::DomainError(format!("f not finite at eigenvalue {bad}")));
        }
        self.recombine_complex(&d.iter().map(|&x| C64::new(x, 0.0)).collect::<Vec<_>>())
    }

    /// V f(Lambda) V* for a complex-valued scalar function.
    pub fn apply_complex(&self, f: impl Fn(f64) -> C64) -> Result<ComplexMatrix> {
        let d: Vec<C64> = self.values.iter().map(|&x| f(x)).collect();
        if d.iter().any(|x| !x.re.is_finite() || !x.im.is_finite()) {
            return Err(Error::DomainError("f not finite on the spectrum".into()));
        }
        self.recombine_complex(&d)
    }

    fn recombine_complex(&self, d: &[C64]) -> Result<ComplexMatrix> {
        let v = &self.vectors;
        let scaled = ComplexMatrix::from_fn(v.rows(), v.cols(), |i, j| v.get(i, j) * d[j]);
        scaled.mul(&v.adjoint())
    }
}

/// f(M) by functional calculus on a Hermitian matrix.
pub fn apply_function(f: impl Fn(f64) -> f64, m: &ComplexMatrix) -> Result<ComplexMatrix> {
    eig_hermitian(m)?.apply(f)
}
