use nalgebra::DMatrix;
use num_complex::Complex64 as C64;

use super::matrix::ComplexMatrix;
use crate::error::{Error, Result};

/// Thin SVD with per-vector boundary-mass scores.
///
/// `boundary_mass_left[k]` is the squared amplitude of the k-th left singular
/// vector on the supplied boundary index set; same for the right vectors.
#[derive(Clone, Debug)]
pub struct SvdResult {
    pub singular_values: Vec<f64>,
    pub u: ComplexMatrix,
    pub v: ComplexMatrix,
    pub boundary_mass_left: Vec<f64>,
    pub boundary_mass_right: Vec<f64>,
}

pub fn svd(a: &ComplexMatrix, boundary_band: &[usize]) -> Result<SvdResult> {
    let dec = a.m.clone().try_svd(true, true, 1e-14, 10_000).ok_or_else(|| {
        Error::NonConvergence(format!("SVD of a {}x{} matrix", a.rows(), a.cols()))
    })?;
    let u_m: DMatrix<C64> = dec.u.unwrap();
    let vt: DMatrix<C64> = dec.v_t.unwrap();
    let k = dec.singular_values.len();

    // sort descending
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&i, &j| dec.singular_values[j].partial_cmp(&dec.singular_values[i]).unwrap());

    let u = ComplexMatrix::from_fn(u_m.nrows(), k, |i, c| u_m[(i, order[c])]);
    let v = ComplexMatrix::from_fn(vt.ncols(), k, |i, c| vt[(order[c], i)].conj());
    let singular_values: Vec<f64> = order.iter().map(|&i| dec.singular_values[i]).collect();

    let mass = |mat: &ComplexMatrix, col: usize| -> f64 {
        boundary_band
            .iter()
            .filter(|&&i| i < mat.rows())
            .map(|&i| mat.get(i, col).norm_sqr())
            .sum()
    };
    let boundary_mass_left = (0..k).map(|c| mass(&u, c)).collect();
    let boundary_mass_right = (0..k).map(|c| mass(&v, c)).collect();

    Ok(SvdResult { singular_values, u, v, boundary_mass_left, boundary_mass_right })
}

/// Schatten p-norm (sum of sigma^p)^(1/p); `p = f64::INFINITY` gives the
/// spectral norm.
pub fn schatten_norm(a: &ComplexMatrix, p: f64) -> Result<f64> {
    if p.is_infinite() && p > 0.0 {
        return Ok(a.spectral_norm());
    }
    if !(p >= 1.0) {
        return Err(Error::InvalidExponent(p));
    }
    let dec = svd(a, &[])?;
    Ok(dec.singular_values.iter().map(|s| s.powf(p)).sum::<f64>().powf(1.0 / p))
}
