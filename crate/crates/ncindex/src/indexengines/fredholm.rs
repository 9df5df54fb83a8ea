use crate::error::{Error, Result};
use crate::numkernel::{svd, ComplexMatrix};

/// Kernel/cokernel counts of a compressed operator, raw and after the
/// boundary filter.
#[derive(Clone, Debug)]
pub struct FredholmCount {
    pub raw_kernel: usize,
    pub raw_cokernel: usize,
    pub kernel: usize,
    pub cokernel: usize,
    pub smallest_kept: f64,
    pub tol: f64,
}

impl FredholmCount {
    pub fn index(&self) -> i64 {
        self.kernel as i64 - self.cokernel as i64
    }

    pub fn raw_index(&self) -> i64 {
        self.raw_kernel as i64 - self.raw_cokernel as i64
    }
}

/// dim ker - dim coker by singular-value counting: a singular vector with
/// sigma < tol contributes only if its boundary-band mass stays below
/// `mass_threshold`. Signals `AmbiguousGap` when singular values land inside
/// [tol, 10 tol).
pub fn fredholm_index(
    a: &ComplexMatrix,
    tol: f64,
    boundary_band: &[usize],
    mass_threshold: f64,
) -> Result<FredholmCount> {
    if !(tol > 0.0) {
        return Err(Error::InvalidExponent(tol));
    }
    let dec = svd(a, boundary_band)?;
    let k = dec.singular_values.len();
    for &s in &dec.singular_values {
        if s >= tol && s < 10.0 * tol {
            return Err(Error::AmbiguousGap(format!(
                "singular value {s:.3e} within 10x of tol {tol:.3e}; raise the truncation"
            )));
        }
    }
    let mut raw_kernel = a.cols().saturating_sub(k); // rank-deficient thin part
    let mut raw_cokernel = a.rows().saturating_sub(k);
    let mut kernel = raw_kernel;
    let mut cokernel = raw_cokernel;
    let mut smallest_kept = f64::INFINITY;
    for i in 0..k {
        let s = dec.singular_values[i];
        if s < tol {
            raw_kernel += 1;
            raw_cokernel += 1;
            if dec.boundary_mass_right[i] < mass_threshold {
                kernel += 1;
            }
            if dec.boundary_mass_left[i] < mass_threshold {
                cokernel += 1;
            }
        } else {
            smallest_kept = smallest_kept.min(s);
        }
    }
    Ok(FredholmCount { raw_kernel, raw_cokernel, kernel, cokernel, smallest_kept, tol })
}
