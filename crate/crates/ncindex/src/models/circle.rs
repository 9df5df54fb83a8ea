use num_complex::Complex64 as C64;

use super::{DiracRep, ModelKind, Parity, SpectralTriple};
use crate::error::{Error, Result};
use crate::numkernel::ComplexMatrix;

/// A trigonometric polynomial sum_j c_j e^{i j theta}, stored as (degree,
/// coefficient) pairs.
#[derive(Clone, Debug)]
pub struct FourierPolynomial {
    pub name: String,
    pub coefficients: Vec<(i64, C64)>,
}

impl FourierPolynomial {
    pub fn monomial(name: &str, degree: i64) -> Self {
        Self { name: name.into(), coefficients: vec![(degree, C64::new(1.0, 0.0))] }
    }

    pub fn max_degree(&self) -> i64 {
        self.coefficients.iter().map(|(d, _)| d.abs()).max().unwrap_or(0)
    }

    /// Truncated Laurent-Toeplitz matrix on the modes -N..N:
    /// M[k,l] = c_{k-l}.
    pub fn toeplitz(&self, n_trunc: usize) -> ComplexMatrix {
        let n = n_trunc as i64;
        let dim = (2 * n + 1) as usize;
        let mut m = ComplexMatrix::zeros(dim, dim);
        for (i, k) in (-n..=n).enumerate() {
            for (j, l) in (-n..=n).enumerate() {
                for &(deg, c) in &self.coefficients {
                    if k - l == deg {
                        let cur = m.get(i, j);
                        m.set(i, j, cur + c);
                    }
                }
            }
        }
        m
    }
}

/// Circle model: D = diag(-N..N), symbols as truncated convolution matrices.
pub fn circle_triple(n_trunc: usize, symbols: &[FourierPolynomial]) -> Result<SpectralTriple> {
    for s in symbols {
        if s.max_degree() > n_trunc as i64 - 1 {
            return Err(Error::DegreeOverflow(format!(
                "symbol {} of degree {} at truncation {}",
                s.name,
                s.max_degree(),
                n_trunc
            )));
        }
    }
    let n = n_trunc as i64;
    let ks: Vec<f64> = (-n..=n).map(|k| k as f64).collect();
    let d = ComplexMatrix::from_real_diag(&ks);
    let generators = symbols.iter().map(|s| (s.name.clone(), s.toeplitz(n_trunc))).collect();
    Ok(SpectralTriple {
        name: format!("circle(N={n_trunc})"),
        kind: ModelKind::Circle,
        parity: Parity::Odd,
        spectral_dim: 1.0,
        truncation: n_trunc,
        theta: 1.0,
        dirac: DiracRep::Dense(d),
        grading: None,
        generators,
        boundary_band: boundary_band(n_trunc),
        trace_weight: None,
    })
}

/// The truncated winding-w unitary e^{i w theta}.
pub fn circle_unitary(n_trunc: usize, winding: i64) -> Result<ComplexMatrix> {
    if winding.unsigned_abs() as usize > n_trunc.saturating_sub(1) {
        return Err(Error::DegreeOverflow(format!(
            "winding {winding} at truncation {n_trunc}"
        )));
    }
    Ok(FourierPolynomial::monomial("u", winding).toeplitz(n_trunc))
}

/// Wrap-around (circulant) completion of the winding-w shift: exactly
/// unitary, equal to the Toeplitz truncation away from the edge.
pub fn circle_unitary_cyclic(n_trunc: usize, winding: i64) -> ComplexMatrix {
    let dim = 2 * n_trunc + 1;
    let mut m = ComplexMatrix::zeros(dim, dim);
    for j in 0..dim {
        let i = (j as i64 + winding).rem_euclid(dim as i64) as usize;
        m.set(i, j, C64::new(1.0, 0.0));
    }
    m
}

/// Top ceil(N/4) modes at each end of the mode ladder.
fn boundary_band(n_trunc: usize) -> Vec<usize> {
    let b = n_trunc.div_ceil(4);
    let dim = 2 * n_trunc + 1;
    let mut out = Vec::new();
    for i in 0..dim {
        let k = i as i64 - n_trunc as i64;
        if k.unsigned_abs() as usize >= n_trunc + 1 - b {
            out.push(i);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_symbol_is_identity() {
        let one = FourierPolynomial::monomial("1", 0);
        let t = circle_triple(4, &[one]).unwrap();
        let (_, m) = &t.generators[0];
        assert!(m.sub(&ComplexMatrix::identity(9)).unwrap().max_abs() < 1e-15);
    }

    #[test]
    fn shift_symbol_is_subdiagonal() {
        let m = circle_unitary(3, 1).unwrap();
        for i in 0..6 {
            assert_eq!(m.get(i + 1, i), C64::new(1.0, 0.0));
        }
        assert_eq!(m.get(0, 1), C64::new(0.0, 0.0));
    }

    #[test]
    fn cosine_symbol_norm() {
        // e^{i t} + e^{-i t}: Hermitian, norm -> 2 as N grows
        let sym = FourierPolynomial {
            name: "2cos".into(),
            coefficients: vec![(1, C64::new(1.0, 0.0)), (-1, C64::new(1.0, 0.0))],
        };
        let mut last = 0.0;
        for n in [4usize, 8, 16] {
            let m = sym.toeplitz(n);
            assert!(m.is_hermitian(1e-14));
            let norm = m.spectral_norm();
            assert!(norm < 2.0 + 1e-12);
            assert!(norm > last);
            last = norm;
        }
        assert!(last > 1.9);
    }

    #[test]
    fn degree_overflow() {
        let s = FourierPolynomial::monomial("u5", 5);
        assert!(matches!(circle_triple(4, &[s]), Err(Error::DegreeOverflow(_))));
    }

    #[test]
    fn validates() {
        let t = circle_triple(6, &[FourierPolynomial::monomial("u", 1)]).unwrap();
        t.validate().unwrap();
    }
}
