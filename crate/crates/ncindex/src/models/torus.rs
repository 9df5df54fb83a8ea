use num_complex::Complex64 as C64;
use std::f64::consts::PI;

use super::{DiracRep, ModelKind, Parity, SpectralTriple};
use crate::error::{Error, Result};
use crate::numkernel::ComplexMatrix;

/// Noncommutative p-torus at truncation: GNS modes Z^p cut to [-N,N]^p,
/// tensored with the spinor space C^{2^{floor(p/2)}}.
///
/// For p = 2 the generators satisfy U V = e^{2 pi i theta} V U on interior
/// modes; the trace is the plain matrix trace, which reproduces the dual
/// trace on the degree-zero corner with tau(1) = 1 per lattice site times
/// the spinor dimension.
pub fn torus_triple(p: usize, n_trunc: usize, theta: f64) -> Result<SpectralTriple> {
    if n_trunc < 2 {
        return Err(Error::DegreeOverflow(format!("torus needs N >= 2, got {n_trunc}")));
    }
    match p {
        1 => torus_one(n_trunc),
        2 => torus_two(n_trunc, theta),
        _ => Err(Error::InvalidDimension(p)),
    }
}

fn torus_one(n_trunc: usize) -> Result<SpectralTriple> {
    let n = n_trunc as i64;
    let ks: Vec<f64> = (-n..=n).map(|k| k as f64).collect();
    let dim = ks.len();
    let d = ComplexMatrix::from_real_diag(&ks);
    let mut u = ComplexMatrix::zeros(dim, dim);
    for i in 0..dim - 1 {
        u.set(i + 1, i, C64::new(1.0, 0.0));
    }
    let b = n_trunc.div_ceil(4);
    let band = (0..dim)
        .filter(|&i| {
            let k = i as i64 - n;
            k.unsigned_abs() as usize >= n_trunc + 1 - b
        })
        .collect();
    Ok(SpectralTriple {
        name: format!("torus1(N={n_trunc})"),
        kind: ModelKind::TorusOne,
        parity: Parity::Odd,
        spectral_dim: 1.0,
        truncation: n_trunc,
        theta: 1.0,
        dirac: DiracRep::Dense(d),
        grading: None,
        generators: vec![("U".into(), u)],
        boundary_band: band,
        trace_weight: None,
    })
}

fn torus_two(n_trunc: usize, theta: f64) -> Result<SpectralTriple> {
    let n = n_trunc as i64;
    let side = (2 * n + 1) as usize;
    let gns = side * side;
    let dim = 2 * gns;
    // layout: index = 2*(i1*side + i2) + s, lattice point (k1,k2) = (i1-N, i2-N),
    // spinor s in {0,1}; grading = Id (x) sigma_3
    let site = |i1: usize, i2: usize| i1 * side + i2;

    let mut d = ComplexMatrix::zeros(dim, dim);
    for i1 in 0..side {
        for i2 in 0..side {
            let k1 = i1 as i64 - n;
            let k2 = i2 as i64 - n;
            // n1 sigma_1 + n2 sigma_2 = [[0, k1 - i k2],[k1 + i k2, 0]]
            let g = site(i1, i2);
            d.set(2 * g, 2 * g + 1, C64::new(k1 as f64, -(k2 as f64)));
            d.set(2 * g + 1, 2 * g, C64::new(k1 as f64, k2 as f64));
        }
    }

    let lambda = C64::new(0.0, 2.0 * PI * theta).exp();
    // U |k> = |k + e1>, V |k> = lambda^{-k1} |k + e2>  =>  U V = lambda V U
    let mut u = ComplexMatrix::zeros(dim, dim);
    let mut v = ComplexMatrix::zeros(dim, dim);
    for i1 in 0..side {
        for i2 in 0..side {
            let g = site(i1, i2);
            if i1 + 1 < side {
                let h = site(i1 + 1, i2);
                for s in 0..2 {
                    u.set(2 * h + s, 2 * g + s, C64::new(1.0, 0.0));
                }
            }
            if i2 + 1 < side {
                let h = site(i1, i2 + 1);
                let k1 = i1 as i64 - n;
                let phase = lambda.powi(-(k1 as i32));
                for s in 0..2 {
                    v.set(2 * h + s, 2 * g + s, phase);
                }
            }
        }
    }

    let grading: Vec<f64> = (0..dim).map(|i| if i % 2 == 0 { 1.0 } else { -1.0 }).collect();
    let b = n_trunc.div_ceil(4);
    let mut band = Vec::new();
    for i1 in 0..side {
        for i2 in 0..side {
            let k1 = (i1 as i64 - n).unsigned_abs() as usize;
            let k2 = (i2 as i64 - n).unsigned_abs() as usize;
            if k1 >= n_trunc + 1 - b || k2 >= n_trunc + 1 - b {
                let g = site(i1, i2);
                band.push(2 * g);
                band.push(2 * g + 1);
            }
        }
    }
    Ok(SpectralTriple {
        name: format!("torus2(N={n_trunc},theta={theta})"),
        kind: ModelKind::TorusTwo,
        parity: Parity::Even,
        spectral_dim: 2.0,
        truncation: n_trunc,
        theta,
        dirac: DiracRep::Dense(d),
        grading: Some(grading),
        generators: vec![("U".into(), u), ("V".into(), v)],
        boundary_band: band,
        trace_weight: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::spectrum;

    #[test]
    fn p1_matches_circle_spectrum() {
        let t = torus_triple(1, 5, 1.0).unwrap();
        let s = spectrum(&t.dirac.dense()).unwrap();
        let expect: Vec<f64> = (-5i64..=5).map(|k| k as f64).collect();
        for (a, b) in s.iter().zip(expect.iter()) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn p2_commutation_phase() {
        // theta = 0: U, V commute exactly
        let t0 = torus_triple(2, 3, 0.0).unwrap();
        let u = &t0.generators[0].1;
        let v = &t0.generators[1].1;
        let c = u.mul(v).unwrap().sub(&v.mul(u).unwrap()).unwrap();
        assert!(c.max_abs() < 1e-12);

        // theta = 0.3: UV = e^{2 pi i theta} VU on interior modes
        let t = torus_triple(2, 4, 0.3).unwrap();
        let u = &t.generators[0].1;
        let v = &t.generators[1].1;
        let lambda = C64::new(0.0, 2.0 * PI * 0.3).exp();
        let lhs = u.mul(v).unwrap();
        let rhs = v.mul(u).unwrap().scale(lambda);
        let diff = lhs.sub(&rhs).unwrap();
        // interior: both shifts act, i.e. source modes with k1,k2 <= N-1
        let side = 9usize;
        let mut worst = 0.0f64;
        for i1 in 0..side - 1 {
            for i2 in 0..side - 1 {
                for s in 0..2 {
                    let col = 2 * (i1 * side + i2) + s;
                    for row in 0..t.dim() {
                        worst = worst.max(diff.get(row, col).norm());
                    }
                }
            }
        }
        assert!(worst < 1e-10, "interior commutation defect {worst}");
    }

    #[test]
    fn p2_validates_even() {
        let t = torus_triple(2, 2, 0.3).unwrap();
        t.validate().unwrap();
        assert_eq!(t.parity, Parity::Even);
    }

    #[test]
    fn invalid_dimension() {
        assert!(matches!(torus_triple(3, 4, 0.1), Err(Error::InvalidDimension(3))));
    }
}
