use num_complex::Complex64 as C64;

use super::constants::residue_constants;
use super::fredholm::FredholmCount;
use crate::error::{Error, Result};
use crate::models::{double_triple, DiracRep, KClass, Parity, SpectralTriple};
use crate::numkernel::{eig_hermitian, svd, ComplexMatrix, HermEig};

/// Which realization of the Fredholm pairing to compute.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PairingMode {
    /// compression against the doubled phase F_mu
    Compression,
    /// Calderon-style filtered trace powers
    TracePower,
    /// chi_{[0,inf)}(D) compression (odd) or F_eps corner (even), no double
    NoDouble,
}

/// Numerical outcome of one index computation.
#[derive(Clone, Debug)]
pub struct MethodValue {
    pub value: C64,
    pub rounded: i64,
    pub gap: f64,
    pub diagnostics: String,
}

impl MethodValue {
    pub fn from_complex(value: C64, diagnostics: String) -> Self {
        let rounded = value.re.round() as i64;
        let gap = (value.re - rounded as f64).abs().max(value.im.abs());
        Self { value, rounded, gap, diagnostics }
    }

    pub fn from_int(value: i64, diagnostics: String) -> Self {
        Self { value: C64::new(value as f64, 0.0), rounded: value, gap: 0.0, diagnostics }
    }
}

/// Default kernel threshold for compressed phases.
const KERNEL_TOL: f64 = 1e-6;
const MASS_THRESHOLD: f64 = 0.5;

/// Index pairing of a class with the triple through the chosen mode.
pub fn pairing_index(
    triple: &SpectralTriple,
    class: &KClass,
    mu: f64,
    eps: f64,
    mode: PairingMode,
) -> Result<MethodValue> {
    if class.parity() != triple.parity {
        return Err(Error::ParityMismatch(format!(
            "{} class on {} model",
            class.name(),
            triple.name
        )));
    }
    match (triple.parity, mode) {
        (Parity::Odd, PairingMode::Compression) => odd_compression(triple, class, mu),
        (Parity::Odd, PairingMode::TracePower) => odd_trace_power(triple, class, mu),
        (Parity::Odd, PairingMode::NoDouble) => odd_no_double(triple, class),
        (Parity::Even, PairingMode::Compression) => even_corner(triple, class, mu * mu, "compression"),
        (Parity::Even, PairingMode::NoDouble) => even_corner(triple, class, eps, "no-double"),
        (Parity::Even, PairingMode::TracePower) => even_trace_power(triple, class, mu),
    }
}

/// hat(u) = diag(u, 1) on the doubled space.
fn hat_unitary(u: &ComplexMatrix) -> ComplexMatrix {
    let n = u.rows();
    ComplexMatrix::from_fn(2 * n, 2 * n, |i, j| {
        if i < n && j < n {
            u.get(i, j)
        } else if i == j {
            C64::new(1.0, 0.0)
        } else {
            C64::new(0.0, 0.0)
        }
    })
}

/// Orthonormal basis of the range of a numerical projection.
fn projection_range_basis(p: &ComplexMatrix) -> Result<ComplexMatrix> {
    let eig = eig_hermitian(&p.hermitized())?;
    let cols: Vec<usize> = (0..eig.dim()).filter(|&c| eig.values[c] > 0.5).collect();
    Ok(ComplexMatrix::from_fn(p.rows(), cols.len(), |i, c| eig.vectors.get(i, cols[c])))
}

/// Kernel/cokernel counts of T with boundary masses measured after lifting
/// singular vectors back to the ambient space.
fn count_filtered(
    t: &ComplexMatrix,
    lift_domain: Option<&ComplexMatrix>,
    lift_codomain: Option<&ComplexMatrix>,
    domain_positions: Option<&[usize]>,
    codomain_positions: Option<&[usize]>,
    band: &[usize],
    tol: f64,
) -> Result<FredholmCount> {
    let dec = svd(t, &[])?;
    let k = dec.singular_values.len();
    for &s in &dec.singular_values {
        if s >= tol && s < 10.0 * tol {
            return Err(Error::AmbiguousGap(format!(
                "singular value {s:.3e} within 10x of {tol:.1e}"
            )));
        }
    }
    let band_set: std::collections::HashSet<usize> = band.iter().copied().collect();
    let mass = |vecs: &ComplexMatrix,
                col: usize,
                lift: Option<&ComplexMatrix>,
                positions: Option<&[usize]>|
     -> f64 {
        match (lift, positions) {
            (Some(q), _) => {
                // w = Q v, mass over band indices
                let mut total = 0.0;
                let mut on_band = 0.0;
                for i in 0..q.rows() {
                    let mut acc = C64::new(0.0, 0.0);
                    for j in 0..q.cols() {
                        acc += q.get(i, j) * vecs.get(j, col);
                    }
                    let a = acc.norm_sqr();
                    total += a;
                    if band_set.contains(&i) {
                        on_band += a;
                    }
                }
                if total > 0.0 {
                    on_band / total
                } else {
                    0.0
                }
            }
            (None, Some(pos)) => {
                let mut on_band = 0.0;
                for r in 0..vecs.rows() {
                    if band_set.contains(&pos[r]) {
                        on_band += vecs.get(r, col).norm_sqr();
                    }
                }
                on_band
            }
            (None, None) => 0.0,
        }
    };
    let mut raw_kernel = t.cols().saturating_sub(k);
    let mut raw_cokernel = t.rows().saturating_sub(k);
    let mut kernel = raw_kernel;
    let mut cokernel = raw_cokernel;
    let mut smallest_kept = f64::INFINITY;
    for i in 0..k {
        let s = dec.singular_values[i];
        if s < tol {
            raw_kernel += 1;
            raw_cokernel += 1;
            if mass(&dec.v, i, lift_domain, domain_positions) < MASS_THRESHOLD {
                kernel += 1;
            }
            if mass(&dec.u, i, lift_codomain, codomain_positions) < MASS_THRESHOLD {
                cokernel += 1;
            }
        } else {
            smallest_kept = smallest_kept.min(s);
        }
    }
    Ok(FredholmCount { raw_kernel, raw_cokernel, kernel, cokernel, smallest_kept, tol })
}

fn odd_compression(triple: &SpectralTriple, class: &KClass, mu: f64) -> Result<MethodValue> {
    let u = match class {
        KClass::Unitary { mat, .. } => mat,
        _ => unreachable!("parity checked"),
    };
    let doubled = double_triple(triple, mu)?;
    let dm = doubled.dirac.dense();
    let eig = eig_hermitian(&dm)?;
    let f = eig.apply(|x| if x >= 0.0 { 1.0 } else { -1.0 })?;
    let p = f.add(&ComplexMatrix::identity(f.rows()))?.scale(C64::new(0.5, 0.0));
    let q = projection_range_basis(&p)?;
    let uh = hat_unitary(u);
    let t = q.adjoint().mul(&uh)?.mul(&q)?;
    let count = count_filtered(&t, Some(&q), Some(&q), None, None, &doubled.boundary_band, KERNEL_TOL)?;
    Ok(MethodValue::from_int(
        count.index(),
        format!(
            "compression: ker {} (raw {}), coker {} (raw {}), gap floor {:.2e}",
            count.kernel, count.raw_kernel, count.cokernel, count.raw_cokernel, count.smallest_kept
        ),
    ))
}

fn odd_no_double(triple: &SpectralTriple, class: &KClass) -> Result<MethodValue> {
    let u = match class {
        KClass::Unitary { mat, .. } => mat,
        _ => unreachable!(),
    };
    let d = triple.dirac.dense();
    let (_, p) = crate::models::phase_and_projection(&d, 0.0).or_else(|e| match e {
        // kernel modes belong to P by the sign(0) = 1 convention
        Error::SingularPhase(_) => {
            let eig = eig_hermitian(&d)?;
            Ok((
                ComplexMatrix::zeros(d.rows(), d.cols()),
                eig.apply(|x| if x >= 0.0 { 1.0 } else { 0.0 })?,
            ))
        }
        other => Err(other),
    })?;
    let q = projection_range_basis(&p)?;
    let t = q.adjoint().mul(u)?.mul(&q)?;
    let count =
        count_filtered(&t, Some(&q), Some(&q), None, None, &triple.boundary_band, KERNEL_TOL)?;
    Ok(MethodValue::from_int(
        count.index(),
        format!(
            "no-double: ker {} (raw {}), coker {} (raw {})",
            count.kernel, count.raw_kernel, count.cokernel, count.raw_cokernel
        ),
    ))
}

fn odd_trace_power(triple: &SpectralTriple, class: &KClass, mu: f64) -> Result<MethodValue> {
    let u = match class {
        KClass::Unitary { mat, .. } => mat,
        _ => unreachable!(),
    };
    let n_pow = residue_constants(triple.spectral_dim, triple.parity).trace_power_exponent();
    let doubled = double_triple(triple, mu)?;
    let dm = doubled.dirac.dense();
    let eig = eig_hermitian(&dm)?;
    let f = eig.apply(|x| if x >= 0.0 { 1.0 } else { -1.0 })?;
    let p = f.add(&ComplexMatrix::identity(f.rows()))?.scale(C64::new(0.5, 0.0));
    let uh = hat_unitary(u);
    let uhs = uh.adjoint();
    // X1 = P - P u* P u P ; X2 = P - P u P u* P
    let x1 = p.sub(&p.mul(&uhs)?.mul(&p)?.mul(&uh)?.mul(&p)?)?.hermitized();
    let x2 = p.sub(&p.mul(&uh)?.mul(&p)?.mul(&uhs)?.mul(&p)?)?.hermitized();
    let t1 = filtered_power_trace(&x1, &doubled.boundary_band, n_pow)?;
    let t2 = filtered_power_trace(&x2, &doubled.boundary_band, n_pow)?;
    let value = C64::new(t1.0 - t2.0, 0.0);
    Ok(MethodValue::from_complex(
        value,
        format!(
            "trace-power n={n_pow}: kept sums {:.6} / {:.6}, dropped {} + {} edge modes",
            t1.0, t2.0, t1.1, t2.1
        ),
    ))
}

/// Sum of eigenvalue powers over eigenmodes whose boundary mass stays below
/// the threshold; returns (sum, dropped count).
fn filtered_power_trace(x: &ComplexMatrix, band: &[usize], n_pow: usize) -> Result<(f64, usize)> {
    let eig = eig_hermitian(x)?;
    let band_set: std::collections::HashSet<usize> = band.iter().copied().collect();
    let mut acc = 0.0f64;
    let mut dropped = 0usize;
    for c in 0..eig.dim() {
        let mut on_band = 0.0;
        for i in 0..eig.dim() {
            if band_set.contains(&i) {
                on_band += eig.vectors.get(i, c).norm_sqr();
            }
        }
        if on_band < MASS_THRESHOLD {
            acc += eig.values[c].powi(n_pow as i32);
        } else {
            dropped += 1;
        }
    }
    Ok((acc, dropped))
}

/// Even pairing through the chiral corner: T = (F_+ restricted to the class
/// support), F = D (shift + D^2)^{-1/2}. With the doubled phase, classes with
/// vanishing scalar part see exactly this corner.
fn even_corner(
    triple: &SpectralTriple,
    class: &KClass,
    shift: f64,
    label: &str,
) -> Result<MethodValue> {
    if !(shift > 0.0) {
        return Err(Error::SingularPhase(format!("{label}: shift {shift} must be positive")));
    }
    let mask = match class {
        KClass::Projection { mask, .. } => mask,
        _ => unreachable!(),
    };
    let (t, s_plus, s_minus) = chiral_corner(triple, mask, shift)?;
    let count = count_filtered(
        &t,
        None,
        None,
        Some(&s_plus),
        Some(&s_minus),
        &triple.boundary_band,
        KERNEL_TOL,
    )?;
    Ok(MethodValue::from_int(
        count.index(),
        format!(
            "{label}: ker {} (raw {}), coker {} (raw {}), gap floor {:.2e}",
            count.kernel, count.raw_kernel, count.cokernel, count.raw_cokernel, count.smallest_kept
        ),
    ))
}

/// Build T = (B (shift + B*B)^{-1/2}) compressed to the class support, where
/// B is the chiral block of D. Returns (T, domain positions, codomain
/// positions) in ambient coordinates.
fn chiral_corner(
    triple: &SpectralTriple,
    mask: &[bool],
    shift: f64,
) -> Result<(ComplexMatrix, Vec<usize>, Vec<usize>)> {
    let (b, plus, minus) = match &triple.dirac {
        DiracRep::Chiral { b, plus, minus } => (b.clone(), plus.clone(), minus.clone()),
        DiracRep::Dense(d) => {
            // split by the grading
            let g = triple
                .grading
                .as_ref()
                .ok_or_else(|| Error::ParityMismatch("even pairing needs a grading".into()))?;
            let plus: Vec<usize> = (0..d.rows()).filter(|&i| g[i] > 0.0).collect();
            let minus: Vec<usize> = (0..d.rows()).filter(|&i| g[i] < 0.0).collect();
            (d.submatrix(&minus, &plus), plus, minus)
        }
    };
    // local class support
    let sel_plus: Vec<usize> = (0..plus.len()).filter(|&j| mask[plus[j]]).collect();
    let sel_minus: Vec<usize> = (0..minus.len()).filter(|&i| mask[minus[i]]).collect();
    // R_+ = (shift + B*B)^{-1/2}, columns restricted to the support
    let btb = b.gram_sparse().hermitized();
    let eig = eig_hermitian(&btb)?;
    let r_cols = apply_to_columns(&eig, |x| 1.0 / (shift + x.max(0.0)).sqrt(), &sel_plus);
    let f_cols = b.mul_sparse(&r_cols)?;
    let t = ComplexMatrix::from_fn(sel_minus.len(), sel_plus.len(), |i, j| {
        f_cols.get(sel_minus[i], j)
    });
    let dom: Vec<usize> = sel_plus.iter().map(|&j| plus[j]).collect();
    let cod: Vec<usize> = sel_minus.iter().map(|&i| minus[i]).collect();
    Ok((t, dom, cod))
}

/// Columns of V f(Lambda) V* at the requested indices; the eigenvector
/// matrix of a block-structured operator is itself block sparse, so the
/// sparsity-aware product pays off.
fn apply_to_columns(eig: &HermEig, f: impl Fn(f64) -> f64, cols: &[usize]) -> ComplexMatrix {
    let n = eig.dim();
    // W = f(Lambda) V* restricted to the requested columns
    let mut w = ComplexMatrix::zeros(n, cols.len());
    for r in 0..n {
        let fr = f(eig.values[r]);
        for (c, &col) in cols.iter().enumerate() {
            w.set(r, c, eig.vectors.get(col, r).conj() * fr);
        }
    }
    eig.vectors.mul_sparse(&w).unwrap()
}

fn even_trace_power(triple: &SpectralTriple, class: &KClass, mu: f64) -> Result<MethodValue> {
    let mask = match class {
        KClass::Projection { mask, .. } => mask,
        _ => unreachable!(),
    };
    let n_pow = residue_constants(triple.spectral_dim, triple.parity).trace_power_exponent();
    let (t, s_plus, s_minus) = chiral_corner(triple, mask, mu * mu)?;
    let id_p = ComplexMatrix::identity(t.cols());
    let id_m = ComplexMatrix::identity(t.rows());
    let x1 = id_p.sub(&t.adjoint().mul(&t)?)?.hermitized();
    let x2 = id_m.sub(&t.mul(&t.adjoint())?)?.hermitized();
    let band_set: std::collections::HashSet<usize> = triple.boundary_band.iter().copied().collect();
    let local_band = |positions: &[usize]| -> Vec<usize> {
        positions
            .iter()
            .enumerate()
            .filter(|(_, &p)| band_set.contains(&p))
            .map(|(i, _)| i)
            .collect()
    };
    let t1 = filtered_power_trace(&x1, &local_band(&s_plus), n_pow)?;
    let t2 = filtered_power_trace(&x2, &local_band(&s_minus), n_pow)?;
    Ok(MethodValue::from_complex(
        C64::new(t1.0 - t2.0, 0.0),
        format!("trace-power n={n_pow}: kept sums {:.6} / {:.6}", t1.0, t2.0),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{circle_triple, circle_unitary, moyal_projection_mask, moyal_triple, FourierPolynomial};

    fn circle_class(n: usize, w: i64) -> (SpectralTriple, KClass) {
        let t = circle_triple(n, &[FourierPolynomial::monomial("u", 1)]).unwrap();
        let u = circle_unitary(n, w).unwrap();
        (t, KClass::Unitary { name: format!("winding{w}"), mat: u, cyclic: None })
    }

    #[test]
    fn circle_windings_all_modes() {
        for w in [-2i64, -1, 1, 2] {
            let (t, class) = circle_class(16, w);
            for mode in [PairingMode::Compression, PairingMode::TracePower, PairingMode::NoDouble] {
                let v = pairing_index(&t, &class, 0.5, 1.0, mode).unwrap();
                assert_eq!(v.rounded, -w, "mode {mode:?} winding {w}: got {:?}", v);
                assert!(v.gap < 0.1, "gap {} for {mode:?} w={w}", v.gap);
            }
        }
    }

    #[test]
    fn circle_trivial_unitary() {
        let (t, _) = circle_class(8, 1);
        let class = KClass::Unitary { name: "1".into(), mat: ComplexMatrix::identity(t.dim()), cyclic: None };
        for mode in [PairingMode::Compression, PairingMode::TracePower, PairingMode::NoDouble] {
            let v = pairing_index(&t, &class, 0.5, 1.0, mode).unwrap();
            assert_eq!(v.rounded, 0, "{mode:?}");
        }
    }

    #[test]
    fn moyal_projection_small() {
        let t = moyal_triple(10, 2.0).unwrap();
        for modes in [vec![0usize], vec![0, 1]] {
            let mask = moyal_projection_mask(10, &modes);
            let class = KClass::Projection { name: format!("pJ{}", modes.len()), mask };
            let v = pairing_index(&t, &class, 0.5, 1.0, PairingMode::Compression).unwrap();
            assert_eq!(v.rounded, modes.len() as i64, "{}", v.diagnostics);
            let v2 = pairing_index(&t, &class, 0.5, 1.0, PairingMode::NoDouble).unwrap();
            assert_eq!(v2.rounded, modes.len() as i64);
            let v3 = pairing_index(&t, &class, 0.2, 1.0, PairingMode::TracePower).unwrap();
            assert_eq!(v3.rounded, modes.len() as i64, "{}", v3.diagnostics);
            assert!(v3.gap < 0.1, "trace-power gap {}", v3.gap);
        }
    }

    #[test]
    fn parity_mismatch_rejected() {
        let (t, _) = circle_class(8, 1);
        let class = KClass::Projection { name: "p".into(), mask: vec![false; t.dim()] };
        assert!(matches!(
            pairing_index(&t, &class, 0.5, 1.0, PairingMode::Compression),
            Err(Error::ParityMismatch(_))
        ));
    }
}
