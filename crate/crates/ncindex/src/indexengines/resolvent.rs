use num_complex::Complex64 as C64;
use std::f64::consts::PI;

use super::constants::residue_constants;
use crate::error::{Error, Result};
use crate::models::{double_triple, gl_rule, SpectralTriple};
use crate::numkernel::{eig_hermitian, ComplexMatrix};

/// Spectral data of an invertible Dirac operator prepared for resolvent
/// expectations: everything is rotated into the eigenbasis once.
pub struct ResolventEngine {
    /// eigenvalues squared of D
    pub d2: Vec<f64>,
    basis: ComplexMatrix,
    gamma: ComplexMatrix,
    pub p: f64,
    pub mu: f64,
    pub abscissa: f64,
}

impl ResolventEngine {
    /// Build from a triple by doubling with mass mu (the resolvent cocycle is
    /// implemented on the invertible double only).
    pub fn from_triple(triple: &SpectralTriple, mu: f64, abscissa: Option<f64>) -> Result<Self> {
        let doubled = double_triple(triple, mu)?;
        let d = doubled.dirac.dense();
        let eig = eig_hermitian(&d)?;
        let a = abscissa.unwrap_or(mu * mu / 4.0);
        if !(a > 0.0 && a < mu * mu / 2.0) {
            return Err(Error::ContourViolation(format!(
                "abscissa {a} outside (0, {})",
                mu * mu / 2.0
            )));
        }
        let n = eig.dim();
        let gamma_h = match &doubled.grading {
            Some(g) => ComplexMatrix::from_fn(n, n, |i, j| {
                if i == j {
                    C64::new(g[i], 0.0)
                } else {
                    C64::new(0.0, 0.0)
                }
            }),
            None => ComplexMatrix::identity(n),
        };
        let gamma = eig.vectors.adjoint().mul(&gamma_h)?.mul(&eig.vectors)?;
        Ok(Self {
            d2: eig.values.iter().map(|&x| x * x).collect(),
            basis: eig.vectors,
            gamma,
            p: triple.spectral_dim,
            mu,
            abscissa: a,
        })
    }

    /// Rotate an ambient operator into the eigenbasis.
    pub fn transform(&self, a: &ComplexMatrix) -> Result<ComplexMatrix> {
        self.basis.adjoint().mul(a)?.mul(&self.basis)
    }

    /// hat(a) = diag(a, 0) rotated into the eigenbasis.
    pub fn transform_hat(&self, a: &ComplexMatrix) -> Result<ComplexMatrix> {
        let n = a.rows();
        let hat = ComplexMatrix::from_fn(2 * n, 2 * n, |i, j| {
            if i < n && j < n {
                a.get(i, j)
            } else {
                C64::new(0.0, 0.0)
            }
        });
        self.transform(&hat)
    }

    /// [D_mu, hat(a)] rotated into the eigenbasis.
    pub fn transform_hat_commutator(
        &self,
        triple_d: &ComplexMatrix,
        a: &ComplexMatrix,
        mu: f64,
    ) -> Result<ComplexMatrix> {
        let n = a.rows();
        let da = triple_d.commutator(a)?;
        // [D_mu, hat a] = [[ [D,a], -mu a],[mu a, 0]]
        let hat = ComplexMatrix::from_fn(2 * n, 2 * n, |i, j| {
            if i < n && j < n {
                da.get(i, j)
            } else if i < n && j >= n {
                -a.get(i, j - n) * mu
            } else if i >= n && j < n {
                a.get(i - n, j) * mu
            } else {
                C64::new(0.0, 0.0)
            }
        });
        self.transform(&hat)
    }

    fn dim(&self) -> usize {
        self.d2.len()
    }
}

/// <A_0,...,A_m>_{m,r,s,t}: expectation through the vertical-line contour,
/// numerically. Operators are given in the eigenbasis.
///
/// The line is traversed with the spectrum enclosed positively, so the
/// scalar m = 0 case returns x^{-p/2-r}.
pub fn resolvent_expectation_quad(
    eng: &ResolventEngine,
    mats: &[ComplexMatrix],
    r: f64,
    s: f64,
    t: f64,
) -> Result<C64> {
    let z = C64::new(eng.p / 2.0 + r, 0.0);
    let x: Vec<f64> = eng.d2.iter().map(|&d| t + s * s + d).collect();
    let xmin = x.iter().cloned().fold(f64::INFINITY, f64::min);
    if eng.abscissa >= xmin {
        return Err(Error::ContourViolation(format!(
            "abscissa {} not below spec floor {xmin}",
            eng.abscissa
        )));
    }
    let m = mats.len() - 1;
    // M0 = gamma A_0
    let m0 = eng.gamma.mul(&mats[0])?;

    let trace_at = |lam: C64| -> C64 {
        let dvec: Vec<C64> = x.iter().map(|&xi| 1.0 / (lam - xi)).collect();
        if m == 0 {
            let mut acc = C64::new(0.0, 0.0);
            for i in 0..eng.dim() {
                acc += m0.get(i, i) * dvec[i];
            }
            acc
        } else if m == 1 {
            let mut acc = C64::new(0.0, 0.0);
            for i in 0..eng.dim() {
                for j in 0..eng.dim() {
                    let pij = m0.get(i, j) * mats[1].get(j, i);
                    if pij.norm() != 0.0 {
                        acc += pij * dvec[j] * dvec[i];
                    }
                }
            }
            acc
        } else {
            // generic product M0 d M1 d ... Mm d, trace
            let n = eng.dim();
            let mut cur = ComplexMatrix::from_fn(n, n, |i, j| m0.get(i, j) * dvec[j]);
            for mk in &mats[1..] {
                let scaled = ComplexMatrix::from_fn(n, n, |i, j| mk.get(i, j) * dvec[j]);
                cur = cur.mul(&scaled).unwrap();
            }
            cur.trace()
        }
    };

    // composite Gauss-Legendre on geometric panels, V doubled until stable;
    // the branch factor lambda^{-z} varies on the scale of the abscissa, so
    // panels start there
    let (gx, gw) = gl_rule(20);
    let a = eng.abscissa;
    let scale = xmin.sqrt().max(1.0);
    let integral_to = |v_max: f64| -> C64 {
        let mut acc = C64::new(0.0, 0.0);
        let mut lo = 0.0f64;
        let mut hi = a.min(scale);
        while lo < v_max {
            let top = hi.min(v_max);
            for (&gxi, &gwi) in gx.iter().zip(gw.iter()) {
                let v = 0.5 * (gxi + 1.0) * (top - lo) + lo;
                let w = 0.5 * (top - lo) * gwi;
                for sign in [1.0f64, -1.0] {
                    let lam = C64::new(a, sign * v);
                    acc += w * lam.powc(-z) * trace_at(lam);
                }
            }
            lo = top;
            hi *= 2.0;
        }
        acc
    };
    let mut v = 64.0 * scale;
    let mut prev = integral_to(v);
    for _ in 0..14 {
        v *= 2.0;
        let cur = integral_to(v);
        if (cur - prev).norm() <= 1e-8 * cur.norm().max(1.0) {
            // downward orientation: -(1/2pi) * integral dv
            return Ok(-cur / (2.0 * PI));
        }
        prev = cur;
    }
    Err(Error::NonConvergence("vertical-line quadrature did not stabilize".into()))
}

/// Exact evaluation through the eigenbasis: the Cauchy integral of
/// lambda^{-p/2-r} against the resolvent product is the divided difference
/// of x -> x^{-p/2-r} on the pole tuple.
pub fn resolvent_expectation_spectral(
    eng: &ResolventEngine,
    mats: &[ComplexMatrix],
    r: f64,
    s: f64,
    t: f64,
) -> Result<C64> {
    let z = eng.p / 2.0 + r;
    let x: Vec<f64> = eng.d2.iter().map(|&d| t + s * s + d).collect();
    let f = PowerNodes { w: -z, coef: 1.0 };
    contract_divided_differences(eng, mats, &x, &f)
}

/// integral_0^inf s^alpha <A_0,...,A_m> ds in closed form: the s-integral of
/// (t + s^2 + c)^{-z} is (1/2) B((alpha+1)/2, z-(alpha+1)/2) (t+c)^{(alpha+1)/2-z}.
pub fn s_integrated_expectation_spectral(
    eng: &ResolventEngine,
    mats: &[ComplexMatrix],
    r: f64,
    alpha: f64,
    t: f64,
) -> Result<C64> {
    let z = eng.p / 2.0 + r;
    let ah = (alpha + 1.0) / 2.0;
    if !(z > ah) {
        return Err(Error::ContourViolation(format!(
            "s-integral needs p/2 + r > {ah}, got {z}"
        )));
    }
    let coef = 0.5 * crate::models::plane::beta_real(ah, z - ah);
    let x: Vec<f64> = eng.d2.iter().map(|&d| t + d).collect();
    let f = PowerNodes { w: ah - z, coef };
    contract_divided_differences(eng, mats, &x, &f)
}

/// coef * x^w and its derivatives.
struct PowerNodes {
    w: f64,
    coef: f64,
}

impl PowerNodes {
    fn value(&self, x: f64) -> f64 {
        self.coef * x.powf(self.w)
    }
    fn deriv(&self, k: usize, x: f64) -> f64 {
        let mut c = self.coef;
        for i in 0..k {
            c *= self.w - i as f64;
        }
        c * x.powf(self.w - k as f64)
    }
}

/// trace( gamma A_0 R A_1 R ... A_m R )-type contraction with divided
/// differences of f over the pole nodes.
fn contract_divided_differences(
    eng: &ResolventEngine,
    mats: &[ComplexMatrix],
    x: &[f64],
    f: &PowerNodes,
) -> Result<C64> {
    let n = eng.dim();
    let m = mats.len() - 1;
    let m0 = eng.gamma.mul(&mats[0])?;
    let mut total = C64::new(0.0, 0.0);
    match m {
        0 => {
            for i in 0..n {
                total += m0.get(i, i) * f.value(x[i]);
            }
        }
        1 => {
            for i in 0..n {
                for j in 0..n {
                    let w = m0.get(i, j) * mats[1].get(j, i);
                    if w.norm() != 0.0 {
                        total += w * dd2(f, x[j], x[i]);
                    }
                }
            }
        }
        2 => {
            // precompute pair products to skip zero rows
            for i in 0..n {
                for j in 0..n {
                    let a = m0.get(i, j);
                    if a.norm() == 0.0 {
                        continue;
                    }
                    for k in 0..n {
                        let w = a * mats[1].get(j, k) * mats[2].get(k, i);
                        if w.norm() != 0.0 {
                            total += w * dd3(f, x[j], x[k], x[i]);
                        }
                    }
                }
            }
        }
        _ => {
            return Err(Error::ShapeMismatch(format!(
                "spectral contraction implemented for m <= 2, got {m}"
            )))
        }
    }
    Ok(total)
}

const NODE_TIE: f64 = 1e-9;

fn dd2(f: &PowerNodes, a: f64, b: f64) -> f64 {
    if (a - b).abs() <= NODE_TIE * (1.0 + a.abs()) {
        f.deriv(1, 0.5 * (a + b))
    } else {
        (f.value(a) - f.value(b)) / (a - b)
    }
}

fn dd3(f: &PowerNodes, a: f64, b: f64, c: f64) -> f64 {
    // sort so equal nodes are adjacent
    let mut v = [a, b, c];
    v.sort_by(|x, y| x.partial_cmp(y).unwrap());
    let [a, b, c] = v;
    let left = dd2(f, a, b);
    let right = dd2(f, b, c);
    if (c - a).abs() <= NODE_TIE * (1.0 + a.abs()) {
        f.deriv(2, b) / 2.0
    } else {
        (right - left) / (c - a)
    }
}

/// eta_m * integral_0^inf s^m <a_0, da_1, ..., da_m> ds by adaptive
/// quadrature in s over the contour expectations (t = 1).
pub fn resolvent_cocycle_quad(
    eng: &ResolventEngine,
    mats: &[ComplexMatrix],
    triple: &SpectralTriple,
    m: usize,
    r: f64,
) -> Result<C64> {
    if !(r > (1.0 - m as f64) / 2.0) {
        return Err(Error::ContourViolation(format!(
            "resolvent cocycle needs Re(r) > {}, got {r}",
            (1.0 - m as f64) / 2.0
        )));
    }
    let consts = residue_constants(triple.spectral_dim, triple.parity);
    let eta = consts.eta(m);
    let (gx, gw) = gl_rule(24);
    let integrand = |s: f64| -> Result<C64> {
        Ok(resolvent_expectation_quad(eng, mats, r, s, 1.0)? * s.powi(m as i32))
    };
    let mut acc = C64::new(0.0, 0.0);
    let mut lo = 0.0f64;
    let mut hi = 1.0f64;
    let mut prev_panel = f64::INFINITY;
    loop {
        let mut panel = C64::new(0.0, 0.0);
        for (&gxi, &gwi) in gx.iter().zip(gw.iter()) {
            let s = 0.5 * (gxi + 1.0) * (hi - lo) + lo;
            panel += 0.5 * (hi - lo) * gwi * integrand(s)?;
        }
        acc += panel;
        let pn = panel.norm();
        if hi > 4.0 && pn < 1e-9 * acc.norm().max(1.0) {
            break;
        }
        // octave sums of a power-law tail shrink geometrically; once the
        // ratio is stable the remainder is extrapolated
        let ratio = pn / prev_panel;
        if hi > 16.0 && pn < 1e-5 * acc.norm().max(1.0) && ratio < 0.6 {
            acc += panel * (ratio / (1.0 - ratio));
            break;
        }
        if hi > 8192.0 {
            return Err(Error::NonConvergence("s-integral tail did not decay".into()));
        }
        prev_panel = pn;
        lo = hi;
        hi *= 2.0;
    }
    Ok(eta * acc)
}

/// Exact (eigenbasis) evaluation of the same cocycle component.
pub fn resolvent_cocycle_spectral(
    eng: &ResolventEngine,
    mats: &[ComplexMatrix],
    triple: &SpectralTriple,
    m: usize,
    r: f64,
) -> Result<C64> {
    let consts = residue_constants(triple.spectral_dim, triple.parity);
    let eta = consts.eta(m);
    Ok(eta * s_integrated_expectation_spectral(eng, mats, r, m as f64, 1.0)?)
}

/// Both sides of the s-trick identity
/// alpha int s^{alpha-1} <A_0..A_m> ds = -2 sum_l int s^{alpha+1} <.., 1, ..> ds
/// evaluated spectrally; returns (lhs, rhs).
pub fn s_trick_identity_spectral(
    eng: &ResolventEngine,
    mats: &[ComplexMatrix],
    r: f64,
    alpha: f64,
) -> Result<(C64, C64)> {
    let lhs = s_integrated_expectation_spectral(eng, mats, r, alpha - 1.0, 1.0)? * alpha;
    let n = eng.dim();
    let id = ComplexMatrix::identity(n);
    let mut rhs = C64::new(0.0, 0.0);
    for l in 0..mats.len() {
        let mut with_id: Vec<ComplexMatrix> = Vec::with_capacity(mats.len() + 1);
        with_id.extend_from_slice(&mats[..=l]);
        with_id.push(id.clone());
        with_id.extend_from_slice(&mats[l + 1..]);
        rhs += s_integrated_expectation_spectral(eng, &with_id, r, alpha + 1.0, 1.0)?;
    }
    Ok((lhs, rhs * -2.0))
}

/// Quadrature version of the s-trick check at alpha = m.
pub fn s_trick_identity_quad(
    eng: &ResolventEngine,
    mats: &[ComplexMatrix],
    r: f64,
    alpha: f64,
) -> Result<(C64, C64)> {
    let (gx, gw) = gl_rule(24);
    let integrate = |mats: &[ComplexMatrix], power: f64| -> Result<C64> {
        let mut acc = C64::new(0.0, 0.0);
        let mut lo = 0.0f64;
        let mut hi = 1.0f64;
        let mut prev_panel = f64::INFINITY;
        loop {
            let mut panel = C64::new(0.0, 0.0);
            for (&gxi, &gwi) in gx.iter().zip(gw.iter()) {
                let s = 0.5 * (gxi + 1.0) * (hi - lo) + lo;
                panel +=
                    0.5 * (hi - lo) * gwi * resolvent_expectation_quad(eng, mats, r, s, 1.0)?
                        * s.powf(power);
            }
            acc += panel;
            let pn = panel.norm();
            if hi > 4.0 && pn < 1e-8 * acc.norm().max(1.0) {
                return Ok(acc);
            }
            let ratio = pn / prev_panel;
            if hi > 16.0 && pn < 1e-5 * acc.norm().max(1.0) && ratio < 0.6 {
                return Ok(acc + panel * (ratio / (1.0 - ratio)));
            }
            if hi > 8192.0 {
                return Err(Error::NonConvergence("s-trick tail".into()));
            }
            prev_panel = pn;
            lo = hi;
            hi *= 2.0;
        }
    };
    let lhs = integrate(mats, alpha - 1.0)? * alpha;
    let n = eng.dim();
    let id = ComplexMatrix::identity(n);
    let mut rhs = C64::new(0.0, 0.0);
    for l in 0..mats.len() {
        let mut with_id: Vec<ComplexMatrix> = Vec::with_capacity(mats.len() + 1);
        with_id.extend_from_slice(&mats[..=l]);
        with_id.push(id.clone());
        with_id.extend_from_slice(&mats[l + 1..]);
        rhs += integrate(&with_id, alpha + 1.0)?;
    }
    Ok((lhs, rhs * -2.0))
}

/// Gamma-function closed form of the scalar m = 0 expectation after the
/// s-integral, for oracle tests: eta_0 int_0^inf (t + s^2 + d^2)^{-z} ds.
pub fn scalar_phi0_closed_form(p: f64, r: f64, d2: f64, t: f64) -> C64 {
    let z = p / 2.0 + r;
    let coef = 0.5 * crate::models::plane::beta_real(0.5, z - 0.5);
    C64::new(2.0 * coef * (t + d2).powf(0.5 - z), 0.0)
}
