//! The integration theory as computable functionals: weights phi_s, the
//! square-integrable norms Q_n, the tracial P_n norms, the smooth seminorms
//! P_{n,l}, and spectral-dimension estimation from heat traces.

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::numkernel::ComplexMatrix;
use crate::psido::{delta_comm, DeltaKind, PsidoContext};

/// Weighted trace: plain matrix trace, or sum against a nonnegative diagonal.
fn weighted_trace(t: &ComplexMatrix, weight: Option<&[f64]>) -> Result<C64> {
    match weight {
        None => Ok(t.trace()),
        Some(w) => {
            if w.len() != t.rows() {
                return Err(Error::ShapeMismatch(format!(
                    "trace weight of length {} against a {} dim operator",
                    w.len(),
                    t.rows()
                )));
            }
            Ok(t.diagonal().iter().zip(w).map(|(x, &wi)| x * wi).sum())
        }
    }
}

/// phi_s(T) = tau((1+D^2)^{-s/4} T (1+D^2)^{-s/4}).
pub fn weight_phi_s(
    t: &ComplexMatrix,
    ctx: &PsidoContext,
    s: f64,
    trace_weight: Option<&[f64]>,
) -> Result<C64> {
    if t.rows() != ctx.dim() || t.cols() != ctx.dim() {
        return Err(Error::ShapeMismatch(format!(
            "operator {}x{} against dimension-{} context",
            t.rows(),
            t.cols(),
            ctx.dim()
        )));
    }
    let w = ctx.power(C64::new(-s / 2.0, 0.0))?; // (1+D^2)^{-s/4}
    let prod = w.mul(t)?.mul(&w)?;
    weighted_trace(&prod, trace_weight)
}

/// Q_n(T) = (||T||^2 + phi_{p+1/n}(T*T) + phi_{p+1/n}(T T*))^{1/2}.
pub fn q_norm(
    t: &ComplexMatrix,
    ctx: &PsidoContext,
    p: f64,
    n: usize,
    trace_weight: Option<&[f64]>,
) -> Result<f64> {
    let s = p + 1.0 / n as f64;
    let tt = t.adjoint().mul(t)?;
    let tts = t.mul(&t.adjoint())?;
    let a = weight_phi_s(&tt, ctx, s, trace_weight)?;
    let b = weight_phi_s(&tts, ctx, s, trace_weight)?;
    let op = t.spectral_norm();
    Ok((op * op + a.re + b.re).sqrt())
}

/// Tracial-case evaluation P_n(T) = ||T|| + 2 phi_{p+1/n}(|T|).
pub fn p_norm_tracial(
    t: &ComplexMatrix,
    ctx: &PsidoContext,
    p: f64,
    n: usize,
    trace_weight: Option<&[f64]>,
) -> Result<f64> {
    let s = p + 1.0 / n as f64;
    let tt = t.adjoint().mul(t)?.hermitized();
    let abs_t = crate::numkernel::eig_hermitian(&tt)?.apply(|x| x.max(0.0).sqrt())?;
    let phi = weight_phi_s(&abs_t, ctx, s, trace_weight)?;
    Ok(t.spectral_norm() + 2.0 * phi.re)
}

/// P_{n,l}(T) = sum_{j=0..l} P_n(delta^j(T)).
pub fn p_nl_seminorm(
    t: &ComplexMatrix,
    ctx: &PsidoContext,
    p: f64,
    n: usize,
    l: usize,
    trace_weight: Option<&[f64]>,
) -> Result<f64> {
    let mut cur = t.clone();
    let mut total = 0.0;
    for j in 0..=l {
        if j > 0 {
            cur = delta_comm(&cur, ctx, DeltaKind::Abs)?;
        }
        total += p_norm_tracial(&cur, ctx, p, n, trace_weight)?;
    }
    Ok(total)
}

/// Fitted leading power law of a heat trace.
#[derive(Clone, Debug)]
pub struct SpectralDimFit {
    pub p_hat: f64,
    pub residual: f64,
    pub coefficients: [f64; 2],
}

/// Least-squares exponent of theta(t) ~ c t^{-p/2} over log-spaced samples,
/// two-term fit theta ~ c0 t^{-p/2} + c1 t^{(1-p)/2}.
pub fn spectral_dimension_fit(samples: &[(f64, f64)]) -> Result<SpectralDimFit> {
    if samples.len() < 4 {
        return Err(Error::DegenerateWindow("need at least 4 samples".into()));
    }
    let tmin = samples.iter().map(|s| s.0).fold(f64::INFINITY, f64::min);
    let tmax = samples.iter().map(|s| s.0).fold(0.0, f64::max);
    let vmin = samples.iter().find(|s| s.0 == tmin).unwrap().1;
    let vmax = samples.iter().find(|s| s.0 == tmax).unwrap().1;
    if !(vmin > 0.0) || !(vmax > 0.0) || vmin / vmax < 1.2 {
        return Err(Error::DegenerateWindow(format!(
            "theta grows by factor {:.3} from t={tmax:.3e} down to t={tmin:.3e}",
            vmin / vmax
        )));
    }
    // golden-section search on the two-term linear LS residual
    let objective = |p: f64| -> (f64, [f64; 2]) {
        // basis t^{-p/2}, t^{(1-p)/2}; normal equations in 2x2 closed form
        let mut g = [[0.0f64; 2]; 2];
        let mut r = [0.0f64; 2];
        let mut yy = 0.0;
        for &(t, y) in samples {
            let b0 = t.powf(-p / 2.0);
            let b1 = t.powf((1.0 - p) / 2.0);
            g[0][0] += b0 * b0;
            g[0][1] += b0 * b1;
            g[1][1] += b1 * b1;
            r[0] += b0 * y;
            r[1] += b1 * y;
            yy += y * y;
        }
        g[1][0] = g[0][1];
        let det = g[0][0] * g[1][1] - g[0][1] * g[1][0];
        if det.abs() < 1e-300 {
            return (f64::INFINITY, [0.0, 0.0]);
        }
        let c0 = (r[0] * g[1][1] - r[1] * g[0][1]) / det;
        let c1 = (g[0][0] * r[1] - g[1][0] * r[0]) / det;
        let mut ss = 0.0;
        for &(t, y) in samples {
            let fit = c0 * t.powf(-p / 2.0) + c1 * t.powf((1.0 - p) / 2.0);
            ss += (y - fit) * (y - fit);
        }
        ((ss / yy).sqrt(), [c0, c1])
    };
    // single-term log-log prefit pins the leading exponent; the two-term
    // refinement stays inside a bracket around it (the two-term basis is
    // scale-ambiguous over a wide p range)
    let mut sx = 0.0;
    let mut sy = 0.0;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    let nn = samples.len() as f64;
    for &(t, y) in samples {
        let (lx, ly) = (t.ln(), y.max(1e-300).ln());
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    let slope = (nn * sxy - sx * sy) / (nn * sxx - sx * sx);
    let p0 = (-2.0 * slope).clamp(0.05, 8.0);
    let (mut lo, mut hi) = ((p0 - 0.45).max(0.05), (p0 + 0.45).min(8.0));
    let phi = (5.0f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - phi * (hi - lo);
    let mut x2 = lo + phi * (hi - lo);
    let mut f1 = objective(x1).0;
    let mut f2 = objective(x2).0;
    for _ in 0..200 {
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - phi * (hi - lo);
            f1 = objective(x1).0;
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + phi * (hi - lo);
            f2 = objective(x2).0;
        }
        if hi - lo < 1e-10 {
            break;
        }
    }
    let p_hat = 0.5 * (lo + hi);
    let (residual, coefficients) = objective(p_hat);
    Ok(SpectralDimFit { p_hat, residual, coefficients })
}

/// Default heat-trace window: 40 log-spaced points in [1e-3, 1e-1].
pub fn default_heat_window() -> Vec<f64> {
    log_spaced(1e-3, 1e-1, 40)
}

pub fn log_spaced(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| {
            let f = i as f64 / (n as f64 - 1.0);
            (lo.ln() + f * (hi.ln() - lo.ln())).exp()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::psido::PsidoContext;

    fn ctx_of_diag(d: &[f64]) -> PsidoContext {
        PsidoContext::new(&ComplexMatrix::from_real_diag(d)).unwrap()
    }

    fn random_matrix(n: usize, seed0: u64) -> ComplexMatrix {
        let mut seed = seed0;
        let mut rng = move || {
            seed = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((seed >> 11) as f64 / (1u64 << 53) as f64) - 0.5
        };
        ComplexMatrix::from_fn(n, n, |_, _| C64::new(rng(), rng()))
    }

    #[test]
    fn phi_scalar_cases() {
        let ctx = ctx_of_diag(&[0.0]);
        let one = ComplexMatrix::identity(1);
        for s in [0.5, 2.0, 7.0] {
            let v = weight_phi_s(&one, &ctx, s, None).unwrap();
            assert!((v - C64::new(1.0, 0.0)).norm() < 1e-14);
        }
        let ctx2 = ctx_of_diag(&[1.0, -1.0]);
        let v = weight_phi_s(&ComplexMatrix::identity(2), &ctx2, 2.0, None).unwrap();
        assert!((v - C64::new(1.0, 0.0)).norm() < 1e-12); // 2 * (1/2)
    }

    #[test]
    fn phi_cyclicity_on_positive_operators() {
        let ctx = ctx_of_diag(&[-2.0, -1.0, 0.0, 1.0, 2.0]);
        let x = random_matrix(5, 23);
        let t = x.adjoint().mul(&x).unwrap().hermitized(); // T >= 0
        let s = 1.7;
        let lhs = weight_phi_s(&t, &ctx, s, None).unwrap();
        // cyclic form: tau(sqrt(T) (1+D^2)^{-s/2} sqrt(T))
        let sq = crate::numkernel::eig_hermitian(&t).unwrap().apply(|v| v.max(0.0).sqrt()).unwrap();
        let mid = ctx.power(C64::new(-s, 0.0)).unwrap();
        let rhs = sq.mul(&mid).unwrap().mul(&sq).unwrap().trace();
        assert!((lhs - rhs).norm() < 1e-10 * rhs.norm().max(1.0));
        assert!(lhs.re >= 0.0 && lhs.im.abs() < 1e-12);
    }

    #[test]
    fn q_norm_scalar_case() {
        let ctx = ctx_of_diag(&[0.0]);
        let one = ComplexMatrix::identity(1);
        let v = q_norm(&one, &ctx, 1.0, 1, None).unwrap();
        assert!((v - 3.0f64.sqrt()).abs() < 1e-12);
        let zero = ComplexMatrix::zeros(1, 1);
        assert!(q_norm(&zero, &ctx, 1.0, 1, None).unwrap() < 1e-14);
    }

    #[test]
    fn q_norm_submultiplicative() {
        let ctx = ctx_of_diag(&[-3.0, -2.0, -1.0, 0.0, 1.0, 2.0, 3.0]);
        for k in 0..20u64 {
            let a = random_matrix(7, 100 + k);
            let b = random_matrix(7, 200 + k);
            let qa = q_norm(&a, &ctx, 1.0, 2, None).unwrap();
            let qb = q_norm(&b, &ctx, 1.0, 2, None).unwrap();
            let qab = q_norm(&a.mul(&b).unwrap(), &ctx, 1.0, 2, None).unwrap();
            assert!(qab <= qa * qb * (1.0 + 1e-12), "{qab} > {qa}*{qb}");
        }
    }

    #[test]
    fn p_norm_scalar_case() {
        let ctx = ctx_of_diag(&[0.0]);
        let one = ComplexMatrix::identity(1);
        let v = p_norm_tracial(&one, &ctx, 1.0, 1, None).unwrap();
        assert!((v - 3.0).abs() < 1e-12);
        assert!(p_norm_tracial(&ComplexMatrix::zeros(1, 1), &ctx, 1.0, 1, None).unwrap() < 1e-14);
    }

    #[test]
    fn p_equals_q_squared_on_positives() {
        let ctx = ctx_of_diag(&[-2.0, -1.0, 0.0, 1.0, 2.0]);
        for k in 0..10u64 {
            let x = random_matrix(5, 300 + k);
            let a = x.adjoint().mul(&x).unwrap().hermitized();
            let sq = crate::numkernel::eig_hermitian(&a).unwrap().apply(|v| v.max(0.0).sqrt()).unwrap();
            let p = p_norm_tracial(&a, &ctx, 1.0, 1, None).unwrap();
            let q = q_norm(&sq, &ctx, 1.0, 1, None).unwrap();
            assert!((p - q * q).abs() <= 1e-9 * p.max(1.0), "{p} vs {}", q * q);
        }
    }

    #[test]
    fn p_nl_reduces_and_shift_oracle() {
        // circle shift at N=8: P_{n,1} matches the direct sum over delta(u) entries
        let ks: Vec<f64> = (-8i64..=8).map(|k| k as f64).collect();
        let ctx = ctx_of_diag(&ks);
        let dim = ks.len();
        let mut u = ComplexMatrix::zeros(dim, dim);
        for i in 0..dim - 1 {
            u.set(i + 1, i, C64::new(1.0, 0.0));
        }
        let l0 = p_nl_seminorm(&u, &ctx, 1.0, 1, 0, None).unwrap();
        let p0 = p_norm_tracial(&u, &ctx, 1.0, 1, None).unwrap();
        assert!((l0 - p0).abs() < 1e-12);
        // commuting T: all higher seminorms equal P_n
        let f_of_d = ctx.eig.apply(|x| 1.0 / (1.0 + x * x)).unwrap();
        let a = p_nl_seminorm(&f_of_d, &ctx, 1.0, 1, 3, None).unwrap();
        let b = p_norm_tracial(&f_of_d, &ctx, 1.0, 1, None).unwrap();
        assert!((a - b).abs() < 1e-10);
        // delta(u) has entries (|k+1|-|k|) u_{k+1,k}: P_n(delta(u)) computed directly
        let du = delta_comm(&u, &ctx, DeltaKind::Abs).unwrap();
        let direct = p_norm_tracial(&du, &ctx, 1.0, 1, None).unwrap();
        let l1 = p_nl_seminorm(&u, &ctx, 1.0, 1, 1, None).unwrap();
        assert!((l1 - (p0 + direct)).abs() < 1e-10);
    }

    /// Random element of the cyclic model algebra (a circulant): normal, and
    /// the weights restrict tracially there, which is the premise of the
    /// tracial P_n formula.
    fn random_circulant(n: usize, seed0: u64) -> ComplexMatrix {
        let mut seed = seed0;
        let mut rng = move || {
            seed = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((seed >> 11) as f64 / (1u64 << 53) as f64) - 0.5
        };
        let coeffs: Vec<C64> = (0..n).map(|_| C64::new(rng(), rng())).collect();
        ComplexMatrix::from_fn(n, n, |i, j| coeffs[(i + n - j) % n])
    }

    #[test]
    fn monotonicity_and_star_invariance() {
        let ctx = ctx_of_diag(&[-2.0, -1.0, 0.0, 1.0, 2.0]);
        for k in 0..10u64 {
            let t = random_matrix(5, 400 + k);
            let q2 = q_norm(&t, &ctx, 1.0, 2, None).unwrap();
            let q5 = q_norm(&t, &ctx, 1.0, 5, None).unwrap();
            assert!(q2 <= q5 * (1.0 + 1e-12));
            let p2 = p_norm_tracial(&t, &ctx, 1.0, 2, None).unwrap();
            let p5 = p_norm_tracial(&t, &ctx, 1.0, 5, None).unwrap();
            assert!(p2 <= p5 * (1.0 + 1e-12));
            // *-invariance on model-algebra samples
            let a = random_circulant(5, 700 + k);
            let pa = p_norm_tracial(&a, &ctx, 1.0, 2, None).unwrap();
            let pas = p_norm_tracial(&a.adjoint(), &ctx, 1.0, 2, None).unwrap();
            assert!((pas - pa).abs() <= 1e-10 * pa.max(1.0), "{pas} vs {pa}");
        }
    }

    #[test]
    fn bimodule_bound() {
        let ctx = ctx_of_diag(&[-2.0, -1.0, 0.0, 1.0, 2.0]);
        let t = random_matrix(5, 55);
        let f = ctx.eig.apply(|x| (x * 1.3).cos()).unwrap();
        let p_tf = p_norm_tracial(&t.mul(&f).unwrap(), &ctx, 1.0, 2, None).unwrap();
        let p_t = p_norm_tracial(&t, &ctx, 1.0, 2, None).unwrap();
        let f_sup = ctx.eig.values.iter().map(|&x| (x * 1.3).cos().abs()).fold(0.0, f64::max);
        assert!(p_tf <= f_sup * p_t * (1.0 + 1e-10));
    }

    #[test]
    fn dimension_fit_circle_and_torus() {
        // Jacobi theta traces over the default window
        let theta1 = |t: f64| (-400i64..=400).map(|k| (-t * (k * k) as f64).exp()).sum::<f64>();
        let s1: Vec<(f64, f64)> = default_heat_window().iter().map(|&t| (t, theta1(t))).collect();
        let f1 = spectral_dimension_fit(&s1).unwrap();
        assert!((f1.p_hat - 1.0).abs() < 0.05, "p_hat = {}", f1.p_hat);

        let s2: Vec<(f64, f64)> = default_heat_window()
            .iter()
            .map(|&t| {
                let th = theta1(t);
                (t, th * th)
            })
            .collect();
        let f2 = spectral_dimension_fit(&s2).unwrap();
        assert!((f2.p_hat - 2.0).abs() < 0.05, "p_hat = {}", f2.p_hat);
    }

    #[test]
    fn dimension_fit_degenerate() {
        let samples: Vec<(f64, f64)> =
            default_heat_window().iter().map(|&t| (t, 2.0 * (-t).exp())).collect();
        assert!(matches!(spectral_dimension_fit(&samples), Err(Error::DegenerateWindow(_))));
    }
}
