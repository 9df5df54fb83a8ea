use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::numkernel::ln_gamma_real;

/// Analytic radial profile of the flat plane: evaluates traces of the form
/// Tr( L^theta(f) (x) Id_2  g(1 + D^2) ) through the closed radial integral
///
///   spinor_dim * (2 pi)^{-2} * (integral of f) * (integral of g(1+|xi|^2)).
///
/// The f-side enters only through its plane integral; on the matrix-unit
/// basis that is 2 pi theta delta_{m,n}.
#[derive(Clone, Debug)]
pub struct RadialProfile {
    pub theta: f64,
    pub spinor_dim: f64,
}

/// Plane profile for the Moyal model at deformation theta.
pub fn plane_radial_profile(theta: f64) -> Result<RadialProfile> {
    if !(theta > 0.0) {
        return Err(Error::InvalidTheta(theta));
    }
    Ok(RadialProfile { theta, spinor_dim: 2.0 })
}

impl RadialProfile {
    /// integral of f_{m,n} over the plane.
    pub fn basis_integral(&self, m: usize, n: usize) -> f64 {
        if m == n {
            2.0 * PI * self.theta
        } else {
            0.0
        }
    }

    /// Tr( L^theta(f) (x) Id_2 (1+D^2)^{-s/2} ) for a symbol with the given
    /// plane integral: spinor * (2pi)^{-2} * int_f * 2 pi/(s-2).
    pub fn power_trace(&self, f_integral: f64, s: f64) -> Result<f64> {
        if s <= 2.0 {
            return Err(Error::PoleError(format!("plane power trace diverges at s = {s}")));
        }
        Ok(self.spinor_dim * f_integral / (4.0 * PI * PI) * 2.0 * PI / (s - 2.0))
    }
}

/// integral over [0, inf) of r (1+r^2)^{-w} dr = 1/(2(w-1)) by adaptive
/// Gauss-Legendre quadrature (compactified by r = x/(1-x)).
pub fn radial_power_integral(w: f64, tol: f64) -> Result<f64> {
    if w <= 1.0 {
        return Err(Error::PoleError(format!("radial integral diverges at w = {w}")));
    }
    let f = |r: f64| r * (1.0 + r * r).powf(-w);
    // substitute r = x/(1-x), dr = dx/(1-x)^2, x in [0,1)
    let g = |x: f64| {
        let om = 1.0 - x;
        f(x / om) / (om * om)
    };
    let mut prev = gauss_legendre_01(&g, 32);
    let mut n = 64;
    while n <= 4096 {
        let cur = gauss_legendre_01(&g, n);
        if (cur - prev).abs() <= tol * cur.abs().max(1.0) {
            return Ok(cur);
        }
        prev = cur;
        n *= 2;
    }
    Err(Error::NonConvergence("radial quadrature".into()))
}

/// Fibre-trace integral of the Bott projector's degree-two density:
/// integral over R^2 of -4/(1+|x|^2)^2 dx = -4 pi, computed by quadrature.
pub fn bott_fibre_integral(tol: f64) -> Result<f64> {
    let radial = radial_power_integral(2.0, tol)?; // = 1/2
    Ok(-4.0 * 2.0 * PI * radial)
}

/// Nodes/weights for Gauss-Legendre on [0,1].
pub(crate) fn gauss_legendre_01(f: &impl Fn(f64) -> f64, n: usize) -> f64 {
    let (xs, ws) = gl_rule(n);
    xs.iter().zip(ws.iter()).map(|(&x, &w)| w * f(0.5 * (x + 1.0)) * 0.5).sum()
}

/// Gauss-Legendre nodes and weights on [-1,1] by Newton iteration on the
/// Legendre polynomial.
pub fn gl_rule(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut xs = vec![0.0; n];
    let mut ws = vec![0.0; n];
    for i in 0..n {
        // initial guess (Chebyshev-like)
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        for _ in 0..100 {
            let (p, dp) = legendre_and_derivative(n, x);
            let dx = p / dp;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        let (_, dp) = legendre_and_derivative(n, x);
        xs[i] = x;
        ws[i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    (xs, ws)
}

fn legendre_and_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

/// Stable Beta(a, b) = Gamma(a)Gamma(b)/Gamma(a+b) for positive arguments.
pub fn beta_real(a: f64, b: f64) -> f64 {
    (ln_gamma_real(a) + ln_gamma_real(b) - ln_gamma_real(a + b)).exp()
}
