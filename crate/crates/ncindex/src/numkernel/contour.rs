use num_complex::Complex64 as C64;
use std::f64::consts::PI;

use crate::error::{Error, Result};

const MAX_NODES: usize = 1 << 14;

/// res_{z=z0} (z-z0)^l f(z) by trapezoid quadrature on the circle
/// |z - z0| = radius, doubling the node count until two successive values
/// agree to 1e-10.
///
/// `f` must be analytic on the circle and meromorphic inside with its only
/// singularity at z0.
pub fn laurent_residue(
    f: impl Fn(C64) -> Result<C64>,
    z0: C64,
    radius: f64,
    l: i32,
) -> Result<C64> {
    let eval = |n: usize| -> Result<C64> {
        let mut acc = C64::new(0.0, 0.0);
        for k in 0..n {
            let phi = 2.0 * PI * (k as f64) / (n as f64);
            let w = C64::new(0.0, phi).exp() * radius;
            let z = z0 + w;
            // (1/2pi i) * f(z) (z-z0)^l dz  with dz = i w dphi
            acc += f(z)? * w.powi(l + 1);
        }
        Ok(acc / n as f64)
    };
    let mut n = 16usize;
    let mut prev = eval(n)?;
    while n < MAX_NODES {
        n *= 2;
        let cur = eval(n)?;
        if (cur - prev).norm() <= 1e-10 * cur.norm().max(1.0) {
            return Ok(cur);
        }
        prev = cur;
    }
    Err(Error::NonConvergence(format!(
        "residue quadrature did not stabilize at {MAX_NODES} nodes"
    )))
}
