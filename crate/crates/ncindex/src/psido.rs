//! Pseudodifferential operations as exact matrix maps: the derivations
//! delta, delta', the iterated D^2 commutators, the L/R maps, the one
//! parameter group sigma^z and the expansion constants.

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::numkernel::{eig_hermitian, ComplexMatrix, HermEig};

/// Cached spectral data for a fixed Dirac matrix.
pub struct PsidoContext {
    pub d: ComplexMatrix,
    pub eig: HermEig,
    pub abs_d: ComplexMatrix,
    pub sqrt1p: ComplexMatrix,
    pub inv_sqrt1p: ComplexMatrix,
    pub d_squared: ComplexMatrix,
}

impl PsidoContext {
    pub fn new(d: &ComplexMatrix) -> Result<Self> {
        let eig = eig_hermitian(d)?;
        let abs_d = eig.apply(f64::abs)?;
        let sqrt1p = eig.apply(|x| (1.0 + x * x).sqrt())?;
        let inv_sqrt1p = eig.apply(|x| 1.0 / (1.0 + x * x).sqrt())?;
        let d_squared = d.mul(d)?;
        Ok(Self { d: d.clone(), eig, abs_d, sqrt1p, inv_sqrt1p, d_squared })
    }

    pub fn dim(&self) -> usize {
        self.eig.dim()
    }

    /// (1 + D^2)^{z/2} by functional calculus.
    pub fn power(&self, z: C64) -> Result<ComplexMatrix> {
        self.eig.apply_complex(|x| C64::new(1.0 + x * x, 0.0).powc(z * 0.5))
    }

    fn check_shape(&self, t: &ComplexMatrix) -> Result<()> {
        if t.rows() != self.dim() || t.cols() != self.dim() {
            return Err(Error::ShapeMismatch(format!(
                "operator {}x{} against a dimension-{} context",
                t.rows(),
                t.cols(),
                self.dim()
            )));
        }
        Ok(())
    }
}

/// Which defining operator the derivation commutes against.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DeltaKind {
    /// delta(T) = [|D|, T]
    Abs,
    /// delta'(T) = [(1+D^2)^{1/2}, T]
    Sqrt1p,
}

pub fn delta_comm(t: &ComplexMatrix, ctx: &PsidoContext, kind: DeltaKind) -> Result<ComplexMatrix> {
    ctx.check_shape(t)?;
    match kind {
        DeltaKind::Abs => ctx.abs_d.commutator(t),
        DeltaKind::Sqrt1p => ctx.sqrt1p.commutator(t),
    }
}

/// T^{(n)}: the n-fold commutator with D^2, with T^{(0)} = T.
pub fn iterate_d2_comm(t: &ComplexMatrix, ctx: &PsidoContext, n: usize) -> Result<ComplexMatrix> {
    ctx.check_shape(t)?;
    let mut out = t.clone();
    for _ in 0..n {
        out = ctx.d_squared.commutator(&out)?;
    }
    Ok(out)
}

/// (L(T), R(T)) with L(T) = (1+D^2)^{-1/2}[D^2,T] and R(T) = [D^2,T](1+D^2)^{-1/2}.
pub fn lr_maps(t: &ComplexMatrix, ctx: &PsidoContext) -> Result<(ComplexMatrix, ComplexMatrix)> {
    ctx.check_shape(t)?;
    let c = ctx.d_squared.commutator(t)?;
    Ok((ctx.inv_sqrt1p.mul(&c)?, c.mul(&ctx.inv_sqrt1p)?))
}

/// sigma^z(T) = (1+D^2)^{z/2} T (1+D^2)^{-z/2}.
pub fn sigma_z(t: &ComplexMatrix, ctx: &PsidoContext, z: C64) -> Result<ComplexMatrix> {
    ctx.check_shape(t)?;
    let left = ctx.power(z)?;
    let right = ctx.power(-z)?;
    left.mul(t)?.mul(&right)
}

/// LD(T) = [log(1+D^2), T].
pub fn log_derivation(t: &ComplexMatrix, ctx: &PsidoContext) -> Result<ComplexMatrix> {
    ctx.check_shape(t)?;
    let lg = ctx.eig.apply(|x| (1.0 + x * x).ln())?;
    lg.commutator(t)
}

/// C_k(z) = z(z-1)...(z-k+1)/k!, the falling-factorial binomial.
pub fn taylor_ck(z: C64, k: usize) -> C64 {
    let mut num = C64::new(1.0, 0.0);
    let mut den = 1.0f64;
    for j in 0..k {
        num *= z - j as f64;
        den *= (j + 1) as f64;
    }
    num / den
}

/// Expansion constant C(k) = (|k|+m)! / (k_1!...k_m! (k_1+1)(k_1+k_2+2)...(|k|+m)).
pub fn expansion_ck(k: &[usize]) -> f64 {
    let m = k.len();
    let total: usize = k.iter().sum();
    let mut num = 1.0f64;
    for j in 1..=(total + m) {
        num *= j as f64;
    }
    let mut den = 1.0f64;
    for &ki in k {
        for j in 1..=ki {
            den *= j as f64;
        }
    }
    let mut run = 0usize;
    for (i, &ki) in k.iter().enumerate() {
        run += ki;
        den *= (run + i + 1) as f64;
    }
    num / den
}

fn multi_indices(m: usize, total: usize) -> Vec<Vec<usize>> {
    if m == 0 {
        return if total == 0 { vec![vec![]] } else { vec![] };
    }
    let mut out = Vec::new();
    for first in 0..=total {
        for mut rest in multi_indices(m - 1, total - first) {
            let mut v = vec![first];
            v.append(&mut rest);
            out.push(v);
        }
    }
    out
}

/// All multi-indices of length m with |k| <= max_total.
pub fn multi_indices_up_to(m: usize, max_total: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    for total in 0..=max_total {
        out.extend(multi_indices(m, total));
    }
    out
}

/// Spectral norm of the order-M expansion remainder
/// R A_1 R ... A_m R - sum_{|k|<=M} C(k) A_1^{(k_1)}...A_m^{(k_m)} R^{m+|k|+1}
/// with R = (lambda - (1+D^2))^{-1}.
pub fn expansion_check(
    ctx: &PsidoContext,
    a_list: &[ComplexMatrix],
    lambda: C64,
    order: usize,
) -> Result<f64> {
    let m = a_list.len();
    assert!(m >= 1, "expansion_check needs at least one operator");
    for a in a_list {
        ctx.check_shape(a)?;
    }
    let min_dist = ctx
        .eig
        .values
        .iter()
        .map(|&x| (lambda - C64::new(1.0 + x * x, 0.0)).norm())
        .fold(f64::INFINITY, f64::min);
    if min_dist < 1e-10 {
        return Err(Error::SingularResolvent(format!("lambda = {lambda} touches spec(1+D^2)")));
    }
    let resolvent = ctx.eig.apply_complex(|x| 1.0 / (lambda - (1.0 + x * x)))?;

    // exact product R A_1 R ... A_m R
    let mut exact = resolvent.clone();
    for a in a_list {
        exact = exact.mul(a)?.mul(&resolvent)?;
    }

    // expansion
    let mut approx = ComplexMatrix::zeros(ctx.dim(), ctx.dim());
    for k in multi_indices_up_to(m, order) {
        let total: usize = k.iter().sum();
        let mut term = ComplexMatrix::identity(ctx.dim());
        for (a, &ki) in a_list.iter().zip(&k) {
            term = term.mul(&iterate_d2_comm(a, ctx, ki)?)?;
        }
        let mut rp = ComplexMatrix::identity(ctx.dim());
        for _ in 0..(m + total + 1) {
            rp = rp.mul(&resolvent)?;
        }
        approx = approx.add(&term.mul(&rp)?.scale(C64::new(expansion_ck(&k), 0.0)))?;
    }
    Ok(exact.sub(&approx)?.spectral_norm())
}
