//! The (b,B)-bicomplex operators, the conditional trace, and the Chern
//! characters.
//!
//! Algebra elements over the unitization are carried as (matrix, scalar)
//! pairs meaning a + c*1; Connes' B inserts the unit through the scalar
//! channel.

use num_complex::Complex64 as C64;
use std::rc::Rc;

use crate::error::{Error, Result};
use crate::numkernel::{gamma_complex, ComplexMatrix};

/// An algebra element a + c*1 over the unitization.
#[derive(Clone, Debug)]
pub struct UnitizedElement {
    pub mat: ComplexMatrix,
    pub scalar: C64,
}

impl UnitizedElement {
    pub fn plain(mat: ComplexMatrix) -> Self {
        Self { mat, scalar: C64::new(0.0, 0.0) }
    }

    pub fn unit(dim: usize) -> Self {
        Self { mat: ComplexMatrix::zeros(dim, dim), scalar: C64::new(1.0, 0.0) }
    }

    pub fn with_scalar(mat: ComplexMatrix, scalar: C64) -> Self {
        Self { mat, scalar }
    }

    pub fn dim(&self) -> usize {
        self.mat.rows()
    }

    /// The concrete operator a + c*Id.
    pub fn realize(&self) -> ComplexMatrix {
        let id = ComplexMatrix::identity(self.dim()).scale(self.scalar);
        self.mat.add(&id).unwrap()
    }

    pub fn multiply(&self, other: &Self) -> Result<Self> {
        let mat = self
            .mat
            .mul(&other.mat)?
            .add(&other.mat.scale(self.scalar))?
            .add(&self.mat.scale(other.scalar))?;
        Ok(Self { mat, scalar: self.scalar * other.scalar })
    }
}

/// Arity-m multilinear functional on (m+1)-tuples over the unitization.
#[derive(Clone)]
pub struct Cochain {
    pub arity: usize,
    eval: Rc<dyn Fn(&[UnitizedElement]) -> Result<C64>>,
}

impl Cochain {
    pub fn new(arity: usize, eval: impl Fn(&[UnitizedElement]) -> Result<C64> + 'static) -> Self {
        Self { arity, eval: Rc::new(eval) }
    }

    pub fn eval(&self, args: &[UnitizedElement]) -> Result<C64> {
        if args.len() != self.arity + 1 {
            return Err(Error::ShapeMismatch(format!(
                "cochain of arity {} applied to {} entries",
                self.arity,
                args.len()
            )));
        }
        (self.eval)(args)
    }
}

/// Hochschild coboundary: (b phi)(a_0,...,a_{m+1}) =
/// sum_k (-1)^k phi(..., a_k a_{k+1}, ...) + (-1)^{m+1} phi(a_{m+1} a_0, ...).
pub fn hochschild_b(phi: &Cochain) -> Cochain {
    let m = phi.arity;
    let inner = phi.clone();
    Cochain::new(m + 1, move |args| {
        let mut acc = C64::new(0.0, 0.0);
        for k in 0..=m {
            let mut tup = Vec::with_capacity(m + 1);
            tup.extend_from_slice(&args[..k]);
            tup.push(args[k].multiply(&args[k + 1])?);
            tup.extend_from_slice(&args[k + 2..]);
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            acc += sign * inner.eval(&tup)?;
        }
        let mut wrap = Vec::with_capacity(m + 1);
        wrap.push(args[m + 1].multiply(&args[0])?);
        wrap.extend_from_slice(&args[1..=m]);
        let sign = if (m + 1) % 2 == 0 { 1.0 } else { -1.0 };
        acc += sign * inner.eval(&wrap)?;
        Ok(acc)
    })
}

/// Connes' coboundary on normalised cochains: (B phi)(a_0,...,a_{m-1}) =
/// sum_k (-1)^{(m-1)k} phi(1, a_k, ..., a_{m-1}, a_0, ..., a_{k-1}).
pub fn connes_b(phi: &Cochain) -> Result<Cochain> {
    let m = phi.arity;
    if m == 0 {
        return Err(Error::ArityUnderflow);
    }
    let inner = phi.clone();
    Ok(Cochain::new(m - 1, move |args| {
        let dim = args[0].dim();
        let mut acc = C64::new(0.0, 0.0);
        for k in 0..m {
            let mut tup = Vec::with_capacity(m + 1);
            tup.push(UnitizedElement::unit(dim));
            for i in 0..m {
                tup.push(args[(k + i) % m].clone());
            }
            let sign = if ((m - 1) * k) % 2 == 0 { 1.0 } else { -1.0 };
            acc += sign * inner.eval(&tup)?;
        }
        Ok(acc)
    }))
}

/// Conditional trace tau'(T) = (1/2) tau(F(FT + TF)).
pub fn conditional_trace(t: &ComplexMatrix, f: &ComplexMatrix) -> Result<C64> {
    if !f.is_hermitian(1e-10) {
        return Err(Error::NotAnInvolution("F not Hermitian".into()));
    }
    let defect = f.mul(f)?.sub(&ComplexMatrix::identity(f.rows()))?.max_abs();
    if defect > 1e-10 {
        return Err(Error::NotAnInvolution(format!("F^2 - 1 defect {defect:.2e}")));
    }
    let sym = f.mul(t)?.add(&t.mul(f)?)?;
    Ok(f.mul(&sym)?.trace() * 0.5)
}

/// Parity tag for Chern-character data.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ChernParity {
    Even,
    Odd,
}

/// The degree-n Chern-character cocycle of a Fredholm module (F, gamma),
/// (b,B)-normalised:
///   even: Gamma(n/2+1)/n! tau'(gamma a_0 [F,a_1]...[F,a_n])
///   odd:  sqrt(2i) Gamma(n/2+1)/n! tau'(a_0 [F,a_1]...[F,a_n]).
pub fn chern_cocycle_eval(
    f: &ComplexMatrix,
    grading: Option<&ComplexMatrix>,
    n: usize,
    args: &[UnitizedElement],
) -> Result<C64> {
    if args.len() != n + 1 {
        return Err(Error::ShapeMismatch(format!("{} entries for degree {n}", args.len())));
    }
    let even = grading.is_some();
    if even != (n % 2 == 0) {
        return Err(Error::ParityMismatch(format!(
            "degree {n} against {} module",
            if even { "even" } else { "odd" }
        )));
    }
    let mut op = args[0].realize();
    if let Some(g) = grading {
        op = g.mul(&op)?;
    }
    for a in &args[1..] {
        // [F, a + c] = [F, a]
        let comm = f.commutator(&a.mat)?;
        op = op.mul(&comm)?;
    }
    let tp = conditional_trace(&op, f)?;
    let norm = gamma_complex(C64::new(n as f64 / 2.0 + 1.0, 0.0))?
        / (1..=n.max(1)).map(|k| k as f64).product::<f64>();
    let factor = if n % 2 == 1 { C64::new(0.0, 2.0).sqrt() } else { C64::new(1.0, 0.0) };
    Ok(factor * norm * tp)
}

/// Degree-m entry of Ch(e) or Ch(u) as a coefficiented tuple.
#[derive(Clone, Debug)]
pub struct ChainTensor {
    pub degree: usize,
    pub coefficient: f64,
    pub entries: Vec<UnitizedElement>,
}

/// Ch_{2k}(e) = (-1)^k (2k)!/k! (e - 1/2) (x) e (x) ... (x) e, Ch_0(e) = e;
/// Ch_{2k+1}(u) = (-1)^k k! u* (x) u (x) ... (x) u* (x) u.
pub fn chern_class_tensor(x: &UnitizedElement, is_projection: bool, k: usize) -> Result<ChainTensor> {
    let dim = x.dim();
    if is_projection {
        let sq = x.multiply(x)?;
        let defect = sq.mat.sub(&x.mat).unwrap().max_abs().max((sq.scalar - x.scalar).norm());
        if defect > 1e-8 {
            return Err(Error::NotIdempotent(format!("e^2 - e defect {defect:.2e}")));
        }
        if k == 0 {
            return Ok(ChainTensor { degree: 0, coefficient: 1.0, entries: vec![x.clone()] });
        }
        let mut coefficient = 1.0f64;
        for j in 1..=2 * k {
            coefficient *= j as f64;
        }
        for j in 1..=k {
            coefficient /= j as f64;
        }
        if k % 2 == 1 {
            coefficient = -coefficient;
        }
        let half = UnitizedElement::with_scalar(x.mat.clone(), x.scalar - 0.5);
        let mut entries = vec![half];
        entries.extend(std::iter::repeat(x.clone()).take(2 * k));
        Ok(ChainTensor { degree: 2 * k, coefficient, entries })
    } else {
        let u = x.realize();
        let defect = u
            .adjoint()
            .mul(&u)?
            .sub(&ComplexMatrix::identity(dim))?
            .max_abs()
            .max(u.mul(&u.adjoint())?.sub(&ComplexMatrix::identity(dim))?.max_abs());
        if defect > 1e-8 {
            return Err(Error::NotUnitary(format!("u*u - 1 defect {defect:.2e}")));
        }
        let mut coefficient = 1.0f64;
        for j in 1..=k {
            coefficient *= j as f64;
        }
        if k % 2 == 1 {
            coefficient = -coefficient;
        }
        let ustar = UnitizedElement::with_scalar(x.mat.adjoint(), x.scalar.conj());
        let mut entries = Vec::with_capacity(2 * k + 2);
        for _ in 0..=k {
            entries.push(ustar.clone());
            entries.push(x.clone());
        }
        Ok(ChainTensor { degree: 2 * k + 1, coefficient, entries })
    }
}
