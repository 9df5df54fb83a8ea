//! Constructors for the finite-truncation spectral-triple models: circle
//! symbols, noncommutative torus, Moyal plane, the analytic radial profiles,
//! the double construction and the phase operators.

mod circle;
mod moyal;
pub(crate) mod plane;
mod torus;

pub use circle::{circle_triple, circle_unitary, circle_unitary_cyclic, FourierPolynomial};
pub use moyal::{moyal_gns_unit, moyal_projection_mask, moyal_triple};
pub use plane::{
    bott_fibre_integral, gl_rule, plane_radial_profile, radial_power_integral, RadialProfile,
};
pub use torus::torus_triple;

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::numkernel::{eig_hermitian, ComplexMatrix};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Parity {
    Even,
    Odd,
}

/// Which concrete family a triple belongs to; drives the choice of
/// meromorphic zeta backend for residue computations.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ModelKind {
    Circle,
    TorusOne,
    TorusTwo,
    Moyal,
}

/// Representation of the Dirac matrix.
///
/// Chiral operators are kept as their upper-right corner `b : H+ -> H-`
/// whenever the dimension makes the dense form wasteful; `plus`/`minus` are
/// the coordinate index sets of the two halves.
#[derive(Clone, Debug)]
pub enum DiracRep {
    Dense(ComplexMatrix),
    Chiral { b: ComplexMatrix, plus: Vec<usize>, minus: Vec<usize> },
}

impl DiracRep {
    pub fn dim(&self) -> usize {
        match self {
            DiracRep::Dense(d) => d.rows(),
            DiracRep::Chiral { plus, minus, .. } => plus.len() + minus.len(),
        }
    }

    /// Materialize the full matrix.
    pub fn dense(&self) -> ComplexMatrix {
        match self {
            DiracRep::Dense(d) => d.clone(),
            DiracRep::Chiral { b, plus, minus } => {
                let n = self.dim();
                let mut d = ComplexMatrix::zeros(n, n);
                for (i, &mi) in minus.iter().enumerate() {
                    for (j, &pj) in plus.iter().enumerate() {
                        let v = b.get(i, j);
                        d.set(mi, pj, v);
                        d.set(pj, mi, v.conj());
                    }
                }
                d
            }
        }
    }
}

/// A concrete spectral-triple model at truncation.
#[derive(Clone, Debug)]
pub struct SpectralTriple {
    pub name: String,
    pub kind: ModelKind,
    pub parity: Parity,
    /// declared spectral dimension
    pub spectral_dim: f64,
    /// truncation parameter N
    pub truncation: usize,
    /// deformation parameter (1 on commutative models)
    pub theta: f64,
    pub dirac: DiracRep,
    /// coordinate-diagonal grading (+1/-1 per index), present iff even
    pub grading: Option<Vec<f64>>,
    /// named algebra generators acting on the full Hilbert space
    pub generators: Vec<(String, ComplexMatrix)>,
    /// truncation-edge indices used for kernel filtering
    pub boundary_band: Vec<usize>,
    /// optional nonnegative diagonal weighting the trace
    pub trace_weight: Option<Vec<f64>>,
}

impl SpectralTriple {
    pub fn dim(&self) -> usize {
        self.dirac.dim()
    }

    /// Check the grading relations and commutator boundedness; used by tests
    /// and by constructors on small truncations.
    pub fn validate(&self) -> Result<()> {
        let d = self.dirac.dense();
        if !d.is_hermitian(1e-10) {
            return Err(Error::NonHermitianInput(format!("Dirac of model {}", self.name)));
        }
        if let Some(g) = &self.grading {
            if g.len() != self.dim() {
                return Err(Error::ShapeMismatch("grading length".into()));
            }
            for gi in g {
                if (gi.abs() - 1.0).abs() > 1e-12 {
                    return Err(Error::NotAnInvolution(format!("grading entry {gi}")));
                }
            }
            // gamma D + D gamma = 0 for coordinate gradings
            for i in 0..self.dim() {
                for j in 0..self.dim() {
                    let v = d.get(i, j) * (g[i] + g[j]);
                    if v.norm() > 1e-10 * d.max_abs().max(1.0) {
                        return Err(Error::ParityMismatch(format!(
                            "grading does not anticommute with D at ({i},{j})"
                        )));
                    }
                }
            }
            for (name, a) in &self.generators {
                for i in 0..self.dim() {
                    for j in 0..self.dim() {
                        let v = a.get(i, j) * (g[i] - g[j]);
                        if v.norm() > 1e-10 * a.max_abs().max(1.0) {
                            return Err(Error::ParityMismatch(format!(
                                "generator {name} is not even"
                            )));
                        }
                    }
                }
            }
        }
        Ok(())
    }

    /// sup-norm of [D, a] for a generator; finite by construction, bounded
    /// uniformly in N for the shipped models.
    pub fn commutator_norm(&self, a: &ComplexMatrix) -> Result<f64> {
        Ok(self.dirac.dense().commutator(a)?.spectral_norm())
    }

    /// The triple with D replaced by factor * D (scale-invariance checks).
    pub fn scaled(&self, factor: f64) -> SpectralTriple {
        let dirac = match &self.dirac {
            DiracRep::Dense(d) => DiracRep::Dense(d.scale(C64::new(factor, 0.0))),
            DiracRep::Chiral { b, plus, minus } => DiracRep::Chiral {
                b: b.scale(C64::new(factor, 0.0)),
                plus: plus.clone(),
                minus: minus.clone(),
            },
        };
        SpectralTriple { name: format!("{}-scaled({factor})", self.name), dirac, ..self.clone() }
    }
}

/// K-theory class representative at truncation.
#[derive(Clone, Debug)]
pub enum KClass {
    /// Unitary over the unitization; the hat construction pairs it with the
    /// scalar unitary 1. `cyclic` carries the exactly unitary wrap-around
    /// completion, which agrees with the Toeplitz truncation away from the
    /// edge and feeds the Chern/residue machinery.
    Unitary { name: String, mat: ComplexMatrix, cyclic: Option<ComplexMatrix> },
    /// Projection inside the algebra (scalar part 0), coordinate-diagonal.
    Projection { name: String, mask: Vec<bool> },
}

impl KClass {
    pub fn parity(&self) -> Parity {
        match self {
            KClass::Unitary { .. } => Parity::Odd,
            KClass::Projection { .. } => Parity::Even,
        }
    }

    pub fn name(&self) -> &str {
        match self {
            KClass::Unitary { name, .. } => name,
            KClass::Projection { name, .. } => name,
        }
    }

    pub fn projection_matrix(&self, dim: usize) -> ComplexMatrix {
        match self {
            KClass::Projection { mask, .. } => ComplexMatrix::from_fn(dim, dim, |i, j| {
                if i == j && mask[i] {
                    C64::new(1.0, 0.0)
                } else {
                    C64::new(0.0, 0.0)
                }
            }),
            KClass::Unitary { .. } => panic!("not a projection class"),
        }
    }
}

/// The double: D_mu = [[D, mu],[mu, -D]] with the algebra embedded in the
/// upper corner. Forces invertibility without changing the index class.
pub fn double_triple(t: &SpectralTriple, mu: f64) -> Result<SpectralTriple> {
    if !(mu > 0.0) {
        return Err(Error::InvalidMu(mu));
    }
    let d = t.dirac.dense();
    let n = d.rows();
    let mut dm = ComplexMatrix::zeros(2 * n, 2 * n);
    for i in 0..n {
        for j in 0..n {
            let v = d.get(i, j);
            dm.set(i, j, v);
            dm.set(n + i, n + j, -v);
        }
        dm.set(i, n + i, C64::new(mu, 0.0));
        dm.set(n + i, i, C64::new(mu, 0.0));
    }
    let grading = t.grading.as_ref().map(|g| {
        let mut gg = g.clone();
        gg.extend(g.iter().map(|x| -x));
        gg
    });
    let generators = t
        .generators
        .iter()
        .map(|(name, a)| {
            let mut h = ComplexMatrix::zeros(2 * n, 2 * n);
            for i in 0..n {
                for j in 0..n {
                    h.set(i, j, a.get(i, j));
                }
            }
            (format!("{name}^"), h)
        })
        .collect();
    let mut boundary_band = t.boundary_band.clone();
    boundary_band.extend(t.boundary_band.iter().map(|&i| i + n));
    Ok(SpectralTriple {
        name: format!("{}-double(mu={mu})", t.name),
        kind: t.kind,
        parity: t.parity,
        spectral_dim: t.spectral_dim,
        truncation: t.truncation,
        theta: t.theta,
        dirac: DiracRep::Dense(dm),
        grading,
        generators,
        boundary_band,
        trace_weight: None,
    })
}

/// F_eps = D (eps + D^2)^{-1/2} and P = chi_{[0,inf)}(D) with sign(0) := 1.
pub fn phase_and_projection(
    d: &ComplexMatrix,
    eps: f64,
) -> Result<(ComplexMatrix, ComplexMatrix)> {
    let eig = eig_hermitian(d)?;
    if eps == 0.0 {
        let near_zero = eig.values.iter().any(|&x| x.abs() < 1e-12);
        if near_zero {
            return Err(Error::SingularPhase("0 in spec(D) with eps = 0".into()));
        }
    } else if eps < 0.0 {
        return Err(Error::SingularPhase(format!("eps = {eps} negative")));
    }
    let f = eig.apply(|x| x / (eps + x * x).sqrt())?;
    let p = eig.apply(|x| if x >= 0.0 { 1.0 } else { 0.0 })?;
    Ok((f, p))
}

/// Spectrum of a Hermitian matrix (ascending), convenience for tests.
pub fn spectrum(d: &ComplexMatrix) -> Result<Vec<f64>> {
    Ok(eig_hermitian(d)?.values)
}

/// |D| spectral gap helper: the function x -> x^2 applied through calculus.
pub fn d_squared_dense(t: &SpectralTriple) -> ComplexMatrix {
    let d = t.dirac.dense();
    d.mul(&d).unwrap()
}

/// F^2 = I defect for a putative involution.
pub fn involution_defect(f: &ComplexMatrix) -> f64 {
    match f.mul(f) {
        Ok(sq) => sq.sub(&ComplexMatrix::identity(f.rows())).map(|d| d.max_abs()).unwrap_or(f64::INFINITY),
        Err(_) => f64::INFINITY,
    }
}

/// Eigenvalue check for the double: spec(D_mu) = {±sqrt(mu^2+l^2)}.
pub fn double_spectrum_oracle(d: &ComplexMatrix, mu: f64) -> Result<Vec<f64>> {
    let base = spectrum(d)?;
    let mut out: Vec<f64> = base
        .iter()
        .flat_map(|&l| {
            let r = (mu * mu + l * l).sqrt();
            [r, -r]
        })
        .collect();
    out.sort_by(|a, b| a.partial_cmp(b).unwrap());
    Ok(out)
}

