//! Numerical index theory for finite-truncation spectral-triple models.
//!
//! The crate builds concrete truncated models (circle symbols, the
//! noncommutative torus, the Moyal plane, and analytic radial profiles) and
//! computes their K-theory index pairings by several independent routes:
//! Fredholm compression counting, Chern-character pairing, the residue
//! cocycle driven by meromorphic or heat-fitted zeta functions, the resolvent
//! cocycle evaluated by contour quadrature, and a McKean-Singer residue.

pub mod cyclic;
pub mod error;
pub mod indexengines;
pub mod models;
pub mod ncintegration;
pub mod numkernel;
pub mod psido;
pub mod zeta;

pub use error::{Error, Result};
pub use numkernel::ComplexMatrix;
