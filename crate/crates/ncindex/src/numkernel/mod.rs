//! Dense complex linear algebra and special functions underpinning the other
//! layers.

mod contour;
mod eig;
mod matrix;
mod special;
mod svd;

pub use contour::laurent_residue;
pub use eig::{apply_function, eig_hermitian, HermEig};
pub use matrix::ComplexMatrix;
pub use special::{gamma_complex, hurwitz_zeta, ln_gamma_real};
pub use svd::{schatten_norm, svd, SvdResult};
