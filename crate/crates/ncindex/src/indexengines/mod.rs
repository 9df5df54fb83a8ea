//! The index computations and their agreement machinery: Fredholm counting,
//! trace powers, the residue cocycle, the resolvent cocycle, and the
//! McKean-Singer residue.

mod constants;
mod fredholm;
mod mckean;
mod pairing;
mod report;
mod residue;
mod resolvent;

pub use constants::{residue_constants, ResidueConstants};
pub use fredholm::{fredholm_index, FredholmCount};
pub use mckean::mckean_singer;
pub use pairing::{pairing_index, MethodValue, PairingMode};
pub use report::{IndexReport, ReportRow};
pub use residue::{residue_cocycle_component, residue_index};
pub use resolvent::{
    resolvent_cocycle_quad, resolvent_cocycle_spectral, resolvent_expectation_quad,
    resolvent_expectation_spectral, s_integrated_expectation_spectral, s_trick_identity_quad,
    s_trick_identity_spectral, scalar_phi0_closed_form, ResolventEngine,
};
