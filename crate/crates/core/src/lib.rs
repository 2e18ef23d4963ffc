//! Numerical verification of the sharp fractional Hardy inequality on the
//! half-space,
//!
//! ```text
//! ∬ |u(x) - u(y)|^p |x - y|^(-N-ps) dx dy  >=  D_{N,p,s} ∫ |u(x)|^p x_N^(-ps) dx .
//! ```
//!
//! The crate is organised bottom-up:
//!
//! - [`params`]: validated `(N, p, s)` triples and the critical line `ps = 1`;
//! - [`quadrature`]: graded Gauss–Legendre rules for endpoint singularities,
//!   principal values, half-lines and seeded Monte Carlo;
//! - [`constants`]: `D_{N,p,s}`, the remainder constant `c_p` and the
//!   dimension-reduction factor;
//! - [`functions`]: the catalog of half-line test profiles and the product
//!   functions used in higher dimension;
//! - [`energies`]: both sides of the inequality, the ground-state
//!   representation and the Euler–Lagrange identity;
//! - [`verify`]: campaigns that sweep the checks over parameter grids.
//!
//! ```
//! use hardy_core::{make_params, rayleigh_quotient, Profile1D, QuadConfig};
//!
//! let params = make_params(1, 2.0, 0.25)?;
//! let q = rayleigh_quotient(&Profile1D::standard_hat(), &params, &QuadConfig::two_d())?;
//! assert!(q.quotient > q.sharp_constant);
//! # Ok::<(), hardy_core::Error>(())
//! ```
//!
//! The guide in `book/` walks through each concept with runnable examples.

// Range checks are written `!(x > 0.0)` on purpose: the negation also
// rejects NaN, which `x <= 0.0` would let through.
#![allow(clippy::neg_cmp_op_on_partial_ord)]
// Reference values are quoted with every digit the oracle produced.
#![allow(clippy::excessive_precision)]

pub mod constants;
pub mod energies;
pub mod error;
pub mod functions;
pub mod gamma;
pub mod params;
pub mod quadrature;
pub mod verify;

pub use error::{Error, Result};
pub use constants::{gsr_constant, hardy_constant, kernel_reduction_integral, reduction_factor};
pub use energies::{
    el_identity_check, gagliardo_energy_1d, gsr_residual, hardy_term_1d, monte_carlo_energy,
    rayleigh_quotient, weighted_energy_1d,
};
pub use functions::{Profile1D, ProfileKind};
pub use params::{ground_state_exponent, make_params, HardyParams, Regime, CRITICAL_GUARD};
pub use quadrature::{EnergyReport, QuadConfig};
pub use verify::{run_campaign, CampaignSpec, VerificationReport};

/// The guide's chapters, compiled as doc-tests so their examples cannot
/// drift from the API.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../README.md")]
    mod readme {}
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/parameters.md")]
    mod parameters {}
    #[doc = include_str!("../../../book/src/constants.md")]
    mod constants {}
    #[doc = include_str!("../../../book/src/profiles.md")]
    mod profiles {}
    #[doc = include_str!("../../../book/src/energies.md")]
    mod energies {}
    #[doc = include_str!("../../../book/src/ground-state.md")]
    mod ground_state {}
    #[doc = include_str!("../../../book/src/euler-lagrange.md")]
    mod euler_lagrange {}
    #[doc = include_str!("../../../book/src/quadrature.md")]
    mod quadrature {}
    #[doc = include_str!("../../../book/src/sharpness.md")]
    mod sharpness {}
    #[doc = include_str!("../../../book/src/campaigns.md")]
    mod campaigns {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
