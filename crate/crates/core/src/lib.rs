//! Pseudo-spectral solver for the one-dimensional Muskat equation
//! `∂_t f = -|D| f + T(f) f` on a periodic domain, with energy diagnostics
//! and an executable verification harness.
//!
//! ```
//! use std::f64::consts::PI;
//! use muskat::corpus::single_mode;
//! use muskat::rhs::{QuadratureSpec, RegularizationParams};
//! use muskat::{evolve, ConstantSet, EvolveOptions, Grid, PhiWeight, ReportContext, StepperSpec};
//!
//! let grid = Grid::new(2.0 * PI, 32)?;
//! let f0 = single_mode(grid, 0.1, 1)?;
//! let params = RegularizationParams::off();
//! let quad = QuadratureSpec::default();
//! let ctx = ReportContext::new(PhiWeight::one(), quad, params.beta, ConstantSet::default());
//! let traj = evolve(&f0, &params, &quad, &StepperSpec::new(0.05, 0.05), &ctx, EvolveOptions::default())?;
//! assert!(traj.rows.last().unwrap().report.l2 < traj.rows[0].report.l2);
//! # Ok::<(), muskat::Error>(())
//! ```

pub mod constants;
pub mod corpus;
pub mod error;
pub mod functionals;
pub mod io;
pub mod phi;
pub mod rhs;
pub mod spectral;
pub mod stepper;
pub mod verify;

pub use error::{Error, Result};
pub use phi::{adapt_phi_to_data, make_log_phi, validate_phi, PhiCertificate, PhiKind, PhiWeight};
pub use spectral::{apply_multiplier, hs_norm, sobolev_phi_norm, Field, Grid, SymbolSpec};
pub use constants::{ConstantSet, Provenance};
pub use functionals::{EnergyReport, ReportContext};
pub use stepper::{evolve, EvolveOptions, SolverState, Status, StepperSpec, Trajectory};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../README.md")]
    mod readme {}
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/fields.md")]
    mod fields {}
    #[doc = include_str!("../../../book/src/weights.md")]
    mod weights {}
    #[doc = include_str!("../../../book/src/operator.md")]
    mod operator {}
    #[doc = include_str!("../../../book/src/evolution.md")]
    mod evolution {}
    #[doc = include_str!("../../../book/src/energies.md")]
    mod energies {}
    #[doc = include_str!("../../../book/src/verification.md")]
    mod verification {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
