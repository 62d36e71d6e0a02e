//! Modal solutions of the damped wave equation `u'' + u' + A u = 0` for a
//! nonnegative self-adjoint `A` given by a discrete spectral measure, with
//! diffusion-profile expansions, exact series oracles and decay diagnostics.

pub mod analysis;
pub mod error;
pub mod exp_poly;
pub mod modal;
pub mod profiles;
pub mod scenario;
pub mod series;
pub mod spectral;
pub mod suite;
pub mod verify;

pub use error::{Error, Result};
