//! Evans function computation for viscous shocks of isentropic gas dynamics.
//!
//! Profiles are computed in Eulerian and Lagrangian coordinates, Evans systems
//! are assembled in Eulerian, Lagrangian and pseudo-Lagrangian frames (1D and
//! 2D), initial bases are continued analytically with Kato's scheme and the
//! Evans function is evaluated with continuous orthogonalization.

// `!(x > 0.0)` style checks are deliberate: they also reject NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod cli;
pub mod contour;
pub mod engine;
pub mod error;
pub mod gas;
pub mod kato;
pub mod numerics;
pub mod systems;

pub use error::{Error, Result};
pub use num_complex::Complex64 as C64;
