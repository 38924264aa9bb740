//! Numerical primitives.

pub mod cmatrix;
pub mod eig;
pub mod logc;
pub mod ode;
pub mod orth;
pub mod quad;

pub use cmatrix::{c, cr, CMatrix};
pub use eig::{eig_small, EigenDecomp};
pub use logc::LogComplex;
pub use ode::{integrate_adaptive, integrate_observed, OdeOptions, OdeResult, OdeStats, StepAction};
pub use orth::{orthonormality_drift, orthonormalize};
pub use quad::{quad_cumulative, quad_cumulative_hermite, quad_cumulative_quintic};
