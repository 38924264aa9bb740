//! Isentropic gamma-law gas, endstates and traveling-wave profiles.
//!
//! Normalization: mass flux m = 1, speed s = -1, rho_minus = u_minus = 1, so
//! u = tau everywhere along the wave.

mod profile;

pub use profile::{build_y_map, compute_profile, Frame, ProfileJson, ProfileOptions, ShockProfile, YMap};

use crate::{Error, Result};
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GasModel {
    pub gamma: f64,
    pub a: f64,
    /// First viscosity (2D only).
    pub mu: f64,
    /// Second viscosity (2D only).
    pub eta: f64,
}

impl GasModel {
    /// Default viscosities: `2 mu + eta = 1` matches the unit viscosity of
    /// the 1D model and `2 mu + 3 eta = 0` is the Stokes relation.
    pub fn new(gamma: f64, a: f64) -> Self {
        GasModel { gamma, a, mu: 0.75, eta: -0.5 }
    }

    /// p(rho) = a rho^gamma
    pub fn pressure(&self, rho: f64) -> f64 {
        self.a * rho.powf(self.gamma)
    }

    /// p'(rho)
    pub fn dpressure(&self, rho: f64) -> f64 {
        self.a * self.gamma * rho.powf(self.gamma - 1.0)
    }

    /// P(tau) = a tau^{-gamma}
    pub fn lag_pressure(&self, tau: f64) -> f64 {
        self.a * tau.powf(-self.gamma)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EndStates {
    pub rho_plus: f64,
    pub u_plus: f64,
    pub tau_plus: f64,
    pub w_plus: f64,
}

impl EndStates {
    pub fn jump(&self) -> f64 {
        1.0 - self.u_plus
    }
}

/// Endstates for strength `u_plus` and the pressure constant that makes them a
/// shock.
pub fn solve_endstates(gamma: f64, u_plus: f64) -> Result<(EndStates, f64)> {
    if !(gamma > 1.0) || !gamma.is_finite() {
        return Err(Error::InvalidParam(format!("gamma must exceed 1, got {gamma}")));
    }
    if !(u_plus > 0.0) || !u_plus.is_finite() {
        return Err(Error::InvalidParam(format!("u_plus must be positive, got {u_plus}")));
    }
    if u_plus >= 1.0 - 1e-12 {
        return Err(Error::DegenerateShock(u_plus));
    }
    // (1 - u+) / (u+^{-gamma} - 1), written with expm1 for weak shocks
    let a = (1.0 - u_plus) / (-gamma * u_plus.ln()).exp_m1();
    let ends = EndStates { rho_plus: 1.0 / u_plus, u_plus, tau_plus: u_plus, w_plus: u_plus };
    Ok((ends, a))
}

/// Rankine–Hugoniot residuals `([rho u], [rho u^2 + p])` in Eulerian form and
/// `(-s[tau] - [w], -s[w] + [P])` in Lagrangian form.
pub fn jump_residuals(model: &GasModel, ends: &EndStates) -> ([f64; 2], [f64; 2]) {
    let (rp, up) = (ends.rho_plus, ends.u_plus);
    let e1 = rp * up - 1.0;
    let e2 = (rp * up * up + model.pressure(rp)) - (1.0 + model.pressure(1.0));
    let l1 = (ends.tau_plus - 1.0) - (ends.w_plus - 1.0);
    let l2 = (ends.w_plus - 1.0) + (model.lag_pressure(ends.tau_plus) - model.lag_pressure(1.0));
    ([e1, e2], [l1, l2])
}

/// Scalar profile field `F(u) = u + a u^{-gamma} - (1 + a)`, its derivatives,
/// and cancellation-free forms near each endstate.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProfileField {
    pub gamma: f64,
    pub a: f64,
    pub u_plus: f64,
}

impl ProfileField {
    pub fn new(model: &GasModel, ends: &EndStates) -> Self {
        ProfileField { gamma: model.gamma, a: model.a, u_plus: ends.u_plus }
    }

    /// F at `u_plus + d`.
    #[inline]
    pub fn f_dev_plus(&self, d: f64) -> f64 {
        let up = self.u_plus;
        d + self.a * up.powf(-self.gamma) * (-self.gamma * (d / up).ln_1p()).exp_m1()
    }

    /// F at `1 + d`.
    #[inline]
    pub fn f_dev_minus(&self, d: f64) -> f64 {
        d + self.a * (-self.gamma * d.ln_1p()).exp_m1()
    }

    #[inline]
    pub fn f(&self, u: f64) -> f64 {
        if u < 0.5 * (1.0 + self.u_plus) {
            self.f_dev_plus(u - self.u_plus)
        } else {
            self.f_dev_minus(u - 1.0)
        }
    }

    #[inline]
    pub fn df(&self, u: f64) -> f64 {
        1.0 - self.a * self.gamma * u.powf(-self.gamma - 1.0)
    }

    #[inline]
    pub fn d2f(&self, u: f64) -> f64 {
        self.a * self.gamma * (self.gamma + 1.0) * u.powf(-self.gamma - 2.0)
    }

    /// Exponential rates of approach (d/dx of the deviation over itself):
    /// negative at +inf, positive at -inf.
    pub fn eulerian_rates(&self) -> (f64, f64) {
        (self.df(self.u_plus), self.df(1.0))
    }

    /// Rates for the Lagrangian field tau F(tau).
    pub fn lagrangian_rates(&self) -> (f64, f64) {
        (self.u_plus * self.df(self.u_plus), self.df(1.0))
    }
}
