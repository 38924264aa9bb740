//! Traveling-wave profiles and the Eulerian-to-Lagrangian label map.

use super::{EndStates, GasModel, ProfileField};
use crate::numerics::ode::{integrate_observed, OdeOptions, StepAction};
use crate::numerics::quad::{locate, quad_cumulative_quintic, quintic_segment};
use crate::{Error, Result};
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Frame {
    Eulerian,
    Lagrangian,
}

#[derive(Clone, Copy, Debug)]
pub struct ProfileOptions {
    /// Relative tolerance of the profile ODE.
    pub tol: f64,
    /// Deviation from the endstate, relative to the jump, that defines M.
    pub endpoint_tol: f64,
    /// Integrate on to `extend * M` after the endpoint is reached.
    pub extend: f64,
    /// M is capped at `cap_factor / |slowest rate|`.
    pub cap_factor: f64,
    /// Value at the origin; defaults to the endstate average.
    pub center: Option<f64>,
}

impl Default for ProfileOptions {
    fn default() -> Self {
        ProfileOptions { tol: 1e-10, endpoint_tol: 1e-8, extend: 1.0, cap_factor: 50.0, center: None }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct YMap {
    /// y at each grid point, y(0) = 0.
    pub y: Vec<f64>,
    pub delta_plus: f64,
    pub delta_minus: f64,
}

/// Discrete profile. For the Eulerian frame `u` is the velocity against x; for
/// the Lagrangian frame `u` holds tau (= w) against y.
#[derive(Clone, Debug, PartialEq)]
pub struct ShockProfile {
    pub frame: Frame,
    pub model: GasModel,
    pub ends: EndStates,
    pub grid: Vec<f64>,
    pub u: Vec<f64>,
    pub du: Vec<f64>,
    /// Second derivatives from the profile ODE (not serialized).
    pub ddu: Vec<f64>,
    pub m_plus: f64,
    pub m_minus: f64,
    pub y_map: Option<YMap>,
}

impl ShockProfile {
    pub fn field(&self) -> ProfileField {
        ProfileField::new(&self.model, &self.ends)
    }

    /// Right-hand side of the frame's scalar profile ODE.
    #[inline]
    pub fn rhs(&self, u: f64) -> f64 {
        let f = self.field().f(u);
        match self.frame {
            Frame::Eulerian => f,
            Frame::Lagrangian => u * f,
        }
    }

    /// Second derivative along solutions of the profile ODE.
    #[inline]
    pub fn rhs2(&self, u: f64) -> f64 {
        let fld = self.field();
        let f = fld.f(u);
        match self.frame {
            Frame::Eulerian => fld.df(u) * f,
            Frame::Lagrangian => (f + u * fld.df(u)) * u * f,
        }
    }

    /// Recompute `du`, `ddu` from `u`.
    pub fn fill_derivatives(&mut self) {
        self.du = self.u.iter().map(|&v| self.rhs(v)).collect();
        self.ddu = self.u.iter().map(|&v| self.rhs2(v)).collect();
    }

    /// rho, rho', rho'' at the grid points.
    fn rho_jet(&self) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
        let mut r = Vec::with_capacity(self.u.len());
        let mut r1 = Vec::with_capacity(self.u.len());
        let mut r2 = Vec::with_capacity(self.u.len());
        for i in 0..self.u.len() {
            let (u, du, ddu) = (self.u[i], self.du[i], self.ddu[i]);
            r.push(1.0 / u);
            r1.push(-du / (u * u));
            r2.push(-ddu / (u * u) + 2.0 * du * du / (u * u * u));
        }
        (r, r1, r2)
    }

    pub fn rho(&self) -> Vec<f64> {
        self.u.iter().map(|u| 1.0 / u).collect()
    }

    pub fn domain(&self) -> (f64, f64) {
        (self.grid[0], *self.grid.last().unwrap())
    }

    /// Interpolated value and derivative; endstate values outside the grid.
    #[inline]
    pub fn eval(&self, s: f64) -> (f64, f64) {
        let n = self.grid.len();
        if s <= self.grid[0] {
            return if s == self.grid[0] { (self.u[0], self.du[0]) } else { (1.0, 0.0) };
        }
        if s >= self.grid[n - 1] {
            return if s == self.grid[n - 1] { (self.u[n - 1], self.du[n - 1]) } else { (self.ends.u_plus, 0.0) };
        }
        let i = locate(&self.grid, s);
        quintic_segment(&self.grid, &self.u, &self.du, &self.ddu, i, s)
    }

    /// Value and its first three derivatives, the derivatives taken from the
    /// profile ODE at the interpolated value.
    pub fn jet(&self, s: f64) -> [f64; 4] {
        let (u, _) = self.eval(s);
        let fld = self.field();
        let (f, f1, f2) = (fld.f(u), fld.df(u), fld.d2f(u));
        match self.frame {
            Frame::Eulerian => {
                let d1 = f;
                let d2 = f1 * f;
                let d3 = (f2 * f + f1 * f1) * f;
                [u, d1, d2, d3]
            }
            Frame::Lagrangian => {
                let g = u * f;
                let g1 = f + u * f1;
                let g2 = 2.0 * f1 + u * f2;
                [u, g, g1 * g, (g2 * g + g1 * g1) * g]
            }
        }
    }

    /// Eulerian frame: the x whose label is `y`.
    pub fn x_of_y(&self, y: f64) -> f64 {
        let ym = &self.y_map.as_ref().expect("y map needs an Eulerian profile").y;
        let n = ym.len();
        if y <= ym[0] {
            return self.grid[0] + (y - ym[0]);
        }
        if y >= ym[n - 1] {
            return self.grid[n - 1] + (y - ym[n - 1]) * self.ends.u_plus;
        }
        let i = locate(ym, y);
        let (x0, x1) = (self.grid[i], self.grid[i + 1]);
        let (xs, ys, rho, drho) = self.y_segment(i);
        // Newton on the quintic Hermite y(x), started from the secant guess
        let mut x = x0 + (y - ys[0]) / (ys[1] - ys[0]) * (x1 - x0);
        for _ in 0..20 {
            let (v, dv) = quintic_segment(&xs, &ys, &rho, &drho, 0, x);
            let dx = (v - y) / dv;
            x = (x - dx).clamp(x0, x1);
            if dx.abs() <= 1e-15 * (1.0 + x.abs()) {
                break;
            }
        }
        x
    }

    /// Eulerian frame: y(x).
    pub fn y_of_x(&self, x: f64) -> f64 {
        let ym = &self.y_map.as_ref().expect("y map needs an Eulerian profile").y;
        let n = self.grid.len();
        if x <= self.grid[0] {
            return ym[0] + (x - self.grid[0]);
        }
        if x >= self.grid[n - 1] {
            return ym[n - 1] + (x - self.grid[n - 1]) * self.ends.rho_plus;
        }
        let i = locate(&self.grid, x);
        let (xs, ys, rho, drho) = self.y_segment(i);
        quintic_segment(&xs, &ys, &rho, &drho, 0, x).0
    }

    #[inline]
    fn y_segment(&self, i: usize) -> ([f64; 2], [f64; 2], [f64; 2], [f64; 2]) {
        let ym = &self.y_map.as_ref().unwrap().y;
        let r = |k: usize| 1.0 / self.u[k];
        let dr = |k: usize| -self.du[k] / (self.u[k] * self.u[k]);
        ([self.grid[i], self.grid[i + 1]], [ym[i], ym[i + 1]], [r(i), r(i + 1)], [dr(i), dr(i + 1)])
    }

    pub fn to_json(&self, config_hash: Option<&str>) -> ProfileJson {
        ProfileJson {
            frame: self.frame,
            gamma: self.model.gamma,
            a: self.model.a,
            u_plus: self.ends.u_plus,
            mu: self.model.mu,
            eta: self.model.eta,
            grid: self.grid.clone(),
            rho: self.rho(),
            u: self.u.clone(),
            du: self.du.clone(),
            y: self.y_map.as_ref().map(|m| m.y.clone()).unwrap_or_default(),
            delta_plus: self.y_map.as_ref().map(|m| m.delta_plus),
            delta_minus: self.y_map.as_ref().map(|m| m.delta_minus),
            m_plus: self.m_plus,
            m_minus: self.m_minus,
            config_hash: config_hash.map(str::to_string),
        }
    }

    pub fn from_json(j: &ProfileJson) -> Result<Self> {
        let n = j.grid.len();
        if n < 2 || j.u.len() != n || j.du.len() != n {
            return Err(Error::Parse("profile arrays have inconsistent lengths".into()));
        }
        let (ends, _) = super::solve_endstates(j.gamma, j.u_plus)?;
        let model = GasModel { gamma: j.gamma, a: j.a, mu: j.mu, eta: j.eta };
        let y_map = match (j.frame, j.delta_plus, j.delta_minus) {
            (Frame::Eulerian, Some(dp), Some(dm)) if j.y.len() == n => {
                Some(YMap { y: j.y.clone(), delta_plus: dp, delta_minus: dm })
            }
            (Frame::Eulerian, _, _) => return Err(Error::Parse("Eulerian profile without y map".into())),
            _ => None,
        };
        let mut p = ShockProfile {
            frame: j.frame,
            model,
            ends,
            grid: j.grid.clone(),
            u: j.u.clone(),
            du: j.du.clone(),
            ddu: vec![],
            m_plus: j.m_plus,
            m_minus: j.m_minus,
            y_map,
        };
        p.ddu = p.u.iter().map(|&v| p.rhs2(v)).collect();
        Ok(p)
    }
}

/// On-disk profile.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProfileJson {
    pub frame: Frame,
    pub gamma: f64,
    pub a: f64,
    pub u_plus: f64,
    #[serde(default = "default_mu")]
    pub mu: f64,
    #[serde(default = "default_eta")]
    pub eta: f64,
    pub grid: Vec<f64>,
    pub rho: Vec<f64>,
    pub u: Vec<f64>,
    pub du: Vec<f64>,
    pub y: Vec<f64>,
    pub delta_plus: Option<f64>,
    pub delta_minus: Option<f64>,
    #[serde(rename = "M_plus")]
    pub m_plus: f64,
    #[serde(rename = "M_minus")]
    pub m_minus: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub config_hash: Option<String>,
}

fn default_mu() -> f64 {
    0.75
}

fn default_eta() -> f64 {
    -0.5
}

/// One half of the profile: deviation `d` from the endstate `u_end`,
/// integrated from the origin outward in direction `dir`.
fn half_profile(
    fld: &ProfileField,
    frame: Frame,
    plus: bool,
    d0: f64,
    jump: f64,
    cap: f64,
    opts: &ProfileOptions,
) -> Result<(Vec<f64>, Vec<f64>, f64)> {
    let u_end = if plus { fld.u_plus } else { 1.0 };
    let rhs = |d: f64| -> f64 {
        let f = if plus { fld.f_dev_plus(d) } else { fld.f_dev_minus(d) };
        match frame {
            Frame::Eulerian => f,
            Frame::Lagrangian => (u_end + d) * f,
        }
    };
    let dir = if plus { 1.0 } else { -1.0 };
    let thresh = opts.endpoint_tol * jump;
    let rate = if plus { fld.df(fld.u_plus) } else { fld.df(1.0) };
    let rate = match frame {
        Frame::Eulerian => rate,
        Frame::Lagrangian => u_end * rate,
    };
    let ode = OdeOptions {
        rtol: opts.tol,
        atol: 1e-6 * thresh * opts.tol,
        max_step: 0.5 / rate.abs(),
        ..Default::default()
    };
    let mut ts = vec![];
    let mut ds = vec![];
    let mut bad: Option<f64> = None;
    let r = integrate_observed(
        |_, y, dy| dy[0] = rhs(y[0]),
        0.0,
        dir * cap,
        &[d0],
        &ode,
        |t, y| {
            ts.push(t);
            ds.push(y[0]);
            // u must stay strictly between the endstates
            let u = u_end + y[0];
            if !(u > fld.u_plus && u < 1.0) {
                bad = Some(t);
                return StepAction::Stop;
            }
            if y[0].abs() <= thresh {
                StepAction::Stop
            } else {
                StepAction::Continue
            }
        },
    )?;
    if let Some(t) = bad {
        return Err(Error::ProfileDivergence(t));
    }
    if !r.stopped {
        return Err(Error::TruncationFailure { side: if plus { "+" } else { "-" }, cap });
    }
    let m = r.t.abs();
    if opts.extend > 1.0 {
        let r2 = integrate_observed(
            |_, y, dy| dy[0] = rhs(y[0]),
            r.t,
            dir * m * opts.extend,
            &r.y,
            &ode,
            |t, y| {
                ts.push(t);
                ds.push(y[0]);
                StepAction::Continue
            },
        )?;
        return Ok((ts, ds, r2.t.abs()));
    }
    Ok((ts, ds, m))
}

/// Profile centered so that its value at the origin is the endstate average
/// (or `opts.center`).
pub fn compute_profile(model: &GasModel, ends: &EndStates, frame: Frame, opts: &ProfileOptions) -> Result<ShockProfile> {
    let fld = ProfileField::new(model, ends);
    let jump = ends.jump();
    let center = opts.center.unwrap_or(0.5 * (1.0 + ends.u_plus));
    if !(center > ends.u_plus && center < 1.0) {
        return Err(Error::InvalidParam(format!("center value {center} outside the endstate interval")));
    }
    let (rp, rm) = match frame {
        Frame::Eulerian => fld.eulerian_rates(),
        Frame::Lagrangian => fld.lagrangian_rates(),
    };
    let cap = opts.cap_factor / rp.abs().min(rm.abs());
    let (tp, dp, m_plus) = half_profile(&fld, frame, true, center - ends.u_plus, jump, cap, opts)?;
    let (tm, dm, m_minus) = half_profile(&fld, frame, false, center - 1.0, jump, cap, opts)?;

    let mut grid = Vec::with_capacity(tp.len() + tm.len() + 1);
    let mut u = Vec::with_capacity(grid.capacity());
    for (t, d) in tm.iter().zip(&dm).rev() {
        grid.push(*t);
        u.push(1.0 + d);
    }
    grid.push(0.0);
    u.push(center);
    for (t, d) in tp.iter().zip(&dp) {
        grid.push(*t);
        u.push(ends.u_plus + d);
    }
    let mut prof = ShockProfile {
        frame,
        model: *model,
        ends: *ends,
        du: vec![],
        ddu: vec![],
        grid,
        u,
        m_plus,
        m_minus,
        y_map: None,
    };
    prof.fill_derivatives();
    if frame == Frame::Eulerian {
        prof.y_map = Some(build_y_map(&prof)?);
    }
    Ok(prof)
}

/// Cumulative y(x) = int_0^x rho and the tail-corrected integrals
/// Delta+ = int_0^inf (rho - rho+), Delta- = int_-inf^0 (rho - rho-).
pub fn build_y_map(profile: &ShockProfile) -> Result<YMap> {
    if profile.frame != Frame::Eulerian {
        return Err(Error::InvalidParam("y map is defined for Eulerian profiles only".into()));
    }
    let x = &profile.grid;
    let (rho, drho, d2rho) = profile.rho_jet();
    let cum = quad_cumulative_quintic(x, &rho, &drho, &d2rho)?;
    let i0 = x.iter().position(|&t| t == 0.0).unwrap_or_else(|| locate(x, 0.0));
    let y0 = cum[i0];
    let y: Vec<f64> = cum.iter().map(|v| v - y0).collect();

    let up = profile.ends.u_plus;
    let (rate_p, rate_m) = profile.field().eulerian_rates();

    // rho - rho+ = (u+ - u) / (u u+)
    let gp: Vec<f64> = profile.u[i0..].iter().map(|u| (up - u) / (u * up)).collect();
    let cp = quad_cumulative_quintic(&x[i0..], &gp, &drho[i0..], &d2rho[i0..])?;
    let delta_plus = cp.last().unwrap() + gp.last().unwrap() / rate_p.abs();

    // rho - 1 = (1 - u) / u
    let gm: Vec<f64> = profile.u[..=i0].iter().map(|u| (1.0 - u) / u).collect();
    let cm = quad_cumulative_quintic(&x[..=i0], &gm, &drho[..=i0], &d2rho[..=i0])?;
    let delta_minus = cm.last().unwrap() + gm[0] / rate_m.abs();
    Ok(YMap { y, delta_plus, delta_minus })
}
