//! Dormand–Prince 5(4) with embedded error control.
//!
//! State is a flat `f64` slice; complex states are packed as `(re, im)` pairs.

use crate::{Error, Result};

#[derive(Clone, Copy, Debug)]
pub struct OdeOptions {
    pub rtol: f64,
    pub atol: f64,
    /// Upper bound on |h|; `f64::INFINITY` for none.
    pub max_step: f64,
    pub max_steps: usize,
    pub h0: Option<f64>,
}

impl Default for OdeOptions {
    fn default() -> Self {
        OdeOptions { rtol: 1e-8, atol: 1e-10, max_step: f64::INFINITY, max_steps: 2_000_000, h0: None }
    }
}

impl OdeOptions {
    pub fn tol(rtol: f64, atol: f64) -> Self {
        OdeOptions { rtol, atol, ..Default::default() }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct OdeStats {
    pub n_rhs: usize,
    pub n_accepted: usize,
    pub n_rejected: usize,
}

/// What the observer wants after an accepted step.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StepAction {
    Continue,
    /// The observer changed the state; derivative is re-evaluated.
    Modified,
    Stop,
}

pub struct OdeResult {
    pub t: f64,
    pub y: Vec<f64>,
    pub stats: OdeStats,
    pub stopped: bool,
}

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

fn err_norm(y: &[f64], y1: &[f64], e: &[f64], rtol: f64, atol: f64) -> f64 {
    let n = y.len().max(1);
    let mut s = 0.0;
    for i in 0..y.len() {
        let sc = atol + rtol * y[i].abs().max(y1[i].abs());
        let r = e[i] / sc;
        s += r * r;
    }
    (s / n as f64).sqrt()
}

/// Integrate `y' = f(t, y)` from `t0` to `t1` (either direction).
pub fn integrate_adaptive<F>(f: F, t0: f64, t1: f64, y0: &[f64], opts: &OdeOptions) -> Result<OdeResult>
where
    F: FnMut(f64, &[f64], &mut [f64]),
{
    integrate_observed(f, t0, t1, y0, opts, |_, _| StepAction::Continue)
}

/// As [`integrate_adaptive`], calling `observe(t, y)` after every accepted step.
pub fn integrate_observed<F, O>(mut f: F, t0: f64, t1: f64, y0: &[f64], opts: &OdeOptions, mut observe: O) -> Result<OdeResult>
where
    F: FnMut(f64, &[f64], &mut [f64]),
    O: FnMut(f64, &mut [f64]) -> StepAction,
{
    let n = y0.len();
    let mut stats = OdeStats::default();
    let mut y = y0.to_vec();
    if t0 == t1 || n == 0 {
        return Ok(OdeResult { t: t0, y, stats, stopped: false });
    }
    let dir = (t1 - t0).signum();
    let span = (t1 - t0).abs();
    let hmin = 1e-14 * span;
    let hmax = opts.max_step.min(span);

    let mut k1 = vec![0.0; n];
    let mut k2 = vec![0.0; n];
    let mut k3 = vec![0.0; n];
    let mut k4 = vec![0.0; n];
    let mut k5 = vec![0.0; n];
    let mut k6 = vec![0.0; n];
    let mut k7 = vec![0.0; n];
    let mut tmp = vec![0.0; n];
    let mut y1 = vec![0.0; n];
    let mut err = vec![0.0; n];

    let mut t = t0;
    f(t, &y, &mut k1);
    stats.n_rhs += 1;

    let mut h = match opts.h0 {
        Some(h) => h.abs().min(hmax),
        None => {
            // Hairer's starting step heuristic
            let sc: Vec<f64> = y.iter().map(|v| opts.atol + opts.rtol * v.abs()).collect();
            let d0 = (y.iter().zip(&sc).map(|(v, s)| (v / s).powi(2)).sum::<f64>() / n as f64).sqrt();
            let d1 = (k1.iter().zip(&sc).map(|(v, s)| (v / s).powi(2)).sum::<f64>() / n as f64).sqrt();
            let h0 = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 };
            let h0 = h0.min(hmax);
            for i in 0..n {
                tmp[i] = y[i] + dir * h0 * k1[i];
            }
            f(t + dir * h0, &tmp, &mut k2);
            stats.n_rhs += 1;
            let d2 = (k2.iter().zip(&k1).zip(&sc).map(|((a, b), s)| ((a - b) / s).powi(2)).sum::<f64>() / n as f64)
                .sqrt()
                / h0;
            let h1 = if d1.max(d2) <= 1e-15 { (h0 * 1e-3).max(1e-6) } else { (0.01 / d1.max(d2)).powf(0.2) };
            (100.0 * h0).min(h1).min(hmax)
        }
    };
    h = h.max(hmin);

    let mut last_rejected = false;
    loop {
        let remaining = (t1 - t) * dir;
        if remaining <= 0.0 {
            break;
        }
        if stats.n_accepted + stats.n_rejected >= opts.max_steps {
            return Err(Error::StepBudget(t));
        }
        let mut last = false;
        if h >= remaining {
            h = remaining;
            last = true;
        } else if h > 0.5 * remaining && h < remaining {
            h = 0.5 * remaining;
        }
        let hs = dir * h;

        for i in 0..n {
            tmp[i] = y[i] + hs * A21 * k1[i];
        }
        f(t + C2 * hs, &tmp, &mut k2);
        for i in 0..n {
            tmp[i] = y[i] + hs * (A31 * k1[i] + A32 * k2[i]);
        }
        f(t + C3 * hs, &tmp, &mut k3);
        for i in 0..n {
            tmp[i] = y[i] + hs * (A41 * k1[i] + A42 * k2[i] + A43 * k3[i]);
        }
        f(t + C4 * hs, &tmp, &mut k4);
        for i in 0..n {
            tmp[i] = y[i] + hs * (A51 * k1[i] + A52 * k2[i] + A53 * k3[i] + A54 * k4[i]);
        }
        f(t + C5 * hs, &tmp, &mut k5);
        for i in 0..n {
            tmp[i] = y[i] + hs * (A61 * k1[i] + A62 * k2[i] + A63 * k3[i] + A64 * k4[i] + A65 * k5[i]);
        }
        let tn = if last { t1 } else { t + hs };
        f(tn, &tmp, &mut k6);
        for i in 0..n {
            y1[i] = y[i] + hs * (A71 * k1[i] + A73 * k3[i] + A74 * k4[i] + A75 * k5[i] + A76 * k6[i]);
        }
        f(tn, &y1, &mut k7);
        stats.n_rhs += 6;
        for i in 0..n {
            err[i] = hs * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
        }
        let en = err_norm(&y, &y1, &err, opts.rtol, opts.atol);
        if !en.is_finite() {
            stats.n_rejected += 1;
            h *= 0.2;
            last_rejected = true;
            if h < hmin {
                return Err(Error::StepUnderflow { t, h });
            }
            continue;
        }
        if en <= 1.0 {
            stats.n_accepted += 1;
            t = tn;
            std::mem::swap(&mut y, &mut y1);
            std::mem::swap(&mut k1, &mut k7);
            let fac = if en == 0.0 { 5.0 } else { (0.9 * en.powf(-0.2)).clamp(0.2, 5.0) };
            let fac = if last_rejected { fac.min(1.0) } else { fac };
            h = (h * fac).min(hmax);
            last_rejected = false;
            match observe(t, &mut y) {
                StepAction::Continue => {}
                StepAction::Modified => {
                    f(t, &y, &mut k1);
                    stats.n_rhs += 1;
                }
                StepAction::Stop => return Ok(OdeResult { t, y, stats, stopped: true }),
            }
            if last {
                break;
            }
        } else {
            stats.n_rejected += 1;
            last_rejected = true;
            h *= (0.9 * en.powf(-0.2)).clamp(0.2, 1.0);
            if h < hmin {
                return Err(Error::StepUnderflow { t, h });
            }
        }
    }
    Ok(OdeResult { t: t1, y, stats, stopped: false })
}
