//! Cumulative quadrature and cubic Hermite interpolation on monotone grids.

use crate::{Error, Result};

fn check_monotone(x: &[f64]) -> Result<f64> {
    if x.len() < 2 {
        return Ok(1.0);
    }
    let dir = (x[1] - x[0]).signum();
    for i in 1..x.len() {
        let d = x[i] - x[i - 1];
        if !(d * dir > 0.0) {
            return Err(Error::NonMonotoneGrid(i));
        }
    }
    Ok(dir)
}

/// Composite trapezoid: `out[i] = int_{x_0}^{x_i} f`.
pub fn quad_cumulative(x: &[f64], f: &[f64]) -> Result<Vec<f64>> {
    assert_eq!(x.len(), f.len());
    check_monotone(x)?;
    let mut out = Vec::with_capacity(x.len());
    let mut acc = 0.0;
    for i in 0..x.len() {
        if i > 0 {
            acc += 0.5 * (x[i] - x[i - 1]) * (f[i] + f[i - 1]);
        }
        out.push(acc);
    }
    Ok(out)
}

/// Trapezoid with the endpoint-derivative correction, exact for cubics.
pub fn quad_cumulative_hermite(x: &[f64], f: &[f64], df: &[f64]) -> Result<Vec<f64>> {
    assert_eq!(x.len(), f.len());
    assert_eq!(x.len(), df.len());
    check_monotone(x)?;
    let mut out = Vec::with_capacity(x.len());
    let mut acc = 0.0;
    for i in 0..x.len() {
        if i > 0 {
            let h = x[i] - x[i - 1];
            acc += 0.5 * h * (f[i] + f[i - 1]) + h * h / 12.0 * (df[i - 1] - df[i]);
        }
        out.push(acc);
    }
    Ok(out)
}

/// Cumulative integral of the quintic Hermite interpolant built from values,
/// first and second derivatives; exact for quintics.
pub fn quad_cumulative_quintic(x: &[f64], f: &[f64], df: &[f64], d2f: &[f64]) -> Result<Vec<f64>> {
    assert!(x.len() == f.len() && x.len() == df.len() && x.len() == d2f.len());
    check_monotone(x)?;
    let mut out = Vec::with_capacity(x.len());
    let mut acc = 0.0;
    for i in 0..x.len() {
        if i > 0 {
            let h = x[i] - x[i - 1];
            acc += 0.5 * h * (f[i] + f[i - 1]) + h * h / 10.0 * (df[i - 1] - df[i])
                + h * h * h / 120.0 * (d2f[i - 1] + d2f[i]);
        }
        out.push(acc);
    }
    Ok(out)
}

/// Quintic Hermite value and derivative on segment `i` at `t`.
#[inline]
pub fn quintic_segment(x: &[f64], f: &[f64], df: &[f64], d2f: &[f64], i: usize, t: f64) -> (f64, f64) {
    let h = x[i + 1] - x[i];
    let s = (t - x[i]) / h;
    let (p0, p1) = (f[i], f[i + 1]);
    let (d0, d1) = (df[i] * h, df[i + 1] * h);
    let (s0, s1) = (d2f[i] * h * h, d2f[i + 1] * h * h);
    let s2 = s * s;
    let s3 = s2 * s;
    let s4 = s3 * s;
    let s5 = s4 * s;
    let h0 = 1.0 - 10.0 * s3 + 15.0 * s4 - 6.0 * s5;
    let h1 = s - 6.0 * s3 + 8.0 * s4 - 3.0 * s5;
    let h2 = 0.5 * (s2 - 3.0 * s3 + 3.0 * s4 - s5);
    let h3 = 0.5 * (s3 - 2.0 * s4 + s5);
    let h4 = -4.0 * s3 + 7.0 * s4 - 3.0 * s5;
    let h5 = 10.0 * s3 - 15.0 * s4 + 6.0 * s5;
    let v = h0 * p0 + h1 * d0 + h2 * s0 + h3 * s1 + h4 * d1 + h5 * p1;
    let g0 = -30.0 * s2 + 60.0 * s3 - 30.0 * s4;
    let g1 = 1.0 - 18.0 * s2 + 32.0 * s3 - 15.0 * s4;
    let g2 = s - 4.5 * s2 + 6.0 * s3 - 2.5 * s4;
    let g3 = 1.5 * s2 - 4.0 * s3 + 2.5 * s4;
    let g4 = -12.0 * s2 + 28.0 * s3 - 15.0 * s4;
    let dv = (g0 * p0 + g1 * d0 + g2 * s0 + g3 * s1 + g4 * d1 - g0 * p1) / h;
    (v, dv)
}

/// Index `i` with `x[i] <= t <= x[i+1]` on an increasing grid (clamped).
#[inline]
pub fn locate(x: &[f64], t: f64) -> usize {
    let n = x.len();
    if t <= x[0] {
        return 0;
    }
    if t >= x[n - 1] {
        return n - 2;
    }
    let mut lo = 0;
    let mut hi = n - 1;
    while hi - lo > 1 {
        let mid = (lo + hi) / 2;
        if x[mid] <= t {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo
}

/// Cubic Hermite value and derivative on segment `i` at `t`.
#[inline]
pub fn hermite_segment(x: &[f64], f: &[f64], df: &[f64], i: usize, t: f64) -> (f64, f64) {
    let h = x[i + 1] - x[i];
    let s = (t - x[i]) / h;
    let (f0, f1, d0, d1) = (f[i], f[i + 1], df[i] * h, df[i + 1] * h);
    let s2 = s * s;
    let s3 = s2 * s;
    let h00 = 2.0 * s3 - 3.0 * s2 + 1.0;
    let h10 = s3 - 2.0 * s2 + s;
    let h01 = -2.0 * s3 + 3.0 * s2;
    let h11 = s3 - s2;
    let v = h00 * f0 + h10 * d0 + h01 * f1 + h11 * d1;
    let dh00 = 6.0 * s2 - 6.0 * s;
    let dh10 = 3.0 * s2 - 4.0 * s + 1.0;
    let dh01 = -6.0 * s2 + 6.0 * s;
    let dh11 = 3.0 * s2 - 2.0 * s;
    let dv = (dh00 * f0 + dh10 * d0 + dh01 * f1 + dh11 * d1) / h;
    (v, dv)
}
