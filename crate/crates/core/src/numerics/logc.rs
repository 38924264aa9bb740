//! Complex numbers stored as `10^log10_mod * e^{i arg}`.

use crate::C64;
use serde::{Deserialize, Serialize};
use std::f64::consts::{LN_10, PI};
use std::ops::{Div, Mul};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LogComplex {
    pub log10_mod: f64,
    pub arg: f64,
    /// Exact zero; `log10_mod` and `arg` are then meaningless.
    pub zero: bool,
}

impl LogComplex {
    pub const ONE: LogComplex = LogComplex { log10_mod: 0.0, arg: 0.0, zero: false };
    pub const ZERO: LogComplex = LogComplex { log10_mod: 0.0, arg: 0.0, zero: true };

    pub fn new(log10_mod: f64, arg: f64) -> Self {
        LogComplex { log10_mod, arg, zero: false }
    }

    pub fn from_complex(z: C64) -> Self {
        if z.re == 0.0 && z.im == 0.0 {
            return Self::ZERO;
        }
        LogComplex { log10_mod: z.norm().log10(), arg: z.arg(), zero: false }
    }

    /// `exp(w)` for complex `w`, kept in log form.
    pub fn from_ln(w: C64) -> Self {
        LogComplex { log10_mod: w.re / LN_10, arg: w.im, zero: false }
    }

    /// Natural log (real part ln|z|, imaginary part the stored argument).
    pub fn ln(&self) -> C64 {
        C64::new(self.log10_mod * LN_10, self.arg)
    }

    /// Reconstructed value; overflows to infinity outside the f64 range.
    pub fn to_complex(&self) -> C64 {
        if self.zero {
            return C64::new(0.0, 0.0);
        }
        C64::from_polar(10f64.powf(self.log10_mod), self.arg)
    }

    pub fn recip(&self) -> Self {
        LogComplex { log10_mod: -self.log10_mod, arg: -self.arg, zero: self.zero }
    }

    pub fn conj(&self) -> Self {
        LogComplex { log10_mod: self.log10_mod, arg: -self.arg, zero: self.zero }
    }

    pub fn powi(&self, k: i32) -> Self {
        LogComplex { log10_mod: self.log10_mod * k as f64, arg: self.arg * k as f64, zero: self.zero }
    }

    /// Argument shifted by a multiple of 2π to lie within π of `reference`.
    pub fn unwrapped_near(&self, reference: f64) -> Self {
        let k = ((reference - self.arg) / (2.0 * PI)).round();
        LogComplex { arg: self.arg + 2.0 * PI * k, ..*self }
    }

    /// `|1 - self|` evaluated without forming `self` when it is huge or tiny.
    pub fn dist_from_one(&self) -> f64 {
        if self.zero {
            return 1.0;
        }
        if self.log10_mod.abs() > 10.0 {
            return 10f64.powf(self.log10_mod).max(1.0);
        }
        // 1 - e^{w} = -expm1(w)
        let w = self.ln();
        let re = w.re.exp_m1();
        let (s, cth) = w.im.sin_cos();
        // e^{w} - 1 = (e^{re}cos - 1) + i e^{re} sin
        let real = re * cth + (cth - 1.0);
        let imag = (re + 1.0) * s;
        real.hypot(imag)
    }

    /// Relative difference `|1 - self/other|`.
    pub fn rel_diff(&self, other: &LogComplex) -> f64 {
        (*self / *other).dist_from_one()
    }
}

impl Mul for LogComplex {
    type Output = LogComplex;
    fn mul(self, rhs: LogComplex) -> LogComplex {
        if self.zero || rhs.zero {
            return Self::ZERO;
        }
        LogComplex { log10_mod: self.log10_mod + rhs.log10_mod, arg: self.arg + rhs.arg, zero: false }
    }
}

impl Div for LogComplex {
    type Output = LogComplex;
    fn div(self, rhs: LogComplex) -> LogComplex {
        if self.zero {
            return Self::ZERO;
        }
        LogComplex { log10_mod: self.log10_mod - rhs.log10_mod, arg: self.arg - rhs.arg, zero: rhs.zero }
    }
}
