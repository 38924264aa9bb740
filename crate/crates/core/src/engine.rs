//! Evans function evaluation by continuous orthogonalization.
//!
//! Each side integrates an orthonormal frame `Q' = (I - QQ*) A Q` together
//! with `(log r)' = tr(Q* A Q) - sigma`, where `sigma` is the eigenvalue sum
//! of the tracked limiting subspace. With the initial data normalized as
//! `W ~ e^{mu x} V` at the truncation point the shift cancels exactly, so
//! `D = det[Q+ | Q-](0) * r+ * r-` does not depend on the truncation length.

use crate::kato::{eigen_seed, kato_propagate, AnalyticBasis, Half, KatoOptions};
use crate::numerics::cmatrix::CMatrix;
use crate::numerics::logc::LogComplex;
use crate::numerics::ode::{integrate_observed, OdeOptions, StepAction};
use crate::numerics::orth::{orthonormality_drift, orthonormalize};
use crate::systems::{half_basis, EvansSystem};
use crate::{Error, Result, C64};
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EngineOptions {
    pub rtol: f64,
    pub atol: f64,
    /// Re-orthonormalize after a step once `max |Q*Q - I|` reaches this.
    pub reorth_drift: f64,
    pub max_steps: usize,
}

impl Default for EngineOptions {
    fn default() -> Self {
        EngineOptions { rtol: 1e-8, atol: 1e-10, reorth_drift: 1e-10, max_steps: 1_000_000 }
    }
}

/// Frame and accumulated log radius at the matching point.
#[derive(Clone, Debug)]
pub struct SideState {
    pub q: CMatrix,
    /// Natural log of the radial factor (imaginary part unwrapped).
    pub log_r: C64,
    pub n_rhs: usize,
    pub n_reorth: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvansValue {
    pub lambda: C64,
    pub xi: f64,
    pub d: LogComplex,
    /// Radial factors of the `+` and `-` sides.
    pub side_logs: [LogComplex; 2],
    /// Determinant of the concatenated orthonormal frames at the matching
    /// point.
    pub det0: C64,
    /// Right-hand-side evaluations over both sides.
    pub cost: usize,
}

/// Coefficient family `A(s; lambda)` on a bounded interval with known
/// limits at both ends.
pub trait EvansOde: Sync {
    fn n(&self) -> usize;
    fn domain(&self) -> (f64, f64);
    fn fill_matrix(&self, s: f64, lambda: C64, out: &mut CMatrix);
    fn limit_plus(&self, lambda: C64) -> CMatrix;
    fn limit_minus(&self, lambda: C64) -> CMatrix;
    fn xi(&self) -> f64 {
        0.0
    }
}

impl EvansOde for EvansSystem {
    fn n(&self) -> usize {
        EvansSystem::n(self)
    }
    fn domain(&self) -> (f64, f64) {
        EvansSystem::domain(self)
    }
    fn fill_matrix(&self, s: f64, lambda: C64, out: &mut CMatrix) {
        EvansSystem::fill_matrix(self, s, lambda, out)
    }
    fn limit_plus(&self, lambda: C64) -> CMatrix {
        EvansSystem::limit_plus(self, lambda)
    }
    fn limit_minus(&self, lambda: C64) -> CMatrix {
        EvansSystem::limit_minus(self, lambda)
    }
    fn xi(&self) -> f64 {
        self.xi
    }
}

const DEGENERACY: f64 = 1e-14;

fn pack(q: &CMatrix, l: C64, out: &mut [f64]) {
    for (i, z) in q.data().iter().enumerate() {
        out[2 * i] = z.re;
        out[2 * i + 1] = z.im;
    }
    let m = q.data().len();
    out[2 * m] = l.re;
    out[2 * m + 1] = l.im;
}

fn unpack(y: &[f64], q: &mut CMatrix) -> C64 {
    let m = q.data().len();
    for (i, z) in q.data_mut().iter_mut().enumerate() {
        *z = C64::new(y[2 * i], y[2 * i + 1]);
    }
    C64::new(y[2 * m], y[2 * m + 1])
}

/// Integrate one side from its truncation point to 0, starting from the
/// (not necessarily orthonormal) Kato frame.
pub fn evaluate_side<S: EvansOde + ?Sized>(sys: &S, lambda: C64, half: Half, frame: &CMatrix, opts: &EngineOptions) -> Result<SideState> {
    let n = sys.n();
    let k = frame.cols();
    if frame.rows() != n {
        return Err(Error::InvalidParam(format!("frame has {} rows, system has {n}", frame.rows())));
    }
    let (lo, hi) = sys.domain();
    let (start, limit) = match half {
        Half::Stable => (hi, sys.limit_plus(lambda)),
        Half::Unstable => (lo, sys.limit_minus(lambda)),
    };
    let (_, sigma, kk) = half_basis(&limit, half == Half::Stable, lambda)?;
    if kk != k {
        return Err(Error::SplittingCount { lambda, k_plus: k, k_minus: kk, n });
    }
    let (q0, r0) = orthonormalize(frame)?;
    let mut log_r = r0.det().ln();
    let mut y = vec![0.0; 2 * (n * k + 1)];
    pack(&q0, C64::new(0.0, 0.0), &mut y);

    let mut a = CMatrix::zeros(n, n);
    let mut q = CMatrix::zeros(n, k);
    let mut aq = CMatrix::zeros(n, k);
    let mut qhaq = CMatrix::zeros(k, k);
    let mut dq = CMatrix::zeros(n, k);
    let rhs = |s: f64, y: &[f64], dy: &mut [f64]| {
        unpack(y, &mut q);
        sys.fill_matrix(s, lambda, &mut a);
        a.mul_into(&q, &mut aq);
        q.adjoint().mul_into(&aq, &mut qhaq);
        q.mul_into(&qhaq, &mut dq);
        let dl = qhaq.trace() - sigma;
        let out = &aq - &dq;
        pack(&out, dl, dy);
    };

    let mut acc = C64::new(0.0, 0.0);
    let mut n_reorth = 0;
    let mut qs = CMatrix::zeros(n, k);
    let observe = |_s: f64, y: &mut [f64]| {
        let mut action = StepAction::Continue;
        let mut l = unpack(y, &mut qs);
        if orthonormality_drift(&qs) >= opts.reorth_drift {
            match orthonormalize(&qs) {
                Ok((qn, r)) => {
                    l += r.det().ln();
                    qs = qn;
                    n_reorth += 1;
                    action = StepAction::Modified;
                }
                Err(_) => return StepAction::Stop,
            }
        }
        if l.norm() > 1.0 {
            acc += l;
            l = C64::new(0.0, 0.0);
            action = StepAction::Modified;
        }
        if action == StepAction::Modified {
            pack(&qs, l, y);
        }
        action
    };
    let ode = OdeOptions { rtol: opts.rtol, atol: opts.atol, max_steps: opts.max_steps, ..Default::default() };
    let res = integrate_observed(rhs, start, 0.0, &y, &ode, observe)?;
    if res.stopped {
        return Err(Error::FrameDegeneracy(lambda));
    }
    let mut qf = CMatrix::zeros(n, k);
    let lf = unpack(&res.y, &mut qf);
    let (qn, r) = orthonormalize(&qf)?;
    log_r += acc + lf + r.det().ln();
    Ok(SideState { q: qn, log_r, n_rhs: res.stats.n_rhs, n_reorth })
}

/// Unnormalized Evans function at `lambda` from Kato frames of the stable
/// subspace at `+` and the unstable subspace at `-`.
pub fn evaluate<S: EvansOde + ?Sized>(
    sys: &S,
    lambda: C64,
    frame_plus: &CMatrix,
    frame_minus: &CMatrix,
    opts: &EngineOptions,
) -> Result<EvansValue> {
    let n = sys.n();
    if frame_plus.cols() + frame_minus.cols() != n {
        return Err(Error::SplittingCount { lambda, k_plus: frame_plus.cols(), k_minus: frame_minus.cols(), n });
    }
    let plus = evaluate_side(sys, lambda, Half::Stable, frame_plus, opts)?;
    let minus = evaluate_side(sys, lambda, Half::Unstable, frame_minus, opts)?;
    let det0 = plus.q.hcat(&minus.q).det();
    if !(det0.norm() >= DEGENERACY) {
        return Err(Error::FrameDegeneracy(lambda));
    }
    let d = LogComplex::from_complex(det0) * LogComplex::from_ln(plus.log_r + minus.log_r);
    Ok(EvansValue {
        lambda,
        xi: sys.xi(),
        d,
        side_logs: [LogComplex::from_ln(plus.log_r), LogComplex::from_ln(minus.log_r)],
        det0,
        cost: plus.n_rhs + minus.n_rhs,
    })
}

/// Divide every value by the one at `lambda_star`.
pub fn normalize(values: &[EvansValue], lambda_star: C64) -> Result<Vec<EvansValue>> {
    let star = values
        .iter()
        .find(|v| v.lambda == lambda_star)
        .ok_or_else(|| Error::InvalidParam(format!("lambda* = {lambda_star} is not among the values")))?;
    if star.d.zero || !star.d.log10_mod.is_finite() {
        return Err(Error::ZeroAtNormalization);
    }
    let inv = star.d.recip();
    Ok(values.iter().map(|v| EvansValue { d: v.d * inv, ..*v }).collect())
}

/// Kato bases of the stable `+` and unstable `-` subspaces along `path`,
/// seeded by eigenvector frames at `path[0]`.
pub fn bases_along<S: EvansOde + ?Sized>(
    sys: &S,
    path: &[C64],
    opts: &KatoOptions,
) -> Result<(AnalyticBasis, AnalyticBasis)> {
    let l0 = *path.first().ok_or_else(|| Error::InvalidParam("empty path".into()))?;
    let sp = eigen_seed(&sys.limit_plus(l0), Half::Stable)?;
    let sm = eigen_seed(&sys.limit_minus(l0), Half::Unstable)?;
    let bp = kato_propagate(|l| sys.limit_plus(l), Half::Stable, path, &sp, opts)?;
    let bm = kato_propagate(|l| sys.limit_minus(l), Half::Unstable, path, &sm, opts)?;
    Ok((bp, bm))
}
