//! Spectral projectors and analytic bases by discrete Kato stepping.
//!
//! One step from `lambda_k` to `lambda_{k+1}` is
//! `R_{k+1} = P_{k+1} (I + dP^2 / 2) R_k` with `dP = P_{k+1} - P_k`, a second
//! order discretization of `R' = P' R`. Steps whose projector change exceeds
//! `max_dp` are bisected.

use crate::numerics::cmatrix::{vdot, CMatrix};
use crate::numerics::eig::eig_small;
use crate::numerics::orth::orthonormalize;
use crate::systems::half_basis;
use crate::{Error, Result, C64};
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Half {
    Stable,
    Unstable,
}

impl Half {
    fn contains(self, mu: C64) -> bool {
        match self {
            Half::Stable => mu.re < 0.0,
            Half::Unstable => mu.re > 0.0,
        }
    }
}

#[derive(Clone, Debug)]
pub struct Projector {
    pub p: CMatrix,
    pub rank: usize,
}

const SPLIT_MARGIN: f64 = 1e-10;

fn no_lambda() -> C64 {
    C64::new(f64::NAN, f64::NAN)
}

fn with_lambda(e: Error, lambda: C64) -> Error {
    match e {
        Error::SplittingFailure { mu, .. } => Error::SplittingFailure { lambda, mu },
        other => other,
    }
}

/// Spectral projector of `m` onto the invariant subspace of `half`.
pub fn projector(m: &CMatrix, half: Half) -> Result<Projector> {
    let e = eig_small(m)?;
    let n = e.n();
    if let Some(&mu) = e.eigenvalues.iter().find(|mu| mu.re.abs() < SPLIT_MARGIN) {
        return Err(Error::SplittingFailure { lambda: no_lambda(), mu });
    }
    let mut p = CMatrix::zeros(n, n);
    let mut rank = 0;
    for j in 0..n {
        if !half.contains(e.eigenvalues[j]) {
            continue;
        }
        rank += 1;
        let (v, w) = (&e.right[j], &e.left[j]);
        for r in 0..n {
            for c in 0..n {
                p[(r, c)] += v[r] * w[c].conj();
            }
        }
    }
    Ok(Projector { p, rank })
}

/// Orthonormal eigenvector frame of `half`, ordered by descending |Re mu|.
pub fn eigen_seed(m: &CMatrix, half: Half) -> Result<CMatrix> {
    let (v, _, k) = half_basis(m, half == Half::Stable, no_lambda())?;
    if k == 0 {
        return Ok(CMatrix::zeros(m.rows(), 0));
    }
    Ok(orthonormalize(&CMatrix::from_columns(&v))?.0)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct KatoOptions {
    /// Largest allowed Frobenius norm of the projector change per step.
    pub max_dp: f64,
    pub max_depth: u32,
}

impl Default for KatoOptions {
    fn default() -> Self {
        KatoOptions { max_dp: 0.01, max_depth: 20 }
    }
}

#[derive(Clone, Debug)]
pub struct AnalyticBasis {
    pub half: Half,
    pub lambda_path: Vec<C64>,
    pub frames: Vec<CMatrix>,
}

impl AnalyticBasis {
    pub fn len(&self) -> usize {
        self.frames.len()
    }

    pub fn is_empty(&self) -> bool {
        self.frames.is_empty()
    }

    /// Largest `|P(lambda_k) R_k - R_k|` relative to `|R_k|`.
    pub fn range_defect<F: Fn(C64) -> CMatrix>(&self, family: F) -> Result<f64> {
        let mut worst = 0.0f64;
        for (lam, r) in self.lambda_path.iter().zip(&self.frames) {
            let p = projector(&family(*lam), self.half).map_err(|e| with_lambda(e, *lam))?;
            worst = worst.max((&(&p.p * r) - r).norm() / r.norm());
        }
        Ok(worst)
    }
}

/// One unrefined scheme step.
pub fn kato_step(p_old: &CMatrix, p_new: &CMatrix, r: &CMatrix) -> CMatrix {
    let dp = p_new - p_old;
    let dp2r = &dp * &(&dp * r);
    let mut next = p_new * &(r + &dp2r.scale_re(0.5));
    // range repair against roundoff
    next = p_new * &next;
    next
}

struct Stepper<'a, F> {
    family: &'a F,
    half: Half,
    opts: KatoOptions,
}

impl<F: Fn(C64) -> CMatrix> Stepper<'_, F> {
    fn proj(&self, lam: C64) -> Result<CMatrix> {
        let p = projector(&(self.family)(lam), self.half).map_err(|e| with_lambda(e, lam))?;
        Ok(p.p)
    }

    /// Advance `r` from parameter `a` (projector `pa`) to `b` (projector
    /// `pb`) along `path`, bisecting in the parameter while the projector
    /// change is too large.
    #[allow(clippy::too_many_arguments)]
    fn advance(
        &self,
        path: &dyn Fn(f64) -> C64,
        a: f64,
        pa: &CMatrix,
        b: f64,
        pb: &CMatrix,
        r: &CMatrix,
        depth: u32,
    ) -> Result<CMatrix> {
        if (pb - pa).norm() <= self.opts.max_dp {
            return Ok(kato_step(pa, pb, r));
        }
        if depth >= self.opts.max_depth {
            return Err(Error::PathTooCoarse { from: path(a), to: path(b) });
        }
        let mid = 0.5 * (a + b);
        let pm = self.proj(path(mid))?;
        let rm = self.advance(path, a, pa, mid, &pm, r, depth + 1)?;
        self.advance(path, mid, &pm, b, pb, &rm, depth + 1)
    }
}

/// Continue `frame` (a basis of the `half` subspace at `path(from)`) along
/// the curve `path` to `path(to)`.
pub fn kato_continue_along<F: Fn(C64) -> CMatrix>(
    family: &F,
    half: Half,
    path: &dyn Fn(f64) -> C64,
    from: f64,
    frame: &CMatrix,
    to: f64,
    opts: &KatoOptions,
) -> Result<CMatrix> {
    let st = Stepper { family, half, opts: *opts };
    let pa = st.proj(path(from))?;
    let pb = st.proj(path(to))?;
    st.advance(path, from, &pa, to, &pb, frame, 0)
}

/// Continue `frame` along the straight chord from `from` to `to`.
pub fn kato_continue<F: Fn(C64) -> CMatrix>(
    family: &F,
    half: Half,
    from: C64,
    frame: &CMatrix,
    to: C64,
    opts: &KatoOptions,
) -> Result<CMatrix> {
    kato_continue_along(family, half, &|t| from + (to - from) * t, 0.0, frame, 1.0, opts)
}

/// Propagate `seed` along `path` (straight chords between consecutive
/// points).
pub fn kato_propagate<F: Fn(C64) -> CMatrix>(
    family: F,
    half: Half,
    path: &[C64],
    seed: &CMatrix,
    opts: &KatoOptions,
) -> Result<AnalyticBasis> {
    let st = Stepper { family: &family, half, opts: *opts };
    let mut frames = Vec::with_capacity(path.len());
    let Some(&first) = path.first() else {
        return Ok(AnalyticBasis { half, lambda_path: vec![], frames });
    };
    let mut p = st.proj(first)?;
    let mut r = &p * seed;
    if (&r - seed).norm() > 1e-6 * seed.norm().max(1.0) {
        return Err(Error::InvalidParam("Kato seed does not span the requested subspace".into()));
    }
    frames.push(r.clone());
    for w in path.windows(2) {
        let pn = st.proj(w[1])?;
        let (a, b) = (w[0], w[1]);
        r = st.advance(&|t| a + (b - a) * t, 0.0, &p, 1.0, &pn, &r, 0)?;
        frames.push(r.clone());
        p = pn;
    }
    Ok(AnalyticBasis { half, lambda_path: path.to_vec(), frames })
}

/// Maximum relative distance between `T R(lambda)` and `S(lambda)`, where
/// `R` follows `family_a` from an eigenvector seed and `S` follows `family_b`
/// from `T R(lambda_0)`. Expects `family_b = rho^{-1} T family_a T^{-1}`.
pub fn kato_invariance_check<FA, FB>(
    family_a: FA,
    family_b: FB,
    t: &CMatrix,
    rho: f64,
    half: Half,
    path: &[C64],
    opts: &KatoOptions,
) -> Result<f64>
where
    FA: Fn(C64) -> CMatrix,
    FB: Fn(C64) -> CMatrix,
{
    if !(rho > 0.0) {
        return Err(Error::InvalidParam(format!("rho must be positive, got {rho}")));
    }
    let Some(&l0) = path.first() else { return Ok(0.0) };
    let seed = eigen_seed(&family_a(l0), half).map_err(|e| with_lambda(e, l0))?;
    let ra = kato_propagate(&family_a, half, path, &seed, opts)?;
    let rb = kato_propagate(&family_b, half, path, &(t * &seed), opts)?;
    let mut worst = 0.0f64;
    for (r, s) in ra.frames.iter().zip(&rb.frames) {
        let tr = t * r;
        worst = worst.max((&tr - s).norm() / s.norm());
    }
    Ok(worst)
}

/// Largest sine of the principal angles between the column spaces of `a`
/// and `b`.
pub fn subspace_distance(a: &CMatrix, b: &CMatrix) -> Result<f64> {
    let (qa, _) = orthonormalize(a)?;
    let (qb, _) = orthonormalize(b)?;
    let mut worst = 0.0f64;
    for j in 0..qb.cols() {
        let v = qb.column(j);
        let mut res = v.clone();
        for i in 0..qa.cols() {
            let u = qa.column(i);
            let d = vdot(&u, &v);
            for t in 0..res.len() {
                res[t] -= d * u[t];
            }
        }
        worst = worst.max(res.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt());
    }
    Ok(worst)
}
