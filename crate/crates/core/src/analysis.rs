//! Checks of the structural relations between the Evans functions.

use crate::contour::{adaptive_evaluate, winding, Contour, ContourImage, RefineOptions, SystemEvaluator};
use crate::engine::{evaluate, EngineOptions, EvansOde};
use crate::kato::{eigen_seed, kato_continue, Half, KatoOptions};
use crate::numerics::cmatrix::CMatrix;
use crate::numerics::logc::LogComplex;
use crate::systems::{half_basis, Conjugator, EvansSystem, SystemFrame};
use crate::{Error, Result, C64};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Which limiting matrices supply the exponents `nu+-`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NuConvention {
    /// Eigenvalue sums of the Lagrangian limits `B+-`.
    Lagrangian,
    /// Eigenvalue sums of the Eulerian limits `A+-`.
    Eulerian,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct EvrelSample {
    pub lambda: C64,
    pub d_euler: LogComplex,
    pub d_lagrange: LogComplex,
    /// `det T(0) exp(-nu+ Delta+ + nu- Delta-) D_L`.
    pub rhs: LogComplex,
    pub rel_err: f64,
    /// Error with the exponent sign reversed, `exp(nu+ Delta+ - nu- Delta-)`.
    pub rel_err_reversed: f64,
    pub nu_plus: C64,
    pub nu_minus: C64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct EvrelReport {
    pub convention: NuConvention,
    pub det_t0: f64,
    pub delta_plus: f64,
    pub delta_minus: f64,
    pub lambda_star: C64,
    pub samples: Vec<EvrelSample>,
    pub max_rel_err: f64,
    pub max_rel_err_reversed: f64,
}

/// Eulerian and Lagrangian Evans functions at `lambdas`, with Lagrangian
/// seeds `T+-^{-1} R+-` obtained from the Eulerian seeds at `lambda_star`
/// and each side carried independently by its own Kato flow.
pub fn check_evrel(
    euler: &EvansSystem,
    lagrange: &EvansSystem,
    lambdas: &[C64],
    lambda_star: C64,
    convention: NuConvention,
    engine: &EngineOptions,
    kato: &KatoOptions,
) -> Result<EvrelReport> {
    if euler.frame != SystemFrame::Eulerian1d || lagrange.frame != SystemFrame::Lagrangian1d {
        return Err(Error::InvalidParam("evrel needs a 1D Eulerian and a 1D Lagrangian system".into()));
    }
    let cj = Conjugator::new(euler.profile.clone())?;
    let ymap = euler.profile.y_map.as_ref().ok_or_else(|| Error::InvalidParam("Eulerian profile has no y map".into()))?;
    let (dp, dm) = (ymap.delta_plus, ymap.delta_minus);
    let up = euler.profile.ends.u_plus;
    let rp = eigen_seed(&euler.limit_plus(lambda_star), Half::Stable)?;
    let rm = eigen_seed(&euler.limit_minus(lambda_star), Half::Unstable)?;
    let sp = &cj.t_inv_of_u(up) * &rp;
    let sm = &cj.t_inv_of_u(1.0) * &rm;

    let samples = lambdas
        .par_iter()
        .map(|&lam| {
            let carry = |sys: &EvansSystem, fp: &CMatrix, fm: &CMatrix| -> Result<(CMatrix, CMatrix)> {
                Ok((
                    kato_continue(&|l| sys.limit_plus(l), Half::Stable, lambda_star, fp, lam, kato)?,
                    kato_continue(&|l| sys.limit_minus(l), Half::Unstable, lambda_star, fm, lam, kato)?,
                ))
            };
            let (ep, em) = carry(euler, &rp, &rm)?;
            let (lp, lm) = carry(lagrange, &sp, &sm)?;
            let de = evaluate(euler, lam, &ep, &em, engine)?;
            let dl = evaluate(lagrange, lam, &lp, &lm, engine)?;
            let (nu_p, nu_m) = match convention {
                NuConvention::Lagrangian => (
                    half_basis(&lagrange.limit_plus(lam), true, lam)?.1,
                    half_basis(&lagrange.limit_minus(lam), false, lam)?.1,
                ),
                NuConvention::Eulerian => (
                    half_basis(&euler.limit_plus(lam), true, lam)?.1,
                    half_basis(&euler.limit_minus(lam), false, lam)?.1,
                ),
            };
            let base = LogComplex::from_complex(C64::new(cj.det_t0, 0.0)) * dl.d;
            let rhs = base * LogComplex::from_ln(-nu_p * dp + nu_m * dm);
            let rev = base * LogComplex::from_ln(nu_p * dp - nu_m * dm);
            Ok(EvrelSample {
                lambda: lam,
                d_euler: de.d,
                d_lagrange: dl.d,
                rhs,
                rel_err: de.d.rel_diff(&rhs),
                rel_err_reversed: de.d.rel_diff(&rev),
                nu_plus: nu_p,
                nu_minus: nu_m,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let max_rel_err = samples.iter().map(|s| s.rel_err).fold(0.0, f64::max);
    let max_rel_err_reversed = samples.iter().map(|s| s.rel_err_reversed).fold(0.0, f64::max);
    Ok(EvrelReport {
        convention,
        det_t0: cj.det_t0,
        delta_plus: dp,
        delta_minus: dm,
        lambda_star,
        samples,
        max_rel_err,
        max_rel_err_reversed,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GrowthModel {
    Sqrt,
    Linear,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LineFit {
    pub intercept: f64,
    pub slope: f64,
    pub r2: f64,
    pub rss: f64,
}

fn line_fit(x: &[f64], y: &[f64]) -> LineFit {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let syy: f64 = y.iter().map(|b| (b - my) * (b - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let rss: f64 = x.iter().zip(y).map(|(a, b)| (b - intercept - slope * a).powi(2)).sum();
    let r2 = if syy > 0.0 { 1.0 - rss / syy } else { 1.0 };
    LineFit { intercept, slope, r2, rss }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct HighFreqFit {
    pub lambdas: Vec<f64>,
    /// `ln |D|`.
    pub log_mod: Vec<f64>,
    /// `ln |D| ~ a + C sqrt(lambda)`.
    pub sqrt_fit: LineFit,
    /// `ln |D| ~ a + C lambda`.
    pub linear_fit: LineFit,
    pub winner: GrowthModel,
}

impl HighFreqFit {
    pub fn coefficient(&self) -> f64 {
        match self.winner {
            GrowthModel::Sqrt => self.sqrt_fit.slope,
            GrowthModel::Linear => self.linear_fit.slope,
        }
    }
}

/// Least-squares fits of `ln |D|` against `sqrt(lambda)` and `lambda`.
pub fn fit_highfreq(lambdas: &[f64], values: &[LogComplex]) -> Result<HighFreqFit> {
    if lambdas.len() != values.len() || lambdas.len() < 3 {
        return Err(Error::InvalidParam("need at least three (lambda, D) pairs".into()));
    }
    let y: Vec<f64> = values.iter().map(|v| v.ln().re).collect();
    let xs: Vec<f64> = lambdas.iter().map(|l| l.sqrt()).collect();
    let sqrt_fit = line_fit(&xs, &y);
    let linear_fit = line_fit(lambdas, &y);
    let winner = if sqrt_fit.rss <= linear_fit.rss { GrowthModel::Sqrt } else { GrowthModel::Linear };
    Ok(HighFreqFit { lambdas: lambdas.to_vec(), log_mod: y, sqrt_fit, linear_fit, winner })
}

/// Geometric grid of `n` real frequencies in `[l0, l1]`.
pub fn highfreq_grid(l0: f64, l1: f64, n: usize) -> Result<Vec<f64>> {
    if !(l0 >= 20.0 && l1 > l0 && n >= 12) {
        return Err(Error::InvalidParam(format!("need 20 <= l0 < l1 and n >= 12, got [{l0}, {l1}], n = {n}")));
    }
    Ok((0..n).map(|k| l0 * (l1 / l0).powf(k as f64 / (n - 1) as f64)).collect())
}

/// Evans function along the real grid, with Kato frames carried point to
/// point from eigenvector seeds at the first frequency.
pub fn real_axis_values<S: EvansOde + ?Sized>(
    sys: &S,
    grid: &[f64],
    engine: &EngineOptions,
    kato: &KatoOptions,
) -> Result<Vec<LogComplex>> {
    let path: Vec<C64> = grid.iter().map(|&l| C64::new(l, 0.0)).collect();
    let (bp, bm) = crate::engine::bases_along(sys, &path, kato)?;
    path.par_iter()
        .enumerate()
        .map(|(k, &lam)| evaluate(sys, lam, &bp.frames[k], &bm.frames[k], engine).map(|v| v.d))
        .collect()
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Xi0Report {
    /// Max coupling entry over the contour points and the profile grid.
    pub coupling_residual: f64,
    pub winding_2d: i64,
    pub winding_1d: i64,
    pub winding_transverse: i64,
    pub windings_equal: bool,
    /// Spread of `D_2D / (D_1D D_T)` over the sampled points.
    pub ratio_spread: f64,
    pub ratio_samples: Vec<LogComplex>,
    /// Spread of `D_2D / D_1D` without the transverse factor.
    pub ratio_spread_1d: f64,
    pub cost_2d: usize,
    pub cost_1d: usize,
}

/// The 2D system at `xi = 0` against the 1D system and the transverse
/// factor on the same contour.
pub fn check_xi0(
    sys2d: &EvansSystem,
    sys1d: &EvansSystem,
    transverse: &EvansSystem,
    contour: &Contour,
    refine: &RefineOptions,
    n_ratio: usize,
) -> Result<Xi0Report> {
    if sys2d.n() != 5 || sys2d.xi != 0.0 {
        return Err(Error::InvalidParam("check_xi0 needs a 2D system at xi = 0".into()));
    }
    let coupling = contour.points().iter().map(|&l| sys2d.xi0_coupling(l)).fold(0.0, f64::max);
    if coupling > 1e-12 {
        return Err(Error::AssemblyInconsistent(coupling));
    }
    let img2 = adaptive_evaluate(&SystemEvaluator::new(sys2d), contour, refine)?;
    let img1 = adaptive_evaluate(&SystemEvaluator::new(sys1d), contour, refine)?;
    let imgt = adaptive_evaluate(&SystemEvaluator::new(transverse), contour, refine)?;
    let (w2, w1, wt) = (winding(&img2).winding, winding(&img1).winding, winding(&imgt).winding);

    // ratio on points shared by the three images (the initial grid)
    let lookup = |img: &ContourImage, s: f64| img.params.iter().position(|&p| p == s).map(|k| img.d[k]);
    let shared: Vec<f64> = contour.params[..contour.params.len() - 1].to_vec();
    let step = (shared.len() / n_ratio.max(1)).max(1);
    let mut ratios = Vec::new();
    let mut ratios_1d = Vec::new();
    for &s in shared.iter().step_by(step) {
        if let (Some(a), Some(b), Some(c)) = (lookup(&img2, s), lookup(&img1, s), lookup(&imgt, s)) {
            ratios.push(a / (b * c));
            ratios_1d.push(a / b);
        }
    }
    let spread_of = |v: &[LogComplex]| {
        let r0 = v.first().copied().unwrap_or(LogComplex::ONE);
        v.iter().map(|r| r.rel_diff(&r0)).fold(0.0, f64::max)
    };
    let spread = spread_of(&ratios);
    let spread_1d = spread_of(&ratios_1d);
    Ok(Xi0Report {
        coupling_residual: coupling,
        winding_2d: w2,
        winding_1d: w1,
        winding_transverse: wt,
        windings_equal: w2 == w1,
        ratio_spread: spread,
        ratio_samples: ratios,
        ratio_spread_1d: spread_1d,
        cost_2d: img2.cost,
        cost_1d: img1.cost,
    })
}
