//! First-order Evans systems W' = A(s; lambda, xi) W in each frame.
//!
//! Unknowns:
//! - Eulerian 1D: `(f1, f2, u)` with `f1 = -(rho_bar u + u_bar rho)` and
//!   `f2 = u' - (u_bar^2 rho + p' rho + 2u)`.
//! - Lagrangian 1D: `(tau, w, w_y)`.
//! - Eulerian 2D: `(f1, f2, v1, v2, g)` with
//!   `f2 = nu v1' + i xi (mu+eta) v2 - (u_bar^2 rho + p' rho + 2 v1)`,
//!   `g = mu v2' + i xi (mu+eta) v1`, `nu = 2 mu + eta`.
//! - Pseudo-Lagrangian: Eulerian unknowns against y, matrix divided by rho_bar.

mod conjugator;

pub use conjugator::Conjugator;

use crate::gas::{Frame, ShockProfile};
use crate::numerics::cmatrix::{c, cr, CMatrix};
use crate::numerics::eig::eig_small;
use crate::numerics::orth::orthonormalize;
use crate::{Error, Result, C64};
use serde::{Deserialize, Serialize};
use std::sync::Arc;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Hash)]
#[serde(rename_all = "snake_case")]
pub enum SystemFrame {
    Eulerian1d,
    Lagrangian1d,
    PseudoLagrangian1d,
    Eulerian2d,
    PseudoLagrangian2d,
    /// The (v2, g) block of the 2D system at xi = 0.
    Transverse2d,
}

impl SystemFrame {
    pub fn dim(&self) -> usize {
        match self {
            SystemFrame::Eulerian1d | SystemFrame::Lagrangian1d | SystemFrame::PseudoLagrangian1d => 3,
            SystemFrame::Eulerian2d | SystemFrame::PseudoLagrangian2d => 5,
            SystemFrame::Transverse2d => 2,
        }
    }

    /// `(k_plus, k_minus_unstable)` on Re lambda > 0.
    pub fn expected_split(&self) -> (usize, usize) {
        match self.dim() {
            3 => (2, 1),
            5 => (3, 2),
            _ => (1, 1),
        }
    }

    pub fn is_pseudo_lagrangian(&self) -> bool {
        matches!(self, SystemFrame::PseudoLagrangian1d | SystemFrame::PseudoLagrangian2d)
    }
}

/// Immutable generator of the coefficient matrix.
#[derive(Clone, Debug)]
pub struct EvansSystem {
    pub frame: SystemFrame,
    pub profile: Arc<ShockProfile>,
    pub xi: f64,
    pub mu: f64,
    pub eta: f64,
}

pub fn assemble_euler_1d(profile: Arc<ShockProfile>) -> Result<EvansSystem> {
    require(&profile, Frame::Eulerian)?;
    Ok(EvansSystem { frame: SystemFrame::Eulerian1d, xi: 0.0, mu: 0.75, eta: -0.5, profile })
}

pub fn assemble_lagrange_1d(profile: Arc<ShockProfile>) -> Result<EvansSystem> {
    require(&profile, Frame::Lagrangian)?;
    Ok(EvansSystem { frame: SystemFrame::Lagrangian1d, xi: 0.0, mu: 0.75, eta: -0.5, profile })
}

pub fn assemble_euler_2d(profile: Arc<ShockProfile>, xi: f64, mu: f64, eta: f64) -> Result<EvansSystem> {
    require(&profile, Frame::Eulerian)?;
    if !(mu > 0.0) || !(mu + eta > 0.0) || !xi.is_finite() {
        return Err(Error::InvalidParam(format!("need mu > 0, mu + eta > 0, finite xi (mu={mu}, eta={eta}, xi={xi})")));
    }
    let sys = EvansSystem { frame: SystemFrame::Eulerian2d, xi, mu, eta, profile };
    if xi == 0.0 {
        let r = sys.xi0_coupling(c(1.0, 0.5));
        if r > 1e-12 {
            return Err(Error::AssemblyInconsistent(r));
        }
    }
    Ok(sys)
}

/// The 2x2 transverse block at xi = 0.
pub fn assemble_transverse_2d(profile: Arc<ShockProfile>, mu: f64) -> Result<EvansSystem> {
    require(&profile, Frame::Eulerian)?;
    Ok(EvansSystem { frame: SystemFrame::Transverse2d, xi: 0.0, mu, eta: 0.0, profile })
}

pub fn assemble_pseudo_lagrangian(base: &EvansSystem) -> Result<EvansSystem> {
    let frame = match base.frame {
        SystemFrame::Eulerian1d => SystemFrame::PseudoLagrangian1d,
        SystemFrame::Eulerian2d => SystemFrame::PseudoLagrangian2d,
        _ => return Err(Error::InvalidParam("pseudo-Lagrangian base must be an Eulerian system".into())),
    };
    if base.profile.y_map.is_none() {
        return Err(Error::InvalidParam("profile has no y map".into()));
    }
    Ok(EvansSystem { frame, ..base.clone() })
}

fn require(p: &ShockProfile, f: Frame) -> Result<()> {
    if p.frame != f {
        return Err(Error::InvalidParam(format!("expected a {f:?} profile, got {:?}", p.frame)));
    }
    Ok(())
}

impl EvansSystem {
    pub fn n(&self) -> usize {
        self.frame.dim()
    }

    /// Interval of the frame's own independent variable.
    pub fn domain(&self) -> (f64, f64) {
        let (a, b) = self.profile.domain();
        if self.frame.is_pseudo_lagrangian() {
            let y = &self.profile.y_map.as_ref().unwrap().y;
            (y[0], *y.last().unwrap())
        } else {
            (a, b)
        }
    }

    pub fn matrix_at(&self, s: f64, lambda: C64) -> CMatrix {
        let mut m = CMatrix::zeros(self.n(), self.n());
        self.fill_matrix(s, lambda, &mut m);
        m
    }

    /// Writes A(s; lambda) into `out` (n x n).
    pub fn fill_matrix(&self, s: f64, lambda: C64, out: &mut CMatrix) {
        match self.frame {
            SystemFrame::Eulerian1d => {
                let u = self.profile.eval(s).0;
                self.euler_1d(u, lambda, 1.0, out);
            }
            SystemFrame::PseudoLagrangian1d => {
                let u = self.profile.eval(self.profile.x_of_y(s)).0;
                self.euler_1d(u, lambda, u, out);
            }
            SystemFrame::Eulerian2d => {
                let u = self.profile.eval(s).0;
                self.euler_2d(u, lambda, 1.0, out);
            }
            SystemFrame::PseudoLagrangian2d => {
                let u = self.profile.eval(self.profile.x_of_y(s)).0;
                self.euler_2d(u, lambda, u, out);
            }
            SystemFrame::Transverse2d => {
                let u = self.profile.eval(s).0;
                self.transverse(u, lambda, out);
            }
            SystemFrame::Lagrangian1d => {
                let j = self.profile.jet(s);
                self.lagrange_1d(j[0], j[1], j[2], lambda, out);
            }
        }
    }

    pub fn limit_plus(&self, lambda: C64) -> CMatrix {
        self.limit(self.profile.ends.u_plus, lambda)
    }

    pub fn limit_minus(&self, lambda: C64) -> CMatrix {
        self.limit(1.0, lambda)
    }

    fn limit(&self, u: f64, lambda: C64) -> CMatrix {
        let mut m = CMatrix::zeros(self.n(), self.n());
        match self.frame {
            SystemFrame::Eulerian1d => self.euler_1d(u, lambda, 1.0, &mut m),
            SystemFrame::PseudoLagrangian1d => self.euler_1d(u, lambda, u, &mut m),
            SystemFrame::Eulerian2d => self.euler_2d(u, lambda, 1.0, &mut m),
            SystemFrame::PseudoLagrangian2d => self.euler_2d(u, lambda, u, &mut m),
            SystemFrame::Transverse2d => self.transverse(u, lambda, &mut m),
            SystemFrame::Lagrangian1d => self.lagrange_1d(u, 0.0, 0.0, lambda, &mut m),
        }
        m
    }

    fn a_gamma(&self) -> (f64, f64) {
        (self.profile.model.a, self.profile.model.gamma)
    }

    /// beta = u + a gamma u^{-gamma}, p' = a gamma u^{1-gamma}.
    #[inline]
    fn beta_dp(&self, u: f64) -> (f64, f64) {
        let (a, g) = self.a_gamma();
        let dp = a * g * u.powf(1.0 - g);
        (u + dp / u, dp)
    }

    #[inline]
    fn euler_1d(&self, u: f64, lambda: C64, scale: f64, m: &mut CMatrix) {
        let rho = 1.0 / u;
        let (beta, _) = self.beta_dp(u);
        let z = cr(0.0);
        let vals = [
            -lambda / u,
            z,
            -lambda * (rho / u),
            -lambda,
            z,
            z,
            cr(-beta),
            cr(1.0),
            cr(2.0 - beta * rho),
        ];
        for (d, v) in m.data_mut().iter_mut().zip(vals) {
            *d = v * scale;
        }
    }

    #[inline]
    fn euler_2d(&self, u: f64, lambda: C64, scale: f64, m: &mut CMatrix) {
        let rho = 1.0 / u;
        let (beta, dp) = self.beta_dp(u);
        let (mu, eta, xi) = (self.mu, self.eta, self.xi);
        let nu = 2.0 * mu + eta;
        let ixi = c(0.0, xi);
        let z = cr(0.0);
        let vals = [
            // f1'
            -lambda / u,
            z,
            -lambda * (rho / u),
            ixi * rho,
            z,
            // f2'
            -lambda,
            z,
            cr(mu * xi * xi),
            ixi,
            z,
            // v1'
            cr(-beta / nu),
            cr(1.0 / nu),
            cr((2.0 - beta * rho) / nu),
            -ixi * ((mu + eta) / nu),
            z,
            // v2'
            z,
            z,
            -ixi * ((mu + eta) / mu),
            z,
            cr(1.0 / mu),
            // g'
            -ixi * (dp / u),
            z,
            -ixi * ((mu + eta) / mu + dp * rho / u),
            lambda * rho + nu * xi * xi,
            cr(1.0 / mu),
        ];
        for (d, v) in m.data_mut().iter_mut().zip(vals) {
            *d = v * scale;
        }
    }

    #[inline]
    fn transverse(&self, u: f64, lambda: C64, m: &mut CMatrix) {
        let mu = self.mu;
        let vals = [cr(0.0), cr(1.0 / mu), lambda / u, cr(1.0 / mu)];
        m.data_mut().copy_from_slice(&vals);
    }

    /// Exact linearization about tau(y) with derivatives `t1 = tau_y`,
    /// `t2 = tau_yy`.
    #[inline]
    fn lagrange_1d(&self, tau: f64, t1: f64, t2: f64, lambda: C64, m: &mut CMatrix) {
        let (a, g) = self.a_gamma();
        let t_2 = tau * tau;
        let pt = a * g * tau.powf(-g - 1.0);
        let alpha = pt - t1 / t_2;
        let alpha_y = -(g + 1.0) * pt / tau * t1 - (t2 / t_2 - 2.0 * t1 * t1 / (t_2 * tau));
        let z = cr(0.0);
        let vals = [
            -lambda,
            z,
            cr(1.0),
            z,
            z,
            cr(1.0),
            (lambda * alpha - alpha_y) * tau,
            lambda * tau,
            cr(tau * (1.0 - alpha) + t1 / tau),
        ];
        m.data_mut().copy_from_slice(&vals);
    }

    /// Max |entry| of the blocks coupling `(f1, f2, v1)` with `(v2, g)`
    /// (Eulerian or pseudo-Lagrangian 2D) sampled over the grid.
    pub fn xi0_coupling(&self, lambda: C64) -> f64 {
        if self.n() != 5 {
            return 0.0;
        }
        let (lo, hi) = self.domain();
        let mut worst = 0.0f64;
        let mut m = CMatrix::zeros(5, 5);
        for k in 0..=200 {
            let s = lo + (hi - lo) * k as f64 / 200.0;
            self.fill_matrix(s, lambda, &mut m);
            for i in 0..5 {
                for j in 0..5 {
                    if (i < 3) != (j < 3) {
                        worst = worst.max(m[(i, j)].norm());
                    }
                }
            }
        }
        worst
    }
}

/// Limiting subspace data at one lambda.
#[derive(Clone, Debug)]
pub struct Splitting {
    pub k_plus: usize,
    pub k_minus_unstable: usize,
    /// Orthonormal basis of the stable subspace of A+, ordered by descending
    /// |Re mu|.
    pub stable_plus: CMatrix,
    /// Orthonormal basis of the unstable subspace of A-.
    pub unstable_minus: CMatrix,
    /// Sum of the stable eigenvalues of A+.
    pub sigma_plus: C64,
    /// Sum of the unstable eigenvalues of A-.
    pub sigma_minus: C64,
}

const SPLIT_MARGIN: f64 = 1e-10;

/// Right eigenvectors of `m` in the requested half, ordered by descending
/// |Re|, with the eigenvalue sum. Fails if any eigenvalue is within the
/// margin of the imaginary axis.
pub fn half_basis(m: &CMatrix, stable: bool, lambda: C64) -> Result<(Vec<Vec<C64>>, C64, usize)> {
    let e = eig_small(m)?;
    for &mu in &e.eigenvalues {
        if mu.re.abs() < SPLIT_MARGIN {
            return Err(Error::SplittingFailure { lambda, mu });
        }
    }
    let mut idx: Vec<usize> = (0..e.n()).filter(|&i| (e.eigenvalues[i].re < 0.0) == stable).collect();
    idx.sort_by(|&a, &b| e.eigenvalues[b].re.abs().partial_cmp(&e.eigenvalues[a].re.abs()).unwrap());
    let sum = idx.iter().map(|&i| e.eigenvalues[i]).sum();
    Ok((idx.iter().map(|&i| e.right[i].clone()).collect(), sum, idx.len()))
}

pub fn splitting(sys: &EvansSystem, lambda: C64) -> Result<Splitting> {
    let n = sys.n();
    let (vp, sp, kp) = half_basis(&sys.limit_plus(lambda), true, lambda)?;
    let (vm, sm, km) = half_basis(&sys.limit_minus(lambda), false, lambda)?;
    if kp + km != n {
        return Err(Error::SplittingCount { lambda, k_plus: kp, k_minus: km, n });
    }
    let (qp, _) = orthonormalize(&CMatrix::from_columns(&vp))?;
    let (qm, _) = orthonormalize(&CMatrix::from_columns(&vm))?;
    Ok(Splitting { k_plus: kp, k_minus_unstable: km, stable_plus: qp, unstable_minus: qm, sigma_plus: sp, sigma_minus: sm })
}
