//! Change of variables between the Eulerian and Lagrangian 1D systems.
//!
//! `T(x) = M2(x) diag(-1/tau^2, 1, rho)` with
//! `M2 = [[-u, -rho, 0], [-beta u, -2, 1], [0, 1, 0]]`, so `det T = -rho^2`.
//! At the endstates `B = rho^{-1} T^{-1} A T`. In the interior the exact
//! relation needs the label displacement `f1 / lambda`, giving the
//! lambda-dependent `T_lambda = (S0 + E0 + E1 / lambda)^{-1}` with
//! `B = rho^{-1} T_lambda^{-1} (A T_lambda - T_lambda')`.

use crate::gas::{Frame, ShockProfile};
use crate::numerics::cmatrix::{cr, CMatrix};
use crate::{Error, Result, C64};
use std::sync::Arc;

#[derive(Clone, Debug)]
pub struct Conjugator {
    pub profile: Arc<ShockProfile>,
    pub det_t0: f64,
}

impl Conjugator {
    pub fn new(euler: Arc<ShockProfile>) -> Result<Self> {
        if euler.frame != Frame::Eulerian {
            return Err(Error::InvalidParam("conjugator needs the Eulerian profile".into()));
        }
        let u0 = euler.eval(0.0).0;
        Ok(Conjugator { det_t0: -1.0 / (u0 * u0), profile: euler })
    }

    fn beta(&self, u: f64) -> f64 {
        let m = &self.profile.model;
        u + m.a * m.gamma * u.powf(-m.gamma)
    }

    /// T at velocity `u`.
    pub fn t_of_u(&self, u: f64) -> CMatrix {
        let rho = 1.0 / u;
        let b = self.beta(u);
        CMatrix::from_real_rows(&[vec![rho, -rho, 0.0], vec![b * rho, -2.0, rho], vec![0.0, 1.0, 0.0]])
    }

    /// Second factor of T, before the diagonal scaling.
    pub fn m2_of_u(&self, u: f64) -> CMatrix {
        let b = self.beta(u);
        CMatrix::from_real_rows(&[vec![-u, -1.0 / u, 0.0], vec![-b * u, -2.0, 1.0], vec![0.0, 1.0, 0.0]])
    }

    pub fn t_at(&self, x: f64) -> CMatrix {
        self.t_of_u(self.profile.eval(x).0)
    }

    pub fn t_plus(&self) -> CMatrix {
        self.t_of_u(self.profile.ends.u_plus)
    }

    pub fn t_minus(&self) -> CMatrix {
        self.t_of_u(1.0)
    }

    /// `T^{-1}` in closed form.
    pub fn t_inv_of_u(&self, u: f64) -> CMatrix {
        let b = self.beta(u);
        CMatrix::from_real_rows(&[vec![u, 0.0, 1.0], vec![0.0, 0.0, 1.0], vec![-b * u, u, 2.0 * u - b]])
    }

    /// `(S_lambda, dS_lambda/dx)` at x, where `S_lambda = T_lambda^{-1}`.
    pub fn s_exact(&self, x: f64, lambda: C64) -> (CMatrix, CMatrix) {
        let [u, u1, u2, u3] = self.profile.jet(x);
        let m = &self.profile.model;
        let (a, g) = (m.a, m.gamma);
        let b = self.beta(u);
        let b1 = (1.0 - a * g * g * u.powf(-g - 1.0)) * u1;
        let il = lambda.inv();
        let q = u * u2 + u1 * u1;
        let s = CMatrix::from_rows(&[
            vec![cr(u) - il * (u * u1), cr(0.0), cr(1.0)],
            vec![-il * (u * u1), cr(0.0), cr(1.0)],
            vec![cr(-b * u + u * u1) - il * (u * q), cr(u), cr(2.0 * u - b + u1)],
        ]);
        let dq = 3.0 * u1 * u2 + u * u3;
        let ds = CMatrix::from_rows(&[
            vec![cr(u1) - il * q, cr(0.0), cr(0.0)],
            vec![-il * q, cr(0.0), cr(0.0)],
            vec![cr(-b1 * u - b * u1 + q) - il * (u1 * q + u * dq), cr(u1), cr(2.0 * u1 - b1 + u2)],
        ]);
        (s, ds)
    }

    /// `T_lambda(x)`.
    pub fn exact_at(&self, x: f64, lambda: C64) -> CMatrix {
        self.s_exact(x, lambda).0.inverse().expect("S_lambda is invertible")
    }

    /// `rho^{-1} (S A + S') S^{-1}` with the Eulerian matrix `a` at x.
    pub fn transform(&self, x: f64, lambda: C64, a: &CMatrix) -> CMatrix {
        let (s, ds) = self.s_exact(x, lambda);
        let u = self.profile.eval(x).0;
        let sinv = s.inverse().expect("S_lambda is invertible");
        let inner = &(&s * a) + &ds;
        (&inner * &sinv).scale_re(u)
    }
}
