use evans_core::gas::{compute_profile, solve_endstates, Frame, GasModel, ProfileOptions, ShockProfile};
use evans_core::numerics::cmatrix::{c, cr, CMatrix};
use evans_core::numerics::eig::eig_small;
use evans_core::numerics::ode::{integrate_adaptive, OdeOptions};
use evans_core::systems::{
    assemble_euler_1d, assemble_euler_2d, assemble_lagrange_1d, assemble_pseudo_lagrangian, splitting, Conjugator,
};
use evans_core::C64;
use std::sync::Arc;

const GAMMA: f64 = 5.0 / 3.0;

fn profiles(up: f64) -> (Arc<ShockProfile>, Arc<ShockProfile>) {
    let (ends, a) = solve_endstates(GAMMA, up).unwrap();
    let m = GasModel::new(GAMMA, a);
    let o = ProfileOptions::default();
    (
        Arc::new(compute_profile(&m, &ends, Frame::Eulerian, &o).unwrap()),
        Arc::new(compute_profile(&m, &ends, Frame::Lagrangian, &o).unwrap()),
    )
}

/// Deterministic pseudo-random sequence in [0, 1).
fn lcg(state: &mut u64) -> f64 {
    *state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
    (*state >> 11) as f64 / (1u64 << 53) as f64
}

#[test]
fn euler_rows_at_zero_frequency_and_minus_limit() {
    let (e, _) = profiles(0.2733);
    let sys = assemble_euler_1d(e.clone()).unwrap();
    let m = sys.matrix_at(0.3, cr(0.0));
    for j in 0..3 {
        assert_eq!(m[(0, j)], cr(0.0));
        assert_eq!(m[(1, j)], cr(0.0));
    }
    let lam = c(0.7, 0.2);
    let beta = 1.0 + e.model.a * GAMMA;
    let want = CMatrix::from_rows(&[
        vec![-lam, cr(0.0), -lam],
        vec![-lam, cr(0.0), cr(0.0)],
        vec![cr(-beta), cr(1.0), cr(2.0 - beta)],
    ]);
    assert!((&sys.limit_minus(lam) - &want).norm() < 1e-14);
}

#[test]
fn lagrange_minus_limit() {
    let (_, l) = profiles(0.2733);
    let sys = assemble_lagrange_1d(l.clone()).unwrap();
    let lam = c(1.0, 1.0);
    let alpha = l.model.a * GAMMA;
    let want = CMatrix::from_rows(&[
        vec![-lam, cr(0.0), cr(1.0)],
        vec![cr(0.0), cr(0.0), cr(1.0)],
        vec![lam * alpha, lam, cr(1.0 - alpha)],
    ]);
    assert!((&sys.limit_minus(lam) - &want).norm() < 1e-14);
    let m0 = sys.matrix_at(0.0, cr(0.0));
    assert_eq!(m0[(2, 1)], cr(0.0));
}

#[test]
fn limits_match_interior_at_truncation() {
    let (e, l) = profiles(0.001);
    let el = assemble_euler_1d(e.clone()).unwrap();
    let pl = assemble_pseudo_lagrangian(&el).unwrap();
    let lg = assemble_lagrange_1d(l).unwrap();
    let e2 = assemble_euler_2d(e.clone(), 0.6, 0.75, -0.5).unwrap();
    let lam = c(2.0, -1.0);
    for sys in [&el, &pl, &lg, &e2] {
        let (lo, hi) = sys.domain();
        let dp = (&sys.matrix_at(hi, lam) - &sys.limit_plus(lam)).norm() / sys.limit_plus(lam).norm();
        let dm = (&sys.matrix_at(lo, lam) - &sys.limit_minus(lam)).norm() / sys.limit_minus(lam).norm();
        // the truncated profile sits 1e-8 * jump from the endstate, which is a
        // relative offset of that size divided by u+ for 1/u entries
        let up = e.ends.u_plus;
        let tol_p = 1e-8_f64.max(10.0 * (e.eval(e.domain().1).0 - up).abs() / up);
        assert!(dp < tol_p && dm < 1e-7, "{:?}: {dp:e} {dm:e}", sys.frame);
    }
}

#[test]
fn splitting_counts() {
    let (e, l) = profiles(0.001);
    let el = assemble_euler_1d(e.clone()).unwrap();
    let lg = assemble_lagrange_1d(l).unwrap();
    let r = 1e-3;
    let big_r = (0.5 + GAMMA.sqrt()).powi(2);
    for sys in [&el, &lg] {
        let s = splitting(sys, cr(1.0)).unwrap();
        assert_eq!((s.k_plus, s.k_minus_unstable), (2, 1));
        for lam in [r, big_r, 0.5, 10.0] {
            splitting(sys, cr(lam)).unwrap();
        }
    }
    let (e6, _) = profiles(0.06);
    let e2 = assemble_euler_2d(e6.clone(), 1.0, 0.75, -0.5).unwrap();
    let s = splitting(&e2, cr(1.0)).unwrap();
    assert_eq!((s.k_plus, s.k_minus_unstable), (3, 2));
    let p2 = assemble_pseudo_lagrangian(&e2).unwrap();
    let s = splitting(&p2, c(0.3, 2.0)).unwrap();
    assert_eq!((s.k_plus, s.k_minus_unstable), (3, 2));
}

#[test]
fn conjugator_determinants() {
    let (e, _) = profiles(0.2733);
    let cj = Conjugator::new(e.clone()).unwrap();
    for &x in &[-3.0, -0.5, 0.0, 0.4, 2.0] {
        let u = e.eval(x).0;
        assert!((cj.m2_of_u(u).det() - cr(u)).norm() < 1e-13);
        let t = cj.t_at(x);
        assert!((t.det() - cr(-1.0 / (u * u))).norm() < 1e-12 / (u * u));
        let ti = cj.t_inv_of_u(u);
        assert!((&(&t * &ti) - &CMatrix::identity(3)).norm() < 1e-13 / u);
    }
    assert!((cj.det_t0 + 1.0 / (0.5 * 1.2733f64).powi(2)).abs() < 1e-10);
}

#[test]
fn endstate_conjugation_is_exact() {
    for &up in &[0.2733, 0.001] {
        let (e, l) = profiles(up);
        let el = assemble_euler_1d(e.clone()).unwrap();
        let lg = assemble_lagrange_1d(l).unwrap();
        let cj = Conjugator::new(e.clone()).unwrap();
        for lam in [cr(1.0), c(1.0, 1.0), c(0.0, 5.0)] {
            for (t, a, b, rho) in [
                (cj.t_plus(), el.limit_plus(lam), lg.limit_plus(lam), e.ends.rho_plus),
                (cj.t_minus(), el.limit_minus(lam), lg.limit_minus(lam), 1.0),
            ] {
                let ti = t.inverse().unwrap();
                let conj = (&(&ti * &a) * &t).scale_re(1.0 / rho);
                let r = (&conj - &b).norm() / b.norm();
                assert!(r < 1e-12, "u+={up} lambda={lam}: {r:e}");
            }
        }
    }
}

#[test]
fn interior_conjugation_identity() {
    let (e, l) = profiles(0.2733);
    let el = assemble_euler_1d(e.clone()).unwrap();
    let lg = assemble_lagrange_1d(l).unwrap();
    let cj = Conjugator::new(e.clone()).unwrap();
    let mut st = 7u64;
    let mut lams = vec![cr(1.0), c(1.0, 1.0), c(0.0, 5.0)];
    for _ in 0..17 {
        lams.push(c(3.0 * lcg(&mut st), 6.0 * lcg(&mut st) - 3.0));
    }
    let (lo, hi) = el.domain();
    let mut worst = 0.0f64;
    for lam in lams {
        let x = -4.0 + 8.0 * lcg(&mut st);
        let x = x.clamp(lo, hi);
        let b = lg.matrix_at(e.y_of_x(x), lam);
        let t = cj.transform(x, lam, &el.matrix_at(x, lam));
        worst = worst.max((&b - &t).max_abs());
    }
    assert!(worst <= 1e-8, "{worst:e}");
}

#[test]
fn opposite_pressure_sign_breaks_conjugation() {
    let (e, l) = profiles(0.2733);
    let el = assemble_euler_1d(e.clone()).unwrap();
    let lg = assemble_lagrange_1d(l.clone()).unwrap();
    let cj = Conjugator::new(e.clone()).unwrap();
    let lam = c(1.0, 1.0);
    let ti = cj.t_plus().inverse().unwrap();
    let conj = (&(&ti * &el.limit_plus(lam)) * &cj.t_plus()).scale_re(1.0 / e.ends.rho_plus);
    // same limit with P' = -a gamma tau^{-gamma-1}
    let tau = l.ends.tau_plus;
    let alpha = -l.model.a * GAMMA * tau.powf(-GAMMA - 1.0);
    let mut flipped = lg.limit_plus(lam);
    flipped[(2, 0)] = lam * alpha * tau;
    flipped[(2, 2)] = cr(tau * (1.0 - alpha));
    assert!((&conj - &flipped).max_abs() > 1.0);
}

#[test]
fn hyperbolic_mode_asymptotics() {
    let (e, l) = profiles(0.2733);
    let el = assemble_euler_1d(e.clone()).unwrap();
    let lg = assemble_lagrange_1d(l).unwrap();
    let pl = assemble_pseudo_lagrangian(&el).unwrap();
    let cconst = 5.0;
    for k in 0..=8 {
        let lam = 10f64.powf(2.0 + 2.0 * k as f64 / 8.0);
        for m in [lg.limit_plus(cr(lam)), lg.limit_minus(cr(lam)), pl.limit_plus(cr(lam)), pl.limit_minus(cr(lam))] {
            let ev = eig_small(&m).unwrap().eigenvalues;
            let d = ev.iter().map(|nu| (nu + lam).norm()).fold(f64::INFINITY, f64::min);
            assert!(d <= cconst * lam.sqrt(), "lambda={lam}: {d}");
        }
        for &x in &[-2.0, 0.0, 1.0] {
            let rho = 1.0 / e.eval(x).0;
            let ev = eig_small(&el.matrix_at(x, cr(lam))).unwrap().eigenvalues;
            let d = ev.iter().map(|mu| (mu + rho * lam).norm()).fold(f64::INFINITY, f64::min);
            assert!(d <= cconst * lam.sqrt(), "x={x} lambda={lam}: {d}");
        }
    }
}

#[test]
fn limit_eigenvalues_scale_by_density() {
    let (e, _) = profiles(0.06);
    let el = assemble_euler_1d(e.clone()).unwrap();
    let pl = assemble_pseudo_lagrangian(&el).unwrap();
    let lam = c(0.8, 0.3);
    for (a, b, rho) in [
        (el.limit_plus(lam), pl.limit_plus(lam), e.ends.rho_plus),
        (el.limit_minus(lam), pl.limit_minus(lam), 1.0),
    ] {
        let mu = eig_small(&a).unwrap().eigenvalues;
        let nu = eig_small(&b).unwrap().eigenvalues;
        for (m, n) in mu.iter().zip(&nu) {
            assert!((m - n * rho).norm() < 1e-10 * m.norm().max(1.0));
        }
    }
}

#[test]
fn xi_zero_decouples() {
    let (e, _) = profiles(0.06);
    let e2 = assemble_euler_2d(e.clone(), 0.0, 0.75, -0.5).unwrap();
    let p2 = assemble_pseudo_lagrangian(&e2).unwrap();
    let e1 = assemble_euler_1d(e.clone()).unwrap();
    for lam in [cr(1.0), c(0.5, 3.0)] {
        assert!(e2.xi0_coupling(lam) <= 1e-12);
        assert!(p2.xi0_coupling(lam) <= 1e-12);
        // the (f1, f2, v1) block is the 1D matrix
        let m2 = e2.matrix_at(0.2, lam);
        let m1 = e1.matrix_at(0.2, lam);
        assert!((&m2.block(0, 0, 3, 3) - &m1).norm() < 1e-14);
    }
    let e2b = assemble_euler_2d(e, 0.5, 0.75, -0.5).unwrap();
    assert!(e2b.xi0_coupling(cr(1.0)) > 1e-3);
}

fn pack(v: &[C64]) -> Vec<f64> {
    v.iter().flat_map(|z| [z.re, z.im]).collect()
}

fn unpack(v: &[f64]) -> Vec<C64> {
    v.chunks(2).map(|p| c(p[0], p[1])).collect()
}

#[test]
fn euler_2d_second_order_residual() {
    let (e, _) = profiles(0.2733);
    let (mu, eta, xi) = (0.75, -0.5, 0.7);
    let nu = 2.0 * mu + eta;
    let sys = assemble_euler_2d(e.clone(), xi, mu, eta).unwrap();
    let lam = c(1.0, 0.5);
    let split = splitting(&sys, lam).unwrap();
    let (_, hi) = sys.domain();
    let h = 0.01;
    let x0 = -1.0;
    let npts = ((hi - x0) / h).floor() as usize;
    let opts = OdeOptions::tol(1e-13, 1e-15);
    // decaying solution: integrate a stable vector from +M down to x0
    let mut y = pack(&split.stable_plus.column(0));
    let mut t = x0 + npts as f64 * h;
    y = integrate_adaptive(|s, w, d| rhs(&sys, lam, s, w, d), hi, t, &y, &opts).unwrap().y;
    let mut samples = vec![unpack(&y)];
    for _ in 0..npts {
        let tn = t - h;
        y = integrate_adaptive(|s, w, d| rhs(&sys, lam, s, w, d), t, tn, &y, &opts).unwrap().y;
        samples.push(unpack(&y));
        t = tn;
    }
    samples.reverse();
    let xs: Vec<f64> = (0..samples.len()).map(|k| x0 + k as f64 * h).collect();
    let scale = samples.iter().map(|w| w.iter().map(|z| z.norm()).fold(0.0, f64::max)).fold(0.0, f64::max);
    let fields: Vec<[C64; 3]> = samples
        .iter()
        .zip(&xs)
        .map(|(w, &x)| {
            let ub = e.eval(x).0;
            let rho = -(w[0] + w[2] / ub) / ub;
            [rho, w[2], w[3]]
        })
        .collect();
    let d1 = |k: usize, i: usize| {
        (fields[k - 2][i] - fields[k - 1][i] * 8.0 + fields[k + 1][i] * 8.0 - fields[k + 2][i]) / (12.0 * h)
    };
    let d2 = |k: usize, i: usize| {
        (-fields[k - 2][i] + fields[k - 1][i] * 16.0 - fields[k][i] * 30.0 + fields[k + 1][i] * 16.0 - fields[k + 2][i])
            / (12.0 * h * h)
    };
    let a = e.model.a;
    let ixi = c(0.0, xi);
    let mut worst = 0.0f64;
    for k in 2..fields.len() - 2 {
        let x = xs[k];
        let (ub, dub) = e.eval(x);
        let rb = 1.0 / ub;
        let drb = -dub / (ub * ub);
        let p1 = a * GAMMA * rb.powf(GAMMA - 1.0);
        let dp1 = a * GAMMA * (GAMMA - 1.0) * rb.powf(GAMMA - 2.0) * drb;
        let [rho, v1, v2] = fields[k];
        let (rho1, v11, v21) = (d1(k, 0), d1(k, 1), d1(k, 2));
        let (v12, v22) = (d2(k, 1), d2(k, 2));
        let mass = lam * rho + (v1 * drb + v11 * rb + rho * dub + rho1 * ub) + ixi * rb * v2;
        // (2 v1 + (u^2 + p') rho)'
        let flux1 = v11 * 2.0 + rho * (2.0 * ub * dub + dp1) + rho1 * (ub * ub + p1);
        let mom1 = lam * (rb * v1 + ub * rho) + flux1 + ixi * v2 - (v12 * nu - v1 * (mu * xi * xi) + ixi * (mu + eta) * v21);
        let mom2 = lam * rb * v2 + v21 + ixi * p1 * rho - (v22 * mu + ixi * (mu + eta) * v11 - v2 * (nu * xi * xi));
        worst = worst.max(mass.norm()).max(mom1.norm()).max(mom2.norm());
    }
    assert!(worst / scale <= 1e-6, "{:e}", worst / scale);
}

fn rhs(sys: &evans_core::systems::EvansSystem, lam: C64, s: f64, w: &[f64], d: &mut [f64]) {
    let m = sys.matrix_at(s, lam);
    let out = m.mul_vec(&unpack(w));
    d.copy_from_slice(&pack(&out));
}
