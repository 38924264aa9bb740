use evans_core::analysis::{check_evrel, check_xi0, fit_highfreq, highfreq_grid, real_axis_values, GrowthModel, NuConvention};
use evans_core::contour::{semiannulus, RefineOptions};
use evans_core::engine::EngineOptions;
use evans_core::gas::{compute_profile, solve_endstates, Frame, GasModel, ProfileOptions};
use evans_core::kato::KatoOptions;
use evans_core::numerics::logc::LogComplex;
use evans_core::systems::{assemble_euler_1d, assemble_euler_2d, assemble_lagrange_1d, assemble_transverse_2d, EvansSystem};
use evans_core::{Error, C64};
use proptest::prelude::*;
use std::sync::Arc;

const GAMMA: f64 = 5.0 / 3.0;

fn pair(up: f64, extend: f64) -> (EvansSystem, EvansSystem) {
    let (ends, a) = solve_endstates(GAMMA, up).unwrap();
    let m = GasModel::new(GAMMA, a);
    let o = ProfileOptions { extend, ..Default::default() };
    let e = Arc::new(compute_profile(&m, &ends, Frame::Eulerian, &o).unwrap());
    let l = Arc::new(compute_profile(&m, &ends, Frame::Lagrangian, &o).unwrap());
    (assemble_euler_1d(e).unwrap(), assemble_lagrange_1d(l).unwrap())
}

#[test]
fn evrel_holds_with_derived_sign() {
    let (e, l) = pair(0.2733, 1.0);
    let lams = [C64::new(1.0, 0.0), C64::new(2.0, 0.0), C64::new(1.0, 1.0), C64::new(0.5, -2.0), C64::new(4.0, 3.0)];
    let rep = check_evrel(&e, &l, &lams, C64::new(3.0, 0.0), NuConvention::Lagrangian, &EngineOptions::default(), &KatoOptions::default()).unwrap();
    for s in &rep.samples {
        println!("{} rel {:.3e} reversed {:.3e}", s.lambda, s.rel_err, s.rel_err_reversed);
    }
    assert!(rep.delta_plus < 0.0 && rep.delta_minus > 0.0);
    assert!(rep.max_rel_err <= 1e-2, "max rel err {}", rep.max_rel_err);
    // the reciprocal exponent is off by e^{2 Re(...)}, far from 1
    assert!(rep.max_rel_err_reversed > 0.5, "reversed {}", rep.max_rel_err_reversed);
}

#[test]
fn evrel_eulerian_exponents_do_not_fit() {
    let (e, l) = pair(0.2733, 1.0);
    let lams = [C64::new(1.0, 0.0), C64::new(2.0, 1.0)];
    let rep = check_evrel(&e, &l, &lams, C64::new(3.0, 0.0), NuConvention::Eulerian, &EngineOptions::default(), &KatoOptions::default()).unwrap();
    println!("Eulerian-exponent convention: max rel err {:.3e}", rep.max_rel_err);
    assert!(rep.max_rel_err > 1e-2);
}

#[test]
fn evrel_with_doubled_truncation() {
    let lams = [C64::new(1.0, 0.0), C64::new(1.0, 1.0), C64::new(0.5, 3.0)];
    let star = C64::new(3.0, 0.0);
    let err = |extend: f64| {
        let (e, l) = pair(0.2733, extend);
        check_evrel(&e, &l, &lams, star, NuConvention::Lagrangian, &EngineOptions::default(), &KatoOptions::default())
            .unwrap()
            .max_rel_err
    };
    let (e1, e2) = (err(1.0), err(2.0));
    println!("evrel error M: {e1:.3e}, 2M: {e2:.3e}");
    assert!(e1 <= 1e-2 && e2 <= 5e-3);
    assert!(e2 <= 0.5 * e1);
}

#[test]
fn evrel_normalized_form() {
    let (e, l) = pair(0.2733, 1.0);
    let star = C64::new(3.0, 0.0);
    let lams = [star, C64::new(1.0, 0.5), C64::new(6.0, -2.0)];
    let rep = check_evrel(&e, &l, &lams, star, NuConvention::Lagrangian, &EngineOptions::default(), &KatoOptions::default()).unwrap();
    let s0 = &rep.samples[0];
    let ex = |s: &evans_core::analysis::EvrelSample| LogComplex::from_ln(-s.nu_plus * rep.delta_plus + s.nu_minus * rep.delta_minus);
    for s in &rep.samples[1..] {
        let lhs = s.d_euler / s0.d_euler;
        let rhs_norm = (ex(s) / ex(s0)) * (s.d_lagrange / s0.d_lagrange);
        let rhs_unnorm = s.rhs / s0.rhs;
        // the quotient of the unnormalized relation is the normalized one
        assert!(rhs_norm.rel_diff(&rhs_unnorm) < 1e-10);
        assert!(lhs.rel_diff(&rhs_norm) < 1e-2);
    }
}

#[test]
fn evrel_ratio_grows_like_delta_plus() {
    let (e, l) = pair(0.2733, 1.0);
    let lams: Vec<C64> = [2.0, 4.0, 6.0, 8.0, 10.0].iter().map(|&x| C64::new(x, 0.0)).collect();
    let rep = check_evrel(&e, &l, &lams, C64::new(3.0, 0.0), NuConvention::Lagrangian, &EngineOptions::default(), &KatoOptions::default()).unwrap();
    let lr: Vec<f64> = rep.samples.iter().map(|s| (s.d_euler / s.d_lagrange).ln().re).collect();
    let slope = (lr[4] - lr[0]) / 8.0;
    println!("d/dlambda ln|D_E/D_L| = {slope:.4}, Delta+ = {:.4}", rep.delta_plus);
    assert!((slope.abs() - rep.delta_plus.abs()).abs() < 0.1 * rep.delta_plus.abs());
}

#[test]
fn evrel_rejects_wrong_frames() {
    let (e, l) = pair(0.2733, 1.0);
    let r = check_evrel(&l, &e, &[C64::new(1.0, 0.0)], C64::new(3.0, 0.0), NuConvention::Lagrangian, &EngineOptions::default(), &KatoOptions::default());
    assert!(matches!(r, Err(Error::InvalidParam(_))));
}

#[test]
fn synthetic_sqrt_growth() {
    let grid = highfreq_grid(20.0, 200.0, 24).unwrap();
    let vals: Vec<LogComplex> = grid.iter().map(|l| LogComplex::from_ln(C64::new(0.7 + 3.0 * l.sqrt(), 0.3))).collect();
    let fit = fit_highfreq(&grid, &vals).unwrap();
    assert_eq!(fit.winner, GrowthModel::Sqrt);
    assert!((fit.coefficient() - 3.0).abs() < 0.03);
    assert!(fit.sqrt_fit.r2 > 1.0 - 1e-12);
    assert!(fit.linear_fit.r2 < fit.sqrt_fit.r2);
}

#[test]
fn synthetic_linear_growth() {
    let grid = highfreq_grid(20.0, 200.0, 16).unwrap();
    let vals: Vec<LogComplex> = grid.iter().map(|l| LogComplex::from_ln(C64::new(-1.5 * l - 2.0, 0.0))).collect();
    let fit = fit_highfreq(&grid, &vals).unwrap();
    assert_eq!(fit.winner, GrowthModel::Linear);
    assert!((fit.coefficient() + 1.5).abs() < 1e-10);
}

#[test]
fn highfreq_grid_validation() {
    assert!(highfreq_grid(10.0, 200.0, 20).is_err());
    assert!(highfreq_grid(20.0, 200.0, 5).is_err());
    let g = highfreq_grid(20.0, 200.0, 12).unwrap();
    assert!((g[0] - 20.0).abs() < 1e-12 && (g[11] - 200.0).abs() < 1e-9);
    assert!(g.windows(2).all(|w| w[1] > w[0]));
    assert!(fit_highfreq(&g[..2], &[LogComplex::ONE; 2]).is_err());
}

#[test]
fn lagrangian_high_frequency_is_sqrt_like() {
    let (_, l) = pair(0.2733, 1.0);
    let grid = highfreq_grid(20.0, 200.0, 12).unwrap();
    let vals = real_axis_values(&l, &grid, &EngineOptions::default(), &KatoOptions::default()).unwrap();
    let fit = fit_highfreq(&grid, &vals).unwrap();
    assert_eq!(fit.winner, GrowthModel::Sqrt);
    assert!(fit.sqrt_fit.r2 >= 0.99);
}

#[test]
fn xi0_reduces_to_1d() {
    let up = 0.2733;
    let (ends, a) = solve_endstates(GAMMA, up).unwrap();
    let m = GasModel::new(GAMMA, a);
    let p = Arc::new(compute_profile(&m, &ends, Frame::Eulerian, &ProfileOptions::default()).unwrap());
    let s2 = assemble_euler_2d(p.clone(), 0.0, m.mu, m.eta).unwrap();
    let s1 = assemble_euler_1d(p.clone()).unwrap();
    let st = assemble_transverse_2d(p, m.mu).unwrap();
    let con = semiannulus(1e-3, 4.0, 30).unwrap();
    let rep = check_xi0(&s2, &s1, &st, &con, &RefineOptions::default(), 10).unwrap();
    assert!(rep.coupling_residual <= 1e-12);
    assert!(rep.windings_equal);
    assert_eq!(rep.winding_1d, 0);
    assert_eq!(rep.winding_transverse, 0);
    assert!(rep.ratio_samples.len() >= 5);
    assert!(rep.ratio_spread < 1e-4, "ratio spread {}", rep.ratio_spread);
    println!("D_2D/D_1D spread without the transverse factor: {:.3e}", rep.ratio_spread_1d);
}

#[test]
fn xi0_check_needs_2d_at_zero() {
    let (e, _) = pair(0.2733, 1.0);
    let con = semiannulus(1e-3, 4.0, 10).unwrap();
    assert!(check_xi0(&e, &e, &e, &con, &RefineOptions::default(), 4).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]
    #[test]
    fn sqrt_fit_recovers_coefficient(c in 0.2f64..8.0, a in -5.0f64..5.0) {
        let grid = highfreq_grid(20.0, 200.0, 12).unwrap();
        let vals: Vec<LogComplex> = grid.iter().map(|l| LogComplex::from_ln(C64::new(a + c * l.sqrt(), 0.0))).collect();
        let fit = fit_highfreq(&grid, &vals).unwrap();
        prop_assert_eq!(fit.winner, GrowthModel::Sqrt);
        prop_assert!((fit.coefficient() - c).abs() <= 0.01 * c);
    }
}
