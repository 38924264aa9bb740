//! Python bindings.

use evans_core::analysis::{check_evrel, fit_highfreq, highfreq_grid, real_axis_values, NuConvention};
use evans_core::contour::{adaptive_evaluate, semiannulus, winding, RefineOptions, SystemEvaluator};
use evans_core::engine::{bases_along, evaluate, EngineOptions};
use evans_core::gas::{compute_profile, solve_endstates, Frame, GasModel, ProfileOptions, ShockProfile};
use evans_core::kato::KatoOptions;
use evans_core::numerics::logc::LogComplex;
use evans_core::systems::{assemble_euler_1d, assemble_euler_2d, assemble_lagrange_1d, assemble_pseudo_lagrangian, EvansSystem};
use evans_core::{Error, C64};
use num_complex::Complex64;
use pyo3::exceptions::{PyIOError, PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use std::sync::Arc;

fn py_err(e: Error) -> PyErr {
    match e.exit_code() {
        2 => PyValueError::new_err(e.to_string()),
        4 => PyIOError::new_err(e.to_string()),
        _ => PyRuntimeError::new_err(e.to_string()),
    }
}

fn parse_frame(s: &str) -> PyResult<Frame> {
    match s {
        "eulerian" => Ok(Frame::Eulerian),
        "lagrangian" => Ok(Frame::Lagrangian),
        _ => Err(PyValueError::new_err(format!("unknown profile frame {s:?}"))),
    }
}

fn pair(d: &LogComplex) -> (f64, f64) {
    (d.log10_mod, d.arg)
}

/// `(rho_plus, u_plus, a)` for the given strength.
#[pyfunction]
fn endstates(gamma: f64, u_plus: f64) -> PyResult<(f64, f64, f64)> {
    let (e, a) = solve_endstates(gamma, u_plus).map_err(py_err)?;
    Ok((e.rho_plus, e.u_plus, a))
}

/// Traveling-wave profile in Eulerian or Lagrangian coordinates.
#[pyclass(frozen)]
struct Profile {
    inner: Arc<ShockProfile>,
}

#[pymethods]
impl Profile {
    #[new]
    #[pyo3(signature = (gamma, u_plus, frame = "lagrangian", extend = 1.0))]
    fn new(gamma: f64, u_plus: f64, frame: &str, extend: f64) -> PyResult<Self> {
        let (ends, a) = solve_endstates(gamma, u_plus).map_err(py_err)?;
        let o = ProfileOptions { extend, ..Default::default() };
        let p = compute_profile(&GasModel::new(gamma, a), &ends, parse_frame(frame)?, &o).map_err(py_err)?;
        Ok(Profile { inner: Arc::new(p) })
    }

    #[getter]
    fn grid(&self) -> Vec<f64> {
        self.inner.grid.clone()
    }

    /// Velocity (Eulerian) or specific volume (Lagrangian) on the grid.
    #[getter]
    fn u(&self) -> Vec<f64> {
        self.inner.u.clone()
    }

    #[getter]
    fn domain(&self) -> (f64, f64) {
        self.inner.domain()
    }

    /// `(Delta+, Delta-)` for Eulerian profiles.
    #[getter]
    fn deltas(&self) -> Option<(f64, f64)> {
        self.inner.y_map.as_ref().map(|m| (m.delta_plus, m.delta_minus))
    }

    fn to_json(&self) -> PyResult<String> {
        serde_json::to_string(&self.inner.to_json(None)).map_err(|e| PyValueError::new_err(e.to_string()))
    }
}

/// Evans system in a given frame.
#[pyclass(frozen)]
struct System {
    inner: EvansSystem,
}

#[pymethods]
impl System {
    /// `frame` is "eulerian", "lagrangian" or "pseudo-lagrangian"; `dim` 1 or 2.
    #[new]
    #[pyo3(signature = (gamma, u_plus, frame = "lagrangian", dim = 1, xi = 0.0))]
    fn new(gamma: f64, u_plus: f64, frame: &str, dim: u8, xi: f64) -> PyResult<Self> {
        let (ends, a) = solve_endstates(gamma, u_plus).map_err(py_err)?;
        let m = GasModel::new(gamma, a);
        let prof = |f| compute_profile(&m, &ends, f, &ProfileOptions::default()).map(Arc::new).map_err(py_err);
        let base = |d: u8| -> PyResult<EvansSystem> {
            let p = prof(Frame::Eulerian)?;
            match d {
                1 => assemble_euler_1d(p),
                2 => assemble_euler_2d(p, xi, m.mu, m.eta),
                _ => Err(Error::InvalidParam(format!("dim must be 1 or 2, got {d}"))),
            }
            .map_err(py_err)
        };
        let inner = match (frame, dim) {
            ("lagrangian", 1) => assemble_lagrange_1d(prof(Frame::Lagrangian)?).map_err(py_err)?,
            ("eulerian", d) => base(d)?,
            ("pseudo-lagrangian", d) => assemble_pseudo_lagrangian(&base(d)?).map_err(py_err)?,
            _ => return Err(PyValueError::new_err(format!("no {frame} system in dimension {dim}"))),
        };
        Ok(System { inner })
    }

    #[getter]
    fn n(&self) -> usize {
        self.inner.n()
    }

    /// Unnormalized Evans function at `lam` as `(log10 |D|, arg D)`, with
    /// Kato bases carried along the chord from `lambda_star`.
    #[pyo3(signature = (lam, lambda_star = Complex64::new(3.0, 0.0)))]
    fn evans(&self, lam: Complex64, lambda_star: Complex64) -> PyResult<(f64, f64)> {
        let (bp, bm) = bases_along(&self.inner, &[lambda_star, lam], &KatoOptions::default()).map_err(py_err)?;
        let v = evaluate(&self.inner, lam, &bp.frames[1], &bm.frames[1], &EngineOptions::default()).map_err(py_err)?;
        Ok(pair(&v.d))
    }

    /// Adaptive image on the semi-annulus; returns a dict with winding,
    /// wraps, cost, lambdas and normalized values.
    #[pyo3(signature = (r = 1e-3, big_r = None, n0 = 40, eta = 0.2))]
    fn contour<'py>(&self, py: Python<'py>, r: f64, big_r: Option<f64>, n0: usize, eta: f64) -> PyResult<Bound<'py, pyo3::types::PyDict>> {
        let big_r = big_r.unwrap_or_else(|| (0.5 + self.inner.profile.model.gamma.sqrt()).powi(2));
        let con = semiannulus(r, big_r, n0).map_err(py_err)?;
        let opts = RefineOptions { eta, ..Default::default() };
        let img = py.detach(|| adaptive_evaluate(&SystemEvaluator::new(&self.inner), &con, &opts)).map_err(py_err)?;
        let w = winding(&img);
        let d = pyo3::types::PyDict::new(py);
        d.set_item("winding", w.winding)?;
        d.set_item("wraps", w.wraps)?;
        d.set_item("valid", w.valid)?;
        d.set_item("cost", img.cost)?;
        d.set_item("log10_range", img.log10_range)?;
        d.set_item("lambdas", img.lambdas.clone())?;
        d.set_item("values", img.d.iter().map(pair).collect::<Vec<_>>())?;
        Ok(d)
    }
}

/// Maximum relative error of the Eulerian/Lagrangian ratio relation, and
/// the same with the exponent sign reversed.
#[pyfunction]
#[pyo3(signature = (gamma, u_plus, lambdas, lambda_star = Complex64::new(3.0, 0.0), eulerian_exponents = false))]
fn evrel(gamma: f64, u_plus: f64, lambdas: Vec<Complex64>, lambda_star: Complex64, eulerian_exponents: bool) -> PyResult<(f64, f64)> {
    let e = System::new(gamma, u_plus, "eulerian", 1, 0.0)?;
    let l = System::new(gamma, u_plus, "lagrangian", 1, 0.0)?;
    let conv = if eulerian_exponents { NuConvention::Eulerian } else { NuConvention::Lagrangian };
    let lams: Vec<C64> = lambdas;
    let rep = check_evrel(&e.inner, &l.inner, &lams, lambda_star, conv, &EngineOptions::default(), &KatoOptions::default())
        .map_err(py_err)?;
    Ok((rep.max_rel_err, rep.max_rel_err_reversed))
}

/// Fit of `ln |D|` along real frequencies: `(winner, coefficient, r2_sqrt, r2_linear)`.
#[pyfunction]
#[pyo3(signature = (system, lambda_min = 20.0, lambda_max = 200.0, n = 16))]
fn highfreq(system: &System, lambda_min: f64, lambda_max: f64, n: usize) -> PyResult<(String, f64, f64, f64)> {
    let grid = highfreq_grid(lambda_min, lambda_max, n).map_err(py_err)?;
    let vals = real_axis_values(&system.inner, &grid, &EngineOptions::default(), &KatoOptions::default()).map_err(py_err)?;
    let fit = fit_highfreq(&grid, &vals).map_err(py_err)?;
    let name = serde_json::to_value(fit.winner).ok().and_then(|v| v.as_str().map(str::to_string)).unwrap_or_default();
    Ok((name, fit.coefficient(), fit.sqrt_fit.r2, fit.linear_fit.r2))
}

#[pymodule]
fn evans_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(endstates, m)?)?;
    m.add_function(wrap_pyfunction!(evrel, m)?)?;
    m.add_function(wrap_pyfunction!(highfreq, m)?)?;
    m.add_class::<Profile>()?;
    m.add_class::<System>()?;
    Ok(())
}
