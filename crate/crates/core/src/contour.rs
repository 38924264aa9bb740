//! Contours, adaptive image refinement and winding numbers.
//!
//! A contour is a chain of arcs and segments parametrized by `s in [0, n]`,
//! one unit per piece. Kato bases are carried from `s = 0` forward on the
//! first arm and from `s = n` backward on the second; the arms meet at
//! `split`.

use crate::engine::{evaluate, EngineOptions, EvansOde, EvansValue};
use crate::kato::{eigen_seed, kato_continue_along, Half, KatoOptions};
use crate::numerics::cmatrix::CMatrix;
use crate::numerics::logc::LogComplex;
use crate::{Error, Result, C64};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::{FRAC_PI_2, PI};
use std::io::Write;
use std::path::Path;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum Piece {
    Arc { center: C64, radius: f64, theta0: f64, theta1: f64 },
    Segment { a: C64, b: C64 },
}

impl Piece {
    fn at(&self, t: f64) -> C64 {
        match *self {
            Piece::Arc { center, radius, theta0, theta1 } => center + C64::from_polar(radius, theta0 + t * (theta1 - theta0)),
            Piece::Segment { a, b } => a + (b - a) * t,
        }
    }

    fn length(&self) -> f64 {
        match *self {
            Piece::Arc { radius, theta0, theta1, .. } => radius * (theta1 - theta0).abs(),
            Piece::Segment { a, b } => (b - a).norm(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Contour {
    pub pieces: Vec<Piece>,
    /// Parameter where the two Kato arms meet.
    pub split: f64,
    /// Initial parameters, increasing, from 0 to `pieces.len()`.
    pub params: Vec<f64>,
    pub r: f64,
    pub big_r: f64,
}

impl Contour {
    pub fn at(&self, s: f64) -> C64 {
        let n = self.pieces.len();
        let i = (s.floor() as usize).min(n - 1);
        self.pieces[i].at(s - i as f64)
    }

    pub fn points(&self) -> Vec<C64> {
        self.params.iter().map(|&s| self.at(s)).collect()
    }

    pub fn lambda_star(&self) -> C64 {
        self.at(0.0)
    }

    pub fn end(&self) -> f64 {
        self.pieces.len() as f64
    }

    fn with_pieces(pieces: Vec<Piece>, split: f64, n0: usize, r: f64, big_r: f64) -> Self {
        let lens: Vec<f64> = pieces.iter().map(Piece::length).collect();
        let total: f64 = lens.iter().sum();
        let mut params = vec![0.0];
        for (i, l) in lens.iter().enumerate() {
            let m = ((n0 as f64 * l / total).round() as usize).max(1);
            for j in 1..=m {
                params.push(i as f64 + j as f64 / m as f64);
            }
        }
        if !params.contains(&split) {
            params.push(split);
            params.sort_by(|a, b| a.partial_cmp(b).unwrap());
        }
        Contour { pieces, split, params, r, big_r }
    }
}

/// Boundary of `{r <= |lambda| <= R, Re lambda >= 0}`, counterclockwise from
/// `lambda* = R`.
pub fn semiannulus(r: f64, big_r: f64, n0: usize) -> Result<Contour> {
    if !(r > 0.0 && r < big_r && big_r.is_finite()) {
        return Err(Error::InvalidRadii { r, big_r });
    }
    let i = C64::new(0.0, 1.0);
    let o = C64::new(0.0, 0.0);
    let pieces = vec![
        Piece::Arc { center: o, radius: big_r, theta0: 0.0, theta1: FRAC_PI_2 },
        Piece::Segment { a: i * big_r, b: i * r },
        Piece::Arc { center: o, radius: r, theta0: FRAC_PI_2, theta1: -FRAC_PI_2 },
        Piece::Segment { a: -i * r, b: -i * big_r },
        Piece::Arc { center: o, radius: big_r, theta0: -FRAC_PI_2, theta1: 0.0 },
    ];
    Ok(Contour::with_pieces(pieces, 2.5, n0.max(5), r, big_r))
}

/// Circle traversed counterclockwise from `center + radius`.
pub fn circle(center: C64, radius: f64, n0: usize) -> Result<Contour> {
    if !(radius > 0.0) {
        return Err(Error::InvalidRadii { r: radius, big_r: radius });
    }
    let pieces = (0..4)
        .map(|k| Piece::Arc { center, radius, theta0: k as f64 * FRAC_PI_2, theta1: (k + 1) as f64 * FRAC_PI_2 })
        .collect();
    Ok(Contour::with_pieces(pieces, 2.0, n0.max(4), radius, radius))
}

/// Evaluation of a function along a contour, with whatever per-point state
/// (Kato frames) has to be carried from neighbouring points.
pub trait ContourEvaluator: Sync {
    type State: Clone + Send + Sync;
    fn seed(&self, lambda: C64) -> Result<Self::State>;
    /// Carry `state` from `path(from)` to `path(to)`.
    fn carry(&self, state: &Self::State, path: &dyn Fn(f64) -> C64, from: f64, to: f64) -> Result<Self::State>;
    fn evaluate(&self, lambda: C64, state: &Self::State) -> Result<EvansValue>;
}

/// Stateless evaluator from a plain function.
pub struct FnEvaluator<F>(pub F);

impl<F: Fn(C64) -> Result<EvansValue> + Sync> ContourEvaluator for FnEvaluator<F> {
    type State = ();
    fn seed(&self, _lambda: C64) -> Result<()> {
        Ok(())
    }
    fn carry(&self, _: &(), _: &dyn Fn(f64) -> C64, _: f64, _: f64) -> Result<()> {
        Ok(())
    }
    fn evaluate(&self, lambda: C64, _: &()) -> Result<EvansValue> {
        (self.0)(lambda)
    }
}

/// Evans evaluator for an ODE family, with Kato bases for both sides.
pub struct SystemEvaluator<'a, S: ?Sized> {
    pub sys: &'a S,
    pub engine: EngineOptions,
    pub kato: KatoOptions,
    /// Optional fixed seeds `(plus, minus)` used instead of eigenvector
    /// frames at the seed point.
    pub seeds: Option<(CMatrix, CMatrix)>,
}

impl<'a, S: EvansOde + ?Sized> SystemEvaluator<'a, S> {
    pub fn new(sys: &'a S) -> Self {
        SystemEvaluator { sys, engine: EngineOptions::default(), kato: KatoOptions::default(), seeds: None }
    }
}

impl<S: EvansOde + ?Sized> ContourEvaluator for SystemEvaluator<'_, S> {
    type State = (CMatrix, CMatrix);

    fn seed(&self, lambda: C64) -> Result<Self::State> {
        if let Some(s) = &self.seeds {
            return Ok(s.clone());
        }
        Ok((
            eigen_seed(&self.sys.limit_plus(lambda), Half::Stable)?,
            eigen_seed(&self.sys.limit_minus(lambda), Half::Unstable)?,
        ))
    }

    fn carry(&self, state: &Self::State, path: &dyn Fn(f64) -> C64, from: f64, to: f64) -> Result<Self::State> {
        let p = kato_continue_along(&|l| self.sys.limit_plus(l), Half::Stable, path, from, &state.0, to, &self.kato)?;
        let m = kato_continue_along(&|l| self.sys.limit_minus(l), Half::Unstable, path, from, &state.1, to, &self.kato)?;
        Ok((p, m))
    }

    fn evaluate(&self, lambda: C64, state: &Self::State) -> Result<EvansValue> {
        evaluate(self.sys, lambda, &state.0, &state.1, &self.engine)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RefineOptions {
    pub eta: f64,
    pub max_depth: u32,
    /// Cap on the total number of evaluations.
    pub max_points: usize,
}

impl Default for RefineOptions {
    fn default() -> Self {
        RefineOptions { eta: 0.2, max_depth: 24, max_points: 200_000 }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ContourImage {
    pub params: Vec<f64>,
    pub lambdas: Vec<C64>,
    /// Values divided by `D(lambda*)`, arguments unwrapped in sequence order.
    pub d: Vec<LogComplex>,
    pub generation: Vec<u32>,
    /// `|1 - D_{k+1} / D_k|`.
    pub relative_gaps: Vec<f64>,
    pub winding: i64,
    pub wraps: f64,
    pub log10_range: (f64, f64),
    /// Unnormalized value at `lambda*`.
    pub d_star: LogComplex,
    /// Number of Evans evaluations.
    pub cost: usize,
    /// Right-hand-side evaluations summed over all points.
    pub rhs_evals: usize,
    pub budget_exceeded: bool,
}

fn wrap_pi(x: f64) -> f64 {
    let y = (x + PI).rem_euclid(2.0 * PI) - PI;
    if y == -PI {
        PI
    } else {
        y
    }
}

/// Unwrap the arguments of `d` in order, starting from the stored argument
/// of the first value.
pub fn unwrap_args(d: &[LogComplex]) -> Vec<LogComplex> {
    let mut out = Vec::with_capacity(d.len());
    let mut prev: Option<f64> = None;
    for v in d {
        let arg = match prev {
            None => v.arg,
            Some(p) => p + wrap_pi(v.arg - p),
        };
        prev = Some(arg);
        out.push(LogComplex { arg, ..*v });
    }
    out
}

fn gap(a: &LogComplex, b: &LogComplex) -> f64 {
    (*b / *a).dist_from_one()
}

struct Node<T> {
    s: f64,
    gen: u32,
    state: T,
    value: EvansValue,
}

/// Evaluate along `contour`, bisecting any segment whose image relative gap
/// exceeds `eta`. Points pending at one refinement level are evaluated in
/// parallel; the result is deterministic.
pub fn adaptive_evaluate<E: ContourEvaluator>(evaluator: &E, contour: &Contour, opts: &RefineOptions) -> Result<ContourImage> {
    if !(opts.eta > 0.0 && opts.eta < 1.0) {
        return Err(Error::InvalidParam(format!("eta must lie in (0, 1), got {}", opts.eta)));
    }
    let path = |s: f64| contour.at(s);
    let end = contour.end();
    let split = contour.split;
    let seed = evaluator.seed(path(0.0))?;

    // states on the initial grid: first arm forward, second arm backward
    let params = &contour.params;
    let mut states: Vec<Option<E::State>> = vec![None; params.len()];
    states[0] = Some(seed.clone());
    let mut cur = seed.clone();
    for k in 1..params.len() {
        if params[k] > split {
            break;
        }
        cur = evaluator.carry(&cur, &path, params[k - 1], params[k])?;
        states[k] = Some(cur.clone());
    }
    let last = params.len() - 1;
    cur = seed;
    states[last] = Some(cur.clone());
    for k in (1..last).rev() {
        if params[k] <= split {
            break;
        }
        cur = evaluator.carry(&cur, &path, params[k + 1], params[k])?;
        states[k] = Some(cur.clone());
    }

    // the closing point repeats lambda*; its value is copied, not recomputed
    let work: Vec<(f64, E::State)> = params[..last].iter().zip(states).map(|(&s, st)| (s, st.unwrap())).collect();
    let values: Vec<EvansValue> = work
        .par_iter()
        .map(|(s, st)| evaluator.evaluate(path(*s), st))
        .collect::<Result<Vec<_>>>()?;
    let mut cost = values.len();
    let mut nodes: Vec<Node<E::State>> =
        work.into_iter().zip(values).map(|((s, state), value)| Node { s, gen: 0, state, value }).collect();
    let closing = Node { s: end, gen: 0, state: nodes[0].state.clone(), value: nodes[0].value };
    nodes.push(closing);

    let mut budget_exceeded = false;
    loop {
        let mut pending: Vec<(usize, f64, u32)> = Vec::new();
        for k in 0..nodes.len() - 1 {
            let (a, b) = (&nodes[k], &nodes[k + 1]);
            if gap(&a.value.d, &b.value.d) <= opts.eta {
                continue;
            }
            let gen = a.gen.max(b.gen) + 1;
            if gen > opts.max_depth {
                budget_exceeded = true;
                continue;
            }
            pending.push((k, 0.5 * (a.s + b.s), gen));
        }
        if pending.is_empty() {
            break;
        }
        if cost + pending.len() > opts.max_points {
            budget_exceeded = true;
            break;
        }
        let fresh: Vec<(E::State, EvansValue)> = pending
            .par_iter()
            .map(|&(k, s, _)| {
                // carry from the neighbour nearer lambda* along its arm
                let from = if s <= split { &nodes[k] } else { &nodes[k + 1] };
                let st = evaluator.carry(&from.state, &path, from.s, s)?;
                let v = evaluator.evaluate(path(s), &st)?;
                Ok((st, v))
            })
            .collect::<Result<Vec<_>>>()?;
        cost += fresh.len();
        let mut merged = Vec::with_capacity(nodes.len() + fresh.len());
        let mut fresh_iter = pending.into_iter().zip(fresh).peekable();
        for (k, node) in nodes.into_iter().enumerate() {
            merged.push(node);
            if let Some(&((pk, _, _), _)) = fresh_iter.peek() {
                if pk == k {
                    let ((_, s, gen), (state, value)) = fresh_iter.next().unwrap();
                    merged.push(Node { s, gen, state, value });
                }
            }
        }
        nodes = merged;
    }

    let d_star = nodes[0].value.d;
    if d_star.zero || !d_star.log10_mod.is_finite() {
        return Err(Error::ZeroAtNormalization);
    }
    let inv = d_star.recip();
    let raw: Vec<LogComplex> = nodes.iter().map(|n| n.value.d * inv).collect();
    let d = unwrap_args(&raw);
    let relative_gaps = d.windows(2).map(|w| gap(&w[0], &w[1])).collect();
    let (winding, wraps, _) = winding_of(&d);
    let lo = d.iter().map(|v| v.log10_mod).fold(f64::INFINITY, f64::min);
    let hi = d.iter().map(|v| v.log10_mod).fold(f64::NEG_INFINITY, f64::max);
    Ok(ContourImage {
        params: nodes.iter().map(|n| n.s).collect(),
        lambdas: nodes.iter().map(|n| path(n.s)).collect(),
        d,
        generation: nodes.iter().map(|n| n.gen).collect(),
        relative_gaps,
        winding,
        wraps,
        log10_range: (lo, hi),
        d_star,
        cost,
        rhs_evals: nodes[..nodes.len() - 1].iter().map(|n| n.value.cost).sum(),
        budget_exceeded,
    })
}

/// `(winding, wraps, largest argument step)` of unwrapped values.
fn winding_of(d: &[LogComplex]) -> (i64, f64, f64) {
    if d.is_empty() {
        return (0, 0.0, 0.0);
    }
    let total = d.last().unwrap().arg - d[0].arg;
    let max = d.iter().map(|v| v.arg).fold(f64::NEG_INFINITY, f64::max);
    let min = d.iter().map(|v| v.arg).fold(f64::INFINITY, f64::min);
    let step = d.windows(2).map(|w| (w[1].arg - w[0].arg).abs()).fold(0.0, f64::max);
    ((total / (2.0 * PI)).round() as i64, (max - min) / (2.0 * PI), step)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Winding {
    pub winding: i64,
    pub wraps: f64,
    pub max_step: f64,
    /// All argument steps below pi/2.
    pub valid: bool,
}

/// Winding number of the closed image; `valid` is false when some argument
/// step reaches pi/2.
pub fn winding(image: &ContourImage) -> Winding {
    let d = unwrap_args(&image.d);
    let (w, wraps, step) = winding_of(&d);
    Winding { winding: w, wraps, max_step: step, valid: step < FRAC_PI_2 }
}

/// As [`winding`], failing with `UnderResolved` on an invalid image.
pub fn winding_checked(image: &ContourImage) -> Result<Winding> {
    let w = winding(image);
    if !w.valid {
        return Err(Error::UnderResolved(w.max_step));
    }
    Ok(w)
}

/// Winding number of a closed polyline about the origin from quadrant-safe
/// argument increments.
pub fn polyline_winding(points: &[C64]) -> i64 {
    let mut total = 0.0;
    for w in points.windows(2) {
        total += (w[1] / w[0]).arg();
    }
    (total / (2.0 * PI)).round() as i64
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CsvRow {
    pub re_lambda: f64,
    pub im_lambda: f64,
    pub log10_mod_d: f64,
    pub arg_unwrapped: f64,
    pub generation: u32,
}

const CSV_HEADER: [&str; 5] = ["re_lambda", "im_lambda", "log10_mod_D", "arg_unwrapped", "generation"];

fn csv_err(e: csv::Error) -> Error {
    if e.is_io_error() {
        Error::Io(e.to_string())
    } else {
        Error::Parse(e.to_string())
    }
}

pub fn image_rows(image: &ContourImage) -> Vec<CsvRow> {
    image
        .lambdas
        .iter()
        .zip(&image.d)
        .zip(&image.generation)
        .map(|((l, d), &g)| CsvRow { re_lambda: l.re, im_lambda: l.im, log10_mod_d: d.log10_mod, arg_unwrapped: d.arg, generation: g })
        .collect()
}

/// Write the image; `config_hash` goes into a leading `#` comment line.
pub fn write_csv(image: &ContourImage, path: &Path, config_hash: Option<&str>) -> Result<()> {
    let mut file = std::fs::File::create(path)?;
    if let Some(h) = config_hash {
        writeln!(file, "# config_hash={h}")?;
    }
    let mut w = csv::Writer::from_writer(file);
    w.write_record(CSV_HEADER).map_err(csv_err)?;
    for r in image_rows(image) {
        w.write_record(&[
            format!("{:e}", r.re_lambda),
            format!("{:e}", r.im_lambda),
            format!("{:e}", r.log10_mod_d),
            format!("{:e}", r.arg_unwrapped),
            r.generation.to_string(),
        ])
        .map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_csv(path: &Path) -> Result<Vec<CsvRow>> {
    let mut r = csv::ReaderBuilder::new().comment(Some(b'#')).from_path(path).map_err(csv_err)?;
    let header = r.headers().map_err(csv_err)?.clone();
    if header.iter().collect::<Vec<_>>() != CSV_HEADER {
        return Err(Error::Parse(format!("unexpected CSV header {:?}", header)));
    }
    let mut rows = Vec::new();
    for rec in r.records() {
        let rec = rec.map_err(csv_err)?;
        let f = |i: usize| -> Result<f64> {
            rec.get(i).unwrap_or("").trim().parse::<f64>().map_err(|e| Error::Parse(format!("column {i}: {e}")))
        };
        rows.push(CsvRow {
            re_lambda: f(0)?,
            im_lambda: f(1)?,
            log10_mod_d: f(2)?,
            arg_unwrapped: f(3)?,
            generation: rec.get(4).unwrap_or("").trim().parse().map_err(|e| Error::Parse(format!("generation: {e}")))?,
        });
    }
    Ok(rows)
}
