//! Command-line front end: configuration, orchestration and file output.

mod svg;

use crate::analysis::{check_evrel, check_xi0, fit_highfreq, highfreq_grid, real_axis_values, NuConvention};
use crate::contour::{adaptive_evaluate, read_csv, semiannulus, winding, write_csv, ContourImage, RefineOptions, SystemEvaluator};
use crate::engine::EngineOptions;
use crate::gas::{compute_profile, solve_endstates, Frame, GasModel, ProfileOptions, ShockProfile};
use crate::kato::KatoOptions;
use crate::systems::{
    assemble_euler_1d, assemble_euler_2d, assemble_lagrange_1d, assemble_pseudo_lagrangian, assemble_transverse_2d,
    EvansSystem,
};
use crate::{Error, Result, C64};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::Instant;

pub use svg::render_svg;

#[derive(Parser, Debug)]
#[command(name = "evans", version, about = "Evans function computations for isentropic gas shocks")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Compute a shock profile and write it as JSON.
    Profile(RunArgs),
    /// Evans function image on the semi-annulus: CSV plus summary JSON.
    Evans(RunArgs),
    /// Winding number of a computed image, or of an existing CSV (--input).
    Winding(RunArgs),
    /// Eulerian/Lagrangian ratio relation at sampled frequencies.
    Evrel(RunArgs),
    /// High-frequency growth fit along the real axis.
    Highfreq(RunArgs),
    /// The 2D system at xi = 0 against the 1D system.
    Xi0(RunArgs),
    /// Cost table of Eulerian vs pseudo-Lagrangian 2D runs.
    Bench(RunArgs),
    /// Render an image CSV as SVG.
    Plot(RunArgs),
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Profile(_) => "profile",
            Command::Evans(_) => "evans",
            Command::Winding(_) => "winding",
            Command::Evrel(_) => "evrel",
            Command::Highfreq(_) => "highfreq",
            Command::Xi0(_) => "xi0",
            Command::Bench(_) => "bench",
            Command::Plot(_) => "plot",
        }
    }

    fn args(&self) -> &RunArgs {
        match self {
            Command::Profile(a)
            | Command::Evans(a)
            | Command::Winding(a)
            | Command::Evrel(a)
            | Command::Highfreq(a)
            | Command::Xi0(a)
            | Command::Bench(a)
            | Command::Plot(a) => a,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum FrameKind {
    Eulerian,
    Lagrangian,
    PseudoLagrangian,
}

/// Flags override values from `--config`, which override the defaults.
#[derive(Args, Debug, Clone, Default)]
pub struct RunArgs {
    /// JSON file with any subset of the configuration fields.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub gamma: Option<f64>,
    /// Downstream state (u+ and tau+ coincide under the normalization).
    #[arg(long = "uplus", visible_aliases = ["u-plus", "tauplus", "tau-plus"])]
    pub u_plus: Option<f64>,
    #[arg(long, value_enum)]
    pub frame: Option<FrameKind>,
    #[arg(long)]
    pub dim: Option<u8>,
    #[arg(long)]
    pub xi: Option<f64>,
    /// Shear viscosity of the 2D model.
    #[arg(long)]
    pub mu: Option<f64>,
    /// Bulk viscosity of the 2D model.
    #[arg(long = "bulk-viscosity")]
    pub bulk_viscosity: Option<f64>,
    /// Inner contour radius.
    #[arg(long)]
    pub r: Option<f64>,
    /// Outer contour radius.
    #[arg(long = "big-r")]
    pub big_r: Option<f64>,
    #[arg(long)]
    pub n0: Option<usize>,
    /// Refinement threshold on the relative gap between neighbours.
    #[arg(long)]
    pub eta: Option<f64>,
    #[arg(long)]
    pub rtol: Option<f64>,
    #[arg(long)]
    pub atol: Option<f64>,
    #[arg(long = "max-dp")]
    pub max_dp: Option<f64>,
    #[arg(long = "max-points")]
    pub max_points: Option<usize>,
    /// Profile domain multiplier beyond the endpoint tolerance.
    #[arg(long)]
    pub extend: Option<f64>,
    /// Profile value at the origin.
    #[arg(long)]
    pub center: Option<f64>,
    /// Normalization / seed point, "re,im".
    #[arg(long = "lambda-star", value_parser = parse_complex)]
    pub lambda_star: Option<[f64; 2]>,
    /// Evrel samples, "re,im;re,im;...".
    #[arg(long)]
    pub lambdas: Option<String>,
    #[arg(long, value_enum)]
    pub convention: Option<ConventionArg>,
    #[arg(long = "lambda-min")]
    pub lambda_min: Option<f64>,
    #[arg(long = "lambda-max")]
    pub lambda_max: Option<f64>,
    #[arg(long = "n-lambda")]
    pub n_lambda: Option<usize>,
    /// Bench downstream states (comma separated).
    #[arg(long = "tau-list", value_delimiter = ',')]
    pub tau_list: Option<Vec<f64>>,
    /// Bench transverse frequencies (comma separated).
    #[arg(long = "xi-list", value_delimiter = ',')]
    pub xi_list: Option<Vec<f64>>,
    #[arg(long)]
    pub threads: Option<usize>,
    #[arg(long, short)]
    pub output: Option<PathBuf>,
    #[arg(long, short)]
    pub input: Option<PathBuf>,
    /// Plot with radius log10(1 + |D|).
    #[arg(long = "log-radial")]
    pub log_radial: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ConventionArg {
    Lagrangian,
    Eulerian,
}

fn parse_complex(s: &str) -> std::result::Result<[f64; 2], String> {
    let mut it = s.split(',').map(|t| t.trim().parse::<f64>());
    match (it.next(), it.next(), it.next()) {
        (Some(Ok(re)), None, None) => Ok([re, 0.0]),
        (Some(Ok(re)), Some(Ok(im)), None) => Ok([re, im]),
        _ => Err(format!("expected \"re,im\", got {s:?}")),
    }
}

fn parse_complex_list(s: &str) -> std::result::Result<Vec<[f64; 2]>, String> {
    s.split(';').filter(|t| !t.trim().is_empty()).map(parse_complex).collect()
}

/// Fully resolved run configuration; serialized next to every output.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub command: String,
    pub gamma: f64,
    #[serde(alias = "tau_plus")]
    pub u_plus: Option<f64>,
    pub frame: FrameKind,
    pub dim: u8,
    pub xi: f64,
    pub mu: Option<f64>,
    pub bulk_viscosity: Option<f64>,
    pub r: f64,
    pub big_r: Option<f64>,
    pub n0: usize,
    pub eta: f64,
    pub rtol: f64,
    pub atol: f64,
    pub max_dp: f64,
    pub max_points: usize,
    pub extend: f64,
    pub center: Option<f64>,
    pub lambda_star: Option<[f64; 2]>,
    pub lambdas: Vec<[f64; 2]>,
    pub convention: NuConvention,
    pub lambda_min: f64,
    pub lambda_max: f64,
    pub n_lambda: usize,
    pub tau_list: Vec<f64>,
    pub xi_list: Vec<f64>,
    pub threads: Option<usize>,
    pub output: Option<PathBuf>,
    pub input: Option<PathBuf>,
    pub log_radial: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        let eng = EngineOptions::default();
        RunConfig {
            command: String::new(),
            gamma: 5.0 / 3.0,
            u_plus: None,
            frame: FrameKind::Lagrangian,
            dim: 1,
            xi: 0.0,
            mu: None,
            bulk_viscosity: None,
            r: 1e-3,
            big_r: None,
            n0: 40,
            eta: RefineOptions::default().eta,
            rtol: eng.rtol,
            atol: eng.atol,
            max_dp: KatoOptions::default().max_dp,
            max_points: RefineOptions::default().max_points,
            extend: 1.0,
            center: None,
            lambda_star: None,
            lambdas: default_evrel_lambdas(),
            convention: NuConvention::Lagrangian,
            lambda_min: 20.0,
            lambda_max: 200.0,
            n_lambda: 16,
            tau_list: vec![0.2733, 0.22, 0.1667],
            xi_list: vec![0.0, 0.3, 0.6],
            threads: None,
            output: None,
            input: None,
            log_radial: false,
        }
    }
}

/// Twenty points with |lambda| <= 10 in the closed right half plane.
pub fn default_evrel_lambdas() -> Vec<[f64; 2]> {
    (0..20)
        .map(|k| {
            let rad = 0.5 + 9.5 * (k as f64 / 19.0);
            let th = -1.4 + 2.8 * ((k * 7 % 20) as f64 / 19.0);
            [rad * th.cos(), rad * th.sin()]
        })
        .collect()
}

macro_rules! overlay {
    ($cfg:ident, $a:ident; $($f:ident),*) => {
        $(if let Some(v) = $a.$f.clone() { $cfg.$f = v.into(); })*
    };
}

impl RunConfig {
    /// Defaults, then the `--config` file, then explicit flags.
    pub fn resolve(command: &str, a: &RunArgs) -> Result<Self> {
        let mut cfg = match &a.config {
            Some(p) => {
                let text = std::fs::read_to_string(p)?;
                serde_json::from_str::<RunConfig>(&text).map_err(|e| Error::Parse(format!("{}: {e}", p.display())))?
            }
            None => RunConfig::default(),
        };
        cfg.command = command.to_string();
        overlay!(cfg, a; gamma, frame, dim, xi, r, n0, eta, rtol, atol, max_dp, max_points, extend,
                 lambda_min, lambda_max, n_lambda, tau_list, xi_list);
        if let Some(l) = &a.lambdas {
            cfg.lambdas = parse_complex_list(l).map_err(Error::InvalidParam)?;
        }
        if a.u_plus.is_some() {
            cfg.u_plus = a.u_plus;
        }
        overlay!(cfg, a; mu, bulk_viscosity, big_r, center, lambda_star, threads, output, input);
        if let Some(c) = a.convention {
            cfg.convention = match c {
                ConventionArg::Lagrangian => NuConvention::Lagrangian,
                ConventionArg::Eulerian => NuConvention::Eulerian,
            };
        }
        cfg.log_radial |= a.log_radial;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidParam(m));
        if !(self.gamma > 1.0 && self.gamma.is_finite()) {
            return bad(format!("gamma must exceed 1, got {}", self.gamma));
        }
        if let Some(u) = self.u_plus {
            if u >= 1.0 - 1e-12 {
                return Err(Error::DegenerateShock(u));
            }
            if !(u > 0.0) {
                return bad(format!("u_plus must be positive, got {u}"));
            }
        }
        if self.dim != 1 && self.dim != 2 {
            return bad(format!("dim must be 1 or 2, got {}", self.dim));
        }
        if self.dim == 2 && self.frame == FrameKind::Lagrangian {
            return bad("the 2D system exists in Eulerian and pseudo-Lagrangian frames only".into());
        }
        if !(self.xi >= 0.0 && self.xi.is_finite()) {
            return bad(format!("xi must be non-negative, got {}", self.xi));
        }
        if !(self.r > 0.0 && self.big_r() > self.r) {
            return Err(Error::InvalidRadii { r: self.r, big_r: self.big_r() });
        }
        if self.n0 < 5 {
            return bad(format!("n0 must be at least 5, got {}", self.n0));
        }
        if !(self.eta > 0.0 && self.eta < 1.0) {
            return bad(format!("eta must lie in (0, 1), got {}", self.eta));
        }
        if !(self.rtol > 0.0 && self.atol > 0.0 && self.max_dp > 0.0 && self.extend >= 1.0) {
            return bad("tolerances must be positive and extend >= 1".into());
        }
        if let Some(t) = self.threads {
            if t == 0 {
                return bad("threads must be positive".into());
            }
        }
        Ok(())
    }

    pub fn big_r(&self) -> f64 {
        self.big_r.unwrap_or_else(|| (0.5 + self.gamma.sqrt()).powi(2))
    }

    /// SHA-256 of the canonical JSON form, output path excluded.
    pub fn hash(&self) -> String {
        let text = serde_json::to_string(&RunConfig { output: None, ..self.clone() }).expect("config serializes");
        Sha256::digest(text.as_bytes()).iter().map(|b| format!("{b:02x}")).collect()
    }

    fn u_plus(&self) -> Result<f64> {
        self.u_plus.ok_or_else(|| Error::InvalidParam("--uplus is required".into()))
    }

    fn engine(&self) -> EngineOptions {
        EngineOptions { rtol: self.rtol, atol: self.atol, ..Default::default() }
    }

    fn kato(&self) -> KatoOptions {
        KatoOptions { max_dp: self.max_dp, ..Default::default() }
    }

    fn refine(&self) -> RefineOptions {
        RefineOptions { eta: self.eta, max_points: self.max_points, ..Default::default() }
    }

    fn model(&self, u_plus: f64) -> Result<(GasModel, crate::gas::EndStates)> {
        let (ends, a) = solve_endstates(self.gamma, u_plus)?;
        let mut m = GasModel::new(self.gamma, a);
        if let Some(mu) = self.mu {
            m.mu = mu;
        }
        if let Some(e) = self.bulk_viscosity {
            m.eta = e;
        }
        Ok((m, ends))
    }

    fn profile(&self, u_plus: f64, frame: Frame) -> Result<Arc<ShockProfile>> {
        let (m, ends) = self.model(u_plus)?;
        let o = ProfileOptions { extend: self.extend, center: self.center, ..Default::default() };
        Ok(Arc::new(compute_profile(&m, &ends, frame, &o)?))
    }

    fn system(&self, u_plus: f64, frame: FrameKind, xi: f64) -> Result<EvansSystem> {
        match (frame, self.dim) {
            (FrameKind::Lagrangian, 1) => assemble_lagrange_1d(self.profile(u_plus, Frame::Lagrangian)?),
            (FrameKind::Lagrangian, _) => Err(Error::InvalidParam("no 2D Lagrangian system".into())),
            (f, d) => {
                let p = self.profile(u_plus, Frame::Eulerian)?;
                let base = if d == 1 {
                    assemble_euler_1d(p)?
                } else {
                    let m = p.model;
                    assemble_euler_2d(p, xi, m.mu, m.eta)?
                };
                if f == FrameKind::PseudoLagrangian {
                    assemble_pseudo_lagrangian(&base)
                } else {
                    Ok(base)
                }
            }
        }
    }

    fn contour_image(&self, sys: &EvansSystem) -> Result<ContourImage> {
        let con = semiannulus(self.r, self.big_r(), self.n0)?;
        let mut ev = SystemEvaluator::new(sys);
        ev.engine = self.engine();
        ev.kato = self.kato();
        adaptive_evaluate(&ev, &con, &self.refine())
    }
}

/// Summary of an image run.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct EvansSummary {
    pub config_hash: String,
    pub config: RunConfig,
    pub winding: i64,
    pub wraps: f64,
    pub valid: bool,
    pub max_arg_step: f64,
    /// `[min, max]` of log10 |D| after normalization.
    pub log10_range: [f64; 2],
    pub cost: usize,
    pub rhs_evals: usize,
    pub budget_exceeded: bool,
    pub seconds: f64,
}

#[derive(Serialize)]
struct Tagged<'a, T: Serialize> {
    config_hash: String,
    config: &'a RunConfig,
    #[serde(flatten)]
    report: T,
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

fn emit<T: Serialize>(cfg: &RunConfig, report: T, default_name: Option<&str>) -> Result<String> {
    let text = serde_json::to_string_pretty(&Tagged { config_hash: cfg.hash(), config: cfg, report })
        .map_err(|e| Error::Parse(e.to_string()))?;
    match cfg.output.as_deref().or(default_name.map(Path::new)) {
        Some(p) => write_text(p, &text)?,
        None => println!("{text}"),
    }
    Ok(text)
}

fn summary_of(cfg: &RunConfig, img: &ContourImage, seconds: f64) -> EvansSummary {
    let w = winding(img);
    EvansSummary {
        config_hash: cfg.hash(),
        config: cfg.clone(),
        winding: w.winding,
        wraps: w.wraps,
        valid: w.valid,
        max_arg_step: w.max_step,
        log10_range: img.log10_range.into(),
        cost: img.cost,
        rhs_evals: img.rhs_evals,
        budget_exceeded: img.budget_exceeded,
        seconds,
    }
}

fn cmd_profile(cfg: &RunConfig) -> Result<()> {
    let frame = match cfg.frame {
        FrameKind::Lagrangian => Frame::Lagrangian,
        _ => Frame::Eulerian,
    };
    let p = cfg.profile(cfg.u_plus()?, frame)?;
    let text = serde_json::to_string(&p.to_json(Some(&cfg.hash()))).map_err(|e| Error::Parse(e.to_string()))?;
    match &cfg.output {
        Some(path) => write_text(path, &text),
        None => {
            println!("{text}");
            Ok(())
        }
    }
}

fn cmd_evans(cfg: &RunConfig) -> Result<()> {
    let sys = cfg.system(cfg.u_plus()?, cfg.frame, cfg.xi)?;
    let t = Instant::now();
    let img = cfg.contour_image(&sys)?;
    let s = summary_of(cfg, &img, t.elapsed().as_secs_f64());
    let csv = cfg.output.clone().unwrap_or_else(|| PathBuf::from("image.csv"));
    write_csv(&img, &csv, Some(&s.config_hash))?;
    let text = serde_json::to_string_pretty(&s).map_err(|e| Error::Parse(e.to_string()))?;
    write_text(&csv.with_extension("json"), &text)?;
    println!("{text}");
    Ok(())
}

fn cmd_winding(cfg: &RunConfig) -> Result<()> {
    #[derive(Serialize)]
    struct Out {
        winding: i64,
        wraps: f64,
        points: usize,
        source: String,
    }
    let out = match &cfg.input {
        Some(p) => {
            let rows = read_csv(p)?;
            if rows.len() < 2 {
                return Err(Error::Parse(format!("{}: fewer than two image points", p.display())));
            }
            let args: Vec<f64> = rows.iter().map(|r| r.arg_unwrapped).collect();
            let step = args.windows(2).map(|w| (w[1] - w[0]).abs()).fold(0.0, f64::max);
            if step >= std::f64::consts::FRAC_PI_2 {
                return Err(Error::UnderResolved(step));
            }
            let tau = 2.0 * std::f64::consts::PI;
            let (lo, hi) = args.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &x| (a.min(x), b.max(x)));
            Out {
                winding: ((args[args.len() - 1] - args[0]) / tau).round() as i64,
                wraps: (hi - lo) / tau,
                points: rows.len(),
                source: p.display().to_string(),
            }
        }
        None => {
            let sys = cfg.system(cfg.u_plus()?, cfg.frame, cfg.xi)?;
            let img = cfg.contour_image(&sys)?;
            let w = crate::contour::winding_checked(&img)?;
            Out { winding: w.winding, wraps: w.wraps, points: img.lambdas.len(), source: "computed".into() }
        }
    };
    emit(cfg, out, None)?;
    Ok(())
}

fn cmd_evrel(cfg: &RunConfig) -> Result<()> {
    let up = cfg.u_plus()?;
    let one = RunConfig { dim: 1, ..cfg.clone() };
    let e = one.system(up, FrameKind::Eulerian, 0.0)?;
    let l = one.system(up, FrameKind::Lagrangian, 0.0)?;
    let lams: Vec<C64> = cfg.lambdas.iter().map(|z| C64::new(z[0], z[1])).collect();
    if lams.is_empty() {
        return Err(Error::InvalidParam("no evrel samples".into()));
    }
    let star = cfg.lambda_star.map(|z| C64::new(z[0], z[1])).unwrap_or(C64::new(3.0, 0.0));
    let rep = check_evrel(&e, &l, &lams, star, cfg.convention, &cfg.engine(), &cfg.kato())?;
    emit(cfg, rep, None)?;
    Ok(())
}

fn cmd_highfreq(cfg: &RunConfig) -> Result<()> {
    let sys = RunConfig { dim: 1, ..cfg.clone() }.system(cfg.u_plus()?, cfg.frame, 0.0)?;
    let grid = highfreq_grid(cfg.lambda_min, cfg.lambda_max, cfg.n_lambda)?;
    let vals = real_axis_values(&sys, &grid, &cfg.engine(), &cfg.kato())?;
    emit(cfg, fit_highfreq(&grid, &vals)?, None)?;
    Ok(())
}

fn cmd_xi0(cfg: &RunConfig) -> Result<()> {
    let up = cfg.u_plus()?;
    let p = cfg.profile(up, Frame::Eulerian)?;
    let m = p.model;
    let s2 = assemble_euler_2d(p.clone(), 0.0, m.mu, m.eta)?;
    let s1 = assemble_euler_1d(p.clone())?;
    let st = assemble_transverse_2d(p, m.mu)?;
    let con = semiannulus(cfg.r, cfg.big_r(), cfg.n0)?;
    let rep = check_xi0(&s2, &s1, &st, &con, &cfg.refine(), 10)?;
    emit(cfg, rep, None)?;
    Ok(())
}

/// One bench cell; failures leave NaN.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct BenchRow {
    pub tau_plus: f64,
    pub xi: f64,
    pub p_e: f64,
    pub t_e: f64,
    pub p_pl: f64,
    pub t_pl: f64,
}

pub fn run_bench(cfg: &RunConfig) -> Vec<BenchRow> {
    let two = RunConfig { dim: 2, ..cfg.clone() };
    let cell = |tau: f64, xi: f64, frame: FrameKind| -> (f64, f64) {
        let t = Instant::now();
        match two.system(tau, frame, xi).and_then(|s| two.contour_image(&s)) {
            Ok(img) if !img.budget_exceeded => (img.cost as f64, t.elapsed().as_secs_f64()),
            Ok(_) => {
                eprintln!("bench: tau+ = {tau}, xi = {xi}, {frame:?}: refinement budget exceeded");
                (f64::NAN, f64::NAN)
            }
            Err(e) => {
                eprintln!("bench: tau+ = {tau}, xi = {xi}, {frame:?}: {e}");
                (f64::NAN, f64::NAN)
            }
        }
    };
    let mut rows = Vec::new();
    for &tau in &cfg.tau_list {
        for &xi in &cfg.xi_list {
            let (p_e, t_e) = cell(tau, xi, FrameKind::Eulerian);
            let (p_pl, t_pl) = cell(tau, xi, FrameKind::PseudoLagrangian);
            rows.push(BenchRow { tau_plus: tau, xi, p_e, t_e, p_pl, t_pl });
        }
    }
    rows
}

fn cmd_bench(cfg: &RunConfig) -> Result<()> {
    if cfg.tau_list.is_empty() || cfg.xi_list.is_empty() {
        return Err(Error::InvalidParam("bench needs non-empty tau and xi lists".into()));
    }
    for &t in &cfg.tau_list {
        RunConfig { u_plus: Some(t), ..cfg.clone() }.validate()?;
    }
    let rows = run_bench(cfg);
    let mut text = format!("# config_hash={}\ntau_plus,xi,p_E,t_E,p_pL,t_pL\n", cfg.hash());
    for r in &rows {
        text += &format!("{},{},{},{:.3},{},{:.3}\n", r.tau_plus, r.xi, r.p_e, r.t_e, r.p_pl, r.t_pl);
    }
    match &cfg.output {
        Some(p) => write_text(p, &text)?,
        None => print!("{text}"),
    }
    Ok(())
}

fn cmd_plot(cfg: &RunConfig) -> Result<()> {
    let input = cfg.input.as_ref().ok_or_else(|| Error::InvalidParam("plot needs --input".into()))?;
    let rows = read_csv(input)?;
    let svg = render_svg(&rows, cfg.log_radial, Some(&cfg.hash()))?;
    let out = cfg.output.clone().unwrap_or_else(|| input.with_extension("svg"));
    write_text(&out, &svg)
}

/// Run a parsed command line.
pub fn run(cli: &Cli) -> Result<()> {
    let cfg = RunConfig::resolve(cli.command.name(), cli.command.args())?;
    if let Some(n) = cfg.threads {
        // a second initialization in the same process keeps the first pool
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    match &cli.command {
        Command::Profile(_) => cmd_profile(&cfg),
        Command::Evans(_) => cmd_evans(&cfg),
        Command::Winding(_) => cmd_winding(&cfg),
        Command::Evrel(_) => cmd_evrel(&cfg),
        Command::Highfreq(_) => cmd_highfreq(&cfg),
        Command::Xi0(_) => cmd_xi0(&cfg),
        Command::Bench(_) => cmd_bench(&cfg),
        Command::Plot(_) => cmd_plot(&cfg),
    }
}

/// Parse `std::env::args`, run, and return the process exit code.
pub fn main_with_args() -> i32 {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
