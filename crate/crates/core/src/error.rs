use num_complex::Complex64;
use thiserror::Error;

/// Failure modes shared across the crate.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParam(String),
    #[error("degenerate shock: u_plus = {0} must lie in (0, 1 - 1e-12)")]
    DegenerateShock(f64),
    #[error("eigensolver did not converge: {0}")]
    NonConvergence(String),
    #[error("rank deficient frame (column {0})")]
    RankDeficient(usize),
    #[error("step size underflow at t = {t} (h = {h:e})")]
    StepUnderflow { t: f64, h: f64 },
    #[error("step budget exhausted at t = {0}")]
    StepBudget(f64),
    #[error("grid is not strictly monotone at index {0}")]
    NonMonotoneGrid(usize),
    #[error("profile left the interval between the endstates at s = {0}")]
    ProfileDivergence(f64),
    #[error("profile did not reach endpoint tolerance within cap {cap} on the {side} side")]
    TruncationFailure { side: &'static str, cap: f64 },
    #[error("splitting failure at lambda = {lambda}: eigenvalue {mu} has |Re| < 1e-10")]
    SplittingFailure { lambda: Complex64, mu: Complex64 },
    #[error("subspace dimension mismatch at lambda = {lambda}: got ({k_plus}, {k_minus}) for N = {n}")]
    SplittingCount { lambda: Complex64, k_plus: usize, k_minus: usize, n: usize },
    #[error("Kato path too coarse between {from} and {to}")]
    PathTooCoarse { from: Complex64, to: Complex64 },
    #[error("frame degeneracy at lambda = {0}")]
    FrameDegeneracy(Complex64),
    #[error("Evans function vanishes at the normalization point")]
    ZeroAtNormalization,
    #[error("invalid contour radii r = {r}, R = {big_r}")]
    InvalidRadii { r: f64, big_r: f64 },
    #[error("refinement budget exceeded")]
    RefinementBudgetExceeded,
    #[error("image under-resolved: argument step {0} >= pi/2")]
    UnderResolved(f64),
    #[error("xi = 0 decoupling residual {0:e} exceeds 1e-12")]
    AssemblyInconsistent(f64),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("io error: {0}")]
    Io(String),
}

impl Error {
    /// CLI exit code: 2 domain, 3 numerical, 4 I/O.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::InvalidParam(_)
            | Error::DegenerateShock(_)
            | Error::InvalidRadii { .. }
            | Error::NonMonotoneGrid(_) => 2,
            Error::Parse(_) | Error::Io(_) => 4,
            _ => 3,
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
