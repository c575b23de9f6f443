use std::path::PathBuf;

use crate::lattice::LatticePoint;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Which of the three shell-coupling blocks a structural report refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ShellBlock {
    Alpha,
    Beta,
    Gamma,
}

impl std::fmt::Display for ShellBlock {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            ShellBlock::Alpha => "alpha",
            ShellBlock::Beta => "beta",
            ShellBlock::Gamma => "gamma",
        })
    }
}

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("wave number k = {k} lies outside the pass band (0, 3)")]
    OutOfBand { k: f64 },

    #[error("wave number k = {k} is within {delta} of the excluded point 2*sqrt(2)")]
    ExcludedPoint { k: f64, delta: f64 },

    #[error("k^2 = {re}{im:+}i is within {delta} of the spectrum [0, 9]")]
    NearSpectrum { re: f64, im: f64, delta: f64 },

    #[error("pass-band quadrature needs eps > 0: the integrand is singular on the real axis")]
    SingularIntegrand,

    #[error("invalid quadrature grid: {0}")]
    InvalidGrid(String),

    #[error("invalid absorption schedule: {0}")]
    InvalidSchedule(String),

    #[error("side index {0} is not in 1..=6")]
    InvalidSide(usize),

    #[error("side choice is inconsistent with the region at {point:?}: {reason}")]
    InconsistentSides { point: LatticePoint, reason: String },

    #[error("invalid region: {0}")]
    InvalidRegion(String),

    #[error("shell {n}: {block} row {row} does not match the stencil ({detail})")]
    ShellStructure {
        n: usize,
        block: ShellBlock,
        row: usize,
        detail: String,
    },

    #[error(
        "recursion did not converge: |dG(0,0)| = {change:e} at N = {order} (cap {cap}); \
         raise the tolerance or the absorption"
    )]
    Truncation { change: f64, order: usize, cap: usize },

    #[error(
        "singular shell system at n = {n} with eps = {eps}: the parameter is degenerate \
         for the zero initial guess; rerun with eps > 0"
    )]
    DegenerateParameter { n: usize, eps: f64 },

    #[error("point {point:?} needs table radius {required}, table has {available}")]
    Range {
        point: LatticePoint,
        required: usize,
        available: usize,
    },

    #[error("point {0:?} lies below the boundary row")]
    OutsideHalfPlane(LatticePoint),

    #[error("duplicate boundary node {0}")]
    DuplicateNode(i64),

    #[error("{0}")]
    InvalidArgument(String),

    #[error("unsupported table schema version {0}")]
    SchemaVersion(u32),

    #[error("I/O error on {path}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {message}")]
    Format { path: PathBuf, message: String },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn format(path: impl Into<PathBuf>, message: impl ToString) -> Self {
        Error::Format {
            path: path.into(),
            message: message.to_string(),
        }
    }
}
