use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("coordinate outside the metric chart: {0}")]
    Domain(String),

    #[error("evaluator returned a non-finite value at {coords:?}")]
    Eval { coords: [f64; 4] },

    #[error("axis {axis} out of range for a lattice with {ndim} axes")]
    Axis { axis: usize, ndim: usize },

    #[error("axis {axis} has {count} points, stencil needs at least {needed}")]
    TooFewPoints { axis: usize, count: usize, needed: usize },

    #[error("invalid lattice: {0}")]
    InvalidLattice(String),

    #[error("lattice has {points} points, above the configured cap of {cap}{}", level.map(|l| format!(" at refinement level {l}")).unwrap_or_default())]
    MemoryCap { points: usize, cap: usize, level: Option<usize> },

    #[error("fields live on different lattices")]
    LatticeMismatch,

    #[error("mask keeps no points ({0})")]
    EmptyMask(String),

    #[error("phase jump of {jump:.4} rad between neighbours {from:?} -> {to:?} exceeds the Nyquist guard")]
    NyquistViolation { from: Vec<usize>, to: Vec<usize>, jump: f64 },

    #[error("field vanishes at the unwrapping reference point {0:?}")]
    ZeroAtReference(Vec<usize>),

    #[error("polarization norm vanishes on the lattice")]
    NullPolarization,

    #[error("tensor amplitude norm vanishes on the lattice")]
    NullAmplitude,

    #[error("unsupported background: {0}")]
    UnsupportedBackground(String),

    #[error("phase velocity {v} on the wrong side of c = {c} for the {branch} branch")]
    BranchDomain { v: f64, c: f64, branch: &'static str },

    #[error("wavenumber must be nonzero")]
    ZeroWavenumber,

    #[error("stability guard violated: {0}")]
    CflViolation(String),

    #[error("quadratic fit needs at least 5 samples, got {0}")]
    FitIllConditioned(usize),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("i/o: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Io(e.to_string())
    }
}
