use thiserror::Error;

/// Errors produced by the numerical routines of this crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("empty effective domain")]
    EmptyDomain,

    #[error("grids do not match: {0}")]
    GridMismatch(String),

    #[error("grid does not contain the required node {0}")]
    MissingNode(f64),

    #[error("{0} not within tolerance of 0 (got {1:e}); upstream pressure is suspect")]
    BoundaryGate(&'static str, f64),

    #[error("function is not finite on a neighborhood of [0,1]")]
    NotFiniteAroundUnit,

    #[error("transition matrix is not irreducible")]
    NotIrreducible,

    #[error("not a stochastic matrix: {0}")]
    NotStochastic(String),

    #[error("support of P is not symmetric: P[{0}][{1}] = 0 but P[{1}][{0}] > 0")]
    SupportAsymmetry(usize, usize),

    #[error("support violation: R[{0}][{1}] > 0 but P[{0}][{1}] = 0")]
    SupportViolation(usize, usize),

    #[error("path enumeration cap exceeded: {paths:e} paths requested, cap {cap:e}; largest feasible t is {max_t}")]
    EnumerationCap { paths: f64, cap: f64, max_t: usize },

    #[error("power iteration did not converge after {0} iterations")]
    NoConvergence(usize),

    #[error("volume {0} exceeds cap {1}")]
    VolumeCap(u64, u64),

    #[error("degenerate direction: mu = -2")]
    DegenerateDirection,

    #[error("period {0} exceeds cap {1}")]
    PeriodCap(u32, u32),

    #[error("prime periods only: {0} is composite")]
    CompositePeriod(u32),

    #[error("point is a preimage of the critical point")]
    CriticalPreimage,

    #[error("inadmissible code: {0}")]
    InadmissibleCode(String),

    #[error("series did not converge: {0}")]
    SeriesDiverges(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
