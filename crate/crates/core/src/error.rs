use thiserror::Error;

pub type Result<T> = std::result::Result<T, NslabError>;

#[derive(Debug, Error)]
pub enum NslabError {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("dimension mismatch: expected {expected} samples, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("fields live on different grids")]
    GridMismatch,

    #[error("time grids differ")]
    TimeGridMismatch,

    #[error("quadrature did not converge: estimated error {error:e} exceeds tolerance {tolerance:e}")]
    Quadrature { error: f64, tolerance: f64 },

    #[error("tail bound failure: {0}")]
    TailBound(String),

    #[error("under-resolved: {0}")]
    Resolution(String),

    #[error("containment violated: {0}")]
    Containment(String),

    #[error("mollifier support (kappa = {kappa}) exceeds the box (L = {box_length})")]
    SupportExceedsBox { kappa: f64, box_length: f64 },

    #[error("empty time grid")]
    EmptyTimeGrid,

    #[error("need at least 3 points in the fit window, got {0}")]
    TooFewPoints(usize),

    #[error("slope undefined: {0}")]
    UndefinedSlope(String),

    #[error(
        "Picard iteration did not converge in {sweeps} sweeps (last residual {residual:e}); data likely too large"
    )]
    MaxSweeps { sweeps: usize, residual: f64 },

    #[error("Picard residual increased for {0} consecutive sweeps; data likely too large")]
    Divergence(usize),

    #[error("blow-up guard tripped at t = {time}: sup|u| grew from {initial:e} to {current:e}")]
    Blowup { time: f64, initial: f64, current: f64 },

    #[error("quadrature weights not finite")]
    QuadratureInstability,

    #[error("regularization core under-resolved: {0}")]
    CoreUnderResolved(String),

    #[error("aliasing: rescale by {lambda} pushes energy fraction {fraction:e} past Nyquist")]
    Aliasing { lambda: f64, fraction: f64 },

    #[error("sample too close to the origin: |x| = {0}")]
    SampleTooClose(f64),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl From<serde_json::Error> for NslabError {
    fn from(e: serde_json::Error) -> Self {
        NslabError::Parse(e.to_string())
    }
}
