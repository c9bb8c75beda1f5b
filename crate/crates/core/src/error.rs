use thiserror::Error;

#[derive(Debug, Error)]
pub enum FlowError {
    #[error("invalid profile: {0}")]
    InvalidProfile(String),

    #[error("magnetic field plateau must be nonzero (got {0})")]
    ZeroField(f64),

    #[error("alpha on bulk level: |alpha - V| = {level} (alpha = {alpha})")]
    AlphaOnBulkLevel { alpha: f64, level: f64 },

    #[error("flow undefined at alpha = {0}: alpha lies in the bulk spectrum")]
    FlowUndefined(f64),

    #[error("alpha in bulk spectrum: {0}")]
    AlphaInBulkSpectrum(f64),

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("invalid window: lo = {lo}, hi = {hi}")]
    InvalidWindow { lo: f64, hi: f64 },

    #[error("eigensolver failed to converge: {0}")]
    Eigensolver(String),

    #[error("invalid sweep configuration: {0}")]
    InvalidSweep(String),

    #[error("tracking ambiguity at zeta = {zeta}: best overlap {overlap:.4} after bisection down to step {step:e}")]
    TrackingAmbiguity { zeta: f64, overlap: f64, step: f64 },

    #[error("unclassifiable endpoint for branch at zeta = {zeta}, mu = {mu}")]
    UnclassifiableEndpoint { zeta: f64, mu: f64 },

    #[error("window invalid at alpha = {0}: a branch endpoint lies within the margin")]
    WindowInvalid(f64),

    #[error("phi window touches branch endpoint: mu = {mu} at zeta = {zeta}")]
    PhiWindowTouchesEndpoint { zeta: f64, mu: f64 },

    #[error("internal consistency check failed: {0}")]
    Inconsistent(String),

    #[error("dense budget exceeded: dimension {dim} > {budget}")]
    BudgetExceeded { dim: usize, budget: usize },

    #[error("projection profile violates the periodic seam: {0}")]
    SeamViolation(String),

    #[error("invalid perturbation: {0}")]
    InvalidPerturbation(String),

    #[error("config error: {0}")]
    Config(String),

    #[error("unknown preset `{0}`")]
    UnknownPreset(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl FlowError {
    /// Process exit code for the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            FlowError::AlphaOnBulkLevel { .. }
            | FlowError::FlowUndefined(_)
            | FlowError::AlphaInBulkSpectrum(_) => 2,
            FlowError::TrackingAmbiguity { .. } | FlowError::UnclassifiableEndpoint { .. } => 3,
            FlowError::WindowInvalid(_) | FlowError::PhiWindowTouchesEndpoint { .. } => 4,
            FlowError::BudgetExceeded { .. } => 5,
            _ => 1,
        }
    }
}

pub type Result<T> = std::result::Result<T, FlowError>;
