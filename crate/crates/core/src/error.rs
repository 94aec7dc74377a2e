use std::fmt;

/// Pipeline stage used to tag errors raised during end-to-end runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stage {
    Config,
    Spectrum,
    Sweep,
    Extract,
    Frequencies,
    Order34,
    Inductive,
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Stage::Config => "config",
            Stage::Spectrum => "spectrum",
            Stage::Sweep => "sweep",
            Stage::Extract => "extract",
            Stage::Frequencies => "frequencies",
            Stage::Order34 => "order-3/4 recovery",
            Stage::Inductive => "inductive recovery",
        };
        f.write_str(s)
    }
}

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("invalid multi-index: {0}")]
    InvalidIndex(String),
    #[error("invalid potential: {0}")]
    InvalidPotential(String),
    #[error("factorial overflow for multi-index {0}")]
    Overflow(String),
    #[error("t = {t} outside the valid domain (0, {limit}) on axis {axis}")]
    TimeDomain { t: f64, axis: usize, limit: f64 },
    #[error("singular time t = {t} on axis {axis}")]
    SingularTime { t: f64, axis: usize },
    #[error("truncation order {have} is insufficient, need at least {need}")]
    TruncationOrder { have: u32, need: u32 },
    #[error("degenerate Hessian: eigenvalue {0:e} is numerically zero")]
    DegenerateHessian(f64),
    #[error("quadrature did not converge: change {change:e} at order {order}")]
    NoConvergence { order: usize, change: f64 },
    #[error("order j = {j} exceeds the supported maximum {max} for n = {n}")]
    OrderTooHigh { j: usize, max: usize, n: usize },
    #[error("basis too small: {0}")]
    BasisTooSmall(String),
    #[error("grid too coarse: {0}")]
    GridTooCoarse(String),
    #[error("eigenvalue cutoff {have} is below the required {need}")]
    CutoffTooLow { have: f64, need: f64 },
    #[error("ill-conditioned design (condition {cond:e} > {threshold:e}); respace the grid")]
    IllConditioned { cond: f64, threshold: f64 },
    #[error("fit residual {residual:e} exceeds tolerance {tol:e}")]
    Residual { residual: f64, tol: f64 },
    #[error("hypothesis violated: {0}")]
    Hypothesis(String),
    #[error("inconsistent input: {0}")]
    Inconsistent(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("eigenvalue accuracy {estimate:e} at ħ = {hbar} misses the target {target:e}")]
    Accuracy { hbar: f64, estimate: f64, target: f64 },
    #[error("at ħ = {hbar}: {source}")]
    AtHbar {
        hbar: f64,
        #[source]
        source: Box<Error>,
    },
    #[error("stage {stage}: {source}")]
    Stage {
        stage: Stage,
        #[source]
        source: Box<Error>,
    },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub fn at(self, stage: Stage) -> Error {
        Error::Stage {
            stage,
            source: Box::new(self),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

/// Attach a pipeline stage to an error result.
pub trait StageExt<T> {
    fn stage(self, stage: Stage) -> Result<T>;
}

impl<T> StageExt<T> for Result<T> {
    fn stage(self, stage: Stage) -> Result<T> {
        self.map_err(|e| e.at(stage))
    }
}
