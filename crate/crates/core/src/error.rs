use num_complex::Complex64;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("level {level} recurrence is singular at order {order}")]
    SingularRecurrence { level: usize, order: usize },
    #[error("direction {phi} is a Stokes direction")]
    StokesDirection { phi: f64 },
    #[error("continuation error estimate {achieved:e} exceeds tolerance")]
    RadiusExceeded { achieved: f64 },
    #[error("no convergence: {0}")]
    NoConvergence(String),
    #[error("quadrature failed, error estimate {estimate:e}")]
    QuadratureFailure { estimate: f64 },
    #[error("transseries terms do not decay at level {level}")]
    NonConvergent { level: usize },
    #[error("x = 0 is not allowed")]
    XZero,
    #[error("transform singular at x = {0}")]
    SingularTransform(Complex64),
    #[error("branch cut crossed: {0}")]
    BranchCut(String),
    #[error("step size underflow at x = {x}")]
    StepFailure { x: Complex64 },
    #[error("both charts singular at x = {x}")]
    ChartDeadlock { x: Complex64 },
    #[error("degenerate fit: {0}")]
    FitDegenerate(String),
    #[error("ln(xi-12) obstruction {0} at order 6")]
    ObstructionNonzero(String),
    #[error("x = {x} lies outside both two-scale regions")]
    OutsideRegion { x: Complex64 },
    #[error("cycle degenerate near s = {s}")]
    DegenerateCycle { s: Complex64 },
    #[error("match failure: {0}")]
    MatchFailure(String),
    #[error("cycle breakdown: {0}")]
    CycleBreakdown(String),
    #[error("no integer N balances the imaginary part")]
    NoIntegerConsistency,
    #[error("config: {0}")]
    Config(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Short machine-readable tag used by the CLI error JSON.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::InvalidInput(_) => "InvalidInput",
            Error::SingularRecurrence { .. } => "SingularRecurrence",
            Error::StokesDirection { .. } => "StokesDirection",
            Error::RadiusExceeded { .. } => "RadiusExceeded",
            Error::NoConvergence(_) => "NoConvergence",
            Error::QuadratureFailure { .. } => "QuadratureFailure",
            Error::NonConvergent { .. } => "NonConvergent",
            Error::XZero => "XZero",
            Error::SingularTransform(_) => "SingularTransform",
            Error::BranchCut(_) => "BranchCut",
            Error::StepFailure { .. } => "StepFailure",
            Error::ChartDeadlock { .. } => "ChartDeadlock",
            Error::FitDegenerate(_) => "FitDegenerate",
            Error::ObstructionNonzero(_) => "ObstructionNonzero",
            Error::OutsideRegion { .. } => "OutsideRegion",
            Error::DegenerateCycle { .. } => "DegenerateCycle",
            Error::MatchFailure(_) => "MatchFailure",
            Error::CycleBreakdown(_) => "CycleBreakdown",
            Error::NoIntegerConsistency => "NoIntegerConsistency",
            Error::Config(_) => "Config",
            Error::Io(_) => "Io",
            Error::Json(_) => "Json",
        }
    }
}
