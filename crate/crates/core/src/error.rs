use thiserror::Error;

/// Failures reported by the numerical routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("hypothesis violated: {0}")]
    HypothesisViolated(String),

    #[error("t = {t} lies outside [-{t0}, {t0}]")]
    OutOfRange { t: f64, t0: f64 },

    #[error("step size underflow at x = {x} (t = {t})")]
    StepUnderflow { x: f64, t: f64 },

    #[error("graph form breaks down at theta = {theta} (|sin sigma| = {sin_sigma:e})")]
    GraphBreakdown { theta: f64, sin_sigma: f64 },

    #[error("insufficient arc: {0}")]
    InsufficientArc(String),

    #[error("no bracket: {0}")]
    NoBracket(String),

    #[error("closure residual {residual:e} exceeds {tol:e}")]
    ClosureResidual { residual: f64, tol: f64 },

    #[error("no critical point within budget {budget}")]
    NoCriticalPoint { budget: f64 },

    #[error("eigensolver did not converge on grid {grid}")]
    EigenNonConvergence { grid: usize },

    #[error("test function has nonzero mean {mean:e}")]
    MeanNotZero { mean: f64 },

    #[error("no partner parallel for t = {t}")]
    NoPartner { t: f64 },

    #[error("no stable candidate encloses area {area}")]
    NoCandidate { area: f64 },

    #[error("malformed region: {0}")]
    Malformed(String),
}

pub type Result<T> = std::result::Result<T, Error>;
