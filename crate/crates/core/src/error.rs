use thiserror::Error;

use crate::control::Mode;
use crate::switching::Trigger;

/// Errors raised by the model builders, controllers, engine and scenario layer.
#[derive(Debug, Error)]
pub enum Error {
    #[error("non-physical state: {0}")]
    NonPhysicalState(String),

    #[error("operator `{name}` is not Hermitian (deviation {deviation:e})")]
    NonHermitianInput { name: String, deviation: f64 },

    #[error("decay rate of channel {index} must be positive, got {rate}")]
    NonPositiveRate { index: usize, rate: f64 },

    #[error("exactly two control Hamiltonians are required, got {0}")]
    ControlCount(usize),

    #[error("weight matrix is not symmetric positive definite: {0}")]
    BadWeightMatrix(String),

    #[error("singular control denominator |e^T P K s| = {value:e} at t = {t}")]
    SingularDenominator { t: f64, value: f64 },

    #[error(
        "switching assumption violated at t = {t}: leaving {from} on a {trigger} trigger, \
         but {to} also satisfies its {dest_trigger} condition"
    )]
    AssumptionViolation {
        t: f64,
        from: Mode,
        to: Mode,
        trigger: Trigger,
        dest_trigger: Trigger,
    },

    #[error("integration step too large: |s| = {norm} at t = {t}")]
    StepTooLarge { t: f64, norm: f64 },

    #[error("domain error: {0}")]
    DomainError(String),

    #[error("window [{start}, {end}] lies outside the trajectory span [{first}, {last}]")]
    WindowOutOfRange {
        start: f64,
        end: f64,
        first: f64,
        last: f64,
    },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("invalid config at `{path}`: {message}")]
    Validation { path: String, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn validation(path: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Validation {
            path: path.into(),
            message: message.into(),
        }
    }

    /// Process exit code used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::AssumptionViolation { .. } => 3,
            Error::SingularDenominator { .. }
            | Error::StepTooLarge { .. }
            | Error::DomainError(_)
            | Error::WindowOutOfRange { .. } => 4,
            Error::Io(_) => 1,
            _ => 2,
        }
    }

    /// Short snake_case label, used as a status column in reports.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::NonPhysicalState(_) => "non_physical_state",
            Error::NonHermitianInput { .. } => "non_hermitian_input",
            Error::NonPositiveRate { .. } => "non_positive_rate",
            Error::ControlCount(_) => "control_count",
            Error::BadWeightMatrix(_) => "bad_weight_matrix",
            Error::SingularDenominator { .. } => "singular_denominator",
            Error::AssumptionViolation { .. } => "assumption_violation",
            Error::StepTooLarge { .. } => "step_too_large",
            Error::DomainError(_) => "domain_error",
            Error::WindowOutOfRange { .. } => "window_out_of_range",
            Error::InvalidArgument(_) => "invalid_argument",
            Error::Parse(_) => "parse",
            Error::Validation { .. } => "validation",
            Error::Io(_) => "io",
        }
    }
}
