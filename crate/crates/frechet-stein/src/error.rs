use thiserror::Error;

/// Errors produced by the numerical routines in this crate.
#[derive(Debug, Clone, Error)]
pub enum Error {
    /// Argument outside the domain of a special function.
    #[error("domain error in {function}: {message}")]
    Domain { function: &'static str, message: String },

    /// The adaptive integrator ran out of subdivisions before reaching the
    /// requested tolerance. Carries the best estimate obtained so far.
    #[error("quadrature did not reach tolerance: value ≈ {value}, error estimate {error_estimate} after {subdivisions} subdivisions")]
    Accuracy {
        value: f64,
        error_estimate: f64,
        subdivisions: usize,
    },

    /// A bracketing search failed to enclose a root.
    #[error("inversion failure: {0}")]
    Inversion(String),

    /// Unknown catalog distribution name.
    #[error("unknown distribution {0:?}")]
    UnknownDistribution(String),

    /// Catalog parameters violate the entry's validity constraints.
    #[error("invalid parameters for {name}: {message}")]
    InvalidParameters { name: &'static str, message: String },

    /// A mean was requested for a law whose mean does not exist.
    #[error("mean does not exist for {0}")]
    NonexistentMean(String),

    /// A (P, Q) pair violates the role preconditions of the discrepancy.
    #[error("role violation: {0}")]
    RoleViolation(String),

    /// A quantity required by one of the distance-bound theorems is missing.
    #[error("precondition violated: {0}")]
    Precondition(String),

    /// A law broke an Assumption-0 requirement during evaluation.
    #[error("assumption violated for {law} at x = {x}: {message}")]
    AssumptionViolated { law: String, x: f64, message: String },

    /// Input validation failure (empty grids, non-positive values, ...).
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T> = std::result::Result<T, Error>;
