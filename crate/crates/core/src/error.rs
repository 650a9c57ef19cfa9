use thiserror::Error;

/// Failures raised by the shape-space evaluators, solvers and tracers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An input lies on (or numerically too close to) a singular locus.
    #[error("domain error: {0}")]
    Domain(String),

    /// A documented precondition of the operation does not hold.
    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("shape is not a Lagrange relative equilibrium (residual {residual:.3e})")]
    NotAnLre { residual: f64 },

    /// The shape solves the algebraic conditions but has no realization on the sphere.
    #[error("embedding impossible: {0}")]
    EmbeddingImpossible(String),

    #[error("bodies too close to collision or antipodal position (|cos sigma| = {cos:.15})")]
    CollisionProximity { cos: f64 },

    #[error("certificate failure: {what} residual {residual:.3e} exceeds {limit:.1e}")]
    CertificateFailure {
        what: String,
        residual: f64,
        limit: f64,
    },

    /// Both coefficients of the mass-ratio equation vanish; every ratio works.
    #[error("indeterminate mass ratio at {0}")]
    Indeterminate(String),

    #[error("denominator vanishes: {0}")]
    DenominatorZero(String),

    #[error("point is off the h = 0 curve (|h| = {h:.3e})")]
    OffCurve { h: f64 },

    #[error("Newton iteration did not converge: {0}")]
    NewtonDivergence(String),

    #[error("invalid continuation seed: {0}")]
    SeedInvalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;
