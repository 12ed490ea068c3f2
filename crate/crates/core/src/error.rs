use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invariant violated for {what}: residual {residual:.3e} exceeds {tol:.3e}")]
    InvariantViolation {
        what: &'static str,
        residual: f64,
        tol: f64,
    },

    #[error("mismatched ambient spaces or algebra kinds")]
    MismatchedAmbient,

    #[error("not two-step nilpotent: |ξ²| = {residual:.3e}")]
    NotNilpotent { residual: f64 },

    #[error("jet degree {degree} too small for request of order {order}")]
    JetDegree { degree: usize, order: usize },

    #[error("division by jet with zero constant term")]
    JetDivisionByZero,

    #[error("sqrt of jet with non-positive constant term")]
    JetSqrtDomain,

    #[error("parse error at byte {offset}: expected {expected}")]
    Parse { offset: usize, expected: String },

    #[error("unknown identifier `{name}` at byte {offset}")]
    UnknownIdentifier { name: String, offset: usize },

    #[error("domain violation in `{subtree}` at ({u:.4}, {v:.4}): {reason}")]
    EvalDomain {
        subtree: String,
        u: f64,
        v: f64,
        reason: &'static str,
    },

    #[error("degenerate second fundamental form: asymptotic quadratic vanishes")]
    DegenerateQuadratic,

    #[error("curvature spheres not unique (umbilic point at ({u:.4}, {v:.4}))")]
    Umbilic { u: f64, v: f64 },

    #[error("Lie cyclide splitting degenerate at ({u:.4}, {v:.4})")]
    SplittingDegenerate { u: f64, v: f64 },

    #[error("geometry assumption violated: {what} (at {count} of {total} interior points)")]
    GeometryAssumption {
        what: String,
        count: usize,
        total: usize,
    },

    #[error("conformal structure is not of signature (1,1) at ({u:.4}, {v:.4})")]
    ConformalSignature { u: f64, v: f64 },

    #[error("candidate form rejected: {reason} (residual {residual:.3e})")]
    FormRejected { reason: String, residual: f64 },

    #[error("geometry mismatch: operation requires {required}, surface is {actual}")]
    GeometryMismatch {
        required: &'static str,
        actual: String,
    },

    #[error("gauge integration rejected a step: group membership drift {drift:.3e}")]
    GaugeDrift { drift: f64 },

    #[error("{0}")]
    Other(String),
}

pub type Result<T> = std::result::Result<T, Error>;
