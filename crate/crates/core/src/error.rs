use thiserror::Error;

/// Everything that can go wrong when building states, observables, bounds,
/// or estimates. CLI exit codes are derived from the variant, so keep the
/// split between "bad input syntax" and "physically invalid" intact.
#[derive(Debug, Error)]
pub enum Error {
    #[error("non-finite value in {context}")]
    NonFinite { context: &'static str },

    #[error("unphysical Bloch vector: |p|^2 = {norm_sq} exceeds 1")]
    UnphysicalState { norm_sq: f64 },

    #[error("operation requires a pure state, but |p|^2 = {norm_sq}")]
    NotPure { norm_sq: f64 },

    #[error("degenerate observable: the Pauli vector part is zero")]
    DegenerateObservable,

    /// The pair (anti)commutes too closely: F(A,B) below the threshold means
    /// the mixedness inversion divides by (numerical) zero.
    #[error("observables effectively commute: F = {f:e} is below {min:e}, so mixedness cannot be recovered from this pair")]
    CommutingPair { f: f64, min: f64 },

    #[error("need at least {min} observables, got {n}")]
    TooFewObservables { n: usize, min: usize },

    #[error("parameter {name} out of range: {value}")]
    InvalidParameter { name: &'static str, value: f64 },

    #[error("grid needs at least {min} steps per axis, got {steps}")]
    TooFewSteps { steps: usize, min: usize },

    #[error("invalid {what} '{input}': {reason}")]
    Parse {
        what: &'static str,
        input: String,
        reason: String,
    },

    #[error("invalid shot record: {reason}")]
    BadShotRecord { reason: String },

    #[error("counts do not form a usable measurement plan: {reason}")]
    PlanMismatch { reason: String },
}

pub type Result<T> = std::result::Result<T, Error>;
