use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("photon number {photons} exceeds truncation {truncation}")]
    IndexOutOfRange { photons: usize, truncation: usize },

    #[error("flat index {index} outside a basis of dimension {dim}")]
    FlatIndexOutOfRange { index: usize, dim: usize },

    #[error("operator is not Hermitian (max |A - A^dagger| = {deviation:e})")]
    HermiticityViolation { deviation: f64 },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("truncation n_max = {n_max} is too small; at least {required} is needed")]
    TruncationTooSmall { n_max: usize, required: usize },

    #[error("invalid target: {0}")]
    InvalidTarget(String),

    #[error(
        "target needs a relative phase the carrier and red sideband cannot supply at photon level {level}"
    )]
    PhaseUnreachable { level: usize },

    #[error("idle steps have no gate-charge/flux setting")]
    NotAPhysicalKnob,

    #[error("integration step {dt:e} s exceeds the stability limit {limit:e} s")]
    StepTooLarge { dt: f64, limit: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("malformed document: {0}")]
    Document(String),

    #[error("synthesis did not converge: best infidelity {infidelity:e}")]
    NotConverged { infidelity: f64 },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
