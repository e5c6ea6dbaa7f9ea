use thiserror::Error;

/// Errors raised by state construction, channels, measurement, and scenario
/// evaluation.
#[derive(Debug, Error)]
pub enum Error {
    #[error("subsystem name collision: {0}")]
    NameCollision(String),

    #[error("unknown subsystem: {0}")]
    UnknownSubsystem(String),

    #[error("layout mismatch: {0}")]
    LayoutMismatch(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("non-finite amplitude at flat index {0}")]
    NonFinite(usize),

    #[error("state norm {0} outside tolerance of 1")]
    NotNormalized(f64),

    #[error("matrix not Hermitian: max entrywise deviation {dev} exceeds {tol}")]
    NotHermitian { dev: f64, tol: f64 },

    #[error("operator not unitary: max entrywise deviation of U†U from I is {dev}")]
    NotUnitary { dev: f64 },

    #[error("unitary step drifted output norm by {dev}, beyond {tol}")]
    UnitarityDrift { dev: f64, tol: f64 },

    #[error("input not in the ready sector of subsystem {subsystem}: stray weight {weight}")]
    NotReadySector { subsystem: String, weight: f64 },

    #[error("measurement basis invalid: {0}")]
    InvalidBasis(String),

    #[error("requested outcome {label} has probability {prob} below the projection floor")]
    ZeroProbability { label: String, prob: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid scenario: {0}")]
    InvalidScenario(String),

    #[error("outcome label sets do not match: {0}")]
    LabelMismatch(String),

    #[error("sweep grid is empty")]
    EmptyGrid,

    #[error("sweep grid must be strictly increasing at position {0}")]
    GridNotIncreasing(usize),
}

pub type Result<T> = std::result::Result<T, Error>;
