use thiserror::Error;

/// Errors raised by the library. Unstable flight is not an error: it is
/// reported through [`crate::control::Trajectory::stable`].
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("euler-angle jacobian is singular (|cos theta| = {cos_theta:e})")]
    SingularJacobian { cos_theta: f64 },

    #[error("attitude singularity in thrust compensation (|cos phi * cos theta| = {0:e})")]
    AttitudeSingularity(f64),

    #[error("state left the finite range")]
    NonFiniteState,

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("front is empty")]
    EmptyFront,

    #[error("rank {rank} outside 1..={population}")]
    RankOutOfRange { rank: usize, population: usize },

    #[error("unknown sweep axis `{0}` (expected one of: population, emigration, c1, c2, w)")]
    UnknownAxis(String),

    #[error("unknown algorithm `{0}` (expected one of: bbo, pso, vebbo, vepso, nsbbo, nspso)")]
    UnknownAlgorithm(String),

    #[error("config: {0}")]
    Config(String),

    #[error("io: {0}")]
    Io(String),

    #[error("csv: {0}")]
    Csv(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Csv(e.to_string())
    }
}
