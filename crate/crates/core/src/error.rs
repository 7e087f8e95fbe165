use thiserror::Error;

/// Failure modes across the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid kinematic parameter `{name}` = {value}: {reason}")]
    InvalidSpec {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    #[error("velocity ({v}, {omega}) lies outside the admissible set")]
    StateOutside { v: f64, omega: f64 },

    #[error("geometry: {0}")]
    Geometry(#[from] GeometryError),

    #[error("degenerate pair: reference points coincide (|dp| = {0:e})")]
    DegeneratePair(f64),

    #[error("alpha interval requested with non-negative demand {0}")]
    NonNegativeDemand(f64),

    #[error("scenario: {0}")]
    Scenario(String),

    #[error("config: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum GeometryError {
    #[error("half-space intersection is empty")]
    Empty,
    #[error("half-space intersection is unbounded")]
    Unbounded,
    #[error("vertex list is empty")]
    NoVertices,
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
