//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("degenerate direction: cannot extract angles from a zero vector")]
    DegenerateDirection,

    #[error("coincident element positions")]
    CoincidentElements,

    #[error("source inside array: element coincides with the spherical-wave source")]
    SourceInsideArray,

    #[error("sub-cluster split requires at least 2 clusters, got {0}")]
    TooFewClusters(usize),

    #[error("no UE attenuation data for band containing {freq_hz} Hz")]
    NoBandData { freq_hz: f64 },

    #[error("UE attenuation table has no entry for ({scenario}, {band}, element {element})")]
    MissingTableEntry {
        scenario: String,
        band: String,
        element: usize,
    },

    #[error("channel matrix contains non-finite entries")]
    NonFiniteChannel,

    #[error("empty sample set")]
    EmptySamples,

    #[error("inconsistent cluster counts between modules: {0}")]
    InconsistentClusters(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("config parse error: {0}")]
    ConfigParse(String),

    #[error("malformed UE attenuation table at line {line}: {reason}")]
    MalformedTable { line: usize, reason: String },

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
