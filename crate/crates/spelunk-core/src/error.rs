//! Error type shared across the crate.

use thiserror::Error;

/// Errors produced by map, frontier, planning, simulation and mission code.
#[derive(Error, Debug)]
pub enum Error {
    #[error("probability {0} outside the open interval (0, 1)")]
    ProbabilityOutOfRange(f64),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("ray has zero length")]
    ZeroLengthRay,
    #[error("frontier position coincides with the vehicle position")]
    DegenerateBearing,
    #[error("update digest does not belong to this map lineage (expected revision {expected}, got {got})")]
    LineageMismatch { expected: u64, got: u64 },
    #[error("plan start voxel is untraversable")]
    StartUntraversable,
    #[error("sensor pose lies in occupied space")]
    PoseInOccupiedSpace(f64, f64, f64),
    #[error("start position lies in occupied space")]
    StartInOccupiedSpace,
    #[error("generated world has no free space")]
    DegenerateWorld,
    #[error("unknown config key `{0}`")]
    UnknownConfigKey(String),
    #[error("config line {line}: {msg}")]
    ConfigParse { line: usize, msg: String },
    #[error("{path}: line {line}: {msg}")]
    FileFormat {
        path: String,
        line: usize,
        msg: String,
    },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
