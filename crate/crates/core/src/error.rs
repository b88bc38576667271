use thiserror::Error;

use crate::kv::ParseError;
use crate::scenario::ValidationReport;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid scenario:\n{0}")]
    InvalidScenario(ValidationReport),

    #[error("invalid utility specification: {0}")]
    InvalidUtilitySpec(String),

    #[error("probability rows must have equal length >= 2 (got {left} and {right})")]
    LengthMismatch { left: usize, right: usize },

    #[error("not a probability distribution: {0}")]
    NotADistribution(String),

    #[error("memory history must hold consecutive integer times starting at 1 (entry {index} has time {time})")]
    NonConsecutiveHistory { index: usize, time: f64 },

    #[error("group index {index} out of range for {n_groups} groups")]
    GroupOutOfRange { index: usize, n_groups: usize },

    #[error("time must be non-negative, got {0}")]
    NegativeTime(f64),

    #[error("invalid memory model: {0}")]
    InvalidMemoryModel(String),

    #[error("invalid run configuration: {0}")]
    InvalidConfig(String),

    #[error("numerical breakdown in the {engine} engine at t = {time}: {detail}")]
    NumericalBreakdown {
        engine: &'static str,
        time: f64,
        detail: String,
    },

    #[error("trajectory too short: {len} recorded points, at least {min} required")]
    TrajectoryTooShort { len: usize, min: usize },

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error(transparent)]
    Parse(#[from] ParseError),
}

pub type Result<T> = std::result::Result<T, Error>;
