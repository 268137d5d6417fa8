use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("columns are numerically rank deficient (rank {rank} < {expected})")]
    RankDeficient { rank: usize, expected: usize },

    #[error("argument outside the domain: {0}")]
    DomainError(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid dimension: {0}")]
    DimensionError(String),

    #[error("direction is not a unit vector (norm {0})")]
    NotUnit(f64),

    #[error("support direction is zero")]
    ZeroDirection,

    #[error("nearest-point iteration did not converge after {iterations} iterations (gap {gap:e})")]
    NonConvergence { iterations: usize, gap: f64 },

    #[error("body is not full-dimensional after centering (rank {rank} < {dim})")]
    Degenerate { rank: usize, dim: usize },

    #[error("orbit-stabilizer mismatch: |orbit| {orbit} * |stabilizer| {stabilizer} != |G| {group}")]
    OrbitStabilizerMismatch {
        orbit: usize,
        stabilizer: usize,
        group: usize,
    },

    #[error("mode not supported: {0}")]
    ModeUnsupported(String),

    #[error("unknown body `{0}`")]
    UnknownBody(String),

    #[error("bad body parameters: {0}")]
    BadParams(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
