use std::path::PathBuf;

use thiserror::Error;

/// Errors produced by the segmentation engine.
#[derive(Debug, Error)]
pub enum Error {
    #[error("insufficient seeds: {0}")]
    InsufficientSeeds(&'static str),
    #[error("foreground and background seed sets overlap at pixel {0}")]
    OverlappingSeeds(usize),
    #[error("shape prior value {value} at pixel {index} is outside [0, 1]")]
    PriorOutOfRange { index: usize, value: f64 },
    #[error("dimension mismatch: expected {expected:?}, found {found:?}")]
    DimensionMismatch { expected: (usize, usize), found: (usize, usize) },
    #[error("pixels {0} and {1} are not 4-adjacent")]
    NotAdjacent(usize, usize),
    #[error("invalid lambda range [{0}, {1}]")]
    InvalidLambdaRange(f64, f64),
    #[error("mask has no foreground pixels")]
    EmptyMask,
    #[error("need at least {needed} points, found {found}")]
    TooFewPoints { needed: usize, found: usize },
    #[error("histogram layouts differ")]
    LayoutMismatch,
    #[error("insufficient correspondences: {0} (need more than 2)")]
    InsufficientCorrespondences(usize),
    #[error("transform is not invertible (det = {0:e})")]
    SingularTransform(f64),
    #[error("no exemplars to fuse")]
    NoExemplars,
    #[error("candidate rejected: {0}")]
    Rejected(String),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("{path}: {message}")]
    Format { path: PathBuf, message: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Image(#[from] image::ImageError),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
