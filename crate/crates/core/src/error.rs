use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = HyperboxError> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum HyperboxError {
    #[error("dimensionality mismatch: expected {expected} features, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("feature {feature} of sample {sample} is {value}, outside [0, 1]; normalise the data first")]
    Unnormalized { sample: usize, feature: usize, value: f64 },

    #[error("empty dataset")]
    EmptyData,

    #[error("model has no hyperboxes")]
    EmptyModel,

    #[error("inconsistent contraction request: {0}")]
    InvalidContraction(String),

    #[error("model invariant violated: {0}")]
    Invariant(String),

    #[error("unsupported model format version {0}")]
    UnsupportedVersion(u32),

    #[error("unknown class label `{0}`")]
    UnknownLabel(String),

    #[error("csv error in {path}: {reason}")]
    Csv { path: PathBuf, reason: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl HyperboxError {
    pub fn param(name: &'static str, reason: impl Into<String>) -> Self {
        HyperboxError::InvalidParameter { name, reason: reason.into() }
    }
}
