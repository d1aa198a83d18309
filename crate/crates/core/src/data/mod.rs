//! Dataset ingestion: MNIST IDX files, box features, one-vs-rest tasks,
//! CSV input and a binary feature cache.

mod cache;
mod csv_input;
mod features;
mod idx;
mod task;

use std::path::PathBuf;

pub use cache::{read_feature_cache, write_feature_cache, CACHE_TAG};
pub use csv_input::load_csv;
pub use features::{box_features, extract_features, FeatureSpec};
pub use idx::{parse_idx, read_idx, write_idx, RawImageSet, IMAGE_MAGIC, LABEL_MAGIC};
pub use task::{build_binary_task, stratified_split};

#[derive(Debug, thiserror::Error)]
pub enum DataError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("bad magic number in {what}: expected {expected:#010x}, found {found:#010x}")]
    BadMagic { what: &'static str, expected: u32, found: u32 },
    #[error("truncated {what}: expected {expected} bytes, found {found}")]
    Truncated { what: &'static str, expected: usize, found: usize },
    #[error("inconsistent data: {0}")]
    Inconsistent(String),
    #[error("digit {digit}: need {needed} samples, only {available} available")]
    InsufficientSamples { digit: u8, needed: usize, available: usize },
    #[error("csv row {row}, column `{column}`: cannot parse `{value}`")]
    Parse { row: usize, column: String, value: String },
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("configuration: {0}")]
    Config(String),
}

impl DataError {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        DataError::Io {
            path: path.into(),
            source,
        }
    }
}
