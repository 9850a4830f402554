use std::path::PathBuf;

#[derive(Debug, thiserror::Error)]
pub enum BenchError {
    #[error("{0}")]
    Core(#[from] guf_core::Error),
    #[error("config: {0}")]
    Config(String),
    #[error("cannot read {path}: {source}")]
    Read {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("cannot write {path}: {source}")]
    Write {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("parse error in {path}: {message}")]
    Parse { path: PathBuf, message: String },
    #[error("rule spec '{spec}': {message}")]
    RuleSpec { spec: String, message: String },
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("range-bearing measurement undefined at the origin")]
    OriginSingular,
}

pub type Result<T> = std::result::Result<T, BenchError>;
