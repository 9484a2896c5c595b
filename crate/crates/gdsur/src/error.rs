use std::path::PathBuf;

use thiserror::Error;

/// Problems with input files.
#[derive(Debug, Error)]
pub enum DataError {
    #[error("{path}: {message}")]
    SchemaMismatch { path: PathBuf, message: String },
    #[error("{path}: missing value at row {row}, column {column:?}")]
    MissingData { path: PathBuf, row: usize, column: String },
    #[error("{path}: unparseable value {value:?} at row {row}, column {column:?}")]
    BadValue { path: PathBuf, row: usize, column: String, value: String },
    #[error("{path}: dates not strictly increasing at row {row}")]
    NonMonotoneDates { path: PathBuf, row: usize },
    #[error("{path}: {source}")]
    Csv { path: PathBuf, source: csv::Error },
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{path}: {message}")]
    Config { path: PathBuf, message: String },
}

/// Everything a command can fail with, mapped onto exit codes.
#[derive(Debug, Error)]
pub enum AppError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Data(#[from] DataError),
    #[error("numerical failure: {0}")]
    Numerical(#[from] gdsur_core::Error),
    #[error("{0}")]
    Output(String),
}

impl AppError {
    pub fn exit_code(&self) -> u8 {
        match self {
            AppError::Usage(_) => 2,
            AppError::Data(_) => 3,
            AppError::Numerical(_) => 4,
            AppError::Output(_) => 1,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            AppError::Usage(_) => "usage",
            AppError::Data(_) => "data",
            AppError::Numerical(_) => "numerical",
            AppError::Output(_) => "output",
        }
    }
}

pub type AppResult<T> = std::result::Result<T, AppError>;
