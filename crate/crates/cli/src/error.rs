use std::path::PathBuf;

use slopeforge_core::constructions::{ApproxError, ConstructionError};
use slopeforge_core::decimal::DecimalError;
use slopeforge_core::{CatalogError, LedgerError, SignatureError, WordError};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{0}")]
    Parse(String),
    #[error(transparent)]
    Catalog(#[from] CatalogError),
    #[error(transparent)]
    Decimal(#[from] DecimalError),
    #[error("{0}")]
    Rejected(String),
    #[error("{0}")]
    OutOfRange(String),
    #[error("{0}")]
    Interval(String),
    #[error("catalog validation failed")]
    Validation,
    #[error("{0}")]
    Internal(String),
}

impl CliError {
    /// 2 input, 3 rejected word, 4 parameter range, 5 approximation interval,
    /// 6 catalog validation, 1 anything else.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Io { .. } | CliError::Parse(_) | CliError::Catalog(_) | CliError::Decimal(_) => 2,
            CliError::Rejected(_) => 3,
            CliError::OutOfRange(_) => 4,
            CliError::Interval(_) => 5,
            CliError::Validation => 6,
            CliError::Internal(_) => 1,
        }
    }

    pub fn io(path: &std::path::Path, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.to_path_buf(),
            source,
        }
    }
}

impl From<WordError> for CliError {
    fn from(e: WordError) -> Self {
        match e {
            WordError::NotTrivial | WordError::NotPositive => CliError::Rejected(e.to_string()),
            WordError::OutOfRange(_) | WordError::IndexOutOfRange { .. } => CliError::OutOfRange(e.to_string()),
            WordError::Catalog(c) => CliError::Catalog(c),
            other => CliError::Parse(other.to_string()),
        }
    }
}

impl From<SignatureError> for CliError {
    fn from(e: SignatureError) -> Self {
        match e {
            SignatureError::NotTrivial | SignatureError::NotPositive => CliError::Rejected(e.to_string()),
            other => CliError::Internal(other.to_string()),
        }
    }
}

impl From<LedgerError> for CliError {
    fn from(e: LedgerError) -> Self {
        match e {
            LedgerError::GenusTooSmall { .. } | LedgerError::OutOfRange(_) => CliError::OutOfRange(e.to_string()),
            other => CliError::Internal(other.to_string()),
        }
    }
}

impl From<ConstructionError> for CliError {
    fn from(e: ConstructionError) -> Self {
        match e {
            ConstructionError::OutOfRange(_) => CliError::OutOfRange(e.to_string()),
            ConstructionError::Ledger(l) => l.into(),
            ConstructionError::Word(w) => w.into(),
            ConstructionError::Signature(s) => s.into(),
            other => CliError::Internal(other.to_string()),
        }
    }
}

impl From<ApproxError> for CliError {
    fn from(e: ApproxError) -> Self {
        match e {
            ApproxError::OutsideInterval { ref lo, ref hi, .. } => CliError::Interval(format!(
                "{e}; achievable interval is ({}, {})",
                slopeforge_core::decimal::fixed(lo, 12),
                slopeforge_core::decimal::fixed(hi, 12)
            )),
            ApproxError::NegativeEps => CliError::Parse(e.to_string()),
            ApproxError::Ledger(l) => l.into(),
            other => CliError::Internal(other.to_string()),
        }
    }
}
