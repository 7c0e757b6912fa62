//! File formats and command implementations behind the `hmec` binary.
//!
//! The binary owns two formats: a line-oriented UTF-8 key file
//! ([`keyfile`]) and a binary ciphertext container ([`container`]).
//! Command entry points live in [`commands`]; they return [`CliError`],
//! which maps onto the stable exit codes documented in the README.

pub mod commands;
pub mod container;
pub mod keyfile;

use std::path::PathBuf;

use thiserror::Error;

use container::ContainerError;
use keyfile::KeyFileError;

#[derive(Debug, Error)]
pub enum CliError {
    /// Bad command usage, e.g. an unknown analysis test name.
    #[error("{0}")]
    Usage(String),
    #[error("key file: {0}")]
    KeyFile(#[from] KeyFileError),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error(transparent)]
    Cipher(#[from] hmec::cipher::CipherError),
    #[error("container: {0}")]
    Container(#[from] ContainerError),
    /// Out-of-region parameters, bad grids, empty corpora.
    #[error("{0}")]
    InvalidParameter(String),
}

impl CliError {
    /// Stable process exit code for this failure class.
    ///
    /// 2 usage, 3 key file, 4 I/O, 5 cipher input rejected,
    /// 6 malformed container, 7 invalid parameter.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::KeyFile(_) => 3,
            CliError::Io { .. } => 4,
            CliError::Cipher(_) => 5,
            CliError::Container(_) => 6,
            CliError::InvalidParameter(_) => 7,
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.into(),
            source,
        }
    }
}
