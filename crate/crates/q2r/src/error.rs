use thiserror::Error;

use crate::net::ValidationReport;

/// Errors produced by the library.
#[derive(Debug, Error)]
pub enum Q2rError {
    /// A text input (network, configuration, netlist, ...) failed to parse.
    /// `line` is 1-based; 0 means the problem is not tied to a single line.
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    /// A network failed structural validation.
    #[error("invalid network: {0}")]
    Invalid(ValidationReport),

    /// An operation was asked to run under preconditions it rejects
    /// (non-independent block for an inverse step, degree != 2 for the
    /// linear fast-forward, oversized brute-force domain, ...).
    #[error("{0}")]
    Unsupported(String),

    /// Configuration length does not match the network size.
    #[error("configuration has {got} nodes, network has {want}")]
    SizeMismatch { got: usize, want: usize },

    /// Energy changed across a half-step while auditing was enabled.
    #[error("energy drift at step {step}: {before} -> {after}")]
    EnergyDrift { step: u64, before: i64, after: i64 },

    /// A circuit failed structural validation.
    #[error("invalid circuit: {0}")]
    Circuit(String),

    /// A gadget set failed certification.
    #[error("gadget certification failed: {0}")]
    Certification(String),

    /// A parallel-simulator check found a divergence.
    #[error("parallel simulator verification failed: {0}")]
    PsVerify(String),
}

impl Q2rError {
    pub fn parse(line: usize, msg: impl Into<String>) -> Self {
        Q2rError::Parse { line, msg: msg.into() }
    }

    pub fn unsupported(msg: impl Into<String>) -> Self {
        Q2rError::Unsupported(msg.into())
    }

    pub fn circuit(msg: impl Into<String>) -> Self {
        Q2rError::Circuit(msg.into())
    }

    pub fn certification(msg: impl Into<String>) -> Self {
        Q2rError::Certification(msg.into())
    }

    pub fn ps_verify(msg: impl Into<String>) -> Self {
        Q2rError::PsVerify(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, Q2rError>;
