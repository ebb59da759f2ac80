use alloc::string::String;

/// Errors raised by the kernel, the thermodynamic solver and the audits.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("dimension cap exceeded: {required} required, cap is {cap}")]
    DimensionCap { required: usize, cap: usize },

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("operator is not Hermitian (max asymmetry {asymmetry:.3e})")]
    NotHermitian { asymmetry: f64 },

    #[error("value out of domain: {0}")]
    Domain(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("wrong audit: {0}")]
    WrongAudit(String),

    #[error("unknown name `{0}`")]
    UnknownName(String),
}

pub type Result<T> = core::result::Result<T, Error>;
