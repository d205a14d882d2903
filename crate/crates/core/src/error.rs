use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// Wrong number of values or mismatched dimensions.
    #[error("size error: {0}")]
    Size(String),
    /// Input contains a value outside the allowed set (non-finite, negative variance, ...).
    #[error("validation error: {0}")]
    Validation(String),
    /// A parameter lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),
}

pub type Result<T> = std::result::Result<T, Error>;

macro_rules! ensure {
    ($cond:expr, $kind:ident, $($arg:tt)+) => {
        #[allow(clippy::neg_cmp_op_on_partial_ord)]
        if !$cond {
            return Err($crate::error::Error::$kind(format!($($arg)+)));
        }
    };
}

pub(crate) use ensure;
