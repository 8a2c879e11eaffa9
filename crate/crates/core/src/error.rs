use alloc::string::String;

/// Errors raised by the numerical routines.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    /// A parameter violated an operation's precondition.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    /// A function was evaluated outside its domain.
    #[error("{function}: argument {value} outside the domain")]
    Domain {
        /// Function name.
        function: &'static str,
        /// Offending argument.
        value: f64,
    },
    /// The QL iteration hit its sweep cap.
    #[error("eigensolver did not converge for a matrix of order {order} (residual {residual:e})")]
    NoConvergence {
        /// Order of the matrix being solved.
        order: usize,
        /// Off-diagonal magnitude left when the cap was reached.
        residual: f64,
    },
}

/// Result alias used throughout the crate.
pub type Result<T> = core::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}
