use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid dimension n = {n}: {reason}")]
    InvalidDimension { n: usize, reason: &'static str },

    #[error(
        "quadrature did not converge on [{a}, {b}]: estimate {estimate}, error bound {error_bound}"
    )]
    NonConvergence {
        a: f64,
        b: f64,
        estimate: f64,
        error_bound: f64,
    },

    #[error("integrand is not finite at x = {x}")]
    NonFinite { x: f64 },

    #[error("one-sided limit diverges at x = {x}")]
    Divergence { x: f64 },

    #[error("function is not differentiable at x = {x}")]
    NonDifferentiable { x: f64 },

    #[error("infinite one-sided limit at interior breakpoint x = {x}")]
    InfiniteJump { x: f64 },

    #[error("incompatible profile kinds: {0}")]
    IncompatibleKind(String),

    #[error("distribution is not a positive measure")]
    NotAMeasure,

    #[error("NNLS exceeded its iteration cap of {cap}")]
    IterationCap { cap: usize },

    #[error("no sign change in verdict on [{lo}, {hi}]")]
    NoBracket { lo: f64, hi: f64 },

    #[error("linearly dependent input vectors")]
    SingularBasis,

    #[error("malformed input: {0}")]
    Malformed(String),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    /// True for failures of a numerical procedure, as opposed to bad input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::NonConvergence { .. }
                | Error::NonFinite { .. }
                | Error::Divergence { .. }
                | Error::IterationCap { .. }
                | Error::NoBracket { .. }
        )
    }
}
