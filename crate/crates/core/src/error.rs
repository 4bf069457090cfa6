//! Error type shared by every module in the crate.
//!
//! Variants are grouped by how a caller should react: input problems
//! (`InvalidConfig`, `Parse`, `InsufficientData`, `Domain`, `DegenerateFit`,
//! `DegenerateDenominator`) mean the request can never succeed as stated,
//! while the numerical variants (`QuadratureNonConvergence`,
//! `FitNonConvergence`, `SingularJacobian`) mean an algorithm gave up and a
//! retry with different settings might work.

use crate::numerics::FitResult;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// A configuration value violates a physical or numerical constraint.
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    /// A config file or scan file could not be parsed. `line` is 1-based.
    #[error("parse error on line {line}: {message}")]
    Parse { line: usize, message: String },

    /// An operation was handed fewer data points than it needs.
    #[error("insufficient data: need at least {needed} points, got {got}")]
    InsufficientData { needed: usize, got: usize },

    /// A scalar argument is outside the domain of the requested function.
    #[error("domain error: {0}")]
    Domain(String),

    /// Adaptive quadrature exhausted its subdivision budget.
    #[error("quadrature did not converge within {max_subdivisions} subdivisions")]
    QuadratureNonConvergence { max_subdivisions: usize },

    /// The least-squares loop hit its iteration cap. The best parameters
    /// found so far are carried along (with `converged = false`) so callers
    /// can still report them.
    #[error("fit did not converge after {} iterations", partial.iterations)]
    FitNonConvergence { partial: Box<FitResult> },

    /// The normal equations are rank-deficient: some parameter has no
    /// influence on the model at the current point.
    #[error("singular Jacobian: a fit parameter has no effect on the model")]
    SingularJacobian,

    /// The requested fit cannot constrain its parameters, e.g. fitting the
    /// fringed model to a scan recorded with one beam blocked.
    #[error("degenerate fit: {0}")]
    DegenerateFit(String),

    /// The detected-count denominator went non-positive; the wire shadows
    /// essentially the whole beam, outside the thin-wire regime.
    #[error("degenerate denominator: the wire blocks too much of the beam")]
    DegenerateDenominator,
}

impl Error {
    /// True for errors caused by bad input rather than numerical failure.
    pub fn is_input_error(&self) -> bool {
        matches!(
            self,
            Error::InvalidConfig(_)
                | Error::Parse { .. }
                | Error::InsufficientData { .. }
                | Error::Domain(_)
                | Error::DegenerateFit(_)
                | Error::DegenerateDenominator
        )
    }
}
