use thiserror::Error;

/// Failure modes shared across the samplers, estimators and chains.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("point {point:?} lies within {tol:e} of the disk boundary (radius {radius})")]
    BoundaryPoint { point: [f64; 2], radius: f64, tol: f64 },

    #[error("point {point:?} lies within {tol:e} of the origin")]
    OriginPoint { point: [f64; 2], tol: f64 },

    #[error("root {root:?} lies at the origin")]
    OriginRoot { root: [f64; 2] },

    #[error("QR iteration did not converge after {sweeps} sweeps (n = {n})")]
    NoConvergence { n: usize, sweeps: usize },

    #[error("two coordinates coincide; log-density is -inf")]
    DegenerateState,

    #[error("root finding did not converge: residual {residual:e} after {iterations} iterations")]
    RootFindingFailure { iterations: usize, residual: f64 },

    #[error("leading coefficient underflows working precision at degree {degree}")]
    LeadingCoefficientUnderflow { degree: usize },

    #[error("eps = {0} is outside (0, 1]")]
    InvalidEps(f64),

    #[error("quadrature did not converge: doubling changed the result by {change:e} (tolerance {tol:e})")]
    QuadratureNotConverged { change: f64, tol: f64 },

    #[error("only {usable} usable dyadic scales, need at least 3")]
    InsufficientScale { usable: usize },

    #[error("every term of the denominator underflows")]
    AllZeroSigma,

    #[error("inside sums differ by {diff:e}; proposals must stay on the same constant-sum slice")]
    SumMismatch { diff: f64 },

    #[error("chain acceptance {rate:.4} below 0.01 over {window} consecutive steps")]
    StuckChain { rate: f64, window: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Whether the error comes from bad input rather than from a numerical failure.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::InvalidEps(_)
                | Error::InvalidParameter(_)
                | Error::BoundaryPoint { .. }
                | Error::OriginPoint { .. }
                | Error::InsufficientScale { .. }
                | Error::SumMismatch { .. }
        )
    }
}
