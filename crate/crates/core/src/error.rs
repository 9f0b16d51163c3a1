use thiserror::Error;

use crate::numerics::QuadError;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid class parameters: {0}")]
    InvalidParams(String),

    /// A product denominator vanishes; `index` is the offending product index.
    #[error("degenerate denominator at product index {index}")]
    DegenerateDenominator { index: usize },

    #[error("leading coefficient K_{n} vanishes")]
    ZeroLeadingCoefficient { n: usize },

    #[error("coefficient overflow at degree {n}")]
    Overflow { n: usize },

    #[error("constraint violated: {0}")]
    ConstraintViolation(String),

    #[error("weight is singular at x = {x}")]
    SingularPoint { x: f64 },

    #[error("divergent moment: {0}")]
    DivergentMoment(String),

    #[error("degree {n} outside the finite range (bound {bound})")]
    OutOfFiniteRange { n: usize, bound: f64 },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("pole of the gamma function at {x}")]
    Pole { x: f64 },

    #[error("coefficient A vanishes at x = {x}")]
    SingularCoefficient { x: f64 },

    #[error("weight is not positive at x = {x}")]
    NonpositiveWeight { x: f64 },

    #[error("integral diverges: {0}")]
    DivergentIntegral(String),

    #[error("basis failed orthogonality verification: {0}")]
    BasisInvalid(String),

    #[error("target function is not square integrable against the weight")]
    NonSquareIntegrable,

    #[error(transparent)]
    Quadrature(#[from] QuadError),
}

impl Error {
    /// Stable machine-readable code, used by the command-line front end.
    pub fn code(&self) -> &'static str {
        match self {
            Error::InvalidParams(_) => "invalid_params",
            Error::DegenerateDenominator { .. } => "degenerate_denominator",
            Error::ZeroLeadingCoefficient { .. } => "zero_leading_coefficient",
            Error::Overflow { .. } => "overflow",
            Error::ConstraintViolation(_) => "constraint_violation",
            Error::SingularPoint { .. } => "singular_point",
            Error::DivergentMoment(_) => "divergent_moment",
            Error::OutOfFiniteRange { .. } => "out_of_finite_range",
            Error::Domain(_) => "domain",
            Error::Pole { .. } => "pole",
            Error::SingularCoefficient { .. } => "singular_coefficient",
            Error::NonpositiveWeight { .. } => "nonpositive_weight",
            Error::DivergentIntegral(_) => "divergent_integral",
            Error::BasisInvalid(_) => "basis_invalid",
            Error::NonSquareIntegrable => "non_square_integrable",
            Error::Quadrature(_) => "quadrature",
        }
    }
}
