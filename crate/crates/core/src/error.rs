use std::fmt;

use thiserror::Error;

use crate::expr::ParseError;

/// Failure of a single evaluation: the expression left its domain.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum DomainError {
    #[error("logarithm of a non-positive value")]
    LogNonPositive,
    #[error("logarithm at zero")]
    LogAtZero,
    #[error("square root at a non-positive value (derivative undefined)")]
    SqrtNonPositive,
    #[error("square root at zero (derivative undefined)")]
    SqrtAtZero,
    #[error("division by zero")]
    DivisionByZero,
    #[error("non-integer power of a non-positive base")]
    PowNonPositiveBase,
    #[error("abs is not differentiable at zero")]
    AbsAtZero,
    #[error("function is not available in this mode")]
    Unsupported,
    #[error("non-finite value")]
    NonFinite,
}

/// Location at which an evaluation was attempted.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Location {
    Real { x: f64, y: f64 },
    Complex { re: f64, im: f64 },
}

impl fmt::Display for Location {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Location::Real { x, y } => write!(f, "(x, y) = ({x}, {y})"),
            Location::Complex { re, im } => write!(f, "w = {re} + {im}i"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("{error} at {at}")]
    Domain { error: DomainError, at: Location },
    #[error("expression is in {found} mode, expected {expected} mode")]
    ModeMismatch {
        expected: &'static str,
        found: &'static str,
    },
    #[error("variable `{0}` is not declared in this mode")]
    UndeclaredVariable(String),
    #[error("empty grid")]
    EmptyGrid,
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("invalid seed: {0}")]
    InvalidSeed(String),
    #[error("h vanishes at w = {re} + {im}i")]
    ZeroOfH { re: f64, im: f64 },
    #[error("quadrature produced a non-finite value at w = {re} + {im}i")]
    NonFiniteQuadrature { re: f64, im: f64 },
    #[error("vector is not a unit normal to the graph (defect {defect:e})")]
    NotNormal { defect: f64 },
    #[error("empty radius list")]
    EmptyRadii,
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
