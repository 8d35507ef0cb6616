//! Numerical toolkit for two-dimensional minimal graphs in R⁴.

pub mod cli;
pub mod error;
pub mod examples;
pub mod expr;
pub mod geometry;
pub mod grid;
pub mod isothermal;
pub mod jacobian;
pub mod optim;
pub mod quadrature;
pub mod report;
pub mod selftest;
pub mod slag;
pub mod weierstrass;

pub use error::{DomainError, Error, Result};
pub use expr::{CJet1, Expr, Jet2, Mode, Var};
pub use geometry::{Jet2Map, MapExpr};
pub use grid::GridSpec;
