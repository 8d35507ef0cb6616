//! Reference maps used by the self-test, the CLI and the test suites.

use crate::geometry::MapExpr;

/// Osserman's entire minimal graph that is not a complex analytic curve.
pub const OSSERMAN_F1: &str = "0.5*(exp(x)-3*exp(-x))*cos(y/2)";
pub const OSSERMAN_F2: &str = "-0.5*(exp(x)-3*exp(-x))*sin(y/2)";

pub const Z_SQUARED: (&str, &str) = ("x^2-y^2", "2*x*y");
pub const CONJ_Z_SQUARED: (&str, &str) = ("x^2-y^2", "-2*x*y");

pub fn osserman() -> MapExpr {
    MapExpr::parse(OSSERMAN_F1, OSSERMAN_F2).expect("built-in expression parses")
}

/// Closed-form Jacobian of the Osserman map, `−(e^{2x} − 9e^{−2x})/8`.
pub fn osserman_jacobian(x: f64) -> f64 {
    -((2.0 * x).exp() - 9.0 * (-2.0 * x).exp()) / 8.0
}
