use num_complex::Complex64;
use serde::Serialize;

/// Value and all partial derivatives through order two of a scalar
/// function of `(x, y)`. The mixed partial is stored once.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct Jet2 {
    pub value: f64,
    pub d_x: f64,
    pub d_y: f64,
    pub d_xx: f64,
    pub d_xy: f64,
    pub d_yy: f64,
}

impl Jet2 {
    pub fn constant(value: f64) -> Jet2 {
        Jet2 {
            value,
            ..Jet2::default()
        }
    }

    pub fn var_x(x: f64) -> Jet2 {
        Jet2 {
            value: x,
            d_x: 1.0,
            ..Jet2::default()
        }
    }

    pub fn var_y(y: f64) -> Jet2 {
        Jet2 {
            value: y,
            d_y: 1.0,
            ..Jet2::default()
        }
    }

    pub fn is_constant(&self) -> bool {
        self.d_x == 0.0 && self.d_y == 0.0 && self.d_xx == 0.0 && self.d_xy == 0.0 && self.d_yy == 0.0
    }

    pub fn is_finite(&self) -> bool {
        [self.value, self.d_x, self.d_y, self.d_xx, self.d_xy, self.d_yy]
            .iter()
            .all(|v| v.is_finite())
    }

    /// Compose with a scalar function `g` given `g(v)`, `g'(v)`, `g''(v)`.
    pub fn chain(self, g0: f64, g1: f64, g2: f64) -> Jet2 {
        Jet2 {
            value: g0,
            d_x: g1 * self.d_x,
            d_y: g1 * self.d_y,
            d_xx: g2 * self.d_x * self.d_x + g1 * self.d_xx,
            d_xy: g2 * self.d_x * self.d_y + g1 * self.d_xy,
            d_yy: g2 * self.d_y * self.d_y + g1 * self.d_yy,
        }
    }

    pub fn scale(self, k: f64) -> Jet2 {
        Jet2 {
            value: k * self.value,
            d_x: k * self.d_x,
            d_y: k * self.d_y,
            d_xx: k * self.d_xx,
            d_xy: k * self.d_xy,
            d_yy: k * self.d_yy,
        }
    }
}

impl std::ops::Add for Jet2 {
    type Output = Jet2;
    fn add(self, o: Jet2) -> Jet2 {
        Jet2 {
            value: self.value + o.value,
            d_x: self.d_x + o.d_x,
            d_y: self.d_y + o.d_y,
            d_xx: self.d_xx + o.d_xx,
            d_xy: self.d_xy + o.d_xy,
            d_yy: self.d_yy + o.d_yy,
        }
    }
}

impl std::ops::Sub for Jet2 {
    type Output = Jet2;
    fn sub(self, o: Jet2) -> Jet2 {
        Jet2 {
            value: self.value - o.value,
            d_x: self.d_x - o.d_x,
            d_y: self.d_y - o.d_y,
            d_xx: self.d_xx - o.d_xx,
            d_xy: self.d_xy - o.d_xy,
            d_yy: self.d_yy - o.d_yy,
        }
    }
}

impl std::ops::Neg for Jet2 {
    type Output = Jet2;
    fn neg(self) -> Jet2 {
        Jet2 {
            value: -self.value,
            d_x: -self.d_x,
            d_y: -self.d_y,
            d_xx: -self.d_xx,
            d_xy: -self.d_xy,
            d_yy: -self.d_yy,
        }
    }
}

impl std::ops::Mul for Jet2 {
    type Output = Jet2;
    fn mul(self, o: Jet2) -> Jet2 {
        Jet2 {
            value: self.value * o.value,
            d_x: self.d_x * o.value + self.value * o.d_x,
            d_y: self.d_y * o.value + self.value * o.d_y,
            d_xx: self.d_xx * o.value + 2.0 * self.d_x * o.d_x + self.value * o.d_xx,
            d_xy: self.d_xy * o.value
                + self.d_x * o.d_y
                + self.d_y * o.d_x
                + self.value * o.d_xy,
            d_yy: self.d_yy * o.value + 2.0 * self.d_y * o.d_y + self.value * o.d_yy,
        }
    }
}

/// Complex value and complex derivative of a holomorphic function of `w`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CJet1 {
    pub value: Complex64,
    pub deriv: Complex64,
}

impl CJet1 {
    pub fn constant(value: Complex64) -> CJet1 {
        CJet1 {
            value,
            deriv: Complex64::new(0.0, 0.0),
        }
    }

    pub fn var(w: Complex64) -> CJet1 {
        CJet1 {
            value: w,
            deriv: Complex64::new(1.0, 0.0),
        }
    }

    pub fn is_constant(&self) -> bool {
        self.deriv == Complex64::new(0.0, 0.0)
    }

    pub fn is_finite(&self) -> bool {
        self.value.is_finite() && self.deriv.is_finite()
    }

    pub fn chain(self, g0: Complex64, g1: Complex64) -> CJet1 {
        CJet1 {
            value: g0,
            deriv: g1 * self.deriv,
        }
    }
}

impl std::ops::Add for CJet1 {
    type Output = CJet1;
    fn add(self, o: CJet1) -> CJet1 {
        CJet1 {
            value: self.value + o.value,
            deriv: self.deriv + o.deriv,
        }
    }
}

impl std::ops::Sub for CJet1 {
    type Output = CJet1;
    fn sub(self, o: CJet1) -> CJet1 {
        CJet1 {
            value: self.value - o.value,
            deriv: self.deriv - o.deriv,
        }
    }
}

impl std::ops::Neg for CJet1 {
    type Output = CJet1;
    fn neg(self) -> CJet1 {
        CJet1 {
            value: -self.value,
            deriv: -self.deriv,
        }
    }
}

impl std::ops::Mul for CJet1 {
    type Output = CJet1;
    fn mul(self, o: CJet1) -> CJet1 {
        CJet1 {
            value: self.value * o.value,
            deriv: self.deriv * o.value + self.value * o.deriv,
        }
    }
}
