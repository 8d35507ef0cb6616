//! One tree walker, four number types: `f64`, [`Jet2`], `Complex64` and
//! [`CJet1`].

use std::f64::consts::{E, PI};
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;

use super::jet::{CJet1, Jet2};
use super::{BinOp, Constant, Func, Node, Var};
use crate::error::DomainError;

pub(super) trait Scalar:
    Copy + Add<Output = Self> + Sub<Output = Self> + Mul<Output = Self> + Neg<Output = Self>
{
    fn real(v: f64) -> Self;
    fn imaginary_unit() -> Result<Self, DomainError>;
    fn div(self, o: Self) -> Result<Self, DomainError>;
    /// `Some(n)` when this is a constant with an integral value.
    fn integer_exponent(&self) -> Option<i64>;
    /// `exp(p * log(self))` with the mode's domain rules.
    fn general_pow(self, p: Self) -> Result<Self, DomainError>;
    fn apply(self, f: Func) -> Result<Self, DomainError>;
    fn is_finite(&self) -> bool;
}

fn integral(v: f64) -> Option<i64> {
    (v.fract() == 0.0 && v.abs() <= 9.0e15).then_some(v as i64)
}

fn powi<T: Scalar>(base: T, n: i64) -> Result<T, DomainError> {
    if n < 0 {
        return T::real(1.0).div(powi(base, -n)?);
    }
    let mut acc = T::real(1.0);
    let mut sq = base;
    let mut k = n;
    let mut first = true;
    while k > 0 {
        if k & 1 == 1 {
            acc = if first { sq } else { acc * sq };
            first = false;
        }
        k >>= 1;
        if k > 0 {
            sq = sq * sq;
        }
    }
    Ok(acc)
}

pub(super) fn finite<T: Scalar>(v: T) -> Result<T, DomainError> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(DomainError::NonFinite)
    }
}

pub(super) fn eval<T: Scalar>(node: &Node, env: &dyn Fn(Var) -> T) -> Result<T, DomainError> {
    Ok(match node {
        Node::Num(v) => T::real(*v),
        Node::Var(v) => env(*v),
        Node::Const(Constant::Pi) => T::real(PI),
        Node::Const(Constant::E) => T::real(E),
        Node::Const(Constant::I) => T::imaginary_unit()?,
        Node::Neg(a) => -eval(a, env)?,
        Node::Call(f, a) => eval(a, env)?.apply(*f)?,
        Node::Binary(op, a, b) => {
            let a = eval(a, env)?;
            let b = eval(b, env)?;
            match op {
                BinOp::Add => a + b,
                BinOp::Sub => a - b,
                BinOp::Mul => a * b,
                BinOp::Div => a.div(b)?,
                BinOp::Pow => match b.integer_exponent() {
                    Some(n) => powi(a, n)?,
                    None => a.general_pow(b)?,
                },
            }
        }
    })
}

impl Scalar for f64 {
    fn real(v: f64) -> Self {
        v
    }

    fn imaginary_unit() -> Result<Self, DomainError> {
        Err(DomainError::Unsupported)
    }

    fn div(self, o: Self) -> Result<Self, DomainError> {
        if o == 0.0 {
            return Err(DomainError::DivisionByZero);
        }
        Ok(self / o)
    }

    fn integer_exponent(&self) -> Option<i64> {
        integral(*self)
    }

    fn general_pow(self, p: Self) -> Result<Self, DomainError> {
        if self <= 0.0 {
            return Err(DomainError::PowNonPositiveBase);
        }
        Ok(self.powf(p))
    }

    fn apply(self, f: Func) -> Result<Self, DomainError> {
        Ok(match f {
            Func::Exp => self.exp(),
            Func::Log => {
                if self <= 0.0 {
                    return Err(DomainError::LogNonPositive);
                }
                self.ln()
            }
            Func::Sin => self.sin(),
            Func::Cos => self.cos(),
            Func::Tan => self.tan(),
            Func::Sinh => self.sinh(),
            Func::Cosh => self.cosh(),
            Func::Sqrt => {
                if self < 0.0 {
                    return Err(DomainError::SqrtNonPositive);
                }
                self.sqrt()
            }
            Func::Abs => self.abs(),
        })
    }

    fn is_finite(&self) -> bool {
        f64::is_finite(*self)
    }
}

impl Scalar for Jet2 {
    fn real(v: f64) -> Self {
        Jet2::constant(v)
    }

    fn imaginary_unit() -> Result<Self, DomainError> {
        Err(DomainError::Unsupported)
    }

    fn div(self, o: Self) -> Result<Self, DomainError> {
        if o.value == 0.0 {
            return Err(DomainError::DivisionByZero);
        }
        // differentiate a = q * o
        let q = self.value / o.value;
        let q_x = (self.d_x - q * o.d_x) / o.value;
        let q_y = (self.d_y - q * o.d_y) / o.value;
        Ok(Jet2 {
            value: q,
            d_x: q_x,
            d_y: q_y,
            d_xx: (self.d_xx - 2.0 * q_x * o.d_x - q * o.d_xx) / o.value,
            d_xy: (self.d_xy - q_x * o.d_y - q_y * o.d_x - q * o.d_xy) / o.value,
            d_yy: (self.d_yy - 2.0 * q_y * o.d_y - q * o.d_yy) / o.value,
        })
    }

    fn integer_exponent(&self) -> Option<i64> {
        if self.is_constant() {
            integral(self.value)
        } else {
            None
        }
    }

    fn general_pow(self, p: Self) -> Result<Self, DomainError> {
        if self.value <= 0.0 {
            return Err(DomainError::PowNonPositiveBase);
        }
        (p * self.apply(Func::Log)?).apply(Func::Exp)
    }

    fn apply(self, f: Func) -> Result<Self, DomainError> {
        let v = self.value;
        Ok(match f {
            Func::Exp => {
                let e = v.exp();
                self.chain(e, e, e)
            }
            Func::Log => {
                if v <= 0.0 {
                    return Err(DomainError::LogNonPositive);
                }
                self.chain(v.ln(), 1.0 / v, -1.0 / (v * v))
            }
            Func::Sin => {
                let (s, c) = v.sin_cos();
                self.chain(s, c, -s)
            }
            Func::Cos => {
                let (s, c) = v.sin_cos();
                self.chain(c, -s, -c)
            }
            Func::Tan => {
                let t = v.tan();
                let sec2 = 1.0 + t * t;
                self.chain(t, sec2, 2.0 * t * sec2)
            }
            Func::Sinh => {
                let (s, c) = (v.sinh(), v.cosh());
                self.chain(s, c, s)
            }
            Func::Cosh => {
                let (s, c) = (v.sinh(), v.cosh());
                self.chain(c, s, c)
            }
            Func::Sqrt => {
                if v <= 0.0 {
                    return Err(DomainError::SqrtNonPositive);
                }
                let r = v.sqrt();
                self.chain(r, 0.5 / r, -0.25 / (r * v))
            }
            Func::Abs => {
                if v == 0.0 {
                    return Err(DomainError::AbsAtZero);
                }
                self.chain(v.abs(), v.signum(), 0.0)
            }
        })
    }

    fn is_finite(&self) -> bool {
        Jet2::is_finite(self)
    }
}

impl Scalar for Complex64 {
    fn real(v: f64) -> Self {
        Complex64::new(v, 0.0)
    }

    fn imaginary_unit() -> Result<Self, DomainError> {
        Ok(Complex64::i())
    }

    fn div(self, o: Self) -> Result<Self, DomainError> {
        if o == Complex64::new(0.0, 0.0) {
            return Err(DomainError::DivisionByZero);
        }
        Ok(self / o)
    }

    fn integer_exponent(&self) -> Option<i64> {
        if self.im == 0.0 {
            integral(self.re)
        } else {
            None
        }
    }

    fn general_pow(self, p: Self) -> Result<Self, DomainError> {
        if self == Complex64::new(0.0, 0.0) {
            return Err(DomainError::LogAtZero);
        }
        Ok((p * self.ln()).exp())
    }

    fn apply(self, f: Func) -> Result<Self, DomainError> {
        Ok(match f {
            Func::Exp => self.exp(),
            Func::Log => {
                if self == Complex64::new(0.0, 0.0) {
                    return Err(DomainError::LogAtZero);
                }
                self.ln()
            }
            Func::Sin => self.sin(),
            Func::Cos => self.cos(),
            Func::Tan => self.tan(),
            Func::Sinh => self.sinh(),
            Func::Cosh => self.cosh(),
            Func::Sqrt => self.sqrt(),
            Func::Abs => return Err(DomainError::Unsupported),
        })
    }

    fn is_finite(&self) -> bool {
        Complex64::is_finite(*self)
    }
}

impl Scalar for CJet1 {
    fn real(v: f64) -> Self {
        CJet1::constant(Complex64::new(v, 0.0))
    }

    fn imaginary_unit() -> Result<Self, DomainError> {
        Ok(CJet1::constant(Complex64::i()))
    }

    fn div(self, o: Self) -> Result<Self, DomainError> {
        let zero = Complex64::new(0.0, 0.0);
        if o.value == zero {
            return Err(DomainError::DivisionByZero);
        }
        let q = self.value / o.value;
        Ok(CJet1 {
            value: q,
            deriv: (self.deriv - q * o.deriv) / o.value,
        })
    }

    fn integer_exponent(&self) -> Option<i64> {
        if self.is_constant() && self.value.im == 0.0 {
            integral(self.value.re)
        } else {
            None
        }
    }

    fn general_pow(self, p: Self) -> Result<Self, DomainError> {
        if self.value == Complex64::new(0.0, 0.0) {
            return Err(DomainError::LogAtZero);
        }
        (p * self.apply(Func::Log)?).apply(Func::Exp)
    }

    fn apply(self, f: Func) -> Result<Self, DomainError> {
        let v = self.value;
        let zero = Complex64::new(0.0, 0.0);
        Ok(match f {
            Func::Exp => {
                let e = v.exp();
                self.chain(e, e)
            }
            Func::Log => {
                if v == zero {
                    return Err(DomainError::LogAtZero);
                }
                self.chain(v.ln(), v.inv())
            }
            Func::Sin => self.chain(v.sin(), v.cos()),
            Func::Cos => self.chain(v.cos(), -v.sin()),
            Func::Tan => {
                let c = v.cos();
                self.chain(v.tan(), (c * c).inv())
            }
            Func::Sinh => self.chain(v.sinh(), v.cosh()),
            Func::Cosh => self.chain(v.cosh(), v.sinh()),
            Func::Sqrt => {
                if v == zero {
                    return Err(DomainError::SqrtAtZero);
                }
                let r = v.sqrt();
                self.chain(r, (2.0 * r).inv())
            }
            Func::Abs => return Err(DomainError::Unsupported),
        })
    }

    fn is_finite(&self) -> bool {
        CJet1::is_finite(self)
    }
}
