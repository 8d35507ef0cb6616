//! A small expression language for real maps `f(x, y)`, potentials `u(x, y)`
//! and complex seeds `h(w)`.
//!
//! Expressions are parsed into an immutable AST and evaluated with
//! forward-mode jets: [`Jet2`] carries all partials through order two in
//! real mode, [`CJet1`] carries the complex value and derivative in complex
//! mode. [`Expr::differentiate`] produces a new AST, which is how third
//! derivatives are obtained (differentiate symbolically, then evaluate a jet).

mod diff;
mod eval;
mod jet;
mod parse;
mod print;

use std::fmt;

use num_complex::Complex64;

use crate::error::{Error, Location, Result};

pub use jet::{CJet1, Jet2};
pub use parse::{parse_bytes, ParseError, ParseErrorKind};

/// Evaluation context of an expression.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Mode {
    /// Real expression in `x` and `y`.
    Real2,
    /// Complex expression in `w`.
    Complex1,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::Real2 => "real2",
            Mode::Complex1 => "complex1",
        }
    }

    pub fn declares(self, var: Var) -> bool {
        match self {
            Mode::Real2 => matches!(var, Var::X | Var::Y),
            Mode::Complex1 => var == Var::W,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Var {
    X,
    Y,
    W,
}

impl Var {
    pub fn name(self) -> &'static str {
        match self {
            Var::X => "x",
            Var::Y => "y",
            Var::W => "w",
        }
    }

    fn from_name(name: &str) -> Option<Var> {
        match name {
            "x" => Some(Var::X),
            "y" => Some(Var::Y),
            "w" => Some(Var::W),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Constant {
    Pi,
    E,
    /// Imaginary unit, complex mode only.
    I,
}

impl Constant {
    pub fn name(self) -> &'static str {
        match self {
            Constant::Pi => "pi",
            Constant::E => "e",
            Constant::I => "i",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

impl BinOp {
    pub fn symbol(self) -> &'static str {
        match self {
            BinOp::Add => "+",
            BinOp::Sub => "-",
            BinOp::Mul => "*",
            BinOp::Div => "/",
            BinOp::Pow => "^",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Func {
    Exp,
    Log,
    Sin,
    Cos,
    Tan,
    Sinh,
    Cosh,
    Sqrt,
    /// Real mode only.
    Abs,
}

impl Func {
    pub const ALL: [Func; 9] = [
        Func::Exp,
        Func::Log,
        Func::Sin,
        Func::Cos,
        Func::Tan,
        Func::Sinh,
        Func::Cosh,
        Func::Sqrt,
        Func::Abs,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Func::Exp => "exp",
            Func::Log => "log",
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Tan => "tan",
            Func::Sinh => "sinh",
            Func::Cosh => "cosh",
            Func::Sqrt => "sqrt",
            Func::Abs => "abs",
        }
    }

    fn from_name(name: &str) -> Option<Func> {
        Func::ALL.into_iter().find(|f| f.name() == name)
    }
}

/// AST node. Literals produced by the parser are finite and non-negative;
/// negation is always an explicit [`Node::Neg`].
#[derive(Debug, Clone, PartialEq)]
pub enum Node {
    Num(f64),
    Var(Var),
    Const(Constant),
    Neg(Box<Node>),
    Binary(BinOp, Box<Node>, Box<Node>),
    Call(Func, Box<Node>),
}

impl Node {
    /// Whether `var` occurs anywhere below this node.
    pub fn depends_on(&self, var: Var) -> bool {
        match self {
            Node::Num(_) | Node::Const(_) => false,
            Node::Var(v) => *v == var,
            Node::Neg(a) | Node::Call(_, a) => a.depends_on(var),
            Node::Binary(_, a, b) => a.depends_on(var) || b.depends_on(var),
        }
    }

    /// Number of nodes in the tree.
    pub fn size(&self) -> usize {
        match self {
            Node::Num(_) | Node::Var(_) | Node::Const(_) => 1,
            Node::Neg(a) | Node::Call(_, a) => 1 + a.size(),
            Node::Binary(_, a, b) => 1 + a.size() + b.size(),
        }
    }
}

/// A parsed expression together with the mode it was parsed in.
#[derive(Debug, Clone, PartialEq)]
pub struct Expr {
    mode: Mode,
    root: Node,
}

impl Expr {
    pub fn parse(source: &str, mode: Mode) -> Result<Expr, ParseError> {
        parse::parse(source, mode)
    }

    /// Parse a real expression in `x`, `y`.
    pub fn real(source: &str) -> Result<Expr, ParseError> {
        Expr::parse(source, Mode::Real2)
    }

    /// Parse a complex expression in `w`.
    pub fn complex(source: &str) -> Result<Expr, ParseError> {
        Expr::parse(source, Mode::Complex1)
    }

    /// Wrap an existing tree, checking that every variable and constant is
    /// declared in `mode`.
    pub fn from_node(root: Node, mode: Mode) -> Result<Expr> {
        fn check(node: &Node, mode: Mode) -> Result<()> {
            match node {
                Node::Var(v) if !mode.declares(*v) => {
                    Err(Error::UndeclaredVariable(v.name().to_string()))
                }
                Node::Const(Constant::I) if mode == Mode::Real2 => {
                    Err(Error::UndeclaredVariable("i".to_string()))
                }
                Node::Call(Func::Abs, _) if mode == Mode::Complex1 => {
                    Err(Error::UndeclaredVariable("abs".to_string()))
                }
                Node::Neg(a) | Node::Call(_, a) => check(a, mode),
                Node::Binary(_, a, b) => {
                    check(a, mode)?;
                    check(b, mode)
                }
                _ => Ok(()),
            }
        }
        check(&root, mode)?;
        Ok(Expr { mode, root })
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn root(&self) -> &Node {
        &self.root
    }

    fn require(&self, mode: Mode) -> Result<()> {
        if self.mode == mode {
            Ok(())
        } else {
            Err(Error::ModeMismatch {
                expected: mode.name(),
                found: self.mode.name(),
            })
        }
    }

    /// Plain value of a real expression.
    pub fn eval_real(&self, x: f64, y: f64) -> Result<f64> {
        self.require(Mode::Real2)?;
        eval::eval(&self.root, &|v| if v == Var::X { x } else { y })
            .and_then(eval::finite)
            .map_err(|error| Error::Domain {
                error,
                at: Location::Real { x, y },
            })
    }

    /// Value and exact partials through order two at `(x, y)`.
    pub fn eval_jet2(&self, x: f64, y: f64) -> Result<Jet2> {
        self.require(Mode::Real2)?;
        eval::eval(&self.root, &|v| {
            if v == Var::X {
                Jet2::var_x(x)
            } else {
                Jet2::var_y(y)
            }
        })
        .and_then(eval::finite)
        .map_err(|error| Error::Domain {
            error,
            at: Location::Real { x, y },
        })
    }

    /// Plain value of a complex expression.
    pub fn eval_complex(&self, w: Complex64) -> Result<Complex64> {
        self.require(Mode::Complex1)?;
        eval::eval(&self.root, &|_| w)
            .and_then(eval::finite)
            .map_err(|error| Error::Domain {
                error,
                at: Location::Complex { re: w.re, im: w.im },
            })
    }

    /// Complex value and complex derivative at `w`.
    pub fn eval_cjet(&self, w: Complex64) -> Result<CJet1> {
        self.require(Mode::Complex1)?;
        eval::eval(&self.root, &|_| CJet1::var(w))
            .and_then(eval::finite)
            .map_err(|error| Error::Domain {
                error,
                at: Location::Complex { re: w.re, im: w.im },
            })
    }

    /// Symbolic partial derivative with respect to `var`.
    pub fn differentiate(&self, var: Var) -> Result<Expr> {
        if !self.mode.declares(var) {
            return Err(Error::UndeclaredVariable(var.name().to_string()));
        }
        Ok(Expr {
            mode: self.mode,
            root: diff::derivative(&self.root, var),
        })
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        print::write_node(f, &self.root)
    }
}

impl fmt::Display for Node {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        print::write_node(f, self)
    }
}
