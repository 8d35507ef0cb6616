//! Printing with the minimal parentheses needed to re-parse the same tree.

use std::fmt;

use super::{BinOp, Node};

const ADD: u8 = 1;
const MUL: u8 = 2;
const NEG: u8 = 3;
const POW: u8 = 4;
const ATOM: u8 = 5;

fn precedence(node: &Node) -> u8 {
    match node {
        Node::Num(v) if *v < 0.0 || (*v == 0.0 && v.is_sign_negative()) => NEG,
        Node::Num(_) | Node::Var(_) | Node::Const(_) | Node::Call(..) => ATOM,
        Node::Neg(_) => NEG,
        Node::Binary(BinOp::Add | BinOp::Sub, ..) => ADD,
        Node::Binary(BinOp::Mul | BinOp::Div, ..) => MUL,
        Node::Binary(BinOp::Pow, ..) => POW,
    }
}

fn write_at(f: &mut fmt::Formatter<'_>, node: &Node, min: u8) -> fmt::Result {
    if precedence(node) < min {
        f.write_str("(")?;
        write_node(f, node)?;
        f.write_str(")")
    } else {
        write_node(f, node)
    }
}

pub(super) fn write_node(f: &mut fmt::Formatter<'_>, node: &Node) -> fmt::Result {
    match node {
        Node::Num(v) => write!(f, "{v}"),
        Node::Var(v) => f.write_str(v.name()),
        Node::Const(c) => f.write_str(c.name()),
        Node::Neg(a) => {
            f.write_str("-")?;
            write_at(f, a, NEG)
        }
        Node::Call(func, a) => {
            write!(f, "{}(", func.name())?;
            write_node(f, a)?;
            f.write_str(")")
        }
        Node::Binary(op, a, b) => {
            let (left, right, sep) = match op {
                BinOp::Add => (ADD, MUL, " + "),
                BinOp::Sub => (ADD, MUL, " - "),
                BinOp::Mul => (MUL, NEG, "*"),
                BinOp::Div => (MUL, NEG, "/"),
                BinOp::Pow => (ATOM, NEG, "^"),
            };
            write_at(f, a, left)?;
            f.write_str(sep)?;
            write_at(f, b, right)
        }
    }
}
