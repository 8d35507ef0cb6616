//! Symbolic differentiation with light local simplification (identity and
//! zero elements, literal folding). No general simplifier.

use super::{BinOp, Func, Node, Var};

fn as_number(n: &Node) -> Option<f64> {
    match n {
        Node::Num(v) => Some(*v),
        Node::Neg(a) => match **a {
            Node::Num(v) => Some(-v),
            _ => None,
        },
        _ => None,
    }
}

fn num(v: f64) -> Node {
    if v < 0.0 {
        Node::Neg(Box::new(Node::Num(-v)))
    } else {
        Node::Num(v.abs())
    }
}

fn is(n: &Node, v: f64) -> bool {
    as_number(n) == Some(v)
}

fn bin(op: BinOp, a: Node, b: Node) -> Node {
    Node::Binary(op, Box::new(a), Box::new(b))
}

fn call(f: Func, a: Node) -> Node {
    Node::Call(f, Box::new(a))
}

fn neg(a: Node) -> Node {
    if let Some(v) = as_number(&a) {
        return num(-v);
    }
    match a {
        Node::Neg(inner) => *inner,
        a => Node::Neg(Box::new(a)),
    }
}

fn add(a: Node, b: Node) -> Node {
    match (as_number(&a), as_number(&b)) {
        (Some(x), Some(y)) => num(x + y),
        (Some(x), _) if x == 0.0 => b,
        (_, Some(y)) if y == 0.0 => a,
        _ => match b {
            Node::Neg(inner) => bin(BinOp::Sub, a, *inner),
            b => bin(BinOp::Add, a, b),
        },
    }
}

fn sub(a: Node, b: Node) -> Node {
    match (as_number(&a), as_number(&b)) {
        (Some(x), Some(y)) => num(x - y),
        (Some(x), _) if x == 0.0 => neg(b),
        (_, Some(y)) if y == 0.0 => a,
        _ => bin(BinOp::Sub, a, b),
    }
}

fn mul(a: Node, b: Node) -> Node {
    match (as_number(&a), as_number(&b)) {
        (Some(x), Some(y)) => num(x * y),
        (Some(x), _) | (_, Some(x)) if x == 0.0 => Node::Num(0.0),
        (Some(x), _) if x == 1.0 => b,
        (_, Some(y)) if y == 1.0 => a,
        (Some(x), _) if x == -1.0 => neg(b),
        (_, Some(y)) if y == -1.0 => neg(a),
        _ => bin(BinOp::Mul, a, b),
    }
}

fn div(a: Node, b: Node) -> Node {
    if is(&a, 0.0) {
        return Node::Num(0.0);
    }
    if is(&b, 1.0) {
        return a;
    }
    bin(BinOp::Div, a, b)
}

fn pow(a: Node, b: Node) -> Node {
    if is(&b, 0.0) {
        return Node::Num(1.0);
    }
    if is(&b, 1.0) {
        return a;
    }
    bin(BinOp::Pow, a, b)
}

pub(super) fn derivative(node: &Node, var: Var) -> Node {
    if !node.depends_on(var) {
        return Node::Num(0.0);
    }
    match node {
        Node::Num(_) | Node::Const(_) => Node::Num(0.0),
        Node::Var(v) => Node::Num(if *v == var { 1.0 } else { 0.0 }),
        Node::Neg(a) => neg(derivative(a, var)),
        Node::Binary(op, a, b) => {
            let (a, b) = (&**a, &**b);
            let da = derivative(a, var);
            let db = derivative(b, var);
            match op {
                BinOp::Add => add(da, db),
                BinOp::Sub => sub(da, db),
                BinOp::Mul => add(mul(da, b.clone()), mul(a.clone(), db)),
                BinOp::Div => div(
                    sub(mul(da, b.clone()), mul(a.clone(), db)),
                    pow(b.clone(), Node::Num(2.0)),
                ),
                BinOp::Pow if !b.depends_on(var) => {
                    let lowered = match as_number(b) {
                        Some(v) => num(v - 1.0),
                        None => sub(b.clone(), Node::Num(1.0)),
                    };
                    mul(mul(b.clone(), pow(a.clone(), lowered)), da)
                }
                BinOp::Pow => {
                    // d(a^b) = a^b * (b' log a + b a'/a)
                    let log_term = mul(db, call(Func::Log, a.clone()));
                    let base_term = div(mul(b.clone(), da), a.clone());
                    mul(node.clone(), add(log_term, base_term))
                }
            }
        }
        Node::Call(f, a) => {
            let da = derivative(a, var);
            let a = (**a).clone();
            match f {
                Func::Exp => mul(call(Func::Exp, a), da),
                Func::Log => div(da, a),
                Func::Sin => mul(call(Func::Cos, a), da),
                Func::Cos => neg(mul(call(Func::Sin, a), da)),
                Func::Tan => div(da, pow(call(Func::Cos, a), Node::Num(2.0))),
                Func::Sinh => mul(call(Func::Cosh, a), da),
                Func::Cosh => mul(call(Func::Sinh, a), da),
                Func::Sqrt => div(da, mul(Node::Num(2.0), call(Func::Sqrt, a))),
                Func::Abs => mul(div(a.clone(), call(Func::Abs, a)), da),
            }
        }
    }
}
