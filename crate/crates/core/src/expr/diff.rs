use std::collections::HashMap;

use super::ast::{conjugate_param_name, BinOp, Expr, Func, Node, Var};

/// Symbolic Wirtinger partial of `e`; ξ and ξ̄ are independent.
pub fn differentiate(e: &Expr, var: Var) -> Expr {
    let mut memo = HashMap::new();
    diff_rec(e, var, &mut memo)
}

fn diff_rec(e: &Expr, var: Var, memo: &mut HashMap<*const Node, Expr>) -> Expr {
    if let Some(d) = memo.get(&e.ptr()) {
        return d.clone();
    }
    let d = match e.node() {
        Node::Const(_) | Node::Param(_) => Expr::zero(),
        Node::Xi => {
            if var == Var::Xi {
                Expr::one()
            } else {
                Expr::zero()
            }
        }
        Node::XiBar => {
            if var == Var::XiBar {
                Expr::one()
            } else {
                Expr::zero()
            }
        }
        Node::Neg(a) => Expr::neg(&diff_rec(a, var, memo)),
        Node::Binary(op, a, b) => {
            let da = diff_rec(a, var, memo);
            let db = diff_rec(b, var, memo);
            match op {
                BinOp::Add => Expr::add(&da, &db),
                BinOp::Sub => Expr::sub(&da, &db),
                BinOp::Mul => Expr::add(&Expr::mul(&da, b), &Expr::mul(a, &db)),
                BinOp::Div => {
                    let left = Expr::div(&da, b);
                    if db.is_zero() {
                        left
                    } else {
                        let right = Expr::div(&Expr::mul(a, &db), &Expr::mul(b, b));
                        Expr::sub(&left, &right)
                    }
                }
            }
        }
        Node::Pow(base, exponent) => {
            let db = diff_rec(base, var, memo);
            let de = diff_rec(exponent, var, memo);
            if de.is_zero() {
                if db.is_zero() {
                    Expr::zero()
                } else {
                    let lowered = match exponent.as_const() {
                        Some(c) => Expr::constant(c - 1.0),
                        None => Expr::sub(exponent, &Expr::one()),
                    };
                    Expr::mul(
                        &Expr::mul(exponent, &Expr::pow(base, &lowered)),
                        &db,
                    )
                }
            } else {
                // d(b^e) = b^e (e' ln b + e b'/b)
                let log_term = Expr::mul(&de, &Expr::call(Func::Ln, base));
                let base_term = Expr::div(&Expr::mul(exponent, &db), base);
                Expr::mul(e, &Expr::add(&log_term, &base_term))
            }
        }
        Node::Call(f, a) => {
            let da = diff_rec(a, var, memo);
            if da.is_zero() {
                Expr::zero()
            } else {
                Expr::mul(&outer_derivative(*f, a, e), &da)
            }
        }
    };
    memo.insert(e.ptr(), d.clone());
    d
}

/// f'(a) for `whole = f(a)`.
fn outer_derivative(f: Func, a: &Expr, whole: &Expr) -> Expr {
    match f {
        Func::Exp => whole.clone(),
        Func::Ln => Expr::div(&Expr::one(), a),
        Func::Sinh => Expr::call(Func::Cosh, a),
        Func::Cosh => Expr::call(Func::Sinh, a),
        Func::Tanh => {
            let s = Expr::call(Func::Sech, a);
            Expr::mul(&s, &s)
        }
        Func::Sech => Expr::neg(&Expr::mul(whole, &Expr::call(Func::Tanh, a))),
        Func::Sqrt => Expr::div(&Expr::real(0.5), whole),
        Func::Sin => Expr::call(Func::Cos, a),
        Func::Cos => Expr::neg(&Expr::call(Func::Sin, a)),
    }
}

/// Formal conjugate: swaps ξ and ξ̄, conjugates constants and maps every
/// parameter to its paired conjugate parameter.
pub fn conjugate_expression(e: &Expr) -> Expr {
    let mut memo = HashMap::new();
    conj_rec(e, &mut memo)
}

fn conj_rec(e: &Expr, memo: &mut HashMap<*const Node, Expr>) -> Expr {
    if let Some(c) = memo.get(&e.ptr()) {
        return c.clone();
    }
    let c = match e.node() {
        Node::Const(c) => Expr::constant(c.conj()),
        Node::Xi => Expr::xibar(),
        Node::XiBar => Expr::xi(),
        Node::Param(p) => Expr::param(conjugate_param_name(p)),
        Node::Neg(a) => Expr::raw_neg(conj_rec(a, memo)),
        Node::Call(f, a) => Expr::call(*f, &conj_rec(a, memo)),
        Node::Binary(op, a, b) => Expr::raw_binary(*op, conj_rec(a, memo), conj_rec(b, memo)),
        Node::Pow(a, b) => Expr::raw_pow(conj_rec(a, memo), conj_rec(b, memo)),
    };
    memo.insert(e.ptr(), c.clone());
    c
}
