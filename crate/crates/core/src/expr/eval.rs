use std::collections::{BTreeMap, HashMap};

use num_complex::Complex64;

use super::ast::{conjugate_param_name, BinOp, Expr, Func, Node, Var};
use super::diff::differentiate;
use super::ExprError;
use crate::jet::{multi_indices, slot, Jet, MAX_ORDER};

type C = Complex64;

/// Parameter values by name. A missing `p_bar` falls back to the conjugate of
/// a bound `p` (and vice versa), so only one member of a pair is needed.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Bindings(pub BTreeMap<String, C>);

impl Bindings {
    pub fn new() -> Bindings {
        Bindings::default()
    }

    pub fn with(mut self, name: &str, value: C) -> Bindings {
        self.0.insert(name.to_string(), value);
        self
    }

    pub fn insert(&mut self, name: &str, value: C) {
        self.0.insert(name.to_string(), value);
    }

    pub fn get(&self, name: &str) -> Option<C> {
        if let Some(v) = self.0.get(name) {
            return Some(*v);
        }
        self.0.get(&conjugate_param_name(name)).map(|v| v.conj())
    }
}

/// A point of the domain; ξ̄ is always the conjugate of ξ.
#[derive(Debug, Clone, PartialEq)]
pub struct EvalPoint {
    pub xi: C,
    pub params: Bindings,
}

impl EvalPoint {
    pub fn new(xi: C) -> EvalPoint {
        EvalPoint {
            xi,
            params: Bindings::new(),
        }
    }

    pub fn with_params(xi: C, params: Bindings) -> EvalPoint {
        EvalPoint { xi, params }
    }

    pub fn xibar(&self) -> C {
        self.xi.conj()
    }
}

#[derive(Debug, Clone, Copy)]
enum Op {
    Const(C),
    Xi,
    XiBar,
    Param(usize),
    Neg(usize),
    Call(Func, usize),
    Binary(BinOp, usize, usize),
    Pow(usize, usize),
}

/// Flattened, deduplicated evaluation program for a set of expressions.
///
/// Shared subtrees (by pointer) are evaluated once, which matters for
/// derivative towers where the same factors appear many times.
#[derive(Debug, Clone)]
pub struct Tape {
    ops: Vec<Op>,
    exprs: Vec<Expr>,
    params: Vec<String>,
    roots: Vec<usize>,
}

impl Tape {
    pub fn compile(roots: &[Expr]) -> Tape {
        let mut tape = Tape {
            ops: Vec::new(),
            exprs: Vec::new(),
            params: Vec::new(),
            roots: Vec::new(),
        };
        let mut seen: HashMap<*const Node, usize> = HashMap::new();
        let mut params: HashMap<String, usize> = HashMap::new();
        for r in roots {
            let id = tape.push(r, &mut seen, &mut params);
            tape.roots.push(id);
        }
        tape
    }

    fn push(
        &mut self,
        e: &Expr,
        seen: &mut HashMap<*const Node, usize>,
        params: &mut HashMap<String, usize>,
    ) -> usize {
        if let Some(&id) = seen.get(&e.ptr()) {
            return id;
        }
        let op = match e.node() {
            Node::Const(c) => Op::Const(*c),
            Node::Xi => Op::Xi,
            Node::XiBar => Op::XiBar,
            Node::Param(p) => {
                let next = params.len();
                let idx = *params.entry(p.clone()).or_insert_with(|| {
                    self.params.push(p.clone());
                    next
                });
                Op::Param(idx)
            }
            Node::Neg(a) => Op::Neg(self.push(a, seen, params)),
            Node::Call(f, a) => Op::Call(*f, self.push(a, seen, params)),
            Node::Binary(op, a, b) => {
                let a = self.push(a, seen, params);
                let b = self.push(b, seen, params);
                Op::Binary(*op, a, b)
            }
            Node::Pow(a, b) => {
                let a = self.push(a, seen, params);
                let b = self.push(b, seen, params);
                Op::Pow(a, b)
            }
        };
        self.ops.push(op);
        self.exprs.push(e.clone());
        let id = self.ops.len() - 1;
        seen.insert(e.ptr(), id);
        id
    }

    pub fn len(&self) -> usize {
        self.ops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ops.is_empty()
    }

    pub fn param_names(&self) -> &[String] {
        &self.params
    }

    /// Evaluates every root at `p`.
    pub fn eval(&self, p: &EvalPoint) -> Result<Vec<C>, ExprError> {
        let mut pv = Vec::with_capacity(self.params.len());
        for name in &self.params {
            pv.push(p.params.get(name).ok_or_else(|| ExprError::UnboundParameter {
                name: name.clone(),
            })?);
        }
        let (xi, xb) = (p.xi, p.xibar());
        let mut vals: Vec<C> = Vec::with_capacity(self.ops.len());
        for (k, op) in self.ops.iter().enumerate() {
            let v = match *op {
                Op::Const(c) => c,
                Op::Xi => xi,
                Op::XiBar => xb,
                Op::Param(i) => pv[i],
                Op::Neg(a) => -vals[a],
                Op::Call(f, a) => {
                    let x = vals[a];
                    if f == Func::Ln && x == C::new(0.0, 0.0) {
                        return Err(self.domain(k, "logarithm of zero"));
                    }
                    f.apply(x)
                }
                Op::Binary(op, a, b) => {
                    let (x, y) = (vals[a], vals[b]);
                    match op {
                        BinOp::Add => x + y,
                        BinOp::Sub => x - y,
                        BinOp::Mul => x * y,
                        BinOp::Div => {
                            if y == C::new(0.0, 0.0) {
                                return Err(self.domain(k, "division by zero"));
                            }
                            x / y
                        }
                    }
                }
                Op::Pow(a, b) => power(vals[a], vals[b])
                    .ok_or_else(|| self.domain(k, "zero raised to a non-positive power"))?,
            };
            if !(v.re.is_finite() && v.im.is_finite()) {
                return Err(self.domain(k, "non-finite value"));
            }
            vals.push(v);
        }
        Ok(self.roots.iter().map(|&r| vals[r]).collect())
    }

    fn domain(&self, k: usize, reason: &str) -> ExprError {
        ExprError::Domain {
            reason: reason.to_string(),
            subexpression: self.exprs[k].to_string(),
        }
    }
}

/// Integer exponents use repeated multiplication so negative real bases stay
/// exact; anything else goes through the principal branch exp(e ln b).
pub fn power(base: C, exponent: C) -> Option<C> {
    if exponent.im == 0.0 && exponent.re.fract() == 0.0 && exponent.re.abs() <= 64.0 {
        let n = exponent.re as i32;
        if base == C::new(0.0, 0.0) {
            return match n.cmp(&0) {
                std::cmp::Ordering::Greater => Some(base),
                std::cmp::Ordering::Equal => Some(C::new(1.0, 0.0)),
                std::cmp::Ordering::Less => None,
            };
        }
        return Some(base.powi(n));
    }
    if base == C::new(0.0, 0.0) {
        return if exponent.re > 0.0 { Some(base) } else { None };
    }
    Some((exponent * base.ln()).exp())
}

pub fn evaluate(e: &Expr, p: &EvalPoint) -> Result<C, ExprError> {
    Ok(Tape::compile(std::slice::from_ref(e)).eval(p)?[0])
}

/// Memoized symbolic derivative trees ∂^a ∂̄^b e for a + b ≤ order, compiled
/// into one shared tape.
#[derive(Debug, Clone)]
pub struct DerivativeTower {
    order: usize,
    trees: Vec<Expr>,
    tape: Tape,
}

/// ∂^a ∂̄^b e for a + b ≤ order, in jet slot order. ∂ is applied first, then ∂̄.
pub fn derivative_trees(e: &Expr, order: usize) -> Vec<Expr> {
    assert!(order <= MAX_ORDER, "derivative order {order} exceeds {MAX_ORDER}");
    let mut trees: Vec<Expr> = Vec::with_capacity(slot(order, 0) + order + 1);
    trees.push(e.clone());
    for (a, b) in multi_indices(order).skip(1) {
        let t = if b == 0 {
            differentiate(&trees[slot(a - 1, 0)], Var::Xi)
        } else {
            differentiate(&trees[slot(a, b - 1)], Var::XiBar)
        };
        trees.push(t);
    }
    trees
}

impl DerivativeTower {
    pub fn new(e: &Expr, order: usize) -> DerivativeTower {
        let trees = derivative_trees(e, order);
        let tape = Tape::compile(&trees);
        DerivativeTower { order, trees, tape }
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn tree(&self, a: usize, b: usize) -> &Expr {
        &self.trees[slot(a, b)]
    }

    pub fn tape(&self) -> &Tape {
        &self.tape
    }

    pub fn jet(&self, p: &EvalPoint) -> Result<Jet, ExprError> {
        let vals = self.tape.eval(p)?;
        let mut j = Jet::constant(vals[0], self.order);
        for (k, v) in vals.into_iter().enumerate() {
            j.d[k] = v;
        }
        Ok(j)
    }
}

/// Value and all Wirtinger partials of `e` up to `order` at `p`.
pub fn evaluate_jet(e: &Expr, p: &EvalPoint, order: usize) -> Result<Jet, ExprError> {
    if order > MAX_ORDER {
        return Err(ExprError::OrderTooHigh { order });
    }
    DerivativeTower::new(e, order).jet(p)
}
