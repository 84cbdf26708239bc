use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;

/// Elementary functions understood by the parser and the differentiator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Func {
    Exp,
    Ln,
    Sinh,
    Cosh,
    Tanh,
    Sech,
    Sqrt,
    Sin,
    Cos,
}

impl Func {
    pub const ALL: [Func; 9] = [
        Func::Exp,
        Func::Ln,
        Func::Sinh,
        Func::Cosh,
        Func::Tanh,
        Func::Sech,
        Func::Sqrt,
        Func::Sin,
        Func::Cos,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Func::Exp => "exp",
            Func::Ln => "ln",
            Func::Sinh => "sinh",
            Func::Cosh => "cosh",
            Func::Tanh => "tanh",
            Func::Sech => "sech",
            Func::Sqrt => "sqrt",
            Func::Sin => "sin",
            Func::Cos => "cos",
        }
    }

    pub fn from_name(name: &str) -> Option<Func> {
        Func::ALL.iter().copied().find(|f| f.name() == name)
    }

    pub fn apply(self, z: Complex64) -> Complex64 {
        match self {
            Func::Exp => z.exp(),
            Func::Ln => z.ln(),
            Func::Sinh => z.sinh(),
            Func::Cosh => z.cosh(),
            Func::Tanh => z.tanh(),
            Func::Sech => z.cosh().inv(),
            Func::Sqrt => z.sqrt(),
            Func::Sin => z.sin(),
            Func::Cos => z.cos(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
}

impl BinOp {
    fn symbol(self) -> &'static str {
        match self {
            BinOp::Add => "+",
            BinOp::Sub => "-",
            BinOp::Mul => "*",
            BinOp::Div => "/",
        }
    }

    fn precedence(self) -> u8 {
        match self {
            BinOp::Add | BinOp::Sub => 1,
            BinOp::Mul | BinOp::Div => 2,
        }
    }
}

/// Which Wirtinger variable to differentiate with respect to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Var {
    Xi,
    XiBar,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Node {
    Const(Complex64),
    Xi,
    XiBar,
    Param(String),
    Neg(Expr),
    Call(Func, Expr),
    Binary(BinOp, Expr, Expr),
    Pow(Expr, Expr),
}

/// Immutable, cheaply clonable expression tree over ξ and ξ̄.
///
/// Subtrees are shared through `Arc`, so derivative towers reuse the nodes of
/// the expression they were built from.
#[derive(Debug, Clone)]
pub struct Expr(pub(crate) Arc<Node>);

impl PartialEq for Expr {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || *self.0 == *other.0
    }
}

pub const PARAM_CONJ_SUFFIX: &str = "_bar";

impl Expr {
    pub fn node(&self) -> &Node {
        &self.0
    }

    pub(crate) fn ptr(&self) -> *const Node {
        Arc::as_ptr(&self.0)
    }

    fn wrap(node: Node) -> Expr {
        Expr(Arc::new(node))
    }

    pub fn constant(c: Complex64) -> Expr {
        Expr::wrap(Node::Const(c))
    }

    pub fn real(x: f64) -> Expr {
        Expr::constant(Complex64::new(x, 0.0))
    }

    pub fn zero() -> Expr {
        Expr::real(0.0)
    }

    pub fn one() -> Expr {
        Expr::real(1.0)
    }

    pub fn imag_unit() -> Expr {
        Expr::constant(Complex64::i())
    }

    pub fn xi() -> Expr {
        Expr::wrap(Node::Xi)
    }

    pub fn xibar() -> Expr {
        Expr::wrap(Node::XiBar)
    }

    pub fn param(name: impl Into<String>) -> Expr {
        Expr::wrap(Node::Param(name.into()))
    }

    pub fn as_const(&self) -> Option<Complex64> {
        match self.node() {
            Node::Const(c) => Some(*c),
            _ => None,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.as_const() == Some(Complex64::new(0.0, 0.0))
    }

    pub fn is_one(&self) -> bool {
        self.as_const() == Some(Complex64::new(1.0, 0.0))
    }

    // The builders below fold literal 0/1 identities and nothing else.

    pub fn neg(a: &Expr) -> Expr {
        if let Some(c) = a.as_const() {
            if c == Complex64::new(0.0, 0.0) {
                return a.clone();
            }
        }
        Expr::wrap(Node::Neg(a.clone()))
    }

    pub fn add(a: &Expr, b: &Expr) -> Expr {
        if a.is_zero() {
            return b.clone();
        }
        if b.is_zero() {
            return a.clone();
        }
        Expr::wrap(Node::Binary(BinOp::Add, a.clone(), b.clone()))
    }

    pub fn sub(a: &Expr, b: &Expr) -> Expr {
        if b.is_zero() {
            return a.clone();
        }
        if a.is_zero() {
            return Expr::neg(b);
        }
        Expr::wrap(Node::Binary(BinOp::Sub, a.clone(), b.clone()))
    }

    pub fn mul(a: &Expr, b: &Expr) -> Expr {
        if a.is_zero() || b.is_zero() {
            return Expr::zero();
        }
        if a.is_one() {
            return b.clone();
        }
        if b.is_one() {
            return a.clone();
        }
        Expr::wrap(Node::Binary(BinOp::Mul, a.clone(), b.clone()))
    }

    pub fn div(a: &Expr, b: &Expr) -> Expr {
        if a.is_zero() {
            return Expr::zero();
        }
        if b.is_one() {
            return a.clone();
        }
        Expr::wrap(Node::Binary(BinOp::Div, a.clone(), b.clone()))
    }

    pub fn pow(base: &Expr, exponent: &Expr) -> Expr {
        if exponent.is_one() {
            return base.clone();
        }
        if exponent.is_zero() {
            return Expr::one();
        }
        Expr::wrap(Node::Pow(base.clone(), exponent.clone()))
    }

    pub fn call(f: Func, arg: &Expr) -> Expr {
        Expr::wrap(Node::Call(f, arg.clone()))
    }

    /// Raw constructors used by the parser so that no folding happens there.
    pub(crate) fn raw_binary(op: BinOp, a: Expr, b: Expr) -> Expr {
        Expr::wrap(Node::Binary(op, a, b))
    }

    pub(crate) fn raw_neg(a: Expr) -> Expr {
        Expr::wrap(Node::Neg(a))
    }

    pub(crate) fn raw_pow(a: Expr, b: Expr) -> Expr {
        Expr::wrap(Node::Pow(a, b))
    }

    /// True when the tree mentions ξ or ξ̄.
    pub fn depends_on_point(&self) -> bool {
        match self.node() {
            Node::Xi | Node::XiBar => true,
            Node::Const(_) | Node::Param(_) => false,
            Node::Neg(a) | Node::Call(_, a) => a.depends_on_point(),
            Node::Binary(_, a, b) | Node::Pow(a, b) => {
                a.depends_on_point() || b.depends_on_point()
            }
        }
    }

    pub fn depends_on(&self, var: Var) -> bool {
        match self.node() {
            Node::Xi => var == Var::Xi,
            Node::XiBar => var == Var::XiBar,
            Node::Const(_) | Node::Param(_) => false,
            Node::Neg(a) | Node::Call(_, a) => a.depends_on(var),
            Node::Binary(_, a, b) | Node::Pow(a, b) => a.depends_on(var) || b.depends_on(var),
        }
    }

    /// Collects parameter names in first-occurrence order.
    pub fn params(&self) -> Vec<String> {
        let mut out = Vec::new();
        self.collect_params(&mut out);
        out
    }

    fn collect_params(&self, out: &mut Vec<String>) {
        match self.node() {
            Node::Param(p) => {
                if !out.iter().any(|q| q == p) {
                    out.push(p.clone());
                }
            }
            Node::Const(_) | Node::Xi | Node::XiBar => {}
            Node::Neg(a) | Node::Call(_, a) => a.collect_params(out),
            Node::Binary(_, a, b) | Node::Pow(a, b) => {
                a.collect_params(out);
                b.collect_params(out);
            }
        }
    }

    /// Rational in ξ and ξ̄: no function calls and only integer literal
    /// exponents on point-dependent bases.
    pub fn is_rational(&self) -> bool {
        match self.node() {
            Node::Const(_) | Node::Xi | Node::XiBar | Node::Param(_) => true,
            Node::Call(_, a) => !a.depends_on_point(),
            Node::Neg(a) => a.is_rational(),
            Node::Binary(_, a, b) => a.is_rational() && b.is_rational(),
            Node::Pow(a, b) => {
                if !a.depends_on_point() {
                    return !b.depends_on_point();
                }
                a.is_rational()
                    && b.as_const().is_some_and(|e| e.im == 0.0 && e.re.fract() == 0.0)
            }
        }
    }

    pub fn node_count(&self) -> usize {
        match self.node() {
            Node::Const(_) | Node::Xi | Node::XiBar | Node::Param(_) => 1,
            Node::Neg(a) | Node::Call(_, a) => 1 + a.node_count(),
            Node::Binary(_, a, b) | Node::Pow(a, b) => 1 + a.node_count() + b.node_count(),
        }
    }

    /// Replaces ξ and ξ̄ by the given expressions.
    pub fn substitute(&self, xi: &Expr, xibar: &Expr) -> Expr {
        match self.node() {
            Node::Xi => xi.clone(),
            Node::XiBar => xibar.clone(),
            Node::Const(_) | Node::Param(_) => self.clone(),
            Node::Neg(a) => Expr::neg(&a.substitute(xi, xibar)),
            Node::Call(f, a) => Expr::call(*f, &a.substitute(xi, xibar)),
            Node::Binary(op, a, b) => {
                let (a, b) = (a.substitute(xi, xibar), b.substitute(xi, xibar));
                match op {
                    BinOp::Add => Expr::add(&a, &b),
                    BinOp::Sub => Expr::sub(&a, &b),
                    BinOp::Mul => Expr::mul(&a, &b),
                    BinOp::Div => Expr::div(&a, &b),
                }
            }
            Node::Pow(a, b) => Expr::pow(&a.substitute(xi, xibar), &b.substitute(xi, xibar)),
        }
    }
}

/// Name of the parameter paired with `name` under conjugation.
pub fn conjugate_param_name(name: &str) -> String {
    match name.strip_suffix(PARAM_CONJ_SUFFIX) {
        Some(base) if !base.is_empty() => base.to_string(),
        _ => format!("{name}{PARAM_CONJ_SUFFIX}"),
    }
}

fn fmt_number(x: f64) -> String {
    if x.is_finite() {
        let s = format!("{x:?}");
        // `{:?}` gives the shortest round-trip form, e.g. `1e-5` or `2.0`.
        s.strip_suffix(".0").map(str::to_string).unwrap_or(s)
    } else {
        format!("{x}")
    }
}

fn fmt_const(c: Complex64) -> String {
    let (re, im) = (c.re, c.im);
    if im == 0.0 && re >= 0.0 && !re.is_sign_negative() {
        return fmt_number(re);
    }
    if re == 0.0 && im == 1.0 {
        return "i".to_string();
    }
    if im == 0.0 {
        return format!("(-{})", fmt_number(-re));
    }
    let imag = if im == 1.0 {
        "i".to_string()
    } else if im == -1.0 {
        "-i".to_string()
    } else if im < 0.0 {
        format!("-{}*i", fmt_number(-im))
    } else {
        format!("{}*i", fmt_number(im))
    };
    if re == 0.0 {
        format!("({imag})")
    } else if imag.starts_with('-') {
        format!("({}{imag})", fmt_number(re))
    } else {
        format!("({}+{imag})", fmt_number(re))
    }
}

// Precedence levels for printing: 1 additive, 2 multiplicative, 3 unary minus,
// 4 power, 5 atoms.
fn prec(e: &Expr) -> u8 {
    match e.node() {
        Node::Binary(op, _, _) => op.precedence(),
        Node::Neg(_) => 3,
        Node::Pow(_, _) => 4,
        _ => 5,
    }
}

fn write_expr(e: &Expr, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    match e.node() {
        Node::Const(c) => write!(f, "{}", fmt_const(*c)),
        Node::Xi => write!(f, "xi"),
        Node::XiBar => write!(f, "xibar"),
        Node::Param(p) => write!(f, "{p}"),
        Node::Neg(a) => {
            write!(f, "-")?;
            write_child(a, prec(a) < 3, f)
        }
        Node::Call(func, a) => {
            write!(f, "{}(", func.name())?;
            write_expr(a, f)?;
            write!(f, ")")
        }
        Node::Binary(op, a, b) => {
            let p = op.precedence();
            write_child(a, prec(a) < p, f)?;
            write!(f, "{}", op.symbol())?;
            // Left associativity: the right operand needs parentheses at equal
            // precedence.
            write_child(b, prec(b) <= p, f)
        }
        Node::Pow(a, b) => {
            // Right associativity: a^(b^c) prints as a^b^c, (a^b)^c keeps parens.
            write_child(a, prec(a) <= 4, f)?;
            write!(f, "^")?;
            write_child(b, prec(b) < 4 && prec(b) != 3, f)
        }
    }
}

fn write_child(e: &Expr, paren: bool, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    if paren {
        write!(f, "(")?;
        write_expr(e, f)?;
        write!(f, ")")
    } else {
        write_expr(e, f)
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_expr(self, f)
    }
}
