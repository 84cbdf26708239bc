//! Closed-form expressions in the independent Wirtinger variables ξ and ξ̄.

mod ast;
mod diff;
mod eval;
mod parse;

pub use ast::{conjugate_param_name, BinOp, Expr, Func, Node, Var, PARAM_CONJ_SUFFIX};
pub use diff::{conjugate_expression, differentiate};
pub use eval::{
    derivative_trees, evaluate, evaluate_jet, power, Bindings, DerivativeTower, EvalPoint, Tape,
};
pub use parse::parse;

pub use crate::jet::Jet;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ExprError {
    #[error("syntax error at byte {offset}: {message}")]
    Syntax { offset: usize, message: String },
    #[error("unknown function '{name}' at byte {offset}")]
    UnknownFunction { name: String, offset: usize },
    #[error("parameter '{name}' is not bound")]
    UnboundParameter { name: String },
    #[error("{reason} in `{subexpression}`")]
    Domain {
        reason: String,
        subexpression: String,
    },
    #[error("derivative order {order} is above the supported maximum of 3")]
    OrderTooHigh { order: usize },
}
