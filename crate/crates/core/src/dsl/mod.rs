//! Closed-form metric expressions: parsing, printing and generic evaluation.

mod ast;
mod metric;
mod parser;

pub use ast::{BinOp, Expr, ExprKind, Func};
pub use metric::{parse_metric, MetricSpec, MAX_DIMENSION, MIN_DIMENSION};
pub use parser::parse_expr;
