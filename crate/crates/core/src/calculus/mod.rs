//! Exact derivatives and forward differences of test functions.

mod difference;
mod expr;
mod smooth;
mod tuple;

pub use difference::{forward_difference, pascal_row, rising_q, MAX_DIFFERENCE_ORDER};
pub use expr::parse_expression;
pub use smooth::{derivative_value, Factor, Primitive, SmoothFunction, Term, DEFAULT_MAX_ORDER};
pub use tuple::{FunctionSpec, FunctionTuple, FunctionsDocument, LatticeFn, TestFunction};
