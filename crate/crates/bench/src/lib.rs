//! Fixtures shared by the criterion benchmarks in `benches/`.

use matvar_core::{normal, poisson, Distribution, FunctionTuple, SymMatrix};

pub fn gaussian() -> Distribution {
    normal(0.0, 1.0).unwrap().into()
}

pub fn poisson_member(lambda: f64) -> Distribution {
    poisson(lambda).unwrap().into()
}

/// `(x, x², e^{x/2}, sin x)`.
pub fn mixed_tuple() -> FunctionTuple {
    FunctionTuple::parse_exprs(&["x", "x^2", "exp(x/2)", "sin(x)"]).unwrap()
}

/// Hilbert matrix plus the identity.
pub fn hilbert_like(order: usize) -> SymMatrix {
    SymMatrix::from_fn(order, |i, j| 1.0 / (i + j + 1) as f64 + if i == j { 1.0 } else { 0.0 })
}
