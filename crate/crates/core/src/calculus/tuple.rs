use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::difference::forward_difference;
use super::smooth::SmoothFunction;
use crate::error::{Error, Result};

pub type LatticeFn = Arc<dyn Fn(i64) -> f64 + Send + Sync>;

/// One entry `g_i` of a tuple.
#[derive(Clone)]
pub enum TestFunction {
    Smooth(SmoothFunction),
    /// Integer-domain evaluator, usable only against discrete members.
    Lattice { label: String, f: LatticeFn },
}

impl fmt::Debug for TestFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TestFunction::Smooth(s) => write!(f, "Smooth({s})"),
            TestFunction::Lattice { label, .. } => write!(f, "Lattice({label})"),
        }
    }
}

impl TestFunction {
    pub fn lattice(label: impl Into<String>, f: impl Fn(i64) -> f64 + Send + Sync + 'static) -> Self {
        TestFunction::Lattice {
            label: label.into(),
            f: Arc::new(f),
        }
    }

    pub fn label(&self) -> &str {
        match self {
            TestFunction::Smooth(s) => s.label(),
            TestFunction::Lattice { label, .. } => label,
        }
    }

    pub fn eval(&self, x: f64) -> f64 {
        match self {
            TestFunction::Smooth(s) => s.eval(x),
            TestFunction::Lattice { f, .. } => f(x as i64),
        }
    }

    pub fn at(&self, j: i64) -> f64 {
        match self {
            TestFunction::Smooth(s) => s.eval(j as f64),
            TestFunction::Lattice { f, .. } => f(j),
        }
    }

    /// `g^{(k)}(x)`; lattice functions have no derivatives.
    pub fn derivative(&self, k: usize, x: f64) -> Result<f64> {
        match self {
            TestFunction::Smooth(s) => s.derivative(k, x),
            TestFunction::Lattice { label, .. } => Err(Error::InvalidArgument(format!(
                "`{label}` is defined on the integers only and has no derivatives"
            ))),
        }
    }

    /// `Δ^k g(j)`.
    pub fn difference(&self, k: usize, j: i64) -> Result<f64> {
        forward_difference(|i| self.at(i), k, j)
    }

    /// Degree when this is a polynomial.
    pub fn degree(&self) -> Option<usize> {
        match self {
            TestFunction::Smooth(s) => s.degree(),
            TestFunction::Lattice { .. } => None,
        }
    }
}

impl From<SmoothFunction> for TestFunction {
    fn from(s: SmoothFunction) -> Self {
        TestFunction::Smooth(s)
    }
}

/// `g = (g_1, …, g_p)`.
#[derive(Debug, Clone)]
pub struct FunctionTuple {
    entries: Vec<TestFunction>,
}

impl FunctionTuple {
    pub fn new(entries: Vec<TestFunction>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::InvalidArgument("a function tuple needs p ≥ 1 entries".into()));
        }
        Ok(Self { entries })
    }

    pub fn smooth(entries: Vec<SmoothFunction>) -> Result<Self> {
        Self::new(entries.into_iter().map(TestFunction::Smooth).collect())
    }

    pub fn polynomials(coeffs: &[&[f64]]) -> Result<Self> {
        Self::smooth(coeffs.iter().map(|c| SmoothFunction::polynomial(c.to_vec())).collect())
    }

    pub fn parse_exprs(exprs: &[&str]) -> Result<Self> {
        Self::smooth(exprs.iter().map(|e| SmoothFunction::parse(e)).collect::<Result<_>>()?)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[TestFunction] {
        &self.entries
    }

    pub fn labels(&self) -> Vec<String> {
        self.entries.iter().map(|e| e.label().to_string()).collect()
    }

    pub fn has_lattice(&self) -> bool {
        self.entries.iter().any(|e| matches!(e, TestFunction::Lattice { .. }))
    }

    pub fn from_document(doc: &FunctionsDocument) -> Result<Self> {
        Self::smooth(
            doc.functions
                .iter()
                .map(|s| match s {
                    FunctionSpec::Poly { poly } => Ok(SmoothFunction::polynomial(poly.clone())),
                    FunctionSpec::Expr { expr } => SmoothFunction::parse(expr),
                })
                .collect::<Result<_>>()?,
        )
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: FunctionsDocument =
            serde_json::from_str(text).map_err(|e| Error::Document(e.to_string()))?;
        Self::from_document(&doc)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum FunctionSpec {
    Poly { poly: Vec<f64> },
    Expr { expr: String },
}

/// `{"functions": [{"poly": [c0, c1, ...]} | {"expr": "..."}]}`
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FunctionsDocument {
    pub functions: Vec<FunctionSpec>,
}
