use std::fmt;

use crate::error::{Error, Result};

/// Default highest derivative order a [`SmoothFunction`] answers for.
pub const DEFAULT_MAX_ORDER: usize = 12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Primitive {
    Exp,
    Sin,
    Cos,
    /// `u^m` for real `m`.
    Pow(f64),
    Ln,
}

/// A primitive applied to the affine argument `a·x + b`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Factor {
    pub primitive: Primitive,
    pub a: f64,
    pub b: f64,
}

fn falling(m: f64, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (m - i as f64))
}

fn factorial(k: usize) -> f64 {
    (1..=k).fold(1.0, |acc, i| acc * i as f64)
}

impl Factor {
    pub fn new(primitive: Primitive, a: f64, b: f64) -> Self {
        Self { primitive, a, b }
    }

    /// Closed-form `k`-th derivative in `x`.
    pub fn derivative(&self, k: usize, x: f64) -> f64 {
        let u = self.a * x + self.b;
        let ak = self.a.powi(k as i32);
        match self.primitive {
            Primitive::Exp => ak * u.exp(),
            Primitive::Sin => {
                let (s, c) = u.sin_cos();
                ak * [s, c, -s, -c][k % 4]
            }
            Primitive::Cos => {
                let (s, c) = u.sin_cos();
                ak * [c, -s, -c, s][k % 4]
            }
            Primitive::Pow(m) => {
                if m.fract() == 0.0 && m >= 0.0 && k as f64 > m {
                    return 0.0;
                }
                let e = m - k as f64;
                let p = if e.fract() == 0.0 && e.abs() < i32::MAX as f64 {
                    u.powi(e as i32)
                } else {
                    u.powf(e)
                };
                falling(m, k) * ak * p
            }
            Primitive::Ln => {
                if k == 0 {
                    u.ln()
                } else {
                    let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
                    sign * factorial(k - 1) * ak * u.powi(-(k as i32))
                }
            }
        }
    }
}

/// `coef · Π factors`, at most two factors.
#[derive(Debug, Clone, PartialEq)]
pub struct Term {
    pub coef: f64,
    pub factors: Vec<Factor>,
}

impl Term {
    fn derivative(&self, k: usize, x: f64) -> f64 {
        match self.factors.as_slice() {
            [] => {
                if k == 0 {
                    self.coef
                } else {
                    0.0
                }
            }
            [f] => self.coef * f.derivative(k, x),
            [f, g] => {
                // Leibniz rule with the binomial row built in place.
                let mut c = 1.0;
                let mut s = 0.0;
                for i in 0..=k {
                    s += c * f.derivative(i, x) * g.derivative(k - i, x);
                    c = c * (k - i) as f64 / (i + 1) as f64;
                }
                self.coef * s
            }
            _ => unreachable!("terms are built with at most two factors"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Repr {
    /// Ascending coefficients.
    Polynomial(Vec<f64>),
    Composite(Vec<Term>),
}

/// A test function with exact derivatives up to a declared order.
#[derive(Debug, Clone, PartialEq)]
pub struct SmoothFunction {
    repr: Repr,
    max_order: usize,
    label: String,
}

impl SmoothFunction {
    pub fn polynomial(coeffs: Vec<f64>) -> Self {
        let mut c = coeffs;
        while c.len() > 1 && c.last() == Some(&0.0) {
            c.pop();
        }
        if c.is_empty() {
            c.push(0.0);
        }
        let label = poly_label(&c);
        Self {
            repr: Repr::Polynomial(c),
            max_order: DEFAULT_MAX_ORDER,
            label,
        }
    }

    /// A sum of terms, each with at most two factors.
    pub fn composite(terms: Vec<Term>, label: impl Into<String>) -> Result<Self> {
        if let Some(t) = terms.iter().find(|t| t.factors.len() > 2) {
            return Err(Error::Expression(format!(
                "a product may have at most two factors, found {}",
                t.factors.len()
            )));
        }
        Ok(Self {
            repr: Repr::Composite(terms),
            max_order: DEFAULT_MAX_ORDER,
            label: label.into(),
        })
    }

    /// Parses the primitive-composition grammar; see [`crate::calculus::parse_expression`].
    pub fn parse(src: &str) -> Result<Self> {
        super::expr::parse_expression(src)
    }

    pub fn with_max_order(mut self, max_order: usize) -> Self {
        self.max_order = max_order;
        self
    }

    pub fn max_order(&self) -> usize {
        self.max_order
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn coefficients(&self) -> Option<&[f64]> {
        match &self.repr {
            Repr::Polynomial(c) => Some(c),
            Repr::Composite(_) => None,
        }
    }

    /// Degree for polynomials, `None` otherwise.
    pub fn degree(&self) -> Option<usize> {
        self.coefficients().map(|c| c.len() - 1)
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.derivative_unchecked(0, x)
    }

    /// Exact `k`-th derivative at `x`.
    pub fn derivative(&self, k: usize, x: f64) -> Result<f64> {
        if k > self.max_order {
            return Err(Error::OrderTooLarge { k, max: self.max_order });
        }
        Ok(self.derivative_unchecked(k, x))
    }

    fn derivative_unchecked(&self, k: usize, x: f64) -> f64 {
        match &self.repr {
            Repr::Polynomial(c) => {
                if k >= c.len() {
                    return 0.0;
                }
                // Horner over c_i · i!/(i − k)! for i ≥ k.
                let mut acc = 0.0;
                for i in (k..c.len()).rev() {
                    acc = acc * x + c[i] * falling(i as f64, k);
                }
                acc
            }
            Repr::Composite(terms) => terms.iter().map(|t| t.derivative(k, x)).sum(),
        }
    }
}

fn poly_label(c: &[f64]) -> String {
    let mut out = String::new();
    for (i, &v) in c.iter().enumerate().filter(|(_, v)| **v != 0.0) {
        let mag = v.abs();
        if out.is_empty() {
            if v < 0.0 {
                out.push('-');
            }
        } else {
            out.push_str(if v < 0.0 { " - " } else { " + " });
        }
        let monomial = match i {
            0 => String::new(),
            1 => "x".into(),
            _ => format!("x^{i}"),
        };
        match (i, mag == 1.0) {
            (0, _) => out.push_str(&format!("{mag}")),
            (_, true) => out.push_str(&monomial),
            (_, false) => out.push_str(&format!("{mag}*{monomial}")),
        }
    }
    if out.is_empty() {
        "0".into()
    } else {
        out
    }
}

impl fmt::Display for SmoothFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label)
    }
}

/// `f^{(k)}(x)`; fails when `k` exceeds the function's declared max order.
pub fn derivative_value(f: &SmoothFunction, k: usize, x: f64) -> Result<f64> {
    f.derivative(k, x)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_labels_parse_back() {
        for (c, want) in [
            (vec![0.0, 1.0], "x"),
            (vec![1.0, -1.0, 0.0, 2.5], "1 - x + 2.5*x^3"),
            (vec![0.0, 0.0, -1.0], "-x^2"),
            (vec![0.0], "0"),
        ] {
            let p = SmoothFunction::polynomial(c);
            assert_eq!(p.label(), want);
            let back = SmoothFunction::parse(p.label()).unwrap();
            assert_eq!(back.eval(1.7), p.eval(1.7));
        }
    }

    #[test]
    fn polynomial_derivatives() {
        let sq = SmoothFunction::polynomial(vec![0.0, 0.0, 1.0]);
        assert_eq!(derivative_value(&sq, 1, 3.0).unwrap(), 6.0);
        let cube = SmoothFunction::polynomial(vec![0.0, 0.0, 0.0, 1.0]);
        for x in [-2.0, 0.0, 7.5] {
            assert_eq!(derivative_value(&cube, 3, x).unwrap(), 6.0);
            assert_eq!(derivative_value(&cube, 4, x).unwrap(), 0.0);
        }
        assert_eq!(cube.degree(), Some(3));
    }

    #[test]
    fn product_rule() {
        // x·e^x: second derivative (x + 2)e^x, 2 at 0
        let t = Term {
            coef: 1.0,
            factors: vec![
                Factor::new(Primitive::Pow(1.0), 1.0, 0.0),
                Factor::new(Primitive::Exp, 1.0, 0.0),
            ],
        };
        let f = SmoothFunction::composite(vec![t], "x*exp(x)").unwrap();
        let d2 = derivative_value(&f, 2, 0.0).unwrap();
        let h = 1e-5;
        let fd = (f.eval(h) - 2.0 * f.eval(0.0) + f.eval(-h)) / (h * h);
        assert!((d2 - 2.0).abs() < 1e-15);
        assert!((d2 - fd).abs() < 1e-4);
    }

    #[test]
    fn trig_and_log_cycles() {
        let s = Factor::new(Primitive::Sin, 2.0, 0.5);
        let x: f64 = 0.3;
        assert!((s.derivative(3, x) + 8.0 * (2.0 * x + 0.5).cos()).abs() < 1e-14);
        let l = Factor::new(Primitive::Ln, 1.0, 0.0);
        assert!((l.derivative(3, 2.0) - 2.0 / 8.0).abs() < 1e-15);
        let r = Factor::new(Primitive::Pow(-0.5), 1.0, 0.0);
        assert!((r.derivative(1, 4.0) + 0.5 / 8.0).abs() < 1e-15);
    }

    #[test]
    fn order_ceiling() {
        let f = SmoothFunction::polynomial(vec![1.0]).with_max_order(3);
        assert_eq!(f.derivative(4, 0.0).unwrap_err(), Error::OrderTooLarge { k: 4, max: 3 });
    }

    #[test]
    fn three_factor_products_are_rejected() {
        let e = Factor::new(Primitive::Exp, 1.0, 0.0);
        let t = Term { coef: 1.0, factors: vec![e, e, e] };
        assert!(SmoothFunction::composite(vec![t], "").is_err());
    }
}
