//! Parser for the primitive-composition grammar.
//!
//! ```text
//! expr    = term , { ( "+" | "-" ) , term } ;
//! term    = unary , { ( "*" | "/" ) , unary } ;
//! unary   = [ "+" | "-" ] , power ;
//! power   = atom , [ "^" , [ "-" ] , atom ] ;
//! atom    = number | "x" | "pi" | func , "(" , expr , ")" | "(" , expr , ")" ;
//! func    = "exp" | "sin" | "cos" | "log" | "ln" | "sqrt" ;
//! number  = digit , { digit } , [ "." , { digit } ] , [ ( "e" | "E" ) , [ "+" | "-" ] , digit , { digit } ] ;
//! ```
//!
//! Function arguments must be affine in `x`, or constant, in which case the call is
//! folded. An exponent must be constant unless the base is a positive constant `c`, where
//! `c^(a·x + b)` becomes `exp((a·x + b)·ln c)`. After expansion every product may hold at
//! most two non-constant factors; powers of a common affine argument and exponentials
//! are merged first, so `x*x*exp(x)` is accepted.

use super::smooth::{Factor, Primitive, SmoothFunction, Term};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Op(char),
}

fn lex(src: &str) -> Result<Vec<Tok>> {
    let mut out = Vec::new();
    let chars: Vec<char> = src.chars().collect();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() || c == '.' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '.') {
                i += 1;
            }
            if i < chars.len() && (chars[i] == 'e' || chars[i] == 'E') {
                let mut j = i + 1;
                if j < chars.len() && (chars[j] == '+' || chars[j] == '-') {
                    j += 1;
                }
                if j < chars.len() && chars[j].is_ascii_digit() {
                    i = j;
                    while i < chars.len() && chars[i].is_ascii_digit() {
                        i += 1;
                    }
                }
            }
            let s: String = chars[start..i].iter().collect();
            let v = s
                .parse::<f64>()
                .map_err(|_| Error::Expression(format!("bad number `{s}`")))?;
            out.push(Tok::Num(v));
        } else if c.is_ascii_alphabetic() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_alphanumeric() {
                i += 1;
            }
            out.push(Tok::Ident(chars[start..i].iter().collect()));
        } else if "+-*/^()".contains(c) {
            out.push(Tok::Op(c));
            i += 1;
        } else {
            return Err(Error::Expression(format!("unexpected character `{c}`")));
        }
    }
    Ok(out)
}

/// A sum of terms; a term without factors is a constant.
type Sum = Vec<Term>;

fn constant(c: f64) -> Sum {
    vec![Term { coef: c, factors: vec![] }]
}

fn same_arg(f: &Factor, g: &Factor) -> bool {
    f.a == g.a && f.b == g.b
}

/// Merges `Pow` factors on a common argument and all `Exp` factors.
fn merge(mut factors: Vec<Factor>) -> Vec<Factor> {
    let mut out: Vec<Factor> = Vec::with_capacity(factors.len());
    for f in factors.drain(..) {
        let slot = out.iter_mut().find(|g| match (g.primitive, f.primitive) {
            (Primitive::Pow(_), Primitive::Pow(_)) => same_arg(g, &f),
            (Primitive::Exp, Primitive::Exp) => true,
            _ => false,
        });
        match slot {
            Some(g) => match (g.primitive, f.primitive) {
                (Primitive::Pow(m), Primitive::Pow(n)) => g.primitive = Primitive::Pow(m + n),
                _ => {
                    g.a += f.a;
                    g.b += f.b;
                }
            },
            None => out.push(f),
        }
    }
    out.retain(|f| f.primitive != Primitive::Pow(0.0));
    out
}

fn multiply(lhs: &Sum, rhs: &Sum) -> Sum {
    let mut out = Vec::with_capacity(lhs.len() * rhs.len());
    for s in lhs {
        for t in rhs {
            let mut factors = s.factors.clone();
            factors.extend(t.factors.iter().copied());
            out.push(Term {
                coef: s.coef * t.coef,
                factors: merge(factors),
            });
        }
    }
    out
}

fn as_constant(s: &Sum) -> Option<f64> {
    s.iter()
        .try_fold(0.0, |acc, t| t.factors.is_empty().then_some(acc + t.coef))
}

/// `(a, b)` when the sum equals `a·x + b`.
fn as_affine(s: &Sum) -> Option<(f64, f64)> {
    let (mut a, mut b) = (0.0, 0.0);
    for t in s {
        match t.factors.as_slice() {
            [] => b += t.coef,
            [f] if f.primitive == Primitive::Pow(1.0) => {
                a += t.coef * f.a;
                b += t.coef * f.b;
            }
            _ => return None,
        }
    }
    Some((a, b))
}

fn reciprocal(s: &Sum) -> Result<Sum> {
    let err = || Error::Expression("division is only supported by a single factor".into());
    if let Some(c) = as_constant(s) {
        return Ok(constant(1.0 / c));
    }
    if let Some((a, b)) = as_affine(s) {
        return Ok(vec![Term {
            coef: 1.0,
            factors: vec![Factor::new(Primitive::Pow(-1.0), a, b)],
        }]);
    }
    match s.as_slice() {
        [t] => {
            let factors = t
                .factors
                .iter()
                .map(|f| match f.primitive {
                    Primitive::Pow(m) => Ok(Factor::new(Primitive::Pow(-m), f.a, f.b)),
                    Primitive::Exp => Ok(Factor::new(Primitive::Exp, -f.a, -f.b)),
                    _ => Err(err()),
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(vec![Term { coef: 1.0 / t.coef, factors }])
        }
        _ => Err(err()),
    }
}

fn power(base: &Sum, m: f64) -> Result<Sum> {
    if let Some(c) = as_constant(base) {
        return Ok(constant(c.powf(m)));
    }
    if let Some((a, b)) = as_affine(base) {
        return Ok(vec![Term {
            coef: 1.0,
            factors: vec![Factor::new(Primitive::Pow(m), a, b)],
        }]);
    }
    if let [t] = base.as_slice() {
        if let [f] = t.factors.as_slice() {
            let g = match f.primitive {
                Primitive::Pow(p) => Some(Factor::new(Primitive::Pow(p * m), f.a, f.b)),
                Primitive::Exp => Some(Factor::new(Primitive::Exp, m * f.a, m * f.b)),
                _ => None,
            };
            if let Some(g) = g {
                return Ok(vec![Term { coef: t.coef.powf(m), factors: vec![g] }]);
            }
        }
    }
    if m.fract() == 0.0 && (0.0..=16.0).contains(&m) {
        let mut acc = constant(1.0);
        for _ in 0..m as usize {
            acc = multiply(&acc, base);
        }
        return Ok(acc);
    }
    Err(Error::Expression(format!("cannot raise this expression to the power {m}")))
}

struct Parser {
    toks: Vec<Tok>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos)
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(&Tok::Op(c)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> Result<()> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(Error::Expression(format!("expected `{c}` at token {}", self.pos)))
        }
    }

    fn expr(&mut self) -> Result<Sum> {
        let mut acc = self.term()?;
        loop {
            if self.eat('+') {
                acc.extend(self.term()?);
            } else if self.eat('-') {
                acc.extend(self.term()?.into_iter().map(|t| Term { coef: -t.coef, ..t }));
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<Sum> {
        let mut acc = self.unary()?;
        loop {
            if self.eat('*') {
                acc = multiply(&acc, &self.unary()?);
            } else if self.eat('/') {
                acc = multiply(&acc, &reciprocal(&self.unary()?)?);
            } else {
                return Ok(acc);
            }
        }
    }

    fn unary(&mut self) -> Result<Sum> {
        if self.eat('-') {
            let s = self.power()?;
            Ok(s.into_iter().map(|t| Term { coef: -t.coef, ..t }).collect())
        } else {
            self.eat('+');
            self.power()
        }
    }

    fn power(&mut self) -> Result<Sum> {
        let base = self.atom()?;
        if !self.eat('^') {
            return Ok(base);
        }
        let neg = self.eat('-');
        let mut exponent = self.atom()?;
        if neg {
            exponent = exponent.into_iter().map(|t| Term { coef: -t.coef, ..t }).collect();
        }
        if let Some(m) = as_constant(&exponent) {
            return power(&base, m);
        }
        match (as_constant(&base), as_affine(&exponent)) {
            (Some(c), Some((a, b))) if c > 0.0 => {
                let l = c.ln();
                Ok(vec![Term {
                    coef: 1.0,
                    factors: vec![Factor::new(Primitive::Exp, a * l, b * l)],
                }])
            }
            _ => Err(Error::Expression(
                "a non-constant exponent needs a positive constant base and an affine exponent".into(),
            )),
        }
    }

    fn atom(&mut self) -> Result<Sum> {
        match self.peek().cloned() {
            Some(Tok::Num(v)) => {
                self.pos += 1;
                Ok(constant(v))
            }
            Some(Tok::Op('(')) => {
                self.pos += 1;
                let e = self.expr()?;
                self.expect(')')?;
                Ok(e)
            }
            Some(Tok::Ident(name)) => {
                self.pos += 1;
                match name.as_str() {
                    "x" => Ok(vec![Term {
                        coef: 1.0,
                        factors: vec![Factor::new(Primitive::Pow(1.0), 1.0, 0.0)],
                    }]),
                    "pi" => Ok(constant(std::f64::consts::PI)),
                    "exp" | "sin" | "cos" | "log" | "ln" | "sqrt" => {
                        self.expect('(')?;
                        let arg = self.expr()?;
                        self.expect(')')?;
                        if let Some(c) = as_constant(&arg) {
                            let v = match name.as_str() {
                                "exp" => c.exp(),
                                "sin" => c.sin(),
                                "cos" => c.cos(),
                                "sqrt" => c.sqrt(),
                                _ => c.ln(),
                            };
                            if !v.is_finite() {
                                return Err(Error::Expression(format!("{name}({c}) is not finite")));
                            }
                            return Ok(constant(v));
                        }
                        let (a, b) = as_affine(&arg).ok_or_else(|| {
                            Error::Expression(format!("argument of {name} must be affine in x"))
                        })?;
                        let primitive = match name.as_str() {
                            "exp" => Primitive::Exp,
                            "sin" => Primitive::Sin,
                            "cos" => Primitive::Cos,
                            "sqrt" => Primitive::Pow(0.5),
                            _ => Primitive::Ln,
                        };
                        Ok(vec![Term {
                            coef: 1.0,
                            factors: vec![Factor::new(primitive, a, b)],
                        }])
                    }
                    other => Err(Error::Expression(format!("unknown identifier `{other}`"))),
                }
            }
            Some(t) => Err(Error::Expression(format!("unexpected token {t:?}"))),
            None => Err(Error::Expression("unexpected end of expression".into())),
        }
    }
}

/// Parses an expression such as `x^2*exp(-x/2) + sin(3*x)` into a [`SmoothFunction`].
pub fn parse_expression(src: &str) -> Result<SmoothFunction> {
    let toks = lex(src)?;
    if toks.is_empty() {
        return Err(Error::Expression("empty expression".into()));
    }
    let mut p = Parser { toks, pos: 0 };
    let sum = p.expr()?;
    if p.pos != p.toks.len() {
        return Err(Error::Expression(format!(
            "trailing input after token {}",
            p.pos
        )));
    }
    let terms: Vec<Term> = sum.into_iter().filter(|t| t.coef != 0.0).collect();
    SmoothFunction::composite(terms, src.trim())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() <= 1e-12 * (1.0 + b.abs())
    }

    #[test]
    fn evaluates_like_the_formula() {
        let f = parse_expression("x^2*exp(-x/2) + 3*sin(2*x + 1) - 1/(x+1)").unwrap();
        for x in [0.1f64, 0.7, 2.5] {
            let want = x * x * (-x / 2.0).exp() + 3.0 * (2.0 * x + 1.0).sin() - 1.0 / (x + 1.0);
            assert!(close(f.eval(x), want), "{x}");
        }
    }

    #[test]
    fn logit_via_logs() {
        let f = parse_expression("log(x) - log(1 - x)").unwrap();
        let x: f64 = 0.3;
        assert!(close(f.eval(x), (x / (1.0 - x)).ln()));
        // d/dx logit = 1/(x(1 − x))
        assert!(close(f.derivative(1, x).unwrap(), 1.0 / (x * (1.0 - x))));
    }

    #[test]
    fn merges_common_factors() {
        let f = parse_expression("x*x*exp(x)*exp(x)").unwrap();
        let x: f64 = 0.4;
        assert!(close(f.eval(x), x * x * (2.0 * x).exp()));
        assert!(close(f.derivative(1, x).unwrap(), (2.0 * x + 2.0 * x * x) * (2.0 * x).exp()));
    }

    #[test]
    fn powers_of_sums_expand() {
        let f = parse_expression("(x + 1)^2 + (x^2 + 1)^2").unwrap();
        assert!(close(f.eval(2.0), 9.0 + 25.0));
    }

    #[test]
    fn rejections() {
        for bad in ["sin(x^2)", "x*sin(x)*cos(x)", "exp(x", "y", "x $ 2", "", "1/(sin(x)+x^2)", "x^x"] {
            assert!(parse_expression(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn constant_bases_and_folding() {
        let f = parse_expression("2^-x").unwrap();
        let g = parse_expression("exp(-x*log(2))").unwrap();
        let h = parse_expression("0.5^(x + 1) * sqrt(4)").unwrap();
        for x in [0.0f64, 1.0, 3.5] {
            assert!(close(f.eval(x), 0.5f64.powf(x)));
            assert!(close(g.eval(x), 0.5f64.powf(x)));
            assert!(close(h.eval(x), 2.0 * 0.5f64.powf(x + 1.0)));
        }
        assert!(close(f.derivative(1, 1.0).unwrap(), -(2.0f64.ln()) * 0.5));
        for bad in ["(-2)^x", "x^(x + 1)", "log(-1)", "2^sin(x)"] {
            assert!(parse_expression(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn numbers_and_constants() {
        let f = parse_expression("1.5e-1*x + pi").unwrap();
        assert!(close(f.eval(2.0), 0.3 + std::f64::consts::PI));
        let g = parse_expression("exp(x/2)").unwrap();
        assert!(close(g.derivative(2, 1.0).unwrap(), 0.25 * 0.5f64.exp()));
    }
}
