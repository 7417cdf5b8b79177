use crate::delta1::{parse_expr, Expr, ExprError, Interval};
use serde::{Serialize, Serializer};
use std::fmt;
use std::str::FromStr;
use thiserror::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Builtin {
    /// `f ≡ 1`
    One,
    /// `f(y) = 1 / (y² + 1)`
    Cauchy,
    /// `f(y) = exp(y²)`
    GaussSq,
}

impl Builtin {
    pub const ALL: [Builtin; 3] = [Builtin::One, Builtin::Cauchy, Builtin::GaussSq];

    pub fn name(self) -> &'static str {
        match self {
            Builtin::One => "one",
            Builtin::Cauchy => "cauchy",
            Builtin::GaussSq => "gauss_sq",
        }
    }

    pub fn from_name(name: &str) -> Option<Builtin> {
        Self::ALL.into_iter().find(|b| b.name() == name)
    }

    fn value(self, y: f64) -> f64 {
        match self {
            Builtin::One => 1.0,
            Builtin::Cauchy => 1.0 / (y * y + 1.0),
            Builtin::GaussSq => (y * y).exp(),
        }
    }

    fn enclose(self, y: Interval) -> Interval {
        match self {
            Builtin::One => Interval::point(1.0),
            Builtin::Cauchy => y.sqr().add(Interval::point(1.0)).recip(),
            Builtin::GaussSq => y.sqr().exp(),
        }
    }
}

/// Boundary data `f` for either kernel.
#[derive(Clone, Debug, PartialEq)]
pub enum BoundaryFunction {
    Delta1(Expr),
    /// `f = H⁻²`
    Reciprocal2(Expr),
    /// `f = (y² + 1)⁻¹ H⁻²`
    CauchyReciprocal2(Expr),
    Builtin(Builtin),
    /// `Σ cᵢ fᵢ`
    Linear(Vec<(f64, BoundaryFunction)>),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BoundaryError {
    #[error(transparent)]
    Expr(#[from] ExprError),
    #[error("malformed boundary function `{0}`")]
    Malformed(String),
}

impl BoundaryFunction {
    pub fn value(&self, y: f64) -> f64 {
        match self {
            BoundaryFunction::Delta1(e) => e.eval(&[y]),
            BoundaryFunction::Reciprocal2(h) => {
                let v = h.eval(&[y]);
                1.0 / (v * v)
            }
            BoundaryFunction::CauchyReciprocal2(h) => {
                let v = h.eval(&[y]);
                1.0 / ((y * y + 1.0) * v * v)
            }
            BoundaryFunction::Builtin(b) => b.value(y),
            BoundaryFunction::Linear(terms) => terms.iter().map(|(c, f)| c * f.value(y)).sum(),
        }
    }

    pub fn enclose(&self, y: Interval) -> Interval {
        match self {
            BoundaryFunction::Delta1(e) => e.enclose(&[y]),
            BoundaryFunction::Reciprocal2(h) => h.enclose(&[y]).sqr().recip(),
            BoundaryFunction::CauchyReciprocal2(h) => {
                h.enclose(&[y]).sqr().mul(y.sqr().add(Interval::point(1.0))).recip()
            }
            BoundaryFunction::Builtin(b) => b.enclose(y),
            BoundaryFunction::Linear(terms) => terms
                .iter()
                .fold(Interval::point(0.0), |acc, (c, f)| acc.add(Interval::point(*c).mul(f.enclose(y)))),
        }
    }

    /// Enclosure of `ln |f(y)|`.
    pub fn enclose_ln_abs(&self, y: Interval) -> Interval {
        match self {
            BoundaryFunction::Builtin(Builtin::GaussSq) => y.sqr(),
            _ => {
                let v = self.enclose(y);
                let abs = if v.lo() >= 0.0 {
                    v
                } else if v.hi() <= 0.0 {
                    v.neg()
                } else {
                    Interval::new(0.0, v.mag())
                };
                abs.ln()
            }
        }
    }
}

impl fmt::Display for BoundaryFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BoundaryFunction::Delta1(e) => write!(f, "{e}"),
            BoundaryFunction::Reciprocal2(h) => write!(f, "recip2({h})"),
            BoundaryFunction::CauchyReciprocal2(h) => write!(f, "cauchy_recip2({h})"),
            BoundaryFunction::Builtin(b) => f.write_str(b.name()),
            BoundaryFunction::Linear(terms) => {
                f.write_str("sum(")?;
                for (i, (c, g)) in terms.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{c:?} {g}")?;
                }
                f.write_str(")")
            }
        }
    }
}

fn wrapped<'a>(s: &'a str, head: &str) -> Option<&'a str> {
    s.strip_prefix(head)?.trim_start().strip_prefix('(')?.strip_suffix(')')
}

/// Splits at commas not nested in parentheses.
fn split_top_level(s: &str) -> Vec<&str> {
    let mut parts = Vec::new();
    let (mut depth, mut start) = (0i32, 0);
    for (i, c) in s.char_indices() {
        match c {
            '(' => depth += 1,
            ')' => depth -= 1,
            ',' if depth == 0 => {
                parts.push(&s[start..i]);
                start = i + 1;
            }
            _ => {}
        }
    }
    parts.push(&s[start..]);
    parts
}

impl FromStr for BoundaryFunction {
    type Err = BoundaryError;

    /// Accepts a builtin name, `recip2(H)`, `cauchy_recip2(H)`,
    /// `sum(c1 f1, c2 f2, ...)` or a plain expression.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if let Some(b) = Builtin::from_name(s) {
            return Ok(BoundaryFunction::Builtin(b));
        }
        if let Some(inner) = wrapped(s, "cauchy_recip2") {
            return Ok(BoundaryFunction::CauchyReciprocal2(parse_expr(inner)?));
        }
        if let Some(inner) = wrapped(s, "recip2") {
            return Ok(BoundaryFunction::Reciprocal2(parse_expr(inner)?));
        }
        if let Some(inner) = wrapped(s, "sum") {
            let terms = split_top_level(inner)
                .into_iter()
                .map(|term| {
                    let term = term.trim();
                    let (c, g) = term.split_once(char::is_whitespace).ok_or_else(|| BoundaryError::Malformed(term.into()))?;
                    let c: f64 = c.parse().map_err(|_| BoundaryError::Malformed(term.into()))?;
                    Ok((c, g.parse()?))
                })
                .collect::<Result<Vec<_>, BoundaryError>>()?;
            return Ok(BoundaryFunction::Linear(terms));
        }
        Ok(BoundaryFunction::Delta1(parse_expr(s)?))
    }
}

impl Serialize for BoundaryFunction {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}
