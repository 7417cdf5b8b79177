use super::interval::Interval;
use num_rational::Ratio;
use num_traits::Zero;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::fmt;
use std::str::FromStr;
use thiserror::Error;

/// Number of free variables in the one-variable class.
pub const DELTA1_ARITY: usize = 1;

pub type Rational = Ratio<i64>;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Expr {
    Rational(Rational),
    Pi,
    /// 1-based variable index, printed `x1`, `x2`, ...
    Var(usize),
    Add(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Sin(Box<Expr>),
    Exp(Box<Expr>),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ExprError {
    #[error("syntax error at offset {position}: {message}")]
    Syntax { position: usize, message: String },
    #[error("variable x{index} exceeds arity {arity}")]
    Arity { index: usize, arity: usize },
}

fn syntax(position: usize, message: impl Into<String>) -> ExprError {
    ExprError::Syntax { position, message: message.into() }
}

impl Expr {
    pub fn rational(p: i64, q: i64) -> Expr {
        Expr::Rational(Rational::new(p, q))
    }

    pub fn integer(n: i64) -> Expr {
        Expr::Rational(Rational::from_integer(n))
    }

    pub fn x1() -> Expr {
        Expr::Var(1)
    }

    #[allow(clippy::should_implement_trait)]
    pub fn add(a: Expr, b: Expr) -> Expr {
        Expr::Add(Box::new(a), Box::new(b))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn mul(a: Expr, b: Expr) -> Expr {
        Expr::Mul(Box::new(a), Box::new(b))
    }

    pub fn sin(a: Expr) -> Expr {
        Expr::Sin(Box::new(a))
    }

    pub fn exp(a: Expr) -> Expr {
        Expr::Exp(Box::new(a))
    }

    /// Highest variable index used, 0 for constants.
    pub fn arity(&self) -> usize {
        match self {
            Expr::Rational(_) | Expr::Pi => 0,
            Expr::Var(i) => *i,
            Expr::Add(a, b) | Expr::Mul(a, b) => a.arity().max(b.arity()),
            Expr::Sin(a) | Expr::Exp(a) => a.arity(),
        }
    }

    pub fn size(&self) -> usize {
        match self {
            Expr::Rational(_) | Expr::Pi | Expr::Var(_) => 1,
            Expr::Add(a, b) | Expr::Mul(a, b) => 1 + a.size() + b.size(),
            Expr::Sin(a) | Expr::Exp(a) => 1 + a.size(),
        }
    }

    /// Replaces every occurrence of `x{var}` by `g`.
    pub fn substitute(&self, var: usize, g: &Expr) -> Result<Expr, ExprError> {
        self.substitute_with_arity(var, g, DELTA1_ARITY)
    }

    pub fn substitute_with_arity(&self, var: usize, g: &Expr, arity: usize) -> Result<Expr, ExprError> {
        if var == 0 || var > arity {
            return Err(ExprError::Arity { index: var, arity });
        }
        for index in [self.arity(), g.arity()] {
            if index > arity {
                return Err(ExprError::Arity { index, arity });
            }
        }
        Ok(self.replace(var, g))
    }

    fn replace(&self, var: usize, g: &Expr) -> Expr {
        match self {
            Expr::Var(i) if *i == var => g.clone(),
            Expr::Rational(_) | Expr::Pi | Expr::Var(_) => self.clone(),
            Expr::Add(a, b) => Expr::add(a.replace(var, g), b.replace(var, g)),
            Expr::Mul(a, b) => Expr::mul(a.replace(var, g), b.replace(var, g)),
            Expr::Sin(a) => Expr::sin(a.replace(var, g)),
            Expr::Exp(a) => Expr::exp(a.replace(var, g)),
        }
    }

    /// Plain floating-point evaluation; `vars[0]` is `x1`.
    pub fn eval(&self, vars: &[f64]) -> f64 {
        match self {
            Expr::Rational(r) => *r.numer() as f64 / *r.denom() as f64,
            Expr::Pi => std::f64::consts::PI,
            Expr::Var(i) => vars[i - 1],
            Expr::Add(a, b) => a.eval(vars) + b.eval(vars),
            Expr::Mul(a, b) => {
                let (x, y) = (a.eval(vars), b.eval(vars));
                if x == 0.0 || y == 0.0 {
                    0.0
                } else {
                    x * y
                }
            }
            Expr::Sin(a) => a.eval(vars).sin(),
            Expr::Exp(a) => a.eval(vars).exp(),
        }
    }

    /// Outward-rounded enclosure over a box; `vars[0]` is `x1`.
    pub fn enclose(&self, vars: &[Interval]) -> Interval {
        match self {
            Expr::Rational(r) => rational_enclosure(r),
            Expr::Pi => Interval::pi(),
            Expr::Var(i) => vars[i - 1],
            Expr::Add(a, b) => a.enclose(vars).add(b.enclose(vars)),
            Expr::Mul(a, b) => a.enclose(vars).mul(b.enclose(vars)),
            Expr::Sin(a) => a.enclose(vars).sin(),
            Expr::Exp(a) => a.enclose(vars).exp(),
        }
    }

    /// Enclosures of the value and of `d/dx1` over `x`.
    pub fn enclose_with_derivative(&self, x: Interval) -> (Interval, Interval) {
        let zero = Interval::point(0.0);
        match self {
            Expr::Rational(r) => (rational_enclosure(r), zero),
            Expr::Pi => (Interval::pi(), zero),
            Expr::Var(1) => (x, Interval::point(1.0)),
            Expr::Var(_) => (Interval::ENTIRE, Interval::ENTIRE),
            Expr::Add(a, b) => {
                let (u, du) = a.enclose_with_derivative(x);
                let (v, dv) = b.enclose_with_derivative(x);
                (u.add(v), du.add(dv))
            }
            Expr::Mul(a, b) => {
                let (u, du) = a.enclose_with_derivative(x);
                let (v, dv) = b.enclose_with_derivative(x);
                (u.mul(v), du.mul(v).add(u.mul(dv)))
            }
            Expr::Sin(a) => {
                let (u, du) = a.enclose_with_derivative(x);
                (u.sin(), u.cos().mul(du))
            }
            Expr::Exp(a) => {
                let (u, du) = a.enclose_with_derivative(x);
                let e = u.exp();
                (e, e.mul(du))
            }
        }
    }
}

fn rational_enclosure(r: &Rational) -> Interval {
    let (p, q) = (*r.numer(), *r.denom());
    let (pf, qf) = (p as f64, q as f64);
    let representable = |n: i64, f: f64| f.abs() < 9.2e18 && f as i64 == n;
    let v = pf / qf;
    if representable(p, pf) && representable(q, qf) && (v.mul_add(qf, -pf) == 0.0) && (v == 0.0 || v.abs() >= 1e-290) {
        Interval::point(v)
    } else {
        Interval::around(v)
    }
}

fn fmt_rational(r: &Rational, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    if r.denom() == &1 {
        write!(f, "{}", r.numer())
    } else {
        write!(f, "{}/{}", r.numer(), r.denom())
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Rational(r) => fmt_rational(r, f),
            Expr::Pi => f.write_str("pi"),
            Expr::Var(i) => write!(f, "x{i}"),
            Expr::Add(a, b) => match **b {
                Expr::Add(..) => write!(f, "{a} + ({b})"),
                _ => write!(f, "{a} + {b}"),
            },
            Expr::Mul(a, b) => {
                match **a {
                    Expr::Add(..) => write!(f, "({a})")?,
                    _ => write!(f, "{a}")?,
                }
                f.write_str(" * ")?;
                match **b {
                    Expr::Add(..) | Expr::Mul(..) => write!(f, "({b})"),
                    _ => write!(f, "{b}"),
                }
            }
            Expr::Sin(a) => write!(f, "sin({a})"),
            Expr::Exp(a) => write!(f, "exp({a})"),
        }
    }
}

/// Parses an expression over `x1` only.
pub fn parse_expr(text: &str) -> Result<Expr, ExprError> {
    parse_expr_with_arity(text, DELTA1_ARITY)
}

pub fn parse_expr_with_arity(text: &str, arity: usize) -> Result<Expr, ExprError> {
    let mut p = Parser { src: text.as_bytes(), pos: 0, arity };
    let e = p.sum()?;
    p.skip_ws();
    match p.peek() {
        None => Ok(e),
        Some(b'-') => Err(syntax(p.pos, "subtraction is not an operation of the class; use `+ -1 * ...`")),
        Some(b'/') => Err(syntax(p.pos, "division is only allowed inside rational literals")),
        Some(c) => Err(syntax(p.pos, format!("unexpected `{}`", c as char))),
    }
}

impl FromStr for Expr {
    type Err = ExprError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_expr(s)
    }
}

impl Serialize for Expr {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Expr {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let text = String::deserialize(d)?;
        parse_expr(&text).map_err(serde::de::Error::custom)
    }
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    arity: usize,
}

impl Parser<'_> {
    fn skip_ws(&mut self) {
        while self.src.get(self.pos).is_some_and(u8::is_ascii_whitespace) {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn expect(&mut self, c: u8) -> Result<(), ExprError> {
        if self.peek() == Some(c) {
            self.pos += 1;
            Ok(())
        } else {
            Err(syntax(self.pos, format!("expected `{}`", c as char)))
        }
    }

    fn sum(&mut self) -> Result<Expr, ExprError> {
        let mut e = self.product()?;
        while self.peek() == Some(b'+') {
            self.pos += 1;
            e = Expr::add(e, self.product()?);
        }
        Ok(e)
    }

    fn product(&mut self) -> Result<Expr, ExprError> {
        let mut e = self.factor()?;
        while self.peek() == Some(b'*') {
            self.pos += 1;
            e = Expr::mul(e, self.factor()?);
        }
        Ok(e)
    }

    fn digits(&mut self) -> Result<i64, ExprError> {
        let start = self.pos;
        while self.src.get(self.pos).is_some_and(u8::is_ascii_digit) {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(syntax(start, "expected digits"));
        }
        std::str::from_utf8(&self.src[start..self.pos])
            .expect("ascii digits")
            .parse()
            .map_err(|_| syntax(start, "integer literal out of range"))
    }

    fn ident(&mut self) -> &str {
        let start = self.pos;
        while self.src.get(self.pos).is_some_and(u8::is_ascii_alphanumeric) {
            self.pos += 1;
        }
        std::str::from_utf8(&self.src[start..self.pos]).expect("ascii identifier")
    }

    fn number(&mut self) -> Result<Expr, ExprError> {
        let start = self.pos;
        let negative = self.src[self.pos] == b'-';
        if negative {
            self.pos += 1;
            if !self.src.get(self.pos).is_some_and(u8::is_ascii_digit) {
                return Err(syntax(start, "`-` may only prefix a rational literal"));
            }
        }
        let p = self.digits()?;
        let q = if self.src.get(self.pos) == Some(&b'/') {
            self.pos += 1;
            let q = self.digits()?;
            if q.is_zero() {
                return Err(syntax(start, "zero denominator"));
            }
            q
        } else {
            1
        };
        Ok(Expr::Rational(Rational::new(if negative { -p } else { p }, q)))
    }

    fn factor(&mut self) -> Result<Expr, ExprError> {
        let Some(c) = self.peek() else {
            return Err(syntax(self.pos, "unexpected end of input"));
        };
        match c {
            b'0'..=b'9' | b'-' => self.number(),
            b'(' => {
                self.pos += 1;
                let e = self.sum()?;
                self.expect(b')')?;
                Ok(e)
            }
            c if c.is_ascii_alphabetic() => {
                let start = self.pos;
                let name = self.ident().to_owned();
                match name.as_str() {
                    "pi" => Ok(Expr::Pi),
                    "sin" | "exp" => {
                        self.expect(b'(')?;
                        let arg = self.sum()?;
                        self.expect(b')')?;
                        Ok(if name == "sin" { Expr::sin(arg) } else { Expr::exp(arg) })
                    }
                    v if v.len() > 1 && v.starts_with('x') && v[1..].bytes().all(|b| b.is_ascii_digit()) => {
                        let index: usize = v[1..].parse().map_err(|_| syntax(start, "variable index out of range"))?;
                        if index == 0 || index > self.arity {
                            return Err(syntax(start, format!("variable {v} outside arity {}", self.arity)));
                        }
                        Ok(Expr::Var(index))
                    }
                    other => Err(syntax(start, format!("unknown identifier `{other}`"))),
                }
            }
            c => Err(syntax(self.pos, format!("unexpected `{}`", c as char))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_basic_forms() {
        assert_eq!(parse_expr("sin(pi * x1)").unwrap(), Expr::sin(Expr::mul(Expr::Pi, Expr::x1())));
        assert_eq!(parse_expr("x1 + 1/2").unwrap(), Expr::add(Expr::x1(), Expr::rational(1, 2)));
        assert_eq!(parse_expr("-3/6").unwrap(), Expr::rational(-1, 2));
    }

    #[test]
    fn rejects_operations_outside_the_class() {
        for bad in ["x1 - 1", "x1 / 2", "-x1", "cos(x1)", "x2", "x0", "1/0", "sin x1", "", "(x1", "x1 +"] {
            assert!(matches!(parse_expr(bad), Err(ExprError::Syntax { .. })), "{bad}");
        }
        let Err(ExprError::Syntax { position, .. }) = parse_expr("x1 - 1") else { panic!() };
        assert_eq!(position, 3);
    }

    #[test]
    fn printing_round_trips() {
        for src in [
            "x1 + (x1 + 1)",
            "(x1 + 1) * (2 * x1)",
            "exp(sin(x1 * x1)) + -1/3 * pi",
            "x1 * (x1 * x1)",
            "sin(exp(x1) + 1)",
        ] {
            let e = parse_expr(src).unwrap();
            assert_eq!(e.to_string(), src);
            assert_eq!(parse_expr(&e.to_string()).unwrap(), e);
        }
        assert_eq!(parse_expr("  x1+  2/4 ").unwrap().to_string(), "x1 + 1/2");
    }

    #[test]
    fn substitution() {
        let s = parse_expr("sin(x1)").unwrap();
        assert_eq!(s.substitute(1, &Expr::Pi).unwrap(), Expr::sin(Expr::Pi));
        let e = parse_expr("x1 * exp(x1) + 3").unwrap();
        assert_eq!(e.substitute(1, &Expr::x1()).unwrap(), e);
        assert!(e.substitute(2, &Expr::Pi).is_err());
        assert!(e.substitute(0, &Expr::Pi).is_err());
        assert!(e.substitute(1, &Expr::Var(2)).is_err());
    }

    #[test]
    fn derivative_of_product() {
        let e = parse_expr("x1 * sin(x1)").unwrap();
        let (_, d) = e.enclose_with_derivative(Interval::point(1.0));
        let exact = 1f64.sin() + 1f64.cos();
        assert!(d.contains(exact) && d.width() < 1e-14);
    }

    #[test]
    fn enclosure_examples() {
        let one = parse_expr("exp(0)").unwrap().enclose(&[]);
        assert!(one.contains(1.0) && one.width() <= 2.0 * f64::EPSILON);
        let pi = Expr::Pi.enclose(&[]);
        assert!(pi.lo() >= 3.14159 && pi.hi() <= 3.1416);
        let s = parse_expr("sin(pi)").unwrap().enclose(&[]);
        assert!(s.contains_zero() && s.width() <= 1e-12);
        let third = Expr::rational(1, 3).enclose(&[]);
        assert!(third.lo() < 1.0 / 3.0 + 1e-17 && third.hi() > 1.0 / 3.0 - 1e-17 && third.width() > 0.0);
    }
}
