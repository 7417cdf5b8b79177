use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use std::fmt;
use std::str::FromStr;
use thiserror::Error;

/// Largest exponent evaluated before giving up.
pub const MAX_EXPONENT: u64 = 1 << 16;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DiophantineError {
    #[error("syntax error at offset {position} of `{text}`: {message}")]
    Syntax { text: String, position: usize, message: String },
    #[error("malformed family: {0}")]
    Malformed(String),
    #[error("`{0}` is not declared as a parameter or unknown")]
    Undeclared(String),
    #[error("`{0}` is declared twice")]
    Duplicate(String),
    #[error("variable exponent `{0}` requires the `exponential` flag")]
    VariableExponent(String),
    #[error("expected {expected} parameter values, got {got}")]
    ParamArity { expected: usize, got: usize },
    #[error("exponent {0} exceeds the evaluation limit")]
    ExponentTooLarge(BigUint),
}

/// Term over naturals; variables index parameters first, then unknowns.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Term {
    Const(BigUint),
    Var(usize),
    Add(Box<Term>, Box<Term>),
    Mul(Box<Term>, Box<Term>),
    Pow(Box<Term>, Box<Term>),
}

impl Term {
    fn has_var(&self) -> bool {
        match self {
            Term::Const(_) => false,
            Term::Var(_) => true,
            Term::Add(a, b) | Term::Mul(a, b) | Term::Pow(a, b) => a.has_var() || b.has_var(),
        }
    }

    fn is_atom(&self) -> bool {
        matches!(self, Term::Const(_) | Term::Var(_))
    }

    /// Direct recursive evaluation.
    pub fn eval(&self, env: &[BigUint]) -> Result<BigUint, DiophantineError> {
        Ok(match self {
            Term::Const(c) => c.clone(),
            Term::Var(i) => env[*i].clone(),
            Term::Add(a, b) => a.eval(env)? + b.eval(env)?,
            Term::Mul(a, b) => a.eval(env)? * b.eval(env)?,
            Term::Pow(a, b) => pow(&a.eval(env)?, &b.eval(env)?)?,
        })
    }
}

pub(crate) fn pow(base: &BigUint, exp: &BigUint) -> Result<BigUint, DiophantineError> {
    if exp.is_zero() {
        return Ok(BigUint::one());
    }
    if base.is_zero() || base.is_one() {
        return Ok(base.clone());
    }
    match exp.to_u64() {
        Some(e) if e <= MAX_EXPONENT => Ok(base.pow(e as u32)),
        _ => Err(DiophantineError::ExponentTooLarge(exp.clone())),
    }
}

/// `lhs = rhs` over parameters and unknowns ranging over the naturals.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DiophantineFamily {
    pub lhs: Term,
    pub rhs: Term,
    pub params: Vec<String>,
    pub unknowns: Vec<String>,
    pub exponential: bool,
}

impl DiophantineFamily {
    pub fn parse(text: &str) -> Result<Self, DiophantineError> {
        let mut segments = text.split(';');
        let equation = segments.next().unwrap_or_default();
        let mut params = Vec::new();
        let mut unknowns = None;
        let mut exponential = false;
        for clause in segments.map(str::trim).filter(|c| !c.is_empty()) {
            if clause == "exponential" {
                exponential = true;
            } else if let Some(rest) = clause.strip_prefix("params:") {
                params = names(rest)?;
            } else if let Some(rest) = clause.strip_prefix("unknowns:") {
                unknowns = Some(names(rest)?);
            } else {
                return Err(DiophantineError::Malformed(format!("unknown clause `{clause}`")));
            }
        }
        let unknowns = unknowns.filter(|u| !u.is_empty()).ok_or_else(|| DiophantineError::Malformed("no unknowns declared".into()))?;
        let all: Vec<String> = params.iter().chain(&unknowns).cloned().collect();
        for (i, n) in all.iter().enumerate() {
            if all[..i].contains(n) {
                return Err(DiophantineError::Duplicate(n.clone()));
            }
        }
        let (l, r) = equation
            .split_once('=')
            .ok_or_else(|| DiophantineError::Malformed("expected `lhs = rhs`".into()))?;
        let lhs = TermParser::new(l, &all, exponential).parse()?;
        let rhs = TermParser::new(r, &all, exponential).parse()?;
        Ok(Self { lhs, rhs, params, unknowns, exponential })
    }

    pub fn arity(&self) -> (usize, usize) {
        (self.params.len(), self.unknowns.len())
    }

    fn env(&self, params: &[u64], unknowns: &[u64]) -> Result<Vec<BigUint>, DiophantineError> {
        if params.len() != self.params.len() {
            return Err(DiophantineError::ParamArity { expected: self.params.len(), got: params.len() });
        }
        if unknowns.len() != self.unknowns.len() {
            return Err(DiophantineError::Malformed(format!(
                "expected {} unknown values, got {}",
                self.unknowns.len(),
                unknowns.len()
            )));
        }
        Ok(params.iter().chain(unknowns).map(|&v| BigUint::from(v)).collect())
    }

    /// Whether `lhs = rhs` holds at the given point, by tree evaluation.
    pub fn holds(&self, params: &[u64], unknowns: &[u64]) -> Result<bool, DiophantineError> {
        let env = self.env(params, unknowns)?;
        Ok(self.lhs.eval(&env)? == self.rhs.eval(&env)?)
    }

    /// Serializes, re-parses and re-evaluates.
    pub fn verify_witness(&self, params: &[u64], unknowns: &[u64]) -> Result<bool, DiophantineError> {
        let reparsed: DiophantineFamily = self.to_string().parse()?;
        if reparsed != *self {
            return Ok(false);
        }
        reparsed.holds(params, unknowns)
    }
}

impl FromStr for DiophantineFamily {
    type Err = DiophantineError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::parse(s)
    }
}

fn names(list: &str) -> Result<Vec<String>, DiophantineError> {
    list.split(|c: char| c == ',' || c.is_whitespace())
        .filter(|n| !n.is_empty())
        .map(|n| {
            let ok = n.starts_with(|c: char| c.is_ascii_lowercase())
                && n.chars().all(|c| c.is_ascii_lowercase() || c.is_ascii_digit() || c == '_');
            if ok {
                Ok(n.to_owned())
            } else {
                Err(DiophantineError::Malformed(format!("bad name `{n}`")))
            }
        })
        .collect()
}

struct TermParser<'a> {
    text: &'a str,
    src: &'a [u8],
    pos: usize,
    names: &'a [String],
    exponential: bool,
}

impl<'a> TermParser<'a> {
    fn new(text: &'a str, names: &'a [String], exponential: bool) -> Self {
        Self { text, src: text.as_bytes(), pos: 0, names, exponential }
    }

    fn error(&self, message: impl Into<String>) -> DiophantineError {
        DiophantineError::Syntax { text: self.text.trim().into(), position: self.pos, message: message.into() }
    }

    fn peek(&mut self) -> Option<u8> {
        while self.src.get(self.pos).is_some_and(u8::is_ascii_whitespace) {
            self.pos += 1;
        }
        self.src.get(self.pos).copied()
    }

    fn parse(mut self) -> Result<Term, DiophantineError> {
        let t = self.sum()?;
        match self.peek() {
            None => Ok(t),
            Some(c) => Err(self.error(format!("unexpected `{}`", c as char))),
        }
    }

    fn sum(&mut self) -> Result<Term, DiophantineError> {
        let mut t = self.product()?;
        while self.peek() == Some(b'+') {
            self.pos += 1;
            t = Term::Add(Box::new(t), Box::new(self.product()?));
        }
        Ok(t)
    }

    fn product(&mut self) -> Result<Term, DiophantineError> {
        let mut t = self.power()?;
        while self.peek() == Some(b'*') {
            self.pos += 1;
            t = Term::Mul(Box::new(t), Box::new(self.power()?));
        }
        Ok(t)
    }

    fn power(&mut self) -> Result<Term, DiophantineError> {
        let base = self.atom()?;
        if self.peek() != Some(b'^') {
            return Ok(base);
        }
        self.pos += 1;
        let start = self.pos;
        let exponent = self.power()?;
        if exponent.has_var() && !self.exponential {
            return Err(DiophantineError::VariableExponent(self.text[start..self.pos].trim().into()));
        }
        Ok(Term::Pow(Box::new(base), Box::new(exponent)))
    }

    fn atom(&mut self) -> Result<Term, DiophantineError> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let t = self.sum()?;
                if self.peek() != Some(b')') {
                    return Err(self.error("expected `)`"));
                }
                self.pos += 1;
                Ok(t)
            }
            Some(c) if c.is_ascii_digit() => {
                let start = self.pos;
                while self.src.get(self.pos).is_some_and(u8::is_ascii_digit) {
                    self.pos += 1;
                }
                Ok(Term::Const(self.text[start..self.pos].parse().expect("digits")))
            }
            Some(c) if c.is_ascii_lowercase() => {
                let start = self.pos;
                while self.src.get(self.pos).is_some_and(|c| c.is_ascii_alphanumeric() || *c == b'_') {
                    self.pos += 1;
                }
                let name = &self.text[start..self.pos];
                self.names
                    .iter()
                    .position(|n| n == name)
                    .map(Term::Var)
                    .ok_or_else(|| DiophantineError::Undeclared(name.into()))
            }
            Some(b'-') => Err(self.error("subtraction is not allowed; move terms to the other side")),
            Some(c) => Err(self.error(format!("unexpected `{}`", c as char))),
            None => Err(self.error("unexpected end of term")),
        }
    }
}

struct Show<'a>(&'a Term, &'a [String]);

impl<'a> fmt::Display for Show<'a> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names = self.1;
        let sub = |t: &'a Term| Show(t, names);
        match self.0 {
            Term::Const(c) => write!(f, "{c}"),
            Term::Var(i) => f.write_str(&names[*i]),
            Term::Add(a, b) => match **b {
                Term::Add(..) => write!(f, "{} + ({})", sub(a), sub(b)),
                _ => write!(f, "{} + {}", sub(a), sub(b)),
            },
            Term::Mul(a, b) => {
                match **a {
                    Term::Add(..) => write!(f, "({})", sub(a))?,
                    _ => write!(f, "{}", sub(a))?,
                }
                f.write_str(" * ")?;
                match **b {
                    Term::Add(..) | Term::Mul(..) => write!(f, "({})", sub(b)),
                    _ => write!(f, "{}", sub(b)),
                }
            }
            Term::Pow(a, b) => {
                if a.is_atom() {
                    write!(f, "{}", sub(a))?;
                } else {
                    write!(f, "({})", sub(a))?;
                }
                if b.is_atom() {
                    write!(f, "^{}", sub(b))
                } else {
                    write!(f, "^({})", sub(b))
                }
            }
        }
    }
}

impl fmt::Display for DiophantineFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<String> = self.params.iter().chain(&self.unknowns).cloned().collect();
        write!(f, "{} = {}", Show(&self.lhs, &names), Show(&self.rhs, &names))?;
        if !self.params.is_empty() {
            write!(f, "; params: {}", self.params.join(", "))?;
        }
        write!(f, "; unknowns: {}", self.unknowns.join(", "))?;
        if self.exponential {
            f.write_str("; exponential")?;
        }
        Ok(())
    }
}
