use super::family::{pow, DiophantineError, DiophantineFamily, Term};
use num_bigint::BigUint;
use rayon::prelude::*;
use serde::{Serialize, Serializer};
use std::fmt;

#[derive(Clone, Debug)]
enum Op {
    Const(BigUint),
    Var(usize),
    Add,
    Mul,
    Pow,
}

/// Postfix program for one side of the equation.
#[derive(Clone, Debug)]
struct Compiled(Vec<Op>);

impl Compiled {
    fn new(t: &Term) -> Self {
        fn emit(t: &Term, out: &mut Vec<Op>) {
            match t {
                Term::Const(c) => out.push(Op::Const(c.clone())),
                Term::Var(i) => out.push(Op::Var(*i)),
                Term::Add(a, b) | Term::Mul(a, b) | Term::Pow(a, b) => {
                    emit(a, out);
                    emit(b, out);
                    out.push(match t {
                        Term::Add(..) => Op::Add,
                        Term::Mul(..) => Op::Mul,
                        _ => Op::Pow,
                    });
                }
            }
        }
        let mut ops = Vec::new();
        emit(t, &mut ops);
        Compiled(ops)
    }

    fn run(&self, env: &[BigUint], stack: &mut Vec<BigUint>) -> Result<BigUint, DiophantineError> {
        stack.clear();
        for op in &self.0 {
            let v = match op {
                Op::Const(c) => c.clone(),
                Op::Var(i) => env[*i].clone(),
                Op::Add | Op::Mul | Op::Pow => {
                    let b = stack.pop().expect("operand");
                    let a = stack.pop().expect("operand");
                    match op {
                        Op::Add => a + b,
                        Op::Mul => a * b,
                        _ => pow(&a, &b)?,
                    }
                }
            };
            stack.push(v);
        }
        Ok(stack.pop().expect("result"))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SearchOutcome {
    pub family: String,
    pub params: Vec<u64>,
    pub bound: u64,
    /// Satisfying assignments in lexicographic order.
    pub solutions: Vec<Vec<u64>>,
    pub count: u64,
    /// Number of assignments evaluated.
    pub checked: u64,
    pub exhausted: bool,
}

/// Scans `[0, bound]^m` exhaustively.
pub fn search_solutions(family: &DiophantineFamily, params: &[u64], bound: u64) -> Result<SearchOutcome, DiophantineError> {
    let (np, m) = family.arity();
    if params.len() != np {
        return Err(DiophantineError::ParamArity { expected: np, got: params.len() });
    }
    let lhs = Compiled::new(&family.lhs);
    let rhs = Compiled::new(&family.rhs);
    let slices: Vec<(Vec<Vec<u64>>, u64)> = (0..=bound)
        .into_par_iter()
        .map(|first| {
            let mut env: Vec<BigUint> = params.iter().map(|&p| BigUint::from(p)).collect();
            env.push(BigUint::from(first));
            env.extend((1..m).map(|_| BigUint::from(0u32)));
            let mut digits = vec![0u64; m - 1];
            let mut stack = Vec::new();
            let mut found = Vec::new();
            let mut checked = 0u64;
            loop {
                checked += 1;
                if lhs.run(&env, &mut stack)? == rhs.run(&env, &mut stack)? {
                    let mut a = vec![first];
                    a.extend_from_slice(&digits);
                    found.push(a);
                }
                // Odometer over the remaining unknowns, last one fastest.
                let mut k = m - 1;
                loop {
                    if k == 0 {
                        return Ok((found, checked));
                    }
                    k -= 1;
                    if digits[k] < bound {
                        digits[k] += 1;
                        env[np + 1 + k] = BigUint::from(digits[k]);
                        break;
                    }
                    digits[k] = 0;
                    env[np + 1 + k] = BigUint::from(0u32);
                }
            }
        })
        .collect::<Result<_, DiophantineError>>()?;
    let checked = slices.iter().map(|s| s.1).sum();
    let solutions: Vec<Vec<u64>> = slices.into_iter().flat_map(|s| s.0).collect();
    Ok(SearchOutcome {
        family: family.to_string(),
        params: params.to_vec(),
        bound,
        count: solutions.len() as u64,
        solutions,
        checked,
        exhausted: true,
    })
}

/// Cartesian product of inclusive parameter ranges.
pub fn param_grid(ranges: &[(u64, u64)]) -> Vec<Vec<u64>> {
    ranges.iter().fold(vec![Vec::new()], |acc, &(lo, hi)| {
        acc.into_iter()
            .flat_map(|prefix| {
                (lo..=hi).map(move |v| {
                    let mut p = prefix.clone();
                    p.push(v);
                    p
                })
            })
            .collect()
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ProfileClass {
    ZeroSoFar,
    Growing,
    Undetermined,
}

impl fmt::Display for ProfileClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ProfileClass::ZeroSoFar => "0-so-far",
            ProfileClass::Growing => "growing",
            ProfileClass::Undetermined => "⊥",
        })
    }
}

impl Serialize for ProfileClass {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ProfileRow {
    pub params: Vec<u64>,
    pub bound: u64,
    pub count: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ParamClass {
    pub params: Vec<u64>,
    pub class: ProfileClass,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CountProfile {
    pub rows: Vec<ProfileRow>,
    pub classes: Vec<ParamClass>,
}

impl CountProfile {
    pub fn csv(&self) -> String {
        let mut out = String::from("params,bound,count\n");
        for r in &self.rows {
            let p: Vec<String> = r.params.iter().map(u64::to_string).collect();
            out.push_str(&format!("{},{},{}\n", p.join(" "), r.bound, r.count));
        }
        out
    }
}

/// Classifies counts taken along increasing bounds.
pub fn classify_counts(counts: &[u64]) -> ProfileClass {
    if counts.iter().all(|&c| c == 0) {
        ProfileClass::ZeroSoFar
    } else if counts.len() >= 2 && counts.windows(2).all(|w| w[0] < w[1]) {
        ProfileClass::Growing
    } else {
        ProfileClass::Undetermined
    }
}

pub fn count_profile(
    family: &DiophantineFamily,
    param_sets: &[Vec<u64>],
    bounds: &[u64],
) -> Result<CountProfile, DiophantineError> {
    let mut bounds = bounds.to_vec();
    bounds.sort_unstable();
    bounds.dedup();
    let mut rows = Vec::new();
    let mut classes = Vec::new();
    for params in param_sets {
        let counts = bounds
            .iter()
            .map(|&b| search_solutions(family, params, b).map(|o| o.count))
            .collect::<Result<Vec<_>, _>>()?;
        rows.extend(bounds.iter().zip(&counts).map(|(&bound, &count)| ProfileRow { params: params.clone(), bound, count }));
        classes.push(ParamClass { params: params.clone(), class: classify_counts(&counts) });
    }
    Ok(CountProfile { rows, classes })
}
