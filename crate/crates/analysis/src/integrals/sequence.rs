use super::{classify, kernel, Classification, IntegralError, Kernel, Point};
use crate::delta1::Expr;
use serde::{Serialize, Serializer};
use std::fmt;

/// Which integral each family member feeds.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "kernel", rename_all = "kebab-case")]
pub enum Problem {
    Heat { x0: f64, t0: f64 },
    Electro { x0: f64, y0: f64 },
}

impl Problem {
    pub fn new(kernel_name: &str, x0: f64, param: f64) -> Result<Problem, IntegralError> {
        match kernel_name {
            "heat" => Ok(Problem::Heat { x0, t0: param }),
            "electro" => Ok(Problem::Electro { x0, y0: param }),
            other => Err(IntegralError::UnknownKernel(other.into())),
        }
    }

    pub fn kernel(&self) -> &'static dyn Kernel {
        let name = match self {
            Problem::Heat { .. } => "heat",
            Problem::Electro { .. } => "electro",
        };
        kernel(name).expect("registered kernel")
    }

    pub fn point(&self) -> Point {
        match *self {
            Problem::Heat { x0, t0 } => Point::new(x0, t0),
            Problem::Electro { x0, y0 } => Point::new(x0, y0),
        }
    }
}

/// `0` finite, `1` divergent, `⊥` undetermined within budget.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SequenceBit {
    Zero,
    One,
    Undetermined,
}

impl fmt::Display for SequenceBit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SequenceBit::Zero => "0",
            SequenceBit::One => "1",
            SequenceBit::Undetermined => "⊥",
        })
    }
}

impl Serialize for SequenceBit {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SequenceEntry {
    pub index: usize,
    pub h: Expr,
    pub bit: SequenceBit,
    pub classification: Classification,
}

pub fn verdict_sequence(family: &[Expr], problem: Problem, budget: u32) -> Result<Vec<SequenceEntry>, IntegralError> {
    let k = problem.kernel();
    family
        .iter()
        .enumerate()
        .map(|(index, h)| {
            let classification = classify(k, &k.family_member(h.clone()), problem.point(), budget)?;
            let bit = match classification {
                Classification::Finite { .. } => SequenceBit::Zero,
                Classification::Divergent { .. } => SequenceBit::One,
                Classification::Unknown { .. } => SequenceBit::Undetermined,
            };
            Ok(SequenceEntry { index, h: h.clone(), bit, classification })
        })
        .collect()
}

/// Rows `i,verdict`.
pub fn sequence_csv(entries: &[SequenceEntry]) -> String {
    let mut out = String::from("i,verdict\n");
    for e in entries {
        out.push_str(&format!("{},{}\n", e.index, e.bit));
    }
    out
}
