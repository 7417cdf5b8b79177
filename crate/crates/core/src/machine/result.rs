use serde::{Deserialize, Serialize};

use crate::bits::BitString;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NotInDomainReason {
    /// A `READ` was executed after the last input bit.
    InputExhausted,
    /// `HALT` was reached with input bits left over.
    UnconsumedInput,
    /// The universal machine could not decode a valid deterministic machine
    /// from the head of its input.
    MalformedDescription,
}

/// Outcome of a bounded execution.
///
/// `steps` counts executed instructions, `HALT` included. For the universal
/// machine it counts its own steps, decoding included.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(into = "RunResultRecord", try_from = "RunResultRecord")]
pub enum RunResult {
    Halted { output: BitString, steps: u64, consumed: u64 },
    NotInDomain { reason: NotInDomainReason, steps: u64 },
    BudgetExceeded { steps: u64 },
    LoopProved { period: u64 },
}

impl RunResult {
    pub fn is_halted(&self) -> bool {
        matches!(self, RunResult::Halted { .. })
    }

    pub fn output(&self) -> Option<&BitString> {
        match self {
            RunResult::Halted { output, .. } => Some(output),
            _ => None,
        }
    }

    pub fn halted_steps(&self) -> Option<u64> {
        match self {
            RunResult::Halted { steps, .. } => Some(*steps),
            _ => None,
        }
    }

    pub fn variant_name(&self) -> &'static str {
        match self {
            RunResult::Halted { .. } => "halted",
            RunResult::NotInDomain { .. } => "not-in-domain",
            RunResult::BudgetExceeded { .. } => "budget-exceeded",
            RunResult::LoopProved { .. } => "loop-proved",
        }
    }
}

/// Flat wire form: `{variant, output, steps, consumed, reason, period}` with
/// absent fields as `null`.
#[derive(Serialize, Deserialize)]
struct RunResultRecord {
    variant: String,
    output: Option<BitString>,
    steps: Option<u64>,
    consumed: Option<u64>,
    reason: Option<NotInDomainReason>,
    period: Option<u64>,
}

impl From<RunResult> for RunResultRecord {
    fn from(r: RunResult) -> Self {
        let variant = r.variant_name().to_string();
        let mut rec = RunResultRecord {
            variant,
            output: None,
            steps: None,
            consumed: None,
            reason: None,
            period: None,
        };
        match r {
            RunResult::Halted { output, steps, consumed } => {
                rec.output = Some(output);
                rec.steps = Some(steps);
                rec.consumed = Some(consumed);
            }
            RunResult::NotInDomain { reason, steps } => {
                rec.reason = Some(reason);
                rec.steps = Some(steps);
            }
            RunResult::BudgetExceeded { steps } => rec.steps = Some(steps),
            RunResult::LoopProved { period } => rec.period = Some(period),
        }
        rec
    }
}

impl TryFrom<RunResultRecord> for RunResult {
    type Error = String;

    fn try_from(rec: RunResultRecord) -> Result<Self, Self::Error> {
        let need = |v: Option<u64>, field: &str| v.ok_or_else(|| format!("missing `{field}`"));
        match rec.variant.as_str() {
            "halted" => Ok(RunResult::Halted {
                output: rec.output.ok_or("missing `output`")?,
                steps: need(rec.steps, "steps")?,
                consumed: need(rec.consumed, "consumed")?,
            }),
            "not-in-domain" => Ok(RunResult::NotInDomain {
                reason: rec.reason.ok_or("missing `reason`")?,
                steps: need(rec.steps, "steps")?,
            }),
            "budget-exceeded" => Ok(RunResult::BudgetExceeded { steps: need(rec.steps, "steps")? }),
            "loop-proved" => Ok(RunResult::LoopProved { period: need(rec.period, "period")? }),
            other => Err(format!("unknown variant `{other}`")),
        }
    }
}
