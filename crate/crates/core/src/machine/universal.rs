use super::codec::{decode_machine, DecodeError};
use super::exec::{execute, Stop};
use super::{MachineError, NotInDomainReason, RegisterMode, RunResult};
use crate::bits::BitString;

/// Step accounting of the universal machine `U`.
///
/// `U` reads the description bit by bit, checks it once per instruction,
/// then interprets it. Every simulated instruction costs a dispatch step and
/// an execute step, so `T_U(encode(d)·x) = |encode(d)| + |d| + 2·T_d(x)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct UniversalCost;

impl UniversalCost {
    pub const PER_DESCRIPTION_BIT: u64 = 1;
    pub const PER_INSTRUCTION_CHECK: u64 = 1;
    pub const PER_SIMULATED_STEP: u64 = 2;

    /// Predicted `T_U` for a description of `code_len` bits and `instructions`
    /// instructions that halts after `simulated_steps`.
    pub fn predicted(code_len: usize, instructions: usize, simulated_steps: u64) -> u64 {
        code_len as u64 * Self::PER_DESCRIPTION_BIT
            + instructions as u64 * Self::PER_INSTRUCTION_CHECK
            + simulated_steps * Self::PER_SIMULATED_STEP
    }
}

fn not_in_domain(reason: NotInDomainReason, steps: u64, budget: u64) -> RunResult {
    if steps > budget {
        RunResult::BudgetExceeded { steps: budget }
    } else {
        RunResult::NotInDomain { reason, steps }
    }
}

/// Runs the universal machine on `p`: decode a description from the head of
/// `p`, then interpret it with the rest of `p` as its input.
///
/// Bits are read on demand and the run is in the domain only if every bit of
/// `p` was read, so `U`'s domain is prefix-free. Descriptions containing
/// `COIN` are rejected as malformed.
pub fn universal_run(p: &BitString, budget: u64, mode: RegisterMode) -> Result<RunResult, MachineError> {
    if budget == 0 {
        return Err(MachineError::ZeroCount("budget"));
    }
    let (d, used) = match decode_machine(p.bits()) {
        Ok(ok) => ok,
        Err(DecodeError::Truncated { read }) => {
            return Ok(not_in_domain(NotInDomainReason::InputExhausted, read as u64, budget))
        }
        Err(DecodeError::Malformed { read }) => {
            return Ok(not_in_domain(NotInDomainReason::MalformedDescription, read as u64, budget))
        }
    };
    let prefix = UniversalCost::predicted(used, d.len(), 0);
    if prefix > budget {
        return Ok(RunResult::BudgetExceeded { steps: budget });
    }
    if d.is_probabilistic() {
        return Ok(RunResult::NotInDomain { reason: NotInDomainReason::MalformedDescription, steps: prefix });
    }

    let input = &p.bits()[used..];
    let max_sim = (budget - prefix) / UniversalCost::PER_SIMULATED_STEP;
    let trace = execute(d.instructions(), input, max_sim, mode, None);
    let steps = prefix + trace.executed * UniversalCost::PER_SIMULATED_STEP;
    Ok(match trace.stop {
        Stop::Halted if trace.consumed == input.len() => RunResult::Halted {
            output: BitString::from_bits(trace.output),
            steps,
            consumed: (used + trace.consumed) as u64,
        },
        Stop::Halted => RunResult::NotInDomain { reason: NotInDomainReason::UnconsumedInput, steps },
        Stop::InputExhausted => RunResult::NotInDomain { reason: NotInDomainReason::InputExhausted, steps },
        Stop::OutOfSteps => RunResult::BudgetExceeded { steps },
        Stop::Loop { period } => RunResult::LoopProved { period: period * UniversalCost::PER_SIMULATED_STEP },
        Stop::Coin { .. } => unreachable!("probabilistic descriptions are rejected before simulation"),
    })
}
