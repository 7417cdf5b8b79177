use rand::{Rng, RngCore};

use super::{
    Instruction, MachineDescription, MachineError, NotInDomainReason, RegisterMode, RunResult,
    REGISTERS,
};
use crate::bits::BitString;

#[derive(Clone, Copy, PartialEq, Eq)]
struct Config {
    pc: usize,
    pos: usize,
    regs: [u64; REGISTERS],
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Stop {
    Halted,
    InputExhausted,
    OutOfSteps,
    Loop { period: u64 },
    Coin { pc: usize },
}

pub(crate) struct Trace {
    pub stop: Stop,
    /// Instructions executed, including `HALT` or the failing `READ`.
    pub executed: u64,
    /// Input bits read.
    pub consumed: usize,
    pub output: Vec<bool>,
}

/// Runs `code` for at most `max_steps` instructions.
///
/// With `rng = None` a `COIN` stops the run. In capped mode without an rng
/// the run watches for a repeated configuration (Brent's cycle finding):
/// output never feeds back into control, so `(pc, input position, registers)`
/// determines the future.
pub(crate) fn execute(
    code: &[Instruction],
    input: &[bool],
    max_steps: u64,
    mode: RegisterMode,
    mut rng: Option<&mut dyn RngCore>,
) -> Trace {
    let cap = match mode {
        RegisterMode::Unbounded => u64::MAX,
        RegisterMode::Capped(k) => k,
    };
    let detect_loops = mode.is_capped() && rng.is_none();
    let mut cfg = Config { pc: 0, pos: 0, regs: [0; REGISTERS] };
    let mut output = Vec::new();
    let mut executed = 0u64;
    let mut saved = cfg;
    let mut power = 1u64;
    let mut lambda = 0u64;

    let stop = loop {
        if executed >= max_steps {
            break Stop::OutOfSteps;
        }
        let ins = code[cfg.pc];
        executed += 1;
        let mut next = cfg.pc + 1;
        match ins {
            Instruction::Read(r) => match input.get(cfg.pos) {
                Some(&bit) => {
                    cfg.regs[r.index()] = bit as u64;
                    cfg.pos += 1;
                }
                None => break Stop::InputExhausted,
            },
            Instruction::Write(r) => output.push(cfg.regs[r.index()] > 0),
            Instruction::Inc(r) => {
                let v = &mut cfg.regs[r.index()];
                *v = v.saturating_add(1).min(cap);
            }
            Instruction::Dec(r) => {
                let v = &mut cfg.regs[r.index()];
                *v = v.saturating_sub(1);
            }
            Instruction::Clr(r) => cfg.regs[r.index()] = 0,
            Instruction::Jz(r, t) => {
                if cfg.regs[r.index()] == 0 {
                    next = t;
                }
            }
            Instruction::Jmp(t) => next = t,
            Instruction::Halt => break Stop::Halted,
            Instruction::Coin(r) => match rng.as_deref_mut() {
                Some(rng) => cfg.regs[r.index()] = rng.random::<bool>() as u64,
                None => break Stop::Coin { pc: cfg.pc },
            },
        }
        cfg.pc = next;

        if detect_loops {
            lambda += 1;
            if cfg == saved {
                break Stop::Loop { period: lambda };
            }
            if lambda == power {
                saved = cfg;
                power *= 2;
                lambda = 0;
            }
        }
    };

    Trace { stop, executed, consumed: cfg.pos, output }
}

/// Runs a deterministic machine on `input` with a step budget.
///
/// Halts in the domain only when `HALT` is reached with every input bit read.
pub fn run(
    d: &MachineDescription,
    input: &BitString,
    budget: u64,
    mode: RegisterMode,
) -> Result<RunResult, MachineError> {
    if budget == 0 {
        return Err(MachineError::ZeroCount("budget"));
    }
    let trace = execute(d.instructions(), input.bits(), budget, mode, None);
    Ok(match trace.stop {
        Stop::Halted if trace.consumed == input.len() => RunResult::Halted {
            output: BitString::from_bits(trace.output),
            steps: trace.executed,
            consumed: trace.consumed as u64,
        },
        Stop::Halted => RunResult::NotInDomain {
            reason: NotInDomainReason::UnconsumedInput,
            steps: trace.executed,
        },
        Stop::InputExhausted => RunResult::NotInDomain {
            reason: NotInDomainReason::InputExhausted,
            steps: trace.executed,
        },
        Stop::OutOfSteps => RunResult::BudgetExceeded { steps: trace.executed },
        Stop::Loop { period } => RunResult::LoopProved { period },
        Stop::Coin { pc } => return Err(MachineError::CoinInDeterministicRun { pc }),
    })
}
