//! The concrete prefix-free machine model.
//!
//! A machine is an 8-register counter program with read-on-demand input.
//! A run only counts as halting when `HALT` is reached after the input has
//! been consumed exactly; this makes every machine's domain prefix-free.

mod asm;
mod codec;
mod exec;
mod result;
mod sampling;
mod universal;

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

pub use codec::{decode_machine, elias_gamma, encode_body, encode_machine, DecodeError};
pub use exec::run;
pub use result::{NotInDomainReason, RunResult};
pub use sampling::{monte_carlo_run, MonteCarloReport};
pub use universal::{universal_run, UniversalCost};

/// Number of registers, `r0..r7`.
pub const REGISTERS: usize = 8;

/// Default saturation value for [`RegisterMode::Capped`].
pub const DEFAULT_CAP: u64 = 64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Reg(u8);

impl Reg {
    pub fn new(index: usize) -> Option<Reg> {
        (index < REGISTERS).then_some(Reg(index as u8))
    }

    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for Reg {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "r{}", self.0)
    }
}

/// One instruction. Jump targets are resolved instruction indices.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Instruction {
    /// `r := next input bit`
    Read(Reg),
    /// append `1` if `r > 0`, else `0`
    Write(Reg),
    Inc(Reg),
    /// saturating at zero
    Dec(Reg),
    Clr(Reg),
    Jz(Reg, usize),
    Jmp(usize),
    Halt,
    /// `r := fair coin flip`; only legal in probabilistic runs
    Coin(Reg),
}

impl Instruction {
    pub fn target(&self) -> Option<usize> {
        match *self {
            Instruction::Jz(_, t) | Instruction::Jmp(t) => Some(t),
            _ => None,
        }
    }

    pub fn mnemonic(&self) -> &'static str {
        match self {
            Instruction::Read(_) => "READ",
            Instruction::Write(_) => "WRITE",
            Instruction::Inc(_) => "INC",
            Instruction::Dec(_) => "DEC",
            Instruction::Clr(_) => "CLR",
            Instruction::Jz(..) => "JZ",
            Instruction::Jmp(_) => "JMP",
            Instruction::Halt => "HALT",
            Instruction::Coin(_) => "COIN",
        }
    }
}

/// How register values behave under `INC`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum RegisterMode {
    Unbounded,
    /// Registers saturate at `K`; the configuration space is finite, so a
    /// repeated configuration proves non-termination.
    Capped(u64),
}

impl RegisterMode {
    pub fn is_capped(self) -> bool {
        matches!(self, RegisterMode::Capped(_))
    }
}

impl Default for RegisterMode {
    fn default() -> Self {
        RegisterMode::Capped(DEFAULT_CAP)
    }
}

impl fmt::Display for RegisterMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RegisterMode::Unbounded => f.write_str("unbounded"),
            RegisterMode::Capped(k) => write!(f, "capped({k})"),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MachineError {
    #[error("line {line}: syntax error: {message}")]
    Syntax { line: usize, message: String },
    #[error("line {line}: unknown opcode `{opcode}`")]
    UnknownOpcode { line: usize, opcode: String },
    #[error("line {line}: unresolved label `{label}`")]
    UnresolvedLabel { line: usize, label: String },
    #[error("line {line}: register `{register}` out of range r0..r{}", REGISTERS - 1)]
    RegisterOutOfRange { line: usize, register: String },
    #[error("line {line}: duplicate label `{label}`")]
    DuplicateLabel { line: usize, label: String },
    #[error("machine has no HALT instruction")]
    MissingHalt,
    #[error("control falls off the end: last instruction must be HALT or JMP")]
    FallsOffEnd,
    #[error("jump target {target} outside 0..{len}")]
    TargetOutOfRange { target: usize, len: usize },
    #[error("COIN at instruction {pc} in a deterministic run")]
    CoinInDeterministicRun { pc: usize },
    #[error("COIN requires a probabilistic machine")]
    NotProbabilistic,
    #[error("{0} must be at least 1")]
    ZeroCount(&'static str),
}

/// A validated machine: targets resolve, at least one `HALT`, and the last
/// instruction is `HALT` or `JMP` so the program counter never leaves the
/// code.
///
/// Labels are presentation only; two descriptions are equal when their
/// instruction lists are.
#[derive(Clone, Debug)]
pub struct MachineDescription {
    instructions: Vec<Instruction>,
    labels: BTreeMap<String, usize>,
}

impl MachineDescription {
    pub fn new(
        instructions: Vec<Instruction>,
        labels: BTreeMap<String, usize>,
    ) -> Result<Self, MachineError> {
        let len = instructions.len();
        if !instructions.contains(&Instruction::Halt) {
            return Err(MachineError::MissingHalt);
        }
        if !matches!(instructions.last(), Some(Instruction::Halt | Instruction::Jmp(_))) {
            return Err(MachineError::FallsOffEnd);
        }
        for target in instructions.iter().filter_map(Instruction::target) {
            if target >= len {
                return Err(MachineError::TargetOutOfRange { target, len });
            }
        }
        for &target in labels.values() {
            if target >= len {
                return Err(MachineError::TargetOutOfRange { target, len });
            }
        }
        Ok(Self { instructions, labels })
    }

    /// Builds an unlabelled description; printing generates `L<index>` labels.
    pub fn from_instructions(instructions: Vec<Instruction>) -> Result<Self, MachineError> {
        Self::new(instructions, BTreeMap::new())
    }

    pub fn parse(text: &str) -> Result<Self, MachineError> {
        asm::parse_machine(text)
    }

    pub fn instructions(&self) -> &[Instruction] {
        &self.instructions
    }

    pub fn labels(&self) -> &BTreeMap<String, usize> {
        &self.labels
    }

    pub fn len(&self) -> usize {
        self.instructions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.instructions.is_empty()
    }

    pub fn is_probabilistic(&self) -> bool {
        self.instructions.iter().any(|i| matches!(i, Instruction::Coin(_)))
    }

    /// Assembly text that parses back to an equal description.
    pub fn to_asm(&self) -> String {
        asm::print_machine(self)
    }
}

impl PartialEq for MachineDescription {
    fn eq(&self, other: &Self) -> bool {
        self.instructions == other.instructions
    }
}

impl Eq for MachineDescription {}

impl fmt::Display for MachineDescription {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_asm())
    }
}

/// Parses assembly source into a validated machine.
pub fn parse_machine(text: &str) -> Result<MachineDescription, MachineError> {
    asm::parse_machine(text)
}
