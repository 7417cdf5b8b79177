//! Prefix-free universal register machine and the experiments built on it:
//! exhaustive program enumeration (halting-probability bounds, complexity
//! upper bounds, busy-beaver tables), minimal-time prediction, and the
//! time/energy bound for physical computation.

pub mod bits;
pub mod enumeration;
pub mod limits;
pub mod machine;
pub mod predictor;

pub use bits::{BitString, Program};
pub use machine::{
    decode_machine, encode_machine, monte_carlo_run, parse_machine, run, universal_run,
    Instruction, MachineDescription, MachineError, RegisterMode, RunResult,
};
