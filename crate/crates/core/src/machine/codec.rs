//! Canonical self-delimiting bit encoding of machine descriptions.
//!
//! `encode(d) = gamma(|b|) · b` where `b` is the body and `gamma` the
//! Elias-gamma code. The body is a sequence of prefix-coded instructions:
//!
//! | opcode | code      | operands         |
//! |--------|-----------|------------------|
//! | HALT   | `0`       |                  |
//! | WRITE  | `10`      | reg              |
//! | INC    | `110`     | reg              |
//! | READ   | `1110`    | reg              |
//! | JZ     | `111100`  | reg, target      |
//! | DEC    | `111101`  | reg              |
//! | JMP    | `111110`  | target           |
//! | CLR    | `1111110` | reg              |
//! | COIN   | `1111111` | reg              |
//!
//! Registers are written as `gamma(r + 1)` and targets as `gamma(t + 1)`.

use thiserror::Error;

use super::{Instruction, MachineDescription, Reg, REGISTERS};
use crate::bits::BitString;

/// Longest accepted run of leading zeros in a gamma code.
const MAX_GAMMA_ZEROS: usize = 40;

#[derive(Debug, Error, Clone, Copy, PartialEq, Eq)]
pub enum DecodeError {
    /// The stream ended before a complete description; `read` bits were used.
    #[error("bit stream ended after {read} bits")]
    Truncated { read: usize },
    /// The bits read so far cannot start any valid description.
    #[error("malformed description after {read} bits")]
    Malformed { read: usize },
}

/// Elias-gamma code of `n ≥ 1`: `⌊log2 n⌋` zeros followed by `n` in binary.
pub fn elias_gamma(n: u64) -> BitString {
    assert!(n >= 1, "Elias-gamma is defined for n >= 1");
    let width = 64 - n.leading_zeros() as usize;
    let mut out = BitString::from_bits(vec![false; width - 1]);
    out.extend_from(&BitString::from_u64(n, width));
    out
}

fn push_code(out: &mut BitString, code: &str) {
    for c in code.chars() {
        out.push(c == '1');
    }
}

fn push_reg(out: &mut BitString, r: Reg) {
    out.extend_from(&elias_gamma(r.index() as u64 + 1));
}

fn push_target(out: &mut BitString, t: usize) {
    out.extend_from(&elias_gamma(t as u64 + 1));
}

/// The instruction body `b` without its length header.
pub fn encode_body(d: &MachineDescription) -> BitString {
    let mut out = BitString::new();
    for ins in d.instructions() {
        match *ins {
            Instruction::Halt => push_code(&mut out, "0"),
            Instruction::Write(r) => {
                push_code(&mut out, "10");
                push_reg(&mut out, r);
            }
            Instruction::Inc(r) => {
                push_code(&mut out, "110");
                push_reg(&mut out, r);
            }
            Instruction::Read(r) => {
                push_code(&mut out, "1110");
                push_reg(&mut out, r);
            }
            Instruction::Jz(r, t) => {
                push_code(&mut out, "111100");
                push_reg(&mut out, r);
                push_target(&mut out, t);
            }
            Instruction::Dec(r) => {
                push_code(&mut out, "111101");
                push_reg(&mut out, r);
            }
            Instruction::Jmp(t) => {
                push_code(&mut out, "111110");
                push_target(&mut out, t);
            }
            Instruction::Clr(r) => {
                push_code(&mut out, "1111110");
                push_reg(&mut out, r);
            }
            Instruction::Coin(r) => {
                push_code(&mut out, "1111111");
                push_reg(&mut out, r);
            }
        }
    }
    out
}

/// Self-delimiting encoding `gamma(|b|) · b`.
pub fn encode_machine(d: &MachineDescription) -> BitString {
    let body = encode_body(d);
    let mut out = elias_gamma(body.len() as u64);
    out.extend_from(&body);
    out
}

struct Reader<'a> {
    bits: &'a [bool],
    pos: usize,
}

impl Reader<'_> {
    fn next(&mut self) -> Result<bool, DecodeError> {
        let bit = self.bits.get(self.pos).copied().ok_or(DecodeError::Truncated { read: self.pos })?;
        self.pos += 1;
        Ok(bit)
    }

    fn malformed(&self) -> DecodeError {
        DecodeError::Malformed { read: self.pos }
    }

    fn gamma(&mut self) -> Result<u64, DecodeError> {
        let mut zeros = 0;
        while !self.next()? {
            zeros += 1;
            if zeros > MAX_GAMMA_ZEROS {
                return Err(self.malformed());
            }
        }
        let mut n = 1u64;
        for _ in 0..zeros {
            n = (n << 1) | self.next()? as u64;
        }
        Ok(n)
    }

    fn reg(&mut self) -> Result<Reg, DecodeError> {
        let v = self.gamma()?;
        if v as usize > REGISTERS {
            return Err(self.malformed());
        }
        Ok(Reg::new(v as usize - 1).expect("checked above"))
    }

    fn target(&mut self) -> Result<usize, DecodeError> {
        Ok(self.gamma()? as usize - 1)
    }

    /// Number of leading ones (stopping at `max`), consuming the terminating zero if present.
    fn ones(&mut self, max: usize) -> Result<usize, DecodeError> {
        let mut n = 0;
        while n < max && self.next()? {
            n += 1;
        }
        Ok(n)
    }

    fn instruction(&mut self) -> Result<Instruction, DecodeError> {
        Ok(match self.ones(4)? {
            0 => Instruction::Halt,
            1 => Instruction::Write(self.reg()?),
            2 => Instruction::Inc(self.reg()?),
            3 => Instruction::Read(self.reg()?),
            _ => match (self.next()?, self.next()?) {
                (false, false) => {
                    let r = self.reg()?;
                    Instruction::Jz(r, self.target()?)
                }
                (false, true) => Instruction::Dec(self.reg()?),
                (true, false) => Instruction::Jmp(self.target()?),
                (true, true) => {
                    if self.next()? {
                        Instruction::Coin(self.reg()?)
                    } else {
                        Instruction::Clr(self.reg()?)
                    }
                }
            },
        })
    }
}

/// Decodes a description from the head of `bits`, returning it with the
/// number of bits used. Never looks past the end of the description, so a
/// valid encoding is recognised from any stream it prefixes.
pub fn decode_machine(bits: &[bool]) -> Result<(MachineDescription, usize), DecodeError> {
    let mut header = Reader { bits, pos: 0 };
    let body_len = header.gamma()? as usize;
    let start = header.pos;
    let end = start.checked_add(body_len).ok_or(header.malformed())?;
    if bits.len() < end {
        return Err(DecodeError::Truncated { read: bits.len() });
    }
    let mut body = Reader { bits: &bits[..end], pos: start };
    let mut instructions = Vec::new();
    while body.pos < end {
        match body.instruction() {
            Ok(ins) => instructions.push(ins),
            // An instruction running past the declared body length.
            Err(DecodeError::Truncated { .. }) => return Err(DecodeError::Malformed { read: end }),
            Err(e) => return Err(e),
        }
    }
    MachineDescription::from_instructions(instructions)
        .map(|d| (d, end))
        .map_err(|_| DecodeError::Malformed { read: end })
}
