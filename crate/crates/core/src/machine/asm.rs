//! Assembly text format.
//!
//! One instruction per line (or `;`-separated), optional `name:` labels,
//! `#` comments. Opcodes are case-insensitive.

use std::collections::BTreeMap;
use std::fmt::Write;

use super::{Instruction, MachineDescription, MachineError, Reg};

enum Pending {
    Done(Instruction),
    Jz(Reg, String, usize),
    Jmp(String, usize),
}

fn is_label(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

fn parse_reg(token: &str, line: usize) -> Result<Reg, MachineError> {
    let out_of_range = || MachineError::RegisterOutOfRange { line, register: token.to_string() };
    let digits = token
        .strip_prefix('r')
        .or_else(|| token.strip_prefix('R'))
        .ok_or_else(|| MachineError::Syntax {
            line,
            message: format!("expected register, found `{token}`"),
        })?;
    if digits.is_empty() || !digits.chars().all(|c| c.is_ascii_digit()) {
        return Err(MachineError::Syntax { line, message: format!("bad register `{token}`") });
    }
    let index: usize = digits.parse().map_err(|_| out_of_range())?;
    Reg::new(index).ok_or_else(out_of_range)
}

fn expect_arity(op: &str, args: &[&str], n: usize, line: usize) -> Result<(), MachineError> {
    if args.len() == n {
        Ok(())
    } else {
        Err(MachineError::Syntax {
            line,
            message: format!("{op} takes {n} operand(s), found {}", args.len()),
        })
    }
}

fn parse_instruction(text: &str, line: usize) -> Result<Pending, MachineError> {
    let mut tokens = text.split(|c: char| c.is_whitespace() || c == ',').filter(|t| !t.is_empty());
    let op = tokens.next().expect("caller passes non-empty text");
    let args: Vec<&str> = tokens.collect();
    let upper = op.to_ascii_uppercase();
    let single_reg = |make: fn(Reg) -> Instruction| -> Result<Pending, MachineError> {
        expect_arity(&upper, &args, 1, line)?;
        Ok(Pending::Done(make(parse_reg(args[0], line)?)))
    };
    match upper.as_str() {
        "READ" => single_reg(Instruction::Read),
        "WRITE" => single_reg(Instruction::Write),
        "INC" => single_reg(Instruction::Inc),
        "DEC" => single_reg(Instruction::Dec),
        "CLR" => single_reg(Instruction::Clr),
        "COIN" => single_reg(Instruction::Coin),
        "HALT" => {
            expect_arity(&upper, &args, 0, line)?;
            Ok(Pending::Done(Instruction::Halt))
        }
        "JZ" => {
            expect_arity(&upper, &args, 2, line)?;
            Ok(Pending::Jz(parse_reg(args[0], line)?, args[1].to_string(), line))
        }
        "JMP" => {
            expect_arity(&upper, &args, 1, line)?;
            Ok(Pending::Jmp(args[0].to_string(), line))
        }
        _ => Err(MachineError::UnknownOpcode { line, opcode: op.to_string() }),
    }
}

pub(super) fn parse_machine(text: &str) -> Result<MachineDescription, MachineError> {
    let mut pending = Vec::new();
    let mut labels: BTreeMap<String, usize> = BTreeMap::new();
    let mut dangling: Option<(String, usize)> = None;

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let code = raw.split('#').next().unwrap_or("");
        for segment in code.split(';') {
            let mut rest = segment.trim();
            while let Some(colon) = rest.find(':') {
                let name = rest[..colon].trim();
                if !is_label(name) {
                    return Err(MachineError::Syntax { line, message: format!("bad label `{name}`") });
                }
                if labels.insert(name.to_string(), pending.len()).is_some() {
                    return Err(MachineError::DuplicateLabel { line, label: name.to_string() });
                }
                dangling = Some((name.to_string(), line));
                rest = rest[colon + 1..].trim();
            }
            if !rest.is_empty() {
                pending.push(parse_instruction(rest, line)?);
                dangling = None;
            }
        }
    }
    if let Some((label, line)) = dangling {
        return Err(MachineError::Syntax {
            line,
            message: format!("label `{label}` does not precede an instruction"),
        });
    }

    let resolve = |label: &str, line: usize| {
        labels
            .get(label)
            .copied()
            .ok_or_else(|| MachineError::UnresolvedLabel { line, label: label.to_string() })
    };
    let instructions = pending
        .into_iter()
        .map(|p| match p {
            Pending::Done(i) => Ok(i),
            Pending::Jz(r, label, line) => Ok(Instruction::Jz(r, resolve(&label, line)?)),
            Pending::Jmp(label, line) => Ok(Instruction::Jmp(resolve(&label, line)?)),
        })
        .collect::<Result<Vec<_>, _>>()?;
    MachineDescription::new(instructions, labels)
}

pub(super) fn print_machine(d: &MachineDescription) -> String {
    let mut by_target: BTreeMap<usize, Vec<&str>> = BTreeMap::new();
    for (name, &t) in d.labels() {
        by_target.entry(t).or_default().push(name);
    }
    let mut generated: BTreeMap<usize, String> = BTreeMap::new();
    for t in d.instructions().iter().filter_map(Instruction::target) {
        if !by_target.contains_key(&t) && !generated.contains_key(&t) {
            let mut name = format!("L{t}");
            while d.labels().contains_key(&name) {
                name.push('_');
            }
            generated.insert(t, name);
        }
    }
    let label_for = |t: usize| -> &str {
        by_target.get(&t).map(|v| v[0]).unwrap_or_else(|| generated[&t].as_str())
    };

    let mut out = String::new();
    for (pc, ins) in d.instructions().iter().enumerate() {
        for name in by_target.get(&pc).into_iter().flatten() {
            writeln!(out, "{name}:").unwrap();
        }
        if let Some(name) = generated.get(&pc) {
            writeln!(out, "{name}:").unwrap();
        }
        let text = match *ins {
            Instruction::Read(r)
            | Instruction::Write(r)
            | Instruction::Inc(r)
            | Instruction::Dec(r)
            | Instruction::Clr(r)
            | Instruction::Coin(r) => format!("{} {r}", ins.mnemonic()),
            Instruction::Jz(r, t) => format!("JZ {r} {}", label_for(t)),
            Instruction::Jmp(t) => format!("JMP {}", label_for(t)),
            Instruction::Halt => "HALT".to_string(),
        };
        writeln!(out, "    {text}").unwrap();
    }
    out
}
