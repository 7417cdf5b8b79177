//! Minimal production time `t(x)`, the time-canonical program `x#`, and the
//! slowdown experiment comparing the universal machine with the machines it
//! simulates.
//!
//! `t(x)` is computable here because every halting program `z` satisfies
//! `|z| ≤ T_U(z)`: each bit of `z` costs the universal machine at least one
//! step. A search over all programs no longer than the best time found so
//! far is therefore complete.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bits::{BitString, Program};
use crate::machine::{
    encode_machine, parse_machine, run, universal_run, MachineDescription, MachineError,
    NotInDomainReason, RegisterMode, RunResult,
};

#[derive(Debug, Error)]
pub enum PredictorError {
    #[error("program {program} is not in the universal machine's domain: {result:?}")]
    NotInDomain { program: Program, result: RunResult },
    #[error("suite entry `{name}` on input {input}: {result:?}")]
    SuiteEntryDidNotHalt { name: String, input: Program, result: RunResult },
    #[error("suite entry `{name}`: {source}")]
    SuiteMachine { name: String, source: MachineError },
    #[error("suite entry `{name}`: bad input {input:?}")]
    SuiteInput { name: String, input: String },
    #[error(transparent)]
    Machine(#[from] MachineError),
    #[error("worker pool: {0}")]
    Pool(String),
}

/// How the search space below `t(x)` was disposed of.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct SearchCertificate {
    /// Longest program length examined; every shorter program was classified.
    pub max_len_searched: usize,
    /// Universal-machine runs performed.
    pub runs: u64,
    pub halted_other_output: u64,
    pub halted_too_slow: u64,
    pub not_in_domain: u64,
    pub budget_exceeded: u64,
    pub loop_proved: u64,
    /// Input-exhausted prefixes whose every extension needs more than the
    /// best time known when they were reached.
    pub pruned_prefixes: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PredictorResult {
    pub target_output: BitString,
    pub t_of_x: u64,
    pub canonical: Program,
    /// Programs producing the target output in exactly `t_of_x` steps.
    pub witnesses: u64,
    pub certificate: SearchCertificate,
}

/// Exact `t(x)` and `x#` for a program `x` in the domain.
///
/// `budget` bounds the initial run of `x` only; the search itself is bounded
/// by `T_U(x)`.
pub fn min_time(
    x: &Program,
    budget: u64,
    mode: RegisterMode,
    jobs: usize,
) -> Result<PredictorResult, PredictorError> {
    let first = universal_run(x, budget, mode)?;
    let (target, mut best) = match &first {
        RunResult::Halted { output, steps, .. } => (output.clone(), *steps),
        _ => return Err(PredictorError::NotInDomain { program: x.clone(), result: first }),
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .map_err(|e| PredictorError::Pool(e.to_string()))?;

    let mut canonical: Option<Program> = None;
    let mut witnesses = 0u64;
    let mut cert = SearchCertificate::default();
    let mut frontier = vec![Program::new()];
    let mut len = 0usize;

    // Level by level: every program of length `len` not excluded by its
    // prefix is run with the best time known at the start of the level.
    while !frontier.is_empty() && len as u64 <= best {
        let level_budget = best;
        let results: Vec<RunResult> = pool.install(|| {
            frontier.par_iter().map(|z| universal_run(z, level_budget, mode)).collect::<Result<_, _>>()
        })?;
        cert.runs += frontier.len() as u64;
        cert.max_len_searched = len;

        let mut next = Vec::new();
        for (z, result) in frontier.into_iter().zip(results) {
            match result {
                RunResult::Halted { ref output, steps, .. } if *output == target => {
                    if steps < best {
                        best = steps;
                        canonical = Some(z);
                        witnesses = 1;
                    } else if steps == best {
                        witnesses += 1;
                        if canonical.as_ref().is_none_or(|c| z < *c) {
                            canonical = Some(z);
                        }
                    } else {
                        cert.halted_too_slow += 1;
                    }
                }
                RunResult::Halted { .. } => cert.halted_other_output += 1,
                RunResult::NotInDomain { reason: NotInDomainReason::InputExhausted, steps } => {
                    // An extension finishes this READ and still has to halt.
                    if steps < best {
                        next.push(z.with_bit(false));
                        next.push(z.with_bit(true));
                    } else {
                        cert.pruned_prefixes += 1;
                    }
                }
                RunResult::NotInDomain { .. } => cert.not_in_domain += 1,
                RunResult::BudgetExceeded { .. } => cert.budget_exceeded += 1,
                RunResult::LoopProved { .. } => cert.loop_proved += 1,
            }
        }
        frontier = next;
        len += 1;
    }

    Ok(PredictorResult {
        target_output: target,
        t_of_x: best,
        canonical: canonical.expect("x itself is reached by the search"),
        witnesses,
        certificate: cert,
    })
}

/// The time-canonical program `x#`: `U(x#) = U(x)` and `T_U(x#) = t(x)`.
pub fn canonical_program(x: &Program, budget: u64, mode: RegisterMode) -> Result<Program, PredictorError> {
    Ok(min_time(x, budget, mode, 1)?.canonical)
}

/// A named machine with inputs it halts on.
#[derive(Clone, Debug)]
pub struct SuiteEntry {
    pub name: String,
    pub machine: MachineDescription,
    pub inputs: Vec<Program>,
}

/// Wire form of a suite file: a JSON array of these.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SuiteEntrySpec {
    pub name: String,
    /// Assembly source.
    pub source: String,
    /// Inputs as `0`/`1` strings.
    pub inputs: Vec<String>,
}

impl SuiteEntrySpec {
    pub fn build(&self) -> Result<SuiteEntry, PredictorError> {
        let machine = parse_machine(&self.source)
            .map_err(|source| PredictorError::SuiteMachine { name: self.name.clone(), source })?;
        let inputs = self
            .inputs
            .iter()
            .map(|s| {
                s.parse().map_err(|_| PredictorError::SuiteInput { name: self.name.clone(), input: s.clone() })
            })
            .collect::<Result<_, _>>()?;
        Ok(SuiteEntry { name: self.name.clone(), machine, inputs })
    }
}

pub fn parse_suite(json: &str) -> Result<Vec<SuiteEntry>, PredictorError> {
    let specs: Vec<SuiteEntrySpec> = serde_json::from_str(json)
        .map_err(|e| PredictorError::SuiteInput { name: "<file>".into(), input: e.to_string() })?;
    specs.iter().map(SuiteEntrySpec::build).collect()
}

/// `(1 b)* 0` framing of a bit string, so that the input is self-delimiting.
pub fn pair_coded(payload: &BitString) -> Program {
    let mut out = Program::new();
    for &b in payload.bits() {
        out.push(true);
        out.push(b);
    }
    out.push(false);
    out
}

fn unary(k: usize) -> Program {
    let mut bits = vec![true; k];
    bits.push(false);
    Program::from_bits(bits)
}

const COPIER: &str = "
loop: READ r0
      JZ r0 done
      READ r1
      WRITE r1
      JMP loop
done: HALT";

const COMPLEMENT: &str = "
loop: READ r0
      JZ r0 done
      READ r1
      JZ r1 zero
      WRITE r7
      JMP loop
zero: INC r6
      WRITE r6
      CLR r6
      JMP loop
done: HALT";

const PARITY: &str = "
loop: READ r0
      JZ r0 done
      READ r1
      JZ r1 loop
      JZ r2 set
      CLR r2
      JMP loop
set:  INC r2
      JMP loop
done: WRITE r2
      HALT";

const DOUBLER: &str = "
count: READ r1
       JZ r1 emit
       INC r0
       INC r0
       JMP count
emit:  JZ r0 done
       WRITE r0
       DEC r0
       JMP emit
done:  HALT";

const REVERSE5: &str = "
READ r0
READ r1
READ r2
READ r3
READ r4
WRITE r4
WRITE r3
WRITE r2
WRITE r1
WRITE r0
HALT";

/// Five machines with twenty inputs each.
pub fn builtin_suite() -> Vec<SuiteEntry> {
    let payloads: Vec<BitString> = BitString::all_up_to(4).take(20).collect();
    let framed: Vec<Program> = payloads.iter().map(pair_coded).collect();
    let entry = |name: &str, src: &str, inputs: Vec<Program>| SuiteEntry {
        name: name.to_string(),
        machine: parse_machine(src).expect("built-in machine parses"),
        inputs,
    };
    vec![
        entry("copier", COPIER, framed.clone()),
        entry("complement", COMPLEMENT, framed.clone()),
        entry("parity", PARITY, framed),
        entry("doubler", DOUBLER, (0..20).map(unary).collect()),
        entry("reverse5", REVERSE5, BitString::all_of_len(5).take(20).collect()),
    ]
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SlowdownRow {
    pub machine: String,
    pub input: Program,
    pub t_c: u64,
    /// `|x′|` where `x′ = encode(C)·x`.
    pub program_len: usize,
    pub t_u: u64,
    pub ratio: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SlowdownSummary {
    pub rows: usize,
    pub min_ratio: f64,
    pub median_ratio: f64,
    pub max_ratio: f64,
    /// Rows where the universal machine was strictly faster than the machine it simulated.
    pub faster_rows: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SlowdownReport {
    pub rows: Vec<SlowdownRow>,
    pub summary: SlowdownSummary,
}

impl SlowdownReport {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("machine,input,t_c,program_len,t_u,ratio\n");
        for r in &self.rows {
            out.push_str(&format!(
                "{},{},{},{},{},{}\n",
                r.machine, r.input, r.t_c, r.program_len, r.t_u, r.ratio
            ));
        }
        out
    }
}

/// Measures `T_C(x)` against `T_U(encode(C)·x)` for every suite entry.
pub fn slowdown_report(
    suite: &[SuiteEntry],
    budget: u64,
    mode: RegisterMode,
) -> Result<SlowdownReport, PredictorError> {
    let mut rows = Vec::new();
    for entry in suite {
        let code = encode_machine(&entry.machine);
        for input in &entry.inputs {
            let direct = run(&entry.machine, input, budget, mode)?;
            let t_c = direct.halted_steps().ok_or_else(|| PredictorError::SuiteEntryDidNotHalt {
                name: entry.name.clone(),
                input: input.clone(),
                result: direct.clone(),
            })?;
            let xp = code.concat(input);
            let budget_u = budget.saturating_mul(4).saturating_add(xp.len() as u64 * 2);
            let via_u = universal_run(&xp, budget_u, mode)?;
            let t_u = via_u.halted_steps().ok_or_else(|| PredictorError::SuiteEntryDidNotHalt {
                name: format!("U({})", entry.name),
                input: input.clone(),
                result: via_u.clone(),
            })?;
            rows.push(SlowdownRow {
                machine: entry.name.clone(),
                input: input.clone(),
                t_c,
                program_len: xp.len(),
                t_u,
                ratio: t_u as f64 / t_c as f64,
            });
        }
    }
    let mut ratios: Vec<f64> = rows.iter().map(|r| r.ratio).collect();
    ratios.sort_by(f64::total_cmp);
    let median = match ratios.len() {
        0 => f64::NAN,
        n if n % 2 == 1 => ratios[n / 2],
        n => (ratios[n / 2 - 1] + ratios[n / 2]) / 2.0,
    };
    let summary = SlowdownSummary {
        rows: rows.len(),
        min_ratio: ratios.first().copied().unwrap_or(f64::NAN),
        median_ratio: median,
        max_ratio: ratios.last().copied().unwrap_or(f64::NAN),
        faster_rows: rows.iter().filter(|r| r.t_u < r.t_c).count(),
    };
    Ok(SlowdownReport { rows, summary })
}
