//! Exhaustive enumeration of universal-machine programs.
//!
//! Programs are visited in length-then-lexicographic order. A program only
//! spawns children when its run asked for another input bit: every other
//! outcome is reproduced verbatim by all of its extensions (they read the
//! same bits and take the same steps), so subtrees are accounted for without
//! being re-run. Extensions of halting programs are excluded outright.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigUint;
use rayon::prelude::*;
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::bits::{BitString, Program};
use crate::machine::{universal_run, MachineError, NotInDomainReason, RegisterMode, RunResult};

/// Largest accepted `max_len`.
pub const MAX_ENUMERATION_LEN: usize = 24;

#[derive(Debug, Error)]
pub enum EnumerationError {
    #[error("max_len {0} exceeds the guard of {MAX_ENUMERATION_LEN}")]
    TooLong(usize),
    #[error("n = {n} exceeds the report's max_len {max_len}")]
    BeyondReport { n: usize, max_len: usize },
    #[error(transparent)]
    Machine(#[from] MachineError),
    #[error("worker pool: {0}")]
    Pool(String),
}

/// `numerator / 2^log2_denominator`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Dyadic {
    pub numerator: u64,
    pub log2_denominator: u32,
}

impl Dyadic {
    pub const ZERO: Dyadic = Dyadic { numerator: 0, log2_denominator: 0 };

    /// `2^-k`
    pub fn unit(k: u32) -> Dyadic {
        Dyadic { numerator: 1, log2_denominator: k }
    }

    fn rescaled(self, k: u32) -> u128 {
        debug_assert!(k >= self.log2_denominator);
        (self.numerator as u128) << (k - self.log2_denominator)
    }

    pub fn to_f64(self) -> f64 {
        self.numerator as f64 / 2f64.powi(self.log2_denominator as i32)
    }

    fn normalized(mut num: u128, mut k: u32) -> Dyadic {
        while k > 0 && num % 2 == 0 {
            num /= 2;
            k -= 1;
        }
        if num == 0 {
            return Dyadic::ZERO;
        }
        Dyadic { numerator: u64::try_from(num).expect("dyadic numerator overflow"), log2_denominator: k }
    }

    pub fn add(self, other: Dyadic) -> Dyadic {
        let k = self.log2_denominator.max(other.log2_denominator);
        Dyadic::normalized(self.rescaled(k) + other.rescaled(k), k)
    }

    /// `n · 2^-k`
    pub fn scaled_unit(n: u64, k: u32) -> Dyadic {
        Dyadic::normalized(n as u128, k)
    }
}

impl Ord for Dyadic {
    fn cmp(&self, other: &Self) -> Ordering {
        let k = self.log2_denominator.max(other.log2_denominator);
        self.rescaled(k).cmp(&other.rescaled(k))
    }
}

impl PartialOrd for Dyadic {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/2^{}", self.numerator, self.log2_denominator)
    }
}

impl Serialize for Dyadic {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut s = serializer.serialize_struct("Dyadic", 4)?;
        s.serialize_field("numerator", &self.numerator)?;
        s.serialize_field("log2_denominator", &self.log2_denominator)?;
        s.serialize_field("exact", &self.to_string())?;
        s.serialize_field("value", &self.to_f64())?;
        s.end()
    }
}

/// Which classified runs a report keeps in memory.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Retention {
    /// Every candidate with its result, and every unresolved program.
    Full,
    /// Halting programs only, and only minimal unresolved programs; the
    /// remaining classes are counted.
    Summary,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Classified {
    pub program: Program,
    pub result: RunResult,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct ClassCounts {
    pub halted: u64,
    pub input_exhausted: u64,
    pub unconsumed_input: u64,
    pub malformed: u64,
    pub loop_proved: u64,
    pub budget_exceeded: u64,
    /// Strings with a halting proper prefix.
    pub excluded: u64,
    /// Universal-machine runs actually performed.
    pub runs: u64,
}

impl ClassCounts {
    fn record(&mut self, result: &RunResult, n: u64) {
        let slot = match result {
            RunResult::Halted { .. } => &mut self.halted,
            RunResult::NotInDomain { reason: NotInDomainReason::InputExhausted, .. } => &mut self.input_exhausted,
            RunResult::NotInDomain { reason: NotInDomainReason::UnconsumedInput, .. } => &mut self.unconsumed_input,
            RunResult::NotInDomain { reason: NotInDomainReason::MalformedDescription, .. } => &mut self.malformed,
            RunResult::LoopProved { .. } => &mut self.loop_proved,
            RunResult::BudgetExceeded { .. } => &mut self.budget_exceeded,
        };
        *slot += n;
    }

    /// Strings accounted for, excluded ones included.
    pub fn total(&self) -> u64 {
        self.halted
            + self.input_exhausted
            + self.unconsumed_input
            + self.malformed
            + self.loop_proved
            + self.budget_exceeded
            + self.excluded
    }
}

fn serialize_mode<S: Serializer>(mode: &RegisterMode, s: S) -> Result<S::Ok, S::Error> {
    s.collect_str(mode)
}

#[derive(Clone, Debug, Serialize)]
pub struct EnumerationReport {
    pub max_len: usize,
    pub budget: u64,
    #[serde(serialize_with = "serialize_mode")]
    pub mode: RegisterMode,
    pub retention: Retention,
    /// In quasi-lexicographic order.
    pub classified: Vec<Classified>,
    /// Budget-exceeded programs, in quasi-lexicographic order.
    pub unresolved: Vec<Program>,
    /// Total number of unresolved programs, retained or not.
    pub unresolved_total: u64,
    pub omega_lower: Dyadic,
    /// `Σ 2^-|p|` over minimal unresolved programs (no unresolved proper prefix).
    pub unresolved_mass: Dyadic,
    pub counts: ClassCounts,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct HaltingProgram<'a> {
    pub program: &'a Program,
    pub output: &'a BitString,
    pub steps: u64,
}

impl EnumerationReport {
    /// Halting programs in quasi-lexicographic order.
    pub fn halting(&self) -> impl Iterator<Item = HaltingProgram<'_>> {
        self.classified.iter().filter_map(|c| match &c.result {
            RunResult::Halted { output, steps, .. } => {
                Some(HaltingProgram { program: &c.program, output, steps: *steps })
            }
            _ => None,
        })
    }

    /// Shortest unresolved length, if any program ran out of budget.
    pub fn first_unresolved_len(&self) -> Option<usize> {
        self.unresolved.first().map(BitString::len)
    }

    /// True when every program of length `≤ n` was decided in capped mode.
    pub fn is_exact_up_to(&self, n: usize) -> bool {
        self.mode.is_capped() && self.first_unresolved_len().is_none_or(|len| len > n)
    }

    fn check_n(&self, n: usize) -> Result<(), EnumerationError> {
        if n > self.max_len {
            Err(EnumerationError::BeyondReport { n, max_len: self.max_len })
        } else {
            Ok(())
        }
    }
}

#[derive(Clone, Debug)]
pub struct EnumerationConfig {
    pub max_len: usize,
    pub budget: u64,
    pub mode: RegisterMode,
    pub jobs: usize,
    pub retention: Retention,
}

impl EnumerationConfig {
    pub fn new(max_len: usize, budget: u64, mode: RegisterMode) -> Self {
        Self { max_len, budget, mode, jobs: 1, retention: Retention::Full }
    }

    pub fn jobs(mut self, jobs: usize) -> Self {
        self.jobs = jobs.max(1);
        self
    }

    pub fn retention(mut self, retention: Retention) -> Self {
        self.retention = retention;
        self
    }
}

/// Descendants of a length-`len` string with length `≤ max_len`.
fn descendants(len: usize, max_len: usize) -> u64 {
    (1u64 << (max_len - len + 1)) - 2
}

/// Every extension of `p` up to `max_len`, in quasi-lexicographic order.
fn extensions(p: &Program, max_len: usize) -> impl Iterator<Item = Program> + '_ {
    (1..=max_len - p.len()).flat_map(move |k| BitString::all_of_len(k).map(move |tail| p.concat(&tail)))
}

/// Runs the universal machine on every program of length `≤ max_len`.
pub fn enumerate_domain(config: &EnumerationConfig) -> Result<EnumerationReport, EnumerationError> {
    if config.max_len > MAX_ENUMERATION_LEN {
        return Err(EnumerationError::TooLong(config.max_len));
    }
    if config.budget == 0 {
        return Err(MachineError::ZeroCount("budget").into());
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.jobs.max(1))
        .build()
        .map_err(|e| EnumerationError::Pool(e.to_string()))?;

    let max_len = config.max_len;
    let full = config.retention == Retention::Full;
    let mut classified = Vec::new();
    let mut unresolved = Vec::new();
    let mut unresolved_total = 0u64;
    let mut counts = ClassCounts::default();
    let mut omega_lower = 0u64;
    let mut unresolved_mass = 0u64;

    let mut frontier = vec![Program::new()];
    for len in 0..=max_len {
        let results: Vec<RunResult> = pool.install(|| {
            frontier
                .par_iter()
                .map(|p| universal_run(p, config.budget, config.mode))
                .collect::<Result<_, _>>()
        })?;
        counts.runs += frontier.len() as u64;

        let mut next = Vec::new();
        for (p, result) in frontier.into_iter().zip(results) {
            let below = descendants(len, max_len);
            counts.record(&result, 1);
            match &result {
                RunResult::Halted { .. } => {
                    omega_lower += 1 << (max_len - len);
                    counts.excluded += below;
                }
                RunResult::NotInDomain { reason: NotInDomainReason::InputExhausted, .. } => {
                    if len < max_len {
                        next.push(p.with_bit(false));
                        next.push(p.with_bit(true));
                    }
                }
                inherited => {
                    counts.record(inherited, below);
                    if let RunResult::BudgetExceeded { .. } = inherited {
                        unresolved_mass += 1 << (max_len - len);
                        unresolved_total += 1 + below;
                        if full {
                            unresolved.extend(extensions(&p, max_len));
                        }
                        unresolved.push(p);
                        continue;
                    }
                    if full {
                        classified.extend(
                            extensions(&p, max_len).map(|q| Classified { program: q, result: inherited.clone() }),
                        );
                    }
                }
            }
            if full || result.is_halted() {
                classified.push(Classified { program: p, result });
            }
        }
        frontier = next;
    }

    classified.sort_by(|a, b| a.program.cmp(&b.program));
    unresolved.sort();
    let k = max_len as u32;
    Ok(EnumerationReport {
        max_len,
        budget: config.budget,
        mode: config.mode,
        retention: config.retention,
        classified,
        unresolved,
        unresolved_total,
        omega_lower: Dyadic::scaled_unit(omega_lower, k),
        unresolved_mass: Dyadic::scaled_unit(unresolved_mass, k),
        counts,
    })
}

/// Bounds on the halting probability restricted to programs of length
/// `≤ max_len`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct OmegaBounds {
    pub lower: Dyadic,
    pub upper: Dyadic,
    /// Only capped-mode reports decide every run, so only they give an
    /// upper bound that means anything at this scale.
    pub valid_at_scale: bool,
}

pub fn omega_bounds(report: &EnumerationReport) -> OmegaBounds {
    OmegaBounds {
        lower: report.omega_lower,
        upper: report.omega_lower.add(report.unresolved_mass),
        valid_at_scale: report.mode.is_capped(),
    }
}

/// Upper bound on program-size complexity: the shortest halting program
/// producing `x`, if the report has one.
pub fn h_upper(x: &BitString, report: &EnumerationReport) -> Option<usize> {
    report.halting().filter(|h| h.output == x).map(|h| h.program.len()).min()
}

/// A program realising a Σ or busy-beaver-time entry.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Witness {
    pub program: Program,
    pub output: BitString,
    pub steps: u64,
}

/// Largest quasi-lexicographic index of an output of a halting program of
/// length `≤ n`, with the first program attaining it, and whether the value
/// is exact for this machine and register cap.
pub fn sigma_hat(
    n: usize,
    report: &EnumerationReport,
) -> Result<(Option<(BigUint, Witness)>, bool), EnumerationError> {
    report.check_n(n)?;
    let mut best: Option<(BigUint, Witness)> = None;
    for h in report.halting().filter(|h| h.program.len() <= n) {
        let index = h.output.qlex_index();
        if best.as_ref().is_none_or(|(b, _)| index > *b) {
            let witness = Witness { program: h.program.clone(), output: h.output.clone(), steps: h.steps };
            best = Some((index, witness));
        }
    }
    Ok((best, report.is_exact_up_to(n)))
}

/// Longest running time among halting programs of length `≤ n`.
pub fn bb_time(n: usize, report: &EnumerationReport) -> Result<Option<Witness>, EnumerationError> {
    report.check_n(n)?;
    let mut best: Option<Witness> = None;
    for h in report.halting().filter(|h| h.program.len() <= n) {
        if best.as_ref().is_none_or(|b| h.steps > b.steps) {
            best = Some(Witness { program: h.program.clone(), output: h.output.clone(), steps: h.steps });
        }
    }
    Ok(best)
}

fn serialize_opt_big<S: Serializer>(v: &Option<BigUint>, s: S) -> Result<S::Ok, S::Error> {
    match v {
        Some(b) => s.collect_str(b),
        None => s.serialize_none(),
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SigmaRow {
    pub n: usize,
    #[serde(serialize_with = "serialize_opt_big")]
    pub sigma_hat: Option<BigUint>,
    pub exact: bool,
    pub bb_time: Option<u64>,
    pub sigma_witness: Option<Witness>,
    pub bb_witness: Option<Witness>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SigmaTable {
    pub max_len: usize,
    pub budget: u64,
    #[serde(serialize_with = "serialize_mode")]
    pub mode: RegisterMode,
    pub rows: Vec<SigmaRow>,
    /// Smallest `c` with `bb_time(n) ≤ sigma_hat(n + c)` on every exact row
    /// where both sides are available.
    pub halting_time_constant: Option<usize>,
}

impl SigmaTable {
    /// `n, sigma_hat, exact, bb_time` with empty cells for absent values.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("n,sigma_hat,exact,bb_time\n");
        for row in &self.rows {
            let sigma = row.sigma_hat.as_ref().map(ToString::to_string).unwrap_or_default();
            let bb = row.bb_time.map(|t| t.to_string()).unwrap_or_default();
            out.push_str(&format!("{},{},{},{}\n", row.n, sigma, row.exact, bb));
        }
        out
    }

    /// The `(n, n + c)` pairs checked for constant `c`.
    pub fn checked_pairs(&self, c: usize) -> Vec<(usize, usize)> {
        self.rows
            .iter()
            .filter(|r| r.exact && r.bb_time.is_some())
            .map(|r| (r.n, r.n + c))
            .filter(|&(_, m)| m < self.rows.len() && self.rows[m].exact)
            .collect()
    }

    /// True when every halting program of length `≤ n` stops within
    /// `sigma_hat(n + c)` steps, for every checked pair.
    pub fn constant_holds(&self, c: usize) -> bool {
        let pairs = self.checked_pairs(c);
        !pairs.is_empty()
            && pairs.iter().all(|&(n, m)| {
                let bb = self.rows[n].bb_time.expect("filtered");
                self.rows[m].sigma_hat.as_ref().is_some_and(|s| BigUint::from(bb) <= *s)
            })
    }
}

/// Σ and busy-beaver-time table for `n = 0..=max_len`.
pub fn sigma_table(report: &EnumerationReport) -> SigmaTable {
    let rows: Vec<SigmaRow> = (0..=report.max_len)
        .map(|n| {
            let (sigma, exact) = sigma_hat(n, report).expect("n within report");
            let bb = bb_time(n, report).expect("n within report");
            let (sigma_hat, sigma_witness) = match sigma {
                Some((v, w)) => (Some(v), Some(w)),
                None => (None, None),
            };
            SigmaRow { n, sigma_hat, exact, bb_time: bb.as_ref().map(|w| w.steps), sigma_witness, bb_witness: bb }
        })
        .collect();
    let mut table = SigmaTable {
        max_len: report.max_len,
        budget: report.budget,
        mode: report.mode,
        rows,
        halting_time_constant: None,
    };
    table.halting_time_constant = (0..=report.max_len).find(|&c| table.constant_holds(c));
    table
}

#[cfg(test)]
mod tests {
    use super::*;

    const CAPPED: RegisterMode = RegisterMode::Capped(64);

    fn report(max_len: usize, budget: u64, mode: RegisterMode) -> EnumerationReport {
        enumerate_domain(&EnumerationConfig::new(max_len, budget, mode)).unwrap()
    }

    #[test]
    fn max_len_zero_classifies_only_the_empty_string() {
        let r = report(0, 100, CAPPED);
        assert_eq!(r.classified.len(), 1);
        assert!(r.classified[0].program.is_empty());
        assert_eq!(omega_bounds(&r).lower, Dyadic::ZERO);
        assert_eq!(omega_bounds(&r).upper, Dyadic::ZERO);
    }

    #[test]
    fn guard_rejects_long_enumerations() {
        let config = EnumerationConfig::new(25, 100, CAPPED);
        assert!(matches!(enumerate_domain(&config), Err(EnumerationError::TooLong(25))));
    }

    #[test]
    fn every_string_accounted_for_exactly_once() {
        let r = report(11, 1000, CAPPED);
        let mut seen: Vec<&Program> = r.classified.iter().map(|c| &c.program).chain(&r.unresolved).collect();
        seen.sort();
        let halted: Vec<&Program> = r.halting().map(|h| h.program).collect();
        let mut expected = Vec::new();
        for p in BitString::all_up_to(11) {
            let excluded = halted.iter().any(|h| h.is_proper_prefix_of(&p));
            if !excluded {
                expected.push(p);
            }
        }
        assert_eq!(seen.len(), expected.len());
        assert!(seen.iter().zip(&expected).all(|(a, b)| *a == b));
        assert_eq!(r.counts.total(), (1 << 12) - 1);
    }

    #[test]
    fn inherited_results_match_direct_runs() {
        for mode in [CAPPED, RegisterMode::Unbounded] {
            let r = report(10, 300, mode);
            for c in &r.classified {
                assert_eq!(universal_run(&c.program, 300, mode).unwrap(), c.result, "{}", c.program);
            }
            for p in &r.unresolved {
                assert!(matches!(universal_run(p, 300, mode).unwrap(), RunResult::BudgetExceeded { .. }));
            }
        }
    }

    #[test]
    fn omega_lower_is_monotone() {
        let mut prev = Dyadic::ZERO;
        for max_len in [4, 8, 10, 12] {
            let lower = omega_bounds(&report(max_len, 200, CAPPED)).lower;
            assert!(lower >= prev);
            prev = lower;
        }
        let small = omega_bounds(&report(12, 8, CAPPED)).lower;
        let large = omega_bounds(&report(12, 200, CAPPED)).lower;
        assert!(small <= large);
    }

    #[test]
    fn shortest_program_is_the_halt_machine() {
        let r = report(12, 1000, CAPPED);
        let first = r.halting().next().unwrap();
        assert_eq!(first.program.to_string(), "10");
        assert_eq!(h_upper(&BitString::new(), &r), Some(2));
        assert_eq!(h_upper(&"111111".parse().unwrap(), &r), None);
    }

    #[test]
    fn sigma_and_bb_are_nondecreasing() {
        let r = report(12, 1000, CAPPED);
        let t = sigma_table(&r);
        assert_eq!(t.rows[1].sigma_hat, None);
        assert_eq!(t.rows[0].bb_time, None);
        for w in t.rows.windows(2) {
            assert!(w[0].sigma_hat <= w[1].sigma_hat);
            assert!(w[0].bb_time <= w[1].bb_time);
        }
        assert!(sigma_hat(13, &r).is_err());
    }

    #[test]
    fn dyadic_arithmetic() {
        let half = Dyadic::unit(1);
        assert_eq!(half.add(half), Dyadic { numerator: 1, log2_denominator: 0 });
        assert_eq!(Dyadic::scaled_unit(6, 4), Dyadic { numerator: 3, log2_denominator: 3 });
        assert!(Dyadic::unit(3) < Dyadic::unit(2));
        assert_eq!(Dyadic::unit(2).to_string(), "1/2^2");
    }
}
