use std::collections::BTreeMap;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::exec::{execute, Stop};
use super::{MachineDescription, MachineError, RegisterMode};
use crate::bits::BitString;

/// Empirical output distribution of a probabilistic machine.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MonteCarloReport {
    pub trials: u64,
    pub seed: u64,
    /// Halting outputs (input consumed exactly) with their relative frequency.
    pub frequencies: BTreeMap<BitString, f64>,
    pub counts: BTreeMap<BitString, u64>,
    /// Trials still running when the per-trial budget ran out.
    pub timeout: u64,
    /// Trials that halted outside the domain (input exhausted or left over).
    pub not_in_domain: u64,
}

/// Runs `trials` independent executions of `d` on `input`, `COIN` drawing a
/// fair bit from a ChaCha8 stream seeded with `seed`. The same seed always
/// yields the same report.
pub fn monte_carlo_run(
    d: &MachineDescription,
    input: &BitString,
    trials: u64,
    seed: u64,
    budget: u64,
) -> Result<MonteCarloReport, MachineError> {
    if trials == 0 {
        return Err(MachineError::ZeroCount("trials"));
    }
    if budget == 0 {
        return Err(MachineError::ZeroCount("budget"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut counts: BTreeMap<BitString, u64> = BTreeMap::new();
    let (mut timeout, mut not_in_domain) = (0, 0);
    for _ in 0..trials {
        let trace = execute(d.instructions(), input.bits(), budget, RegisterMode::Unbounded, Some(&mut rng));
        match trace.stop {
            Stop::Halted if trace.consumed == input.len() => {
                *counts.entry(BitString::from_bits(trace.output)).or_default() += 1;
            }
            Stop::Halted | Stop::InputExhausted => not_in_domain += 1,
            Stop::OutOfSteps => timeout += 1,
            Stop::Loop { .. } | Stop::Coin { .. } => unreachable!("rng supplied, loop detection off"),
        }
    }
    let frequencies = counts.iter().map(|(k, &v)| (k.clone(), v as f64 / trials as f64)).collect();
    Ok(MonteCarloReport { trials, seed, frequencies, counts, timeout, not_in_domain })
}
