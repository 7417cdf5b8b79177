//! Time/energy lower bound for an `n`-step physical computation:
//! `t ≥ n² · h / (2π E)`.

use serde::Serialize;
use thiserror::Error;

/// Planck constant in J·s (exact in the SI).
pub const PLANCK: f64 = 6.626_070_15e-34;

/// `h / 2π` in J·s.
pub const HBAR: f64 = PLANCK / (2.0 * std::f64::consts::PI);

#[derive(Debug, Error, Clone, Copy, PartialEq)]
pub enum LimitsError {
    #[error("energy must be positive, got {0}")]
    NonPositiveEnergy(f64),
    #[error("time must be positive, got {0}")]
    NonPositiveTime(f64),
    #[error("step count must be non-negative and finite, got {0}")]
    BadSteps(f64),
}

fn check_energy(e: f64) -> Result<(), LimitsError> {
    if e > 0.0 && e.is_finite() {
        Ok(())
    } else {
        Err(LimitsError::NonPositiveEnergy(e))
    }
}

fn check_time(t: f64) -> Result<(), LimitsError> {
    if t > 0.0 && t.is_finite() {
        Ok(())
    } else {
        Err(LimitsError::NonPositiveTime(t))
    }
}

fn check_steps(n: f64) -> Result<(), LimitsError> {
    if n >= 0.0 && n.is_finite() {
        Ok(())
    } else {
        Err(LimitsError::BadSteps(n))
    }
}

/// Least time in seconds for `n` steps at energy `e` joules.
pub fn min_time(n: f64, e: f64) -> Result<f64, LimitsError> {
    check_steps(n)?;
    check_energy(e)?;
    Ok(n * (HBAR / e) * n)
}

/// Most steps that fit in `t` seconds at energy `e` joules.
pub fn max_steps(t: f64, e: f64) -> Result<f64, LimitsError> {
    check_energy(e)?;
    if !(t >= 0.0 && t.is_finite()) {
        return Err(LimitsError::NonPositiveTime(t));
    }
    Ok((t / (HBAR / e)).sqrt())
}

/// Least energy in joules for `n` steps in `t` seconds.
pub fn min_energy(n: f64, t: f64) -> Result<f64, LimitsError> {
    check_steps(n)?;
    check_time(t)?;
    Ok(n * (HBAR / t) * n)
}

/// Whether `n` steps fit in time `t` with energy `e`.
pub fn feasible(n: f64, t: f64, e: f64) -> Result<bool, LimitsError> {
    check_time(t)?;
    Ok(t >= min_time(n, e)?)
}

/// One query against the bound.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum BoundQuery {
    MinTime { n: f64, energy: f64 },
    MaxSteps { time: f64, energy: f64 },
    MinEnergy { n: f64, time: f64 },
    Feasible { n: f64, time: f64, energy: f64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(untagged)]
pub enum BoundAnswer {
    Scalar(f64),
    Feasible(bool),
}

pub fn bound_calc(query: BoundQuery) -> Result<BoundAnswer, LimitsError> {
    Ok(match query {
        BoundQuery::MinTime { n, energy } => BoundAnswer::Scalar(min_time(n, energy)?),
        BoundQuery::MaxSteps { time, energy } => BoundAnswer::Scalar(max_steps(time, energy)?),
        BoundQuery::MinEnergy { n, time } => BoundAnswer::Scalar(min_energy(n, time)?),
        BoundQuery::Feasible { n, time, energy } => BoundAnswer::Feasible(feasible(n, time, energy)?),
    })
}

/// Every quantity derivable from `n`, `E` and optionally `t`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PhysicalBudget {
    pub steps: f64,
    pub energy_joules: f64,
    pub time_seconds: Option<f64>,
    pub planck_constant: f64,
    pub min_time: f64,
    pub max_steps: Option<f64>,
    pub min_energy: Option<f64>,
    pub feasible: Option<bool>,
}

pub fn physical_budget(n: f64, energy: f64, time: Option<f64>) -> Result<PhysicalBudget, LimitsError> {
    let min_t = min_time(n, energy)?;
    let (max_steps, min_energy, feasible) = match time {
        Some(t) => (Some(max_steps(t, energy)?), Some(min_energy(n, t)?), Some(feasible(n, t, energy)?)),
        None => (None, None, None),
    };
    Ok(PhysicalBudget {
        steps: n,
        energy_joules: energy,
        time_seconds: time,
        planck_constant: PLANCK,
        min_time: min_t,
        max_steps,
        min_energy,
        feasible,
    })
}

/// Distance between two finite doubles in units in the last place.
pub fn ulps_apart(a: f64, b: f64) -> u64 {
    let key = |x: f64| {
        let bits = x.to_bits() as i64;
        if bits < 0 {
            i64::MIN - bits
        } else {
            bits
        }
    };
    key(a).abs_diff(key(b))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn zero_steps_need_no_time() {
        assert_eq!(min_time(0.0, 1.0).unwrap(), 0.0);
    }

    #[test]
    fn one_step_at_one_joule_is_hbar() {
        let t = min_time(1.0, 1.0).unwrap();
        assert!(ulps_apart(t, 6.626_070_15e-34 / (2.0 * std::f64::consts::PI)) <= 1);
        assert!((t - 1.0546e-34).abs() < 1e-38);
    }

    #[test]
    fn energy_for_10_pow_30_steps() {
        let e = min_energy(1e30, 4.35e17).unwrap();
        assert!((e - 2.4e8).abs() / 2.4e8 < 0.02, "{e}");
    }

    #[test]
    fn rejects_nonpositive_inputs() {
        assert_eq!(min_time(1.0, 0.0), Err(LimitsError::NonPositiveEnergy(0.0)));
        assert_eq!(min_energy(1.0, -1.0), Err(LimitsError::NonPositiveTime(-1.0)));
        assert!(feasible(1.0, 0.0, 1.0).is_err());
        assert!(min_time(-1.0, 1.0).is_err());
    }

    #[test]
    fn feasibility_boundary() {
        let t = min_time(1e6, 1e-3).unwrap();
        assert!(feasible(1e6, t, 1e-3).unwrap());
        assert!(!feasible(1e6, t * 0.999, 1e-3).unwrap());
        assert_eq!(
            bound_calc(BoundQuery::Feasible { n: 0.0, time: 1.0, energy: 1.0 }).unwrap(),
            BoundAnswer::Feasible(true)
        );
    }

    proptest! {
        #[test]
        fn max_steps_inverts_min_time(n in 0u64..=1_000_000_000_000_000, e_exp in -20i32..20, e_mant in 1.0f64..10.0) {
            let e = e_mant * 10f64.powi(e_exp);
            let n = n as f64;
            let back = max_steps(min_time(n, e).unwrap(), e).unwrap();
            prop_assert!(ulps_apart(back, n) <= 1, "n = {}, back = {}", n, back);
        }

        #[test]
        fn min_time_monotone(n in 1.0f64..1e15, e in 1e-10f64..1e10) {
            prop_assert!(min_time(n * 1.001, e).unwrap() > min_time(n, e).unwrap());
            prop_assert!(min_time(n, e * 1.001).unwrap() < min_time(n, e).unwrap());
        }
    }
}
