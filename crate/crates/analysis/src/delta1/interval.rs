//! Closed intervals over the extended reals with outward rounding.
//!
//! Every elementary operation widens an inexact result by [`WIDEN_ULPS`]
//! units in the last place on each side. Results known to be exact (checked
//! with error-free transformations) are left alone.

use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};
use std::fmt;
use thiserror::Error;

/// Outward widening applied to each inexact operation.
pub const WIDEN_ULPS: u32 = 4;

/// Largest double below pi.
pub const PI_LO: f64 = std::f64::consts::PI;
/// Smallest double above pi.
pub const PI_HI: f64 = 3.141_592_653_589_793_6;

#[derive(Debug, Error, Clone, Copy, PartialEq)]
#[error("invalid interval [{lo}, {hi}]")]
pub struct IntervalError {
    pub lo: f64,
    pub hi: f64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Interval {
    lo: f64,
    hi: f64,
}

pub(crate) fn down(x: f64) -> f64 {
    if x == f64::INFINITY {
        return f64::MAX;
    }
    (0..WIDEN_ULPS).fold(x, |y, _| y.next_down())
}

pub(crate) fn up(x: f64) -> f64 {
    if x == f64::NEG_INFINITY {
        return -f64::MAX;
    }
    (0..WIDEN_ULPS).fold(x, |y, _| y.next_up())
}

/// Below this magnitude an `fma` residual may underflow.
const TINY: f64 = 1e-290;

fn sum_is_exact(a: f64, b: f64, s: f64) -> bool {
    if a.is_infinite() || b.is_infinite() {
        return true;
    }
    if !s.is_finite() {
        return false;
    }
    let bb = s - a;
    (a - (s - bb)) + (b - bb) == 0.0
}

fn product_is_exact(a: f64, b: f64, p: f64) -> bool {
    if a.is_infinite() || b.is_infinite() || a == 0.0 || b == 0.0 {
        return true;
    }
    p.is_finite() && p.abs() >= TINY && a.mul_add(b, -p) == 0.0
}

fn add_down(a: f64, b: f64) -> f64 {
    let s = a + b;
    if s.is_nan() {
        f64::NEG_INFINITY
    } else if sum_is_exact(a, b, s) {
        s
    } else {
        down(s)
    }
}

fn add_up(a: f64, b: f64) -> f64 {
    let s = a + b;
    if s.is_nan() {
        f64::INFINITY
    } else if sum_is_exact(a, b, s) {
        s
    } else {
        up(s)
    }
}

/// Product with the convention `0 · ∞ = 0`.
fn product(a: f64, b: f64) -> (f64, bool) {
    if a == 0.0 || b == 0.0 {
        return (0.0, true);
    }
    let p = a * b;
    (p, product_is_exact(a, b, p))
}

fn mul_down(a: f64, b: f64) -> f64 {
    match product(a, b) {
        (p, true) => p,
        (p, false) => down(p),
    }
}

fn mul_up(a: f64, b: f64) -> f64 {
    match product(a, b) {
        (p, true) => p,
        (p, false) => up(p),
    }
}

impl Interval {
    pub const ENTIRE: Interval = Interval { lo: f64::NEG_INFINITY, hi: f64::INFINITY };

    /// # Panics
    /// If `lo > hi` or either bound is NaN.
    pub fn new(lo: f64, hi: f64) -> Self {
        Self::try_new(lo, hi).expect("interval bounds out of order")
    }

    pub fn try_new(lo: f64, hi: f64) -> Result<Self, IntervalError> {
        if lo <= hi {
            Ok(Self { lo, hi })
        } else {
            Err(IntervalError { lo, hi })
        }
    }

    pub fn point(x: f64) -> Self {
        if x.is_nan() {
            Self::ENTIRE
        } else {
            Self { lo: x, hi: x }
        }
    }

    /// Enclosure of `x` widened by the standard amount on both sides.
    pub fn around(x: f64) -> Self {
        if x.is_nan() {
            Self::ENTIRE
        } else {
            Self { lo: down(x), hi: up(x) }
        }
    }

    pub fn pi() -> Self {
        Self { lo: PI_LO, hi: PI_HI }
    }

    /// Builds an enclosure, mapping NaN bounds to the whole line.
    fn sanitized(lo: f64, hi: f64) -> Self {
        let lo = if lo.is_nan() { f64::NEG_INFINITY } else { lo };
        let hi = if hi.is_nan() { f64::INFINITY } else { hi };
        if lo <= hi {
            Self { lo, hi }
        } else {
            Self::ENTIRE
        }
    }

    pub fn lo(&self) -> f64 {
        self.lo
    }

    pub fn hi(&self) -> f64 {
        self.hi
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn midpoint(&self) -> f64 {
        match (self.lo.is_finite(), self.hi.is_finite()) {
            (true, true) => self.lo + (self.hi - self.lo) / 2.0,
            (false, false) => 0.0,
            (true, false) => self.lo.max(0.0) * 2.0 + 1.0,
            (false, true) => self.hi.min(0.0) * 2.0 - 1.0,
        }
    }

    pub fn is_finite(&self) -> bool {
        self.lo.is_finite() && self.hi.is_finite()
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }

    pub fn contains_zero(&self) -> bool {
        self.contains(0.0)
    }

    pub fn is_subset_of(&self, other: &Interval) -> bool {
        other.lo <= self.lo && self.hi <= other.hi
    }

    /// Largest absolute value.
    pub fn mag(&self) -> f64 {
        self.lo.abs().max(self.hi.abs())
    }

    /// Smallest absolute value.
    pub fn mig(&self) -> f64 {
        if self.contains_zero() {
            0.0
        } else {
            self.lo.abs().min(self.hi.abs())
        }
    }

    /// `Some(1.0)` if certainly positive, `Some(-1.0)` if certainly negative.
    pub fn sign(&self) -> Option<f64> {
        if self.lo > 0.0 {
            Some(1.0)
        } else if self.hi < 0.0 {
            Some(-1.0)
        } else {
            None
        }
    }

    pub fn hull(&self, other: &Interval) -> Interval {
        Interval { lo: self.lo.min(other.lo), hi: self.hi.max(other.hi) }
    }

    pub fn split(&self) -> (Interval, Interval) {
        let m = self.midpoint();
        (Interval { lo: self.lo, hi: m }, Interval { lo: m, hi: self.hi })
    }

    pub fn neg(self) -> Interval {
        Interval { lo: -self.hi, hi: -self.lo }
    }

    pub fn add(self, o: Interval) -> Interval {
        Self::sanitized(add_down(self.lo, o.lo), add_up(self.hi, o.hi))
    }

    pub fn sub(self, o: Interval) -> Interval {
        self.add(o.neg())
    }

    pub fn mul(self, o: Interval) -> Interval {
        let ends = [(self.lo, o.lo), (self.lo, o.hi), (self.hi, o.lo), (self.hi, o.hi)];
        let lo = ends.iter().map(|&(a, b)| mul_down(a, b)).fold(f64::INFINITY, f64::min);
        let hi = ends.iter().map(|&(a, b)| mul_up(a, b)).fold(f64::NEG_INFINITY, f64::max);
        Self::sanitized(lo, hi)
    }

    pub fn sqr(self) -> Interval {
        let a = self.mig();
        let b = self.mag();
        Self::sanitized(mul_down(a, a).max(0.0), mul_up(b, b))
    }

    pub fn recip(self) -> Interval {
        let inv = |x: f64, lower: bool| -> f64 {
            if x.is_infinite() {
                return 0.0;
            }
            let r = 1.0 / x;
            let exact = r.is_finite() && r.abs() >= TINY && r.mul_add(x, -1.0) == 0.0;
            match (exact, lower) {
                (true, _) => r,
                (false, true) => down(r),
                (false, false) => up(r),
            }
        };
        if self.lo > 0.0 || self.hi < 0.0 {
            Self::sanitized(inv(self.hi, true), inv(self.lo, false))
        } else if self.lo == 0.0 && self.hi > 0.0 {
            Self::sanitized(inv(self.hi, true), f64::INFINITY)
        } else if self.hi == 0.0 && self.lo < 0.0 {
            Self::sanitized(f64::NEG_INFINITY, inv(self.lo, false))
        } else {
            Self::ENTIRE
        }
    }

    pub fn exp(self) -> Interval {
        let lo = match self.lo {
            x if x == f64::NEG_INFINITY => 0.0,
            0.0 => 1.0,
            x => down(x.exp()).max(0.0),
        };
        let hi = match self.hi {
            x if x == f64::INFINITY => f64::INFINITY,
            0.0 => 1.0,
            x => up(x.exp()),
        };
        Self::sanitized(lo, hi)
    }

    /// Natural logarithm; non-positive parts map to `-∞`.
    pub fn ln(self) -> Interval {
        let f = |x: f64, lower: bool| -> f64 {
            if x <= 0.0 {
                f64::NEG_INFINITY
            } else if x == 1.0 {
                0.0
            } else if x.is_infinite() {
                x
            } else if lower {
                down(x.ln())
            } else {
                up(x.ln())
            }
        };
        Self::sanitized(f(self.lo, true), f(self.hi, false))
    }

    pub fn sin(self) -> Interval {
        const UNIT: Interval = Interval { lo: -1.0, hi: 1.0 };
        if !self.is_finite() || self.width() >= 2.0 * PI_LO || self.mag() > 1e15 {
            return UNIT;
        }
        let (a, b) = (self.lo.sin(), self.hi.sin());
        let mut lo = down(a.min(b));
        let mut hi = up(a.max(b));
        // extrema of sin sit at (k + 1/2)·pi
        let k0 = (self.lo / PI_LO - 0.5).floor() as i64 - 1;
        let k1 = (self.hi / PI_LO - 0.5).ceil() as i64 + 1;
        for k in k0..=k1 {
            let m = k as f64 + 0.5;
            let crit = if m >= 0.0 {
                Interval { lo: down(m * PI_LO), hi: up(m * PI_HI) }
            } else {
                Interval { lo: down(m * PI_HI), hi: up(m * PI_LO) }
            };
            if crit.hi >= self.lo && crit.lo <= self.hi {
                if k.rem_euclid(2) == 0 {
                    hi = 1.0;
                } else {
                    lo = -1.0;
                }
            }
        }
        Self::sanitized(lo.max(-1.0), hi.min(1.0))
    }

    pub fn cos(self) -> Interval {
        let half_pi = Interval { lo: PI_LO / 2.0, hi: PI_HI / 2.0 };
        self.add(half_pi).sin()
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{:e}, {:e}]", self.lo, self.hi)
    }
}

/// Infinite bounds become the strings `"-inf"` / `"inf"`.
pub(crate) fn serialize_extended<S: Serializer>(x: &f64, s: S) -> Result<S::Ok, S::Error> {
    if x.is_finite() {
        s.serialize_f64(*x)
    } else if *x > 0.0 {
        s.serialize_str("inf")
    } else {
        s.serialize_str("-inf")
    }
}

impl Serialize for Interval {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        struct Ext(f64);
        impl Serialize for Ext {
            fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
                serialize_extended(&self.0, s)
            }
        }
        let mut st = s.serialize_struct("Interval", 2)?;
        st.serialize_field("lo", &Ext(self.lo))?;
        st.serialize_field("hi", &Ext(self.hi))?;
        st.end()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pi_bracket_is_tight_and_ordered() {
        assert_eq!(PI_LO.next_up(), PI_HI);
        assert!(Interval::pi().is_subset_of(&Interval::new(3.14159, 3.1416)));
    }

    #[test]
    fn exact_operations_are_not_widened() {
        let one = Interval::point(1.0);
        assert_eq!(one.add(one), Interval::point(2.0));
        assert_eq!(Interval::point(3.0).mul(Interval::point(0.5)), Interval::point(1.5));
        assert_eq!(Interval::point(0.0).exp(), one);
        assert_eq!(Interval::point(4.0).recip(), Interval::point(0.25));
    }

    #[test]
    fn inexact_sum_is_widened() {
        let s = Interval::point(0.1).add(Interval::point(0.2));
        assert!(s.lo() < 0.1 + 0.2 && s.hi() > 0.1 + 0.2);
        assert!(s.contains(0.3));
    }

    #[test]
    fn zero_times_infinity_is_zero() {
        let z = Interval::point(0.0).mul(Interval::ENTIRE);
        assert_eq!(z, Interval::point(0.0));
        let half = Interval::new(0.0, f64::INFINITY).mul(Interval::new(-1.0, 2.0));
        assert_eq!(half, Interval::ENTIRE);
    }

    #[test]
    fn infinite_sums_do_not_produce_nan() {
        let s = Interval::ENTIRE.add(Interval::ENTIRE);
        assert_eq!(s, Interval::ENTIRE);
        let t = Interval::new(f64::INFINITY, f64::INFINITY).add(Interval::new(f64::NEG_INFINITY, f64::NEG_INFINITY));
        assert_eq!(t, Interval::ENTIRE);
    }

    #[test]
    fn sin_of_pi_is_near_zero() {
        let s = Interval::pi().sin();
        assert!(s.contains_zero());
        assert!(s.width() <= 1e-12);
    }

    #[test]
    fn sin_captures_interior_extrema() {
        let s = Interval::new(1.0, 2.0).sin();
        assert_eq!(s.hi(), 1.0);
        assert!(s.lo() <= 1f64.sin());
        let c = Interval::new(-0.5, 0.5).cos();
        assert_eq!(c.hi(), 1.0);
        let n = Interval::new(4.0, 5.0).sin();
        assert_eq!(n.lo(), -1.0);
        let m = Interval::new(-2.0, -1.0).sin();
        assert_eq!(m.lo(), -1.0);
    }

    #[test]
    fn exp_bounds() {
        assert_eq!(Interval::new(f64::NEG_INFINITY, 0.0).exp(), Interval::new(0.0, 1.0));
        let big = Interval::point(800.0).exp();
        assert_eq!(big.hi(), f64::INFINITY);
        assert!(big.lo() >= f64::MAX);
    }

    #[test]
    fn reciprocal_of_straddling_interval_is_entire() {
        assert_eq!(Interval::new(-1.0, 1.0).recip(), Interval::ENTIRE);
        assert_eq!(Interval::new(0.0, 2.0).recip().hi(), f64::INFINITY);
    }

    #[test]
    fn square_of_straddling_interval_starts_at_zero() {
        let s = Interval::new(-2.0, 1.0).sqr();
        assert_eq!(s, Interval::new(0.0, 4.0));
    }

    #[test]
    fn serializes_infinite_bounds_as_strings() {
        let json = serde_json::to_string(&Interval::new(f64::NEG_INFINITY, 1.5)).unwrap();
        assert_eq!(json, r#"{"lo":"-inf","hi":1.5}"#);
    }
}
