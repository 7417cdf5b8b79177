//! Fixed-point big-integer evaluator used as an independent oracle.
//! Values are integers scaled by 2^PREC; intermediate magnitudes are capped so
//! that the accumulated truncation error stays far below 2^-(PREC - SLACK_BITS).

#![allow(dead_code)]

use num_bigint::{BigInt, Sign};
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::sync::OnceLock;
use uncomp_analysis::delta1::{Expr, Interval};

pub const PREC: u32 = 576;
/// Containment is checked up to 2^-(PREC - SLACK_BITS).
pub const SLACK_BITS: u32 = 276;
const MAG_CAP_BITS: u64 = 80;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Fixed(pub BigInt);

fn one() -> BigInt {
    BigInt::one() << PREC
}

impl Fixed {
    pub fn from_f64(x: f64) -> Fixed {
        assert!(x.is_finite());
        if x == 0.0 {
            return Fixed(BigInt::zero());
        }
        let bits = x.to_bits();
        let sign = if bits >> 63 == 1 { -1 } else { 1 };
        let exp = ((bits >> 52) & 0x7ff) as i64;
        let frac = bits & ((1u64 << 52) - 1);
        let (mant, e) = if exp == 0 { (frac, -1074) } else { (frac | (1 << 52), exp - 1075) };
        let m = BigInt::from(mant) * sign;
        let shift = e + PREC as i64;
        Fixed(if shift >= 0 { m << shift as usize } else { m >> (-shift) as usize })
    }

    pub fn from_ratio(p: i64, q: i64) -> Fixed {
        Fixed((BigInt::from(p) << PREC) / BigInt::from(q))
    }

    pub fn to_f64(&self) -> f64 {
        let shift = self.0.bits().saturating_sub(60);
        let top = (&self.0 >> shift as usize).to_f64().unwrap();
        top * 2f64.powi(shift as i32 - PREC as i32)
    }

    fn mag_ok(&self) -> bool {
        self.0.bits() <= (PREC as u64) + MAG_CAP_BITS
    }

    pub fn add(&self, o: &Fixed) -> Fixed {
        Fixed(&self.0 + &o.0)
    }

    pub fn mul(&self, o: &Fixed) -> Fixed {
        Fixed((&self.0 * &o.0) >> PREC as usize)
    }
}

fn atan_inv(n: u32) -> BigInt {
    let mut term = one() / n;
    let mut sum = term.clone();
    let n2 = BigInt::from(n) * n;
    let mut k = 1u32;
    while !term.is_zero() {
        term /= &n2;
        let t = &term / (2 * k + 1);
        if k % 2 == 1 {
            sum -= t;
        } else {
            sum += t;
        }
        k += 1;
    }
    sum
}

pub fn pi() -> Fixed {
    static PI: OnceLock<BigInt> = OnceLock::new();
    Fixed(PI.get_or_init(|| atan_inv(5) * 16 - atan_inv(239) * 4).clone())
}

pub fn exp(x: &Fixed) -> Option<Fixed> {
    if x.0.abs() > BigInt::from(60) << PREC {
        return None;
    }
    // exp(x) = exp(x / 2^k)^(2^k)
    let k = 70;
    let r = Fixed(&x.0 >> k as usize);
    let mut term = Fixed(one());
    let mut sum = term.clone();
    let mut i = 1u32;
    loop {
        term = Fixed(term.mul(&r).0 / i);
        if term.0.is_zero() {
            break;
        }
        sum = sum.add(&term);
        i += 1;
    }
    for _ in 0..k {
        sum = sum.mul(&sum);
    }
    Some(sum)
}

pub fn sin(x: &Fixed) -> Option<Fixed> {
    if x.0.abs() > BigInt::from(1u64 << 40) << PREC {
        return None;
    }
    let two_pi = Fixed(pi().0 * 2);
    // Nearest multiple of 2π.
    let n = (&x.0 + (&two_pi.0 >> 1usize)).div_floor_big(&two_pi.0);
    let r = Fixed(&x.0 - n * &two_pi.0);
    let r2 = r.mul(&r);
    let mut term = r.clone();
    let mut sum = r;
    let mut i = 1u32;
    loop {
        term = Fixed(term.mul(&r2).0 / ((2 * i) * (2 * i + 1)));
        if term.0.is_zero() {
            break;
        }
        sum = if i % 2 == 1 { Fixed(&sum.0 - &term.0) } else { sum.add(&term) };
        i += 1;
    }
    Some(sum)
}

trait DivFloor {
    fn div_floor_big(&self, d: &BigInt) -> BigInt;
}

impl DivFloor for BigInt {
    fn div_floor_big(&self, d: &BigInt) -> BigInt {
        let (q, r) = (self / d, self % d);
        if r.sign() == Sign::Minus {
            q - 1
        } else {
            q
        }
    }
}

/// High-precision value of `e` at `x1 = x`, or `None` outside the oracle's range.
pub fn eval(e: &Expr, x: &Fixed) -> Option<Fixed> {
    let v = match e {
        Expr::Rational(r) => Fixed::from_ratio(*r.numer(), *r.denom()),
        Expr::Pi => pi(),
        Expr::Var(1) => x.clone(),
        Expr::Var(_) => return None,
        Expr::Add(a, b) => eval(a, x)?.add(&eval(b, x)?),
        Expr::Mul(a, b) => eval(a, x)?.mul(&eval(b, x)?),
        Expr::Sin(a) => sin(&eval(a, x)?)?,
        Expr::Exp(a) => exp(&eval(a, x)?)?,
    };
    v.mag_ok().then_some(v)
}

/// Whether `v` lies in `iv`, allowing the oracle's own truncation slack.
pub fn contained(v: &Fixed, iv: Interval) -> bool {
    let slack = BigInt::one() << (PREC - SLACK_BITS);
    let lo_ok = !iv.lo().is_finite() || Fixed::from_f64(iv.lo()).0 - &slack <= v.0;
    let hi_ok = !iv.hi().is_finite() || v.0 <= Fixed::from_f64(iv.hi()).0 + &slack;
    lo_ok && hi_ok
}

/// Sign of `v` when it is clearly away from zero.
pub fn sign(v: &Fixed) -> Option<i32> {
    let slack = BigInt::one() << (PREC - SLACK_BITS);
    if v.0 > slack {
        Some(1)
    } else if v.0 < -slack {
        Some(-1)
    } else {
        None
    }
}
