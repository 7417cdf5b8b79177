//! Heat-kernel and Poisson-kernel integrals of boundary data, evaluated by
//! adaptive quadrature with bounded tails, plus a three-valued finiteness
//! classification whose decided answers carry certificates.

mod boundary;
mod kernel;
mod sequence;

pub use boundary::{BoundaryError, BoundaryFunction, Builtin};
pub use kernel::{kernel, kernels, Electro, Heat, Kernel, Point};
pub use sequence::{verdict_sequence, sequence_csv, Problem, SequenceBit, SequenceEntry};

use crate::delta1::interval::{serialize_extended, up};
use crate::delta1::{
    global_search, pole_certificate, tangent_midpoint, Expr, GlobalOutcome, Interval, PoleCertificate, PI_HI,
    DIVERGENCE_THRESHOLD,
};
use crate::quad;
use serde::Serialize;
use std::collections::VecDeque;
use thiserror::Error;

pub const DEFAULT_TOL: f64 = 1e-6;
pub const DEFAULT_BUDGET: u32 = 14;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum IntegralError {
    #[error("t0 must be positive, got {0}")]
    NonPositiveTime(f64),
    #[error("y0 must be non-zero")]
    ZeroHeight,
    #[error("evaluation point must be finite")]
    NonFinitePoint,
    #[error("tolerance must be positive, got {0}")]
    NonPositiveTolerance(f64),
    #[error("unknown kernel `{0}`")]
    UnknownKernel(String),
    #[error(transparent)]
    Boundary(#[from] BoundaryError),
}

/// `log |integrand(y)| ≥ quadratic·y² + linear·y + constant − log_coefficient·ln y`
/// for every `y ≥ ray_start`, with `quadratic > 0`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GrowthCertificate {
    pub integrand: String,
    pub ray_start: f64,
    pub quadratic: f64,
    pub linear: f64,
    pub constant: f64,
    pub log_coefficient: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum DivergenceCertificate {
    /// Pole of `f = H⁻²` (times positive factors) at a certified root of `H`.
    Pole { factor: Expr, certificate: PoleCertificate },
    Growth(GrowthCertificate),
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "verdict", rename_all = "kebab-case")]
pub enum Classification {
    /// `|value| ≤ bound`.
    Finite {
        #[serde(serialize_with = "serialize_extended")]
        bound: f64,
    },
    Divergent {
        certificate: DivergenceCertificate,
    },
    Unknown {
        reason: String,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CrossCheck {
    pub normalized: f64,
    pub normalized_error: f64,
    pub difference: f64,
    pub agree: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "outcome", rename_all = "kebab-case")]
pub enum EvalOutcome {
    Value {
        estimate: f64,
        error_bound: f64,
        #[serde(skip_serializing_if = "Option::is_none")]
        cross_check: Option<CrossCheck>,
    },
    Divergent {
        certificate: DivergenceCertificate,
    },
    Unknown {
        reason: String,
    },
}

impl Classification {
    pub fn is_decided(&self) -> bool {
        !matches!(self, Classification::Unknown { .. })
    }
}

impl EvalOutcome {
    pub fn value(&self) -> Option<f64> {
        match self {
            EvalOutcome::Value { estimate, .. } => Some(*estimate),
            _ => None,
        }
    }
}

/// What is known about `f` on the real line, independent of the kernel
/// except for the weight used in pole certificates.
enum Shape {
    /// `|f| ≤ sup`; `mass` bounds `∫|f|` when known.
    Bounded { sup: f64, mass: Option<f64> },
    Pole(DivergenceCertificate),
    Unresolved(String),
}

/// Largest `|e(x)|` over the real line, found by subdividing in `atan x`.
fn expr_sup(e: &Expr, budget: u32) -> Option<f64> {
    let mut queue = VecDeque::from([(Interval::ENTIRE, 0)]);
    let mut sup = 0.0f64;
    while let Some((b, depth)) = queue.pop_front() {
        let m = e.enclose(&[b]).mag();
        if m.is_finite() {
            sup = sup.max(m);
            continue;
        }
        if depth >= budget {
            return None;
        }
        let mid = tangent_midpoint(&b);
        queue.push_back((Interval::new(b.lo(), mid), depth + 1));
        queue.push_back((Interval::new(mid, b.hi()), depth + 1));
    }
    Some(sup)
}

fn shape(k: &dyn Kernel, f: &BoundaryFunction, point: Point, budget: u32) -> Shape {
    match f {
        BoundaryFunction::Builtin(Builtin::One) | BoundaryFunction::Builtin(Builtin::Cauchy) => {
            Shape::Bounded { sup: 1.0, mass: (f == &BoundaryFunction::Builtin(Builtin::Cauchy)).then_some(PI_HI) }
        }
        BoundaryFunction::Builtin(Builtin::GaussSq) => Shape::Unresolved("unbounded boundary data".into()),
        BoundaryFunction::Delta1(e) => match expr_sup(e, budget) {
            Some(sup) => Shape::Bounded { sup, mass: None },
            None => Shape::Unresolved("no finite bound on the boundary data within budget".into()),
        },
        BoundaryFunction::Reciprocal2(h) | BoundaryFunction::CauchyReciprocal2(h) => {
            let cauchy = matches!(f, BoundaryFunction::CauchyReciprocal2(_));
            match global_search(h, budget) {
                GlobalOutcome::Root(bracket) => {
                    let weight = |y: Interval| {
                        let w = k.weight(point, y);
                        if cauchy {
                            w.mul(y.sqr().add(Interval::point(1.0)).recip())
                        } else {
                            w
                        }
                    };
                    match pole_certificate(h, bracket, weight) {
                        Some(certificate) => Shape::Pole(DivergenceCertificate::Pole { factor: h.clone(), certificate }),
                        None => Shape::Unresolved("root found but no slope bound".into()),
                    }
                }
                GlobalOutcome::Bounded(cert) => {
                    let inv = Interval::point(cert.delta).sqr().recip().hi();
                    Shape::Bounded { sup: inv, mass: cauchy.then(|| up(PI_HI * inv)) }
                }
                GlobalOutcome::Unresolved(n) => Shape::Unresolved(format!("{n} boxes unresolved within budget")),
            }
        }
        BoundaryFunction::Linear(terms) => {
            let mut sup = 0.0;
            for (c, g) in terms {
                match shape(k, g, point, budget) {
                    Shape::Bounded { sup: s, .. } => sup = up(sup + c.abs() * s),
                    _ => return Shape::Unresolved("linear combination with an unbounded term".into()),
                }
            }
            Shape::Bounded { sup, mass: None }
        }
    }
}

/// Three-valued finiteness of the kernel integral of `f` at `point`.
pub fn classify(k: &dyn Kernel, f: &BoundaryFunction, point: Point, budget: u32) -> Result<Classification, IntegralError> {
    k.check_point(point)?;
    if let Some(certificate) = k.growth_certificate(f, point) {
        return Ok(Classification::Divergent { certificate: DivergenceCertificate::Growth(certificate) });
    }
    Ok(match shape(k, f, point, budget) {
        Shape::Bounded { sup, mass } => {
            let via_mass = mass.map_or(f64::INFINITY, |m| up(m * k.sup_weight(point)));
            Classification::Finite { bound: sup.min(via_mass) }
        }
        Shape::Pole(certificate) => Classification::Divergent { certificate },
        Shape::Unresolved(reason) => Classification::Unknown { reason },
    })
}

/// Evaluates the kernel integral of `f` at `point` to absolute accuracy `tol`.
pub fn evaluate(
    k: &dyn Kernel,
    f: &BoundaryFunction,
    point: Point,
    tol: f64,
    budget: u32,
    cross_check: bool,
) -> Result<EvalOutcome, IntegralError> {
    k.check_point(point)?;
    if !(tol > 0.0) {
        return Err(IntegralError::NonPositiveTolerance(tol));
    }
    if let Some(certificate) = k.growth_certificate(f, point) {
        return Ok(EvalOutcome::Divergent { certificate: DivergenceCertificate::Growth(certificate) });
    }
    let sup = match shape(k, f, point, budget) {
        Shape::Bounded { sup, .. } => sup,
        Shape::Pole(certificate) => return Ok(EvalOutcome::Divergent { certificate }),
        Shape::Unresolved(reason) => return Ok(EvalOutcome::Unknown { reason }),
    };
    let Some((estimate, error_bound)) = k.integrate(f, point, tol, sup) else {
        return Ok(EvalOutcome::Unknown { reason: "quadrature did not reach the tolerance".into() });
    };
    let cross_check = match cross_check.then(|| k.integrate_normalized(f, point, tol, sup)).flatten() {
        Some((normalized, normalized_error)) => {
            let difference = (normalized - estimate).abs();
            let agree = difference <= 2.0 * tol;
            if !agree {
                return Ok(EvalOutcome::Unknown {
                    reason: format!("representations disagree: {estimate} vs {normalized}"),
                });
            }
            Some(CrossCheck { normalized, normalized_error, difference, agree })
        }
        None => None,
    };
    Ok(EvalOutcome::Value { estimate, error_bound, cross_check })
}

pub fn heat_eval(f: &BoundaryFunction, x0: f64, t0: f64, tol: f64) -> Result<EvalOutcome, IntegralError> {
    evaluate(&Heat, f, Point::new(x0, t0), tol, DEFAULT_BUDGET, false)
}

pub fn heat_classify(f: &BoundaryFunction, x0: f64, t0: f64, budget: u32) -> Result<Classification, IntegralError> {
    classify(&Heat, f, Point::new(x0, t0), budget)
}

pub fn electro_eval(
    f: &BoundaryFunction,
    x0: f64,
    y0: f64,
    tol: f64,
    check_normalized: bool,
) -> Result<EvalOutcome, IntegralError> {
    evaluate(&Electro, f, Point::new(x0, y0), tol, DEFAULT_BUDGET, check_normalized)
}

pub fn electro_classify(f: &BoundaryFunction, x0: f64, y0: f64, budget: u32) -> Result<Classification, IntegralError> {
    classify(&Electro, f, Point::new(x0, y0), budget)
}

impl GrowthCertificate {
    fn bound(&self, y: Interval) -> Interval {
        let q = Interval::point(self.quadratic).mul(y.sqr());
        let l = Interval::point(self.linear).mul(y);
        let d = Interval::point(self.log_coefficient).mul(y.ln());
        q.add(l).add(Interval::point(self.constant)).sub(d)
    }

    fn bound_f64(&self, y: f64) -> f64 {
        self.quadratic * y * y + self.linear * y + self.constant - self.log_coefficient * y.ln()
    }

    /// Spot-checks the inequality on the ray and integrates `exp(bound)`
    /// numerically until it passes [`DIVERGENCE_THRESHOLD`].
    pub fn verify(&self, log_integrand: impl Fn(Interval) -> Interval) -> bool {
        if !(self.quadratic > 0.0 && self.ray_start > 0.0) {
            return false;
        }
        let holds = (0..64).all(|i| {
            let y = Interval::point(self.ray_start + 0.25 * i as f64);
            let b = self.bound(y).hi();
            log_integrand(y).lo() >= b - 1e-9 * (1.0 + b.abs())
        });
        if !holds {
            return false;
        }
        // The integrand is at least exp(min bound) on [ray_start, ray_start + 1].
        if self.bound(Interval::new(self.ray_start, self.ray_start + 1.0)).lo() > DIVERGENCE_THRESHOLD.ln() {
            return true;
        }
        let mut end = self.ray_start + 0.5;
        while end < self.ray_start + 1e4 {
            let r = quad::integrate(|y| self.bound_f64(y).exp(), self.ray_start, end, 0.25 * DIVERGENCE_THRESHOLD, 2000);
            if r.converged && r.value - r.error > DIVERGENCE_THRESHOLD {
                return true;
            }
            if !r.value.is_finite() {
                return false;
            }
            end += 0.5;
        }
        false
    }
}

impl DivergenceCertificate {
    /// Re-verifies the certificate against the kernel and boundary data.
    pub fn verify(&self, k: &dyn Kernel, f: &BoundaryFunction, point: Point) -> bool {
        match self {
            DivergenceCertificate::Growth(c) => c.verify(|y| k.log_growth_integrand(f, point, y)),
            DivergenceCertificate::Pole { factor, certificate } => {
                let cauchy = match f {
                    BoundaryFunction::Reciprocal2(h) if h == factor => false,
                    BoundaryFunction::CauchyReciprocal2(h) if h == factor => true,
                    _ => return false,
                };
                certificate.verify(factor, |y| {
                    let w = k.weight(point, y);
                    if cauchy {
                        w.mul(y.sqr().add(Interval::point(1.0)).recip())
                    } else {
                        w
                    }
                })
            }
        }
    }
}
