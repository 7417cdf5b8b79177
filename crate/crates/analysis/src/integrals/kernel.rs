use super::{BoundaryFunction, Builtin, GrowthCertificate, IntegralError};
use crate::delta1::interval::up;
use crate::delta1::{Expr, Interval};
use crate::quad;
use serde::Serialize;
use std::f64::consts::{FRAC_PI_2, PI};

/// Evaluation point: `(x0, t0)` for heat, `(x0, y0)` for electrostatics.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Point {
    pub x0: f64,
    pub param: f64,
}

impl Point {
    pub fn new(x0: f64, param: f64) -> Self {
        Self { x0, param }
    }
}

/// Relative slack on panel mass bounds computed in floating point.
const MASS_SLACK: f64 = 1.0 + 1e-12;

/// An integral kernel `∫ K(x0, p; y) f(y) dy` over the real line.
pub trait Kernel: Send + Sync {
    fn name(&self) -> &'static str;

    /// Name of the second coordinate of [`Point`].
    fn param_name(&self) -> &'static str;

    fn check_point(&self, p: Point) -> Result<(), IntegralError>;

    /// Enclosure of `|K(y)|` over `y`.
    fn weight(&self, p: Point, y: Interval) -> Interval;

    /// `sup_y |K(y)|`.
    fn sup_weight(&self, p: Point) -> f64;

    /// Certified growth divergence of the integral, if this kernel has one
    /// for `f`.
    fn growth_certificate(&self, f: &BoundaryFunction, p: Point) -> Option<GrowthCertificate>;

    /// Enclosure of the log of the integrand named in this kernel's growth
    /// certificates.
    fn log_growth_integrand(&self, f: &BoundaryFunction, p: Point, y: Interval) -> Interval;

    /// Value and error bound, given `|f| ≤ sup` on the whole line.
    fn integrate(&self, f: &BoundaryFunction, p: Point, tol: f64, sup: f64) -> Option<(f64, f64)>;

    /// A second, independently discretised representation, if any.
    fn integrate_normalized(&self, _f: &BoundaryFunction, _p: Point, _tol: f64, _sup: f64) -> Option<(f64, f64)> {
        None
    }

    /// Boundary data whose finiteness is undecidable, built from `h`.
    fn family_member(&self, h: Expr) -> BoundaryFunction;
}

fn check_finite(p: Point) -> Result<(), IntegralError> {
    if p.x0.is_finite() && p.param.is_finite() {
        Ok(())
    } else {
        Err(IntegralError::NonFinitePoint)
    }
}

/// `ray_start` past the larger root and the vertex of `a y² + b y + c`.
fn ray_start(a: f64, b: f64, c: f64) -> f64 {
    let vertex = -b / (2.0 * a);
    let disc = b * b - 4.0 * a * c;
    let root = if disc >= 0.0 { (-b + disc.sqrt()) / (2.0 * a) } else { vertex };
    root.max(vertex).max(0.0) + 1.0
}

/// `u(x0, t0) = (4π t0)^(-1/2) ∫ exp(-(x0 - y)² / 4t0) f(y) dy`.
pub struct Heat;

impl Heat {
    fn prefactor(t0: f64) -> f64 {
        1.0 / (2.0 * (PI * t0).sqrt())
    }
}

impl Kernel for Heat {
    fn name(&self) -> &'static str {
        "heat"
    }

    fn param_name(&self) -> &'static str {
        "t0"
    }

    fn check_point(&self, p: Point) -> Result<(), IntegralError> {
        check_finite(p)?;
        if p.param > 0.0 {
            Ok(())
        } else {
            Err(IntegralError::NonPositiveTime(p.param))
        }
    }

    fn weight(&self, p: Point, y: Interval) -> Interval {
        let scale = Interval::around(-1.0 / (4.0 * p.param));
        let e = y.sub(Interval::point(p.x0)).sqr().mul(scale).exp();
        Interval::around(Self::prefactor(p.param)).mul(e)
    }

    fn sup_weight(&self, p: Point) -> f64 {
        up(Self::prefactor(p.param))
    }

    /// For `f = exp(y²)` and `t0 > 1` the exponent bound is
    /// `(3/4) y² + x0 y / 2 - x0² / 4`; for `1/4 < t0 ≤ 1` the exact exponent
    /// is used.
    fn growth_certificate(&self, f: &BoundaryFunction, p: Point) -> Option<GrowthCertificate> {
        if f != &BoundaryFunction::Builtin(Builtin::GaussSq) || p.param <= 0.25 {
            return None;
        }
        let (x0, t0) = (p.x0, p.param);
        let (a, b, c) = if t0 > 1.0 {
            (0.75, x0 / 2.0, -(x0 * x0) / 4.0)
        } else {
            (1.0 - 1.0 / (4.0 * t0), x0 / (2.0 * t0), -(x0 * x0) / (4.0 * t0))
        };
        Some(GrowthCertificate {
            integrand: "exp(-(x0 - y)^2 / (4 t0)) * f(y)".into(),
            ray_start: ray_start(a, b, c),
            quadratic: a,
            linear: b,
            constant: c,
            log_coefficient: 0.0,
        })
    }

    fn log_growth_integrand(&self, f: &BoundaryFunction, p: Point, y: Interval) -> Interval {
        let scale = Interval::around(-1.0 / (4.0 * p.param));
        y.sub(Interval::point(p.x0)).sqr().mul(scale).add(f.enclose_ln_abs(y))
    }

    /// Integrates `π^(-1/2) ∫ exp(-s²) f(x0 + 2 √t0 s) ds` on `[-S, S]`,
    /// with `S` chosen so that both tails together stay below `tol / 4`.
    fn integrate(&self, f: &BoundaryFunction, p: Point, tol: f64, sup: f64) -> Option<(f64, f64)> {
        let root_pi = PI.sqrt();
        let scale = 2.0 * p.param.sqrt();
        let tail = |s: f64| sup * (-s * s).exp() / (s * root_pi);
        let s_max = (4..=160).map(|i| i as f64 * 0.25).find(|&s| tail(s) <= tol / 4.0)?;
        let g = |s: f64| (-s * s).exp() * f.value(p.x0 + scale * s) / root_pi;
        let mass = |a: f64, b: f64| {
            let m = Interval::new(a, b).mig();
            sup * (b - a) * (-m * m).exp() / root_pi * MASS_SLACK
        };
        let breaks: Vec<f64> = (0..=16).map(|i| -s_max + s_max * i as f64 / 8.0).collect();
        let r = quad::integrate_with_bound(g, mass, &breaks, tol / 2.0, 20_000);
        r.converged.then(|| (r.value, r.error + tail(s_max)))
    }

    fn family_member(&self, h: Expr) -> BoundaryFunction {
        BoundaryFunction::CauchyReciprocal2(h)
    }
}

/// `Φ(x0, y0) = (y0 / π) ∫ f(t) / ((t - x0)² + y0²) dt`.
pub struct Electro;

impl Kernel for Electro {
    fn name(&self) -> &'static str {
        "electro"
    }

    fn param_name(&self) -> &'static str {
        "y0"
    }

    fn check_point(&self, p: Point) -> Result<(), IntegralError> {
        check_finite(p)?;
        if p.param != 0.0 {
            Ok(())
        } else {
            Err(IntegralError::ZeroHeight)
        }
    }

    fn weight(&self, p: Point, y: Interval) -> Interval {
        let h = Interval::point(p.param.abs());
        let denom = y.sub(Interval::point(p.x0)).sqr().add(h.sqr());
        h.mul(Interval::around(1.0 / PI)).mul(denom.recip())
    }

    fn sup_weight(&self, p: Point) -> f64 {
        up(1.0 / (PI * p.param.abs()))
    }

    /// For `f = exp(t²)` and `t ≥ |x0| + |y0| + 1`, `(t - x0)² + y0² ≤ 5 t²`.
    fn growth_certificate(&self, f: &BoundaryFunction, p: Point) -> Option<GrowthCertificate> {
        if f != &BoundaryFunction::Builtin(Builtin::GaussSq) {
            return None;
        }
        let h = p.param.abs();
        Some(GrowthCertificate {
            integrand: "|y0| exp(t^2) / (pi ((t - x0)^2 + y0^2))".into(),
            ray_start: p.x0.abs() + h + 1.0,
            quadratic: 1.0,
            linear: 0.0,
            constant: (h / (5.0 * PI)).ln() - 1e-12,
            log_coefficient: 2.0,
        })
    }

    fn log_growth_integrand(&self, f: &BoundaryFunction, p: Point, y: Interval) -> Interval {
        self.weight(p, y).ln().add(f.enclose_ln_abs(y))
    }

    /// Truncates to `|t - x0| ≤ R` with the kernel tail mass
    /// `(2/π) atan(|y0| / R) · sup` kept below `tol / 4`.
    fn integrate(&self, f: &BoundaryFunction, p: Point, tol: f64, sup: f64) -> Option<(f64, f64)> {
        let (x0, y0) = (p.x0, p.param);
        let h = y0.abs();
        let reach = (8.0 * sup * h / (PI * tol)).max(16.0 * h);
        let tail = sup * (2.0 / PI) * (h / reach).atan();
        let mut breaks = vec![x0 - reach, x0, x0 + reach];
        let mut d = h / 16.0;
        while d < reach {
            breaks.extend([x0 - d, x0 + d]);
            d *= 2.0;
        }
        breaks.sort_by(f64::total_cmp);
        let g = |t: f64| {
            let u = t - x0;
            y0 / PI * f.value(t) / (u * u + y0 * y0)
        };
        let mass = |a: f64, b: f64| sup * (((b - x0) / h).atan() - ((a - x0) / h).atan()) / PI * MASS_SLACK + 1e-300;
        let r = quad::integrate_with_bound(g, mass, &breaks, tol / 2.0, 50_000);
        r.converged.then(|| (r.value, r.error + tail))
    }

    /// `sign(y0)/π ∫ f(x0 + y0 u) / (u² + 1) du`, integrated in `θ = atan u`.
    fn integrate_normalized(&self, f: &BoundaryFunction, p: Point, tol: f64, sup: f64) -> Option<(f64, f64)> {
        let (x0, y0) = (p.x0, p.param);
        let eps = (PI * tol / (8.0 * sup.max(f64::MIN_POSITIVE))).min(0.1);
        let tail = 2.0 * eps * sup / PI;
        let (lo, hi) = (-FRAC_PI_2 + eps, FRAC_PI_2 - eps);
        let breaks: Vec<f64> = (0..=32).map(|i| lo + (hi - lo) * i as f64 / 32.0).collect();
        let g = |theta: f64| y0.signum() / PI * f.value(x0 + y0 * theta.tan());
        let mass = |a: f64, b: f64| sup * (b - a) / PI * MASS_SLACK;
        let r = quad::integrate_with_bound(g, mass, &breaks, tol / 2.0, 50_000);
        r.converged.then(|| (r.value, r.error + tail))
    }

    fn family_member(&self, h: Expr) -> BoundaryFunction {
        BoundaryFunction::Reciprocal2(h)
    }
}

static HEAT: Heat = Heat;
static ELECTRO: Electro = Electro;
static REGISTRY: [&dyn Kernel; 2] = [&HEAT, &ELECTRO];

/// Every registered kernel.
pub fn kernels() -> &'static [&'static dyn Kernel] {
    &REGISTRY
}

pub fn kernel(name: &str) -> Option<&'static dyn Kernel> {
    REGISTRY.iter().copied().find(|k| k.name() == name)
}
