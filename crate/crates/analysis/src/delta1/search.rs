//! Sound semi-decision procedures for root existence and for convergence of
//! `∫ dx / ((x² + 1) G(x)²)`.
//!
//! Both searches bisect a parameter interval breadth first. A box is pruned
//! when the enclosure of `G` excludes zero; a root is certified when `G` has
//! strictly opposite signs at two evaluation points.

use super::expr::Expr;
use super::interval::{serialize_extended, up, Interval, PI_HI};
use crate::quad;
use serde::Serialize;
use std::collections::VecDeque;
use std::f64::consts::FRAC_PI_2;

/// Threshold that a divergence certificate's partial integral must pass.
pub const DIVERGENCE_THRESHOLD: f64 = 1e6;

/// Bisection steps spent tightening a root bracket.
const REFINE_STEPS: u32 = 48;

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "verdict", rename_all = "kebab-case")]
pub enum RootVerdict {
    HasRoot {
        witness: Interval,
        value_left: Interval,
        value_right: Interval,
    },
    NoRootInBox {
        domain: Interval,
        delta: f64,
        cover: Vec<Interval>,
    },
    Unknown {
        domain: Interval,
        depth_budget: u32,
        unresolved: usize,
    },
}

/// Lower bound `weight / (slope² (x - r)²)` on the integrand over
/// `neighborhood`, for some root `r` of `G` inside `bracket`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PoleCertificate {
    pub bracket: Interval,
    pub neighborhood: Interval,
    pub slope_bound: f64,
    pub weight_lower: f64,
}

/// `|G| ≥ delta` on every box of `cover`; the boxes tile `domain`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LowerBoundCertificate {
    pub domain: Interval,
    pub delta: f64,
    pub cover: Vec<Interval>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "verdict", rename_all = "kebab-case")]
pub enum ConvergenceVerdict {
    Finite {
        #[serde(serialize_with = "serialize_extended")]
        upper_bound: f64,
        certificate: LowerBoundCertificate,
    },
    Divergent {
        certificate: PoleCertificate,
    },
    Unknown {
        depth_budget: u32,
        unresolved: usize,
    },
}

impl RootVerdict {
    pub fn is_decided(&self) -> bool {
        !matches!(self, RootVerdict::Unknown { .. })
    }
}

impl ConvergenceVerdict {
    pub fn is_decided(&self) -> bool {
        !matches!(self, ConvergenceVerdict::Unknown { .. })
    }
}

fn value_at(g: &Expr, x: f64) -> Interval {
    if x.is_finite() {
        g.enclose(&[Interval::point(x)])
    } else {
        Interval::ENTIRE
    }
}

fn sign_at(g: &Expr, x: f64) -> Option<f64> {
    value_at(g, x).sign()
}

fn opposite(a: Option<f64>, b: Option<f64>) -> bool {
    matches!((a, b), (Some(p), Some(q)) if p != q)
}

/// Monotone map from the search parameter to the real line.
#[derive(Clone, Copy)]
enum Coordinates {
    Identity,
    /// `x = tan θ`, with `θ = ±π/2` mapped to `±∞`.
    Tangent,
}

impl Coordinates {
    fn to_x(self, u: f64) -> f64 {
        match self {
            Coordinates::Identity => u,
            Coordinates::Tangent if u <= -FRAC_PI_2 => f64::NEG_INFINITY,
            Coordinates::Tangent if u >= FRAC_PI_2 => f64::INFINITY,
            Coordinates::Tangent => u.tan(),
        }
    }
}

struct Node {
    u: (f64, f64),
    x: (f64, f64),
    sign: (Option<f64>, Option<f64>),
    depth: u32,
}

enum SearchOutcome {
    Bracket { a: f64, b: f64 },
    Cover { cover: Vec<Interval>, delta: f64 },
    Unresolved(usize),
}

const SPLIT_RATIOS: [f64; 5] = [0.5, 0.375, 0.625, 0.3125, 0.6875];

/// Picks a split point, preferring one where the sign of `G` is certain.
fn split(g: &Expr, coords: Coordinates, node: &Node) -> Option<(f64, f64, Option<f64>)> {
    let mut fallback = None;
    for r in SPLIT_RATIOS {
        let u = node.u.0 + (node.u.1 - node.u.0) * r;
        let x = coords.to_x(u);
        if !(u > node.u.0 && u < node.u.1 && x > node.x.0 && x < node.x.1) {
            continue;
        }
        let s = sign_at(g, x);
        if s.is_some() {
            return Some((u, x, s));
        }
        fallback.get_or_insert((u, x, None));
    }
    fallback
}

fn branch_and_prune(g: &Expr, coords: Coordinates, domain: (f64, f64), depth_budget: u32) -> SearchOutcome {
    let (x0, x1) = (coords.to_x(domain.0), coords.to_x(domain.1));
    let mut queue = VecDeque::from([Node {
        u: domain,
        x: (x0, x1),
        sign: (sign_at(g, x0), sign_at(g, x1)),
        depth: 0,
    }]);
    let mut cover = Vec::new();
    let mut delta = f64::INFINITY;
    let mut unresolved = 0;
    while let Some(node) = queue.pop_front() {
        if opposite(node.sign.0, node.sign.1) {
            return SearchOutcome::Bracket { a: node.x.0, b: node.x.1 };
        }
        let range = Interval::new(node.x.0, node.x.1);
        let enclosure = g.enclose(&[range]);
        if !enclosure.contains_zero() {
            delta = delta.min(enclosure.mig());
            cover.push(range);
            continue;
        }
        if node.depth >= depth_budget {
            unresolved += 1;
            continue;
        }
        let Some((u, x, s)) = split(g, coords, &node) else {
            unresolved += 1;
            continue;
        };
        queue.push_back(Node { u: (node.u.0, u), x: (node.x.0, x), sign: (node.sign.0, s), depth: node.depth + 1 });
        queue.push_back(Node { u: (u, node.u.1), x: (x, node.x.1), sign: (s, node.sign.1), depth: node.depth + 1 });
    }
    if unresolved > 0 {
        SearchOutcome::Unresolved(unresolved)
    } else {
        cover.sort_by(|p, q| p.lo().total_cmp(&q.lo()));
        SearchOutcome::Cover { cover, delta }
    }
}

/// Shrinks a sign-change bracket while the midpoint sign stays certain.
fn refine(g: &Expr, mut a: f64, mut b: f64) -> (f64, f64) {
    let mut sa = sign_at(g, a);
    for _ in 0..REFINE_STEPS {
        let Some((m, sm)) = SPLIT_RATIOS.iter().find_map(|r| {
            let m = a + (b - a) * r;
            let s = sign_at(g, m);
            (m > a && m < b && s.is_some()).then_some((m, s))
        }) else {
            break;
        };
        if sm == sa {
            a = m;
            sa = sm;
        } else {
            b = m;
        }
    }
    (a, b)
}

/// Branch and prune on `[-radius, radius]` to bisection depth `depth_budget`.
pub fn find_root(g: &Expr, radius: f64, depth_budget: u32) -> RootVerdict {
    let domain = Interval::new(-radius, radius);
    match branch_and_prune(g, Coordinates::Identity, (-radius, radius), depth_budget) {
        SearchOutcome::Bracket { a, b } => {
            let (a, b) = refine(g, a, b);
            RootVerdict::HasRoot { witness: Interval::new(a, b), value_left: value_at(g, a), value_right: value_at(g, b) }
        }
        SearchOutcome::Cover { cover, delta } => RootVerdict::NoRootInBox { domain, delta, cover },
        SearchOutcome::Unresolved(unresolved) => RootVerdict::Unknown { domain, depth_budget, unresolved },
    }
}

/// Searches the whole real line (via `x = tan θ`) for either a certified
/// root of `G` or a global lower bound on `|G|`.
pub fn global_search(g: &Expr, depth_budget: u32) -> GlobalOutcome {
    match branch_and_prune(g, Coordinates::Tangent, (-FRAC_PI_2, FRAC_PI_2), depth_budget) {
        SearchOutcome::Bracket { a, b } => {
            let (a, b) = refine(g, a, b);
            GlobalOutcome::Root(Interval::new(a, b))
        }
        SearchOutcome::Cover { cover, delta } => {
            GlobalOutcome::Bounded(LowerBoundCertificate { domain: Interval::ENTIRE, delta, cover })
        }
        SearchOutcome::Unresolved(n) => GlobalOutcome::Unresolved(n),
    }
}

pub enum GlobalOutcome {
    Root(Interval),
    Bounded(LowerBoundCertificate),
    Unresolved(usize),
}

/// Builds a pole certificate around `bracket` with the other integrand
/// factors enclosed by `weight`.
pub fn pole_certificate(g: &Expr, bracket: Interval, weight: impl Fn(Interval) -> Interval) -> Option<PoleCertificate> {
    let scale = bracket.mag().max(1.0) * 1e-9;
    let mut w = bracket.width().max(scale);
    for _ in 0..40 {
        let neighborhood = Interval::new(bracket.lo() - w, bracket.hi() + w);
        let (_, slope) = g.enclose_with_derivative(neighborhood);
        let slope_bound = slope.mag();
        let weight_lower = weight(neighborhood).lo();
        if slope_bound.is_finite() && slope_bound > 0.0 && weight_lower > 0.0 {
            return Some(PoleCertificate { bracket, neighborhood, slope_bound, weight_lower });
        }
        w /= 2.0;
        if w < scale {
            break;
        }
    }
    None
}

/// Enclosure of `1 / (x² + 1)`.
pub fn cauchy_weight(x: Interval) -> Interval {
    x.sqr().add(Interval::point(1.0)).recip()
}

pub fn integral_convergence(g: &Expr, depth_budget: u32) -> ConvergenceVerdict {
    match global_search(g, depth_budget) {
        GlobalOutcome::Root(bracket) => match pole_certificate(g, bracket, cauchy_weight) {
            Some(certificate) => ConvergenceVerdict::Divergent { certificate },
            None => ConvergenceVerdict::Unknown { depth_budget, unresolved: 1 },
        },
        GlobalOutcome::Bounded(certificate) => {
            let d2 = certificate.delta * certificate.delta;
            let upper_bound = if d2 > 0.0 { up(up(PI_HI / d2)) } else { f64::INFINITY };
            ConvergenceVerdict::Finite { upper_bound, certificate }
        }
        GlobalOutcome::Unresolved(unresolved) => ConvergenceVerdict::Unknown { depth_budget, unresolved },
    }
}

/// Midpoint in `θ = atan x` coordinates, which handles infinite ends.
pub fn tangent_midpoint(b: &Interval) -> f64 {
    let m = Coordinates::Tangent.to_x(0.5 * (b.lo().atan() + b.hi().atan()));
    if m > b.lo() && m < b.hi() {
        m
    } else {
        b.midpoint()
    }
}

impl LowerBoundCertificate {
    /// Re-checks the bound on every cover box split in two.
    pub fn verify(&self, g: &Expr) -> bool {
        let Some(first) = self.cover.first() else {
            return false;
        };
        let tiles = first.lo() == self.domain.lo()
            && self.cover.last().is_some_and(|b| b.hi() == self.domain.hi())
            && self.cover.windows(2).all(|w| w[0].hi() == w[1].lo());
        tiles
            && self.delta > 0.0
            && self.cover.iter().all(|b| {
                let m = tangent_midpoint(b);
                [Interval::new(b.lo(), m), Interval::new(m, b.hi())]
                    .iter()
                    .all(|half| g.enclose(&[*half]).mig() >= self.delta)
            })
    }
}

impl PoleCertificate {
    /// Re-checks signs, slope and weight on the two halves of the
    /// neighborhood, then integrates the stated lower bound numerically until
    /// it passes [`DIVERGENCE_THRESHOLD`].
    pub fn verify(&self, g: &Expr, weight: impl Fn(Interval) -> Interval) -> bool {
        let (a, b) = (self.bracket.lo(), self.bracket.hi());
        if !opposite(sign_at(g, a), sign_at(g, b)) {
            return false;
        }
        let (n0, n1) = (self.neighborhood.lo(), self.neighborhood.hi());
        if !(n0 < a && b < n1) {
            return false;
        }
        let m = 0.5 * (n0 + n1);
        for half in [Interval::new(n0, m), Interval::new(m, n1)] {
            if g.enclose_with_derivative(half).1.mag() > self.slope_bound || weight(half).lo() < self.weight_lower {
                return false;
            }
        }
        // For every root r in the bracket, [r + eta, r + reach] lies inside
        // the neighborhood.
        let reach = (a - n0).min(n1 - b);
        let c = self.weight_lower / (self.slope_bound * self.slope_bound);
        let mut eta = reach / 2.0;
        while eta > 1e-300 {
            let r = quad::integrate(|u| c / (u * u), eta, reach, 1e-6 * c / eta, 4000);
            if r.converged && r.value - r.error > DIVERGENCE_THRESHOLD {
                return true;
            }
            eta /= 16.0;
        }
        false
    }
}

pub fn verify_root_verdict(g: &Expr, verdict: &RootVerdict) -> bool {
    match verdict {
        RootVerdict::HasRoot { witness, .. } => opposite(sign_at(g, witness.lo()), sign_at(g, witness.hi())),
        RootVerdict::NoRootInBox { domain, delta, cover } => {
            LowerBoundCertificate { domain: *domain, delta: *delta, cover: cover.clone() }.verify(g)
        }
        RootVerdict::Unknown { .. } => true,
    }
}

pub fn verify_convergence(g: &Expr, verdict: &ConvergenceVerdict) -> bool {
    match verdict {
        ConvergenceVerdict::Finite { upper_bound, certificate } => {
            let d2 = certificate.delta * certificate.delta;
            certificate.verify(g) && *upper_bound >= PI_HI / d2
        }
        ConvergenceVerdict::Divergent { certificate } => certificate.verify(g, cauchy_weight),
        ConvergenceVerdict::Unknown { .. } => true,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::delta1::parse_expr;
    use std::f64::consts::PI;

    fn e(s: &str) -> Expr {
        parse_expr(s).unwrap()
    }

    #[test]
    fn sine_has_a_root_near_a_multiple_of_pi() {
        let g = e("sin(x1)");
        let v = find_root(&g, 4.0, 20);
        let RootVerdict::HasRoot { witness, .. } = &v else { panic!("{v:?}") };
        assert!([-PI, 0.0, PI].iter().any(|r| witness.contains(*r)), "{witness}");
        assert!(witness.width() < 1e-9);
        assert!(verify_root_verdict(&g, &v));
    }

    #[test]
    fn exponential_has_no_root() {
        let g = e("exp(x1)");
        let v = find_root(&g, 10.0, 20);
        let RootVerdict::NoRootInBox { delta, .. } = &v else { panic!("{v:?}") };
        assert!(*delta >= (-10f64).exp() * (1.0 - 1e-12));
        assert!(*delta <= (-10f64).exp());
        assert!(verify_root_verdict(&g, &v));
    }

    #[test]
    fn touching_root_stays_unknown() {
        let v = find_root(&e("sin(x1) * sin(x1)"), 4.0, 16);
        assert!(matches!(v, RootVerdict::Unknown { .. }), "{v:?}");
    }

    #[test]
    fn identity_diverges_at_zero() {
        let g = e("x1");
        let v = integral_convergence(&g, 12);
        let ConvergenceVerdict::Divergent { certificate } = &v else { panic!("{v:?}") };
        assert!(certificate.bracket.contains(0.0));
        assert!(verify_convergence(&g, &v));
    }

    #[test]
    fn shifted_exponential_converges_below_pi() {
        let g = e("exp(x1) + 1");
        let v = integral_convergence(&g, 12);
        let ConvergenceVerdict::Finite { upper_bound, .. } = &v else { panic!("{v:?}") };
        assert!(*upper_bound <= PI * (1.0 + 1e-12));
        assert!(verify_convergence(&g, &v));
    }

    #[test]
    fn sine_diverges() {
        let g = e("sin(x1)");
        let v = integral_convergence(&g, 12);
        let ConvergenceVerdict::Divergent { certificate } = &v else { panic!("{v:?}") };
        let k = (certificate.bracket.midpoint() / PI).round();
        assert!(certificate.bracket.contains(k * PI) || certificate.bracket.width() < 1e-9);
        assert!(verify_convergence(&g, &v));
    }

    #[test]
    fn corrupted_certificates_fail_verification() {
        let g = e("x1");
        let ConvergenceVerdict::Divergent { mut certificate } = integral_convergence(&g, 12) else { panic!() };
        certificate.slope_bound *= 0.5;
        assert!(!certificate.verify(&g, cauchy_weight));

        let h = e("exp(x1) + 1");
        let ConvergenceVerdict::Finite { mut certificate, .. } = integral_convergence(&h, 12) else { panic!() };
        certificate.delta *= 2.0;
        assert!(!certificate.verify(&h));
    }
}
