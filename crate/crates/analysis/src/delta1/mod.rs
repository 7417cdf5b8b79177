//! The one-variable expression class built from rationals, `pi`, `x1`, `sin`
//! and `exp` under `+`, `*` and composition, with certified interval
//! evaluation and the two root/convergence semi-decision procedures.

mod expr;
pub mod interval;
mod search;

pub use expr::{parse_expr, parse_expr_with_arity, Expr, ExprError, Rational, DELTA1_ARITY};
pub use interval::{Interval, IntervalError, PI_HI, PI_LO, WIDEN_ULPS};
pub use search::{
    cauchy_weight, find_root, global_search, integral_convergence, pole_certificate, tangent_midpoint, verify_convergence,
    verify_root_verdict, ConvergenceVerdict, GlobalOutcome, LowerBoundCertificate, PoleCertificate, RootVerdict,
    DIVERGENCE_THRESHOLD,
};
