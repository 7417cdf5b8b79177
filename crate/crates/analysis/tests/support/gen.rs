//! Seeded random expressions of the one-variable class.

#![allow(dead_code)]

use rand::Rng;
use uncomp_analysis::delta1::Expr;

pub fn leaf<R: Rng>(rng: &mut R) -> Expr {
    match rng.random_range(0..6) {
        0 => Expr::Pi,
        1 | 2 => Expr::x1(),
        _ => Expr::rational(rng.random_range(-12..=12), rng.random_range(1..=7)),
    }
}

pub fn expr<R: Rng>(rng: &mut R, depth: u32) -> Expr {
    if depth == 0 || rng.random_bool(0.25) {
        return leaf(rng);
    }
    match rng.random_range(0..4) {
        0 => Expr::add(expr(rng, depth - 1), expr(rng, depth - 1)),
        1 => Expr::mul(expr(rng, depth - 1), expr(rng, depth - 1)),
        2 => Expr::sin(expr(rng, depth - 1)),
        _ => Expr::exp(expr(rng, depth - 1)),
    }
}
