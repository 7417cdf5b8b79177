//! Certified analysis for the undecidability examples: one-variable
//! elementary expressions with interval enclosures, heat and Poisson kernel
//! integrals with three-valued classification, and bounded search over
//! (exponential) Diophantine families.

pub mod delta1;
pub mod diophantine;
pub mod integrals;
pub mod quad;
