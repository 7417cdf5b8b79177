//! Parametric exponential Diophantine families and bounded solution search.

mod family;
mod search;

pub use family::{DiophantineError, DiophantineFamily, Term, MAX_EXPONENT};
pub use search::{
    classify_counts, count_profile, param_grid, search_solutions, CountProfile, ParamClass, ProfileClass, ProfileRow,
    SearchOutcome,
};

const BUILTINS: [(&str, &str); 2] = [
    (
        "fermat",
        "(p + 1)^(s + 3) + (q + 1)^(s + 3) = (r + 1)^(s + 3); params: s; unknowns: p, q, r; exponential",
    ),
    ("pythagorean", "x1^2 + x2^2 = x3^2; unknowns: x1, x2, x3"),
];

pub fn builtin_names() -> impl Iterator<Item = &'static str> {
    BUILTINS.iter().map(|(n, _)| *n)
}

pub fn builtin_family(name: &str) -> Option<DiophantineFamily> {
    BUILTINS
        .iter()
        .find(|(n, _)| *n == name)
        .map(|(_, text)| DiophantineFamily::parse(text).expect("builtin family parses"))
}
