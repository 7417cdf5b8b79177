//! The `repro` report: every acceptance criterion evaluated through library
//! calls, one line each.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use std::time::Instant;
use uncomp_analysis::delta1::{
    find_root, integral_convergence, parse_expr, verify_convergence, verify_root_verdict, ConvergenceVerdict, Expr,
    Interval, RootVerdict,
};
use uncomp_analysis::diophantine::{builtin_family, count_profile, search_solutions};
use uncomp_analysis::integrals::{
    electro_eval, heat_classify, heat_eval, kernel, BoundaryFunction, Builtin, Classification, DivergenceCertificate,
    EvalOutcome, Point, DEFAULT_BUDGET,
};
use uncomp_core::enumeration::{enumerate_domain, sigma_table, Dyadic, EnumerationConfig, Retention};
use uncomp_core::predictor::{builtin_suite, min_time, slowdown_report};
use uncomp_core::{encode_machine, limits, run, universal_run, BitString, Program, RegisterMode};

const CAPPED: RegisterMode = RegisterMode::Capped(64);

/// Golden minimum slowdown: doubler on `1^19 0`, 597 universal steps against 251.
pub const MIN_SLOWDOWN: f64 = 597.0 / 251.0;
/// Heat evolution of `1/(1+y²)` at `(0, 1)` from the erfc closed form.
pub const HEAT_CAUCHY_ORIGIN: f64 = 0.545641360765047;
/// ħ from the exact SI value of h.
pub const HBAR_LITERAL: f64 = 1.0545718176461565e-34;

#[derive(Debug, Clone, Serialize)]
pub struct Criterion {
    pub id: u32,
    pub title: &'static str,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct ReproReport {
    pub criteria: Vec<Criterion>,
}

impl ReproReport {
    pub fn all_passed(&self) -> bool {
        self.criteria.iter().all(|c| c.passed)
    }

    pub fn lines(&self) -> Vec<String> {
        self.criteria.iter().map(Criterion::line).collect()
    }
}

impl Criterion {
    pub fn line(&self) -> String {
        let verdict = if self.passed { "PASS" } else { "FAIL" };
        format!("{verdict} {:>2} {}: {}", self.id, self.title, self.detail)
    }
}

type Check = fn(usize) -> Result<String, String>;

pub const CRITERIA: [(u32, &str, Check); 10] = [
    (1, "prefix-freeness and Kraft", prefix_free),
    (2, "universality", universality),
    (3, "universal slowdown", slowdown),
    (4, "predictor exactness", predictor),
    (5, "sigma and busy-beaver consistency", sigma),
    (6, "heat kernel", heat),
    (7, "half-plane kernel", electro),
    (8, "delta-1 verdict soundness", verdicts),
    (9, "Diophantine search", diophantine),
    (10, "physical limits", physical),
];

pub fn run_criterion(id: u32, jobs: usize) -> Option<Criterion> {
    let (id, title, check) = CRITERIA.iter().find(|c| c.0 == id)?;
    let (passed, detail) = match check(jobs) {
        Ok(d) => (true, d),
        Err(d) => (false, d),
    };
    Some(Criterion { id: *id, title, passed, detail })
}

pub fn run_all(jobs: usize) -> ReproReport {
    ReproReport { criteria: CRITERIA.iter().filter_map(|c| run_criterion(c.0, jobs)).collect() }
}

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn prefix_free(jobs: usize) -> Result<String, String> {
    let start = Instant::now();
    let report = enumerate_domain(&EnumerationConfig::new(14, 100_000, CAPPED).jobs(jobs).retention(Retention::Full))
        .map_err(|e| e.to_string())?;
    let mut halting: Vec<&[bool]> = report.halting().map(|h| h.program.bits()).collect();
    halting.sort_unstable();
    // In lexicographic order every extension of p directly follows p.
    let violations = halting.windows(2).filter(|w| w[1].starts_with(w[0])).count();
    let kraft = halting.iter().fold(Dyadic::ZERO, |acc, p| acc.add(Dyadic::unit(p.len() as u32)));
    let secs = start.elapsed().as_secs_f64();
    ensure(report.unresolved_total == 0, || format!("{} unresolved programs", report.unresolved_total))?;
    ensure(violations == 0, || format!("{violations} prefix violations"))?;
    ensure(kraft <= Dyadic::unit(0) && kraft == report.omega_lower, || format!("Kraft sum {kraft}"))?;
    ensure(secs < 60.0, || format!("took {secs:.1} s"))?;
    Ok(format!("{} halting programs, Kraft sum {kraft}, {secs:.1} s", halting.len()))
}

fn universality(_: usize) -> Result<String, String> {
    let suite = builtin_suite();
    let mut rows = 0;
    let mut outside = 0;
    for entry in &suite {
        let code = encode_machine(&entry.machine);
        let extra: Vec<Program> = BitString::all_up_to(3).collect();
        for x in entry.inputs.iter().chain(&extra) {
            let direct = run(&entry.machine, x, 100_000, CAPPED).map_err(|e| e.to_string())?;
            let xp = code.concat(x);
            ensure(xp.len() == code.len() + x.len(), || format!("{}: overhead differs", entry.name))?;
            let via = universal_run(&xp, 1_000_000, CAPPED).map_err(|e| e.to_string())?;
            ensure(direct.is_halted() == via.is_halted() && direct.output() == via.output(), || {
                format!("{} on {x}: direct {direct:?}, universal {via:?}", entry.name)
            })?;
            rows += 1;
            outside += usize::from(!direct.is_halted());
        }
    }
    ensure(suite.len() >= 5 && suite.iter().all(|e| e.inputs.len() >= 20), || "suite too small".into())?;
    Ok(format!("{} machines, {rows} runs agree ({outside} outside the domain)", suite.len()))
}

fn slowdown(_: usize) -> Result<String, String> {
    let report = slowdown_report(&builtin_suite(), 100_000, CAPPED).map_err(|e| e.to_string())?;
    let slower = report.rows.iter().filter(|r| r.t_u > r.t_c).count();
    ensure(slower == report.rows.len(), || format!("{slower}/{} rows slower", report.rows.len()))?;
    ensure(report.summary.min_ratio == MIN_SLOWDOWN, || format!("min ratio {}", report.summary.min_ratio))?;
    Ok(format!("{slower}/{} rows with T_U > T_C, min ratio {:.6}", report.rows.len(), report.summary.min_ratio))
}

/// Fastest program for the output of `x`, by running every program up to
/// `T_U(x)` bits with budget `T_U(x)`.
fn brute_force_min_time(x: &Program) -> Result<(u64, Program), String> {
    let r = universal_run(x, 10_000, CAPPED).map_err(|e| e.to_string())?;
    let (target, t) = (r.output().cloned().ok_or("not in domain")?, r.halted_steps().ok_or("not in domain")?);
    let mut best: Option<(u64, Program)> = None;
    for z in BitString::all_up_to(t as usize) {
        let rz = universal_run(&z, t, CAPPED).map_err(|e| e.to_string())?;
        if rz.output() == Some(&target) {
            let s = rz.halted_steps().expect("output implies halted");
            if best.as_ref().is_none_or(|(b, _)| s < *b) {
                best = Some((s, z));
            }
        }
    }
    best.ok_or_else(|| "x itself was not found".into())
}

fn predictor(jobs: usize) -> Result<String, String> {
    let report = enumerate_domain(&EnumerationConfig::new(12, 100_000, CAPPED)).map_err(|e| e.to_string())?;
    let programs: Vec<Program> = report.halting().map(|h| h.program.clone()).collect();
    for x in &programs {
        let got = min_time(x, 10_000, CAPPED, jobs).map_err(|e| e.to_string())?;
        let (t, canonical) = brute_force_min_time(x)?;
        ensure(got.t_of_x == t && got.canonical == canonical, || {
            format!("{x}: got ({}, {}), brute force ({t}, {canonical})", got.t_of_x, got.canonical)
        })?;
    }
    ensure(programs.len() >= 10, || format!("only {} programs", programs.len()))?;
    Ok(format!("{} programs match the brute-force search", programs.len()))
}

fn sigma(jobs: usize) -> Result<String, String> {
    let render = |jobs: usize| -> Result<(String, String), String> {
        let config = EnumerationConfig::new(24, 100_000, CAPPED).jobs(jobs).retention(Retention::Summary);
        let report = enumerate_domain(&config).map_err(|e| e.to_string())?;
        let table = sigma_table(&report);
        let c = table.halting_time_constant.ok_or("no halting-time constant")?;
        for n in (0..=report.max_len.saturating_sub(c)).filter(|&n| table.rows[n + c].exact) {
            let bound = table.rows[n + c].sigma_hat.clone().unwrap_or_default();
            if let Some(h) = report.halting().find(|h| h.program.len() <= n && bound < h.steps.into()) {
                return Err(format!("{} takes {} steps, over sigma_hat({})", h.program, h.steps, n + c));
            }
        }
        let json = serde_json::to_string(&table).map_err(|e| e.to_string())?;
        Ok((json, format!("c = {c}, exact up to n = {}", table.rows.iter().filter(|r| r.exact).count() - 1)))
    };
    let (a, detail) = render(1)?;
    let other = jobs.max(4);
    ensure(render(1)?.0 == a, || "rerun differs".into())?;
    ensure(render(other)?.0 == a, || format!("{other} workers differ"))?;
    Ok(format!("{detail}, identical on rerun and with {other} workers"))
}

fn grid() -> Vec<(f64, f64)> {
    let xs = [-3.0, -1.0, -0.25, 0.0, 0.5, 1.0, 2.0, 7.5, -12.0, 0.1];
    let ps = [1.0, 0.5, 2.0, 0.1, 1.0, 3.0, 0.25, 1.5, 4.0, 10.0];
    xs.into_iter().zip(ps).collect()
}

fn value(out: Result<EvalOutcome, impl std::fmt::Display>, what: &str) -> Result<f64, String> {
    let out = out.map_err(|e| format!("{what}: {e}"))?;
    out.value().ok_or_else(|| format!("{what}: {out:?}"))
}

fn heat(_: usize) -> Result<String, String> {
    let one = BoundaryFunction::Builtin(Builtin::One);
    let mut worst: f64 = 0.0;
    for (x0, t0) in grid() {
        let v = value(heat_eval(&one, x0, t0, 1e-6), &format!("one at ({x0}, {t0})"))?;
        worst = worst.max((v - 1.0).abs());
    }
    ensure(worst <= 1e-6, || format!("unit data off by {worst:e}"))?;
    let v = value(heat_eval(&BoundaryFunction::Builtin(Builtin::Cauchy), 0.0, 1.0, 1e-6), "cauchy")?;
    ensure((v - 0.545640).abs() <= 1e-5 && (v - HEAT_CAUCHY_ORIGIN).abs() <= 1e-5, || format!("cauchy {v}"))?;
    let g = BoundaryFunction::Builtin(Builtin::GaussSq);
    let c = heat_classify(&g, 0.0, 2.0, DEFAULT_BUDGET).map_err(|e| e.to_string())?;
    let Classification::Divergent { certificate: cert @ DivergenceCertificate::Growth(growth) } = &c else {
        return Err(format!("gauss_sq at t0 = 2: {c:?}"));
    };
    ensure((growth.quadratic, growth.linear, growth.constant) == (0.75, 0.0, 0.0), || format!("{growth:?}"))?;
    ensure(cert.verify(kernel("heat").expect("registered"), &g, Point::new(0.0, 2.0)), || {
        "growth certificate does not verify".into()
    })?;
    Ok(format!("unit error {worst:.1e}, cauchy {v:.7}, gauss_sq divergent with exponent 0.75 y²"))
}

fn electro(_: usize) -> Result<String, String> {
    let f = |s: &str| s.parse::<BoundaryFunction>().expect("builtin data parses");
    let mut worst: f64 = 0.0;
    for (x0, y0) in grid() {
        let v = value(electro_eval(&f("one"), x0, y0, 1e-6, false), &format!("one at ({x0}, {y0})"))?;
        worst = worst.max((v - 1.0).abs());
    }
    ensure(worst <= 1e-6, || format!("unit data off by {worst:e}"))?;
    let v = value(electro_eval(&f("cauchy"), 0.0, 1.0, 1e-6, false), "cauchy")?;
    ensure((v - 0.5).abs() <= 1e-6, || format!("cauchy {v}"))?;
    let data = [
        "one",
        "cauchy",
        "exp(-1 * x1 * x1)",
        "cauchy_recip2(exp(x1) + 1)",
        "cauchy_recip2(sin(x1) + 2)",
        "sum(2.0 one, -0.5 cauchy)",
        "recip2(exp(x1) + 1)",
    ];
    let mut checked = 0;
    let mut largest: f64 = 0.0;
    for text in data {
        for (x0, y0) in grid() {
            match electro_eval(&f(text), x0, y0, 1e-6, true).map_err(|e| e.to_string())? {
                EvalOutcome::Value { cross_check: Some(c), .. } => {
                    ensure(c.difference <= 2e-6, || format!("{text} at ({x0}, {y0}): difference {:e}", c.difference))?;
                    largest = largest.max(c.difference);
                    checked += 1;
                }
                other => return Err(format!("{text} at ({x0}, {y0}): {other:?}")),
            }
        }
    }
    Ok(format!("unit error {worst:.1e}, cauchy {v:.7}, {checked} cross-checks within {largest:.1e}"))
}

pub const CURATED_EXPRESSIONS: &[&str] = &[
    "x1",
    "x1 + 1",
    "x1 + -1/3",
    "x1 * x1 + 1",
    "x1 * x1 + -2",
    "x1 * x1 * x1 + -5",
    "sin(x1)",
    "sin(x1) + 2",
    "sin(x1) + 1/2",
    "sin(x1) * sin(x1) + 1/10",
    "exp(x1)",
    "exp(x1) + -1",
    "exp(x1) + 1",
    "exp(-1 * x1 * x1)",
    "exp(-1 * x1 * x1) + -1/2",
    "exp(sin(x1))",
    "exp(sin(x1)) + -1",
    "sin(exp(x1))",
    "sin(pi * x1)",
    "sin(pi * x1) + 3/2",
    "x1 + pi",
    "pi * x1 + -1",
    "x1 * exp(x1) + -1",
    "exp(x1) + exp(-1 * x1)",
    "exp(x1) + -1 * exp(-1 * x1)",
    "sin(x1) + -1/2 * x1",
    "sin(x1) + x1",
    "sin(x1) + x1 * x1 + 1",
    "x1 * x1 + x1 + 1",
    "x1 * x1 + -1 * x1 + -1",
    "sin(x1) * exp(x1) + 3",
    "sin(2 * x1) + sin(3 * x1) + 5/2",
    "exp(x1 * x1) + -3",
    "1/7",
    "-3",
    "pi",
    "sin(x1 + 1/4) * 2 + 3",
    "exp(x1) * sin(x1) + -1/5",
    "x1 * x1 * x1 * x1 + 1/100",
    "x1 * x1 + -1/4",
    "sin(x1) + -9/10",
    "exp(x1) + -7",
    "x1 * x1 * x1 + x1 + 1",
    "sin(x1 * x1) + 1/3",
    "exp(-1 * x1) + -2",
    "sin(x1) * sin(x1) + -1/4",
    "x1 * sin(x1) + 2",
    "exp(x1 + -3) + 1/5",
    "2 * x1 + -7/3",
    "sin(exp(-1 * x1 * x1)) + 1/2",
];

fn random_leaf(rng: &mut ChaCha8Rng) -> Expr {
    match rng.random_range(0..6) {
        0 => Expr::Pi,
        1 | 2 => Expr::x1(),
        _ => Expr::rational(rng.random_range(-12..=12), rng.random_range(1..=7)),
    }
}

pub fn random_expr(rng: &mut ChaCha8Rng, depth: u32) -> Expr {
    if depth == 0 || rng.random_bool(0.25) {
        return random_leaf(rng);
    }
    match rng.random_range(0..4) {
        0 => Expr::add(random_expr(rng, depth - 1), random_expr(rng, depth - 1)),
        1 => Expr::mul(random_expr(rng, depth - 1), random_expr(rng, depth - 1)),
        2 => Expr::sin(random_expr(rng, depth - 1)),
        _ => Expr::exp(random_expr(rng, depth - 1)),
    }
}

fn signs_differ(g: &Expr, b: Interval) -> bool {
    let (l, h) = (g.eval(&[b.lo()]), g.eval(&[b.hi()]));
    // Endpoints near zero or non-finite are not signed.
    l.abs() < 1e-9 || h.abs() < 1e-9 || !l.is_finite() || !h.is_finite() || (l < 0.0) != (h < 0.0)
}

fn verdicts(_: usize) -> Result<String, String> {
    let exprs: Vec<Expr> =
        CURATED_EXPRESSIONS.iter().map(|s| parse_expr(s).map_err(|e| format!("{s}: {e}"))).collect::<Result<_, _>>()?;
    let mut decided = 0;
    for g in &exprs {
        let root = find_root(g, 8.0, 18);
        let sound = verify_root_verdict(g, &root)
            && match &root {
                RootVerdict::HasRoot { witness, .. } => signs_differ(g, *witness),
                RootVerdict::NoRootInBox { delta, .. } => {
                    (0..=512).map(|i| g.eval(&[-8.0 + i as f64 / 32.0])).all(|v| v.abs() >= delta * (1.0 - 1e-9))
                }
                RootVerdict::Unknown { .. } => true,
            };
        ensure(sound, || format!("false root verdict for {g}: {root:?}"))?;
        decided += usize::from(root.is_decided());
        let conv = integral_convergence(g, 14);
        let sound = verify_convergence(g, &conv)
            && match &conv {
                ConvergenceVerdict::Divergent { certificate } => signs_differ(g, certificate.bracket),
                _ => true,
            };
        ensure(sound, || format!("false convergence verdict for {g}: {conv:?}"))?;
        decided += usize::from(!matches!(conv, ConvergenceVerdict::Unknown { .. }));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0003);
    let mut fuzz = 0;
    while fuzz < 1000 {
        let g = random_expr(&mut rng, 5);
        let x = rng.random_range(-4.0..4.0);
        let v = g.eval(&[x]);
        if !v.is_finite() {
            continue;
        }
        let enclosure = g.enclose(&[Interval::new(x - 1e-3, x + 1e-3)]);
        ensure(enclosure.contains(v), || format!("{g} at {x}: {v} outside {enclosure:?}"))?;
        fuzz += 1;
    }
    Ok(format!("{} expressions re-verified ({decided} decided verdicts), {fuzz} enclosures contain", exprs.len()))
}

fn diophantine(_: usize) -> Result<String, String> {
    let fermat = builtin_family("fermat").ok_or("fermat missing")?;
    let cubic = search_solutions(&fermat, &[0], 50).map_err(|e| e.to_string())?;
    ensure(cubic.count == 0 && cubic.exhausted, || format!("cubic count {}", cubic.count))?;
    let pyth = builtin_family("pythagorean").ok_or("pythagorean missing")?;
    let profile = count_profile(&pyth, &[vec![]], &[10, 20, 40]).map_err(|e| e.to_string())?;
    let counts: Vec<u64> = profile.rows.iter().map(|r| r.count).collect();
    ensure(counts.windows(2).all(|w| w[0] < w[1]), || format!("counts {counts:?}"))?;
    let found = search_solutions(&pyth, &[], 40).map_err(|e| e.to_string())?;
    for s in &found.solutions {
        ensure(pyth.verify_witness(&[], s).unwrap_or(false), || format!("witness {s:?} fails"))?;
    }
    Ok(format!("cubic 0 to bound 50, counts {counts:?}, {} witnesses re-verify", found.solutions.len()))
}

fn physical(_: usize) -> Result<String, String> {
    let hbar = limits::min_time(1.0, 1.0).map_err(|e| e.to_string())?;
    ensure(limits::ulps_apart(hbar, HBAR_LITERAL) <= 1, || format!("{hbar:e}"))?;
    let energies = [1e-30, 1e-3, 1.0, 7.5, 1e20];
    let steps = [1.0, 2.0, 1e3, 123_456_789.0, 1e12, 1e15];
    for &e in &energies {
        for &n in &steps {
            let t = limits::min_time(n, e).map_err(|x| x.to_string())?;
            let back = limits::max_steps(t, e).map_err(|x| x.to_string())?;
            ensure(limits::ulps_apart(back, n) <= 1, || format!("round trip n={n}, E={e}: {back}"))?;
        }
        let times: Vec<f64> = steps.iter().map(|&n| limits::min_time(n, e).unwrap_or(f64::NAN)).collect();
        ensure(times.windows(2).all(|w| w[0] < w[1]), || format!("not increasing in n at E={e}"))?;
    }
    for &n in &steps {
        let times: Vec<f64> = energies.iter().map(|&e| limits::min_time(n, e).unwrap_or(f64::NAN)).collect();
        ensure(times.windows(2).all(|w| w[0] > w[1]), || format!("not decreasing in E at n={n}"))?;
    }
    Ok(format!("min_time(1, 1 J) = {hbar:e} s, round trip and monotonicity hold"))
}
