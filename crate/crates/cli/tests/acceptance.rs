//! Acceptance suite. Each criterion is checked against oracles that live here,
//! independent of the `repro` report, and prints one PASS/FAIL line.

#[path = "../../analysis/tests/support/hp.rs"]
mod hp;
#[path = "../../analysis/tests/support/gen.rs"]
mod gen;

use num_bigint::BigUint;
use num_traits::Signed;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use statrs::function::erf::erfc;
use std::collections::HashSet;
use std::f64::consts::PI;
use std::process::ExitCode;
use std::time::Instant;
use uncomp_analysis::delta1::{
    find_root, integral_convergence, parse_expr, verify_convergence, verify_root_verdict, ConvergenceVerdict, Expr,
    Interval, RootVerdict,
};
use uncomp_analysis::diophantine::{builtin_family, search_solutions};
use uncomp_analysis::integrals::{
    electro_eval, heat_classify, heat_eval, kernel, BoundaryFunction, Classification, DivergenceCertificate,
    EvalOutcome, Point, DEFAULT_BUDGET,
};
use uncomp_cli::repro;
use uncomp_core::enumeration::{enumerate_domain, sigma_table, EnumerationConfig, Retention};
use uncomp_core::predictor::{builtin_suite, min_time, slowdown_report};
use uncomp_core::{decode_machine, encode_machine, limits, run, universal_run, BitString, Program, RegisterMode, RunResult};

const CAPPED: RegisterMode = RegisterMode::Capped(64);
const GOLDEN_SIGMA: &str = include_str!("../../core/tests/golden/sigma_capped64_len24.csv");

type Outcome = Result<String, String>;

fn check(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn bits(s: &str) -> Program {
    s.parse().unwrap()
}

/// Every string of length `0..=n`, built independently of the library's enumerator.
fn strings_up_to(n: usize) -> impl Iterator<Item = Vec<bool>> {
    (0..=n).flat_map(|len| (0u64..1 << len).map(move |v| (0..len).rev().map(|i| v >> i & 1 == 1).collect()))
}

fn program(b: &[bool]) -> Program {
    Program::from(b)
}

fn c1_prefix_free() -> Outcome {
    let start = Instant::now();
    let mut halting: HashSet<Vec<bool>> = HashSet::new();
    let mut undecided = 0;
    for s in strings_up_to(14) {
        let r = universal_run(&program(&s), 100_000, CAPPED).map_err(|e| e.to_string())?;
        if r.is_halted() {
            halting.insert(s);
        } else if matches!(r, RunResult::BudgetExceeded { .. }) {
            undecided += 1;
        }
    }
    let secs = start.elapsed().as_secs_f64();
    let violations = halting.iter().filter(|p| (0..p.len()).any(|k| halting.contains(&p[..k]))).count();
    // Kraft sum as a numerator over 2^14.
    let kraft: u64 = halting.iter().map(|p| 1u64 << (14 - p.len())).sum();
    check(violations == 0, || format!("{violations} halting programs extend another"))?;
    check(kraft <= 1 << 14, || format!("Kraft sum {kraft}/2^14"))?;
    check(secs < 60.0, || format!("{secs:.1} s"))?;
    Ok(format!("{} halting, {undecided} over budget, Kraft {kraft}/2^14, {secs:.1} s", halting.len()))
}

fn c2_universality() -> Outcome {
    let suite = builtin_suite();
    check(suite.len() >= 5, || format!("{} machines", suite.len()))?;
    let mut runs = 0;
    for entry in &suite {
        check(entry.inputs.len() >= 20, || format!("{} has {} inputs", entry.name, entry.inputs.len()))?;
        let code = encode_machine(&entry.machine);
        let (decoded, used) = decode_machine(code.bits()).map_err(|e| e.to_string())?;
        check(decoded == entry.machine && used == code.len(), || format!("{} does not decode", entry.name))?;
        let outside: Vec<Program> = ["", "0", "1", "11", "101"].iter().map(|s| bits(s)).collect();
        for x in entry.inputs.iter().chain(&outside) {
            let direct = run(&entry.machine, x, 100_000, CAPPED).map_err(|e| e.to_string())?;
            let xp = code.concat(x);
            let via = universal_run(&xp, 10_000_000, CAPPED).map_err(|e| e.to_string())?;
            check(xp.len() - x.len() == code.len(), || "length overhead".into())?;
            check(direct.output() == via.output() && direct.is_halted() == via.is_halted(), || {
                format!("{} on {x}: {direct:?} vs {via:?}", entry.name)
            })?;
            runs += 1;
        }
    }
    Ok(format!("{runs} runs agree on output and domain"))
}

fn c3_slowdown() -> Outcome {
    let suite = builtin_suite();
    let report = slowdown_report(&suite, 100_000, CAPPED).map_err(|e| e.to_string())?;
    let mut ratios = Vec::new();
    for entry in &suite {
        let code = encode_machine(&entry.machine);
        for x in &entry.inputs {
            let tc = run(&entry.machine, x, 100_000, CAPPED).unwrap().halted_steps().ok_or("direct run did not halt")?;
            let tu = universal_run(&code.concat(x), 10_000_000, CAPPED)
                .unwrap()
                .halted_steps()
                .ok_or("universal run did not halt")?;
            check(tu > tc, || format!("{} on {x}: T_U {tu} <= T_C {tc}", entry.name))?;
            ratios.push((tu, tc));
        }
    }
    let (tu, tc) = *ratios.iter().min_by(|a, b| (a.0 * b.1).cmp(&(b.0 * a.1))).unwrap();
    check((tu, tc) == (597, 251), || format!("min ratio {tu}/{tc}"))?;
    check(report.rows.len() == ratios.len() && report.summary.min_ratio == 597.0 / 251.0, || {
        format!("report min ratio {}", report.summary.min_ratio)
    })?;
    Ok(format!("{}/{} rows slower, min ratio {tu}/{tc}", ratios.len(), ratios.len()))
}

/// Quasi-lexicographic comparison key.
fn qlex(p: &Program) -> (usize, Vec<bool>) {
    (p.len(), p.bits().to_vec())
}

fn c4_predictor() -> Outcome {
    let mut checked = 0;
    for s in strings_up_to(12) {
        let x = program(&s);
        let rx = universal_run(&x, 10_000, CAPPED).unwrap();
        let (Some(target), Some(t)) = (rx.output().cloned(), rx.halted_steps()) else { continue };
        // A program running in at most t steps reads at most t bits.
        let mut best: Option<(u64, Program)> = None;
        for z in strings_up_to(t as usize) {
            let z = program(&z);
            let rz = universal_run(&z, t, CAPPED).unwrap();
            if rz.output() == Some(&target) {
                let steps = rz.halted_steps().unwrap();
                let better = match &best {
                    None => true,
                    Some((b, bz)) => steps < *b || (steps == *b && qlex(&z) < qlex(bz)),
                };
                if better {
                    best = Some((steps, z));
                }
            }
        }
        let (t_oracle, sharp) = best.ok_or("x itself not found")?;
        let got = min_time(&x, 10_000, CAPPED, 2).map_err(|e| e.to_string())?;
        check(got.t_of_x == t_oracle && got.canonical == sharp, || {
            format!("{x}: ({}, {}) vs oracle ({t_oracle}, {sharp})", got.t_of_x, got.canonical)
        })?;
        let rc = universal_run(&got.canonical, t_oracle, CAPPED).unwrap();
        check(rc.output() == Some(&target) && rc.halted_steps() == Some(t_oracle), || format!("{x}# misbehaves"))?;
        checked += 1;
    }
    check(checked >= 10, || format!("only {checked} programs"))?;
    Ok(format!("{checked} programs match the brute-force oracle exactly"))
}

fn qlex_index(b: &BitString) -> BigUint {
    // Strings of length k occupy indices 2^k - 1 .. 2^(k+1) - 2.
    let mut v = BigUint::from(1u32);
    for &bit in b.bits() {
        v = v * 2u32 + u32::from(bit);
    }
    v - 1u32
}

fn c5_sigma() -> Outcome {
    let config = |jobs| EnumerationConfig::new(24, 100_000, CAPPED).jobs(jobs).retention(Retention::Summary);
    let report = enumerate_domain(&config(1)).map_err(|e| e.to_string())?;
    let table = sigma_table(&report);
    let c = table.halting_time_constant.ok_or("no constant reported")?;
    let halting: Vec<(usize, BigUint, u64)> =
        report.halting().map(|h| (h.program.len(), qlex_index(h.output), h.steps)).collect();
    let mut pairs = 0;
    for n in 0..=24 {
        let sigma_direct = halting.iter().filter(|h| h.0 <= n).map(|h| h.1.clone()).max();
        check(table.rows[n].sigma_hat == sigma_direct, || format!("sigma_hat({n}) differs"))?;
        if n + c <= 24 && table.rows[n].exact && table.rows[n + c].exact {
            let bound = table.rows[n + c].sigma_hat.clone().unwrap_or_default();
            for h in halting.iter().filter(|h| h.0 <= n) {
                check(BigUint::from(h.2) <= bound, || format!("length {} runs {} > sigma_hat({})", h.0, h.2, n + c))?;
            }
            pairs += 1;
        }
    }
    check(pairs > 0, || "no exact pairs".into())?;
    let json = |jobs| serde_json::to_string(&sigma_table(&enumerate_domain(&config(jobs)).unwrap())).unwrap();
    let first = serde_json::to_string(&table).unwrap();
    check(json(1) == first && json(4) == first, || "tables differ across runs or workers".into())?;
    check(table.to_csv() == GOLDEN_SIGMA, || "table differs from the golden file".into())?;
    Ok(format!("c = {c} holds on {pairs} exact rows; identical across reruns, workers and golden file"))
}

fn grid() -> Vec<(f64, f64)> {
    let xs = [-3.0, -1.0, -0.25, 0.0, 0.5, 1.0, 2.0, 7.5, -12.0, 0.1];
    let ps = [1.0, 0.5, 2.0, 0.1, 1.0, 3.0, 0.25, 1.5, 4.0, 10.0];
    xs.into_iter().zip(ps).collect()
}

fn f(text: &str) -> BoundaryFunction {
    text.parse().unwrap()
}

fn value(out: EvalOutcome) -> Result<f64, String> {
    out.value().ok_or_else(|| format!("{out:?}"))
}

fn c6_heat() -> Outcome {
    for (x0, t0) in grid() {
        let v = value(heat_eval(&f("one"), x0, t0, 1e-6).unwrap())?;
        check((v - 1.0).abs() <= 1e-6, || format!("one at ({x0}, {t0}): {v}"))?;
    }
    let oracle = (PI.sqrt() / 2.0) * 0.25f64.exp() * erfc(0.5);
    let v = value(heat_eval(&f("cauchy"), 0.0, 1.0, 1e-6).unwrap())?;
    check((v - oracle).abs() <= 1e-5 && (v - 0.545640).abs() <= 1e-5, || format!("cauchy {v} vs {oracle}"))?;
    let g = f("gauss_sq");
    let c = heat_classify(&g, 0.0, 2.0, DEFAULT_BUDGET).unwrap();
    let Classification::Divergent { certificate: cert @ DivergenceCertificate::Growth(growth) } = &c else {
        return Err(format!("gauss_sq: {c:?}"));
    };
    // Integrand exponent y² - y²/(4 t0) = 3/4 y² at t0 = 2.
    check((growth.quadratic, growth.linear, growth.constant) == (0.75, 0.0, 0.0), || format!("{growth:?}"))?;
    check(cert.verify(kernel("heat").unwrap(), &g, Point::new(0.0, 2.0)), || "certificate rejected".into())?;
    Ok(format!("unit data exact to 1e-6, cauchy {v:.6} vs erfc {oracle:.6}, gauss_sq divergent"))
}

fn c7_electro() -> Outcome {
    let harmonic = |x0: f64, y0: f64| (1.0 + y0) / ((1.0 + y0).powi(2) + x0 * x0);
    for (x0, y0) in grid() {
        let v = value(electro_eval(&f("one"), x0, y0, 1e-6, false).unwrap())?;
        check((v - 1.0).abs() <= 1e-6, || format!("one at ({x0}, {y0}): {v}"))?;
        let v = value(electro_eval(&f("cauchy"), x0, y0, 1e-6, false).unwrap())?;
        check((v - harmonic(x0, y0)).abs() <= 1e-6, || format!("cauchy at ({x0}, {y0}): {v}"))?;
    }
    let v = value(electro_eval(&f("cauchy"), 0.0, 1.0, 1e-6, false).unwrap())?;
    check((v - 0.5).abs() <= 1e-6, || format!("cauchy {v}"))?;
    let data = [
        "one",
        "cauchy",
        "exp(-1 * x1 * x1)",
        "cauchy_recip2(exp(x1) + 1)",
        "cauchy_recip2(sin(x1) + 2)",
        "sum(2.0 one, -0.5 cauchy)",
        "recip2(exp(x1) + 1)",
    ];
    let mut finite = 0;
    for text in data {
        for (x0, y0) in grid() {
            match electro_eval(&f(text), x0, y0, 1e-6, true).unwrap() {
                EvalOutcome::Value { estimate, cross_check: Some(c), .. } => {
                    check((estimate - c.normalized).abs() <= 2e-6, || {
                        format!("{text} at ({x0}, {y0}): {estimate} vs {}", c.normalized)
                    })?;
                    finite += 1;
                }
                other => return Err(format!("{text} at ({x0}, {y0}): {other:?}")),
            }
        }
    }
    Ok(format!("unit and cauchy match the harmonic extension on the grid, {finite} finite cases agree"))
}

fn hp_sign(g: &Expr, x: f64) -> Option<i32> {
    hp::eval(g, &hp::Fixed::from_f64(x)).and_then(|v| hp::sign(&v))
}

fn bracket_ok(g: &Expr, b: Interval) -> bool {
    match (hp_sign(g, b.lo()), hp_sign(g, b.hi())) {
        (Some(s), Some(t)) => s != t,
        _ => true,
    }
}

fn delta_ok(g: &Expr, xs: impl Iterator<Item = f64>, delta: f64) -> bool {
    let d = hp::Fixed::from_f64(delta);
    let slack = hp::Fixed::from_f64(2f64.powi(-200));
    xs.filter_map(|x| hp::eval(g, &hp::Fixed::from_f64(x))).all(|v| v.0.abs() + &slack.0 >= d.0)
}

fn c8_verdicts() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0xacce_0008);
    for i in 0..1000 {
        let g = gen::expr(&mut rng, 5);
        let x = rng.random_range(-6.0..6.0);
        let e = g.enclose(&[Interval::point(x)]);
        if let Some(v) = hp::eval(&g, &hp::Fixed::from_f64(x)) {
            check(hp::contained(&v, e), || format!("case {i}: {g} at {x} escapes {e:?}"))?;
        }
    }
    let mut exprs: Vec<Expr> = repro::CURATED_EXPRESSIONS.iter().map(|s| parse_expr(s).unwrap()).collect();
    while exprs.len() < 80 {
        exprs.push(gen::expr(&mut rng, 3));
    }
    let mut decided = 0;
    for g in &exprs {
        let root = find_root(g, 8.0, 18);
        let sound = verify_root_verdict(g, &root)
            && match &root {
                RootVerdict::HasRoot { witness, .. } => bracket_ok(g, *witness),
                RootVerdict::NoRootInBox { delta, .. } => {
                    delta_ok(g, (0..=512).map(|i| -8.0 + i as f64 / 32.0), *delta)
                }
                RootVerdict::Unknown { .. } => true,
            };
        check(sound, || format!("false root verdict for {g}"))?;
        decided += usize::from(root.is_decided());
        let conv = integral_convergence(g, 14);
        let sound = verify_convergence(g, &conv)
            && match &conv {
                ConvergenceVerdict::Divergent { certificate } => bracket_ok(g, certificate.bracket),
                ConvergenceVerdict::Finite { certificate, .. } => {
                    delta_ok(g, (1..400).map(|i| (-PI / 2.0 + PI * i as f64 / 400.0).tan()), certificate.delta)
                }
                ConvergenceVerdict::Unknown { .. } => true,
            };
        check(sound, || format!("false convergence verdict for {g}"))?;
        decided += usize::from(!matches!(conv, ConvergenceVerdict::Unknown { .. }));
    }
    Ok(format!("1000 fuzz enclosures contain the oracle, {} expressions with {decided} decided verdicts, 0 false", exprs.len()))
}

fn c9_diophantine() -> Outcome {
    let fermat = builtin_family("fermat").ok_or("fermat missing")?;
    let out = search_solutions(&fermat, &[0], 50).map_err(|e| e.to_string())?;
    let mut oracle = 0u64;
    for a in 1u128..=51 {
        for b in 1u128..=51 {
            let s = a.pow(3) + b.pow(3);
            let c = (s as f64).cbrt().round() as u128;
            oracle += u64::from((c.saturating_sub(1)..=c + 1).any(|c| (1..=51).contains(&c) && c.pow(3) == s));
        }
    }
    check(out.count == 0 && oracle == 0, || format!("cubic: {} vs oracle {oracle}", out.count))?;
    let pyth = builtin_family("pythagorean").ok_or("pythagorean missing")?;
    let mut counts = Vec::new();
    for bound in [10u64, 20, 40] {
        let out = search_solutions(&pyth, &[], bound).map_err(|e| e.to_string())?;
        let mut direct = 0;
        for a in 0..=bound as u128 {
            for b in 0..=bound as u128 {
                for c in 0..=bound as u128 {
                    direct += u64::from(a * a + b * b == c * c);
                }
            }
        }
        check(out.count == direct, || format!("bound {bound}: {} vs {direct}", out.count))?;
        for s in &out.solutions {
            let [a, b, c] = [s[0] as u128, s[1] as u128, s[2] as u128];
            check(a * a + b * b == c * c && pyth.verify_witness(&[], s).unwrap(), || format!("{s:?}"))?;
        }
        counts.push(direct);
    }
    check(counts.windows(2).all(|w| w[0] < w[1]), || format!("{counts:?}"))?;
    Ok(format!("cubic 0 to bound 50, pythagorean {counts:?}, every witness re-verifies"))
}

fn c10_limits() -> Outcome {
    let hbar = limits::min_time(1.0, 1.0).map_err(|e| e.to_string())?;
    check(limits::ulps_apart(hbar, 1.0545718176461565e-34) <= 1, || format!("{hbar:e}"))?;
    check(limits::ulps_apart(limits::HBAR, 6.62607015e-34 / (2.0 * PI)) <= 1, || "HBAR".into())?;
    let mut rng = ChaCha8Rng::seed_from_u64(0x1171_0010);
    for _ in 0..2000 {
        let n = 10f64.powf(rng.random_range(0.0..15.0)).round();
        let e = 10f64.powf(rng.random_range(-30.0..30.0));
        let t = limits::min_time(n, e).unwrap();
        let back = limits::max_steps(t, e).unwrap();
        check(limits::ulps_apart(back, n) <= 1, || format!("n={n}, E={e}: {back}"))?;
        let (n2, e2) = (n + 1.0, e * 1.5);
        check(limits::min_time(n2, e).unwrap() > t && limits::min_time(n, e2).unwrap() < t, || {
            format!("monotonicity at n={n}, E={e}")
        })?;
    }
    Ok(format!("min_time(1, 1 J) = {hbar:e} s; 2000 round trips and monotonicity steps hold"))
}

fn main() -> ExitCode {
    let criteria: [(u32, fn() -> Outcome); 10] = [
        (1, c1_prefix_free),
        (2, c2_universality),
        (3, c3_slowdown),
        (4, c4_predictor),
        (5, c5_sigma),
        (6, c6_heat),
        (7, c7_electro),
        (8, c8_verdicts),
        (9, c9_diophantine),
        (10, c10_limits),
    ];
    let mut failed = 0;
    for (id, check) in criteria {
        let title = repro::CRITERIA[id as usize - 1].1;
        let outcome = std::panic::catch_unwind(check).unwrap_or_else(|_| Err("panicked".into()));
        let repro_ok = repro::run_criterion(id, 2).is_some_and(|c| c.passed);
        match (outcome, repro_ok) {
            (Ok(detail), true) => println!("PASS {id:>2} {title}: {detail}"),
            (Ok(detail), false) => {
                failed += 1;
                println!("FAIL {id:>2} {title}: oracle checks pass ({detail}) but the repro report fails");
            }
            (Err(detail), _) => {
                failed += 1;
                println!("FAIL {id:>2} {title}: {detail}");
            }
        }
    }
    println!("{} of {} criteria pass", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
