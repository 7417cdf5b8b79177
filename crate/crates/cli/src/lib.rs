//! Command-line front end. Every subcommand produces one serializable value;
//! text output is a rendering of the same data.

pub mod args;
pub mod repro;

use args::{Cli, Command, DiophAction, EnumArgs, ExprAction, KernelName, MachineAction};
use serde::Serialize;
use serde_json::{json, Value};
use std::path::Path;
use thiserror::Error;
use uncomp_analysis::delta1::{find_root, integral_convergence, parse_expr, Expr, Interval};
use uncomp_analysis::diophantine::{builtin_family, count_profile, param_grid, search_solutions, DiophantineFamily};
use uncomp_analysis::integrals::{self, sequence_csv, verdict_sequence, BoundaryFunction, Point, Problem};
use uncomp_core::enumeration::{
    enumerate_domain, h_upper, omega_bounds, sigma_table, EnumerationConfig, EnumerationReport, Retention,
};
use uncomp_core::predictor::{builtin_suite, min_time, parse_suite, slowdown_report};
use uncomp_core::{
    decode_machine, encode_machine, limits, monte_carlo_run, parse_machine, run, universal_run, BitString,
    MachineDescription,
};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Domain(String),
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        1
    }
}

fn domain(e: impl std::fmt::Display) -> CliError {
    CliError::Domain(e.to_string())
}

/// Result of one command.
pub struct Output {
    pub json: Value,
    pub text: String,
    /// Nonzero when the command ran but its checks failed.
    pub exit_code: i32,
}

impl Output {
    fn value<T: Serialize>(v: &T) -> Result<Output, CliError> {
        let json = serde_json::to_value(v).map_err(domain)?;
        let text = render(&json);
        Ok(Output { json, text, exit_code: 0 })
    }

    fn with_text<T: Serialize>(v: &T, text: String) -> Result<Output, CliError> {
        Ok(Output { json: serde_json::to_value(v).map_err(domain)?, text, exit_code: 0 })
    }

    pub fn render(&self, as_json: bool) -> String {
        if as_json {
            serde_json::to_string_pretty(&self.json).expect("JSON value serializes")
        } else {
            self.text.trim_end().to_string()
        }
    }
}

/// `key: value` lines for objects; nested values stay compact JSON.
fn render(v: &Value) -> String {
    match v {
        Value::Object(map) => map
            .iter()
            .map(|(k, v)| match v {
                Value::String(s) => format!("{k}: {s}"),
                Value::Null => format!("{k}: -"),
                other => format!("{k}: {other}"),
            })
            .collect::<Vec<_>>()
            .join("\n"),
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|source| CliError::Io { path: path.display().to_string(), source })
}

fn bits(s: &str) -> Result<BitString, CliError> {
    s.parse().map_err(|e| CliError::Domain(format!("bad bit string `{s}`: {e}")))
}

fn machine(path: &Path) -> Result<MachineDescription, CliError> {
    parse_machine(&read(path)?).map_err(domain)
}

fn expr(text: &str) -> Result<Expr, CliError> {
    parse_expr(text).map_err(domain)
}

fn enumerate(args: EnumArgs, jobs: usize, retention: Retention) -> Result<EnumerationReport, CliError> {
    let config = EnumerationConfig::new(args.max_len, args.budget, args.mode.mode()).jobs(jobs).retention(retention);
    enumerate_domain(&config).map_err(domain)
}

fn list<T: std::str::FromStr>(s: &str) -> Result<Vec<T>, CliError> {
    s.split(',')
        .map(str::trim)
        .filter(|p| !p.is_empty())
        .map(|p| p.parse().map_err(|_| CliError::Domain(format!("bad list item `{p}`"))))
        .collect()
}

fn family(spec: &str) -> Result<DiophantineFamily, CliError> {
    if let Some(f) = builtin_family(spec) {
        return Ok(f);
    }
    let text = match spec.strip_prefix('@') {
        Some(path) => read(Path::new(path))?,
        None => spec.to_string(),
    };
    DiophantineFamily::parse(text.trim()).map_err(domain)
}

fn ranges(s: &str) -> Result<Vec<(u64, u64)>, CliError> {
    s.split(',')
        .map(str::trim)
        .filter(|p| !p.is_empty())
        .map(|p| {
            let bad = || CliError::Domain(format!("bad range `{p}`, expected lo..hi"));
            match p.split_once("..") {
                Some((a, b)) => Ok((a.parse().map_err(|_| bad())?, b.parse().map_err(|_| bad())?)),
                None => p.parse().map(|v| (v, v)).map_err(|_| bad()),
            }
        })
        .collect()
}

pub fn execute(cli: &Cli) -> Result<Output, CliError> {
    let jobs = cli.jobs as usize;
    match &cli.command {
        Command::Machine { action } => machine_command(action),
        Command::Enumerate { args, full, h_of } => {
            let retention = if *full { Retention::Full } else { Retention::Summary };
            let report = enumerate(*args, jobs, retention)?;
            let mut json = serde_json::to_value(&report).map_err(domain)?;
            if let Some(x) = h_of {
                json["h_upper"] = json!(h_upper(&bits(x)?, &report));
            }
            let omega = omega_bounds(&report);
            let mut text = format!(
                "max_len: {}\nmode: {}\ncounts: {}\nomega_lower: {}\nomega_upper: {}\nunresolved: {}",
                report.max_len,
                report.mode,
                serde_json::to_string(&report.counts).map_err(domain)?,
                omega.lower,
                omega.upper,
                report.unresolved_total
            );
            if let Some(h) = json.get("h_upper") {
                text.push_str(&format!("\nh_upper: {h}"));
            }
            Ok(Output { json, text, exit_code: 0 })
        }
        Command::Omega { args } => {
            let report = enumerate(*args, jobs, Retention::Summary)?;
            let b = omega_bounds(&report);
            let text = format!(
                "lower: {} ({:.12})\nupper: {} ({:.12})\nvalid_at_scale: {}",
                b.lower,
                b.lower.to_f64(),
                b.upper,
                b.upper.to_f64(),
                b.valid_at_scale
            );
            Output::with_text(&b, text)
        }
        Command::Sigma { args } => {
            let table = sigma_table(&enumerate(*args, jobs, Retention::Summary)?);
            let mut text = table.to_csv();
            text.push_str(&match table.halting_time_constant {
                Some(c) => format!("# halting-time constant c = {c}"),
                None => "# halting-time constant: none on this range".into(),
            });
            Output::with_text(&table, text)
        }
        Command::Predict { program, budget, mode } => {
            Output::value(&min_time(&bits(program)?, *budget, mode.mode(), jobs).map_err(domain)?)
        }
        Command::Slowdown { suite, budget, mode } => {
            let suite = match suite {
                Some(path) => parse_suite(&read(path)?).map_err(domain)?,
                None => builtin_suite(),
            };
            let report = slowdown_report(&suite, *budget, mode.mode()).map_err(domain)?;
            Output::with_text(&report, report.to_csv())
        }
        Command::Expr { action } => expr_command(action),
        Command::Root { expr: text, radius, depth } => {
            if !(*radius > 0.0 && radius.is_finite()) {
                return Err(CliError::Domain(format!("radius must be positive, got {radius}")));
            }
            Output::value(&find_root(&expr(text)?, *radius, *depth))
        }
        Command::Converge { expr: text, depth } => Output::value(&integral_convergence(&expr(text)?, *depth)),
        Command::Heat { data, t0 } => integral_command("heat", data, *t0, true),
        Command::Electro { data, y0, no_cross_check } => integral_command("electro", data, *y0, !no_cross_check),
        Command::Sequence { family, kernel, x0, param, budget } => {
            let members = read(family)?
                .lines()
                .map(|l| l.split('#').next().unwrap_or_default().trim())
                .filter(|l| !l.is_empty())
                .map(expr)
                .collect::<Result<Vec<_>, _>>()?;
            let name = match kernel {
                KernelName::Heat => "heat",
                KernelName::Electro => "electro",
            };
            let problem = Problem::new(name, *x0, *param).map_err(domain)?;
            problem.kernel().check_point(problem.point()).map_err(domain)?;
            let entries = verdict_sequence(&members, problem, *budget).map_err(domain)?;
            Output::with_text(&entries, sequence_csv(&entries))
        }
        Command::Dioph { action } => dioph_command(action),
        Command::Limits { n, energy, time } => {
            Output::value(&limits::physical_budget(*n, *energy, *time).map_err(domain)?)
        }
        Command::Repro => {
            let report = repro::run_all(jobs);
            let text = report.lines().join("\n");
            let exit_code = if report.all_passed() { 0 } else { 1 };
            Ok(Output { json: serde_json::to_value(&report).map_err(domain)?, text, exit_code })
        }
    }
}

fn machine_command(action: &MachineAction) -> Result<Output, CliError> {
    match action {
        MachineAction::Run { asm, input, budget, mode } => {
            Output::value(&run(&machine(asm)?, &bits(input)?, *budget, mode.mode()).map_err(domain)?)
        }
        MachineAction::Encode { asm } => {
            let code = encode_machine(&machine(asm)?);
            Output::with_text(&json!({ "program": code, "length": code.len() }), code.to_string())
        }
        MachineAction::Decode { program } => {
            let p = bits(program)?;
            let (d, used) = decode_machine(p.bits()).map_err(domain)?;
            let rest = BitString::from(&p.bits()[used..]);
            let asm = d.to_asm();
            Output::with_text(&json!({ "asm": asm, "description_bits": used, "input": rest }), asm)
        }
        MachineAction::Universal { program, budget, mode } => {
            Output::value(&universal_run(&bits(program)?, *budget, mode.mode()).map_err(domain)?)
        }
        MachineAction::Sample { asm, input, trials, seed, budget } => {
            Output::value(&monte_carlo_run(&machine(asm)?, &bits(input)?, *trials, *seed, *budget).map_err(domain)?)
        }
    }
}

fn expr_command(action: &ExprAction) -> Result<Output, CliError> {
    match action {
        ExprAction::Show { text } => {
            let e = expr(text)?;
            Output::with_text(&json!({ "expr": e, "size": e.size() }), e.to_string())
        }
        ExprAction::Eval { text, at } => {
            let v = expr(text)?.eval(&[*at]);
            Output::with_text(&json!({ "x": at, "value": v }), format!("{v}"))
        }
        ExprAction::Enclose { text, lo, hi } => {
            let x = Interval::try_new(*lo, *hi).map_err(domain)?;
            let v = expr(text)?.enclose(&[x]);
            Output::with_text(&json!({ "domain": x, "enclosure": v }), format!("[{:e}, {:e}]", v.lo(), v.hi()))
        }
        ExprAction::Compose { outer, inner } => {
            let e = expr(outer)?.substitute(1, &expr(inner)?).map_err(domain)?;
            Output::with_text(&json!({ "expr": e }), e.to_string())
        }
    }
}

fn integral_command(kernel: &str, data: &args::IntegralArgs, param: f64, cross_check: bool) -> Result<Output, CliError> {
    let f: BoundaryFunction = data.f.parse().map_err(domain)?;
    let k = integrals::kernel(kernel).expect("registered kernel");
    let point = Point::new(data.x0, param);
    if data.classify {
        Output::value(&integrals::classify(k, &f, point, data.budget).map_err(domain)?)
    } else {
        Output::value(&integrals::evaluate(k, &f, point, data.tol, data.budget, cross_check).map_err(domain)?)
    }
}

fn dioph_command(action: &DiophAction) -> Result<Output, CliError> {
    match action {
        DiophAction::Search { family: spec, params, bound } => {
            let f = family(spec)?;
            let outcome = search_solutions(&f, &list(params)?, *bound).map_err(domain)?;
            let mut text = format!("family: {}\nbound: {}\ncount: {}\nchecked: {}", outcome.family, bound, outcome.count, outcome.checked);
            for s in &outcome.solutions {
                let row: Vec<String> = f.unknowns.iter().zip(s).map(|(n, v)| format!("{n}={v}")).collect();
                text.push_str(&format!("\n{}", row.join(" ")));
            }
            Output::with_text(&outcome, text)
        }
        DiophAction::Profile { family: spec, params, bounds } => {
            let f = family(spec)?;
            let grid = param_grid(&ranges(params)?);
            let profile = count_profile(&f, &grid, &list(bounds)?).map_err(domain)?;
            let mut text = profile.csv();
            for c in &profile.classes {
                let p: Vec<String> = c.params.iter().map(u64::to_string).collect();
                text.push_str(&format!("# params [{}]: {}\n", p.join(" "), c.class));
            }
            Output::with_text(&profile, text.trim_end().to_string())
        }
    }
}
