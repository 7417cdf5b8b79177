use clap::{Args, Parser, Subcommand, ValueEnum};
use std::path::PathBuf;
use uncomp_core::RegisterMode;

#[derive(Parser, Debug)]
#[command(name = "uncomp", version, about = "Uncomputability experiments: machines, enumeration, predictors, integrals, Diophantine search")]
pub struct Cli {
    /// Emit JSON instead of text.
    #[arg(long, global = true)]
    pub json: bool,

    /// Worker threads for parallel searches.
    #[arg(long, global = true, env = "UNCOMP_JOBS", default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
    pub jobs: u64,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone, Copy)]
pub struct ModeArgs {
    /// Register saturation value.
    #[arg(long, default_value_t = 64, value_parser = clap::value_parser!(u64).range(1..))]
    pub cap: u64,

    /// Unbounded registers; loops can no longer be proved.
    #[arg(long, conflicts_with = "cap")]
    pub unbounded: bool,
}

impl ModeArgs {
    pub fn mode(self) -> RegisterMode {
        if self.unbounded {
            RegisterMode::Unbounded
        } else {
            RegisterMode::Capped(self.cap)
        }
    }
}

#[derive(Args, Debug, Clone, Copy)]
pub struct EnumArgs {
    /// Longest program length enumerated.
    #[arg(long)]
    pub max_len: usize,

    /// Step budget per run.
    #[arg(long, default_value_t = 100_000)]
    pub budget: u64,

    #[command(flatten)]
    pub mode: ModeArgs,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Run, encode, decode or sample register machines.
    Machine {
        #[command(subcommand)]
        action: MachineAction,
    },
    /// Classify every program up to a length.
    Enumerate {
        #[command(flatten)]
        args: EnumArgs,
        /// Keep every classified run in the report.
        #[arg(long)]
        full: bool,
        /// Also report the shortest program producing this output.
        #[arg(long)]
        h_of: Option<String>,
    },
    /// Lower and upper bounds on the halting probability.
    Omega {
        #[command(flatten)]
        args: EnumArgs,
    },
    /// Σ̂ and busy-beaver time table with the halting-time constant.
    Sigma {
        #[command(flatten)]
        args: EnumArgs,
    },
    /// Fastest equivalent program for a program of the universal machine.
    Predict {
        #[arg(long)]
        program: String,
        #[arg(long, default_value_t = 100_000)]
        budget: u64,
        #[command(flatten)]
        mode: ModeArgs,
    },
    /// Universal-machine time against direct execution over a suite.
    Slowdown {
        /// JSON suite file; the built-in suite when omitted.
        #[arg(long)]
        suite: Option<PathBuf>,
        #[arg(long, default_value_t = 100_000)]
        budget: u64,
        #[command(flatten)]
        mode: ModeArgs,
    },
    /// Parse, evaluate, enclose or compose expressions.
    Expr {
        #[command(subcommand)]
        action: ExprAction,
    },
    /// Certified root search on a symmetric box.
    #[command(allow_negative_numbers = true)]
    Root {
        #[arg(long)]
        expr: String,
        #[arg(long, default_value_t = 8.0)]
        radius: f64,
        #[arg(long, default_value_t = 20)]
        depth: u32,
    },
    /// Finiteness of ∫ dx / ((1 + x²) G(x)²).
    Converge {
        #[arg(long)]
        expr: String,
        #[arg(long, default_value_t = 14)]
        depth: u32,
    },
    /// Heat-kernel integral of boundary data.
    #[command(allow_negative_numbers = true)]
    Heat {
        #[command(flatten)]
        data: IntegralArgs,
        #[arg(long)]
        t0: f64,
    },
    /// Half-plane Poisson integral of boundary data.
    #[command(allow_negative_numbers = true)]
    Electro {
        #[command(flatten)]
        data: IntegralArgs,
        #[arg(long)]
        y0: f64,
        /// Skip the second representation.
        #[arg(long)]
        no_cross_check: bool,
    },
    /// Finite/divergent verdicts for a family of expressions.
    #[command(allow_negative_numbers = true)]
    Sequence {
        /// One expression per line; `#` starts a comment.
        #[arg(long)]
        family: PathBuf,
        #[arg(long, value_enum, default_value_t = KernelName::Heat)]
        kernel: KernelName,
        #[arg(long, default_value_t = 0.0)]
        x0: f64,
        /// `t0` for heat, `y0` for electro.
        #[arg(long, default_value_t = 1.0)]
        param: f64,
        #[arg(long, default_value_t = 14)]
        budget: u32,
    },
    /// Bounded search over Diophantine families.
    Dioph {
        #[command(subcommand)]
        action: DiophAction,
    },
    /// Time and energy needed for an n-step computation.
    #[command(allow_negative_numbers = true)]
    Limits {
        #[arg(long)]
        n: f64,
        /// Joules.
        #[arg(long)]
        energy: f64,
        /// Seconds.
        #[arg(long)]
        time: Option<f64>,
    },
    /// Run every acceptance check and report.
    Repro,
}

#[derive(Args, Debug, Clone)]
pub struct IntegralArgs {
    /// Builtin name, `recip2(H)`, `cauchy_recip2(H)`, `sum(c f, ...)` or an expression.
    #[arg(long = "f")]
    pub f: String,
    #[arg(long)]
    pub x0: f64,
    #[arg(long, default_value_t = 1e-6)]
    pub tol: f64,
    #[arg(long, default_value_t = 14)]
    pub budget: u32,
    /// Report the three-valued classification instead of a value.
    #[arg(long)]
    pub classify: bool,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum KernelName {
    Heat,
    Electro,
}

#[derive(Subcommand, Debug)]
pub enum MachineAction {
    /// Run an assembly machine on an input.
    Run {
        #[arg(long)]
        asm: PathBuf,
        #[arg(long, default_value = "")]
        input: String,
        #[arg(long, default_value_t = 100_000)]
        budget: u64,
        #[command(flatten)]
        mode: ModeArgs,
    },
    /// Binary description of an assembly machine.
    Encode {
        #[arg(long)]
        asm: PathBuf,
    },
    /// Assembly for the description at the start of a bit string.
    Decode {
        #[arg(long)]
        program: String,
    },
    /// Run the universal machine on a program.
    Universal {
        #[arg(long)]
        program: String,
        #[arg(long, default_value_t = 100_000)]
        budget: u64,
        #[command(flatten)]
        mode: ModeArgs,
    },
    /// Output frequencies of a machine using COIN.
    Sample {
        #[arg(long)]
        asm: PathBuf,
        #[arg(long, default_value = "")]
        input: String,
        #[arg(long, default_value_t = 1000)]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 10_000)]
        budget: u64,
    },
}

#[derive(Subcommand, Debug)]
#[command(allow_negative_numbers = true)]
pub enum ExprAction {
    /// Canonical text form.
    Show { text: String },
    /// Floating-point value at a point.
    #[command(allow_negative_numbers = true)]
    Eval {
        text: String,
        #[arg(long)]
        at: f64,
    },
    /// Certified enclosure over an interval.
    #[command(allow_negative_numbers = true)]
    Enclose {
        text: String,
        #[arg(long)]
        lo: f64,
        #[arg(long)]
        hi: f64,
    },
    /// Substitute `inner` for x1 in `outer`.
    Compose { outer: String, inner: String },
}

#[derive(Subcommand, Debug)]
pub enum DiophAction {
    /// Every solution with unknowns in [0, bound].
    Search {
        /// Builtin name, family text, or `@path`.
        #[arg(long)]
        family: String,
        /// Comma-separated parameter values.
        #[arg(long, default_value = "")]
        params: String,
        #[arg(long)]
        bound: u64,
    },
    /// Solution counts over parameter ranges and bounds.
    Profile {
        #[arg(long)]
        family: String,
        /// One inclusive range `lo..hi` per parameter, comma-separated.
        #[arg(long, default_value = "")]
        params: String,
        /// Comma-separated bounds.
        #[arg(long)]
        bounds: String,
    },
}
