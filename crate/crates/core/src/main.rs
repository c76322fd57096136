use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use phimodel::cli::{self, Command, Format, RunConfig, EXIT_ERROR};
use phimodel::planner::Theorem;

#[derive(Parser)]
#[command(name = "phimodel", version, about = "Plan and validate truncated-series models of phi-sub-Gaussian processes")]
struct Args {
    #[command(subcommand)]
    command: Cmd,

    /// Process specification file
    #[arg(long, global = true)]
    spec: Option<PathBuf>,
    /// Directory for the CSV output
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true)]
    delta: Option<f64>,
    #[arg(long, global = true)]
    nu: Option<f64>,
    /// Truncation level N (max N for sweep)
    #[arg(long, global = true)]
    n: Option<usize>,
    #[arg(long, global = true, default_value_t = 10_000)]
    paths: usize,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Number of time-grid points
    #[arg(long, global = true, default_value_t = 4097)]
    grid: usize,
    #[arg(long, global = true, value_enum)]
    theorem: Option<TheoremArg>,
    #[arg(long, global = true, value_enum, default_value_t = FormatArg::Csv)]
    format: FormatArg,
    /// Fixed p for the free-p theorems (bound only)
    #[arg(long, global = true)]
    p: Option<f64>,
    #[arg(long, global = true, default_value_t = 0.25)]
    x_min: f64,
    #[arg(long, global = true, default_value_t = 5.0)]
    x_max: f64,
    #[arg(long, global = true, default_value_t = 40)]
    x_points: usize,
}

#[derive(Subcommand, Clone, Copy)]
enum Cmd {
    /// Tail bound of sup |Delta_N| as a function of x
    Bound,
    /// Smallest N meeting (delta, nu)
    Plan,
    /// Sample paths of X_N
    Simulate,
    /// Monte Carlo check of the bound at (N, delta)
    Validate,
    /// gamma_N and the bound for N = 1..n
    Sweep,
}

#[derive(ValueEnum, Clone, Copy)]
enum TheoremArg {
    T4,
    T5,
    T7,
    T8,
    T11,
    T12,
}

#[derive(ValueEnum, Clone, Copy)]
enum FormatArg {
    Csv,
    Pretty,
}

fn main() -> ExitCode {
    let args = Args::parse();
    let Some(spec) = args.spec else {
        eprintln!("error: --spec is required");
        return ExitCode::from(EXIT_ERROR as u8);
    };
    let command = match args.command {
        Cmd::Bound => Command::Bound,
        Cmd::Plan => Command::Plan,
        Cmd::Simulate => Command::Simulate,
        Cmd::Validate => Command::Validate,
        Cmd::Sweep => Command::Sweep,
    };
    let cfg = RunConfig {
        output_dir: args.out,
        delta: args.delta,
        nu: args.nu,
        n: args.n,
        n_paths: args.paths,
        seed: args.seed,
        grid_size: args.grid,
        theorem: args.theorem.map(|t| match t {
            TheoremArg::T4 => Theorem::T4,
            TheoremArg::T5 => Theorem::T5,
            TheoremArg::T7 => Theorem::T7,
            TheoremArg::T8 => Theorem::T8,
            TheoremArg::T11 => Theorem::T11,
            TheoremArg::T12 => Theorem::T12,
        }),
        format: match args.format {
            FormatArg::Csv => Format::Csv,
            FormatArg::Pretty => Format::Pretty,
        },
        p: args.p,
        x_min: args.x_min,
        x_max: args.x_max,
        x_points: args.x_points,
        ..RunConfig::new(command, spec)
    };
    match cli::run(&cfg) {
        Ok(out) => {
            print!("{}", out.stdout);
            for w in &out.warnings {
                eprintln!("{w}");
            }
            ExitCode::from(out.exit_code as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_ERROR as u8)
        }
    }
}
