use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use sparseoc::harness::{run, Algorithm, ExampleKind, RunConfig, SweepParam, SweepSpec};

#[derive(Parser)]
#[command(
    name = "sparseoc",
    version,
    about = "Sparse optimal control of elliptic PDEs with L^(1/p) penalties"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a solve, parameter sweep, or algorithm comparison.
    ///
    /// Settings come from --config (a JSON file mirroring RunConfig),
    /// overridden by any flags given here. With no config file, defaults
    /// select example1 on a 31x31 grid solved by the DC algorithm.
    Solve(SolveArgs),
}

#[derive(Args)]
struct SolveArgs {
    /// JSON config file; flags below override its fields.
    #[arg(long)]
    config: Option<PathBuf>,

    /// example1 | example2_comparison | example3_box | custom
    #[arg(long, value_parser = parse_example)]
    example: Option<ExampleKind>,

    /// Interior grid nodes per side.
    #[arg(long)]
    n: Option<usize>,

    /// Control cost weight alpha >= 0 (default depends on the example).
    #[arg(long)]
    alpha: Option<f64>,

    /// Sparsity weight beta >= 0 (default depends on the example).
    #[arg(long)]
    beta: Option<f64>,

    /// Huber regularization parameter gamma > 0.
    #[arg(long)]
    gamma: Option<f64>,

    /// Penalty power p >= 1 (the penalty integrand is |u|^(1/p)).
    #[arg(long)]
    p: Option<f64>,

    /// Box constraints as "lo,hi" with lo <= 0 <= hi.
    #[arg(long, value_name = "LO,HI", value_parser = parse_box)]
    r#box: Option<(f64, f64)>,

    /// dca | pd
    #[arg(long, value_parser = parse_algorithm)]
    algorithm: Option<Algorithm>,

    /// Outer stationarity tolerance.
    #[arg(long)]
    outer_tol: Option<f64>,

    /// Outer iteration cap.
    #[arg(long)]
    max_outer: Option<usize>,

    /// Sweep one parameter: "param=v1,v2,..." with param in
    /// {alpha, beta, gamma, p}.
    #[arg(long, value_name = "PARAM=V1,V2,...", value_parser = parse_sweep)]
    sweep: Option<SweepSpec>,

    /// Output directory (created if missing).
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
}

fn parse_example(s: &str) -> Result<ExampleKind, String> {
    s.parse().map_err(|e| format!("{e}"))
}

fn parse_algorithm(s: &str) -> Result<Algorithm, String> {
    s.parse().map_err(|e| format!("{e}"))
}

fn parse_box(s: &str) -> Result<(f64, f64), String> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != 2 {
        return Err(format!("expected \"lo,hi\", got \"{s}\""));
    }
    let lo: f64 = parts[0]
        .trim()
        .parse()
        .map_err(|_| format!("bad lower bound \"{}\"", parts[0]))?;
    let hi: f64 = parts[1]
        .trim()
        .parse()
        .map_err(|_| format!("bad upper bound \"{}\"", parts[1]))?;
    Ok((lo, hi))
}

fn parse_sweep(s: &str) -> Result<SweepSpec, String> {
    let (name, list) = s
        .split_once('=')
        .ok_or_else(|| format!("expected \"param=v1,v2,...\", got \"{s}\""))?;
    let param: SweepParam = name.trim().parse().map_err(|e| format!("{e}"))?;
    let values = list
        .split(',')
        .map(|v| {
            v.trim()
                .parse::<f64>()
                .map_err(|_| format!("bad sweep value \"{v}\""))
        })
        .collect::<Result<Vec<f64>, String>>()?;
    Ok(SweepSpec { param, values })
}

fn build_config(args: &SolveArgs) -> sparseoc::Result<RunConfig> {
    let mut config = match &args.config {
        Some(path) => RunConfig::from_json_file(path)?,
        None => RunConfig::default(),
    };
    if let Some(v) = args.example {
        config.example = v;
    }
    if let Some(v) = args.n {
        config.n = v;
    }
    if let Some(v) = args.alpha {
        config.alpha = Some(v);
    }
    if let Some(v) = args.beta {
        config.beta = Some(v);
    }
    if let Some(v) = args.gamma {
        config.gamma = v;
    }
    if let Some(v) = args.p {
        config.p = v;
    }
    if let Some(v) = args.r#box {
        config.box_bounds = Some(v);
    }
    if let Some(v) = args.algorithm {
        config.algorithm = v;
    }
    if let Some(v) = args.outer_tol {
        config.outer_tol = v;
    }
    if let Some(v) = args.max_outer {
        config.max_outer = v;
    }
    if let Some(v) = &args.sweep {
        config.sweep = Some(v.clone());
    }
    if let Some(v) = &args.out {
        config.output_dir = v.clone();
    }
    config.normalized()
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let Command::Solve(args) = cli.command;
    let config = match build_config(&args) {
        Ok(config) => config,
        Err(err) => {
            eprintln!("error: {err}");
            return ExitCode::FAILURE;
        }
    };
    match run(&config) {
        Ok(()) => {
            println!("wrote results to {}", config.output_dir.display());
            ExitCode::SUCCESS
        }
        Err(err) => {
            eprintln!("error: {err}");
            eprintln!(
                "note: partial outputs may remain in {}",
                config.output_dir.display()
            );
            ExitCode::FAILURE
        }
    }
}
