//! `dtc`: command-line front end for the driven spin-chain simulator.

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use dtc_core::io::bundle::execute;
use dtc_core::io::{JobKind, OutputFormat, RunConfig, VerifyRequest};
use dtc_core::{presets, DtcError, Result};

#[derive(Parser)]
#[command(
    name = "dtc",
    version,
    about = "Discrete time crystals in disordered driven spin chains"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Phase diagram over a 2D parameter grid.
    Sweep(RunArgs),
    /// Disorder-averaged spin-vector time trace.
    Trace(RunArgs),
    /// Trace of a protocol with timed rotations and axis switches.
    Protocol(RunArgs),
    /// Bloch-averaged purity map or cut.
    Purity(RunArgs),
    /// Run the built-in consistency checks.
    Verify(RunArgs),
    /// List the built-in configurations.
    Presets,
}

#[derive(Args)]
struct RunArgs {
    /// TOML run configuration.
    #[arg(long, conflicts_with = "preset")]
    config: Option<PathBuf>,
    /// Built-in configuration name (see `dtc presets`).
    #[arg(long)]
    preset: Option<String>,
    /// Grid resolution `AxB` (x points by y points).
    #[arg(long, value_parser = parse_grid)]
    grid: Option<(usize, usize)>,
    /// Disorder realizations per cell or trace.
    #[arg(long)]
    realizations: Option<usize>,
    /// Master seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads; 0 uses every core.
    #[arg(long, default_value_t = 0)]
    workers: usize,
    /// Output directory.
    #[arg(long, env = "DTC_OUT_DIR")]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<OutputFormat>,
}

fn parse_grid(s: &str) -> std::result::Result<(usize, usize), String> {
    let (a, b) = s
        .split_once(['x', 'X'])
        .ok_or_else(|| format!("expected AxB, got {s:?}"))?;
    let parse = |t: &str| {
        t.trim()
            .parse::<usize>()
            .ok()
            .filter(|&n| n > 0)
            .ok_or_else(|| format!("bad grid size {t:?}"))
    };
    Ok((parse(a)?, parse(b)?))
}

fn load(kind: JobKind, args: &RunArgs) -> Result<RunConfig> {
    let mut cfg = match (&args.config, &args.preset) {
        (Some(path), _) => RunConfig::from_path(path)?,
        (None, Some(name)) => presets::preset(name)?,
        (None, None) if kind == JobKind::Verify => RunConfig {
            verify: Some(VerifyRequest {}),
            ..Default::default()
        },
        (None, None) => {
            return Err(DtcError::Config(
                "one of --config or --preset is required".into(),
            ))
        }
    };
    let found = cfg.kind()?;
    if found != kind {
        return Err(DtcError::Config(format!(
            "`{}` needs a [{}] job, the configuration holds [{}]",
            kind.name(),
            kind.name(),
            found.name()
        )));
    }
    if let Some(plan) = cfg.plan_mut() {
        if let Some((nx, ny)) = args.grid {
            plan.x_axis = plan.x_axis.resampled(nx);
            plan.y_axis = plan.y_axis.resampled(ny);
        }
        if let Some(r) = args.realizations {
            plan.realizations = r;
        }
        if let Some(s) = args.seed {
            plan.master_seed = s;
        }
    } else if let Some(req) = cfg.trace_mut() {
        if args.grid.is_some() {
            return Err(DtcError::Config("--grid applies to sweeps only".into()));
        }
        if let Some(r) = args.realizations {
            req.realizations = r;
        }
        if let Some(s) = args.seed {
            req.master_seed = s;
        }
    }
    if let Some(dir) = &args.out {
        cfg.output.dir = Some(dir.clone());
    }
    if let Some(f) = args.format {
        cfg.output.format = f;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn run(kind: JobKind, args: &RunArgs) -> Result<i32> {
    let cfg = load(kind, args)?;
    let outcome = execute(&cfg, args.workers)?;
    for p in &outcome.outputs {
        println!("wrote {}", p.display());
    }
    for d in &outcome.diagnostics {
        eprintln!("diagnostic: {d}");
    }
    if outcome.missing_cells > 0 {
        eprintln!("{} cell(s) failed", outcome.missing_cells);
    }
    if outcome.failed_checks > 0 {
        eprintln!("{} check(s) failed", outcome.failed_checks);
    }
    Ok(outcome.exit_code())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (kind, args) = match &cli.command {
        Command::Presets => {
            let mut out = std::io::stdout().lock();
            for (name, about) in presets::list() {
                // a closed pipe (e.g. `| head`) is not an error
                if writeln!(out, "{name:<8} {about}").is_err() {
                    break;
                }
            }
            return ExitCode::SUCCESS;
        }
        Command::Sweep(a) => (JobKind::Sweep, a),
        Command::Trace(a) => (JobKind::Trace, a),
        Command::Protocol(a) => (JobKind::Protocol, a),
        Command::Purity(a) => (JobKind::Purity, a),
        Command::Verify(a) => (JobKind::Verify, a),
    };
    match run(kind, args) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
