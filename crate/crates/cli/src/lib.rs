//! Command-line front end for the line-shape library.

pub mod commands;
pub mod config;
pub mod error;
pub mod output;

use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};
use lineshape_core::analysis::Window;
use lineshape_core::{LambdaImSign, Preset};

use config::{parse_config, RunConfig};
use error::{CliError, EXIT_CHECKS_FAILED};

#[derive(Debug, Parser)]
#[command(name = "lineshape", version, about = "Spectral line shapes with a nonlocal-in-time bath coupling")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Line profile on a grid: profile.csv, peaks.json and optionally profile.gp.
    Profile(RunArgs),
    /// Residual checks of the closed form: verify.json. Exits 1 if a gating check fails.
    Verify(RunArgs),
    /// Survival amplitude of the excited state: survival.csv. Needs Im Λ <= 0.
    Evolve(RunArgs),
    /// Split/single classification over the [sweep] grid: sweep.csv.
    Sweep(RunArgs),
}

#[derive(Debug, Args)]
pub struct RunArgs {
    /// TOML configuration file.
    #[arg(long, conflicts_with = "preset")]
    pub config: Option<PathBuf>,
    /// Bundled parameter set: table1-a, table1-b, table1-c or table1-d.
    #[arg(long)]
    pub preset: Option<String>,
    /// Output directory.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Number of grid points.
    #[arg(long)]
    pub points: Option<usize>,
    /// Photon-energy window as LO,HI in eV.
    #[arg(long, value_name = "LO,HI")]
    pub window: Option<String>,
    /// How the configured Im Λ enters the formulas.
    #[arg(long, value_name = "as_printed|flipped")]
    pub lambda_im_sign: Option<String>,
}

fn parse_window(s: &str) -> Result<Window, CliError> {
    let bad = || CliError::validation("--window", &format!("expected LO,HI in eV, got `{s}`"));
    let (lo, hi) = s.split_once(',').ok_or_else(bad)?;
    let lo: f64 = lo.trim().parse().map_err(|_| bad())?;
    let hi: f64 = hi.trim().parse().map_err(|_| bad())?;
    Window::new(lo, hi).map_err(|_| CliError::validation("--window", "need 0 < LO < HI"))
}

/// Builds the run configuration from a file or preset plus flag overrides.
pub fn load(args: &RunArgs) -> Result<RunConfig, CliError> {
    let mut cfg = match (&args.config, &args.preset) {
        (Some(path), None) => {
            let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
                path: path.display().to_string(),
                source,
            })?;
            parse_config(&text)?
        }
        (None, Some(name)) => {
            let preset = Preset::from_str(name)
                .map_err(|_| CliError::validation("--preset", &format!("unknown preset `{name}`")))?;
            RunConfig::from_preset(preset)
        }
        _ => return Err(CliError::Usage("one of --config FILE or --preset NAME is required".into())),
    };
    if let Some(dir) = &args.out {
        cfg.output_dir = dir.clone();
    }
    if let Some(n) = args.points {
        cfg.n_points = n;
    }
    if let Some(w) = &args.window {
        cfg.window = parse_window(w)?;
    }
    if let Some(s) = &args.lambda_im_sign {
        cfg.lambda_im_sign =
            LambdaImSign::from_str(s).map_err(|e| CliError::validation("--lambda-im-sign", &e))?;
    }
    cfg.validate()?;
    Ok(cfg)
}

/// Worker cap from LINESHAPE_THREADS, if set.
fn configure_threads() -> Result<(), CliError> {
    let Ok(v) = std::env::var("LINESHAPE_THREADS") else {
        return Ok(());
    };
    let n: usize = v
        .trim()
        .parse()
        .ok()
        .filter(|n| *n >= 1)
        .ok_or_else(|| CliError::validation("LINESHAPE_THREADS", "must be an integer >= 1"))?;
    // A second call in the same process keeps the first pool.
    let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    Ok(())
}

type CommandFn = fn(&RunConfig) -> Result<commands::Artifacts, CliError>;

fn execute(cli: &Cli) -> Result<i32, CliError> {
    configure_threads()?;
    let (args, run): (&RunArgs, CommandFn) = match &cli.command {
        Command::Profile(a) => (a, commands::profile),
        Command::Verify(a) => (a, commands::verify),
        Command::Evolve(a) => (a, commands::evolve),
        Command::Sweep(a) => (a, commands::sweep_cmd),
    };
    let cfg = load(args)?;
    let artifacts = run(&cfg)?;
    let written = output::write_all_atomic(&cfg.output_dir, &artifacts.files)?;
    println!("{}", artifacts.summary);
    for path in written {
        println!("wrote {}", path.display());
    }
    Ok(if artifacts.passed { 0 } else { EXIT_CHECKS_FAILED })
}

/// Runs one command and returns the process exit status.
pub fn run(cli: &Cli) -> i32 {
    match execute(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
