use std::env;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use usc_squeeze::config::{parse_config, Experiment, RunConfig};
use usc_squeeze::export::{reproduce_from_json, OutputFormat};
use usc_squeeze::runner::{run, RunStatus};
use usc_squeeze::Error;

/// Consulted only when `--threads` is absent.
const THREADS_ENV: &str = "USC_SQUEEZE_THREADS";

const EXIT_VALIDATION_FAILED: u8 = 1;
const EXIT_CONFIG_PARSE: u8 = 2;
const EXIT_CONFIG_DOMAIN: u8 = 3;
const EXIT_UNSTABLE: u8 = 4;
const EXIT_NUMERICAL: u8 = 5;
const EXIT_IO: u8 = 6;

#[derive(Debug, Parser)]
#[command(
    name = "usc-squeeze",
    version,
    about = "Output squeezing spectra of a modulated light-matter system"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run an experiment described by a config file.
    Run(RunArgs),
    /// Parse and validate a config file without running it.
    Check {
        /// Config file; `<path>.toml` is tried when `<path>` does not exist.
        config: PathBuf,
    },
    /// Recompute a spectrum from an exported JSON document and report the largest deviation.
    Reproduce { json: PathBuf },
}

#[derive(Debug, clap::Args)]
struct RunArgs {
    /// spectrum, sweep-2a, sweep-2b, polaritons, rwa-validate or oracle-compare.
    /// Overrides `experiment` in the config.
    experiment: Option<String>,
    /// Config file (alternative to `--config`).
    config_path: Option<PathBuf>,
    #[arg(long = "config", value_name = "PATH")]
    config: Option<PathBuf>,
    /// Output directory, overriding `[output] dir`.
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
    /// csv, json or both, overriding `[output] format`.
    #[arg(long, value_name = "FORMAT")]
    format: Option<OutputFormat>,
    /// Worker threads; 0 picks automatically.
    #[arg(long, value_name = "N")]
    threads: Option<usize>,
}

struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match &e {
            Error::ConfigParse(_) | Error::Document(_) => EXIT_CONFIG_PARSE,
            Error::ConfigDomain(_) | Error::InvalidParams(_) | Error::EmptyGrid(_) => EXIT_CONFIG_DOMAIN,
            Error::Unstable { .. } => EXIT_UNSTABLE,
            Error::Singular { .. } | Error::Numerical(_) | Error::StepTooLarge { .. } | Error::EmptyResult => {
                EXIT_NUMERICAL
            }
            Error::Io { .. } => EXIT_IO,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

fn resolve_config_path(path: &Path) -> PathBuf {
    if !path.exists() && path.extension().is_none() {
        let with_ext = path.with_extension("toml");
        if with_ext.exists() {
            return with_ext;
        }
    }
    path.to_path_buf()
}

fn load_config(path: &Path) -> Result<RunConfig, Failure> {
    let path = resolve_config_path(path);
    let text = fs::read_to_string(&path).map_err(|source| Error::Io {
        path: path.clone(),
        source,
    })?;
    Ok(parse_config(&text)?)
}

/// Flag, then environment, then config file; 0 means automatic.
fn thread_count(flag: Option<usize>, config: Option<usize>) -> Result<usize, Failure> {
    if let Some(n) = flag {
        return Ok(n);
    }
    if let Ok(v) = env::var(THREADS_ENV) {
        return v.trim().parse().map_err(|_| Failure {
            code: EXIT_CONFIG_DOMAIN,
            message: format!("{THREADS_ENV}={v:?} is not a non-negative integer"),
        });
    }
    Ok(config.unwrap_or(0))
}

fn cmd_run(mut args: RunArgs) -> Result<(), Failure> {
    // A lone positional that is not an experiment name is the config path.
    if args.config_path.is_none() {
        if let Some(name) = args.experiment.take_if(|n| n.parse::<Experiment>().is_err()) {
            args.config_path = Some(PathBuf::from(name));
        }
    }
    let path = match (args.config, args.config_path) {
        (Some(_), Some(_)) => {
            return Err(Failure {
                code: EXIT_CONFIG_PARSE,
                message: "config given both positionally and with --config".into(),
            })
        }
        (Some(p), None) | (None, Some(p)) => p,
        (None, None) => {
            return Err(Failure {
                code: EXIT_CONFIG_PARSE,
                message: "no config file given".into(),
            })
        }
    };
    let mut config = load_config(&path)?;
    if let Some(name) = &args.experiment {
        config.experiment = Some(name.parse::<Experiment>()?);
    }
    if let Some(out) = args.out {
        config.out_dir = out;
    }
    if let Some(format) = args.format {
        config.format = format;
    }
    let threads = thread_count(args.threads, config.threads)?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| Failure {
            code: EXIT_NUMERICAL,
            message: format!("thread pool: {e}"),
        })?;

    for w in config.params.validate().warnings {
        eprintln!("warning: {w}");
    }
    let outcome = run(&config, &mut |msg| eprintln!("{msg}"))?;
    for f in &outcome.files {
        eprintln!("wrote {}", f.display());
    }
    println!("{}", outcome.summary);
    match outcome.status {
        RunStatus::Success => Ok(()),
        RunStatus::ValidationFailed => Err(Failure {
            code: EXIT_VALIDATION_FAILED,
            message: "validation failed".into(),
        }),
        RunStatus::Unstable { max_real_part } => Err(Failure {
            code: EXIT_UNSTABLE,
            message: format!("unstable sweep point(s): max Re eig(f) = {max_real_part:.6e}"),
        }),
    }
}

fn cmd_check(path: &Path) -> Result<(), Failure> {
    let config = load_config(path)?;
    let report = config.params.validate();
    for w in &report.warnings {
        eprintln!("warning: {w}");
    }
    let experiment = config.experiment.map_or("none", Experiment::name);
    println!(
        "status=ok experiment={experiment} omega_points={} thetas={} warnings={}",
        config.omega_grid.len(),
        config.theta_grid.len(),
        report.warnings.len()
    );
    Ok(())
}

fn cmd_reproduce(path: &Path) -> Result<(), Failure> {
    let text = fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let r = reproduce_from_json(&text)?;
    println!("status=ok points={} max_diff_db={:.6e}", r.points, r.max_abs_diff_db);
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run(args) => cmd_run(args),
        Command::Check { config } => cmd_check(&config),
        Command::Reproduce { json } => cmd_reproduce(&json),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
