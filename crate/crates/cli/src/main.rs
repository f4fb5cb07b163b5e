use std::fs;
use std::io::{self, Read, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

mod commands;

use commands::Failure;

/// Exact spectra of dressed linear chain graphs.
#[derive(Debug, Parser)]
#[command(name = "chain-spectra", version, about)]
struct Cli {
    /// Write the result here instead of stdout.
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,

    /// Worker threads (default: available parallelism).
    #[arg(long, global = true, env = "CHAIN_SPECTRA_THREADS")]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct ConfigArg {
    /// Chain config JSON, `-` for stdin.
    #[arg(long, short)]
    config: PathBuf,
}

#[derive(Debug, Args)]
struct RangeArgs {
    /// First interval index.
    #[arg(long, default_value_t = 1)]
    nmin: usize,
    /// Last interval index.
    #[arg(long)]
    nmax: Option<usize>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check a config and print the derived chain data (JSON).
    Validate(ConfigArg),
    /// Expand the spectral determinant into cosine pairs (JSON).
    Expand(ConfigArg),
    /// Regularity margin and verdict (JSON).
    Regularity(ConfigArg),
    /// Roots of the spectral function per separator interval (CSV).
    Roots {
        #[command(flatten)]
        config: ConfigArg,
        #[command(flatten)]
        range: RangeArgs,
    },
    /// Roots-per-interval histogram (JSON).
    Intervals {
        #[command(flatten)]
        config: ConfigArg,
        #[command(flatten)]
        range: RangeArgs,
    },
    /// Primitive periodic orbits (CSV).
    Orbits {
        #[command(flatten)]
        config: ConfigArg,
        /// Longest code length, at most 24.
        #[arg(long, default_value_t = 12)]
        max_bonds: usize,
    },
    /// Periodic-orbit eigenvalue series against the root finder (CSV).
    Eigen {
        #[command(flatten)]
        config: ConfigArg,
        #[command(flatten)]
        range: RangeArgs,
        /// Drop action classes with |W| / round trips below this.
        #[arg(long, default_value_t = 1e-8)]
        amp_threshold: f64,
    },
    /// Periodic-orbit density of states on a momentum grid (CSV).
    Dos {
        #[command(flatten)]
        config: ConfigArg,
        #[arg(long, default_value_t = 0.0)]
        kmin: f64,
        #[arg(long, default_value_t = 20.0)]
        kmax: f64,
        #[arg(long, default_value_t = 1001)]
        points: usize,
        #[arg(long, default_value_t = 1e-4)]
        amp_threshold: f64,
        /// Also emit the density smoothed by a Gaussian of this width.
        #[arg(long)]
        sigma: Option<f64>,
    },
    /// Classical stochastic scattering statistics (JSON).
    Simulate {
        #[command(flatten)]
        config: ConfigArg,
        #[arg(long, default_value_t = 100_000)]
        steps: u64,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long, default_value_t = 1)]
        trials: u64,
    },
}

fn load_chain(arg: &ConfigArg) -> Result<chain_spectra::ChainSpec, Failure> {
    let text = if arg.config.as_os_str() == "-" {
        let mut s = String::new();
        io::stdin()
            .read_to_string(&mut s)
            .map_err(|e| Failure::Invalid(format!("cannot read config from stdin: {e}")))?;
        s
    } else {
        fs::read_to_string(&arg.config)
            .map_err(|e| Failure::Invalid(format!("cannot read {}: {e}", arg.config.display())))?
    };
    Ok(chain_spectra::ChainConfig::from_json(&text)?.build()?)
}

fn run(cli: Cli) -> Result<Vec<u8>, Failure> {
    if let Some(t) = cli.threads {
        if t == 0 {
            return Err(Failure::Invalid("--threads must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global()
            .map_err(|e| Failure::Invalid(format!("cannot start thread pool: {e}")))?;
    }
    match &cli.command {
        Command::Validate(c) => commands::validate(&load_chain(c)?),
        Command::Expand(c) => commands::expand(&load_chain(c)?),
        Command::Regularity(c) => commands::regularity(&load_chain(c)?),
        Command::Roots { config, range } => {
            let (lo, hi) = commands::range(range.nmin, range.nmax.unwrap_or(100))?;
            commands::roots(&load_chain(config)?, lo, hi)
        }
        Command::Intervals { config, range } => {
            let (lo, hi) = commands::range(range.nmin, range.nmax.unwrap_or(500))?;
            commands::intervals(&load_chain(config)?, lo, hi)
        }
        Command::Orbits { config, max_bonds } => {
            commands::check_max_bonds(*max_bonds)?;
            commands::orbits(&load_chain(config)?, *max_bonds)
        }
        Command::Eigen {
            config,
            range,
            amp_threshold,
        } => {
            let (lo, hi) = commands::range(range.nmin, range.nmax.unwrap_or(50))?;
            commands::check_threshold(*amp_threshold)?;
            commands::eigen(&load_chain(config)?, lo, hi, *amp_threshold)
        }
        Command::Dos {
            config,
            kmin,
            kmax,
            points,
            amp_threshold,
            sigma,
        } => {
            let grid = commands::DosGrid::new(*kmin, *kmax, *points, *sigma)?;
            commands::check_threshold(*amp_threshold)?;
            commands::dos(&load_chain(config)?, &grid, *amp_threshold)
        }
        Command::Simulate {
            config,
            steps,
            seed,
            trials,
        } => {
            if *steps == 0 || *trials == 0 {
                return Err(Failure::Invalid("--steps and --trials must be at least 1".into()));
            }
            commands::simulate(&load_chain(config)?, *steps, *seed, *trials)
        }
    }
}

fn emit(bytes: &[u8], output: Option<&PathBuf>) -> io::Result<()> {
    match output {
        Some(path) => fs::write(path, bytes),
        None => {
            let mut out = io::stdout().lock();
            out.write_all(bytes)?;
            out.flush()
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let output = cli.output.clone();
    let result = run(cli).and_then(|bytes| {
        emit(&bytes, output.as_ref()).map_err(|e| Failure::Invalid(format!("cannot write output: {e}")))
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}
