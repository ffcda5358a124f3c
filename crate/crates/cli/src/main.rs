use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{CommandFactory, FromArgMatches, Parser, Subcommand};

use tlsim_cli::commands::{oracle_check, run, run_preset, run_scan};
use tlsim_cli::config::{keys_help, parse_config, ScanParam};
use tlsim_cli::{CliError, Result};
use tlsim_core::presets::PRESET_NAMES;

/// Talbot-Lau interferometer simulator.
#[derive(Parser)]
#[command(name = "tlsim", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate the density grid described by a config file.
    Run {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Worker threads; defaults to the available parallelism.
        #[arg(long, env = "TLSIM_THREADS")]
        threads: Option<usize>,
        /// Log-scaled PGM output.
        #[arg(long)]
        log_scale: bool,
    },
    /// Reproduce a named figure configuration.
    Preset {
        name: String,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, env = "TLSIM_THREADS")]
        threads: Option<usize>,
    },
    /// Sweep one parameter and report fringe metrics per value.
    Scan {
        #[arg(long)]
        config: PathBuf,
        /// sigma_I, lambda, K1, eta1, zs or xs; overrides scan.param.
        #[arg(long)]
        param: Option<String>,
        /// Comma-separated values with units; overrides scan.values.
        #[arg(long)]
        values: Option<String>,
        #[arg(long, default_value = ".")]
        out: PathBuf,
        #[arg(long, env = "TLSIM_THREADS")]
        threads: Option<usize>,
    },
    /// Compare closed-form amplitudes against brute-force quadrature.
    OracleCheck {
        #[arg(long, default_value_t = 25)]
        cases: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
}

fn stem(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "tlsim".into())
}

fn load(path: &Path) -> Result<tlsim_cli::RunConfig> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_config(&text)
}

fn dispatch(cmd: Command) -> Result<()> {
    let mut stdout = io::stdout().lock();
    let files = match cmd {
        Command::Run {
            config,
            out,
            threads,
            log_scale,
        } => {
            let mut cfg = load(&config)?;
            cfg.output.log_scale |= log_scale;
            run(&cfg, &stem(&config), &out, threads, &mut stdout)?
        }
        Command::Preset { name, out, threads } => run_preset(&name, &out, threads, &mut stdout)?,
        Command::Scan {
            config,
            param,
            values,
            out,
            threads,
        } => {
            let cfg = load(&config)?;
            let param = match param {
                Some(p) => ScanParam::parse(&p)?,
                None => cfg
                    .scan
                    .param
                    .ok_or_else(|| CliError::Usage("scan needs --param or scan.param".into()))?,
            };
            let values: Vec<String> = match values {
                Some(v) => v
                    .split(',')
                    .map(|s| s.trim().to_string())
                    .filter(|s| !s.is_empty())
                    .collect(),
                None => cfg.scan.values.clone(),
            };
            run_scan(&cfg, &stem(&config), param, &values, &out, threads, &mut stdout)?
        }
        Command::OracleCheck { cases, seed } => {
            oracle_check(cases, seed, &mut stdout)?;
            Vec::new()
        }
    };
    for f in files {
        let _ = writeln!(stdout, "wrote {}", f.display());
    }
    Ok(())
}

fn main() -> ExitCode {
    let help = format!("{}\nPresets: {}\n", keys_help(), PRESET_NAMES.join(", "));
    let matches = Cli::command().after_help(help).get_matches();
    let cli = match Cli::from_arg_matches(&matches) {
        Ok(c) => c,
        Err(e) => e.exit(),
    };
    match dispatch(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
