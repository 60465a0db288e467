mod args;
mod commands;
mod report;

use std::process::ExitCode;

use clap::{CommandFactory, FromArgMatches};

use args::{Cli, Command};

/// Bad flag combinations that clap cannot express on its own.
#[derive(Debug)]
pub struct UsageError(pub String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

const THREADS_VAR: &str = "IDLE_OTTO_THREADS";

fn configure_threads() -> Result<(), String> {
    let Ok(value) = std::env::var(THREADS_VAR) else {
        return Ok(());
    };
    let n: usize = value
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| format!("{THREADS_VAR}={value}: expected a positive integer"))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| e.to_string())
}

fn exit_code(err: &anyhow::Error) -> u8 {
    if let Some(e) = err.downcast_ref::<idle_otto::Error>() {
        return if e.is_undefined_quantity() { 3 } else { 2 };
    }
    if err.is::<UsageError>() {
        return 2;
    }
    1
}

// A closed downstream pipe (`| head`) is not a failure.
fn is_broken_pipe(err: &anyhow::Error) -> bool {
    err.chain()
        .filter_map(|e| e.downcast_ref::<std::io::Error>())
        .any(|e| e.kind() == std::io::ErrorKind::BrokenPipe)
}

fn run(cli: Cli) -> anyhow::Result<ExitCode> {
    match cli.command {
        Command::Observables { params, out } => commands::observables(&params, &out)?,
        Command::Distribution {
            params,
            preset,
            which,
            out,
        } => commands::distribution(&params, preset.as_deref(), which, &out)?,
        Command::Scan(args) => commands::scan(&args)?,
        Command::Limits { coupling, hi, hf, out } => commands::limits(coupling, hi, hf, &out)?,
        Command::Tur(args) => {
            if commands::tur(&args)? > 0 {
                return Ok(ExitCode::FAILURE);
            }
        }
        Command::Extremum(args) => commands::extremum(&args)?,
        Command::Montecarlo {
            params,
            samples,
            seed,
            alpha,
            out,
        } => commands::montecarlo(&params, samples, seed, alpha, &out)?,
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let version: &'static str = Box::leak(
        format!(
            "{} (presets v{})",
            env!("CARGO_PKG_VERSION"),
            idle_otto::scan::presets::PRESET_VERSION
        )
        .into_boxed_str(),
    );
    let matches = Cli::command().version(version).get_matches();
    let cli = match Cli::from_arg_matches(&matches) {
        Ok(cli) => cli,
        Err(e) => e.exit(),
    };
    if let Err(msg) = configure_threads() {
        eprintln!("error: {msg}");
        return ExitCode::from(2);
    }
    match run(cli) {
        Ok(code) => code,
        Err(err) if is_broken_pipe(&err) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(exit_code(&err))
        }
    }
}
