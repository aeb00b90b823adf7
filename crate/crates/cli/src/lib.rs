//! Command-line front end for `qtclone`: flag and config-file handling,
//! input-state parsing and CSV output.

pub mod commands;
pub mod config;
pub mod csv;
pub mod state;

use std::path::PathBuf;

use clap::Parser;
use thiserror::Error;

use qtclone::Execution;

pub use commands::{cmd_clone, cmd_hom_scan, cmd_selftest, cmd_teleport, Report};
pub use config::{Cli, Command, Flags, Mode, RunConfig, Variant};
pub use state::StateSpec;

#[derive(Debug, Error)]
pub enum CliError {
    /// Clap's own diagnostic (bad flag, unknown command, help, version).
    #[error("{0}")]
    Usage(#[from] clap::Error),
    #[error("{flag}: {message}")]
    Flag { flag: &'static str, message: String },
    #[error("config file {}, line {line}: --{key}: {message}", path.display())]
    Config {
        path: PathBuf,
        line: usize,
        key: String,
        message: String,
    },
    #[error("--config: cannot read {}: {source}", path.display())]
    ConfigRead { path: PathBuf, source: std::io::Error },
    #[error("--out: cannot write {}: {source}", path.display())]
    Output { path: PathBuf, source: std::io::Error },
    #[error("computation failed: {0}")]
    Compute(String),
}

impl CliError {
    /// `--help` or `--version` rather than a real error.
    pub fn is_informational(&self) -> bool {
        use clap::error::ErrorKind;
        matches!(self, CliError::Usage(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion))
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Compute(_) | CliError::Output { .. } => 1,
            _ => 2,
        }
    }

    /// First line of the diagnostic.
    pub fn one_line(&self) -> String {
        let s = self.to_string();
        let line = s.lines().find(|l| !l.trim().is_empty()).unwrap_or("").trim();
        line.strip_prefix("error: ").unwrap_or(line).to_string()
    }
}

/// Render argv for the provenance header, with the program name reduced to
/// `qtclone`.
pub fn format_invocation(args: &[String]) -> String {
    let quote = |a: &String| {
        if a.is_empty() || a.chars().any(|c| c.is_whitespace() || c == '\'' || c == '"') {
            format!("'{}'", a.replace('\'', "'\\''"))
        } else {
            a.clone()
        }
    };
    std::iter::once("qtclone".to_string())
        .chain(args.iter().skip(1).map(quote))
        .collect::<Vec<_>>()
        .join(" ")
}

/// Parse `args` (including the program name) and merge the config file.
pub fn configure(args: &[String]) -> Result<RunConfig, CliError> {
    let cli = Cli::try_parse_from(args)?;
    let file_flags = match &cli.flags.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|source| CliError::ConfigRead {
                path: path.clone(),
                source,
            })?;
            Flags::from_config_text(path, &text)?
        }
        None => Flags::default(),
    };
    RunConfig::resolve(cli.command, cli.flags.or(file_flags), format_invocation(args))
}

pub fn run(cfg: &RunConfig, exec: Execution) -> Result<Report, CliError> {
    match cfg.command {
        Command::Teleport => cmd_teleport(cfg),
        Command::Clone => cmd_clone(cfg),
        Command::HomScan => cmd_hom_scan(cfg, exec),
        Command::Selftest => cmd_selftest(cfg),
    }
}

/// `configure` followed by `run`.
pub fn execute(args: &[String], exec: Execution) -> Result<(RunConfig, Report), CliError> {
    let cfg = configure(args)?;
    let report = run(&cfg, exec)?;
    Ok((cfg, report))
}
