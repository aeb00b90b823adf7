//! Command-line flags, the optional `key=value` config file and the merged
//! run configuration.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};

use crate::state::StateSpec;
use crate::CliError;

pub const DEFAULT_TRIALS: u64 = 100_000;
pub const DEFAULT_SEED: u64 = 42;
pub const DEFAULT_Z_MIN: f64 = -120.0;
pub const DEFAULT_Z_MAX: f64 = 120.0;
pub const DEFAULT_STEPS: usize = 49;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Variant {
    PsiMinus,
    PhiPlus,
}

impl FromStr for Variant {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s.trim() {
            "psi_minus" | "psi-minus" => Ok(Variant::PsiMinus),
            "phi_plus" | "phi-plus" => Ok(Variant::PhiPlus),
            other => Err(format!("unknown variant '{other}', expected psi_minus or phi_plus")),
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Variant::PsiMinus => "psi_minus",
            Variant::PhiPlus => "phi_plus",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Exact,
    MonteCarlo,
}

impl FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s.trim() {
            "exact" => Ok(Mode::Exact),
            "monte-carlo" | "monte_carlo" => Ok(Mode::MonteCarlo),
            other => Err(format!("unknown mode '{other}', expected exact or monte-carlo")),
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Exact => "exact",
            Mode::MonteCarlo => "monte-carlo",
        })
    }
}

fn finite(s: &str) -> Result<f64, String> {
    let x: f64 = s.trim().parse().map_err(|_| format!("'{s}' is not a number"))?;
    if x.is_finite() {
        Ok(x)
    } else {
        Err(format!("'{s}' is not finite"))
    }
}

fn count<T: FromStr>(s: &str) -> Result<T, String> {
    s.trim()
        .parse()
        .map_err(|_| format!("'{s}' is not a non-negative integer"))
}

#[derive(Debug, Parser)]
#[command(name = "qtclone", version, about = "Teleportation-based cloning and U-NOT simulator")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub flags: Flags,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Standard teleportation, one row per Bell outcome.
    Teleport,
    /// Singlet (cloning + U-NOT) or Phi+ (transpose) dichotomic protocol.
    Clone,
    /// Coincidence rates against the delay-stage position.
    HomScan,
    /// Run the invariant suite.
    Selftest,
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Command::Teleport => "teleport",
            Command::Clone => "clone",
            Command::HomScan => "hom-scan",
            Command::Selftest => "selftest",
        })
    }
}

/// Flags shared by every command. Unset flags fall back to the config file,
/// then to the defaults.
#[derive(Debug, Clone, Default, Args)]
pub struct Flags {
    /// key=value file supplying defaults for the flags below.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// H, V, +, -, R, L or theta=<deg>,phi=<deg>.
    #[arg(long, global = true, allow_hyphen_values = true, value_parser = StateSpec::from_str)]
    pub state: Option<StateSpec>,
    #[arg(long, global = true, allow_hyphen_values = true, value_parser = Variant::from_str, value_name = "psi_minus|phi_plus")]
    pub variant: Option<Variant>,
    #[arg(long, global = true, allow_hyphen_values = true, value_parser = Mode::from_str, value_name = "exact|monte-carlo")]
    pub mode: Option<Mode>,
    #[arg(long, global = true, allow_hyphen_values = true, value_parser = count::<u64>)]
    pub trials: Option<u64>,
    #[arg(long, global = true, allow_hyphen_values = true, value_parser = count::<u64>)]
    pub seed: Option<u64>,
    #[arg(long = "z-min", global = true, allow_hyphen_values = true, value_parser = finite, value_name = "UM")]
    pub z_min: Option<f64>,
    #[arg(long = "z-max", global = true, allow_hyphen_values = true, value_parser = finite, value_name = "UM")]
    pub z_max: Option<f64>,
    #[arg(long, global = true, allow_hyphen_values = true, value_parser = count::<usize>)]
    pub steps: Option<usize>,
    #[arg(long = "tau-coh", global = true, allow_hyphen_values = true, value_parser = finite, value_name = "FS")]
    pub tau_coh: Option<f64>,
    /// Write the CSV here instead of stdout.
    #[arg(long, global = true, value_name = "PATH")]
    pub out: Option<PathBuf>,
    /// Replace the selftest numerical tolerances.
    #[arg(long, global = true, allow_hyphen_values = true, value_parser = finite)]
    pub tolerance: Option<f64>,
}

impl Flags {
    /// Set one field from a config-file entry.
    fn set(&mut self, key: &str, value: &str) -> Result<(), String> {
        fn put<T>(slot: &mut Option<T>, v: Result<T, String>) -> Result<(), String> {
            *slot = Some(v?);
            Ok(())
        }
        match key {
            "state" => put(&mut self.state, value.parse()),
            "variant" => put(&mut self.variant, value.parse()),
            "mode" => put(&mut self.mode, value.parse()),
            "trials" => put(&mut self.trials, count(value)),
            "seed" => put(&mut self.seed, count(value)),
            "z-min" => put(&mut self.z_min, finite(value)),
            "z-max" => put(&mut self.z_max, finite(value)),
            "steps" => put(&mut self.steps, count(value)),
            "tau-coh" => put(&mut self.tau_coh, finite(value)),
            "out" => put(&mut self.out, Ok(PathBuf::from(value))),
            "tolerance" => put(&mut self.tolerance, finite(value)),
            _ => Err("unknown key".into()),
        }
    }

    /// Parse a config file: `key = value` per line, `#` comments. Keys are
    /// flag names without the dashes; `_` and `-` are interchangeable.
    pub fn from_config_text(path: &Path, text: &str) -> Result<Self, CliError> {
        let mut flags = Flags::default();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |key: &str, message: String| CliError::Config {
                path: path.to_path_buf(),
                line: i + 1,
                key: key.to_string(),
                message,
            };
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| err("?", format!("expected key=value, got '{line}'")))?;
            let key = k.trim().replace('_', "-");
            if key == "config" {
                return Err(err(&key, "config files cannot be nested".into()));
            }
            flags.set(&key, v.trim()).map_err(|m| err(&key, m))?;
        }
        Ok(flags)
    }

    /// Fields set here win over `fallback`.
    pub fn or(self, fallback: Flags) -> Flags {
        Flags {
            config: self.config.or(fallback.config),
            state: self.state.or(fallback.state),
            variant: self.variant.or(fallback.variant),
            mode: self.mode.or(fallback.mode),
            trials: self.trials.or(fallback.trials),
            seed: self.seed.or(fallback.seed),
            z_min: self.z_min.or(fallback.z_min),
            z_max: self.z_max.or(fallback.z_max),
            steps: self.steps.or(fallback.steps),
            tau_coh: self.tau_coh.or(fallback.tau_coh),
            out: self.out.or(fallback.out),
            tolerance: self.tolerance.or(fallback.tolerance),
        }
    }
}

/// Fully resolved and validated settings for one run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    pub state: StateSpec,
    pub variant: Variant,
    pub mode: Mode,
    pub trials: u64,
    pub seed: u64,
    pub z_min: f64,
    pub z_max: f64,
    pub steps: usize,
    pub tau_coh: f64,
    pub out: Option<PathBuf>,
    pub tolerance: Option<f64>,
    /// Command line as typed, echoed into the CSV header.
    pub invocation: String,
}

fn flag_error(flag: &'static str, message: impl Into<String>) -> CliError {
    CliError::Flag {
        flag,
        message: message.into(),
    }
}

impl RunConfig {
    pub fn resolve(command: Command, flags: Flags, invocation: String) -> Result<Self, CliError> {
        let cfg = RunConfig {
            command,
            state: flags.state.unwrap_or_else(|| "H".parse().expect("H")),
            variant: flags.variant.unwrap_or(Variant::PsiMinus),
            mode: flags.mode.unwrap_or(Mode::Exact),
            trials: flags.trials.unwrap_or(DEFAULT_TRIALS),
            seed: flags.seed.unwrap_or(DEFAULT_SEED),
            z_min: flags.z_min.unwrap_or(DEFAULT_Z_MIN),
            z_max: flags.z_max.unwrap_or(DEFAULT_Z_MAX),
            steps: flags.steps.unwrap_or(DEFAULT_STEPS),
            tau_coh: flags.tau_coh.unwrap_or(qtclone::photonics::DEFAULT_TAU_COH_FS),
            out: flags.out,
            tolerance: flags.tolerance,
            invocation,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        if self.steps < 2 {
            return Err(flag_error(
                "--steps",
                format!("need at least 2 scan points, got {}", self.steps),
            ));
        }
        if self.mode == Mode::MonteCarlo && self.trials == 0 {
            return Err(flag_error("--trials", "monte-carlo mode needs at least 1 trial"));
        }
        if self.z_min >= self.z_max {
            return Err(flag_error(
                "--z-max",
                format!("must exceed --z-min ({} >= {})", self.z_min, self.z_max),
            ));
        }
        if self.tau_coh.is_nan() || self.tau_coh <= 0.0 {
            return Err(flag_error(
                "--tau-coh",
                format!("coherence time must be positive, got {}", self.tau_coh),
            ));
        }
        if let Some(t) = self.tolerance {
            if t.is_nan() || t <= 0.0 {
                return Err(flag_error("--tolerance", format!("must be positive, got {t}")));
            }
        }
        Ok(())
    }

    /// Stage positions, evenly spaced and including both ends.
    pub fn z_grid(&self) -> Vec<f64> {
        let n = self.steps - 1;
        (0..self.steps)
            .map(|i| {
                if i == n {
                    self.z_max
                } else {
                    self.z_min + (self.z_max - self.z_min) * i as f64 / n as f64
                }
            })
            .collect()
    }

    /// Resolved settings as `key=value` pairs.
    pub fn describe(&self) -> String {
        let mut s = format!(
            "state={} variant={} mode={} trials={} seed={} z-min={} z-max={} steps={} tau-coh={}",
            self.state,
            self.variant,
            self.mode,
            self.trials,
            self.seed,
            self.z_min,
            self.z_max,
            self.steps,
            self.tau_coh
        );
        if let Some(t) = self.tolerance {
            s.push_str(&format!(" tolerance={t}"));
        }
        s
    }
}
