use std::path::PathBuf;

use clap::{Parser, ValueEnum};

use crate::UsageError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Command {
    Curve,
    Energy,
    VerifyLemma1,
    VerifyLemma2,
    VerifyTheorem1,
    Nonmonotone,
    RotationChain,
    OracleCheck,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Text,
}

/// Ball localization of Wigner distributions of Hermite states.
#[derive(Parser, Debug)]
#[command(name = "wigner-ball", version)]
pub struct Args {
    #[arg(long, value_enum)]
    pub command: Command,
    /// Number of modes (phase space has dimension 2n).
    #[arg(long)]
    pub n: Option<usize>,
    /// Largest total degree |μ| considered.
    #[arg(long, default_value_t = 4)]
    pub lambda_max: u32,
    #[arg(long, default_value_t = 0.0)]
    pub r_min: f64,
    #[arg(long, default_value_t = 3.0)]
    pub r_max: f64,
    /// Number of grid radii, endpoints included.
    #[arg(long, default_value_t = 13)]
    pub r_steps: usize,
    /// Write output here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Seed for randomized checks.
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// State file for the energy command.
    #[arg(long)]
    pub state: Option<PathBuf>,
    /// Monte Carlo samples for oracle-check.
    #[arg(long)]
    pub mc_samples: Option<u64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    pub n: usize,
    /// Set when `--n` was given explicitly.
    pub n_explicit: bool,
    pub lambda_max: u32,
    pub r_min: f64,
    pub r_max: f64,
    pub r_steps: usize,
    pub output_path: Option<PathBuf>,
    pub seed: Option<u64>,
    pub format: Format,
    pub state_path: Option<PathBuf>,
    pub mc_samples: Option<u64>,
}

impl RunConfig {
    pub fn from_args(args: Args) -> Result<Self, UsageError> {
        let cfg = RunConfig {
            command: args.command,
            n: args.n.unwrap_or(1),
            n_explicit: args.n.is_some(),
            lambda_max: args.lambda_max,
            r_min: args.r_min,
            r_max: args.r_max,
            r_steps: args.r_steps,
            output_path: args.out,
            seed: args.seed,
            format: args.format,
            state_path: args.state,
            mc_samples: args.mc_samples,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), UsageError> {
        let bad = |msg: String| Err(UsageError(msg));
        if self.n < 1 {
            return bad("--n must be at least 1".into());
        }
        if !self.r_min.is_finite() || !self.r_max.is_finite() {
            return bad("--r-min and --r-max must be finite".into());
        }
        if self.r_min < 0.0 {
            return bad(format!("--r-min must be non-negative, got {}", self.r_min));
        }
        if self.r_max <= self.r_min {
            return bad(format!(
                "--r-max ({}) must be greater than --r-min ({})",
                self.r_max, self.r_min
            ));
        }
        if self.r_steps < 2 {
            return bad(format!(
                "--r-steps must be at least 2, got {}",
                self.r_steps
            ));
        }
        if self.command == Command::Energy && self.state_path.is_none() {
            return bad("the energy command needs --state <file>".into());
        }
        if matches!(self.command, Command::VerifyTheorem1 | Command::Nonmonotone)
            && self.lambda_max < 1
        {
            return bad("--lambda-max must be at least 1 for this command".into());
        }
        Ok(())
    }

    /// `r_steps` evenly spaced radii from `r_min` to `r_max`.
    pub fn grid(&self) -> Vec<f64> {
        let last = self.r_steps - 1;
        let step = (self.r_max - self.r_min) / last as f64;
        (0..self.r_steps)
            .map(|i| {
                if i == last {
                    self.r_max
                } else {
                    self.r_min + step * i as f64
                }
            })
            .collect()
    }

    /// Grid radii with `r = 0` dropped, for checks where the empty ball is trivial.
    pub fn positive_grid(&self) -> Vec<f64> {
        self.grid().into_iter().filter(|&r| r > 0.0).collect()
    }
}
