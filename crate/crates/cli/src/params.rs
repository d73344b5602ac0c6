use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::{Args, ValueEnum};

use tsv_core::config::{ParameterSet, PHYSICAL_KEYS};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Seed {
    /// Reference structure, no overrides of physical constants allowed.
    Paper,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SpacingArg {
    Log,
    Linear,
}

/// Options shared by every subcommand.
#[derive(Debug, Clone, Args)]
pub struct ParamArgs {
    /// Parameter file (`name = value` per line, SI units).
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,

    /// Override one parameter; repeatable. Applied after --config.
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    pub set: Vec<String>,

    /// Pin every physical constant to the built-in reference values.
    #[arg(long, global = true, value_enum, value_name = "SET")]
    pub seed_params: Option<Seed>,

    /// First grid frequency (Hz).
    #[arg(long, global = true, value_name = "HZ")]
    pub f_start: Option<f64>,

    /// Last grid frequency (Hz).
    #[arg(long, global = true, value_name = "HZ")]
    pub f_stop: Option<f64>,

    /// Number of grid points.
    #[arg(long = "points", global = true, value_name = "N")]
    pub grid_points: Option<usize>,

    #[arg(long, global = true, value_enum)]
    pub spacing: Option<SpacingArg>,

    /// Reference impedance (Ohm).
    #[arg(long, global = true, value_name = "OHM")]
    pub z0: Option<f64>,
}

impl ParamArgs {
    /// Defaults, then the config file, then --set, then named flags.
    pub fn resolve(&self) -> Result<ParameterSet> {
        let mut set = ParameterSet::reference();

        if self.seed_params == Some(Seed::Paper) {
            if let Some(path) = &self.config {
                bail!(
                    "--seed-params paper pins all physical constants; drop --config {}",
                    path.display()
                );
            }
            for kv in &self.set {
                let key = kv.split('=').next().unwrap_or("").trim();
                if PHYSICAL_KEYS.contains(&key) {
                    bail!("--seed-params paper pins `{key}`; it cannot be overridden");
                }
            }
        }

        if let Some(path) = &self.config {
            set.load_file(path)
                .with_context(|| format!("reading config {}", path.display()))?;
        }
        for kv in &self.set {
            let (key, value) = kv
                .split_once('=')
                .with_context(|| format!("--set expects KEY=VALUE, got `{kv}`"))?;
            set.set(key.trim(), value.trim())
                .map_err(|m| anyhow::anyhow!("--set {kv}: {m}"))?;
        }

        let named = [
            ("f_start", self.f_start.map(|v| format!("{v:e}"))),
            ("f_stop", self.f_stop.map(|v| format!("{v:e}"))),
            ("points", self.grid_points.map(|v| v.to_string())),
            (
                "spacing",
                self.spacing.map(|s| match s {
                    SpacingArg::Log => "log".to_string(),
                    SpacingArg::Linear => "linear".to_string(),
                }),
            ),
            ("z0", self.z0.map(|v| format!("{v:e}"))),
        ];
        for (key, value) in named {
            if let Some(value) = value {
                set.set(key, &value)
                    .map_err(|m| anyhow::anyhow!("--{}: {m}", key.replace('_', "-")))?;
            }
        }
        set.check_run()?;
        Ok(set)
    }
}
