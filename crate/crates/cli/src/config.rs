use serde::{Deserialize, Serialize};

use crate::error::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum OutputFormat {
    Json,
    Text,
}

/// Tolerances, seed and output format shared by every subcommand.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub rank_tol: f64,
    pub dual_tol: f64,
    pub inverse_tol: f64,
    pub seed: u64,
    pub output_format: OutputFormat,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            rank_tol: 1e-10,
            dual_tol: 1e-9,
            inverse_tol: 1e-9,
            seed: 0,
            output_format: OutputFormat::Json,
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<(), CliError> {
        for (name, v) in [("rank", self.rank_tol), ("dual", self.dual_tol), ("inverse", self.inverse_tol)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(CliError::Input(format!("{name} tolerance must be positive, got {v}")));
            }
        }
        Ok(())
    }
}
