//! Configuration file: TOML with one table per block.
//!
//! ```toml
//! seed = 7
//! [model]
//! gamma = 1.5
//! alpha = 0.5
//! [initial]
//! state = [1.32, 0.0, -1.5, 0.0]
//! [integration]
//! t_end = 100.0
//! tol = 1e-12
//! [output]
//! path = "traj.csv"
//! naming = "electrical"
//! ```
//!
//! `model`, `initial`, `output` and `seed` are shared. The command blocks
//! (`integration`, `sweep`, `grid`, `chaos`, `shell`) are accepted only by
//! the commands that read them.

use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::args::{BranchArg, DirectionArg, PlaneArg, StateArg, Varied, WellArg};
use crate::error::CliError;
use crate::table::{Format, Naming};

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub seed: Option<u64>,
    #[serde(default)]
    pub model: ModelBlock,
    #[serde(default)]
    pub initial: InitialBlock,
    #[serde(default)]
    pub output: OutputBlock,
    pub integration: Option<IntegrationBlock>,
    pub sweep: Option<SweepBlock>,
    pub grid: Option<GridBlock>,
    pub chaos: Option<ChaosBlock>,
    pub shell: Option<ShellBlock>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelBlock {
    pub gamma: Option<f64>,
    pub alpha: Option<f64>,
    pub omega: Option<f64>,
    pub omega0: Option<f64>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitialBlock {
    pub state: Option<StateArg>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputBlock {
    pub path: Option<PathBuf>,
    pub format: Option<Format>,
    pub naming: Option<Naming>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IntegrationBlock {
    pub t_end: Option<f64>,
    pub sample_dt: Option<f64>,
    pub tol: Option<f64>,
    pub max_step: Option<f64>,
    pub noise_sigma: Option<f64>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepBlock {
    pub vary: Option<Varied>,
    pub lo: Option<f64>,
    pub hi: Option<f64>,
    pub count: Option<usize>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridBlock {
    pub gamma_min: Option<f64>,
    pub gamma_max: Option<f64>,
    pub gamma_count: Option<usize>,
    pub alpha_min: Option<f64>,
    pub alpha_max: Option<f64>,
    pub alpha_count: Option<usize>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChaosBlock {
    pub t_total: Option<f64>,
    pub renorm_dt: Option<f64>,
    pub delta0: Option<f64>,
    pub threshold: Option<f64>,
    pub tol: Option<f64>,
    pub plane: Option<PlaneArg>,
    pub direction: Option<DirectionArg>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ShellBlock {
    pub energy: Option<f64>,
    pub atom_q: Option<f64>,
    pub branch: Option<BranchArg>,
    pub well: Option<WellArg>,
}

/// Which command blocks a subcommand reads.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Block {
    Integration,
    Sweep,
    Grid,
    Chaos,
    Shell,
}

impl Block {
    fn name(self) -> &'static str {
        match self {
            Block::Integration => "integration",
            Block::Sweep => "sweep",
            Block::Grid => "grid",
            Block::Chaos => "chaos",
            Block::Shell => "shell",
        }
    }
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
        Self::parse(&text).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
    }

    pub fn parse(text: &str) -> Result<Self, String> {
        toml::from_str(text).map_err(|e| e.message().to_string())
    }

    /// Rejects command blocks that `command` does not read.
    pub fn check_blocks(&self, command: &str, allowed: &[Block]) -> Result<(), CliError> {
        let present = [
            (Block::Integration, self.integration.is_some()),
            (Block::Sweep, self.sweep.is_some()),
            (Block::Grid, self.grid.is_some()),
            (Block::Chaos, self.chaos.is_some()),
            (Block::Shell, self.shell.is_some()),
        ];
        for (block, is_set) in present {
            if is_set && !allowed.contains(&block) {
                return Err(CliError::Usage(format!("config block [{}] does not apply to `{command}`", block.name())));
            }
        }
        Ok(())
    }
}
