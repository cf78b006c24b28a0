use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use dicke_core::chaos::{Coordinate, Direction};
use dicke_core::equilibria::WellSide;
use dicke_core::shell::Branch;
use serde::Deserialize;

use crate::reproduce::Figure;
use crate::table::{Format, Naming};

#[derive(Debug, Parser)]
#[command(name = "dicke", version, about = "Classical deformed Dicke model")]
pub struct Cli {
    /// TOML configuration file; flags override its values.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Energy and observables of one state.
    Energy(EnergyArgs),
    /// Integrate a trajectory.
    Evolve(EvolveArgs),
    /// Least-energy equilibrium.
    GroundState(BasicArgs),
    /// Ground-state observables along gamma or alpha.
    Sweep(SweepArgs),
    /// Well count and critical energies on a (gamma, alpha) grid.
    PhaseDiagram(GridArgs),
    /// Deformation at which the second well disappears.
    CriticalAlpha(BasicArgs),
    /// Largest Lyapunov exponent and regular/chaotic label.
    Lyapunov(LyapunovArgs),
    /// Crossings of a trajectory with a section plane.
    Poincare(PoincareArgs),
    /// Initial condition on an energy shell.
    ShellIc(ShellArgs),
    /// Pre-registered parameter set of one figure panel.
    Reproduce(ReproduceArgs),
}

#[derive(Debug, Clone, Default, Args)]
pub struct ModelArgs {
    #[arg(long, allow_negative_numbers = true)]
    pub gamma: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub omega: Option<f64>,
    #[arg(long)]
    pub omega0: Option<f64>,
}

#[derive(Debug, Clone, Default, Args)]
pub struct OutputArgs {
    /// Output file (a directory for `reproduce`).
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    #[arg(long, value_enum)]
    pub naming: Option<Naming>,
}

/// `q,p,Q,P`.
#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(from = "[f64; 4]")]
pub struct StateArg(pub [f64; 4]);

impl From<[f64; 4]> for StateArg {
    fn from(a: [f64; 4]) -> Self {
        StateArg(a)
    }
}

impl FromStr for StateArg {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parts: Vec<&str> = s.split(',').map(str::trim).collect();
        if parts.len() != 4 {
            return Err(format!("expected q,p,Q,P, got '{s}'"));
        }
        let mut out = [0.0; 4];
        for (slot, part) in out.iter_mut().zip(parts) {
            *slot = part.parse().map_err(|_| format!("'{part}' is not a number"))?;
        }
        Ok(StateArg(out))
    }
}

#[derive(Debug, Clone, Args)]
pub struct BasicArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct EnergyArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[arg(long, allow_hyphen_values = true)]
    pub state: Option<StateArg>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct EvolveArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[arg(long, allow_hyphen_values = true)]
    pub state: Option<StateArg>,
    #[arg(long)]
    pub t_end: Option<f64>,
    #[arg(long)]
    pub sample_dt: Option<f64>,
    /// Sets both the relative and the absolute tolerance.
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long)]
    pub noise_sigma: Option<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Varied {
    Gamma,
    Alpha,
}

#[derive(Debug, Clone, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[arg(long, value_enum)]
    pub vary: Option<Varied>,
    #[arg(long, allow_negative_numbers = true)]
    pub lo: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub hi: Option<f64>,
    #[arg(long)]
    pub count: Option<usize>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct GridArgs {
    #[arg(long)]
    pub omega: Option<f64>,
    #[arg(long)]
    pub omega0: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub gamma_min: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub gamma_max: Option<f64>,
    #[arg(long)]
    pub gamma_count: Option<usize>,
    #[arg(long, allow_negative_numbers = true)]
    pub alpha_min: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub alpha_max: Option<f64>,
    #[arg(long)]
    pub alpha_count: Option<usize>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum WellArg {
    Left,
    Right,
}

impl From<WellArg> for WellSide {
    fn from(w: WellArg) -> Self {
        match w {
            WellArg::Left => WellSide::Left,
            WellArg::Right => WellSide::Right,
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct LyapunovArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    /// Start here; alternatively give --energy and --well.
    #[arg(long, allow_hyphen_values = true)]
    pub state: Option<StateArg>,
    #[arg(long, allow_negative_numbers = true)]
    pub energy: Option<f64>,
    #[arg(long, value_enum)]
    pub well: Option<WellArg>,
    #[arg(long)]
    pub t_total: Option<f64>,
    #[arg(long)]
    pub renorm_dt: Option<f64>,
    #[arg(long)]
    pub delta0: Option<f64>,
    #[arg(long)]
    pub threshold: Option<f64>,
    #[arg(long)]
    pub tol: Option<f64>,
    #[command(flatten)]
    pub output: OutputArgs,
}

/// `coordinate=value`, e.g. `p=0` or `Q=-0.5`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlaneArg {
    pub coordinate: Coordinate,
    pub value: f64,
}

impl FromStr for PlaneArg {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (c, v) = s.split_once('=').ok_or_else(|| format!("expected coordinate=value, got '{s}'"))?;
        let coordinate = c.trim().parse::<Coordinate>()?;
        let value = v.trim().parse().map_err(|_| format!("'{v}' is not a number"))?;
        Ok(PlaneArg { coordinate, value })
    }
}

impl<'de> Deserialize<'de> for PlaneArg {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        String::deserialize(d)?.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DirectionArg {
    Up,
    Down,
    Both,
}

impl From<DirectionArg> for Direction {
    fn from(d: DirectionArg) -> Self {
        match d {
            DirectionArg::Up => Direction::Upward,
            DirectionArg::Down => Direction::Downward,
            DirectionArg::Both => Direction::Both,
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct PoincareArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[arg(long, allow_hyphen_values = true)]
    pub state: Option<StateArg>,
    #[arg(long)]
    pub t_total: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub plane: Option<PlaneArg>,
    #[arg(long, value_enum)]
    pub direction: Option<DirectionArg>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct ShellArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[arg(long, allow_negative_numbers = true)]
    pub energy: Option<f64>,
    /// Atomic coordinate Q of the state; P is zero.
    #[arg(long, allow_negative_numbers = true)]
    pub atom_q: Option<f64>,
    #[arg(long)]
    pub branch: Option<BranchArg>,
    /// Pick Q at this well's minimum instead of --atom-q.
    #[arg(long, value_enum)]
    pub well: Option<WellArg>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(try_from = "String")]
pub struct BranchArg(pub Branch);

impl FromStr for BranchArg {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        s.parse().map(BranchArg)
    }
}

impl TryFrom<String> for BranchArg {
    type Error = String;

    fn try_from(s: String) -> Result<Self, Self::Error> {
        s.parse()
    }
}

#[derive(Debug, Clone, Args)]
pub struct ReproduceArgs {
    pub figure: Figure,
    #[command(flatten)]
    pub output: OutputArgs,
}
