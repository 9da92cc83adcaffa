use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use phasetime_core::spectral::TABLE1_WA;
use serde::{Deserialize, Serialize};

#[derive(Debug, Parser)]
#[command(
    name = "phasetime",
    version,
    about = "Tunneling phase times for a rectangular barrier"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

/// Every run is fully described by its subcommand arguments; the manifest
/// stores them after defaults have been resolved.
#[derive(Debug, Clone, PartialEq, Subcommand, Serialize, Deserialize)]
#[serde(tag = "command", rename_all = "lowercase")]
pub enum Command {
    /// Maximum of the modulated momentum distribution on a (L/a, w·a) grid
    Table1(Table1Args),
    /// Transit and scattering rates t/τ against the opacity α
    Rates(RatesArgs),
    /// Barrier width at which the modulated spectrum peaks at the barrier top
    Distortion(DistortionArgs),
    /// Initial packet shapes for truncated momentum distributions
    Cutoff(CutoffArgs),
    /// Transmitted packet snapshots and peak arrival against the phase time
    Packet(PacketArgs),
    /// Symmetric two-packet collision snapshots
    Collide(CollideArgs),
    /// Re-run the command recorded in a manifest.json
    #[serde(skip)]
    Replay(ReplayArgs),
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct Output {
    /// Output directory
    #[arg(long, default_value = "out")]
    #[serde(skip)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct Table1Args {
    #[arg(long = "k0-a", default_value_t = 1.0)]
    pub k0_a: f64,
    #[arg(long = "w-a", value_delimiter = ',', num_args = 1.., default_values_t = TABLE1_WA)]
    pub w_a: Vec<f64>,
    #[arg(long = "l-a", value_delimiter = ',', num_args = 1..,
          default_values_t = [0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0])]
    pub l_a: Vec<f64>,
    #[command(flatten)]
    #[serde(flatten)]
    pub output: Output,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct RatesArgs {
    #[arg(long, value_delimiter = ',', num_args = 1.., default_values_t = [0.25, 0.5, 0.75, 1.0])]
    pub n: Vec<f64>,
    #[arg(long = "alpha-min", default_value_t = 1e-4)]
    pub alpha_min: f64,
    #[arg(long = "alpha-max", default_value_t = 1e3)]
    pub alpha_max: f64,
    #[arg(long = "alpha-steps", default_value_t = 141)]
    pub alpha_steps: usize,
    #[command(flatten)]
    #[serde(flatten)]
    pub output: Output,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct DistortionArgs {
    #[arg(long = "w-a", default_value_t = 1.5)]
    pub w_a: f64,
    #[arg(long = "k0-a", default_value_t = 1.0)]
    pub k0_a: f64,
    #[command(flatten)]
    #[serde(flatten)]
    pub output: Output,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct CutoffArgs {
    #[arg(long = "w-a", default_value_t = 10.0)]
    pub w_a: f64,
    /// Defaults to half of w·a
    #[arg(long = "k0-a")]
    pub k0_a: Option<f64>,
    /// Cutoff fractions δ, k_cut = (1 − δ)w; the uncut spectrum is always included
    #[arg(long, value_delimiter = ',', num_args = 1.., default_values_t = [0.1, 0.3])]
    pub delta: Vec<f64>,
    #[arg(long = "x-min", default_value_t = -20.0)]
    pub x_min: f64,
    #[arg(long = "x-max", default_value_t = 20.0)]
    pub x_max: f64,
    #[arg(long = "x-points", default_value_t = 801)]
    pub x_points: usize,
    /// Tail window, as distances from the peak
    #[arg(long = "tail-min", default_value_t = 6.0)]
    pub tail_min: f64,
    #[arg(long = "tail-max", default_value_t = 20.0)]
    pub tail_max: f64,
    #[arg(long, default_value_t = 1e-8)]
    pub tolerance: f64,
    #[command(flatten)]
    #[serde(flatten)]
    pub output: Output,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct PacketArgs {
    #[arg(long = "w-a", default_value_t = 4.0)]
    pub w_a: f64,
    #[arg(long = "k0-a", default_value_t = 1.0)]
    pub k0_a: f64,
    #[arg(long = "l-a", default_value_t = 0.2)]
    pub l_a: f64,
    /// Defaults to L/2
    #[arg(long = "x-min")]
    pub x_min: Option<f64>,
    /// Defaults to L/2 + 12
    #[arg(long = "x-max")]
    pub x_max: Option<f64>,
    #[arg(long = "x-points", default_value_t = 601)]
    pub x_points: usize,
    #[arg(long = "t-min", default_value_t = 0.0)]
    pub t_min: f64,
    #[arg(long = "t-max", default_value_t = 6.0)]
    pub t_max: f64,
    #[arg(long = "t-steps", default_value_t = 121)]
    pub t_steps: usize,
    /// Arrival plane, as a distance beyond x = L/2
    #[arg(long, default_value_t = 5.0)]
    pub plane: f64,
    #[arg(long, default_value_t = 1e-8)]
    pub tolerance: f64,
    #[command(flatten)]
    #[serde(flatten)]
    pub output: Output,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct CollideArgs {
    #[arg(long = "w-a", default_value_t = 4.0)]
    pub w_a: f64,
    #[arg(long = "k0-a", default_value_t = 1.0)]
    pub k0_a: f64,
    #[arg(long = "l-a", default_value_t = 0.5)]
    pub l_a: f64,
    /// The grid must be symmetric about 0; defaults to ±8
    #[arg(long = "x-min", default_value_t = -8.0)]
    pub x_min: f64,
    #[arg(long = "x-max", default_value_t = 8.0)]
    pub x_max: f64,
    #[arg(long = "x-points", default_value_t = 321)]
    pub x_points: usize,
    /// Defaults to the simultaneous-arrival time −L/(2k₀)
    #[arg(long = "t-min")]
    pub t_min: Option<f64>,
    /// Defaults to t-min + 4
    #[arg(long = "t-max")]
    pub t_max: Option<f64>,
    #[arg(long = "t-steps", default_value_t = 9)]
    pub t_steps: usize,
    #[arg(long, default_value_t = 1e-8)]
    pub tolerance: f64,
    #[command(flatten)]
    #[serde(flatten)]
    pub output: Output,
}

#[derive(Debug, Clone, PartialEq, Args)]
pub struct ReplayArgs {
    pub manifest: PathBuf,
    #[command(flatten)]
    pub output: Output,
}
