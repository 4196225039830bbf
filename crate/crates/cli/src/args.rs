use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(name = "flatscape", version, about = "Independent-set landscapes, Monte Carlo bounds and annealing gaps")]
pub struct Cli {
    /// Output directory for reports, tables and the run manifest.
    #[arg(long, global = true, env = "FLATSCAPE_OUT_DIR", default_value = ".")]
    pub out: PathBuf,
    /// Seed for every random stream of the run.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Generate an instance.
    Gen(GenArgs),
    /// Independence polynomial, runtime bounds and unimodality.
    Profile(ProfileArgs),
    /// Simulated annealing time to solution.
    Sa(SaArgs),
    /// Parallel tempering time to solution.
    Pt(PtArgs),
    /// Path-integral Monte Carlo marginal and bound inputs.
    Qmc(QmcArgs),
    /// Minimum-gap scan of the annealing Hamiltonian.
    Gap(GapArgs),
    /// Perturbative states and resolvent gap estimates.
    Resolvent(GapArgs),
    /// Tight-binding chain, its resonance and a slowdown schedule.
    Chain(ChainArgs),
    /// Closed-form star-graph predictions.
    Star(StarArgs),
    /// Join gap reports into a bound-versus-gap table.
    Compare(CompareArgs),
}

#[derive(Args, Debug)]
pub struct GraphInput {
    /// Instance JSON (`-` reads standard input).
    #[arg(long, default_value = "-")]
    pub graph: String,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
pub enum Family {
    UnitDisk,
    Star,
}

#[derive(Args, Debug)]
pub struct GenArgs {
    #[arg(value_enum)]
    pub family: Family,
    #[arg(long, default_value_t = 4)]
    pub width: usize,
    #[arg(long, default_value_t = 4)]
    pub height: usize,
    #[arg(long, default_value_t = 0.8)]
    pub filling: f64,
    /// Squared connection radius in lattice units.
    #[arg(long, default_value_t = 2.0)]
    pub radius_sq: f64,
    #[arg(long, default_value_t = 2)]
    pub nb: usize,
    #[arg(long, default_value_t = 2)]
    pub l: usize,
    /// File name inside the output directory.
    #[arg(long, default_value = "graph.json")]
    pub name: String,
}

#[derive(Args, Debug)]
pub struct BoundArgs {
    #[arg(long, default_value_t = 1)]
    pub k: usize,
    #[arg(long, default_value_t = 0.25)]
    pub eps: f64,
}

#[derive(Args, Debug)]
pub struct ProfileArgs {
    #[command(flatten)]
    pub input: GraphInput,
    #[command(flatten)]
    pub bound: BoundArgs,
    /// Spins altered per replica in a collective update.
    #[arg(long, default_value_t = 1)]
    pub k_prime: usize,
}

#[derive(Args, Debug)]
pub struct SaArgs {
    #[command(flatten)]
    pub input: GraphInput,
    /// Run lengths in sweeps.
    #[arg(long, value_delimiter = ',', default_value = "1,2,4,8,16,32,64,128,256,512,1024")]
    pub lengths: Vec<usize>,
    #[arg(long, default_value_t = 100)]
    pub trials: usize,
    /// Inverse-temperature ramp `lo,hi`.
    #[arg(long, value_delimiter = ',', default_value = "0.1,5")]
    pub beta: Vec<f64>,
    #[arg(long, default_value_t = 0.5)]
    pub flip_weight: f64,
    #[arg(long, default_value_t = 0.75)]
    pub p_target: f64,
    #[arg(long, default_value_t = 200)]
    pub bootstrap: usize,
}

#[derive(Args, Debug)]
pub struct PtArgs {
    #[command(flatten)]
    pub input: GraphInput,
    #[arg(long, value_delimiter = ',', default_value = "1,2,4,8,16,32,64,128,256")]
    pub lengths: Vec<usize>,
    #[arg(long, default_value_t = 100)]
    pub trials: usize,
    /// Ladder end points `lo,hi`, spaced geometrically.
    #[arg(long, value_delimiter = ',', default_value = "0.2,5")]
    pub beta: Vec<f64>,
    #[arg(long, default_value_t = 4)]
    pub replicas: usize,
    #[arg(long)]
    pub isoenergetic: bool,
    #[arg(long, default_value_t = 0.75)]
    pub p_target: f64,
    #[arg(long, default_value_t = 200)]
    pub bootstrap: usize,
}

#[derive(Args, Debug)]
pub struct QmcArgs {
    #[command(flatten)]
    pub input: GraphInput,
    #[arg(long, default_value_t = 1.0)]
    pub omega: f64,
    #[arg(long, default_value_t = 1.0)]
    pub delta: f64,
    #[arg(long, default_value_t = 0.0)]
    pub lambda: f64,
    #[arg(long, default_value_t = 2.0)]
    pub beta: f64,
    #[arg(long, default_value_t = 64)]
    pub slices: usize,
    #[arg(long, default_value_t = 20000)]
    pub sweeps: usize,
    #[command(flatten)]
    pub bound: BoundArgs,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
pub enum Unit {
    /// `δ = 1`, scan `Ω/δ`.
    Delta,
    /// `Ω = 1`, scan `δ/Ω`.
    Omega,
}

#[derive(Args, Debug)]
pub struct GapArgs {
    #[command(flatten)]
    pub input: GraphInput,
    #[arg(long, default_value_t = 0.0)]
    pub lambda: f64,
    #[arg(long, value_enum, default_value = "delta")]
    pub unit: Unit,
    /// Scan interval of `Ω/δ` (unit delta) or `δ/Ω` (unit omega).
    #[arg(long, value_delimiter = ',')]
    pub range: Option<Vec<f64>>,
    /// Detuning interval, shorthand for `--unit omega --range`.
    #[arg(long, value_delimiter = ',')]
    pub delta_range: Option<Vec<f64>>,
    /// Use the branch-symmetric sector (star instances).
    #[arg(long)]
    pub symmetric: bool,
    /// Truncated resolvent series order instead of the exact solve.
    #[arg(long)]
    pub series: Option<usize>,
    #[arg(long, default_value_t = 64)]
    pub points: usize,
    /// Stem of the report files; the subcommand name by default.
    #[arg(long)]
    pub label: Option<String>,
    #[command(flatten)]
    pub bound: BoundArgs,
}

#[derive(Args, Debug)]
pub struct ChainArgs {
    #[command(flatten)]
    pub input: GraphInput,
    #[arg(long, default_value_t = 1.0)]
    pub omega: f64,
    #[arg(long, value_delimiter = ',')]
    pub delta_range: Option<Vec<f64>>,
    #[arg(long, default_value_t = 129)]
    pub points: usize,
    /// Adiabatic safety factor of the schedule.
    #[arg(long, default_value_t = 0.1)]
    pub c: f64,
    /// Slowdown window width in units of the gap.
    #[arg(long, default_value_t = 1.0)]
    pub window: f64,
    /// Compare with the full modified Hamiltonian at this `λ`.
    #[arg(long)]
    pub lambda: Option<f64>,
}

#[derive(Args, Debug)]
pub struct StarArgs {
    #[arg(long)]
    pub nb: usize,
    #[arg(long)]
    pub l: usize,
    #[arg(long, default_value_t = 1.0)]
    pub omega: f64,
}

#[derive(Args, Debug)]
pub struct CompareArgs {
    /// Gap reports written by `gap` or `resolvent`.
    pub reports: Vec<PathBuf>,
    /// Table name inside the output directory.
    #[arg(long, default_value = "compare.csv")]
    pub name: String,
}
