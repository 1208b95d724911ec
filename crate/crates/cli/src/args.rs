//! Command-line grammar.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use mxmap_core::mxmap::DEFAULT_CCM_THRESHOLD;
use mxmap_core::{ConditionMapping, EmbedParams, GraphFormat, MXMapConfig, PairGate};

use crate::output::CliError;

#[derive(Debug, Parser)]
#[command(
    name = "mxmap",
    version,
    about = "Causal discovery on coupled nonlinear time series"
)]
pub struct Cli {
    /// Worker threads for pairwise and pruning work (default: all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Simulate a benchmark system and write it as CSV.
    Gen(GenArgs),
    /// Infer a causal graph from a CSV dataset.
    Discover(DiscoverArgs),
    /// Compare a predicted graph against a ground-truth graph.
    Eval(EvalArgs),
    /// Time discovery on chains of growing width and fit a log-log slope.
    BenchRuntime(BenchArgs),
    /// Evaluate one candidate link over a grid of lags and embedding dimensions.
    Grid(GridArgs),
    /// Count labelling mistakes per scenario over a range of ratio thresholds.
    Sweep(SweepArgs),
    /// Pairwise correlations on short random windows.
    Mirage(MirageArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Profile {
    /// tau 1, E 4, k 5, gamma* 0.45.
    Simulated,
    /// tau 2, E 6, k 10, gamma* 0.6.
    #[value(name = "table2")]
    Segments,
    /// tau 1, E 7, k 8, gamma* 0.45.
    #[value(name = "appendixB")]
    Sweep,
}

impl Profile {
    pub fn config(self) -> MXMapConfig {
        match self {
            Profile::Simulated => MXMapConfig::simulated(),
            Profile::Segments => MXMapConfig::segment_protocol(),
            Profile::Sweep => MXMapConfig::sweep_protocol(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FormatArg {
    Dot,
    Json,
    Csv,
}

impl From<FormatArg> for GraphFormat {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Dot => GraphFormat::Dot,
            FormatArg::Json => GraphFormat::Json,
            FormatArg::Csv => GraphFormat::MatrixCsv,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum GateArg {
    Stronger,
    Both,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MappingArg {
    ProjectEmbedding,
    ReEmbed,
}

impl From<MappingArg> for ConditionMapping {
    fn from(m: MappingArg) -> Self {
        match m {
            MappingArg::ProjectEmbedding => ConditionMapping::ProjectEmbedding,
            MappingArg::ReEmbed => ConditionMapping::ReEmbed,
        }
    }
}

/// Discovery parameters. Unset flags fall back to the chosen profile.
#[derive(Debug, Clone, Args)]
pub struct MethodArgs {
    #[arg(long, value_enum, default_value_t = Profile::Simulated)]
    pub profile: Profile,
    /// Delay between embedding coordinates.
    #[arg(long)]
    pub tau: Option<usize>,
    /// Embedding dimension E.
    #[arg(long)]
    pub dim: Option<usize>,
    /// Nearest neighbours per prediction (default E + 1, or the profile's value).
    #[arg(long)]
    pub knn: Option<usize>,
    /// Phase-1 gate on cross-map scores.
    #[arg(long, default_value_t = DEFAULT_CCM_THRESHOLD)]
    pub ccm_thres: f64,
    /// Ratio threshold below which a link is pruned as indirect.
    #[arg(long)]
    pub gamma_star: Option<f64>,
    /// Which of a pair's scores must clear the phase-1 gate.
    #[arg(long, value_enum, default_value_t = GateArg::Stronger)]
    pub gate: GateArg,
    /// Score gap treated as a tie, giving a bidirectional edge.
    #[arg(long, default_value_t = 0.0)]
    pub tie_epsilon: f64,
    /// Neighbour candidates within this many steps of the query are skipped.
    #[arg(long, default_value_t = 0)]
    pub exclusion_radius: usize,
    #[arg(long, value_enum, default_value_t = MappingArg::ProjectEmbedding)]
    pub condition_mapping: MappingArg,
}

impl MethodArgs {
    pub fn resolve(&self) -> Result<MXMapConfig, CliError> {
        let base = self.profile.config();
        let tau = self.tau.unwrap_or(base.embed.tau);
        let dim = self.dim.unwrap_or(base.embed.dim);
        let k = match (self.knn, self.profile) {
            (Some(k), _) => k,
            (None, Profile::Segments) => base.embed.k,
            (None, _) => dim + 1,
        };
        let mut embed = EmbedParams::with_k(tau, dim, k)?;
        embed.exclusion_radius = self.exclusion_radius;
        let mut cfg = MXMapConfig::new(embed, self.gamma_star.unwrap_or(base.gamma_star))?;
        cfg.ccm_threshold = self.ccm_thres;
        cfg.gate = match self.gate {
            GateArg::Stronger => PairGate::Stronger,
            GateArg::Both => PairGate::Both,
        };
        cfg.tie_epsilon = self.tie_epsilon;
        cfg.condition_mapping = self.condition_mapping.into();
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Debug, Args)]
pub struct GenArgs {
    /// System name, e.g. 3V_chain or NV_chain_6.
    #[arg(long)]
    pub preset: String,
    #[arg(long, default_value_t = 3500)]
    pub length: usize,
    /// Standard deviation of additive Gaussian noise.
    #[arg(long, default_value_t = 0.0)]
    pub noise_std: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Output CSV (default: stdout).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Also write the ground-truth graph; format follows the extension (.json, .dot, else csv).
    #[arg(long)]
    pub truth_out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct DiscoverArgs {
    /// Input CSV with one column per variable.
    #[arg(long)]
    pub input: PathBuf,
    #[command(flatten)]
    pub method: MethodArgs,
    #[arg(long, value_enum, default_value_t = FormatArg::Dot)]
    pub format: FormatArg,
    /// Output graph file (default: stdout).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Write pair scores and the pruning log as JSON.
    #[arg(long)]
    pub report: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    /// Ground-truth graph (.json or adjacency csv).
    #[arg(long)]
    pub truth: PathBuf,
    /// Predicted graph (.json or adjacency csv).
    #[arg(long)]
    pub pred: PathBuf,
    /// Print JSON instead of a table.
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    /// Widest chain to time; widths run from 3 up to this.
    #[arg(long, default_value_t = 8)]
    pub max_k: usize,
    #[arg(long, default_value_t = 3500)]
    pub length: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Runs per width; the fastest is kept.
    #[arg(long, default_value_t = 1)]
    pub repeats: usize,
    #[command(flatten)]
    pub method: MethodArgs,
}

#[derive(Debug, Args)]
pub struct GridArgs {
    #[arg(long)]
    pub input: PathBuf,
    /// Name of the cause column.
    #[arg(long)]
    pub cause: String,
    /// Name of the effect column.
    #[arg(long)]
    pub effect: String,
    /// Conditioning columns.
    #[arg(long, value_delimiter = ',', required = true)]
    pub cond: Vec<String>,
    #[arg(long, value_delimiter = ',', default_values_t = [1usize, 2])]
    pub taus: Vec<usize>,
    #[arg(long, value_delimiter = ',', default_values_t = [3usize, 4, 5, 6, 7, 8])]
    pub dims: Vec<usize>,
    #[arg(long, default_value_t = mxmap_core::gridsearch::DEFAULT_THRESHOLD)]
    pub threshold: f64,
    /// Fixed neighbour count (default E + 1 per cell).
    #[arg(long)]
    pub knn: Option<usize>,
    #[arg(long, value_enum, default_value_t = MappingArg::ProjectEmbedding)]
    pub condition_mapping: MappingArg,
    /// Write one CSV per surface into this directory.
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[arg(long, default_value_t = 3500)]
    pub length: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 1)]
    pub tau: usize,
    #[arg(long, default_value_t = 7)]
    pub dim: usize,
    #[arg(long)]
    pub knn: Option<usize>,
    /// Mistakes allowed per scenario for a threshold to be admissible.
    #[arg(long, default_value_t = 2)]
    pub tolerance: usize,
    /// Thresholds to test (default 0.05, 0.10, ..., 0.95).
    #[arg(long, value_delimiter = ',')]
    pub thresholds: Option<Vec<f64>>,
    /// Write the full result as JSON.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct MirageArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, default_value_t = 25)]
    pub window: usize,
    #[arg(long, default_value_t = 20)]
    pub count: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// A pair flips when it exceeds +level in one window and falls below -level in another.
    #[arg(long, default_value_t = 0.3)]
    pub level: f64,
}
