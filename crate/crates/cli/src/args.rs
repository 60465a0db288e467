use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

/// Exact statistics of a two-spin Heisenberg quantum Otto cycle.
///
/// Exit status: 0 on success, 2 for usage or validation errors, 3 when the
/// requested quantity is physically undefined (for example an efficiency with
/// zero heat input).
#[derive(Debug, Parser)]
#[command(name = "idle-otto", rename_all = "kebab-case")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Every closed-form observable at one parameter point.
    Observables {
        #[command(flatten)]
        params: PointArgs,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Discrete distributions from the two-point measurement scheme.
    Distribution {
        #[command(flatten)]
        params: OptionalPointArgs,
        /// Take the parameters from a distribution preset (fig9-top, fig9-bottom).
        #[arg(long, conflicts_with_all = ["J", "hi", "hf", "Tc", "Th"])]
        preset: Option<String>,
        #[arg(long, value_enum, default_value_t = Which::EtaScaled)]
        which: Which,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Grid or line scans, from a preset or from explicit axes.
    Scan(ScanArgs),
    /// Limits for Tc -> 0 and Th -> infinity.
    Limits {
        #[arg(long = "J", allow_negative_numbers = true)]
        coupling: f64,
        #[arg(long)]
        hi: f64,
        #[arg(long)]
        hf: f64,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Check the uncertainty bound at one point, or over a random sweep.
    Tur(TurArgs),
    /// Search one parameter for the extremum of an observable.
    Extremum(ExtremumArgs),
    /// Sample trajectories and compare with the exact distribution.
    Montecarlo {
        #[command(flatten)]
        params: PointArgs,
        #[arg(long, default_value_t = 1_000_000)]
        samples: u64,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Significance level of the chi-squared test.
        #[arg(long, default_value_t = 1e-3)]
        alpha: f64,
        #[command(flatten)]
        out: OutputArgs,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Which {
    Work,
    EtaScaled,
    EtaStochastic,
    Joint,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Table,
}

#[derive(Debug, Args)]
pub struct OutputArgs {
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Write to this file instead of standard output.
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, Args)]
pub struct PointArgs {
    /// Spin-spin coupling J.
    #[arg(long = "J", allow_negative_numbers = true)]
    pub coupling: f64,
    /// Field during the cold stage.
    #[arg(long)]
    pub hi: f64,
    /// Field during the hot stage.
    #[arg(long)]
    pub hf: f64,
    /// Cold bath temperature.
    #[arg(long = "Tc")]
    pub t_cold: f64,
    /// Hot bath temperature.
    #[arg(long = "Th")]
    pub t_hot: f64,
}

#[derive(Debug, Clone, Copy, Args)]
pub struct OptionalPointArgs {
    #[arg(long = "J", id = "J", allow_negative_numbers = true)]
    pub coupling: Option<f64>,
    #[arg(long, id = "hi")]
    pub hi: Option<f64>,
    #[arg(long, id = "hf")]
    pub hf: Option<f64>,
    #[arg(long = "Tc", id = "Tc")]
    pub t_cold: Option<f64>,
    #[arg(long = "Th", id = "Th")]
    pub t_hot: Option<f64>,
}

#[derive(Debug, Args)]
pub struct ScanArgs {
    /// Named preset, or `list` to print the available presets.
    #[arg(long)]
    pub preset: Option<String>,
    /// With `--preset list`, print every preset definition as JSON.
    #[arg(long)]
    pub show: bool,
    /// First axis as PARAM:MIN:MAX:POINTS[:log], PARAM one of Tc, Th, J.
    #[arg(long, conflicts_with = "preset")]
    pub axis1: Option<String>,
    /// Second axis, same syntax. Omit for a line scan.
    #[arg(long, conflicts_with = "preset")]
    pub axis2: Option<String>,
    /// Comma-separated observables to record.
    #[arg(long, value_delimiter = ',', default_value = "mean_W,var_W,eta_th,mean_Sigma")]
    pub quantities: Vec<String>,
    #[arg(long = "J", allow_negative_numbers = true, conflicts_with = "preset")]
    pub coupling: Option<f64>,
    #[arg(long, default_value_t = 3.0, conflicts_with = "preset")]
    pub hi: f64,
    #[arg(long, default_value_t = 4.0, conflicts_with = "preset")]
    pub hf: f64,
    #[arg(long = "Tc", conflicts_with = "preset")]
    pub t_cold: Option<f64>,
    #[arg(long = "Th", conflicts_with = "preset")]
    pub t_hot: Option<f64>,
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct TurArgs {
    #[command(flatten)]
    pub params: OptionalPointArgs,
    /// Evaluate this many random points instead of one: J in [0, 10],
    /// hi in [1, 5], hf in (hi, 8], temperatures log-uniform in [1e-2, 1e2].
    #[arg(long, conflicts_with_all = ["J", "hi", "hf", "Tc", "Th"])]
    pub sweep: Option<usize>,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Args)]
pub struct ExtremumArgs {
    /// mean_W, |mean_W| (or abs_mean_W), rel_fluct_W, eta_th, or any scan observable.
    #[arg(long)]
    pub objective: String,
    /// Defaults to the natural direction of the objective.
    #[arg(long, value_enum)]
    pub goal: Option<GoalArg>,
    /// Scanned parameter: Tc, Th or J.
    #[arg(long)]
    pub param: String,
    #[arg(long, allow_negative_numbers = true)]
    pub min: f64,
    #[arg(long, allow_negative_numbers = true)]
    pub max: f64,
    /// Coarse grid size (at least 64 are used).
    #[arg(long, default_value_t = 128)]
    pub points: usize,
    #[arg(long, default_value = "linear")]
    pub spacing: String,
    /// Target bracket width in the parameter.
    #[arg(long, default_value_t = 1e-6)]
    pub tol: f64,
    #[arg(long = "J", allow_negative_numbers = true)]
    pub coupling: Option<f64>,
    #[arg(long, default_value_t = 3.0)]
    pub hi: f64,
    #[arg(long, default_value_t = 4.0)]
    pub hf: f64,
    #[arg(long = "Tc")]
    pub t_cold: Option<f64>,
    #[arg(long = "Th")]
    pub t_hot: Option<f64>,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum GoalArg {
    Min,
    Max,
}
