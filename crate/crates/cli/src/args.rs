use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use std::path::PathBuf;

#[derive(Debug, Parser)]
#[command(
    name = "taulab",
    version,
    about = "Tau functions of Hankel operators and integrable kernels"
)]
pub struct Cli {
    /// Flat JSON object of flag values. Flags on the command line win.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output path. Tau curves and tables are CSV with a JSON manifest of the
    /// same basename; `check` writes its JSON verdict here.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Finite exponential sum symbol.
    Exp(ExpArgs),
    /// Hard-edge Bessel tau function.
    Bessel(BesselArgs),
    /// Lame symbol on a period strip.
    Lame(LameArgs),
    /// Cauchy determinants on an arithmetic progression and their growth.
    Cauchy(CauchyArgs),
    /// Fuchsian system with poles at 0, 1, t.
    Pvi(PviArgs),
    /// Hypergeometric kernel.
    Hypergeom(HypergeomArgs),
    /// Acceptance criteria.
    Check(CheckArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Exp(_) => "exp",
            Command::Bessel(_) => "bessel",
            Command::Lame(_) => "lame",
            Command::Cauchy(_) => "cauchy",
            Command::Pvi(_) => "pvi",
            Command::Hypergeom(_) => "hypergeom",
            Command::Check(_) => "check",
        }
    }
}

pub const SUBCOMMANDS: [&str; 7] = ["exp", "bessel", "lame", "cauchy", "pvi", "hypergeom", "check"];

#[derive(Debug, Clone, Args, Serialize)]
#[serde(rename_all = "kebab-case")]
pub struct ExpArgs {
    /// Exponents, comma separated, e.g. `1,2+0.5i`.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub lambda: Vec<String>,
    /// Weights matching `--lambda`.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub xi: Vec<String>,
    /// `start:stop:step` or a comma-separated list.
    #[arg(long, default_value = "0:3:0.1")]
    pub grid: String,
    /// Run the acceptance criteria for this module.
    #[arg(long)]
    pub check: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum BesselMethod {
    Series,
    Hill,
    Oracle,
}

#[derive(Debug, Clone, Args, Serialize)]
#[serde(rename_all = "kebab-case")]
pub struct BesselArgs {
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub nu: f64,
    /// Partition weight cap of the series.
    #[arg(long, default_value_t = 10)]
    pub weight_cap: usize,
    /// Size of the Hill-type matrix.
    #[arg(long, default_value_t = 30)]
    pub hill_size: usize,
    #[arg(long, value_enum, default_value_t = BesselMethod::Series)]
    pub method: BesselMethod,
    #[arg(long, default_value = "0.5:3:0.1")]
    pub grid: String,
    #[arg(long)]
    pub check: bool,
}

#[derive(Debug, Clone, Args, Serialize)]
#[serde(rename_all = "kebab-case")]
pub struct LameArgs {
    #[arg(long, default_value_t = 0.5)]
    pub k2: f64,
    /// Complex parameter, e.g. `-1` or `0.4+0.3i`.
    #[arg(long, default_value = "-1", allow_hyphen_values = true)]
    pub alpha: String,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub shift: f64,
    /// Starting truncation; doubled until tau settles.
    #[arg(long, default_value_t = 16)]
    pub truncation: usize,
    #[arg(long, default_value = "0:3:0.1")]
    pub grid: String,
    #[arg(long)]
    pub check: bool,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct CauchyArgs {
    /// Complex `beta`; only its real part enters `D_N`.
    #[arg(long, default_value = "1", allow_hyphen_values = true)]
    pub beta: String,
    #[arg(long = "K", default_value_t = 1.0)]
    #[serde(rename = "K")]
    pub k: f64,
    #[arg(long = "N", value_delimiter = ',', default_value = "4,8,16,32,64")]
    #[serde(rename = "N")]
    pub n: Vec<usize>,
    #[arg(long)]
    pub check: bool,
}

#[derive(Debug, Clone, Args, Serialize)]
#[serde(rename_all = "kebab-case")]
pub struct PviArgs {
    #[arg(
        long,
        value_delimiter = ',',
        allow_hyphen_values = true,
        default_value = "0.3,0.2,0.1"
    )]
    pub theta: Vec<f64>,
    #[arg(
        long,
        value_delimiter = ',',
        allow_hyphen_values = true,
        default_value = "-0.3,-0.5,-0.2"
    )]
    pub z: Vec<f64>,
    #[arg(
        long,
        value_delimiter = ',',
        allow_hyphen_values = true,
        default_value = "4.333333333333333,-3,1"
    )]
    pub u: Vec<f64>,
    #[arg(long, default_value_t = 0.5, allow_hyphen_values = true)]
    pub t: f64,
    /// Left end points `x` of `(x, infinity)`.
    #[arg(long, default_value = "1.5:3.5:0.25")]
    pub grid: String,
    /// Gauss-Legendre nodes per panel.
    #[arg(long, default_value_t = 24)]
    pub nodes: usize,
    #[arg(long)]
    pub check: bool,
}

#[derive(Debug, Clone, Args, Serialize)]
#[serde(rename_all = "kebab-case")]
pub struct HypergeomArgs {
    /// The product `-ab` with `a = -b`.
    #[arg(long, default_value_t = 3.0)]
    pub neg_ab: f64,
    #[arg(long, default_value_t = 0.3)]
    pub c: f64,
    #[arg(long, default_value_t = 1e4)]
    pub lambda_start: f64,
    /// Left end points `x > 1` of `(x, lambda_start)`.
    #[arg(long, default_value = "1.1:3:0.1")]
    pub grid: String,
    #[arg(long, default_value_t = 16)]
    pub nodes: usize,
    #[arg(long)]
    pub check: bool,
}

#[derive(Debug, Clone, Args, Serialize)]
#[serde(rename_all = "kebab-case")]
pub struct CheckArgs {
    /// `all`, a module name, or criterion numbers such as `2,4`.
    #[arg(long, default_value = "all")]
    pub suite: String,
    #[arg(long, default_value_t = taulab::acceptance::DEFAULT_SEED)]
    pub seed: u64,
    /// Loosen every tolerance to at least this value.
    #[arg(long)]
    pub tol: Option<f64>,
}
