use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};
use serde::{Serialize, Serializer};

#[derive(Parser, Debug)]
#[command(name = "twopoint", version, about = "Independence number of G(n,p): predictions, exact solving and experiments")]
pub struct Cli {
    /// Worker threads (default: available parallelism).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// JSON object of flag values; explicit flags win.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Progress on stderr; repeat for more.
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    pub verbose: u8,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    /// First-moment thresholds and asymptotic predictions for one point.
    Predict(PredictArgs),
    /// Predictions over a grid of points, as CSV.
    Sweep(SweepArgs),
    /// Exact independence number of a graph file.
    Solve(SolveArgs),
    /// Sample a random graph in the fixture format.
    Sample(SampleArgs),
    /// Largest augmented independent set of a graph.
    Augmented(AugmentedArgs),
    /// Histogram of alpha over sampled graphs.
    Concentrate(ConcentrateArgs),
    /// Tree-component decomposition check at p = c/n.
    Trees(TreesArgs),
    /// Coupled ladder from p to 2p.
    Ladder(LadderArgs),
    /// Small-instance oracle suite.
    Check(CheckArgs),
}

/// Edge probability as a decimal, a ratio `a/b`, or a power `n^x`.
#[derive(Clone, Debug, PartialEq)]
pub enum Prob {
    Decimal(f64),
    Ratio(u64, u64),
    Power(f64),
}

impl Prob {
    pub fn resolve(&self, n: usize) -> f64 {
        match *self {
            Prob::Decimal(p) => p,
            Prob::Ratio(a, b) => a as f64 / b as f64,
            Prob::Power(x) => (n as f64).powf(x),
        }
    }
}

impl FromStr for Prob {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let s = s.trim();
        let p = if let Some(x) = s.strip_prefix("n^") {
            let x = x.trim_start_matches('(').trim_end_matches(')');
            let x: f64 = x.parse().map_err(|_| format!("bad exponent in {s:?}"))?;
            if !(x <= 0.0) {
                return Err(format!("exponent in {s:?} must be at most 0"));
            }
            Prob::Power(x)
        } else if let Some((a, b)) = s.split_once('/') {
            let a: u64 = a.trim().parse().map_err(|_| format!("bad numerator in {s:?}"))?;
            let b: u64 = b.trim().parse().map_err(|_| format!("bad denominator in {s:?}"))?;
            if b == 0 || a > b {
                return Err(format!("{s:?} is not a probability"));
            }
            Prob::Ratio(a, b)
        } else {
            let p: f64 = s.parse().map_err(|_| format!("cannot read {s:?} as a probability"))?;
            if !(0.0..=1.0).contains(&p) {
                return Err(format!("{s:?} is not a probability"));
            }
            Prob::Decimal(p)
        };
        Ok(p)
    }
}

impl fmt::Display for Prob {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Prob::Decimal(p) => write!(f, "{p}"),
            Prob::Ratio(a, b) => write!(f, "{a}/{b}"),
            Prob::Power(x) => write!(f, "n^{x}"),
        }
    }
}

impl Serialize for Prob {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// Exactly one of `--p`, `--c`, `--m`.
#[derive(Args, Debug, Serialize)]
#[group(required = true, multiple = false)]
pub struct Model {
    /// Edge probability: 0.01, 1/3 or n^-0.6.
    #[arg(long)]
    pub p: Option<Prob>,
    /// Edge probability c/n.
    #[arg(long)]
    pub c: Option<f64>,
    /// Exact edge count, G(n, m).
    #[arg(long)]
    pub m: Option<u64>,
}

#[derive(Args, Debug, Serialize)]
pub struct BudgetArgs {
    /// Search-node limit per solve.
    #[arg(long, default_value_t = 1_000_000_000)]
    pub max_nodes: u64,
    /// Wall-clock limit per solve, in seconds.
    #[arg(long, default_value_t = 60.0)]
    pub time_limit: f64,
}

#[derive(Args, Debug, Serialize)]
pub struct PredictArgs {
    #[arg(long)]
    pub n: usize,
    #[command(flatten)]
    pub model: Model,
    #[arg(long)]
    pub epsilon: Option<f64>,
    /// Natural-log threshold for k_x.
    #[arg(long, allow_hyphen_values = true)]
    pub kx_threshold: Option<f64>,
    /// Natural-log threshold for k_z.
    #[arg(long, allow_hyphen_values = true)]
    pub kz_threshold: Option<f64>,
    /// Define k_x by E[X_k] > 1.
    #[arg(long)]
    pub unit_kx: bool,
    /// Scan every k instead of stopping far below the threshold.
    #[arg(long)]
    pub full_scan: bool,
    #[arg(long, value_name = "PATH")]
    pub json: Option<PathBuf>,
}

#[derive(Args, Debug, Serialize)]
pub struct SweepArgs {
    /// Comma-separated vertex counts.
    #[arg(long, value_delimiter = ',', required = true)]
    pub n: Vec<usize>,
    /// Comma-separated probabilities; `n^x` is evaluated per row.
    #[arg(long, value_delimiter = ',', required = true)]
    pub p: Vec<Prob>,
    #[arg(long, value_name = "PATH")]
    pub csv: Option<PathBuf>,
}

#[derive(Args, Debug, Serialize)]
pub struct SolveArgs {
    #[arg(long, value_name = "PATH")]
    pub graph_file: PathBuf,
    #[command(flatten)]
    pub budget: BudgetArgs,
    #[arg(long, value_name = "PATH")]
    pub json: Option<PathBuf>,
}

#[derive(Args, Debug, Serialize)]
pub struct SampleArgs {
    #[arg(long)]
    pub n: usize,
    #[command(flatten)]
    pub model: Model,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug, Serialize)]
pub struct AugmentedArgs {
    #[arg(long, value_name = "PATH")]
    pub graph_file: PathBuf,
    #[command(flatten)]
    pub budget: BudgetArgs,
    #[arg(long, value_name = "PATH")]
    pub json: Option<PathBuf>,
}

#[derive(Args, Debug, Serialize)]
pub struct TrialArgs {
    #[arg(long, default_value_t = 100, value_parser = clap::value_parser!(u64).range(1..))]
    pub trials: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    pub budget: BudgetArgs,
    #[arg(long, value_name = "PATH")]
    pub csv: Option<PathBuf>,
    #[arg(long, value_name = "PATH")]
    pub json: Option<PathBuf>,
}

#[derive(Args, Debug, Serialize)]
pub struct ConcentrateArgs {
    #[arg(long)]
    pub n: usize,
    #[command(flatten)]
    pub model: Model,
    #[arg(long)]
    pub epsilon: Option<f64>,
    #[command(flatten)]
    pub trials: TrialArgs,
}

#[derive(Args, Debug, Serialize)]
pub struct TreesArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub c: f64,
    #[command(flatten)]
    pub trials: TrialArgs,
}

#[derive(Args, Debug, Serialize)]
pub struct LadderArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub p: Prob,
    /// Total wall-clock allowance in seconds; unfinished work is reported.
    #[arg(long)]
    pub allowance: Option<f64>,
    #[command(flatten)]
    pub trials: TrialArgs,
}

#[derive(Args, Debug, Serialize)]
pub struct CheckArgs {
    /// Random graphs with 6 to 12 vertices for the augmented-set check.
    #[arg(long, default_value_t = 20_000)]
    pub random: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn probabilities() {
        assert_eq!("0.25".parse::<Prob>().unwrap(), Prob::Decimal(0.25));
        assert_eq!("1/3".parse::<Prob>().unwrap(), Prob::Ratio(1, 3));
        assert_eq!("n^-0.6".parse::<Prob>().unwrap(), Prob::Power(-0.6));
        assert_eq!("n^(-0.5)".parse::<Prob>().unwrap(), Prob::Power(-0.5));
        assert_eq!(Prob::Power(-0.5).resolve(100), 0.1);
        assert_eq!(Prob::Ratio(1, 4).resolve(7), 0.25);
        for bad in ["1.5", "-0.1", "3/2", "1/0", "n^0.5", "x", "n^", "a/3"] {
            assert!(bad.parse::<Prob>().is_err(), "{bad}");
        }
        assert_eq!(Prob::Power(-0.6).to_string(), "n^-0.6");
    }

    #[test]
    fn cli_definition_is_valid() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }
}
