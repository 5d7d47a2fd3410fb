use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use kronmle::algebra::{FamilyCase, DEFAULT_PAIR_BUDGET};

#[derive(Parser, Debug)]
#[command(
    name = "kronmle",
    version,
    about = "Kronecker-structured covariance MLE toolkit"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Draw a seeded sample of n matrices of shape m1 x m2.
    Sample(SampleArgs),
    /// Estimate the Kronecker factors of a sample file.
    Mle(MleArgs),
    /// Check the determinant reduction identity on random exact instances.
    VerifyLemma(LemmaArgs),
    /// Tabulate ML degrees for m2 = 2 over ranges of m1 and n.
    Mldegree(MlDegreeArgs),
    /// Count the critical points of a parametric family.
    Multiplicity(MultiplicityArgs),
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum)]
pub enum Format {
    #[default]
    Text,
    Csv,
    Json,
}

#[derive(Args, Debug)]
pub struct Output {
    /// Report format.
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    /// Write the result file here instead of standard output.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct SampleArgs {
    #[arg(long)]
    pub m1: usize,
    #[arg(long)]
    pub m2: usize,
    #[arg(long)]
    pub n: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Integer entries uniform on 0..=16 instead of standard normal entries.
    #[arg(long)]
    pub integer: bool,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Args, Debug)]
pub struct MleArgs {
    /// Sample file: header `m1 m2 n`, then the concatenated data matrix.
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long, default_value_t = 1e-10)]
    pub tol: f64,
    #[arg(long, default_value_t = 10_000)]
    pub max_iter: usize,
    /// Skip the flip-flop comparison that accompanies the closed form.
    #[arg(long)]
    pub no_compare: bool,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Args, Debug)]
pub struct LemmaArgs {
    #[arg(long, default_value_t = 100)]
    pub instances: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Fix the dimensions instead of drawing them at random.
    #[arg(long, requires_all = ["m2", "n"])]
    pub m1: Option<usize>,
    #[arg(long, requires_all = ["m1", "n"])]
    pub m2: Option<usize>,
    #[arg(long, requires_all = ["m1", "m2"])]
    pub n: Option<usize>,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Args, Debug)]
pub struct MlDegreeArgs {
    /// Values of m1: `a-b`, `a..b`, a comma list or a single value.
    #[arg(long, default_value = "2-5")]
    pub m1: String,
    /// Values of n, same syntax as --m1.
    #[arg(long, default_value = "2-4")]
    pub n: String,
    /// Only m2 = 2 is supported.
    #[arg(long, default_value_t = 2)]
    pub m2: usize,
    /// Seeds to run every cell with, same syntax as --m1.
    #[arg(long, default_value = "1")]
    pub seed: String,
    #[arg(long, default_value_t = DEFAULT_PAIR_BUDGET)]
    pub pair_budget: usize,
    /// JSON file of previously computed cells, updated after the run.
    #[arg(long)]
    pub cache: Option<PathBuf>,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Args, Debug)]
pub struct MultiplicityArgs {
    #[arg(long)]
    pub m2: i64,
    #[arg(long)]
    pub k: i64,
    /// `one` (m2 > 2) or `two` (m2 = 2).
    #[arg(long, value_parser = parse_case)]
    pub case: FamilyCase,
    #[arg(long, default_value_t = DEFAULT_PAIR_BUDGET)]
    pub pair_budget: usize,
    #[command(flatten)]
    pub output: Output,
}

fn parse_case(s: &str) -> Result<FamilyCase, String> {
    s.parse().map_err(|e: kronmle::Error| e.to_string())
}

/// Parses `a-b`, `a..b`, `a..=b`, `a,b,c` or `a`.
pub fn parse_range(s: &str) -> Result<Vec<u64>, String> {
    let num = |t: &str| {
        t.trim()
            .parse::<u64>()
            .map_err(|_| format!("bad number {t:?} in range {s:?}"))
    };
    let bounds = s
        .split_once("..=")
        .or_else(|| s.split_once(".."))
        .or_else(|| s.split_once('-'));
    let values: Vec<u64> = match bounds {
        Some((a, b)) => {
            let (a, b) = (num(a)?, num(b)?);
            if a > b {
                return Err(format!("empty range {s:?}"));
            }
            (a..=b).collect()
        }
        None => s.split(',').map(num).collect::<Result<_, _>>()?,
    };
    if values.is_empty() {
        return Err(format!("empty range {s:?}"));
    }
    Ok(values)
}
