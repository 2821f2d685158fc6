use std::path::{Path, PathBuf};
use std::time::Duration;

use clap::{Args, Parser, Subcommand, ValueEnum};
use satexplain_core::scoring::Aggregation;
use satexplain_core::{EnumerationBudget, ExplanationKind, ForestParams, Polarity};
use serde::Serialize;

use crate::error::CliError;

#[derive(Debug, Parser)]
#[command(
    name = "satexplain",
    version,
    about = "Sufficient reasons and counterfactuals for black-box binary classifiers"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Train a surrogate, enumerate explanations and score them.
    Explain(RunArgs),
    /// Write the forest CNF, the instance WCNF and a variable map.
    Encode(RunArgs),
    /// Recompute score tables from an explain report and its neighborhood cache.
    Score(ScoreArgs),
    /// Render a per-feature score as a PGM image.
    Heatmap(HeatmapArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SamplerKind {
    Dataset,
    Perturb,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PolarityArg {
    Neg,
    Pos,
    /// Explain whatever the surrogate predicts.
    Auto,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum KindArg {
    Sr,
    Cf,
}

impl From<KindArg> for ExplanationKind {
    fn from(k: KindArg) -> Self {
        match k {
            KindArg::Sr => ExplanationKind::Sr,
            KindArg::Cf => ExplanationKind::Cf,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum AggrArg {
    Min,
    Max,
    Avg,
}

impl From<AggrArg> for Aggregation {
    fn from(a: AggrArg) -> Self {
        match a {
            AggrArg::Min => Aggregation::Min,
            AggrArg::Max => Aggregation::Max,
            AggrArg::Avg => Aggregation::Avg,
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct RunArgs {
    /// CSV dataset with a header of feature names and 0/1 values.
    #[arg(long)]
    pub data: Option<PathBuf>,
    /// Column of --data holding precomputed black-box labels.
    #[arg(long = "labels-col")]
    pub labels_col: Option<String>,
    /// Shell command acting as the black box (one 0/1 line per input line).
    #[arg(long = "oracle-cmd")]
    pub oracle_cmd: Option<String>,
    /// Instances per oracle invocation.
    #[arg(long = "oracle-batch", default_value_t = 1024)]
    pub oracle_batch: usize,
    /// Row index into --data, or an inline vector such as 1,0,1.
    #[arg(long)]
    pub instance: String,
    /// Hamming radius of the neighborhood (default: number of features).
    #[arg(long)]
    pub radius: Option<usize>,
    /// Neighborhood source (default: dataset when --data is given).
    #[arg(long, value_enum)]
    pub sampler: Option<SamplerKind>,
    /// Perturbed samples to draw.
    #[arg(long, default_value_t = 200)]
    pub samples: usize,
    #[arg(long, default_value_t = 10)]
    pub trees: usize,
    #[arg(long, default_value_t = 24)]
    pub depth: usize,
    #[arg(long = "min-leaf", default_value_t = 2)]
    pub min_leaf: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value = "neg")]
    pub polarity: PolarityArg,
    /// Seconds per enumeration.
    #[arg(long, default_value_t = 600.0)]
    pub timeout: f64,
    #[arg(long = "max-explanations")]
    pub max_explanations: Option<usize>,
    /// Neighbors explained for the neighborhood scores (0 disables them).
    #[arg(long = "neighbor-cap", default_value_t = 50)]
    pub neighbor_cap: usize,
    /// JSON forest to use instead of training one.
    #[arg(long = "forest-file")]
    pub forest_file: Option<PathBuf>,
    /// Report path for explain, output directory for encode.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Neighborhood cache path (default: next to the report).
    #[arg(long)]
    pub cache: Option<PathBuf>,
    /// Also write FI heatmaps with this layout, e.g. 28x28.
    #[arg(long)]
    pub grid: Option<String>,
    #[arg(long, value_enum, default_value = "avg")]
    pub aggregation: AggrArg,
    /// Worker threads (default: available cores).
    #[arg(long)]
    pub jobs: Option<usize>,
}

#[derive(Debug, Clone, Args)]
pub struct ScoreArgs {
    #[arg(long)]
    pub report: PathBuf,
    /// Neighborhood cache (default: the one named in the report's directory).
    #[arg(long)]
    pub cache: Option<PathBuf>,
    /// Directory for scores_sr.csv and scores_cf.csv.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "avg")]
    pub aggregation: AggrArg,
}

#[derive(Debug, Clone, Args)]
pub struct HeatmapArgs {
    #[arg(long)]
    pub report: PathBuf,
    #[arg(long)]
    pub grid: String,
    #[arg(long, value_enum, default_value = "cf")]
    pub kind: KindArg,
    /// One of fi, fg, fr.
    #[arg(long, default_value = "fi")]
    pub score: String,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum InstanceSpec {
    Row(usize),
    Inline(Vec<bool>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum PolarityChoice {
    Fixed(Polarity),
    Auto,
}

/// Validated settings for explain and encode.
#[derive(Debug, Clone, Serialize)]
pub struct RunConfig {
    pub data: Option<PathBuf>,
    pub labels_col: Option<String>,
    pub oracle_cmd: Option<String>,
    pub oracle_batch: usize,
    pub instance: InstanceSpec,
    pub radius: Option<usize>,
    pub sampler: Option<SamplerKind>,
    pub samples: usize,
    pub forest: ForestParams,
    pub seed: u64,
    pub polarity: PolarityChoice,
    pub timeout_secs: f64,
    pub max_explanations: Option<usize>,
    pub neighbor_cap: usize,
    pub forest_file: Option<PathBuf>,
    #[serde(skip)]
    pub out: Option<PathBuf>,
    #[serde(skip)]
    pub cache: Option<PathBuf>,
    pub grid: Option<(usize, usize)>,
    #[serde(skip)]
    pub aggregation: Aggregation,
    #[serde(skip)]
    pub jobs: Option<usize>,
}

pub fn parse_grid(s: &str) -> Result<(usize, usize), CliError> {
    let bad = || CliError::Config(format!("--grid expects WxH, got `{s}`"));
    let (w, h) = s.split_once(['x', 'X']).ok_or_else(bad)?;
    let w: usize = w.trim().parse().map_err(|_| bad())?;
    let h: usize = h.trim().parse().map_err(|_| bad())?;
    if w == 0 || h == 0 {
        return Err(bad());
    }
    Ok((w, h))
}

fn parse_instance(s: &str, has_data: bool) -> Result<InstanceSpec, CliError> {
    let s = s.trim();
    if has_data && !s.contains(',') {
        if let Ok(i) = s.parse::<usize>() {
            return Ok(InstanceSpec::Row(i));
        }
    }
    let values = s
        .split(',')
        .map(|t| match t.trim() {
            "0" => Ok(false),
            "1" => Ok(true),
            other => Err(CliError::Config(format!(
                "--instance: `{other}` is neither a row index nor a 0/1 value"
            ))),
        })
        .collect::<Result<Vec<bool>, _>>()?;
    Ok(InstanceSpec::Inline(values))
}

impl RunConfig {
    pub fn from_args(a: &RunArgs) -> Result<RunConfig, CliError> {
        if a.data.is_none() && a.forest_file.is_none() && a.oracle_cmd.is_none() {
            return Err(CliError::Config(
                "need --data, --forest-file or --oracle-cmd to obtain a classifier".into(),
            ));
        }
        if a.labels_col.is_some() && a.data.is_none() {
            return Err(CliError::Config("--labels-col requires --data".into()));
        }
        if a.sampler == Some(SamplerKind::Dataset) && a.data.is_none() {
            return Err(CliError::Config("--sampler dataset requires --data".into()));
        }
        if a.trees == 0 {
            return Err(CliError::Config("--trees must be at least 1".into()));
        }
        if a.samples == 0 {
            return Err(CliError::Config("--samples must be at least 1".into()));
        }
        if a.oracle_batch == 0 {
            return Err(CliError::Config("--oracle-batch must be at least 1".into()));
        }
        if !(a.timeout.is_finite() && a.timeout > 0.0) {
            return Err(CliError::Config(
                "--timeout must be a positive number of seconds".into(),
            ));
        }
        if a.max_explanations == Some(0) {
            return Err(CliError::Config(
                "--max-explanations must be at least 1".into(),
            ));
        }
        if a.jobs == Some(0) {
            return Err(CliError::Config("--jobs must be at least 1".into()));
        }
        let grid = a.grid.as_deref().map(parse_grid).transpose()?;
        Ok(RunConfig {
            data: a.data.clone(),
            labels_col: a.labels_col.clone(),
            oracle_cmd: a.oracle_cmd.clone(),
            oracle_batch: a.oracle_batch,
            instance: parse_instance(&a.instance, a.data.is_some())?,
            radius: a.radius,
            sampler: a.sampler,
            samples: a.samples,
            forest: ForestParams {
                n_trees: a.trees,
                max_depth: a.depth,
                min_leaf: a.min_leaf,
                bootstrap: true,
            },
            seed: a.seed,
            polarity: match a.polarity {
                PolarityArg::Neg => PolarityChoice::Fixed(Polarity::Negative),
                PolarityArg::Pos => PolarityChoice::Fixed(Polarity::Positive),
                PolarityArg::Auto => PolarityChoice::Auto,
            },
            timeout_secs: a.timeout,
            max_explanations: a.max_explanations,
            neighbor_cap: a.neighbor_cap,
            forest_file: a.forest_file.clone(),
            out: a.out.clone(),
            cache: a.cache.clone(),
            grid,
            aggregation: a.aggregation.into(),
            jobs: a.jobs,
        })
    }

    pub fn budget(&self) -> EnumerationBudget {
        EnumerationBudget {
            max_results: self.max_explanations,
            timeout: Some(Duration::from_secs_f64(self.timeout_secs)),
        }
    }

    pub fn report_path(&self) -> PathBuf {
        self.out
            .clone()
            .unwrap_or_else(|| PathBuf::from("report.json"))
    }

    pub fn cache_path(&self) -> PathBuf {
        self.cache
            .clone()
            .unwrap_or_else(|| sibling(&self.report_path(), "neighborhood.json"))
    }
}

/// `dir/stem.suffix` next to `path`.
pub fn sibling(path: &Path, suffix: &str) -> PathBuf {
    let stem = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "report".into());
    path.with_file_name(format!("{stem}.{suffix}"))
}
