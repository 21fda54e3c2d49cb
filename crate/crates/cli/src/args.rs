use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use hbx_core::{
    AggloConfig, BaseLearner, Gamma, HyperboxError, LearnerConfig, MembershipKind, ModelParams, OnlineFitConfig,
    SimilarityKind,
};

#[derive(Debug, Parser)]
#[command(name = "hbx", version, about = "Train, evaluate and inspect hyperbox classifiers")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(tag = "command", rename_all = "kebab-case")]
pub enum Command {
    /// Train a model on a CSV file and save it as JSON
    Fit(FitArgs),
    /// Write predictions for every row of a CSV file
    Predict(PredictArgs),
    /// Print the accuracy of a model on a labelled CSV file
    Eval(EvalArgs),
    /// k-fold cross-validation
    Cv(CvArgs),
    /// Cross-validated grid search over hyperparameters
    Gridsearch(GridArgs),
    /// Drop unreliable boxes using a validation set
    Prune(PruneArgs),
    /// Remove training rows that repeated cross-validation keeps misclassifying
    Edit(EditArgs),
    /// Agglomerate the boxes of several models into one
    Merge(MergeArgs),
    /// Explain the prediction for one row
    Explain(ExplainArgs),
    /// Export the decision regions of a 2-feature model
    Boundary(BoundaryArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Algo {
    OnlnGfmm,
    IolGfmm,
    Fmnn,
    Agglo2,
    Bagging,
    BaggingModelLevel,
    RandomHyperboxes,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum BaseAlgo {
    OnlnGfmm,
    IolGfmm,
    Fmnn,
    Agglo2,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Similarity {
    LongestGap,
    MidDistance,
}

impl From<Similarity> for SimilarityKind {
    fn from(s: Similarity) -> Self {
        match s {
            Similarity::LongestGap => SimilarityKind::LongestGap,
            Similarity::MidDistance => SimilarityKind::MidDistance,
        }
    }
}

#[derive(Debug, Args, Serialize)]
pub struct DataArgs {
    /// Input CSV file
    #[arg(long)]
    pub data: PathBuf,
    /// Name of the label column
    #[arg(long, default_value = "label")]
    pub label: String,
    /// Skip min-max scaling (data must already lie in [0, 1])
    #[arg(long)]
    pub no_scale: bool,
}

#[derive(Debug, Args, Serialize)]
pub struct AggloArgs {
    /// Smallest similarity at which two boxes may merge
    #[arg(long, default_value_t = 0.0)]
    pub sigma_min: f64,
    #[arg(long, value_enum, default_value_t = Similarity::LongestGap)]
    pub similarity: Similarity,
}

#[derive(Debug, Args, Serialize)]
pub struct LearnerArgs {
    #[arg(long, value_enum, default_value_t = Algo::OnlnGfmm)]
    pub algo: Algo,
    /// Base learner for the ensemble algorithms
    #[arg(long, value_enum, default_value_t = BaseAlgo::OnlnGfmm)]
    pub base: BaseAlgo,
    /// Maximum box size
    #[arg(long, default_value_t = 0.1)]
    pub theta: f64,
    /// Membership steepness: one value, or a comma-separated value per feature
    #[arg(long, default_value = "1")]
    pub gamma: String,
    #[command(flatten)]
    pub agglo: AggloArgs,
    #[arg(long, default_value_t = 1)]
    pub epochs: usize,
    /// Lower bound for theta across epochs
    #[arg(long)]
    pub theta_min: Option<f64>,
    /// Factor applied to theta after every epoch
    #[arg(long)]
    pub theta_decay: Option<f64>,
    /// Shuffle the presentation order of online learners with --seed
    #[arg(long)]
    pub shuffle: bool,
    /// Ensemble size
    #[arg(long, default_value_t = 10)]
    pub members: usize,
    /// Bootstrap size as a fraction of the training rows
    #[arg(long, default_value_t = 0.5)]
    pub sample_rate: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

pub fn parse_gamma(text: &str) -> Result<Gamma, HyperboxError> {
    let values = text
        .split(',')
        .map(|v| v.trim().parse::<f64>())
        .collect::<Result<Vec<_>, _>>()
        .map_err(|_| HyperboxError::param("gamma", format!("`{text}` is not a number list")))?;
    Ok(match values.as_slice() {
        [g] => Gamma::Scalar(*g),
        _ => Gamma::PerFeature(values),
    })
}

impl LearnerArgs {
    fn base_learner(&self, algo: BaseAlgo, gamma: &Gamma) -> BaseLearner {
        let online = |kind: MembershipKind| OnlineFitConfig {
            params: ModelParams { theta: self.theta, gamma: gamma.clone(), membership_kind: kind },
            epochs: self.epochs,
            shuffle_seed: self.shuffle.then_some(self.seed),
            theta_min: self.theta_min,
            theta_decay: self.theta_decay,
        };
        match algo {
            BaseAlgo::OnlnGfmm => BaseLearner::OnlnGfmm(online(MembershipKind::Gfmm)),
            BaseAlgo::IolGfmm => BaseLearner::IolGfmm(online(MembershipKind::Gfmm)),
            BaseAlgo::Fmnn => BaseLearner::Fmnn(online(MembershipKind::Fmnn)),
            BaseAlgo::Agglo2 => BaseLearner::Agglo2(self.agglo.config(self.theta, gamma.clone())),
        }
    }

    pub fn config(&self) -> Result<LearnerConfig, HyperboxError> {
        let gamma = parse_gamma(&self.gamma)?;
        let base = self.base_learner(self.base, &gamma);
        let (n_members, sample_rate, seed) = (self.members, self.sample_rate, self.seed);
        Ok(match self.algo {
            Algo::OnlnGfmm => LearnerConfig::Single(self.base_learner(BaseAlgo::OnlnGfmm, &gamma)),
            Algo::IolGfmm => LearnerConfig::Single(self.base_learner(BaseAlgo::IolGfmm, &gamma)),
            Algo::Fmnn => LearnerConfig::Single(self.base_learner(BaseAlgo::Fmnn, &gamma)),
            Algo::Agglo2 => LearnerConfig::Single(self.base_learner(BaseAlgo::Agglo2, &gamma)),
            Algo::Bagging => LearnerConfig::Bagging { base, n_members, sample_rate, seed },
            Algo::BaggingModelLevel => LearnerConfig::BaggingModelLevel {
                base,
                n_members,
                sample_rate,
                seed,
                merge: self.agglo.config(self.theta, gamma),
            },
            Algo::RandomHyperboxes => LearnerConfig::RandomHyperboxes { base, n_members, sample_rate, seed },
        })
    }
}

impl AggloArgs {
    pub fn config(&self, theta: f64, gamma: Gamma) -> AggloConfig {
        AggloConfig {
            params: ModelParams::gfmm(theta).with_gamma(gamma),
            sigma_min: self.sigma_min,
            similarity: self.similarity.into(),
        }
    }
}

#[derive(Debug, Args, Serialize)]
pub struct FitArgs {
    #[command(flatten)]
    pub data: DataArgs,
    #[command(flatten)]
    pub learner: LearnerArgs,
    /// Where to write the model JSON
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args, Serialize)]
pub struct PredictArgs {
    #[arg(long)]
    pub model: PathBuf,
    #[arg(long)]
    pub data: PathBuf,
    /// Output CSV (stdout when omitted)
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct EvalArgs {
    #[arg(long)]
    pub model: PathBuf,
    #[arg(long)]
    pub data: PathBuf,
}

#[derive(Debug, Args, Serialize)]
pub struct CvArgs {
    #[command(flatten)]
    pub data: DataArgs,
    #[command(flatten)]
    pub learner: LearnerArgs,
    /// Number of folds
    #[arg(long, default_value_t = 5)]
    pub k: usize,
}

#[derive(Debug, Args, Serialize)]
pub struct GridArgs {
    #[command(flatten)]
    pub data: DataArgs,
    #[command(flatten)]
    pub learner: LearnerArgs,
    #[arg(long, default_value_t = 5)]
    pub k: usize,
    /// One axis of the grid, e.g. `theta=0.05,0.1,0.2`; repeat for more axes
    #[arg(long = "grid", required = true)]
    pub grid: Vec<String>,
}

#[derive(Debug, Args, Serialize)]
pub struct PruneArgs {
    #[arg(long)]
    pub model: PathBuf,
    /// Labelled validation CSV
    #[arg(long)]
    pub data: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    /// Boxes whose validation accuracy falls below this are removed
    #[arg(long, default_value_t = 0.5)]
    pub min_acc: f64,
    /// Keep boxes that win no validation row
    #[arg(long)]
    pub keep_unused: bool,
}

#[derive(Debug, Args, Serialize)]
pub struct EditArgs {
    #[command(flatten)]
    pub data: DataArgs,
    #[command(flatten)]
    pub learner: LearnerArgs,
    #[arg(long, default_value_t = 5)]
    pub k: usize,
    /// Number of cross-validation repeats
    #[arg(long, default_value_t = 5)]
    pub repeats: usize,
    /// Fraction of repeats that must misclassify a row before it is dropped
    #[arg(long, default_value_t = 0.5)]
    pub threshold: f64,
    /// Where to write the kept rows
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args, Serialize)]
pub struct MergeArgs {
    /// Model files to merge (repeat the flag)
    #[arg(long = "model", required = true)]
    pub models: Vec<PathBuf>,
    #[arg(long, default_value_t = 0.1)]
    pub theta: f64,
    #[arg(long, default_value = "1")]
    pub gamma: String,
    #[command(flatten)]
    pub agglo: AggloArgs,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args, Serialize)]
pub struct ExplainArgs {
    #[arg(long)]
    pub model: PathBuf,
    #[arg(long)]
    pub data: PathBuf,
    /// Zero-based row of the data file to explain
    #[arg(long, default_value_t = 0)]
    pub row: usize,
    /// Also write a parallel-coordinates CSV here
    #[arg(long)]
    pub parallel: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct BoundaryArgs {
    #[arg(long)]
    pub model: PathBuf,
    /// Cells per axis
    #[arg(long, default_value_t = 50)]
    pub resolution: usize,
    /// Output CSV of grid cells
    #[arg(long)]
    pub out: PathBuf,
    /// Also write the box outlines as JSON here
    #[arg(long)]
    pub boxes: Option<PathBuf>,
}
