//! One configuration type for every trainer, and one model type for every
//! trained artifact, so the evaluation tools can treat them uniformly.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::agglo::{fit_agglo2, AggloConfig};
use crate::ensemble::{fit_bagging, fit_random_hyperboxes, merge_models, EnsembleModel};
use crate::error::{HyperboxError, Result};
use crate::harness::scaler::ScalerState;
use crate::hyperbox::{ClassLabel, Dataset, IntervalSample};
use crate::io::DatasetSchema;
use crate::membership::Gamma;
use crate::model::{ModelParams, TrainedModel};
use crate::online::{fit_fmnn, fit_iol_gfmm, fit_onln_gfmm, OnlineFitConfig};

/// A single-model trainer and its settings.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "algorithm", rename_all = "kebab-case")]
pub enum BaseLearner {
    OnlnGfmm(OnlineFitConfig),
    IolGfmm(OnlineFitConfig),
    Fmnn(OnlineFitConfig),
    Agglo2(AggloConfig),
}

impl BaseLearner {
    pub fn fit(&self, data: &Dataset) -> Result<TrainedModel> {
        match self {
            BaseLearner::OnlnGfmm(cfg) => fit_onln_gfmm(data, cfg),
            BaseLearner::IolGfmm(cfg) => fit_iol_gfmm(data, cfg),
            BaseLearner::Fmnn(cfg) => fit_fmnn(data, cfg),
            BaseLearner::Agglo2(cfg) => fit_agglo2(data, cfg),
        }
    }

    pub fn validate(&self, n_features: usize) -> Result<()> {
        match self {
            BaseLearner::OnlnGfmm(c) | BaseLearner::IolGfmm(c) | BaseLearner::Fmnn(c) => c.validate(n_features),
            BaseLearner::Agglo2(c) => c.validate(n_features),
        }
    }

    pub fn params(&self) -> &ModelParams {
        match self {
            BaseLearner::OnlnGfmm(c) | BaseLearner::IolGfmm(c) | BaseLearner::Fmnn(c) => &c.params,
            BaseLearner::Agglo2(c) => &c.params,
        }
    }

    pub fn params_mut(&mut self) -> &mut ModelParams {
        match self {
            BaseLearner::OnlnGfmm(c) | BaseLearner::IolGfmm(c) | BaseLearner::Fmnn(c) => &mut c.params,
            BaseLearner::Agglo2(c) => &mut c.params,
        }
    }

    /// Same learner restricted to a feature subset (per-feature gammas follow).
    pub fn project(&self, features: &[usize]) -> BaseLearner {
        let mut out = self.clone();
        let projected = out.params().project(features);
        *out.params_mut() = projected;
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum LearnerConfig {
    Single(BaseLearner),
    Bagging { base: BaseLearner, n_members: usize, sample_rate: f64, seed: u64 },
    BaggingModelLevel { base: BaseLearner, n_members: usize, sample_rate: f64, seed: u64, merge: AggloConfig },
    RandomHyperboxes { base: BaseLearner, n_members: usize, sample_rate: f64, seed: u64 },
}

impl LearnerConfig {
    pub fn fit(&self, data: &Dataset) -> Result<Model> {
        Ok(match self {
            LearnerConfig::Single(base) => Model::Single(base.fit(data)?),
            LearnerConfig::Bagging { base, n_members, sample_rate, seed } => {
                Model::Ensemble(fit_bagging(data, base, *n_members, *sample_rate, *seed)?)
            }
            LearnerConfig::BaggingModelLevel { base, n_members, sample_rate, seed, merge } => {
                let e = fit_bagging(data, base, *n_members, *sample_rate, *seed)?;
                Model::Single(merge_models(&e.members, merge)?)
            }
            LearnerConfig::RandomHyperboxes { base, n_members, sample_rate, seed } => {
                Model::Ensemble(fit_random_hyperboxes(data, base, *n_members, *sample_rate, *seed)?)
            }
        })
    }

    /// Checks every hyperparameter against a dataset with `n_features` columns.
    pub fn validate(&self, n_features: usize) -> Result<()> {
        self.base().validate(n_features)?;
        match self {
            LearnerConfig::Single(_) => Ok(()),
            LearnerConfig::Bagging { n_members, sample_rate, .. }
            | LearnerConfig::BaggingModelLevel { n_members, sample_rate, .. }
            | LearnerConfig::RandomHyperboxes { n_members, sample_rate, .. } => {
                if *n_members < 1 {
                    return Err(HyperboxError::param("members", "must be at least 1"));
                }
                if !(*sample_rate > 0.0 && *sample_rate <= 1.0) {
                    return Err(HyperboxError::param("sample_rate", format!("{sample_rate} is outside (0, 1]")));
                }
                if let LearnerConfig::BaggingModelLevel { merge, .. } = self {
                    merge.validate(n_features)?;
                }
                if matches!(self, LearnerConfig::RandomHyperboxes { .. }) && n_features < 2 {
                    return Err(HyperboxError::InvalidInput("random hyperboxes need at least two features".into()));
                }
                Ok(())
            }
        }
    }

    pub fn base(&self) -> &BaseLearner {
        match self {
            LearnerConfig::Single(base)
            | LearnerConfig::Bagging { base, .. }
            | LearnerConfig::BaggingModelLevel { base, .. }
            | LearnerConfig::RandomHyperboxes { base, .. } => base,
        }
    }

    fn base_mut(&mut self) -> &mut BaseLearner {
        match self {
            LearnerConfig::Single(base)
            | LearnerConfig::Bagging { base, .. }
            | LearnerConfig::BaggingModelLevel { base, .. }
            | LearnerConfig::RandomHyperboxes { base, .. } => base,
        }
    }

    pub fn theta(&self) -> f64 {
        self.base().params().theta
    }

    /// Overrides one hyperparameter, validating its range.
    pub fn set(&mut self, param: GridParam, value: f64) -> Result<()> {
        match param {
            GridParam::Theta => {
                if !(value > 0.0 && value <= 1.0) {
                    return Err(HyperboxError::param("theta", format!("{value} is outside (0, 1]")));
                }
                self.base_mut().params_mut().theta = value;
                if let LearnerConfig::BaggingModelLevel { merge, .. } = self {
                    merge.params.theta = value;
                }
            }
            GridParam::Gamma => {
                if !(value.is_finite() && value > 0.0) {
                    return Err(HyperboxError::param("gamma", format!("{value} is not positive")));
                }
                self.base_mut().params_mut().gamma = Gamma::Scalar(value);
            }
            GridParam::SigmaMin => {
                if !(0.0..=1.0).contains(&value) {
                    return Err(HyperboxError::param("sigma_min", format!("{value} is outside [0, 1]")));
                }
                match self {
                    LearnerConfig::BaggingModelLevel { merge, .. } => merge.sigma_min = value,
                    _ => match self.base_mut() {
                        BaseLearner::Agglo2(c) => c.sigma_min = value,
                        _ => return Err(HyperboxError::param("sigma_min", "only applies to agglomerative learners")),
                    },
                }
            }
            GridParam::SampleRate | GridParam::Members => match self {
                LearnerConfig::Single(_) => {
                    return Err(HyperboxError::param(param.name(), "only applies to ensembles"))
                }
                LearnerConfig::Bagging { n_members, sample_rate, .. }
                | LearnerConfig::BaggingModelLevel { n_members, sample_rate, .. }
                | LearnerConfig::RandomHyperboxes { n_members, sample_rate, .. } => {
                    if param == GridParam::SampleRate {
                        if !(value > 0.0 && value <= 1.0) {
                            return Err(HyperboxError::param("sample_rate", format!("{value} is outside (0, 1]")));
                        }
                        *sample_rate = value;
                    } else {
                        if !(value >= 1.0 && value.fract() == 0.0) {
                            return Err(HyperboxError::param("members", format!("{value} is not a positive integer")));
                        }
                        *n_members = value as usize;
                    }
                }
            },
        }
        Ok(())
    }
}

/// Hyperparameters a grid search may vary.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum GridParam {
    Theta,
    Gamma,
    SigmaMin,
    SampleRate,
    Members,
}

impl GridParam {
    pub fn name(self) -> &'static str {
        match self {
            GridParam::Theta => "theta",
            GridParam::Gamma => "gamma",
            GridParam::SigmaMin => "sigma_min",
            GridParam::SampleRate => "sample_rate",
            GridParam::Members => "members",
        }
    }
}

impl fmt::Display for GridParam {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for GridParam {
    type Err = HyperboxError;

    fn from_str(s: &str) -> Result<Self> {
        match s.replace('-', "_").as_str() {
            "theta" => Ok(GridParam::Theta),
            "gamma" => Ok(GridParam::Gamma),
            "sigma_min" => Ok(GridParam::SigmaMin),
            "sample_rate" => Ok(GridParam::SampleRate),
            "members" | "n_members" => Ok(GridParam::Members),
            other => Err(HyperboxError::InvalidInput(format!("unknown hyperparameter `{other}`"))),
        }
    }
}

/// Any trained classifier.
#[derive(Debug, Clone, PartialEq)]
pub enum Model {
    Single(TrainedModel),
    Ensemble(EnsembleModel),
}

impl Model {
    /// Predicted label and its (summed, for ensembles) winning membership.
    pub fn predict(&self, x: &IntervalSample) -> Result<(ClassLabel, f64)> {
        match self {
            Model::Single(m) => m.predict(x).map(|p| (p.label, p.membership)),
            Model::Ensemble(e) => e.predict(x).map(|p| (p.label, p.membership_sum)),
        }
    }

    pub fn predict_labels(&self, samples: &[IntervalSample]) -> Result<Vec<ClassLabel>> {
        samples.iter().map(|x| self.predict(x).map(|p| p.0)).collect()
    }

    pub fn box_count(&self) -> usize {
        match self {
            Model::Single(m) => m.boxes.len(),
            Model::Ensemble(e) => e.box_count(),
        }
    }

    pub fn n_features(&self) -> usize {
        match self {
            Model::Single(m) => m.n_features,
            Model::Ensemble(e) => e.n_features,
        }
    }

    pub fn scaler(&self) -> Option<&ScalerState> {
        match self {
            Model::Single(m) => m.scaler.as_ref(),
            Model::Ensemble(e) => e.scaler.as_ref(),
        }
    }

    pub fn schema(&self) -> Option<&DatasetSchema> {
        match self {
            Model::Single(m) => m.schema.as_ref(),
            Model::Ensemble(e) => e.schema.as_ref(),
        }
    }

    pub fn attach(&mut self, scaler: Option<ScalerState>, schema: Option<DatasetSchema>) {
        match self {
            Model::Single(m) => {
                m.scaler = scaler;
                m.schema = schema;
            }
            Model::Ensemble(e) => {
                e.scaler = scaler;
                e.schema = schema;
            }
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            Model::Single(m) => m.validate(),
            Model::Ensemble(e) => e.validate(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn set_validates() {
        let mut cfg = LearnerConfig::Single(BaseLearner::OnlnGfmm(OnlineFitConfig::gfmm(0.2)));
        cfg.set(GridParam::Theta, 0.4).unwrap();
        assert_eq!(cfg.theta(), 0.4);
        assert!(cfg.set(GridParam::Theta, 1.2).is_err());
        assert!(cfg.set(GridParam::Theta, 0.0).is_err());
        assert!(cfg.set(GridParam::SigmaMin, 0.5).is_err());
        assert!(cfg.set(GridParam::Members, 3.0).is_err());
        cfg.set(GridParam::Gamma, 2.0).unwrap();
        assert!(cfg.validate(3).is_ok());
        let bag = LearnerConfig::Bagging { base: cfg.base().clone(), n_members: 0, sample_rate: 0.5, seed: 1 };
        assert!(matches!(bag.validate(3), Err(HyperboxError::InvalidParameter { .. })));
        assert_eq!(cfg.base().params().gamma, Gamma::Scalar(2.0));
    }

    #[test]
    fn parses_names() {
        assert_eq!("sigma-min".parse::<GridParam>().unwrap(), GridParam::SigmaMin);
        assert_eq!("theta".parse::<GridParam>().unwrap(), GridParam::Theta);
        assert!("beta".parse::<GridParam>().is_err());
    }
}
