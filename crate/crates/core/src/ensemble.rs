//! Bagging, random-subspace ensembles and model-level merging.

use std::collections::BTreeMap;

use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::agglo::{agglomerate, AggloConfig};
use crate::error::{HyperboxError, Result};
use crate::harness::scaler::ScalerState;
use crate::hyperbox::{ClassLabel, Dataset, IntervalSample};
use crate::io::DatasetSchema;
use crate::learner::BaseLearner;
use crate::membership::MembershipKind;
use crate::model::TrainedModel;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Aggregation {
    #[default]
    MajorityVote,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleModel {
    pub members: Vec<TrainedModel>,
    /// Sorted feature indices each member was trained on.
    pub feature_subsets: Vec<Vec<usize>>,
    pub aggregation: Aggregation,
    pub seed: u64,
    pub n_features: usize,
    pub scaler: Option<ScalerState>,
    pub schema: Option<DatasetSchema>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EnsemblePrediction {
    pub label: ClassLabel,
    pub votes: usize,
    pub membership_sum: f64,
}

/// Majority vote over `(label, winning membership)` pairs.
///
/// Ties go to the larger summed membership, then the lower class id.
/// Unlabeled votes only count when no member names a class.
pub fn majority_vote(votes: &[(ClassLabel, f64)]) -> Option<EnsemblePrediction> {
    let any_labeled = votes.iter().any(|(l, _)| l.is_labeled());
    let mut tally: BTreeMap<ClassLabel, (usize, f64)> = BTreeMap::new();
    for &(label, m) in votes {
        if any_labeled && !label.is_labeled() {
            continue;
        }
        let entry = tally.entry(label).or_insert((0, 0.0));
        entry.0 += 1;
        entry.1 += m;
    }
    let mut best: Option<EnsemblePrediction> = None;
    for (label, (count, sum)) in tally {
        let better = best.as_ref().is_none_or(|b| count > b.votes || (count == b.votes && sum > b.membership_sum));
        if better {
            best = Some(EnsemblePrediction { label, votes: count, membership_sum: sum });
        }
    }
    best
}

impl EnsembleModel {
    pub fn validate(&self) -> Result<()> {
        if self.members.is_empty() {
            return Err(HyperboxError::Invariant("ensemble has no members".into()));
        }
        if self.members.len() != self.feature_subsets.len() {
            return Err(HyperboxError::Invariant("one feature subset per member is required".into()));
        }
        for (m, subset) in self.members.iter().zip(&self.feature_subsets) {
            if subset.is_empty() {
                return Err(HyperboxError::Invariant("empty feature subset".into()));
            }
            if subset.windows(2).any(|w| w[0] >= w[1]) {
                return Err(HyperboxError::Invariant("feature subsets must be sorted and unique".into()));
            }
            if subset.iter().any(|&j| j >= self.n_features) {
                return Err(HyperboxError::Invariant("feature subset index out of range".into()));
            }
            if m.n_features != subset.len() {
                return Err(HyperboxError::Invariant("member dimensionality differs from its subset".into()));
            }
            m.validate()?;
        }
        if let Some(scaler) = &self.scaler {
            scaler.validate(self.n_features)?;
        }
        Ok(())
    }

    pub fn predict(&self, x: &IntervalSample) -> Result<EnsemblePrediction> {
        if self.members.is_empty() {
            return Err(HyperboxError::EmptyModel);
        }
        if x.len() != self.n_features {
            return Err(HyperboxError::DimensionMismatch { expected: self.n_features, actual: x.len() });
        }
        let votes = self
            .members
            .iter()
            .zip(&self.feature_subsets)
            .map(|(m, subset)| m.predict(&x.project(subset)).map(|p| (p.label, p.membership)))
            .collect::<Result<Vec<_>>>()?;
        Ok(majority_vote(&votes).expect("at least one vote"))
    }

    pub fn box_count(&self) -> usize {
        self.members.iter().map(|m| m.boxes.len()).sum()
    }
}

fn check_ensemble_args(data: &Dataset, n_members: usize, sample_rate: f64) -> Result<()> {
    if n_members < 1 {
        return Err(HyperboxError::param("n_members", "must be at least 1"));
    }
    if !(sample_rate > 0.0 && sample_rate <= 1.0) {
        return Err(HyperboxError::param("sample_rate", format!("{sample_rate} is outside (0, 1]")));
    }
    if data.is_empty() {
        return Err(HyperboxError::EmptyData);
    }
    Ok(())
}

fn bootstrap(rng: &mut ChaCha8Rng, n: usize, sample_rate: f64) -> Vec<usize> {
    let size = ((sample_rate * n as f64).round() as usize).max(1);
    (0..size).map(|_| rng.gen_range(0..n)).collect()
}

fn member_rng(seed: u64, member: usize) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed.wrapping_add(member as u64))
}

/// Decision-level bagging: every member sees a bootstrap resample of all features.
pub fn fit_bagging(
    data: &Dataset,
    base: &BaseLearner,
    n_members: usize,
    sample_rate: f64,
    seed: u64,
) -> Result<EnsembleModel> {
    check_ensemble_args(data, n_members, sample_rate)?;
    let n = data.n_features();
    let members = (0..n_members)
        .into_par_iter()
        .map(|i| {
            let mut rng = member_rng(seed, i);
            let rows = bootstrap(&mut rng, data.len(), sample_rate);
            base.fit(&data.subset(&rows))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(EnsembleModel {
        members,
        feature_subsets: vec![(0..n).collect(); n_members],
        aggregation: Aggregation::MajorityVote,
        seed,
        n_features: n,
        scaler: None,
        schema: None,
    })
}

/// Random Hyperboxes: each member trains on a random feature subset of size
/// drawn uniformly from `[max(1, floor(sqrt(n))), n - 1]` and a bootstrap sample.
pub fn fit_random_hyperboxes(
    data: &Dataset,
    base: &BaseLearner,
    n_members: usize,
    sample_rate: f64,
    seed: u64,
) -> Result<EnsembleModel> {
    check_ensemble_args(data, n_members, sample_rate)?;
    let n = data.n_features();
    if n < 2 {
        return Err(HyperboxError::InvalidInput("random hyperboxes need at least two features".into()));
    }
    let low = ((n as f64).sqrt().floor() as usize).max(1);
    let high = n - 1;
    let fitted = (0..n_members)
        .into_par_iter()
        .map(|i| {
            let mut rng = member_rng(seed, i);
            let size = rng.gen_range(low..=high);
            let mut subset = index::sample(&mut rng, n, size).into_vec();
            subset.sort_unstable();
            let rows = bootstrap(&mut rng, data.len(), sample_rate);
            let projected = data.subset(&rows).project(&subset);
            base.project(&subset).fit(&projected).map(|m| (m, subset))
        })
        .collect::<Result<Vec<_>>>()?;
    let (members, feature_subsets) = fitted.into_iter().unzip();
    Ok(EnsembleModel {
        members,
        feature_subsets,
        aggregation: Aggregation::MajorityVote,
        seed,
        n_features: n,
        scaler: None,
        schema: None,
    })
}

/// Pools every member's boxes and agglomerates them into one model.
pub fn merge_models(members: &[TrainedModel], cfg: &AggloConfig) -> Result<TrainedModel> {
    let first = members.first().ok_or(HyperboxError::EmptyData)?;
    let n = first.n_features;
    if let Some(bad) = members.iter().find(|m| m.n_features != n) {
        return Err(HyperboxError::DimensionMismatch { expected: n, actual: bad.n_features });
    }
    if members.iter().any(|m| m.params.membership_kind != MembershipKind::Gfmm) {
        return Err(HyperboxError::InvalidInput("only GFMM models can be merged".into()));
    }
    let pooled = members
        .iter()
        .flat_map(|m| m.boxes.iter().cloned())
        .enumerate()
        .map(|(i, mut b)| {
            b.id = i as u64;
            b
        })
        .collect();
    let mut merged = agglomerate(pooled, n, cfg)?;
    for m in members {
        merged.classes.extend(m.classes.iter().copied());
    }
    Ok(merged)
}
