//! k-fold cross-validation.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::Result;
use crate::harness::metrics::accuracy;
use crate::harness::split::kfold_indices;
use crate::hyperbox::{ClassLabel, Dataset};
use crate::learner::LearnerConfig;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CvReport {
    pub fold_scores: Vec<f64>,
    pub mean: f64,
    /// Population standard deviation of the fold scores.
    pub std: f64,
    pub box_counts: Vec<usize>,
}

impl CvReport {
    fn from_folds(folds: Vec<(f64, usize)>) -> CvReport {
        let (fold_scores, box_counts): (Vec<f64>, Vec<usize>) = folds.into_iter().unzip();
        let k = fold_scores.len() as f64;
        let mean = fold_scores.iter().sum::<f64>() / k;
        let var = fold_scores.iter().map(|s| (s - mean).powi(2)).sum::<f64>() / k;
        CvReport { fold_scores, mean, std: var.sqrt(), box_counts }
    }
}

fn complement(n: usize, fold: &[usize]) -> Vec<usize> {
    let mut held = vec![false; n];
    for &i in fold {
        held[i] = true;
    }
    (0..n).filter(|&i| !held[i]).collect()
}

/// Accuracy of `config` on each held-out fold after a seeded shuffle.
pub fn cross_validate(data: &Dataset, config: &LearnerConfig, k: usize, seed: u64) -> Result<CvReport> {
    let folds = kfold_indices(data.len(), k, seed)?;
    let results = folds
        .par_iter()
        .map(|fold| {
            let model = config.fit(&data.subset(&complement(data.len(), fold)))?;
            let test = data.subset(fold);
            let predicted = model.predict_labels(&test.samples)?;
            Ok((accuracy(&test.labels, &predicted)?, model.box_count()))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(CvReport::from_folds(results))
}

/// Held-out prediction for every sample, one k-fold run.
pub(crate) fn held_out_predictions(
    data: &Dataset,
    config: &LearnerConfig,
    k: usize,
    seed: u64,
) -> Result<Vec<ClassLabel>> {
    let folds = kfold_indices(data.len(), k, seed)?;
    let per_fold = folds
        .par_iter()
        .map(|fold| {
            let model = config.fit(&data.subset(&complement(data.len(), fold)))?;
            fold.iter().map(|&i| model.predict(&data.samples[i]).map(|p| (i, p.0))).collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    let mut out = vec![ClassLabel::Unlabeled; data.len()];
    for (i, label) in per_fold.into_iter().flatten() {
        out[i] = label;
    }
    Ok(out)
}
