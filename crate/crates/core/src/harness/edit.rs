//! Data editing by repeated cross-validation.

use crate::error::{HyperboxError, Result};
use crate::harness::cv::held_out_predictions;
use crate::hyperbox::Dataset;
use crate::learner::LearnerConfig;

#[derive(Debug, Clone, PartialEq)]
pub struct EditResult {
    pub data: Dataset,
    pub kept: Vec<usize>,
    pub removed: Vec<usize>,
    /// Per original sample, how many repeats misclassified it when held out.
    pub misclassified: Vec<usize>,
}

/// Runs `repeats` k-fold cross-validations with seeds `seed, seed + 1, ...`
/// and drops samples misclassified in at least `removal_threshold` of them.
/// A sample that was never misclassified is always kept.
pub fn edit_samples(
    data: &Dataset,
    config: &LearnerConfig,
    k: usize,
    repeats: usize,
    removal_threshold: f64,
    seed: u64,
) -> Result<EditResult> {
    if repeats < 1 {
        return Err(HyperboxError::param("repeats", "must be at least 1"));
    }
    if !(0.0..=1.0).contains(&removal_threshold) {
        return Err(HyperboxError::param("removal_threshold", format!("{removal_threshold} is outside [0, 1]")));
    }
    let mut misclassified = vec![0usize; data.len()];
    for r in 0..repeats {
        let predicted = held_out_predictions(data, config, k, seed.wrapping_add(r as u64))?;
        for (i, p) in predicted.into_iter().enumerate() {
            if p != data.labels[i] {
                misclassified[i] += 1;
            }
        }
    }
    let (removed, kept): (Vec<usize>, Vec<usize>) = (0..data.len())
        .partition(|&i| misclassified[i] > 0 && misclassified[i] as f64 / repeats as f64 >= removal_threshold);
    Ok(EditResult { data: data.subset(&kept), kept, removed, misclassified })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::learner::BaseLearner;
    use crate::online::OnlineFitConfig;

    fn onln() -> LearnerConfig {
        LearnerConfig::Single(BaseLearner::OnlnGfmm(OnlineFitConfig::gfmm(0.2)))
    }

    fn clusters() -> (Vec<Vec<f64>>, Vec<u32>) {
        let mut rows = Vec::new();
        let mut labels = Vec::new();
        for i in 0..10 {
            let t = i as f64 / 100.0;
            rows.push(vec![0.1 + t, 0.1 + t * 0.5]);
            labels.push(1);
            rows.push(vec![0.8 + t, 0.8 + t * 0.5]);
            labels.push(2);
        }
        (rows, labels)
    }

    #[test]
    fn clean_data_is_kept() {
        let (rows, labels) = clusters();
        let d = Dataset::from_points(&rows, &labels).unwrap();
        let r = edit_samples(&d, &onln(), 5, 3, 0.5, 1).unwrap();
        assert!(r.removed.is_empty());
        assert_eq!(r.data, d);
    }

    #[test]
    fn mislabeled_outlier_is_removed() {
        let (mut rows, mut labels) = clusters();
        rows.push(vec![0.85, 0.82]);
        labels.push(1);
        let d = Dataset::from_points(&rows, &labels).unwrap();
        let r = edit_samples(&d, &onln(), 5, 4, 0.5, 1).unwrap();
        assert_eq!(r.removed, vec![20]);
        assert_eq!(r.misclassified[20], 4);
    }

    #[test]
    fn argument_checks() {
        let (rows, labels) = clusters();
        let d = Dataset::from_points(&rows, &labels).unwrap();
        assert!(edit_samples(&d, &onln(), 5, 1, 1.5, 1).is_err());
        assert!(edit_samples(&d, &onln(), 5, 0, 0.5, 1).is_err());
    }
}
