//! Agglomerative batch learning (AGGLO-2).
//!
//! Every sample starts as its own box. The most similar compatible pair is
//! merged into its hull as long as the hull respects `theta` and does not
//! overlap a box of another class. Pairs that fail are skipped until the
//! next successful merge changes the geometry.

use serde::{Deserialize, Serialize};

use crate::error::{HyperboxError, Result};
use crate::geometry::overlaps_conflicting;
use crate::hyperbox::{ClassLabel, Dataset, Hyperbox};
use crate::membership::{gfmm_unchecked, ramp, Gamma, MembershipKind};
use crate::model::{Algorithm, ModelParams, TrainedModel};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SimilarityKind {
    /// Ramp of the largest gap between the two boxes.
    #[default]
    LongestGap,
    /// Membership of each box's midpoint in the other box.
    MidDistance,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AggloConfig {
    pub params: ModelParams,
    pub sigma_min: f64,
    pub similarity: SimilarityKind,
}

impl AggloConfig {
    pub fn new(theta: f64) -> Self {
        AggloConfig { params: ModelParams::gfmm(theta), sigma_min: 0.0, similarity: SimilarityKind::LongestGap }
    }

    pub fn validate(&self, n_features: usize) -> Result<()> {
        self.params.validate(n_features)?;
        if !(0.0..=1.0).contains(&self.sigma_min) {
            return Err(HyperboxError::param("sigma_min", format!("{} is outside [0, 1]", self.sigma_min)));
        }
        Ok(())
    }
}

/// Similarity of two fully set boxes, symmetric in its arguments.
pub fn box_similarity(a: &Hyperbox, b: &Hyperbox, gamma: &Gamma, kind: SimilarityKind) -> Result<f64> {
    if a.dims() != b.dims() {
        return Err(HyperboxError::DimensionMismatch { expected: a.dims(), actual: b.dims() });
    }
    if (0..a.dims()).any(|j| !a.is_set(j) || !b.is_set(j)) {
        return Err(HyperboxError::InvalidInput("similarity needs fully set boxes".into()));
    }
    gamma.validate(a.dims())?;
    Ok(similarity_unchecked(a, b, gamma, kind))
}

fn similarity_unchecked(a: &Hyperbox, b: &Hyperbox, gamma: &Gamma, kind: SimilarityKind) -> f64 {
    match kind {
        SimilarityKind::LongestGap => (0..a.dims())
            .map(|j| {
                let g = gamma.get(j);
                let right = 1.0 - ramp(b.min[j] - a.max[j], g);
                let left = 1.0 - ramp(a.min[j] - b.max[j], g);
                right.min(left)
            })
            .fold(1.0, f64::min),
        SimilarityKind::MidDistance => {
            let mid = |h: &Hyperbox| {
                let centre = (0..h.dims()).map(|j| 0.5 * (h.min[j] + h.max[j])).collect();
                crate::hyperbox::IntervalSample::point(centre).expect("finite midpoint")
            };
            gfmm_unchecked(a, &mid(b), gamma).min(gfmm_unchecked(b, &mid(a), gamma))
        }
    }
}

pub fn fit_agglo2(data: &Dataset, cfg: &AggloConfig) -> Result<TrainedModel> {
    if data.is_empty() {
        return Err(HyperboxError::EmptyData);
    }
    let n = data.n_features();
    if data.samples.iter().any(|x| x.len() != n) {
        return Err(HyperboxError::InvalidInput("samples differ in dimensionality".into()));
    }
    data.check_normalized()?;
    if data.samples.iter().any(|x| x.has_missing()) {
        return Err(HyperboxError::InvalidInput("agglomerative learning needs fully observed samples".into()));
    }
    let boxes = data.iter().enumerate().map(|(i, (x, label))| Hyperbox::from_sample(i as u64, x, label)).collect();
    agglomerate(boxes, n, cfg)
}

/// Runs the merge loop over an initial set of boxes.
pub(crate) fn agglomerate(mut boxes: Vec<Hyperbox>, n: usize, cfg: &AggloConfig) -> Result<TrainedModel> {
    cfg.validate(n)?;
    if boxes.iter().any(|b| b.dims() != n || (0..n).any(|j| !b.is_set(j))) {
        return Err(HyperboxError::InvalidInput("agglomeration needs fully set boxes of equal size".into()));
    }
    let gamma = &cfg.params.gamma;
    let theta = cfg.params.theta;

    loop {
        let mut pairs: Vec<(f64, usize, usize)> = Vec::new();
        for i in 0..boxes.len() {
            for k in i + 1..boxes.len() {
                if !boxes[i].label.compatible(boxes[k].label) {
                    continue;
                }
                let s = similarity_unchecked(&boxes[i], &boxes[k], gamma, cfg.similarity);
                if s >= cfg.sigma_min {
                    pairs.push((s, i, k));
                }
            }
        }
        // boxes stay sorted by id, so index order is id order
        pairs.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));

        let merge = pairs.into_iter().find_map(|(_, i, k)| {
            let hull = boxes[i].hull(&boxes[k]);
            let fits = (0..n).all(|j| hull.max[j] - hull.min[j] <= theta);
            (fits && !overlaps_conflicting(&boxes, &hull, &[i, k])).then_some((i, k, hull))
        });
        match merge {
            Some((i, k, hull)) => {
                boxes[i] = hull;
                boxes.remove(k);
            }
            None => break,
        }
    }

    let mut params = cfg.params.clone();
    params.membership_kind = MembershipKind::Gfmm;
    let mut model = TrainedModel::new(Algorithm::Agglo2, params, n);
    model.classes = boxes
        .iter()
        .filter_map(|b| match b.label {
            ClassLabel::Class(c) => Some(c),
            ClassLabel::Unlabeled => None,
        })
        .collect();
    model.boxes = boxes;
    model.renumber();
    Ok(model)
}
