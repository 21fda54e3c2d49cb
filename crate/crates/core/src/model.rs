//! Trained single-model classifiers and their prediction rule.

use std::cmp::Ordering;
use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{HyperboxError, Result};
use crate::geometry::overlap_unchecked;
use crate::harness::scaler::ScalerState;
use crate::hyperbox::{ClassLabel, Hyperbox, IntervalSample};
use crate::io::DatasetSchema;
use crate::membership::{fmnn_unchecked, gfmm_unchecked, Gamma, MembershipKind};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    /// Maximum hyperbox edge (GFMM) or mean edge budget (FMNN).
    pub theta: f64,
    #[serde(default)]
    pub gamma: Gamma,
    #[serde(rename = "membership", default)]
    pub membership_kind: MembershipKind,
}

impl ModelParams {
    pub fn gfmm(theta: f64) -> Self {
        ModelParams { theta, gamma: Gamma::default(), membership_kind: MembershipKind::Gfmm }
    }

    pub fn fmnn(theta: f64) -> Self {
        ModelParams { theta, gamma: Gamma::default(), membership_kind: MembershipKind::Fmnn }
    }

    pub fn with_gamma(mut self, gamma: Gamma) -> Self {
        self.gamma = gamma;
        self
    }

    pub fn validate(&self, n_features: usize) -> Result<()> {
        if !(self.theta > 0.0 && self.theta <= 1.0) {
            return Err(HyperboxError::param("theta", format!("{} is outside (0, 1]", self.theta)));
        }
        self.gamma.validate(n_features)
    }

    pub fn project(&self, features: &[usize]) -> ModelParams {
        ModelParams { theta: self.theta, gamma: self.gamma.project(features), membership_kind: self.membership_kind }
    }
}

/// Which training rule produced a model; `partial_fit` continues with it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Algorithm {
    OnlnGfmm,
    IolGfmm,
    Fmnn,
    Agglo2,
}

impl Algorithm {
    pub fn name(self) -> &'static str {
        match self {
            Algorithm::OnlnGfmm => "onln-gfmm",
            Algorithm::IolGfmm => "iol-gfmm",
            Algorithm::Fmnn => "fmnn",
            Algorithm::Agglo2 => "agglo2",
        }
    }
}

/// Winning box for a sample.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Prediction {
    pub label: ClassLabel,
    pub membership: f64,
    pub box_id: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainedModel {
    pub algorithm: Algorithm,
    pub params: ModelParams,
    pub n_features: usize,
    pub classes: BTreeSet<u32>,
    pub boxes: Vec<Hyperbox>,
    pub scaler: Option<ScalerState>,
    pub schema: Option<DatasetSchema>,
}

/// Ordering used to pick a winner: higher membership, then more samples,
/// then smaller volume, then lower id. `Less` means "wins".
pub(crate) fn winner_order(a: (f64, &Hyperbox), b: (f64, &Hyperbox)) -> Ordering {
    b.0.total_cmp(&a.0)
        .then_with(|| b.1.sample_count.cmp(&a.1.sample_count))
        .then_with(|| a.1.volume().total_cmp(&b.1.volume()))
        .then_with(|| a.1.id.cmp(&b.1.id))
}

impl TrainedModel {
    pub fn new(algorithm: Algorithm, params: ModelParams, n_features: usize) -> Self {
        TrainedModel {
            algorithm,
            params,
            n_features,
            classes: BTreeSet::new(),
            boxes: Vec::new(),
            scaler: None,
            schema: None,
        }
    }

    pub fn next_box_id(&self) -> u64 {
        self.boxes.iter().map(|b| b.id + 1).max().unwrap_or(0)
    }

    pub fn check_sample(&self, x: &IntervalSample) -> Result<()> {
        if x.len() != self.n_features {
            return Err(HyperboxError::DimensionMismatch { expected: self.n_features, actual: x.len() });
        }
        if self.params.membership_kind == MembershipKind::Fmnn && (!x.is_point() || x.has_missing()) {
            return Err(HyperboxError::InvalidInput("FMNN models only classify fully observed point samples".into()));
        }
        Ok(())
    }

    #[inline]
    pub(crate) fn membership_unchecked(&self, b: &Hyperbox, x: &IntervalSample) -> f64 {
        match self.params.membership_kind {
            MembershipKind::Gfmm => gfmm_unchecked(b, x, &self.params.gamma),
            MembershipKind::Fmnn => fmnn_unchecked(b, x.lower(), &self.params.gamma),
        }
    }

    /// Membership of `x` in every box, in box order.
    pub fn memberships(&self, x: &IntervalSample) -> Result<Vec<f64>> {
        self.check_sample(x)?;
        Ok(self.boxes.iter().map(|b| self.membership_unchecked(b, x)).collect())
    }

    /// Label of the box with the highest membership.
    ///
    /// Unlabeled boxes only compete when the model has no labelled box.
    pub fn predict(&self, x: &IntervalSample) -> Result<Prediction> {
        if self.boxes.is_empty() {
            return Err(HyperboxError::EmptyModel);
        }
        self.check_sample(x)?;
        let any_labeled = self.boxes.iter().any(|b| b.label.is_labeled());
        let winner = self
            .boxes
            .iter()
            .filter(|b| !any_labeled || b.label.is_labeled())
            .map(|b| (self.membership_unchecked(b, x), b))
            .min_by(|a, b| winner_order(*a, *b))
            .expect("non-empty model");
        Ok(Prediction { label: winner.1.label, membership: winner.0, box_id: winner.1.id })
    }

    pub fn predict_labels(&self, samples: &[IntervalSample]) -> Result<Vec<ClassLabel>> {
        samples.iter().map(|x| self.predict(x).map(|p| p.label)).collect()
    }

    pub fn box_by_id(&self, id: u64) -> Option<&Hyperbox> {
        self.boxes.iter().find(|b| b.id == id)
    }

    /// Every pair of boxes from different classes that overlaps.
    pub fn conflicting_overlaps(&self) -> Vec<(u64, u64)> {
        let mut out = Vec::new();
        for (i, a) in self.boxes.iter().enumerate() {
            for b in &self.boxes[i + 1..] {
                if a.label.conflicts(b.label) && overlap_unchecked(a, b).is_some() {
                    out.push((a.id, b.id));
                }
            }
        }
        out
    }

    /// Checks every structural invariant plus inter-class non-overlap.
    pub fn validate(&self) -> Result<()> {
        self.params.validate(self.n_features)?;
        let mut ids = BTreeSet::new();
        for b in &self.boxes {
            if b.dims() != self.n_features {
                return Err(HyperboxError::Invariant(format!(
                    "box {} has {} dims, model has {}",
                    b.id,
                    b.dims(),
                    self.n_features
                )));
            }
            b.validate()?;
            if b.sample_count == 0 {
                return Err(HyperboxError::Invariant(format!("box {} has zero count", b.id)));
            }
            if !ids.insert(b.id) {
                return Err(HyperboxError::Invariant(format!("duplicate box id {}", b.id)));
            }
            if let ClassLabel::Class(c) = b.label {
                if !self.classes.contains(&c) {
                    return Err(HyperboxError::Invariant(format!(
                        "box {} has class {c} missing from the class set",
                        b.id
                    )));
                }
            }
        }
        if self.classes.contains(&0) {
            return Err(HyperboxError::Invariant("class id 0 is reserved".into()));
        }
        if let Some(scaler) = &self.scaler {
            scaler.validate(self.n_features)?;
        }
        if let Some((a, b)) = self.conflicting_overlaps().first() {
            return Err(HyperboxError::Invariant(format!("boxes {a} and {b} of different classes overlap")));
        }
        Ok(())
    }

    /// Renumber boxes 0..k in their current order.
    pub(crate) fn renumber(&mut self) {
        for (i, b) in self.boxes.iter_mut().enumerate() {
            b.id = i as u64;
        }
    }
}
