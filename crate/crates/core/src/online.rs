//! Instance-incremental trainers.
//!
//! All three learners share one loop: rank the label-compatible boxes by
//! membership, grow the best one that may grow, otherwise open a new box.
//! They differ in how they keep boxes of different classes apart:
//!
//! * Onln-GFMM expands, then contracts any box it now overlaps.
//! * IOL-GFMM rejects an expansion that would overlap and tries the next box.
//! * FMNN ranks with the averaged membership and bounds the summed edge
//!   length by `n * theta`, then contracts like Onln-GFMM.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{HyperboxError, Result};
use crate::geometry::{expandable_unchecked, fmnn_expandable, overlaps_conflicting, resolve_overlaps};
use crate::hyperbox::{ClassLabel, Dataset, Hyperbox, IntervalSample};
use crate::membership::MembershipKind;
use crate::model::{Algorithm, ModelParams, TrainedModel};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OnlineFitConfig {
    pub params: ModelParams,
    /// Number of passes. Passes after the first only revisit samples the
    /// current model misclassifies.
    pub epochs: usize,
    /// Seed for shuffling the presentation order; `None` keeps data order.
    pub shuffle_seed: Option<u64>,
    pub theta_min: Option<f64>,
    pub theta_decay: Option<f64>,
}

impl OnlineFitConfig {
    pub fn new(params: ModelParams) -> Self {
        OnlineFitConfig { params, epochs: 1, shuffle_seed: None, theta_min: None, theta_decay: None }
    }

    pub fn gfmm(theta: f64) -> Self {
        Self::new(ModelParams::gfmm(theta))
    }

    pub fn fmnn(theta: f64) -> Self {
        Self::new(ModelParams::fmnn(theta))
    }

    pub fn validate(&self, n_features: usize) -> Result<()> {
        self.params.validate(n_features)?;
        if self.epochs == 0 {
            return Err(HyperboxError::param("epochs", "must be at least 1"));
        }
        if let Some(decay) = self.theta_decay {
            if !(decay > 0.0 && decay <= 1.0) {
                return Err(HyperboxError::param("theta_decay", format!("{decay} is outside (0, 1]")));
            }
        }
        if let Some(min) = self.theta_min {
            if !(min > 0.0 && min <= self.params.theta) {
                return Err(HyperboxError::param(
                    "theta_min",
                    format!("{min} must lie in (0, theta = {}]", self.params.theta),
                ));
            }
        }
        Ok(())
    }

    fn next_theta(&self, theta: f64) -> f64 {
        let decayed = theta * self.theta_decay.unwrap_or(1.0);
        match self.theta_min {
            Some(min) => decayed.max(min),
            None => decayed,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Rule {
    Onln,
    Iol,
    Fmnn,
}

impl Rule {
    fn for_algorithm(algorithm: Algorithm) -> Rule {
        match algorithm {
            Algorithm::IolGfmm => Rule::Iol,
            Algorithm::Fmnn => Rule::Fmnn,
            Algorithm::OnlnGfmm | Algorithm::Agglo2 => Rule::Onln,
        }
    }

    fn algorithm(self) -> Algorithm {
        match self {
            Rule::Onln => Algorithm::OnlnGfmm,
            Rule::Iol => Algorithm::IolGfmm,
            Rule::Fmnn => Algorithm::Fmnn,
        }
    }
}

pub fn fit_onln_gfmm(data: &Dataset, cfg: &OnlineFitConfig) -> Result<TrainedModel> {
    fit(data, cfg, Rule::Onln)
}

pub fn fit_iol_gfmm(data: &Dataset, cfg: &OnlineFitConfig) -> Result<TrainedModel> {
    fit(data, cfg, Rule::Iol)
}

pub fn fit_fmnn(data: &Dataset, cfg: &OnlineFitConfig) -> Result<TrainedModel> {
    let mut cfg = cfg.clone();
    cfg.params.membership_kind = MembershipKind::Fmnn;
    fit(data, &cfg, Rule::Fmnn)
}

fn check_fmnn_sample(x: &IntervalSample, label: ClassLabel) -> Result<()> {
    if !x.is_point() || x.has_missing() {
        return Err(HyperboxError::InvalidInput("FMNN trains on fully observed point samples only".into()));
    }
    if !label.is_labeled() {
        return Err(HyperboxError::InvalidInput("FMNN needs labelled samples".into()));
    }
    Ok(())
}

fn validate_data(data: &Dataset, rule: Rule) -> Result<usize> {
    if data.is_empty() {
        return Err(HyperboxError::EmptyData);
    }
    if data.samples.len() != data.labels.len() {
        return Err(HyperboxError::InvalidInput("sample and label counts differ".into()));
    }
    let n = data.n_features();
    for x in &data.samples {
        if x.len() != n {
            return Err(HyperboxError::DimensionMismatch { expected: n, actual: x.len() });
        }
    }
    data.check_normalized()?;
    if rule == Rule::Fmnn {
        data.iter().try_for_each(|(x, y)| check_fmnn_sample(x, y))?;
    }
    Ok(n)
}

fn fit(data: &Dataset, cfg: &OnlineFitConfig, rule: Rule) -> Result<TrainedModel> {
    let n = validate_data(data, rule)?;
    cfg.validate(n)?;

    let mut model = TrainedModel::new(rule.algorithm(), cfg.params.clone(), n);
    let mut order: Vec<usize> = (0..data.len()).collect();
    let mut rng = cfg.shuffle_seed.map(ChaCha8Rng::seed_from_u64);
    let mut theta = cfg.params.theta;

    for epoch in 0..cfg.epochs {
        if epoch > 0 {
            theta = cfg.next_theta(theta);
        }
        if let Some(rng) = rng.as_mut() {
            order.shuffle(rng);
        }
        let present: Vec<usize> = if epoch == 0 {
            order.clone()
        } else {
            order
                .iter()
                .copied()
                .filter(|&i| model.predict(&data.samples[i]).map_or(true, |p| p.label != data.labels[i]))
                .collect()
        };
        if present.is_empty() {
            break;
        }
        for i in present {
            step(&mut model, &data.samples[i], data.labels[i], theta, rule);
        }
    }
    model.params.theta = theta;
    Ok(model)
}

/// Presents one more sample to a trained model using the rule it was
/// trained with. Existing boxes are only ever grown or contracted.
pub fn partial_fit(model: &mut TrainedModel, x: &IntervalSample, label: ClassLabel) -> Result<()> {
    if x.len() != model.n_features {
        return Err(HyperboxError::DimensionMismatch { expected: model.n_features, actual: x.len() });
    }
    x.check_normalized(0)?;
    let rule = Rule::for_algorithm(model.algorithm);
    if rule == Rule::Fmnn {
        check_fmnn_sample(x, label)?;
    }
    let theta = model.params.theta;
    step(model, x, label, theta, rule);
    Ok(())
}

/// Compatible boxes ranked by membership, ties to the lower id.
fn ranked_candidates(model: &TrainedModel, x: &IntervalSample, label: ClassLabel, rule: Rule) -> Vec<(usize, f64)> {
    let mut ranked: Vec<(usize, f64)> = model
        .boxes
        .iter()
        .enumerate()
        .filter(|(_, b)| match rule {
            Rule::Fmnn => b.label == label,
            _ => b.label.compatible(label),
        })
        .map(|(i, b)| (i, model.membership_unchecked(b, x)))
        .collect();
    ranked.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| model.boxes[a.0].id.cmp(&model.boxes[b.0].id)));
    ranked
}

fn step(model: &mut TrainedModel, x: &IntervalSample, label: ClassLabel, theta: f64, rule: Rule) {
    if let ClassLabel::Class(c) = label {
        model.classes.insert(c);
    }
    let ranked = ranked_candidates(model, x, label, rule);

    for &(i, membership) in &ranked {
        let contained = membership >= 1.0;
        let fits = contained
            || match rule {
                Rule::Fmnn => fmnn_expandable(&model.boxes[i], x.lower(), theta),
                _ => expandable_unchecked(&model.boxes[i], x, theta),
            };
        if !fits {
            continue;
        }
        match rule {
            Rule::Onln | Rule::Fmnn => {
                model.boxes[i].expand(x, label);
                resolve_overlaps(&mut model.boxes, i);
                return;
            }
            Rule::Iol => {
                let mut trial = model.boxes[i].clone();
                trial.expand(x, label);
                if !overlaps_conflicting(&model.boxes, &trial, &[i]) {
                    model.boxes[i] = trial;
                    return;
                }
            }
        }
    }

    let id = model.next_box_id();
    model.boxes.push(Hyperbox::from_sample(id, x, label));
    // a new box can sit inside, or cover part of, a box of another class
    let idx = model.boxes.len() - 1;
    resolve_overlaps(&mut model.boxes, idx);
}
