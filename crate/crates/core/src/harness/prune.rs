//! Validation-driven removal of unreliable hyperboxes.

use std::collections::{BTreeMap, BTreeSet};

use crate::error::{HyperboxError, Result};
use crate::hyperbox::{ClassLabel, Dataset};
use crate::model::TrainedModel;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PruneOptions {
    /// Boxes whose won validation samples are classified with lower accuracy go.
    pub min_accuracy: f64,
    /// Keep boxes that win no validation sample.
    pub keep_unused: bool,
}

impl Default for PruneOptions {
    fn default() -> Self {
        PruneOptions { min_accuracy: 0.5, keep_unused: false }
    }
}

#[derive(Debug, Clone, Copy, Default)]
struct Record {
    wins: usize,
    correct: usize,
}

impl Record {
    fn accuracy(self) -> f64 {
        self.correct as f64 / self.wins as f64
    }
}

fn records(model: &TrainedModel, validation: &Dataset) -> Result<BTreeMap<u64, Record>> {
    let mut out: BTreeMap<u64, Record> = model.boxes.iter().map(|b| (b.id, Record::default())).collect();
    for (x, y) in validation.iter() {
        let p = model.predict(x)?;
        let r = out.get_mut(&p.box_id).expect("winner is a model box");
        r.wins += 1;
        if y.is_labeled() && p.label == y {
            r.correct += 1;
        }
    }
    Ok(out)
}

fn removal_pass(model: &TrainedModel, validation: &Dataset, opts: PruneOptions) -> Result<TrainedModel> {
    let stats = records(model, validation)?;
    let doomed = |id: u64| {
        let r = stats[&id];
        if r.wins == 0 {
            !opts.keep_unused
        } else {
            r.accuracy() < opts.min_accuracy
        }
    };
    let mut remove: BTreeSet<u64> = model.boxes.iter().map(|b| b.id).filter(|&id| doomed(id)).collect();

    // the last box of a class seen in validation always survives
    let present: BTreeSet<ClassLabel> = validation.labels.iter().copied().filter(|l| l.is_labeled()).collect();
    for class in present {
        let of_class: Vec<_> = model.boxes.iter().filter(|b| b.label == class).collect();
        if !of_class.is_empty() && of_class.iter().all(|b| remove.contains(&b.id)) {
            let keep = of_class
                .iter()
                .max_by(|a, b| {
                    let (ra, rb) = (stats[&a.id], stats[&b.id]);
                    ra.correct.cmp(&rb.correct).then(ra.wins.cmp(&rb.wins)).then(b.id.cmp(&a.id))
                })
                .expect("non-empty");
            remove.remove(&keep.id);
        }
    }
    if remove.len() == model.boxes.len() {
        // nothing to anchor on; keep the box with the most samples
        let keep = model.boxes.iter().max_by(|a, b| a.sample_count.cmp(&b.sample_count).then(b.id.cmp(&a.id)));
        if let Some(b) = keep {
            remove.remove(&b.id);
        }
    }

    let mut pruned = model.clone();
    pruned.boxes.retain(|b| !remove.contains(&b.id));
    Ok(pruned)
}

/// Drops boxes that decide validation samples badly, then re-evaluates the
/// winners once and repeats the removal on the result.
pub fn prune(model: &TrainedModel, validation: &Dataset, opts: PruneOptions) -> Result<TrainedModel> {
    if validation.is_empty() {
        return Err(HyperboxError::EmptyData);
    }
    if !(0.0..=1.0).contains(&opts.min_accuracy) {
        return Err(HyperboxError::param("min_accuracy", format!("{} is outside [0, 1]", opts.min_accuracy)));
    }
    let first = removal_pass(model, validation, opts)?;
    removal_pass(&first, validation, opts)
}
