//! Hyperboxes, interval samples and class labels.
//!
//! A hyperbox lives in the unit cube and is described by its min vertex `V`
//! and max vertex `W`. A dimension whose value has never been observed is
//! "unset" and is encoded with the sentinel `V = 1, W = 0`; it is neutral in
//! every membership and overlap computation.

use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{HyperboxError, Result};

/// Min-vertex value of an unset dimension.
pub const UNSET_MIN: f64 = 1.0;
/// Max-vertex value of an unset dimension.
pub const UNSET_MAX: f64 = 0.0;

/// Class of a sample or hyperbox.
///
/// Serialized as a plain integer where `0` stands for [`ClassLabel::Unlabeled`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub enum ClassLabel {
    #[default]
    Unlabeled,
    Class(u32),
}

impl ClassLabel {
    pub fn new(id: u32) -> Self {
        if id == 0 {
            ClassLabel::Unlabeled
        } else {
            ClassLabel::Class(id)
        }
    }

    pub fn is_labeled(self) -> bool {
        matches!(self, ClassLabel::Class(_))
    }

    /// Integer code used in files: the class id, or 0 when unlabeled.
    pub fn code(self) -> u32 {
        match self {
            ClassLabel::Unlabeled => 0,
            ClassLabel::Class(id) => id,
        }
    }

    /// Two labels may share a hyperbox when they agree or either is unlabeled.
    pub fn compatible(self, other: ClassLabel) -> bool {
        self == other || !self.is_labeled() || !other.is_labeled()
    }

    /// True when both labels are real classes and they differ.
    pub fn conflicts(self, other: ClassLabel) -> bool {
        self.is_labeled() && other.is_labeled() && self != other
    }
}

impl fmt::Display for ClassLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ClassLabel::Unlabeled => f.write_str("unlabeled"),
            ClassLabel::Class(id) => write!(f, "{id}"),
        }
    }
}

impl Serialize for ClassLabel {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_u32(self.code())
    }
}

impl<'de> Deserialize<'de> for ClassLabel {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        u32::deserialize(deserializer).map(ClassLabel::new)
    }
}

/// A sample given as per-feature `[lower, upper]` bounds.
///
/// A missing feature is stored as NaN in both bounds. A point sample has
/// `lower == upper` on every present feature.
#[derive(Debug, Clone, PartialEq)]
pub struct IntervalSample {
    lower: Vec<f64>,
    upper: Vec<f64>,
}

impl IntervalSample {
    /// Point sample; NaN entries are treated as missing.
    pub fn point(values: Vec<f64>) -> Result<Self> {
        Self::interval(values.clone(), values)
    }

    pub fn from_options(values: &[Option<f64>]) -> Result<Self> {
        Self::point(values.iter().map(|v| v.unwrap_or(f64::NAN)).collect())
    }

    pub fn interval(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        if lower.len() != upper.len() {
            return Err(HyperboxError::DimensionMismatch { expected: lower.len(), actual: upper.len() });
        }
        for (j, (&lo, &hi)) in lower.iter().zip(&upper).enumerate() {
            match (lo.is_nan(), hi.is_nan()) {
                (true, true) => {}
                (false, false) => {
                    if lo.is_infinite() || hi.is_infinite() {
                        return Err(HyperboxError::InvalidInput(format!("feature {j} is not finite")));
                    }
                    if lo > hi {
                        return Err(HyperboxError::InvalidInput(format!(
                            "feature {j}: lower bound {lo} exceeds upper bound {hi}"
                        )));
                    }
                }
                _ => return Err(HyperboxError::InvalidInput(format!("feature {j} is missing in only one bound"))),
            }
        }
        Ok(IntervalSample { lower, upper })
    }

    pub fn len(&self) -> usize {
        self.lower.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lower.is_empty()
    }

    pub fn lower(&self) -> &[f64] {
        &self.lower
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    pub fn is_missing(&self, j: usize) -> bool {
        self.lower[j].is_nan()
    }

    pub fn has_missing(&self) -> bool {
        self.lower.iter().any(|v| v.is_nan())
    }

    pub fn is_point(&self) -> bool {
        self.lower.iter().zip(&self.upper).all(|(lo, hi)| lo.is_nan() || lo == hi)
    }

    /// Per-feature midpoint; `None` for missing features.
    pub fn midpoint(&self, j: usize) -> Option<f64> {
        if self.is_missing(j) {
            None
        } else {
            Some(0.5 * (self.lower[j] + self.upper[j]))
        }
    }

    /// Restrict the sample to the given feature indices.
    pub fn project(&self, features: &[usize]) -> IntervalSample {
        IntervalSample {
            lower: features.iter().map(|&j| self.lower[j]).collect(),
            upper: features.iter().map(|&j| self.upper[j]).collect(),
        }
    }

    /// Apply `f` to both bounds of every present feature.
    pub(crate) fn map_bounds(&self, mut f: impl FnMut(usize, f64) -> f64) -> IntervalSample {
        let map = |v: &Vec<f64>, f: &mut dyn FnMut(usize, f64) -> f64| {
            v.iter().enumerate().map(|(j, &x)| if x.is_nan() { x } else { f(j, x) }).collect::<Vec<_>>()
        };
        let lower = map(&self.lower, &mut f);
        let upper = map(&self.upper, &mut f);
        IntervalSample { lower, upper }
    }

    /// Fails unless every present bound lies in `[0, 1]`.
    pub fn check_normalized(&self, sample_index: usize) -> Result<()> {
        for j in 0..self.len() {
            if self.is_missing(j) {
                continue;
            }
            for value in [self.lower[j], self.upper[j]] {
                if !(0.0..=1.0).contains(&value) {
                    return Err(HyperboxError::Unnormalized { sample: sample_index, feature: j, value });
                }
            }
        }
        Ok(())
    }
}

/// An axis-aligned box `[V, W]` carrying a class label.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Hyperbox {
    pub id: u64,
    pub label: ClassLabel,
    #[serde(rename = "V")]
    pub min: Vec<f64>,
    #[serde(rename = "W")]
    pub max: Vec<f64>,
    #[serde(rename = "count")]
    pub sample_count: u64,
}

impl Hyperbox {
    /// Box spanning exactly the sample; missing features become unset dims.
    pub fn from_sample(id: u64, x: &IntervalSample, label: ClassLabel) -> Self {
        let (min, max) = (0..x.len())
            .map(|j| if x.is_missing(j) { (UNSET_MIN, UNSET_MAX) } else { (x.lower()[j], x.upper()[j]) })
            .unzip();
        Hyperbox { id, label, min, max, sample_count: 1 }
    }

    pub fn dims(&self) -> usize {
        self.min.len()
    }

    /// A dimension is set unless it carries the `V > W` sentinel.
    pub fn is_set(&self, j: usize) -> bool {
        self.min[j] <= self.max[j]
    }

    pub fn width(&self, j: usize) -> Option<f64> {
        self.is_set(j).then(|| self.max[j] - self.min[j])
    }

    /// Product of widths over set dims, zero widths counted as 1e-12.
    pub fn volume(&self) -> f64 {
        (0..self.dims()).filter_map(|j| self.width(j)).map(|w| if w > 0.0 { w } else { 1e-12 }).product()
    }

    pub fn project(&self, features: &[usize]) -> Hyperbox {
        Hyperbox {
            id: self.id,
            label: self.label,
            min: features.iter().map(|&j| self.min[j]).collect(),
            max: features.iter().map(|&j| self.max[j]).collect(),
            sample_count: self.sample_count,
        }
    }

    /// The box as an interval sample; unset dims become missing features.
    pub fn as_sample(&self) -> IntervalSample {
        let (lower, upper) = (0..self.dims())
            .map(|j| if self.is_set(j) { (self.min[j], self.max[j]) } else { (f64::NAN, f64::NAN) })
            .unzip();
        IntervalSample { lower, upper }
    }

    /// Checks vertex ordering and the unit-cube bounds.
    pub fn validate(&self) -> Result<()> {
        if self.min.len() != self.max.len() {
            return Err(HyperboxError::Invariant(format!("box {} has vertices of different length", self.id)));
        }
        for j in 0..self.dims() {
            let (v, w) = (self.min[j], self.max[j]);
            if !v.is_finite() || !w.is_finite() {
                return Err(HyperboxError::Invariant(format!("box {} dim {j} is not finite", self.id)));
            }
            let sentinel = v == UNSET_MIN && w == UNSET_MAX;
            if !sentinel && !(0.0 <= v && v <= w && w <= 1.0) {
                return Err(HyperboxError::Invariant(format!("box {} dim {j} has V={v}, W={w}", self.id)));
            }
        }
        Ok(())
    }
}

/// Labelled training data, one label per sample.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Dataset {
    pub samples: Vec<IntervalSample>,
    pub labels: Vec<ClassLabel>,
}

impl Dataset {
    pub fn new(samples: Vec<IntervalSample>, labels: Vec<ClassLabel>) -> Result<Self> {
        if samples.len() != labels.len() {
            return Err(HyperboxError::InvalidInput(format!("{} samples but {} labels", samples.len(), labels.len())));
        }
        if let Some(first) = samples.first() {
            let n = first.len();
            if let Some(bad) = samples.iter().find(|s| s.len() != n) {
                return Err(HyperboxError::DimensionMismatch { expected: n, actual: bad.len() });
            }
        }
        Ok(Dataset { samples, labels })
    }

    /// Point dataset from dense rows and integer labels (0 = unlabeled).
    pub fn from_points(rows: &[Vec<f64>], labels: &[u32]) -> Result<Self> {
        let samples = rows.iter().map(|r| IntervalSample::point(r.clone())).collect::<Result<Vec<_>>>()?;
        Self::new(samples, labels.iter().map(|&l| ClassLabel::new(l)).collect())
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn n_features(&self) -> usize {
        self.samples.first().map_or(0, IntervalSample::len)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&IntervalSample, ClassLabel)> {
        self.samples.iter().zip(self.labels.iter().copied())
    }

    pub fn subset(&self, indices: &[usize]) -> Dataset {
        Dataset {
            samples: indices.iter().map(|&i| self.samples[i].clone()).collect(),
            labels: indices.iter().map(|&i| self.labels[i]).collect(),
        }
    }

    pub fn project(&self, features: &[usize]) -> Dataset {
        Dataset { samples: self.samples.iter().map(|s| s.project(features)).collect(), labels: self.labels.clone() }
    }

    pub fn check_normalized(&self) -> Result<()> {
        self.samples.iter().enumerate().try_for_each(|(i, s)| s.check_normalized(i))
    }
}
