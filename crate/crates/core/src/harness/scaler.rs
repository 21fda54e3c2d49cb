//! Min-max scaling into the unit cube.

use serde::{Deserialize, Serialize};

use crate::error::{HyperboxError, Result};
use crate::hyperbox::{Dataset, IntervalSample};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalerState {
    pub min: Vec<f64>,
    /// `max - min` per feature.
    pub range: Vec<f64>,
    pub zero_range: Vec<bool>,
}

/// Learns per-feature minimum and range; missing values are ignored.
///
/// A feature with no observed value gets `min = 0` and zero range.
pub fn scaler_fit(samples: &[IntervalSample]) -> Result<ScalerState> {
    let first = samples.first().ok_or(HyperboxError::EmptyData)?;
    let n = first.len();
    let mut lo = vec![f64::INFINITY; n];
    let mut hi = vec![f64::NEG_INFINITY; n];
    for x in samples {
        if x.len() != n {
            return Err(HyperboxError::DimensionMismatch { expected: n, actual: x.len() });
        }
        for j in 0..n {
            if !x.is_missing(j) {
                lo[j] = lo[j].min(x.lower()[j]);
                hi[j] = hi[j].max(x.upper()[j]);
            }
        }
    }
    let mut state =
        ScalerState { min: Vec::with_capacity(n), range: Vec::with_capacity(n), zero_range: Vec::with_capacity(n) };
    for j in 0..n {
        let (min, range) = if lo[j].is_finite() { (lo[j], hi[j] - lo[j]) } else { (0.0, 0.0) };
        state.min.push(min);
        state.range.push(range);
        state.zero_range.push(range == 0.0);
    }
    Ok(state)
}

impl ScalerState {
    pub fn n_features(&self) -> usize {
        self.min.len()
    }

    pub fn validate(&self, n_features: usize) -> Result<()> {
        if self.min.len() != n_features || self.range.len() != n_features || self.zero_range.len() != n_features {
            return Err(HyperboxError::Invariant("scaler size differs from feature count".into()));
        }
        for j in 0..n_features {
            let (min, range) = (self.min[j], self.range[j]);
            if !min.is_finite() || !range.is_finite() || range < 0.0 || self.zero_range[j] != (range == 0.0) {
                return Err(HyperboxError::Invariant(format!("scaler feature {j} is inconsistent")));
            }
        }
        Ok(())
    }

    fn check(&self, x: &IntervalSample) -> Result<()> {
        if x.len() != self.n_features() {
            return Err(HyperboxError::DimensionMismatch { expected: self.n_features(), actual: x.len() });
        }
        Ok(())
    }

    /// Maps into `[0, 1]`, clipping unseen out-of-range values. Constant
    /// features map to 0.5.
    pub fn transform(&self, x: &IntervalSample) -> Result<IntervalSample> {
        self.check(x)?;
        Ok(x.map_bounds(
            |j, v| {
                if self.zero_range[j] {
                    0.5
                } else {
                    ((v - self.min[j]) / self.range[j]).clamp(0.0, 1.0)
                }
            },
        ))
    }

    pub fn inverse_transform(&self, x: &IntervalSample) -> Result<IntervalSample> {
        self.check(x)?;
        Ok(x.map_bounds(|j, v| if self.zero_range[j] { self.min[j] } else { self.min[j] + v * self.range[j] }))
    }

    pub fn transform_dataset(&self, data: &Dataset) -> Result<Dataset> {
        let samples = data.samples.iter().map(|x| self.transform(x)).collect::<Result<Vec<_>>>()?;
        Ok(Dataset { samples, labels: data.labels.clone() })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn col(values: &[f64]) -> Vec<IntervalSample> {
        values.iter().map(|&v| IntervalSample::point(vec![v]).unwrap()).collect()
    }

    #[test]
    fn column_examples() {
        let s = scaler_fit(&col(&[2.0, 4.0, 6.0])).unwrap();
        assert_eq!((s.min[0], s.range[0]), (2.0, 4.0));
        let t = |v: f64| s.transform(&IntervalSample::point(vec![v]).unwrap()).unwrap().lower()[0];
        assert_eq!(t(4.0), 0.5);
        assert_eq!(t(8.0), 1.0);
        assert_eq!(t(-3.0), 0.0);

        let c = scaler_fit(&col(&[3.0, 3.0, 3.0])).unwrap();
        assert!(c.zero_range[0]);
        assert_eq!(c.transform(&IntervalSample::point(vec![3.0]).unwrap()).unwrap().lower()[0], 0.5);
    }

    #[test]
    fn missing_is_ignored_and_preserved() {
        let data = vec![
            IntervalSample::point(vec![1.0, f64::NAN]).unwrap(),
            IntervalSample::point(vec![3.0, 5.0]).unwrap(),
            IntervalSample::point(vec![f64::NAN, 7.0]).unwrap(),
        ];
        let s = scaler_fit(&data).unwrap();
        assert_eq!(s.min, vec![1.0, 5.0]);
        let t = s.transform(&data[0]).unwrap();
        assert_eq!(t.lower()[0], 0.0);
        assert!(t.is_missing(1));
        assert!(s.transform(&IntervalSample::point(vec![1.0]).unwrap()).is_err());
        assert!(scaler_fit(&[]).is_err());
    }

    proptest! {
        #[test]
        fn round_trip(lo in -100.0f64..100.0, span in 0.1f64..50.0, t in 0.0f64..=1.0) {
            let s = scaler_fit(&col(&[lo, lo + span])).unwrap();
            let x = IntervalSample::point(vec![lo + t * span]).unwrap();
            let back = s.inverse_transform(&s.transform(&x).unwrap()).unwrap();
            prop_assert!((back.lower()[0] - x.lower()[0]).abs() <= 1e-12 * (1.0 + x.lower()[0].abs()));
        }
    }
}
