//! Fuzzy membership of a sample in a hyperbox.

use serde::{Deserialize, Serialize};

use crate::error::{HyperboxError, Result};
use crate::hyperbox::{Hyperbox, IntervalSample};

/// Membership steepness: one value for every feature, or one per feature.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Gamma {
    Scalar(f64),
    PerFeature(Vec<f64>),
}

impl Default for Gamma {
    fn default() -> Self {
        Gamma::Scalar(1.0)
    }
}

impl Gamma {
    #[inline]
    pub fn get(&self, j: usize) -> f64 {
        match self {
            Gamma::Scalar(g) => *g,
            Gamma::PerFeature(v) => v[j],
        }
    }

    pub fn validate(&self, n_features: usize) -> Result<()> {
        let values: &[f64] = match self {
            Gamma::Scalar(g) => std::slice::from_ref(g),
            Gamma::PerFeature(v) => {
                if v.len() != n_features {
                    return Err(HyperboxError::DimensionMismatch { expected: n_features, actual: v.len() });
                }
                v
            }
        };
        match values.iter().find(|g| !(g.is_finite() && **g > 0.0)) {
            Some(g) => Err(HyperboxError::param("gamma", format!("{g} is not positive"))),
            None => Ok(()),
        }
    }

    pub fn project(&self, features: &[usize]) -> Gamma {
        match self {
            Gamma::Scalar(g) => Gamma::Scalar(*g),
            Gamma::PerFeature(v) => Gamma::PerFeature(features.iter().map(|&j| v[j]).collect()),
        }
    }

    pub fn scaled(&self, factor: f64) -> Gamma {
        match self {
            Gamma::Scalar(g) => Gamma::Scalar(g * factor),
            Gamma::PerFeature(v) => Gamma::PerFeature(v.iter().map(|g| g * factor).collect()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MembershipKind {
    #[default]
    Gfmm,
    Fmnn,
}

/// Ramp threshold: 0 below zero, linear up to `r * gamma = 1`, then 1.
#[inline]
pub fn ramp(r: f64, gamma: f64) -> f64 {
    let rg = r * gamma;
    if rg > 1.0 {
        1.0
    } else if rg >= 0.0 {
        rg
    } else {
        0.0
    }
}

fn check_dims(b: &Hyperbox, x: &IntervalSample) -> Result<()> {
    if b.dims() != x.len() {
        return Err(HyperboxError::DimensionMismatch { expected: b.dims(), actual: x.len() });
    }
    Ok(())
}

/// GFMM membership: the worst per-feature fit, so a single far feature
/// decides the value. Unset box dims and missing features are neutral.
pub fn gfmm_membership(b: &Hyperbox, x: &IntervalSample, gamma: &Gamma) -> Result<f64> {
    check_dims(b, x)?;
    gamma.validate(b.dims())?;
    Ok(gfmm_unchecked(b, x, gamma))
}

#[inline]
pub(crate) fn gfmm_unchecked(b: &Hyperbox, x: &IntervalSample, gamma: &Gamma) -> f64 {
    let (lower, upper) = (x.lower(), x.upper());
    let mut m = 1.0f64;
    for j in 0..b.dims() {
        if !b.is_set(j) || lower[j].is_nan() {
            continue;
        }
        let g = gamma.get(j);
        let above = 1.0 - ramp(upper[j] - b.max[j], g);
        let below = 1.0 - ramp(b.min[j] - lower[j], g);
        m = m.min(above.min(below));
    }
    m
}

/// Simpson's averaged membership over both sides of every feature. Points only.
pub fn fmnn_membership(b: &Hyperbox, x: &IntervalSample, gamma: f64) -> Result<f64> {
    check_dims(b, x)?;
    if !(gamma.is_finite() && gamma > 0.0) {
        return Err(HyperboxError::param("gamma", format!("{gamma} is not positive")));
    }
    if !x.is_point() || x.has_missing() {
        return Err(HyperboxError::InvalidInput("FMNN membership needs fully observed point samples".into()));
    }
    if (0..b.dims()).any(|j| !b.is_set(j)) {
        return Err(HyperboxError::InvalidInput("FMNN membership needs fully set boxes".into()));
    }
    Ok(fmnn_unchecked(b, x.lower(), &Gamma::Scalar(gamma)))
}

#[inline]
pub(crate) fn fmnn_unchecked(b: &Hyperbox, x: &[f64], gamma: &Gamma) -> f64 {
    let n = b.dims();
    if n == 0 {
        return 1.0;
    }
    let side = |d: f64, g: f64| (1.0 - (g * d.min(1.0)).max(0.0)).max(0.0);
    let total: f64 = (0..n)
        .map(|j| {
            let g = gamma.get(j);
            side(x[j] - b.max[j], g) + side(b.min[j] - x[j], g)
        })
        .sum();
    total / (2 * n) as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hyperbox::ClassLabel;

    fn unit_box(min: Vec<f64>, max: Vec<f64>) -> Hyperbox {
        Hyperbox { id: 0, label: ClassLabel::Class(1), min, max, sample_count: 1 }
    }

    fn pt(v: &[f64]) -> IntervalSample {
        IntervalSample::point(v.to_vec()).unwrap()
    }

    #[test]
    fn gfmm_worked_examples() {
        let b = unit_box(vec![0.2, 0.2], vec![0.4, 0.4]);
        let g = Gamma::Scalar(4.0);
        let m = gfmm_membership(&b, &pt(&[0.5, 0.3]), &g).unwrap();
        assert!((m - 0.6).abs() < 1e-12);
        assert_eq!(gfmm_membership(&b, &pt(&[0.3, 0.25]), &Gamma::Scalar(9.0)).unwrap(), 1.0);
        let m = gfmm_membership(&b, &pt(&[0.5, f64::NAN]), &g).unwrap();
        assert!((m - 0.6).abs() < 1e-12);
    }

    #[test]
    fn fmnn_worked_examples() {
        let b = unit_box(vec![0.2, 0.2], vec![0.4, 0.4]);
        let m = fmnn_membership(&b, &pt(&[0.5, 0.3]), 4.0).unwrap();
        assert!((m - 0.9).abs() < 1e-12);
        assert_eq!(fmnn_membership(&b, &pt(&[0.3, 0.3]), 4.0).unwrap(), 1.0);
        let p = unit_box(vec![0.7, 0.1], vec![0.7, 0.1]);
        assert_eq!(fmnn_membership(&p, &pt(&[0.7, 0.1]), 4.0).unwrap(), 1.0);
    }

    #[test]
    fn errors() {
        let b = unit_box(vec![0.2, 0.2], vec![0.4, 0.4]);
        assert!(gfmm_membership(&b, &pt(&[0.5]), &Gamma::Scalar(1.0)).is_err());
        assert!(gfmm_membership(&b, &pt(&[0.5, 0.5]), &Gamma::Scalar(0.0)).is_err());
        assert!(gfmm_membership(&b, &pt(&[0.5, 0.5]), &Gamma::PerFeature(vec![1.0, -1.0])).is_err());
        assert!(fmnn_membership(&b, &pt(&[0.5, f64::NAN]), 1.0).is_err());
        let iv = IntervalSample::interval(vec![0.1, 0.1], vec![0.2, 0.2]).unwrap();
        assert!(fmnn_membership(&b, &iv, 1.0).is_err());
    }

    #[test]
    fn all_neutral_is_one() {
        let b = unit_box(vec![1.0, 0.2], vec![0.0, 0.4]);
        assert_eq!(gfmm_membership(&b, &pt(&[0.9, f64::NAN]), &Gamma::Scalar(5.0)).unwrap(), 1.0);
    }
}
