//! Expansion, overlap detection and contraction of hyperboxes.

use serde::{Deserialize, Serialize};

use crate::error::{HyperboxError, Result};
use crate::hyperbox::{ClassLabel, Hyperbox, IntervalSample};

/// How two boxes `a = [V, W]` and `b = [P, Q]` overlap in one dimension.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum OverlapCase {
    /// `V < P < W < Q`
    MaxInside,
    /// `P < V < Q < W`
    MinInside,
    /// `b` lies within `a`: `V <= P <= Q <= W`
    Contains,
    /// `a` lies within `b`: `P <= V <= W <= Q`
    ContainedBy,
}

impl OverlapCase {
    /// The conventional 1..4 case number.
    pub fn number(self) -> u8 {
        match self {
            OverlapCase::MaxInside => 1,
            OverlapCase::MinInside => 2,
            OverlapCase::Contains => 3,
            OverlapCase::ContainedBy => 4,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Overlap {
    pub dim: usize,
    pub delta: f64,
    pub case: OverlapCase,
}

fn check_dims(a: usize, b: usize) -> Result<()> {
    if a != b {
        return Err(HyperboxError::DimensionMismatch { expected: a, actual: b });
    }
    Ok(())
}

/// True when every constrained dim of the hull of `b` and `x` fits within `theta`.
pub fn is_expandable(b: &Hyperbox, x: &IntervalSample, theta: f64) -> Result<bool> {
    check_dims(b.dims(), x.len())?;
    Ok(expandable_unchecked(b, x, theta))
}

#[inline]
pub(crate) fn expandable_unchecked(b: &Hyperbox, x: &IntervalSample, theta: f64) -> bool {
    let (lower, upper) = (x.lower(), x.upper());
    (0..b.dims()).all(|j| !b.is_set(j) || lower[j].is_nan() || b.max[j].max(upper[j]) - b.min[j].min(lower[j]) <= theta)
}

/// Aggregate size test used by FMNN: total hull extent at most `n * theta`.
pub fn fmnn_expandable(b: &Hyperbox, x: &[f64], theta: f64) -> bool {
    let total: f64 = (0..b.dims()).map(|j| b.max[j].max(x[j]) - b.min[j].min(x[j])).sum();
    total <= b.dims() as f64 * theta
}

impl Hyperbox {
    /// Grow to the hull of the box and the sample and absorb its label.
    pub fn expand(&mut self, x: &IntervalSample, label: ClassLabel) {
        debug_assert_eq!(self.dims(), x.len());
        for j in 0..self.dims() {
            if x.is_missing(j) {
                continue;
            }
            let (lo, hi) = (x.lower()[j], x.upper()[j]);
            if self.is_set(j) {
                self.min[j] = self.min[j].min(lo);
                self.max[j] = self.max[j].max(hi);
            } else {
                self.min[j] = lo;
                self.max[j] = hi;
            }
        }
        self.sample_count += 1;
        if !self.label.is_labeled() && label.is_labeled() {
            self.label = label;
        }
    }

    /// Hull of two boxes; counts add up and a real label wins over unlabeled.
    pub fn hull(&self, other: &Hyperbox) -> Hyperbox {
        let mut min = Vec::with_capacity(self.dims());
        let mut max = Vec::with_capacity(self.dims());
        for j in 0..self.dims() {
            match (self.is_set(j), other.is_set(j)) {
                (true, true) => {
                    min.push(self.min[j].min(other.min[j]));
                    max.push(self.max[j].max(other.max[j]));
                }
                (true, false) => {
                    min.push(self.min[j]);
                    max.push(self.max[j]);
                }
                (false, _) => {
                    min.push(other.min[j]);
                    max.push(other.max[j]);
                }
            }
        }
        Hyperbox {
            id: self.id.min(other.id),
            label: if self.label.is_labeled() { self.label } else { other.label },
            min,
            max,
            sample_count: self.sample_count + other.sample_count,
        }
    }
}

/// Overlap of `[v, w]` and `[p, q]` in one dimension.
///
/// Intervals overlap when their intersection has positive length, or when a
/// degenerate interval sits strictly inside the other one. Touching
/// endpoints and coincident points do not count.
pub(crate) fn dim_overlap(v: f64, w: f64, p: f64, q: f64) -> Option<(OverlapCase, f64)> {
    let lo = v.max(p);
    let hi = w.min(q);
    if hi < lo {
        return None;
    }
    if hi == lo {
        let a_inside_b = v == w && p < lo && lo < q;
        let b_inside_a = p == q && v < lo && lo < w;
        if !a_inside_b && !b_inside_a {
            return None;
        }
    }
    let (case, delta) = if v < p && w < q {
        (OverlapCase::MaxInside, w - p)
    } else if p < v && q < w {
        (OverlapCase::MinInside, q - v)
    } else if v <= p && q <= w {
        (OverlapCase::Contains, (q - v).min(w - p))
    } else {
        (OverlapCase::ContainedBy, (q - v).min(w - p))
    };
    (delta > 0.0).then_some((case, delta))
}

/// Finds the dimension where `a` and `b` overlap the least, if they overlap.
///
/// Boxes overlap only when every dimension set in both boxes overlaps.
/// Dimensions unset in either box are skipped. Ties on `delta` go to the
/// lowest dimension index.
pub fn overlap_test(a: &Hyperbox, b: &Hyperbox) -> Result<Option<Overlap>> {
    check_dims(a.dims(), b.dims())?;
    Ok(overlap_unchecked(a, b))
}

pub(crate) fn overlap_unchecked(a: &Hyperbox, b: &Hyperbox) -> Option<Overlap> {
    let mut best: Option<Overlap> = None;
    for j in 0..a.dims() {
        if !a.is_set(j) || !b.is_set(j) {
            continue;
        }
        let (case, delta) = dim_overlap(a.min[j], a.max[j], b.min[j], b.max[j])?;
        if best.is_none_or(|o| delta < o.delta) {
            best = Some(Overlap { dim: j, delta, case });
        }
    }
    best
}

/// Shrinks `a` and `b` along `dim` so they no longer overlap there.
pub fn contract(a: &mut Hyperbox, b: &mut Hyperbox, dim: usize, case: OverlapCase) -> Result<()> {
    check_dims(a.dims(), b.dims())?;
    if dim >= a.dims() || !a.is_set(dim) || !b.is_set(dim) {
        return Err(HyperboxError::InvalidContraction(format!("dimension {dim} is not set in both boxes")));
    }
    let (v, w, p, q) = (a.min[dim], a.max[dim], b.min[dim], b.max[dim]);
    match dim_overlap(v, w, p, q) {
        Some((actual, _)) if actual == case => {}
        Some((actual, _)) => {
            return Err(HyperboxError::InvalidContraction(format!(
                "dimension {dim} is case {}, not case {}",
                actual.number(),
                case.number()
            )))
        }
        None => return Err(HyperboxError::InvalidContraction(format!("boxes do not overlap in dimension {dim}"))),
    }
    match case {
        OverlapCase::MaxInside => {
            let mid = 0.5 * (w + p);
            a.max[dim] = mid;
            b.min[dim] = mid;
        }
        OverlapCase::MinInside => {
            let mid = 0.5 * (q + v);
            b.max[dim] = mid;
            a.min[dim] = mid;
        }
        OverlapCase::Contains => {
            if q - v < w - p {
                a.min[dim] = q;
            } else {
                a.max[dim] = p;
            }
        }
        OverlapCase::ContainedBy => {
            if q - v < w - p {
                b.max[dim] = v;
            } else {
                b.min[dim] = w;
            }
        }
    }
    debug_assert!(dim_overlap(a.min[dim], a.max[dim], b.min[dim], b.max[dim]).is_none());
    Ok(())
}

/// Removes every overlap between `boxes[idx]` and boxes of a conflicting class.
///
/// Contraction only shrinks boxes, so one pass over the other boxes leaves
/// the set clean.
pub(crate) fn resolve_overlaps(boxes: &mut [Hyperbox], idx: usize) {
    let label = boxes[idx].label;
    if !label.is_labeled() {
        return;
    }
    for k in 0..boxes.len() {
        if k == idx || !boxes[k].label.conflicts(label) {
            continue;
        }
        if let Some(o) = overlap_unchecked(&boxes[idx], &boxes[k]) {
            let (a, b) = pair_mut(boxes, idx, k);
            contract(a, b, o.dim, o.case).expect("overlap_test result is contractible");
        }
    }
}

fn pair_mut<T>(items: &mut [T], i: usize, j: usize) -> (&mut T, &mut T) {
    assert_ne!(i, j);
    if i < j {
        let (left, right) = items.split_at_mut(j);
        (&mut left[i], &mut right[0])
    } else {
        let (left, right) = items.split_at_mut(i);
        (&mut right[0], &mut left[j])
    }
}

/// True when `candidate` overlaps any box of a conflicting class, ignoring `skip`.
pub(crate) fn overlaps_conflicting(boxes: &[Hyperbox], candidate: &Hyperbox, skip: &[usize]) -> bool {
    candidate.label.is_labeled()
        && boxes.iter().enumerate().any(|(k, other)| {
            !skip.contains(&k)
                && other.label.conflicts(candidate.label)
                && overlap_unchecked(candidate, other).is_some()
        })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bx(min: &[f64], max: &[f64]) -> Hyperbox {
        Hyperbox { id: 0, label: ClassLabel::Class(1), min: min.to_vec(), max: max.to_vec(), sample_count: 1 }
    }

    fn pt(v: &[f64]) -> IntervalSample {
        IntervalSample::point(v.to_vec()).unwrap()
    }

    #[test]
    fn expandable_examples() {
        let b = bx(&[0.1, 0.1], &[0.3, 0.3]);
        assert!(is_expandable(&b, &pt(&[0.35, 0.2]), 0.3).unwrap());
        assert!(!is_expandable(&b, &pt(&[0.35, 0.2]), 0.2).unwrap());
        assert!(is_expandable(&b, &pt(&[0.3, 0.1]), 0.2).unwrap());
        assert!(is_expandable(&b, &pt(&[0.9, f64::NAN]), 0.2).is_ok_and(|e| !e));
        assert!(is_expandable(&b, &pt(&[f64::NAN, 0.9]), 0.2).is_ok_and(|e| !e));
        assert!(is_expandable(&b, &pt(&[0.2]), 0.2).is_err());
    }

    #[test]
    fn expand_examples() {
        let mut b = bx(&[0.1, 0.1], &[0.3, 0.3]);
        b.expand(&pt(&[0.35, 0.2]), ClassLabel::Class(1));
        assert_eq!((b.min.clone(), b.max.clone()), (vec![0.1, 0.1], vec![0.35, 0.3]));
        assert_eq!(b.sample_count, 2);

        let before = b.clone();
        b.expand(&pt(&[0.2, 0.2]), ClassLabel::Class(1));
        assert_eq!((b.min.clone(), b.max.clone()), (before.min, before.max));
        assert_eq!(b.sample_count, 3);

        let mut u = bx(&[0.1, 1.0], &[0.3, 0.0]);
        u.label = ClassLabel::Unlabeled;
        u.expand(&pt(&[0.2, 0.5]), ClassLabel::Class(4));
        assert_eq!((u.min[1], u.max[1]), (0.5, 0.5));
        assert_eq!(u.label, ClassLabel::Class(4));

        let mut m = bx(&[0.1, 0.1], &[0.3, 0.3]);
        m.expand(&pt(&[0.9, f64::NAN]), ClassLabel::Class(1));
        assert_eq!((m.min[1], m.max[1]), (0.1, 0.3));
    }

    #[test]
    fn overlap_examples() {
        let a = bx(&[0.1, 0.1], &[0.4, 0.4]);
        let b = bx(&[0.3, 0.3], &[0.6, 0.6]);
        let o = overlap_test(&a, &b).unwrap().unwrap();
        assert_eq!((o.dim, o.case), (0, OverlapCase::MaxInside));
        assert!((o.delta - 0.1).abs() < 1e-12);

        let far = bx(&[0.5, 0.5], &[0.6, 0.6]);
        assert!(overlap_test(&bx(&[0.1, 0.1], &[0.2, 0.2]), &far).unwrap().is_none());

        let a = bx(&[0.1, 0.0], &[0.5, 0.9]);
        let b = bx(&[0.2, 0.1], &[0.3, 0.95]);
        let o = overlap_test(&a, &b).unwrap().unwrap();
        assert_eq!((o.dim, o.case), (0, OverlapCase::Contains));
        assert!((o.delta - 0.2).abs() < 1e-12);
    }

    #[test]
    fn degenerate_overlaps() {
        // point strictly inside another box
        assert_eq!(dim_overlap(0.3, 0.55, 0.45, 0.45).map(|o| o.0), Some(OverlapCase::Contains));
        assert_eq!(dim_overlap(0.45, 0.45, 0.3, 0.55).map(|o| o.0), Some(OverlapCase::ContainedBy));
        // touching
        assert!(dim_overlap(0.1, 0.3, 0.3, 0.5).is_none());
        assert!(dim_overlap(0.3, 0.3, 0.3, 0.5).is_none());
        // coincident points
        assert!(dim_overlap(0.3, 0.3, 0.3, 0.3).is_none());
        // identical intervals
        assert_eq!(dim_overlap(0.2, 0.4, 0.2, 0.4).map(|o| o.0), Some(OverlapCase::Contains));
    }

    #[test]
    fn unset_dims_are_skipped() {
        let a = bx(&[0.1, 1.0], &[0.4, 0.0]);
        let b = bx(&[0.3, 0.3], &[0.6, 0.6]);
        let o = overlap_test(&a, &b).unwrap().unwrap();
        assert_eq!(o.dim, 0);
        let b = bx(&[0.5, 0.3], &[0.6, 0.6]);
        assert!(overlap_test(&a, &b).unwrap().is_none());
    }

    #[test]
    fn contract_examples() {
        let mut a = bx(&[0.1], &[0.4]);
        let mut b = bx(&[0.3], &[0.6]);
        contract(&mut a, &mut b, 0, OverlapCase::MaxInside).unwrap();
        assert!((a.max[0] - 0.35).abs() < 1e-12);
        assert_eq!(a.max[0], b.min[0]);

        let mut a = bx(&[0.3], &[0.6]);
        let mut b = bx(&[0.1], &[0.4]);
        contract(&mut a, &mut b, 0, OverlapCase::MinInside).unwrap();
        assert!((a.min[0] - 0.35).abs() < 1e-12);
        assert_eq!(a.min[0], b.max[0]);

        // Q - V = 0.2 < W - P = 0.3
        let mut a = bx(&[0.1], &[0.6]);
        let mut b = bx(&[0.3], &[0.3]);
        contract(&mut a, &mut b, 0, OverlapCase::Contains).unwrap();
        assert_eq!(a.min[0], 0.3);
        assert_eq!(a.max[0], 0.6);

        // Q - V = 0.2 < W - P = 0.4
        let mut a = bx(&[0.4], &[0.5]);
        let mut b = bx(&[0.1], &[0.6]);
        contract(&mut a, &mut b, 0, OverlapCase::ContainedBy).unwrap();
        assert_eq!(b.max[0], 0.4);
        assert_eq!(b.min[0], 0.1);
        assert!(overlap_test(&a, &b).unwrap().is_none());
    }

    #[test]
    fn contract_rejects_inconsistent_case() {
        let mut a = bx(&[0.1], &[0.4]);
        let mut b = bx(&[0.3], &[0.6]);
        assert!(contract(&mut a, &mut b, 0, OverlapCase::MinInside).is_err());
        let mut c = bx(&[0.7], &[0.8]);
        assert!(contract(&mut a, &mut c, 0, OverlapCase::MaxInside).is_err());
        assert!(contract(&mut a, &mut b, 3, OverlapCase::MaxInside).is_err());
    }

    #[test]
    fn fmnn_aggregate_criterion() {
        let b = bx(&[0.1, 0.1], &[0.3, 0.3]);
        assert!(!fmnn_expandable(&b, &[0.45, 0.3], 0.25));
        assert!(fmnn_expandable(&b, &[0.45, 0.3], 0.3));
    }
}
