//! Explanations of a single prediction and plot-ready exports.
//!
//! The explanation of a sample lists, per class, the box of that class with
//! the highest membership. Rendering is left to external tools; this module
//! only emits tables and JSON documents.

use std::collections::BTreeMap;
use std::io::Write;

use serde::Serialize;

use crate::error::{HyperboxError, Result};
use crate::hyperbox::{ClassLabel, Hyperbox, IntervalSample};
use crate::model::{winner_order, TrainedModel};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClassExplanation {
    pub class: ClassLabel,
    pub box_id: u64,
    pub membership: f64,
    #[serde(rename = "V")]
    pub min: Vec<f64>,
    #[serde(rename = "W")]
    pub max: Vec<f64>,
    /// `max(0, x - W_j, V_j - x)` per feature; `None` where the sample is
    /// missing or the box dimension is unset.
    pub per_feature_distance: Vec<Option<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Explanation {
    #[serde(serialize_with = "serialize_sample")]
    pub sample: IntervalSample,
    pub predicted: ClassLabel,
    /// One row per class, best membership first.
    pub per_class: Vec<ClassExplanation>,
}

fn serialize_sample<S: serde::Serializer>(x: &IntervalSample, s: S) -> std::result::Result<S::Ok, S::Error> {
    use serde::ser::SerializeStruct;
    let opt = |v: &[f64]| v.iter().map(|x| (!x.is_nan()).then_some(*x)).collect::<Vec<_>>();
    let mut st = s.serialize_struct("IntervalSample", 2)?;
    st.serialize_field("lower", &opt(x.lower()))?;
    st.serialize_field("upper", &opt(x.upper()))?;
    st.end()
}

fn distances(b: &Hyperbox, x: &IntervalSample) -> Vec<Option<f64>> {
    (0..b.dims())
        .map(|j| {
            let xj = x.midpoint(j)?;
            b.is_set(j).then(|| (xj - b.max[j]).max(b.min[j] - xj).max(0.0))
        })
        .collect()
}

/// Winning box of every class for `x`, ordered like the prediction rule.
pub fn explain(model: &TrainedModel, x: &IntervalSample) -> Result<Explanation> {
    if model.boxes.is_empty() {
        return Err(HyperboxError::EmptyModel);
    }
    model.check_sample(x)?;
    let any_labeled = model.boxes.iter().any(|b| b.label.is_labeled());
    let mut best: BTreeMap<ClassLabel, (f64, &Hyperbox)> = BTreeMap::new();
    for b in model.boxes.iter().filter(|b| !any_labeled || b.label.is_labeled()) {
        let candidate = (model.membership_unchecked(b, x), b);
        best.entry(b.label)
            .and_modify(|cur| {
                if winner_order(candidate, *cur).is_lt() {
                    *cur = candidate;
                }
            })
            .or_insert(candidate);
    }
    let mut rows: Vec<(f64, &Hyperbox)> = best.into_values().collect();
    rows.sort_by(|a, b| winner_order(*a, *b));
    let per_class: Vec<ClassExplanation> = rows
        .into_iter()
        .map(|(membership, b)| ClassExplanation {
            class: b.label,
            box_id: b.id,
            membership,
            min: b.min.clone(),
            max: b.max.clone(),
            per_feature_distance: distances(b, x),
        })
        .collect();
    Ok(Explanation { sample: x.clone(), predicted: per_class[0].class, per_class })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ParallelCoordinateRow {
    pub series: String,
    pub feature: usize,
    pub value: Option<f64>,
}

/// Rows for a parallel-coordinates chart: the sample, then the min and max
/// vertex of each class's winning box. Missing values and unset dims are `None`.
pub fn export_parallel_coordinates(expl: &Explanation) -> Result<Vec<ParallelCoordinateRow>> {
    let x = &expl.sample;
    if !x.is_point() {
        return Err(HyperboxError::InvalidInput("parallel coordinates need a point sample".into()));
    }
    let n = x.len();
    let mut rows = Vec::with_capacity(n * (1 + 2 * expl.per_class.len()));
    for j in 0..n {
        rows.push(ParallelCoordinateRow { series: "sample".into(), feature: j, value: x.midpoint(j) });
    }
    for c in &expl.per_class {
        let set = |j: usize| c.min[j] <= c.max[j];
        let tag = c.class.code();
        for j in 0..n {
            rows.push(ParallelCoordinateRow {
                series: format!("class_{tag}_min"),
                feature: j,
                value: set(j).then_some(c.min[j]),
            });
        }
        for j in 0..n {
            rows.push(ParallelCoordinateRow {
                series: format!("class_{tag}_max"),
                feature: j,
                value: set(j).then_some(c.max[j]),
            });
        }
    }
    Ok(rows)
}

/// Writes rows as CSV with header `series,feature,value`.
pub fn write_parallel_coordinates_csv<W: Write>(rows: &[ParallelCoordinateRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let wrap = |e: csv::Error| HyperboxError::Csv { path: "<output>".into(), reason: e.to_string() };
    w.write_record(["series", "feature", "value"]).map_err(wrap)?;
    for r in rows {
        let value = r.value.map(|v| v.to_string()).unwrap_or_default();
        w.write_record([r.series.as_str(), &r.feature.to_string(), &value]).map_err(wrap)?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundaryBox {
    pub id: u64,
    pub label: ClassLabel,
    #[serde(rename = "V")]
    pub min: Vec<f64>,
    #[serde(rename = "W")]
    pub max: Vec<f64>,
}

/// Predicted labels over a `resolution x resolution` lattice of cell
/// centres in the unit square, plus the box outlines.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundaryGrid {
    pub resolution: usize,
    /// Row-major: row `r` holds cells with second-feature centre `(r + 0.5) / resolution`.
    pub labels: Vec<u32>,
    pub boxes: Vec<BoundaryBox>,
}

impl BoundaryGrid {
    pub fn at(&self, row: usize, col: usize) -> u32 {
        self.labels[row * self.resolution + col]
    }
}

pub fn decision_boundary_grid(model: &TrainedModel, resolution: usize) -> Result<BoundaryGrid> {
    if model.n_features != 2 {
        return Err(HyperboxError::InvalidInput(format!(
            "decision boundaries need 2 features, model has {}",
            model.n_features
        )));
    }
    if resolution < 2 {
        return Err(HyperboxError::param("resolution", "must be at least 2"));
    }
    let centre = |i: usize| (i as f64 + 0.5) / resolution as f64;
    let mut labels = Vec::with_capacity(resolution * resolution);
    for row in 0..resolution {
        for col in 0..resolution {
            let x = IntervalSample::point(vec![centre(col), centre(row)])?;
            labels.push(model.predict(&x)?.label.code());
        }
    }
    let boxes = model
        .boxes
        .iter()
        .map(|b| BoundaryBox { id: b.id, label: b.label, min: b.min.clone(), max: b.max.clone() })
        .collect();
    Ok(BoundaryGrid { resolution, labels, boxes })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Algorithm, ModelParams};

    fn bx(id: u64, label: u32, min: Vec<f64>, max: Vec<f64>) -> Hyperbox {
        Hyperbox { id, label: ClassLabel::Class(label), min, max, sample_count: 1 }
    }

    fn model(boxes: Vec<Hyperbox>) -> TrainedModel {
        let n = boxes[0].dims();
        let mut m = TrainedModel::new(Algorithm::OnlnGfmm, ModelParams::gfmm(0.5), n);
        m.classes = boxes.iter().map(|b| b.label.code()).collect();
        m.boxes = boxes;
        m
    }

    fn four_feature_model() -> TrainedModel {
        model(vec![
            bx(0, 1, vec![0.1, 0.1, 0.1, 0.1], vec![0.4, 0.4, 0.4, 0.3]), // green
            bx(1, 2, vec![0.3, 0.3, 0.3, 0.9], vec![0.6, 0.6, 0.6, 1.0]), // blue
            bx(2, 1, vec![0.0, 0.9, 0.0, 0.0], vec![0.05, 1.0, 0.05, 0.05]),
        ])
    }

    #[test]
    fn decisive_fourth_feature() {
        let m = four_feature_model();
        let x = IntervalSample::point(vec![0.35, 0.35, 0.35, 0.5]).unwrap();
        let e = explain(&m, &x).unwrap();
        assert_eq!(e.predicted, ClassLabel::Class(1));
        assert_eq!(e.per_class.len(), 2);
        assert_eq!(e.per_class[0].box_id, 0);
        let d = &e.per_class[0].per_feature_distance;
        assert_eq!(&d[..3], &[Some(0.0); 3]);
        assert!((d[3].unwrap() - 0.2).abs() < 1e-12);
        assert!(e.per_class[0].membership > e.per_class[1].membership);
        assert_eq!(e.predicted, m.predict(&x).unwrap().label);
    }

    #[test]
    fn inside_box_and_single_class() {
        let m = model(vec![bx(0, 3, vec![0.2, 0.2], vec![0.4, 0.4])]);
        let e = explain(&m, &IntervalSample::point(vec![0.3, 0.3]).unwrap()).unwrap();
        assert_eq!(e.per_class.len(), 1);
        assert_eq!(e.predicted, ClassLabel::Class(3));
        assert_eq!(e.per_class[0].membership, 1.0);
        assert_eq!(e.per_class[0].per_feature_distance, vec![Some(0.0); 2]);
    }

    #[test]
    fn parallel_rows() {
        let m = four_feature_model();
        let e = explain(&m, &IntervalSample::point(vec![0.35, 0.35, 0.35, 0.5]).unwrap()).unwrap();
        let rows = export_parallel_coordinates(&e).unwrap();
        assert_eq!(rows.len(), 20);
        assert_eq!(rows[0].series, "sample");
        assert_eq!(rows.iter().take(4).map(|r| r.feature).collect::<Vec<_>>(), vec![0, 1, 2, 3]);
        assert_eq!(rows[4].series, "class_1_min");

        let one = model(vec![bx(0, 1, vec![0.2], vec![0.4])]);
        let e = explain(&one, &IntervalSample::point(vec![0.9]).unwrap()).unwrap();
        assert_eq!(export_parallel_coordinates(&e).unwrap().len(), 3);

        let iv = IntervalSample::interval(vec![0.1], vec![0.3]).unwrap();
        let e = explain(&one, &iv).unwrap();
        assert!(export_parallel_coordinates(&e).is_err());

        let mut buf = Vec::new();
        write_parallel_coordinates_csv(
            &[ParallelCoordinateRow { series: "sample".into(), feature: 0, value: None }],
            &mut buf,
        )
        .unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "series,feature,value\nsample,0,\n");
    }

    #[test]
    fn boundary_split_down_the_middle() {
        let m = model(vec![bx(0, 1, vec![0.1, 0.1], vec![0.3, 0.9]), bx(1, 2, vec![0.7, 0.1], vec![0.9, 0.9])]);
        let g = decision_boundary_grid(&m, 10).unwrap();
        assert_eq!(g.labels.len(), 100);
        for row in 0..10 {
            for col in 0..10 {
                assert_eq!(g.at(row, col), if col < 5 { 1 } else { 2 });
            }
        }
        assert_eq!(decision_boundary_grid(&m, 2).unwrap().labels.len(), 4);
        assert!(decision_boundary_grid(&m, 1).is_err());
        let one = model(vec![bx(0, 4, vec![0.2, 0.2], vec![0.3, 0.3])]);
        assert!(decision_boundary_grid(&one, 4).unwrap().labels.iter().all(|&l| l == 4));
        let three = model(vec![bx(0, 1, vec![0.2; 3], vec![0.3; 3])]);
        assert!(decision_boundary_grid(&three, 4).is_err());
    }
}
