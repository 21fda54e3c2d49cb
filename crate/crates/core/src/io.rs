//! CSV ingestion and JSON model files.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::ensemble::{Aggregation, EnsembleModel};
use crate::error::{HyperboxError, Result};
use crate::harness::scaler::ScalerState;
use crate::hyperbox::{ClassLabel, Dataset, Hyperbox, IntervalSample};
use crate::learner::Model;
use crate::model::{Algorithm, ModelParams, TrainedModel};

pub const FORMAT_VERSION: u32 = 1;

pub const DEFAULT_MISSING_TOKENS: [&str; 3] = ["", "NaN", "?"];

/// Column layout of a dataset and the mapping from class names to ids.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DatasetSchema {
    pub feature_names: Vec<String>,
    pub label_column: String,
    /// Class `i + 1` is named `class_names[i]`.
    pub class_names: Vec<String>,
}

impl DatasetSchema {
    pub fn n_features(&self) -> usize {
        self.feature_names.len()
    }

    pub fn class_id(&self, name: &str) -> Option<u32> {
        self.class_names.iter().position(|c| c == name).map(|i| i as u32 + 1)
    }

    pub fn class_name(&self, label: ClassLabel) -> Option<&str> {
        match label {
            ClassLabel::Unlabeled => Some(""),
            ClassLabel::Class(id) => self.class_names.get(id as usize - 1).map(String::as_str),
        }
    }
}

fn csv_err(path: &Path, reason: impl Into<String>) -> HyperboxError {
    HyperboxError::Csv { path: path.to_path_buf(), reason: reason.into() }
}

struct RawTable {
    header: Vec<String>,
    rows: Vec<Vec<String>>,
}

fn read_table(path: &Path) -> Result<RawTable> {
    let mut reader =
        csv::ReaderBuilder::new().flexible(true).from_path(path).map_err(|e| csv_err(path, e.to_string()))?;
    let header: Vec<String> =
        reader.headers().map_err(|e| csv_err(path, e.to_string()))?.iter().map(|h| h.trim().to_string()).collect();
    let mut seen = HashSet::new();
    if let Some(dup) = header.iter().find(|h| !seen.insert(h.as_str())) {
        return Err(csv_err(path, format!("duplicate column `{dup}`")));
    }
    let mut rows = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let record = record.map_err(|e| csv_err(path, e.to_string()))?;
        if record.len() != header.len() {
            return Err(csv_err(
                path,
                format!("row {} has {} fields, header has {}", i + 1, record.len(), header.len()),
            ));
        }
        rows.push(record.iter().map(|c| c.trim().to_string()).collect());
    }
    Ok(RawTable { header, rows })
}

fn parse_feature(path: &Path, cell: &str, row: usize, column: &str, missing: &[&str]) -> Result<f64> {
    if missing.contains(&cell) {
        return Ok(f64::NAN);
    }
    match cell.parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(v),
        _ => Err(csv_err(path, format!("row {row}, column `{column}`: `{cell}` is not a number"))),
    }
}

/// Reads a labelled CSV file. Class ids are assigned in order of first
/// appearance starting at 1; an empty label cell means unlabeled.
pub fn read_csv(
    path: impl AsRef<Path>,
    label_column: &str,
    missing_tokens: &[&str],
) -> Result<(Dataset, DatasetSchema)> {
    let path = path.as_ref();
    let table = read_table(path)?;
    let label_idx = table
        .header
        .iter()
        .position(|h| h == label_column)
        .ok_or_else(|| csv_err(path, format!("no label column `{label_column}`")))?;
    let feature_cols: Vec<usize> = (0..table.header.len()).filter(|&c| c != label_idx).collect();
    let mut schema = DatasetSchema {
        feature_names: feature_cols.iter().map(|&c| table.header[c].clone()).collect(),
        label_column: label_column.to_string(),
        class_names: Vec::new(),
    };
    let mut ids: HashMap<String, u32> = HashMap::new();
    let mut samples = Vec::with_capacity(table.rows.len());
    let mut labels = Vec::with_capacity(table.rows.len());
    for (r, row) in table.rows.iter().enumerate() {
        let values = feature_cols
            .iter()
            .map(|&c| parse_feature(path, &row[c], r + 1, &table.header[c], missing_tokens))
            .collect::<Result<Vec<_>>>()?;
        samples.push(IntervalSample::point(values)?);
        let name = &row[label_idx];
        labels.push(if name.is_empty() {
            ClassLabel::Unlabeled
        } else {
            let next = ids.len() as u32 + 1;
            let id = *ids.entry(name.clone()).or_insert_with(|| {
                schema.class_names.push(name.clone());
                next
            });
            ClassLabel::Class(id)
        });
    }
    Ok((Dataset::new(samples, labels)?, schema))
}

/// Reads a CSV file laid out by an existing schema. Feature columns are
/// looked up by name; the label column is optional. Labels not known to the
/// schema are an error.
pub fn read_csv_with_schema(
    path: impl AsRef<Path>,
    schema: &DatasetSchema,
    missing_tokens: &[&str],
) -> Result<(Dataset, bool)> {
    let path = path.as_ref();
    let table = read_table(path)?;
    let column = |name: &str| table.header.iter().position(|h| h == name);
    let feature_cols = schema
        .feature_names
        .iter()
        .map(|name| column(name).ok_or_else(|| csv_err(path, format!("missing feature column `{name}`"))))
        .collect::<Result<Vec<_>>>()?;
    let label_idx = column(&schema.label_column);
    let mut samples = Vec::with_capacity(table.rows.len());
    let mut labels = Vec::with_capacity(table.rows.len());
    for (r, row) in table.rows.iter().enumerate() {
        let values = feature_cols
            .iter()
            .map(|&c| parse_feature(path, &row[c], r + 1, &table.header[c], missing_tokens))
            .collect::<Result<Vec<_>>>()?;
        samples.push(IntervalSample::point(values)?);
        let label = match label_idx.map(|c| row[c].as_str()) {
            None | Some("") => ClassLabel::Unlabeled,
            Some(name) => {
                ClassLabel::Class(schema.class_id(name).ok_or_else(|| HyperboxError::UnknownLabel(name.to_string()))?)
            }
        };
        labels.push(label);
    }
    Ok((Dataset::new(samples, labels)?, label_idx.is_some()))
}

/// Writes point samples back out with the schema's column names.
pub fn write_csv(path: impl AsRef<Path>, data: &Dataset, schema: &DatasetSchema) -> Result<()> {
    let path = path.as_ref();
    let mut w = csv::Writer::from_path(path).map_err(|e| csv_err(path, e.to_string()))?;
    let mut header = schema.feature_names.clone();
    header.push(schema.label_column.clone());
    w.write_record(&header).map_err(|e| csv_err(path, e.to_string()))?;
    for (x, label) in data.iter() {
        let mut record: Vec<String> =
            (0..x.len()).map(|j| x.midpoint(j).map(|v| v.to_string()).unwrap_or_default()).collect();
        let name = schema.class_name(label).ok_or_else(|| HyperboxError::UnknownLabel(label.to_string()))?;
        record.push(name.to_string());
        w.write_record(&record).map_err(|e| csv_err(path, e.to_string()))?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct MemberDoc {
    algorithm: Algorithm,
    params: ModelParams,
    n_features: usize,
    classes: BTreeSet<u32>,
    boxes: Vec<Hyperbox>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SingleDoc {
    format_version: u32,
    kind: String,
    algorithm: Algorithm,
    params: ModelParams,
    n_features: usize,
    classes: BTreeSet<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    scaler: Option<ScalerState>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    schema: Option<DatasetSchema>,
    boxes: Vec<Hyperbox>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct EnsembleDoc {
    format_version: u32,
    kind: String,
    aggregation: Aggregation,
    seed: u64,
    n_features: usize,
    classes: BTreeSet<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    scaler: Option<ScalerState>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    schema: Option<DatasetSchema>,
    members: Vec<MemberDoc>,
    feature_subsets: Vec<Vec<usize>>,
}

fn member_doc(m: &TrainedModel) -> MemberDoc {
    MemberDoc {
        algorithm: m.algorithm,
        params: m.params.clone(),
        n_features: m.n_features,
        classes: m.classes.clone(),
        boxes: m.boxes.clone(),
    }
}

fn from_member(doc: MemberDoc) -> TrainedModel {
    TrainedModel {
        algorithm: doc.algorithm,
        params: doc.params,
        n_features: doc.n_features,
        classes: doc.classes,
        boxes: doc.boxes,
        scaler: None,
        schema: None,
    }
}

/// Serializes a model to its JSON document. Floats use shortest round-trip
/// formatting, so a save/load/save cycle is byte-identical.
pub fn model_to_json(model: &Model) -> Result<String> {
    let mut text = match model {
        Model::Single(m) => serde_json::to_string_pretty(&SingleDoc {
            format_version: FORMAT_VERSION,
            kind: "single".into(),
            algorithm: m.algorithm,
            params: m.params.clone(),
            n_features: m.n_features,
            classes: m.classes.clone(),
            scaler: m.scaler.clone(),
            schema: m.schema.clone(),
            boxes: m.boxes.clone(),
        })?,
        Model::Ensemble(e) => {
            let classes = e.members.iter().flat_map(|m| m.classes.iter().copied()).collect();
            serde_json::to_string_pretty(&EnsembleDoc {
                format_version: FORMAT_VERSION,
                kind: "ensemble".into(),
                aggregation: e.aggregation,
                seed: e.seed,
                n_features: e.n_features,
                classes,
                scaler: e.scaler.clone(),
                schema: e.schema.clone(),
                members: e.members.iter().map(member_doc).collect(),
                feature_subsets: e.feature_subsets.clone(),
            })?
        }
    };
    text.push('\n');
    Ok(text)
}

/// Parses and validates a model document, including the non-overlap
/// invariant of every single model.
pub fn model_from_json(text: &str) -> Result<Model> {
    let value: Value = serde_json::from_str(text)?;
    let version = value
        .get("format_version")
        .and_then(Value::as_u64)
        .ok_or_else(|| HyperboxError::Invariant("missing format_version".into()))?;
    if version != FORMAT_VERSION as u64 {
        return Err(HyperboxError::UnsupportedVersion(version as u32));
    }
    let model = match value.get("kind").and_then(Value::as_str) {
        Some("single") => {
            let doc: SingleDoc = serde_json::from_value(value)?;
            Model::Single(TrainedModel {
                algorithm: doc.algorithm,
                params: doc.params,
                n_features: doc.n_features,
                classes: doc.classes,
                boxes: doc.boxes,
                scaler: doc.scaler,
                schema: doc.schema,
            })
        }
        Some("ensemble") => {
            let doc: EnsembleDoc = serde_json::from_value(value)?;
            let members: Vec<TrainedModel> = doc.members.into_iter().map(from_member).collect();
            let member_classes: BTreeSet<u32> = members.iter().flat_map(|m| m.classes.iter().copied()).collect();
            if member_classes != doc.classes {
                return Err(HyperboxError::Invariant("ensemble class set differs from its members".into()));
            }
            Model::Ensemble(EnsembleModel {
                members,
                feature_subsets: doc.feature_subsets,
                aggregation: doc.aggregation,
                seed: doc.seed,
                n_features: doc.n_features,
                scaler: doc.scaler,
                schema: doc.schema,
            })
        }
        other => return Err(HyperboxError::Invariant(format!("unknown model kind {other:?}"))),
    };
    if let Some(schema) = model.schema() {
        if schema.n_features() != model.n_features() {
            return Err(HyperboxError::Invariant("schema and model disagree on feature count".into()));
        }
    }
    model.validate()?;
    Ok(model)
}

pub fn save_model(model: &Model, path: impl AsRef<Path>) -> Result<()> {
    fs::write(path, model_to_json(model)?)?;
    Ok(())
}

pub fn load_model(path: impl AsRef<Path>) -> Result<Model> {
    model_from_json(&fs::read_to_string(path)?)
}
