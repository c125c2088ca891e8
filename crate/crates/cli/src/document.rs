//! JSON model documents with inline or CSV-referenced time series.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};
use serde_path_to_error::Segment;
use sha2::{Digest, Sha256};

use minfine_core::{
    validate_model, AnnualLimit, Commodity, Component, EnergySystemModel, TimeStructure,
};

use crate::error::LoadError;
use crate::fsutil::write_atomic;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct Meta {
    pub name: String,
    pub num_steps: usize,
    pub hours_per_step: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct ModelDocument {
    pub meta: Meta,
    pub regions: Vec<String>,
    pub commodities: Vec<Commodity>,
    pub components: Vec<Component>,
    #[serde(default)]
    pub annual_limits: Vec<AnnualLimit>,
}

impl ModelDocument {
    pub fn from_model(model: &EnergySystemModel) -> Self {
        ModelDocument {
            meta: Meta {
                name: model.name().to_string(),
                num_steps: model.time().num_steps(),
                hours_per_step: model.time().hours_per_step(),
            },
            regions: model.regions().to_vec(),
            commodities: model.commodities().to_vec(),
            components: model.components().to_vec(),
            annual_limits: model.annual_limits().to_vec(),
        }
    }

    /// Builds and validates the model.
    pub fn into_model(self) -> Result<EnergySystemModel, LoadError> {
        let at = |pointer: &str| {
            let pointer = pointer.to_string();
            move |source| LoadError::Model { pointer, source }
        };
        let time = TimeStructure::new(self.meta.num_steps, self.meta.hours_per_step).map_err(at("/meta"))?;
        let mut model = EnergySystemModel::new(self.regions, self.commodities, time).map_err(at(""))?;
        model.set_name(self.meta.name);
        for (i, c) in self.components.into_iter().enumerate() {
            model.add_component(c).map_err(at(&format!("/components/{i}")))?;
        }
        for (i, l) in self.annual_limits.into_iter().enumerate() {
            model.add_annual_limit(l).map_err(at(&format!("/annualLimits/{i}")))?;
        }
        let diagnostics = validate_model(&model);
        if !diagnostics.is_empty() {
            return Err(LoadError::Invalid(diagnostics));
        }
        Ok(model)
    }
}

#[derive(Debug, Clone)]
pub struct LoadedModel {
    pub model: EnergySystemModel,
    /// SHA-256 over the document and every referenced CSV file.
    pub input_hash: String,
}

const SERIES_KEYS: [&str; 2] = ["operationRateMax", "operationRateFix"];

struct Inputs {
    dir: PathBuf,
    files: Vec<(String, Vec<u8>)>,
}

impl Inputs {
    fn bytes(&mut self, name: &str) -> Result<&[u8], LoadError> {
        let i = match self.files.iter().position(|(n, _)| n == name) {
            Some(i) => i,
            None => {
                let path = self.dir.join(name);
                let bytes = fs::read(&path).map_err(|source| LoadError::Read { path, source })?;
                self.files.push((name.to_string(), bytes));
                self.files.len() - 1
            }
        };
        Ok(&self.files[i].1)
    }

    fn column(&mut self, name: &str, column: &str) -> Result<Vec<f64>, LoadError> {
        let file = self.dir.join(name);
        let bytes = self.bytes(name)?;
        read_csv_column(bytes, column).map_err(|e| match e {
            CsvIssue::Missing => LoadError::MissingColumn { file: file.clone(), column: column.to_string() },
            CsvIssue::At { line, column, message } => LoadError::Csv { file: file.clone(), line, column, message },
        })
    }
}

enum CsvIssue {
    Missing,
    At { line: u64, column: usize, message: String },
}

fn read_csv_column(bytes: &[u8], column: &str) -> Result<Vec<f64>, CsvIssue> {
    let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(bytes);
    let headers = reader.headers().map_err(|e| csv_issue(&e, 0))?.clone();
    let idx = headers.iter().position(|h| h == column).ok_or(CsvIssue::Missing)?;
    let mut out = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| csv_issue(&e, idx + 1))?;
        let line = record.position().map_or(0, |p| p.line());
        let cell = record.get(idx).ok_or_else(|| CsvIssue::At {
            line,
            column: idx + 1,
            message: "missing cell".into(),
        })?;
        let v: f64 = cell.parse().map_err(|_| CsvIssue::At {
            line,
            column: idx + 1,
            message: format!("non-numeric value {cell:?}"),
        })?;
        out.push(v);
    }
    Ok(out)
}

fn csv_issue(e: &csv::Error, column: usize) -> CsvIssue {
    CsvIssue::At { line: e.position().map_or(0, |p| p.line()), column, message: e.to_string() }
}

fn file_reference(v: &Value) -> Option<(&str, &str)> {
    let o = v.as_object()?;
    if o.len() != 2 {
        return None;
    }
    Some((o.get("file")?.as_str()?, o.get("column")?.as_str()?))
}

fn series_values(v: &Value, inputs: &mut Inputs) -> Result<Option<Value>, LoadError> {
    match file_reference(v) {
        Some((file, column)) => Ok(Some(Value::from(inputs.column(file, column)?))),
        None => Ok(None),
    }
}

/// Rewrites every series into the `{region: [values]}` form.
fn resolve_series(root: &mut Value, inputs: &mut Inputs) -> Result<(), LoadError> {
    let all_regions: Vec<Value> = root.get("regions").and_then(Value::as_array).cloned().unwrap_or_default();
    let Some(components) = root.get_mut("components").and_then(Value::as_array_mut) else {
        return Ok(());
    };
    for comp in components.iter_mut().filter_map(Value::as_object_mut) {
        let regions = match comp.get("regions").and_then(Value::as_array) {
            Some(r) if !r.is_empty() => r.clone(),
            _ => all_regions.clone(),
        };
        for key in SERIES_KEYS {
            let Some(value) = comp.get_mut(key) else { continue };
            let whole = match value {
                Value::Array(_) => Some(value.clone()),
                _ => series_values(value, inputs)?,
            };
            if let Some(series) = whole {
                let map: Map<String, Value> = regions
                    .iter()
                    .filter_map(|r| r.as_str())
                    .map(|r| (r.to_string(), series.clone()))
                    .collect();
                *value = Value::Object(map);
            } else if let Value::Object(per_region) = value {
                for v in per_region.values_mut() {
                    if let Some(resolved) = series_values(v, inputs)? {
                        *v = resolved;
                    }
                }
            }
        }
    }
    Ok(())
}

fn json_pointer(path: &serde_path_to_error::Path, message: &str) -> String {
    let mut segments: Vec<String> = path
        .iter()
        .filter_map(|s| match s {
            Segment::Seq { index } => Some(index.to_string()),
            Segment::Map { key } => Some(key.replace('~', "~0").replace('/', "~1")),
            Segment::Enum { variant } => Some(variant.clone()),
            Segment::Unknown => None,
        })
        .collect();
    if let Some(rest) = message.strip_prefix("unknown field `") {
        if let Some(name) = rest.split('`').next() {
            if segments.last().map(String::as_str) != Some(name) {
                segments.push(name.to_string());
            }
        }
    }
    segments.iter().map(|s| format!("/{s}")).collect()
}

/// Parses a document from bytes; relative CSV references resolve against `dir`.
pub fn parse_document(bytes: &[u8], dir: &Path, origin: &Path) -> Result<(ModelDocument, String), LoadError> {
    let mut root: Value = serde_json::from_slice(bytes).map_err(|e| LoadError::Syntax {
        path: origin.to_path_buf(),
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    let mut inputs = Inputs { dir: dir.to_path_buf(), files: Vec::new() };
    resolve_series(&mut root, &mut inputs)?;
    let doc: ModelDocument = serde_path_to_error::deserialize(root).map_err(|e| {
        let message = e.inner().to_string();
        LoadError::Schema { pointer: json_pointer(e.path(), &message), message }
    })?;
    let mut hasher = Sha256::new();
    hasher.update(bytes);
    for (name, data) in &inputs.files {
        hasher.update(name.as_bytes());
        hasher.update([0u8]);
        hasher.update(data);
    }
    Ok((doc, hex::encode(hasher.finalize())))
}

pub fn load_model(path: &Path) -> Result<LoadedModel, LoadError> {
    let bytes = fs::read(path).map_err(|source| LoadError::Read { path: path.to_path_buf(), source })?;
    let dir = path.parent().unwrap_or(Path::new("."));
    let (doc, input_hash) = parse_document(&bytes, dir, path)?;
    Ok(LoadedModel { model: doc.into_model()?, input_hash })
}

/// Canonical JSON of a model with all series inline.
pub fn to_json(model: &EnergySystemModel) -> String {
    let mut s = serde_json::to_string_pretty(&ModelDocument::from_model(model)).expect("documents serialize");
    s.push('\n');
    s
}

pub fn write_model(model: &EnergySystemModel, path: &Path) -> std::io::Result<()> {
    write_atomic(path, to_json(model).as_bytes())
}
