#[path = "../../core/tests/support/systems.rs"]
mod systems;

use std::fs;
use std::path::{Path, PathBuf};

use minfine::{load_model, to_json, write_model, LoadError};
use systems::*;

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

#[test]
fn micro_fixture_loads_as_the_hand_built_system() {
    let loaded = load_model(&fixture("micro.json")).unwrap();
    assert_eq!(loaded.model.regions().len(), 1);
    assert_eq!(loaded.model.components().len(), 2);
    assert_eq!(to_json(&loaded.model), to_json(&micro()));
    assert_eq!(loaded.input_hash.len(), 64);
}

#[test]
fn csv_reference_reads_column_by_header() {
    let inline = load_model(&fixture("micro.json")).unwrap();
    let csv = load_model(&fixture("micro_csv.json")).unwrap();
    assert_eq!(to_json(&inline.model), to_json(&csv.model));
    assert_ne!(inline.input_hash, csv.input_hash);
}

#[test]
fn hash_covers_referenced_csv_bytes() {
    let dir = tempfile::tempdir().unwrap();
    fs::copy(fixture("micro_csv.json"), dir.path().join("m.json")).unwrap();
    fs::write(dir.path().join("micro_demand.csv"), "t,load\n0,10\n1,10\n").unwrap();
    let a = load_model(&dir.path().join("m.json")).unwrap().input_hash;
    fs::write(dir.path().join("micro_demand.csv"), "t,load\n0,10\n1,10.0\n").unwrap();
    let b = load_model(&dir.path().join("m.json")).unwrap().input_hash;
    assert_ne!(a, b);
}

#[test]
fn unknown_key_names_its_pointer() {
    let dir = tempfile::tempdir().unwrap();
    let text = fs::read_to_string(fixture("micro.json")).unwrap();
    let text = text.replacen("\"name\": \"demand\",", "\"name\": \"demand\", \"color\": \"red\",", 1);
    let path = dir.path().join("m.json");
    fs::write(&path, text).unwrap();
    match load_model(&path) {
        Err(LoadError::Schema { pointer, message }) => {
            assert_eq!(pointer, "/components/1/color", "{message}");
            assert!(message.contains("color"));
        }
        other => panic!("unexpected {other:?}"),
    }
}

#[test]
fn unknown_top_level_key_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let text = fs::read_to_string(fixture("micro.json")).unwrap();
    let text = text.replacen('{', "{ \"color\": 1,", 1);
    let path = dir.path().join("m.json");
    fs::write(&path, text).unwrap();
    match load_model(&path) {
        Err(LoadError::Schema { pointer, .. }) => assert_eq!(pointer, "/color"),
        other => panic!("unexpected {other:?}"),
    }
}

fn hourly_document(dir: &Path, rows: usize) -> PathBuf {
    let mut csv = String::from("hour,load\n");
    for t in 0..rows {
        csv.push_str(&format!("{t},{}\n", 1 + t % 3));
    }
    fs::write(dir.join("load.csv"), csv).unwrap();
    let doc = r#"{
      "meta": { "name": "year", "numSteps": 8760, "hoursPerStep": 1.0 },
      "regions": ["R1"],
      "commodities": [{ "label": "electricity", "unit": "MWh" }],
      "components": [
        { "type": "source", "name": "plant", "commodity": "electricity",
          "capacity": { "hasCapacityVariable": true } },
        { "type": "sink", "name": "demand", "commodity": "electricity",
          "operationRateFix": { "file": "load.csv", "column": "load" } }
      ]
    }"#;
    let path = dir.join("year.json");
    fs::write(&path, doc).unwrap();
    path
}

#[test]
fn short_csv_reports_series_length() {
    let dir = tempfile::tempdir().unwrap();
    let err = load_model(&hourly_document(dir.path(), 8759)).unwrap_err();
    assert!(err.to_string().contains("series length 8759 ≠ 8760"), "{err}");
    assert!(load_model(&hourly_document(dir.path(), 8760)).is_ok());
}

#[test]
fn non_numeric_cell_reports_line_and_column() {
    let dir = tempfile::tempdir().unwrap();
    fs::copy(fixture("micro_csv.json"), dir.path().join("m.json")).unwrap();
    fs::write(dir.path().join("micro_demand.csv"), "t,load\n0,10\n1,ten\n").unwrap();
    match load_model(&dir.path().join("m.json")) {
        Err(LoadError::Csv { line, column, .. }) => assert_eq!((line, column), (3, 2)),
        other => panic!("unexpected {other:?}"),
    }
}

#[test]
fn missing_column_and_missing_file() {
    let dir = tempfile::tempdir().unwrap();
    fs::copy(fixture("micro_csv.json"), dir.path().join("m.json")).unwrap();
    assert!(matches!(load_model(&dir.path().join("m.json")), Err(LoadError::Read { .. })));
    fs::write(dir.path().join("micro_demand.csv"), "t,demand\n0,10\n1,10\n").unwrap();
    assert!(matches!(load_model(&dir.path().join("m.json")), Err(LoadError::MissingColumn { .. })));
}

#[test]
fn invalid_json_reports_position() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("m.json");
    fs::write(&path, "{\n  \"meta\": ,\n}").unwrap();
    match load_model(&path) {
        Err(LoadError::Syntax { line, .. }) => assert_eq!(line, 2),
        other => panic!("unexpected {other:?}"),
    }
}

#[test]
fn invalid_model_lists_diagnostics() {
    let dir = tempfile::tempdir().unwrap();
    let text = fs::read_to_string(fixture("micro.json")).unwrap();
    let text = text.replace("\"investPerCapacity\": 100.0", "\"investPerCapacity\": -100.0");
    let path = dir.path().join("m.json");
    fs::write(&path, text).unwrap();
    match load_model(&path) {
        Err(LoadError::Invalid(d)) => assert!(d.iter().any(|d| d.component.as_deref() == Some("source"))),
        other => panic!("unexpected {other:?}"),
    }
}

#[test]
fn written_models_load_back_unchanged() {
    let dir = tempfile::tempdir().unwrap();
    let models = [micro(), micro_with_storage(), two_generator_dispatch(), seasonal(), four_days(), co2_capped(12.0), co2_capped(f64::INFINITY)];
    for m in models {
        let path = dir.path().join(format!("{}.json", m.name()));
        write_model(&m, &path).unwrap();
        let back = load_model(&path).unwrap().model;
        assert_eq!(back, m, "{}", m.name());
        assert_eq!(to_json(&back), to_json(&m));
    }
}
