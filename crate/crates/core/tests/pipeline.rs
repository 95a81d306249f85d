use serde_json::Value;

use dragon_energetics::dataset::table2;
use dragon_energetics::mesh::fixtures::dragonoid;
use dragon_energetics::mesh::{load_mesh, write_obj, write_stl_ascii, write_stl_binary, Axis, LengthMeasure};
use dragon_energetics::mode::{ComputationMode, ModeSelection};
use dragon_energetics::pipeline::{run_forward, run_report, PipelineConfig, RouteChoice, Stage};

/// Every float in the report must sit in a `{value, unit}` pair; integers are counts.
fn assert_floats_labelled(v: &Value, path: &str) {
    match v {
        Value::Object(map) => {
            let is_quantity = map.len() == 2 && map.contains_key("value") && map["unit"].is_string();
            if is_quantity {
                return;
            }
            for (k, child) in map {
                assert_floats_labelled(child, &format!("{path}.{k}"));
            }
        }
        Value::Array(items) => {
            for (i, child) in items.iter().enumerate() {
                assert_floats_labelled(child, &format!("{path}[{i}]"));
            }
        }
        Value::Number(n) => assert!(!n.is_f64(), "unlabelled float at {path}: {n}"),
        _ => {}
    }
}

#[test]
fn full_report_labels_every_float() {
    let config = PipelineConfig { mesh: Some("builtin:dragonoid".into()), ..Default::default() };
    let report = run_report(&config).unwrap();
    assert!(report.worst_error().is_none());
    assert_floats_labelled(&serde_json::to_value(&report).unwrap(), "");
}

#[test]
fn full_report_is_deterministic() {
    let config = PipelineConfig { mesh: Some("builtin:dragonoid".into()), ..Default::default() };
    let a = serde_json::to_string_pretty(&run_report(&config).unwrap()).unwrap();
    let b = serde_json::to_string_pretty(&run_report(&config).unwrap()).unwrap();
    assert_eq!(a, b);
}

#[test]
fn dataset_from_csv_file_matches_builtin() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("table2.csv");
    std::fs::write(&path, table2().to_csv()).unwrap();
    let from_file = PipelineConfig { dataset: path.to_str().unwrap().into(), ..Default::default() };
    let a = run_forward(&from_file).unwrap();
    let b = run_forward(&PipelineConfig::default()).unwrap();
    assert_eq!(a.rows, b.rows);
    assert_eq!(a.fits, b.fits);
}

#[test]
fn mesh_files_in_every_format_give_the_same_direct_mass() {
    let dir = tempfile::tempdir().unwrap();
    let mesh = dragonoid();
    let files = [
        ("d.obj", write_obj(&mesh).into_bytes()),
        ("d.stl", write_stl_ascii(&mesh).into_bytes()),
        ("b.stl", write_stl_binary(&mesh)),
    ];
    let reference = mesh.volume().unwrap();
    let mut masses = Vec::new();
    for (name, bytes) in files {
        let path = dir.path().join(name);
        std::fs::write(&path, &bytes).unwrap();
        let loaded = load_mesh(&path, &bytes).unwrap();
        // Binary STL narrows coordinates to f32.
        assert!((loaded.volume().unwrap() / reference - 1.0).abs() < 1e-5, "{name}");
        assert_eq!(loaded.characteristic_length(LengthMeasure::Axis(Axis::X)).unwrap(), 1.0);

        let config = PipelineConfig {
            route: RouteChoice::Direct,
            mesh: Some(path.to_str().unwrap().into()),
            mode: ModeSelection::Paper,
            ..Default::default()
        };
        let report = run_forward(&config).unwrap();
        let m = report.row_at(6.0).unwrap().mass.ok().unwrap().kg();
        masses.push(m);
    }
    let body_length_6 = run_forward(&PipelineConfig::default()).unwrap().row_at(6.0).unwrap().fitted
        [&dragon_energetics::dataset::Dimension::BodyLength]
        .value();
    let oracle = 997.0 * reference * body_length_6.powi(3);
    for m in &masses {
        assert!((m / oracle - 1.0).abs() < 1e-5, "{m} vs {oracle}");
    }
}

#[test]
fn forward_mass_routes_side_by_side() {
    let config = PipelineConfig { mesh: Some("builtin:dragonoid".into()), ..Default::default() };
    let report = run_forward(&config).unwrap();
    for row in &report.mass_comparison {
        let reference = row.reference.unwrap().value();
        for (mass, ratio) in [(row.law, row.law_ratio), (row.cubic, row.cubic_ratio), (row.direct, row.direct_ratio)] {
            let (mass, ratio) = (mass.unwrap().value(), ratio.unwrap().value());
            assert!((mass / reference - ratio).abs() < 1e-12);
        }
    }
    let six = report.mass_comparison.iter().find(|r| r.age.value() == 6.0).unwrap();
    assert!((six.law_ratio.unwrap().value() - 1.0).abs() < 1e-12);
    let zero = &report.mass_comparison[0];
    assert!((zero.cubic_ratio.unwrap().value() - 1.0).abs() < 1e-12);
}

#[test]
fn physical_mode_footprint_needs_fewer_lambs() {
    let report = run_forward(&PipelineConfig::default()).unwrap();
    for row in &report.rows {
        let by_mode = |m: ComputationMode| {
            row.footprints.iter().filter_map(Stage::ok).find(|f| f.mode == m).unwrap().sheep_per_day.value()
        };
        assert!(by_mode(ComputationMode::Physical) <= by_mode(ComputationMode::PaperFaithful));
    }
}
