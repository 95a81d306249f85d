use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn dragon(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dragon")).args(args).output().expect("binary runs")
}

fn json(out: &Output) -> Value {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("valid json")
}

#[test]
fn energy_command() {
    let v = json(&dragon(&["energy", "--mass", "251328.27", "--pf", "1"]));
    assert_eq!(v["daily_kcal"]["unit"], "kcal/day");
    let kcal = v["daily_kcal"]["value"].as_f64().unwrap();
    assert!((kcal / 11_028_939.0 - 1.0).abs() < 5e-3);

    let v = json(&dragon(&["energy", "--mass", "251328.27", "--pf", "1", "--units", "joule"]));
    assert_eq!(v["r_basal"]["unit"], "W");
    assert_eq!(v["daily_kcal"]["unit"], "J/day");
    assert!((v["daily_kcal"]["value"].as_f64().unwrap() / (4184.0 * kcal) - 1.0).abs() < 1e-12);
}

#[test]
fn ecology_command() {
    let v = json(&dragon(&["ecology", "--daily-kcal", "4595391"]));
    assert_eq!(v["sheep_per_day_ceil"], 85);
    let both = json(&dragon(&["ecology", "--daily-kcal", "4595391", "--mode", "both"]));
    assert_eq!(both.as_array().unwrap().len(), 2);
    assert_eq!(both[1]["mode"], "physical");
}

#[test]
fn feasibility_command() {
    let args = ["feasibility", "--mass", "2e6", "--pf", "0.3333333333333333", "--sheep", "20"];
    let v = json(&dragon(&args));
    assert_eq!(v["verdict"]["feasible"], false);
    assert!(v["verdict"]["narrative"].as_str().unwrap().contains("dragon crystal"));
    let both = json(&dragon(&[&args[..], &["--mode", "both"]].concat()));
    assert_eq!(both[1]["verdict"]["lambs_required"], 350);
    assert_eq!(both[1]["verdict"]["feasible"], true);
    let k2 = json(&dragon(&[&args[..], &["--k", "2", "--e-other", "1e9"]].concat()));
    assert_eq!(k2["ledger"]["e_other"]["value"], 1e9);
}

#[test]
fn fit_command() {
    let v = json(&dragon(&["fit"]));
    let keys: Vec<&str> = v.as_object().unwrap().keys().map(String::as_str).collect();
    assert_eq!(keys, ["A", "a", "b", "rmse", "converged"]);
    assert!(v["rmse"].as_f64().unwrap() <= 3.0);
    let many = json(&dragon(&["fit", "--dimension", "body_width", "--dimension", "head-length"]));
    assert!(many["body_width"]["converged"].as_bool().unwrap());
    assert!(many["head_length"]["A"].as_f64().unwrap() > 2.0);
}

#[test]
fn predict_command() {
    let v = json(&dragon(&["predict", "--age", "6", "--age", "8", "--mode", "paper"]));
    let rows = v["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 2);
    let m6 = rows[0]["mass"]["result"]["mass"]["value"].as_f64().unwrap();
    assert!((m6 / 251328.27 - 1.0).abs() < 1e-12);
    assert_eq!(rows[0]["footprints"][0]["result"]["sheep_per_day_ceil"], 85);
}

#[test]
fn mass_command() {
    let v = json(&dragon(&["mass", "--route", "law", "--length", "40.748", "--width", "2.22"]));
    assert!((v["mass"]["value"].as_f64().unwrap() / 251328.27 - 1.0).abs() < 1e-12);
    let v = json(&dragon(&["mass", "--route", "cubic", "--target-length", "0.735"]));
    assert!((v["mass"]["value"].as_f64().unwrap() - 5430.4).abs() < 0.1);
    let v = json(&dragon(&["mass", "--route", "direct", "--volume", "2", "--rho", "500"]));
    assert_eq!(v["mass"]["value"], 1000.0);
    let v = json(&dragon(&["mass", "--route", "direct", "--mesh", "builtin:dragonoid", "--target-length", "40.748"]));
    let m = v["mass"]["value"].as_f64().unwrap();
    assert!((5e4..=5e5).contains(&m));
    assert_eq!(dragon(&["mass", "--route", "law", "--length", "1"]).status.code(), Some(1));
}

fn write_cube_obj(dir: &Path) -> String {
    let obj = "v 0 0 0\nv 1 0 0\nv 1 1 0\nv 0 1 0\nv 0 0 1\nv 1 0 1\nv 1 1 1\nv 0 1 1\n\
               f 1 4 3 2\nf 5 6 7 8\nf 1 2 6 5\nf 3 4 8 7\nf 1 5 8 4\nf 2 3 7 6\n";
    let path = dir.join("cube.obj");
    std::fs::write(&path, obj).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn volume_command() {
    let dir = tempfile::tempdir().unwrap();
    let cube = write_cube_obj(dir.path());
    let v = json(&dragon(&["volume", &cube, "--axis", "x", "--snout", "0,0,0:0,0,2"]));
    assert_eq!(v["volume"], 1.0);
    assert_eq!(v["watertight"], "closed");
    assert_eq!(v["snout_length"], 2.0);
    assert_eq!(v["triangle_count"], 12);

    let bad = dir.path().join("bad.obj");
    std::fs::write(&bad, "v 0 0 0\nf 1 2 99\n").unwrap();
    assert_eq!(dragon(&["volume", bad.to_str().unwrap()]).status.code(), Some(1));
    assert_eq!(dragon(&["volume", "/nonexistent/mesh.stl"]).status.code(), Some(2));
}

#[test]
fn report_with_config_and_csv() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("run.toml");
    std::fs::write(&config, "mode = \"both\"\np_flight = 1.0\n[scenario]\nn_sheep = 20.0\n").unwrap();
    let csv_dir = dir.path().join("plots");
    let out = dragon(&["report", "--config", config.to_str().unwrap(), "--emit-csv", csv_dir.to_str().unwrap()]);
    let v = json(&out);
    let kcal = v["forward"]["rows"][6]["budget"]["result"]["daily_kcal"]["value"].as_f64().unwrap();
    assert!((kcal / 11_028_939.0 - 1.0).abs() < 5e-3);
    assert_eq!(v["backward"]["comparison"]["verdict_flips"], true);
    assert!(!v["notes"].as_array().unwrap().is_empty());
    for f in ["growth_curve.csv", "mass_vs_age.csv", "kcal_vs_age.csv"] {
        assert!(csv_dir.join(f).is_file(), "{f}");
    }

    // Flags win over the file.
    let v = json(&dragon(&["report", "--config", config.to_str().unwrap(), "--pf", "0.3333333333333333"]));
    let kcal = v["forward"]["rows"][6]["budget"]["result"]["daily_kcal"]["value"].as_f64().unwrap();
    assert!((kcal / 4_595_391.0 - 1.0).abs() < 5e-3);
}

#[test]
fn report_is_byte_identical_across_runs() {
    let a = dragon(&["report"]);
    let b = dragon(&["report"]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn output_formats() {
    let human = dragon(&["energy", "--mass", "251328.27", "--pf", "1", "--format", "human"]);
    let text = String::from_utf8(human.stdout).unwrap();
    assert!(text.contains("daily_kcal: 1.103e7 kcal/day"), "{text}");
    let csv = dragon(&["energy", "--mass", "1", "--pf", "0", "--format", "csv"]);
    let text = String::from_utf8(csv.stdout).unwrap();
    assert!(text.starts_with("field,value,unit\nmass,1,kg\n"), "{text}");
}

#[test]
fn exit_codes() {
    assert_eq!(dragon(&["energy", "--mass", "1", "--pf", "1.5"]).status.code(), Some(1));
    assert_eq!(dragon(&["report", "--dataset", "/nonexistent/data.csv"]).status.code(), Some(2));
    assert_eq!(dragon(&["report", "--dataset", ""]).status.code(), Some(1));
    assert_eq!(dragon(&["report", "--route", "direct"]).status.code(), Some(1));
    assert_eq!(dragon(&["no-such-command"]).status.code(), Some(1));
    assert_eq!(dragon(&["--help"]).status.code(), Some(0));

    let dir = tempfile::tempdir().unwrap();
    let flat = dir.path().join("flat.csv");
    // Four distinct ages with identical lengths cannot be fit.
    std::fs::write(
        &flat,
        "age,head_height,head_length,body_width,body_length\n0,1,1,1,5\n1,1,1,1,5\n2,1,1,1,5\n3,1,1,1,5\n",
    )
    .unwrap();
    assert_eq!(dragon(&["fit", "--dataset", flat.to_str().unwrap()]).status.code(), Some(1));
}
