use std::fmt::Write as _;
use std::path::Path;

use serde::Serialize;
use serde_json::{Map, Value};

use super::{ForwardReport, OutputFormat, PipelineError, FITTED_DIMENSIONS};
use crate::mode::ComputationMode;

/// Round to `digits` significant digits, switching to exponent form outside
/// `[1e-3, 1e6)`.
pub fn format_sig(x: f64, digits: usize) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let digits = digits.max(1);
    let mag = x.abs().log10().floor() as i32;
    if !(-3..6).contains(&mag) {
        return format!("{:.*e}", digits - 1, x);
    }
    let scale = 10f64.powi(mag - digits as i32 + 1);
    let rounded = (x / scale).round() * scale;
    // Rounding can carry into the next decade, e.g. 9.9996 -> 10.00.
    let mag = rounded.abs().log10().floor() as i32;
    let decimals = (digits as i32 - 1 - mag).max(0) as usize;
    format!("{rounded:.decimals$}")
}

fn as_quantity(map: &Map<String, Value>) -> Option<(f64, &str)> {
    if map.len() != 2 {
        return None;
    }
    Some((map.get("value")?.as_f64()?, map.get("unit")?.as_str()?))
}

fn scalar_text(v: &Value) -> Option<String> {
    match v {
        Value::Null => Some("-".into()),
        Value::Bool(b) => Some(b.to_string()),
        Value::Number(n) if n.is_f64() => Some(format_sig(n.as_f64().unwrap_or(f64::NAN), 4)),
        Value::Number(n) => Some(n.to_string()),
        Value::String(s) => Some(s.clone()),
        Value::Object(m) => as_quantity(m).map(|(value, unit)| match unit {
            "1" => format_sig(value, 4),
            unit => format!("{} {unit}", format_sig(value, 4)),
        }),
        Value::Array(_) => None,
    }
}

fn walk(v: &Value, indent: usize, out: &mut String) {
    let pad = " ".repeat(indent);
    match v {
        Value::Object(map) => {
            for (k, child) in map {
                match scalar_text(child) {
                    Some(s) => {
                        let _ = writeln!(out, "{pad}{k}: {s}");
                    }
                    None => {
                        let _ = writeln!(out, "{pad}{k}:");
                        walk(child, indent + 2, out);
                    }
                }
            }
        }
        Value::Array(items) => {
            for item in items {
                match scalar_text(item) {
                    Some(s) => {
                        let _ = writeln!(out, "{pad}- {s}");
                    }
                    None => {
                        let _ = writeln!(out, "{pad}-");
                        walk(item, indent + 2, out);
                    }
                }
            }
        }
        other => {
            let _ = writeln!(out, "{pad}{}", scalar_text(other).unwrap_or_default());
        }
    }
}

/// Indented outline with 4-significant-digit numbers and unit suffixes.
pub fn render_human(value: &Value) -> String {
    let mut out = String::new();
    match scalar_text(value) {
        Some(s) => out.push_str(&s),
        None => walk(value, 0, &mut out),
    }
    out
}

fn flatten(prefix: &str, v: &Value, rows: &mut Vec<[String; 3]>) {
    let key = |k: &str| if prefix.is_empty() { k.to_string() } else { format!("{prefix}.{k}") };
    match v {
        Value::Object(map) => match as_quantity(map) {
            Some((value, unit)) => rows.push([prefix.to_string(), value.to_string(), unit.to_string()]),
            None => map.iter().for_each(|(k, child)| flatten(&key(k), child, rows)),
        },
        Value::Array(items) => {
            items.iter().enumerate().for_each(|(i, child)| flatten(&format!("{prefix}[{i}]"), child, rows))
        }
        Value::Null => rows.push([prefix.to_string(), String::new(), String::new()]),
        Value::String(s) => rows.push([prefix.to_string(), s.clone(), String::new()]),
        other => rows.push([prefix.to_string(), other.to_string(), String::new()]),
    }
}

fn csv_text(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Result<String, PipelineError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let err = |e: csv::Error| PipelineError::Validation(format!("csv output: {e}"));
    w.write_record(header).map_err(err)?;
    for row in rows {
        w.write_record(&row).map_err(err)?;
    }
    let bytes = w.into_inner().map_err(|e| PipelineError::Validation(format!("csv output: {e}")))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf8"))
}

/// Serialize in the requested format. CSV lists one `field,value,unit` row per leaf.
pub fn render<T: Serialize>(value: &T, format: OutputFormat) -> Result<String, PipelineError> {
    let ser_err = |e: serde_json::Error| PipelineError::Validation(format!("serialization: {e}"));
    match format {
        OutputFormat::Json => Ok(serde_json::to_string_pretty(value).map_err(ser_err)? + "\n"),
        OutputFormat::Human => Ok(render_human(&serde_json::to_value(value).map_err(ser_err)?)),
        OutputFormat::Csv => {
            let mut rows = Vec::new();
            flatten("", &serde_json::to_value(value).map_err(ser_err)?, &mut rows);
            csv_text(&["field", "value", "unit"], rows.into_iter().map(Vec::from))
        }
    }
}

fn cell(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

/// Write `growth_curve.csv`, `mass_vs_age.csv` and `kcal_vs_age.csv` into `dir`.
pub fn emit_csv(dir: &Path, report: &ForwardReport, samples: usize) -> Result<(), PipelineError> {
    let shown = dir.display().to_string();
    std::fs::create_dir_all(dir).map_err(|e| PipelineError::io(&shown, e))?;
    let write = |name: &str, text: String| {
        let path = dir.join(name);
        std::fs::write(&path, text).map_err(|e| PipelineError::io(&path.display().to_string(), e))
    };

    let t_max = report.ages.iter().copied().fold(0.0, f64::max);
    let samples = samples.max(2);
    let mut header = vec!["age_yr".to_string()];
    header.extend(FITTED_DIMENSIONS.iter().map(|d| format!("{d}_m")));
    let curve_rows = (0..samples).map(|i| {
        let t = t_max * i as f64 / (samples - 1) as f64;
        let mut row = vec![t.to_string()];
        row.extend(FITTED_DIMENSIONS.iter().map(|d| cell(report.curves.get(d).map(|m| m.eval(t)))));
        row
    });
    let header_refs: Vec<&str> = header.iter().map(String::as_str).collect();
    write("growth_curve.csv", csv_text(&header_refs, curve_rows)?)?;

    let mass_rows = report.rows.iter().zip(&report.mass_comparison).map(|(row, cmp)| {
        let kg = |v: Option<crate::quantities::Quantity>| cell(v.map(|q| q.value()));
        vec![
            row.age.value().to_string(),
            cell(row.mass.ok().map(|m| m.kg())),
            kg(cmp.reference),
            kg(cmp.law),
            kg(cmp.cubic),
            kg(cmp.direct),
        ]
    });
    write(
        "mass_vs_age.csv",
        csv_text(&["age_yr", "selected_kg", "reference_kg", "law_kg", "cubic_kg", "direct_kg"], mass_rows)?,
    )?;

    let modes = ComputationMode::ALL;
    let mut header = vec!["age_yr".to_string(), "mass_kg".into(), "daily_kcal".into(), "daily_joule".into()];
    header.extend(modes.iter().map(|m| format!("sheep_per_day_{m}")));
    let kcal_rows = report.rows.iter().map(|row| {
        let budget = row.budget.ok();
        let mut r = vec![
            row.age.value().to_string(),
            cell(budget.map(|b| b.mass.value())),
            cell(budget.map(|b| b.daily_kcal.value())),
            cell(budget.map(|b| b.daily_joule.value())),
        ];
        r.extend(modes.iter().map(|&mode| {
            cell(row.footprints.iter().filter_map(|f| f.ok()).find(|f| f.mode == mode).map(|f| f.sheep_per_day.value()))
        }));
        r
    });
    let header_refs: Vec<&str> = header.iter().map(String::as_str).collect();
    write("kcal_vs_age.csv", csv_text(&header_refs, kcal_rows)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pipeline::{run_forward, PipelineConfig};
    use crate::quantities::{q, Unit};

    #[test]
    fn significant_digits() {
        assert_eq!(format_sig(251328.27, 4), "251300");
        assert_eq!(format_sig(85.0, 4), "85.00");
        assert_eq!(format_sig(0.0575, 4), "0.05750");
        assert_eq!(format_sig(11_028_939.0, 4), "1.103e7");
        assert_eq!(format_sig(9.99996, 4), "10.00");
        assert_eq!(format_sig(-4.56789, 3), "-4.57");
        assert_eq!(format_sig(1.5e-5, 4), "1.500e-5");
        assert_eq!(format_sig(0.0, 4), "0");
    }

    #[test]
    fn human_output_has_units() {
        #[derive(Serialize)]
        struct S {
            mass: crate::quantities::Quantity,
            ratio: crate::quantities::Quantity,
            count: u64,
        }
        let s = S { mass: q(251328.27, Unit::Kilogram), ratio: q(0.91237, Unit::Dimensionless), count: 85 };
        let text = render(&s, OutputFormat::Human).unwrap();
        assert_eq!(text, "mass: 251300 kg\nratio: 0.9124\ncount: 85\n");
    }

    #[test]
    fn csv_output_flattens_leaves() {
        let v = serde_json::json!({"a": {"value": 1.5, "unit": "kg"}, "b": [true, null], "c": "x"});
        let text = render(&v, OutputFormat::Csv).unwrap();
        assert_eq!(text, "field,value,unit\na,1.5,kg\nb[0],true,\nb[1],,\nc,x,\n");
    }

    #[test]
    fn emits_three_csv_files() {
        let report = run_forward(&PipelineConfig::default()).unwrap();
        let dir = tempfile::tempdir().unwrap();
        emit_csv(dir.path(), &report, 15).unwrap();
        let curve = std::fs::read_to_string(dir.path().join("growth_curve.csv")).unwrap();
        assert_eq!(curve.lines().count(), 16);
        assert!(curve.starts_with("age_yr,body_length_m,body_width_m,head_length_m\n"));
        let mass = std::fs::read_to_string(dir.path().join("mass_vs_age.csv")).unwrap();
        assert_eq!(mass.lines().count(), 1 + report.rows.len());
        assert!(mass.contains("251328.27"));
        let kcal = std::fs::read_to_string(dir.path().join("kcal_vs_age.csv")).unwrap();
        assert!(kcal.lines().next().unwrap().ends_with("sheep_per_day_paper_faithful,sheep_per_day_physical"));
    }
}
