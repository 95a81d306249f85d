//! Morphometric time series: CSV ingestion and the embedded reference tables.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DatasetError {
    #[error("parse error at row {row}, column {column}: {reason}")]
    Parse { row: usize, column: usize, reason: String },
    #[error("duplicate age {0}")]
    DuplicateAge(f64),
    #[error("dataset has no data rows")]
    EmptyDataset,
    #[error("invalid record: {0}")]
    InvalidRecord(String),
    #[error("unknown builtin dataset `{0}`")]
    UnknownBuiltin(String),
}

/// Closed interval of a measurement in meters. A point value has `lo == hi`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Range {
    pub lo: f64,
    pub hi: f64,
}

impl Range {
    pub fn point(value: f64) -> Self {
        Self { lo: value, hi: value }
    }

    pub fn new(lo: f64, hi: f64) -> Result<Self, DatasetError> {
        if !(lo.is_finite() && hi.is_finite()) || lo <= 0.0 || lo > hi {
            return Err(DatasetError::InvalidRecord(format!("bad range [{lo}, {hi}]")));
        }
        Ok(Self { lo, hi })
    }

    pub fn is_point(&self) -> bool {
        self.lo == self.hi
    }

    pub fn midpoint(&self) -> f64 {
        (self.lo + self.hi) / 2.0
    }

    pub fn collapse(&self, policy: CollapsePolicy) -> f64 {
        match policy {
            CollapsePolicy::Midpoint => self.midpoint(),
            CollapsePolicy::Lo => self.lo,
            CollapsePolicy::Hi => self.hi,
        }
    }
}

impl fmt::Display for Range {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_point() {
            write!(f, "{}", self.lo)
        } else {
            write!(f, "{}-{}", self.lo, self.hi)
        }
    }
}

impl FromStr for Range {
    type Err = String;

    /// Accepts `x`, `a-b`, `x (y)` (the parenthesized value wins) and a
    /// trailing `...` truncation marker.
    fn from_str(cell: &str) -> Result<Self, Self::Err> {
        let mut s = cell.trim();
        if let Some(stripped) = s.strip_suffix("...") {
            s = stripped.trim_end();
        }
        if let Some(open) = s.find('(') {
            let close = s.rfind(')').ok_or_else(|| format!("unbalanced parenthesis in `{cell}`"))?;
            if close < open {
                return Err(format!("unbalanced parenthesis in `{cell}`"));
            }
            s = s[open + 1..close].trim();
        }
        let number = |t: &str| -> Result<f64, String> {
            let v: f64 = t.trim().parse().map_err(|_| format!("not a number: `{}`", t.trim()))?;
            if !v.is_finite() || v <= 0.0 {
                return Err(format!("measurement must be positive and finite: `{}`", t.trim()));
            }
            Ok(v)
        };
        // Separator dash: not a leading sign and not an exponent sign.
        let bytes = s.as_bytes();
        let dash = (1..bytes.len()).find(|&i| bytes[i] == b'-' && !matches!(bytes[i - 1], b'e' | b'E'));
        let range = match dash {
            Some(dash) => {
                let (lo, hi) = (number(&s[..dash])?, number(&s[dash + 1..])?);
                if lo > hi {
                    return Err(format!("range lower bound exceeds upper bound in `{cell}`"));
                }
                Range { lo, hi }
            }
            None => Range::point(number(s)?),
        };
        Ok(range)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum CollapsePolicy {
    #[default]
    Midpoint,
    Lo,
    Hi,
}

impl FromStr for CollapsePolicy {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "midpoint" | "mid" => Ok(Self::Midpoint),
            "lo" | "low" => Ok(Self::Lo),
            "hi" | "high" => Ok(Self::Hi),
            other => Err(format!("unknown collapse policy `{other}`")),
        }
    }
}

/// The measured dimensions, in CSV column order after `age`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Dimension {
    HeadHeight,
    HeadLength,
    BodyWidth,
    BodyLength,
}

impl Dimension {
    pub const ALL: [Dimension; 4] = [
        Dimension::HeadHeight,
        Dimension::HeadLength,
        Dimension::BodyWidth,
        Dimension::BodyLength,
    ];

    pub fn column_name(self) -> &'static str {
        match self {
            Dimension::HeadHeight => "head_height",
            Dimension::HeadLength => "head_length",
            Dimension::BodyWidth => "body_width",
            Dimension::BodyLength => "body_length",
        }
    }
}

impl fmt::Display for Dimension {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.column_name())
    }
}

impl FromStr for Dimension {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let norm = s.trim().to_ascii_lowercase().replace([' ', '-'], "_");
        Dimension::ALL
            .into_iter()
            .find(|d| d.column_name() == norm)
            .ok_or_else(|| format!("unknown dimension `{s}`"))
    }
}

/// One observation row: age in years and four dimensions in meters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeasurementRecord {
    pub age: f64,
    pub head_height: Range,
    pub head_length: Range,
    pub body_width: Range,
    pub body_length: Range,
}

impl MeasurementRecord {
    pub fn validate(&self) -> Result<(), DatasetError> {
        if !self.age.is_finite() || self.age < 0.0 {
            return Err(DatasetError::InvalidRecord(format!("age {} must be >= 0", self.age)));
        }
        for d in Dimension::ALL {
            let r = self.get(d);
            Range::new(r.lo, r.hi)?;
        }
        Ok(())
    }

    pub fn get(&self, dim: Dimension) -> Range {
        match dim {
            Dimension::HeadHeight => self.head_height,
            Dimension::HeadLength => self.head_length,
            Dimension::BodyWidth => self.body_width,
            Dimension::BodyLength => self.body_length,
        }
    }

    /// Replace every range with a point chosen by `policy`.
    pub fn collapse(&self, policy: CollapsePolicy) -> MeasurementRecord {
        let p = |r: Range| Range::point(r.collapse(policy));
        MeasurementRecord {
            age: self.age,
            head_height: p(self.head_height),
            head_length: p(self.head_length),
            body_width: p(self.body_width),
            body_length: p(self.body_length),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReferenceDataset {
    pub name: String,
    pub records: Vec<MeasurementRecord>,
    pub provenance: String,
}

impl ReferenceDataset {
    /// Sorts by age and checks record invariants.
    pub fn new(
        name: impl Into<String>,
        mut records: Vec<MeasurementRecord>,
        provenance: impl Into<String>,
    ) -> Result<Self, DatasetError> {
        if records.is_empty() {
            return Err(DatasetError::EmptyDataset);
        }
        for r in &records {
            r.validate()?;
        }
        records.sort_by(|a, b| a.age.total_cmp(&b.age));
        if let Some(w) = records.windows(2).find(|w| w[0].age == w[1].age) {
            return Err(DatasetError::DuplicateAge(w[0].age));
        }
        Ok(Self { name: name.into(), records, provenance: provenance.into() })
    }

    pub fn collapse(&self, policy: CollapsePolicy) -> ReferenceDataset {
        ReferenceDataset {
            name: self.name.clone(),
            records: self.records.iter().map(|r| r.collapse(policy)).collect(),
            provenance: self.provenance.clone(),
        }
    }

    /// `(age, value)` pairs for one dimension after collapsing ranges.
    pub fn series(&self, dim: Dimension, policy: CollapsePolicy) -> Vec<(f64, f64)> {
        self.records.iter().map(|r| (r.age, r.get(dim).collapse(policy))).collect()
    }

    pub fn ages(&self) -> Vec<f64> {
        self.records.iter().map(|r| r.age).collect()
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("age,head_height,head_length,body_width,body_length\n");
        for r in &self.records {
            out.push_str(&format!(
                "{},{},{},{},{}\n",
                r.age, r.head_height, r.head_length, r.body_width, r.body_length
            ));
        }
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.records).expect("records serialize")
    }

    /// Resolve `builtin:table1`, `builtin:table2` or a name without prefix.
    pub fn builtin(name: &str) -> Result<ReferenceDataset, DatasetError> {
        match name.strip_prefix("builtin:").unwrap_or(name) {
            "table1" => Ok(table1()),
            "table2" => Ok(table2()),
            other => Err(DatasetError::UnknownBuiltin(other.to_string())),
        }
    }
}

const HEADER: [&str; 5] = ["age", "head_height", "head_length", "body_width", "body_length"];

/// Parse a CSV with header `age,head_height,head_length,body_width,body_length`
/// (case-insensitive). Rows and columns in errors are 1-based; row 1 is the header.
pub fn parse_csv(name: &str, input: &[u8]) -> Result<ReferenceDataset, DatasetError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .flexible(true)
        .from_reader(input);
    let header = reader
        .headers()
        .map_err(|e| DatasetError::Parse { row: 1, column: 1, reason: e.to_string() })?
        .clone();
    if header.is_empty() || header.iter().all(|h| h.is_empty()) {
        return Err(DatasetError::Parse { row: 1, column: 1, reason: "missing header row".into() });
    }
    for (i, expected) in HEADER.iter().enumerate() {
        let got = header.get(i).unwrap_or("").to_ascii_lowercase().replace(' ', "_");
        if got != *expected {
            return Err(DatasetError::Parse {
                row: 1,
                column: i + 1,
                reason: format!("expected column `{expected}`, found `{got}`"),
            });
        }
    }

    let mut records = Vec::new();
    for (idx, row) in reader.records().enumerate() {
        let row_no = idx + 2;
        let row = row.map_err(|e| DatasetError::Parse { row: row_no, column: 1, reason: e.to_string() })?;
        if row.iter().all(|c| c.is_empty()) {
            continue;
        }
        if row.len() != HEADER.len() {
            return Err(DatasetError::Parse {
                row: row_no,
                column: row.len().min(HEADER.len()) + 1,
                reason: format!("expected {} cells, found {}", HEADER.len(), row.len()),
            });
        }
        let age: f64 = row[0].parse().map_err(|_| DatasetError::Parse {
            row: row_no,
            column: 1,
            reason: format!("age `{}` is not a number", &row[0]),
        })?;
        if !age.is_finite() || age < 0.0 {
            return Err(DatasetError::Parse { row: row_no, column: 1, reason: "age must be >= 0".into() });
        }
        let cell = |col: usize| -> Result<Range, DatasetError> {
            row[col].parse::<Range>().map_err(|reason| DatasetError::Parse { row: row_no, column: col + 1, reason })
        };
        records.push(MeasurementRecord {
            age,
            head_height: cell(1)?,
            head_length: cell(2)?,
            body_width: cell(3)?,
            body_length: cell(4)?,
        });
    }
    ReferenceDataset::new(name, records, "csv")
}

fn rec(age: f64, hh: Range, hl: Range, bw: Range, bl: Range) -> MeasurementRecord {
    MeasurementRecord { age, head_height: hh, head_length: hl, body_width: bw, body_length: bl }
}

fn pt(v: f64) -> Range {
    Range::point(v)
}

fn rg(lo: f64, hi: f64) -> Range {
    Range { lo, hi }
}

/// Raw screen measurements with ranges across scenes.
///
/// Age 3 head length is stored as printed (0.0575); see [`TABLE2_EXCEPTIONS`].
pub fn table1() -> ReferenceDataset {
    let records = vec![
        rec(0.0, pt(0.046), pt(0.0575), pt(0.050), pt(0.436)),
        rec(0.5, rg(0.034, 0.046), rg(0.044, 0.059), rg(0.037, 0.050), pt(0.520)),
        rec(2.0, rg(0.122, 0.133), pt(0.138), rg(0.132, 0.144), pt(1.65)),
        rec(3.0, pt(0.253), pt(0.0575), pt(0.275), pt(4.408)),
        rec(4.0, pt(0.57), pt(0.735), pt(0.619), pt(12.988)),
        rec(5.0, rg(1.03, 1.076), rg(1.65, 1.719), rg(1.12, 1.78), pt(30.59)),
        rec(6.0, pt(2.04), rg(2.16, 2.57), pt(2.22), pt(37.08)),
        rec(7.0, pt(2.04), rg(2.16, 2.57), pt(2.22), pt(53.26)),
    ];
    ReferenceDataset::new("table1", records, "screen measurements per season, with per-scene ranges")
        .expect("embedded table is valid")
}

/// Best-estimate point values per age.
pub fn table2() -> ReferenceDataset {
    let records = vec![
        rec(0.0, pt(0.046), pt(0.0575), pt(0.050), pt(0.436)),
        rec(0.5, pt(0.046), pt(0.059), pt(0.050), pt(0.956)),
        rec(2.0, pt(0.128), pt(0.138), pt(0.138), pt(2.900)),
        rec(3.0, pt(0.253), pt(0.275), pt(0.275), pt(6.396)),
        rec(4.0, pt(0.57), pt(0.735), pt(0.619), pt(13.953)),
        rec(5.0, pt(1.053), pt(1.685), pt(1.45), pt(31.239)),
        rec(6.0, pt(2.04), pt(2.365), pt(2.22), pt(40.748)),
        rec(7.0, pt(2.04), pt(2.57), pt(2.22), pt(49.758)),
    ];
    ReferenceDataset::new("table2", records, "best estimate per age distilled from table1")
        .expect("embedded table is valid")
}

/// Why a table2 cell is not the midpoint of the matching table1 cell.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ExceptionKind {
    /// `table2` takes the upper endpoint of the `table1` range.
    UpperEndpoint,
    /// The table1 value looks like a transcription slip.
    Transcription,
    /// Body length was re-estimated for `table2` and matches no `table1` value.
    Remeasured,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CollapseException {
    pub age: f64,
    pub dimension: Dimension,
    pub kind: ExceptionKind,
}

const fn exc(age: f64, dimension: Dimension, kind: ExceptionKind) -> CollapseException {
    CollapseException { age, dimension, kind }
}

/// Cells where table2 differs from the table1 midpoint at printed precision.
pub const TABLE2_EXCEPTIONS: [CollapseException; 12] = {
    use Dimension::*;
    use ExceptionKind::*;
    [
        exc(0.5, HeadHeight, UpperEndpoint),
        exc(0.5, HeadLength, UpperEndpoint),
        exc(0.5, BodyWidth, UpperEndpoint),
        exc(0.5, BodyLength, Remeasured),
        exc(2.0, BodyLength, Remeasured),
        exc(3.0, HeadLength, Transcription),
        exc(3.0, BodyLength, Remeasured),
        exc(4.0, BodyLength, Remeasured),
        exc(5.0, BodyLength, Remeasured),
        exc(6.0, BodyLength, Remeasured),
        exc(7.0, HeadLength, UpperEndpoint),
        exc(7.0, BodyLength, Remeasured),
    ]
};

/// Half a unit in the third decimal, the precision table2 is printed at.
pub const PRINTED_PRECISION: f64 = 5e-4;

/// Entry of the reference mass table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MassEntry {
    pub age: f64,
    pub mass: f64,
}

/// Reference masses by age. The last entry applies to every later age.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MassTable {
    pub entries: Vec<MassEntry>,
}

impl MassTable {
    pub fn new(entries: Vec<MassEntry>) -> Result<Self, DatasetError> {
        if entries.is_empty() {
            return Err(DatasetError::EmptyDataset);
        }
        for e in &entries {
            if !(e.mass.is_finite() && e.mass > 0.0) {
                return Err(DatasetError::InvalidRecord(format!("mass {} must be positive", e.mass)));
            }
        }
        for w in entries.windows(2) {
            if w[1].age <= w[0].age || w[1].mass < w[0].mass {
                return Err(DatasetError::InvalidRecord(
                    "mass table must be ordered by age with nondecreasing mass".into(),
                ));
            }
        }
        Ok(Self { entries })
    }

    /// Exact-age lookup, or the open-ended last entry for later ages.
    pub fn mass_at(&self, age: f64) -> Option<f64> {
        if let Some(e) = self.entries.iter().find(|e| e.age == age) {
            return Some(e.mass);
        }
        let last = self.entries.last()?;
        (age >= last.age).then_some(last.mass)
    }
}

/// Volume-scaled masses; the 6 year entry covers 6+.
pub fn reference_mass_table() -> MassTable {
    let pairs = [
        (0.0, 2.60),
        (0.5, 3.70),
        (2.0, 98.38),
        (3.0, 1947.54),
        (4.0, 7544.14),
        (5.0, 90089.83),
        (6.0, 251328.27),
    ];
    MassTable::new(pairs.iter().map(|&(age, mass)| MassEntry { age, mass }).collect())
        .expect("embedded mass table is valid")
}
