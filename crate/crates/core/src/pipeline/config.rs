use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::PipelineError;
use crate::dataset::CollapsePolicy;
use crate::ecology::SheepParams;
use crate::energetics::{DensityModel, DEFAULT_FLIGHT_FRACTION, WATER_DENSITY};
use crate::feasibility::{FireParams, LedgerInputs};
use crate::mesh::Axis;
use crate::mode::{ComputationMode, ModeSelection};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum RouteChoice {
    /// `k·ρ·L·W²`, `k` fixed by the reference mass at the calibration age.
    #[default]
    Law,
    /// Cube of the head-length ratio to the anchor age.
    Cubic,
    /// Mesh volume scaled to the fitted body length.
    Direct,
    /// The reference mass table itself.
    Table,
}

impl FromStr for RouteChoice {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "law" | "dimension_law" => Ok(RouteChoice::Law),
            "cubic" | "mesh_cubic" => Ok(RouteChoice::Cubic),
            "direct" | "direct_mesh" => Ok(RouteChoice::Direct),
            "table" | "reference_table" => Ok(RouteChoice::Table),
            other => Err(format!("unknown mass route `{other}`")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum OutputFormat {
    #[default]
    Json,
    Csv,
    Human,
}

impl FromStr for OutputFormat {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "json" => Ok(OutputFormat::Json),
            "csv" => Ok(OutputFormat::Csv),
            "human" | "text" => Ok(OutputFormat::Human),
            other => Err(format!("unknown output format `{other}`")),
        }
    }
}

/// Per-field overrides on top of each mode's default sheep parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
#[serde(default, deny_unknown_fields)]
pub struct SheepOverrides {
    pub live_mass: Option<f64>,
    pub edible_mass: Option<f64>,
    pub energy_density_kcal_per_kg: Option<f64>,
    pub ewes_per_100_acres: Option<f64>,
    pub feed_ratio: Option<f64>,
    pub feed_efficiency: Option<f64>,
    pub komodo_daily_fraction: Option<f64>,
}

impl SheepOverrides {
    pub fn apply(&self, mode: ComputationMode) -> SheepParams {
        let d = SheepParams::for_mode(mode);
        SheepParams {
            live_mass: self.live_mass.unwrap_or(d.live_mass),
            edible_mass: self.edible_mass.unwrap_or(d.edible_mass),
            energy_density_kcal_per_kg: self.energy_density_kcal_per_kg.unwrap_or(d.energy_density_kcal_per_kg),
            ewes_per_100_acres: self.ewes_per_100_acres.unwrap_or(d.ewes_per_100_acres),
            feed_ratio: self.feed_ratio.unwrap_or(d.feed_ratio),
            feed_efficiency: self.feed_efficiency.unwrap_or(d.feed_efficiency),
            komodo_daily_fraction: self.komodo_daily_fraction.unwrap_or(d.komodo_daily_fraction),
        }
    }
}

/// Backward-model scenario.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Scenario {
    /// kg
    pub mass: f64,
    pub p_flight: f64,
    pub n_sheep: f64,
    /// J/day
    pub e_other: f64,
    pub k: f64,
}

impl Default for Scenario {
    fn default() -> Self {
        let base = LedgerInputs::two_thousand_tonne(ComputationMode::PaperFaithful);
        Self { mass: base.mass, p_flight: base.p_flight, n_sheep: base.n_sheep, e_other: base.e_other, k: base.k }
    }
}

impl Scenario {
    pub fn inputs(&self, mode: ComputationMode) -> LedgerInputs {
        LedgerInputs {
            mass: self.mass,
            p_flight: self.p_flight,
            n_sheep: self.n_sheep,
            e_other: self.e_other,
            k: self.k,
            mode,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineConfig {
    /// CSV path or `builtin:table1` / `builtin:table2`.
    pub dataset: String,
    pub collapse: CollapsePolicy,
    /// kg/m³
    pub rho: f64,
    pub p_flight: f64,
    pub route: RouteChoice,
    /// Age whose reference mass fixes `k` for the law route.
    pub calibration_age: f64,
    /// Age whose reference mass anchors the cubic route.
    pub cubic_anchor_age: f64,
    /// OBJ/STL path or `builtin:dragonoid`; needed by the direct route.
    pub mesh: Option<String>,
    /// Mesh axis matched to the fitted body length.
    pub mesh_axis: Axis,
    pub sheep: SheepOverrides,
    pub fire: FireParams,
    pub mode: ModeSelection,
    pub scenario: Scenario,
    pub format: OutputFormat,
    /// Points on each growth curve written by `--emit-csv`.
    pub curve_samples: usize,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            dataset: "builtin:table2".into(),
            collapse: CollapsePolicy::Midpoint,
            rho: WATER_DENSITY,
            p_flight: DEFAULT_FLIGHT_FRACTION,
            route: RouteChoice::Law,
            calibration_age: 6.0,
            cubic_anchor_age: 0.0,
            mesh: None,
            mesh_axis: Axis::Principal,
            sheep: SheepOverrides::default(),
            fire: FireParams::default(),
            mode: ModeSelection::Both,
            scenario: Scenario::default(),
            format: OutputFormat::Json,
            curve_samples: 71,
        }
    }
}

impl PipelineConfig {
    /// Parse TOML or JSON, chosen by extension (TOML when unknown), and validate.
    pub fn from_file(path: &Path) -> Result<Self, PipelineError> {
        let shown = path.display().to_string();
        let text = std::fs::read_to_string(path).map_err(|e| PipelineError::io(&shown, e))?;
        let is_json = path.extension().is_some_and(|e| e.eq_ignore_ascii_case("json"));
        let config: Self = if is_json {
            serde_json::from_str(&text).map_err(|e| PipelineError::Validation(format!("{shown}: {e}")))?
        } else {
            toml::from_str(&text).map_err(|e| PipelineError::Validation(format!("{shown}: {e}")))?
        };
        config.validate()?;
        Ok(config)
    }

    pub fn sheep_for(&self, mode: ComputationMode) -> SheepParams {
        self.sheep.apply(mode)
    }

    pub fn validate(&self) -> Result<(), PipelineError> {
        let bad = |m: String| Err(PipelineError::Validation(m));
        if self.dataset.trim().is_empty() {
            return bad("dataset path is empty".into());
        }
        DensityModel::new(self.rho)?;
        for (name, p) in [("p_flight", self.p_flight), ("scenario.p_flight", self.scenario.p_flight)] {
            if !(0.0..=1.0).contains(&p) {
                return bad(format!("{name} = {p} must lie in [0, 1]"));
            }
        }
        for (name, age) in [("calibration_age", self.calibration_age), ("cubic_anchor_age", self.cubic_anchor_age)] {
            if !(age.is_finite() && age >= 0.0) {
                return bad(format!("{name} = {age} must be non-negative"));
            }
        }
        if !(self.scenario.mass.is_finite() && self.scenario.mass > 0.0) {
            return bad(format!("scenario.mass = {} must be positive", self.scenario.mass));
        }
        if !(self.scenario.k.is_finite() && self.scenario.k >= 1.0) {
            return bad(format!("scenario.k = {} must be >= 1", self.scenario.k));
        }
        for (name, v) in [("scenario.n_sheep", self.scenario.n_sheep), ("scenario.e_other", self.scenario.e_other)] {
            if !(v.is_finite() && v >= 0.0) {
                return bad(format!("{name} = {v} must be non-negative"));
            }
        }
        if self.curve_samples < 2 {
            return bad("curve_samples must be at least 2".into());
        }
        self.fire.validate()?;
        for mode in ComputationMode::ALL {
            self.sheep_for(mode).validate()?;
        }
        Ok(())
    }
}
