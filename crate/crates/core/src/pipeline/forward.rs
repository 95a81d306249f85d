use std::collections::BTreeMap;

use serde::Serialize;

use super::{PipelineConfig, PipelineError, RouteChoice, Stage};
use crate::dataset::{parse_csv, reference_mass_table, Dimension, MassTable, ReferenceDataset};
use crate::ecology::{footprint, FootprintReport};
use crate::energetics::{
    calibrate_dimension_law, daily_consumption, mass_cubic, mass_dimension_law, mass_direct, CubicCalibration,
    EnergyBudget, MassEstimate, MassRoute, WATER_DENSITY,
};
use crate::growth::{fit, GrowthModel};
use crate::mesh::{fixtures, load_mesh, LengthMeasure, TriangleMesh, Watertight};
use crate::quantities::{q, Quantity, Unit};

/// Dimensions fitted by the forward pipeline.
pub const FITTED_DIMENSIONS: [Dimension; 3] = [Dimension::BodyLength, Dimension::BodyWidth, Dimension::HeadLength];

/// `builtin:table1`, `builtin:table2`, or a CSV path.
pub fn load_dataset(spec: &str) -> Result<ReferenceDataset, PipelineError> {
    let spec = spec.trim();
    if spec.is_empty() {
        return Err(PipelineError::Validation("dataset path is empty".into()));
    }
    if spec.starts_with("builtin:") {
        return Ok(ReferenceDataset::builtin(spec)?);
    }
    let bytes = std::fs::read(spec).map_err(|e| PipelineError::io(spec, e))?;
    parse_csv(spec, &bytes).map_err(|e| PipelineError::Validation(format!("{spec}: {e}")))
}

/// `builtin:dragonoid`, `builtin:cube`, `builtin:icosphere`, or an OBJ/STL path.
pub fn load_mesh_spec(spec: &str) -> Result<TriangleMesh, PipelineError> {
    match spec.trim() {
        "builtin:dragonoid" => Ok(fixtures::dragonoid()),
        "builtin:cube" => Ok(fixtures::unit_cube()),
        "builtin:icosphere" => Ok(fixtures::icosphere(3)),
        other if other.starts_with("builtin:") => {
            Err(PipelineError::Validation(format!("unknown builtin mesh `{other}`")))
        }
        path => {
            let bytes = std::fs::read(path).map_err(|e| PipelineError::io(path, e))?;
            load_mesh(std::path::Path::new(path), &bytes).map_err(|e| PipelineError::Validation(format!("{path}: {e}")))
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FitReport {
    #[serde(rename = "A")]
    pub asymptote: Quantity,
    #[serde(rename = "a")]
    pub offset: Quantity,
    #[serde(rename = "b")]
    pub rate: Quantity,
    pub rmse: Quantity,
    pub inflection_time: Quantity,
    pub iterations: usize,
    pub converged: bool,
}

impl FitReport {
    fn new(model: &GrowthModel, rmse: f64, iterations: usize, converged: bool) -> Self {
        Self {
            asymptote: q(model.asymptote(), Unit::Meter),
            offset: q(model.offset(), Unit::Dimensionless),
            rate: q(model.rate(), Unit::PerYear),
            rmse: q(rmse, Unit::Meter),
            inflection_time: q(model.inflection_time(), Unit::Year),
            iterations,
            converged,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LawCalibration {
    pub k: Quantity,
    pub anchor_age: Quantity,
    pub anchor_mass: Quantity,
    /// Density the reference masses are taken to assume.
    pub reference_rho: Quantity,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CubicAnchor {
    /// Model volume per cubic meter of head length.
    pub model_volume: Quantity,
    pub anchor_age: Quantity,
    pub anchor_head_length: Quantity,
    pub anchor_mass: Quantity,
    pub reference_rho: Quantity,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MeshCalibration {
    pub name: Option<String>,
    pub volume: Quantity,
    pub axis_length: Quantity,
    pub watertight: Watertight,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Calibration {
    pub law: Stage<LawCalibration>,
    pub cubic: Stage<CubicAnchor>,
    /// Present when a mesh is configured.
    pub direct: Option<Stage<MeshCalibration>>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AgeRow {
    pub age: Quantity,
    /// Fitted curve values; a dimension whose fit failed is absent.
    pub fitted: BTreeMap<Dimension, Quantity>,
    pub mass: Stage<MassEstimate>,
    pub budget: Stage<EnergyBudget>,
    pub footprints: Vec<Stage<FootprintReport>>,
}

/// Every route next to the reference table; ratios are route / table.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MassComparison {
    pub age: Quantity,
    pub reference: Option<Quantity>,
    pub law: Option<Quantity>,
    pub cubic: Option<Quantity>,
    pub direct: Option<Quantity>,
    pub law_ratio: Option<Quantity>,
    pub cubic_ratio: Option<Quantity>,
    pub direct_ratio: Option<Quantity>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ForwardReport {
    pub dataset: String,
    pub route: RouteChoice,
    pub rho: Quantity,
    pub p_flight: Quantity,
    pub fits: BTreeMap<Dimension, Stage<FitReport>>,
    pub calibration: Calibration,
    pub rows: Vec<AgeRow>,
    pub mass_comparison: Vec<MassComparison>,
    /// Converged curves, kept for CSV emission.
    #[serde(skip)]
    pub curves: BTreeMap<Dimension, GrowthModel>,
    #[serde(skip)]
    pub notes: Vec<String>,
    #[serde(skip)]
    pub ages: Vec<f64>,
}

impl ForwardReport {
    pub fn stage_errors(&self) -> Vec<super::ErrorKind> {
        let mut kinds: Vec<_> = self.fits.values().filter_map(Stage::error_kind).collect();
        for row in &self.rows {
            kinds.extend(row.mass.error_kind());
            kinds.extend(row.budget.error_kind());
            kinds.extend(row.footprints.iter().filter_map(Stage::error_kind));
        }
        kinds
    }

    pub fn row_at(&self, age: f64) -> Option<&AgeRow> {
        self.rows.iter().find(|r| r.age.value() == age)
    }
}

/// Fitted curves, or the error each failed fit produced.
struct Curves(BTreeMap<Dimension, Result<GrowthModel, PipelineError>>);

impl Curves {
    fn at(&self, dim: Dimension, t: f64) -> Result<f64, PipelineError> {
        match self.0.get(&dim) {
            Some(Ok(m)) => Ok(m.eval(t)),
            Some(Err(e)) => Err(dependent(e, dim)),
            None => Err(PipelineError::Validation(format!("{dim} was not fitted"))),
        }
    }
}

fn dependent(e: &PipelineError, dim: Dimension) -> PipelineError {
    let msg = format!("{dim} fit failed: {e}");
    match e {
        PipelineError::NonConvergence(_) => PipelineError::NonConvergence(msg),
        PipelineError::Io { path, .. } => PipelineError::Io { path: path.clone(), message: msg },
        PipelineError::Validation(_) => PipelineError::Validation(msg),
    }
}

fn reference_at(table: &MassTable, age: f64) -> Result<f64, PipelineError> {
    table
        .mass_at(age)
        .ok_or_else(|| PipelineError::Validation(format!("reference mass table has no entry for age {age}")))
}

struct Routes<'a> {
    config: &'a PipelineConfig,
    curves: &'a Curves,
    table: MassTable,
    law: Result<f64, PipelineError>,
    cubic: Result<CubicCalibration, PipelineError>,
    mesh: Option<Result<(f64, f64), PipelineError>>,
}

impl Routes<'_> {
    fn law(&self, t: f64) -> Result<MassEstimate, PipelineError> {
        let k = self.law.clone()?;
        let l = self.curves.at(Dimension::BodyLength, t)?;
        let w = self.curves.at(Dimension::BodyWidth, t)?;
        Ok(mass_dimension_law(l, w, self.config.rho, k)?)
    }

    fn cubic(&self, t: f64) -> Result<MassEstimate, PipelineError> {
        let cal = self.cubic.clone()?;
        let hl = self.curves.at(Dimension::HeadLength, t)?;
        Ok(mass_cubic(cal.model_volume, cal.model_ref_length, hl, self.config.rho)?)
    }

    fn direct(&self, t: f64) -> Result<MassEstimate, PipelineError> {
        let (volume, axis_length) = match &self.mesh {
            Some(r) => r.clone()?,
            None => return Err(PipelineError::Validation("direct route needs a mesh".into())),
        };
        let factor = self.curves.at(Dimension::BodyLength, t)? / axis_length;
        Ok(mass_direct(volume * factor.powi(3), self.config.rho)?)
    }

    fn table(&self, t: f64) -> Result<MassEstimate, PipelineError> {
        Ok(MassEstimate {
            mass: q(reference_at(&self.table, t)?, Unit::Kilogram),
            route: MassRoute::ReferenceTable,
            calibration: BTreeMap::from([("age", q(t, Unit::Year))]),
        })
    }

    fn selected(&self, t: f64) -> Result<MassEstimate, PipelineError> {
        match self.config.route {
            RouteChoice::Law => self.law(t),
            RouteChoice::Cubic => self.cubic(t),
            RouteChoice::Direct => self.direct(t),
            RouteChoice::Table => self.table(t),
        }
    }
}

pub fn run_forward(config: &PipelineConfig) -> Result<ForwardReport, PipelineError> {
    run_forward_at(config, None)
}

/// Forward pipeline evaluated at `ages`, or at every dataset age.
pub fn run_forward_at(config: &PipelineConfig, ages: Option<&[f64]>) -> Result<ForwardReport, PipelineError> {
    config.validate()?;
    let dataset = load_dataset(&config.dataset)?;
    let ages = match ages {
        Some(a) => {
            if let Some(bad) = a.iter().find(|t| !(t.is_finite() && **t >= 0.0)) {
                return Err(PipelineError::Validation(format!("age {bad} must be non-negative")));
            }
            a.to_vec()
        }
        None => dataset.ages(),
    };

    let mut fits = BTreeMap::new();
    let mut curves = BTreeMap::new();
    for dim in FITTED_DIMENSIONS {
        let series = dataset.series(dim, config.collapse);
        let result = fit(&series, None);
        let stage = match &result {
            Ok(r) => Stage::Ok { result: FitReport::new(&r.model, r.rmse, r.iterations, r.converged) },
            Err(e) => Stage::from(Err::<FitReport, _>(e.clone())),
        };
        fits.insert(dim, stage);
        curves.insert(dim, result.map(|r| r.model).map_err(PipelineError::from));
    }
    let curves = Curves(curves);

    let table = reference_mass_table();
    let c_age = config.calibration_age;
    let law = (|| {
        let m = reference_at(&table, c_age)?;
        let l = curves.at(Dimension::BodyLength, c_age)?;
        let w = curves.at(Dimension::BodyWidth, c_age)?;
        Ok((calibrate_dimension_law(l, w, WATER_DENSITY, m)?, m))
    })();
    let a_age = config.cubic_anchor_age;
    let cubic = (|| {
        let m = reference_at(&table, a_age)?;
        let hl = curves.at(Dimension::HeadLength, a_age)?;
        Ok((CubicCalibration::from_anchor(hl, m, WATER_DENSITY)?, hl, m))
    })();
    let mesh = config.mesh.as_deref().map(|spec| {
        let mesh = load_mesh_spec(spec)?;
        let volume = mesh.volume()?;
        let axis_length = mesh.characteristic_length(LengthMeasure::Axis(config.mesh_axis))?;
        Ok::<_, PipelineError>((mesh, volume, axis_length))
    });

    let calibration = Calibration {
        law: Stage::from(law.clone().map(|(k, m)| LawCalibration {
            k: q(k, Unit::Dimensionless),
            anchor_age: q(c_age, Unit::Year),
            anchor_mass: q(m, Unit::Kilogram),
            reference_rho: q(WATER_DENSITY, Unit::KgPerM3),
        })),
        cubic: Stage::from(cubic.clone().map(|(cal, hl, m)| CubicAnchor {
            model_volume: q(cal.model_volume, Unit::CubicMeter),
            anchor_age: q(a_age, Unit::Year),
            anchor_head_length: q(hl, Unit::Meter),
            anchor_mass: q(m, Unit::Kilogram),
            reference_rho: q(WATER_DENSITY, Unit::KgPerM3),
        })),
        direct: mesh.as_ref().map(|r| {
            Stage::from(r.clone().map(|(mesh, volume, axis_length)| MeshCalibration {
                name: mesh.name().map(String::from),
                volume: q(volume, Unit::CubicMeter),
                axis_length: q(axis_length, Unit::Meter),
                watertight: mesh.watertight(),
            }))
        }),
    };

    let routes = Routes {
        config,
        curves: &curves,
        table,
        law: law.map(|(k, _)| k),
        cubic: cubic.map(|(cal, _, _)| cal),
        mesh: mesh.map(|r| r.map(|(_, v, l)| (v, l))),
    };

    let modes = config.mode.modes();
    let rows = ages
        .iter()
        .map(|&t| {
            let fitted = FITTED_DIMENSIONS
                .into_iter()
                .filter_map(|d| curves.at(d, t).ok().map(|v| (d, q(v, Unit::Meter))))
                .collect();
            let mass = routes.selected(t);
            let budget = mass
                .as_ref()
                .map_err(Clone::clone)
                .and_then(|m| Ok(daily_consumption(m.kg(), config.p_flight)?));
            let footprints = modes
                .iter()
                .map(|&mode| {
                    let r = budget.as_ref().map_err(Clone::clone).and_then(|b| {
                        Ok(footprint(b.daily_kcal.value(), &config.sheep_for(mode), mode)?)
                    });
                    Stage::from(r)
                })
                .collect();
            AgeRow { age: q(t, Unit::Year), fitted, mass: mass.into(), budget: budget.into(), footprints }
        })
        .collect();

    let mass_comparison: Vec<MassComparison> = ages
        .iter()
        .map(|&t| {
            let reference = routes.table.mass_at(t);
            let kg = |r: Result<MassEstimate, PipelineError>| r.ok().map(|m| m.kg());
            let (law, cubic, direct) = (kg(routes.law(t)), kg(routes.cubic(t)), kg(routes.direct(t)));
            let ratio = |v: Option<f64>| Some(q(v? / reference?, Unit::Dimensionless));
            let mass = |v: Option<f64>| v.map(|m| q(m, Unit::Kilogram));
            MassComparison {
                age: q(t, Unit::Year),
                reference: mass(reference),
                law: mass(law),
                cubic: mass(cubic),
                direct: mass(direct),
                law_ratio: ratio(law),
                cubic_ratio: ratio(cubic),
                direct_ratio: ratio(direct),
            }
        })
        .collect();

    let notes = forward_notes(&dataset, config, &routes.table, &mass_comparison);
    Ok(ForwardReport {
        dataset: dataset.name.clone(),
        route: config.route,
        rho: q(config.rho, Unit::KgPerM3),
        p_flight: q(config.p_flight, Unit::Dimensionless),
        fits,
        calibration,
        rows,
        mass_comparison,
        curves: curves.0.into_iter().filter_map(|(d, r)| r.ok().map(|m| (d, m))).collect(),
        notes,
        ages,
    })
}

fn ratio_span(rows: &[MassComparison], pick: fn(&MassComparison) -> Option<Quantity>) -> Option<String> {
    let pts: Vec<(f64, f64)> = rows.iter().filter_map(|r| Some((r.age.value(), pick(r)?.value()))).collect();
    let lo = pts.iter().copied().min_by(|a, b| a.1.total_cmp(&b.1))?;
    let hi = pts.iter().copied().max_by(|a, b| a.1.total_cmp(&b.1))?;
    Some(format!("{:.4} (age {}) to {:.4} (age {})", lo.1, lo.0, hi.1, hi.0))
}

fn forward_notes(
    dataset: &ReferenceDataset,
    config: &PipelineConfig,
    table: &MassTable,
    comparison: &[MassComparison],
) -> Vec<String> {
    let mut notes = vec![
        "Table 1 lists a head length of 0.0575 m at age 3, identical to age 0; the distilled table gives 0.275 m. \
         The first is treated as a transcription slip."
            .to_string(),
    ];
    if let Some(span) = ratio_span(comparison, |r| r.law_ratio) {
        notes.push(format!(
            "Dimension law anchored at age {}: route/reference mass ratio spans {span}.",
            config.calibration_age
        ));
    }
    if let Some(span) = ratio_span(comparison, |r| r.cubic_ratio) {
        notes.push(format!(
            "Cubic head-length scaling anchored at age {}: route/reference mass ratio spans {span}.",
            config.cubic_anchor_age
        ));
    }
    let (first, last) = (table.entries.first(), table.entries.last());
    if let (Some(first), Some(last)) = (first, last) {
        let collapsed = dataset.collapse(config.collapse);
        let at = |age: f64| collapsed.records.iter().find(|r| r.age == age);
        if let (Some(r0), Some(r1)) = (at(first.age), at(last.age)) {
            let cubes: Vec<String> = crate::dataset::Dimension::ALL
                .iter()
                .map(|&d| format!("{d} {:.4e}", (r1.get(d).lo / r0.get(d).lo).powi(3)))
                .collect();
            notes.push(format!(
                "No single measured dimension reproduces the reference mass ratio {:.4e} between ages {} and {} \
                 under cubic scaling: {}.",
                last.mass / first.mass,
                first.age,
                last.age,
                cubes.join(", ")
            ));
        }
    }
    notes
}
