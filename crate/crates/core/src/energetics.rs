//! Body mass from size, and the metabolic energy budget that follows from it.
//!
//! Three mass routes are offered because none can be pinned down from the
//! published data alone:
//!
//! * `mesh_cubic`: model volume scaled by the cube of a reference-length ratio;
//! * `dimension_law`: `k·ρ·L·W²`, with height eliminated through `H ∝ W`;
//! * `direct_mesh`: density times an already-scaled mesh volume.
//!
//! Basal rate follows the avian allometry `R_B = 3.1·10^0.074·M^0.744` kcal/h;
//! standard (resting) and flight rates are 1.5 and 12 times basal.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::quantities::{q, Quantity, Unit, HOURS_PER_DAY, KCAL_TO_JOULE};

/// Upper bound on density: pure water, kg/m³.
pub const WATER_DENSITY: f64 = 997.0;
pub const BASAL_COEFFICIENT: f64 = 3.1;
pub const BASAL_LOG_OFFSET: f64 = 0.074;
pub const BASAL_EXPONENT: f64 = 0.744;
pub const STANDARD_MULTIPLIER: f64 = 1.5;
pub const FLIGHT_MULTIPLIER: f64 = 12.0;
pub const DEFAULT_FLIGHT_FRACTION: f64 = 1.0 / 3.0;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EnergeticsError {
    #[error("{name} = {value} must be positive and finite")]
    NonPositiveInput { name: &'static str, value: f64 },
    #[error("density {0} kg/m^3 exceeds the water cap of 997 kg/m^3")]
    DensityExceedsCap(f64),
    #[error("mass {0} kg must be positive and finite")]
    NonPositiveMass(f64),
    #[error("flight fraction {0} must lie in [0, 1]")]
    FlightFractionOutOfRange(f64),
}

fn positive(name: &'static str, value: f64) -> Result<f64, EnergeticsError> {
    if value.is_finite() && value > 0.0 {
        Ok(value)
    } else {
        Err(EnergeticsError::NonPositiveInput { name, value })
    }
}

/// Tissue density, capped at that of water.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DensityModel {
    rho: f64,
}

impl DensityModel {
    pub fn new(rho: f64) -> Result<Self, EnergeticsError> {
        positive("rho", rho)?;
        if rho > WATER_DENSITY {
            return Err(EnergeticsError::DensityExceedsCap(rho));
        }
        Ok(Self { rho })
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    pub fn cap(&self) -> f64 {
        WATER_DENSITY
    }
}

impl Default for DensityModel {
    fn default() -> Self {
        Self { rho: WATER_DENSITY }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MassRoute {
    MeshCubic,
    DimensionLaw,
    DirectMesh,
    /// Looked up in the reference mass table.
    ReferenceTable,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MassEstimate {
    pub mass: Quantity,
    pub route: MassRoute,
    /// Inputs and constants the estimate was computed from.
    pub calibration: BTreeMap<&'static str, Quantity>,
}

impl MassEstimate {
    pub fn kg(&self) -> f64 {
        self.mass.value()
    }
}

/// `ρ · V_model · (target / model_ref)³`.
pub fn mass_cubic(
    model_volume: f64,
    model_ref_length: f64,
    target_ref_length: f64,
    rho: f64,
) -> Result<MassEstimate, EnergeticsError> {
    let density = DensityModel::new(rho)?;
    positive("model_volume", model_volume)?;
    positive("model_ref_length", model_ref_length)?;
    positive("target_ref_length", target_ref_length)?;
    let ratio = target_ref_length / model_ref_length;
    let mass = density.rho() * model_volume * ratio.powi(3);
    Ok(MassEstimate {
        mass: q(mass, Unit::Kilogram),
        route: MassRoute::MeshCubic,
        calibration: BTreeMap::from([
            ("rho", q(rho, Unit::KgPerM3)),
            ("model_volume", q(model_volume, Unit::CubicMeter)),
            ("model_ref_length", q(model_ref_length, Unit::Meter)),
            ("target_ref_length", q(target_ref_length, Unit::Meter)),
        ]),
    })
}

/// Model constants for the cubic route, fixed by one `(reference length, mass)`
/// anchor with the model reference length set to 1 m.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CubicCalibration {
    pub model_volume: f64,
    pub model_ref_length: f64,
    pub rho: f64,
}

impl CubicCalibration {
    pub fn from_anchor(anchor_ref_length: f64, anchor_mass: f64, rho: f64) -> Result<Self, EnergeticsError> {
        let density = DensityModel::new(rho)?;
        positive("anchor_ref_length", anchor_ref_length)?;
        positive("anchor_mass", anchor_mass)?;
        Ok(Self {
            model_volume: anchor_mass / (density.rho() * anchor_ref_length.powi(3)),
            model_ref_length: 1.0,
            rho,
        })
    }

    pub fn predict(&self, target_ref_length: f64) -> Result<MassEstimate, EnergeticsError> {
        mass_cubic(self.model_volume, self.model_ref_length, target_ref_length, self.rho)
    }
}

/// `k · ρ · L · W²`. Height never enters: it is taken proportional to width.
pub fn mass_dimension_law(length: f64, width: f64, rho: f64, k: f64) -> Result<MassEstimate, EnergeticsError> {
    positive("length", length)?;
    positive("width", width)?;
    positive("rho", rho)?;
    positive("k", k)?;
    Ok(MassEstimate {
        mass: q(k * rho * length * width * width, Unit::Kilogram),
        route: MassRoute::DimensionLaw,
        calibration: BTreeMap::from([
            ("k", q(k, Unit::Dimensionless)),
            ("rho", q(rho, Unit::KgPerM3)),
            ("length", q(length, Unit::Meter)),
            ("width", q(width, Unit::Meter)),
        ]),
    })
}

/// Solve `k = M / (ρ·L·W²)` from one anchor.
pub fn calibrate_dimension_law(length: f64, width: f64, rho: f64, mass: f64) -> Result<f64, EnergeticsError> {
    positive("length", length)?;
    positive("width", width)?;
    positive("rho", rho)?;
    positive("mass", mass)?;
    Ok(mass / (rho * length * width * width))
}

pub fn mass_direct(mesh_volume_scaled: f64, rho: f64) -> Result<MassEstimate, EnergeticsError> {
    let density = DensityModel::new(rho)?;
    positive("mesh_volume", mesh_volume_scaled)?;
    Ok(MassEstimate {
        mass: q(density.rho() * mesh_volume_scaled, Unit::Kilogram),
        route: MassRoute::DirectMesh,
        calibration: BTreeMap::from([
            ("rho", q(rho, Unit::KgPerM3)),
            ("mesh_volume", q(mesh_volume_scaled, Unit::CubicMeter)),
        ]),
    })
}

fn check_mass(mass: f64) -> Result<f64, EnergeticsError> {
    if mass.is_finite() && mass > 0.0 {
        Ok(mass)
    } else {
        Err(EnergeticsError::NonPositiveMass(mass))
    }
}

fn check_flight_fraction(p: f64) -> Result<f64, EnergeticsError> {
    if (0.0..=1.0).contains(&p) {
        Ok(p)
    } else {
        Err(EnergeticsError::FlightFractionOutOfRange(p))
    }
}

/// Basal metabolic rate in kcal/h for a mass in kg.
pub fn basal_rate(mass: f64) -> Result<f64, EnergeticsError> {
    let mass = check_mass(mass)?;
    Ok(BASAL_COEFFICIENT * 10f64.powf(BASAL_LOG_OFFSET) * mass.powf(BASAL_EXPONENT))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EnergyBudget {
    pub mass: Quantity,
    pub r_basal: Quantity,
    pub r_standard: Quantity,
    pub r_flight: Quantity,
    pub p_flight: Quantity,
    pub daily_kcal: Quantity,
    pub daily_joule: Quantity,
}

/// `C = 24·(12·P_F + 1.5·(1 − P_F))·R_B` kcal/day.
pub fn daily_consumption(mass: f64, p_flight: f64) -> Result<EnergyBudget, EnergeticsError> {
    let r_basal = basal_rate(mass)?;
    let p = check_flight_fraction(p_flight)?;
    let r_standard = STANDARD_MULTIPLIER * r_basal;
    let r_flight = FLIGHT_MULTIPLIER * r_basal;
    let daily_kcal = HOURS_PER_DAY * (p * r_flight + (1.0 - p) * r_standard);
    Ok(EnergyBudget {
        mass: q(mass, Unit::Kilogram),
        r_basal: q(r_basal, Unit::KcalPerHour),
        r_standard: q(r_standard, Unit::KcalPerHour),
        r_flight: q(r_flight, Unit::KcalPerHour),
        p_flight: q(p, Unit::Dimensionless),
        daily_kcal: q(daily_kcal, Unit::KcalPerDay),
        daily_joule: q(daily_kcal * KCAL_TO_JOULE, Unit::JoulePerDay),
    })
}

/// Daily energy of the activity budget in joules, `4184 · C`.
pub fn flight_energy_joules(mass: f64, p_flight: f64) -> Result<f64, EnergeticsError> {
    daily_consumption(mass, p_flight).map(|b| b.daily_joule.value())
}
