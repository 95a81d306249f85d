//! Daily energy ledger for the backward model and its feasibility verdict.
//!
//! Expenditure is flight (the activity budget in joules) plus fire breathing
//! plus everything else. Intake comes from lambs. Fire is charged per lamb
//! cooked, so every extra lamb eaten also costs energy: the balance can only
//! be closed when a lamb yields more than `k` times its cooking cost.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ecology::{land_required, EcologyError, SheepParams};
use crate::energetics::{flight_energy_joules, EnergeticsError};
use crate::mode::ComputationMode;
use crate::quantities::{q, Quantity, Unit, KCAL_TO_JOULE};

/// Per-lamb intake as published: 12,552 J/kg over 75 kg.
pub const PAPER_JOULES_PER_LAMB: f64 = 941_400.0;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FeasibilityError {
    #[error(transparent)]
    Energetics(#[from] EnergeticsError),
    #[error(transparent)]
    Ecology(#[from] EcologyError),
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

/// Fire breathing modeled as an oven: `power · duration` per use.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct FireParams {
    /// W
    pub power: f64,
    /// s
    pub duration: f64,
    /// One use per lamb cooked; otherwise one use per day.
    pub per_sheep: bool,
}

impl Default for FireParams {
    fn default() -> Self {
        Self { power: 3000.0, duration: 7200.0, per_sheep: true }
    }
}

impl FireParams {
    pub fn validate(&self) -> Result<(), FeasibilityError> {
        if !(self.power.is_finite() && self.power > 0.0 && self.duration.is_finite() && self.duration > 0.0) {
            return Err(FeasibilityError::InvalidInput(format!(
                "fire power {} W and duration {} s must be positive",
                self.power, self.duration
            )));
        }
        Ok(())
    }

    /// J per use.
    pub fn energy_per_use(&self) -> f64 {
        self.power * self.duration
    }
}

fn count(name: &str, n: f64) -> Result<f64, FeasibilityError> {
    if n.is_finite() && n >= 0.0 {
        Ok(n)
    } else {
        Err(FeasibilityError::InvalidInput(format!("{name} = {n} must be non-negative")))
    }
}

/// Fire-breathing energy per day, J.
pub fn fire_energy(n_sheep: f64, params: &FireParams) -> Result<f64, FeasibilityError> {
    let n = count("n_sheep", n_sheep)?;
    params.validate()?;
    Ok(if params.per_sheep { params.energy_per_use() * n } else { params.energy_per_use() })
}

/// Metabolizable energy of one lamb, J.
pub fn joules_per_lamb(mode: ComputationMode, sheep: &SheepParams) -> Result<f64, FeasibilityError> {
    match mode {
        ComputationMode::PaperFaithful => Ok(PAPER_JOULES_PER_LAMB),
        ComputationMode::Physical => {
            sheep.validate()?;
            Ok(sheep.edible_mass * sheep.energy_density_kcal_per_kg * KCAL_TO_JOULE)
        }
    }
}

/// Intake from `n_sheep` lambs per day, J.
pub fn intake_energy(n_sheep: f64, mode: ComputationMode, sheep: &SheepParams) -> Result<f64, FeasibilityError> {
    let n = count("n_sheep", n_sheep)?;
    Ok(joules_per_lamb(mode, sheep)? * n)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LedgerInputs {
    /// kg
    pub mass: f64,
    pub p_flight: f64,
    /// Lambs eaten (and cooked) per day.
    pub n_sheep: f64,
    /// J/day
    pub e_other: f64,
    /// Assimilation factor, intake required per unit expenditure.
    pub k: f64,
    pub mode: ComputationMode,
}

impl LedgerInputs {
    /// 2000-tonne dragon, a third of the day aloft, 20 lambs.
    pub fn two_thousand_tonne(mode: ComputationMode) -> Self {
        Self { mass: 2e6, p_flight: 1.0 / 3.0, n_sheep: 20.0, e_other: 0.0, k: 1.0, mode }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EnergyLedger {
    pub e_flying: Quantity,
    pub e_fire: Quantity,
    pub e_other: Quantity,
    pub e_expenditure: Quantity,
    pub e_intake: Quantity,
    pub assimilation_k: Quantity,
    pub n_sheep: Quantity,
    pub intake_per_lamb: Quantity,
    /// Zero unless fire is charged per lamb.
    pub fire_per_lamb: Quantity,
    /// Expenditure that does not scale with lambs eaten, J/day.
    pub e_fixed: Quantity,
    pub mode: ComputationMode,
}

pub fn build_ledger(
    inputs: &LedgerInputs,
    fire: &FireParams,
    sheep: &SheepParams,
) -> Result<EnergyLedger, FeasibilityError> {
    if !(inputs.k.is_finite() && inputs.k >= 1.0) {
        return Err(FeasibilityError::InvalidInput(format!("assimilation k = {} must be >= 1", inputs.k)));
    }
    let e_other = count("e_other", inputs.e_other)?;
    let e_flying = flight_energy_joules(inputs.mass, inputs.p_flight)?;
    let e_fire = fire_energy(inputs.n_sheep, fire)?;
    let per_lamb = joules_per_lamb(inputs.mode, sheep)?;
    let e_intake = intake_energy(inputs.n_sheep, inputs.mode, sheep)?;
    let fire_per_lamb = if fire.per_sheep { fire.energy_per_use() } else { 0.0 };
    let fixed_fire = if fire.per_sheep { 0.0 } else { e_fire };
    let joule_day = |v| q(v, Unit::JoulePerDay);
    Ok(EnergyLedger {
        e_flying: joule_day(e_flying),
        e_fire: joule_day(e_fire),
        e_other: joule_day(e_other),
        e_expenditure: joule_day(e_flying + e_fire + e_other),
        e_intake: joule_day(e_intake),
        assimilation_k: q(inputs.k, Unit::Dimensionless),
        n_sheep: q(inputs.n_sheep, Unit::Dimensionless),
        intake_per_lamb: q(per_lamb, Unit::Joule),
        fire_per_lamb: q(fire_per_lamb, Unit::Joule),
        e_fixed: joule_day(e_flying + e_other + fixed_fire),
        mode: inputs.mode,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FeasibilityVerdict {
    /// Some daily lamb count closes `intake ≥ k·expenditure` with every lamb cooked.
    pub feasible: bool,
    /// `k · fire_per_lamb / intake_per_lamb` when anything beyond cooking must
    /// be fed, else 0. Feasible exactly when below 1.
    pub deficit_ratio: Quantity,
    /// `k · e_expenditure / e_intake` at the ledger's declared lamb count;
    /// absent when nothing is eaten.
    pub declared_balance_ratio: Option<Quantity>,
    /// `ceil(k · e_expenditure / intake_per_lamb)`.
    pub lambs_required: u64,
    pub land_acres: Quantity,
    /// Lambs per day that pay for flight, other costs and their own cooking.
    pub self_consistent_lambs: Option<u64>,
    pub self_consistent_land_acres: Option<Quantity>,
    pub mode: ComputationMode,
    pub narrative: String,
}

pub fn assess(ledger: &EnergyLedger, sheep: &SheepParams) -> Result<FeasibilityVerdict, FeasibilityError> {
    let k = ledger.assimilation_k.value();
    let per_lamb = ledger.intake_per_lamb.value();
    let required = k * ledger.e_expenditure.value();
    let fixed = k * ledger.e_fixed.value();
    let marginal_cost = k * ledger.fire_per_lamb.value();

    let lambs_required = (required / per_lamb).ceil() as u64;
    let land = land_required(lambs_required as f64, sheep)?;
    let deficit_ratio = if fixed > 0.0 { marginal_cost / per_lamb } else { 0.0 };
    let feasible = deficit_ratio < 1.0;
    let intake = ledger.e_intake.value();
    let declared_balance_ratio = if required == 0.0 {
        Some(0.0)
    } else if intake == 0.0 {
        None
    } else {
        Some(required / intake)
    };
    let self_consistent_lambs = feasible.then(|| {
        if fixed > 0.0 {
            (fixed / (per_lamb - marginal_cost)).ceil() as u64
        } else {
            0
        }
    });
    let self_consistent_land_acres = self_consistent_lambs
        .map(|n| land_required(n as f64, sheep).map(|a| q(a, Unit::Acre)))
        .transpose()?;

    let mut narrative = if required == 0.0 {
        "No expenditure to cover; the energy balance closes with no lambs.".to_string()
    } else if feasible {
        format!(
            "Energy balance can close: each lamb yields {per_lamb:.4e} J against a cooking cost of {:.4e} J. \
             Covering {required:.4e} J/day takes {lambs_required} lambs per day ({land:.0} acres); \
             counting the cooking of every lamb eaten, {} lambs per day suffice.",
            marginal_cost,
            self_consistent_lambs.unwrap_or(0),
        )
    } else {
        format!(
            "Energy balance cannot close: each lamb yields {per_lamb:.4e} J but cooking it costs {marginal_cost:.4e} J \
             ({deficit_ratio:.1}x), so eating more lambs only deepens the deficit. \
             Covering {required:.4e} J/day at face value would take {lambs_required} lambs per day ({land:.0} acres).",
        )
    };
    if !feasible && ledger.mode == ComputationMode::PaperFaithful {
        narrative.push_str(
            " With the published per-lamb energy the creature would need an unknown organ converting food energy \
             beyond thermodynamic limits (the \"dragon crystal\") and so could not exist.",
        );
    }
    Ok(FeasibilityVerdict {
        feasible,
        deficit_ratio: q(deficit_ratio, Unit::Dimensionless),
        declared_balance_ratio: declared_balance_ratio.map(|r| q(r, Unit::Dimensionless)),
        lambs_required,
        land_acres: q(land, Unit::Acre),
        self_consistent_lambs,
        self_consistent_land_acres,
        mode: ledger.mode,
        narrative,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Assessment {
    pub ledger: EnergyLedger,
    pub verdict: FeasibilityVerdict,
}

/// Ledger plus verdict, with the mode's default sheep parameters unless given.
pub fn evaluate(
    inputs: &LedgerInputs,
    fire: &FireParams,
    sheep: Option<&SheepParams>,
) -> Result<Assessment, FeasibilityError> {
    let defaults = SheepParams::for_mode(inputs.mode);
    let sheep = sheep.unwrap_or(&defaults);
    let ledger = build_ledger(inputs, fire, sheep)?;
    let verdict = assess(&ledger, sheep)?;
    Ok(Assessment { ledger, verdict })
}
