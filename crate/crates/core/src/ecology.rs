//! Ecological footprint of a daily energy demand: lambs eaten, grazing land
//! and the feed behind the meat.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::mode::ComputationMode;
use crate::quantities::{q, Quantity, Unit};

/// Lamb energy density implied by 21 kg of meat carrying 54,180 kcal.
pub const PAPER_MEAT_KCAL_PER_KG: f64 = 2580.0;
/// 294 kcal per 100 g of lamb.
pub const PHYSICAL_MEAT_KCAL_PER_KG: f64 = 2940.0;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EcologyError {
    #[error("daily demand {0} kcal must be positive and finite")]
    NonPositiveDemand(f64),
    #[error("invalid sheep parameters: {0}")]
    InvalidParams(String),
    #[error("{name} = {value} must be non-negative and finite")]
    NegativeInput { name: &'static str, value: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SheepParams {
    /// kg
    pub live_mass: f64,
    /// kg of edible meat per lamb
    pub edible_mass: f64,
    /// kcal/kg of edible meat
    pub energy_density_kcal_per_kg: f64,
    pub ewes_per_100_acres: f64,
    /// kg of feed per kg of meat
    pub feed_ratio: f64,
    pub feed_efficiency: f64,
    /// Fraction of its own body mass a komodo dragon eats per day.
    pub komodo_daily_fraction: f64,
}

impl Default for SheepParams {
    fn default() -> Self {
        Self::for_mode(ComputationMode::PaperFaithful)
    }
}

impl SheepParams {
    pub fn for_mode(mode: ComputationMode) -> Self {
        Self {
            live_mass: 63.5,
            edible_mass: 21.0,
            energy_density_kcal_per_kg: match mode {
                ComputationMode::PaperFaithful => PAPER_MEAT_KCAL_PER_KG,
                ComputationMode::Physical => PHYSICAL_MEAT_KCAL_PER_KG,
            },
            ewes_per_100_acres: 280.0,
            feed_ratio: 15.0,
            feed_efficiency: 0.044,
            komodo_daily_fraction: 0.13,
        }
    }

    pub fn validate(&self) -> Result<(), EcologyError> {
        let fields = [
            ("live_mass", self.live_mass),
            ("edible_mass", self.edible_mass),
            ("energy_density_kcal_per_kg", self.energy_density_kcal_per_kg),
            ("ewes_per_100_acres", self.ewes_per_100_acres),
            ("feed_ratio", self.feed_ratio),
            ("feed_efficiency", self.feed_efficiency),
            ("komodo_daily_fraction", self.komodo_daily_fraction),
        ];
        if let Some((name, v)) = fields.iter().find(|(_, v)| !(v.is_finite() && *v > 0.0)) {
            return Err(EcologyError::InvalidParams(format!("{name} = {v} must be positive")));
        }
        if self.edible_mass > self.live_mass {
            return Err(EcologyError::InvalidParams("edible_mass exceeds live_mass".into()));
        }
        if self.komodo_daily_fraction >= 1.0 {
            return Err(EcologyError::InvalidParams("komodo_daily_fraction must be below 1".into()));
        }
        Ok(())
    }

    /// kcal of edible meat in one lamb.
    pub fn kcal_per_lamb(&self) -> f64 {
        self.edible_mass * self.energy_density_kcal_per_kg
    }
}

fn non_negative(name: &'static str, value: f64) -> Result<f64, EcologyError> {
    if value.is_finite() && value >= 0.0 {
        Ok(value)
    } else {
        Err(EcologyError::NegativeInput { name, value })
    }
}

/// Lambs per day as `(exact, rounded up)`.
pub fn sheep_per_day(daily_kcal: f64, params: &SheepParams) -> Result<(f64, u64), EcologyError> {
    if !(daily_kcal.is_finite() && daily_kcal > 0.0) {
        return Err(EcologyError::NonPositiveDemand(daily_kcal));
    }
    params.validate()?;
    let real = daily_kcal / params.kcal_per_lamb();
    Ok((real, real.ceil() as u64))
}

/// Body mass of a komodo-like eater consuming `n` live lambs a day:
/// `(live_mass / daily_fraction) · n`.
pub fn komodo_base_mass(n_sheep_per_day: f64, params: &SheepParams) -> Result<f64, EcologyError> {
    let n = non_negative("n_sheep_per_day", n_sheep_per_day)?;
    params.validate()?;
    Ok(params.live_mass / params.komodo_daily_fraction * n)
}

/// Grazing land for a flock of `n` ewes, acres.
pub fn land_required(n_sheep: f64, params: &SheepParams) -> Result<f64, EcologyError> {
    let n = non_negative("n_sheep", n_sheep)?;
    params.validate()?;
    Ok(n / params.ewes_per_100_acres * 100.0)
}

/// Feed mass behind `meat_mass` kg of meat.
pub fn feed_chain(meat_mass: f64, params: &SheepParams) -> Result<f64, EcologyError> {
    let m = non_negative("meat_mass", meat_mass)?;
    params.validate()?;
    Ok(params.feed_ratio * m)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FootprintReport {
    pub daily_kcal: Quantity,
    pub sheep_per_day: Quantity,
    pub sheep_per_day_ceil: u64,
    /// Daily headcount the land rule is applied to.
    pub flock_size: u64,
    pub land_acres: Quantity,
    pub feed_mass_per_day: Quantity,
    pub feed_efficiency: Quantity,
    pub kcal_per_lamb: Quantity,
    pub mode: ComputationMode,
}

/// Demand → lambs → land → feed, for one mode.
pub fn footprint(daily_kcal: f64, params: &SheepParams, mode: ComputationMode) -> Result<FootprintReport, EcologyError> {
    let (real, ceil) = sheep_per_day(daily_kcal, params)?;
    let land = land_required(ceil as f64, params)?;
    let feed = feed_chain(real * params.edible_mass, params)?;
    Ok(FootprintReport {
        daily_kcal: q(daily_kcal, Unit::KcalPerDay),
        sheep_per_day: q(real, Unit::Dimensionless),
        sheep_per_day_ceil: ceil,
        flock_size: ceil,
        land_acres: q(land, Unit::Acre),
        feed_mass_per_day: q(feed, Unit::Kilogram),
        feed_efficiency: q(params.feed_efficiency, Unit::Dimensionless),
        kcal_per_lamb: q(params.kcal_per_lamb(), Unit::Kcal),
        mode,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn paper() -> SheepParams {
        SheepParams::for_mode(ComputationMode::PaperFaithful)
    }

    #[test]
    fn forward_sheep_count() {
        let (real, ceil) = sheep_per_day(4_595_391.0, &paper()).unwrap();
        assert!((real - 84.82).abs() < 5e-3, "{real}");
        assert_eq!(ceil, 85);
    }

    #[test]
    fn one_lamb_of_demand() {
        let p = paper();
        assert_eq!(sheep_per_day(p.kcal_per_lamb(), &p).unwrap(), (1.0, 1));
        assert_eq!(sheep_per_day(54_180.0, &p).unwrap(), (1.0, 1));
        assert_eq!(sheep_per_day(0.0, &p).unwrap_err(), EcologyError::NonPositiveDemand(0.0));
    }

    #[test]
    fn komodo_anchor() {
        let p = paper();
        assert!((komodo_base_mass(1.0, &p).unwrap() - 488.46).abs() < 5e-3);
        assert_eq!(komodo_base_mass(0.0, &p).unwrap(), 0.0);
        assert!((komodo_base_mass(15.0, &p).unwrap() - 7326.9).abs() < 0.05);
        assert!(komodo_base_mass(-1.0, &p).is_err());
    }

    #[test]
    fn land_rule() {
        let p = paper();
        assert_eq!(land_required(280.0, &p).unwrap(), 100.0);
        assert_eq!(land_required(0.0, &p).unwrap(), 0.0);
        let acres = land_required(95_571.0, &p).unwrap();
        assert!((acres / 34_132.0 - 1.0).abs() < 1e-2);
        assert!((acres / 34_200.0 - 1.0).abs() < 1e-2);
    }

    #[test]
    fn feed() {
        let p = paper();
        assert_eq!(feed_chain(1.0, &p).unwrap(), 15.0);
        assert_eq!(feed_chain(0.0, &p).unwrap(), 0.0);
        assert_eq!(feed_chain(21.0, &p).unwrap(), 315.0);
    }

    #[test]
    fn params_validation() {
        let mut p = paper();
        p.edible_mass = 70.0;
        assert!(p.validate().is_err());
        let mut p = paper();
        p.komodo_daily_fraction = 1.0;
        assert!(p.validate().is_err());
        let mut p = paper();
        p.feed_ratio = 0.0;
        assert!(sheep_per_day(1e5, &p).is_err());
        assert!(SheepParams::for_mode(ComputationMode::Physical).validate().is_ok());
    }

    #[test]
    fn footprint_report() {
        let r = footprint(4_595_391.0, &paper(), ComputationMode::PaperFaithful).unwrap();
        assert_eq!(r.sheep_per_day_ceil, 85);
        assert_eq!(r.flock_size, 85);
        assert!((r.land_acres.value() - 85.0 / 2.8).abs() < 1e-9);
        assert!(r.sheep_per_day_ceil as f64 >= r.sheep_per_day.value());
        let v = serde_json::to_value(&r).unwrap();
        assert_eq!(v["land_acres"]["unit"], "acre");
        assert_eq!(v["mode"], "paper_faithful");
    }

    proptest! {
        #[test]
        fn demand_to_land_is_linear(d in 1.0f64..1e9, c in 0.01f64..100.0) {
            let p = paper();
            let (s1, _) = sheep_per_day(d, &p).unwrap();
            let (s2, _) = sheep_per_day(c * d, &p).unwrap();
            prop_assert!((s2 - c * s1).abs() <= 1e-12 * s2);
            let l1 = land_required(s1, &p).unwrap();
            let l2 = land_required(s2, &p).unwrap();
            prop_assert!((l2 - c * l1).abs() <= 1e-12 * l2);
            let f1 = feed_chain(s1, &p).unwrap();
            let f2 = feed_chain(s2, &p).unwrap();
            prop_assert!((f2 - c * f1).abs() <= 1e-12 * f2);
        }

        #[test]
        fn denser_meat_needs_fewer_lambs(d in 1.0f64..1e9, lo in 100.0f64..5000.0, extra in 0.0f64..5000.0) {
            let mut a = paper();
            a.energy_density_kcal_per_kg = lo;
            let mut b = paper();
            b.energy_density_kcal_per_kg = lo + extra;
            prop_assert!(sheep_per_day(d, &b).unwrap().0 <= sheep_per_day(d, &a).unwrap().0);
        }
    }

    #[test]
    fn physical_mode_needs_no_more_lambs() {
        for d in [1e3, 4_595_391.0, 1.1e7] {
            let paper_count = sheep_per_day(d, &paper()).unwrap().0;
            let physical = sheep_per_day(d, &SheepParams::for_mode(ComputationMode::Physical)).unwrap().0;
            assert!(physical <= paper_count);
        }
    }
}
