//! Unit-tagged scalars over a small closed vocabulary.
//!
//! Every unit maps to a dimension signature (exponents of length, mass and
//! time) and an exact factor to SI. Conversion is allowed only between units
//! of equal dimension; products are accepted only when the resulting
//! dimension has a canonical SI member in the vocabulary.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Joules per kilocalorie.
pub const KCAL_TO_JOULE: f64 = 4184.0;
/// Kilograms per avoirdupois pound.
pub const POUND_TO_KG: f64 = 0.453_592_37;
/// Square meters per international acre.
pub const ACRE_TO_M2: f64 = 4_046.856_422_4;
pub const SECONDS_PER_HOUR: f64 = 3600.0;
pub const HOURS_PER_DAY: f64 = 24.0;
pub const SECONDS_PER_DAY: f64 = SECONDS_PER_HOUR * HOURS_PER_DAY;
/// Julian year.
pub const SECONDS_PER_YEAR: f64 = 365.25 * SECONDS_PER_DAY;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum QuantityError {
    #[error("non-finite value {value} for unit {unit}")]
    NonFinite { value: f64, unit: Unit },
    #[error("incompatible units: cannot convert {from} to {to}")]
    IncompatibleUnits { from: Unit, to: Unit },
    #[error("product of {lhs} and {rhs} leaves the unit vocabulary")]
    UnitOverflow { lhs: Unit, rhs: Unit },
    #[error("unknown unit symbol `{0}`")]
    UnknownUnit(String),
}

/// Exponents of (length, mass, time).
type Dimension = [i8; 3];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Unit {
    #[serde(rename = "m")]
    Meter,
    #[serde(rename = "m^3")]
    CubicMeter,
    #[serde(rename = "kg")]
    Kilogram,
    #[serde(rename = "lb")]
    Pound,
    #[serde(rename = "s")]
    Second,
    #[serde(rename = "kcal")]
    Kcal,
    #[serde(rename = "J")]
    Joule,
    #[serde(rename = "kcal/h")]
    KcalPerHour,
    #[serde(rename = "kcal/day")]
    KcalPerDay,
    #[serde(rename = "J/day")]
    JoulePerDay,
    #[serde(rename = "acre")]
    Acre,
    #[serde(rename = "yr")]
    Year,
    #[serde(rename = "1/yr")]
    PerYear,
    #[serde(rename = "W")]
    Watt,
    #[serde(rename = "1")]
    Dimensionless,
    #[serde(rename = "kg/m^3")]
    KgPerM3,
    #[serde(rename = "kcal/kg")]
    KcalPerKg,
}

impl Unit {
    pub const ALL: [Unit; 17] = [
        Unit::Meter,
        Unit::CubicMeter,
        Unit::Kilogram,
        Unit::Pound,
        Unit::Second,
        Unit::Kcal,
        Unit::Joule,
        Unit::KcalPerHour,
        Unit::KcalPerDay,
        Unit::JoulePerDay,
        Unit::Acre,
        Unit::Year,
        Unit::PerYear,
        Unit::Watt,
        Unit::Dimensionless,
        Unit::KgPerM3,
        Unit::KcalPerKg,
    ];

    pub fn symbol(self) -> &'static str {
        match self {
            Unit::Meter => "m",
            Unit::CubicMeter => "m^3",
            Unit::Kilogram => "kg",
            Unit::Pound => "lb",
            Unit::Second => "s",
            Unit::Kcal => "kcal",
            Unit::Joule => "J",
            Unit::KcalPerHour => "kcal/h",
            Unit::KcalPerDay => "kcal/day",
            Unit::JoulePerDay => "J/day",
            Unit::Acre => "acre",
            Unit::Year => "yr",
            Unit::PerYear => "1/yr",
            Unit::Watt => "W",
            Unit::Dimensionless => "1",
            Unit::KgPerM3 => "kg/m^3",
            Unit::KcalPerKg => "kcal/kg",
        }
    }

    pub fn from_symbol(symbol: &str) -> Result<Unit, QuantityError> {
        Unit::ALL
            .into_iter()
            .find(|u| u.symbol() == symbol)
            .ok_or_else(|| QuantityError::UnknownUnit(symbol.to_string()))
    }

    fn dimension(self) -> Dimension {
        match self {
            Unit::Meter => [1, 0, 0],
            Unit::CubicMeter => [3, 0, 0],
            Unit::Acre => [2, 0, 0],
            Unit::Kilogram | Unit::Pound => [0, 1, 0],
            Unit::Second | Unit::Year => [0, 0, 1],
            Unit::PerYear => [0, 0, -1],
            Unit::Kcal | Unit::Joule => [2, 1, -2],
            Unit::KcalPerHour | Unit::KcalPerDay | Unit::JoulePerDay | Unit::Watt => [2, 1, -3],
            Unit::Dimensionless => [0, 0, 0],
            Unit::KgPerM3 => [-3, 1, 0],
            Unit::KcalPerKg => [2, 0, -2],
        }
    }

    /// Multiplier taking a value in this unit to SI.
    fn si_factor(self) -> f64 {
        match self {
            Unit::Meter | Unit::CubicMeter | Unit::Kilogram | Unit::Second => 1.0,
            Unit::Joule | Unit::Watt | Unit::Dimensionless | Unit::KgPerM3 => 1.0,
            Unit::Pound => POUND_TO_KG,
            Unit::Acre => ACRE_TO_M2,
            Unit::Year => SECONDS_PER_YEAR,
            Unit::PerYear => 1.0 / SECONDS_PER_YEAR,
            Unit::Kcal | Unit::KcalPerKg => KCAL_TO_JOULE,
            Unit::KcalPerHour => KCAL_TO_JOULE / SECONDS_PER_HOUR,
            Unit::KcalPerDay => KCAL_TO_JOULE / SECONDS_PER_DAY,
            Unit::JoulePerDay => 1.0 / SECONDS_PER_DAY,
        }
    }

    /// The SI member of the vocabulary for a dimension, if there is one.
    fn canonical(dimension: Dimension) -> Option<Unit> {
        [
            Unit::Meter,
            Unit::CubicMeter,
            Unit::Kilogram,
            Unit::Second,
            Unit::Joule,
            Unit::Watt,
            Unit::Dimensionless,
            Unit::KgPerM3,
        ]
        .into_iter()
        .find(|u| u.dimension() == dimension)
    }

    /// Exact factor for `self -> target`, or `None` when dimensions differ.
    pub fn factor_to(self, target: Unit) -> Option<f64> {
        if self == target {
            return Some(1.0);
        }
        if self.dimension() != target.dimension() {
            return None;
        }
        // Direct energy pairs keep the exact constant rather than a quotient.
        let direct = match (self, target) {
            (Unit::Kcal, Unit::Joule) | (Unit::KcalPerDay, Unit::JoulePerDay) => Some(KCAL_TO_JOULE),
            (Unit::Joule, Unit::Kcal) | (Unit::JoulePerDay, Unit::KcalPerDay) => {
                Some(1.0 / KCAL_TO_JOULE)
            }
            (Unit::KcalPerHour, Unit::KcalPerDay) => Some(HOURS_PER_DAY),
            (Unit::KcalPerDay, Unit::KcalPerHour) => Some(1.0 / HOURS_PER_DAY),
            (Unit::Pound, Unit::Kilogram) => Some(POUND_TO_KG),
            _ => None,
        };
        Some(direct.unwrap_or_else(|| self.si_factor() / target.si_factor()))
    }
}

impl fmt::Display for Unit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

/// A finite value tagged with its unit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Quantity {
    value: f64,
    unit: Unit,
}

impl Quantity {
    pub fn new(value: f64, unit: Unit) -> Result<Self, QuantityError> {
        if value.is_finite() {
            Ok(Self { value, unit })
        } else {
            Err(QuantityError::NonFinite { value, unit })
        }
    }

    pub fn value(&self) -> f64 {
        self.value
    }

    pub fn unit(&self) -> Unit {
        self.unit
    }

    pub fn convert(&self, target: Unit) -> Result<Quantity, QuantityError> {
        let factor = self
            .unit
            .factor_to(target)
            .ok_or(QuantityError::IncompatibleUnits { from: self.unit, to: target })?;
        Quantity::new(self.value * factor, target)
    }

    /// Value in `unit`, converting if needed.
    pub fn value_in(&self, unit: Unit) -> Result<f64, QuantityError> {
        self.convert(unit).map(|q| q.value)
    }

    pub fn checked_mul(&self, rhs: &Quantity) -> Result<Quantity, QuantityError> {
        let overflow = QuantityError::UnitOverflow { lhs: self.unit, rhs: rhs.unit };
        if self.unit == Unit::Dimensionless {
            return Quantity::new(self.value * rhs.value, rhs.unit);
        }
        if rhs.unit == Unit::Dimensionless {
            return Quantity::new(self.value * rhs.value, self.unit);
        }
        let (l, r) = (self.unit.dimension(), rhs.unit.dimension());
        let product = [l[0] + r[0], l[1] + r[1], l[2] + r[2]];
        let unit = Unit::canonical(product).ok_or(overflow)?;
        Quantity::new(
            self.value * self.unit.si_factor() * rhs.value * rhs.unit.si_factor(),
            unit,
        )
    }

    pub fn checked_add(&self, rhs: &Quantity) -> Result<Quantity, QuantityError> {
        if self.unit != rhs.unit {
            return Err(QuantityError::IncompatibleUnits { from: rhs.unit, to: self.unit });
        }
        Quantity::new(self.value + rhs.value, self.unit)
    }

    pub fn scale(&self, factor: f64) -> Result<Quantity, QuantityError> {
        Quantity::new(self.value * factor, self.unit)
    }
}

impl fmt::Display for Quantity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {}", self.value, self.unit)
    }
}

impl<'de> Deserialize<'de> for Quantity {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Raw {
            value: f64,
            unit: Unit,
        }
        let raw = Raw::deserialize(deserializer)?;
        Quantity::new(raw.value, raw.unit).map_err(serde::de::Error::custom)
    }
}

/// Shorthand for internal construction from already-validated arithmetic.
/// Panics on non-finite input, which would indicate a bug upstream.
pub(crate) fn q(value: f64, unit: Unit) -> Quantity {
    Quantity::new(value, unit).expect("finite quantity")
}

/// Conversion constants used across the toolkit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConversionTable {
    pub kcal_to_joule: f64,
    pub pound_to_kg: f64,
    /// Acres in the land unit of the carrying-capacity rule.
    pub acres_per_land_unit: f64,
}

impl Default for ConversionTable {
    fn default() -> Self {
        Self {
            kcal_to_joule: KCAL_TO_JOULE,
            pound_to_kg: POUND_TO_KG,
            acres_per_land_unit: 100.0,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn kcal_to_joule_is_exact() {
        let j = Quantity::new(1.0, Unit::Kcal).unwrap().convert(Unit::Joule).unwrap();
        assert_eq!(j.value(), 4184.0);
        assert_eq!(j.unit(), Unit::Joule);
        assert_eq!(ConversionTable::default().kcal_to_joule, 4184.0);
    }

    #[test]
    fn identity_conversion() {
        let m = Quantity::new(5.0, Unit::Meter).unwrap().convert(Unit::Meter).unwrap();
        assert_eq!(m.value(), 5.0);
    }

    #[test]
    fn pounds_to_kilograms() {
        let kg = Quantity::new(140.0, Unit::Pound).unwrap().convert(Unit::Kilogram).unwrap();
        assert!((kg.value() - 63.503).abs() < 1e-3, "{}", kg.value());
    }

    #[test]
    fn daily_and_hourly_rates() {
        let per_day = Quantity::new(2.0, Unit::KcalPerHour).unwrap().convert(Unit::KcalPerDay).unwrap();
        assert_eq!(per_day.value(), 48.0);
        let joules = Quantity::new(1.0, Unit::KcalPerDay).unwrap().convert(Unit::JoulePerDay).unwrap();
        assert_eq!(joules.value(), 4184.0);
    }

    #[test]
    fn incompatible_units_rejected() {
        let err = Quantity::new(1.0, Unit::Meter).unwrap().convert(Unit::Kilogram).unwrap_err();
        assert!(matches!(err, QuantityError::IncompatibleUnits { .. }));
        let a = Quantity::new(1.0, Unit::Kcal).unwrap();
        let b = Quantity::new(1.0, Unit::Joule).unwrap();
        assert!(a.checked_add(&b).is_err());
    }

    #[test]
    fn non_finite_rejected() {
        assert!(Quantity::new(f64::NAN, Unit::Meter).is_err());
        assert!(Quantity::new(f64::INFINITY, Unit::Joule).is_err());
        assert!(serde_json::from_str::<Quantity>(r#"{"value": 1e999, "unit": "m"}"#).is_err());
    }

    #[test]
    fn density_times_volume_is_mass() {
        let rho = Quantity::new(997.0, Unit::KgPerM3).unwrap();
        let v = Quantity::new(2.0, Unit::CubicMeter).unwrap();
        let m = rho.checked_mul(&v).unwrap();
        assert_eq!((m.value(), m.unit()), (1994.0, Unit::Kilogram));
        let zero = Quantity::new(0.0, Unit::KgPerM3).unwrap().checked_mul(&v).unwrap();
        assert_eq!((zero.value(), zero.unit()), (0.0, Unit::Kilogram));
    }

    #[test]
    fn oven_power_times_duration_is_energy() {
        let p = Quantity::new(3000.0, Unit::Watt).unwrap();
        let t = Quantity::new(7200.0, Unit::Second).unwrap();
        let e = p.checked_mul(&t).unwrap();
        assert_eq!((e.value(), e.unit()), (2.16e7, Unit::Joule));
    }

    #[test]
    fn product_outside_vocabulary_overflows() {
        let a = Quantity::new(2.0, Unit::Meter).unwrap();
        let err = a.checked_mul(&a).unwrap_err();
        assert!(matches!(err, QuantityError::UnitOverflow { .. }));
    }

    #[test]
    fn serialized_form_carries_unit() {
        let s = serde_json::to_string(&Quantity::new(1.5, Unit::KcalPerDay).unwrap()).unwrap();
        assert_eq!(s, r#"{"value":1.5,"unit":"kcal/day"}"#);
        let back: Quantity = serde_json::from_str(&s).unwrap();
        assert_eq!(back.unit(), Unit::KcalPerDay);
    }

    #[test]
    fn symbols_round_trip() {
        for u in Unit::ALL {
            assert_eq!(Unit::from_symbol(u.symbol()).unwrap(), u);
        }
    }

    fn unit_pairs() -> impl Strategy<Value = (Unit, Unit)> {
        let units = proptest::sample::select(Unit::ALL.to_vec());
        (units.clone(), units).prop_filter("same dimension", |(a, b)| a.factor_to(*b).is_some())
    }

    proptest! {
        #[test]
        fn round_trip_conversion(value in -1e12f64..1e12, (from, to) in unit_pairs()) {
            let q = Quantity::new(value, from).unwrap();
            let back = q.convert(to).unwrap().convert(from).unwrap();
            prop_assert!((back.value() - value).abs() <= 1e-12 * value.abs().max(1e-300));
        }

        #[test]
        fn conversion_is_linear(value in -1e6f64..1e6, alpha in -1e3f64..1e3, (from, to) in unit_pairs()) {
            let q = Quantity::new(value, from).unwrap();
            let lhs = q.scale(alpha).unwrap().convert(to).unwrap().value();
            let rhs = alpha * q.convert(to).unwrap().value();
            prop_assert!((lhs - rhs).abs() <= 1e-12 * rhs.abs().max(1e-300));
        }

        #[test]
        fn kcal_joule_kcal_composes_exactly(value in -1e9f64..1e9) {
            let q = Quantity::new(value, Unit::Kcal).unwrap();
            let j = q.convert(Unit::Joule).unwrap();
            prop_assert_eq!(j.value(), value * 4184.0);
            prop_assert_eq!(j.convert(Unit::Kcal).unwrap().value(), value * 4184.0 * (1.0 / 4184.0));
        }
    }
}
