//! Logistic growth law `L(t) = A / (1 + a·exp(-b·t))` and its least-squares fit.

mod oracle;

pub use oracle::{grid_search_oracle, pattern_search_polish, GridBounds, GridOptimum};

use nalgebra::{Matrix3, Vector3};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GrowthError {
    #[error("need at least 4 data points with distinct ages, got {0}")]
    InsufficientData(usize),
    #[error("all observations are equal; the curve is not identifiable")]
    DegenerateData,
    #[error("invalid data: {0}")]
    InvalidData(String),
    #[error("invalid growth model: {0}")]
    InvalidModel(String),
    #[error("fit did not converge after {} iterations (rmse {})", .0.iterations, .0.rmse)]
    NonConvergence(Box<FitResult>),
    #[error("grid resolution {0} is below the minimum of 10 per axis")]
    ResolutionTooLow(usize),
    #[error("invalid grid bounds: {0}")]
    InvalidBounds(String),
}

/// Logistic curve parameters: asymptote `A` (m), offset `a`, rate `b` (1/yr).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GrowthModel {
    #[serde(rename = "A")]
    asymptote: f64,
    #[serde(rename = "a")]
    offset: f64,
    #[serde(rename = "b")]
    rate: f64,
}

impl GrowthModel {
    pub fn new(asymptote: f64, offset: f64, rate: f64) -> Result<Self, GrowthError> {
        for (name, v) in [("A", asymptote), ("a", offset), ("b", rate)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(GrowthError::InvalidModel(format!("{name} = {v} must be positive and finite")));
            }
        }
        Ok(Self { asymptote, offset, rate })
    }

    pub fn asymptote(&self) -> f64 {
        self.asymptote
    }

    pub fn offset(&self) -> f64 {
        self.offset
    }

    pub fn rate(&self) -> f64 {
        self.rate
    }

    pub fn params(&self) -> [f64; 3] {
        [self.asymptote, self.offset, self.rate]
    }

    pub fn eval(&self, t: f64) -> f64 {
        self.asymptote / (1.0 + self.offset * (-self.rate * t).exp())
    }

    /// Age of fastest growth, `ln(a)/b`.
    pub fn inflection_time(&self) -> f64 {
        self.offset.ln() / self.rate
    }

    /// Partial derivatives of `eval(t)` with respect to `(A, a, b)`.
    pub fn gradient(&self, t: f64) -> [f64; 3] {
        let e = (-self.rate * t).exp();
        let denom = 1.0 + self.offset * e;
        let a = self.asymptote;
        [
            1.0 / denom,
            -a * e / (denom * denom),
            a * self.offset * t * e / (denom * denom),
        ]
    }

    /// Jacobian of residuals `y_i - eval(t_i)` with respect to `(A, a, b)`.
    pub fn residual_jacobian(&self, data: &[(f64, f64)]) -> Vec<[f64; 3]> {
        data.iter()
            .map(|&(t, _)| {
                let g = self.gradient(t);
                [-g[0], -g[1], -g[2]]
            })
            .collect()
    }

    pub fn residuals(&self, data: &[(f64, f64)]) -> Vec<f64> {
        data.iter().map(|&(t, y)| y - self.eval(t)).collect()
    }

    pub fn sse(&self, data: &[(f64, f64)]) -> f64 {
        data.iter().map(|&(t, y)| (y - self.eval(t)).powi(2)).sum()
    }

    /// Deterministic start: `A0 = 1.05·max(y)`, `b0 = 1`, `a0` through the earliest point.
    pub fn initial_guess(data: &[(f64, f64)]) -> Result<Self, GrowthError> {
        validate(data)?;
        let max_y = data.iter().map(|p| p.1).fold(f64::MIN, f64::max);
        let (t0, y0) = *data.iter().min_by(|a, b| a.0.total_cmp(&b.0)).expect("validated non-empty");
        let asymptote = 1.05 * max_y;
        let rate = 1.0;
        let offset = (asymptote / y0 - 1.0) * (rate * t0).exp();
        GrowthModel::new(asymptote, offset, rate)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub model: GrowthModel,
    /// Root mean square of the residuals, meters.
    pub rmse: f64,
    pub residuals: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
}

/// Flat JSON form `{A, a, b, rmse, converged}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitSummary {
    #[serde(rename = "A")]
    pub asymptote: f64,
    #[serde(rename = "a")]
    pub offset: f64,
    #[serde(rename = "b")]
    pub rate: f64,
    pub rmse: f64,
    pub converged: bool,
}

impl FitResult {
    pub fn summary(&self) -> FitSummary {
        FitSummary {
            asymptote: self.model.asymptote,
            offset: self.model.offset,
            rate: self.model.rate,
            rmse: self.rmse,
            converged: self.converged,
        }
    }
}

pub fn rmse(residuals: &[f64]) -> f64 {
    if residuals.is_empty() {
        return 0.0;
    }
    (residuals.iter().map(|r| r * r).sum::<f64>() / residuals.len() as f64).sqrt()
}

fn validate(data: &[(f64, f64)]) -> Result<(), GrowthError> {
    if data.len() < 4 {
        return Err(GrowthError::InsufficientData(data.len()));
    }
    for &(t, y) in data {
        if !(t.is_finite() && t >= 0.0) {
            return Err(GrowthError::InvalidData(format!("age {t} must be finite and >= 0")));
        }
        if !(y.is_finite() && y > 0.0) {
            return Err(GrowthError::InvalidData(format!("observation {y} must be positive")));
        }
    }
    let mut ts: Vec<f64> = data.iter().map(|p| p.0).collect();
    ts.sort_by(f64::total_cmp);
    ts.dedup();
    if ts.len() < 4 {
        return Err(GrowthError::InsufficientData(ts.len()));
    }
    if ts.len() != data.len() {
        return Err(GrowthError::InvalidData("ages must be distinct".into()));
    }
    if data.iter().all(|p| p.1 == data[0].1) {
        return Err(GrowthError::DegenerateData);
    }
    Ok(())
}

pub const MAX_ITERATIONS: usize = 500;
const STEP_TOLERANCE: f64 = 1e-10;
const GRADIENT_TOLERANCE: f64 = 1e-12;

/// Levenberg-Marquardt on `(ln A, ln a, ln b)`, which keeps every parameter
/// positive. Convergence is judged in the original parameters.
pub fn fit(data: &[(f64, f64)], init: Option<GrowthModel>) -> Result<FitResult, GrowthError> {
    validate(data)?;
    let start = match init {
        Some(m) => m,
        None => GrowthModel::initial_guess(data)?,
    };

    let mut model = start;
    let mut cost = model.sse(data);
    let mut lambda = 1e-3;
    let mut converged = false;
    let mut iterations = 0;

    while iterations < MAX_ITERATIONS {
        iterations += 1;
        let p = model.params();
        let mut jtj = Matrix3::<f64>::zeros();
        let mut jtr = Vector3::<f64>::zeros();
        let mut raw_grad = Vector3::<f64>::zeros();
        for &(t, y) in data {
            let g = model.gradient(t);
            let r = y - model.eval(t);
            // Chain rule into log space: d/d(ln p) = p · d/dp.
            let row = Vector3::new(g[0] * p[0], g[1] * p[1], g[2] * p[2]);
            jtj += row * row.transpose();
            jtr += row * r;
            raw_grad += Vector3::new(g[0], g[1], g[2]) * (-2.0 * r);
        }
        if raw_grad.norm() < GRADIENT_TOLERANCE {
            converged = true;
            break;
        }

        let mut accepted = false;
        while lambda < 1e20 {
            let mut damped = jtj;
            for i in 0..3 {
                damped[(i, i)] += lambda * jtj[(i, i)].max(1e-300);
            }
            let Some(step) = damped.cholesky().map(|c| c.solve(&jtr)) else {
                lambda *= 10.0;
                continue;
            };
            let trial = [p[0] * step[0].exp(), p[1] * step[1].exp(), p[2] * step[2].exp()];
            let rel_step = (0..3).map(|i| ((trial[i] - p[i]) / p[i]).abs()).fold(0.0, f64::max);
            let candidate = GrowthModel::new(trial[0], trial[1], trial[2]);
            let trial_cost = candidate.as_ref().map(|m| m.sse(data)).unwrap_or(f64::INFINITY);
            if trial_cost.is_finite() && trial_cost <= cost {
                model = candidate.expect("finite cost implies valid model");
                cost = trial_cost;
                lambda = (lambda / 10.0).max(1e-12);
                accepted = true;
                if rel_step < STEP_TOLERANCE {
                    converged = true;
                }
                break;
            }
            if rel_step < STEP_TOLERANCE {
                // No representable improvement left.
                converged = true;
                break;
            }
            lambda *= 10.0;
        }
        if converged || !accepted {
            break;
        }
    }

    let residuals = model.residuals(data);
    let result = FitResult { model, rmse: rmse(&residuals), residuals, iterations, converged };
    if result.converged {
        Ok(result)
    } else {
        Err(GrowthError::NonConvergence(Box::new(result)))
    }
}
