//! Brute-force reference optimum for the logistic fit.
//!
//! Shares nothing with the Levenberg-Marquardt path except curve evaluation.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{GrowthError, GrowthModel};

/// Search box. `offset` is sampled log-uniformly, the others linearly.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridBounds {
    pub asymptote: (f64, f64),
    pub offset: (f64, f64),
    pub rate: (f64, f64),
}

impl Default for GridBounds {
    fn default() -> Self {
        Self { asymptote: (40.0, 100.0), offset: (10.0, 1e4), rate: (0.1, 3.0) }
    }
}

impl GridBounds {
    fn validate(&self) -> Result<(), GrowthError> {
        for (name, (lo, hi)) in [("A", self.asymptote), ("a", self.offset), ("b", self.rate)] {
            if !(lo.is_finite() && hi.is_finite() && lo > 0.0 && hi >= lo) {
                return Err(GrowthError::InvalidBounds(format!("{name}: [{lo}, {hi}]")));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GridOptimum {
    pub model: GrowthModel,
    pub sse: f64,
    pub rmse: f64,
    /// Flattened grid index `(i_A · n + i_a) · n + i_b`.
    pub index: usize,
}

fn linspace(lo: f64, hi: f64, n: usize, i: usize) -> f64 {
    lo + (hi - lo) * i as f64 / (n - 1) as f64
}

fn logspace(lo: f64, hi: f64, n: usize, i: usize) -> f64 {
    (lo.ln() + (hi.ln() - lo.ln()) * i as f64 / (n - 1) as f64).exp()
}

/// Exhaustive search over `resolution³` grid points. Cells are scored in
/// parallel; the minimum is resolved by `(sse, index)` so ties go to the
/// lowest index regardless of scheduling.
pub fn grid_search_oracle(
    data: &[(f64, f64)],
    bounds: &GridBounds,
    resolution: usize,
) -> Result<GridOptimum, GrowthError> {
    if resolution < 10 {
        return Err(GrowthError::ResolutionTooLow(resolution));
    }
    bounds.validate()?;
    if data.is_empty() {
        return Err(GrowthError::InsufficientData(0));
    }
    let n = resolution;
    let point = |index: usize| {
        let (ia, rest) = (index / (n * n), index % (n * n));
        let (io, ir) = (rest / n, rest % n);
        GrowthModel::new(
            linspace(bounds.asymptote.0, bounds.asymptote.1, n, ia),
            logspace(bounds.offset.0, bounds.offset.1, n, io),
            linspace(bounds.rate.0, bounds.rate.1, n, ir),
        )
        .expect("bounds validated positive")
    };
    let (sse, index) = (0..n * n * n)
        .into_par_iter()
        .map(|i| {
            let s = point(i).sse(data);
            (if s.is_nan() { f64::INFINITY } else { s }, i)
        })
        .reduce(
            || (f64::INFINITY, usize::MAX),
            |a, b| if (b.0, b.1) < (a.0, a.1) { b } else { a },
        );
    Ok(GridOptimum { model: point(index), sse, rmse: (sse / data.len() as f64).sqrt(), index })
}

/// Compass search in `(ln A, ln a, ln b)`: try ± steps on each axis, halve
/// the step when nothing improves, stop below `1e-12`.
pub fn pattern_search_polish(data: &[(f64, f64)], start: GrowthModel) -> GrowthModel {
    let mut theta = start.params().map(f64::ln);
    let cost = |th: &[f64; 3]| {
        GrowthModel::new(th[0].exp(), th[1].exp(), th[2].exp())
            .map(|m| m.sse(data))
            .unwrap_or(f64::INFINITY)
    };
    let mut best = cost(&theta);
    let mut step = 0.1;
    let mut evaluations = 0usize;
    while step > 1e-12 && evaluations < 2_000_000 {
        let mut improved = false;
        for axis in 0..3 {
            for dir in [1.0, -1.0] {
                let mut trial = theta;
                trial[axis] += dir * step;
                let c = cost(&trial);
                evaluations += 1;
                if c < best {
                    best = c;
                    theta = trial;
                    improved = true;
                }
            }
        }
        if !improved {
            step *= 0.5;
        }
    }
    GrowthModel::new(theta[0].exp(), theta[1].exp(), theta[2].exp()).expect("exp of finite is positive")
}
