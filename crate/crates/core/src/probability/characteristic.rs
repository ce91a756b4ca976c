use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::distribution::DiscreteDistribution;
use crate::error::{contract, Error, Result};
use crate::observables::MomentTable;
use crate::signal::Axis;

/// Largest accepted truncation bound of the moment series.
pub const TAIL_LIMIT: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CharacteristicSource {
    /// Series `sum_{r <= order} (i s)^r / r! m_r`.
    FromMoments { order: usize, energy_bound: f64 },
    /// `sum_n P_n e^{i s x_n}`.
    FromDistribution,
}

/// `G(s) = <e^{i s X}>` sampled on `s_axis`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CharacteristicFunction {
    pub s_axis: Axis,
    pub values: Vec<Complex64>,
    pub source: CharacteristicSource,
    /// Per-point bound on the truncation error (zero for exact sums).
    pub tail_bounds: Vec<f64>,
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

/// Largest `|s|` whose truncation bound `(|s| B)^(R+1) / (R+1)!` stays within the limit.
pub fn max_usable_s(order: usize, energy_bound: f64) -> f64 {
    (factorial(order + 1) * TAIL_LIMIT).powf(1.0 / (order + 1) as f64) / energy_bound
}

/// Truncated moment series. `energy_bound` must bound `|X|` on the support; it sets
/// the per-point tail bound `(|s| B)^(R+1) / (R+1)!`.
pub fn characteristic_from_moments(
    moments: &MomentTable,
    s_axis: &Axis,
    energy_bound: f64,
) -> Result<CharacteristicFunction> {
    if !(energy_bound > 0.0 && energy_bound.is_finite()) {
        return contract("energy bound must be positive and finite");
    }
    let order = moments.max_order();
    let tail = |s: f64| (s.abs() * energy_bound).powi(order as i32 + 1) / factorial(order + 1);
    let s_values = s_axis.values();
    if let Some(&s) = s_values.iter().find(|s| tail(**s) > TAIL_LIMIT) {
        return Err(Error::TailBound {
            s,
            bound: tail(s),
            limit: TAIL_LIMIT,
            max_s: max_usable_s(order, energy_bound),
        });
    }
    let values = s_values
        .iter()
        .map(|&s| {
            let mut term = Complex64::new(1.0, 0.0);
            let mut sum = Complex64::new(moments.values[0], 0.0);
            for r in 1..=order {
                term *= Complex64::new(0.0, s) / r as f64;
                sum += term * moments.values[r];
            }
            sum
        })
        .collect();
    Ok(CharacteristicFunction {
        s_axis: *s_axis,
        values,
        source: CharacteristicSource::FromMoments {
            order,
            energy_bound,
        },
        tail_bounds: s_values.iter().map(|s| tail(*s)).collect(),
    })
}

/// Exact characteristic function of a discrete distribution, normalized so `G(0) = 1`.
pub fn characteristic_from_distribution(
    dist: &DiscreteDistribution,
    s_axis: &Axis,
) -> CharacteristicFunction {
    let total = dist.total();
    let values = s_axis
        .values()
        .iter()
        .map(|&s| {
            dist.support
                .iter()
                .zip(&dist.masses)
                .map(|(x, p)| Complex64::from_polar(*p, s * x))
                .sum::<Complex64>()
                / total
        })
        .collect();
    CharacteristicFunction {
        s_axis: *s_axis,
        values,
        source: CharacteristicSource::FromDistribution,
        tail_bounds: vec![0.0; s_axis.count()],
    }
}

impl CharacteristicFunction {
    /// `true` when `|self - other| <= self.tail + other.tail + slack` at every point.
    pub fn agrees_with(&self, other: &CharacteristicFunction, slack: f64) -> bool {
        self.values
            .iter()
            .zip(&other.values)
            .zip(self.tail_bounds.iter().zip(&other.tail_bounds))
            .all(|((a, b), (ta, tb))| (a - b).norm() <= ta + tb + slack)
    }

    pub fn to_toml_string(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Parse(e.to_string()))
    }
}
