use serde::{Deserialize, Serialize};

use super::distribution::DiscreteDistribution;
use crate::error::{contract, Error, Result};
use crate::observables::{energy_moments, MomentTable, Route, Window};
use crate::signal::axis::BinClass;
use crate::signal::transform::{plan, Direction};
use crate::signal::{ParticleParams, SampledField};

/// Largest accepted relative gap between the two moment routes.
pub const ROUTE_TOLERANCE: f64 = 1e-6;

/// Energy moments `0..=max_order` of an envelope over the window, from the derivative
/// route, after checking them against the spectral route.
///
/// Gaps are measured relative to `max(|m_r|, m_2^(r/2))`, the natural size of an
/// order-`r` moment, so near-zero odd moments are not over-penalized.
pub fn moments_from_dynamics(
    envelope: &SampledField,
    window: &Window,
    max_order: usize,
    params: &ParticleParams,
) -> Result<MomentTable> {
    let mut derivative = energy_moments(envelope, window, max_order, Route::Derivative, params)?;
    let spectral = energy_moments(envelope, window, max_order, Route::Spectral, params)?;
    let width = spectral.values.get(2).map_or(1.0, |m2| m2.abs().sqrt());
    let gaps: Vec<f64> = derivative
        .values
        .iter()
        .zip(&spectral.values)
        .enumerate()
        .map(|(r, (d, s))| {
            let scale = s.abs().max(width.powi(r as i32));
            if scale == 0.0 {
                (d - s).abs()
            } else {
                (d - s).abs() / scale
            }
        })
        .collect();
    if let Some((order, gap)) = gaps
        .iter()
        .enumerate()
        .find(|(_, g)| **g > ROUTE_TOLERANCE || !g.is_finite())
    {
        return Err(Error::RouteDisagreement {
            order,
            gap: *gap,
            tolerance: ROUTE_TOLERANCE,
        });
    }
    derivative.route_gaps = Some(gaps);
    Ok(derivative)
}

/// Momentum distribution `P_j = |psi~(k_j)|^2 / sum |psi~|^2` of the slice at `t_index`
/// over the plane-wave basis of a periodic grid, support `hbar k_j` ascending.
///
/// The Nyquist bin is shared by `+k_N` and `-k_N`; its mass is split evenly.
pub fn momentum_probabilities(
    field: &SampledField,
    t_index: usize,
    params: &ParticleParams,
) -> Result<DiscreteDistribution> {
    if t_index >= field.n_time() {
        return contract(format!("time index {t_index} out of range"));
    }
    let space = field.space();
    let n = space.count();
    let mut buf = field.row(t_index).to_vec();
    plan(n, Direction::Forward).process(&mut buf);
    let power: Vec<f64> = buf.iter().map(|v| v.norm_sqr()).collect();
    let total: f64 = power.iter().sum();
    if !(total > 0.0) {
        return Err(Error::UndefinedMoment("field has zero energy".into()));
    }
    let hbar = params.hbar();
    let mut pairs: Vec<(f64, f64)> = Vec::with_capacity(n + 1);
    for (m, p) in power.iter().enumerate() {
        let k = space.frequency(m);
        if space.bin_class(m) == BinClass::Nyquist {
            pairs.push((hbar * k, 0.5 * p / total));
            pairs.push((-hbar * k, 0.5 * p / total));
        } else {
            pairs.push((hbar * k, p / total));
        }
    }
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    let (support, masses) = pairs.into_iter().unzip();
    DiscreteDistribution::new(support, masses)
}

/// A reconstruction run bundled for serialization.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MomentSummary {
    pub moments: MomentTable,
    pub distribution: DiscreteDistribution,
}
