//! Diagnostics linking the Klein-Gordon signal to the Schrodinger envelope.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::dispersion::DispersionBranch;
use super::kg::{kg_propagate_spectral, StepConfig};
use super::operators::stencil3;
use super::potential::Potential;
use super::schrodinger::schrodinger_propagate;
use crate::error::{contract, Result};
use crate::signal::{envelope_extract, time_derivative, Axis, ParticleParams, SampledField};

/// `||(hbar / 2 m c^2) d_tt psi|| / ||d_t psi||` from central differences at interior
/// time samples: the relative size of the term dropped in the paraxial reduction.
pub fn paraxial_residual(envelope: &SampledField, params: &ParticleParams) -> Result<f64> {
    let time = envelope.require_time()?;
    if time.count() < 3 {
        return contract("paraxial residual needs at least 3 time samples");
    }
    let dt = time.step();
    let (mut d1, mut d2) = (0.0, 0.0);
    for i in 1..time.count() - 1 {
        let (a, b, c) = (envelope.row(i - 1), envelope.row(i), envelope.row(i + 1));
        for j in 0..envelope.n_space() {
            d1 += ((c[j] - a[j]) / (2.0 * dt)).norm_sqr();
            d2 += ((c[j] - 2.0 * b[j] + a[j]) / (dt * dt)).norm_sqr();
        }
    }
    if d1 == 0.0 {
        return Ok(0.0);
    }
    let scale = params.hbar() / (2.0 * params.mass() * params.light_speed().powi(2));
    Ok(scale * (d2 / d1).sqrt())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReductionReport {
    pub light_speed: f64,
    pub times: Vec<f64>,
    /// `max_x |KG envelope - Schrodinger|` per time.
    pub max_abs: Vec<f64>,
    /// `||KG envelope - Schrodinger|| / ||Schrodinger||` per time.
    pub relative_l2: Vec<f64>,
}

impl ReductionReport {
    pub fn max_relative_l2(&self) -> f64 {
        self.relative_l2.iter().copied().fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.max_abs.iter().copied().fold(0.0, f64::max)
    }
}

/// Propagate `envelope` (a spatially analytic slice at `t = 0`) both ways with `V = 0`
/// and compare: modulate onto the carrier, evolve exactly with the Klein-Gordon branch,
/// demodulate, and set against the split-step Schrodinger solution.
///
/// `times` must start at 0 and resolve the carrier (`step < pi / w_c`).
pub fn kg_envelope_vs_schrodinger(
    envelope: &SampledField,
    params: &ParticleParams,
    times: &Axis,
) -> Result<ReductionReport> {
    if times.origin() != 0.0 {
        return contract("comparison times must start at t = 0");
    }
    let branch = DispersionBranch::free(*params);
    // The carrier factor is 1 at t = 0, so psi_{>+}(x, 0) is the envelope itself.
    let kg = kg_propagate_spectral(envelope, &branch, times)?;
    let kg_env = envelope_extract(&kg, params)?;
    let cfg = StepConfig::new(times.step(), times.count() - 1, 1)?;
    let sch = schrodinger_propagate(envelope, &Potential::Zero, params, &cfg)?;

    let mut max_abs = Vec::with_capacity(times.count());
    let mut relative_l2 = Vec::with_capacity(times.count());
    for i in 0..times.count() {
        let (a, b) = (kg_env.row(i), sch.row(i));
        let mut worst = 0.0_f64;
        let (mut diff, mut refn) = (0.0, 0.0);
        for (x, y) in a.iter().zip(b) {
            let d = (x - y).norm();
            worst = worst.max(d);
            diff += d * d;
            refn += y.norm_sqr();
        }
        max_abs.push(worst);
        relative_l2.push(if refn == 0.0 { 0.0 } else { (diff / refn).sqrt() });
    }
    Ok(ReductionReport {
        light_speed: params.light_speed(),
        times: times.values(),
        max_abs,
        relative_l2,
    })
}

/// Apply `-(hbar^2 / 2m) d_xx - i hbar d_t + (V + m c^2)` to
/// `phi(x) e^{-i (E_c + energy) t / hbar}` and return the residual relative to
/// `||(V + m c^2) psi||`. The spatial operator is the Dirichlet 3-point stencil and the
/// time derivative is spectral, so `times` should hold a whole number of periods.
pub fn modulated_stationary_residual(
    phi: &SampledField,
    energy: f64,
    potential: &Potential,
    params: &ParticleParams,
    times: &Axis,
) -> Result<f64> {
    if phi.time().is_some() {
        return contract("expected a spatial slice without a time axis");
    }
    let space = *phi.space();
    potential.check_walls(&space)?;
    let v = potential.sample(&space)?;
    let hbar = params.hbar();
    let ec = params.rest_energy();
    let omega = (ec + energy) / hbar;
    let base = phi.row(0);
    let psi = SampledField::from_fn(space, *times, |x, t| {
        let j = ((x - space.origin()) / space.step()).round() as usize;
        base[j] * Complex64::from_polar(1.0, -omega * t)
    });
    let psi_t = time_derivative(&psi, 1)?;
    let n = space.count();
    let mut lap = vec![Complex64::default(); n];
    let (mut num, mut den) = (0.0, 0.0);
    let i = Complex64::i();
    for r in 0..times.count() {
        let row = psi.row(r);
        stencil3(row, space.step(), &mut lap);
        let rt = psi_t.row(r);
        for j in 0..n {
            let pot = (v[j] + ec) * row[j];
            let res = -hbar * hbar / (2.0 * params.mass()) * lap[j] - i * hbar * rt[j] + pot;
            num += res.norm_sqr();
            den += pot.norm_sqr();
        }
    }
    if den == 0.0 {
        return Ok(0.0);
    }
    Ok((num / den).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::signal::AxisKind;
    use std::f64::consts::PI;

    #[test]
    fn rest_envelope_has_no_paraxial_term() {
        let space = Axis::periodic(0.0, 1.0, 8, AxisKind::Space).unwrap();
        let times = Axis::new(0.0, 0.1, 5, AxisKind::Time).unwrap();
        let f = SampledField::from_fn(space, times, |_, _| Complex64::new(1.0, 0.0));
        assert_eq!(paraxial_residual(&f, &ParticleParams::default()).unwrap(), 0.0);
        let short = Axis::new(0.0, 0.1, 2, AxisKind::Time).unwrap();
        let g = SampledField::from_fn(space, short, |_, _| Complex64::new(1.0, 0.0));
        assert!(paraxial_residual(&g, &ParticleParams::default()).is_err());
    }

    #[test]
    fn zero_envelope_zero_discrepancy() {
        let space = Axis::periodic(-5.0, 5.0, 64, AxisKind::Space).unwrap();
        let p = ParticleParams::natural(10.0).unwrap();
        let times = Axis::new(0.0, 0.01, 10, AxisKind::Time).unwrap();
        let rep =
            kg_envelope_vs_schrodinger(&SampledField::zeros(space, None), &p, &times).unwrap();
        assert_eq!(rep.max_relative_l2(), 0.0);
        assert_eq!(rep.max_abs(), 0.0);
    }

    #[test]
    fn well_ground_state_annihilated_by_modulated_operator() {
        let n = 255;
        let l = 1.0;
        let space = Axis::interior(0.0, l, n, AxisKind::Space).unwrap();
        let p = ParticleParams::natural(10.0).unwrap();
        let dx = space.step();
        // Exact 3-point eigenpair of the box.
        let energy = (1.0 - (PI / (n as f64 + 1.0)).cos()) / (dx * dx);
        let phi = SampledField::from_real_space_fn(space, |x| (PI * x / l).sin());
        let omega = p.latent_pulsation() + energy;
        let times = Axis::new(0.0, 2.0 * PI / omega / 16.0, 16, AxisKind::Time).unwrap();
        let well = Potential::InfiniteWell { left: 0.0, right: l };
        let r = modulated_stationary_residual(&phi, energy, &well, &p, &times).unwrap();
        assert!(r < 1e-12, "{r}");
    }
}
