//! Strang split-step propagation of the complex envelope.

use std::f64::consts::PI;

use num_complex::Complex64;

use super::kg::StepConfig;
use super::potential::{Boundary, Potential};
use crate::error::{contract, Result};
use crate::signal::transform::{plan, Direction, Dst1};
use crate::signal::{Axis, ParticleParams, SampledField};

/// Kinetic eigenvalues of the mode basis: `hbar^2 k^2 / 2m` on periodic grids, the
/// 3-point finite-difference spectrum on Dirichlet grids.
fn kinetic_energies(space: &Axis, boundary: Boundary, params: &ParticleParams) -> Vec<f64> {
    let n = space.count();
    let hbar = params.hbar();
    let m = params.mass();
    match boundary {
        Boundary::Periodic => (0..n)
            .map(|b| {
                let k = space.frequency(b);
                hbar * hbar * k * k / (2.0 * m)
            })
            .collect(),
        Boundary::Dirichlet => {
            let dx = space.step();
            (1..=n)
                .map(|q| {
                    hbar * hbar / (m * dx * dx) * (1.0 - (q as f64 * PI / (n as f64 + 1.0)).cos())
                })
                .collect()
        }
    }
}

/// Default step: kinetic phase per step `pi / 8` at the fastest mode.
pub fn default_split_dt(space: &Axis, boundary: Boundary, params: &ParticleParams) -> f64 {
    let emax = kinetic_energies(space, boundary, params)
        .into_iter()
        .fold(0.0, f64::max);
    if emax == 0.0 {
        1.0
    } else {
        PI / 8.0 * params.hbar() / emax
    }
}

/// Evolve `i hbar d_t psi = -(hbar^2 / 2m) psi_xx + V psi` with half potential steps
/// around a full kinetic step.
pub fn schrodinger_propagate(
    envelope: &SampledField,
    potential: &Potential,
    params: &ParticleParams,
    config: &StepConfig,
) -> Result<SampledField> {
    if envelope.time().is_some() {
        return contract("expected a spatial slice without a time axis");
    }
    let space = *envelope.space();
    let boundary = potential.boundary();
    if boundary == Boundary::Dirichlet {
        potential.check_walls(&space)?;
    }
    let v = potential.sample(&space)?;
    let n = space.count();
    let hbar = params.hbar();
    let dt = config.dt;

    let half_v: Vec<Complex64> = v
        .iter()
        .map(|v| Complex64::from_polar(1.0, -v * dt / (2.0 * hbar)))
        .collect();
    let norm = match boundary {
        Boundary::Periodic => 1.0 / n as f64,
        Boundary::Dirichlet => 1.0,
    };
    let kinetic: Vec<Complex64> = kinetic_energies(&space, boundary, params)
        .into_iter()
        .map(|e| Complex64::from_polar(norm, -e * dt / hbar))
        .collect();

    let fwd = plan(n, Direction::Forward);
    let inv = plan(n, Direction::Backward);
    let dst = Dst1::new(n);
    let kinetic_step = |psi: &mut [Complex64]| match boundary {
        Boundary::Periodic => {
            fwd.process(psi);
            psi.iter_mut().zip(&kinetic).for_each(|(p, k)| *p *= k);
            inv.process(psi);
        }
        Boundary::Dirichlet => {
            dst.apply(psi);
            psi.iter_mut().zip(&kinetic).for_each(|(p, k)| *p *= k);
            dst.apply(psi);
        }
    };

    let axis = config.record_axis()?;
    let mut psi = envelope.row(0).to_vec();
    let mut frames = Vec::with_capacity(axis.count());
    frames.push(psi.clone());
    for step in 1..=config.steps {
        psi.iter_mut().zip(&half_v).for_each(|(p, h)| *p *= h);
        kinetic_step(&mut psi);
        psi.iter_mut().zip(&half_v).for_each(|(p, h)| *p *= h);
        if step % config.record_every == 0 {
            frames.push(psi.clone());
        }
    }
    SampledField::stack(space, axis, &frames)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::signal::AxisKind;

    #[test]
    fn free_mode_rotates_at_kinetic_rate() {
        let space = Axis::periodic(0.0, 2.0 * PI, 32, AxisKind::Space).unwrap();
        let p = ParticleParams::default();
        let k0 = 4.0;
        let init = SampledField::from_space_fn(space, |x| Complex64::from_polar(1.0, k0 * x));
        let cfg = StepConfig::new(0.01, 50, 10).unwrap();
        let out = schrodinger_propagate(&init, &Potential::Zero, &p, &cfg).unwrap();
        let t = out.time().unwrap().last();
        let phase = Complex64::from_polar(1.0, -k0 * k0 / 2.0 * t);
        for (v, v0) in out.row(5).iter().zip(init.row(0)) {
            assert!((v - v0 * phase).norm() < 1e-12);
        }
    }

    #[test]
    fn dirichlet_steps_conserve_norm() {
        let space = Axis::interior(-5.0, 5.0, 127, AxisKind::Space).unwrap();
        let p = ParticleParams::default();
        let h = Potential::InfiniteWell {
            left: -5.0,
            right: 5.0,
        };
        let init = SampledField::from_space_fn(space, |x| {
            Complex64::from_polar((-(x - 1.0) * (x - 1.0)).exp(), 2.0 * x)
        });
        let cfg = StepConfig::new(1e-3, 1000, 1000).unwrap();
        let out = schrodinger_propagate(&init, &h, &p, &cfg).unwrap();
        let n0: f64 = out.row(0).iter().map(|v| v.norm_sqr()).sum();
        let n1: f64 = out.row(1).iter().map(|v| v.norm_sqr()).sum();
        assert!(((n1 - n0) / n0).abs() < 1e-10);
    }
}
