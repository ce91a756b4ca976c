//! Klein-Gordon propagation of the doubly analytic signal `psi_{>+}`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::dispersion::DispersionBranch;
use super::operators::Laplacian;
use super::potential::{Boundary, Potential};
use crate::error::{contract, Error, Result};
use crate::par::*;
use crate::signal::axis::{bin_class, BinClass};
use crate::signal::transform::{plan, Direction};
use crate::signal::{Axis, AxisKind, ParticleParams, SampledField};

/// Largest tolerated fraction of `sum |psi~(k)|^2` on negative wavenumbers.
pub const ANALYTIC_TOLERANCE: f64 = 1e-20;

fn require_slice(field: &SampledField) -> Result<()> {
    if field.time().is_some() {
        return contract("expected a spatial slice without a time axis");
    }
    Ok(())
}

/// Fraction of spatial spectral energy carried by negative wavenumbers.
pub fn negative_k_fraction(slice: &SampledField) -> f64 {
    let n = slice.n_space();
    let mut buf = slice.row(0).to_vec();
    plan(n, Direction::Forward).process(&mut buf);
    let total: f64 = buf.iter().map(|v| v.norm_sqr()).sum();
    if total == 0.0 {
        return 0.0;
    }
    let neg: f64 = buf
        .iter()
        .enumerate()
        .filter(|(m, _)| bin_class(*m, n) == BinClass::Negative)
        .map(|(_, v)| v.norm_sqr())
        .sum();
    neg / total
}

/// Exact per-mode evolution `psi~(k, t) = psi~(k, 0) e^{-i w(k) t}` on a periodic grid.
pub fn kg_propagate_spectral(
    initial: &SampledField,
    branch: &DispersionBranch,
    times: &Axis,
) -> Result<SampledField> {
    require_slice(initial)?;
    let frac = negative_k_fraction(initial);
    if frac > ANALYTIC_TOLERANCE {
        return contract(format!(
            "initial field is not spatially analytic (negative-k energy fraction {frac:e}); \
             apply analytic_space first"
        ));
    }
    let space = *initial.space();
    let n = space.count();
    let mut spectrum = initial.row(0).to_vec();
    plan(n, Direction::Forward).process(&mut spectrum);
    let norm = 1.0 / n as f64;
    let omega: Vec<f64> = (0..n).map(|m| branch.omega(space.frequency(m))).collect();
    let inv = plan(n, Direction::Backward);
    let mut values = vec![Complex64::default(); n * times.count()];
    values.par_chunks_mut(n).enumerate().for_each(|(i, row)| {
        let t = times.value(i);
        for m in 0..n {
            row[m] = spectrum[m] * Complex64::from_polar(norm, -omega[m] * t);
        }
        inv.process(row);
    });
    SampledField::complex(space, Some(times.with_kind(AxisKind::Time)), values)
}

/// How the stepper obtains `d psi / dt` at `t = 0`.
#[derive(Debug, Clone)]
pub enum InitialRate {
    /// Synthesized from the positive-frequency content of the initial field.
    Synthesized,
    /// Supplied explicitly as a spatial slice.
    Explicit(SampledField),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StepConfig {
    pub dt: f64,
    pub steps: usize,
    /// Store every `record_every`-th level (the initial level is always stored).
    pub record_every: usize,
}

impl StepConfig {
    pub fn new(dt: f64, steps: usize, record_every: usize) -> Result<Self> {
        if !(dt > 0.0 && dt.is_finite()) {
            return contract("dt must be positive and finite");
        }
        if record_every == 0 || steps < record_every {
            return contract("need 0 < record_every <= steps");
        }
        Ok(Self {
            dt,
            steps,
            record_every,
        })
    }

    pub(crate) fn record_axis(&self) -> Result<Axis> {
        Axis::new(
            0.0,
            self.dt * self.record_every as f64,
            self.steps / self.record_every + 1,
            AxisKind::Time,
        )
    }
}

#[derive(Debug, Clone)]
pub struct KgFdRun {
    pub field: SampledField,
    /// Relative residual of the continuous equation evaluated with fourth-order
    /// time differences near the final level; `None` with fewer than 4 steps.
    pub residual: Option<f64>,
}

struct Coefficients {
    c2: f64,
    dt: f64,
    /// `V / hbar` per grid point.
    nu: Vec<f64>,
    /// `mu^2 - V^2 / (hbar c)^2` per grid point.
    lambda0: Vec<f64>,
}

/// Largest `w_max` for the leapfrog root condition, and whether it holds at `dt`.
fn leapfrog_stable(co: &Coefficients, lap_radius: f64, dt: f64) -> bool {
    co.nu.iter().zip(&co.lambda0).all(|(&nu, &l0)| {
        [0.0, lap_radius].iter().all(|&kappa2| {
            let omega2 = co.c2 * (kappa2 + l0);
            (omega2 * dt * dt - 2.0).abs() <= 2.0 * (1.0 + nu * nu * dt * dt).sqrt()
        })
    })
}

fn check_stability(co: &Coefficients, lap_radius: f64, dx: f64) -> Result<()> {
    let c = co.c2.sqrt();
    let cfl_dt = dx / c;
    let mut stable_dt = cfl_dt;
    while !leapfrog_stable(co, lap_radius, stable_dt) {
        stable_dt *= 0.9;
    }
    let suggested_dt = stable_dt * 0.9;
    if co.dt * c / dx > 1.0 {
        return Err(Error::Stability {
            dt: co.dt,
            suggested_dt,
            reason: format!("c dt / dx = {} exceeds 1", co.dt * c / dx),
        });
    }
    if !leapfrog_stable(co, lap_radius, co.dt) {
        return Err(Error::Stability {
            dt: co.dt,
            suggested_dt,
            reason: "leapfrog roots leave the unit circle for the fastest mode".into(),
        });
    }
    Ok(())
}

/// Default step for the leapfrog stepper: `w_max dt = 0.1`.
pub fn default_fd_dt(potential: &Potential, space: &Axis, params: &ParticleParams) -> Result<f64> {
    let v = potential.sample(space)?;
    let lap = Laplacian::new(potential.boundary(), space.count(), space.step());
    let c = params.light_speed();
    let vmax = v.iter().fold(0.0_f64, |m, v| m.max(v.abs())) / params.hbar();
    let omega_max = vmax + (c * c * lap.spectral_radius() + params.latent_pulsation().powi(2)).sqrt();
    Ok(0.1 / omega_max)
}

/// Leapfrog integration of
/// `psi_xx - psi_tt / c^2 - i (2V / hbar c^2) psi_t = (mu^2 - V^2 / hbar^2 c^2) psi`.
pub fn kg_propagate_fd(
    initial: &SampledField,
    rate: &InitialRate,
    potential: &Potential,
    params: &ParticleParams,
    config: &StepConfig,
) -> Result<KgFdRun> {
    require_slice(initial)?;
    let space = *initial.space();
    let boundary = potential.boundary();
    if boundary == Boundary::Dirichlet {
        potential.check_walls(&space)?;
    }
    let n = space.count();
    let dx = space.step();
    let dt = config.dt;
    let v = potential.sample(&space)?;
    let hbar = params.hbar();
    let c = params.light_speed();
    let mu = params.inverse_compton_length();
    let co = Coefficients {
        c2: c * c,
        dt,
        nu: v.iter().map(|v| v / hbar).collect(),
        lambda0: v
            .iter()
            .map(|v| mu * mu - v * v / (hbar * hbar * c * c))
            .collect(),
    };
    let lap = Laplacian::new(boundary, n, dx);
    check_stability(&co, lap.spectral_radius(), dx)?;

    let psi0 = initial.row(0).to_vec();
    let mut lap0 = vec![Complex64::default(); n];
    lap.apply(&psi0, &mut lap0);
    let i = Complex64::i();

    let rate0: Vec<Complex64> = match rate {
        InitialRate::Explicit(f) => {
            require_slice(f)?;
            if !f.space().matches(&space) {
                return Err(Error::GridMismatch("initial rate grid differs".into()));
            }
            f.row(0).to_vec()
        }
        InitialRate::Synthesized => match (boundary, potential.constant_value()) {
            (Boundary::Periodic, Some(cv)) => {
                let branch = DispersionBranch::new(*params, cv);
                let mut buf = psi0.clone();
                plan(n, Direction::Forward).process(&mut buf);
                for (m, b) in buf.iter_mut().enumerate() {
                    *b *= -i * branch.omega(space.frequency(m)) / n as f64;
                }
                plan(n, Direction::Backward).process(&mut buf);
                buf
            }
            _ => {
                // -i (w_c + H / hbar) psi with H = -(hbar^2 / 2m) d_xx + V
                let wc = params.latent_pulsation();
                let m = params.mass();
                (0..n)
                    .map(|j| {
                        let h = -hbar * hbar / (2.0 * m) * lap0[j] + v[j] * psi0[j];
                        -i * (wc * psi0[j] + h / hbar)
                    })
                    .collect()
            }
        },
    };

    // psi_tt = -2 i nu psi_t + c^2 (lap psi - lambda0 psi)
    let accel = |psi: &[Complex64], lp: &[Complex64], rate: &[Complex64], j: usize| {
        -2.0 * i * co.nu[j] * rate[j] + co.c2 * (lp[j] - co.lambda0[j] * psi[j])
    };
    let psi1: Vec<Complex64> = (0..n)
        .map(|j| psi0[j] + dt * rate0[j] + 0.5 * dt * dt * accel(&psi0, &lap0, &rate0, j))
        .collect();

    let inv_dt2 = 1.0 / (dt * dt);
    let lead: Vec<Complex64> = co
        .nu
        .iter()
        .map(|nu| 1.0 / (Complex64::new(inv_dt2, 0.0) + i * nu / dt))
        .collect();

    let axis = config.record_axis()?;
    let mut frames: Vec<Vec<Complex64>> = Vec::with_capacity(axis.count());
    frames.push(psi0.clone());
    if config.record_every == 1 {
        frames.push(psi1.clone());
    }
    let keep = 5;
    let mut history: Vec<Vec<Complex64>> = vec![psi0, psi1];
    let mut lp = vec![Complex64::default(); n];
    for step in 2..=config.steps {
        let prev = &history[history.len() - 2];
        let cur = &history[history.len() - 1];
        lap.apply(cur, &mut lp);
        let next: Vec<Complex64> = (0..n)
            .map(|j| {
                let rhs = (2.0 * cur[j] - prev[j]) * inv_dt2
                    + i * co.nu[j] / dt * prev[j]
                    + co.c2 * (lp[j] - co.lambda0[j] * cur[j]);
                rhs * lead[j]
            })
            .collect();
        if step % config.record_every == 0 {
            frames.push(next.clone());
        }
        history.push(next);
        if history.len() > keep {
            history.remove(0);
        }
    }
    let residual = (history.len() == keep).then(|| residual5(&history, &lap, &co));
    let field = SampledField::stack(space, axis, &frames)?;
    Ok(KgFdRun { field, residual })
}

/// Continuous-equation residual at the middle of five consecutive levels.
fn residual5(levels: &[Vec<Complex64>], lap: &Laplacian, co: &Coefficients) -> f64 {
    let n = levels[2].len();
    let dt = co.dt;
    let mut lp = vec![Complex64::default(); n];
    lap.apply_reference(&levels[2], &mut lp);
    let i = Complex64::i();
    let (mut num, mut den) = (0.0, 0.0);
    for j in 0..n {
        let f = |l: usize| levels[l][j];
        let ftt = (-f(4) + 16.0 * f(3) - 30.0 * f(2) + 16.0 * f(1) - f(0)) / (12.0 * dt * dt);
        let ft = (-f(4) + 8.0 * f(3) - 8.0 * f(1) + f(0)) / (12.0 * dt);
        let terms = [
            lp[j],
            -ftt / co.c2,
            -i * 2.0 * co.nu[j] / co.c2 * ft,
            -co.lambda0[j] * f(2),
        ];
        let r: Complex64 = terms.iter().sum();
        num += r.norm_sqr();
        den += terms.iter().map(|t| t.norm()).sum::<f64>().powi(2);
    }
    if den == 0.0 {
        0.0
    } else {
        (num / den).sqrt()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn grid() -> Axis {
        Axis::periodic(0.0, 2.0 * PI, 64, AxisKind::Space).unwrap()
    }

    #[test]
    fn single_mode_is_a_plane_wave() {
        let p = ParticleParams::natural(10.0).unwrap();
        let b = DispersionBranch::free(p);
        let k0 = 3.0;
        let init = SampledField::from_space_fn(grid(), |x| Complex64::from_polar(1.0, k0 * x));
        let times = Axis::new(0.0, 0.01, 20, AxisKind::Time).unwrap();
        let out = kg_propagate_spectral(&init, &b, &times).unwrap();
        let w = b.omega(k0);
        for i in 0..times.count() {
            let t = times.value(i);
            for (j, v) in out.row(i).iter().enumerate() {
                let x = grid().value(j);
                assert!((v - Complex64::from_polar(1.0, k0 * x - w * t)).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn rejects_negative_wavenumbers() {
        let p = ParticleParams::default();
        let init = SampledField::from_space_fn(grid(), |x| Complex64::new(x.cos(), 0.0));
        let times = Axis::new(0.0, 0.01, 4, AxisKind::Time).unwrap();
        assert!(kg_propagate_spectral(&init, &DispersionBranch::free(p), &times).is_err());
    }

    #[test]
    fn stepper_rejects_large_dt_with_suggestion() {
        let p = ParticleParams::natural(10.0).unwrap();
        let init = SampledField::from_space_fn(grid(), |x| Complex64::from_polar(1.0, x));
        let cfg = StepConfig::new(0.05, 10, 1).unwrap();
        match kg_propagate_fd(&init, &InitialRate::Synthesized, &Potential::Zero, &p, &cfg) {
            Err(Error::Stability { suggested_dt, .. }) => {
                let cfg = StepConfig::new(suggested_dt, 10, 1).unwrap();
                kg_propagate_fd(&init, &InitialRate::Synthesized, &Potential::Zero, &p, &cfg)
                    .unwrap();
            }
            other => panic!("expected a stability error, got {other:?}"),
        }
    }

    #[test]
    fn zero_field_stays_zero() {
        let p = ParticleParams::natural(10.0).unwrap();
        let init = SampledField::zeros(grid(), None);
        let cfg = StepConfig::new(1e-3, 20, 5).unwrap();
        let run =
            kg_propagate_fd(&init, &InitialRate::Synthesized, &Potential::Zero, &p, &cfg).unwrap();
        assert_eq!(run.field.n_time(), 5);
        assert_eq!(run.field.max_abs(), 0.0);
    }
}
