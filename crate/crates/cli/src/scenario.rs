//! Grids, bases, states and windows built from a validated scenario.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use wavesig::eigen::{assemble, solve_bound_states, EigenBasis};
use wavesig::observables::Window;
use wavesig::signal::format::read_field;
use wavesig::waves::{schrodinger_propagate, Boundary, StepConfig};
use wavesig::{Axis, AxisKind, ParticleParams, SampledField};

use crate::config::{AlignmentSpec, Coefficient, InitialState, ScenarioConfig};
use crate::CliError;

pub fn params(c: &ScenarioConfig) -> Result<ParticleParams, CliError> {
    let p = &c.particle;
    Ok(ParticleParams::new(p.mass, p.light_speed, p.hbar)?)
}

/// Periodic grids cover `[min, max)`; Dirichlet grids are the interior of `[min, max]`.
pub fn space_axis(c: &ScenarioConfig) -> Result<Axis, CliError> {
    let s = &c.grid.space;
    let axis = match c.potential.boundary() {
        Boundary::Periodic => Axis::periodic(s.min, s.max, s.count, AxisKind::Space)?,
        Boundary::Dirichlet => Axis::interior(s.min, s.max, s.count, AxisKind::Space)?,
    };
    Ok(axis)
}

pub fn time_count(c: &ScenarioConfig) -> Result<usize, CliError> {
    c.grid
        .time
        .map(|t| t.count)
        .ok_or_else(|| CliError::Usage("grid.time.count: required for this experiment".into()))
}

/// Unit-norm coefficients over the lowest levels, or `None` for states that are not
/// given in the eigenbasis.
pub fn coefficients(c: &ScenarioConfig) -> Option<Vec<Complex64>> {
    let raw: Vec<Complex64> = match c.initial_state.as_ref()? {
        InitialState::Eigen { n } => {
            let mut a = vec![Complex64::default(); n + 1];
            a[*n] = Complex64::new(1.0, 0.0);
            a
        }
        InitialState::Superposition { coefficients } => coefficients
            .iter()
            .map(|v| match v {
                Coefficient::Real(re) => Complex64::new(*re, 0.0),
                Coefficient::Complex([re, im]) => Complex64::new(*re, *im),
            })
            .collect(),
        InitialState::RandomSuperposition { count } => {
            let mut r = ChaCha8Rng::seed_from_u64(c.seed);
            (0..*count)
                .map(|_| {
                    Complex64::from_polar(r.random_range(0.2..1.0), r.random_range(0.0..std::f64::consts::TAU))
                })
                .collect()
        }
        _ => return None,
    };
    let norm = raw.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    Some(raw.into_iter().map(|a| a / norm).collect())
}

pub fn basis(c: &ScenarioConfig, n_states: usize) -> Result<EigenBasis, CliError> {
    basis_on(c, &space_axis(c)?, n_states)
}

pub fn basis_on(c: &ScenarioConfig, grid: &Axis, n_states: usize) -> Result<EigenBasis, CliError> {
    let b = solve_bound_states(&c.potential, grid, &params(c)?, n_states)?;
    if !b.is_complete() {
        return Err(CliError::Usage(format!(
            "potential holds only {} bound states on this grid, {} requested",
            b.len(),
            n_states
        )));
    }
    Ok(b)
}

/// The initial state as a unit-norm spatial slice.
pub fn initial_slice(c: &ScenarioConfig) -> Result<SampledField, CliError> {
    let space = space_axis(c)?;
    let slice = match c.initial_state.as_ref() {
        Some(InitialState::Gaussian { k0, sigma, x0 }) => SampledField::from_space_fn(space, |x| {
            let u = x - x0;
            Complex64::from_polar((-u * u / (4.0 * sigma * sigma)).exp(), k0 * u)
        }),
        Some(InitialState::Tabulated { file }) => {
            let f = read_field(file)?;
            if f.time().is_some() || !f.space().matches(&space) {
                return Err(CliError::Usage(format!(
                    "initial_state.file: {} is not a slice on the scenario grid",
                    file.display()
                )));
            }
            f
        }
        Some(_) => {
            let a = coefficients(c).expect("eigenbasis state");
            let b = basis(c, a.len())?;
            let t0 = Axis::new(0.0, 1.0, 2, AxisKind::Time)?;
            assemble(&a, &b, &t0)?.slice_at(0)
        }
        None => return Err(CliError::Usage("initial_state.kind: required".into())),
    };
    let norm = slice.norm_sqr_space().sqrt();
    if !(norm > 0.0) {
        return Err(CliError::Usage("initial_state: the state vanishes on the grid".into()));
    }
    Ok(slice.scaled(Complex64::new(1.0 / norm, 0.0)))
}

/// Observation window; by default beat-commensurate for at most two populated levels
/// and tapered otherwise.
pub fn window(c: &ScenarioConfig, energies: Option<&[f64]>) -> Result<Window, CliError> {
    let spec = c.window;
    let alignment = spec.map(|w| w.alignment).unwrap_or(match energies {
        Some(e) if e.len() <= 2 => AlignmentSpec::BeatCommensurate,
        _ => AlignmentSpec::Tapered,
    });
    let half = spec.and_then(|w| w.half_width);
    let window = match alignment {
        AlignmentSpec::BeatCommensurate => {
            let e = energies.ok_or_else(|| {
                CliError::Usage("window.alignment: beat_commensurate needs an eigenbasis state".into())
            })?;
            let min = spec.and_then(|w| w.min_half_width).or(half).unwrap_or(1.0);
            Window::beat_commensurate(e, c.particle.hbar, min)?
        }
        AlignmentSpec::Plain => Window::plain(half.unwrap_or(20.0))?,
        AlignmentSpec::Tapered => Window::tapered(half.unwrap_or(20.0))?,
    };
    Ok(window.with_max_order(c.options.max_order.max(8)))
}

/// Levels with nonzero weight, and their energies.
pub fn populated(a: &[Complex64], basis: &EigenBasis) -> (Vec<usize>, Vec<f64>) {
    a.iter()
        .enumerate()
        .filter(|(_, v)| v.norm_sqr() > 0.0)
        .map(|(n, _)| (n, basis.energies()[n]))
        .unzip()
}

/// Envelope sampled over the window: exact phases for eigenbasis states, split-step
/// evolution from the start of the window otherwise.
pub fn envelope_over(
    c: &ScenarioConfig,
    window: &Window,
    basis: Option<&EigenBasis>,
) -> Result<SampledField, CliError> {
    let n_time = time_count(c)?;
    let times = window.axis(n_time)?;
    if let (Some(a), Some(b)) = (coefficients(c), basis) {
        return Ok(assemble(&a, b, &times)?);
    }
    let slice = initial_slice(c)?;
    let cfg = StepConfig::new(times.step(), n_time - 1, 1)?;
    let run = schrodinger_propagate(&slice, &c.potential, &params(c)?, &cfg)?;
    // Moments are invariant under a time shift, so relabel the run onto the window.
    Ok(SampledField::complex(*run.space(), Some(times), run.values().to_vec())?)
}
