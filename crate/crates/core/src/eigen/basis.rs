use std::fs;
use std::path::Path;

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::tridiag::Tridiagonal;
use crate::error::{contract, Error, Result};
use crate::signal::format::{read_field, write_field};
use crate::signal::{Axis, ParticleParams, SampledField};
use crate::waves::Potential;

/// Eigenvalues closer than this (relative) are flagged as degenerate.
pub const DEGENERACY_TOL: f64 = 1e-9;

/// Lowest stationary states of `-(hbar^2 / 2m) d_xx + V` on a Dirichlet grid.
///
/// `energies[n]` and `states[n]` describe level `n + 1`; states are real and satisfy
/// `sum |phi|^2 dx = 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenBasis {
    energies: Vec<f64>,
    states: Vec<SampledField>,
    potential: Potential,
    grid: Axis,
    params: ParticleParams,
    degenerate: Vec<bool>,
    requested: usize,
}

fn hamiltonian(potential: &Potential, grid: &Axis, params: &ParticleParams) -> Result<Tridiagonal> {
    potential.check_walls(grid)?;
    let v = potential.sample(grid)?;
    let dx = grid.step();
    let kin = params.hbar() * params.hbar() / (2.0 * params.mass() * dx * dx);
    let d: Vec<f64> = v.iter().map(|v| 2.0 * kin + v).collect();
    let e = vec![-kin; grid.count() - 1];
    Ok(Tridiagonal::new(d, e))
}

fn is_bound(potential: &Potential, grid: &Axis, energy: f64) -> bool {
    if potential.has_hard_walls() {
        return true;
    }
    let edge = potential
        .evaluate(grid.origin())
        .min(potential.evaluate(grid.last()));
    energy < edge
}

fn fix_phase(v: &mut [f64]) {
    let max = v.iter().fold(0.0_f64, |m, x| m.max(x.abs()));
    if let Some(first) = v.iter().find(|x| x.abs() > 1e-6 * max) {
        if *first < 0.0 {
            v.iter_mut().for_each(|x| *x = -*x);
        }
    }
}

fn degeneracy_flags(energies: &[f64]) -> Vec<bool> {
    (0..energies.len())
        .map(|i| {
            let close = |j: usize| {
                (energies[i] - energies[j]).abs()
                    <= DEGENERACY_TOL * energies[i].abs().max(energies[j].abs()).max(1.0)
            };
            (i > 0 && close(i - 1)) || (i + 1 < energies.len() && close(i + 1))
        })
        .collect()
}

fn basis_from_vectors(
    potential: &Potential,
    grid: &Axis,
    params: &ParticleParams,
    requested: usize,
    pairs: Vec<(f64, Vec<f64>)>,
) -> Result<EigenBasis> {
    let scale = 1.0 / grid.step().sqrt();
    let mut energies = Vec::new();
    let mut states = Vec::new();
    for (e, mut v) in pairs {
        if !is_bound(potential, grid, e) {
            break;
        }
        fix_phase(&mut v);
        let v: Vec<f64> = v.iter().map(|x| x * scale).collect();
        energies.push(e);
        states.push(SampledField::real(*grid, None, &v)?);
    }
    if energies.len() < requested {
        log::warn!(
            "only {} of {} requested states are bound on this grid",
            energies.len(),
            requested
        );
    }
    Ok(EigenBasis {
        degenerate: degeneracy_flags(&energies),
        energies,
        states,
        potential: potential.clone(),
        grid: *grid,
        params: *params,
        requested,
    })
}

/// Lowest `n_max` bound states via Sturm bisection and inverse iteration.
///
/// Fewer states come back when the grid holds fewer bound levels; check
/// [`EigenBasis::is_complete`].
pub fn solve_bound_states(
    potential: &Potential,
    grid: &Axis,
    params: &ParticleParams,
    n_max: usize,
) -> Result<EigenBasis> {
    if n_max == 0 || n_max > grid.count() {
        return contract(format!("cannot request {n_max} states on {} points", grid.count()));
    }
    let h = hamiltonian(potential, grid, params)?;
    let mut vectors: Vec<Vec<f64>> = Vec::with_capacity(n_max);
    let mut pairs = Vec::with_capacity(n_max);
    for k in 0..n_max {
        let e = h.eigenvalue(k);
        if !is_bound(potential, grid, e) {
            break;
        }
        let v = h.eigenvector(e, &vectors);
        vectors.push(v.clone());
        pairs.push((e, v));
    }
    basis_from_vectors(potential, grid, params, n_max, pairs)
}

/// Same problem through a dense symmetric eigensolver; for cross-checks on small grids.
pub fn solve_bound_states_dense(
    potential: &Potential,
    grid: &Axis,
    params: &ParticleParams,
    n_max: usize,
) -> Result<EigenBasis> {
    if n_max == 0 || n_max > grid.count() {
        return contract(format!("cannot request {n_max} states on {} points", grid.count()));
    }
    let h = hamiltonian(potential, grid, params)?;
    let n = h.len();
    let m = DMatrix::from_fn(n, n, |i, j| {
        if i == j {
            h.d[i]
        } else if i + 1 == j {
            h.e[i]
        } else if j + 1 == i {
            h.e[j]
        } else {
            0.0
        }
    });
    let eig = SymmetricEigen::new(m);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let pairs = order
        .into_iter()
        .take(n_max)
        .map(|i| (eig.eigenvalues[i], eig.eigenvectors.column(i).iter().copied().collect()))
        .collect();
    basis_from_vectors(potential, grid, params, n_max, pairs)
}

impl EigenBasis {
    pub fn len(&self) -> usize {
        self.energies.len()
    }

    pub fn is_empty(&self) -> bool {
        self.energies.is_empty()
    }

    pub fn requested(&self) -> usize {
        self.requested
    }

    pub fn is_complete(&self) -> bool {
        self.len() == self.requested
    }

    pub fn energies(&self) -> &[f64] {
        &self.energies
    }

    pub fn states(&self) -> &[SampledField] {
        &self.states
    }

    pub fn potential(&self) -> &Potential {
        &self.potential
    }

    pub fn grid(&self) -> &Axis {
        &self.grid
    }

    pub fn params(&self) -> &ParticleParams {
        &self.params
    }

    pub fn degeneracy_flags(&self) -> &[bool] {
        &self.degenerate
    }

    /// `max |<phi_n, phi_m> dx - delta_nm|`.
    pub fn orthonormality_error(&self) -> f64 {
        let dx = self.grid.step();
        let mut worst = 0.0_f64;
        for (i, a) in self.states.iter().enumerate() {
            for (j, b) in self.states.iter().enumerate().skip(i) {
                let dot: Complex64 =
                    a.values().iter().zip(b.values()).map(|(x, y)| x.conj() * y).sum();
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((dot * dx - target).norm());
            }
        }
        worst
    }

    /// `||H phi_n - E_n phi_n|| / ||phi_n||` per state.
    pub fn residuals(&self) -> Result<Vec<f64>> {
        let h = hamiltonian(&self.potential, &self.grid, &self.params)?;
        let mut out = vec![0.0; self.grid.count()];
        Ok(self
            .states
            .iter()
            .zip(&self.energies)
            .map(|(s, e)| {
                let v: Vec<f64> = s.values().iter().map(|c| c.re).collect();
                h.apply(&v, &mut out);
                let num: f64 = out.iter().zip(&v).map(|(a, b)| (a - e * b).powi(2)).sum();
                let den: f64 = v.iter().map(|b| b * b).sum();
                (num / den).sqrt()
            })
            .collect())
    }

    /// Write `energies.toml` and one field file per state into `dir`.
    pub fn write_dir(&self, dir: impl AsRef<Path>) -> Result<()> {
        let dir = dir.as_ref();
        fs::create_dir_all(dir)?;
        let files: Vec<String> = (0..self.len()).map(|n| format!("state_{:03}.txt", n + 1)).collect();
        let table = EnergyTable {
            format: BASIS_FORMAT.into(),
            potential: self.potential.clone(),
            grid: self.grid,
            params: self.params,
            requested: self.requested,
            levels: self
                .energies
                .iter()
                .zip(&self.degenerate)
                .zip(&files)
                .enumerate()
                .map(|(i, ((e, d), f))| Level {
                    n: i + 1,
                    energy: *e,
                    degenerate: *d,
                    file: f.clone(),
                })
                .collect(),
        };
        let text = toml::to_string(&table).map_err(|e| Error::Parse(e.to_string()))?;
        fs::write(dir.join("energies.toml"), text)?;
        for (s, f) in self.states.iter().zip(&files) {
            write_field(dir.join(f), s)?;
        }
        Ok(())
    }

    pub fn read_dir(dir: impl AsRef<Path>) -> Result<Self> {
        let dir = dir.as_ref();
        let text = fs::read_to_string(dir.join("energies.toml"))?;
        let table: EnergyTable = toml::from_str(&text).map_err(|e| Error::Parse(e.to_string()))?;
        if table.format != BASIS_FORMAT {
            return Err(Error::Parse(format!("unknown basis format {}", table.format)));
        }
        let mut states = Vec::with_capacity(table.levels.len());
        for level in &table.levels {
            let s = read_field(dir.join(&level.file))?;
            if !s.space().matches(&table.grid) {
                return Err(Error::GridMismatch(format!("{} is on another grid", level.file)));
            }
            states.push(s);
        }
        Ok(Self {
            energies: table.levels.iter().map(|l| l.energy).collect(),
            degenerate: table.levels.iter().map(|l| l.degenerate).collect(),
            states,
            potential: table.potential,
            grid: table.grid,
            params: table.params,
            requested: table.requested,
        })
    }
}

const BASIS_FORMAT: &str = "wavesig-basis/1";

#[derive(Serialize, Deserialize)]
struct EnergyTable {
    format: String,
    requested: usize,
    params: ParticleParams,
    grid: Axis,
    potential: Potential,
    levels: Vec<Level>,
}

#[derive(Serialize, Deserialize)]
struct Level {
    n: usize,
    energy: f64,
    degenerate: bool,
    file: String,
}

/// Coefficients of a slice in a basis, with the quality of the fit.
#[derive(Debug, Clone, PartialEq)]
pub struct Projection {
    pub coefficients: Vec<Complex64>,
    /// `||psi - sum a_n phi_n|| / ||psi||`.
    pub residual: f64,
    /// `sum |a_n|^2`.
    pub captured: f64,
}

/// `a_n = sum_x phi_n^* psi dx`.
pub fn project(slice: &SampledField, basis: &EigenBasis) -> Result<Projection> {
    if slice.time().is_some() {
        return contract("project expects a spatial slice");
    }
    if !slice.space().matches(basis.grid()) {
        return Err(Error::GridMismatch("slice and basis use different grids".into()));
    }
    let dx = basis.grid().step();
    let psi = slice.row(0);
    let coefficients: Vec<Complex64> = basis
        .states()
        .iter()
        .map(|s| s.values().iter().zip(psi).map(|(p, v)| p.conj() * v).sum::<Complex64>() * dx)
        .collect();
    let mut rest = psi.to_vec();
    for (a, s) in coefficients.iter().zip(basis.states()) {
        rest.iter_mut().zip(s.values()).for_each(|(r, p)| *r -= a * p);
    }
    let norm: f64 = psi.iter().map(|v| v.norm_sqr()).sum();
    let left: f64 = rest.iter().map(|v| v.norm_sqr()).sum();
    Ok(Projection {
        captured: coefficients.iter().map(|a| a.norm_sqr()).sum(),
        coefficients,
        residual: if norm == 0.0 { 0.0 } else { (left / norm).sqrt() },
    })
}

/// `psi(x, t) = sum_n a_n phi_n(x) e^{-i E_n t / hbar}` on `times`.
///
/// Coefficients are rescaled to unit norm (with a warning) when they are not.
pub fn assemble(coefficients: &[Complex64], basis: &EigenBasis, times: &Axis) -> Result<SampledField> {
    if coefficients.is_empty() {
        return contract("assemble needs at least one coefficient");
    }
    if coefficients.len() > basis.len() {
        return contract(format!(
            "{} coefficients for a basis of {} states",
            coefficients.len(),
            basis.len()
        ));
    }
    let total: f64 = coefficients.iter().map(|a| a.norm_sqr()).sum();
    if total == 0.0 {
        return contract("coefficients are all zero");
    }
    let scale = if (total - 1.0).abs() > 1e-12 {
        log::warn!("coefficients have norm^2 {total}; normalizing");
        1.0 / total.sqrt()
    } else {
        1.0
    };
    let hbar = basis.params().hbar();
    let n = basis.grid().count();
    let mut values = vec![Complex64::default(); n * times.count()];
    for (i, row) in values.chunks_mut(n).enumerate() {
        let t = times.value(i);
        for ((a, s), e) in coefficients.iter().zip(basis.states()).zip(basis.energies()) {
            let c = a * scale * Complex64::from_polar(1.0, -e * t / hbar);
            row.iter_mut().zip(s.values()).for_each(|(r, p)| *r += c * p);
        }
    }
    SampledField::complex(*basis.grid(), Some(*times), values)
}
