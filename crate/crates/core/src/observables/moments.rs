//! Spectral moments by transform-domain weighting and by derivative quadrature.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::window::{Alignment, Window, R_MAX};
use crate::error::{contract, Error, Result};
use crate::par::*;
use crate::signal::axis::{bin_class, moment_weight};
use crate::signal::transform::{plan, spectral_derivative_slice, transpose, Direction};
use crate::signal::{Axis, ParticleParams, SampledField};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Route {
    /// `sum w^r |Psi(w)|^2 / sum |Psi|^2` on the transform grid.
    Spectral,
    /// `sum psi^* (i d_t)^r psi / sum |psi|^2` with spectral derivatives.
    Derivative,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Quantity {
    AngularFrequency,
    Energy,
    Wavenumber,
    Momentum,
}

/// Moments of orders `0..=R` of one quantity, with the metadata needed to audit them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MomentTable {
    pub quantity: Quantity,
    pub route: Route,
    pub orders: Vec<usize>,
    pub values: Vec<f64>,
    /// `sum |psi|^2 dx dt` over the window, or `sum |psi|^2 dx` for a slice.
    pub normalization: f64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub window: Option<Window>,
    /// Evaluation time of per-slice (momentum) moments.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub time: Option<f64>,
    /// Per-order relative gaps to the other route, when a cross-check was run.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub route_gaps: Option<Vec<f64>>,
}

impl MomentTable {
    fn build(quantity: Quantity, route: Route, mut values: Vec<f64>, normalization: f64) -> Self {
        values[0] = 1.0;
        Self {
            quantity,
            route,
            orders: (0..values.len()).collect(),
            values,
            normalization,
            window: None,
            time: None,
            route_gaps: None,
        }
    }

    pub fn get(&self, order: usize) -> Option<f64> {
        self.values.get(order).copied()
    }

    pub fn max_order(&self) -> usize {
        self.values.len() - 1
    }

    /// `|a_r - b_r| / max(1, |b_r|)` per order against `reference`.
    pub fn relative_gaps(&self, reference: &MomentTable) -> Vec<f64> {
        self.values
            .iter()
            .zip(&reference.values)
            .map(|(a, b)| (a - b).abs() / b.abs().max(1.0))
            .collect()
    }

    /// Multiply order `r` by `scale^r`.
    pub(crate) fn scaled(mut self, scale: f64, quantity: Quantity) -> Self {
        for (r, v) in self.values.iter_mut().enumerate() {
            *v *= scale.powi(r as i32);
        }
        self.quantity = quantity;
        self
    }

    pub fn to_toml_string(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn from_toml_str(s: &str) -> Result<Self> {
        let t: MomentTable = toml::from_str(s).map_err(|e| Error::Parse(e.to_string()))?;
        if t.values.is_empty() || t.orders.len() != t.values.len() {
            return Err(Error::Parse("moment table needs one value per order".into()));
        }
        Ok(t)
    }
}

fn binomial_row(r: usize) -> Vec<f64> {
    let mut row = vec![1.0; r + 1];
    for k in 1..r {
        row[k] = row[k - 1] * (r - k + 1) as f64 / k as f64;
    }
    row
}

/// Moments of `X + shift` from moments of `X`:
/// `<(X + s)^r> = sum_j C(r, j) s^(r - j) <X^j>`.
pub fn carrier_shift(moments: &[f64], shift: f64) -> Vec<f64> {
    (0..moments.len())
        .map(|r| {
            binomial_row(r)
                .iter()
                .enumerate()
                .map(|(j, c)| c * shift.powi((r - j) as i32) * moments[j])
                .sum()
        })
        .collect()
}

/// Undo `M_r = sum_k C(r, k) mu_k m_{r-k}` for `m` given the window moments `mu`.
fn deconvolve(measured: &[f64], mu: &[f64]) -> Vec<f64> {
    let mut m = vec![0.0; measured.len()];
    for r in 0..measured.len() {
        let c = binomial_row(r);
        let tail: f64 = (1..=r).map(|k| c[k] * mu[k] * m[r - k]).sum();
        m[r] = (measured[r] - tail) / mu[0];
    }
    m
}

/// Time-major columns of the demodulated, tapered field.
fn prepared_columns(field: &SampledField, window: &Window) -> Result<(Vec<Complex64>, Axis)> {
    window.check_field(field)?;
    let time = *field.require_time()?;
    let taper = window.taper(&time);
    let w0 = window.reference_frequency();
    let factors: Vec<Complex64> = time
        .values()
        .iter()
        .zip(&taper)
        .map(|(t, w)| Complex64::from_polar(*w, w0 * t))
        .collect();
    let n = field.n_space();
    let mut g = field.values().to_vec();
    g.par_chunks_mut(n)
        .zip(factors.par_iter())
        .for_each(|(row, f)| row.iter_mut().for_each(|v| *v *= f));
    Ok((transpose(&g, time.count(), n), time))
}

/// Raw spectral moments over the columns of `cols` (each of length `rows`).
/// Positive frequencies sit on backward-FFT bins for the time kernel and on
/// forward-FFT bins for the space kernel.
fn spectral_raw(cols: &[Complex64], rows: usize, dir: Direction, step: f64, max_r: usize) -> (Vec<f64>, f64) {
    let fft = plan(rows, dir);
    let powers: Vec<Vec<f64>> = cols
        .par_chunks(rows)
        .map(|col| {
            let mut buf = col.to_vec();
            fft.process(&mut buf);
            buf.iter().map(|v| v.norm_sqr()).collect()
        })
        .collect();
    let mut power = vec![0.0; rows];
    for p in &powers {
        for (a, b) in power.iter_mut().zip(p) {
            *a += b;
        }
    }
    let total: f64 = power.iter().sum();
    let df = 2.0 * std::f64::consts::PI / (rows as f64 * step);
    let moments = (0..=max_r)
        .map(|r| {
            power
                .iter()
                .enumerate()
                .map(|(m, p)| {
                    let class = bin_class(m, rows);
                    let f = crate::signal::axis::signed_index(m, rows) as f64 * df;
                    moment_weight(f, class, r) * p
                })
                .sum::<f64>()
                / total
        })
        .collect();
    // Parseval: sum |FFT|^2 = rows * sum |g|^2
    (moments, total / rows as f64)
}

/// Raw derivative-route moments `Re sum conj(g) s^r D^r g / sum |g|^2` per column,
/// with `s = i` for time and `s = -i` for space.
fn derivative_raw(cols: &[Complex64], rows: usize, step: f64, unit: Complex64, max_r: usize) -> (Vec<f64>, f64) {
    let fwd = plan(rows, Direction::Forward);
    let inv = plan(rows, Direction::Backward);
    let sums: Vec<Vec<f64>> = cols
        .par_chunks(rows)
        .map(|col| {
            let mut out = vec![0.0; max_r + 1];
            let mut buf = vec![Complex64::default(); rows];
            for (r, o) in out.iter_mut().enumerate() {
                buf.copy_from_slice(col);
                spectral_derivative_slice(&mut buf, step, r, fwd.as_ref(), inv.as_ref());
                let s = unit.powu(r as u32);
                *o = col.iter().zip(&buf).map(|(a, b)| (a.conj() * s * b).re).sum();
            }
            out
        })
        .collect();
    let mut acc = vec![0.0; max_r + 1];
    for s in &sums {
        for (a, b) in acc.iter_mut().zip(s) {
            *a += b;
        }
    }
    let total = acc[0];
    (acc.iter().map(|v| v / total).collect(), total)
}

fn require_energy(total: f64) -> Result<()> {
    if !(total > 0.0) {
        return Err(Error::UndefinedMoment("field has zero energy".into()));
    }
    Ok(())
}

/// Angular-frequency moments `<w^r>`, `r = 0..=max_order`, over the window.
pub fn omega_moments(
    field: &SampledField,
    window: &Window,
    max_order: usize,
    route: Route,
) -> Result<MomentTable> {
    window.check_order(max_order)?;
    let (cols, time) = prepared_columns(field, window)?;
    let rows = time.count();
    let (raw, total) = match route {
        Route::Spectral => spectral_raw(&cols, rows, Direction::Backward, time.step(), max_order),
        Route::Derivative => derivative_raw(&cols, rows, time.step(), Complex64::i(), max_order),
    };
    require_energy(total)?;
    let raw = if window.alignment() == Alignment::Tapered {
        let taper: Vec<Complex64> = window
            .taper(&time)
            .into_iter()
            .map(|w| Complex64::new(w, 0.0))
            .collect();
        let (mu, _) = spectral_raw(&taper, rows, Direction::Backward, time.step(), max_order);
        deconvolve(&raw, &mu)
    } else {
        raw
    };
    let values = carrier_shift(&raw, window.reference_frequency());
    let mut table = MomentTable::build(
        Quantity::AngularFrequency,
        route,
        values,
        total * time.step() * field.space().step(),
    );
    table.window = Some(*window);
    Ok(table)
}

/// `<w^r>` by weighting the time spectrum.
pub fn omega_moment_spectral(field: &SampledField, order: usize, window: &Window) -> Result<f64> {
    Ok(omega_moments(field, window, order, Route::Spectral)?.values[order])
}

/// `<w^r>` by spectral time derivatives.
pub fn omega_moment_derivative(field: &SampledField, order: usize, window: &Window) -> Result<f64> {
    Ok(omega_moments(field, window, order, Route::Derivative)?.values[order])
}

/// Energy moments `hbar^r <w^r>` of an envelope.
pub fn energy_moments(
    envelope: &SampledField,
    window: &Window,
    max_order: usize,
    route: Route,
    params: &ParticleParams,
) -> Result<MomentTable> {
    Ok(omega_moments(envelope, window, max_order, route)?.scaled(params.hbar(), Quantity::Energy))
}

/// `<E^r>` of the envelope via `psi^* (i hbar d_t)^r psi`.
pub fn energy_moment_derivative(
    envelope: &SampledField,
    order: usize,
    window: &Window,
    params: &ParticleParams,
) -> Result<f64> {
    Ok(energy_moments(envelope, window, order, Route::Derivative, params)?.values[order])
}

/// Mean total energy: envelope mean energy plus the rest energy.
pub fn total_energy(envelope: &SampledField, window: &Window, params: &ParticleParams) -> Result<f64> {
    Ok(energy_moment_derivative(envelope, 1, window, params)? + params.rest_energy())
}

fn slice_columns(field: &SampledField, t_index: usize) -> Result<(Vec<Complex64>, Option<f64>)> {
    if t_index >= field.n_time() {
        return contract(format!("time index {t_index} out of range"));
    }
    Ok((field.row(t_index).to_vec(), field.time().map(|t| t.value(t_index))))
}

/// Wavenumber moments `<k^r>` of the slice at `t_index`.
pub fn k_moments(field: &SampledField, t_index: usize, max_order: usize, route: Route) -> Result<MomentTable> {
    if max_order > R_MAX {
        return Err(Error::OrderTooHigh {
            order: max_order,
            max: R_MAX,
        });
    }
    let (row, time) = slice_columns(field, t_index)?;
    let n = row.len();
    let step = field.space().step();
    let (values, total) = match route {
        Route::Spectral => spectral_raw(&row, n, Direction::Forward, step, max_order),
        Route::Derivative => derivative_raw(&row, n, step, -Complex64::i(), max_order),
    };
    require_energy(total)?;
    let mut table = MomentTable::build(Quantity::Wavenumber, route, values, total * step);
    table.time = time;
    Ok(table)
}

pub fn k_moment(field: &SampledField, order: usize, t_index: usize) -> Result<f64> {
    Ok(k_moments(field, t_index, order, Route::Spectral)?.values[order])
}

/// Momentum moments `hbar^r <k^r>` of the slice at `t_index`.
pub fn momentum_moments(
    field: &SampledField,
    t_index: usize,
    max_order: usize,
    route: Route,
    params: &ParticleParams,
) -> Result<MomentTable> {
    Ok(k_moments(field, t_index, max_order, route)?.scaled(params.hbar(), Quantity::Momentum))
}

/// `<p^r>` via `psi^* (-i hbar d_x)^r psi`.
pub fn momentum_moment_derivative(
    field: &SampledField,
    order: usize,
    t_index: usize,
    params: &ParticleParams,
) -> Result<f64> {
    Ok(momentum_moments(field, t_index, order, Route::Derivative, params)?.values[order])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::signal::AxisKind;
    use std::f64::consts::PI;

    fn space() -> Axis {
        Axis::periodic(0.0, 1.0, 8, AxisKind::Space).unwrap()
    }

    #[test]
    fn single_line_gives_powers() {
        let w = Window::plain(PI).unwrap();
        let time = w.axis(64).unwrap();
        let delta = 3.0;
        let f = SampledField::from_fn(space(), time, |_, t| Complex64::from_polar(1.0, -delta * t));
        for route in [Route::Spectral, Route::Derivative] {
            let m = omega_moments(&f, &w, 8, route).unwrap();
            for r in 0..=8 {
                let want = delta.powi(r as i32);
                assert!((m.values[r] - want).abs() < 1e-9 * want, "{route:?} {r}");
            }
        }
    }

    #[test]
    fn binomial_shift_round_trip() {
        let m = [1.0, 0.3, 0.5, -0.2, 0.9];
        let back = carrier_shift(&carrier_shift(&m, 7.0), -7.0);
        for (a, b) in m.iter().zip(&back) {
            assert!((a - b).abs() < 1e-10);
        }
    }

    #[test]
    fn deconvolution_inverts_convolution() {
        let m = [1.0, 0.4, 1.1, 0.2, 3.0];
        let mu = [1.0, 0.0, 0.25, 0.0, 0.2];
        let conv: Vec<f64> = (0..5)
            .map(|r| {
                let c = binomial_row(r);
                (0..=r).map(|k| c[k] * mu[k] * m[r - k]).sum()
            })
            .collect();
        for (a, b) in deconvolve(&conv, &mu).iter().zip(&m) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn zero_field_is_undefined() {
        let w = Window::plain(1.0).unwrap();
        let f = SampledField::zeros(space(), Some(w.axis(16).unwrap()));
        assert!(matches!(
            omega_moment_spectral(&f, 1, &w),
            Err(Error::UndefinedMoment(_))
        ));
        assert!(k_moment(&SampledField::zeros(space(), None), 1, 0).is_err());
    }

    #[test]
    fn table_toml_round_trip() {
        let w = Window::plain(PI).unwrap();
        let f = SampledField::from_fn(space(), w.axis(16).unwrap(), |_, t| {
            Complex64::from_polar(1.0, -2.0 * t)
        });
        let m = omega_moments(&f, &w, 3, Route::Spectral).unwrap();
        let back = MomentTable::from_toml_str(&m.to_toml_string().unwrap()).unwrap();
        assert_eq!(back, m);
    }
}
