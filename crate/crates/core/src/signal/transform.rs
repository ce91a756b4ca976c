//! Discrete Fourier machinery under the fixed kernel pair.
//!
//! Time transforms use `F(w) = sum_j f(t_j) e^{+i w t_j} dt`, space transforms use
//! `F(k) = sum_j f(x_j) e^{-i k x_j} dx`. With these scalings the discrete Parseval
//! identity reads `sum |f|^2 step = (1/2pi) sum |F|^2 step_freq` exactly.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use super::axis::{bin_class, signed_index, Axis, BinClass};
use super::field::{SampledField, SpectrumField};
use crate::error::Result;
use crate::par::*;

#[derive(Clone, Copy, PartialEq, Eq)]
pub(crate) enum Direction {
    /// `sum_j f_j e^{-2 pi i m j / n}`
    Forward,
    /// `sum_j f_j e^{+2 pi i m j / n}` (unnormalized)
    Backward,
}

pub(crate) fn plan(n: usize, dir: Direction) -> Arc<dyn Fft<f64>> {
    let mut planner = FftPlanner::new();
    match dir {
        Direction::Forward => planner.plan_fft_forward(n),
        Direction::Backward => planner.plan_fft_inverse(n),
    }
}

/// Gather column `j` of a row-major `[rows][cols]` buffer into contiguous storage.
pub(crate) fn transpose(values: &[Complex64], rows: usize, cols: usize) -> Vec<Complex64> {
    let mut out = vec![Complex64::default(); values.len()];
    out.par_chunks_mut(rows).enumerate().for_each(|(j, col)| {
        for (i, slot) in col.iter_mut().enumerate() {
            *slot = values[i * cols + j];
        }
    });
    out
}

/// Run `f` on every time series (column) of a row-major `[time][space]` buffer.
pub(crate) fn map_columns<F>(values: &mut [Complex64], rows: usize, cols: usize, f: F)
where
    F: Fn(&mut [Complex64]) + Sync + Send,
{
    let mut cm = transpose(values, rows, cols);
    cm.par_chunks_mut(rows).for_each(|c| f(c));
    let back = transpose(&cm, cols, rows);
    values.copy_from_slice(&back);
}

fn time_forward_phase(axis: &Axis) -> Vec<Complex64> {
    let n = axis.count();
    (0..n)
        .map(|m| {
            let w = axis.frequency(m);
            Complex64::from_polar(axis.step(), w * axis.origin())
        })
        .collect()
}

fn space_forward_phase(axis: &Axis) -> Vec<Complex64> {
    let n = axis.count();
    (0..n)
        .map(|m| {
            let k = axis.frequency(m);
            Complex64::from_polar(axis.step(), -k * axis.origin())
        })
        .collect()
}

fn forward_time_in_place(values: &mut [Complex64], space: &Axis, time: &Axis) {
    let rows = time.count();
    let fft = plan(rows, Direction::Backward);
    let phase = time_forward_phase(time);
    map_columns(values, rows, space.count(), |col| {
        fft.process(col);
        for (v, p) in col.iter_mut().zip(&phase) {
            *v *= p;
        }
    });
}

fn inverse_time_in_place(values: &mut [Complex64], space: &Axis, time: &Axis) {
    let rows = time.count();
    let fft = plan(rows, Direction::Forward);
    let norm = 1.0 / (rows as f64 * time.step());
    let phase: Vec<Complex64> = time_forward_phase(time)
        .into_iter()
        .map(|p| (p / time.step()).conj() * norm)
        .collect();
    map_columns(values, rows, space.count(), |col| {
        for (v, p) in col.iter_mut().zip(&phase) {
            *v *= p;
        }
        fft.process(col);
    });
}

fn forward_space_in_place(values: &mut [Complex64], space: &Axis) {
    let n = space.count();
    let phase = space_forward_phase(space);
    let fft = plan(n, Direction::Forward);
    values.par_chunks_mut(n).for_each(|row| {
        fft.process(row);
        for (v, p) in row.iter_mut().zip(&phase) {
            *v *= p;
        }
    });
}

fn inverse_space_in_place(values: &mut [Complex64], space: &Axis) {
    let n = space.count();
    let norm = 1.0 / (n as f64 * space.step());
    let phase: Vec<Complex64> = space_forward_phase(space)
        .into_iter()
        .map(|p| (p / space.step()).conj() * norm)
        .collect();
    let fft = plan(n, Direction::Backward);
    values.par_chunks_mut(n).for_each(|row| {
        for (v, p) in row.iter_mut().zip(&phase) {
            *v *= p;
        }
        fft.process(row);
    });
}

/// Time transform of every spatial sample, kernel `e^{+i w t}`.
pub fn dft_time(field: &SampledField) -> Result<SpectrumField> {
    let time = *field.require_time()?;
    let mut values = field.values().to_vec();
    forward_time_in_place(&mut values, field.space(), &time);
    Ok(SpectrumField {
        space: *field.space(),
        time: Some(time),
        time_transformed: true,
        space_transformed: false,
        values,
    })
}

/// Space transform of every time row, kernel `e^{-i k x}`.
pub fn dft_space(field: &SampledField) -> SpectrumField {
    let mut values = field.values().to_vec();
    forward_space_in_place(&mut values, field.space());
    SpectrumField {
        space: *field.space(),
        time: field.time().copied(),
        time_transformed: false,
        space_transformed: true,
        values,
    }
}

/// Joint `(k, w)` transform.
pub fn dft_space_time(field: &SampledField) -> Result<SpectrumField> {
    let mut spec = dft_time(field)?;
    forward_space_in_place(&mut spec.values, &spec.space);
    spec.space_transformed = true;
    Ok(spec)
}

/// Exact inverse of whichever transforms `spectrum` carries.
pub fn inverse_dft(spectrum: &SpectrumField) -> SampledField {
    let mut values = spectrum.values.clone();
    if spectrum.space_transformed {
        inverse_space_in_place(&mut values, &spectrum.space);
    }
    if spectrum.time_transformed {
        let time = spectrum.time.expect("time-transformed spectrum has a time axis");
        inverse_time_in_place(&mut values, &spectrum.space, &time);
    }
    SampledField::complex(spectrum.space, spectrum.time, values)
        .expect("inverse keeps the grid shape")
}

/// Multiplier of the `order`-th derivative for raw FFT bin `bin` of an `n`-point grid.
#[inline]
pub(crate) fn derivative_multiplier(bin: usize, n: usize, step: f64, order: usize) -> Complex64 {
    if order == 0 {
        return Complex64::new(1.0, 0.0);
    }
    if bin_class(bin, n) == BinClass::Nyquist && order % 2 == 1 {
        return Complex64::new(0.0, 0.0);
    }
    let kappa = 2.0 * PI * signed_index(bin, n) as f64 / (n as f64 * step);
    Complex64::new(0.0, kappa).powu(order as u32)
}

/// In-place spectral derivative of one periodic sequence.
pub(crate) fn spectral_derivative_slice(
    buf: &mut [Complex64],
    step: f64,
    order: usize,
    fwd: &dyn Fft<f64>,
    inv: &dyn Fft<f64>,
) {
    if order == 0 {
        return;
    }
    let n = buf.len();
    fwd.process(buf);
    let norm = 1.0 / n as f64;
    for (m, v) in buf.iter_mut().enumerate() {
        *v *= derivative_multiplier(m, n, step, order) * norm;
    }
    inv.process(buf);
}

/// `d^order f / dt^order` by periodic spectral differentiation along time.
pub fn time_derivative(field: &SampledField, order: usize) -> Result<SampledField> {
    let time = *field.require_time()?;
    let rows = time.count();
    let mut values = field.values().to_vec();
    let fwd = plan(rows, Direction::Forward);
    let inv = plan(rows, Direction::Backward);
    map_columns(&mut values, rows, field.n_space(), |col| {
        spectral_derivative_slice(col, time.step(), order, fwd.as_ref(), inv.as_ref())
    });
    field.with_values(values)
}

/// `d^order f / dx^order` by periodic spectral differentiation along space.
pub fn space_derivative(field: &SampledField, order: usize) -> SampledField {
    let n = field.n_space();
    let step = field.space().step();
    let mut values = field.values().to_vec();
    let fwd = plan(n, Direction::Forward);
    let inv = plan(n, Direction::Backward);
    values
        .par_chunks_mut(n)
        .for_each(|row| spectral_derivative_slice(row, step, order, fwd.as_ref(), inv.as_ref()));
    field.with_values(values).expect("same grid")
}

/// Orthonormal type-I discrete sine transform (self-inverse) of the interior samples
/// of a grid with zero walls one step beyond each end.
pub(crate) struct Dst1 {
    n: usize,
    fft: Arc<dyn Fft<f64>>,
}

impl Dst1 {
    pub(crate) fn new(n: usize) -> Self {
        Self {
            n,
            fft: plan(2 * (n + 1), Direction::Forward),
        }
    }

    pub(crate) fn apply(&self, data: &mut [Complex64]) {
        let n = self.n;
        debug_assert_eq!(data.len(), n);
        let m = 2 * (n + 1);
        let mut ext = vec![Complex64::default(); m];
        for j in 0..n {
            ext[j + 1] = data[j];
            ext[m - 1 - j] = -data[j];
        }
        self.fft.process(&mut ext);
        // FFT of the odd extension is -2i sum_j x_j sin(pi j n / (N + 1)).
        let scale = Complex64::new(0.0, 0.5) * (2.0 / (n as f64 + 1.0)).sqrt();
        for k in 0..n {
            data[k] = ext[k + 1] * scale;
        }
    }
}
