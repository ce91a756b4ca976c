//! Pre-envelopes, Hilbert transforms and carrier (de)modulation.
//!
//! The analytic mask doubles strictly positive frequencies, zeroes strictly negative
//! ones and keeps the DC bin (and the Nyquist bin of an even-length grid) unchanged,
//! so `Re(analytic(f)) == f` for every real `f`.

use num_complex::Complex64;

use super::axis::{bin_class, BinClass};
use super::field::SampledField;
use super::params::ParticleParams;
use super::transform::{map_columns, plan, Direction};
use crate::error::{contract, Error, Result};
use crate::par::*;

#[inline]
fn mask(class: BinClass) -> f64 {
    match class {
        BinClass::Dc | BinClass::Nyquist => 1.0,
        BinClass::Positive => 2.0,
        BinClass::Negative => 0.0,
    }
}

/// Apply the one-sided mask to a sequence. `positive_is_backward` selects which raw
/// FFT direction carries positive physical frequencies.
pub(crate) fn one_sided(buf: &mut [Complex64], positive_is_backward: bool) {
    let n = buf.len();
    let (first, second) = if positive_is_backward {
        (Direction::Backward, Direction::Forward)
    } else {
        (Direction::Forward, Direction::Backward)
    };
    plan(n, first).process(buf);
    let norm = 1.0 / n as f64;
    for (m, v) in buf.iter_mut().enumerate() {
        *v *= mask(bin_class(m, n)) * norm;
    }
    plan(n, second).process(buf);
}

/// Time pre-envelope `psi_+` of a real field: positive-frequency content doubled.
///
/// Under the `e^{+i w t}` kernel, positive frequencies are `e^{-i w t}`, so
/// `cos(w0 t)` maps to `e^{-i w0 t}`.
pub fn analytic_time(field: &SampledField) -> Result<SampledField> {
    if !field.is_real() {
        return contract("the time analytic signal is only defined for real fields");
    }
    let time = *field.require_time()?;
    let rows = time.count();
    let mut values = field.values().to_vec();
    let fwd = plan(rows, Direction::Forward);
    let bwd = plan(rows, Direction::Backward);
    let norm = 1.0 / rows as f64;
    map_columns(&mut values, rows, field.n_space(), |col| {
        bwd.process(col);
        for (m, v) in col.iter_mut().enumerate() {
            *v *= mask(bin_class(m, rows)) * norm;
        }
        fwd.process(col);
    });
    field.with_values(values)
}

/// Hilbert transform `psi_check`, the real quadrature with `psi_+ = psi + i psi_check`.
pub fn hilbert_time(field: &SampledField) -> Result<SampledField> {
    let plus = analytic_time(field)?;
    let values = plus.values().iter().map(|v| v.im).collect::<Vec<_>>();
    SampledField::real(*field.space(), field.time().copied(), &values)
}

/// Spatial analytic signal `psi_>`: the `k > 0` half doubled, `k < 0` discarded.
///
/// The mask is applied as-is to complex inputs too, so an input that is already
/// one-sided comes back doubled.
pub fn analytic_space(field: &SampledField) -> SampledField {
    let n = field.n_space();
    let mut values = field.values().to_vec();
    let fwd = plan(n, Direction::Forward);
    let bwd = plan(n, Direction::Backward);
    let norm = 1.0 / n as f64;
    values.par_chunks_mut(n).for_each(|row| {
        fwd.process(row);
        for (m, v) in row.iter_mut().enumerate() {
            *v *= mask(bin_class(m, n)) * norm;
        }
        bwd.process(row);
    });
    field.with_values(values).expect("same grid")
}

/// Multiply every sample by `e^{-i omega t}`.
pub fn modulate(field: &SampledField, omega: f64) -> Result<SampledField> {
    rotate(field, -omega)
}

/// Multiply every sample by `e^{+i omega t}`.
pub fn demodulate(field: &SampledField, omega: f64) -> Result<SampledField> {
    rotate(field, omega)
}

fn rotate(field: &SampledField, omega: f64) -> Result<SampledField> {
    let time = *field.require_time()?;
    if omega == 0.0 {
        return Ok(field.clone());
    }
    let n = field.n_space();
    let mut values = field.values().to_vec();
    values.par_chunks_mut(n).enumerate().for_each(|(i, row)| {
        let phase = Complex64::from_polar(1.0, omega * time.value(i));
        for v in row {
            *v *= phase;
        }
    });
    field.with_values(values)
}

fn check_carrier(field: &SampledField, params: &ParticleParams) -> Result<()> {
    let time = field.require_time()?;
    let omega_c = params.latent_pulsation();
    if omega_c >= time.nyquist() {
        return Err(Error::AboveNyquist {
            omega_c,
            nyquist: time.nyquist(),
            max_step: std::f64::consts::PI / omega_c,
        });
    }
    Ok(())
}

/// Complex envelope: `psi_>+ e^{+i w_c t}`.
pub fn envelope_extract(psi_plus: &SampledField, params: &ParticleParams) -> Result<SampledField> {
    check_carrier(psi_plus, params)?;
    demodulate(psi_plus, params.latent_pulsation())
}

/// Exact inverse of [`envelope_extract`]: `envelope e^{-i w_c t}`.
pub fn envelope_modulate(envelope: &SampledField, params: &ParticleParams) -> Result<SampledField> {
    check_carrier(envelope, params)?;
    modulate(envelope, params.latent_pulsation())
}
