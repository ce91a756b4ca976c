use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{contract, Error, Result};
use crate::signal::{Axis, SampledField};

/// Default highest moment order.
pub const R_MAX: usize = 8;

/// Relative tolerance on `T` for the beat-commensurability check.
pub const COMMENSURATE_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Alignment {
    /// Rectangular window whose half-width is a whole number of every beat period.
    BeatCommensurate,
    /// Rectangular window with no commensurability guarantee; leakage is `O(1/T)`.
    Plain,
    /// Gaussian taper of width `T / 8`; the taper's own spectral moments are
    /// deconvolved from the measured ones.
    Tapered,
}

/// Observation interval `[-T, T)` for time-global moments.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Window {
    half_width: f64,
    alignment: Alignment,
    /// Moments are taken of the field demodulated by this angular frequency and then
    /// shifted back, which keeps the measured spectrum near zero frequency.
    reference_frequency: f64,
    max_order: usize,
}

impl Window {
    pub fn new(half_width: f64, alignment: Alignment) -> Result<Self> {
        if !(half_width > 0.0 && half_width.is_finite()) {
            return contract("window half-width must be positive and finite");
        }
        Ok(Self {
            half_width,
            alignment,
            reference_frequency: 0.0,
            max_order: R_MAX,
        })
    }

    pub fn plain(half_width: f64) -> Result<Self> {
        Self::new(half_width, Alignment::Plain)
    }

    pub fn tapered(half_width: f64) -> Result<Self> {
        Self::new(half_width, Alignment::Tapered)
    }

    /// Shortest window of at least `min_half_width` that holds a whole number of every
    /// pairwise beat period of `energies`, referenced to the lowest energy.
    pub fn beat_commensurate(energies: &[f64], hbar: f64, min_half_width: f64) -> Result<Self> {
        let lowest = energies.iter().copied().fold(f64::INFINITY, f64::min);
        let mut longest = 0.0_f64;
        for (i, a) in energies.iter().enumerate() {
            for b in &energies[i + 1..] {
                if (a - b).abs() > 0.0 {
                    longest = longest.max(2.0 * PI * hbar / (a - b).abs());
                }
            }
        }
        if longest == 0.0 {
            let w = Self::new(min_half_width, Alignment::BeatCommensurate)?;
            return Ok(w.with_reference(lowest / hbar));
        }
        let base = (min_half_width / longest).ceil().max(1.0);
        for j in 1..=256 {
            let t = (base * j as f64) * longest;
            let w = Self::new(t, Alignment::BeatCommensurate)?.with_reference(lowest / hbar);
            if w.check_energies(energies, hbar).is_ok() {
                return Ok(w);
            }
        }
        Err(Error::Window(format!(
            "no half-width up to {} longest beat periods is commensurate with every gap",
            base * 256.0
        )))
    }

    pub fn with_reference(mut self, omega: f64) -> Self {
        self.reference_frequency = omega;
        self
    }

    /// Raise the order limit; orders above the default amplify spectral leakage.
    pub fn with_max_order(mut self, max_order: usize) -> Self {
        if max_order > R_MAX {
            log::warn!("moment orders up to {max_order} requested; above {R_MAX} leakage dominates");
        }
        self.max_order = max_order;
        self
    }

    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    pub fn alignment(&self) -> Alignment {
        self.alignment
    }

    pub fn reference_frequency(&self) -> f64 {
        self.reference_frequency
    }

    pub fn max_order(&self) -> usize {
        self.max_order
    }

    /// Time grid of `count` samples covering `[-T, T)`.
    pub fn axis(&self, count: usize) -> Result<Axis> {
        Axis::symmetric_window(self.half_width, count)
    }

    /// `Ok` when `T` is an integer multiple of every beat period `2 pi hbar / |E_m - E_n|`.
    pub fn check_energies(&self, energies: &[f64], hbar: f64) -> Result<()> {
        let t = self.half_width;
        for (i, a) in energies.iter().enumerate() {
            for b in &energies[i + 1..] {
                let gap = (a - b).abs();
                if gap == 0.0 {
                    continue;
                }
                let period = 2.0 * PI * hbar / gap;
                let q = t / period;
                let miss = (q - q.round()).abs() * period;
                if q.round() < 1.0 || miss > COMMENSURATE_TOL * t {
                    return Err(Error::Window(format!(
                        "T = {t} is {q} beat periods of the pair ({a}, {b})"
                    )));
                }
            }
        }
        Ok(())
    }

    pub(crate) fn check_field(&self, field: &SampledField) -> Result<()> {
        let time = field.require_time()?;
        let expected = self.axis(time.count())?;
        if !time.matches(&expected) {
            return Err(Error::GridMismatch(format!(
                "field time axis starts at {} with step {}; the window needs [-{t}, {t}) \
                 (Axis::symmetric_window)",
                time.origin(),
                time.step(),
                t = self.half_width
            )));
        }
        Ok(())
    }

    pub(crate) fn check_order(&self, order: usize) -> Result<()> {
        if order > self.max_order {
            return Err(Error::OrderTooHigh {
                order,
                max: self.max_order,
            });
        }
        Ok(())
    }

    /// Taper samples on `axis` (ones for rectangular windows).
    pub(crate) fn taper(&self, axis: &Axis) -> Vec<f64> {
        match self.alignment {
            Alignment::Tapered => {
                let s = self.half_width / 8.0;
                axis.values()
                    .into_iter()
                    .map(|t| (-t * t / (2.0 * s * s)).exp())
                    .collect()
            }
            _ => vec![1.0; axis.count()],
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn commensurate_window_for_oscillator_levels() {
        let e = [0.5, 1.5, 2.5, 4.5];
        let w = Window::beat_commensurate(&e, 1.0, 10.0).unwrap();
        assert!(w.half_width() >= 10.0);
        assert!(w.check_energies(&e, 1.0).is_ok());
        assert_eq!(w.reference_frequency(), 0.5);
        assert!(Window::plain(10.0).unwrap().check_energies(&e, 1.0).is_err());
    }

    #[test]
    fn irrational_gaps_are_not_commensurate() {
        let e = [0.0, 1.0, 2f64.sqrt()];
        assert!(Window::beat_commensurate(&e, 1.0, 1.0).is_err());
    }

    #[test]
    fn order_limit() {
        let w = Window::plain(1.0).unwrap();
        assert!(w.check_order(8).is_ok());
        assert!(matches!(w.check_order(9), Err(Error::OrderTooHigh { .. })));
        assert!(w.with_max_order(12).check_order(12).is_ok());
    }
}
