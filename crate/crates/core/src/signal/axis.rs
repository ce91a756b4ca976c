use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{contract, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AxisKind {
    Space,
    Time,
    /// A variable conjugate to energy (characteristic-function argument).
    Conjugate,
}

/// Uniform 1D grid: sample `j` sits at `origin + j * step`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Axis {
    origin: f64,
    step: f64,
    count: usize,
    kind: AxisKind,
}

/// Position of a DFT bin relative to zero frequency.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinClass {
    Dc,
    Positive,
    Negative,
    /// The unpaired middle bin of an even-length transform.
    Nyquist,
}

impl Axis {
    pub fn new(origin: f64, step: f64, count: usize, kind: AxisKind) -> Result<Self> {
        if !(step > 0.0) || !step.is_finite() {
            return contract(format!("axis step must be positive and finite, got {step}"));
        }
        if count < 2 {
            return contract(format!("axis needs at least 2 samples, got {count}"));
        }
        if !origin.is_finite() {
            return contract("axis origin must be finite");
        }
        Ok(Self {
            origin,
            step,
            count,
            kind,
        })
    }

    /// Periodic grid on `[min, max)`; `max` itself is the first periodic image.
    pub fn periodic(min: f64, max: f64, count: usize, kind: AxisKind) -> Result<Self> {
        if count == 0 {
            return contract("axis needs at least 2 samples, got 0");
        }
        Self::new(min, (max - min) / count as f64, count, kind)
    }

    /// Interior points of `[left, right]` with homogeneous Dirichlet walls at both ends.
    pub fn interior(left: f64, right: f64, count: usize, kind: AxisKind) -> Result<Self> {
        let step = (right - left) / (count as f64 + 1.0);
        Self::new(left + step, step, count, kind)
    }

    /// Time axis sampling the window `[-half_width, half_width)`.
    pub fn symmetric_window(half_width: f64, count: usize) -> Result<Self> {
        Self::periodic(-half_width, half_width, count, AxisKind::Time)
    }

    pub fn origin(&self) -> f64 {
        self.origin
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    pub fn count(&self) -> usize {
        self.count
    }

    pub fn kind(&self) -> AxisKind {
        self.kind
    }

    #[inline]
    pub fn value(&self, j: usize) -> f64 {
        self.origin + j as f64 * self.step
    }

    pub fn values(&self) -> Vec<f64> {
        (0..self.count).map(|j| self.value(j)).collect()
    }

    pub fn last(&self) -> f64 {
        self.value(self.count - 1)
    }

    /// Length of one period, `count * step`.
    pub fn period(&self) -> f64 {
        self.count as f64 * self.step
    }

    /// Step of the conjugate frequency axis, `2 pi / (count * step)`.
    pub fn frequency_step(&self) -> f64 {
        2.0 * PI / self.period()
    }

    /// Largest representable angular frequency, `pi / step`.
    pub fn nyquist(&self) -> f64 {
        PI / self.step
    }

    /// Signed bin index in FFT order. The Nyquist bin of an even count maps to `-count/2`.
    #[inline]
    pub fn signed_index(&self, bin: usize) -> i64 {
        signed_index(bin, self.count)
    }

    pub fn bin_class(&self, bin: usize) -> BinClass {
        bin_class(bin, self.count)
    }

    /// Angular frequency of `bin` (FFT order).
    #[inline]
    pub fn frequency(&self, bin: usize) -> f64 {
        self.signed_index(bin) as f64 * self.frequency_step()
    }

    /// Bin holding frequency `freq` if it lies on the conjugate grid within `rel_tol` of a bin.
    pub fn bin_of_frequency(&self, freq: f64, rel_tol: f64) -> Option<usize> {
        let df = self.frequency_step();
        let s = (freq / df).round();
        if (freq / df - s).abs() > rel_tol.max(1e-12) {
            return None;
        }
        let n = self.count as i64;
        let s = s as i64;
        if 2 * s.abs() > n {
            return None;
        }
        Some(s.rem_euclid(n) as usize)
    }

    /// `true` when both axes describe the same grid to rounding.
    pub fn matches(&self, other: &Axis) -> bool {
        let tol = 1e-9 * self.step.max(other.step);
        self.count == other.count
            && (self.step - other.step).abs() <= tol
            && (self.origin - other.origin).abs() <= tol.max(1e-9 * self.origin.abs())
    }

    pub fn with_kind(mut self, kind: AxisKind) -> Self {
        self.kind = kind;
        self
    }
}

#[inline]
pub(crate) fn signed_index(bin: usize, count: usize) -> i64 {
    if 2 * bin < count {
        bin as i64
    } else {
        bin as i64 - count as i64
    }
}

pub(crate) fn bin_class(bin: usize, count: usize) -> BinClass {
    if bin == 0 {
        BinClass::Dc
    } else if count % 2 == 0 && 2 * bin == count {
        BinClass::Nyquist
    } else if 2 * bin < count {
        BinClass::Positive
    } else {
        BinClass::Negative
    }
}

/// `freq^order` for a bin, with the Nyquist bin weighted symmetrically so that odd
/// orders vanish there (it is shared by `+nyquist` and `-nyquist`).
#[inline]
pub(crate) fn moment_weight(freq: f64, class: BinClass, order: usize) -> f64 {
    match class {
        BinClass::Nyquist if order % 2 == 1 => 0.0,
        _ => freq.powi(order as i32),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_degenerate_axes() {
        assert!(Axis::new(0.0, 0.0, 8, AxisKind::Space).is_err());
        assert!(Axis::new(0.0, -1.0, 8, AxisKind::Space).is_err());
        assert!(Axis::new(0.0, 1.0, 1, AxisKind::Space).is_err());
    }

    #[test]
    fn conjugate_axis_is_deterministic() {
        let a = Axis::periodic(-10.0, 10.0, 1024, AxisKind::Space).unwrap();
        assert!((a.frequency_step() - 2.0 * PI / 20.0).abs() < 1e-15);
        assert_eq!(a.frequency(1), a.frequency_step());
        assert_eq!(a.frequency(1023), -a.frequency_step());
        assert_eq!(a.bin_class(512), BinClass::Nyquist);
        assert_eq!(a.bin_class(0), BinClass::Dc);
        let odd = Axis::periodic(0.0, 1.0, 7, AxisKind::Time).unwrap();
        assert_eq!(odd.bin_class(3), BinClass::Positive);
        assert_eq!(odd.bin_class(4), BinClass::Negative);
    }

    #[test]
    fn interior_axis_leaves_walls_outside() {
        let a = Axis::interior(0.0, 1.0, 9, AxisKind::Space).unwrap();
        assert!((a.step() - 0.1).abs() < 1e-15);
        assert!((a.origin() - 0.1).abs() < 1e-15);
        assert!((a.last() - 0.9).abs() < 1e-12);
    }

    #[test]
    fn finds_on_grid_frequencies() {
        let a = Axis::symmetric_window(4.0, 64).unwrap();
        let df = a.frequency_step();
        assert_eq!(a.bin_of_frequency(3.0 * df, 1e-9), Some(3));
        assert_eq!(a.bin_of_frequency(-2.0 * df, 1e-9), Some(62));
        assert_eq!(a.bin_of_frequency(2.5 * df, 1e-9), None);
    }
}
