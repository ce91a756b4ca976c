use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::axis::Axis;
use crate::error::{contract, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Realness {
    Real,
    Complex,
}

/// A field sampled on a uniform space grid and, optionally, a uniform time grid.
///
/// Values are stored row-major as `[time][space]`; a field without a time axis
/// is a single spatial slice.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledField {
    space: Axis,
    time: Option<Axis>,
    values: Vec<Complex64>,
    realness: Realness,
}

impl SampledField {
    pub fn new(
        space: Axis,
        time: Option<Axis>,
        values: Vec<Complex64>,
        realness: Realness,
    ) -> Result<Self> {
        let rows = time.map_or(1, |t| t.count());
        if values.len() != rows * space.count() {
            return Err(Error::GridMismatch(format!(
                "{} values for a {}x{} grid",
                values.len(),
                rows,
                space.count()
            )));
        }
        if realness == Realness::Real && values.iter().any(|v| v.im != 0.0) {
            return contract("field flagged real has nonzero imaginary parts");
        }
        Ok(Self {
            space,
            time,
            values,
            realness,
        })
    }

    /// Complex field; no realness check.
    pub fn complex(space: Axis, time: Option<Axis>, values: Vec<Complex64>) -> Result<Self> {
        Self::new(space, time, values, Realness::Complex)
    }

    /// Real field from real samples.
    pub fn real(space: Axis, time: Option<Axis>, values: &[f64]) -> Result<Self> {
        let values = values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        Self::new(space, time, values, Realness::Real)
    }

    pub fn zeros(space: Axis, time: Option<Axis>) -> Self {
        let rows = time.map_or(1, |t| t.count());
        Self {
            space,
            time,
            values: vec![Complex64::new(0.0, 0.0); rows * space.count()],
            realness: Realness::Complex,
        }
    }

    /// Spatial slice `f(x)`.
    pub fn from_space_fn(space: Axis, f: impl Fn(f64) -> Complex64) -> Self {
        let values = space.values().into_iter().map(f).collect();
        Self {
            space,
            time: None,
            values,
            realness: Realness::Complex,
        }
    }

    /// Real spatial slice `f(x)`.
    pub fn from_real_space_fn(space: Axis, f: impl Fn(f64) -> f64) -> Self {
        let values = space
            .values()
            .into_iter()
            .map(|x| Complex64::new(f(x), 0.0))
            .collect();
        Self {
            space,
            time: None,
            values,
            realness: Realness::Real,
        }
    }

    /// Space-time field `f(x, t)`.
    pub fn from_fn(space: Axis, time: Axis, f: impl Fn(f64, f64) -> Complex64) -> Self {
        let mut values = Vec::with_capacity(space.count() * time.count());
        for i in 0..time.count() {
            let t = time.value(i);
            for j in 0..space.count() {
                values.push(f(space.value(j), t));
            }
        }
        Self {
            space,
            time: Some(time),
            values,
            realness: Realness::Complex,
        }
    }

    /// Real space-time field `f(x, t)`.
    pub fn from_real_fn(space: Axis, time: Axis, f: impl Fn(f64, f64) -> f64) -> Self {
        let mut field = Self::from_fn(space, time, |x, t| Complex64::new(f(x, t), 0.0));
        field.realness = Realness::Real;
        field
    }

    pub fn space(&self) -> &Axis {
        &self.space
    }

    pub fn time(&self) -> Option<&Axis> {
        self.time.as_ref()
    }

    pub fn require_time(&self) -> Result<&Axis> {
        self.time
            .as_ref()
            .ok_or_else(|| Error::Contract("operation needs a time axis".into()))
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [Complex64] {
        self.realness = Realness::Complex;
        &mut self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    pub fn realness(&self) -> Realness {
        self.realness
    }

    pub fn is_real(&self) -> bool {
        self.realness == Realness::Real
    }

    pub fn n_space(&self) -> usize {
        self.space.count()
    }

    pub fn n_time(&self) -> usize {
        self.time.map_or(1, |t| t.count())
    }

    pub fn row(&self, t_index: usize) -> &[Complex64] {
        let n = self.n_space();
        &self.values[t_index * n..(t_index + 1) * n]
    }

    /// Spatial slice at time index `t_index`.
    pub fn slice_at(&self, t_index: usize) -> SampledField {
        SampledField {
            space: self.space,
            time: None,
            values: self.row(t_index).to_vec(),
            realness: self.realness,
        }
    }

    /// Stack equally sized spatial slices into a space-time field.
    pub fn stack(space: Axis, time: Axis, slices: &[Vec<Complex64>]) -> Result<Self> {
        if slices.len() != time.count() {
            return Err(Error::GridMismatch(format!(
                "{} slices for a time axis of {} samples",
                slices.len(),
                time.count()
            )));
        }
        let mut values = Vec::with_capacity(space.count() * time.count());
        for s in slices {
            if s.len() != space.count() {
                return Err(Error::GridMismatch("slice length differs from space axis".into()));
            }
            values.extend_from_slice(s);
        }
        Self::complex(space, Some(time), values)
    }

    /// Real part as a real field.
    pub fn re(&self) -> SampledField {
        SampledField {
            space: self.space,
            time: self.time,
            values: self.values.iter().map(|v| Complex64::new(v.re, 0.0)).collect(),
            realness: Realness::Real,
        }
    }

    pub fn conj(&self) -> SampledField {
        SampledField {
            space: self.space,
            time: self.time,
            values: self.values.iter().map(|v| v.conj()).collect(),
            realness: self.realness,
        }
    }

    pub fn scaled(&self, factor: Complex64) -> SampledField {
        let realness = if factor.im == 0.0 {
            self.realness
        } else {
            Realness::Complex
        };
        SampledField {
            space: self.space,
            time: self.time,
            values: self.values.iter().map(|v| v * factor).collect(),
            realness,
        }
    }

    /// Same grid, new values; realness becomes complex.
    pub fn with_values(&self, values: Vec<Complex64>) -> Result<SampledField> {
        SampledField::complex(self.space, self.time, values)
    }

    /// Flag the field real after zeroing imaginary parts below `tol * max|f|`.
    pub fn into_real(mut self, tol: f64) -> Result<SampledField> {
        let max = self.max_abs();
        if self.values.iter().any(|v| v.im.abs() > tol * max.max(f64::MIN_POSITIVE)) {
            return contract("field has non-negligible imaginary parts");
        }
        for v in &mut self.values {
            v.im = 0.0;
        }
        self.realness = Realness::Real;
        Ok(self)
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// Plain sum of `|f|^2` over all samples.
    pub fn energy_sum(&self) -> f64 {
        self.values.iter().map(|v| v.norm_sqr()).sum()
    }

    /// `sum |f|^2 dx` for a spatial slice (per time row for space-time fields, summed).
    pub fn norm_sqr_space(&self) -> f64 {
        self.energy_sum() * self.space.step()
    }

    /// Check that two fields share their grids.
    pub fn same_grid(&self, other: &SampledField) -> Result<()> {
        let time_ok = match (self.time, other.time) {
            (None, None) => true,
            (Some(a), Some(b)) => a.matches(&b),
            _ => false,
        };
        if !self.space.matches(&other.space) || !time_ok {
            return Err(Error::GridMismatch("fields live on different grids".into()));
        }
        Ok(())
    }

    /// Largest `|a - b|` over samples divided by the largest `|b|`.
    pub fn max_relative_difference(&self, reference: &SampledField) -> f64 {
        let scale = reference.max_abs().max(f64::MIN_POSITIVE);
        self.values
            .iter()
            .zip(&reference.values)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
            / scale
    }
}

/// Fixed transform convention: time kernel `e^{+i w t}`, space kernel `e^{-i k x}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Convention;

impl Convention {
    pub const TIME_KERNEL: &'static str = "exp(+i*omega*t)";
    pub const SPACE_KERNEL: &'static str = "exp(-i*k*x)";

    pub fn tag() -> String {
        format!("time:{} space:{}", Self::TIME_KERNEL, Self::SPACE_KERNEL)
    }
}

/// Transform-domain counterpart of a [`SampledField`].
///
/// Bins are stored in FFT order along each transformed dimension. The source axes
/// are kept so the conjugate axes (and the exact inverse) are derivable.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumField {
    pub(crate) space: Axis,
    pub(crate) time: Option<Axis>,
    pub(crate) time_transformed: bool,
    pub(crate) space_transformed: bool,
    pub(crate) values: Vec<Complex64>,
}

impl SpectrumField {
    pub fn convention(&self) -> Convention {
        Convention
    }

    pub fn space_axis(&self) -> &Axis {
        &self.space
    }

    pub fn time_axis(&self) -> Option<&Axis> {
        self.time.as_ref()
    }

    pub fn is_time_transformed(&self) -> bool {
        self.time_transformed
    }

    pub fn is_space_transformed(&self) -> bool {
        self.space_transformed
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn n_space(&self) -> usize {
        self.space.count()
    }

    pub fn n_time(&self) -> usize {
        self.time.map_or(1, |t| t.count())
    }

    /// Angular frequency of time bin `i`.
    pub fn omega(&self, i: usize) -> Option<f64> {
        self.time
            .filter(|_| self.time_transformed)
            .map(|t| t.frequency(i))
    }

    /// Wavenumber of space bin `j`.
    pub fn k(&self, j: usize) -> Option<f64> {
        self.space_transformed.then(|| self.space.frequency(j))
    }

    pub fn at(&self, t_bin: usize, x_bin: usize) -> Complex64 {
        self.values[t_bin * self.n_space() + x_bin]
    }

    /// `sum |F|^2` over all bins.
    pub fn energy_sum(&self) -> f64 {
        self.values.iter().map(|v| v.norm_sqr()).sum()
    }
}
