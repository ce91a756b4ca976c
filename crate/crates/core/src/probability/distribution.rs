use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{contract, Error, Result};
use crate::observables::{carrier_shift, MomentTable};

/// Negative masses down to this are rounding and get clipped; below it, the moments
/// are inconsistent with the support.
pub const CLIP_LIMIT: f64 = 1e-6;

/// Largest accepted condition number of the moment system.
pub const CONDITION_LIMIT: f64 = 1e10;

/// Probability masses on a finite support.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiscreteDistribution {
    pub support: Vec<f64>,
    pub masses: Vec<f64>,
}

impl DiscreteDistribution {
    pub fn new(support: Vec<f64>, masses: Vec<f64>) -> Result<Self> {
        if support.is_empty() || support.len() != masses.len() {
            return contract("distribution needs one mass per support point");
        }
        if masses.iter().any(|m| !m.is_finite() || *m < -1e-10) {
            return contract("masses must be finite and non-negative");
        }
        let total: f64 = masses.iter().sum();
        if (total - 1.0).abs() > 1e-6 {
            return contract(format!("masses sum to {total}"));
        }
        Ok(Self { support, masses })
    }

    pub fn len(&self) -> usize {
        self.support.len()
    }

    pub fn is_empty(&self) -> bool {
        self.support.is_empty()
    }

    pub fn total(&self) -> f64 {
        self.masses.iter().sum()
    }

    /// `sum_n P_n x_n^r`.
    pub fn moment(&self, r: usize) -> f64 {
        self.support
            .iter()
            .zip(&self.masses)
            .map(|(x, p)| p * x.powi(r as i32))
            .sum()
    }

    pub fn moments(&self, max_order: usize) -> Vec<f64> {
        (0..=max_order).map(|r| self.moment(r)).collect()
    }

    pub fn to_toml_string(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Parse(e.to_string()))
    }
}

/// Diagnostics of one moment-matching solve.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReconstructionAudit {
    /// Affine map `y = (x - center) / half_width` applied to the support.
    pub center: f64,
    pub half_width: f64,
    pub condition: f64,
    /// Orders `0..N` used in the solve.
    pub used_orders: usize,
    /// Relative misfit `|sum P x^r - m_r| / max(1, |m_r|)` of the unused orders `N..=R`.
    pub unused_residuals: Vec<(usize, f64)>,
    /// Total negative mass removed by clipping.
    pub clipped_mass: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Reconstruction {
    pub distribution: DiscreteDistribution,
    pub audit: ReconstructionAudit,
}

impl Reconstruction {
    pub fn to_toml_string(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Parse(e.to_string()))
    }
}

/// Masses on `support` whose first `support.len()` moments match `moments`.
///
/// The support is mapped affinely onto `[-1, 1]` and the moments re-expanded
/// binomially before the Vandermonde system is solved.
pub fn reconstruct_discrete(moments: &MomentTable, support: &[f64]) -> Result<Reconstruction> {
    let n = support.len();
    if n == 0 {
        return contract("empty support");
    }
    if n > moments.values.len() {
        return contract(format!(
            "{n} support points need at least {n} moments, got {}",
            moments.values.len()
        ));
    }
    if support.iter().any(|x| !x.is_finite()) {
        return contract("support must be finite");
    }
    let mut sorted = support.to_vec();
    sorted.sort_by(f64::total_cmp);
    if sorted.windows(2).any(|w| w[0] == w[1]) {
        return contract("support points must be distinct");
    }
    let (lo, hi) = (sorted[0], sorted[n - 1]);
    let center = 0.5 * (lo + hi);
    let half_width = if n == 1 { 1.0 } else { 0.5 * (hi - lo) };
    let mapped_moments: Vec<f64> = carrier_shift(&moments.values[..n], -center)
        .into_iter()
        .enumerate()
        .map(|(r, m)| m / half_width.powi(r as i32))
        .collect();
    let y: Vec<f64> = support.iter().map(|x| (x - center) / half_width).collect();
    let v = DMatrix::from_fn(n, n, |r, j| y[j].powi(r as i32));
    let svd = v.svd(true, true);
    let smax = svd.singular_values.max();
    let smin = svd.singular_values.min();
    let condition = if smin == 0.0 { f64::INFINITY } else { smax / smin };
    if condition > CONDITION_LIMIT {
        return Err(Error::Conditioning {
            condition,
            limit: CONDITION_LIMIT,
        });
    }
    let rhs = DVector::from_vec(mapped_moments);
    let p = svd
        .solve(&rhs, 0.0)
        .map_err(|e| Error::Reconstruction(e.to_string()))?;
    let mut masses: Vec<f64> = p.iter().copied().collect();
    let worst = masses.iter().copied().fold(f64::INFINITY, f64::min);
    if worst < -CLIP_LIMIT {
        return Err(Error::Reconstruction(format!(
            "mass {worst:e} is below -{CLIP_LIMIT:e}; the moments are inconsistent with the support"
        )));
    }
    let clipped_mass: f64 = masses.iter().filter(|m| **m < 0.0).map(|m| -m).sum();
    masses.iter_mut().for_each(|m| *m = m.max(0.0));
    let total: f64 = masses.iter().sum();
    if !(total > 0.0) {
        return Err(Error::Reconstruction("all masses vanish".into()));
    }
    masses.iter_mut().for_each(|m| *m /= total);
    let distribution = DiscreteDistribution::new(support.to_vec(), masses)?;
    let unused_residuals = (n..moments.values.len())
        .map(|r| {
            let m = moments.values[r];
            (r, (distribution.moment(r) - m).abs() / m.abs().max(1.0))
        })
        .collect();
    Ok(Reconstruction {
        distribution,
        audit: ReconstructionAudit {
            center,
            half_width,
            condition,
            used_orders: n,
            unused_residuals,
            clipped_mass,
        },
    })
}
