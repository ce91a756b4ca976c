use crate::error::Result;
use crate::signal::ParticleParams;

use super::potential::Potential;

/// Positive-frequency root `w(k) = V/hbar + sqrt(c^2 k^2 + w_c^2)` of the
/// Klein-Gordon dispersion relation with a constant potential.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DispersionBranch {
    params: ParticleParams,
    constant_v: f64,
}

impl DispersionBranch {
    pub fn new(params: ParticleParams, constant_v: f64) -> Self {
        Self { params, constant_v }
    }

    pub fn free(params: ParticleParams) -> Self {
        Self::new(params, 0.0)
    }

    /// Branch for a position-independent potential; anything else is rejected.
    pub fn from_potential(params: ParticleParams, potential: &Potential) -> Result<Self> {
        match potential.constant_value() {
            Some(v) => Ok(Self::new(params, v)),
            None => crate::error::contract(
                "the spectral Klein-Gordon propagator needs a position-independent potential; \
                 use kg_propagate_fd",
            ),
        }
    }

    pub fn params(&self) -> &ParticleParams {
        &self.params
    }

    pub fn constant_v(&self) -> f64 {
        self.constant_v
    }

    pub fn omega(&self, k: f64) -> f64 {
        let c = self.params.light_speed();
        let wc = self.params.latent_pulsation();
        self.constant_v / self.params.hbar() + (c * c * k * k + wc * wc).sqrt()
    }

    /// `dw/dk = c^2 k / sqrt(c^2 k^2 + w_c^2)`.
    pub fn group_velocity(&self, k: f64) -> f64 {
        let c = self.params.light_speed();
        let wc = self.params.latent_pulsation();
        c * c * k / (c * c * k * k + wc * wc).sqrt()
    }

    /// Relative residual of `k^2 = w^2/c^2 - 2 V w / (hbar c^2) + V^2 / (hbar^2 c^2) - m^2 c^2 / hbar^2`
    /// evaluated on the branch.
    pub fn relation_residual(&self, k: f64) -> f64 {
        let w = self.omega(k);
        let c = self.params.light_speed();
        let hbar = self.params.hbar();
        let v = self.constant_v;
        let mu = self.params.inverse_compton_length();
        let terms = [
            w * w / (c * c),
            -2.0 * v * w / (hbar * c * c),
            v * v / (hbar * hbar * c * c),
            -mu * mu,
        ];
        let rhs: f64 = terms.iter().sum();
        let scale = terms.iter().map(|t| t.abs()).fold(k * k, f64::max);
        (k * k - rhs).abs() / scale
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn branch_minimum_is_at_rest() {
        let p = ParticleParams::natural(10.0).unwrap();
        let b = DispersionBranch::new(p, 3.0);
        assert_eq!(b.omega(0.0), 103.0);
        for k in [-5.0, -0.1, 0.3, 7.0] {
            assert!(b.omega(k) >= b.omega(0.0));
        }
    }

    #[test]
    fn rejects_position_dependent_potential() {
        let p = ParticleParams::default();
        let h = Potential::harmonic_with_frequency(1.0, 1.0);
        assert!(DispersionBranch::from_potential(p, &h).is_err());
        assert!(DispersionBranch::from_potential(p, &Potential::Constant { value: 1.0 }).is_ok());
    }
}
