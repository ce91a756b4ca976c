use serde::{Deserialize, Serialize};

use crate::error::{contract, Result};

/// Mass, wave speed and action constant of a single particle.
///
/// The latent pulsation `w_c = m c^2 / hbar` and rest energy `E_c = m c^2` are derived
/// on demand, never stored.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ParticleParams {
    mass: f64,
    light_speed: f64,
    hbar: f64,
}

impl ParticleParams {
    pub fn new(mass: f64, light_speed: f64, hbar: f64) -> Result<Self> {
        for (name, v) in [("mass", mass), ("light_speed", light_speed), ("hbar", hbar)] {
            if !(v > 0.0) || !v.is_finite() {
                return contract(format!("{name} must be positive and finite, got {v}"));
            }
        }
        Ok(Self {
            mass,
            light_speed,
            hbar,
        })
    }

    /// `hbar = m = 1` with the given (small) light speed.
    pub fn natural(light_speed: f64) -> Result<Self> {
        Self::new(1.0, light_speed, 1.0)
    }

    pub fn mass(&self) -> f64 {
        self.mass
    }

    pub fn light_speed(&self) -> f64 {
        self.light_speed
    }

    pub fn hbar(&self) -> f64 {
        self.hbar
    }

    pub fn rest_energy(&self) -> f64 {
        self.mass * self.light_speed * self.light_speed
    }

    pub fn latent_pulsation(&self) -> f64 {
        self.rest_energy() / self.hbar
    }

    /// `m c / hbar`, the mass term of the covariant form.
    pub fn inverse_compton_length(&self) -> f64 {
        self.latent_pulsation() / self.light_speed
    }

    pub fn with_light_speed(&self, light_speed: f64) -> Result<Self> {
        Self::new(self.mass, light_speed, self.hbar)
    }
}

impl Default for ParticleParams {
    fn default() -> Self {
        Self {
            mass: 1.0,
            light_speed: 10.0,
            hbar: 1.0,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn derived_quantities() {
        let p = ParticleParams::default();
        assert_eq!(p.latent_pulsation(), 100.0);
        assert_eq!(p.latent_pulsation() * p.hbar(), p.rest_energy());
        assert_eq!(p.inverse_compton_length(), 10.0);
        let q = ParticleParams::new(2.0, 3.0, 0.5).unwrap();
        assert_eq!(q.latent_pulsation() * q.hbar(), q.rest_energy());
    }

    #[test]
    fn rejects_nonpositive() {
        assert!(ParticleParams::new(0.0, 1.0, 1.0).is_err());
        assert!(ParticleParams::new(1.0, f64::NAN, 1.0).is_err());
    }
}
