use serde::{Deserialize, Serialize};

use crate::error::{contract, Error, Result};
use crate::signal::{Axis, ParticleParams};

/// Boundary condition used by propagators and solvers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Boundary {
    Periodic,
    /// Homogeneous Dirichlet walls one grid step beyond each end of the axis.
    Dirichlet,
}

/// External potential `V(x)` in energy units.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Potential {
    Zero,
    Constant {
        value: f64,
    },
    /// Zero inside `(left, right)`; the walls are Dirichlet boundaries.
    InfiniteWell {
        left: f64,
        right: f64,
    },
    /// `-depth` for `|x - center| < width / 2`, zero outside.
    FiniteWell {
        center: f64,
        width: f64,
        depth: f64,
    },
    /// `stiffness (x - center)^2 / 2`.
    Harmonic {
        center: f64,
        stiffness: f64,
    },
    /// Linear interpolation of samples at `origin + j * step`, clamped at the ends.
    Tabulated {
        origin: f64,
        step: f64,
        values: Vec<f64>,
    },
}

impl Potential {
    /// Oscillator of angular frequency `omega` for a particle of mass `mass`.
    pub fn harmonic_with_frequency(mass: f64, omega: f64) -> Self {
        Potential::Harmonic {
            center: 0.0,
            stiffness: mass * omega * omega,
        }
    }

    pub fn boundary(&self) -> Boundary {
        match self {
            Potential::Zero | Potential::Constant { .. } => Boundary::Periodic,
            _ => Boundary::Dirichlet,
        }
    }

    /// `Some(V)` when the potential does not depend on position.
    pub fn constant_value(&self) -> Option<f64> {
        match self {
            Potential::Zero => Some(0.0),
            Potential::Constant { value } => Some(*value),
            _ => None,
        }
    }

    /// `true` for potentials whose Dirichlet box walls are infinitely high.
    pub fn has_hard_walls(&self) -> bool {
        matches!(
            self,
            Potential::Zero | Potential::Constant { .. } | Potential::InfiniteWell { .. }
        )
    }

    pub fn evaluate(&self, x: f64) -> f64 {
        match self {
            Potential::Zero => 0.0,
            Potential::Constant { value } => *value,
            Potential::InfiniteWell { left, right } => {
                if x > *left && x < *right {
                    0.0
                } else {
                    f64::INFINITY
                }
            }
            Potential::FiniteWell {
                center,
                width,
                depth,
            } => {
                if (x - center).abs() < 0.5 * width {
                    -depth
                } else {
                    0.0
                }
            }
            Potential::Harmonic { center, stiffness } => 0.5 * stiffness * (x - center).powi(2),
            Potential::Tabulated {
                origin,
                step,
                values,
            } => {
                let s = ((x - origin) / step).clamp(0.0, (values.len() - 1) as f64);
                let j = (s.floor() as usize).min(values.len().saturating_sub(2));
                let frac = s - j as f64;
                if values.len() == 1 {
                    values[0]
                } else {
                    values[j] * (1.0 - frac) + values[j + 1] * frac
                }
            }
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            Potential::InfiniteWell { left, right } if !(right > left) => {
                contract("infinite well needs right > left")
            }
            Potential::FiniteWell { width, .. } if !(*width > 0.0) => {
                contract("finite well needs a positive width")
            }
            Potential::Tabulated { step, values, .. } if values.is_empty() || !(*step > 0.0) => {
                contract("tabulated potential needs samples and a positive step")
            }
            _ => Ok(()),
        }
    }

    /// `V` on every grid point; fails if any sample is not finite.
    pub fn sample(&self, axis: &Axis) -> Result<Vec<f64>> {
        self.validate()?;
        let v: Vec<f64> = axis.values().into_iter().map(|x| self.evaluate(x)).collect();
        if v.iter().any(|v| !v.is_finite()) {
            return Err(Error::GridMismatch(
                "potential is not finite on the grid (infinite wells must enclose the grid)".into(),
            ));
        }
        Ok(v)
    }

    /// `max |V| / (m c^2)` on the grid; the Schrodinger reduction needs this to be small.
    pub fn relative_to_rest_energy(&self, axis: &Axis, params: &ParticleParams) -> Result<f64> {
        let v = self.sample(axis)?;
        Ok(v.iter().fold(0.0_f64, |m, v| m.max(v.abs())) / params.rest_energy())
    }

    /// For Dirichlet runs: check that the grid is the interior of the well walls.
    pub fn check_walls(&self, axis: &Axis) -> Result<()> {
        if let Potential::InfiniteWell { left, right } = self {
            let tol = 1e-9 * axis.step().max(1.0);
            let l = axis.origin() - axis.step();
            let r = axis.last() + axis.step();
            if (l - left).abs() > tol || (r - right).abs() > tol {
                return Err(Error::GridMismatch(format!(
                    "grid walls at [{l}, {r}] do not match the well [{left}, {right}]; \
                     build the grid with Axis::interior"
                )));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::signal::AxisKind;

    #[test]
    fn evaluations() {
        let h = Potential::harmonic_with_frequency(2.0, 3.0);
        assert_eq!(h.evaluate(1.0), 9.0);
        let w = Potential::FiniteWell {
            center: 0.0,
            width: 2.0,
            depth: 5.0,
        };
        assert_eq!(w.evaluate(0.5), -5.0);
        assert_eq!(w.evaluate(1.5), 0.0);
        let t = Potential::Tabulated {
            origin: 0.0,
            step: 1.0,
            values: vec![0.0, 2.0, 4.0],
        };
        assert_eq!(t.evaluate(1.5), 3.0);
        assert_eq!(t.evaluate(-3.0), 0.0);
        assert_eq!(t.evaluate(9.0), 4.0);
    }

    #[test]
    fn infinite_well_is_a_boundary_not_a_value() {
        let w = Potential::InfiniteWell {
            left: 0.0,
            right: 1.0,
        };
        let inside = Axis::interior(0.0, 1.0, 15, AxisKind::Space).unwrap();
        assert!(w.sample(&inside).unwrap().iter().all(|&v| v == 0.0));
        assert!(w.check_walls(&inside).is_ok());
        let outside = Axis::periodic(-0.5, 1.5, 16, AxisKind::Space).unwrap();
        assert!(w.sample(&outside).is_err());
        let shifted = Axis::interior(0.0, 1.1, 15, AxisKind::Space).unwrap();
        assert!(w.check_walls(&shifted).is_err());
    }

    #[test]
    fn rest_energy_ratio() {
        let axis = Axis::periodic(-1.0, 1.0, 8, AxisKind::Space).unwrap();
        let p = ParticleParams::natural(10.0).unwrap();
        let c = Potential::Constant { value: 2.0 };
        assert!((c.relative_to_rest_energy(&axis, &p).unwrap() - 0.02).abs() < 1e-15);
    }
}
