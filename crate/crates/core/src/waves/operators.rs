//! Spatial second-derivative operators shared by the propagators.

use std::sync::Arc;

use num_complex::Complex64;
use rustfft::Fft;

use super::potential::Boundary;
use crate::signal::transform::{derivative_multiplier, plan, Direction};

pub(crate) struct Laplacian {
    boundary: Boundary,
    n: usize,
    dx: f64,
    fwd: Option<Arc<dyn Fft<f64>>>,
    inv: Option<Arc<dyn Fft<f64>>>,
    symbol: Vec<Complex64>,
}

impl Laplacian {
    pub(crate) fn new(boundary: Boundary, n: usize, dx: f64) -> Self {
        match boundary {
            Boundary::Periodic => Self {
                boundary,
                n,
                dx,
                fwd: Some(plan(n, Direction::Forward)),
                inv: Some(plan(n, Direction::Backward)),
                symbol: (0..n)
                    .map(|m| derivative_multiplier(m, n, dx, 2) / n as f64)
                    .collect(),
            },
            Boundary::Dirichlet => Self {
                boundary,
                n,
                dx,
                fwd: None,
                inv: None,
                symbol: Vec::new(),
            },
        }
    }

    /// Largest `|eigenvalue|` of the operator.
    pub(crate) fn spectral_radius(&self) -> f64 {
        match self.boundary {
            Boundary::Periodic => (std::f64::consts::PI / self.dx).powi(2),
            Boundary::Dirichlet => 4.0 / (self.dx * self.dx),
        }
    }

    /// Second-order accurate operator used by the steppers: spectral for periodic
    /// grids, 3-point stencil with zero walls for Dirichlet grids.
    pub(crate) fn apply(&self, u: &[Complex64], out: &mut [Complex64]) {
        debug_assert_eq!(u.len(), self.n);
        match self.boundary {
            Boundary::Periodic => {
                out.copy_from_slice(u);
                self.fwd.as_ref().unwrap().process(out);
                for (v, s) in out.iter_mut().zip(&self.symbol) {
                    *v *= s;
                }
                self.inv.as_ref().unwrap().process(out);
            }
            Boundary::Dirichlet => stencil3(u, self.dx, out),
        }
    }

    /// Higher-order reference operator for residual measurements: spectral for periodic
    /// grids, 5-point fourth-order stencil with odd reflection at Dirichlet walls.
    pub(crate) fn apply_reference(&self, u: &[Complex64], out: &mut [Complex64]) {
        match self.boundary {
            Boundary::Periodic => self.apply(u, out),
            Boundary::Dirichlet => stencil5(u, self.dx, out),
        }
    }
}

pub(crate) fn stencil3(u: &[Complex64], dx: f64, out: &mut [Complex64]) {
    let n = u.len();
    let at = |j: isize| -> Complex64 {
        if j < 0 || j >= n as isize {
            Complex64::default()
        } else {
            u[j as usize]
        }
    };
    let inv = 1.0 / (dx * dx);
    for j in 0..n as isize {
        out[j as usize] = (at(j - 1) - 2.0 * at(j) + at(j + 1)) * inv;
    }
}

fn stencil5(u: &[Complex64], dx: f64, out: &mut [Complex64]) {
    let n = u.len() as isize;
    // Walls sit at indices -1 and n; the field is odd about each wall.
    let at = |j: isize| -> Complex64 {
        if j == -1 || j == n {
            Complex64::default()
        } else if j < -1 {
            -u[(-2 - j) as usize]
        } else if j > n {
            -u[(2 * n - j) as usize]
        } else {
            u[j as usize]
        }
    };
    let inv = 1.0 / (12.0 * dx * dx);
    for j in 0..n {
        out[j as usize] = (-at(j - 2) + 16.0 * at(j - 1) - 30.0 * at(j) + 16.0 * at(j + 1)
            - at(j + 2))
            * inv;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn periodic_operator_is_exact_on_modes() {
        let n = 32;
        let dx = 0.1;
        let k = 2.0 * PI * 3.0 / (n as f64 * dx);
        let u: Vec<Complex64> = (0..n)
            .map(|j| Complex64::from_polar(1.0, k * j as f64 * dx))
            .collect();
        let mut out = vec![Complex64::default(); n];
        Laplacian::new(Boundary::Periodic, n, dx).apply(&u, &mut out);
        for (o, v) in out.iter().zip(&u) {
            assert!((o + k * k * v).norm() < 1e-10);
        }
    }

    #[test]
    fn dirichlet_stencils_on_a_sine() {
        let n = 63;
        let dx = 1.0 / (n as f64 + 1.0);
        let u: Vec<Complex64> = (1..=n)
            .map(|j| Complex64::new((PI * j as f64 * dx).sin(), 0.0))
            .collect();
        let lap = Laplacian::new(Boundary::Dirichlet, n, dx);
        let mut o3 = vec![Complex64::default(); n];
        let mut o5 = vec![Complex64::default(); n];
        lap.apply(&u, &mut o3);
        lap.apply_reference(&u, &mut o5);
        let e3 = o3.iter().zip(&u).map(|(o, v)| (o + PI * PI * v).norm()).fold(0.0, f64::max);
        let e5 = o5.iter().zip(&u).map(|(o, v)| (o + PI * PI * v).norm()).fold(0.0, f64::max);
        assert!(e3 < 2e-3 && e5 < 1e-6, "{e3} {e5}");
    }
}
