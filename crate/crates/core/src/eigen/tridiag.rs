//! Symmetric tridiagonal eigenproblem: Sturm-sequence bisection for eigenvalues,
//! inverse iteration for eigenvectors.

/// Symmetric tridiagonal matrix with diagonal `d` and off-diagonal `e` (`e.len() == d.len() - 1`).
#[derive(Debug, Clone)]
pub(crate) struct Tridiagonal {
    pub d: Vec<f64>,
    pub e: Vec<f64>,
}

impl Tridiagonal {
    pub(crate) fn new(d: Vec<f64>, e: Vec<f64>) -> Self {
        assert_eq!(e.len() + 1, d.len(), "tridiagonal matrix must be square and symmetric");
        Self { d, e }
    }

    pub(crate) fn len(&self) -> usize {
        self.d.len()
    }

    pub(crate) fn apply(&self, x: &[f64], out: &mut [f64]) {
        let n = self.len();
        for i in 0..n {
            let mut s = self.d[i] * x[i];
            if i > 0 {
                s += self.e[i - 1] * x[i - 1];
            }
            if i + 1 < n {
                s += self.e[i] * x[i + 1];
            }
            out[i] = s;
        }
    }

    fn gershgorin(&self) -> (f64, f64) {
        let n = self.len();
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in 0..n {
            let r = if i > 0 { self.e[i - 1].abs() } else { 0.0 }
                + if i + 1 < n { self.e[i].abs() } else { 0.0 };
            lo = lo.min(self.d[i] - r);
            hi = hi.max(self.d[i] + r);
        }
        (lo, hi)
    }

    /// Number of eigenvalues strictly below `x`.
    fn count_below(&self, x: f64) -> usize {
        let mut count = 0;
        let mut q = self.d[0] - x;
        let tiny = f64::MIN_POSITIVE.sqrt();
        for i in 0..self.len() {
            if i > 0 {
                let denom = if q == 0.0 { tiny } else { q };
                q = self.d[i] - x - self.e[i - 1] * self.e[i - 1] / denom;
            }
            if q < 0.0 {
                count += 1;
            }
        }
        count
    }

    /// `k`-th smallest eigenvalue (0-based) to full working precision.
    pub(crate) fn eigenvalue(&self, k: usize) -> f64 {
        let (mut lo, mut hi) = self.gershgorin();
        let pad = f64::EPSILON * (lo.abs().max(hi.abs())).max(1.0);
        lo -= pad;
        hi += pad;
        for _ in 0..256 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.count_below(mid) > k {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        0.5 * (lo + hi)
    }

    /// Solve `(T - shift I) x = b` in place with partial pivoting.
    fn solve_shifted(&self, shift: f64, b: &mut [f64]) {
        let n = self.len();
        if n == 1 {
            let p = self.d[0] - shift;
            b[0] /= if p == 0.0 { f64::EPSILON } else { p };
            return;
        }
        let scale = self.d.iter().chain(&self.e).fold(0.0_f64, |m, v| m.max(v.abs())).max(1.0);
        let tiny = f64::EPSILON * scale;
        let mut d: Vec<f64> = self.d.iter().map(|v| v - shift).collect();
        let mut dl = self.e.clone();
        let mut du = self.e.clone();
        let mut du2 = vec![0.0; n.saturating_sub(2)];
        let mut swapped = vec![false; n - 1];
        for i in 0..n - 1 {
            if d[i].abs() >= dl[i].abs() {
                if d[i] == 0.0 {
                    d[i] = tiny;
                }
                let f = dl[i] / d[i];
                dl[i] = f;
                d[i + 1] -= f * du[i];
            } else {
                let f = d[i] / dl[i];
                d[i] = dl[i];
                dl[i] = f;
                let t = du[i];
                du[i] = d[i + 1];
                d[i + 1] = t - f * d[i + 1];
                if i + 2 < n {
                    du2[i] = du[i + 1];
                    du[i + 1] = -f * du[i + 1];
                }
                swapped[i] = true;
            }
        }
        if d[n - 1] == 0.0 {
            d[n - 1] = tiny;
        }
        for i in 0..n - 1 {
            if swapped[i] {
                let t = b[i];
                b[i] = b[i + 1];
                b[i + 1] = t - dl[i] * b[i];
            } else {
                b[i + 1] -= dl[i] * b[i];
            }
        }
        b[n - 1] /= d[n - 1];
        b[n - 2] = (b[n - 2] - du[n - 2] * b[n - 1]) / d[n - 2];
        for i in (0..n.saturating_sub(2)).rev() {
            b[i] = (b[i] - du[i] * b[i + 1] - du2[i] * b[i + 2]) / d[i];
        }
    }

    /// Unit eigenvector for `lambda`, orthogonalized against `previous`.
    pub(crate) fn eigenvector(&self, lambda: f64, previous: &[Vec<f64>]) -> Vec<f64> {
        let n = self.len();
        let mut x: Vec<f64> = (0..n)
            .map(|j| 1.0 + 0.5 * ((j as f64 * 0.7548776662).fract() - 0.5))
            .collect();
        for _ in 0..4 {
            self.solve_shifted(lambda, &mut x);
            for p in previous {
                let dot: f64 = x.iter().zip(p).map(|(a, b)| a * b).sum();
                x.iter_mut().zip(p).for_each(|(a, b)| *a -= dot * b);
            }
            let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
            x.iter_mut().for_each(|v| *v /= norm);
        }
        x
    }
}
