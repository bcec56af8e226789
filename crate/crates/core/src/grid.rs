//! Uniformly sampled functions on [−L, L] and second-order difference stencils.

use alloc::format;
use alloc::vec::Vec;

use crate::error::{Error, Result};

pub const MIN_POINTS: usize = 16;

#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    pub half_width: f64,
    pub values: Vec<f64>,
    /// Points at each end that were extrapolated rather than computed.
    pub extrapolated: usize,
}

impl GridFunction {
    pub fn new(half_width: f64, values: Vec<f64>) -> Result<Self> {
        if values.len() < MIN_POINTS {
            return Err(Error::GridTooCoarse { n: values.len(), min: MIN_POINTS });
        }
        if !(half_width > 0.0 && half_width.is_finite()) {
            return Err(Error::Config(format!("half-width must be positive, got {half_width}")));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            let x = -half_width + 2.0 * half_width * i as f64 / (values.len() - 1) as f64;
            return Err(Error::SingularWavefunction { x });
        }
        Ok(Self { half_width, values, extrapolated: 0 })
    }

    pub fn sample(half_width: f64, n: usize, f: impl Fn(f64) -> f64) -> Result<Self> {
        if n < MIN_POINTS {
            return Err(Error::GridTooCoarse { n, min: MIN_POINTS });
        }
        let h = 2.0 * half_width / (n - 1) as f64;
        Self::new(half_width, (0..n).map(|i| f(-half_width + h * i as f64)).collect())
    }

    pub fn zeros(half_width: f64, n: usize) -> Result<Self> {
        Self::sample(half_width, n, |_| 0.0)
    }

    pub fn n(&self) -> usize {
        self.values.len()
    }

    pub fn spacing(&self) -> f64 {
        2.0 * self.half_width / (self.n() - 1) as f64
    }

    pub fn x(&self, i: usize) -> f64 {
        -self.half_width + self.spacing() * i as f64
    }

    pub fn xs(&self) -> Vec<f64> {
        (0..self.n()).map(|i| self.x(i)).collect()
    }

    pub fn with_values(&self, values: Vec<f64>) -> Self {
        Self { half_width: self.half_width, values, extrapolated: self.extrapolated }
    }

    /// Trapezoidal ∫ φψ dx.
    pub fn inner(&self, other: &GridFunction) -> f64 {
        let n = self.n();
        let mut s = 0.0;
        for i in 0..n {
            let w = if i == 0 || i == n - 1 { 0.5 } else { 1.0 };
            s += w * self.values[i] * other.values[i];
        }
        s * self.spacing()
    }

    pub fn norm(&self) -> f64 {
        self.inner(self).sqrt()
    }

    /// Discrete L² norm over the points `margin..n-margin`.
    pub fn interior_norm(&self, margin: usize) -> f64 {
        let n = self.n();
        if n <= 2 * margin {
            return 0.0;
        }
        let s: f64 = self.values[margin..n - margin].iter().map(|v| v * v).sum();
        (s * self.spacing()).sqrt()
    }

    /// Centered first derivative, one-sided second-order at the ends.
    pub fn d1(&self) -> Vec<f64> {
        let v = &self.values;
        let n = v.len();
        let h = self.spacing();
        let mut out = alloc::vec![0.0; n];
        for i in 1..n - 1 {
            out[i] = (v[i + 1] - v[i - 1]) / (2.0 * h);
        }
        out[0] = (-3.0 * v[0] + 4.0 * v[1] - v[2]) / (2.0 * h);
        out[n - 1] = (3.0 * v[n - 1] - 4.0 * v[n - 2] + v[n - 3]) / (2.0 * h);
        out
    }

    /// Three-point second derivative, one-sided second-order at the ends.
    pub fn d2(&self) -> Vec<f64> {
        let v = &self.values;
        let n = v.len();
        let h2 = self.spacing() * self.spacing();
        let mut out = alloc::vec![0.0; n];
        for i in 1..n - 1 {
            out[i] = (v[i + 1] - 2.0 * v[i] + v[i - 1]) / h2;
        }
        out[0] = (2.0 * v[0] - 5.0 * v[1] + 4.0 * v[2] - v[3]) / h2;
        out[n - 1] = (2.0 * v[n - 1] - 5.0 * v[n - 2] + 4.0 * v[n - 3] - v[n - 4]) / h2;
        out
    }

    /// Five-point third derivative, zero within two points of the ends.
    pub fn d3(&self) -> Vec<f64> {
        let v = &self.values;
        let n = v.len();
        let h3 = self.spacing().powi(3);
        let mut out = alloc::vec![0.0; n];
        for i in 2..n - 2 {
            out[i] = (v[i + 2] - 2.0 * v[i + 1] + 2.0 * v[i - 1] - v[i - 2]) / (2.0 * h3);
        }
        out
    }

    /// Replaces `k` points at each end by quadratic extrapolation from the
    /// three nearest retained points.
    pub fn extrapolate_ends(&mut self, k: usize) {
        let n = self.n();
        let v = &mut self.values;
        for j in (0..k).rev() {
            v[j] = 3.0 * v[j + 1] - 3.0 * v[j + 2] + v[j + 3];
        }
        for j in n - k..n {
            v[j] = 3.0 * v[j - 1] - 3.0 * v[j - 2] + v[j - 3];
        }
        self.extrapolated = self.extrapolated.max(k);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_short_grids() {
        assert!(matches!(GridFunction::zeros(1.0, 8), Err(Error::GridTooCoarse { n: 8, .. })));
    }

    #[test]
    fn derivatives_of_a_cubic() {
        let g = GridFunction::sample(2.0, 41, |x| x * x * x - x).unwrap();
        let (d1, d2, d3) = (g.d1(), g.d2(), g.d3());
        let h = g.spacing();
        for i in 2..39 {
            let x = g.x(i);
            assert!((d1[i] - (3.0 * x * x - 1.0)).abs() <= h * h + 1e-12);
            assert!((d2[i] - 6.0 * x).abs() < 1e-9);
            assert!((d3[i] - 6.0).abs() < 1e-7);
        }
        assert!((d2[0] + 12.0).abs() < 1e-9);
    }

    #[test]
    fn trapezoid_norm_of_gaussian() {
        let g = GridFunction::sample(10.0, 2001, |x| (-x * x / 2.0).exp()).unwrap();
        assert!((g.norm() - core::f64::consts::PI.sqrt().sqrt()).abs() < 1e-12);
    }

    #[test]
    fn extrapolation_is_exact_for_quadratics() {
        let mut g = GridFunction::sample(1.0, 21, |x| 2.0 * x * x - x + 3.0).unwrap();
        let want = g.values.clone();
        for v in g.values.iter_mut().take(2) {
            *v = 0.0;
        }
        g.extrapolate_ends(2);
        for (a, b) in g.values.iter().zip(want.iter()) {
            assert!((a - b).abs() < 1e-12);
        }
        assert_eq!(g.extrapolated, 2);
    }
}
