use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Samples `(r, U, U')` of a radial function on `[R₁, R₂]` in dimension `N`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadialProfile {
    pub dimension: usize,
    pub r: Vec<f64>,
    pub u: Vec<f64>,
    pub du: Vec<f64>,
    /// `U' <= 0` at every sample.
    pub monotone: bool,
    /// Interior radii where `U'` changes sign.
    #[serde(default)]
    pub turning_points: Vec<f64>,
}

impl RadialProfile {
    pub fn new(dimension: usize, r: Vec<f64>, u: Vec<f64>, du: Vec<f64>) -> Result<Self> {
        if dimension < 1 {
            return Err(Error::InvalidParameter("dimension must be at least 1".into()));
        }
        if r.len() < 3 || r.len() != u.len() || r.len() != du.len() {
            return Err(Error::InvalidParameter(
                "profile needs at least 3 samples and equal-length columns".into(),
            ));
        }
        if r[0] < 0.0 || r.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidParameter(
                "radii must be non-negative and strictly increasing".into(),
            ));
        }
        let monotone = du.iter().all(|d| *d <= 0.0);
        Ok(Self {
            dimension,
            r,
            u,
            du,
            monotone,
            turning_points: Vec::new(),
        })
    }

    /// Samples `f(r) = (U, U')` on `points` uniform radii of `[r0, r1]`.
    pub fn from_fn<F: Fn(f64) -> (f64, f64)>(dimension: usize, r0: f64, r1: f64, points: usize, f: F) -> Result<Self> {
        if !(r1 > r0) || points < 3 {
            return Err(Error::InvalidParameter("need r1 > r0 and at least 3 points".into()));
        }
        let h = (r1 - r0) / (points - 1) as f64;
        let r: Vec<f64> = (0..points)
            .map(|i| if i + 1 == points { r1 } else { r0 + i as f64 * h })
            .collect();
        let (u, du) = r.iter().map(|&x| f(x)).unzip();
        Self::new(dimension, r, u, du)
    }

    pub fn len(&self) -> usize {
        self.r.len()
    }

    pub fn is_empty(&self) -> bool {
        self.r.is_empty()
    }

    pub fn inner_radius(&self) -> f64 {
        self.r[0]
    }

    pub fn outer_radius(&self) -> f64 {
        self.r[self.r.len() - 1]
    }

    /// `(U(R₁), U(R₂))`.
    pub fn endpoint_values(&self) -> (f64, f64) {
        (self.u[0], self.u[self.u.len() - 1])
    }

    /// Mean spacing; equal to the spacing for uniform grids.
    pub fn step(&self) -> f64 {
        (self.outer_radius() - self.inner_radius()) / (self.len() - 1) as f64
    }

    pub fn is_uniform(&self) -> bool {
        let h = self.step();
        self.r.windows(2).all(|w| ((w[1] - w[0]) - h).abs() <= 1e-9 * h)
    }

    pub fn max_slope(&self) -> f64 {
        self.du.iter().fold(0.0, |m, d| m.max(d.abs()))
    }

    /// Cubic Hermite interpolation of `(U, U')` at `x`, clamped to the grid.
    pub fn sample(&self, x: f64) -> (f64, f64) {
        let n = self.len();
        let x = x.clamp(self.r[0], self.r[n - 1]);
        let i = self.r.partition_point(|&ri| ri <= x).clamp(1, n - 1) - 1;
        let h = self.r[i + 1] - self.r[i];
        let s = (x - self.r[i]) / h;
        let (y0, y1) = (self.u[i], self.u[i + 1]);
        let (m0, m1) = (self.du[i] * h, self.du[i + 1] * h);
        let s2 = s * s;
        let s3 = s2 * s;
        let value =
            (2.0 * s3 - 3.0 * s2 + 1.0) * y0 + (s3 - 2.0 * s2 + s) * m0 + (-2.0 * s3 + 3.0 * s2) * y1 + (s3 - s2) * m1;
        let slope = ((6.0 * s2 - 6.0 * s) * y0
            + (3.0 * s2 - 4.0 * s + 1.0) * m0
            + (-6.0 * s2 + 6.0 * s) * y1
            + (3.0 * s2 - 2.0 * s) * m1)
            / h;
        (value, slope)
    }

    /// Same profile on a grid with every interval halved.
    pub fn refine(&self) -> Self {
        let n = self.len();
        let mut r = Vec::with_capacity(2 * n - 1);
        let mut u = Vec::with_capacity(2 * n - 1);
        let mut du = Vec::with_capacity(2 * n - 1);
        for i in 0..n {
            r.push(self.r[i]);
            u.push(self.u[i]);
            du.push(self.du[i]);
            if i + 1 < n {
                let m = 0.5 * (self.r[i] + self.r[i + 1]);
                let (a, b) = self.sample(m);
                r.push(m);
                u.push(a);
                du.push(b);
            }
        }
        Self {
            dimension: self.dimension,
            monotone: du.iter().all(|d| *d <= 0.0),
            r,
            u,
            du,
            turning_points: self.turning_points.clone(),
        }
    }

    /// Writes `r,U,U'` rows.
    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut w = std::io::BufWriter::new(std::fs::File::create(path)?);
        writeln!(w, "r,U,dU")?;
        for i in 0..self.len() {
            writeln!(w, "{:.17e},{:.17e},{:.17e}", self.r[i], self.u[i], self.du[i])?;
        }
        w.flush()?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hermite_sampling_is_exact_for_cubics() {
        let p = RadialProfile::from_fn(2, 0.0, 1.0, 11, |r| (r * r * r - r, 3.0 * r * r - 1.0)).unwrap();
        let (u, du) = p.sample(0.437);
        assert!((u - (0.437f64.powi(3) - 0.437)).abs() < 1e-14);
        assert!((du - (3.0 * 0.437f64.powi(2) - 1.0)).abs() < 1e-13);
        assert_eq!(p.refine().len(), 21);
    }

    #[test]
    fn rejects_unsorted_radii() {
        assert!(RadialProfile::new(2, vec![0.0, 0.5, 0.4], vec![0.0; 3], vec![0.0; 3]).is_err());
    }
}
