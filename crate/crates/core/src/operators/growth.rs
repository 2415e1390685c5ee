use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A candidate growth bound `φ` for the strong maximum principle criterion.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GrowthFunction {
    /// `φ(t) = max(t - d, 0)`: identically zero on `[0, d]`.
    ZeroOnInterval { d: f64 },
    /// `φ(t) = c t^q`.
    Power { c: f64, q: f64 },
    /// Piecewise linear through `(t, φ)` samples starting at `(0, 0)`, held
    /// constant past the last sample.
    Tabulated { points: Vec<[f64; 2]> },
}

impl GrowthFunction {
    pub fn power(c: f64, q: f64) -> Result<Self> {
        let phi = GrowthFunction::Power { c, q };
        phi.validate()?;
        Ok(phi)
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            GrowthFunction::ZeroOnInterval { d } => {
                if !(d.is_finite() && *d > 0.0) {
                    return Err(Error::InvalidParameter(format!(
                        "zero_on_interval needs d > 0, got {d}"
                    )));
                }
            }
            GrowthFunction::Power { c, q } => {
                if !(c.is_finite() && *c > 0.0 && q.is_finite() && *q > 0.0) {
                    return Err(Error::InvalidParameter(format!(
                        "power growth needs c > 0 and q > 0 so that φ(0) = 0, got c = {c}, q = {q}"
                    )));
                }
            }
            GrowthFunction::Tabulated { points } => {
                if points.len() < 2 {
                    return Err(Error::InvalidParameter("tabulated φ needs at least two points".into()));
                }
                if points[0] != [0.0, 0.0] {
                    return Err(Error::InvalidParameter("tabulated φ must start at (0, 0)".into()));
                }
                for w in points.windows(2) {
                    if !(w[1][0] > w[0][0]) {
                        return Err(Error::InvalidParameter("tabulated φ abscissae must increase".into()));
                    }
                }
                if points.iter().any(|p| !(p[1] >= 0.0 && p[1].is_finite())) {
                    return Err(Error::InvalidParameter(
                        "tabulated φ must be finite and non-negative".into(),
                    ));
                }
            }
        }
        Ok(())
    }

    pub fn value(&self, t: f64) -> f64 {
        if t <= 0.0 {
            return 0.0;
        }
        match self {
            GrowthFunction::ZeroOnInterval { d } => (t - d).max(0.0),
            GrowthFunction::Power { c, q } => c * t.powf(*q),
            GrowthFunction::Tabulated { points } => {
                let last = points[points.len() - 1];
                if t >= last[0] {
                    return last[1];
                }
                let k = points.partition_point(|p| p[0] <= t) - 1;
                let (a, b) = (points[k], points[k + 1]);
                a[1] + (b[1] - a[1]) * (t - a[0]) / (b[0] - a[0])
            }
        }
    }

    /// `Φ(t) = ∫₀ᵗ φ`.
    pub fn antiderivative(&self, t: f64) -> f64 {
        if t <= 0.0 {
            return 0.0;
        }
        match self {
            GrowthFunction::ZeroOnInterval { d } => {
                let e = (t - d).max(0.0);
                0.5 * e * e
            }
            GrowthFunction::Power { c, q } => c * t.powf(q + 1.0) / (q + 1.0),
            GrowthFunction::Tabulated { points } => {
                let mut acc = 0.0;
                for w in points.windows(2) {
                    let (a, b) = (w[0], w[1]);
                    if t <= a[0] {
                        return acc;
                    }
                    let x = t.min(b[0]);
                    let vx = a[1] + (b[1] - a[1]) * (x - a[0]) / (b[0] - a[0]);
                    acc += 0.5 * (x - a[0]) * (a[1] + vx);
                    if t <= b[0] {
                        return acc;
                    }
                }
                let last = points[points.len() - 1];
                acc + (t - last[0]) * last[1]
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn power_antiderivative() {
        let phi = GrowthFunction::power(3.0, 0.5).unwrap();
        assert_relative_eq!(phi.antiderivative(4.0), 3.0 * 8.0 / 1.5, max_relative = 1e-15);
        assert!(GrowthFunction::power(1.0, 0.0).is_err());
    }

    #[test]
    fn tabulated_matches_exact_integral_of_line() {
        let phi = GrowthFunction::Tabulated {
            points: vec![[0.0, 0.0], [0.5, 1.0], [1.0, 2.0]],
        };
        phi.validate().unwrap();
        assert_relative_eq!(phi.value(0.75), 1.5);
        assert_relative_eq!(phi.antiderivative(1.0), 1.0);
        assert_relative_eq!(phi.antiderivative(2.0), 3.0);
    }

    #[test]
    fn zero_on_interval_vanishes() {
        let phi = GrowthFunction::ZeroOnInterval { d: 0.1 };
        assert_eq!(phi.value(0.05), 0.0);
        assert_eq!(phi.antiderivative(0.1), 0.0);
        assert!(phi.antiderivative(0.3) > 0.0);
    }
}
