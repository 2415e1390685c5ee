use std::fmt;
use std::sync::{Arc, OnceLock};

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::closedform;
use crate::error::{Error, Result};
use crate::quad;

/// Descriptor of a source term `f(r, t)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SourceKind {
    Zero,
    Constant {
        value: f64,
    },
    /// `sum_k coeffs[k] t^k`.
    Polynomial {
        coeffs: Vec<f64>,
    },
    /// `c sign(t - tau) |t - tau|^q`.
    ShiftedPower {
        c: f64,
        q: f64,
        tau: f64,
    },
    /// The piecewise source that makes the two-bump plateau function a
    /// solution on `B_6`. Defined on `[0, 2]` and held constant outside.
    Example1 {
        p: f64,
        s: f64,
        n: usize,
    },
    /// Source of the single bump `base + (1 - r^2)^s` on the unit ball.
    /// Defined on `[base, base + 1]` and held constant outside.
    Bump {
        p: f64,
        s: f64,
        n: usize,
        base: f64,
    },
    /// `value * exp(-rate r)`: r-dependent and non-increasing in `r`.
    RadialDecay {
        value: f64,
        rate: f64,
    },
    /// Placeholder for closure-backed sources; cannot be rebuilt from JSON.
    Custom {
        name: String,
    },
}

type SourceFn = dyn Fn(f64, f64) -> f64 + Send + Sync;

/// Source term `f(r, t)` with its `t`-antiderivative `F` and derivative `∂f/∂t`.
#[derive(Clone)]
pub struct Nonlinearity {
    kind: SourceKind,
    custom: Option<Arc<SourceFn>>,
    radial: bool,
    table: Arc<OnceLock<PrimitiveTable>>,
}

impl fmt::Debug for Nonlinearity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Nonlinearity").field("kind", &self.kind).finish()
    }
}

impl PartialEq for Nonlinearity {
    fn eq(&self, other: &Self) -> bool {
        self.custom.is_none() && other.custom.is_none() && self.kind == other.kind
    }
}

impl Serialize for Nonlinearity {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.kind.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Nonlinearity {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let kind = SourceKind::deserialize(d)?;
        Nonlinearity::new(kind).map_err(serde::de::Error::custom)
    }
}

impl Nonlinearity {
    pub fn new(kind: SourceKind) -> Result<Self> {
        match &kind {
            SourceKind::Zero | SourceKind::Constant { .. } => {}
            SourceKind::Polynomial { coeffs } => {
                if coeffs.is_empty() {
                    return Err(Error::InvalidParameter("polynomial source needs coefficients".into()));
                }
            }
            SourceKind::ShiftedPower { q, .. } => {
                if !(*q > 0.0) {
                    return Err(Error::InvalidParameter(format!("shifted_power needs q > 0, got {q}")));
                }
            }
            SourceKind::Example1 { p, s, n } => {
                closedform::check_exponents(*p, *s)?;
                if *n < 1 {
                    return Err(Error::InvalidParameter("dimension must be at least 1".into()));
                }
            }
            SourceKind::Bump { p, s, n, .. } => {
                // continuity at the foot only needs s (p - 1) >= p
                if !(*p > 1.0 && *s > 1.0 && s * (p - 1.0) >= *p) {
                    return Err(Error::InvalidParameter(format!(
                        "bump source needs p > 1 and s >= p/(p-1), got p = {p}, s = {s}"
                    )));
                }
                if *n < 1 {
                    return Err(Error::InvalidParameter("dimension must be at least 1".into()));
                }
            }
            SourceKind::RadialDecay { rate, .. } => {
                if !(*rate >= 0.0) {
                    return Err(Error::InvalidParameter(format!(
                        "radial_decay needs rate >= 0 to be non-increasing in r, got {rate}"
                    )));
                }
            }
            SourceKind::Custom { name } => {
                return Err(Error::InvalidParameter(format!(
                    "custom source '{name}' has no closure; build it with Nonlinearity::custom"
                )))
            }
        }
        let radial = matches!(kind, SourceKind::RadialDecay { .. });
        Ok(Self {
            kind,
            custom: None,
            radial,
            table: Arc::new(OnceLock::new()),
        })
    }

    pub fn zero() -> Self {
        Self::new(SourceKind::Zero).expect("valid")
    }

    pub fn constant(value: f64) -> Self {
        Self::new(SourceKind::Constant { value }).expect("valid")
    }

    /// Closure-backed source. `radial` marks an r-dependent closure.
    pub fn custom<F>(name: &str, radial: bool, f: F) -> Self
    where
        F: Fn(f64, f64) -> f64 + Send + Sync + 'static,
    {
        Self {
            kind: SourceKind::Custom { name: name.to_string() },
            custom: Some(Arc::new(f)),
            radial,
            table: Arc::new(OnceLock::new()),
        }
    }

    pub fn kind(&self) -> &SourceKind {
        &self.kind
    }

    /// True when `f` depends on `r`.
    pub fn is_radial(&self) -> bool {
        self.radial
    }

    /// `f(r, t)`.
    pub fn value(&self, r: f64, t: f64) -> f64 {
        match &self.kind {
            SourceKind::Zero => 0.0,
            SourceKind::Constant { value } => *value,
            SourceKind::Polynomial { coeffs } => coeffs.iter().rev().fold(0.0, |acc, c| acc * t + c),
            SourceKind::ShiftedPower { c, q, tau } => {
                let d = t - tau;
                c * d.signum() * d.abs().powf(*q)
            }
            SourceKind::Example1 { p, s, n } => closedform::example_source_value(*p, *s, *n as f64, t.clamp(0.0, 2.0)),
            SourceKind::Bump { p, s, n, base } => {
                closedform::bump_source_value(*p, *s, *n as f64, (t - base).clamp(0.0, 1.0))
            }
            SourceKind::RadialDecay { value, rate } => value * (-rate * r).exp(),
            SourceKind::Custom { .. } => (self.custom.as_ref().expect("closure"))(r, t),
        }
    }

    /// `∂f/∂t (r, t)`; analytic where available, central differences otherwise.
    pub fn derivative(&self, r: f64, t: f64) -> f64 {
        match &self.kind {
            SourceKind::Zero | SourceKind::Constant { .. } | SourceKind::RadialDecay { .. } => 0.0,
            SourceKind::Polynomial { coeffs } => coeffs
                .iter()
                .enumerate()
                .skip(1)
                .rev()
                .fold(0.0, |acc, (k, c)| acc * t + k as f64 * c),
            SourceKind::ShiftedPower { c, q, tau } => {
                let d = (t - tau).abs();
                if d == 0.0 {
                    if *q > 1.0 {
                        0.0
                    } else if *q == 1.0 {
                        *c
                    } else {
                        f64::INFINITY * c.signum()
                    }
                } else {
                    c * q * d.powf(q - 1.0)
                }
            }
            SourceKind::Example1 { p, s, n } => {
                if !(0.0..=2.0).contains(&t) {
                    return 0.0;
                }
                closedform::example_source_derivative(*p, *s, *n as f64, t)
            }
            SourceKind::Bump { p, s, n, base } => {
                let w = t - base;
                if !(0.0..=1.0).contains(&w) {
                    return 0.0;
                }
                closedform::bump_source_derivative(*p, *s, *n as f64, w)
            }
            SourceKind::Custom { .. } => {
                let h = 1e-6 * t.abs().max(1.0);
                (self.value(r, t + h) - self.value(r, t - h)) / (2.0 * h)
            }
        }
    }

    /// `F(r, t) = ∫₀ᵗ f(r, s) ds`.
    pub fn primitive(&self, r: f64, t: f64) -> f64 {
        match &self.kind {
            SourceKind::Zero => 0.0,
            SourceKind::Constant { value } => value * t,
            SourceKind::Polynomial { coeffs } => {
                coeffs
                    .iter()
                    .enumerate()
                    .rev()
                    .fold(0.0, |acc, (k, c)| acc * t + c / (k as f64 + 1.0))
                    * t
            }
            SourceKind::ShiftedPower { c, q, tau } => {
                c / (q + 1.0) * ((t - tau).abs().powf(q + 1.0) - tau.abs().powf(q + 1.0))
            }
            SourceKind::RadialDecay { value, rate } => value * (-rate * r).exp() * t,
            SourceKind::Example1 { .. } | SourceKind::Bump { .. } => self.tabulated_primitive(t),
            SourceKind::Custom { .. } => {
                quad::integrate(|s| self.value(r, s), 0.0, t, 1e-12, 1e-12).unwrap_or(f64::NAN)
            }
        }
    }

    fn tabulated_primitive(&self, t: f64) -> f64 {
        let table = self.table.get_or_init(|| {
            let (lo, hi) = match &self.kind {
                SourceKind::Example1 { .. } => (0.0, 2.0),
                SourceKind::Bump { base, .. } => (base.min(0.0), base + 1.0),
                _ => unreachable!("only the plateau sources are tabulated"),
            };
            PrimitiveTable::build(|s| self.value(0.0, s), lo, hi, 1 << 14)
        });
        table.eval(|s| self.value(0.0, s), t)
    }
}

/// Cubic Hermite table of `F(t) = ∫₀ᵗ f` on `[lo, hi]` built from adaptive
/// quadrature on each cell. Linear extension outside uses the held value of `f`.
struct PrimitiveTable {
    lo: f64,
    step: f64,
    values: Vec<f64>,
    slopes: Vec<f64>,
}

impl PrimitiveTable {
    fn build<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, cells: usize) -> Self {
        let step = (hi - lo) / cells as f64;
        let mut values = Vec::with_capacity(cells + 1);
        let mut slopes = Vec::with_capacity(cells + 1);
        let mut acc = 0.0;
        values.push(0.0);
        slopes.push(f(lo));
        for i in 0..cells {
            let a = lo + i as f64 * step;
            let b = if i + 1 == cells { hi } else { a + step };
            acc += quad::integrate(&f, a, b, 1e-15, 1e-13).unwrap_or(0.5 * (b - a) * (f(a) + f(b)));
            values.push(acc);
            slopes.push(f(b));
        }
        // shift so that F(0) = 0
        let mut table = Self {
            lo,
            step,
            values,
            slopes,
        };
        let offset = if lo < 0.0 { table.interior(0.0) } else { 0.0 };
        for v in &mut table.values {
            *v -= offset;
        }
        if lo > 0.0 {
            let head = quad::integrate(&f, 0.0, lo, 1e-15, 1e-13).unwrap_or(f(lo) * lo);
            for v in &mut table.values {
                *v += head;
            }
        }
        table
    }

    fn interior(&self, t: f64) -> f64 {
        let n = self.values.len() - 1;
        let x = (t - self.lo) / self.step;
        let i = (x.floor() as usize).min(n - 1);
        let s = x - i as f64;
        let (y0, y1) = (self.values[i], self.values[i + 1]);
        let (m0, m1) = (self.slopes[i] * self.step, self.slopes[i + 1] * self.step);
        let s2 = s * s;
        let s3 = s2 * s;
        (2.0 * s3 - 3.0 * s2 + 1.0) * y0 + (s3 - 2.0 * s2 + s) * m0 + (-2.0 * s3 + 3.0 * s2) * y1 + (s3 - s2) * m1
    }

    fn eval<F: Fn(f64) -> f64>(&self, f: F, t: f64) -> f64 {
        let hi = self.lo + self.step * (self.values.len() - 1) as f64;
        if t < self.lo {
            self.values[0] + f(t) * (t - self.lo)
        } else if t > hi {
            self.values[self.values.len() - 1] + f(t) * (t - hi)
        } else {
            self.interior(t)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn polynomial_value_derivative_primitive() {
        let f = Nonlinearity::new(SourceKind::Polynomial {
            coeffs: vec![1.0, -2.0, 3.0],
        })
        .unwrap();
        assert_relative_eq!(f.value(0.0, 2.0), 1.0 - 4.0 + 12.0);
        assert_relative_eq!(f.derivative(0.0, 2.0), -2.0 + 12.0);
        assert_relative_eq!(f.primitive(0.0, 2.0), 2.0 - 4.0 + 8.0);
    }

    #[test]
    fn shifted_power_primitive_matches_quadrature() {
        let f = Nonlinearity::new(SourceKind::ShiftedPower {
            c: 2.0,
            q: 0.5,
            tau: 0.7,
        })
        .unwrap();
        for t in [0.2, 0.7, 1.5] {
            let q = quad::integrate(|s| f.value(0.0, s), 0.0, t, 1e-13, 1e-13).unwrap();
            assert_relative_eq!(f.primitive(0.0, t), q, max_relative = 1e-9, epsilon = 1e-12);
        }
    }

    #[test]
    fn tabulated_primitive_matches_closed_form_bump_source() {
        // p = 2, s = 3, N = 2, base 0: f(w) = 6 w^{1/3} (-4 + 6 w^{1/3})
        let f = Nonlinearity::new(SourceKind::Bump {
            p: 2.0,
            s: 3.0,
            n: 2,
            base: 0.0,
        })
        .unwrap();
        for w in [0.1f64, 0.5, 1.0] {
            let exact = -18.0 * w.powf(4.0 / 3.0) + 108.0 / 5.0 * w.powf(5.0 / 3.0);
            assert_relative_eq!(f.primitive(0.0, w), exact, max_relative = 1e-9, epsilon = 1e-12);
        }
    }

    #[test]
    fn custom_source_is_not_serializable_back() {
        let f = Nonlinearity::custom("sq", false, |_, t| t * t);
        let json = serde_json::to_string(&f).unwrap();
        assert!(serde_json::from_str::<Nonlinearity>(&json).is_err());
        assert_relative_eq!(f.primitive(0.0, 3.0), 9.0, max_relative = 1e-9);
    }
}
