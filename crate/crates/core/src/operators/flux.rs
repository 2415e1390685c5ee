use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quad;

/// One term `c * t^(p-1)` of a power-sum flux law.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerTerm {
    pub c: f64,
    pub p: f64,
}

/// Family selector and parameters of a flux law `g`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FluxKind {
    /// `g(t) = t^(p-1)`, the p-Laplacian.
    Power { p: f64 },
    /// `g(t) = sum_k c_k t^(p_k - 1)`.
    PowerSum { terms: Vec<PowerTerm> },
    /// `g(t) = t / sqrt(1 + t^2)`.
    MinimalSurface,
    /// `g(t) = exp(-gamma * t^(-alpha))`.
    StretchedExp { gamma: f64, alpha: f64 },
}

/// A diffusion flux law `g` for the operator `div(g(|∇u|) ∇u / |∇u|)`.
///
/// Besides `g` itself the type evaluates the energy density
/// `G(t) = ∫₀ᵗ g` and the conjugate `H(t) = t g(t) - G(t)`, which is the
/// Legendre transform of `G` at slope `g(t)`. Both vanish at zero and are
/// strictly increasing.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct GOperator {
    kind: FluxKind,
}

const G_ABS_TOL: f64 = 1e-12;
const G_REL_TOL: f64 = 1e-13;

impl GOperator {
    /// Validates the family parameters and builds the operator.
    pub fn new(kind: FluxKind) -> Result<Self> {
        match &kind {
            FluxKind::Power { p } => {
                if !(p.is_finite() && *p > 1.0) {
                    return Err(Error::InvalidParameter(format!("power family needs p > 1, got {p}")));
                }
            }
            FluxKind::PowerSum { terms } => {
                if terms.is_empty() {
                    return Err(Error::InvalidParameter("power_sum needs at least one term".into()));
                }
                for t in terms {
                    if !(t.c.is_finite() && t.c > 0.0 && t.p.is_finite() && t.p > 1.0) {
                        return Err(Error::InvalidParameter(format!(
                            "power_sum needs c_k > 0 and p_k > 1, got c = {}, p = {}",
                            t.c, t.p
                        )));
                    }
                }
            }
            FluxKind::MinimalSurface => {}
            FluxKind::StretchedExp { gamma, alpha } => {
                if !(gamma.is_finite() && *gamma > 0.0 && alpha.is_finite() && *alpha > 0.0) {
                    return Err(Error::InvalidParameter(format!(
                        "stretched_exp needs gamma > 0 and alpha > 0, got {gamma}, {alpha}"
                    )));
                }
            }
        }
        Ok(Self { kind })
    }

    pub fn power(p: f64) -> Result<Self> {
        Self::new(FluxKind::Power { p })
    }

    pub fn minimal_surface() -> Self {
        Self {
            kind: FluxKind::MinimalSurface,
        }
    }

    pub fn stretched_exp(gamma: f64, alpha: f64) -> Result<Self> {
        Self::new(FluxKind::StretchedExp { gamma, alpha })
    }

    pub fn power_sum(terms: &[(f64, f64)]) -> Result<Self> {
        Self::new(FluxKind::PowerSum {
            terms: terms.iter().map(|&(c, p)| PowerTerm { c, p }).collect(),
        })
    }

    pub fn kind(&self) -> &FluxKind {
        &self.kind
    }

    /// `g(t)` for `t >= 0`.
    pub fn flux(&self, t: f64) -> f64 {
        if t <= 0.0 {
            return 0.0;
        }
        match &self.kind {
            FluxKind::Power { p } => t.powf(p - 1.0),
            FluxKind::PowerSum { terms } => terms.iter().map(|k| k.c * t.powf(k.p - 1.0)).sum(),
            FluxKind::MinimalSurface => t / (1.0 + t * t).sqrt(),
            FluxKind::StretchedExp { gamma, alpha } => (-gamma * t.powf(-alpha)).exp(),
        }
    }

    /// `g'(t)` for `t > 0`.
    pub fn flux_derivative(&self, t: f64) -> f64 {
        match &self.kind {
            FluxKind::Power { p } => (p - 1.0) * t.powf(p - 2.0),
            FluxKind::PowerSum { terms } => terms.iter().map(|k| k.c * (k.p - 1.0) * t.powf(k.p - 2.0)).sum(),
            FluxKind::MinimalSurface => (1.0 + t * t).powf(-1.5),
            FluxKind::StretchedExp { gamma, alpha } => {
                if t <= 0.0 {
                    return 0.0;
                }
                gamma * alpha * t.powf(-alpha - 1.0) * (-gamma * t.powf(-alpha)).exp()
            }
        }
    }

    /// Elasticity `t g'(t) / g(t)`, evaluated without forming the ratio so it
    /// stays finite where `g` underflows.
    pub fn elasticity(&self, t: f64) -> f64 {
        match &self.kind {
            FluxKind::Power { p } => p - 1.0,
            FluxKind::PowerSum { terms } => {
                let logs: Vec<f64> = terms.iter().map(|k| k.c.ln() + (k.p - 1.0) * t.ln()).collect();
                let m = logs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
                let (mut num, mut den) = (0.0, 0.0);
                for (k, l) in terms.iter().zip(&logs) {
                    let w = (l - m).exp();
                    num += (k.p - 1.0) * w;
                    den += w;
                }
                num / den
            }
            FluxKind::MinimalSurface => 1.0 / (1.0 + t * t),
            FluxKind::StretchedExp { gamma, alpha } => gamma * alpha * t.powf(-alpha),
        }
    }

    /// `ln g(t)` for `t > 0`.
    pub fn ln_flux(&self, t: f64) -> f64 {
        match &self.kind {
            FluxKind::Power { p } => (p - 1.0) * t.ln(),
            FluxKind::PowerSum { terms } => {
                let logs: Vec<f64> = terms.iter().map(|k| k.c.ln() + (k.p - 1.0) * t.ln()).collect();
                let m = logs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
                m + logs.iter().map(|l| (l - m).exp()).sum::<f64>().ln()
            }
            FluxKind::MinimalSurface => t.ln() - 0.5 * (t * t).ln_1p(),
            FluxKind::StretchedExp { gamma, alpha } => -gamma * t.powf(-alpha),
        }
    }

    /// `sup g` over `[0, ∞)`.
    pub fn flux_supremum(&self) -> f64 {
        match &self.kind {
            FluxKind::Power { .. } | FluxKind::PowerSum { .. } => f64::INFINITY,
            FluxKind::MinimalSurface | FluxKind::StretchedExp { .. } => 1.0,
        }
    }

    /// Energy density `G(t) = ∫₀ᵗ g(s) ds`.
    pub fn density(&self, t: f64) -> f64 {
        if t <= 0.0 {
            return 0.0;
        }
        match &self.kind {
            FluxKind::Power { p } => t.powf(*p) / p,
            FluxKind::PowerSum { terms } => terms.iter().map(|k| k.c * t.powf(k.p) / k.p).sum(),
            FluxKind::MinimalSurface => {
                // sqrt(1 + t^2) - 1 without cancellation
                let s = (1.0 + t * t).sqrt();
                t * t / (s + 1.0)
            }
            FluxKind::StretchedExp { .. } => {
                quad::integrate(|s| self.flux(s), 0.0, t, G_ABS_TOL, G_REL_TOL).unwrap_or(f64::NAN)
            }
        }
    }

    /// Conjugate `H(t) = t g(t) - G(t)`.
    pub fn conjugate(&self, t: f64) -> f64 {
        if t <= 0.0 {
            return 0.0;
        }
        match &self.kind {
            FluxKind::Power { p } => (1.0 - 1.0 / p) * t.powf(*p),
            FluxKind::PowerSum { terms } => terms.iter().map(|k| k.c * (1.0 - 1.0 / k.p) * t.powf(k.p)).sum(),
            FluxKind::MinimalSurface => {
                // 1 - 1/sqrt(1+t^2)
                let s = (1.0 + t * t).sqrt();
                t * t / (s * (s + 1.0))
            }
            FluxKind::StretchedExp { .. } => t * self.flux(t) - self.density(t),
        }
    }

    /// Solves `H(t) = y` by monotone bisection, returning `t` within
    /// `tol * max(1, t)` of the root.
    pub fn invert_conjugate(&self, y: f64, tol: f64) -> Result<f64> {
        self.invert_monotone(
            |t| self.conjugate(t),
            y,
            |h, t, width| h == y || width <= tol * t.max(1.0),
        )
    }

    /// Inverse of `H` to full relative precision; used where `y` may be tiny.
    pub(crate) fn invert_conjugate_precise(&self, y: f64) -> Result<f64> {
        self.invert_monotone(|t| self.conjugate(t), y, |h, _, _| h == y)
    }

    /// `g⁻¹(y)` for `0 <= y < sup g`.
    pub fn invert_flux(&self, y: f64) -> Result<f64> {
        if let FluxKind::Power { p } = self.kind {
            if y < 0.0 {
                return Err(Error::Domain(format!("g⁻¹ of negative value {y}")));
            }
            return Ok(y.powf(1.0 / (p - 1.0)));
        }
        if y >= self.flux_supremum() {
            return Err(Error::BracketExpansion {
                target: y,
                t_max: f64::INFINITY,
            });
        }
        self.invert_monotone(|t| self.flux(t), y, |v, _, _| v == y)
    }

    fn invert_monotone<F, S>(&self, h: F, y: f64, done: S) -> Result<f64>
    where
        F: Fn(f64) -> f64,
        S: Fn(f64, f64, f64) -> bool,
    {
        if !(y >= 0.0) {
            return Err(Error::Domain(format!("cannot invert at negative or NaN value {y}")));
        }
        if y == 0.0 {
            return Ok(0.0);
        }
        let mut hi = 1.0;
        let mut h_hi = h(hi);
        let mut expansions = 0;
        while h_hi < y {
            hi *= 4.0;
            h_hi = h(hi);
            expansions += 1;
            if expansions > 250 || !h_hi.is_finite() {
                return Err(Error::BracketExpansion { target: y, t_max: hi });
            }
        }
        let mut lo = 0.5 * hi;
        while h(lo) >= y {
            hi = lo;
            lo *= 0.5;
            if lo == 0.0 {
                return Ok(hi);
            }
        }
        // invariant: h(lo) < y <= h(hi)
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            let hm = h(mid);
            if done(hm, mid, hi - lo) {
                return Ok(mid);
            }
            if hm < y {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let (hl, hh) = (h(lo), h(hi));
        Ok(if (hl - y).abs() < (hh - y).abs() { lo } else { hi })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn power_two_is_laplacian() {
        let g = GOperator::power(2.0).unwrap();
        for t in [0.0, 0.3, 1.0, 7.5] {
            assert_relative_eq!(g.flux(t), t);
            assert_relative_eq!(g.density(t), t * t / 2.0);
            assert_relative_eq!(g.conjugate(t), t * t / 2.0);
        }
    }

    #[test]
    fn power_three_conjugate_at_two() {
        let g = GOperator::power(3.0).unwrap();
        // H(t) = (1 - 1/p) t^p
        assert_relative_eq!(g.conjugate(2.0), 16.0 / 3.0, max_relative = 1e-15);
        assert_relative_eq!(2.0 * g.flux(2.0) - g.density(2.0), 16.0 / 3.0, max_relative = 1e-15);
    }

    #[test]
    fn minimal_surface_closed_forms() {
        let g = GOperator::minimal_surface();
        let t: f64 = 0.75;
        assert_relative_eq!(g.flux(t), t / (1.0 + t * t).sqrt(), max_relative = 1e-15);
        assert_relative_eq!(g.density(t), (1.0 + t * t).sqrt() - 1.0, max_relative = 1e-14);
        assert_relative_eq!(g.conjugate(t), 1.0 - 1.0 / (1.0 + t * t).sqrt(), max_relative = 1e-14);
        assert_relative_eq!(g.flux_derivative(t), (1.0 + t * t).powf(-1.5), max_relative = 1e-15);
    }

    #[test]
    fn invalid_parameters_rejected() {
        assert!(GOperator::power(1.0).is_err());
        assert!(GOperator::power_sum(&[(1.0, 2.0), (-1.0, 3.0)]).is_err());
        assert!(GOperator::power_sum(&[]).is_err());
        assert!(GOperator::stretched_exp(0.0, 1.0).is_err());
        assert!(GOperator::stretched_exp(1.0, -1.0).is_err());
    }

    #[test]
    fn invert_conjugate_examples() {
        let g = GOperator::power(2.0).unwrap();
        assert_eq!(g.invert_conjugate(0.0, 1e-12).unwrap(), 0.0);
        // closed-form inverse sqrt(2y)
        assert_relative_eq!(g.invert_conjugate(2.0, 1e-14).unwrap(), 2.0, max_relative = 1e-12);
        let ms = GOperator::minimal_surface();
        let y = ms.conjugate(1.0);
        assert_relative_eq!(ms.invert_conjugate(y, 1e-14).unwrap(), 1.0, max_relative = 1e-10);
    }

    #[test]
    fn bounded_conjugate_reports_bracket_failure() {
        // H < 1 for the minimal surface operator
        let ms = GOperator::minimal_surface();
        assert!(matches!(
            ms.invert_conjugate(1.5, 1e-12),
            Err(Error::BracketExpansion { .. })
        ));
        assert!(ms.invert_flux(1.0).is_err());
    }

    #[test]
    fn stretched_exp_density_matches_quadrature_of_flux() {
        let g = GOperator::stretched_exp(1.0, 0.5).unwrap();
        let t = 3.0;
        let reference = quad::integrate(|s| g.flux(s), 0.0, t, 1e-13, 1e-13).unwrap();
        assert_relative_eq!(g.density(t), reference, max_relative = 1e-11);
        assert!(g.conjugate(t) > 0.0);
    }

    #[test]
    fn descriptor_json_shape() {
        let g: GOperator = serde_json::from_str(r#"{"kind": "power", "p": 2.0}"#).unwrap();
        assert_eq!(g, GOperator::power(2.0).unwrap());
        let json = serde_json::to_string(&GOperator::minimal_surface()).unwrap();
        assert_eq!(json, r#"{"kind":"minimal_surface"}"#);
    }
}
