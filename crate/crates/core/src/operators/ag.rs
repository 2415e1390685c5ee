use serde::{Deserialize, Serialize};

use super::flux::GOperator;
use super::growth::GrowthFunction;
use crate::error::{Error, Result};
use crate::quad;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AgStatus {
    Member,
    Nonmember,
    Inconclusive,
}

/// Knobs of the divergence test.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AgControls {
    /// Number of halvings of the cutoff, `a_k = δ 2^-k`.
    pub levels: usize,
    /// Exponent margin around the critical value 1.
    pub margin: f64,
    /// Exponents this close to 1 are tested for logarithmic divergence.
    pub log_band: f64,
    /// Samples in the log-log regression on the smallest decade.
    pub fit_points: usize,
}

impl Default for AgControls {
    fn default() -> Self {
        Self {
            levels: 40,
            margin: 0.05,
            log_band: 1e-3,
            fit_points: 11,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PartialIntegral {
    pub cutoff: f64,
    pub value: f64,
}

/// Outcome of the class test with its diagnostics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AgVerdict {
    pub status: AgStatus,
    /// Fitted `α` in `H⁻¹(Φ(t)) ≈ c t^α`; absent when `φ` vanishes near 0.
    pub estimated_exponent: Option<f64>,
    pub fit_residual: Option<f64>,
    /// Upper end actually used (may shrink below the requested `δ`).
    pub delta: f64,
    pub partial_integrals: Vec<PartialIntegral>,
    /// Estimate of the missing piece `∫₀^{a_K}` when it converges.
    pub tail_estimate: Option<f64>,
    pub reason: String,
}

/// Decides whether `φ` lies in the strong-maximum-principle class for `g`:
/// the integral `∫₀^δ dt / H⁻¹(Φ(t))` diverges or `φ` vanishes near 0.
pub fn classify_ag(gop: &GOperator, phi: &GrowthFunction, delta: f64, controls: &AgControls) -> Result<AgVerdict> {
    if !(delta.is_finite() && delta > 0.0) {
        return Err(Error::InvalidParameter(format!("delta must be positive, got {delta}")));
    }
    phi.validate()?;
    if let GrowthFunction::ZeroOnInterval { d } = phi {
        return Ok(vanishing(delta, d.min(delta)));
    }

    let levels = controls.levels.max(4);
    let a_min = delta * 0.5f64.powi(levels as i32);

    // Sign pattern of φ near zero on a log grid, four samples per octave.
    let probes: Vec<f64> = (0..=4 * levels).map(|j| delta * 0.5f64.powf(j as f64 / 4.0)).collect();
    let mut values = Vec::with_capacity(probes.len());
    for &t in &probes {
        let v = phi.value(t);
        if !(v >= 0.0) {
            return Err(Error::InvalidParameter(format!("φ({t}) = {v} is negative")));
        }
        values.push(v);
    }
    let smallest_zero = values[values.len() - 1] == 0.0;
    let run = values
        .iter()
        .rev()
        .take_while(|v| (**v == 0.0) == smallest_zero)
        .count();
    if run < 8 {
        return Ok(AgVerdict {
            status: AgStatus::Inconclusive,
            estimated_exponent: None,
            fit_residual: None,
            delta,
            partial_integrals: Vec::new(),
            tail_estimate: None,
            reason: "φ alternates between zero and positive values near 0".into(),
        });
    }
    let edge = probes[probes.len() - run];
    if smallest_zero {
        return Ok(vanishing(delta, edge));
    }

    // Shrink δ until H⁻¹(Φ(δ)) exists (bounded H) and φ is positive below it.
    let mut top = edge;
    while gop.invert_conjugate_precise(phi.antiderivative(top)).is_err() {
        top *= 0.5;
        if top <= a_min {
            return Err(Error::Quadrature("H⁻¹(Φ) undefined on the whole cutoff range".into()));
        }
    }
    let psi = |t: f64| gop.invert_conjugate_precise(phi.antiderivative(t)).unwrap_or(f64::NAN);

    let mut partial_integrals = Vec::with_capacity(levels);
    let mut increments = Vec::with_capacity(levels);
    let mut acc = 0.0;
    let mut upper = top;
    for _ in 0..levels {
        let lower = 0.5 * upper;
        if lower < a_min * 0.999 {
            break;
        }
        let piece = quad::integrate(|t| 1.0 / psi(t), lower, upper, 0.0, 1e-10)?;
        acc += piece;
        increments.push(piece);
        partial_integrals.push(PartialIntegral {
            cutoff: lower,
            value: acc,
        });
        upper = lower;
    }
    let a_last = upper;

    // Log-log fit on the smallest decade; move up while Φ underflows.
    let mut lo = a_last;
    let n_fit = controls.fit_points.max(3);
    let fit = loop {
        let ts = quad::logspace(lo, 10.0 * lo, n_fit);
        let ps: Vec<f64> = ts.iter().map(|&t| psi(t)).collect();
        if ps.iter().all(|p| *p > 0.0 && p.is_finite()) {
            let lx: Vec<f64> = ts.iter().map(|t| t.ln()).collect();
            let ly: Vec<f64> = ps.iter().map(|p| p.ln()).collect();
            break quad::fit_line(&lx, &ly);
        }
        lo *= 10.0;
        if 10.0 * lo > top {
            return Err(Error::Quadrature(
                "H⁻¹(Φ(t)) underflows over the whole cutoff range".into(),
            ));
        }
    };
    let alpha = fit.slope;

    let tail_estimate = (alpha < 1.0).then(|| fit.intercept.exp().recip() * a_last.powf(1.0 - alpha) / (1.0 - alpha));
    let (status, reason) = if alpha >= 1.0 + controls.margin {
        (
            AgStatus::Member,
            format!("exponent {alpha:.4} ≥ 1 + margin: integral diverges"),
        )
    } else if alpha <= 1.0 - controls.margin {
        (
            AgStatus::Nonmember,
            format!("exponent {alpha:.4} ≤ 1 - margin: integral converges"),
        )
    } else if (alpha - 1.0).abs() <= controls.log_band && non_decaying(&increments) {
        (
            AgStatus::Member,
            format!("exponent {alpha:.6} at the critical value with steady increments: logarithmic divergence"),
        )
    } else {
        (
            AgStatus::Inconclusive,
            format!("exponent {alpha:.4} inside the undecided band"),
        )
    };

    Ok(AgVerdict {
        status,
        estimated_exponent: Some(alpha),
        fit_residual: Some(fit.max_residual),
        delta: top,
        partial_integrals,
        tail_estimate,
        reason,
    })
}

fn vanishing(delta: f64, d: f64) -> AgVerdict {
    AgVerdict {
        status: AgStatus::Member,
        estimated_exponent: None,
        fit_residual: None,
        delta,
        partial_integrals: Vec::new(),
        tail_estimate: None,
        reason: format!("φ vanishes on [0, {d:.3e}]"),
    }
}

/// Per-octave increments of a log-divergent integral stay constant.
fn non_decaying(increments: &[f64]) -> bool {
    let tail = &increments[increments.len().saturating_sub(5)..];
    tail.windows(2).all(|w| {
        let ratio = w[1] / w[0];
        (0.95..=1.05).contains(&ratio)
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn verdict(p: f64, phi: GrowthFunction) -> AgVerdict {
        classify_ag(&GOperator::power(p).unwrap(), &phi, 1.0, &AgControls::default()).unwrap()
    }

    #[test]
    fn linear_phi_is_member_for_laplacian() {
        let v = verdict(2.0, GrowthFunction::power(1.0, 1.0).unwrap());
        assert_eq!(v.status, AgStatus::Member, "{}", v.reason);
        assert!((v.estimated_exponent.unwrap() - 1.0).abs() < 1e-6);
    }

    #[test]
    fn sqrt_phi_is_nonmember_with_expected_exponent() {
        // H⁻¹(Φ(t)) = c t^{3/4}
        let v = verdict(2.0, GrowthFunction::power(1.0, 0.5).unwrap());
        assert_eq!(v.status, AgStatus::Nonmember);
        assert!((v.estimated_exponent.unwrap() - 0.75).abs() < 1e-6);
        // H⁻¹(Φ(t)) = sqrt(4/3) t^{3/4}; first piece in closed form
        let c = (4.0f64 / 3.0).sqrt();
        let exact = (1.0 - 0.5f64.powf(0.25)) * 4.0 / c;
        let first = v.partial_integrals[0].value;
        assert!((first - exact).abs() < 1e-8 * exact, "{first} vs {exact}");
    }

    #[test]
    fn vanishing_phi_is_member() {
        let v = verdict(3.0, GrowthFunction::ZeroOnInterval { d: 0.1 });
        assert_eq!(v.status, AgStatus::Member);
        let tab = GrowthFunction::Tabulated {
            points: vec![[0.0, 0.0], [0.1, 0.0], [1.0, 1.0]],
        };
        assert_eq!(verdict(2.0, tab).status, AgStatus::Member);
    }

    #[test]
    fn partial_integrals_increase() {
        let v = verdict(3.0, GrowthFunction::power(2.0, 1.5).unwrap());
        for w in v.partial_integrals.windows(2) {
            assert!(w[1].value >= w[0].value);
            assert!(w[1].cutoff < w[0].cutoff);
        }
    }
}
