use serde::{Deserialize, Serialize};

use super::ag::{classify_ag, AgControls, AgStatus, AgVerdict};
use super::flux::{FluxKind, GOperator};
use super::growth::GrowthFunction;
use super::source::Nonlinearity;
use crate::error::{Error, Result};
use crate::quad;

/// Result of probing `t² g'(t) / g(t) <= Γ` on `(0, t0]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TechnicalBound {
    pub holds: bool,
    pub gamma_estimate: f64,
    /// `(decades below t0, sup on that sample)` for each refinement level.
    pub sup_sequence: Vec<(f64, f64)>,
}

/// Estimates the smallest `Γ` with `t² g'(t) <= Γ g(t)` on `(0, t0]`.
///
/// The sample extends further towards 0 and gets denser at each level; the
/// bound is accepted when the supremum stops moving.
pub fn check_technass(gop: &GOperator, t0: f64) -> Result<TechnicalBound> {
    if !(t0.is_finite() && t0 > 0.0) {
        return Err(Error::InvalidParameter(format!("t0 must be positive, got {t0}")));
    }
    let mut sup_sequence = Vec::new();
    for level in 0..6 {
        let decades = 4.0 * 2f64.powi(level);
        let per_decade = 8 * (1usize << level);
        let n = (decades as usize) * per_decade;
        let mut sup = f64::NEG_INFINITY;
        for j in 0..=n {
            let t = t0 * 10f64.powf(-(j as f64) / per_decade as f64);
            let v = t * gop.elasticity(t);
            sup = sup.max(if v.is_nan() { f64::INFINITY } else { v });
        }
        sup_sequence.push((decades, sup));
    }
    let (_, last) = sup_sequence[sup_sequence.len() - 1];
    let (_, prev) = sup_sequence[sup_sequence.len() - 2];
    let holds = last.is_finite() && (last - prev).abs() <= 1e-3 * last.abs().max(f64::MIN_POSITIVE);
    Ok(TechnicalBound {
        holds,
        gamma_estimate: last,
        sup_sequence,
    })
}

/// True when `t ↦ g(t) t^(1-N)` is strictly decreasing on `[1e-6, 1e6]`.
pub fn check_mon1(gop: &GOperator, n: usize) -> Result<bool> {
    if n < 1 {
        return Err(Error::InvalidParameter("dimension must be at least 1".into()));
    }
    let ts = quad::logspace(1e-6, 1e6, 241);
    let nf = n as f64;
    let log_profile: Vec<f64> = match gop.kind() {
        // exact exponent so that p = N gives a flat line
        FluxKind::Power { p } => ts.iter().map(|t| (p - nf) * t.ln()).collect(),
        _ => ts.iter().map(|&t| gop.ln_flux(t) + (1.0 - nf) * t.ln()).collect(),
    };
    Ok(log_profile.windows(2).all(|w| w[1] < w[0]))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GrowthCondition {
    /// `f(r, t) <= φ(τ - t)` just below a zero `τ > 0`.
    A,
    /// `-f(r, t) <= φ(t)` just above the zero `τ = 0`.
    B,
    /// `-f(r, t) <= φ(t - τ)` just above a zero `τ`.
    C,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GrowthControls {
    pub r_samples: usize,
    pub t_samples: usize,
    /// Largest one-sided offset `s` used in the exponent fit.
    pub window: f64,
    /// Fit range is `[window * span, window]`.
    pub span: f64,
    pub fit_points: usize,
    pub ag: AgControls,
}

impl Default for GrowthControls {
    fn default() -> Self {
        Self {
            r_samples: 1000,
            t_samples: 1000,
            window: 1e-2,
            span: 1e-6,
            fit_points: 25,
            ag: AgControls::default(),
        }
    }
}

/// One zero of `f` and the verdict of the requested condition there.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZeroReport {
    pub rho: f64,
    pub tau: f64,
    /// False when the condition does not speak about this zero.
    pub applicable: bool,
    /// `None` when the test is inconclusive.
    pub satisfied: Option<bool>,
    pub exponent: Option<f64>,
    pub candidate: Option<GrowthFunction>,
    pub verdict: Option<AgVerdict>,
    pub note: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GrowthReport {
    pub condition: GrowthCondition,
    pub zeros: Vec<ZeroReport>,
    /// All applicable zeros satisfied; `None` if any is inconclusive.
    pub satisfied: Option<bool>,
}

/// Locates zeros of `f` on `[0, R] × [t_lo, t_hi]` and checks the requested
/// one-sided growth condition at each by fitting a power bound and running
/// the class test on it.
pub fn check_growth_condition(
    f: &Nonlinearity,
    gop: &GOperator,
    which: GrowthCondition,
    radius: f64,
    state_range: (f64, f64),
    controls: &GrowthControls,
) -> Result<GrowthReport> {
    let (t_lo, t_hi) = state_range;
    if !(t_hi > t_lo) || !(radius >= 0.0) {
        return Err(Error::InvalidParameter(
            "need R >= 0 and a non-empty state range".into(),
        ));
    }
    let radii: Vec<f64> = if f.is_radial() {
        let n = controls.r_samples.max(2);
        (0..n).map(|i| radius * i as f64 / (n - 1) as f64).collect()
    } else {
        vec![0.0]
    };
    let nt = controls.t_samples.max(3);
    let dt = (t_hi - t_lo) / (nt - 1) as f64;
    let ts: Vec<f64> = (0..nt).map(|j| t_lo + j as f64 * dt).collect();

    let mut found: Vec<(f64, f64)> = Vec::new();
    for &r in &radii {
        for tau in zeros_along(|t| f.value(r, t), &ts, dt) {
            found.push((r, tau));
        }
    }
    // Keep one representative per (zero curve, r) cluster: distinct τ within a
    // couple of cells count as the same zero.
    let mut clusters: Vec<Vec<(f64, f64)>> = Vec::new();
    found.sort_by(|a, b| a.1.total_cmp(&b.1).then(a.0.total_cmp(&b.0)));
    for z in found {
        match clusters.last_mut() {
            Some(c) if (z.1 - c[c.len() - 1].1).abs() <= 2.0 * dt => c.push(z),
            _ => clusters.push(vec![z]),
        }
    }
    let mut zeros = Vec::new();
    for c in &clusters {
        let mut reps = vec![c[0]];
        if c.len() > 2 {
            reps.push(c[c.len() / 2]);
        }
        if c.len() > 1 {
            reps.push(c[c.len() - 1]);
        }
        for (rho, tau) in reps {
            zeros.push(check_zero(f, gop, which, radius, rho, tau, t_lo, controls));
        }
    }
    let mut satisfied = Some(true);
    for z in &zeros {
        match z.satisfied {
            Some(false) => {
                satisfied = Some(false);
                break;
            }
            None => satisfied = None,
            Some(true) => {}
        }
    }
    Ok(GrowthReport {
        condition: which,
        zeros,
        satisfied,
    })
}

fn zeros_along<F: Fn(f64) -> f64>(f: F, ts: &[f64], dt: f64) -> Vec<f64> {
    let vals: Vec<f64> = ts.iter().map(|&t| f(t)).collect();
    let mut out: Vec<f64> = Vec::new();
    let push = |t: f64, out: &mut Vec<f64>| {
        if out.last().is_none_or(|l: &f64| (t - l).abs() > 0.5 * dt) {
            out.push(t);
        }
    };
    for j in 0..ts.len() {
        if vals[j] == 0.0 {
            push(ts[j], &mut out);
            continue;
        }
        if j + 1 < ts.len() && vals[j + 1] != 0.0 && vals[j].signum() != vals[j + 1].signum() {
            if let Some(t) = quad::bisect(&f, ts[j], ts[j + 1], 0.0) {
                push(t, &mut out);
            }
            continue;
        }
        // touching zero: local minimum of |f| between samples
        if j > 0 && j + 1 < ts.len() {
            let (a, b, c) = (vals[j - 1].abs(), vals[j].abs(), vals[j + 1].abs());
            if b <= a
                && b <= c
                && vals[j - 1].signum() == vals[j + 1].signum()
                && vals[j - 1] != 0.0
                && vals[j + 1] != 0.0
            {
                let (t, v) = quad::golden_min(|t| f(t).abs(), ts[j - 1], ts[j + 1], 200);
                if v <= 1e-10 {
                    push(t, &mut out);
                }
            }
        }
    }
    out
}

#[allow(clippy::too_many_arguments)]
fn check_zero(
    f: &Nonlinearity,
    gop: &GOperator,
    which: GrowthCondition,
    radius: f64,
    rho: f64,
    tau: f64,
    t_lo: f64,
    controls: &GrowthControls,
) -> ZeroReport {
    let mut report = ZeroReport {
        rho,
        tau,
        applicable: true,
        satisfied: None,
        exponent: None,
        candidate: None,
        verdict: None,
        note: String::new(),
    };
    let at_origin = tau.abs() <= 1e-12;
    let room = match which {
        GrowthCondition::A if at_origin || tau < 0.0 => {
            report.applicable = false;
            report.satisfied = Some(true);
            report.note = "condition (a) concerns zeros with τ > 0".into();
            return report;
        }
        GrowthCondition::B if !at_origin => {
            report.applicable = false;
            report.satisfied = Some(true);
            report.note = "condition (b) concerns the zero at τ = 0".into();
            return report;
        }
        GrowthCondition::A => (tau - t_lo.max(0.0)).max(0.0),
        _ => f64::INFINITY,
    };
    let s_hi = controls.window.min(room);
    if !(s_hi > 0.0) {
        report.note = "no room below τ for a one-sided fit".into();
        return report;
    }
    let s_lo = s_hi * controls.span;
    let r_probe: Vec<f64> = if f.is_radial() {
        let w = radius / controls.r_samples.max(2) as f64;
        (-2..=2).map(|k| (rho + k as f64 * w).clamp(0.0, radius)).collect()
    } else {
        vec![rho]
    };
    let signed = |s: f64| -> f64 {
        r_probe
            .iter()
            .map(|&r| match which {
                GrowthCondition::A => f.value(r, tau - s),
                GrowthCondition::B => -f.value(r, s),
                GrowthCondition::C => -f.value(r, tau + s),
            })
            .fold(f64::NEG_INFINITY, f64::max)
            .max(0.0)
    };
    let ss = quad::logspace(s_lo, s_hi, controls.fit_points.max(3));
    let vs: Vec<f64> = ss.iter().map(|&s| signed(s)).collect();
    let positive = vs.iter().filter(|v| **v > 0.0).count();
    if positive == 0 {
        report.satisfied = Some(true);
        report.candidate = Some(GrowthFunction::ZeroOnInterval { d: s_hi });
        report.note = "relevant signed part vanishes near the zero".into();
        return report;
    }
    if positive < vs.len() {
        report.note = "relevant signed part changes sign near the zero".into();
        return report;
    }
    let lx: Vec<f64> = ss.iter().map(|s| s.ln()).collect();
    let ly: Vec<f64> = vs.iter().map(|v| v.ln()).collect();
    let fit = quad::fit_line(&lx, &ly);
    let kappa = fit.slope;
    report.exponent = Some(kappa);
    if !(kappa > 0.0) {
        report.note = format!("fitted exponent {kappa:.4} does not vanish at the zero");
        return report;
    }
    let c = ss.iter().zip(&vs).map(|(s, v)| v / s.powf(kappa)).fold(0.0, f64::max);
    let phi = GrowthFunction::Power { c, q: kappa };
    match classify_ag(gop, &phi, s_hi, &controls.ag) {
        Ok(v) => {
            report.satisfied = match v.status {
                AgStatus::Member => Some(true),
                AgStatus::Nonmember => Some(false),
                AgStatus::Inconclusive => None,
            };
            report.note = v.reason.clone();
            report.verdict = Some(v);
        }
        Err(e) => report.note = format!("class test failed: {e}"),
    }
    report.candidate = Some(phi);
    report
}
