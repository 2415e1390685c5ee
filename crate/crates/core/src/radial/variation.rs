use serde::{Deserialize, Serialize};

use super::energy::grid_integral;
use super::profile::RadialProfile;
use crate::error::{Error, Result};
use crate::operators::{check_technass, GOperator, Nonlinearity};
use crate::quad;

/// Derivative of samples on a possibly non-uniform grid: central in the
/// interior, second-order one-sided at the ends.
pub fn finite_difference(r: &[f64], v: &[f64]) -> Vec<f64> {
    let n = r.len();
    let mut out = vec![0.0; n];
    for i in 1..n - 1 {
        let (h0, h1) = (r[i] - r[i - 1], r[i + 1] - r[i]);
        out[i] =
            (-h1 / (h0 * (h0 + h1))) * v[i - 1] + ((h1 - h0) / (h0 * h1)) * v[i] + (h0 / (h1 * (h0 + h1))) * v[i + 1];
    }
    let (h0, h1) = (r[1] - r[0], r[2] - r[1]);
    out[0] = -(2.0 * h0 + h1) / (h0 * (h0 + h1)) * v[0] + (h0 + h1) / (h0 * h1) * v[1] - h0 / (h1 * (h0 + h1)) * v[2];
    let (h0, h1) = (r[n - 2] - r[n - 3], r[n - 1] - r[n - 2]);
    out[n - 1] = h1 / (h0 * (h0 + h1)) * v[n - 3] - (h0 + h1) / (h0 * h1) * v[n - 2]
        + (2.0 * h1 + h0) / (h1 * (h0 + h1)) * v[n - 1];
    out
}

fn integrand(profile: &RadialProfile, gop: &GOperator, f: &Nonlinearity, phi: &[f64], dphi: &[f64]) -> Vec<f64> {
    let dim = profile.dimension as i32;
    (0..profile.len())
        .map(|i| {
            if phi[i] == 0.0 && dphi[i] == 0.0 {
                return 0.0;
            }
            let r = profile.r[i];
            let grad = if dphi[i] == 0.0 {
                0.0
            } else {
                gop.flux_derivative(profile.du[i].abs()) * dphi[i] * dphi[i]
            };
            let reaction = if phi[i] == 0.0 {
                0.0
            } else {
                f.derivative(r, profile.u[i]) * phi[i] * phi[i]
            };
            (grad - reaction) * r.powi(dim - 1)
        })
        .collect()
}

fn check_direction(profile: &RadialProfile, phi: &[f64]) -> Result<()> {
    if phi.len() != profile.len() {
        return Err(Error::InvalidParameter(format!(
            "direction has {} samples, profile has {}",
            phi.len(),
            profile.len()
        )));
    }
    let scale = phi.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if phi[0].abs() > 1e-12 * scale || phi[phi.len() - 1].abs() > 1e-12 * scale {
        return Err(Error::Precondition("direction must vanish at both endpoints".into()));
    }
    Ok(())
}

/// `Q(Φ) = ∫ (g'(-U') (Φ')² - ∂f/∂t(r, U) Φ²) r^{N-1} dr` with
/// finite-difference `Φ'`.
pub fn second_variation_q(profile: &RadialProfile, gop: &GOperator, f: &Nonlinearity, phi: &[f64]) -> Result<f64> {
    check_direction(profile, phi)?;
    let dphi = finite_difference(&profile.r, phi);
    Ok(grid_integral(profile, &integrand(profile, gop, f, phi, &dphi)))
}

/// Same form by the trapezoid rule; used as an independent check.
pub fn second_variation_q_trapezoid(
    profile: &RadialProfile,
    gop: &GOperator,
    f: &Nonlinearity,
    phi: &[f64],
) -> Result<f64> {
    check_direction(profile, phi)?;
    let dphi = finite_difference(&profile.r, phi);
    Ok(quad::trapezoid(&profile.r, &integrand(profile, gop, f, phi, &dphi)))
}

/// Cubic smoothstep cutoff: 0 at both ends of `[a, b]`, 1 on
/// `[a + ε, b - ε]`, slope at most `1.5/ε`. Returns `(H, H')`.
pub fn cutoff(r: f64, a: f64, b: f64, eps: f64) -> (f64, f64) {
    let ramp = |x: f64| -> (f64, f64) {
        let x = x.clamp(0.0, 1.0);
        (x * x * (3.0 - 2.0 * x), 6.0 * x * (1.0 - x) / eps)
    };
    if r <= a || r >= b {
        (0.0, 0.0)
    } else if r < a + eps {
        ramp((r - a) / eps)
    } else if r > b - eps {
        let (v, d) = ramp((b - r) / eps);
        (v, -d)
    } else {
        (1.0, 0.0)
    }
}

/// One row of the ε-scan.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanRow {
    pub eps: f64,
    pub q: f64,
    /// `(N-1) ∫ g(-U') U' H² r^{N-3}`
    pub q5: f64,
    /// `Γ ∫ g(-U') (H')² r^{N-1}`
    pub q6: f64,
    /// `(4Γ/ε²)(∫_{R₁}^{R₁+ε} + ∫_{R₂-ε}^{R₂}) g(-U') r^{N-1}`
    pub q6_bound: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VariationScan {
    pub gamma: f64,
    pub gamma_certified: bool,
    /// `(N-1) ∫ g(-U') U' r^{N-3}`, the limit of `q5` as ε → 0.
    pub q5_limit: f64,
    pub rows: Vec<ScanRow>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NegativeDirection {
    pub eps_star: f64,
    pub q_star: f64,
    /// Trapezoid value of the same form on the doubled grid.
    pub q_check: f64,
    pub phi_star: Vec<f64>,
    pub scan: VariationScan,
}

/// Geometric ε sequence from a quarter of the interval down to
/// `1e-3 (R₂ - R₁)`.
pub fn default_eps_sequence(profile: &RadialProfile) -> Vec<f64> {
    let width = profile.outer_radius() - profile.inner_radius();
    let mut out = Vec::new();
    let mut e = 0.25 * width;
    while e >= 1e-3 * width {
        out.push(e);
        e *= 0.5;
    }
    out
}

fn direction(profile: &RadialProfile, eps: f64) -> Vec<f64> {
    let (a, b) = (profile.inner_radius(), profile.outer_radius());
    profile
        .r
        .iter()
        .zip(&profile.du)
        .map(|(&r, &d)| d * cutoff(r, a, b, eps).0)
        .collect()
}

/// Evaluates `Q(U' H_ε)` and its diagnostics for every ε.
pub fn scan_second_variation(
    profile: &RadialProfile,
    gop: &GOperator,
    f: &Nonlinearity,
    eps_seq: &[f64],
) -> Result<VariationScan> {
    if !profile.monotone {
        return Err(Error::Precondition(
            "second-variation scan needs a monotone profile".into(),
        ));
    }
    let t0 = profile.max_slope();
    if !(t0 > 0.0) {
        return Err(Error::Precondition("profile is flat; there is no direction U'H".into()));
    }
    let bound = check_technass(gop, t0)?;
    let gamma = bound.gamma_estimate;
    let dim = profile.dimension as i32;
    let (a, b) = (profile.inner_radius(), profile.outer_radius());
    let flux_at = |r: f64| gop.flux(-profile.sample(r).1);
    let q5_weight = |i: usize, h2: f64| -> f64 {
        let r = profile.r[i];
        if h2 == 0.0 || dim == 1 {
            return 0.0;
        }
        let d = profile.du[i];
        (dim - 1) as f64 * gop.flux(-d) * d * h2 * r.powi(dim - 3)
    };
    let q5_limit = {
        let vals: Vec<f64> = (0..profile.len())
            .map(|i| if profile.r[i] == 0.0 { 0.0 } else { q5_weight(i, 1.0) })
            .collect();
        grid_integral(profile, &vals)
    };
    let mut rows = Vec::with_capacity(eps_seq.len());
    for &eps in eps_seq {
        if !(eps > 0.0 && 2.0 * eps < b - a) {
            return Err(Error::InvalidParameter(format!(
                "eps = {eps} must lie in (0, (R2 - R1)/2)"
            )));
        }
        let phi = direction(profile, eps);
        let q = second_variation_q(profile, gop, f, &phi)?;
        let (mut q5v, mut q6v) = (Vec::with_capacity(profile.len()), Vec::with_capacity(profile.len()));
        for i in 0..profile.len() {
            let r = profile.r[i];
            let (h, dh) = cutoff(r, a, b, eps);
            q5v.push(q5_weight(i, h * h));
            q6v.push(gop.flux(-profile.du[i]) * dh * dh * r.powi(dim - 1));
        }
        let q5 = grid_integral(profile, &q5v);
        let q6 = gamma * grid_integral(profile, &q6v);
        let weight = |r: f64| flux_at(r) * r.powi(dim - 1);
        let ends =
            quad::integrate(weight, a, a + eps, 1e-14, 1e-10)? + quad::integrate(weight, b - eps, b, 1e-14, 1e-10)?;
        rows.push(ScanRow {
            eps,
            q,
            q5,
            q6,
            q6_bound: 4.0 * gamma / (eps * eps) * ends,
        });
    }
    Ok(VariationScan {
        gamma,
        gamma_certified: bound.holds,
        q5_limit,
        rows,
    })
}

/// First ε in `eps_seq` whose cutoff direction `Φ = U' H_ε` has `Q(Φ) < 0`.
pub fn find_negative_direction(
    profile: &RadialProfile,
    gop: &GOperator,
    f: &Nonlinearity,
    eps_seq: &[f64],
) -> Result<NegativeDirection> {
    let scan = scan_second_variation(profile, gop, f, eps_seq)?;
    let Some(row) = scan.rows.iter().find(|row| row.q < 0.0) else {
        let q_min = scan.rows.iter().map(|r| r.q).fold(f64::INFINITY, f64::min);
        let eps_min = eps_seq.iter().cloned().fold(f64::INFINITY, f64::min);
        let eps_max = eps_seq.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        return Err(Error::Exhausted {
            eps_min,
            eps_max,
            q_min,
        });
    };
    let eps_star = row.eps;
    let q_star = row.q;
    let fine = profile.refine();
    let q_check = second_variation_q_trapezoid(&fine, gop, f, &direction(&fine, eps_star))?;
    Ok(NegativeDirection {
        eps_star,
        q_star,
        q_check,
        phi_star: direction(profile, eps_star),
        scan,
    })
}
