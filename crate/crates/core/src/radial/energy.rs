use serde::{Deserialize, Serialize};

use super::profile::RadialProfile;
use crate::error::{Error, Result};
use crate::operators::{check_mon1, GOperator, Nonlinearity};
use crate::quad;

/// Odd extension `g(-t) = -g(t)`.
pub(crate) fn signed_flux(gop: &GOperator, t: f64) -> f64 {
    t.signum() * gop.flux(t.abs())
}

/// Integral over `[R₁, R₂]` of samples on the profile grid: Simpson on
/// uniform grids, trapezoid otherwise.
pub(crate) fn grid_integral(profile: &RadialProfile, values: &[f64]) -> f64 {
    if profile.is_uniform() {
        quad::simpson(values, profile.step())
    } else {
        quad::trapezoid(&profile.r, values)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OdeResidual {
    pub max_residual: f64,
    pub points_used: usize,
    pub points_excluded: usize,
}

/// Sup-norm residual of
/// `-g'(-U') U'' r^{N-1} + (N-1) g(-U') r^{N-2} = f(r, U) r^{N-1}`
/// with `U''` from central differences of the stored `U'`. Points within
/// `margin` samples of a vanishing slope are excluded.
pub fn ode_residual(profile: &RadialProfile, gop: &GOperator, f: &Nonlinearity, margin: usize) -> OdeResidual {
    let n = profile.len();
    let dim = profile.dimension as i32;
    let threshold = 1e-8 * profile.max_slope();
    let flat: Vec<bool> = profile.du.iter().map(|d| d.abs() <= threshold).collect();
    let mut max_residual: f64 = 0.0;
    let mut used = 0;
    let mut excluded = 0;
    for i in 1..n - 1 {
        let lo = i.saturating_sub(margin);
        let hi = (i + margin).min(n - 1);
        if flat[lo..=hi].iter().any(|b| *b) {
            excluded += 1;
            continue;
        }
        let r = profile.r[i];
        let d2 = (profile.du[i + 1] - profile.du[i - 1]) / (profile.r[i + 1] - profile.r[i - 1]);
        let t = -profile.du[i];
        let lhs = -gop.flux_derivative(t.abs()) * d2 * r.powi(dim - 1)
            + if dim > 1 {
                (dim - 1) as f64 * signed_flux(gop, t) * r.powi(dim - 2)
            } else {
                0.0
            };
        let rhs = f.value(r, profile.u[i]) * r.powi(dim - 1);
        max_residual = max_residual.max((lhs - rhs).abs());
        used += 1;
    }
    OdeResidual {
        max_residual,
        points_used: used,
        points_excluded: excluded,
    }
}

/// Largest defect of `g(-U'(r)) r^{N-1} = ∫_{R₁}^r f(t, U) t^{N-1} dt` over
/// the grid. Only flat starts are supported: with inner flux the identity
/// needs a boundary term.
pub fn integral_identity_defect(profile: &RadialProfile, gop: &GOperator, f: &Nonlinearity) -> Result<f64> {
    let scale = profile.max_slope().max(1.0);
    if profile.du[0].abs() > 1e-10 * scale {
        return Err(Error::Unsupported(format!(
            "profile has inner slope {} at r = {}; only flat starts are supported",
            profile.du[0], profile.r[0]
        )));
    }
    let dim = profile.dimension as i32;
    let source: Vec<f64> = profile
        .r
        .iter()
        .zip(&profile.u)
        .map(|(&r, &u)| f.value(r, u) * r.powi(dim - 1))
        .collect();
    let running = quad::cumulative_trapezoid(&profile.r, &source);
    Ok(profile
        .r
        .iter()
        .zip(&profile.du)
        .zip(&running)
        .map(|((&r, &d), &acc)| (signed_flux(gop, -d) * r.powi(dim - 1) - acc).abs())
        .fold(0.0, f64::max))
}

/// `J = ω_{N-1} ∫ (G(|U'|) - F(r, U)) r^{N-1} dr`.
pub fn radial_energy(profile: &RadialProfile, gop: &GOperator, f: &Nonlinearity) -> f64 {
    let dim = profile.dimension as i32;
    let integrand: Vec<f64> = (0..profile.len())
        .map(|i| {
            let r = profile.r[i];
            (gop.density(profile.du[i].abs()) - f.primitive(r, profile.u[i])) * r.powi(dim - 1)
        })
        .collect();
    quad::unit_sphere_area(profile.dimension) * grid_integral(profile, &integrand)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RescalingReport {
    pub eps: f64,
    pub j_original: f64,
    pub j_rescaled: f64,
    /// `J(u_ε) - J(u)`; non-positive whenever `mon1` holds.
    pub gap: f64,
    pub mon1: bool,
}

/// Dilated copy `U((1+ε) r)` on `[0, R/(1+ε)]`, held at `U(R)` outside.
pub fn rescaled_profile(profile: &RadialProfile, eps: f64) -> Result<RadialProfile> {
    let k = 1.0 + eps;
    let r_out = profile.outer_radius();
    let (_, u0) = profile.endpoint_values();
    let r = profile.r.clone();
    let (u, du) = r
        .iter()
        .map(|&x| {
            if k * x < r_out {
                let (v, d) = profile.sample(k * x);
                (v, k * d)
            } else {
                (u0, 0.0)
            }
        })
        .unzip();
    RadialProfile::new(profile.dimension, r, u, du)
}

/// Energy of the dilation `u_ε(x) = u((1+ε)x)` extended by `u₀ = U(R)` on the
/// collar, compared with `J(u)`.
///
/// For autonomous `f` the rescaled energy is computed by substitution back
/// onto the original grid, which keeps the gap free of interpolation error.
pub fn rescaling_compare(
    profile: &RadialProfile,
    gop: &GOperator,
    f: &Nonlinearity,
    eps: f64,
) -> Result<RescalingReport> {
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(Error::InvalidParameter(format!("eps must be positive, got {eps}")));
    }
    if profile.inner_radius() != 0.0 {
        return Err(Error::Unsupported("rescaling needs a profile on a ball [0, R]".into()));
    }
    let scale = profile.max_slope().max(1.0);
    if profile.du[profile.len() - 1].abs() > 1e-8 * scale {
        return Err(Error::Precondition("rescaling needs U'(R) = 0".into()));
    }
    let mon1 = check_mon1(gop, profile.dimension)?;
    let j_original = radial_energy(profile, gop, f);
    let (j_rescaled, gap) = if f.is_radial() {
        let j = radial_energy(&rescaled_profile(profile, eps)?, gop, f);
        (j, j - j_original)
    } else {
        let dim = profile.dimension as i32;
        let k = 1.0 + eps;
        let shrink = k.powi(-dim);
        let (_, u0) = profile.endpoint_values();
        let f0 = f.primitive(0.0, u0);
        let integrand: Vec<f64> = (0..profile.len())
            .map(|i| {
                let t = profile.du[i].abs();
                let reduced = f.primitive(0.0, profile.u[i]) - f0;
                let w = profile.r[i].powi(dim - 1);
                (shrink * (gop.density(k * t) - reduced) - (gop.density(t) - reduced)) * w
            })
            .collect();
        let gap = quad::unit_sphere_area(profile.dimension) * grid_integral(profile, &integrand);
        (j_original + gap, gap)
    };
    Ok(RescalingReport {
        eps,
        j_original,
        j_rescaled,
        gap,
        mon1,
    })
}
