//! The explicit two-bump plateau solution on `B_6 ⊂ R^2` and its source.
//!
//! `u = v + w(x - x¹) + w(x - x²)` with the bump `w(y) = (1 - |y|²)^s` on the
//! unit ball and the plateau `v = 1` on `B_5`, `v = 1 - ((|x|² - 25)/11)^s`
//! on the collar `5 <= |x| <= 6`. It solves the p-Laplace problem with a
//! source `f(u)` that vanishes at the plateau level `u = 1`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::operators::{GOperator, Nonlinearity, SourceKind};
use crate::probe::{random_probes, ProbeFunction};

pub const OUTER_RADIUS: f64 = 6.0;
pub const PLATEAU_RADIUS: f64 = 5.0;

/// Parameters of the two-bump construction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BumpParams {
    pub p: f64,
    pub s: f64,
    /// Dimension used in the source formula.
    pub n: usize,
    pub centers: [[f64; 2]; 2],
}

impl BumpParams {
    pub fn new(p: f64, s: f64, centers: [[f64; 2]; 2]) -> Result<Self> {
        let params = Self { p, s, n: 2, centers };
        params.validate()?;
        Ok(params)
    }

    /// Regularity case I: `p = 2, s = 3`.
    pub fn case_i() -> Self {
        Self::preset(2.0, 3.0)
    }

    /// Regularity case II: `p = 3, s = 2`.
    pub fn case_ii() -> Self {
        Self::preset(3.0, 2.0)
    }

    /// Regularity case III: `p = 3, s = 4`.
    pub fn case_iii() -> Self {
        Self::preset(3.0, 4.0)
    }

    fn preset(p: f64, s: f64) -> Self {
        Self {
            p,
            s,
            n: 2,
            centers: [[-2.0, 0.0], [2.0, 0.0]],
        }
    }

    pub fn validate(&self) -> Result<()> {
        check_exponents(self.p, self.s)?;
        let [a, b] = self.centers;
        let sep = (a[0] - b[0]).hypot(a[1] - b[1]);
        if sep < 2.0 {
            return Err(Error::Precondition(format!(
                "bump centers must be at least 2 apart, got {sep}"
            )));
        }
        for c in &self.centers {
            if c[0].hypot(c[1]) >= 4.0 {
                return Err(Error::Precondition(format!("bump center {c:?} must lie in B_4")));
            }
        }
        Ok(())
    }

    pub fn flux(&self) -> GOperator {
        GOperator::power(self.p).expect("validated exponent")
    }

    pub fn source(&self) -> Nonlinearity {
        Nonlinearity::new(SourceKind::Example1 {
            p: self.p,
            s: self.s,
            n: self.n,
        })
        .expect("validated exponents")
    }
}

/// `p > 1` and `s > p/(p-1)`, which keeps the source continuous on `[0, 2)`.
pub fn check_exponents(p: f64, s: f64) -> Result<()> {
    if !(p.is_finite() && p > 1.0) {
        return Err(Error::Precondition(format!("need p > 1, got {p}")));
    }
    if !(s.is_finite() && s > p / (p - 1.0)) {
        return Err(Error::Precondition(format!(
            "need s > p/(p-1) = {}, got {s}",
            p / (p - 1.0)
        )));
    }
    Ok(())
}

fn norm2(y: [f64; 2]) -> f64 {
    y[0] * y[0] + y[1] * y[1]
}

/// Inner bump formula, clamped at the foot so rounding never takes a root
/// of a negative number.
fn bump_inner(s: f64, y: [f64; 2]) -> (f64, [f64; 2]) {
    let z = (1.0 - norm2(y)).max(0.0);
    let d = -2.0 * s * z.powf(s - 1.0);
    (z.powf(s), [d * y[0], d * y[1]])
}

/// Collar formula `1 - ((|x|² - 25)/11)^s`, clamped at the inner edge.
fn collar_outer(s: f64, x: [f64; 2]) -> (f64, [f64; 2]) {
    let y = ((norm2(x) - 25.0) / 11.0).max(0.0);
    let d = -s * y.powf(s - 1.0) * 2.0 / 11.0;
    (1.0 - y.powf(s), [d * x[0], d * x[1]])
}

/// `w(y) = (1 - |y|²)^s` on the unit ball, 0 outside.
pub fn eval_w(s: f64, y: [f64; 2]) -> f64 {
    if norm2(y) >= 1.0 {
        0.0
    } else {
        bump_inner(s, y).0
    }
}

pub fn eval_grad_w(s: f64, y: [f64; 2]) -> [f64; 2] {
    if norm2(y) >= 1.0 {
        [0.0, 0.0]
    } else {
        bump_inner(s, y).1
    }
}

/// The plateau-with-collar `v`.
pub fn eval_v(s: f64, x: [f64; 2]) -> f64 {
    if norm2(x) <= 25.0 {
        1.0
    } else {
        collar_outer(s, x).0
    }
}

pub fn eval_grad_v(s: f64, x: [f64; 2]) -> [f64; 2] {
    if norm2(x) <= 25.0 {
        [0.0, 0.0]
    } else {
        collar_outer(s, x).1
    }
}

fn check_domain(x: [f64; 2]) -> Result<()> {
    let r = norm2(x).sqrt();
    if r > OUTER_RADIUS * (1.0 + 1e-12) {
        return Err(Error::Domain(format!("|x| = {r} lies outside B_6")));
    }
    Ok(())
}

fn shifted(x: [f64; 2], c: [f64; 2]) -> [f64; 2] {
    [x[0] - c[0], x[1] - c[1]]
}

pub fn eval_u(params: &BumpParams, x: [f64; 2]) -> Result<f64> {
    check_domain(x)?;
    Ok(eval_v(params.s, x)
        + eval_w(params.s, shifted(x, params.centers[0]))
        + eval_w(params.s, shifted(x, params.centers[1])))
}

pub fn eval_grad_u(params: &BumpParams, x: [f64; 2]) -> Result<[f64; 2]> {
    check_domain(x)?;
    let gv = eval_grad_v(params.s, x);
    let g1 = eval_grad_w(params.s, shifted(x, params.centers[0]));
    let g2 = eval_grad_w(params.s, shifted(x, params.centers[1]));
    Ok([gv[0] + g1[0] + g2[0], gv[1] + g1[1] + g2[1]])
}

struct SourceShape {
    /// `2ps - 2s - p + N`
    lin: f64,
    /// `s(p-1) - p`
    power: f64,
    /// `p/2 - 1`
    radial: f64,
}

fn shape(p: f64, s: f64, n: f64) -> SourceShape {
    SourceShape {
        lin: 2.0 * p * s - 2.0 * s - p + n,
        power: s * (p - 1.0) - p,
        radial: 0.5 * p - 1.0,
    }
}

/// Source of the bump `(1 - ρ²)^s` at height `w ∈ [0, 1]`, written with
/// `z = w^{1/s} = 1 - ρ²`:
/// `(2s)^{p-1} (1-z)^{p/2-1} z^{s(p-1)-p} [-2(s-1)(p-1) + (2ps-2s-p+N) z]`.
pub fn bump_source_value(p: f64, s: f64, n: f64, w: f64) -> f64 {
    let k = shape(p, s, n);
    let z = w.max(0.0).powf(1.0 / s);
    if z == 0.0 && k.power > 0.0 {
        return 0.0;
    }
    let c0 = -2.0 * (s - 1.0) * (p - 1.0);
    (2.0 * s).powf(p - 1.0) * (1.0 - z).powf(k.radial) * z.powf(k.power) * (c0 + k.lin * z)
}

/// `d/dw` of [`bump_source_value`].
pub fn bump_source_derivative(p: f64, s: f64, n: f64, w: f64) -> f64 {
    let k = shape(p, s, n);
    let z = w.max(0.0).powf(1.0 / s);
    let c0 = -2.0 * (s - 1.0) * (p - 1.0);
    let lin = c0 + k.lin * z;
    let one_minus = 1.0 - z;
    // powers of z are merged with the chain factor z^{1-s} so the foot z = 0
    // never forms 0 * inf
    let mut dfdw = one_minus.powf(k.radial) * z.powf(k.power + 1.0 - s) * k.lin;
    if k.radial != 0.0 {
        dfdw -= k.radial * one_minus.powf(k.radial - 1.0) * z.powf(k.power + 1.0 - s) * lin;
    }
    if k.power != 0.0 {
        dfdw += one_minus.powf(k.radial) * k.power * z.powf(k.power - s) * lin;
    }
    (2.0 * s).powf(p - 1.0) * dfdw / s
}

/// Source of the collar at height `u ∈ [0, 1]`, written with
/// `y = (1-u)^{1/s} = (|x|² - 25)/11`:
/// `(2s/11)^{p-1} (25+11y)^{p/2-1} y^{s(p-1)-p} [(50/11)(p-1)(s-1) + (2ps-2s-p+N) y]`.
pub fn collar_source_value(p: f64, s: f64, n: f64, u: f64) -> f64 {
    let k = shape(p, s, n);
    let y = (1.0 - u).max(0.0).powf(1.0 / s);
    if y == 0.0 {
        return 0.0;
    }
    let d0 = 50.0 / 11.0 * (p - 1.0) * (s - 1.0);
    (2.0 * s / 11.0).powf(p - 1.0) * (25.0 + 11.0 * y).powf(k.radial) * y.powf(k.power) * (d0 + k.lin * y)
}

/// `d/du` of [`collar_source_value`].
pub fn collar_source_derivative(p: f64, s: f64, n: f64, u: f64) -> f64 {
    let k = shape(p, s, n);
    let y = (1.0 - u).max(0.0).powf(1.0 / s);
    let d0 = 50.0 / 11.0 * (p - 1.0) * (s - 1.0);
    let lin = d0 + k.lin * y;
    let q = 25.0 + 11.0 * y;
    let mut dfdu = q.powf(k.radial) * y.powf(k.power + 1.0 - s) * k.lin;
    if k.radial != 0.0 {
        dfdu += 11.0 * k.radial * q.powf(k.radial - 1.0) * y.powf(k.power + 1.0 - s) * lin;
    }
    if k.power != 0.0 {
        dfdu += q.powf(k.radial) * k.power * y.powf(k.power - s) * lin;
    }
    -(2.0 * s / 11.0).powf(p - 1.0) * dfdu / s
}

/// The two-branch source on `[0, 2]`; callers ensure the range.
pub fn example_source_value(p: f64, s: f64, n: f64, u: f64) -> f64 {
    if u <= 1.0 {
        collar_source_value(p, s, n, u)
    } else {
        bump_source_value(p, s, n, u - 1.0)
    }
}

pub fn example_source_derivative(p: f64, s: f64, n: f64, u: f64) -> f64 {
    if u < 1.0 {
        collar_source_derivative(p, s, n, u)
    } else {
        bump_source_derivative(p, s, n, u - 1.0)
    }
}

/// The printed source, defined on `[0, 2]`.
pub fn eval_f_example(params: &BumpParams, u: f64) -> Result<f64> {
    if !(0.0..=2.0).contains(&u) {
        return Err(Error::Domain(format!("source is defined on [0, 2], got u = {u}")));
    }
    Ok(example_source_value(params.p, params.s, params.n as f64, u))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum RegularityCase {
    I,
    II,
    III,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegularityClass {
    pub case: RegularityCase,
    /// Hölder exponent of `f` on `[0, 2)`, capped at 1.
    pub holder_exponent: f64,
    pub lipschitz: bool,
}

/// Smoothness of the source in terms of `(p, s)`.
pub fn classify_regularity(p: f64, s: f64) -> Result<RegularityClass> {
    check_exponents(p, s)?;
    let exponent = p - 1.0 - p / s;
    let class = if p == 2.0 {
        RegularityClass {
            case: RegularityCase::I,
            holder_exponent: exponent,
            lipschitz: false,
        }
    } else if p < 2.0 || s < p / (p - 2.0) {
        RegularityClass {
            case: RegularityCase::II,
            holder_exponent: exponent,
            lipschitz: false,
        }
    } else {
        RegularityClass {
            case: RegularityCase::III,
            holder_exponent: 1.0,
            lipschitz: true,
        }
    };
    Ok(class)
}

/// Largest jumps of `u` and `∇u` across the interface circles.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MatchingDefect {
    pub value: f64,
    pub gradient: f64,
}

/// Compares the adjacent closed-form pieces on `samples` points of each
/// bump foot, the plateau edge `|x| = 5` and the outer circle `|x| = 6`.
pub fn c1_matching_defect(params: &BumpParams, samples: usize) -> MatchingDefect {
    let mut value: f64 = 0.0;
    let mut gradient: f64 = 0.0;
    let s = params.s;
    for k in 0..samples {
        let theta = std::f64::consts::TAU * k as f64 / samples as f64;
        let e = [theta.cos(), theta.sin()];
        for c in &params.centers {
            let x = [c[0] + e[0], c[1] + e[1]];
            // outside the foot w and its gradient are identically zero
            let (wv, wg) = bump_inner(s, shifted(x, *c));
            value = value.max(wv.abs());
            gradient = gradient.max(wg[0].hypot(wg[1]));
        }
        let x5 = [PLATEAU_RADIUS * e[0], PLATEAU_RADIUS * e[1]];
        let (cv, cg) = collar_outer(s, x5);
        value = value.max((cv - 1.0).abs());
        gradient = gradient.max(cg[0].hypot(cg[1]));
        let x6 = [OUTER_RADIUS * e[0], OUTER_RADIUS * e[1]];
        let (ov, _) = collar_outer(s, x6);
        value = value.max(ov.abs());
    }
    MatchingDefect { value, gradient }
}

/// Pointwise `-div(|∇u|^{p-2} ∇u) - f(u)` with the divergence of the exact
/// flux taken by central differences of step `step`.
pub fn strong_residual(params: &BumpParams, x: [f64; 2], step: f64) -> Result<f64> {
    let g = params.flux();
    let flux = |y: [f64; 2]| -> Result<[f64; 2]> {
        let d = eval_grad_u(params, y)?;
        let t = d[0].hypot(d[1]);
        if t == 0.0 {
            return Ok([0.0, 0.0]);
        }
        let k = g.flux(t) / t;
        Ok([k * d[0], k * d[1]])
    };
    let fx1 = flux([x[0] + step, x[1]])?;
    let fx0 = flux([x[0] - step, x[1]])?;
    let fy1 = flux([x[0], x[1] + step])?;
    let fy0 = flux([x[0], x[1] - step])?;
    let div = (fx1[0] - fx0[0] + fy1[1] - fy0[1]) / (2.0 * step);
    let u = eval_u(params, x)?;
    Ok(-div - eval_f_example(params, u.clamp(0.0, 2.0))?)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResidualReport {
    pub p: f64,
    pub s: f64,
    pub h: f64,
    pub m: usize,
    pub max_residual: f64,
    pub mean_residual: f64,
    pub residuals: Vec<f64>,
}

/// Weak-form residual of a single probe with exact gradients of `u`.
pub fn probe_residual(params: &BumpParams, probe: &ProbeFunction, h: f64) -> f64 {
    let g = params.flux();
    let f = params.source();
    let (lo, hi) = probe.support_indices(h);
    let mut acc = 0.0;
    let mut norm = 0.0;
    for j in lo[1]..=hi[1] {
        for i in lo[0]..=hi[0] {
            let x = [i as f64 * h, j as f64 * h];
            let dpsi = probe.gradient(x);
            let psi = probe.value(x);
            if psi == 0.0 && dpsi == [0.0, 0.0] {
                continue;
            }
            let du = eval_grad_u(params, x).expect("probe inside B_6");
            let u = eval_u(params, x).expect("probe inside B_6");
            let t = du[0].hypot(du[1]);
            let k = if t > 0.0 { g.flux(t) / t } else { 0.0 };
            acc += k * (du[0] * dpsi[0] + du[1] * dpsi[1]) - f.value(0.0, u) * psi;
            norm += dpsi[0] * dpsi[0] + dpsi[1] * dpsi[1];
        }
    }
    (acc * h * h).abs() / (norm * h * h).sqrt()
}

/// Weak residuals of the closed form against `m` random probes.
pub fn weak_residual_example(params: &BumpParams, h: f64, m: usize, seed: u64) -> Result<ResidualReport> {
    params.validate()?;
    if !(h > 0.0 && h <= 0.1) {
        return Err(Error::InvalidParameter(format!("need 0 < h <= 0.1, got {h}")));
    }
    if m == 0 {
        return Err(Error::InvalidParameter("need at least one test function".into()));
    }
    let probes = random_probes(m, seed, OUTER_RADIUS);
    let residuals: Vec<f64> = probes.par_iter().map(|pr| probe_residual(params, pr, h)).collect();
    let max_residual = residuals.iter().cloned().fold(0.0, f64::max);
    let mean_residual = residuals.iter().sum::<f64>() / m as f64;
    Ok(ResidualReport {
        p: params.p,
        s: params.s,
        h,
        m,
        max_residual,
        mean_residual,
        residuals,
    })
}

/// Radial profile `1 + (1 - r²)^s` of a single bump and its derivative.
pub fn bump_profile(s: f64, r: f64) -> (f64, f64) {
    let z = (1.0 - r * r).max(0.0);
    (1.0 + z.powf(s), -2.0 * s * r * z.powf(s - 1.0))
}

/// Radial collar profile on `5 <= r <= 6` and its derivative.
pub fn collar_profile(s: f64, r: f64) -> (f64, f64) {
    let y = ((r * r - 25.0) / 11.0).max(0.0);
    (1.0 - y.powf(s), -s * y.powf(s - 1.0) * 2.0 * r / 11.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn source_at_zero_case_i() {
        let v = eval_f_example(&BumpParams::case_i(), 0.0).unwrap();
        assert_relative_eq!(v, 996.0 / 121.0, max_relative = 1e-14);
    }

    #[test]
    fn source_derivative_matches_finite_differences() {
        for params in [BumpParams::case_i(), BumpParams::case_ii(), BumpParams::case_iii()] {
            for u in [0.2, 0.7, 1.3, 1.8] {
                let e = 1e-6;
                let fd =
                    (eval_f_example(&params, u + e).unwrap() - eval_f_example(&params, u - e).unwrap()) / (2.0 * e);
                let an = example_source_derivative(params.p, params.s, 2.0, u);
                assert_relative_eq!(an, fd, max_relative = 1e-6, epsilon = 1e-7);
            }
        }
    }
}
