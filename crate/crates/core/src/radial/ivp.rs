use serde::{Deserialize, Serialize};

use super::profile::RadialProfile;
use crate::error::{Error, Result};
use crate::operators::{GOperator, Nonlinearity};
use crate::quad;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IvpOptions {
    /// Grid points on `[r_start, R]`.
    pub points: usize,
    /// Inner radius with zero flux; 0 for a ball.
    pub r_start: f64,
}

impl Default for IvpOptions {
    fn default() -> Self {
        Self {
            points: 4096,
            r_start: 0.0,
        }
    }
}

struct Rhs<'a> {
    gop: &'a GOperator,
    f: &'a Nonlinearity,
    n: i32,
}

impl Rhs<'_> {
    /// `U' = -g⁻¹(I / r^{N-1})` with the odd extension of `g`.
    fn slope(&self, r: f64, flux_integral: f64) -> Result<f64> {
        let w = r.powi(self.n - 1);
        if w == 0.0 {
            return Ok(0.0);
        }
        let y = flux_integral / w;
        let sup = self.gop.flux_supremum();
        if y.abs() >= sup {
            return Err(Error::FluxOutOfRange {
                radius: r,
                flux: y,
                sup_g: sup,
            });
        }
        let q = self.gop.invert_flux(y.abs())?;
        Ok(-q * y.signum())
    }

    fn eval(&self, r: f64, u: f64, i: f64) -> Result<(f64, f64)> {
        Ok((self.slope(r, i)?, self.f.value(r, u) * r.powi(self.n - 1)))
    }

    fn rk4(&self, r: f64, u: f64, i: f64, h: f64) -> Result<(f64, f64)> {
        let (a1, b1) = self.eval(r, u, i)?;
        let (a2, b2) = self.eval(r + 0.5 * h, u + 0.5 * h * a1, i + 0.5 * h * b1)?;
        let (a3, b3) = self.eval(r + 0.5 * h, u + 0.5 * h * a2, i + 0.5 * h * b2)?;
        let (a4, b4) = self.eval(r + h, u + h * a3, i + h * b3)?;
        Ok((
            u + h / 6.0 * (a1 + 2.0 * a2 + 2.0 * a3 + a4),
            i + h / 6.0 * (b1 + 2.0 * b2 + 2.0 * b3 + b4),
        ))
    }

    /// First step off a zero-flux start, where `g⁻¹` is not smooth: freeze
    /// `f` at the start value and integrate the slope exactly.
    fn start(&self, r0: f64, u0: f64, h: f64) -> Result<(f64, f64)> {
        let fbar = self.f.value(r0 + 0.5 * h, u0);
        let nf = self.n as f64;
        let flux = |t: f64| fbar * (t.powi(self.n) - r0.powi(self.n)) / nf;
        let failure = std::cell::RefCell::new(None);
        let drop = quad::integrate(
            |t| match self.slope(t, flux(t)) {
                Ok(v) => v,
                Err(e) => {
                    failure.borrow_mut().get_or_insert(e);
                    0.0
                }
            },
            r0,
            r0 + h,
            1e-15,
            1e-12,
        )?;
        if let Some(e) = failure.into_inner() {
            return Err(e);
        }
        Ok((u0 + drop, flux(r0 + h)))
    }
}

pub(crate) enum March {
    Completed(RadialProfile),
    Crossed { radius: f64 },
}

pub(crate) fn march(
    gop: &GOperator,
    f: &Nonlinearity,
    n: usize,
    u_c: f64,
    radius: f64,
    opts: &IvpOptions,
) -> Result<March> {
    if n < 1 {
        return Err(Error::InvalidParameter("dimension must be at least 1".into()));
    }
    if !(u_c >= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "center value must be non-negative, got {u_c}"
        )));
    }
    let r0 = opts.r_start;
    if !(r0 >= 0.0 && radius > r0) || opts.points < 3 {
        return Err(Error::InvalidParameter(
            "need 0 <= r_start < R and at least 3 points".into(),
        ));
    }
    let rhs = Rhs { gop, f, n: n as i32 };
    let m = opts.points;
    let h = (radius - r0) / (m - 1) as f64;
    let rs: Vec<f64> = (0..m)
        .map(|i| if i + 1 == m { radius } else { r0 + i as f64 * h })
        .collect();
    let mut u = vec![u_c];
    let mut flux = vec![0.0];
    let mut turning = Vec::new();
    for k in 1..m {
        let (r, ui, ii) = (rs[k - 1], u[k - 1], flux[k - 1]);
        let step = rs[k] - r;
        let (un, inext) = if ii == 0.0 && k == 1 {
            rhs.start(r, ui, step)?
        } else {
            rhs.rk4(r, ui, ii, step)?
        };
        if un < 0.0 {
            // localize U = 0 on this step
            let cross = quad::bisect(
                |s| {
                    if s == 0.0 {
                        ui
                    } else {
                        rhs.rk4(r, ui, ii, s).map(|v| v.0).unwrap_or(-1.0)
                    }
                },
                0.0,
                step,
                0.0,
            )
            .unwrap_or(step);
            return Ok(March::Crossed { radius: r + cross });
        }
        if ii != 0.0 && inext != 0.0 && ii.signum() != inext.signum() {
            let s = quad::bisect(
                |s| {
                    if s == 0.0 {
                        ii
                    } else {
                        rhs.rk4(r, ui, ii, s).map(|v| v.1).unwrap_or(0.0)
                    }
                },
                0.0,
                step,
                0.0,
            )
            .unwrap_or(0.5 * step);
            turning.push(r + s);
        }
        u.push(un);
        flux.push(inext);
    }
    let du = rs
        .iter()
        .zip(&flux)
        .map(|(&r, &i)| rhs.slope(r, i))
        .collect::<Result<Vec<f64>>>()?;
    let mut profile = RadialProfile::new(n, rs, u, du)?;
    profile.turning_points = turning;
    Ok(March::Completed(profile))
}

/// Integrates the radial equation in flux form
/// `g(-U') r^{N-1} = ∫ f(t, U) t^{N-1} dt` outward from a flat start
/// `U(r_start) = u_c`, `U'(r_start) = 0`.
pub fn integrate_radial_ivp(
    gop: &GOperator,
    f: &Nonlinearity,
    n: usize,
    u_c: f64,
    radius: f64,
    opts: &IvpOptions,
) -> Result<RadialProfile> {
    match march(gop, f, n, u_c, radius, opts)? {
        March::Completed(p) => Ok(p),
        March::Crossed { radius } => Err(Error::NegativeState { radius }),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShootResult {
    pub profile: RadialProfile,
    pub center_value: f64,
    pub boundary_miss: f64,
    pub iterations: usize,
}

/// Signed miss: `U(R)` when the march reaches `R`, `-(R - r*)` when it
/// crosses zero at `r*` first.
fn miss(
    gop: &GOperator,
    f: &Nonlinearity,
    n: usize,
    radius: f64,
    u_c: f64,
    opts: &IvpOptions,
) -> Result<(f64, Option<RadialProfile>)> {
    Ok(match march(gop, f, n, u_c, radius, opts)? {
        March::Completed(p) => (p.u[p.len() - 1], Some(p)),
        March::Crossed { radius: rc } => (-(radius - rc), None),
    })
}

/// Bisection on the center value until `0 <= U(R) <= tol`.
pub fn shoot_dirichlet(
    gop: &GOperator,
    f: &Nonlinearity,
    n: usize,
    radius: f64,
    bracket: (f64, f64),
    tol: f64,
    opts: &IvpOptions,
) -> Result<ShootResult> {
    let (mut lo, mut hi) = bracket;
    if !(hi > lo && lo >= 0.0 && tol > 0.0) {
        return Err(Error::InvalidParameter("need 0 <= u_lo < u_hi and tol > 0".into()));
    }
    let done = |m: f64, p: Option<RadialProfile>, u_c: f64, it: usize| -> Option<ShootResult> {
        match p {
            Some(profile) if (0.0..=tol).contains(&m) => Some(ShootResult {
                profile,
                center_value: u_c,
                boundary_miss: m,
                iterations: it,
            }),
            _ => None,
        }
    };
    let (m_lo, p_lo) = miss(gop, f, n, radius, lo, opts)?;
    if let Some(r) = done(m_lo, p_lo, lo, 0) {
        return Ok(r);
    }
    let (m_hi, p_hi) = miss(gop, f, n, radius, hi, opts)?;
    if let Some(r) = done(m_hi, p_hi, hi, 0) {
        return Ok(r);
    }
    if m_lo.signum() == m_hi.signum() {
        return Err(Error::NoSignChange {
            lo,
            hi,
            miss_lo: m_lo,
            miss_hi: m_hi,
        });
    }
    let lo_negative = m_lo < 0.0;
    for it in 1..=200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let (m, p) = miss(gop, f, n, radius, mid, opts)?;
        if let Some(r) = done(m, p, mid, it) {
            return Ok(r);
        }
        if (m < 0.0) == lo_negative {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Err(Error::Quadrature(format!(
        "shooting stalled at u_c in [{lo}, {hi}] without reaching tolerance {tol}"
    )))
}
