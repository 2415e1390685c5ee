use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::grid::DiskField;
use crate::error::{Error, Result};
use crate::operators::{GOperator, Nonlinearity};
use crate::probe::random_probes;

/// Cell-centre quantities of the bilinear interpolant: mean value, centre
/// point and gradient `(a, b)`.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Cell {
    pub u: f64,
    pub x: [f64; 2],
    pub grad: [f64; 2],
}

pub(crate) fn cell(field: &DiskField, values: &[f64], i: usize, j: usize) -> Cell {
    let n = field.n;
    let (u00, u10, u01, u11) = (
        values[j * n + i],
        values[j * n + i + 1],
        values[(j + 1) * n + i],
        values[(j + 1) * n + i + 1],
    );
    let h = field.h;
    let half = 0.5 * h;
    Cell {
        u: 0.25 * (u00 + u10 + u01 + u11),
        x: [field.coord(i) + half, field.coord(j) + half],
        grad: [(u10 + u11 - u00 - u01) / (2.0 * h), (u01 + u11 - u00 - u10) / (2.0 * h)],
    }
}

/// Flux law with optional smoothing `t ↦ √(t² + δ²)`.
#[derive(Debug, Clone)]
pub(crate) struct CellFlux<'a> {
    pub gop: &'a GOperator,
    pub delta: f64,
}

impl CellFlux<'_> {
    /// `G(√(t²+δ²)) - G(δ)`.
    pub fn density(&self, t: f64) -> f64 {
        if self.delta == 0.0 {
            self.gop.density(t)
        } else {
            self.gop.density(t.hypot(self.delta)) - self.gop.density(self.delta)
        }
    }

    /// Diffusivity `g(s)/s` with `s = √(t²+δ²)`; zero at a vanishing
    /// unsmoothed gradient.
    pub fn diffusivity(&self, t: f64) -> f64 {
        let s = t.hypot(self.delta);
        if s == 0.0 {
            0.0
        } else {
            self.gop.flux(s) / s
        }
    }
}

/// Sum over active cells of `h² q(cell)`, rows summed in a fixed order.
pub(crate) fn cell_sum<Q: Fn(&Cell) -> f64 + Sync>(field: &DiskField, values: &[f64], q: Q) -> f64 {
    let h2 = field.h * field.h;
    let rows: Vec<f64> = (0..field.n - 1)
        .into_par_iter()
        .map(|j| {
            let mut acc = 0.0;
            for i in 0..field.n - 1 {
                if field.cell_active(i, j) {
                    acc += q(&cell(field, values, i, j));
                }
            }
            acc
        })
        .collect();
    h2 * rows.iter().sum::<f64>()
}

pub(crate) fn energy_of(field: &DiskField, values: &[f64], flux: &CellFlux, f: &Nonlinearity) -> f64 {
    cell_sum(field, values, |c| {
        let t = c.grad[0].hypot(c.grad[1]);
        flux.density(t) - f.primitive(c.x[0].hypot(c.x[1]), c.u)
    })
}

/// `J(u) = ∫ G(|∇u|) - F(u)` by the midpoint rule on active cells, with
/// the cell gradient of the bilinear interpolant.
pub fn energy_j(field: &DiskField, gop: &GOperator, f: &Nonlinearity) -> f64 {
    energy_of(field, &field.values, &CellFlux { gop, delta: 0.0 }, f)
}

/// `∫ g(|∇u|) |∇u|` on the same cells.
pub fn flux_work(field: &DiskField, gop: &GOperator) -> f64 {
    cell_sum(field, &field.values, |c| {
        let t = c.grad[0].hypot(c.grad[1]);
        gop.flux(t) * t
    })
}

/// Derivative of the discrete energy with respect to every node value,
/// zero at held nodes.
pub(crate) fn energy_gradient(field: &DiskField, values: &[f64], flux: &CellFlux, f: &Nonlinearity) -> Vec<f64> {
    let n = field.n;
    let h = field.h;
    let h2 = h * h;
    // per cell: (k a, k b, f(u)) scaled by h²
    let cells: Vec<[f64; 3]> = (0..(n - 1) * (n - 1))
        .into_par_iter()
        .map(|k| {
            let (i, j) = (k % (n - 1), k / (n - 1));
            if !field.cell_active(i, j) {
                return [0.0; 3];
            }
            let c = cell(field, values, i, j);
            let t = c.grad[0].hypot(c.grad[1]);
            let d = flux.diffusivity(t);
            [
                h2 * d * c.grad[0],
                h2 * d * c.grad[1],
                h2 * f.value(c.x[0].hypot(c.x[1]), c.u),
            ]
        })
        .collect();
    (0..n * n)
        .into_par_iter()
        .map(|k| {
            let (i, j) = (k % n, k / n);
            if !field.is_free(i, j) {
                return 0.0;
            }
            let mut acc = 0.0;
            // (di, dj) is the corner position of this node inside the cell
            for (ci, cj, di, dj) in [
                (i.wrapping_sub(1), j.wrapping_sub(1), 1.0, 1.0),
                (i, j.wrapping_sub(1), 0.0, 1.0),
                (i.wrapping_sub(1), j, 1.0, 0.0),
                (i, j, 0.0, 0.0),
            ] {
                if ci >= n - 1 || cj >= n - 1 {
                    continue;
                }
                let [ka, kb, fv] = cells[cj * (n - 1) + ci];
                let da = (2.0 * di - 1.0) / (2.0 * h);
                let db = (2.0 * dj - 1.0) / (2.0 * h);
                acc += ka * da + kb * db - 0.25 * fv;
            }
            acc
        })
        .collect()
}

/// Diagonal of the energy Hessian at held-free nodes, with the reaction
/// part clipped to `[0, cap]`; used to scale descent steps node by node.
pub(crate) fn energy_diagonal(
    field: &DiskField,
    values: &[f64],
    flux: &CellFlux,
    f: &Nonlinearity,
    cap: f64,
) -> Vec<f64> {
    let n = field.n;
    let h2 = field.h * field.h;
    // per cell: (diffusion part, reaction part) of one corner's diagonal entry
    let cells: Vec<[f64; 2]> = (0..(n - 1) * (n - 1))
        .into_par_iter()
        .map(|k| {
            let (i, j) = (k % (n - 1), k / (n - 1));
            if !field.cell_active(i, j) {
                return [0.0; 2];
            }
            let c = cell(field, values, i, j);
            let t = c.grad[0].hypot(c.grad[1]);
            let s = t.hypot(flux.delta);
            let d = flux
                .diffusivity(t)
                .max(if s > 0.0 { flux.gop.flux_derivative(s) } else { 0.0 });
            [0.5 * d, h2 / 16.0 * (-f.derivative(c.x[0].hypot(c.x[1]), c.u)).max(0.0)]
        })
        .collect();
    (0..n * n)
        .into_par_iter()
        .map(|k| {
            let (i, j) = (k % n, k / n);
            if !field.is_free(i, j) {
                return 1.0;
            }
            let (mut acc, mut react) = (0.0, 0.0);
            for (ci, cj) in [
                (i.wrapping_sub(1), j.wrapping_sub(1)),
                (i, j.wrapping_sub(1)),
                (i.wrapping_sub(1), j),
                (i, j),
            ] {
                if ci >= n - 1 || cj >= n - 1 {
                    continue;
                }
                let [d, r] = cells[cj * (n - 1) + ci];
                acc += d;
                react += r;
            }
            let react = if react.is_finite() {
                react.min(cap * acc)
            } else {
                cap * acc
            };
            (acc + react).max(f64::MIN_POSITIVE)
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FieldResidual {
    pub h: f64,
    pub m: usize,
    pub seed: u64,
    pub max_residual: f64,
    pub mean_residual: f64,
    pub residuals: Vec<f64>,
}

/// Weak residual `|∫ g(|∇u|)/|∇u| ∇u·∇ψ - f(u) ψ| / ‖∇ψ‖` for `m` random
/// probes, with cell-differenced gradients of the field.
pub fn weak_residual_2d(
    field: &DiskField,
    gop: &GOperator,
    f: &Nonlinearity,
    m: usize,
    seed: u64,
) -> Result<FieldResidual> {
    if m == 0 {
        return Err(Error::InvalidParameter("need at least one test function".into()));
    }
    let flux = CellFlux { gop, delta: 0.0 };
    let probes = random_probes(m, seed, field.radius);
    let residuals: Vec<f64> = probes
        .iter()
        .map(|pr| {
            let mut acc = 0.0;
            let norm = cell_sum(field, &field.values, |c| {
                let dp = pr.gradient(c.x);
                dp[0] * dp[0] + dp[1] * dp[1]
            });
            acc += cell_sum(field, &field.values, |c| {
                let dp = pr.gradient(c.x);
                let psi = pr.value(c.x);
                if psi == 0.0 && dp == [0.0, 0.0] {
                    return 0.0;
                }
                let t = c.grad[0].hypot(c.grad[1]);
                flux.diffusivity(t) * (c.grad[0] * dp[0] + c.grad[1] * dp[1]) - f.value(c.x[0].hypot(c.x[1]), c.u) * psi
            });
            acc.abs() / norm.sqrt()
        })
        .collect();
    let max_residual = residuals.iter().cloned().fold(0.0, f64::max);
    let mean_residual = residuals.iter().sum::<f64>() / m as f64;
    Ok(FieldResidual {
        h: field.h,
        m,
        seed,
        max_residual,
        mean_residual,
        residuals,
    })
}
