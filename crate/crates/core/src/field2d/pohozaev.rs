use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::energy::{cell_sum, CellFlux};
use super::grid::DiskField;
use crate::operators::{GOperator, Nonlinearity};

/// Vector field value and Jacobian `J[i][j] = ∂_i h_j`.
pub type VectorFieldFn = dyn Fn([f64; 2]) -> ([f64; 2], [[f64; 2]; 2]) + Send + Sync;

#[derive(Clone)]
pub enum VectorField {
    /// `h(x) = x`.
    Identity,
    Custom {
        name: String,
        eval: Arc<VectorFieldFn>,
    },
}

impl fmt::Debug for VectorField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            VectorField::Identity => write!(f, "Identity"),
            VectorField::Custom { name, .. } => write!(f, "Custom({name})"),
        }
    }
}

impl VectorField {
    pub fn custom<F>(name: &str, eval: F) -> Self
    where
        F: Fn([f64; 2]) -> ([f64; 2], [[f64; 2]; 2]) + Send + Sync + 'static,
    {
        VectorField::Custom {
            name: name.to_string(),
            eval: Arc::new(eval),
        }
    }

    pub fn eval(&self, x: [f64; 2]) -> ([f64; 2], [[f64; 2]; 2]) {
        match self {
            VectorField::Identity => (x, [[1.0, 0.0], [0.0, 1.0]]),
            VectorField::Custom { eval, .. } => eval(x),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PohozaevReport {
    pub lhs: f64,
    pub rhs: f64,
    pub residual: f64,
}

/// Boundary and volume sides of the Pohozaev-type identity
///
/// `∮ (G(|∇u|) - g(|∇u|)|∇u|)(h·ν) dS
///   = ∫ (G - F) div h - Σ ∂ᵢhⱼ uⱼ uᵢ g(|∇u|)/|∇u| dx`.
///
/// The boundary gradient is extrapolated quadratically from circles at
/// depths `4h, 5h, 6h`, whose interpolation stencils avoid the held ring.
pub fn pohozaev_residual(field: &DiskField, gop: &GOperator, f: &Nonlinearity, hfield: &VectorField) -> PohozaevReport {
    let radius = field.radius;
    let h = field.h;
    let n = field.n;
    let grads: Vec<[f64; 2]> = (0..n * n)
        .map(|k| {
            let (i, j) = (k % n, k / n);
            if field.in_domain(i, j) {
                field.node_gradient(i, j)
            } else {
                [0.0, 0.0]
            }
        })
        .collect();
    let comp = |x: [f64; 2], c: usize| field.interpolate_with(x, |i, j| grads[j * n + i][c]).unwrap_or(0.0);
    let samples = (4.0 * (std::f64::consts::PI * radius / (2.0 * h)).ceil()).max(64.0) as usize;
    let weights = [(4.0, 15.0), (5.0, -24.0), (6.0, 10.0)];
    let mut lhs = 0.0;
    for k in 0..samples {
        let theta = 2.0 * std::f64::consts::PI * k as f64 / samples as f64;
        let nu = [theta.cos(), theta.sin()];
        let mut grad = [0.0, 0.0];
        for (depth, w) in weights {
            let rho = radius - depth * h;
            let x = [rho * nu[0], rho * nu[1]];
            grad[0] += w * comp(x, 0);
            grad[1] += w * comp(x, 1);
        }
        let t = grad[0].hypot(grad[1]);
        let (hv, _) = hfield.eval([radius * nu[0], radius * nu[1]]);
        lhs += (gop.density(t) - gop.flux(t) * t) * (hv[0] * nu[0] + hv[1] * nu[1]);
    }
    lhs *= 2.0 * std::f64::consts::PI * radius / samples as f64;
    let flux = CellFlux { gop, delta: 0.0 };
    let rhs = cell_sum(field, &field.values, |c| {
        let (_, jac) = hfield.eval(c.x);
        let t = c.grad[0].hypot(c.grad[1]);
        let div = jac[0][0] + jac[1][1];
        let mut shear = 0.0;
        for (i, row) in jac.iter().enumerate() {
            for (j, dh) in row.iter().enumerate() {
                shear += dh * c.grad[j] * c.grad[i];
            }
        }
        (gop.density(t) - f.primitive(c.x[0].hypot(c.x[1]), c.u)) * div - shear * flux.diffusivity(t)
    });
    PohozaevReport {
        lhs,
        rhs,
        residual: (lhs - rhs).abs(),
    }
}
