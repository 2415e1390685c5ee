use serde::{Deserialize, Serialize};

use super::energy::{energy_diagonal, energy_gradient, energy_of, CellFlux};
use super::grid::DiskField;
use super::symmetry::{asymmetry_measure, mass_center};
use crate::error::{Error, Result};
use crate::operators::{GOperator, Nonlinearity};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FlowControls {
    /// Smoothing of the flux law at `∇u = 0`; `None` uses
    /// `1e-4 · range / h`.
    pub delta: Option<f64>,
    /// Initial step in units of the inverse Hessian diagonal.
    pub step: f64,
    pub max_steps: usize,
    /// Stop once the relative energy decrease of a step falls below this.
    pub slope_tol: f64,
    /// Backtracking gives up below this step.
    pub min_step: f64,
}

impl Default for FlowControls {
    fn default() -> Self {
        Self {
            delta: None,
            step: 0.5,
            max_steps: 2000,
            slope_tol: 1e-13,
            min_step: 1e-12,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StopReason {
    MaxSteps,
    EnergySlope,
    /// Backtracking reached the minimum step without lowering the energy.
    Stationary,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FlowTrace {
    /// Smoothed energy of the start and of every accepted step.
    pub energy_history: Vec<f64>,
    /// Asymmetry about the mass center, same indexing.
    pub asymmetry_history: Vec<f64>,
    pub final_field: DiskField,
    pub step_count: usize,
    pub stop_reason: StopReason,
    pub delta: f64,
    pub last_step: f64,
}

/// Default smoothing `1e-4 · range / h`.
pub fn default_delta(field: &DiskField) -> f64 {
    let d = 1e-4 * field.range() / field.h;
    if d > 0.0 {
        d
    } else {
        1e-4
    }
}

/// Explicit descent `u ← u - τ D⁻¹ ∇J_δ(u)` on the smoothed discrete
/// energy, with `D` the Hessian diagonal (reaction part clipped at 10³
/// times the diffusion part). A step is accepted only if it lowers the
/// energy; otherwise `τ` is halved. Accepted steps grow `τ` by 10%.
pub fn gradient_flow_minimize(
    field0: &DiskField,
    gop: &GOperator,
    f: &Nonlinearity,
    controls: &FlowControls,
) -> Result<FlowTrace> {
    let delta = controls.delta.unwrap_or_else(|| default_delta(field0));
    if !(delta > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "smoothing must be positive, got {delta}"
        )));
    }
    let mut tau = controls.step;
    if !(tau > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "initial step must be positive, got {tau}"
        )));
    }
    let flux = CellFlux { gop, delta };
    let mut field = field0.clone();
    let mut energy = energy_of(&field, &field.values, &flux, f);
    let asym = |fl: &DiskField| asymmetry_measure(fl, mass_center(fl)).unwrap_or(0.0);
    let mut energy_history = vec![energy];
    let mut asymmetry_history = vec![asym(&field)];
    let mut trial = field.values.clone();
    let mut stop_reason = StopReason::MaxSteps;
    let mut steps = 0;
    while steps < controls.max_steps {
        let grad = energy_gradient(&field, &field.values, &flux, f);
        let diag = energy_diagonal(&field, &field.values, &flux, f, 1e3);
        let accepted = loop {
            for (((t, u), g), d) in trial.iter_mut().zip(&field.values).zip(&grad).zip(&diag) {
                *t = u - tau * g / d;
            }
            let e = energy_of(&field, &trial, &flux, f);
            if e < energy {
                break Some(e);
            }
            tau *= 0.5;
            if tau < controls.min_step {
                break None;
            }
        };
        let Some(e) = accepted else {
            stop_reason = StopReason::Stationary;
            break;
        };
        std::mem::swap(&mut field.values, &mut trial);
        let drop = energy - e;
        energy = e;
        steps += 1;
        energy_history.push(energy);
        asymmetry_history.push(asym(&field));
        tau *= 1.1;
        if drop <= controls.slope_tol * energy.abs().max(f64::MIN_POSITIVE) {
            stop_reason = StopReason::EnergySlope;
            break;
        }
    }
    Ok(FlowTrace {
        energy_history,
        asymmetry_history,
        final_field: field,
        step_count: steps,
        stop_reason,
        delta,
        last_step: tau,
    })
}
