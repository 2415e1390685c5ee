//! Fields on a square lattice restricted to a disk: energy, weak residuals,
//! Pohozaev-type identities, a smoothed gradient flow and a detector for
//! locally radial structure.

mod energy;
mod flow;
mod grid;
mod pohozaev;
mod symmetry;

pub use energy::{energy_j, flux_work, weak_residual_2d, FieldResidual};
pub use flow::{default_delta, gradient_flow_minimize, FlowControls, FlowTrace, StopReason};
pub use grid::{sample_field, sample_field_free, DiskField, NodeTag};
pub use pohozaev::{pohozaev_residual, PohozaevReport, VectorField, VectorFieldFn};
pub use symmetry::{
    asymmetry_measure, detect_local_symmetry, mass_center, polar_profile, ring_stats, write_polar_csv,
    DetectorControls, PolarRing, SymmetryRegion, SymmetryReport,
};
