//! Radial solutions: flux-form integration, Dirichlet shooting, energy,
//! the dilation comparison and the second variation along `U' H_ε`.

mod energy;
mod ivp;
mod profile;
mod variation;

pub use energy::{
    integral_identity_defect, ode_residual, radial_energy, rescaled_profile, rescaling_compare, OdeResidual,
    RescalingReport,
};
pub use ivp::{integrate_radial_ivp, shoot_dirichlet, IvpOptions, ShootResult};
pub use profile::RadialProfile;
pub use variation::{
    cutoff, default_eps_sequence, find_negative_direction, finite_difference, scan_second_variation,
    second_variation_q, second_variation_q_trapezoid, NegativeDirection, ScanRow, VariationScan,
};
