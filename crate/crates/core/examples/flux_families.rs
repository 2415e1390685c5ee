//! Flux laws, their energy density and conjugate, and the structural checks.

use symlab::operators::{check_mon1, check_technass, GOperator};

fn main() -> symlab::Result<()> {
    let families = [
        ("power p=3", GOperator::power(3.0)?),
        ("power sum", GOperator::power_sum(&[(1.0, 2.0), (0.5, 4.0)])?),
        ("minimal surface", GOperator::minimal_surface()),
        ("stretched exp a=1/2", GOperator::stretched_exp(1.0, 0.5)?),
        ("stretched exp a=2", GOperator::stretched_exp(1.0, 2.0)?),
    ];
    for (name, g) in &families {
        let b = check_technass(g, 1.0)?;
        let mon: Vec<bool> = (1..=4).map(|n| check_mon1(g, n)).collect::<symlab::Result<_>>()?;
        println!(
            "{name:<20} g(1) = {:.4}  G(1) = {:.4}  H(1) = {:.4}  H⁻¹(H(1)) = {:.10}  technass {} (Γ ≈ {:.3e})  mon1 N=1..4 {mon:?}",
            g.flux(1.0),
            g.density(1.0),
            g.conjugate(1.0),
            g.invert_conjugate(g.conjugate(1.0), 1e-12)?,
            b.holds,
            b.gamma_estimate
        );
    }
    Ok(())
}
