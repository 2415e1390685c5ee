//! Strong-maximum-principle class of `φ(t) = t^q` for p-Laplace fluxes.

use symlab::operators::{classify_ag, AgControls, GOperator, GrowthFunction};

fn main() -> symlab::Result<()> {
    println!("{:>5} {:>5} {:>12} {:>9}", "p", "q", "status", "exponent");
    for p in [1.5, 2.0, 3.0, 4.0] {
        let g = GOperator::power(p)?;
        for dq in [-0.3, 0.0, 0.3] {
            let q = p - 1.0 + dq;
            let v = classify_ag(&g, &GrowthFunction::power(1.0, q)?, 0.5, &AgControls::default())?;
            println!(
                "{p:>5} {q:>5.1} {:>12} {:>9.4}",
                format!("{:?}", v.status),
                v.estimated_exponent.unwrap_or(f64::NAN)
            );
        }
    }
    let g = GOperator::minimal_surface();
    let v = classify_ag(
        &g,
        &GrowthFunction::ZeroOnInterval { d: 0.1 },
        0.5,
        &AgControls::default(),
    )?;
    println!("minimal surface, phi vanishing near 0: {:?} ({})", v.status, v.reason);
    Ok(())
}
