//! Negative direction `U' H_ε` of the second variation along a bump profile,
//! and its absence for torsion.

use symlab::closedform::bump_profile;
use symlab::operators::{GOperator, Nonlinearity, SourceKind};
use symlab::radial::{default_eps_sequence, find_negative_direction, RadialProfile};

fn main() -> symlab::Result<()> {
    let (p, s) = (3.0, 4.0);
    let prof = RadialProfile::from_fn(2, 0.0, 1.0, 4097, |r| bump_profile(s, r))?;
    let g = GOperator::power(p)?;
    let f = Nonlinearity::new(SourceKind::Bump { p, s, n: 2, base: 1.0 })?;
    let found = find_negative_direction(&prof, &g, &f, &default_eps_sequence(&prof))?;
    println!("Γ = {:.4} (certified {})", found.scan.gamma, found.scan.gamma_certified);
    println!("{:>10} {:>12} {:>12} {:>12}", "eps", "Q", "Q5", "Q6");
    for row in &found.scan.rows {
        println!("{:>10.5} {:>12.5} {:>12.5} {:>12.5}", row.eps, row.q, row.q5, row.q6);
    }
    println!(
        "first negative at eps = {}: Q = {:.6}, doubled-grid check {:.6}",
        found.eps_star, found.q_star, found.q_check
    );

    let torsion = RadialProfile::from_fn(2, 0.0, 1.0, 2049, |r| ((1.0 - r * r) / 4.0, -r / 2.0))?;
    let lap = GOperator::power(2.0)?;
    match find_negative_direction(
        &torsion,
        &lap,
        &Nonlinearity::constant(1.0),
        &default_eps_sequence(&torsion),
    ) {
        Ok(d) => println!("torsion: unexpected negative direction at eps = {}", d.eps_star),
        Err(e) => println!("torsion: {e}"),
    }
    Ok(())
}
