//! Radial Dirichlet problems by shooting: torsion in several dimensions and
//! a minimal-surface problem whose flux is bounded.

use symlab::operators::{GOperator, Nonlinearity};
use symlab::radial::{ode_residual, radial_energy, shoot_dirichlet, IvpOptions};

fn main() -> symlab::Result<()> {
    let f = Nonlinearity::constant(1.0);
    let lap = GOperator::power(2.0)?;
    for n in [1, 2, 3] {
        let res = shoot_dirichlet(&lap, &f, n, 1.0, (0.0, 10.0), 1e-10, &IvpOptions::default())?;
        println!(
            "torsion N = {n}: U(0) = {:.10} (exact {:.10}), J = {:.6}, {} bisections",
            res.center_value,
            1.0 / (2.0 * n as f64),
            radial_energy(&res.profile, &lap, &f),
            res.iterations
        );
    }
    let p3 = GOperator::power(3.0)?;
    let res = shoot_dirichlet(&p3, &f, 2, 1.0, (0.0, 10.0), 1e-10, &IvpOptions::default())?;
    let check = ode_residual(&res.profile, &p3, &f, 2);
    println!(
        "3-Laplace torsion N = 2: U(0) = {:.8}, ODE residual {:.2e}",
        res.center_value, check.max_residual
    );

    let ms = GOperator::minimal_surface();
    let half = Nonlinearity::constant(0.5);
    let res = shoot_dirichlet(&ms, &half, 2, 1.0, (0.0, 5.0), 1e-10, &IvpOptions::default())?;
    println!("minimal surface, f = 1/2, N = 2: U(0) = {:.8}", res.center_value);
    match shoot_dirichlet(
        &ms,
        &Nonlinearity::constant(5.0),
        2,
        1.0,
        (0.0, 5.0),
        1e-10,
        &IvpOptions::default(),
    ) {
        Ok(r) => println!("minimal surface, f = 5: U(0) = {}", r.center_value),
        Err(e) => println!("minimal surface, f = 5: {e}"),
    }
    Ok(())
}
