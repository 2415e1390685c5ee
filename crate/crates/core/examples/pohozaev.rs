//! Pohozaev-type identity for the torsion function under grid refinement,
//! with the dilation field and a translation field.

use symlab::field2d::{pohozaev_residual, sample_field, VectorField};
use symlab::operators::{GOperator, Nonlinearity};

fn main() -> symlab::Result<()> {
    let g = GOperator::power(2.0)?;
    let f = Nonlinearity::constant(1.0);
    let shift = VectorField::custom("e1", |_| ([1.0, 0.0], [[0.0; 2]; 2]));
    println!("target -π/4 = {:.6}", -std::f64::consts::FRAC_PI_4);
    for k in [16, 32, 64, 128] {
        let h = 1.0 / k as f64;
        let fld = sample_field(|x| (1.0 - x[0] * x[0] - x[1] * x[1]) / 4.0, 1.0, h)?;
        let id = pohozaev_residual(&fld, &g, &f, &VectorField::Identity);
        let tr = pohozaev_residual(&fld, &g, &f, &shift);
        println!(
            "h = 1/{k:<4} lhs {:.6} rhs {:.6} residual {:.2e}   translation residual {:.2e}",
            id.lhs, id.rhs, id.residual, tr.residual
        );
    }
    Ok(())
}
