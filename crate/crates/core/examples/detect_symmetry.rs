//! Local-symmetry detector on the two-bump plateau field and on a rotated
//! copy.

use symlab::closedform::{eval_u, BumpParams};
use symlab::field2d::{detect_local_symmetry, sample_field, DetectorControls};

fn main() -> symlab::Result<()> {
    let params = BumpParams::case_i();
    let fld = sample_field(|x| eval_u(&params, x).unwrap(), 6.0, 0.03)?;
    for (label, field) in [("original", fld.clone()), ("rotated", fld.rotate90())] {
        let rep = detect_local_symmetry(&field, &DetectorControls::default());
        println!(
            "{label}: flat {:.4} (closed form {:.4}), covered {:.4}",
            rep.flat_fraction,
            23.0 / 36.0,
            rep.covered_fraction
        );
        for r in &rep.regions {
            println!(
                "  center ({:+.3}, {:+.3})  radii [{:.2}, {:.2}]  fit {:.1e}  nodes {}",
                r.center[0], r.center[1], r.inner_radius, r.outer_radius, r.fit_error, r.nodes
            );
        }
    }
    Ok(())
}
