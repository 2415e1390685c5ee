//! The two-bump plateau solution on B_6: regularity, matching and residuals.

use symlab::closedform::{c1_matching_defect, classify_regularity, eval_f_example, weak_residual_example, BumpParams};

fn main() -> symlab::Result<()> {
    for params in [BumpParams::case_i(), BumpParams::case_ii(), BumpParams::case_iii()] {
        let class = classify_regularity(params.p, params.s)?;
        let m = c1_matching_defect(&params, 1000);
        println!(
            "p = {}, s = {}: case {:?}, Hölder {:.3}, f(0) = {:.4}, C1 jump {:.1e}",
            params.p,
            params.s,
            class.case,
            class.holder_exponent,
            eval_f_example(&params, 0.0)?,
            m.value.max(m.gradient)
        );
        for h in [0.08, 0.04, 0.02] {
            let r = weak_residual_example(&params, h, 20, 7)?;
            println!(
                "  h = {h:<5} max residual {:.3e}  mean {:.3e}",
                r.max_residual, r.mean_residual
            );
        }
    }
    Ok(())
}
