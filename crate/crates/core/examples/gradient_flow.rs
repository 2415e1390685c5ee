//! Smoothed gradient flow from the two-bump plateau field. The energy drops
//! and the field moves towards radial symmetry.

use symlab::closedform::{eval_u, BumpParams};
use symlab::field2d::{gradient_flow_minimize, sample_field, FlowControls};

fn main() -> symlab::Result<()> {
    let steps: usize = std::env::args().nth(1).and_then(|a| a.parse().ok()).unwrap_or(300);
    let params = BumpParams::case_i();
    let fld = sample_field(|x| eval_u(&params, x).unwrap(), 6.0, 0.1)?;
    let controls = FlowControls {
        max_steps: steps,
        ..Default::default()
    };
    let tr = gradient_flow_minimize(&fld, &params.flux(), &params.source(), &controls)?;
    println!(
        "delta = {:.2e}, stop: {:?} after {} steps",
        tr.delta, tr.stop_reason, tr.step_count
    );
    for k in (0..=tr.step_count).step_by((tr.step_count / 10).max(1)) {
        println!(
            "step {k:>5}  J = {:.6}  asymmetry {:.5}",
            tr.energy_history[k], tr.asymmetry_history[k]
        );
    }
    Ok(())
}
