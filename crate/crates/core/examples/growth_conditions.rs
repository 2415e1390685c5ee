//! Growth conditions A, B and C at the zeros of the plateau source.

use symlab::operators::{check_growth_condition, GOperator, GrowthCondition, GrowthControls, Nonlinearity, SourceKind};

fn main() -> symlab::Result<()> {
    let g = GOperator::power(2.0)?;
    let f = Nonlinearity::new(SourceKind::Example1 { p: 2.0, s: 3.0, n: 2 })?;
    for which in [GrowthCondition::A, GrowthCondition::B, GrowthCondition::C] {
        let rep = check_growth_condition(&f, &g, which, 6.0, (0.0, 2.0), &GrowthControls::default())?;
        println!("condition {which:?}: satisfied {:?}", rep.satisfied);
        for z in rep.zeros.iter().filter(|z| z.applicable) {
            println!("  tau = {:.4}  exponent {:?}  {}", z.tau, z.exponent, z.note);
        }
    }
    Ok(())
}
