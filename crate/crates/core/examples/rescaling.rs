//! Energy of the dilations `u((1+ε)x)` of a flat-extended bump in three
//! dimensions, where `g(t) t^{1-N}` is decreasing.

use symlab::closedform::bump_profile;
use symlab::operators::{GOperator, Nonlinearity, SourceKind};
use symlab::radial::{rescaling_compare, RadialProfile};

fn main() -> symlab::Result<()> {
    let g = GOperator::power(2.0)?;
    let f = Nonlinearity::new(SourceKind::Bump {
        p: 2.0,
        s: 2.0,
        n: 3,
        base: 0.0,
    })?;
    let prof = RadialProfile::from_fn(3, 0.0, 1.5, 3001, |r| {
        let (u, du) = bump_profile(2.0, r);
        (u - 1.0, du)
    })?;
    for eps in [0.05, 0.1, 0.2, 0.4] {
        let rep = rescaling_compare(&prof, &g, &f, eps)?;
        println!(
            "eps = {eps:<4}  J(u) = {:.6}  J(u_eps) = {:.6}  gap {:+.3e}  mon1 {}",
            rep.j_original, rep.j_rescaled, rep.gap, rep.mon1
        );
    }
    Ok(())
}
