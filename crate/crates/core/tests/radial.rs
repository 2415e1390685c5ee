use approx::assert_relative_eq;
use proptest::prelude::*;
use symlab::closedform::{bump_profile, collar_profile};
use symlab::operators::{GOperator, Nonlinearity, SourceKind};
use symlab::radial::*;
use symlab::Error;

fn laplacian() -> GOperator {
    GOperator::power(2.0).unwrap()
}

fn torsion_profile(n: usize, radius: f64, points: usize) -> RadialProfile {
    let nf = n as f64;
    RadialProfile::from_fn(n, 0.0, radius, points, |r| {
        ((radius * radius - r * r) / (2.0 * nf), -r / nf)
    })
    .unwrap()
}

fn bump_source(p: f64, s: f64, n: usize, base: f64) -> Nonlinearity {
    Nonlinearity::new(SourceKind::Bump { p, s, n, base }).unwrap()
}

#[test]
fn torsion_center_values_from_shooting() {
    let f = Nonlinearity::constant(1.0);
    for n in [1usize, 2, 3] {
        for radius in [0.5, 1.0, 2.0] {
            let res = shoot_dirichlet(&laplacian(), &f, n, radius, (0.0, 4.0), 1e-10, &IvpOptions::default()).unwrap();
            let exact = radius * radius / (2.0 * n as f64);
            assert!(
                (res.center_value - exact).abs() < 1e-8,
                "N={n} R={radius}: {} vs {exact}",
                res.center_value
            );
            assert!(res.boundary_miss <= 1e-10);
            assert!(res.profile.monotone);
        }
    }
}

#[test]
fn torsion_ivp_reproduces_closed_form() {
    let f = Nonlinearity::constant(1.0);
    let p = integrate_radial_ivp(&laplacian(), &f, 2, 0.25, 1.0, &IvpOptions::default()).unwrap();
    for i in (0..p.len()).step_by(97) {
        let r = p.r[i];
        assert!((p.u[i] - (1.0 - r * r) / 4.0).abs() < 1e-12);
        assert!((p.du[i] + r / 2.0).abs() < 1e-12);
    }
}

#[test]
fn p_laplace_slope_matches_flux_identity() {
    // -U'(r) = (r/N)^{1/(p-1)} for f = 1
    let f = Nonlinearity::constant(1.0);
    for p in [1.5, 3.0] {
        for n in [2usize, 3] {
            let g = GOperator::power(p).unwrap();
            let prof = integrate_radial_ivp(&g, &f, n, 5.0, 1.0, &IvpOptions::default()).unwrap();
            for i in (1..prof.len()).step_by(211) {
                let r = prof.r[i];
                let exact = (r / n as f64).powf(1.0 / (p - 1.0));
                assert_relative_eq!(-prof.du[i], exact, max_relative = 1e-9);
            }
            assert!(integral_identity_defect(&prof, &g, &f).unwrap() < 1e-6);
        }
    }
}

#[test]
fn zero_source_keeps_constant_state() {
    let f = Nonlinearity::zero();
    let p = integrate_radial_ivp(&GOperator::power(3.0).unwrap(), &f, 2, 1.0, 1.0, &IvpOptions::default()).unwrap();
    assert!(p.u.iter().all(|u| *u == 1.0));
    assert!(p.du.iter().all(|d| *d == 0.0));
    let shot = shoot_dirichlet(&laplacian(), &f, 2, 1.0, (0.0, 1.0), 1e-10, &IvpOptions::default()).unwrap();
    assert_eq!(shot.center_value, 0.0);
    assert!(shot.profile.u.iter().all(|u| *u == 0.0));
    let res = ode_residual(&p, &GOperator::power(3.0).unwrap(), &f, 2);
    assert_eq!(res.max_residual, 0.0);
}

#[test]
fn crossing_zero_is_reported_with_radius() {
    let f = Nonlinearity::constant(1.0);
    match integrate_radial_ivp(&laplacian(), &f, 2, 0.1, 1.0, &IvpOptions::default()) {
        Err(Error::NegativeState { radius }) => {
            // (R^2 - r^2)/4 = 0.1 - r^2/4 crosses at r = sqrt(0.4)
            assert!((radius - 0.4f64.sqrt()).abs() < 1e-6);
        }
        other => panic!("expected a negative-state error, got {other:?}"),
    }
}

#[test]
fn bounded_flux_reports_range_failure() {
    let f = Nonlinearity::constant(10.0);
    let err = integrate_radial_ivp(&GOperator::minimal_surface(), &f, 2, 1.0, 1.0, &IvpOptions::default()).unwrap_err();
    assert!(matches!(err, Error::FluxOutOfRange { .. }), "{err:?}");
}

#[test]
fn no_sign_change_is_an_error() {
    let f = Nonlinearity::constant(1.0);
    let err = shoot_dirichlet(&laplacian(), &f, 2, 1.0, (1.0, 2.0), 1e-10, &IvpOptions::default()).unwrap_err();
    assert!(matches!(err, Error::NoSignChange { .. }));
}

#[test]
fn bump_profile_satisfies_integral_identity_under_refinement() {
    let (p, s) = (3.0, 4.0);
    let g = GOperator::power(p).unwrap();
    let f = bump_source(p, s, 2, 1.0);
    let defects: Vec<f64> = [256usize, 512, 1024]
        .iter()
        .map(|&m| {
            let prof = RadialProfile::from_fn(2, 0.0, 1.0, m + 1, |r| bump_profile(s, r)).unwrap();
            integral_identity_defect(&prof, &g, &f).unwrap()
        })
        .collect();
    assert!(
        defects[1] < 0.5 * defects[0] && defects[2] < 0.5 * defects[1],
        "{defects:?}"
    );
    assert!(defects[2] < 1e-4);
}

#[test]
fn collar_profile_ode_residual_vanishes_under_refinement() {
    for (p, s) in [(2.0, 3.0), (3.0, 2.0), (3.0, 4.0)] {
        let g = GOperator::power(p).unwrap();
        let f = Nonlinearity::new(SourceKind::Example1 { p, s, n: 2 }).unwrap();
        let res: Vec<f64> = [200usize, 400, 800]
            .iter()
            .map(|&m| {
                let prof = RadialProfile::from_fn(2, 5.0, 6.0, m + 1, |r| collar_profile(s, r)).unwrap();
                ode_residual(&prof, &g, &f, 2).max_residual
            })
            .collect();
        assert!(res[2] < res[0], "p={p} s={s}: {res:?}");
        assert!(res[2] < 1e-2, "p={p} s={s}: {res:?}");
    }
}

#[test]
fn torsion_ode_residual_is_small() {
    let prof = torsion_profile(2, 1.0, 257);
    let res = ode_residual(&prof, &laplacian(), &Nonlinearity::constant(1.0), 2);
    assert!(res.max_residual < 1e-10);
    assert!(res.points_excluded >= 1);
}

#[test]
fn torsion_energy() {
    let prof = torsion_profile(2, 1.0, 129);
    let j = radial_energy(&prof, &laplacian(), &Nonlinearity::constant(1.0));
    assert_relative_eq!(j, -std::f64::consts::PI / 16.0, max_relative = 1e-12);
    let zero = RadialProfile::from_fn(2, 0.0, 1.0, 65, |_| (0.0, 0.0)).unwrap();
    assert_eq!(radial_energy(&zero, &laplacian(), &Nonlinearity::constant(1.0)), 0.0);
}

#[test]
fn energy_is_additive_over_pieces() {
    let f = Nonlinearity::constant(1.0);
    let whole = torsion_profile(3, 1.0, 201);
    let inner = RadialProfile::from_fn(3, 0.0, 0.5, 101, |r| ((1.0 - r * r) / 6.0, -r / 3.0)).unwrap();
    let outer = RadialProfile::from_fn(3, 0.5, 1.0, 101, |r| ((1.0 - r * r) / 6.0, -r / 3.0)).unwrap();
    let total = radial_energy(&whole, &laplacian(), &f);
    let parts = radial_energy(&inner, &laplacian(), &f) + radial_energy(&outer, &laplacian(), &f);
    assert_relative_eq!(total, parts, max_relative = 1e-12);
}

fn flat_extended_bump(points: usize) -> RadialProfile {
    RadialProfile::from_fn(3, 0.0, 1.5, points, |r| {
        if r < 1.0 {
            let z = 1.0 - r * r;
            (z * z, -4.0 * r * z)
        } else {
            (0.0, 0.0)
        }
    })
    .unwrap()
}

#[test]
fn rescaling_lowers_energy_of_flat_extended_bump() {
    let g = laplacian();
    let f = bump_source(2.0, 2.0, 3, 0.0);
    let prof = flat_extended_bump(3001);
    let mut last = 0.0;
    for eps in [0.05, 0.1, 0.2, 0.3, 0.4, 0.5] {
        let rep = rescaling_compare(&prof, &g, &f, eps).unwrap();
        assert!(rep.mon1);
        assert!(rep.gap < 0.0, "eps={eps}: {rep:?}");
        assert!(rep.gap < last, "gap not monotone at eps={eps}");
        last = rep.gap;
        // the direct energy of the dilated profile agrees with the substitution
        let direct = radial_energy(&rescaled_profile(&prof, eps).unwrap(), &g, &f);
        assert!(
            (direct - rep.j_rescaled).abs() < 1e-4 * rep.j_original.abs(),
            "{direct} vs {}",
            rep.j_rescaled
        );
    }
}

#[test]
fn rescaling_flat_profile_has_zero_gap() {
    let prof = RadialProfile::from_fn(3, 0.0, 1.0, 101, |_| (0.3, 0.0)).unwrap();
    let rep = rescaling_compare(&prof, &laplacian(), &bump_source(2.0, 2.0, 3, 0.0), 0.2).unwrap();
    assert_eq!(rep.gap, 0.0);
}

#[test]
fn rescaling_rejects_sloped_end() {
    let prof = torsion_profile(3, 1.0, 101);
    assert!(matches!(
        rescaling_compare(&prof, &laplacian(), &Nonlinearity::constant(1.0), 0.1),
        Err(Error::Precondition(_))
    ));
}

fn example_bump(points: usize) -> (RadialProfile, GOperator, Nonlinearity) {
    let (p, s) = (3.0, 4.0);
    (
        RadialProfile::from_fn(2, 0.0, 1.0, points, |r| bump_profile(s, r)).unwrap(),
        GOperator::power(p).unwrap(),
        bump_source(p, s, 2, 1.0),
    )
}

#[test]
fn bump_profile_has_negative_direction() {
    let (prof, g, f) = example_bump(4097);
    let eps = default_eps_sequence(&prof);
    let found = find_negative_direction(&prof, &g, &f, &eps).unwrap();
    assert!(found.q_star < 0.0);
    assert!(found.q_check < 0.0);
    let rows = &found.scan.rows;
    for w in rows.windows(2) {
        assert!(w[1].q6 < w[0].q6, "q6 must shrink with eps: {rows:?}");
        assert!(w[1].q6_bound < w[0].q6_bound);
    }
    assert!(found.scan.q5_limit < 0.0);
    let last = &rows[rows.len() - 1];
    assert!((last.q5 - found.scan.q5_limit).abs() < 0.05 * found.scan.q5_limit.abs());
}

#[test]
fn torsion_profile_has_no_negative_direction() {
    let prof = torsion_profile(2, 1.0, 2049);
    let eps = default_eps_sequence(&prof);
    let err = find_negative_direction(&prof, &laplacian(), &Nonlinearity::constant(1.0), &eps).unwrap_err();
    assert!(matches!(err, Error::Exhausted { .. }));
}

#[test]
fn second_variation_rejects_nonvanishing_ends() {
    let (prof, g, f) = example_bump(101);
    let phi = vec![1.0; prof.len()];
    assert!(matches!(
        second_variation_q(&prof, &g, &f, &phi),
        Err(Error::Precondition(_))
    ));
    let zero = vec![0.0; prof.len()];
    assert_eq!(second_variation_q(&prof, &g, &f, &zero).unwrap(), 0.0);
}

#[test]
fn second_variation_agrees_with_doubled_trapezoid() {
    let (prof, g, f) = example_bump(4097);
    let a = prof.inner_radius();
    let b = prof.outer_radius();
    let phi: Vec<f64> = prof
        .r
        .iter()
        .zip(&prof.du)
        .map(|(&r, &d)| d * cutoff(r, a, b, 0.1).0)
        .collect();
    let q = second_variation_q(&prof, &g, &f, &phi).unwrap();
    let fine = prof.refine();
    let phi2: Vec<f64> = fine
        .r
        .iter()
        .zip(&fine.du)
        .map(|(&r, &d)| d * cutoff(r, a, b, 0.1).0)
        .collect();
    let q2 = second_variation_q_trapezoid(&fine, &g, &f, &phi2).unwrap();
    assert!((q - q2).abs() < 0.01 * q.abs(), "{q} vs {q2}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn second_variation_is_quadratic(c in -5.0f64..5.0, k in 1usize..4) {
        let (prof, g, f) = example_bump(513);
        let phi: Vec<f64> = prof.r.iter().map(|r| (std::f64::consts::PI * k as f64 * r).sin() * r).collect();
        let mut phi = phi;
        let last = phi.len() - 1;
        phi[last] = 0.0;
        let scaled: Vec<f64> = phi.iter().map(|v| c * v).collect();
        let q = second_variation_q(&prof, &g, &f, &phi).unwrap();
        let qc = second_variation_q(&prof, &g, &f, &scaled).unwrap();
        prop_assert!((qc - c * c * q).abs() <= 1e-9 * (1.0 + (c * c * q).abs()));
    }

    #[test]
    fn torsion_second_variation_is_positive(coeffs in proptest::collection::vec(-1.0f64..1.0, 1..6)) {
        prop_assume!(coeffs.iter().any(|c| c.abs() > 1e-3));
        let prof = torsion_profile(2, 1.0, 513);
        let phi: Vec<f64> = prof
            .r
            .iter()
            .map(|&r| coeffs.iter().enumerate().map(|(k, c)| c * (std::f64::consts::PI * (k + 1) as f64 * r).sin()).sum())
            .collect();
        let mut phi = phi;
        let last = phi.len() - 1;
        phi[last] = 0.0;
        let q = second_variation_q(&prof, &laplacian(), &Nonlinearity::constant(1.0), &phi).unwrap();
        prop_assert!(q > 0.0);
    }
}
