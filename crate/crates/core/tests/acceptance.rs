//! Exit criteria. Prints one PASS/FAIL line per criterion and exits non-zero
//! if any fails.

use std::f64::consts::PI;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use symlab::closedform::{bump_profile, c1_matching_defect, eval_u, eval_v, eval_w, weak_residual_example, BumpParams};
use symlab::field2d::*;
use symlab::operators::*;
use symlab::quad::fit_line;
use symlab::radial::*;
use symlab::Error;

type Outcome = (bool, String);
type Criterion = (&'static str, fn() -> Outcome);

fn ag_table() -> Outcome {
    let start = Instant::now();
    let mut agree = 0;
    let mut misses = Vec::new();
    for p in [1.5, 2.0, 3.0, 4.0] {
        let g = GOperator::power(p).unwrap();
        for dq in [-0.3, 0.0, 0.3] {
            let q = p - 1.0 + dq;
            let v = classify_ag(&g, &GrowthFunction::power(1.0, q).unwrap(), 0.5, &AgControls::default()).unwrap();
            let expected = if q >= p - 1.0 {
                AgStatus::Member
            } else {
                AgStatus::Nonmember
            };
            if v.status == expected {
                agree += 1;
            } else {
                misses.push(format!("p={p} q={q:.1} got {:?}", v.status));
            }
        }
    }
    let secs = start.elapsed().as_secs_f64();
    (
        agree == 12 && secs < 5.0,
        format!("{agree}/12 agree in {secs:.2}s {misses:?}"),
    )
}

fn example_verification() -> Outcome {
    let start = Instant::now();
    // max residual at h = 0.02, 20 probes, seed 7; frozen at twice the measured value
    let cases = [
        (BumpParams::case_i(), 1.6e-4),
        (BumpParams::case_ii(), 4.2e-4),
        (BumpParams::case_iii(), 1.3e-4),
    ];
    let mut ok = true;
    let mut parts = Vec::new();
    for (params, bound) in cases {
        let coarse = weak_residual_example(&params, 0.04, 20, 7).unwrap();
        let fine = weak_residual_example(&params, 0.02, 20, 7).unwrap();
        let ratio = coarse.max_residual / fine.max_residual;
        let m = c1_matching_defect(&params, 1000);
        let good = ratio >= 2.0 && fine.max_residual < bound && m.value <= 1e-10 && m.gradient <= 1e-10;
        ok &= good;
        parts.push(format!(
            "(p={},s={}) ratio {ratio:.2} max {:.2e} < {bound:.1e} C1 {:.1e}",
            params.p,
            params.s,
            fine.max_residual,
            m.value.max(m.gradient)
        ));
    }
    let secs = start.elapsed().as_secs_f64();
    (ok && secs < 60.0, format!("{} in {secs:.1}s", parts.join("; ")))
}

fn torsion(h: f64) -> DiskField {
    sample_field(|x| (1.0 - x[0] * x[0] - x[1] * x[1]) / 4.0, 1.0, h).unwrap()
}

fn pohozaev_torsion() -> Outcome {
    let g = GOperator::power(2.0).unwrap();
    let f = Nonlinearity::constant(1.0);
    let target = -PI / 4.0;
    let hs = [1.0 / 32.0, 1.0 / 64.0, 1.0 / 128.0];
    let reps: Vec<PohozaevReport> = hs
        .iter()
        .map(|&h| pohozaev_residual(&torsion(h), &g, &f, &VectorField::Identity))
        .collect();
    let last = &reps[2];
    let within = (last.lhs - target).abs() <= 0.01 * target.abs() && (last.rhs - target).abs() <= 0.01 * target.abs();
    let fit = fit_line(
        &hs.map(f64::ln),
        &reps.iter().map(|r| r.residual.ln()).collect::<Vec<_>>(),
    );
    (
        within && fit.slope >= 0.9,
        format!(
            "lhs {:.6} rhs {:.6} at h=1/128, residual order {:.2}",
            last.lhs, last.rhs, fit.slope
        ),
    )
}

fn neumann_identity() -> Outcome {
    let (p, s) = (2.0, 3.0);
    let g = GOperator::power(p).unwrap();
    let f = Nonlinearity::new(SourceKind::Bump { p, s, n: 2, base: 0.0 }).unwrap();
    let fld = sample_field_free(|x| eval_w(s, x), 1.5, 1.0 / 128.0).unwrap();
    let work = flux_work(&fld, &g);
    let j = energy_j(&fld, &g, &f);
    let rel = (2.0 * j - work).abs() / work.abs();
    (
        rel <= 0.02,
        format!("N*J {:.6} vs work {work:.6}, relative {rel:.2e}", 2.0 * j),
    )
}

fn second_variation_instability() -> Outcome {
    let start = Instant::now();
    let (p, s) = (3.0, 4.0);
    let prof = RadialProfile::from_fn(2, 0.0, 1.0, 4097, |r| bump_profile(s, r)).unwrap();
    let g = GOperator::power(p).unwrap();
    let f = Nonlinearity::new(SourceKind::Bump { p, s, n: 2, base: 1.0 }).unwrap();
    let eps = default_eps_sequence(&prof);
    let secs;
    match find_negative_direction(&prof, &g, &f, &eps) {
        Ok(found) => {
            secs = start.elapsed().as_secs_f64();
            let rows = &found.scan.rows;
            let monotone = rows.windows(2).all(|w| w[1].q6 < w[0].q6);
            let ok = found.q_star < 0.0 && found.q_check < 0.0 && monotone && secs < 5.0;
            (
                ok,
                format!(
                    "eps* {:.4} Q {:.4} check {:.4}, Q6 monotone {monotone} over {} eps, {secs:.2}s",
                    found.eps_star,
                    found.q_star,
                    found.q_check,
                    rows.len()
                ),
            )
        }
        Err(e) => (false, format!("{e}")),
    }
}

fn stability_control() -> Outcome {
    let g = GOperator::power(2.0).unwrap();
    let f = Nonlinearity::constant(1.0);
    let prof = RadialProfile::from_fn(2, 0.0, 1.0, 2049, |r| ((1.0 - r * r) / 4.0, -r / 2.0)).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut q_min = f64::INFINITY;
    for _ in 0..50 {
        let terms = rng.gen_range(1..=6);
        let coeffs: Vec<f64> = (0..terms).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let mut phi: Vec<f64> = prof
            .r
            .iter()
            .map(|&r| {
                coeffs
                    .iter()
                    .enumerate()
                    .map(|(k, c)| c * (PI * (k + 1) as f64 * r).sin())
                    .sum()
            })
            .collect();
        let last = phi.len() - 1;
        phi[last] = 0.0;
        q_min = q_min.min(second_variation_q(&prof, &g, &f, &phi).unwrap());
    }
    let finder = find_negative_direction(&prof, &g, &f, &default_eps_sequence(&prof));
    let none_found = matches!(finder, Err(Error::Exhausted { .. }));
    (
        q_min > 0.0 && none_found,
        format!("min Q over 50 directions {q_min:.4e}, finder exhausted {none_found}"),
    )
}

fn rescaling_inequality() -> Outcome {
    let g = GOperator::power(2.0).unwrap();
    let f = Nonlinearity::new(SourceKind::Bump {
        p: 2.0,
        s: 2.0,
        n: 3,
        base: 0.0,
    })
    .unwrap();
    let prof = RadialProfile::from_fn(3, 0.0, 1.5, 3001, |r| {
        let (u, du) = bump_profile(2.0, r);
        (u - 1.0, du)
    })
    .unwrap();
    let mut ok = true;
    let mut gaps = Vec::new();
    for eps in [0.05, 0.1, 0.2, 0.4] {
        let rep = rescaling_compare(&prof, &g, &f, eps).unwrap();
        ok &= rep.mon1 && rep.j_rescaled < rep.j_original;
        gaps.push(format!("{:.3e}", rep.gap));
    }
    let flat = RadialProfile::from_fn(3, 0.0, 1.0, 101, |_| (0.3, 0.0)).unwrap();
    let flat_gap = rescaling_compare(&flat, &g, &f, 0.2).unwrap().gap;
    (ok && flat_gap == 0.0, format!("gaps {gaps:?}, flat gap {flat_gap}"))
}

fn flow_probe() -> Outcome {
    let start = Instant::now();
    let h = 0.05;
    let params = BumpParams::case_i();
    let fld = sample_field(|x| eval_u(&params, x).unwrap(), 6.0, h).unwrap();
    let tr = gradient_flow_minimize(&fld, &params.flux(), &params.source(), &FlowControls::default()).unwrap();
    let decreasing = tr.energy_history.windows(2).all(|w| w[1] < w[0]);
    let a0 = tr.asymmetry_history[0];
    let a1 = *tr.asymmetry_history.last().unwrap();

    let radial = sample_field(|x| eval_v(params.s, x) + eval_w(params.s, x), 6.0, h).unwrap();
    let rt = gradient_flow_minimize(&radial, &params.flux(), &params.source(), &FlowControls::default()).unwrap();
    let radial_max = rt.asymmetry_history.iter().cloned().fold(0.0, f64::max);
    let radial_decreasing = rt.energy_history.windows(2).all(|w| w[1] < w[0]);
    let secs = start.elapsed().as_secs_f64();
    (
        decreasing && radial_decreasing && a1 <= 0.5 * a0 && radial_max <= 10.0 * h,
        format!(
            "asymmetry {a0:.4} -> {a1:.4} in {} steps ({:?}), strictly decreasing {decreasing}; radial start max asymmetry {radial_max:.2e} over {} steps; {secs:.0}s",
            tr.step_count, tr.stop_reason, rt.step_count
        ),
    )
}

fn symmetry_detector() -> Outcome {
    let h = 0.03;
    let params = BumpParams::case_i();
    let fld = sample_field(|x| eval_u(&params, x).unwrap(), 6.0, h).unwrap();
    let rep = detect_local_symmetry(&fld, &DetectorControls::default());
    let truths = [params.centers[0], params.centers[1], [0.0, 0.0]];
    let centred = truths.iter().all(|t| {
        rep.regions
            .iter()
            .any(|r| (r.center[0] - t[0]).hypot(r.center[1] - t[1]) <= 2.0 * h)
    });
    // plateau B₅ minus two unit disks, over the area of B₆
    let plateau = 23.0 / 36.0;
    let flat_ok = (rep.flat_fraction - plateau).abs() <= 0.05;
    (
        rep.regions.len() == 3 && centred && flat_ok,
        format!(
            "{} regions, centers matched {centred}, flat fraction {:.4} vs {plateau:.4}",
            rep.regions.len(),
            rep.flat_fraction
        ),
    )
}

fn structural_tables() -> Outcome {
    let technass = [
        ("power p=3", GOperator::power(3.0).unwrap(), true),
        ("power p=1.5", GOperator::power(1.5).unwrap(), true),
        (
            "power sum",
            GOperator::power_sum(&[(1.0, 2.0), (2.0, 3.5)]).unwrap(),
            true,
        ),
        ("minimal surface", GOperator::minimal_surface(), true),
        ("stretched exp a=1", GOperator::stretched_exp(1.0, 1.0).unwrap(), true),
        ("stretched exp a=0.5", GOperator::stretched_exp(2.0, 0.5).unwrap(), true),
        ("stretched exp a=2", GOperator::stretched_exp(1.0, 2.0).unwrap(), false),
    ];
    let mut total = 0;
    let mut agree = 0;
    let mut misses = Vec::new();
    for (name, g, expected) in &technass {
        total += 1;
        if check_technass(g, 1.0).unwrap().holds == *expected {
            agree += 1;
        } else {
            misses.push(name.to_string());
        }
    }
    for p in [1.5, 2.0, 2.5, 3.0, 4.0] {
        for n in 1..=5usize {
            total += 1;
            if check_mon1(&GOperator::power(p).unwrap(), n).unwrap() == (p < n as f64) {
                agree += 1;
            } else {
                misses.push(format!("mon1 p={p} N={n}"));
            }
        }
    }
    (agree == total, format!("{agree}/{total} agree {misses:?}"))
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("class table for power flux", ag_table),
        ("two-bump plateau solution", example_verification),
        ("Pohozaev identity for torsion", pohozaev_torsion),
        ("Neumann identity for a flat bump", neumann_identity),
        ("second-variation instability", second_variation_instability),
        ("stability control for torsion", stability_control),
        ("rescaling inequality", rescaling_inequality),
        ("gradient-flow symmetry breaking", flow_probe),
        ("local symmetry detector", symmetry_detector),
        ("technass and mon1 tables", structural_tables),
    ];
    let mut failed = 0;
    for (k, (name, check)) in criteria.iter().enumerate() {
        let (ok, detail) = check();
        if !ok {
            failed += 1;
        }
        println!("{} {:>2} {name}: {detail}", if ok { "PASS" } else { "FAIL" }, k + 1);
    }
    println!("{}/{} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
