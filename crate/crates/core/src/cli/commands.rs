use rayon::prelude::*;
use serde_json::{json, Value};

use super::config::{preset, ExperimentConfig};
use crate::closedform::{
    bump_profile, c1_matching_defect, classify_regularity, collar_profile, eval_f_example, eval_u,
    weak_residual_example, BumpParams, RegularityCase,
};
use crate::error::{Error, Result};
use crate::field2d::{
    asymmetry_measure, detect_local_symmetry, gradient_flow_minimize, mass_center, pohozaev_residual, polar_profile,
    sample_field, DetectorControls, DiskField, FlowControls, VectorField,
};
use crate::operators::{
    check_growth_condition, classify_ag, AgControls, AgStatus, GOperator, GrowthCondition, GrowthControls,
    GrowthFunction, SourceKind,
};
use crate::radial::{
    default_eps_sequence, find_negative_direction, ode_residual, radial_energy, rescaling_compare,
    scan_second_variation, shoot_dirichlet, IvpOptions, RadialProfile, VariationScan,
};

/// A CSV file under `data/`.
pub struct Table {
    pub name: String,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    fn new(name: &str, header: &[&str]) -> Self {
        Self {
            name: name.to_string(),
            header: header.iter().map(|h| h.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    fn push<I: IntoIterator<Item = String>>(&mut self, row: I) {
        self.rows.push(row.into_iter().collect());
    }
}

pub struct Outcome {
    pub summary: Value,
    pub tables: Vec<Table>,
    pub fields: Vec<(String, DiskField)>,
}

impl Outcome {
    fn new(summary: Value) -> Self {
        Self {
            summary,
            tables: Vec::new(),
            fields: Vec::new(),
        }
    }
}

fn num(v: f64) -> String {
    format!("{v}")
}

fn opt(v: Option<f64>) -> String {
    v.map(num).unwrap_or_default()
}

fn profile_table(name: &str, profile: &RadialProfile) -> Table {
    let mut t = Table::new(name, &["r", "U", "dU"]);
    for i in 0..profile.len() {
        t.push([num(profile.r[i]), num(profile.u[i]), num(profile.du[i])]);
    }
    t
}

/// Fills physics from `name` when neither a flux law nor a source was given.
fn default_preset(cfg: &mut ExperimentConfig, name: &str) -> Result<()> {
    if cfg.g.is_none() && cfg.f.is_none() && cfg.p.is_none() {
        *cfg = preset(name)?.overlay(cfg.clone());
    }
    Ok(())
}

fn points_for(width: f64, h: f64) -> Result<usize> {
    if !(h > 0.0 && h < width) {
        return Err(Error::InvalidParameter(format!(
            "grid step {h} must lie in (0, {width})"
        )));
    }
    Ok((width / h).round() as usize + 1)
}

pub fn execute(command: &str, cfg: &mut ExperimentConfig) -> Result<Outcome> {
    match command {
        "ag-check" => ag_check(cfg),
        "cond-abc" => cond_abc(cfg),
        "example1" => example1(cfg),
        "shoot" => shoot(cfg),
        "second-variation" => second_variation(cfg),
        "rescale" => rescale(cfg),
        "pohozaev" => pohozaev(cfg),
        "minimize" => minimize(cfg),
        "detect" => detect(cfg),
        other => Err(Error::InvalidParameter(format!("unknown command {other}"))),
    }
}

fn status_name(s: AgStatus) -> &'static str {
    match s {
        AgStatus::Member => "member",
        AgStatus::Nonmember => "nonmember",
        AgStatus::Inconclusive => "inconclusive",
    }
}

type TableRow = (f64, f64, AgStatus, Option<f64>);

fn ag_check(cfg: &mut ExperimentConfig) -> Result<Outcome> {
    let delta = *cfg.delta.get_or_insert(0.5);
    let controls = AgControls::default();
    if let Some(phi) = cfg.phi.clone() {
        let gop = cfg.flux()?;
        let verdict = classify_ag(&gop, &phi, delta, &controls)?;
        let mut table = Table::new("ag_partial_integrals", &["cutoff", "value"]);
        for pi in &verdict.partial_integrals {
            table.push([num(pi.cutoff), num(pi.value)]);
        }
        let mut out = Outcome::new(json!({
            "status": status_name(verdict.status),
            "verdict": verdict,
        }));
        out.tables.push(table);
        return Ok(out);
    }
    // without a growth function: the power-law table, member iff q >= p - 1
    let cases: Vec<(f64, f64)> = [1.5, 2.0, 3.0, 4.0]
        .iter()
        .flat_map(|&p| [-0.3, 0.0, 0.3].map(|d| (p, p - 1.0 + d)))
        .collect();
    let results: Vec<Result<TableRow>> = cases
        .par_iter()
        .map(|&(p, q)| {
            let v = classify_ag(&GOperator::power(p)?, &GrowthFunction::power(1.0, q)?, delta, &controls)?;
            Ok((p, q, v.status, v.estimated_exponent))
        })
        .collect();
    let mut table = Table::new("ag_table", &["p", "q", "status", "exponent", "expected", "agree"]);
    let mut rows = Vec::new();
    let mut agree = 0;
    for r in results {
        let (p, q, status, alpha) = r?;
        let expected = if q >= p - 1.0 - 1e-12 {
            AgStatus::Member
        } else {
            AgStatus::Nonmember
        };
        let ok = status == expected;
        agree += ok as usize;
        table.push([
            num(p),
            num(q),
            status_name(status).into(),
            opt(alpha),
            status_name(expected).into(),
            ok.to_string(),
        ]);
        rows.push(json!({"p": p, "q": q, "status": status_name(status), "exponent": alpha, "expected": status_name(expected)}));
    }
    let mut out = Outcome::new(json!({"agree": agree, "total": rows.len(), "rows": rows}));
    out.tables.push(table);
    Ok(out)
}

fn cond_abc(cfg: &mut ExperimentConfig) -> Result<Outcome> {
    default_preset(cfg, "example1-caseI")?;
    let gop = cfg.flux()?;
    let f = cfg.source()?;
    let radius = *cfg.radius.get_or_insert(1.0);
    let range = *cfg.state_range.get_or_insert([0.0, 2.0]);
    let which: Vec<GrowthCondition> = match cfg.condition {
        Some(c) => vec![c],
        None => vec![GrowthCondition::A, GrowthCondition::B, GrowthCondition::C],
    };
    let controls = GrowthControls::default();
    let mut table = Table::new(
        "zeros",
        &["condition", "rho", "tau", "applicable", "satisfied", "exponent"],
    );
    let mut reports = Vec::new();
    for c in which {
        let rep = check_growth_condition(&f, &gop, c, radius, (range[0], range[1]), &controls)?;
        for z in &rep.zeros {
            table.push([
                format!("{c:?}"),
                num(z.rho),
                num(z.tau),
                z.applicable.to_string(),
                z.satisfied
                    .map(|b| b.to_string())
                    .unwrap_or_else(|| "inconclusive".into()),
                opt(z.exponent),
            ]);
        }
        reports.push(rep);
    }
    let mut out = Outcome::new(json!({ "reports": reports }));
    out.tables.push(table);
    Ok(out)
}

fn example1(cfg: &mut ExperimentConfig) -> Result<Outcome> {
    if cfg.p.is_none() && cfg.s.is_none() {
        default_preset(cfg, "example1-caseI")?;
    }
    let p = *cfg.p.get_or_insert(2.0);
    let s = *cfg.s.get_or_insert(3.0);
    let h = *cfg.h.get_or_insert(0.02);
    let m = *cfg.probes.get_or_insert(40);
    let seed = *cfg.seed.get_or_insert(7);
    let params = BumpParams::new(p, s, BumpParams::case_i().centers)?;
    let class = classify_regularity(p, s)?;
    let label = match class.case {
        RegularityCase::I => "i",
        RegularityCase::II => "ii",
        RegularityCase::III => "iii",
    };
    let matching = c1_matching_defect(&params, 720);
    let coarse = weak_residual_example(&params, 2.0 * h, m, seed)?;
    let fine = weak_residual_example(&params, h, m, seed)?;
    let mut table = Table::new("residuals", &["probe", "residual_2h", "residual_h"]);
    for (k, (a, b)) in coarse.residuals.iter().zip(&fine.residuals).enumerate() {
        table.push([k.to_string(), num(*a), num(*b)]);
    }
    let bump = RadialProfile::from_fn(2, 0.0, 1.0, 201, |r| bump_profile(s, r))?;
    let collar = RadialProfile::from_fn(2, 5.0, 6.0, 201, |r| collar_profile(s, r))?;
    let mut out = Outcome::new(json!({
        "case": label,
        "classification": class,
        "source_at_zero": eval_f_example(&params, 0.0)?,
        "c1_matching": matching,
        "residual": {"h": h, "max": fine.max_residual, "mean": fine.mean_residual},
        "residual_coarse": {"h": 2.0 * h, "max": coarse.max_residual, "mean": coarse.mean_residual},
        "halving_ratio": coarse.max_residual / fine.max_residual,
    }));
    out.tables.push(table);
    out.tables.push(profile_table("bump_profile", &bump));
    out.tables.push(profile_table("collar_profile", &collar));
    Ok(out)
}

fn shoot_profile(cfg: &mut ExperimentConfig) -> Result<(RadialProfile, f64, f64, usize)> {
    let gop = cfg.flux()?;
    let f = cfg.source()?;
    let n = *cfg.n.get_or_insert(2);
    let radius = *cfg.radius.get_or_insert(1.0);
    let tol = *cfg.tol.get_or_insert(1e-10);
    let bracket = *cfg.bracket.get_or_insert([0.0, 10.0]);
    let h = *cfg.h.get_or_insert(radius / 4095.0);
    let opts = IvpOptions {
        points: points_for(radius, h)?,
        r_start: 0.0,
    };
    let res = shoot_dirichlet(&gop, &f, n, radius, (bracket[0], bracket[1]), tol, &opts)?;
    Ok((res.profile, res.center_value, res.boundary_miss, res.iterations))
}

fn shoot(cfg: &mut ExperimentConfig) -> Result<Outcome> {
    default_preset(cfg, "torsion")?;
    let (profile, center, miss, iterations) = shoot_profile(cfg)?;
    let gop = cfg.flux()?;
    let f = cfg.source()?;
    let mut out = Outcome::new(json!({
        "center_value": center,
        "boundary_miss": miss,
        "iterations": iterations,
        "energy": radial_energy(&profile, &gop, &f),
        "ode_residual": ode_residual(&profile, &gop, &f, 2),
        "monotone": profile.monotone,
        "turning_points": profile.turning_points,
    }));
    out.tables.push(profile_table("profile", &profile));
    Ok(out)
}

fn scan_table(scan: &VariationScan) -> Table {
    let mut t = Table::new("scan", &["eps", "q", "q5", "q6", "q6_bound"]);
    for r in &scan.rows {
        t.push([num(r.eps), num(r.q), num(r.q5), num(r.q6), num(r.q6_bound)]);
    }
    t
}

fn second_variation(cfg: &mut ExperimentConfig) -> Result<Outcome> {
    default_preset(cfg, "bump-punctured-ball")?;
    let gop = cfg.flux()?;
    let f = cfg.source()?;
    let profile = match cfg.f.clone() {
        Some(SourceKind::Bump { s, n, base, .. }) => {
            let h = *cfg.h.get_or_insert(1.0 / 4096.0);
            cfg.n = Some(n);
            RadialProfile::from_fn(n, 0.0, 1.0, points_for(1.0, h)?, |r| {
                let (u, du) = bump_profile(s, r);
                (u - 1.0 + base, du)
            })?
        }
        Some(SourceKind::Example1 { s, n, .. }) => {
            let h = *cfg.h.get_or_insert(1.0 / 4096.0);
            cfg.n = Some(n);
            RadialProfile::from_fn(n, 0.0, 1.0, points_for(1.0, h)?, |r| bump_profile(s, r))?
        }
        _ => shoot_profile(cfg)?.0,
    };
    let eps = match (&cfg.eps, cfg.eps_min, cfg.eps_max) {
        (Some(e), _, _) => e.clone(),
        (None, None, None) => default_eps_sequence(&profile),
        (None, lo, hi) => {
            let width = profile.outer_radius() - profile.inner_radius();
            let hi = hi.unwrap_or(0.25 * width);
            let lo = lo.unwrap_or(1e-3 * width);
            if !(lo > 0.0 && hi >= lo) {
                return Err(Error::InvalidParameter(format!(
                    "need 0 < eps-min <= eps-max, got {lo}, {hi}"
                )));
            }
            let mut seq = Vec::new();
            let mut e = hi;
            while e >= lo * (1.0 - 1e-12) {
                seq.push(e);
                e *= 0.5;
            }
            seq
        }
    };
    cfg.eps = Some(eps.clone());
    let out = match find_negative_direction(&profile, &gop, &f, &eps) {
        Ok(found) => {
            let q6: Vec<f64> = found.scan.rows.iter().map(|r| r.q6).collect();
            let mut out = Outcome::new(json!({
                "found": true,
                "eps_star": found.eps_star,
                "q_star": found.q_star,
                "q_check": found.q_check,
                "sign_agrees": (found.q_star < 0.0) == (found.q_check < 0.0),
                "gamma": found.scan.gamma,
                "gamma_certified": found.scan.gamma_certified,
                "q5_limit": found.scan.q5_limit,
                "q6_monotone": q6.windows(2).all(|w| w[1] < w[0]),
            }));
            let mut dir = Table::new("direction", &["r", "phi"]);
            for (r, v) in profile.r.iter().zip(&found.phi_star) {
                dir.push([num(*r), num(*v)]);
            }
            out.tables.push(scan_table(&found.scan));
            out.tables.push(dir);
            out
        }
        Err(Error::Exhausted {
            eps_min,
            eps_max,
            q_min,
        }) => {
            let scan = scan_second_variation(&profile, &gop, &f, &eps)?;
            let mut out = Outcome::new(json!({
                "found": false,
                "eps_min": eps_min,
                "eps_max": eps_max,
                "q_min": q_min,
                "gamma": scan.gamma,
                "q5_limit": scan.q5_limit,
            }));
            out.tables.push(scan_table(&scan));
            out
        }
        Err(e) => return Err(e),
    };
    Ok(out)
}

fn rescale(cfg: &mut ExperimentConfig) -> Result<Outcome> {
    if cfg.g.is_none() && cfg.f.is_none() && cfg.p.is_none() {
        cfg.g = Some(crate::operators::FluxKind::Power { p: 2.0 });
        cfg.f = Some(SourceKind::Bump {
            p: 2.0,
            s: 2.0,
            n: 3,
            base: 0.0,
        });
        cfg.n = Some(3);
    }
    let gop = cfg.flux()?;
    let f = cfg.source()?;
    let profile = match cfg.f.clone() {
        Some(SourceKind::Bump { s, n, base, .. }) => {
            cfg.n = Some(n);
            let radius = *cfg.radius.get_or_insert(1.5);
            if radius < 1.0 {
                return Err(Error::InvalidParameter(format!(
                    "the flat-extended bump needs radius >= 1, got {radius}"
                )));
            }
            let h = *cfg.h.get_or_insert(5e-4);
            RadialProfile::from_fn(n, 0.0, radius, points_for(radius, h)?, |r| {
                let (u, du) = bump_profile(s, r);
                (u - 1.0 + base, du)
            })?
        }
        _ => shoot_profile(cfg)?.0,
    };
    let eps = cfg.eps.get_or_insert_with(|| vec![0.05, 0.1, 0.2, 0.4]).clone();
    let mut table = Table::new("rescale", &["eps", "j_original", "j_rescaled", "gap"]);
    let mut reports = Vec::new();
    for e in eps {
        let rep = rescaling_compare(&profile, &gop, &f, e)?;
        table.push([num(rep.eps), num(rep.j_original), num(rep.j_rescaled), num(rep.gap)]);
        reports.push(rep);
    }
    let mut out = Outcome::new(json!({
        "mon1": reports.first().map(|r| r.mon1),
        "all_lower": reports.iter().all(|r| r.gap < 0.0),
        "reports": reports,
    }));
    out.tables.push(table);
    Ok(out)
}

/// Field for the 2D commands: a CSV file, the closed-form two-bump field,
/// or a radial shooting solution sampled on the grid.
fn grid_field(cfg: &mut ExperimentConfig, default_h: f64) -> Result<DiskField> {
    if let Some(path) = cfg.field.clone() {
        let field = DiskField::read_csv(&path)?;
        cfg.h = Some(field.h);
        cfg.radius = Some(field.radius);
        return Ok(field);
    }
    let h = *cfg.h.get_or_insert(default_h);
    if let Some(SourceKind::Example1 { p, s, .. }) = cfg.f.clone() {
        let params = BumpParams::new(p, s, BumpParams::case_i().centers)?;
        cfg.radius = Some(6.0);
        return sample_field(|x| eval_u(&params, x).expect("lattice inside the disk"), 6.0, h);
    }
    let mut radial_cfg = cfg.clone();
    radial_cfg.n = Some(2);
    radial_cfg.h = None;
    let (profile, ..) = shoot_profile(&mut radial_cfg)?;
    cfg.radius = radial_cfg.radius;
    cfg.n = Some(2);
    sample_field(|x| profile.sample(x[0].hypot(x[1])).0, profile.outer_radius(), h)
}

fn pohozaev(cfg: &mut ExperimentConfig) -> Result<Outcome> {
    default_preset(cfg, "torsion")?;
    let gop = cfg.flux()?;
    let f = cfg.source()?;
    let field = grid_field(cfg, 1.0 / 64.0)?;
    let rep = pohozaev_residual(&field, &gop, &f, &VectorField::Identity);
    let mut polar = Table::new("polar", &["r", "mean", "std"]);
    for ring in polar_profile(&field, [0.0, 0.0]) {
        polar.push([num(ring.r), num(ring.mean), num(ring.std)]);
    }
    let mut out = Outcome::new(json!({
        "lhs": rep.lhs,
        "rhs": rep.rhs,
        "residual": rep.residual,
        "vector_field": "identity",
    }));
    out.tables.push(polar);
    Ok(out)
}

fn minimize(cfg: &mut ExperimentConfig) -> Result<Outcome> {
    default_preset(cfg, "example1-caseI")?;
    let gop = cfg.flux()?;
    let f = cfg.source()?;
    let field = grid_field(cfg, 0.05)?;
    let controls = FlowControls {
        delta: cfg.delta,
        max_steps: *cfg.steps.get_or_insert(2000),
        ..Default::default()
    };
    let trace = gradient_flow_minimize(&field, &gop, &f, &controls)?;
    cfg.delta = Some(trace.delta);
    let mut table = Table::new("trace", &["step", "energy", "asymmetry"]);
    for (k, (e, a)) in trace.energy_history.iter().zip(&trace.asymmetry_history).enumerate() {
        table.push([k.to_string(), num(*e), num(*a)]);
    }
    let a0 = trace.asymmetry_history[0];
    let a1 = *trace.asymmetry_history.last().expect("history holds the start");
    let mut out = Outcome::new(json!({
        "steps": trace.step_count,
        "stop_reason": trace.stop_reason,
        "delta": trace.delta,
        "energy_initial": trace.energy_history[0],
        "energy_final": trace.energy_history.last(),
        "energy_strictly_decreasing": trace.energy_history.windows(2).all(|w| w[1] < w[0]),
        "asymmetry_initial": a0,
        "asymmetry_final": a1,
        "asymmetry_ratio": if a0 > 0.0 { a1 / a0 } else { 0.0 },
        "final_center": mass_center(&trace.final_field),
    }));
    out.tables.push(table);
    out.fields.push(("final_field".into(), trace.final_field));
    Ok(out)
}

fn detect(cfg: &mut ExperimentConfig) -> Result<Outcome> {
    default_preset(cfg, "example1-caseI")?;
    let field = grid_field(cfg, 0.03)?;
    let controls = DetectorControls {
        ring_tol: *cfg.tol.get_or_insert(DetectorControls::default().ring_tol),
        ..Default::default()
    };
    let report = detect_local_symmetry(&field, &controls);
    let mut table = Table::new(
        "regions",
        &[
            "cx",
            "cy",
            "inner_radius",
            "outer_radius",
            "fit_error",
            "inner_ball_ok",
            "nodes",
        ],
    );
    for r in &report.regions {
        table.push([
            num(r.center[0]),
            num(r.center[1]),
            num(r.inner_radius),
            num(r.outer_radius),
            num(r.fit_error),
            r.inner_ball_ok.to_string(),
            r.nodes.to_string(),
        ]);
    }
    let mut out = Outcome::new(json!({
        "report": report,
        "asymmetry_about_origin": asymmetry_measure(&field, [0.0, 0.0])?,
    }));
    out.tables.push(table);
    Ok(out)
}
