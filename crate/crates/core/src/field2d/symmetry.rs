use std::collections::VecDeque;
use std::io::Write;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::grid::DiskField;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PolarRing {
    pub r: f64,
    pub mean: f64,
    pub std: f64,
}

/// Angular samples on a circle of radius `r`: a multiple of four, spaced
/// about `h` apart, so grid rotations permute them.
fn ring_samples(r: f64, h: f64) -> usize {
    4 * ((std::f64::consts::PI * r / (2.0 * h)).ceil() as usize).max(2)
}

/// Mean and standard deviation of the field on one circle; `None` when the
/// circle leaves the disk.
pub fn ring_stats(field: &DiskField, center: [f64; 2], r: f64) -> Option<PolarRing> {
    if r == 0.0 {
        let v = field.interpolate(center)?;
        return Some(PolarRing { r, mean: v, std: 0.0 });
    }
    let m = ring_samples(r, field.h);
    let mut vals = Vec::with_capacity(m);
    for k in 0..m {
        let theta = 2.0 * std::f64::consts::PI * k as f64 / m as f64;
        vals.push(field.interpolate([center[0] + r * theta.cos(), center[1] + r * theta.sin()])?);
    }
    let mean = vals.iter().sum::<f64>() / m as f64;
    let var = vals.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / m as f64;
    Some(PolarRing {
        r,
        mean,
        std: var.sqrt(),
    })
}

/// Rings at radii `h, 2h, …` about `center` until a circle leaves the disk.
pub fn polar_profile(field: &DiskField, center: [f64; 2]) -> Vec<PolarRing> {
    let reach = field.radius - center[0].hypot(center[1]);
    let count = (reach / field.h).floor().max(0.0) as usize;
    let rings: Vec<Option<PolarRing>> = (1..=count)
        .into_par_iter()
        .map(|k| ring_stats(field, center, k as f64 * field.h))
        .collect();
    rings.into_iter().map_while(|r| r).collect()
}

pub fn write_polar_csv(rings: &[PolarRing], path: &Path) -> Result<()> {
    let mut w = std::io::BufWriter::new(std::fs::File::create(path)?);
    writeln!(w, "r,mean,std")?;
    for ring in rings {
        writeln!(w, "{},{},{}", ring.r, ring.mean, ring.std)?;
    }
    w.flush()?;
    Ok(())
}

/// Root-mean-square over polar rings of the angular standard deviation,
/// divided by the field's range.
pub fn asymmetry_measure(field: &DiskField, center: [f64; 2]) -> Result<f64> {
    if center[0].hypot(center[1]) >= field.radius {
        return Err(Error::InvalidParameter(format!(
            "center {center:?} lies outside the disk"
        )));
    }
    let range = field.range();
    if range == 0.0 {
        return Ok(0.0);
    }
    let rings = polar_profile(field, center);
    if rings.is_empty() {
        return Ok(0.0);
    }
    let ms = rings.iter().map(|r| r.std * r.std).sum::<f64>() / rings.len() as f64;
    Ok(ms.sqrt() / range)
}

/// Centroid of `u - min u` over the disk; the reference point for flow
/// asymmetry.
pub fn mass_center(field: &DiskField) -> [f64; 2] {
    let lo = (0..field.values.len())
        .filter(|&k| field.mask[k] != super::grid::NodeTag::Exterior)
        .map(|k| field.values[k])
        .fold(f64::INFINITY, f64::min);
    let (mut w, mut cx, mut cy) = (0.0, 0.0, 0.0);
    for j in 0..field.n {
        for i in 0..field.n {
            if !field.in_domain(i, j) {
                continue;
            }
            let m = field.value(i, j) - lo;
            let [x, y] = field.point(i, j);
            w += m;
            cx += m * x;
            cy += m * y;
        }
    }
    if w > 0.0 {
        [cx / w, cy / w]
    } else {
        [0.0, 0.0]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DetectorControls {
    /// Absolute threshold on `|∇u_h|`; `None` uses `1e-3 max |∇u_h|`.
    pub flat_tol: Option<f64>,
    /// Largest angular standard deviation per ring, relative to the range.
    pub ring_tol: f64,
    /// Components with fewer nodes are left unexplained.
    pub min_nodes: usize,
    pub max_regions: usize,
}

impl Default for DetectorControls {
    fn default() -> Self {
        Self {
            flat_tol: None,
            ring_tol: 0.02,
            min_nodes: 8,
            max_regions: 64,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SymmetryRegion {
    pub center: [f64; 2],
    pub inner_radius: f64,
    pub outer_radius: f64,
    /// Largest relative angular deviation over the accepted rings.
    pub fit_error: f64,
    /// `u >= U(r_k)` on the inner ball.
    pub inner_ball_ok: bool,
    pub nodes: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SymmetryReport {
    pub regions: Vec<SymmetryRegion>,
    pub flat_fraction: f64,
    pub covered_fraction: f64,
    pub residual_fraction: f64,
    pub flat_tol: f64,
    pub ring_tol: f64,
    /// More components than `max_regions` were found.
    pub capped: bool,
}

struct Growth {
    inner: f64,
    outer: f64,
    inner_value: f64,
    fit_error: f64,
}

fn grow(field: &DiskField, center: [f64; 2], r_start: f64, r_stop: f64, tol: f64, range: f64) -> Option<Growth> {
    let h = field.h;
    let slack = 1e-12 * range;
    let mut prev: Option<PolarRing> = None;
    let mut first: Option<PolarRing> = None;
    let mut fit_error: f64 = 0.0;
    let mut rings = 0;
    let mut r = r_start;
    while r <= r_stop + 1e-9 * h {
        let Some(ring) = ring_stats(field, center, r) else {
            break;
        };
        let dev = ring.std / range;
        if dev > tol {
            break;
        }
        if let Some(p) = prev {
            if ring.mean >= p.mean - slack {
                break;
            }
        }
        fit_error = fit_error.max(dev);
        first.get_or_insert(ring);
        prev = Some(ring);
        rings += 1;
        r += h;
    }
    let (first, last) = (first?, prev?);
    (rings >= 2).then_some(Growth {
        inner: first.r,
        outer: last.r,
        inner_value: first.mean,
        fit_error,
    })
}

/// Flat set, connected non-flat components, and for each component the
/// best annulus of radially decreasing behaviour about a candidate center:
/// the centroid of the component's top level band, the component centroid,
/// or its highest node, in that order of preference.
pub fn detect_local_symmetry(field: &DiskField, controls: &DetectorControls) -> SymmetryReport {
    let n = field.n;
    let h = field.h;
    let range = field.range();
    let grads: Vec<f64> = (0..n * n)
        .map(|k| {
            let (i, j) = (k % n, k / n);
            if field.in_domain(i, j) {
                let g = field.node_gradient(i, j);
                g[0].hypot(g[1])
            } else {
                0.0
            }
        })
        .collect();
    let flat_tol = controls
        .flat_tol
        .unwrap_or_else(|| 1e-3 * grads.iter().cloned().fold(0.0, f64::max));
    let domain = field.domain_nodes().max(1);
    let in_domain = |k: usize| field.mask[k] != super::grid::NodeTag::Exterior;
    let flat: Vec<bool> = (0..n * n).map(|k| in_domain(k) && grads[k] <= flat_tol).collect();
    let flat_count = flat.iter().filter(|b| **b).count();

    // 4-connected components of non-flat domain nodes
    let mut label = vec![usize::MAX; n * n];
    let mut components: Vec<Vec<usize>> = Vec::new();
    for start in 0..n * n {
        if !in_domain(start) || flat[start] || label[start] != usize::MAX {
            continue;
        }
        let id = components.len();
        let mut members = Vec::new();
        let mut queue = VecDeque::from([start]);
        label[start] = id;
        while let Some(k) = queue.pop_front() {
            members.push(k);
            let (i, j) = (k % n, k / n);
            let neigh = [
                (i > 0).then(|| k - 1),
                (i + 1 < n).then(|| k + 1),
                (j > 0).then(|| k - n),
                (j + 1 < n).then(|| k + n),
            ];
            for q in neigh.into_iter().flatten() {
                if in_domain(q) && !flat[q] && label[q] == usize::MAX {
                    label[q] = id;
                    queue.push_back(q);
                }
            }
        }
        components.push(members);
    }
    components.sort_by(|a, b| b.len().cmp(&a.len()).then(a[0].cmp(&b[0])));
    let capped = components.iter().filter(|c| c.len() >= controls.min_nodes).count() > controls.max_regions;

    let mut regions = Vec::new();
    let mut covered = 0usize;
    let mut owned = vec![false; n * n];
    for members in components
        .iter()
        .filter(|c| c.len() >= controls.min_nodes)
        .take(controls.max_regions)
    {
        let pts: Vec<[f64; 2]> = members.iter().map(|&k| field.point(k % n, k / n)).collect();
        let centroid = {
            let s = pts.iter().fold([0.0, 0.0], |a, p| [a[0] + p[0], a[1] + p[1]]);
            [s[0] / pts.len() as f64, s[1] / pts.len() as f64]
        };
        let peak = {
            let k = *members
                .iter()
                .max_by(|&&a, &&b| field.values[a].total_cmp(&field.values[b]).then(b.cmp(&a)))
                .expect("non-empty component");
            field.point(k % n, k / n)
        };
        // centroid of the highest level band of the component
        let level_ring = {
            let (lo, hi) = members.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &k| {
                (lo.min(field.values[k]), hi.max(field.values[k]))
            });
            let cut = hi - 0.1 * (hi - lo);
            let (mut sx, mut sy, mut cnt) = (0.0, 0.0, 0usize);
            for (&k, p) in members.iter().zip(&pts) {
                if field.values[k] >= cut {
                    sx += p[0];
                    sy += p[1];
                    cnt += 1;
                }
            }
            [sx / cnt as f64, sy / cnt as f64]
        };
        let mut best: Option<([f64; 2], Growth)> = None;
        for c in [level_ring, centroid, peak] {
            let dists = pts.iter().map(|p| (p[0] - c[0]).hypot(p[1] - c[1]));
            let (dmin, dmax) = dists.fold((f64::INFINITY, 0.0f64), |(lo, hi), d| (lo.min(d), hi.max(d)));
            let r_start = if dmin <= h { 0.0 } else { (dmin / h).floor() * h };
            if let Some(g) = grow(
                field,
                c,
                r_start,
                dmax + h,
                controls.ring_tol,
                range.max(f64::MIN_POSITIVE),
            ) {
                // earlier candidates win unless clearly shorter
                let better = match &best {
                    None => true,
                    Some((_, b)) => g.outer - g.inner > b.outer - b.inner + 2.0 * h,
                };
                if better {
                    best = Some((c, g));
                }
            }
        }
        let Some((center, g)) = best else { continue };
        let (lo, hi) = (g.inner - h, g.outer + h);
        let mut nodes = 0;
        for (&k, p) in members.iter().zip(&pts) {
            let d = (p[0] - center[0]).hypot(p[1] - center[1]);
            if d >= lo && d <= hi && !owned[k] {
                owned[k] = true;
                nodes += 1;
            }
        }
        covered += nodes;
        let tol = controls.ring_tol * range;
        let inner_ball_ok = (0..n * n).filter(|&k| in_domain(k)).all(|k| {
            let p = field.point(k % n, k / n);
            let d = (p[0] - center[0]).hypot(p[1] - center[1]);
            d >= g.inner - h || field.values[k] >= g.inner_value - tol
        });
        regions.push(SymmetryRegion {
            center,
            inner_radius: g.inner,
            outer_radius: g.outer,
            fit_error: g.fit_error,
            inner_ball_ok,
            nodes,
        });
    }
    let flat_fraction = flat_count as f64 / domain as f64;
    let covered_fraction = covered as f64 / domain as f64;
    SymmetryReport {
        regions,
        flat_fraction,
        covered_fraction,
        residual_fraction: (1.0 - flat_fraction - covered_fraction).max(0.0),
        flat_tol,
        ring_tol: controls.ring_tol,
        capped,
    }
}
