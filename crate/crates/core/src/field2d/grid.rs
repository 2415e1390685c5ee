use std::io::{BufRead, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NodeTag {
    Interior,
    /// Within `h` of the circle; held at zero unless the field is free.
    Boundary,
    Exterior,
}

/// Scalar field on the square lattice `x = (i - m) h`, `y = (j - m) h`,
/// `0 <= i, j < 2m + 1`, restricted to the closed disk of radius `R`.
/// Values are stored row-major with `j` as the row.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiskField {
    pub radius: f64,
    pub h: f64,
    /// Nodes per side.
    pub n: usize,
    pub values: Vec<f64>,
    pub mask: Vec<NodeTag>,
    /// Boundary nodes keep sampled values (Neumann-type fields).
    pub free_boundary: bool,
}

fn tag_for(x: f64, y: f64, radius: f64, h: f64) -> NodeTag {
    let d = x.hypot(y);
    let slack = 1e-12 * radius;
    if d > radius + slack {
        NodeTag::Exterior
    } else if d > radius - h + slack {
        NodeTag::Boundary
    } else {
        NodeTag::Interior
    }
}

impl DiskField {
    /// All-zero field with the mask for `(R, h)`.
    pub fn zeros(radius: f64, h: f64) -> Result<Self> {
        if !(h > 0.0 && h.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "grid spacing must be positive, got {h}"
            )));
        }
        if !(radius > 2.0 * h && radius.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "radius {radius} must exceed 2h = {}",
                2.0 * h
            )));
        }
        let m = (radius / h).ceil() as usize + 1;
        let n = 2 * m + 1;
        let mut mask = Vec::with_capacity(n * n);
        for j in 0..n {
            for i in 0..n {
                let (x, y) = (Self::coord_of(i, m, h), Self::coord_of(j, m, h));
                mask.push(tag_for(x, y, radius, h));
            }
        }
        Ok(Self {
            radius,
            h,
            n,
            values: vec![0.0; n * n],
            mask,
            free_boundary: false,
        })
    }

    fn coord_of(i: usize, m: usize, h: f64) -> f64 {
        (i as f64 - m as f64) * h
    }

    /// Offset `m` of the lattice origin.
    pub fn half(&self) -> usize {
        (self.n - 1) / 2
    }

    pub fn coord(&self, i: usize) -> f64 {
        Self::coord_of(i, self.half(), self.h)
    }

    pub fn point(&self, i: usize, j: usize) -> [f64; 2] {
        [self.coord(i), self.coord(j)]
    }

    #[inline]
    pub fn index(&self, i: usize, j: usize) -> usize {
        j * self.n + i
    }

    #[inline]
    pub fn value(&self, i: usize, j: usize) -> f64 {
        self.values[self.index(i, j)]
    }

    #[inline]
    pub fn tag(&self, i: usize, j: usize) -> NodeTag {
        self.mask[self.index(i, j)]
    }

    #[inline]
    pub fn in_domain(&self, i: usize, j: usize) -> bool {
        self.tag(i, j) != NodeTag::Exterior
    }

    /// Node is updated by the flow: interior, or boundary of a free field.
    #[inline]
    pub fn is_free(&self, i: usize, j: usize) -> bool {
        match self.tag(i, j) {
            NodeTag::Interior => true,
            NodeTag::Boundary => self.free_boundary,
            NodeTag::Exterior => false,
        }
    }

    pub fn domain_nodes(&self) -> usize {
        self.mask.iter().filter(|t| **t != NodeTag::Exterior).count()
    }

    /// A cell is active when its four corners lie in the closed disk.
    #[inline]
    pub fn cell_active(&self, i: usize, j: usize) -> bool {
        self.in_domain(i, j) && self.in_domain(i + 1, j) && self.in_domain(i, j + 1) && self.in_domain(i + 1, j + 1)
    }

    /// `(max - min)` over domain nodes.
    pub fn range(&self) -> f64 {
        let (lo, hi) = self
            .values
            .iter()
            .zip(&self.mask)
            .filter(|(_, t)| **t != NodeTag::Exterior)
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), (v, _)| {
                (lo.min(*v), hi.max(*v))
            });
        if lo.is_finite() {
            hi - lo
        } else {
            0.0
        }
    }

    /// Grid-exact rotation by 90° counter-clockwise: the new field at `x`
    /// equals the old field at the point rotated back.
    pub fn rotate90(&self) -> Self {
        let n = self.n;
        let mut out = self.clone();
        for j in 0..n {
            for i in 0..n {
                // new(i, j) at (x, y) = old at (y, -x)
                out.values[j * n + i] = self.values[(n - 1 - i) * n + j];
            }
        }
        out
    }

    /// Bilinear interpolation; `None` when a corner lies outside the disk.
    pub fn interpolate(&self, x: [f64; 2]) -> Option<f64> {
        self.interpolate_with(x, |i, j| self.value(i, j))
    }

    pub(crate) fn interpolate_with<F: Fn(usize, usize) -> f64>(&self, x: [f64; 2], node: F) -> Option<f64> {
        let m = self.half() as f64;
        let fx = x[0] / self.h + m;
        let fy = x[1] / self.h + m;
        if !(fx >= 0.0 && fy >= 0.0) {
            return None;
        }
        let i0 = (fx.floor() as usize).min(self.n - 2);
        let j0 = (fy.floor() as usize).min(self.n - 2);
        if !self.cell_active(i0, j0) {
            return None;
        }
        let (sx, sy) = (fx - i0 as f64, fy - j0 as f64);
        if sx > 1.0 + 1e-9 || sy > 1.0 + 1e-9 {
            return None;
        }
        Some(
            (1.0 - sx) * (1.0 - sy) * node(i0, j0)
                + sx * (1.0 - sy) * node(i0 + 1, j0)
                + (1.0 - sx) * sy * node(i0, j0 + 1)
                + sx * sy * node(i0 + 1, j0 + 1),
        )
    }

    /// Centered-difference gradient at a node, one-sided where a neighbour
    /// is outside the disk.
    pub fn node_gradient(&self, i: usize, j: usize) -> [f64; 2] {
        let u = self.value(i, j);
        let axis = |minus: Option<(usize, usize)>, plus: Option<(usize, usize)>| -> f64 {
            let get =
                |p: Option<(usize, usize)>| p.filter(|&(a, b)| self.in_domain(a, b)).map(|(a, b)| self.value(a, b));
            match (get(minus), get(plus)) {
                (Some(a), Some(b)) => (b - a) / (2.0 * self.h),
                (Some(a), None) => (u - a) / self.h,
                (None, Some(b)) => (b - u) / self.h,
                (None, None) => 0.0,
            }
        };
        let n = self.n;
        [
            axis((i > 0).then(|| (i - 1, j)), (i + 1 < n).then(|| (i + 1, j))),
            axis((j > 0).then(|| (i, j - 1)), (j + 1 < n).then(|| (i, j + 1))),
        ]
    }

    /// Field file: a `R,h,nx,ny` header line, its values, then `ny` rows of
    /// `nx` comma-separated values.
    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut w = std::io::BufWriter::new(std::fs::File::create(path)?);
        writeln!(w, "R,h,nx,ny")?;
        writeln!(w, "{},{},{},{}", self.radius, self.h, self.n, self.n)?;
        for j in 0..self.n {
            let row: Vec<String> = (0..self.n).map(|i| format!("{}", self.value(i, j))).collect();
            writeln!(w, "{}", row.join(","))?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn read_csv(path: &Path) -> Result<Self> {
        let file = std::io::BufReader::new(std::fs::File::open(path)?);
        let mut lines = file.lines();
        let bad = |msg: &str| Error::InvalidParameter(format!("{}: {msg}", path.display()));
        let header = lines.next().ok_or_else(|| bad("empty file"))??;
        if header.trim() != "R,h,nx,ny" {
            return Err(bad("expected header R,h,nx,ny"));
        }
        let meta = lines.next().ok_or_else(|| bad("missing grid line"))??;
        let parts: Vec<&str> = meta.trim().split(',').collect();
        if parts.len() != 4 {
            return Err(bad("grid line needs four entries"));
        }
        let radius: f64 = parts[0].parse().map_err(|_| bad("bad R"))?;
        let h: f64 = parts[1].parse().map_err(|_| bad("bad h"))?;
        let nx: usize = parts[2].parse().map_err(|_| bad("bad nx"))?;
        let ny: usize = parts[3].parse().map_err(|_| bad("bad ny"))?;
        let mut field = Self::zeros(radius, h)?;
        if nx != field.n || ny != field.n {
            return Err(bad("lattice size does not match R and h"));
        }
        for j in 0..ny {
            let line = lines.next().ok_or_else(|| bad("missing rows"))??;
            let row: Vec<f64> = line
                .trim()
                .split(',')
                .map(|v| v.parse::<f64>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|_| bad("bad value"))?;
            if row.len() != nx {
                return Err(bad("row length mismatch"));
            }
            for (i, v) in row.into_iter().enumerate() {
                let k = field.index(i, j);
                field.values[k] = v;
                if field.mask[k] == NodeTag::Boundary && v != 0.0 {
                    field.free_boundary = true;
                }
            }
        }
        Ok(field)
    }
}

/// Samples `f` at interior nodes; boundary and exterior nodes stay zero.
pub fn sample_field<F: Fn([f64; 2]) -> f64>(f: F, radius: f64, h: f64) -> Result<DiskField> {
    let mut field = DiskField::zeros(radius, h)?;
    fill(&mut field, &f, false);
    Ok(field)
}

/// Samples `f` at every node of the closed disk, boundary included.
pub fn sample_field_free<F: Fn([f64; 2]) -> f64>(f: F, radius: f64, h: f64) -> Result<DiskField> {
    let mut field = DiskField::zeros(radius, h)?;
    field.free_boundary = true;
    fill(&mut field, &f, true);
    Ok(field)
}

fn fill<F: Fn([f64; 2]) -> f64>(field: &mut DiskField, f: &F, boundary: bool) {
    for j in 0..field.n {
        for i in 0..field.n {
            let k = field.index(i, j);
            let take = match field.mask[k] {
                NodeTag::Interior => true,
                NodeTag::Boundary => boundary,
                NodeTag::Exterior => false,
            };
            if take {
                field.values[k] = f(field.point(i, j));
            }
        }
    }
}
