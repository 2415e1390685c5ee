//! Smooth compactly supported test functions for weak residuals.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

/// Tensor bump `ψ(x) = (1 - ξ²)³ (1 - η²)³` with `ξ = (x - c_x)/ρ`,
/// `η = (y - c_y)/ρ`, zero outside the square of half-width `ρ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProbeFunction {
    pub center: [f64; 2],
    pub radius: f64,
}

impl ProbeFunction {
    pub fn value(&self, x: [f64; 2]) -> f64 {
        let xi = (x[0] - self.center[0]) / self.radius;
        let eta = (x[1] - self.center[1]) / self.radius;
        if xi.abs() >= 1.0 || eta.abs() >= 1.0 {
            return 0.0;
        }
        (1.0 - xi * xi).powi(3) * (1.0 - eta * eta).powi(3)
    }

    pub fn gradient(&self, x: [f64; 2]) -> [f64; 2] {
        let xi = (x[0] - self.center[0]) / self.radius;
        let eta = (x[1] - self.center[1]) / self.radius;
        if xi.abs() >= 1.0 || eta.abs() >= 1.0 {
            return [0.0, 0.0];
        }
        let (a, b) = (1.0 - xi * xi, 1.0 - eta * eta);
        [
            -6.0 * xi / self.radius * a * a * b.powi(3),
            -6.0 * eta / self.radius * b * b * a.powi(3),
        ]
    }

    /// Lattice index range `[lo, hi]` (per axis, in units of `h`) covering the support.
    pub fn support_indices(&self, h: f64) -> ([i64; 2], [i64; 2]) {
        let lo = [
            ((self.center[0] - self.radius) / h).floor() as i64,
            ((self.center[1] - self.radius) / h).floor() as i64,
        ];
        let hi = [
            ((self.center[0] + self.radius) / h).ceil() as i64,
            ((self.center[1] + self.radius) / h).ceil() as i64,
        ];
        (lo, hi)
    }
}

/// `m` probes with support inside the disk of radius `domain_radius`,
/// reproducible from `seed`.
pub fn random_probes(m: usize, seed: u64, domain_radius: f64) -> Vec<ProbeFunction> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..m)
        .map(|_| {
            let radius = rng.gen_range(domain_radius / 12.0..domain_radius / 4.0);
            let room = domain_radius * 0.98 - std::f64::consts::SQRT_2 * radius;
            let r = room * rng.gen::<f64>().sqrt();
            let theta = rng.gen_range(0.0..std::f64::consts::TAU);
            ProbeFunction {
                center: [r * theta.cos(), r * theta.sin()],
                radius,
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gradient_matches_finite_differences() {
        let p = ProbeFunction {
            center: [0.3, -0.2],
            radius: 0.7,
        };
        let x = [0.5, 0.1];
        let g = p.gradient(x);
        let e = 1e-6;
        let gx = (p.value([x[0] + e, x[1]]) - p.value([x[0] - e, x[1]])) / (2.0 * e);
        let gy = (p.value([x[0], x[1] + e]) - p.value([x[0], x[1] - e])) / (2.0 * e);
        assert!((g[0] - gx).abs() < 1e-8 && (g[1] - gy).abs() < 1e-8);
    }

    #[test]
    fn probes_stay_inside_disk_and_are_reproducible() {
        let a = random_probes(50, 7, 6.0);
        assert_eq!(a, random_probes(50, 7, 6.0));
        for p in &a {
            let far = p.center[0].hypot(p.center[1]) + std::f64::consts::SQRT_2 * p.radius;
            assert!(far < 6.0);
        }
    }
}
