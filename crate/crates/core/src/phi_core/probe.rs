use serde::{Deserialize, Serialize};

use super::vector::Vector;

/// Probe vectors: unit directions times radial levels, plus a grid of
/// convex-combination weights.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProbeSpec {
    /// Number of sphere directions; defaults to 16 for m = 2 and 64 for m = 3.
    #[serde(default)]
    pub directions: Option<usize>,
    /// Radial levels, in increasing order.
    #[serde(default = "default_radii")]
    pub radii: Vec<f64>,
    /// Weights `α ∈ (0, 1)` for convex combinations.
    #[serde(default = "default_alphas")]
    pub alphas: Vec<f64>,
    #[serde(default = "default_tol")]
    pub tol: f64,
}

fn default_radii() -> Vec<f64> {
    geometric_levels(0.25, 4.0, 5)
}

fn default_alphas() -> Vec<f64> {
    vec![0.5, 0.25, 0.75, 0.125, 0.875]
}

fn default_tol() -> f64 {
    1e-9
}

impl Default for ProbeSpec {
    fn default() -> Self {
        ProbeSpec {
            directions: None,
            radii: default_radii(),
            alphas: default_alphas(),
            tol: default_tol(),
        }
    }
}

/// `count` levels in geometric progression from `lo` to `hi`.
pub fn geometric_levels(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    if count <= 1 {
        return vec![lo];
    }
    let ratio = (hi / lo).powf(1.0 / (count - 1) as f64);
    (0..count)
        .map(|k| if k + 1 == count { hi } else { lo * ratio.powi(k as i32) })
        .collect()
}

fn snap(x: f64) -> f64 {
    if x.abs() < 1e-15 {
        0.0
    } else {
        x
    }
}

/// Deterministic unit directions in `ℝ^m`, starting with `e_1, …, e_m`.
pub fn sphere_directions(m: usize, count: Option<usize>) -> Vec<Vector> {
    let mut dirs: Vec<Vector> = (0..m).map(|k| Vector::basis(m, k)).collect();
    let push = |v: Vec<f64>, dirs: &mut Vec<Vector>| {
        let v = Vector(v.into_iter().map(snap).collect());
        if !dirs.iter().any(|d| super::vector::dist(d, &v) < 1e-12) {
            dirs.push(v);
        }
    };
    match m {
        1 => push(vec![-1.0], &mut dirs),
        2 => {
            let n = count.unwrap_or(16);
            for k in 0..n {
                let t = 2.0 * std::f64::consts::PI * k as f64 / n as f64;
                push(vec![t.cos(), t.sin()], &mut dirs);
            }
        }
        3 => {
            let n = count.unwrap_or(64);
            for k in 0..m {
                let mut v = vec![0.0; 3];
                v[k] = -1.0;
                push(v, &mut dirs);
            }
            // Fibonacci sphere
            let golden = std::f64::consts::PI * (3.0 - 5f64.sqrt());
            for k in 0..n {
                let z = 1.0 - 2.0 * (k as f64 + 0.5) / n as f64;
                let r = (1.0 - z * z).sqrt();
                let t = golden * k as f64;
                push(vec![r * t.cos(), r * t.sin(), z], &mut dirs);
            }
        }
        _ => {
            for k in 0..m {
                let mut v = vec![0.0; m];
                v[k] = -1.0;
                push(v, &mut dirs);
            }
            let n = count.unwrap_or(1 << m);
            let s = 1.0 / (m as f64).sqrt();
            for mask in 0..(1usize << m).min(n) {
                push(
                    (0..m).map(|k| if mask >> k & 1 == 1 { -s } else { s }).collect(),
                    &mut dirs,
                );
            }
        }
    }
    dirs
}

impl ProbeSpec {
    pub fn directions(&self, m: usize) -> Vec<Vector> {
        sphere_directions(m, self.directions)
    }

    /// Direction-major list of `r·u` over the radial levels.
    pub fn vectors(&self, m: usize) -> Vec<Vector> {
        let dirs = self.directions(m);
        let mut out = Vec::with_capacity(dirs.len() * self.radii.len());
        for r in &self.radii {
            for u in &dirs {
                out.push(u.scaled(*r));
            }
        }
        out
    }
}
