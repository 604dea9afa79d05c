use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::phi_core::{ExtReal, Phi, Vector};

/// A product grid `lo_k + j·h_k`, `j = 0..per_axis`, last axis fastest.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
    pub per_axis: usize,
}

impl GridSpec {
    /// `[−R, R]^m` with `per_axis` nodes per axis.
    pub fn symmetric(m: usize, radius: f64, per_axis: usize) -> GridSpec {
        GridSpec {
            lo: vec![-radius; m],
            hi: vec![radius; m],
            per_axis,
        }
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    pub fn len(&self) -> usize {
        self.per_axis.pow(self.dim() as u32)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn step(&self, k: usize) -> f64 {
        (self.hi[k] - self.lo[k]) / (self.per_axis - 1) as f64
    }

    pub fn validate(&self) -> Result<()> {
        let m = self.dim();
        if m == 0 || self.hi.len() != m {
            return Err(Error::InvalidParameter("grid needs matching lo/hi of length >= 1".into()));
        }
        if self.per_axis < 2 {
            return Err(Error::InvalidParameter("grid needs >= 2 points per axis".into()));
        }
        for k in 0..m {
            if !(self.lo[k] < self.hi[k]) || !self.lo[k].is_finite() || !self.hi[k].is_finite() {
                return Err(Error::InvalidParameter(format!("grid axis {k} needs finite lo < hi")));
            }
            if self.zero_index(k).is_none() {
                return Err(Error::InvalidParameter(format!("grid axis {k} must have a node at 0")));
            }
        }
        Ok(())
    }

    fn zero_index(&self, k: usize) -> Option<usize> {
        let j = -self.lo[k] / self.step(k);
        let r = j.round();
        ((j - r).abs() < 1e-9 && r >= 0.0 && r <= (self.per_axis - 1) as f64).then_some(r as usize)
    }

    /// Node `j` of axis `k`, with the node at the origin exactly `0`.
    pub fn node(&self, k: usize, j: usize) -> f64 {
        if Some(j) == self.zero_index(k) {
            0.0
        } else if j == self.per_axis - 1 {
            self.hi[k]
        } else {
            self.lo[k] + j as f64 * self.step(k)
        }
    }

    pub fn points(&self) -> Vec<Vector> {
        let m = self.dim();
        let axes: Vec<Vec<f64>> = (0..m)
            .map(|k| (0..self.per_axis).map(|j| self.node(k, j)).collect())
            .collect();
        (0..self.len())
            .map(|mut idx| {
                let mut v = vec![0.0; m];
                for k in (0..m).rev() {
                    v[k] = axes[k][idx % self.per_axis];
                    idx /= self.per_axis;
                }
                Vector(v)
            })
            .collect()
    }

    /// The grid dilated by an integer `factor` about the origin, keeping the
    /// step, so this grid is a subgrid of the result.
    pub fn dilated(&self, factor: usize) -> GridSpec {
        let f = factor as f64;
        GridSpec {
            lo: self.lo.iter().map(|x| x * f).collect(),
            hi: self.hi.iter().map(|x| x * f).collect(),
            per_axis: (self.per_axis - 1) * factor + 1,
        }
    }

    /// Every other node over the same window; `None` if `per_axis` is even.
    pub fn coarsened(&self) -> Option<GridSpec> {
        if self.per_axis % 2 == 0 || self.per_axis < 5 {
            return None;
        }
        let g = GridSpec {
            per_axis: (self.per_axis - 1) / 2 + 1,
            ..self.clone()
        };
        g.validate().ok().map(|_| g)
    }

    pub fn describe(&self) -> String {
        let axes: Vec<String> = (0..self.dim())
            .map(|k| format!("[{}, {}]", self.lo[k], self.hi[k]))
            .collect();
        format!("{} x {}", axes.join(" x "), self.per_axis)
    }
}

/// Values of a Φ-function at a finite set of points.
#[derive(Clone, Debug, PartialEq)]
pub struct GridFunction {
    pub points: Vec<Vector>,
    pub values: Vec<ExtReal>,
}

impl GridFunction {
    /// Requires distinct points of one dimension, including the origin, and
    /// at least one finite value.
    pub fn new(points: Vec<Vector>, values: Vec<ExtReal>) -> Result<GridFunction> {
        if points.len() != values.len() {
            return Err(Error::InvalidParameter(format!(
                "{} points but {} values",
                points.len(),
                values.len()
            )));
        }
        let m = points.first().map_or(0, |p| p.dim());
        if m == 0 || points.iter().any(|p| p.dim() != m) {
            return Err(Error::InvalidParameter("grid points must share a dimension >= 1".into()));
        }
        if !points.iter().any(|p| p.iter().all(|x| *x == 0.0)) {
            return Err(Error::InvalidParameter("grid must contain the origin".into()));
        }
        let mut sorted: Vec<&Vector> = points.iter().collect();
        sorted.sort_by(|a, b| {
            a.iter()
                .zip(b.iter())
                .map(|(x, y)| x.total_cmp(y))
                .find(|o| o.is_ne())
                .unwrap_or(std::cmp::Ordering::Equal)
        });
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidParameter("grid points must be distinct".into()));
        }
        if values.iter().all(|v| v.is_infinite()) {
            return Err(Error::AllInfinite);
        }
        Ok(GridFunction { points, values })
    }

    pub fn sample(phi: &dyn Phi, spec: &GridSpec) -> Result<GridFunction> {
        spec.validate()?;
        if spec.dim() != phi.dim() {
            return Err(Error::DimensionMismatch {
                expected: phi.dim(),
                got: spec.dim(),
            });
        }
        let points = spec.points();
        let values = points.iter().map(|p| phi.value(p)).collect();
        GridFunction::new(points, values)
    }

    pub fn dim(&self) -> usize {
        self.points[0].dim()
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}
