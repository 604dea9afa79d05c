use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use super::grid::GridFunction;
use super::hull::ConvexMinorant;
use crate::error::{Error, Result};
use crate::phi_core::{geometric_levels, sphere_directions, ExtReal, Phi, Vector};

/// A log-polar point set: the origin plus sphere directions times radii in
/// geometric progression. Resolves functions whose relevant scale spans
/// several orders of magnitude.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PolarSpec {
    pub dim: usize,
    /// Sphere directions; defaults to 64 for m = 2 and 128 for m = 3.
    #[serde(default)]
    pub directions: Option<usize>,
    pub r_min: f64,
    pub r_max: f64,
    /// Ratio between consecutive radii.
    #[serde(default = "default_ratio")]
    pub ratio: f64,
}

fn default_ratio() -> f64 {
    1.15
}

impl PolarSpec {
    pub fn new(dim: usize, r_min: f64, r_max: f64) -> PolarSpec {
        PolarSpec {
            dim,
            directions: None,
            r_min,
            r_max,
            ratio: default_ratio(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.dim == 0 {
            return Err(Error::InvalidParameter("polar support needs dim >= 1".into()));
        }
        if !(self.r_min > 0.0 && self.r_min < self.r_max && self.r_max.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "polar support needs 0 < r_min < r_max < inf, got [{}, {}]",
                self.r_min, self.r_max
            )));
        }
        if !(self.ratio > 1.0) {
            return Err(Error::InvalidParameter("polar ratio must exceed 1".into()));
        }
        Ok(())
    }

    fn direction_count(&self) -> Option<usize> {
        self.directions.or(match self.dim {
            2 => Some(64),
            3 => Some(128),
            _ => None,
        })
    }

    pub fn radii(&self) -> Vec<f64> {
        let count = ((self.r_max / self.r_min).ln() / self.ratio.ln()).ceil() as usize + 1;
        geometric_levels(self.r_min, self.r_max, count.max(2))
    }

    /// The point set; `coarse` keeps every other radius and every other
    /// direction, so coarse points are fine points.
    pub fn points(&self, coarse: bool) -> Vec<Vector> {
        let dirs = sphere_directions(self.dim, self.direction_count());
        let radii = self.radii();
        let last = radii.len() - 1;
        let mut pts = vec![Vector::zeros(self.dim)];
        for (j, r) in radii.iter().enumerate() {
            if coarse && j % 2 == 1 && j != last {
                continue;
            }
            for (i, u) in dirs.iter().enumerate() {
                if coarse && self.dim > 1 && i % 2 == 1 {
                    continue;
                }
                pts.push(u.scaled(*r));
            }
        }
        pts
    }

    pub fn describe(&self) -> String {
        format!(
            "polar dirs={} radii={} r=[{:e}, {:e}]",
            sphere_directions(self.dim, self.direction_count()).len(),
            self.radii().len(),
            self.r_min,
            self.r_max
        )
    }
}

fn bits(p: &Vector) -> Vec<u64> {
    p.iter().map(|x| (x + 0.0).to_bits()).collect()
}

/// The envelope over a log-polar support with a relative slack estimate.
pub struct PolarEnvelope {
    pub spec: PolarSpec,
    pub minorant: ConvexMinorant,
    /// `max (env_coarse − env)/max(1, env)` over the coarse support points.
    pub slack_rel: f64,
}

impl PolarEnvelope {
    pub fn build(phi: &dyn Phi, spec: &PolarSpec) -> Result<PolarEnvelope> {
        PolarEnvelope::build_with(phi, spec, &[])
    }

    /// As [`PolarEnvelope::build`] with `extra` points added to both
    /// supports, so the envelope at each of them is at most `phi` there.
    /// The slack is then measured at the extra points only.
    pub fn build_with(phi: &dyn Phi, spec: &PolarSpec, extra: &[Vector]) -> Result<PolarEnvelope> {
        spec.validate()?;
        if phi.dim() != spec.dim || extra.iter().any(|p| p.dim() != spec.dim) {
            return Err(Error::DimensionMismatch {
                expected: phi.dim(),
                got: spec.dim,
            });
        }
        let sample = |mut pts: Vec<Vector>| -> Result<GridFunction> {
            let mut seen: HashSet<Vec<u64>> = pts.iter().map(bits).collect();
            for p in extra {
                if seen.insert(bits(p)) {
                    pts.push(p.clone());
                }
            }
            let values = pts.iter().map(|p| phi.value(p)).collect();
            GridFunction::new(pts, values)
        };
        let fine = sample(spec.points(false))?;
        let minorant = ConvexMinorant::new(&fine)?;
        let coarse_grid = sample(spec.points(true))?;
        let coarse = ConvexMinorant::new(&coarse_grid)?;
        let mut slack_rel = 0.0f64;
        let (mut ec, mut ef) = (coarse.evaluator(), minorant.evaluator());
        let checked: Vec<(Vector, ExtReal)> = if extra.is_empty() {
            coarse_grid.points.iter().cloned().zip(coarse_grid.values.iter().copied()).collect()
        } else {
            extra.iter().map(|p| (p.clone(), phi.value(p))).collect()
        };
        for (p, v) in &checked {
            if v.is_infinite() {
                continue;
            }
            if let (Some(c), Some(f)) = (ec.eval(p).to_finite(), ef.eval(p).to_finite()) {
                slack_rel = slack_rel.max((c - f) / f.max(1.0));
            }
        }
        Ok(PolarEnvelope {
            spec: spec.clone(),
            minorant,
            slack_rel,
        })
    }

    pub fn eval(&self, xi: &[f64]) -> ExtReal {
        self.minorant.eval(xi)
    }

    /// Slack to subtract from an envelope value `env` when a lower bound on
    /// the true minorant is needed.
    pub fn slack_at(&self, env: ExtReal) -> f64 {
        self.slack_rel * env.to_finite().unwrap_or(0.0).max(1.0)
    }

    pub fn describe(&self) -> String {
        format!("{} slack_rel={:e}", self.spec.describe(), self.slack_rel)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::phi_core::PhiFunction;

    #[test]
    fn polar_envelope_of_quadratic_is_accurate_across_scales() {
        let phi = PhiFunction::power_norm(2, 2.0).unwrap();
        let env = PolarEnvelope::build(&phi, &PolarSpec::new(2, 1e-3, 1e3)).unwrap();
        for r in [0.01, 1.0, 300.0] {
            let xi = [r * 0.6, r * 0.8];
            let e = env.eval(&xi).get();
            assert!(e >= r * r * (1.0 - 1e-9), "{r}: {e}");
            assert!(e <= r * r * 1.05 + 1e-5, "{r}: {e}");
        }
        assert!(env.slack_rel < 1e-12, "{}", env.slack_rel);
        assert!(env.eval(&[2e3, 0.0]).is_infinite());
    }

    #[test]
    fn extra_points_are_reproduced_and_dips_give_slack() {
        let phi = PhiFunction::min_of_coordinate_squares(2).unwrap();
        let extra = vec![Vector::from([0.3, 0.7])];
        let env = PolarEnvelope::build_with(&phi, &PolarSpec::new(2, 0.1, 10.0), &extra).unwrap();
        assert!(env.eval(&[0.3, 0.7]).get() <= 0.09 + 1e-12);
        assert!(env.slack_rel >= 0.0);
    }
}
