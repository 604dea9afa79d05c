//! Greatest convex minorants on grids, Minkowski gauges of level sets and
//! the gauge minorants `N_s`, `M_s`.

pub mod csv;
pub mod gauge;
pub mod grid;
pub mod hull;
pub mod polar;

use serde::{Deserialize, Serialize};

pub use gauge::{build_minorant_pair, minkowski_gauge, GaugeSet, MinorantPair, Ms, Ns, DEFAULT_GAUGE_TOL};
pub use grid::{GridFunction, GridSpec};
pub use polar::{PolarEnvelope, PolarSpec};
pub use hull::{convex_minorant_eval, convex_minorant_grid, ConvexMinorant, Evaluator, Representation};

use crate::error::{Error, Result};
use crate::phi_core::{ExtReal, Phi};

/// Query grid plus the larger support window the envelope is built on.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnvelopeSpec {
    pub grid: GridSpec,
    /// The support grid is `grid` dilated by this factor about the origin.
    #[serde(default = "default_support_scale")]
    pub support_scale: usize,
    /// Estimate the discretization slack from a half-resolution rebuild.
    #[serde(default = "default_true")]
    pub slack: bool,
}

fn default_support_scale() -> usize {
    2
}

fn default_true() -> bool {
    true
}

impl EnvelopeSpec {
    pub fn new(grid: GridSpec) -> EnvelopeSpec {
        EnvelopeSpec {
            grid,
            support_scale: default_support_scale(),
            slack: true,
        }
    }

    /// Envelope on exactly the query window.
    pub fn strict(grid: GridSpec) -> EnvelopeSpec {
        EnvelopeSpec {
            grid,
            support_scale: 1,
            slack: true,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.grid.validate()?;
        if self.support_scale == 0 {
            return Err(Error::InvalidParameter("support_scale must be >= 1".into()));
        }
        Ok(())
    }

    pub fn support(&self) -> GridSpec {
        self.grid.dilated(self.support_scale)
    }
}

/// The grid envelope of a Φ-function with its bookkeeping.
pub struct Envelope {
    pub spec: EnvelopeSpec,
    /// Query points and the input values there.
    pub input: GridFunction,
    /// Envelope values at the query points.
    pub values: Vec<ExtReal>,
    pub minorant: ConvexMinorant,
    /// Query points whose representation uses the support window boundary.
    pub boundary_hits: usize,
    /// `max(env_coarse − env)` over coarse nodes in the query window, or 0
    /// if disabled.
    pub slack: f64,
}

impl Envelope {
    pub fn build(phi: &dyn Phi, spec: &EnvelopeSpec) -> Result<Envelope> {
        spec.validate()?;
        let support = spec.support();
        let g = GridFunction::sample(phi, &support)?;
        let minorant = ConvexMinorant::new(&g)?;
        let input = GridFunction::sample(phi, &spec.grid)?;
        let mut ev = minorant.evaluator();
        let mut values = Vec::with_capacity(input.len());
        let mut boundary_hits = 0;
        for (p, v) in input.points.iter().zip(&input.values) {
            let r = ev.represent(p);
            if r.on_boundary {
                boundary_hits += 1;
            }
            values.push(hull::cap(r.value, *v));
        }
        let slack = if spec.slack {
            refinement_slack(phi, &support, &minorant, &spec.grid)?
        } else {
            0.0
        };
        Ok(Envelope {
            spec: spec.clone(),
            input,
            values,
            minorant,
            boundary_hits,
            slack,
        })
    }

    pub fn eval(&self, xi: &[f64]) -> ExtReal {
        self.minorant.eval(xi)
    }

    /// Envelope values as a grid function over the query points.
    pub fn as_grid(&self) -> GridFunction {
        GridFunction {
            points: self.input.points.clone(),
            values: self.values.clone(),
        }
    }

    pub fn describe(&self) -> String {
        format!(
            "grid={} support={} support_points={} boundary_hits={} slack={:e} perturbation=none",
            self.spec.grid.describe(),
            self.spec.support().describe(),
            self.minorant.support_len(),
            self.boundary_hits,
            self.slack
        )
    }
}

fn refinement_slack(phi: &dyn Phi, support: &GridSpec, fine: &ConvexMinorant, window: &GridSpec) -> Result<f64> {
    let Some(coarse_spec) = support.coarsened() else {
        return Ok(0.0);
    };
    let coarse_grid = GridFunction::sample(phi, &coarse_spec)?;
    let coarse = match ConvexMinorant::new(&coarse_grid) {
        Ok(c) => c,
        Err(Error::AllInfinite) => return Ok(0.0),
        Err(e) => return Err(e),
    };
    // compare at nodes both supports share: refinement can only lower the
    // hull there, and it cannot for convex input
    let mut slack = 0.0f64;
    let mut ec = coarse.evaluator();
    let mut ef = fine.evaluator();
    for (p, v) in coarse_grid.points.iter().zip(&coarse_grid.values) {
        if v.is_infinite() || !(0..p.len()).all(|k| p[k] >= window.lo[k] && p[k] <= window.hi[k]) {
            continue;
        }
        if let (Some(c), Some(f)) = (ec.eval(p).to_finite(), ef.eval(p).to_finite()) {
            slack = slack.max(c - f);
        }
    }
    Ok(slack)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::phi_core::PhiFunction;

    #[test]
    fn support_window_removes_truncation_for_min_of_quadratics() {
        let phi = PhiFunction::min_of_coordinate_squares(2).unwrap();
        let grid = GridSpec::symmetric(2, 2.0, 17);
        let wide = Envelope::build(&phi, &EnvelopeSpec::new(grid.clone())).unwrap();
        assert!(wide.values.iter().all(|v| v.get() <= 1e-9));
        let strict = Envelope::build(&phi, &EnvelopeSpec::strict(grid)).unwrap();
        assert!(strict.values.iter().any(|v| v.get() > 1.0));
    }

    #[test]
    fn convex_function_has_zero_slack() {
        let phi = PhiFunction::power_norm(2, 2.0).unwrap();
        let env = Envelope::build(&phi, &EnvelopeSpec::new(GridSpec::symmetric(2, 2.0, 9))).unwrap();
        assert!(env.slack < 1e-12);
        assert_eq!(env.values, env.input.values);
    }
}
