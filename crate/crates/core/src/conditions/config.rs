use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::phi_core::{geometric_levels, Ball, ProbeSpec, SamplerSpec, SpatialPhiFunction};

/// Resolution of the per-ball log-polar envelopes used by (M)-type checks.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LocalEnvelopeSpec {
    /// Sphere directions of the support; defaults to 64 (m = 2), 128 (m = 3).
    #[serde(default)]
    pub directions: Option<usize>,
    #[serde(default = "default_ratio")]
    pub ratio: f64,
}

fn default_ratio() -> f64 {
    1.15
}

impl Default for LocalEnvelopeSpec {
    fn default() -> Self {
        LocalEnvelopeSpec {
            directions: None,
            ratio: default_ratio(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConditionConfig {
    #[serde(default = "default_k")]
    pub k: f64,
    /// Candidate β values, strictly decreasing in (0, 1].
    #[serde(default = "default_beta_grid")]
    pub beta_grid: Vec<f64>,
    /// Gauge function Ψ of (A1-Ψ), (M-Ψ); `None` means Ψ = Φ.
    #[serde(default)]
    pub psi: Option<SpatialPhiFunction>,
    #[serde(default)]
    pub balls: Vec<Ball>,
    #[serde(default)]
    pub probe: ProbeSpec,
    #[serde(default)]
    pub sampler: SamplerSpec,
    #[serde(default = "default_tol")]
    pub tol: f64,
    /// Number of radial probe levels on `[β₀/4, 4/β₀]` for ball checks.
    #[serde(default = "default_radial_levels")]
    pub radial_levels: usize,
    /// (A0) constant; found with `check_a0` when absent.
    #[serde(default)]
    pub beta0: Option<f64>,
    #[serde(default)]
    pub envelope: LocalEnvelopeSpec,
}

fn default_k() -> f64 {
    1.0
}

fn default_tol() -> f64 {
    1e-9
}

fn default_radial_levels() -> usize {
    9
}

/// `1, 1/2, …, 2^-19`.
pub fn default_beta_grid() -> Vec<f64> {
    (0..20).map(|j| 0.5f64.powi(j)).collect()
}

impl Default for ConditionConfig {
    fn default() -> Self {
        ConditionConfig {
            k: default_k(),
            beta_grid: default_beta_grid(),
            psi: None,
            balls: vec![],
            probe: ProbeSpec::default(),
            sampler: SamplerSpec::default(),
            tol: default_tol(),
            radial_levels: default_radial_levels(),
            beta0: None,
            envelope: LocalEnvelopeSpec::default(),
        }
    }
}

impl ConditionConfig {
    pub fn with_balls(balls: Vec<Ball>) -> ConditionConfig {
        ConditionConfig {
            balls,
            ..ConditionConfig::default()
        }
    }

    /// Checks parameters that do not depend on Φ.
    pub fn validate_params(&self) -> Result<()> {
        if !(self.k > 0.0 && self.k.is_finite()) {
            return Err(Error::Config(format!("K must be positive and finite, got {}", self.k)));
        }
        if self.beta_grid.is_empty() {
            return Err(Error::Config("beta_grid is empty".into()));
        }
        if self.beta_grid.iter().any(|b| !(*b > 0.0 && *b <= 1.0)) {
            return Err(Error::Config("beta_grid values must lie in (0, 1]".into()));
        }
        if self.beta_grid.windows(2).any(|w| w[1] >= w[0]) {
            return Err(Error::Config("beta_grid must be strictly decreasing".into()));
        }
        if !(self.tol > 0.0) {
            return Err(Error::Config("tol must be positive".into()));
        }
        if self.radial_levels == 0 {
            return Err(Error::Config("radial_levels must be >= 1".into()));
        }
        if let Some(b) = self.beta0 {
            if !(b > 0.0 && b <= 1.0) {
                return Err(Error::Config(format!("beta0 must lie in (0, 1], got {b}")));
            }
        }
        if !(self.envelope.ratio > 1.0) {
            return Err(Error::Config("envelope ratio must exceed 1".into()));
        }
        if self.probe.radii.iter().any(|r| !(*r > 0.0 && r.is_finite())) || self.probe.radii.is_empty() {
            return Err(Error::Config("probe radii must be positive and finite".into()));
        }
        if self.probe.alphas.iter().any(|a| !(*a > 0.0 && *a < 1.0)) {
            return Err(Error::Config("probe alphas must lie in (0, 1)".into()));
        }
        Ok(())
    }

    /// Full validation against Φ, including `0 < μ(B) ≤ 1` for every ball.
    pub fn validate(&self, phi: &SpatialPhiFunction) -> Result<()> {
        self.validate_params()?;
        if let Some(psi) = &self.psi {
            if psi.dim() != phi.dim() || psi.space_dim() != phi.space_dim() {
                return Err(Error::Config("psi must have the dimensions of phi".into()));
            }
        }
        for (j, ball) in self.balls.iter().enumerate() {
            if ball.center.dim() != phi.space_dim() {
                return Err(Error::DimensionMismatch {
                    expected: phi.space_dim(),
                    got: ball.center.dim(),
                });
            }
            let mu = phi.measure(ball);
            if mu <= 0.0 {
                return Err(Error::DegenerateBall);
            }
            if mu > 1.0 + 1e-12 {
                return Err(Error::Config(format!("ball {j} has measure {mu} > 1")));
            }
        }
        Ok(())
    }

    pub fn psi<'a>(&'a self, phi: &'a SpatialPhiFunction) -> &'a SpatialPhiFunction {
        self.psi.as_ref().unwrap_or(phi)
    }

    pub fn psi_is_phi(&self, phi: &SpatialPhiFunction) -> bool {
        self.psi.as_ref().is_none_or(|p| p == phi)
    }

    /// Radial probe levels on `[β₀/4, 4/β₀]`.
    pub fn radial_levels(&self, beta0: f64) -> Vec<f64> {
        geometric_levels(beta0 / 4.0, 4.0 / beta0, self.radial_levels)
    }
}
