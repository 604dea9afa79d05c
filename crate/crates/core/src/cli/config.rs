use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::conditions::ConditionConfig;
use crate::envelope::EnvelopeSpec;
use crate::error::{Error, Result};
use crate::phi_core::{Ball, FieldSample, SpatialPhiFunction, Vector, VectorField};

/// Balls `B(c, 2^-j)` for every center `c` and `j_min ≤ j ≤ j_max`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BallGenerator {
    pub centers: Vec<Vector>,
    #[serde(default = "one")]
    pub j_min: u32,
    pub j_max: u32,
}

fn one() -> u32 {
    1
}

impl BallGenerator {
    pub fn balls(&self) -> Result<Vec<Ball>> {
        if self.j_min > self.j_max {
            return Err(Error::Config("ball generator needs j_min <= j_max".into()));
        }
        let mut out = vec![];
        for c in &self.centers {
            for j in self.j_min..=self.j_max {
                out.push(Ball::new(c.clone(), 0.5f64.powi(j as i32))?);
            }
        }
        Ok(out)
    }
}

/// A vector field for the `norm` command.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum FieldSpec {
    /// Constant on the whole domain, midpoint rule with `cells` per axis.
    Constant { value: Vector, cells: usize },
    Samples { samples: Vec<FieldSample> },
}

impl FieldSpec {
    pub fn build(&self, phi: &SpatialPhiFunction) -> Result<VectorField> {
        match self {
            FieldSpec::Constant { value, cells } => VectorField::constant(phi, value.clone(), *cells),
            FieldSpec::Samples { samples } => VectorField::new(samples.clone()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NormSpec {
    pub field: FieldSpec,
    /// Points of the reference λ-scan on `[lambda_min, lambda_max]`.
    #[serde(default = "default_scan_points")]
    pub scan_points: usize,
    #[serde(default = "default_lambda_min")]
    pub lambda_min: f64,
    #[serde(default = "default_lambda_max")]
    pub lambda_max: f64,
}

fn default_scan_points() -> usize {
    4001
}

fn default_lambda_min() -> f64 {
    1e-3
}

fn default_lambda_max() -> f64 {
    1e3
}

/// Random-field Jensen experiment.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JensenSpec {
    #[serde(default = "default_fields")]
    pub fields: usize,
    /// Quadrature cells per axis over the ball's bounding box.
    #[serde(default = "default_cells")]
    pub cells: usize,
    /// β to test; the chain's β when absent.
    #[serde(default)]
    pub beta: Option<f64>,
    #[serde(default = "default_true")]
    pub plus_one: bool,
}

fn default_fields() -> usize {
    100
}

fn default_cells() -> usize {
    6
}

fn default_true() -> bool {
    true
}

impl Default for JensenSpec {
    fn default() -> Self {
        JensenSpec {
            fields: default_fields(),
            cells: default_cells(),
            beta: None,
            plus_one: true,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnalysisConfig {
    pub phi: SpatialPhiFunction,
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default)]
    pub tol: Option<f64>,
    #[serde(default)]
    pub out: Option<PathBuf>,
    #[serde(default)]
    pub conditions: ConditionConfig,
    #[serde(default)]
    pub ball_generator: Option<BallGenerator>,
    #[serde(default)]
    pub envelope: Option<EnvelopeSpec>,
    #[serde(default)]
    pub jensen: Option<JensenSpec>,
    #[serde(default)]
    pub norm: Option<NormSpec>,
}

impl AnalysisConfig {
    pub fn parse(text: &str) -> Result<AnalysisConfig> {
        let cfg: AnalysisConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<AnalysisConfig> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        AnalysisConfig::parse(&text)
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn validate(&self) -> Result<()> {
        self.phi.validate()?;
        self.condition_config()?.validate(&self.phi)?;
        if let Some(env) = &self.envelope {
            env.validate()?;
            if env.grid.dim() != self.phi.dim() {
                return Err(Error::Config(format!(
                    "envelope grid has dimension {} but phi has {}",
                    env.grid.dim(),
                    self.phi.dim()
                )));
            }
        }
        Ok(())
    }

    /// The condition settings with the generated balls, seed and tol
    /// overrides applied.
    pub fn condition_config(&self) -> Result<ConditionConfig> {
        let mut cfg = self.conditions.clone();
        if let Some(g) = &self.ball_generator {
            cfg.balls.extend(g.balls()?);
        }
        if let Some(seed) = self.seed {
            cfg.sampler.seed = seed;
        }
        if let Some(tol) = self.tol {
            cfg.tol = tol;
            cfg.probe.tol = tol;
        }
        Ok(cfg)
    }

    pub fn seed(&self) -> u64 {
        self.seed.unwrap_or(self.conditions.sampler.seed)
    }
}
