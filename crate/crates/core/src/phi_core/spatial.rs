use serde::{Deserialize, Serialize};

use super::ext_real::ExtReal;
use super::family::{Phi, PhiFunction};
use super::sampler::SamplerSpec;
use super::vector::{dist, Vector};
use crate::error::{Error, Result};

/// Axis-aligned box `Ω = Π [lo_k, hi_k]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Domain {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
}

impl Domain {
    pub fn new(lo: Vec<f64>, hi: Vec<f64>) -> Result<Domain> {
        let d = Domain { lo, hi };
        d.validate()?;
        Ok(d)
    }

    pub fn cube(dim: usize, half_width: f64) -> Domain {
        Domain {
            lo: vec![-half_width; dim],
            hi: vec![half_width; dim],
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.lo.is_empty() || self.lo.len() != self.hi.len() {
            return Err(Error::InvalidParameter("domain bounds must have equal nonzero length".into()));
        }
        if self.lo.len() > 3 {
            return Err(Error::InvalidParameter("space dimension above 3 is not supported".into()));
        }
        if self.lo.iter().zip(&self.hi).any(|(a, b)| !(a < b) || !a.is_finite() || !b.is_finite()) {
            return Err(Error::InvalidParameter("domain needs finite lo < hi on every axis".into()));
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        x.iter()
            .zip(self.lo.iter().zip(&self.hi))
            .all(|(x, (a, b))| *x >= *a && *x <= *b)
    }

    pub fn center(&self) -> Vector {
        Vector(self.lo.iter().zip(&self.hi).map(|(a, b)| 0.5 * (a + b)).collect())
    }

    pub fn volume(&self) -> f64 {
        self.lo.iter().zip(&self.hi).map(|(a, b)| b - a).product()
    }
}

/// A real-valued function of `x ∈ Ω`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum ScalarField {
    Constant { value: f64 },
    /// `offset + gradient · x`
    Affine { offset: f64, gradient: Vec<f64> },
    /// `offset + coef·|x − center|^exponent`; Hölder continuous with
    /// exponent `min(exponent, 1)`.
    Radial {
        center: Vec<f64>,
        coef: f64,
        exponent: f64,
        #[serde(default)]
        offset: f64,
    },
}

impl ScalarField {
    pub fn constant(value: f64) -> ScalarField {
        ScalarField::Constant { value }
    }

    pub fn at(&self, x: &[f64]) -> f64 {
        match self {
            ScalarField::Constant { value } => *value,
            ScalarField::Affine { offset, gradient } => {
                offset + gradient.iter().zip(x).map(|(g, x)| g * x).sum::<f64>()
            }
            ScalarField::Radial {
                center,
                coef,
                exponent,
                offset,
            } => {
                let r = dist(x, center);
                if r == 0.0 {
                    *offset
                } else {
                    offset + coef * r.powf(*exponent)
                }
            }
        }
    }

    fn validate(&self, n: usize) -> Result<()> {
        match self {
            ScalarField::Constant { value } if !value.is_finite() => {
                Err(Error::InvalidParameter("constant field must be finite".into()))
            }
            ScalarField::Affine { gradient, .. } if gradient.len() != n => {
                Err(Error::InvalidParameter("affine gradient length must equal space dimension".into()))
            }
            ScalarField::Radial { center, exponent, .. } if center.len() != n || *exponent <= 0.0 => Err(
                Error::InvalidParameter("radial field needs a center in R^n and exponent > 0".into()),
            ),
            _ => Ok(()),
        }
    }
}

/// How `Φ(x, ·)` depends on `x`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum SpatialFamily {
    /// `Φ(x, ξ) = φ(ξ)`.
    Uniform { phi: PhiFunction },
    /// `|ξ|^{p(x)} + a(x)|ξ|^{q(x)}`, or `|ξ|^{p(x)} + a(x)|ξ_axis|^{q(x)}`
    /// when `directional` is set.
    DoublePhase {
        dim: usize,
        p: ScalarField,
        q: ScalarField,
        a: ScalarField,
        #[serde(default)]
        directional: bool,
    },
}

/// The weight of `μ` with respect to Lebesgue measure.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum Density {
    Constant { value: f64 },
    Field { field: ScalarField },
}

impl Default for Density {
    fn default() -> Self {
        Density::Constant { value: 1.0 }
    }
}

impl Density {
    pub fn at(&self, x: &[f64]) -> f64 {
        match self {
            Density::Constant { value } => *value,
            Density::Field { field } => field.at(x).max(0.0),
        }
    }
}

/// `Φ: Ω × ℝ^m → [0, ∞]` over a box domain.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpatialPhiFunction {
    pub domain: Domain,
    pub family: SpatialFamily,
    #[serde(default)]
    pub density: Density,
}

impl SpatialPhiFunction {
    pub fn new(domain: Domain, family: SpatialFamily) -> Result<SpatialPhiFunction> {
        let phi = SpatialPhiFunction {
            domain,
            family,
            density: Density::default(),
        };
        phi.validate()?;
        Ok(phi)
    }

    pub fn uniform(domain: Domain, phi: PhiFunction) -> SpatialPhiFunction {
        SpatialPhiFunction {
            domain,
            family: SpatialFamily::Uniform { phi },
            density: Density::default(),
        }
    }

    pub fn with_density(mut self, density: Density) -> Result<SpatialPhiFunction> {
        self.density = density;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        self.domain.validate()?;
        let n = self.space_dim();
        match &self.density {
            Density::Constant { value } if !(*value > 0.0 && value.is_finite()) => {
                return Err(Error::InvalidParameter("density must be positive and finite".into()))
            }
            Density::Field { field } => field.validate(n)?,
            _ => {}
        }
        if let SpatialFamily::DoublePhase { dim, p, q, a, .. } = &self.family {
            if *dim == 0 {
                return Err(Error::InvalidParameter("vector dimension must be >= 1".into()));
            }
            for f in [p, q, a] {
                f.validate(n)?;
            }
            // spot-check the parameter ranges at the corners and center
            for x in probe_points(&self.domain) {
                self.at(&x)?;
            }
        }
        Ok(())
    }

    pub fn space_dim(&self) -> usize {
        self.domain.dim()
    }

    pub fn dim(&self) -> usize {
        match &self.family {
            SpatialFamily::Uniform { phi } => phi.dim(),
            SpatialFamily::DoublePhase { dim, .. } => *dim,
        }
    }

    pub fn is_uniform(&self) -> bool {
        matches!(self.family, SpatialFamily::Uniform { .. })
    }

    pub fn uniform_phi(&self) -> Option<&PhiFunction> {
        match &self.family {
            SpatialFamily::Uniform { phi } => Some(phi),
            _ => None,
        }
    }

    /// The x-independent Φ-function `Φ(x, ·)`.
    pub fn at(&self, x: &[f64]) -> Result<PhiFunction> {
        match &self.family {
            SpatialFamily::Uniform { phi } => Ok(phi.clone()),
            SpatialFamily::DoublePhase {
                dim,
                p,
                q,
                a,
                directional,
            } => {
                let (p, q, a) = (p.at(x), q.at(x), a.at(x));
                let phi = if *directional {
                    PhiFunction::directional_double_phase(*dim, p, q, a)
                } else {
                    PhiFunction::double_phase(*dim, p, q, a)
                };
                phi.map_err(|e| Error::InvalidParameter(format!("at x = {}: {e}", Vector::from(x))))
            }
        }
    }

    pub fn eval(&self, x: &[f64], xi: &[f64]) -> Result<ExtReal> {
        if x.len() != self.space_dim() {
            return Err(Error::DimensionMismatch {
                expected: self.space_dim(),
                got: x.len(),
            });
        }
        self.at(x)?.eval(xi)
    }

    /// `μ(B ∩ Ω)`.
    pub fn measure(&self, ball: &Ball) -> f64 {
        ball_measure(&self.domain, &self.density, ball)
    }

    /// Samples of `B ∩ Ω` with the induced Φ-functions cached.
    pub fn ball_sample(&self, ball: &Ball, sampler: &SamplerSpec) -> Result<BallSample> {
        if ball.center.len() != self.space_dim() {
            return Err(Error::DimensionMismatch {
                expected: self.space_dim(),
                got: ball.center.len(),
            });
        }
        let mu = self.measure(ball);
        let points = sampler.ball_points(&self.domain, ball)?;
        if mu <= 0.0 {
            return Err(Error::DegenerateBall);
        }
        let phis = points.iter().map(|x| self.at(x)).collect::<Result<Vec<_>>>()?;
        Ok(BallSample {
            ball: ball.clone(),
            measure: mu,
            points,
            phis,
        })
    }

    /// Samples of the whole domain, for conditions quantified over `x ∈ Ω`.
    pub fn domain_sample(&self, sampler: &SamplerSpec) -> Result<Vec<(Vector, PhiFunction)>> {
        sampler
            .domain_points(&self.domain)
            .into_iter()
            .map(|x| {
                let phi = self.at(&x)?;
                Ok((x, phi))
            })
            .collect()
    }
}

fn probe_points(domain: &Domain) -> Vec<Vector> {
    let n = domain.dim();
    let mut pts = vec![domain.center()];
    for mask in 0..(1usize << n) {
        pts.push(Vector(
            (0..n)
                .map(|k| if mask >> k & 1 == 1 { domain.hi[k] } else { domain.lo[k] })
                .collect(),
        ));
    }
    pts
}

/// `B(center, radius) ⊂ ℝ^n`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Ball {
    pub center: Vector,
    pub radius: f64,
}

impl Ball {
    pub fn new(center: impl Into<Vector>, radius: f64) -> Result<Ball> {
        let center = center.into();
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::InvalidParameter(format!("ball radius must be positive, got {radius}")));
        }
        Ok(Ball { center, radius })
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        dist(x, &self.center) <= self.radius
    }
}

fn unit_ball_volume(n: usize) -> f64 {
    match n {
        1 => 2.0,
        2 => std::f64::consts::PI,
        3 => 4.0 / 3.0 * std::f64::consts::PI,
        _ => unreachable!("space dimension is validated to be <= 3"),
    }
}

fn ball_measure(domain: &Domain, density: &Density, ball: &Ball) -> f64 {
    let n = domain.dim();
    let r = ball.radius;
    let inside = (0..n).all(|k| {
        ball.center[k] - r >= domain.lo[k] && ball.center[k] + r <= domain.hi[k]
    });
    if let Density::Constant { value } = density {
        if inside {
            return value * unit_ball_volume(n) * r.powi(n as i32);
        }
    }
    // midpoint rule on the ball's bounding box clipped to Ω
    let res: usize = match n {
        1 => 4096,
        2 => 128,
        _ => 40,
    };
    let lo: Vec<f64> = (0..n).map(|k| (ball.center[k] - r).max(domain.lo[k])).collect();
    let hi: Vec<f64> = (0..n).map(|k| (ball.center[k] + r).min(domain.hi[k])).collect();
    if lo.iter().zip(&hi).any(|(a, b)| a >= b) {
        return 0.0;
    }
    let h: Vec<f64> = lo.iter().zip(&hi).map(|(a, b)| (b - a) / res as f64).collect();
    let cell: f64 = h.iter().product();
    let mut total = 0.0;
    let mut idx = vec![0usize; n];
    let mut x = vec![0.0; n];
    loop {
        for k in 0..n {
            x[k] = lo[k] + (idx[k] as f64 + 0.5) * h[k];
        }
        if ball.contains(&x) {
            total += density.at(&x) * cell;
        }
        let mut k = 0;
        loop {
            idx[k] += 1;
            if idx[k] < res {
                break;
            }
            idx[k] = 0;
            k += 1;
            if k == n {
                return total;
            }
        }
    }
}

/// Sample points of `B ∩ Ω` together with `Φ(x_j, ·)` at each point.
#[derive(Clone, Debug)]
pub struct BallSample {
    pub ball: Ball,
    pub measure: f64,
    pub points: Vec<Vector>,
    pub phis: Vec<PhiFunction>,
}

impl BallSample {
    pub fn dim(&self) -> usize {
        self.phis[0].dim()
    }

    /// `min_j Φ(x_j, ξ)` and the minimizing sample index.
    pub fn minus_with_arg(&self, xi: &[f64]) -> (ExtReal, usize) {
        let mut best = (ExtReal::INFINITY, 0);
        for (j, phi) in self.phis.iter().enumerate() {
            let v = phi.value(xi);
            if v < best.0 || j == 0 {
                best = (v, j);
            }
        }
        best
    }

    /// `max_j Φ(x_j, ξ)` and the maximizing sample index.
    pub fn plus_with_arg(&self, xi: &[f64]) -> (ExtReal, usize) {
        let mut best = (ExtReal::ZERO, 0);
        for (j, phi) in self.phis.iter().enumerate() {
            let v = phi.value(xi);
            if v > best.0 || j == 0 {
                best = (v, j);
            }
        }
        best
    }

    pub fn minus(&self) -> LocalInf<'_> {
        LocalInf(self)
    }

    pub fn plus(&self) -> LocalSup<'_> {
        LocalSup(self)
    }
}

/// `ξ ↦ Φ_B^-(ξ)` over a fixed sample.
#[derive(Clone, Copy)]
pub struct LocalInf<'a>(pub &'a BallSample);

/// `ξ ↦ Φ_B^+(ξ)` over a fixed sample.
#[derive(Clone, Copy)]
pub struct LocalSup<'a>(pub &'a BallSample);

impl Phi for LocalInf<'_> {
    fn dim(&self) -> usize {
        self.0.dim()
    }
    fn value(&self, xi: &[f64]) -> ExtReal {
        self.0.minus_with_arg(xi).0
    }
}

impl Phi for LocalSup<'_> {
    fn dim(&self) -> usize {
        self.0.dim()
    }
    fn value(&self, xi: &[f64]) -> ExtReal {
        self.0.plus_with_arg(xi).0
    }
}

/// `Φ_B^-(ξ)`: the minimum of `Φ(x, ξ)` over the sampled points of `B ∩ Ω`.
pub fn phi_minus(phi: &SpatialPhiFunction, ball: &Ball, xi: &[f64], sampler: &SamplerSpec) -> Result<ExtReal> {
    check_xi(phi, xi)?;
    let s = phi.ball_sample(ball, sampler)?;
    Ok(s.minus_with_arg(xi).0)
}

/// `Φ_B^+(ξ)`: the maximum of `Φ(x, ξ)` over the sampled points of `B ∩ Ω`.
pub fn phi_plus(phi: &SpatialPhiFunction, ball: &Ball, xi: &[f64], sampler: &SamplerSpec) -> Result<ExtReal> {
    check_xi(phi, xi)?;
    let s = phi.ball_sample(ball, sampler)?;
    Ok(s.plus_with_arg(xi).0)
}

fn check_xi(phi: &SpatialPhiFunction, xi: &[f64]) -> Result<()> {
    if xi.len() != phi.dim() {
        return Err(Error::DimensionMismatch {
            expected: phi.dim(),
            got: xi.len(),
        });
    }
    Ok(())
}
