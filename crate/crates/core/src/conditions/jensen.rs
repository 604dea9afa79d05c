use super::certificate::{ConditionCertificate, ConditionTag, Verdict, Witness};
use crate::error::{Error, Result};
use crate::phi_core::{modular, Ball, ExtReal, Phi, SamplerSpec, SpatialPhiFunction, Vector, VectorField};

/// Finite measure on atoms `0..weights.len()`.
#[derive(Clone, Debug, PartialEq)]
pub struct DiscreteMeasure {
    pub weights: Vec<f64>,
}

impl DiscreteMeasure {
    pub fn new(weights: Vec<f64>) -> Result<DiscreteMeasure> {
        if weights.is_empty() || weights.iter().any(|w| !(*w > 0.0 && w.is_finite())) {
            return Err(Error::InvalidParameter("measure weights must be positive and finite".into()));
        }
        Ok(DiscreteMeasure { weights })
    }

    pub fn total(&self) -> f64 {
        self.weights.iter().sum()
    }
}

/// `Φ_B^+(β ⨍_B f dμ) ≤ ⨍_B Φ(x, f) dμ (+ 1)`, with averages over the
/// field samples in `B`.
pub fn jensen_check(
    phi: &SpatialPhiFunction,
    f: &VectorField,
    ball: &Ball,
    beta: f64,
    plus_one: bool,
    sampler: &SamplerSpec,
    tol: f64,
) -> Result<ConditionCertificate> {
    let rho = modular(phi, f)?;
    if rho > ExtReal::ONE.scale(1.0 + tol) {
        return Err(Error::Precondition(format!("modular of f is {rho} > 1")));
    }
    let mu = phi.measure(ball);
    if mu > 1.0 + 1e-12 {
        return Err(Error::Precondition(format!("ball measure {mu} > 1")));
    }
    let m = phi.dim();
    let mut wsum = 0.0;
    let mut avg = vec![0.0; m];
    let mut integral = ExtReal::ZERO;
    for s in f.samples.iter().filter(|s| ball.contains(&s.x)) {
        wsum += s.weight;
        for (a, v) in avg.iter_mut().zip(s.value.iter()) {
            *a += s.weight * v;
        }
        integral = integral + phi.eval(&s.x, &s.value)?.scale(s.weight);
    }
    if wsum <= 0.0 {
        return Err(Error::Precondition("no field samples inside the ball".into()));
    }
    let avg = Vector(avg.into_iter().map(|a| a / wsum).collect());
    let sample = phi.ball_sample(ball, sampler)?;
    let (lhs, idx) = sample.plus_with_arg(&avg.scaled(beta));
    let mut rhs = integral.scale(1.0 / wsum);
    if plus_one {
        rhs = rhs + ExtReal::ONE;
    }
    let mut cert = ConditionCertificate::new(ConditionTag::Jensen);
    cert.sampler = sampler.describe(phi.space_dim());
    cert.balls = 1;
    cert.probes = 1;
    cert.eligible = 1;
    cert.derive("plus_one", plus_one);
    cert.derive("average", &avg);
    cert.derive("lhs", lhs);
    cert.derive("rhs", rhs);
    if lhs.le_tol(rhs, tol) {
        cert.beta = Some(beta);
    } else {
        let mut w = Witness::new(avg, beta, lhs, rhs);
        w.ball = Some(ball.clone());
        w.x = Some(sample.points[idx].clone());
        w.note = "phi+(beta avg f) > avg phi(f)".into();
        cert.verdict = Verdict::Fail;
        cert.witness = Some(w);
    }
    Ok(cert)
}

/// `φ(β ⨍ f dμ) ≤ ⨍ φ(f) dμ` for a discrete measure with atom values `f`.
pub fn jensen_almost_convex(
    phi: &dyn Phi,
    measure: &DiscreteMeasure,
    f: &[Vector],
    beta: f64,
    tol: f64,
) -> Result<ConditionCertificate> {
    if f.len() != measure.weights.len() {
        return Err(Error::InvalidParameter(format!(
            "{} atoms but {} values",
            measure.weights.len(),
            f.len()
        )));
    }
    let m = phi.dim();
    if let Some(v) = f.iter().find(|v| v.dim() != m) {
        return Err(Error::DimensionMismatch {
            expected: m,
            got: v.dim(),
        });
    }
    let total = measure.total();
    let mut avg = vec![0.0; m];
    let mut rhs = ExtReal::ZERO;
    for (w, v) in measure.weights.iter().zip(f) {
        for (a, x) in avg.iter_mut().zip(v.iter()) {
            *a += w / total * x;
        }
        rhs = rhs + phi.value(v).scale(w / total);
    }
    let avg = Vector(avg);
    let lhs = phi.value(&avg.scaled(beta));
    let mut cert = ConditionCertificate::new(ConditionTag::JensenAlmostConvex);
    cert.probes = 1;
    cert.eligible = 1;
    cert.derive("lhs", lhs);
    cert.derive("rhs", rhs);
    if lhs.le_tol(rhs, tol) {
        cert.beta = Some(beta);
    } else {
        cert.verdict = Verdict::Fail;
        cert.witness = Some(Witness::new(avg, beta, lhs, rhs));
    }
    Ok(cert)
}
