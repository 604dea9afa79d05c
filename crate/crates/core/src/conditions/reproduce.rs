use super::certificate::{ConditionCertificate, ConditionTag, Witness};
use super::config::ConditionConfig;
use super::local::LocalAnalysis;
use crate::error::{Error, Result};
use crate::phi_core::{phi_minus, phi_plus, ExtReal, Phi, SpatialPhiFunction};

fn witness(cert: &ConditionCertificate) -> Result<&Witness> {
    cert.witness
        .as_ref()
        .ok_or_else(|| Error::InvalidParameter("certificate carries no witness".into()))
}

/// Re-evaluates `(lhs, rhs)` of a (W4), (Inc)₁ or (aInc)₁ witness.
pub fn reproduce_pointwise(phi: &dyn Phi, cert: &ConditionCertificate) -> Result<(ExtReal, ExtReal)> {
    let w = witness(cert)?;
    match (cert.condition, &w.xi2, w.alpha) {
        (ConditionTag::W4, Some(xi2), Some(a)) => {
            let z: Vec<f64> = w.xi.iter().zip(xi2.iter()).map(|(x, y)| w.beta * (a * x + (1.0 - a) * y)).collect();
            Ok((phi.value(&z), phi.value(&w.xi).scale(a) + phi.value(xi2).scale(1.0 - a)))
        }
        (ConditionTag::Inc1 | ConditionTag::AInc1, _, Some(a)) => {
            Ok((phi.value(&w.xi.scaled(w.beta * a)), phi.value(&w.xi).scale(a)))
        }
        _ => Err(Error::InvalidParameter(format!("cannot reproduce a {} witness pointwise", cert.condition))),
    }
}

/// Re-evaluates `(lhs, rhs)` of an (A0), (A1) or (M) witness from scratch.
pub fn reproduce(phi: &SpatialPhiFunction, cfg: &ConditionConfig, cert: &ConditionCertificate) -> Result<(ExtReal, ExtReal)> {
    let w = witness(cert)?;
    match cert.condition {
        ConditionTag::A0 => {
            let x = w.x.as_ref().ok_or_else(|| Error::InvalidParameter("(A0) witness without x".into()))?;
            if w.note.is_empty() {
                Ok((phi.eval(x, &w.xi.scaled(w.beta))?, ExtReal::ONE))
            } else {
                Ok((ExtReal::ONE, phi.eval(x, &w.xi.scaled(1.0 / w.beta))?))
            }
        }
        ConditionTag::A1 => {
            let ball = w.ball.as_ref().ok_or_else(|| Error::InvalidParameter("witness without ball".into()))?;
            let lhs = phi_plus(phi, ball, &w.xi.scaled(w.beta), &cfg.sampler)?;
            Ok((lhs, phi_minus(phi, ball, &w.xi, &cfg.sampler)? + ExtReal::ONE))
        }
        ConditionTag::M => {
            let ball = w.ball.as_ref().ok_or_else(|| Error::InvalidParameter("witness without ball".into()))?;
            let single = ConditionConfig {
                balls: vec![ball.clone()],
                ..cfg.clone()
            };
            let analysis = LocalAnalysis::new(phi, &single, true)?;
            let b = &analysis.balls[0];
            let probe = b
                .probes
                .iter()
                .find(|p| p.xi == w.xi)
                .ok_or_else(|| Error::InvalidParameter("witness vector is not a probe of its ball".into()))?;
            let lhs = b.sample.plus_with_arg(&w.xi.scaled(w.beta)).0;
            Ok((lhs, probe.env_lower + ExtReal::ONE))
        }
        c => Err(Error::InvalidParameter(format!("cannot reproduce a {c} witness"))),
    }
}
