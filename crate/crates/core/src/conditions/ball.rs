use super::certificate::{search_beta, ConditionCertificate, ConditionTag, Verdict, Witness};
use super::config::ConditionConfig;
use super::local::LocalAnalysis;
use crate::error::Result;
use crate::phi_core::SpatialPhiFunction;

fn finish(cert: &mut ConditionCertificate, analysis: &LocalAnalysis, eligible: usize, cfg: &ConditionConfig) {
    cert.sampler = analysis.sampler.clone();
    cert.balls = analysis.balls.len();
    cert.probes = analysis.probe_count();
    cert.eligible = eligible;
    cert.derive("K", cfg.k);
    cert.derive("beta0", analysis.beta0);
    if eligible == 0 && cert.verdict == Verdict::Pass {
        cert.verdict = Verdict::Vacuous;
    }
}

pub fn check_a1_with(analysis: &LocalAnalysis, cfg: &ConditionConfig) -> Result<ConditionCertificate> {
    let search = search_beta(&cfg.beta_grid, |beta| -> Result<Option<Witness>> { Ok(analysis.a1_witness(beta)) })?;
    let mut cert = ConditionCertificate::new(ConditionTag::A1);
    search.apply(&mut cert);
    finish(&mut cert, analysis, analysis.a1_eligible_count(), cfg);
    Ok(cert)
}

/// `Φ_B^+(βξ) ≤ Φ_B^-(ξ) + 1` for probes with `Ψ_B^-(ξ) ≤ K/μ(B)`.
pub fn check_a1(phi: &SpatialPhiFunction, cfg: &ConditionConfig) -> Result<ConditionCertificate> {
    let analysis = LocalAnalysis::new(phi, cfg, false)?;
    check_a1_with(&analysis, cfg)
}

pub fn check_m_with(analysis: &LocalAnalysis, cfg: &ConditionConfig) -> Result<ConditionCertificate> {
    let search = search_beta(&cfg.beta_grid, |beta| -> Result<Option<Witness>> { Ok(analysis.m_witness(beta)) })?;
    let mut cert = ConditionCertificate::new(ConditionTag::M);
    search.apply(&mut cert);
    finish(&mut cert, analysis, analysis.m_eligible_count(), cfg);
    cert.derive("slack_rel_max", format!("{:e}", analysis.max_slack_rel()));
    let unbounded = analysis.unbounded_dirs();
    if unbounded > 0 {
        cert.notes.push(format!(
            "eligible set reaches the envelope window along {unbounded} probe directions"
        ));
    }
    if let Some(env) = analysis.balls.first().and_then(|b| b.envelope.as_ref()) {
        cert.derive("envelope", env.describe());
    }
    Ok(cert)
}

/// `Φ_B^+(βξ) ≤ (Φ_B^-)^conv(ξ) + 1` for probes with
/// `(Ψ_B^-)^conv(ξ) ≤ K/μ(B)`, the envelope slack subtracted on the right.
pub fn check_m(phi: &SpatialPhiFunction, cfg: &ConditionConfig) -> Result<ConditionCertificate> {
    let analysis = LocalAnalysis::new(phi, cfg, true)?;
    check_m_with(&analysis, cfg)
}

/// Constant of the "+1" form implied by the range form at `beta`.
pub fn range_to_plus(beta: f64, beta0: f64) -> f64 {
    beta.min(beta0 * beta0 / 2.0)
}

/// Constant of the range form implied by the "+1" form at `beta`.
pub fn plus_to_range(beta: f64) -> f64 {
    beta / 2.0
}

/// Checks both implications between the "+1" form of (M) and the form
/// restricted to `(Φ_B^-)^conv(ξ) ∈ [1, K/μ(B)]`, for every grid β.
pub fn check_azero_reduction_with(analysis: &LocalAnalysis, cfg: &ConditionConfig) -> Result<ConditionCertificate> {
    let beta0 = analysis.beta0;
    let mut cert = ConditionCertificate::new(ConditionTag::AzeroReduction);
    let mut best_plus = None;
    let mut best_range = None;
    for &beta in &cfg.beta_grid {
        let plus = analysis.m_witness(beta).is_none();
        let range = analysis.range_witness(beta).is_none();
        if plus && best_plus.is_none() {
            best_plus = Some(beta);
        }
        if range && best_range.is_none() {
            best_range = Some(beta);
        }
        let b1 = range_to_plus(beta, beta0);
        if range {
            if let Some(mut w) = analysis.m_witness(b1) {
                w.note = format!("range form holds at {beta} but the +1 form fails at {b1}");
                cert.witness.get_or_insert(w);
            }
        }
        let b2 = plus_to_range(beta);
        if plus {
            if let Some(mut w) = analysis.range_witness(b2) {
                w.note = format!("+1 form holds at {beta} but the range form fails at {b2}");
                cert.witness.get_or_insert(w);
            }
        }
    }
    cert.derive("beta_plus", best_plus.map_or("none".into(), |b| b.to_string()));
    cert.derive("beta_range", best_range.map_or("none".into(), |b| b.to_string()));
    cert.derive("range_to_plus", "min(beta, beta0^2/2)");
    cert.derive("plus_to_range", "beta/2");
    if cert.witness.is_some() {
        cert.verdict = Verdict::Fail;
    } else {
        cert.beta = best_plus;
    }
    let eligible = analysis.m_eligible_count();
    finish(&mut cert, analysis, eligible, cfg);
    Ok(cert)
}

pub fn check_azero_reduction(phi: &SpatialPhiFunction, cfg: &ConditionConfig) -> Result<ConditionCertificate> {
    let analysis = LocalAnalysis::new(phi, cfg, true)?;
    check_azero_reduction_with(&analysis, cfg)
}

/// A range-form failure at `(b, j, beta)` forces a "+1"-form failure at
/// `2·beta` on the same probe; returns that witness.
pub fn propagate_range_failure(analysis: &LocalAnalysis, b: usize, j: usize, beta: f64) -> Option<Witness> {
    analysis.range_instance(b, j, beta)?;
    analysis.m_instance(b, j, 2.0 * beta)
}
