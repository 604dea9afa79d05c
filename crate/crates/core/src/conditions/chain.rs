use super::basic::doubling_exponent;
use super::certificate::{ConditionCertificate, ConditionTag, Verdict};
use super::config::ConditionConfig;
use super::local::LocalAnalysis;
use crate::envelope::build_minorant_pair;
use crate::error::{Error, Result};
use crate::oracle::almost_convex_bruteforce;
use crate::phi_core::{norm, SpatialPhiFunction, Vector};

/// The almost-convexity constant of `M_s` from the construction: `1/(2C)`
/// with `C = 4`.
pub const PROOF_BETA_AC: f64 = 1.0 / 8.0;
const GAUGE_TOL: f64 = 1e-6;

fn grid_side(m: usize) -> usize {
    match m {
        1 => 9,
        2 => 5,
        _ => 3,
    }
}

/// Symmetric product grid with `side` points per axis over `[−h, h]^m`.
fn product_grid(m: usize, side: usize, h: f64) -> Vec<Vector> {
    let node = |i: usize| -h + 2.0 * h * i as f64 / (side - 1) as f64;
    let total = side.pow(m as u32);
    (0..total)
        .map(|mut idx| {
            let mut v = vec![0.0; m];
            for k in (0..m).rev() {
                v[k] = node(idx % side);
                idx /= side;
            }
            Vector(v)
        })
        .collect()
}

/// Empirical almost-convexity constant of `M_s` per ball: the largest grid
/// β for which the (W4) scan with `α = 1/2` passes.
fn empirical_beta_ac(analysis: &LocalAnalysis, cfg: &ConditionConfig, beta: f64) -> Result<Option<f64>> {
    let mut worst: Option<f64> = Some(1.0);
    for ball in &analysis.balls {
        let s = ball.limit + 1.0;
        let mut pair = build_minorant_pair(ball.sample.plus(), s, beta)?;
        pair.ns.tol = GAUGE_TOL;
        let reach = if pair.ns.set.bounding_radius.is_finite() {
            pair.ns.set.bounding_radius
        } else {
            ball.probes.iter().map(|p| norm(&p.xi)).fold(0.0, f64::max)
        };
        let m = ball.sample.dim();
        let grid = product_grid(m, grid_side(m), 2.0 * reach);
        let found = cfg
            .beta_grid
            .iter()
            .copied()
            .find(|&b| almost_convex_bruteforce(&pair, &grid, &[0.5], b, 1e-6).is_none());
        worst = match (worst, found) {
            (Some(a), Some(b)) => Some(a.min(b)),
            _ => None,
        };
    }
    Ok(worst)
}

/// From a passing (A1) certificate with β: per ball `s = K/μ(B) + 1`, the
/// level set `K_s` of `Φ_B^+(β·)`, the minorant `M_s`, and the final (M)
/// inequality at `(K/(K+1))·β·β′`, `β′ = β_ac^i`, `2^i ≥ m + 1`, verified on
/// the probe set.
pub fn a1_implies_m_chain(
    phi: &SpatialPhiFunction,
    cert_a1: &ConditionCertificate,
    cfg: &ConditionConfig,
) -> Result<ConditionCertificate> {
    if !cfg.psi_is_phi(phi) {
        return Err(Error::OutOfScope(
            "the A1 => M chain is only established for psi = phi".into(),
        ));
    }
    let analysis = LocalAnalysis::new(phi, cfg, true)?;
    a1_implies_m_chain_with(&analysis, cert_a1, cfg)
}

pub fn a1_implies_m_chain_with(
    analysis: &LocalAnalysis,
    cert_a1: &ConditionCertificate,
    cfg: &ConditionConfig,
) -> Result<ConditionCertificate> {
    let Some(beta) = cert_a1.beta.filter(|_| cert_a1.passed()) else {
        return Err(Error::Precondition("the (A1) certificate did not pass".into()));
    };
    let m = analysis.balls[0].sample.dim();
    let k = cfg.k;
    let i = doubling_exponent(m);
    let beta_prime = PROOF_BETA_AC.powi(i as i32);
    let factor = k / (k + 1.0);
    let final_beta = factor * beta * beta_prime;

    let mut cert = ConditionCertificate::new(ConditionTag::Chain);
    cert.derive("K", k);
    cert.derive("beta_a1", beta);
    cert.derive("m", m);
    cert.derive("i", i);
    cert.derive("beta_ac", PROOF_BETA_AC);
    cert.derive("C", 4);
    cert.derive("beta_prime", beta_prime);
    cert.derive("K/(K+1)", factor);
    cert.derive("final_beta", final_beta);

    let mut s_ok = true;
    for (b, ball) in analysis.balls.iter().enumerate() {
        let s = k / ball.measure + 1.0;
        cert.derive(&format!("ball{b}.s"), s);
        // K_s must contain a neighbourhood of 0
        build_minorant_pair(ball.sample.plus(), s, beta)?;
        s_ok &= (s - (ball.limit + 1.0)).abs() <= 1e-12 * s;
    }

    let emp = empirical_beta_ac(analysis, cfg, beta)?;
    cert.derive("beta_ac_empirical", emp.map_or("none".into(), |b| b.to_string()));
    if let Some(e) = emp {
        let emp_final = factor * beta * e.powi(i as i32);
        cert.derive("final_beta_empirical", emp_final);
        let holds = analysis.m_witness(emp_final).is_none();
        cert.derive("m_at_empirical_final", if holds { "holds" } else { "fails" });
    }

    let recheck = s_ok
        && (1usize << i) > m
        && (i == 0 || (1usize << (i - 1)) < m + 1)
        && final_beta <= beta
        && (beta_prime - PROOF_BETA_AC.powi(i as i32)).abs() == 0.0;
    cert.derive("recheck", if recheck { "ok" } else { "failed" });

    cert.sampler = analysis.sampler.clone();
    cert.balls = analysis.balls.len();
    cert.probes = analysis.probe_count();
    cert.eligible = analysis.m_eligible_count();
    match analysis.m_witness(final_beta) {
        Some(mut w) => {
            w.note = format!("chain-certified (M) fails at {final_beta}: {}", w.note);
            cert.verdict = Verdict::Fail;
            cert.witness = Some(w);
        }
        None if !recheck => {
            cert.verdict = Verdict::Fail;
            cert.notes.push("derived constants failed their recheck".into());
        }
        None => {
            cert.beta = Some(final_beta);
            if cert.eligible == 0 {
                cert.verdict = Verdict::Vacuous;
            }
        }
    }
    Ok(cert)
}
