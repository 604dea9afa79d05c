use super::certificate::{search_beta, ConditionCertificate, ConditionTag, Verdict, Witness};
use super::config::ConditionConfig;
use crate::envelope::{Envelope, EnvelopeSpec};
use crate::error::{Error, Result};
use crate::oracle::almost_convex_bruteforce;
use crate::phi_core::{ExtReal, Phi, ProbeSpec, SpatialPhiFunction, Vector};

/// First violation of `φ(βu) ≤ 1 ≤ φ(u/β)` over the unit vectors `dirs`.
pub fn a0_witness(phi: &dyn Phi, dirs: &[Vector], beta: f64, tol: f64) -> Option<Witness> {
    for u in dirs {
        let lo = phi.value(&u.scaled(beta));
        if !lo.le_tol(ExtReal::ONE, tol) {
            return Some(Witness::new(u.clone(), beta, lo, ExtReal::ONE));
        }
        let hi = phi.value(&u.scaled(1.0 / beta));
        if !ExtReal::ONE.le_tol(hi, tol) {
            let mut w = Witness::new(u.clone(), beta, ExtReal::ONE, hi);
            w.note = "1 <= phi(xi/beta) fails".into();
            return Some(w);
        }
    }
    None
}

/// (A0) over sampled `x ∈ Ω` and the probe directions.
pub fn check_a0(phi: &SpatialPhiFunction, cfg: &ConditionConfig) -> Result<ConditionCertificate> {
    cfg.validate_params()?;
    let dirs = cfg.probe.directions(phi.dim());
    if dirs.is_empty() {
        return Err(Error::Config("no probe directions".into()));
    }
    let samples = phi.domain_sample(&cfg.sampler)?;
    let search = search_beta(&cfg.beta_grid, |beta| -> Result<Option<Witness>> {
        for (x, phi_x) in &samples {
            if let Some(mut w) = a0_witness(phi_x, &dirs, beta, cfg.tol) {
                w.x = Some(x.clone());
                return Ok(Some(w));
            }
        }
        Ok(None)
    })?;
    let mut cert = ConditionCertificate::new(ConditionTag::A0);
    cert.sampler = cfg.sampler.describe(phi.space_dim());
    cert.probes = dirs.len() * samples.len();
    cert.eligible = cert.probes;
    search.apply(&mut cert);
    Ok(cert)
}

/// The (A0) constant: `cfg.beta0` if given, else the largest grid β
/// passing [`check_a0`].
pub fn a0_constant(phi: &SpatialPhiFunction, cfg: &ConditionConfig) -> Result<f64> {
    if let Some(b) = cfg.beta0 {
        return Ok(b);
    }
    let cert = check_a0(phi, cfg)?;
    cert.beta.ok_or_else(|| {
        Error::Precondition(format!(
            "(A0) fails for every beta in the grid: {}",
            cert.witness.map_or(String::new(), |w| w.to_string())
        ))
    })
}

fn basis_and(m: usize, mut rest: Vec<Vector>) -> Vec<Vector> {
    let mut out: Vec<Vector> = (0..m).map(|k| Vector::basis(m, k)).collect();
    rest.retain(|v| !out.contains(v));
    out.append(&mut rest);
    out
}

/// `φ(βαξ) ≤ αφ(ξ)` over probe vectors and α in the probe weights, 1 and
/// `2^-10`, `2^-20`; `β = 1` is (Inc)₁.
pub fn check_inc1(phi: &dyn Phi, beta: f64, probe: &ProbeSpec) -> Result<ConditionCertificate> {
    if !(beta > 0.0 && beta <= 1.0) {
        return Err(Error::InvalidParameter(format!("beta must lie in (0, 1], got {beta}")));
    }
    let m = phi.dim();
    let zero = phi.value(&vec![0.0; m]);
    if zero != ExtReal::ZERO {
        return Err(Error::Precondition(format!("phi(0) = {zero}, not 0")));
    }
    let mut alphas = probe.alphas.clone();
    alphas.extend([1.0, 2f64.powi(-10), 2f64.powi(-20)]);
    let vectors = basis_and(m, probe.vectors(m));
    let tag = if beta == 1.0 {
        ConditionTag::Inc1
    } else {
        ConditionTag::AInc1
    };
    let mut cert = ConditionCertificate::new(tag);
    cert.probes = vectors.len() * alphas.len();
    cert.eligible = cert.probes;
    'outer: for xi in &vectors {
        let rhs0 = phi.value(xi);
        for &alpha in &alphas {
            let lhs = phi.value(&xi.scaled(beta * alpha));
            let rhs = rhs0.scale(alpha);
            if !lhs.le_tol(rhs, probe.tol) {
                let mut w = Witness::new(xi.clone(), beta, lhs, rhs);
                w.alpha = Some(alpha);
                w.note = format!("phi(beta*alpha*xi) > alpha*phi(xi) at alpha={alpha}");
                cert.witness = Some(w);
                break 'outer;
            }
        }
    }
    if cert.witness.is_some() {
        cert.verdict = Verdict::Fail;
    } else {
        cert.beta = Some(beta);
    }
    Ok(cert)
}

/// Pairs scanned by the (W4) check: basis vectors, then the probe vectors.
pub fn w4_grid(m: usize, probe: &ProbeSpec) -> Vec<Vector> {
    basis_and(m, probe.vectors(m))
}

/// First (W4) violation at a fixed β.
pub fn w4_witness_at(phi: &dyn Phi, cfg: &ConditionConfig, beta: f64) -> Option<Witness> {
    let grid = w4_grid(phi.dim(), &cfg.probe);
    almost_convex_bruteforce(phi, &grid, &cfg.probe.alphas, beta, cfg.tol).map(|p| {
        let mut w = Witness::new(p.xi, p.beta, p.lhs, p.rhs);
        w.xi2 = Some(p.xi2);
        w.alpha = Some(p.alpha);
        w
    })
}

/// Largest grid β with `φ(β(αξ + α′ξ′)) ≤ αφ(ξ) + α′φ(ξ′)` on all probe
/// pairs.
pub fn check_almost_convex(phi: &dyn Phi, cfg: &ConditionConfig) -> Result<ConditionCertificate> {
    cfg.validate_params()?;
    let grid = w4_grid(phi.dim(), &cfg.probe);
    let search = search_beta(&cfg.beta_grid, |beta| -> Result<Option<Witness>> {
        Ok(w4_witness_at(phi, cfg, beta))
    })?;
    let mut cert = ConditionCertificate::new(ConditionTag::W4);
    cert.probes = grid.len() * grid.len() * cfg.probe.alphas.len();
    cert.eligible = cert.probes;
    search.apply(&mut cert);
    Ok(cert)
}

/// Smallest `i` with `2^i ≥ m + 1`.
pub fn doubling_exponent(m: usize) -> u32 {
    let mut i = 0;
    while (1usize << i) < m + 1 {
        i += 1;
    }
    i
}

/// From a passing (W4) certificate with `β_ac`, verifies
/// `φ(β_ac^i ξ) ≤ env(ξ) + slack` and `env ≤ φ` on the envelope grid.
pub fn certify_equivalence_conv(
    phi: &dyn Phi,
    cert_w4: &ConditionCertificate,
    spec: &EnvelopeSpec,
    tol: f64,
) -> Result<ConditionCertificate> {
    let Some(beta_ac) = cert_w4.beta.filter(|_| cert_w4.passed()) else {
        return Err(Error::Precondition("the (W4) certificate did not pass".into()));
    };
    let m = phi.dim();
    let i = doubling_exponent(m);
    let beta_prime = beta_ac.powi(i as i32);
    let env = Envelope::build(phi, spec)?;
    let mut cert = ConditionCertificate::new(ConditionTag::Equivalence);
    cert.derive("m", m);
    cert.derive("i", i);
    cert.derive("beta_ac", beta_ac);
    cert.derive("beta_prime", beta_prime);
    cert.derive("envelope", env.describe());
    cert.probes = env.input.len();
    for ((xi, v), e) in env.input.points.iter().zip(&env.input.values).zip(&env.values) {
        if !e.le_tol(*v, tol) {
            let mut w = Witness::new(xi.clone(), 1.0, *e, *v);
            w.note = "env(xi) > phi(xi)".into();
            cert.witness = Some(w);
            break;
        }
        if e.is_infinite() {
            continue;
        }
        cert.eligible += 1;
        let lhs = phi.value(&xi.scaled(beta_prime));
        let rhs = ExtReal::finite(e.get() + env.slack);
        if !lhs.le_tol(rhs, tol) {
            let mut w = Witness::new(xi.clone(), beta_prime, lhs, rhs);
            w.note = "phi(beta'*xi) > env(xi) + slack".into();
            cert.witness = Some(w);
            break;
        }
    }
    if cert.witness.is_some() {
        cert.verdict = Verdict::Fail;
    } else {
        cert.beta = Some(beta_prime);
    }
    Ok(cert)
}
