use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use super::config::AnalysisConfig;
use super::fields::RandomFields;
use crate::conditions::{
    a1_implies_m_chain_with, certify_equivalence_conv, check_a0, check_a1_with, check_almost_convex,
    check_azero_reduction, check_inc1, check_m_with, jensen_check, search_beta, ConditionCertificate, ConditionConfig,
    ConditionTag, LocalAnalysis, Verdict, Witness,
};
use crate::envelope::{csv::write_csv, Envelope};
use crate::error::{Error, Result};
use crate::oracle::norm_dense_scan;
use crate::phi_core::{geometric_levels, luxemburg_norm, Phi, PhiFunction, SpatialPhiFunction};

/// Conditions accepted by `check`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CheckName {
    A0,
    Inc1,
    AInc1,
    AlmostConvex,
    Equivalence,
    A1,
    M,
    AzeroReduction,
}

impl std::str::FromStr for CheckName {
    type Err = Error;

    fn from_str(s: &str) -> Result<CheckName> {
        Ok(match s.to_ascii_lowercase().as_str() {
            "a0" => CheckName::A0,
            "inc1" => CheckName::Inc1,
            "ainc1" => CheckName::AInc1,
            "almost-convex" | "w4" => CheckName::AlmostConvex,
            "equivalence" | "conv-equivalence" => CheckName::Equivalence,
            "a1" => CheckName::A1,
            "m" => CheckName::M,
            "azero-reduction" | "a0-reduction" => CheckName::AzeroReduction,
            _ => {
                return Err(Error::Config(format!(
                    "unknown condition '{s}' (expected a0, inc1, ainc1, almost-convex, equivalence, a1, m, azero-reduction)"
                )))
            }
        })
    }
}

/// What a command produced: the report text, extra files and the exit code.
pub struct Outcome {
    pub report: String,
    pub files: Vec<(PathBuf, String)>,
    pub code: i32,
}

fn header(cfg: &AnalysisConfig, command: &str) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "command: {command}");
    let _ = writeln!(s, "seed: {}", cfg.seed());
    let _ = writeln!(s, "space_dim: {}", cfg.phi.space_dim());
    let _ = writeln!(s, "dim: {}", cfg.phi.dim());
    s
}

/// The x-independent functions `Φ(x, ·)` checked by pointwise conditions:
/// the single function of a uniform family, else one per domain sample.
fn pointwise(phi: &SpatialPhiFunction, ccfg: &ConditionConfig) -> Result<Vec<PhiFunction>> {
    if let Some(p) = phi.uniform_phi() {
        return Ok(vec![p.clone()]);
    }
    Ok(phi.domain_sample(&ccfg.sampler)?.into_iter().map(|(_, p)| p).collect())
}

fn merged(certs: Vec<ConditionCertificate>) -> ConditionCertificate {
    let mut it = certs.into_iter();
    let first = it.next().expect("at least one certificate");
    it.fold(first, ConditionCertificate::merge)
}

fn ainc1(phi: &dyn Phi, ccfg: &ConditionConfig) -> Result<ConditionCertificate> {
    let search = search_beta(&ccfg.beta_grid, |beta| -> Result<Option<Witness>> {
        Ok(check_inc1(phi, beta, &ccfg.probe)?.witness)
    })?;
    let mut cert = ConditionCertificate::new(ConditionTag::AInc1);
    search.apply(&mut cert);
    Ok(cert)
}

pub fn cmd_check(cfg: &AnalysisConfig, name: CheckName) -> Result<Outcome> {
    let ccfg = cfg.condition_config()?;
    let phi = &cfg.phi;
    let cert = match name {
        CheckName::A0 => check_a0(phi, &ccfg)?,
        CheckName::Inc1 => merged(
            pointwise(phi, &ccfg)?
                .iter()
                .map(|p| check_inc1(p, 1.0, &ccfg.probe))
                .collect::<Result<_>>()?,
        ),
        CheckName::AInc1 => merged(pointwise(phi, &ccfg)?.iter().map(|p| ainc1(p, &ccfg)).collect::<Result<_>>()?),
        CheckName::AlmostConvex => merged(
            pointwise(phi, &ccfg)?
                .iter()
                .map(|p| check_almost_convex(p, &ccfg))
                .collect::<Result<_>>()?,
        ),
        CheckName::Equivalence => {
            let spec = cfg
                .envelope
                .as_ref()
                .ok_or_else(|| Error::Config("the equivalence check needs an [envelope] section".into()))?;
            let mut certs = vec![];
            for p in pointwise(phi, &ccfg)? {
                let w4 = check_almost_convex(&p, &ccfg)?;
                if !w4.passed() {
                    let mut c = ConditionCertificate::new(ConditionTag::Equivalence);
                    c.verdict = Verdict::Fail;
                    c.witness = w4.witness;
                    c.notes.push("(W4) fails, so no equivalence constant is derived".into());
                    certs.push(c);
                    continue;
                }
                certs.push(certify_equivalence_conv(&p, &w4, spec, ccfg.tol)?);
            }
            merged(certs)
        }
        CheckName::A1 => check_a1_with(&LocalAnalysis::new(phi, &ccfg, false)?, &ccfg)?,
        CheckName::M => check_m_with(&LocalAnalysis::new(phi, &ccfg, true)?, &ccfg)?,
        CheckName::AzeroReduction => check_azero_reduction(phi, &ccfg)?,
    };
    let report = header(cfg, &format!("check {name:?}")) + &cert.report();
    Ok(Outcome {
        report,
        files: vec![],
        code: cert.exit_code(),
    })
}

pub fn cmd_envelope(cfg: &AnalysisConfig) -> Result<Outcome> {
    let spec = cfg
        .envelope
        .as_ref()
        .ok_or_else(|| Error::Config("the envelope command needs an [envelope] section".into()))?;
    let phi = cfg
        .phi
        .uniform_phi()
        .ok_or_else(|| Error::Config("the envelope command needs an x-independent phi (family kind = uniform)".into()))?;
    let env = Envelope::build(phi, spec)?;
    let mut csv = Vec::new();
    write_csv(&mut csv, &env).map_err(|e| Error::Config(e.to_string()))?;
    let mut report = header(cfg, "envelope");
    let _ = writeln!(report, "envelope: {}", env.describe());
    let _ = writeln!(report, "points: {}", env.input.len());
    let _ = writeln!(report, "OK envelope.csv");
    Ok(Outcome {
        report,
        files: vec![(PathBuf::from("envelope.csv"), String::from_utf8(csv).expect("csv is utf-8"))],
        code: 0,
    })
}

pub fn cmd_chain(cfg: &AnalysisConfig) -> Result<Outcome> {
    let ccfg = cfg.condition_config()?;
    let phi = &cfg.phi;
    if !ccfg.psi_is_phi(phi) {
        return Err(Error::OutOfScope("the A1 => M chain is only established for psi = phi".into()));
    }
    let plain = LocalAnalysis::new(phi, &ccfg, false)?;
    let a1 = check_a1_with(&plain, &ccfg)?;
    let mut report = header(cfg, "chain");
    report.push_str("[a1]\n");
    report.push_str(&a1.report());
    if !a1.passed() {
        let _ = writeln!(report, "{}", a1.machine_line());
        return Ok(Outcome {
            report,
            files: vec![],
            code: 1,
        });
    }
    let analysis = LocalAnalysis::new(phi, &ccfg, true)?;
    let chain = a1_implies_m_chain_with(&analysis, &a1, &ccfg)?;
    let direct = check_m_with(&analysis, &ccfg)?;
    report.push_str("[chain]\n");
    report.push_str(&chain.report());
    report.push_str("[m]\n");
    report.push_str(&direct.report());
    let (cb, db) = (chain.beta, direct.beta);
    let _ = writeln!(
        report,
        "comparison: chain_beta={} direct_beta={} chain<=direct={}",
        cb.map_or("none".into(), |b| b.to_string()),
        db.map_or("none".into(), |b| b.to_string()),
        matches!((cb, db), (Some(c), Some(d)) if c <= d)
    );
    let _ = writeln!(report, "{}", chain.machine_line());
    Ok(Outcome {
        report,
        files: vec![],
        code: chain.exit_code(),
    })
}

pub fn cmd_jensen(cfg: &AnalysisConfig) -> Result<Outcome> {
    let ccfg = cfg.condition_config()?;
    let spec = cfg.jensen.clone().unwrap_or_default();
    let phi = &cfg.phi;
    let mut report = header(cfg, "jensen");
    let beta = match spec.beta {
        Some(b) => b,
        None => {
            let plain = LocalAnalysis::new(phi, &ccfg, false)?;
            let a1 = check_a1_with(&plain, &ccfg)?;
            if !a1.passed() {
                return Err(Error::Precondition(format!("(A1) fails, no chain beta: {}", a1.machine_line())));
            }
            let analysis = LocalAnalysis::new(phi, &ccfg, true)?;
            let chain = a1_implies_m_chain_with(&analysis, &a1, &ccfg)?;
            chain
                .beta
                .ok_or_else(|| Error::Precondition(format!("chain did not certify: {}", chain.machine_line())))?
        }
    };
    if ccfg.balls.is_empty() {
        return Err(Error::Config("the jensen command needs balls".into()));
    }
    let mut gen = RandomFields::new(cfg.seed(), spec.cells);
    let mut violations = 0;
    let mut first: Option<ConditionCertificate> = None;
    for i in 0..spec.fields {
        let ball = &ccfg.balls[i % ccfg.balls.len()];
        let f = gen.next(phi, ball)?;
        let cert = jensen_check(phi, &f, ball, beta, spec.plus_one, &ccfg.sampler, ccfg.tol)?;
        if !cert.passed() {
            violations += 1;
            first.get_or_insert(cert);
        }
    }
    let _ = writeln!(report, "beta: {beta}");
    let _ = writeln!(report, "plus_one: {}", spec.plus_one);
    let _ = writeln!(report, "fields: {}", spec.fields);
    let _ = writeln!(report, "violations: {violations}");
    match first {
        Some(c) => {
            report.push_str(&c.report());
            Ok(Outcome { report, files: vec![], code: 1 })
        }
        None => {
            let _ = writeln!(report, "PASS beta={beta}");
            Ok(Outcome { report, files: vec![], code: 0 })
        }
    }
}

pub fn cmd_norm(cfg: &AnalysisConfig) -> Result<Outcome> {
    let spec = cfg
        .norm
        .as_ref()
        .ok_or_else(|| Error::Config("the norm command needs a [norm] section".into()))?;
    let tol = cfg.tol.unwrap_or(1e-9);
    let f = spec.field.build(&cfg.phi)?;
    let norm = luxemburg_norm(&cfg.phi, &f, tol)?;
    let grid = geometric_levels(spec.lambda_min, spec.lambda_max, spec.scan_points);
    let scan = norm_dense_scan(&cfg.phi, &f, &grid)?;
    let mut report = header(cfg, "norm");
    let _ = writeln!(report, "luxemburg_norm: {norm}");
    let _ = writeln!(report, "dense_scan: {scan}");
    let _ = writeln!(report, "OK norm={norm}");
    Ok(Outcome { report, files: vec![], code: 0 })
}

/// Writes `report.txt` and any extra files into `dir`.
pub fn write_outputs(dir: &Path, outcome: &Outcome) -> Result<()> {
    let io = |e: std::io::Error| Error::Config(format!("cannot write to {}: {e}", dir.display()));
    std::fs::create_dir_all(dir).map_err(io)?;
    std::fs::write(dir.join("report.txt"), &outcome.report).map_err(io)?;
    for (name, body) in &outcome.files {
        std::fs::write(dir.join(name), body).map_err(io)?;
    }
    Ok(())
}
