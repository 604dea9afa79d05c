use std::fmt;

use super::ext_real::ExtReal;
use super::family::Phi;
use super::probe::ProbeSpec;
use super::vector::Vector;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Axiom {
    /// `Φ(0) = 0` and `Φ(tξ) → 0` as `t → 0`.
    LimitAtZero,
    /// `Φ(tξ) → ∞` as `t → ∞`.
    LimitAtInfinity,
    /// Continuity into `[0, ∞]` along rays: once `∞`, stays `∞`.
    Continuity,
    /// Convexity on sampled pairs.
    Convexity,
}

impl Axiom {
    pub const ALL: [Axiom; 4] = [
        Axiom::LimitAtZero,
        Axiom::LimitAtInfinity,
        Axiom::Continuity,
        Axiom::Convexity,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Axiom::LimitAtZero => "limit-at-zero",
            Axiom::LimitAtInfinity => "limit-at-infinity",
            Axiom::Continuity => "continuity",
            Axiom::Convexity => "convexity",
        }
    }
}

/// A violating input: `ξ`, and for convexity also `ξ′` and `α`.
#[derive(Clone, Debug, PartialEq)]
pub struct AxiomWitness {
    pub xi: Vector,
    pub xi2: Option<Vector>,
    pub alpha: Option<f64>,
    pub lhs: ExtReal,
    pub rhs: ExtReal,
}

impl fmt::Display for AxiomWitness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (&self.xi2, self.alpha) {
            (Some(xi2), Some(a)) => write!(f, "({}, {}, {}) lhs={} rhs={}", self.xi, xi2, a, self.lhs, self.rhs),
            _ => write!(f, "({}) lhs={} rhs={}", self.xi, self.lhs, self.rhs),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct AxiomResult {
    pub axiom: Axiom,
    pub pass: bool,
    pub witness: Option<AxiomWitness>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct StrongPhiReport {
    pub results: Vec<AxiomResult>,
}

impl StrongPhiReport {
    pub fn all_pass(&self) -> bool {
        self.results.iter().all(|r| r.pass)
    }

    pub fn get(&self, axiom: Axiom) -> &AxiomResult {
        self.results.iter().find(|r| r.axiom == axiom).expect("all axioms are reported")
    }
}

impl fmt::Display for StrongPhiReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in &self.results {
            write!(f, "{}: {}", r.axiom.name(), if r.pass { "pass" } else { "fail" })?;
            if let Some(w) = &r.witness {
                write!(f, " witness={w}")?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

const RAY_OCTAVES: i32 = 60;
const GROWTH_FLOOR: f64 = 1e6;

fn result(axiom: Axiom, witness: Option<AxiomWitness>) -> AxiomResult {
    AxiomResult {
        axiom,
        pass: witness.is_none(),
        witness,
    }
}

fn single(xi: Vector, lhs: ExtReal, rhs: ExtReal) -> AxiomWitness {
    AxiomWitness {
        xi,
        xi2: None,
        alpha: None,
        lhs,
        rhs,
    }
}

fn limit_at_zero(phi: &dyn Phi, dirs: &[Vector], tol: f64) -> Option<AxiomWitness> {
    let m = phi.dim();
    let v0 = phi.value(&vec![0.0; m]);
    if v0 != ExtReal::ZERO {
        return Some(single(Vector::zeros(m), v0, ExtReal::ZERO));
    }
    for u in dirs {
        let scale = phi.value(u).to_finite().unwrap_or(1.0).max(1.0);
        let xi = u.scaled(2f64.powi(-RAY_OCTAVES));
        let v = phi.value(&xi);
        if !v.le_tol(ExtReal::ZERO, tol * scale) {
            return Some(single(xi, v, ExtReal::finite(tol * scale)));
        }
    }
    None
}

fn limit_at_infinity(phi: &dyn Phi, dirs: &[Vector]) -> Option<AxiomWitness> {
    for u in dirs {
        let xi = u.scaled(2f64.powi(RAY_OCTAVES));
        let v = phi.value(&xi);
        if v < ExtReal::finite(GROWTH_FLOOR) {
            return Some(single(xi, v, ExtReal::finite(GROWTH_FLOOR)));
        }
    }
    None
}

fn continuity(phi: &dyn Phi, dirs: &[Vector]) -> Option<AxiomWitness> {
    // quarter-octave steps along each ray
    for u in dirs {
        let mut seen_inf: Option<Vector> = None;
        for k in -4 * RAY_OCTAVES..=4 * RAY_OCTAVES {
            let xi = u.scaled(2f64.powf(k as f64 / 4.0));
            let v = phi.value(&xi);
            match (&seen_inf, v.is_infinite()) {
                (None, true) => seen_inf = Some(xi),
                (Some(_), false) => return Some(single(xi, v, ExtReal::INFINITY)),
                _ => {}
            }
        }
    }
    None
}

fn convexity(phi: &dyn Phi, probe: &ProbeSpec) -> Option<AxiomWitness> {
    let m = phi.dim();
    let mut vectors: Vec<Vector> = Vec::new();
    for i in 0..m {
        vectors.push(Vector::basis(m, i));
    }
    vectors.extend(probe.vectors(m));
    vectors.dedup();
    let values: Vec<ExtReal> = vectors.iter().map(|v| phi.value(v)).collect();
    for (i, a) in vectors.iter().enumerate() {
        for (j, b) in vectors.iter().enumerate() {
            if i == j {
                continue;
            }
            for &alpha in &probe.alphas {
                let rhs = values[i].scale(alpha) + values[j].scale(1.0 - alpha);
                if rhs.is_infinite() {
                    continue;
                }
                let mid = Vector::combine(alpha, a, 1.0 - alpha, b);
                let lhs = phi.value(&mid);
                if !lhs.le_tol(rhs, probe.tol) {
                    return Some(AxiomWitness {
                        xi: a.clone(),
                        xi2: Some(b.clone()),
                        alpha: Some(alpha),
                        lhs,
                        rhs,
                    });
                }
            }
        }
    }
    None
}

/// Sampled check of the strong Φ-function axioms: decay at 0, growth at
/// ∞, continuity into `[0, ∞]` along rays and convexity on probe pairs.
///
/// A jump to `∞` along a ray is accepted as long as the ray stays at `∞`
/// afterwards.
pub fn check_strong_phi(phi: &dyn Phi, probe: &ProbeSpec) -> StrongPhiReport {
    let dirs = probe.directions(phi.dim());
    StrongPhiReport {
        results: vec![
            result(Axiom::LimitAtZero, limit_at_zero(phi, &dirs, probe.tol)),
            result(Axiom::LimitAtInfinity, limit_at_infinity(phi, &dirs)),
            result(Axiom::Continuity, continuity(phi, &dirs)),
            result(Axiom::Convexity, convexity(phi, probe)),
        ],
    }
}
