use std::fmt::{self, Write as _};

use crate::phi_core::{Ball, ExtReal, Vector};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ConditionTag {
    A0,
    Inc1,
    AInc1,
    W4,
    Equivalence,
    A1,
    M,
    Chain,
    Jensen,
    JensenAlmostConvex,
    AzeroReduction,
}

impl ConditionTag {
    pub fn name(self) -> &'static str {
        match self {
            ConditionTag::A0 => "(A0)",
            ConditionTag::Inc1 => "(Inc)1",
            ConditionTag::AInc1 => "(aInc)1",
            ConditionTag::W4 => "(W4)",
            ConditionTag::Equivalence => "phi~conv",
            ConditionTag::A1 => "(A1-psi)",
            ConditionTag::M => "(M-psi)",
            ConditionTag::Chain => "A1=>M chain",
            ConditionTag::Jensen => "Jensen",
            ConditionTag::JensenAlmostConvex => "Jensen (almost convex)",
            ConditionTag::AzeroReduction => "A0 reduction",
        }
    }
}

impl fmt::Display for ConditionTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Pass,
    Fail,
    /// Passed only because no probe satisfied the side constraint.
    Vacuous,
}

/// A concrete violation: `lhs > rhs` at the recorded inputs.
#[derive(Clone, Debug, PartialEq)]
pub struct Witness {
    pub ball: Option<Ball>,
    /// Sample point realizing the extremum, when one exists.
    pub x: Option<Vector>,
    pub xi: Vector,
    pub xi2: Option<Vector>,
    pub alpha: Option<f64>,
    pub beta: f64,
    pub lhs: ExtReal,
    pub rhs: ExtReal,
    pub note: String,
}

impl Witness {
    pub fn new(xi: Vector, beta: f64, lhs: ExtReal, rhs: ExtReal) -> Witness {
        Witness {
            ball: None,
            x: None,
            xi,
            xi2: None,
            alpha: None,
            beta,
            lhs,
            rhs,
            note: String::new(),
        }
    }

    /// The inputs as `(ξ, ξ′, α)`, or `(ξ)` for single-vector conditions.
    pub fn tuple(&self) -> String {
        match (&self.xi2, self.alpha) {
            (Some(x2), Some(a)) => format!("({}, {}, {})", self.xi, x2, a),
            _ => format!("({})", self.xi),
        }
    }
}

impl fmt::Display for Witness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} beta={} lhs={} rhs={}", self.tuple(), self.beta, self.lhs, self.rhs)?;
        if let Some(b) = &self.ball {
            write!(f, " ball=B({}, {})", b.center, b.radius)?;
        }
        if let Some(x) = &self.x {
            write!(f, " x={x}")?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConditionCertificate {
    pub condition: ConditionTag,
    pub verdict: Verdict,
    /// Accepted β on pass.
    pub beta: Option<f64>,
    pub derived: Vec<(String, String)>,
    pub witness: Option<Witness>,
    pub sampler: String,
    pub balls: usize,
    pub probes: usize,
    pub eligible: usize,
    pub notes: Vec<String>,
}

impl ConditionCertificate {
    pub fn new(condition: ConditionTag) -> ConditionCertificate {
        ConditionCertificate {
            condition,
            verdict: Verdict::Pass,
            beta: None,
            derived: vec![],
            witness: None,
            sampler: String::new(),
            balls: 0,
            probes: 0,
            eligible: 0,
            notes: vec![],
        }
    }

    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }

    pub fn derive(&mut self, key: &str, value: impl fmt::Display) {
        self.derived.push((key.to_string(), value.to_string()));
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.derived.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    pub fn exit_code(&self) -> i32 {
        match self.verdict {
            Verdict::Pass => 0,
            _ => 1,
        }
    }

    pub fn machine_line(&self) -> String {
        let beta = self.beta.map_or("none".to_string(), |b| b.to_string());
        match self.verdict {
            Verdict::Pass => format!("PASS beta={beta}"),
            Verdict::Vacuous => format!("VACUOUS beta={beta} eligible=0"),
            Verdict::Fail => match &self.witness {
                Some(w) => format!("FAIL witness={w}"),
                None => "FAIL witness=none".to_string(),
            },
        }
    }

    pub fn report(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "condition: {}", self.condition);
        let _ = writeln!(s, "verdict: {:?}", self.verdict);
        let _ = writeln!(s, "beta: {}", self.beta.map_or("none".to_string(), |b| b.to_string()));
        if !self.sampler.is_empty() {
            let _ = writeln!(s, "sampler: {}", self.sampler);
        }
        let _ = writeln!(s, "balls: {}", self.balls);
        let _ = writeln!(s, "probes: {}", self.probes);
        let _ = writeln!(s, "eligible: {}", self.eligible);
        for (k, v) in &self.derived {
            let _ = writeln!(s, "derived.{k}: {v}");
        }
        if let Some(w) = &self.witness {
            let _ = writeln!(s, "witness: {w}");
            if !w.note.is_empty() {
                let _ = writeln!(s, "witness.note: {}", w.note);
            }
        }
        for n in &self.notes {
            let _ = writeln!(s, "note: {n}");
        }
        let _ = writeln!(s, "{}", self.machine_line());
        s
    }

    /// Combines certificates of independent tasks: fail dominates, the
    /// accepted β is the minimum and counts add up.
    pub fn merge(mut self, other: ConditionCertificate) -> ConditionCertificate {
        use Verdict::*;
        self.verdict = match (self.verdict, other.verdict) {
            (Fail, _) | (_, Fail) => Fail,
            (Pass, _) | (_, Pass) => Pass,
            _ => Vacuous,
        };
        if self.witness.is_none() {
            self.witness = other.witness;
        }
        self.beta = match (self.beta, other.beta) {
            (Some(a), Some(b)) => Some(a.min(b)),
            (a, b) => a.or(b),
        };
        if self.verdict == Fail {
            self.beta = None;
        }
        self.balls += other.balls;
        self.probes += other.probes;
        self.eligible += other.eligible;
        self.derived.extend(other.derived);
        self.notes.extend(other.notes);
        self
    }
}

/// Outcome of testing every β of a grid.
pub struct BetaSearch {
    /// Largest passing β.
    pub best: Option<f64>,
    /// Witness at the smallest failing β.
    pub witness: Option<Witness>,
    pub failing: usize,
    pub tested: usize,
    /// Every β below a passing one passes too.
    pub monotone: bool,
}

/// Tests every β of the decreasing `grid`.
pub fn search_beta<E>(grid: &[f64], mut test: impl FnMut(f64) -> Result<Option<Witness>, E>) -> Result<BetaSearch, E> {
    let mut out = BetaSearch {
        best: None,
        witness: None,
        failing: 0,
        tested: 0,
        monotone: true,
    };
    for &beta in grid {
        out.tested += 1;
        match test(beta)? {
            None => {
                if out.best.is_none() {
                    out.best = Some(beta);
                }
            }
            Some(w) => {
                out.failing += 1;
                if out.best.is_some() {
                    out.monotone = false;
                }
                out.witness = Some(w);
            }
        }
    }
    Ok(out)
}

impl BetaSearch {
    /// Fills verdict, β and witness; the verdict is Pass when some β passes.
    pub fn apply(self, cert: &mut ConditionCertificate) {
        cert.derive("betas_failing", format!("{}/{}", self.failing, self.tested));
        if !self.monotone {
            cert.notes.push("some beta fails below a passing beta".into());
        }
        match self.best {
            Some(b) => {
                cert.verdict = Verdict::Pass;
                cert.beta = Some(b);
                if let Some(w) = self.witness {
                    cert.derive("smaller_beta_failure", w);
                }
            }
            None => {
                cert.verdict = Verdict::Fail;
                cert.beta = None;
                cert.witness = self.witness;
            }
        }
    }
}
