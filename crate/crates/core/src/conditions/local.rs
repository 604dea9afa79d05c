use super::basic::a0_constant;
use super::certificate::Witness;
use super::config::ConditionConfig;
use crate::envelope::{hull, ConvexMinorant, GridFunction, PolarEnvelope, PolarSpec};
use crate::error::{Error, Result};
use crate::phi_core::{Ball, BallSample, ExtReal, Phi, SpatialPhiFunction, Vector};

const SAT_FACTORS: [f64; 4] = [1.0, 0.9, 0.7, 0.5];
const SAT_CAP: f64 = 1e150;

/// A probe vector with the quantities both sides of the ball conditions
/// need.
#[derive(Clone, Debug)]
pub struct LocalProbe {
    pub xi: Vector,
    /// `Φ_B^-(ξ)`.
    pub minus: ExtReal,
    /// `Ψ_B^-(ξ)`.
    pub psi_minus: ExtReal,
    /// `(Φ_B^-)^conv(ξ)` on the ball's envelope, when built.
    pub env: ExtReal,
    /// `env` minus its slack: the value used on the right of (M).
    pub env_lower: ExtReal,
    /// Lower estimate of `(Ψ_B^-)^conv(ξ)` used for eligibility in (M).
    pub psi_env_lower: ExtReal,
}

pub struct BallAnalysis {
    pub ball: Ball,
    pub measure: f64,
    /// `K/μ(B)`.
    pub limit: f64,
    pub sample: BallSample,
    pub probes: Vec<LocalProbe>,
    pub envelope: Option<PolarEnvelope>,
    /// Probe directions along which the eligible set of (M) reaches the
    /// envelope window.
    pub unbounded_dirs: usize,
}

/// Per-ball data shared by the (A1), (M), chain and reduction checks.
pub struct LocalAnalysis {
    pub balls: Vec<BallAnalysis>,
    pub beta0: f64,
    pub tol: f64,
    pub with_envelope: bool,
    pub sampler: String,
}

/// Largest `t` with `f(t) ≤ limit` for nondecreasing `f`, by doubling from
/// `start` and bisecting; `None` if `f` stays below up to `SAT_CAP`.
fn saturation(mut f: impl FnMut(f64) -> ExtReal, limit: f64, start: f64) -> Option<f64> {
    let mut below = |t: f64| f(t) <= ExtReal::finite(limit);
    let (mut lo, mut hi) = (0.0, start);
    while below(hi) {
        lo = hi;
        hi *= 2.0;
        if hi > SAT_CAP {
            return None;
        }
    }
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if below(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Some(lo)
}

fn dedup(v: &mut Vec<Vector>) {
    let mut out: Vec<Vector> = Vec::with_capacity(v.len());
    for p in v.drain(..) {
        if p.iter().any(|x| *x != 0.0) && !out.contains(&p) {
            out.push(p);
        }
    }
    *v = out;
}

impl LocalAnalysis {
    pub fn new(phi: &SpatialPhiFunction, cfg: &ConditionConfig, with_envelope: bool) -> Result<LocalAnalysis> {
        cfg.validate(phi)?;
        if cfg.balls.is_empty() {
            return Err(Error::Config("the ball family is empty".into()));
        }
        let beta0 = a0_constant(phi, cfg)?;
        let psi = cfg.psi(phi);
        let same = cfg.psi_is_phi(phi);
        let m = phi.dim();
        let dirs = cfg.probe.directions(m);
        let levels = cfg.radial_levels(beta0);
        let mut balls = Vec::with_capacity(cfg.balls.len());
        for ball in &cfg.balls {
            let sample = phi.ball_sample(ball, &cfg.sampler)?;
            let psi_sample = if same {
                None
            } else {
                Some(psi.ball_sample(ball, &cfg.sampler)?)
            };
            let psi_s = psi_sample.as_ref().unwrap_or(&sample);
            let measure = sample.measure;
            let limit = cfg.k / measure;
            let mut xs: Vec<Vector> = vec![];
            for r in &levels {
                xs.extend(dirs.iter().map(|u| u.scaled(*r)));
            }
            for u in &dirs {
                let f = |t: f64| psi_s.minus_with_arg(&u.scaled(t)).0;
                if let Some(t) = saturation(f, limit, levels[0]) {
                    xs.extend(SAT_FACTORS.iter().map(|c| u.scaled(c * t)));
                }
            }
            dedup(&mut xs);
            let mut unbounded_dirs = 0;
            let mut envelope = None;
            let mut psi_envelope = None;
            if with_envelope {
                let r_min = xs.iter().map(|x| crate::phi_core::norm(x)).fold(f64::INFINITY, f64::min) / 4.0;
                let r_max = 4.0 * xs.iter().map(|x| crate::phi_core::norm(x)).fold(0.0, f64::max);
                let mut spec = PolarSpec::new(m, r_min, r_max);
                spec.directions = cfg.envelope.directions;
                spec.ratio = cfg.envelope.ratio;
                // locate where the (M) constraint saturates on a first pass
                let pts = spec.points(false);
                let vals = pts.iter().map(|p| psi_s.minus().value(p)).collect();
                let first = ConvexMinorant::new(&GridFunction::new(pts, vals)?)?;
                let mut ev = first.evaluator();
                for u in &dirs {
                    let edge = r_max / 2.0;
                    let t = match saturation(|t| ev.eval(&u.scaled(t)), limit, levels[0]) {
                        Some(t) if t < edge => t,
                        _ => {
                            unbounded_dirs += 1;
                            edge
                        }
                    };
                    xs.extend(SAT_FACTORS.iter().map(|c| u.scaled(c * t)));
                }
                dedup(&mut xs);
                envelope = Some(PolarEnvelope::build_with(&sample.minus(), &spec, &xs)?);
                if !same {
                    psi_envelope = Some(PolarEnvelope::build_with(&psi_s.minus(), &spec, &xs)?);
                }
            }
            let mut probes = Vec::with_capacity(xs.len());
            let mut ev = envelope.as_ref().map(|e| e.minorant.evaluator());
            let mut pev = psi_envelope.as_ref().map(|e| e.minorant.evaluator());
            for xi in xs {
                let minus = sample.minus_with_arg(&xi).0;
                let psi_minus = psi_s.minus_with_arg(&xi).0;
                let (mut env, mut env_lower, mut psi_env_lower) = (minus, minus, psi_minus);
                if let (Some(e), Some(envelope)) = (ev.as_mut(), envelope.as_ref()) {
                    env = hull::cap(e.eval(&xi), minus);
                    if env.is_infinite() && minus.is_finite() {
                        return Err(Error::WindowTooSmall(format!(
                            "probe {xi} lies outside the envelope support {}",
                            envelope.spec.describe()
                        )));
                    }
                    env_lower = lower(env, envelope);
                    psi_env_lower = env_lower;
                }
                if let (Some(e), Some(pe)) = (pev.as_mut(), psi_envelope.as_ref()) {
                    psi_env_lower = lower(hull::cap(e.eval(&xi), psi_minus), pe);
                }
                probes.push(LocalProbe {
                    xi,
                    minus,
                    psi_minus,
                    env,
                    env_lower,
                    psi_env_lower,
                });
            }
            balls.push(BallAnalysis {
                ball: ball.clone(),
                measure,
                limit,
                sample,
                probes,
                envelope,
                unbounded_dirs,
            });
        }
        Ok(LocalAnalysis {
            balls,
            beta0,
            tol: cfg.tol,
            with_envelope,
            sampler: cfg.sampler.describe(phi.space_dim()),
        })
    }

    pub fn probe_count(&self) -> usize {
        self.balls.iter().map(|b| b.probes.len()).sum()
    }

    /// `Ψ_B^-(ξ) ≤ K/μ(B)`.
    pub fn a1_eligible(&self, b: usize, j: usize) -> bool {
        let ball = &self.balls[b];
        ball.probes[j].psi_minus.le_tol(ExtReal::finite(ball.limit), self.tol)
    }

    /// `(Ψ_B^-)^conv(ξ) ≤ K/μ(B)`, with the slack counted in favour of
    /// eligibility.
    pub fn m_eligible(&self, b: usize, j: usize) -> bool {
        let ball = &self.balls[b];
        ball.probes[j].psi_env_lower.le_tol(ExtReal::finite(ball.limit), self.tol)
    }

    fn violation(&self, b: usize, j: usize, beta: f64, rhs: ExtReal, note: &str) -> Option<Witness> {
        let ball = &self.balls[b];
        let xi = &ball.probes[j].xi;
        let (lhs, idx) = ball.sample.plus_with_arg(&xi.scaled(beta));
        if lhs.le_tol(rhs, self.tol) {
            return None;
        }
        let mut w = Witness::new(xi.clone(), beta, lhs, rhs);
        w.ball = Some(ball.ball.clone());
        w.x = Some(ball.sample.points[idx].clone());
        w.note = note.to_string();
        Some(w)
    }

    /// `Φ_B^+(βξ) ≤ Φ_B^-(ξ) + 1`, regardless of eligibility.
    pub fn a1_instance(&self, b: usize, j: usize, beta: f64) -> Option<Witness> {
        let rhs = self.balls[b].probes[j].minus + ExtReal::ONE;
        self.violation(b, j, beta, rhs, "phi+(beta xi) > phi-(xi) + 1")
    }

    /// `Φ_B^+(βξ) ≤ (Φ_B^-)^conv(ξ) − slack + 1`, regardless of eligibility.
    pub fn m_instance(&self, b: usize, j: usize, beta: f64) -> Option<Witness> {
        let rhs = self.balls[b].probes[j].env_lower + ExtReal::ONE;
        self.violation(b, j, beta, rhs, "phi+(beta xi) > conv(phi-)(xi) - slack + 1")
    }

    /// Range form: `Φ_B^+(βξ) ≤ (Φ_B^-)^conv(ξ)` when the envelope lies in
    /// `[1, K/μ(B)]`; `None` when the probe is outside that range.
    pub fn range_instance(&self, b: usize, j: usize, beta: f64) -> Option<Witness> {
        if !self.range_eligible(b, j) {
            return None;
        }
        let rhs = self.balls[b].probes[j].env_lower;
        self.violation(b, j, beta, rhs, "phi+(beta xi) > conv(phi-)(xi) on [1, K/mu]")
    }

    pub fn range_eligible(&self, b: usize, j: usize) -> bool {
        let p = &self.balls[b].probes[j];
        self.m_eligible(b, j) && p.env_lower >= ExtReal::ONE
    }

    /// First (A1) violation over eligible probes of all balls.
    pub fn a1_witness(&self, beta: f64) -> Option<Witness> {
        self.scan(|b, j| self.a1_eligible(b, j), |b, j| self.a1_instance(b, j, beta))
    }

    /// First (M) violation over eligible probes of all balls.
    pub fn m_witness(&self, beta: f64) -> Option<Witness> {
        self.scan(|b, j| self.m_eligible(b, j), |b, j| self.m_instance(b, j, beta))
    }

    pub fn range_witness(&self, beta: f64) -> Option<Witness> {
        self.scan(|b, j| self.range_eligible(b, j), |b, j| self.range_instance(b, j, beta))
    }

    fn scan(
        &self,
        eligible: impl Fn(usize, usize) -> bool,
        instance: impl Fn(usize, usize) -> Option<Witness>,
    ) -> Option<Witness> {
        for (b, ball) in self.balls.iter().enumerate() {
            for j in 0..ball.probes.len() {
                if eligible(b, j) {
                    if let Some(w) = instance(b, j) {
                        return Some(w);
                    }
                }
            }
        }
        None
    }

    pub fn a1_eligible_count(&self) -> usize {
        self.count(|b, j| self.a1_eligible(b, j))
    }

    pub fn m_eligible_count(&self) -> usize {
        self.count(|b, j| self.m_eligible(b, j))
    }

    fn count(&self, f: impl Fn(usize, usize) -> bool) -> usize {
        self.balls
            .iter()
            .enumerate()
            .map(|(b, ball)| (0..ball.probes.len()).filter(|&j| f(b, j)).count())
            .sum()
    }

    pub fn max_slack_rel(&self) -> f64 {
        self.balls
            .iter()
            .filter_map(|b| b.envelope.as_ref().map(|e| e.slack_rel))
            .fold(0.0, f64::max)
    }

    pub fn unbounded_dirs(&self) -> usize {
        self.balls.iter().map(|b| b.unbounded_dirs).sum()
    }
}

fn lower(env: ExtReal, envelope: &PolarEnvelope) -> ExtReal {
    match env.to_finite() {
        Some(e) => ExtReal::finite((e - envelope.slack_at(env)).max(0.0)),
        None => env,
    }
}
