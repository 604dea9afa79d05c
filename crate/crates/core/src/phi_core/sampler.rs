use serde::{Deserialize, Serialize};

use super::spatial::{Ball, Domain};
use super::vector::Vector;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SamplePattern {
    /// Halton sequence (bases 2, 3, 5), started at index `seed + 1`.
    Halton,
    /// Product grid with `ceil(count^{1/n})` nodes per axis.
    Grid,
}

/// Deterministic sampling of `B ∩ Ω` used to approximate `ess inf` / `ess sup`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SamplerSpec {
    /// Points per ball besides the center; defaults to `64·n`.
    #[serde(default)]
    pub count: Option<usize>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_pattern")]
    pub pattern: SamplePattern,
}

fn default_pattern() -> SamplePattern {
    SamplePattern::Halton
}

impl Default for SamplerSpec {
    fn default() -> Self {
        SamplerSpec {
            count: None,
            seed: 0,
            pattern: SamplePattern::Halton,
        }
    }
}

const PRIMES: [u64; 3] = [2, 3, 5];
const MAX_ATTEMPT_FACTOR: usize = 256;

fn radical_inverse(mut i: u64, base: u64) -> f64 {
    let inv = 1.0 / base as f64;
    let mut f = inv;
    let mut r = 0.0;
    while i > 0 {
        r += (i % base) as f64 * f;
        i /= base;
        f *= inv;
    }
    r
}

impl SamplerSpec {
    pub fn with_count(count: usize) -> SamplerSpec {
        SamplerSpec {
            count: Some(count),
            ..SamplerSpec::default()
        }
    }

    pub fn count_for(&self, n: usize) -> usize {
        self.count.unwrap_or(64 * n)
    }

    /// One-line description for reports.
    pub fn describe(&self, n: usize) -> String {
        format!(
            "pattern={} count={} seed={} center=true",
            match self.pattern {
                SamplePattern::Halton => "halton",
                SamplePattern::Grid => "grid",
            },
            self.count_for(n),
            self.seed
        )
    }

    /// Points of `[0,1]^n`: Halton or a product grid.
    fn unit_points(&self, n: usize, count: usize) -> Box<dyn Iterator<Item = Vec<f64>> + '_> {
        match self.pattern {
            SamplePattern::Halton => {
                let seed = self.seed;
                Box::new((1..).map(move |i| {
                    (0..n).map(|k| radical_inverse(seed + i, PRIMES[k])).collect()
                }))
            }
            SamplePattern::Grid => {
                let per_axis = ((count as f64).powf(1.0 / n as f64).ceil() as usize).max(2);
                let total = per_axis.pow(n as u32);
                Box::new((0..total).map(move |mut idx| {
                    let mut u = vec![0.0; n];
                    for slot in u.iter_mut() {
                        *slot = (idx % per_axis) as f64 / (per_axis - 1) as f64;
                        idx /= per_axis;
                    }
                    u
                }))
            }
        }
    }

    /// The center (when in `Ω`) followed by sample points of `B ∩ Ω`.
    pub fn ball_points(&self, domain: &Domain, ball: &Ball) -> Result<Vec<Vector>> {
        let n = domain.dim();
        let count = self.count_for(n);
        let mut pts = Vec::with_capacity(count + 1);
        if domain.contains(&ball.center) {
            pts.push(ball.center.clone());
        }
        let cap = count * MAX_ATTEMPT_FACTOR;
        let mut accepted = 0;
        for u in self.unit_points(n, count).take(cap) {
            let x: Vec<f64> = u
                .iter()
                .zip(ball.center.iter())
                .map(|(u, c)| c + ball.radius * (2.0 * u - 1.0))
                .collect();
            if ball.contains(&x) && domain.contains(&x) {
                pts.push(Vector(x));
                accepted += 1;
                if accepted == count {
                    break;
                }
            }
        }
        if pts.is_empty() {
            return Err(Error::EmptyIntersection);
        }
        Ok(pts)
    }

    /// Center, corners and `count` interior points of `Ω`.
    pub fn domain_points(&self, domain: &Domain) -> Vec<Vector> {
        let n = domain.dim();
        let count = self.count_for(n);
        let mut pts = vec![domain.center()];
        for mask in 0..(1usize << n) {
            pts.push(Vector(
                (0..n)
                    .map(|k| if mask >> k & 1 == 1 { domain.hi[k] } else { domain.lo[k] })
                    .collect(),
            ));
        }
        for u in self.unit_points(n, count).take(count) {
            pts.push(Vector(
                u.iter()
                    .enumerate()
                    .map(|(k, u)| domain.lo[k] + u * (domain.hi[k] - domain.lo[k]))
                    .collect(),
            ));
        }
        pts
    }
}
