use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::phi_core::{luxemburg_norm, modular, Ball, ExtReal, SpatialPhiFunction, Vector, VectorField};

/// Random piecewise-constant fields on the bounding box of `B ∩ Ω`,
/// rescaled so that `ϱ_Φ(f) ≤ 1`.
pub struct RandomFields {
    rng: ChaCha8Rng,
    pub cells: usize,
}

impl RandomFields {
    pub fn new(seed: u64, cells: usize) -> RandomFields {
        RandomFields {
            rng: ChaCha8Rng::seed_from_u64(seed),
            cells,
        }
    }

    pub fn next(&mut self, phi: &SpatialPhiFunction, ball: &Ball) -> Result<VectorField> {
        let d = &phi.domain;
        let n = phi.space_dim();
        let lo: Vec<f64> = (0..n).map(|k| (ball.center[k] - ball.radius).max(d.lo[k])).collect();
        let hi: Vec<f64> = (0..n).map(|k| (ball.center[k] + ball.radius).min(d.hi[k])).collect();
        let m = phi.dim();
        // magnitudes spread over several scales, directions arbitrary
        let scale = 10f64.powf(self.rng.random_range(-2.0..4.0));
        let rng = &mut self.rng;
        let field = VectorField::on_grid(
            &lo,
            &hi,
            self.cells,
            |_| Vector((0..m).map(|_| scale * rng.random_range(-1.0..1.0)).collect()),
            |x| phi.density.at(x),
        )?;
        let target = self.rng.random_range(0.05..1.0);
        if modular(phi, &field)? <= ExtReal::finite(target) {
            return Ok(field);
        }
        let norm = luxemburg_norm(phi, &field, 1e-9)?;
        match norm.to_finite() {
            // ϱ(f/λ) ≤ 1 at the returned λ; shrink further by the target
            Some(l) if l > 0.0 => Ok(field.scaled(target / l)),
            _ => Ok(field.scaled(0.0)),
        }
    }
}
