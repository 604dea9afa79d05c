use crate::error::{Error, Result};
use crate::phi_core::{norm, sphere_directions, ExtReal, Phi, Vector};

const RAY_CAP: i32 = 60;
const MAX_BISECTIONS: usize = 80;
pub const DEFAULT_GAUGE_TOL: f64 = 1e-12;

/// `K_s = {ξ | φ(βξ) ≤ s}`.
pub struct GaugeSet<P> {
    pub phi: P,
    pub s: f64,
    pub beta: f64,
    /// `K_s ⊂ B(0, R)`; `∞` when some probed ray never leaves `K_s`.
    pub bounding_radius: f64,
    /// Smallest probed boundary distance.
    pub inradius: f64,
}

impl<P: Phi> GaugeSet<P> {
    /// Checks that probed rays start inside `K_s` and estimates the inner
    /// and outer radii along the default sphere directions.
    pub fn new(phi: P, s: f64, beta: f64) -> Result<GaugeSet<P>> {
        if !(s > 0.0 && s.is_finite()) {
            return Err(Error::InvalidParameter(format!("gauge level s must be positive and finite, got {s}")));
        }
        if !(beta > 0.0 && beta <= 1.0) {
            return Err(Error::InvalidParameter(format!("gauge scale beta must lie in (0, 1], got {beta}")));
        }
        let m = phi.dim();
        let mut set = GaugeSet {
            phi,
            s,
            beta,
            bounding_radius: 0.0,
            inradius: f64::INFINITY,
        };
        let mut dirs = sphere_directions(m, None);
        let minus: Vec<Vector> = dirs.iter().map(|u| u.scaled(-1.0)).collect();
        dirs.extend(minus);
        for u in &dirs {
            let r = set.ray_exit(u)?;
            set.inradius = set.inradius.min(r);
            set.bounding_radius = set.bounding_radius.max(r);
        }
        Ok(set)
    }

    pub fn dim(&self) -> usize {
        self.phi.dim()
    }

    pub fn contains(&self, xi: &[f64]) -> bool {
        let scaled: Vec<f64> = xi.iter().map(|x| x * self.beta).collect();
        self.phi.value(&scaled) <= ExtReal::finite(self.s)
    }

    /// Distance from 0 to `∂K_s` along the unit vector `u` (coarse).
    fn ray_exit(&self, u: &[f64]) -> Result<f64> {
        let at = |t: f64| -> Vec<f64> { u.iter().map(|x| x * t).collect() };
        if !self.contains(&at(2f64.powi(-RAY_CAP))) {
            return Err(Error::InteriorCheck(format!(
                "phi(beta*xi) > s = {} already at |xi| = 2^-{RAY_CAP} along {}",
                self.s,
                Vector::from(u)
            )));
        }
        let mut lo = 2f64.powi(-RAY_CAP);
        let mut hi = lo;
        loop {
            hi *= 2.0;
            if !self.contains(&at(hi)) {
                break;
            }
            lo = hi;
            if hi >= 2f64.powi(RAY_CAP) {
                return Ok(f64::INFINITY);
            }
        }
        for _ in 0..40 {
            let mid = 0.5 * (lo + hi);
            if self.contains(&at(mid)) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Ok(lo)
    }
}

/// `‖ξ‖_K = inf{λ > 0 | ξ/λ ∈ K}` by geometric bisection to relative
/// tolerance `tol`.
pub fn minkowski_gauge<P: Phi>(k: &GaugeSet<P>, xi: &[f64], tol: f64) -> ExtReal {
    let len = norm(xi);
    if len == 0.0 {
        return ExtReal::ZERO;
    }
    let inside = |lambda: f64| -> bool {
        let v: Vec<f64> = xi.iter().map(|x| x / lambda).collect();
        k.contains(&v)
    };
    // hi: ξ/hi ∈ K; lo: ξ/lo ∉ K
    let mut hi = 2.0 * len / k.inradius;
    while !inside(hi) {
        hi *= 2.0;
        if !hi.is_finite() {
            return ExtReal::INFINITY;
        }
    }
    let mut lo = if k.bounding_radius.is_finite() {
        (0.5 * len / k.bounding_radius).min(hi * 0.5)
    } else {
        hi * 0.5
    };
    while inside(lo) {
        hi = lo;
        lo *= 0.5;
        if lo < len * 2f64.powi(-2 * RAY_CAP) {
            return ExtReal::ZERO;
        }
    }
    for _ in 0..MAX_BISECTIONS {
        if hi / lo - 1.0 <= tol {
            break;
        }
        let mid = (lo * hi).sqrt();
        if inside(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    ExtReal::finite((lo * hi).sqrt())
}

/// `N_s(ξ) = s·max{1, ‖ξ‖_{K_s}}`.
pub struct Ns<P> {
    pub set: GaugeSet<P>,
    pub tol: f64,
}

impl<P: Phi> Ns<P> {
    pub fn gauge(&self, xi: &[f64]) -> ExtReal {
        minkowski_gauge(&self.set, xi, self.tol)
    }
}

impl<P: Phi> Phi for Ns<P> {
    fn dim(&self) -> usize {
        self.set.dim()
    }
    fn value(&self, xi: &[f64]) -> ExtReal {
        self.gauge(xi).max(ExtReal::ONE).scale(self.set.s)
    }
}

/// `M_s(ξ) = min{φ(βξ), N_s(ξ)}`.
pub struct Ms<P> {
    pub ns: Ns<P>,
}

impl<P: Phi> Ms<P> {
    pub fn inner(&self, xi: &[f64]) -> ExtReal {
        let scaled: Vec<f64> = xi.iter().map(|x| x * self.ns.set.beta).collect();
        self.ns.set.phi.value(&scaled)
    }

    pub fn s(&self) -> f64 {
        self.ns.set.s
    }
}

impl<P: Phi> Phi for Ms<P> {
    fn dim(&self) -> usize {
        self.ns.dim()
    }
    fn value(&self, xi: &[f64]) -> ExtReal {
        let inner = self.inner(xi);
        if inner <= ExtReal::finite(self.s()) {
            // inside K_s, where N_s = s ≥ φ(βξ)
            return inner;
        }
        inner.min(self.ns.value(xi))
    }
}

/// The gauge minorant `N_s` and `M_s = min{φ(β·), N_s}` for the level set
/// `K_s = {φ(β·) ≤ s}`.
pub type MinorantPair<P> = Ms<P>;

pub fn build_minorant_pair<P: Phi>(phi: P, s: f64, beta: f64) -> Result<MinorantPair<P>> {
    if s < 1.0 {
        return Err(Error::InvalidParameter(format!("minorant level s must be >= 1, got {s}")));
    }
    let set = GaugeSet::new(phi, s, beta)?;
    Ok(Ms {
        ns: Ns {
            set,
            tol: DEFAULT_GAUGE_TOL,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::phi_core::PhiFunction;

    #[test]
    fn gauge_of_quadratic_level_set() {
        let set = GaugeSet::new(PhiFunction::power_norm(2, 2.0).unwrap(), 4.0, 1.0).unwrap();
        let g = minkowski_gauge(&set, &[6.0, 0.0], 1e-12).get();
        assert!((g - 3.0).abs() < 1e-9, "{g}");
        assert_eq!(minkowski_gauge(&set, &[0.0, 0.0], 1e-12), ExtReal::ZERO);
    }

    #[test]
    fn unit_ball_gauge_is_the_norm() {
        let set = GaugeSet::new(PhiFunction::linfty_indicator(2, 1.0).unwrap(), 1.0, 1.0).unwrap();
        let g = minkowski_gauge(&set, &[2.0, 0.0], 1e-12).get();
        assert!((g - 2.0).abs() < 1e-9);
        let g = minkowski_gauge(&set, &[1.0, -1.0], 1e-12).get();
        assert!((g - 2.0).abs() < 1e-9);
    }

    #[test]
    fn ns_and_ms_values() {
        let pair = build_minorant_pair(PhiFunction::power_norm(2, 2.0).unwrap(), 4.0, 1.0).unwrap();
        assert!((pair.ns.value(&[6.0, 0.0]).get() - 12.0).abs() < 1e-8);
        assert!((pair.value(&[6.0, 0.0]).get() - 12.0).abs() < 1e-8);
        assert_eq!(pair.value(&[1.0, 0.0]).get(), 1.0);
        assert!((pair.value(&[2.0, 0.0]).get() - 4.0).abs() < 1e-9);
    }

    #[test]
    fn unbounded_level_set_has_zero_gauge_along_flat_rays() {
        let set = GaugeSet::new(PhiFunction::min_of_coordinate_squares(2).unwrap(), 1.0, 1.0).unwrap();
        assert!(set.bounding_radius.is_infinite());
        assert_eq!(minkowski_gauge(&set, &[5.0, 0.0], 1e-12), ExtReal::ZERO);
    }

    #[test]
    fn interior_check_rejects_level_below_origin_value() {
        let phi = PhiFunction::tabulated(
            crate::phi_core::Table::new(vec![vec![-1.0, 0.0, 1.0]], vec![ExtReal::finite(2.0); 3]).unwrap(),
        )
        .unwrap();
        assert!(matches!(GaugeSet::new(phi, 1.0, 1.0), Err(Error::InteriorCheck(_))));
    }
}
