use serde::{Deserialize, Serialize};

use super::ext_real::ExtReal;
use super::spatial::{Ball, Domain, SpatialPhiFunction};
use super::vector::Vector;
use crate::error::{Error, Result};

/// One quadrature node of a vector field.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FieldSample {
    pub x: Vector,
    pub value: Vector,
    pub weight: f64,
}

/// A vector field `f: Ω → ℝ^m` known through weighted quadrature nodes.
///
/// Fields built on a cell grid remember the cell half-widths so they can be
/// refined as piecewise-constant fields.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VectorField {
    pub samples: Vec<FieldSample>,
    #[serde(default)]
    pub cell: Option<Vec<f64>>,
}

impl VectorField {
    pub fn new(samples: Vec<FieldSample>) -> Result<VectorField> {
        let f = VectorField { samples, cell: None };
        f.validate()?;
        Ok(f)
    }

    pub fn validate(&self) -> Result<()> {
        let Some(first) = self.samples.first() else {
            return Err(Error::InvalidParameter("vector field has no samples".into()));
        };
        let (n, m) = (first.x.len(), first.value.len());
        for s in &self.samples {
            if !(s.weight > 0.0 && s.weight.is_finite()) {
                return Err(Error::InvalidParameter(format!(
                    "quadrature weight must be positive, got {}",
                    s.weight
                )));
            }
            if s.x.len() != n || s.value.len() != m {
                return Err(Error::InvalidParameter("field samples must share dimensions".into()));
            }
            if s.value.iter().chain(s.x.iter()).any(|v| !v.is_finite()) {
                return Err(Error::InvalidParameter("field samples must be finite".into()));
            }
        }
        Ok(())
    }

    /// Midpoint rule on a `cells^n` grid over a box, with `f` evaluated at
    /// cell centers and weights `density · cell volume`.
    pub fn on_grid(
        lo: &[f64],
        hi: &[f64],
        cells: usize,
        mut f: impl FnMut(&[f64]) -> Vector,
        mut density: impl FnMut(&[f64]) -> f64,
    ) -> Result<VectorField> {
        let n = lo.len();
        if cells == 0 || n == 0 || hi.len() != n {
            return Err(Error::InvalidParameter("grid field needs cells >= 1 and a box".into()));
        }
        let h: Vec<f64> = lo.iter().zip(hi).map(|(a, b)| (b - a) / cells as f64).collect();
        let vol: f64 = h.iter().product();
        let mut samples = Vec::with_capacity(cells.pow(n as u32));
        for idx in 0..cells.pow(n as u32) {
            let mut rest = idx;
            let x: Vec<f64> = (0..n)
                .map(|k| {
                    let i = rest % cells;
                    rest /= cells;
                    lo[k] + (i as f64 + 0.5) * h[k]
                })
                .collect();
            samples.push(FieldSample {
                value: f(&x),
                weight: density(&x) * vol,
                x: Vector(x),
            });
        }
        let field = VectorField {
            samples,
            cell: Some(h.iter().map(|h| h / 2.0).collect()),
        };
        field.validate()?;
        Ok(field)
    }

    /// A constant field on the whole domain of `phi`.
    pub fn constant(phi: &SpatialPhiFunction, value: Vector, cells: usize) -> Result<VectorField> {
        let d = &phi.domain;
        VectorField::on_grid(&d.lo, &d.hi, cells, |_| value.clone(), |x| phi.density.at(x))
    }

    /// Restriction to the nodes lying in `ball`, with weights rescaled so they
    /// sum to `μ(B ∩ Ω)`.
    pub fn restricted(&self, phi: &SpatialPhiFunction, ball: &Ball) -> Result<VectorField> {
        let samples: Vec<FieldSample> = self
            .samples
            .iter()
            .filter(|s| ball.contains(&s.x))
            .cloned()
            .collect();
        if samples.is_empty() {
            return Err(Error::EmptyIntersection);
        }
        let total: f64 = samples.iter().map(|s| s.weight).sum();
        let mu = phi.measure(ball);
        let c = mu / total;
        Ok(VectorField {
            samples: samples
                .into_iter()
                .map(|s| FieldSample {
                    weight: s.weight * c,
                    ..s
                })
                .collect(),
            cell: None,
        })
    }

    pub fn dim(&self) -> usize {
        self.samples.first().map_or(0, |s| s.value.len())
    }

    pub fn total_weight(&self) -> f64 {
        self.samples.iter().map(|s| s.weight).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.samples.iter().all(|s| s.value.iter().all(|v| *v == 0.0))
    }

    /// `c · f`.
    pub fn scaled(&self, c: f64) -> VectorField {
        VectorField {
            samples: self
                .samples
                .iter()
                .map(|s| FieldSample {
                    x: s.x.clone(),
                    value: s.value.scaled(c),
                    weight: s.weight,
                })
                .collect(),
            cell: self.cell.clone(),
        }
    }

    /// `⨍ f dμ`.
    pub fn average(&self) -> Vector {
        let m = self.dim();
        let mut acc = vec![0.0; m];
        let total = self.total_weight();
        for s in &self.samples {
            for (a, v) in acc.iter_mut().zip(s.value.iter()) {
                *a += s.weight * v;
            }
        }
        Vector(acc.into_iter().map(|a| a / total).collect())
    }

    /// Splits every cell into `factor^n` subcells carrying the same value.
    pub fn refined(&self, factor: usize) -> Result<VectorField> {
        let Some(half) = &self.cell else {
            return Err(Error::InvalidParameter("only grid fields can be refined".into()));
        };
        if factor == 0 {
            return Err(Error::InvalidParameter("refinement factor must be >= 1".into()));
        }
        let n = half.len();
        let sub = factor.pow(n as u32);
        let mut samples = Vec::with_capacity(self.samples.len() * sub);
        for s in &self.samples {
            for idx in 0..sub {
                let mut rest = idx;
                let x: Vec<f64> = (0..n)
                    .map(|k| {
                        let i = rest % factor;
                        rest /= factor;
                        let lo = s.x[k] - half[k];
                        lo + (2.0 * i as f64 + 1.0) * half[k] / factor as f64
                    })
                    .collect();
                samples.push(FieldSample {
                    x: Vector(x),
                    value: s.value.clone(),
                    weight: s.weight / sub as f64,
                });
            }
        }
        Ok(VectorField {
            samples,
            cell: Some(half.iter().map(|h| h / factor as f64).collect()),
        })
    }
}

fn check_field(phi: &SpatialPhiFunction, f: &VectorField) -> Result<()> {
    f.validate()?;
    if f.dim() != phi.dim() {
        return Err(Error::DimensionMismatch {
            expected: phi.dim(),
            got: f.dim(),
        });
    }
    check_points(&phi.domain, f)
}

fn check_points(domain: &Domain, f: &VectorField) -> Result<()> {
    for s in &f.samples {
        if s.x.len() != domain.dim() {
            return Err(Error::DimensionMismatch {
                expected: domain.dim(),
                got: s.x.len(),
            });
        }
        if !domain.contains(&s.x) {
            return Err(Error::SampleOutsideDomain(s.x.to_string()));
        }
    }
    Ok(())
}

fn modular_scaled(phi: &SpatialPhiFunction, f: &VectorField, inv_lambda: f64) -> Result<ExtReal> {
    let mut total = ExtReal::ZERO;
    let mut buf = vec![0.0; f.dim()];
    for s in &f.samples {
        for (b, v) in buf.iter_mut().zip(s.value.iter()) {
            *b = v * inv_lambda;
        }
        total += phi.eval(&s.x, &buf)?.scale(s.weight);
        if total.is_infinite() {
            break;
        }
    }
    Ok(total)
}

/// `ϱ_Φ(f) = Σ_j w_j Φ(x_j, f(x_j))`.
pub fn modular(phi: &SpatialPhiFunction, f: &VectorField) -> Result<ExtReal> {
    check_field(phi, f)?;
    modular_scaled(phi, f, 1.0)
}

const BRACKET_CAP: i32 = 64;

/// `‖f‖_Φ = inf{λ > 0 | ϱ_Φ(f/λ) ≤ 1}` by geometric bracketing and bisection
/// to relative tolerance `tol`.
///
/// Returns `∞` when `ϱ_Φ(f/λ) > 1` for every `λ ≤ 2^64`, and
/// [`Error::BracketExhausted`] when `ϱ_Φ(f/λ) ≤ 1` still holds at
/// `λ = 2^-64` for a nonzero field.
pub fn luxemburg_norm(phi: &SpatialPhiFunction, f: &VectorField, tol: f64) -> Result<ExtReal> {
    if !(tol > 0.0) {
        return Err(Error::InvalidParameter(format!("tol must be positive, got {tol}")));
    }
    check_field(phi, f)?;
    if f.is_zero() {
        return Ok(ExtReal::ZERO);
    }
    let fits = |lambda: f64| -> Result<bool> {
        Ok(modular_scaled(phi, f, 1.0 / lambda)? <= ExtReal::ONE)
    };
    let (mut lo, mut hi);
    if fits(1.0)? {
        hi = 1.0;
        let mut k = 0;
        loop {
            lo = hi / 2.0;
            if !fits(lo)? {
                break;
            }
            hi = lo;
            k += 1;
            if k >= BRACKET_CAP {
                return Err(Error::BracketExhausted(BRACKET_CAP as u32));
            }
        }
    } else {
        lo = 1.0;
        let mut k = 0;
        loop {
            hi = lo * 2.0;
            if fits(hi)? {
                break;
            }
            lo = hi;
            k += 1;
            if k >= BRACKET_CAP {
                return Ok(ExtReal::INFINITY);
            }
        }
    }
    while hi - lo > tol * hi {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if fits(mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(ExtReal::finite(hi))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::phi_core::family::PhiFunction;

    fn unit_square() -> Domain {
        Domain::new(vec![0.0, 0.0], vec![1.0, 1.0]).unwrap()
    }

    fn quadratic() -> SpatialPhiFunction {
        SpatialPhiFunction::uniform(unit_square(), PhiFunction::power_norm(2, 2.0).unwrap())
    }

    #[test]
    fn zero_field_has_zero_modular_and_norm() {
        let phi = quadratic();
        let f = VectorField::constant(&phi, Vector::zeros(2), 4).unwrap();
        assert_eq!(modular(&phi, &f).unwrap(), ExtReal::ZERO);
        assert_eq!(luxemburg_norm(&phi, &f, 1e-9).unwrap(), ExtReal::ZERO);
    }

    #[test]
    fn constant_field_modular_and_norm() {
        let phi = quadratic();
        let f = VectorField::constant(&phi, Vector::basis(2, 0), 4).unwrap();
        assert_eq!(modular(&phi, &f).unwrap().get(), 1.0);
        let g = f.scaled(2.0);
        let n = luxemburg_norm(&phi, &g, 1e-9).unwrap().get();
        assert!((n - 2.0).abs() <= 2e-9 * 2.0, "{n}");
    }

    #[test]
    fn sample_outside_domain_is_rejected() {
        let phi = quadratic();
        let f = VectorField::new(vec![FieldSample {
            x: Vector::from([2.0, 0.5]),
            value: Vector::from([1.0, 0.0]),
            weight: 1.0,
        }])
        .unwrap();
        assert!(matches!(modular(&phi, &f), Err(Error::SampleOutsideDomain(_))));
    }

    #[test]
    fn indicator_can_have_infinite_norm_only_beyond_cap() {
        let phi = SpatialPhiFunction::uniform(unit_square(), PhiFunction::linfty_indicator(2, 1.0).unwrap());
        let f = VectorField::constant(&phi, Vector::from([3.0, 1.0]), 2).unwrap();
        let n = luxemburg_norm(&phi, &f, 1e-9).unwrap().get();
        assert!((n - 4.0).abs() <= 4e-9, "{n}");
    }

    #[test]
    fn refinement_keeps_modular_of_dyadic_field() {
        let phi = quadratic();
        let f = VectorField::on_grid(&[0.0, 0.0], &[1.0, 1.0], 4, |x| Vector::from([x[0] * 4.0, 0.5]), |_| 1.0).unwrap();
        let g = f.refined(2).unwrap();
        assert_eq!(g.samples.len(), 64);
        assert_eq!(modular(&phi, &f).unwrap(), modular(&phi, &g).unwrap());
    }
}
