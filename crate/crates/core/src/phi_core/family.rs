use serde::{Deserialize, Serialize};

use super::ext_real::ExtReal;
use super::table::Table;
use super::vector::norm;
use crate::error::{Error, Result};

/// Anything that maps `ξ ∈ ℝ^m` to `[0, ∞]`.
///
/// Implementors must be pure: equal inputs give equal outputs.
pub trait Phi: Send + Sync {
    fn dim(&self) -> usize;

    /// Evaluates without a dimension check.
    fn value(&self, xi: &[f64]) -> ExtReal;

    fn eval(&self, xi: &[f64]) -> Result<ExtReal> {
        if xi.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: xi.len(),
            });
        }
        Ok(self.value(xi))
    }
}

impl<T: Phi + ?Sized> Phi for &T {
    fn dim(&self) -> usize {
        (**self).dim()
    }
    fn value(&self, xi: &[f64]) -> ExtReal {
        (**self).value(xi)
    }
}

impl<T: Phi + ?Sized> Phi for Box<T> {
    fn dim(&self) -> usize {
        (**self).dim()
    }
    fn value(&self, xi: &[f64]) -> ExtReal {
        (**self).value(xi)
    }
}

/// `ξ ↦ Φ(c·ξ)`.
pub struct Dilated<P> {
    pub inner: P,
    pub factor: f64,
}

impl<P: Phi> Phi for Dilated<P> {
    fn dim(&self) -> usize {
        self.inner.dim()
    }
    fn value(&self, xi: &[f64]) -> ExtReal {
        let scaled: Vec<f64> = xi.iter().map(|x| self.factor * x).collect();
        self.inner.value(&scaled)
    }
}

/// An x-independent Φ-function from one of the builtin analytic families.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "PhiDef", into = "PhiDef")]
pub struct PhiFunction {
    dim: usize,
    family: Family,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Family {
    /// `c·|ξ|^p`
    PowerNorm { p: f64, coef: f64 },
    /// `|ξ|^p + a·|ξ|^q`
    DoublePhase { p: f64, q: f64, a: f64 },
    /// `|ξ|^p + a·|ξ_k|^q` with the q-phase along one coordinate axis.
    DirectionalDoublePhase { p: f64, q: f64, a: f64, axis: usize },
    /// `Σ w_k |ξ_k|^p`
    CoordinatePower { weights: Vec<f64>, p: f64 },
    /// `0` on the unit ball of the quasinorm `‖·‖_r`, `∞` outside.
    LinftyIndicator { r: f64 },
    /// Pointwise minimum of the parts.
    Min(Vec<PhiFunction>),
    Tabulated(Table),
}

impl PhiFunction {
    pub fn new(dim: usize, family: Family) -> Result<PhiFunction> {
        validate(dim, &family)?;
        Ok(PhiFunction { dim, family })
    }

    pub fn power_norm(dim: usize, p: f64) -> Result<PhiFunction> {
        PhiFunction::new(dim, Family::PowerNorm { p, coef: 1.0 })
    }

    pub fn scaled_power_norm(dim: usize, p: f64, coef: f64) -> Result<PhiFunction> {
        PhiFunction::new(dim, Family::PowerNorm { p, coef })
    }

    pub fn double_phase(dim: usize, p: f64, q: f64, a: f64) -> Result<PhiFunction> {
        PhiFunction::new(dim, Family::DoublePhase { p, q, a })
    }

    pub fn directional_double_phase(dim: usize, p: f64, q: f64, a: f64) -> Result<PhiFunction> {
        PhiFunction::new(dim, Family::DirectionalDoublePhase { p, q, a, axis: 0 })
    }

    pub fn coordinate_power(weights: Vec<f64>, p: f64) -> Result<PhiFunction> {
        PhiFunction::new(weights.len(), Family::CoordinatePower { weights, p })
    }

    pub fn linfty_indicator(dim: usize, r: f64) -> Result<PhiFunction> {
        PhiFunction::new(dim, Family::LinftyIndicator { r })
    }

    pub fn min_of(parts: Vec<PhiFunction>) -> Result<PhiFunction> {
        let dim = parts
            .first()
            .map(|p| p.dim)
            .ok_or_else(|| Error::InvalidParameter("min-of-list needs at least one part".into()))?;
        PhiFunction::new(dim, Family::Min(parts))
    }

    /// `min{ξ_1², …, ξ_m²}`: convex pieces whose minimum has `Φ^conv ≡ 0`.
    pub fn min_of_coordinate_squares(dim: usize) -> Result<PhiFunction> {
        let parts = (0..dim)
            .map(|k| {
                let mut w = vec![0.0; dim];
                w[k] = 1.0;
                PhiFunction::coordinate_power(w, 2.0)
            })
            .collect::<Result<Vec<_>>>()?;
        PhiFunction::min_of(parts)
    }

    pub fn tabulated(table: Table) -> Result<PhiFunction> {
        PhiFunction::new(table.dim(), Family::Tabulated(table))
    }

    pub fn family(&self) -> &Family {
        &self.family
    }

    /// True for the families that are convex in `ξ` by construction.
    pub fn is_convex_family(&self) -> bool {
        match &self.family {
            Family::Min(_) | Family::Tabulated(_) => false,
            Family::LinftyIndicator { r } => *r >= 1.0,
            _ => true,
        }
    }
}

fn validate(dim: usize, family: &Family) -> Result<()> {
    let bad = |msg: String| Err(Error::InvalidParameter(msg));
    if dim == 0 {
        return bad("dimension must be at least 1".into());
    }
    let finite = |name: &str, v: f64| -> Result<()> {
        if v.is_finite() {
            Ok(())
        } else {
            Err(Error::InvalidParameter(format!("{name} must be finite")))
        }
    };
    match family {
        Family::PowerNorm { p, coef } => {
            finite("p", *p)?;
            finite("coef", *coef)?;
            if *p < 1.0 {
                return bad(format!("power-norm needs p >= 1, got {p}"));
            }
            if *coef <= 0.0 {
                return bad(format!("power-norm needs coef > 0, got {coef}"));
            }
        }
        Family::DoublePhase { p, q, a } | Family::DirectionalDoublePhase { p, q, a, .. } => {
            finite("p", *p)?;
            finite("q", *q)?;
            finite("a", *a)?;
            if *p < 1.0 || *q < *p {
                return bad(format!("double phase needs 1 <= p <= q, got p={p}, q={q}"));
            }
            if *a < 0.0 {
                return bad(format!("double phase needs a >= 0, got {a}"));
            }
            if let Family::DirectionalDoublePhase { axis, .. } = family {
                if *axis >= dim {
                    return bad(format!("axis {axis} out of range for dimension {dim}"));
                }
            }
        }
        Family::CoordinatePower { weights, p } => {
            finite("p", *p)?;
            if weights.len() != dim {
                return bad("coordinate-power needs one weight per coordinate".into());
            }
            if *p < 1.0 {
                return bad(format!("coordinate-power needs p >= 1, got {p}"));
            }
            if weights.iter().any(|w| !w.is_finite() || *w < 0.0) {
                return bad("coordinate-power weights must be finite and >= 0".into());
            }
        }
        Family::LinftyIndicator { r } => {
            if !(*r > 0.0 && *r <= 1.0) {
                return bad(format!("linfty-indicator needs r in (0, 1], got {r}"));
            }
        }
        Family::Min(parts) => {
            if parts.is_empty() {
                return bad("min-of-list needs at least one part".into());
            }
            if parts.iter().any(|p| p.dim != dim) {
                return bad("min-of-list parts must share the dimension".into());
            }
        }
        Family::Tabulated(t) => {
            if t.dim() != dim {
                return bad("table dimension mismatch".into());
            }
        }
    }
    Ok(())
}

/// `(Σ |ξ_k|^r)^{1/r}`.
pub fn quasinorm(xi: &[f64], r: f64) -> f64 {
    if r == 1.0 {
        return xi.iter().map(|x| x.abs()).sum();
    }
    if r == 0.5 {
        let s: f64 = xi.iter().map(|x| x.abs().sqrt()).sum();
        return s * s;
    }
    xi.iter().map(|x| x.abs().powf(r)).sum::<f64>().powf(1.0 / r)
}

fn pow(t: f64, p: f64) -> f64 {
    if t == 0.0 {
        0.0
    } else if p == 2.0 {
        t * t
    } else if p == 1.0 {
        t
    } else {
        t.powf(p)
    }
}

impl Phi for PhiFunction {
    fn dim(&self) -> usize {
        self.dim
    }

    fn value(&self, xi: &[f64]) -> ExtReal {
        match &self.family {
            Family::PowerNorm { p, coef } => ExtReal::from_nonneg(coef * pow(norm(xi), *p)),
            Family::DoublePhase { p, q, a } => {
                let t = norm(xi);
                ExtReal::from_nonneg(pow(t, *p) + a * pow(t, *q))
            }
            Family::DirectionalDoublePhase { p, q, a, axis } => {
                let t = norm(xi);
                ExtReal::from_nonneg(pow(t, *p) + a * pow(xi[*axis].abs(), *q))
            }
            Family::CoordinatePower { weights, p } => ExtReal::from_nonneg(
                weights
                    .iter()
                    .zip(xi)
                    .map(|(w, x)| if *w == 0.0 { 0.0 } else { w * pow(x.abs(), *p) })
                    .sum(),
            ),
            Family::LinftyIndicator { r } => {
                if quasinorm(xi, *r) <= 1.0 {
                    ExtReal::ZERO
                } else {
                    ExtReal::INFINITY
                }
            }
            Family::Min(parts) => parts
                .iter()
                .map(|p| p.value(xi))
                .min()
                .unwrap_or(ExtReal::INFINITY),
            Family::Tabulated(t) => t.value(xi),
        }
    }
}

/// Serialized form of [`PhiFunction`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case", deny_unknown_fields)]
pub enum PhiDef {
    PowerNorm {
        dim: usize,
        p: f64,
        #[serde(default = "one")]
        coef: f64,
    },
    DoublePhase {
        dim: usize,
        p: f64,
        q: f64,
        a: f64,
    },
    DirectionalDoublePhase {
        dim: usize,
        p: f64,
        q: f64,
        a: f64,
        #[serde(default)]
        axis: usize,
    },
    CoordinatePower {
        weights: Vec<f64>,
        p: f64,
    },
    LinftyIndicator {
        dim: usize,
        r: f64,
    },
    Min {
        parts: Vec<PhiDef>,
    },
    Tabulated {
        axes: Vec<Vec<f64>>,
        values: Vec<ExtReal>,
    },
}

fn one() -> f64 {
    1.0
}

impl TryFrom<PhiDef> for PhiFunction {
    type Error = Error;

    fn try_from(def: PhiDef) -> Result<PhiFunction> {
        match def {
            PhiDef::PowerNorm { dim, p, coef } => PhiFunction::new(dim, Family::PowerNorm { p, coef }),
            PhiDef::DoublePhase { dim, p, q, a } => PhiFunction::double_phase(dim, p, q, a),
            PhiDef::DirectionalDoublePhase { dim, p, q, a, axis } => {
                PhiFunction::new(dim, Family::DirectionalDoublePhase { p, q, a, axis })
            }
            PhiDef::CoordinatePower { weights, p } => PhiFunction::coordinate_power(weights, p),
            PhiDef::LinftyIndicator { dim, r } => PhiFunction::linfty_indicator(dim, r),
            PhiDef::Min { parts } => PhiFunction::min_of(
                parts
                    .into_iter()
                    .map(PhiFunction::try_from)
                    .collect::<Result<Vec<_>>>()?,
            ),
            PhiDef::Tabulated { axes, values } => PhiFunction::tabulated(Table::new(axes, values)?),
        }
    }
}

impl From<PhiFunction> for PhiDef {
    fn from(phi: PhiFunction) -> PhiDef {
        let dim = phi.dim;
        match phi.family {
            Family::PowerNorm { p, coef } => PhiDef::PowerNorm { dim, p, coef },
            Family::DoublePhase { p, q, a } => PhiDef::DoublePhase { dim, p, q, a },
            Family::DirectionalDoublePhase { p, q, a, axis } => {
                PhiDef::DirectionalDoublePhase { dim, p, q, a, axis }
            }
            Family::CoordinatePower { weights, p } => PhiDef::CoordinatePower { weights, p },
            Family::LinftyIndicator { r } => PhiDef::LinftyIndicator { dim, r },
            Family::Min(parts) => PhiDef::Min {
                parts: parts.into_iter().map(PhiDef::from).collect(),
            },
            Family::Tabulated(t) => {
                let (axes, values) = t.into_parts();
                PhiDef::Tabulated { axes, values }
            }
        }
    }
}
