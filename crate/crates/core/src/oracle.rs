//! Brute-force references: Carathéodory enumeration of the convex
//! minorant, exhaustive almost-convexity scans and a dense λ-scan for the
//! Luxemburg norm.

use crate::error::{Error, Result};
use crate::phi_core::{modular, ExtReal, Phi, SpatialPhiFunction, Vector, VectorField};

pub const PIVOT_THRESHOLD: f64 = 1e-12;

/// Support-size caps for subset enumeration, indexed by `m`.
pub fn enumeration_cap(m: usize) -> Option<usize> {
    match m {
        1 => Some(4000),
        2 => Some(400),
        3 => Some(120),
        _ => None,
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct HullValue {
    pub value: ExtReal,
    /// No nondegenerate subset contains `ξ` in its hull.
    pub out_of_hull: bool,
}

const MAX_N: usize = 4;

/// Gaussian elimination with partial pivoting on the leading `n×n` block;
/// `None` when a pivot falls below the threshold.
fn solve_square(n: usize, mut a: [[f64; MAX_N]; MAX_N], mut b: [f64; MAX_N]) -> Option<[f64; MAX_N]> {
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[piv][col].abs() < PIVOT_THRESHOLD {
            return None;
        }
        a.swap(piv, col);
        b.swap(piv, col);
        for i in col + 1..n {
            let f = a[i][col] / a[col][col];
            for k in col..n {
                a[i][k] -= f * a[col][k];
            }
            b[i] -= f * b[col];
        }
    }
    let mut x = [0.0; MAX_N];
    for i in (0..n).rev() {
        let s: f64 = (i + 1..n).map(|k| a[i][k] * x[k]).sum();
        x[i] = (b[i] - s) / a[i][i];
    }
    Some(x)
}

/// The `(m+1)×(m+1)` system whose columns are `(p, 1)` for `p` in `cols`.
fn affine_system(pts: &[&Vector], cols: &[usize], m: usize) -> [[f64; MAX_N]; MAX_N] {
    let mut a = [[0.0; MAX_N]; MAX_N];
    for (c, &j) in cols.iter().enumerate() {
        for row in 0..m {
            a[row][c] = pts[j][row];
        }
        a[m][c] = 1.0;
    }
    a
}

fn lifted(xi: &[f64]) -> [f64; MAX_N] {
    let mut b = [0.0; MAX_N];
    b[..xi.len()].copy_from_slice(xi);
    b[xi.len()] = 1.0;
    b
}

/// Visits every `k`-subset of `0..n` in lexicographic order.
fn for_each_subset(n: usize, k: usize, mut f: impl FnMut(&[usize])) {
    if k > n {
        return;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        f(&idx);
        let mut i = k;
        while i > 0 && idx[i - 1] == n - k + i - 1 {
            i -= 1;
        }
        if i == 0 {
            return;
        }
        idx[i - 1] += 1;
        for j in i..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

fn finite_support<'a>(support: &'a [Vector], values: &[ExtReal]) -> (Vec<&'a Vector>, Vec<f64>) {
    support
        .iter()
        .zip(values)
        .filter_map(|(p, v)| v.to_finite().map(|v| (p, v)))
        .unzip()
}

fn check_inputs(support: &[Vector], values: &[ExtReal], xi: &[f64]) -> Result<()> {
    if support.len() != values.len() {
        return Err(Error::InvalidParameter("support and values differ in length".into()));
    }
    let m = xi.len();
    if let Some(p) = support.iter().find(|p| p.dim() != m) {
        return Err(Error::DimensionMismatch {
            expected: m,
            got: p.dim(),
        });
    }
    if let Some(cap) = enumeration_cap(m) {
        if support.len() > cap {
            return Err(Error::EnumerationCap(format!(
                "support of {} points exceeds the cap of {cap} for m = {m}",
                support.len()
            )));
        }
    } else {
        return Err(Error::EnumerationCap(format!("subset enumeration supports m <= 3, got {m}")));
    }
    Ok(())
}

/// `Φ^conv(ξ) = min{Σ α_k Φ(ξ_k) | Σ α_k ξ_k = ξ, Σ α_k = 1, α ≥ 0}` over
/// all `(m+1)`-subsets of the support.
pub fn caratheodory_envelope(support: &[Vector], values: &[ExtReal], xi: &[f64], tol: f64) -> Result<HullValue> {
    check_inputs(support, values, xi)?;
    let m = xi.len();
    let (pts, vals) = finite_support(support, values);
    let mut best = f64::INFINITY;
    let rhs = lifted(xi);
    for_each_subset(pts.len(), m + 1, |s| {
        if let Some(alpha) = solve_square(m + 1, affine_system(&pts, s, m), rhs) {
            if alpha[..=m].iter().all(|a| *a >= -tol) {
                let v: f64 = alpha.iter().zip(s).map(|(a, &j)| a * vals[j]).sum();
                best = best.min(v);
            }
        }
    });
    Ok(if best.is_finite() {
        HullValue {
            value: ExtReal::from_nonneg(best.max(0.0)),
            out_of_hull: false,
        }
    } else {
        HullValue {
            value: ExtReal::INFINITY,
            out_of_hull: true,
        }
    })
}

/// The same minimum over `(m+2)`-subsets: each subset's feasible set is a
/// segment along the null direction of its constraint matrix, minimized at
/// an endpoint.
pub fn caratheodory_envelope_wide(support: &[Vector], values: &[ExtReal], xi: &[f64], tol: f64) -> Result<HullValue> {
    check_inputs(support, values, xi)?;
    let m = xi.len();
    let (pts, vals) = finite_support(support, values);
    let mut best = f64::INFINITY;
    for_each_subset(pts.len(), m + 2, |s| {
        // pin the last weight t and solve for the rest
        let a = affine_system(&pts, &s[..m + 1], m);
        let last = s[m + 1];
        let (Some(a0), Some(dir)) = (solve_square(m + 1, a, lifted(xi)), solve_square(m + 1, a, lifted(&pts[last].0)))
        else {
            return;
        };
        // α_j = a0_j − t·dir_j for j ≤ m, α_last = t
        let (mut lo, mut hi) = (0.0f64, f64::INFINITY);
        for (x, d) in a0[..=m].iter().zip(&dir[..=m]) {
            if d.abs() < 1e-15 {
                if *x < -tol {
                    return;
                }
            } else if *d > 0.0 {
                hi = hi.min((x + tol) / d);
            } else {
                lo = lo.max((x + tol) / d);
            }
        }
        if lo > hi || !hi.is_finite() {
            return;
        }
        let objective = |t: f64| -> f64 {
            a0[..=m]
                .iter()
                .zip(&dir[..=m])
                .zip(&s[..m + 1])
                .map(|((x, d), &j)| (x - t * d) * vals[j])
                .sum::<f64>()
                + t * vals[last]
        };
        best = best.min(objective(lo)).min(objective(hi));
    });
    Ok(if best.is_finite() {
        HullValue {
            value: ExtReal::from_nonneg(best.max(0.0)),
            out_of_hull: false,
        }
    } else {
        HullValue {
            value: ExtReal::INFINITY,
            out_of_hull: true,
        }
    })
}

/// A violation of `Φ(β(αξ + α′ξ′)) ≤ αΦ(ξ) + α′Φ(ξ′)`.
#[derive(Clone, Debug, PartialEq)]
pub struct PairWitness {
    pub xi: Vector,
    pub xi2: Vector,
    pub alpha: f64,
    pub beta: f64,
    pub lhs: ExtReal,
    pub rhs: ExtReal,
}

impl std::fmt::Display for PairWitness {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "({}, {}, {}) beta={} lhs={} rhs={}",
            self.xi, self.xi2, self.alpha, self.beta, self.lhs, self.rhs
        )
    }
}

fn is_basis_vector(v: &[f64]) -> Option<usize> {
    let mut k = None;
    for (i, x) in v.iter().enumerate() {
        if *x == 1.0 && k.is_none() {
            k = Some(i);
        } else if *x != 0.0 {
            return None;
        }
    }
    k
}

/// Order in which pairs are scanned: pairs of basis vectors `e_i, e_j`
/// present in the grid first, then every ordered pair.
fn pair_order(grid: &[Vector]) -> Vec<(usize, usize)> {
    let mut basis: Vec<(usize, usize)> = grid
        .iter()
        .enumerate()
        .filter_map(|(i, v)| is_basis_vector(v).map(|k| (k, i)))
        .collect();
    basis.sort();
    let mut order = vec![];
    for &(_, i) in &basis {
        for &(_, j) in &basis {
            if i != j {
                order.push((i, j));
            }
        }
    }
    for i in 0..grid.len() {
        for j in 0..grid.len() {
            if i != j {
                order.push((i, j));
            }
        }
    }
    order
}

/// Exhaustive (W4) scan over ordered grid pairs and `alphas`, with `1/2`
/// tried first; returns the first violation beyond the relative `tol`
/// (see [`ExtReal::le_rel`]).
pub fn almost_convex_bruteforce(
    phi: &dyn Phi,
    grid: &[Vector],
    alphas: &[f64],
    beta: f64,
    tol: f64,
) -> Option<PairWitness> {
    let values: Vec<ExtReal> = grid.iter().map(|v| phi.value(v)).collect();
    let mut alphas = alphas.to_vec();
    alphas.sort_by(|a, b| (a - 0.5).abs().total_cmp(&(b - 0.5).abs()).then(a.total_cmp(b)));
    let mut z = vec![0.0; phi.dim()];
    for (i, j) in pair_order(grid) {
        for &alpha in &alphas {
            let rhs = values[i].scale(alpha) + values[j].scale(1.0 - alpha);
            if rhs.is_infinite() {
                continue;
            }
            for (k, zk) in z.iter_mut().enumerate() {
                *zk = beta * (alpha * grid[i][k] + (1.0 - alpha) * grid[j][k]);
            }
            let lhs = phi.value(&z);
            if !lhs.le_rel(rhs, tol) {
                return Some(PairWitness {
                    xi: grid[i].clone(),
                    xi2: grid[j].clone(),
                    alpha,
                    beta,
                    lhs,
                    rhs,
                });
            }
        }
    }
    None
}

/// Smallest `λ` in the increasing grid with `ϱ_Φ(f/λ) ≤ 1`; `0` for the
/// zero field and `∞` when no grid value qualifies.
pub fn norm_dense_scan(phi: &SpatialPhiFunction, f: &VectorField, lambda_grid: &[f64]) -> Result<ExtReal> {
    if f.is_zero() {
        return Ok(ExtReal::ZERO);
    }
    if lambda_grid.windows(2).any(|w| !(w[0] < w[1])) || lambda_grid.iter().any(|l| !(*l > 0.0)) {
        return Err(Error::InvalidParameter("lambda grid must be positive and increasing".into()));
    }
    for &lambda in lambda_grid {
        if modular(phi, &f.scaled(1.0 / lambda))? <= ExtReal::ONE {
            return Ok(ExtReal::finite(lambda));
        }
    }
    Ok(ExtReal::INFINITY)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::phi_core::PhiFunction;

    fn v(x: &[f64]) -> Vector {
        Vector::from(x)
    }

    #[test]
    fn subsets_are_enumerated_once() {
        let mut count = 0;
        for_each_subset(6, 3, |_| count += 1);
        assert_eq!(count, 20);
        let mut all = vec![];
        for_each_subset(4, 2, |s| all.push(s.to_vec()));
        assert_eq!(all, vec![vec![0, 1], vec![0, 2], vec![0, 3], vec![1, 2], vec![1, 3], vec![2, 3]]);
    }

    #[test]
    fn min_of_quadratics_on_small_support() {
        let phi = PhiFunction::min_of_coordinate_squares(2).unwrap();
        let mut support = vec![v(&[0.0, 0.0])];
        for s in [-2.0, 2.0] {
            support.push(v(&[s, 0.0]));
            support.push(v(&[0.0, s]));
            for t in [-2.0, 2.0] {
                support.push(v(&[s, t]));
            }
        }
        let values: Vec<ExtReal> = support.iter().map(|p| phi.value(p)).collect();
        let r = caratheodory_envelope(&support, &values, &[1.0, 1.0], 1e-12).unwrap();
        assert_eq!(r.value, ExtReal::ZERO);
        let w = caratheodory_envelope_wide(&support, &values, &[1.0, 1.0], 1e-12).unwrap();
        assert_eq!(w.value, ExtReal::ZERO);
    }

    #[test]
    fn one_dimensional_window_effect() {
        let support: Vec<Vector> = (0..=10).map(|k| v(&[0.5 * k as f64])).collect();
        let values: Vec<ExtReal> = support
            .iter()
            .map(|p| ExtReal::finite(p[0].min(p[0] * p[0])))
            .collect();
        let r = caratheodory_envelope(&support, &values, &[1.0], 1e-12).unwrap();
        assert!((r.value.get() - 7.0 / 9.0).abs() < 1e-12, "{}", r.value);
    }

    #[test]
    fn outside_the_hull_is_flagged() {
        let support = vec![v(&[0.0]), v(&[1.0])];
        let values = vec![ExtReal::ZERO, ExtReal::ONE];
        let r = caratheodory_envelope(&support, &values, &[2.0], 1e-12).unwrap();
        assert!(r.out_of_hull && r.value.is_infinite());
    }

    #[test]
    fn bruteforce_finds_basis_witness_for_min_of_quadratics() {
        let phi = PhiFunction::min_of_coordinate_squares(2).unwrap();
        let grid: Vec<Vector> = (-2..=2)
            .flat_map(|i| (-2..=2).map(move |j| v(&[i as f64, j as f64])))
            .collect();
        let w = almost_convex_bruteforce(&phi, &grid, &[0.25, 0.5, 0.75], 0.5, 1e-12).unwrap();
        assert_eq!((w.xi.clone(), w.xi2.clone(), w.alpha), (v(&[1.0, 0.0]), v(&[0.0, 1.0]), 0.5));
        assert_eq!(w.lhs.get(), 0.0625);
    }

    #[test]
    fn enumeration_cap_is_a_config_error() {
        let support: Vec<Vector> = (0..401).map(|k| v(&[k as f64, 0.0])).collect();
        let values = vec![ExtReal::ZERO; 401];
        assert!(matches!(
            caratheodory_envelope(&support, &values, &[0.0, 0.0], 1e-12),
            Err(Error::EnumerationCap(_))
        ));
    }
}
