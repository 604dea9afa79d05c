//! Greatest convex minorant of finitely many values.
//!
//! In one dimension the lower hull is a monotone-chain scan. In higher
//! dimensions the value at `ξ` is the linear program
//!
//! ```text
//! min Σ α_k v_k   s.t.   Σ α_k ξ_k = ξ,  Σ α_k = 1,  α ≥ 0,
//! ```
//!
//! whose optimal basis is the lower-hull facet above `ξ`. It is solved by a
//! revised simplex method with `m + 1` rows, warm-started from the previous
//! query's basis.

use super::grid::GridFunction;
use crate::error::{Error, Result};
use crate::phi_core::{ExtReal, Phi, Vector};

const PIVOT_TOL: f64 = 1e-11;
const COST_TOL: f64 = 1e-12;
const FEAS_TOL: f64 = 1e-10;
const AFFINE_TOL: f64 = 1e-9;
const SNAP_TOL: f64 = 1e-12;
const STALL_LIMIT: usize = 30;

/// The lower convex hull of `{(ξ_k, v_k) | v_k < ∞}`.
#[derive(Clone, Debug)]
pub struct ConvexMinorant {
    m: usize,
    /// Original index of each finite support point.
    ids: Vec<usize>,
    /// Original coordinates, row-major `N × m`.
    orig: Vec<f64>,
    vals: Vec<f64>,
    lo: Vec<f64>,
    hi: Vec<f64>,
    affine: Affine,
    /// `m = 1`: lower-hull vertices (indices into the finite arrays) by `t`.
    chain: Vec<usize>,
}

/// Affine hull of the support in local coordinates.
#[derive(Clone, Debug)]
struct Affine {
    /// Local dimension `d ≤ m`.
    d: usize,
    origin: Vec<f64>,
    /// Orthonormal rows, `d × m`; empty when `d = m` (identity).
    basis: Vec<Vec<f64>>,
    /// Local coordinates, row-major `N × d`.
    coords: Vec<f64>,
    scale: f64,
}

/// An envelope value together with the convex combination realizing it.
#[derive(Clone, Debug, PartialEq)]
pub struct Representation {
    pub value: ExtReal,
    /// `(input index, α)` with `α > 0`.
    pub support: Vec<(usize, f64)>,
    /// True when some support point other than the query lies on the
    /// boundary of the sampling window.
    pub on_boundary: bool,
}

impl Representation {
    fn outside() -> Representation {
        Representation {
            value: ExtReal::INFINITY,
            support: vec![],
            on_boundary: false,
        }
    }
}

impl ConvexMinorant {
    pub fn new(g: &GridFunction) -> Result<ConvexMinorant> {
        let m = g.dim();
        let mut ids = vec![];
        let mut orig = vec![];
        let mut vals = vec![];
        for (k, (p, v)) in g.points.iter().zip(&g.values).enumerate() {
            if let Some(v) = v.to_finite() {
                ids.push(k);
                orig.extend_from_slice(p);
                vals.push(v);
            }
        }
        if ids.is_empty() {
            return Err(Error::AllInfinite);
        }
        let n = ids.len();
        let mut lo = vec![f64::INFINITY; m];
        let mut hi = vec![f64::NEG_INFINITY; m];
        for i in 0..n {
            for k in 0..m {
                lo[k] = lo[k].min(orig[i * m + k]);
                hi[k] = hi[k].max(orig[i * m + k]);
            }
        }
        let affine = Affine::new(&orig, m, &lo, &hi);
        let mut env = ConvexMinorant {
            m,
            ids,
            orig,
            vals,
            lo,
            hi,
            affine,
            chain: vec![],
        };
        if m == 1 {
            env.chain = lower_chain(&env.orig, &env.vals);
        }
        Ok(env)
    }

    pub fn dim(&self) -> usize {
        self.m
    }

    /// Dimension of the affine hull of the finite-valued support.
    pub fn affine_dim(&self) -> usize {
        self.affine.d
    }

    pub fn support_len(&self) -> usize {
        self.ids.len()
    }

    pub fn evaluator(&self) -> Evaluator<'_> {
        Evaluator { env: self, warm: None }
    }

    /// Envelope value at `ξ`; `∞` outside the hull of the finite support.
    pub fn eval(&self, xi: &[f64]) -> ExtReal {
        self.evaluator().represent(xi).value
    }

    /// Envelope values at the input points, capped by the input values so
    /// the result is a minorant exactly.
    pub fn grid_values(&self, g: &GridFunction) -> Vec<ExtReal> {
        let mut ev = self.evaluator();
        g.points
            .iter()
            .zip(&g.values)
            .map(|(p, v)| cap(ev.represent(p).value, *v))
            .collect()
    }

    fn point(&self, i: usize) -> &[f64] {
        &self.orig[i * self.m..(i + 1) * self.m]
    }

    fn on_window_boundary(&self, i: usize) -> bool {
        let p = self.point(i);
        (0..self.m).any(|k| {
            let w = (self.hi[k] - self.lo[k]).max(1.0) * 1e-12;
            (p[k] - self.lo[k]).abs() <= w || (p[k] - self.hi[k]).abs() <= w
        })
    }

    fn finish(&self, xi: &[f64], support: Vec<(usize, f64)>) -> Representation {
        let value: f64 = support.iter().map(|(i, a)| a * self.vals[*i]).sum();
        let on_boundary = support
            .iter()
            .any(|(i, _)| self.on_window_boundary(*i) && self.point(*i) != xi);
        Representation {
            value: ExtReal::from_nonneg(value.max(0.0)),
            support: support.into_iter().map(|(i, a)| (self.ids[i], a)).collect(),
            on_boundary,
        }
    }

    fn represent_chain(&self, t: f64) -> Representation {
        let c = &self.chain;
        let first = self.orig[c[0]];
        let last = self.orig[*c.last().unwrap()];
        if t < first || t > last {
            return Representation::outside();
        }
        let j = c.partition_point(|&i| self.orig[i] <= t);
        if j == 0 || self.orig[c[j - 1]] == t {
            let i = c[j.max(1) - 1];
            return self.finish(&[t], vec![(i, 1.0)]);
        }
        let (a, b) = (c[j - 1], c[j]);
        let s = (t - self.orig[a]) / (self.orig[b] - self.orig[a]);
        self.finish(&[t], vec![(a, 1.0 - s), (b, s)])
    }
}

/// `min{env, own}`, snapping to `own` when they agree to rounding.
pub(crate) fn cap(env: ExtReal, own: ExtReal) -> ExtReal {
    match (env.to_finite(), own.to_finite()) {
        (Some(e), Some(v)) if (e - v).abs() <= SNAP_TOL * v.abs().max(1.0) => own,
        _ => env.min(own),
    }
}

fn lower_chain(t: &[f64], v: &[f64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..t.len()).collect();
    order.sort_by(|&a, &b| t[a].total_cmp(&t[b]).then(v[a].total_cmp(&v[b])));
    order.dedup_by(|b, a| t[*a] == t[*b]);
    let mut hull: Vec<usize> = Vec::with_capacity(order.len());
    for i in order {
        while hull.len() >= 2 {
            let (o, a) = (hull[hull.len() - 2], hull[hull.len() - 1]);
            let cross = (t[a] - t[o]) * (v[i] - v[o]) - (v[a] - v[o]) * (t[i] - t[o]);
            if cross <= 0.0 {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(i);
    }
    hull
}

impl Affine {
    fn new(orig: &[f64], m: usize, lo: &[f64], hi: &[f64]) -> Affine {
        let n = orig.len() / m;
        let scale = lo.iter().zip(hi).map(|(a, b)| b - a).fold(1.0f64, f64::max);
        let origin = orig[..m].to_vec();
        let mut basis: Vec<Vec<f64>> = vec![];
        for i in 1..n {
            if basis.len() == m {
                break;
            }
            let mut v: Vec<f64> = (0..m).map(|k| orig[i * m + k] - origin[k]).collect();
            for _ in 0..2 {
                for b in &basis {
                    let dot: f64 = v.iter().zip(b).map(|(x, y)| x * y).sum();
                    for (x, y) in v.iter_mut().zip(b) {
                        *x -= dot * y;
                    }
                }
            }
            let len = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            if len > AFFINE_TOL * scale {
                basis.push(v.into_iter().map(|x| x / len).collect());
            }
        }
        let d = basis.len();
        if d == m {
            return Affine {
                d,
                origin: vec![0.0; m],
                basis: vec![],
                coords: orig.to_vec(),
                scale,
            };
        }
        let mut a = Affine {
            d,
            origin,
            basis,
            coords: vec![],
            scale,
        };
        let mut coords = Vec::with_capacity(n * d);
        for i in 0..n {
            let (c, _) = a.project(&orig[i * m..(i + 1) * m]);
            coords.extend(c);
        }
        a.coords = coords;
        a
    }

    /// Local coordinates of `xi` and its distance from the affine hull.
    fn project(&self, xi: &[f64]) -> (Vec<f64>, f64) {
        if self.basis.is_empty() && self.d == xi.len() {
            return (xi.to_vec(), 0.0);
        }
        let diff: Vec<f64> = xi.iter().zip(&self.origin).map(|(x, o)| x - o).collect();
        let c: Vec<f64> = self
            .basis
            .iter()
            .map(|b| b.iter().zip(&diff).map(|(x, y)| x * y).sum())
            .collect();
        let mut res = diff;
        for (ck, b) in c.iter().zip(&self.basis) {
            for (r, y) in res.iter_mut().zip(b) {
                *r -= ck * y;
            }
        }
        (c, res.iter().map(|x| x * x).sum::<f64>().sqrt())
    }
}

impl Phi for ConvexMinorant {
    fn dim(&self) -> usize {
        self.m
    }
    fn value(&self, xi: &[f64]) -> ExtReal {
        self.eval(xi)
    }
}

/// Sequential evaluator reusing the previous optimal basis.
pub struct Evaluator<'a> {
    env: &'a ConvexMinorant,
    warm: Option<Vec<usize>>,
}

impl Evaluator<'_> {
    pub fn eval(&mut self, xi: &[f64]) -> ExtReal {
        self.represent(xi).value
    }

    pub fn represent(&mut self, xi: &[f64]) -> Representation {
        let env = self.env;
        if xi.len() != env.m {
            return Representation::outside();
        }
        let slack = |k: usize| (env.hi[k] - env.lo[k]).max(1.0) * 1e-12;
        if (0..env.m).any(|k| xi[k] < env.lo[k] - slack(k) || xi[k] > env.hi[k] + slack(k)) {
            return Representation::outside();
        }
        if env.m == 1 {
            return env.represent_chain(xi[0]);
        }
        let (c, off) = env.affine.project(xi);
        if off > AFFINE_TOL * env.affine.scale {
            return Representation::outside();
        }
        if env.affine.d == 0 {
            return env.finish(xi, vec![(0, 1.0)]);
        }
        let lp = Simplex {
            d: env.affine.d,
            coords: &env.affine.coords,
            vals: &env.vals,
        };
        match lp.solve(&c, self.warm.as_deref()) {
            Some((basis, x)) => {
                let support: Vec<(usize, f64)> = basis
                    .iter()
                    .zip(&x)
                    .filter(|(_, a)| **a > 0.0)
                    .map(|(i, a)| (*i, *a))
                    .collect();
                self.warm = Some(basis);
                env.finish(xi, support)
            }
            None => Representation::outside(),
        }
    }
}

struct Simplex<'a> {
    d: usize,
    coords: &'a [f64],
    vals: &'a [f64],
}

/// Dense LU with partial pivoting for the `(d+1) × (d+1)` basis.
struct Lu {
    r: usize,
    a: Vec<f64>,
    perm: Vec<usize>,
}

impl Lu {
    fn factor(mut a: Vec<f64>, r: usize) -> Option<Lu> {
        let mut perm: Vec<usize> = (0..r).collect();
        let scale = a.iter().fold(0.0f64, |s, x| s.max(x.abs())).max(1e-300);
        for col in 0..r {
            let piv = (col..r)
                .max_by(|&i, &j| a[i * r + col].abs().total_cmp(&a[j * r + col].abs()))
                .unwrap();
            if a[piv * r + col].abs() <= 1e-13 * scale {
                return None;
            }
            if piv != col {
                for k in 0..r {
                    a.swap(piv * r + k, col * r + k);
                }
                perm.swap(piv, col);
            }
            let p = a[col * r + col];
            for i in col + 1..r {
                let f = a[i * r + col] / p;
                a[i * r + col] = f;
                for k in col + 1..r {
                    a[i * r + k] -= f * a[col * r + k];
                }
            }
        }
        Some(Lu { r, a, perm })
    }

    /// Solves `A x = b`.
    fn solve(&self, b: &[f64]) -> Vec<f64> {
        let r = self.r;
        let mut x: Vec<f64> = self.perm.iter().map(|&i| b[i]).collect();
        for i in 0..r {
            for k in 0..i {
                x[i] -= self.a[i * r + k] * x[k];
            }
        }
        for i in (0..r).rev() {
            for k in i + 1..r {
                x[i] -= self.a[i * r + k] * x[k];
            }
            x[i] /= self.a[i * r + i];
        }
        x
    }

    /// Solves `Aᵀ y = c`.
    fn solve_t(&self, c: &[f64]) -> Vec<f64> {
        let r = self.r;
        let mut z = c.to_vec();
        for i in 0..r {
            for k in 0..i {
                z[i] -= self.a[k * r + i] * z[k];
            }
            z[i] /= self.a[i * r + i];
        }
        for i in (0..r).rev() {
            for k in i + 1..r {
                z[i] -= self.a[k * r + i] * z[k];
            }
        }
        let mut y = vec![0.0; r];
        for (i, &p) in self.perm.iter().enumerate() {
            y[p] = z[i];
        }
        y
    }
}

impl Simplex<'_> {
    fn n(&self) -> usize {
        self.vals.len()
    }

    /// Column `k`: `(ξ_k, 1)` for real columns, `±e_j` for artificials.
    fn column(&self, k: usize, signs: &[f64], out: &mut [f64]) {
        let d = self.d;
        if k < self.n() {
            out[..d].copy_from_slice(&self.coords[k * d..(k + 1) * d]);
            out[d] = 1.0;
        } else {
            out.iter_mut().for_each(|x| *x = 0.0);
            let j = k - self.n();
            out[j] = signs[j];
        }
    }

    fn basis_matrix(&self, basis: &[usize], signs: &[f64]) -> Option<Lu> {
        let r = self.d + 1;
        let mut a = vec![0.0; r * r];
        let mut col = vec![0.0; r];
        for (j, &k) in basis.iter().enumerate() {
            self.column(k, signs, &mut col);
            for i in 0..r {
                a[i * r + j] = col[i];
            }
        }
        Lu::factor(a, r)
    }

    fn solve(&self, target: &[f64], warm: Option<&[usize]>) -> Option<(Vec<usize>, Vec<f64>)> {
        let r = self.d + 1;
        let mut b = target.to_vec();
        b.push(1.0);
        let n = self.n();
        let signs: Vec<f64> = b.iter().map(|x| if *x < 0.0 { -1.0 } else { 1.0 }).collect();
        if let Some(w) = warm.filter(|w| w.len() == r) {
            if let Some(lu) = self.basis_matrix(w, &signs) {
                let mut x = lu.solve(&b);
                if x.iter().all(|v| *v >= -FEAS_TOL) {
                    x.iter_mut().for_each(|v| *v = v.max(0.0));
                    let mut basis = w.to_vec();
                    if self.iterate(&mut basis, &mut x, &b, &signs, false) {
                        return Some((basis, x));
                    }
                }
            }
        }
        let mut basis: Vec<usize> = (n..n + r).collect();
        let mut x: Vec<f64> = b.iter().map(|v| v.abs()).collect();
        self.iterate(&mut basis, &mut x, &b, &signs, true);
        let infeas: f64 = basis.iter().zip(&x).filter(|(k, _)| **k >= n).map(|(_, v)| v).sum();
        if infeas > FEAS_TOL * b.iter().fold(1.0f64, |a, v| a.max(v.abs())) {
            return None;
        }
        self.drive_out_artificials(&mut basis, &mut x, &signs)?;
        self.iterate(&mut basis, &mut x, &b, &signs, false);
        Some((basis, x))
    }

    fn cost(&self, k: usize, phase_one: bool) -> f64 {
        match (phase_one, k < self.n()) {
            (true, true) => 0.0,
            (true, false) => 1.0,
            (false, true) => self.vals[k],
            (false, false) => f64::INFINITY,
        }
    }

    /// Runs simplex pivots from a feasible basis; false if the iteration
    /// cap or a numerical breakdown stopped it.
    fn iterate(&self, basis: &mut Vec<usize>, x: &mut Vec<f64>, b: &[f64], signs: &[f64], phase_one: bool) -> bool {
        let r = self.d + 1;
        let d = self.d;
        let n = self.n();
        let cap = 20 * n + 200;
        let mut best_obj = f64::INFINITY;
        let mut stall = 0;
        let mut col = vec![0.0; r];
        for _ in 0..cap {
            let Some(lu) = self.basis_matrix(basis, signs) else {
                return false;
            };
            *x = lu.solve(b);
            x.iter_mut().for_each(|v| *v = v.max(0.0));
            let cb: Vec<f64> = basis
                .iter()
                .map(|&k| if phase_one { self.cost(k, true) } else if k < n { self.vals[k] } else { 0.0 })
                .collect();
            let obj: f64 = cb.iter().zip(x.iter()).map(|(c, v)| c * v).sum();
            if obj < best_obj - COST_TOL * obj.abs().max(1.0) {
                best_obj = obj;
                stall = 0;
            } else {
                stall += 1;
            }
            let bland = stall > STALL_LIMIT;
            let y = lu.solve_t(&cb);
            let mut enter = None;
            let mut best = 0.0;
            for k in 0..n {
                let ck = self.cost(k, phase_one);
                let p = &self.coords[k * d..(k + 1) * d];
                let dot: f64 = p.iter().zip(&y[..d]).map(|(a, b)| a * b).sum();
                let dk = ck - y[d] - dot;
                // roundoff in dk scales with the magnitudes it cancels
                let mag = 1.0 + ck.abs() + y[d].abs() + p.iter().zip(&y[..d]).map(|(a, b)| (a * b).abs()).sum::<f64>();
                if dk < -COST_TOL * mag && dk < best {
                    if basis.contains(&k) {
                        continue;
                    }
                    enter = Some(k);
                    if bland {
                        break;
                    }
                    best = dk;
                }
            }
            let Some(k) = enter else {
                return true;
            };
            self.column(k, signs, &mut col);
            let w = lu.solve(&col);
            let wmax = w.iter().fold(0.0f64, |a, v| a.max(v.abs())).max(1.0);
            let mut leave: Option<(usize, f64)> = None;
            for i in 0..r {
                if w[i] > PIVOT_TOL * wmax {
                    let t = x[i] / w[i];
                    let better = match leave {
                        None => true,
                        Some((j, tj)) => {
                            t < tj - 1e-14 || (t <= tj + 1e-14 && (basis[i] >= n) > (basis[j] >= n))
                                || (t <= tj + 1e-14 && (basis[i] >= n) == (basis[j] >= n) && basis[i] < basis[j])
                        }
                    };
                    if better {
                        leave = Some((i, t));
                    }
                }
            }
            let Some((i, _)) = leave else {
                return false;
            };
            basis[i] = k;
        }
        false
    }

    fn drive_out_artificials(&self, basis: &mut [usize], x: &mut [f64], signs: &[f64]) -> Option<()> {
        let n = self.n();
        let r = self.d + 1;
        let mut col = vec![0.0; r];
        for pos in 0..r {
            if basis[pos] < n {
                continue;
            }
            let lu = self.basis_matrix(basis, signs)?;
            let mut best: Option<(usize, f64)> = None;
            for k in 0..n {
                if basis.contains(&k) {
                    continue;
                }
                self.column(k, signs, &mut col);
                let w = lu.solve(&col)[pos].abs();
                if w > 1e-9 && best.is_none_or(|(_, bw)| w > bw) {
                    best = Some((k, w));
                }
            }
            let (k, _) = best?;
            basis[pos] = k;
            x[pos] = 0.0;
        }
        Some(())
    }
}

/// Greatest convex minorant of `g` evaluated at its own points.
pub fn convex_minorant_grid(g: &GridFunction) -> Result<GridFunction> {
    let env = ConvexMinorant::new(g)?;
    let values = env.grid_values(g);
    Ok(GridFunction {
        points: g.points.clone(),
        values,
    })
}

/// Off-grid evaluation of the envelope of `g`.
pub fn convex_minorant_eval(env: &ConvexMinorant, xi: &[f64]) -> ExtReal {
    env.eval(xi)
}

/// Builds the envelope and evaluates it at `xi` (one-shot convenience).
pub fn envelope_at(g: &GridFunction, xi: &Vector) -> Result<ExtReal> {
    Ok(ConvexMinorant::new(g)?.eval(xi))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::envelope::grid::GridSpec;
    use crate::phi_core::PhiFunction;

    #[test]
    fn one_dimensional_min_of_line_and_parabola() {
        let phi = PhiFunction::min_of(vec![
            PhiFunction::power_norm(1, 1.0).unwrap(),
            PhiFunction::power_norm(1, 2.0).unwrap(),
        ])
        .unwrap();
        let spec = GridSpec { lo: vec![0.0], hi: vec![50.0], per_axis: 5001 };
        let g = GridFunction::sample(&phi, &spec).unwrap();
        let env = ConvexMinorant::new(&g).unwrap();
        let v = env.eval(&[1.0]).get();
        assert!((v - 0.75).abs() < 5e-3, "{v}");
        assert!(env.eval(&[-0.5]).is_infinite());
    }

    #[test]
    fn convex_input_is_reproduced() {
        let phi = PhiFunction::power_norm(2, 2.0).unwrap();
        let g = GridFunction::sample(&phi, &GridSpec::symmetric(2, 2.0, 9)).unwrap();
        let out = convex_minorant_grid(&g).unwrap();
        for (a, b) in g.values.iter().zip(&out.values) {
            assert!((a.get() - b.get()).abs() < 1e-12);
        }
    }

    #[test]
    fn min_of_quadratics_vanishes_on_the_diamond() {
        let phi = PhiFunction::min_of_coordinate_squares(2).unwrap();
        let g = GridFunction::sample(&phi, &GridSpec::symmetric(2, 2.0, 9)).unwrap();
        let env = ConvexMinorant::new(&g).unwrap();
        let r = env.evaluator().represent(&[1.0, 1.0]);
        assert!(r.value.get() <= 1e-12, "{:?}", r);
        assert!(env.eval(&[2.0, 2.0]).get() > 1.0);
        assert!(env.eval(&[2.5, 0.0]).is_infinite());
    }

    #[test]
    fn lower_dimensional_support() {
        let pts = vec![Vector::from([0.0, 0.0]), Vector::from([1.0, 1.0]), Vector::from([-1.0, -1.0]), Vector::from([1.0, 0.0])];
        let vals = vec![ExtReal::ZERO, ExtReal::ONE, ExtReal::ONE, ExtReal::INFINITY];
        let g = GridFunction::new(pts, vals).unwrap();
        let env = ConvexMinorant::new(&g).unwrap();
        assert_eq!(env.affine_dim(), 1);
        assert!((env.eval(&[0.5, 0.5]).get() - 0.5).abs() < 1e-12);
        assert!(env.eval(&[0.5, 0.0]).is_infinite());
    }

    #[test]
    fn single_finite_point() {
        let pts = vec![Vector::from([0.0, 0.0]), Vector::from([1.0, 0.0])];
        let g = GridFunction::new(pts, vec![ExtReal::ZERO, ExtReal::INFINITY]).unwrap();
        let env = ConvexMinorant::new(&g).unwrap();
        assert_eq!(env.eval(&[0.0, 0.0]), ExtReal::ZERO);
        assert!(env.eval(&[0.5, 0.0]).is_infinite());
    }
}
