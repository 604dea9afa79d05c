use super::ext_real::ExtReal;
use crate::error::{Error, Result};

/// Values of a Φ-function on a product grid.
///
/// Inside the grid box values are multilinear interpolants; a cell with any
/// infinite corner evaluates to `∞`. Outside the box the function is
/// extended linearly along rays from the origin, `Φ(ξ) = Φ(tξ)/t` with `tξ`
/// on the box boundary, which keeps `t ↦ Φ(tξ)/t` nondecreasing.
#[derive(Clone, Debug, PartialEq)]
pub struct Table {
    axes: Vec<Vec<f64>>,
    values: Vec<ExtReal>,
    strides: Vec<usize>,
}

impl Table {
    /// `values` are in row-major order, last axis fastest.
    pub fn new(axes: Vec<Vec<f64>>, values: Vec<ExtReal>) -> Result<Table> {
        if axes.is_empty() {
            return Err(Error::InvalidParameter("table needs at least one axis".into()));
        }
        for (k, axis) in axes.iter().enumerate() {
            if axis.len() < 2 {
                return Err(Error::InvalidParameter(format!("axis {k} needs >= 2 nodes")));
            }
            if axis.windows(2).any(|w| !(w[0] < w[1])) || axis.iter().any(|x| !x.is_finite()) {
                return Err(Error::InvalidParameter(format!(
                    "axis {k} must be finite and strictly increasing"
                )));
            }
            if !(axis[0] < 0.0 && *axis.last().unwrap() > 0.0) {
                return Err(Error::InvalidParameter(format!(
                    "axis {k} must contain 0 in its interior"
                )));
            }
        }
        let total: usize = axes.iter().map(Vec::len).product();
        if values.len() != total {
            return Err(Error::InvalidParameter(format!(
                "table has {} values, grid has {total} nodes",
                values.len()
            )));
        }
        let mut strides = vec![1; axes.len()];
        for k in (0..axes.len() - 1).rev() {
            strides[k] = strides[k + 1] * axes[k + 1].len();
        }
        Ok(Table { axes, values, strides })
    }

    pub fn dim(&self) -> usize {
        self.axes.len()
    }

    pub fn into_parts(self) -> (Vec<Vec<f64>>, Vec<ExtReal>) {
        (self.axes, self.values)
    }

    fn inside(&self, xi: &[f64]) -> bool {
        xi.iter()
            .zip(&self.axes)
            .all(|(x, a)| *x >= a[0] && *x <= *a.last().unwrap())
    }

    fn interpolate(&self, xi: &[f64]) -> ExtReal {
        let m = self.dim();
        let mut base = 0usize;
        let mut frac = Vec::with_capacity(m);
        for (k, (x, axis)) in xi.iter().zip(&self.axes).enumerate() {
            let i = match axis.partition_point(|a| a <= x) {
                0 => 0,
                j => (j - 1).min(axis.len() - 2),
            };
            let t = ((x - axis[i]) / (axis[i + 1] - axis[i])).clamp(0.0, 1.0);
            base += i * self.strides[k];
            frac.push(t);
        }
        let mut acc = 0.0;
        for corner in 0..(1usize << m) {
            let mut idx = base;
            let mut w = 1.0;
            for k in 0..m {
                if corner >> k & 1 == 1 {
                    idx += self.strides[k];
                    w *= frac[k];
                } else {
                    w *= 1.0 - frac[k];
                }
            }
            let v = self.values[idx];
            if v.is_infinite() {
                return ExtReal::INFINITY;
            }
            acc += w * v.get();
        }
        ExtReal::from_nonneg(acc)
    }

    pub fn value(&self, xi: &[f64]) -> ExtReal {
        if self.inside(xi) {
            return self.interpolate(xi);
        }
        let mut t = f64::INFINITY;
        for (x, axis) in xi.iter().zip(&self.axes) {
            if *x > 0.0 {
                t = t.min(axis.last().unwrap() / x);
            } else if *x < 0.0 {
                t = t.min(axis[0] / x);
            }
        }
        let boundary: Vec<f64> = xi.iter().map(|x| x * t).collect();
        let v = self.interpolate(&boundary);
        if v.is_infinite() {
            v
        } else {
            ExtReal::from_nonneg(v.get() / t)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quad_table() -> Table {
        let axis = vec![-1.0, 0.0, 1.0];
        let mut values = vec![];
        for x in &axis {
            for y in &axis {
                values.push(ExtReal::finite(x * x + y * y));
            }
        }
        Table::new(vec![axis.clone(), axis], values).unwrap()
    }

    #[test]
    fn interpolates_at_nodes_and_inside() {
        let t = quad_table();
        assert_eq!(t.value(&[1.0, -1.0]).get(), 2.0);
        assert_eq!(t.value(&[0.0, 0.0]).get(), 0.0);
        assert!((t.value(&[0.5, 0.0]).get() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn extends_linearly_along_rays() {
        let t = quad_table();
        // boundary point (1, 0) has value 1, so (3, 0) extends to 3
        assert!((t.value(&[3.0, 0.0]).get() - 3.0).abs() < 1e-14);
        let a = t.value(&[2.0, 1.0]).get();
        let b = t.value(&[4.0, 2.0]).get();
        assert!((b - 2.0 * a).abs() < 1e-12);
    }

    #[test]
    fn infinite_corner_poisons_cell() {
        let axis = vec![-1.0, 0.0, 1.0];
        let mut values = vec![ExtReal::ZERO; 9];
        values[8] = ExtReal::INFINITY;
        let t = Table::new(vec![axis.clone(), axis], values).unwrap();
        assert!(t.value(&[0.1, 0.1]).is_infinite());
        assert_eq!(t.value(&[-0.5, 0.5]), ExtReal::ZERO);
    }

    #[test]
    fn rejects_axis_without_origin() {
        let r = Table::new(vec![vec![0.5, 1.0]], vec![ExtReal::ZERO; 2]);
        assert!(r.is_err());
    }
}
