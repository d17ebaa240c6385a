use crate::special::stable_constant;
use crate::Real;

use super::{FracError, Grid, GridField};

/// `|c_{d,p}|`, the normalising constant of the singular-integral form of
/// the fractional Laplacian.
pub fn frac_constant<T: Real>(d: usize, p: T) -> Result<T, FracError> {
    let pf = p.as_f64();
    if !(pf > 0.0 && pf < 2.0) || !(d == 1 || d == 2) {
        return Err(FracError::ExponentOutOfRange(pf));
    }
    Ok(T::lit(stable_constant(d, pf)))
}

/// Discrete `-(-Δ)^{p/2}` on a periodic grid.
///
/// Each axis carries a symmetric circulant stencil: the near field `|y| < δ`
/// is the scaled second difference `c/((2-p)δ^p)`, the far field is a
/// product-integration rule for `c |y|^{-1-p}` against the local quadratic
/// interpolant, wrapped onto the torus up to `n_tail` cells. Cells past
/// `n_tail` are folded in per residue class with an Euler-Maclaurin sum.
/// The diagonal is set last so that constants are annihilated exactly. In 2D the axis operators are summed.
#[derive(Debug, Clone, PartialEq)]
pub struct FracLapOperator<T> {
    grid: Grid<T>,
    p: T,
    constant: T,
    n_tail: [usize; 2],
    coeffs: [Vec<T>; 2],
}

impl<T: Real> FracLapOperator<T> {
    pub fn new(grid: Grid<T>, p: T) -> Result<Self, FracError> {
        let constant = frac_constant(1, p)?;
        let nx = default_tail(p, grid.dx(), grid.mx());
        let ny = if grid.dim() == 2 {
            default_tail(p, grid.dy(), grid.my())
        } else {
            0
        };
        Ok(Self::assemble(grid, p, constant, [nx, ny]))
    }

    /// Operator with an explicit tail truncation (cells per side).
    pub fn with_tail(grid: Grid<T>, p: T, n_tail: usize) -> Result<Self, FracError> {
        let constant = frac_constant(1, p)?;
        let ny = if grid.dim() == 2 { n_tail } else { 0 };
        Ok(Self::assemble(grid, p, constant, [n_tail.max(1), ny]))
    }

    fn assemble(grid: Grid<T>, p: T, constant: T, n_tail: [usize; 2]) -> Self {
        let cx = axis_coefficients(p, constant, grid.dx(), grid.mx(), n_tail[0]);
        let cy = if grid.dim() == 2 {
            axis_coefficients(p, constant, grid.dy(), grid.my(), n_tail[1])
        } else {
            Vec::new()
        };
        Self {
            grid,
            p,
            constant,
            n_tail,
            coeffs: [cx, cy],
        }
    }

    pub fn grid(&self) -> &Grid<T> {
        &self.grid
    }
    pub fn exponent(&self) -> T {
        self.p
    }
    pub fn constant(&self) -> T {
        self.constant
    }
    /// Tail truncation per axis, in cells.
    pub fn n_tail(&self) -> [usize; 2] {
        self.n_tail
    }

    /// Circulant coefficients `a_r` of one axis (`0` for x, `1` for y).
    pub fn axis_coefficients(&self, axis: usize) -> &[T] {
        &self.coeffs[axis]
    }

    /// Diagonal entry of the assembled operator.
    pub fn diagonal(&self) -> T {
        self.coeffs
            .iter()
            .filter_map(|c| c.first().copied())
            .fold(T::zero(), |a, b| a + b)
    }

    pub fn apply(&self, f: &GridField<T>) -> Result<GridField<T>, FracError> {
        f.check_grid(&self.grid)?;
        let mut out = vec![T::zero(); self.grid.nodes()];
        self.apply_slice(f.values(), &mut out);
        GridField::new(self.grid, out)
    }

    /// Matrix-free application on raw row-major slices: `out = A f`.
    pub fn apply_slice(&self, f: &[T], out: &mut [T]) {
        let (mx, my) = (self.grid.mx(), self.grid.my());
        let ax = &self.coeffs[0];
        for j in 0..my {
            let row = &f[j * mx..(j + 1) * mx];
            for i in 0..mx {
                out[j * mx + i] = circulant_dot(ax, row, i);
            }
        }
        if self.grid.dim() == 2 {
            let ay = &self.coeffs[1];
            let mut col = vec![T::zero(); my];
            for i in 0..mx {
                for (j, c) in col.iter_mut().enumerate() {
                    *c = f[j * mx + i];
                }
                for j in 0..my {
                    out[j * mx + i] = out[j * mx + i] + circulant_dot(ay, &col, j);
                }
            }
        }
    }
}

/// `a_r` summed against `v` around node `i`.
fn circulant_dot<T: Real>(a: &[T], v: &[T], i: usize) -> T {
    let m = v.len();
    let (head, tail) = a.split_at(m - i);
    // a_r pairs with v[i + r mod m]
    head.iter().zip(&v[i..]).map(|(&c, &x)| c * x).sum::<T>()
        + tail.iter().zip(&v[..i]).map(|(&c, &x)| c * x).sum::<T>()
}

fn default_tail<T: Real>(p: T, delta: T, m: usize) -> usize {
    let pf = p.as_f64();
    let reach = (2.0 / (1e-6 * pf)).powf(1.0 / pf) / delta.as_f64();
    let cap = 10 * m;
    if reach.is_finite() && reach < cap as f64 {
        (reach.ceil() as usize).max(1)
    } else {
        cap
    }
}

fn axis_coefficients<T: Real>(p: T, c: T, delta: T, m: usize, n_tail: usize) -> Vec<T> {
    let (p, c, delta) = (p.as_f64(), c.as_f64(), delta.as_f64());
    let mut a = vec![0.0; m];
    if m == 1 {
        return vec![T::zero()];
    }
    let mut add = |k: usize, w: f64| {
        a[k % m] += w;
        a[(m - k % m) % m] += w;
    };
    add(1, c / ((2.0 - p) * delta.powf(p)));

    // cell [k-1/2, k+1/2] in units of δ, kernel interpolated quadratically
    // through the nodes k-1, k, k+1
    let s = c * delta.powf(-p);
    let pm = |y: f64| -y.powf(-p) / p;
    let qm = |y: f64| if (p - 1.0).abs() < 1e-14 { y.ln() } else { y.powf(1.0 - p) / (1.0 - p) };
    let rm = |y: f64| y.powf(2.0 - p) / (2.0 - p);
    for k in 1..=n_tail {
        let kf = k as f64;
        let (lo, hi) = ((kf - 0.5).max(1.0), kf + 0.5);
        let m0 = pm(hi) - pm(lo);
        let q1 = qm(hi) - qm(lo);
        let m1 = q1 - kf * m0;
        let m2 = rm(hi) - rm(lo) - 2.0 * kf * q1 + kf * kf * m0;
        add(k, s * (m0 - m2));
        add(k - 1, s * 0.5 * (m2 - m1));
        add(k + 1, s * 0.5 * (m2 + m1));
    }

    // cells beyond the truncation, summed per residue class
    let l = delta * m as f64;
    let h = 1.0 / m as f64;
    let scale = c / p * l.powf(-p);
    for r in 0..m {
        let j0 = if r > n_tail { 0 } else { (n_tail - r) / m + 1 };
        let js = j0.max(8);
        let q = (r as f64 - 0.5) / m as f64;
        let direct: f64 = (j0..js)
            .map(|j| (j as f64 + q).powf(-p) - (j as f64 + q + h).powf(-p))
            .sum();
        let t = scale * (direct + wrapped_remainder(p, js as f64 + q, h));
        a[r] += t;
        a[(m - r) % m] += t;
    }
    a[0] = 0.0;
    a[0] = -a.iter().sum::<f64>();
    a.into_iter().map(T::lit).collect()
}

/// `Σ_{j≥0} (x+j)^{-p} - (x+j+h)^{-p}` by Euler-Maclaurin, for `x` well
/// away from the origin.
fn wrapped_remainder(p: f64, x: f64, h: f64) -> f64 {
    let integral = if (1.0 - p).abs() < 1e-12 {
        (h / x).ln_1p()
    } else {
        x.powf(1.0 - p) * ((1.0 - p) * (h / x).ln_1p()).exp_m1() / (1.0 - p)
    };
    let g = |s: f64| x.powf(-s) - (x + h).powf(-s);
    let c3 = p * (p + 1.0) * (p + 2.0);
    let c5 = c3 * (p + 3.0) * (p + 4.0);
    integral + g(p) / 2.0 + p * g(p + 1.0) / 12.0 - c3 * g(p + 3.0) / 720.0 + c5 * g(p + 5.0) / 30240.0
}

/// Standard second-difference Laplacian (3-point per axis, 5-point in 2D).
pub fn second_difference_laplacian<T: Real>(f: &GridField<T>) -> GridField<T> {
    let g = *f.grid();
    let mut out = GridField::zeros(g);
    let ix2 = T::one() / (g.dx() * g.dx());
    let iy2 = T::one() / (g.dy() * g.dy());
    for j in 0..g.my() {
        for i in 0..g.mx() {
            let (ii, jj) = (i as isize, j as isize);
            let c = f.at(i, j);
            let mut v = (f.at_wrapped(ii - 1, jj) + f.at_wrapped(ii + 1, jj) - c - c) * ix2;
            if g.dim() == 2 {
                v = v + (f.at_wrapped(ii, jj - 1) + f.at_wrapped(ii, jj + 1) - c - c) * iy2;
            }
            out.values_mut()[g.index(i, j)] = v;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn constant_values() {
        assert!((frac_constant(1, 1.0).unwrap() - 1.0 / PI).abs() < 1e-12);
        assert!(frac_constant(1, 2.0).is_err());
        assert!(frac_constant(3, 1.0).is_err());
        let c: f64 = frac_constant(1, 1.999).unwrap();
        assert!((c / (2.0 - 1.999) - 1.0).abs() < 2e-3);
    }

    #[test]
    fn circulant_dot_orientation() {
        let a = [0.0, 1.0, 0.0, 0.0];
        let v = [10.0, 20.0, 30.0, 40.0];
        assert_eq!(circulant_dot(&a, &v, 0), 20.0);
        assert_eq!(circulant_dot(&a, &v, 3), 10.0);
    }

    #[test]
    fn coefficients_are_symmetric_with_zero_sum() {
        let a: Vec<f64> = axis_coefficients(1.3, 0.4, 0.05, 40, 400);
        for r in 1..40 {
            assert!((a[r] - a[40 - r]).abs() < 1e-12);
            assert!(a[r] > 0.0);
        }
        assert!(a.iter().sum::<f64>().abs() < 1e-9);
    }

    #[test]
    fn annihilates_constants() {
        let g = Grid::new_2d(2.0, 1.0, 16, 12).unwrap();
        let op = FracLapOperator::new(g, 0.8).unwrap();
        let out = op.apply(&GridField::constant(g, 3.5)).unwrap();
        assert!(out.max_abs() < 1e-10);
    }

    #[test]
    fn grid_mismatch_is_reported() {
        let g = Grid::new_1d(1.0, 16).unwrap();
        let h = Grid::new_1d(1.0, 32).unwrap();
        let op = FracLapOperator::new(g, 1.0).unwrap();
        assert_eq!(op.apply(&GridField::zeros(h)), Err(FracError::GridMismatch));
    }

    #[test]
    fn second_difference_of_quadratic_mode() {
        let g = Grid::new_1d(1.0, 64).unwrap();
        let f = GridField::from_fn(g, |x, _| (2.0 * PI * x).cos());
        let lap = second_difference_laplacian(&f);
        let k = 2.0 * PI;
        let exact = -(2.0 - 2.0 * (k / 64.0).cos()) * 64.0 * 64.0;
        assert!((lap.at(0, 0) - exact).abs() < 1e-9);
    }
}
