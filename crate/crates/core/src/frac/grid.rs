use crate::Real;

use super::FracError;

/// Uniform periodic grid in one or two dimensions.
///
/// Values are stored row-major: node `(i, j)` with `i` along `x` lives at
/// `j * mx + i`. A one-dimensional grid has `my = 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid<T> {
    dim: usize,
    lx: T,
    ly: T,
    mx: usize,
    my: usize,
}

impl<T: Real> Grid<T> {
    pub fn new_1d(lx: T, mx: usize) -> Result<Self, FracError> {
        if !(lx > T::zero()) || mx == 0 {
            return Err(FracError::InvalidGrid(format!("length {lx}, resolution {mx}")));
        }
        Ok(Self {
            dim: 1,
            lx,
            ly: T::one(),
            mx,
            my: 1,
        })
    }

    pub fn new_2d(lx: T, ly: T, mx: usize, my: usize) -> Result<Self, FracError> {
        if !(lx > T::zero() && ly > T::zero()) || mx == 0 || my == 0 {
            return Err(FracError::InvalidGrid(format!(
                "lengths ({lx}, {ly}), resolution ({mx}, {my})"
            )));
        }
        Ok(Self {
            dim: 2,
            lx,
            ly,
            mx,
            my,
        })
    }

    /// Square grid with spacing `delta` on both axes.
    pub fn square(m: usize, delta: T) -> Result<Self, FracError> {
        let l = delta * T::from_count(m);
        Self::new_2d(l, l, m, m)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }
    pub fn lx(&self) -> T {
        self.lx
    }
    pub fn ly(&self) -> T {
        self.ly
    }
    pub fn mx(&self) -> usize {
        self.mx
    }
    pub fn my(&self) -> usize {
        self.my
    }
    pub fn dx(&self) -> T {
        self.lx / T::from_count(self.mx)
    }
    pub fn dy(&self) -> T {
        self.ly / T::from_count(self.my)
    }
    pub fn nodes(&self) -> usize {
        self.mx * self.my
    }

    pub fn index(&self, i: usize, j: usize) -> usize {
        j * self.mx + i
    }

    pub fn x(&self, i: usize) -> T {
        T::from_count(i) * self.dx()
    }

    pub fn y(&self, j: usize) -> T {
        if self.dim == 1 {
            T::zero()
        } else {
            T::from_count(j) * self.dy()
        }
    }

    /// Cell area (length in 1D).
    pub fn cell_measure(&self) -> T {
        if self.dim == 1 {
            self.dx()
        } else {
            self.dx() * self.dy()
        }
    }
}

/// Periodic index map onto `0..m`.
pub fn wrap(k: isize, m: usize) -> usize {
    k.rem_euclid(m as isize) as usize
}

/// Scalar field sampled on the nodes of a [`Grid`].
#[derive(Debug, Clone, PartialEq)]
pub struct GridField<T> {
    grid: Grid<T>,
    values: Vec<T>,
}

impl<T: Real> GridField<T> {
    pub fn new(grid: Grid<T>, values: Vec<T>) -> Result<Self, FracError> {
        if values.len() != grid.nodes() {
            return Err(FracError::LengthMismatch {
                expected: grid.nodes(),
                got: values.len(),
            });
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(FracError::NonFinite);
        }
        Ok(Self { grid, values })
    }

    pub fn zeros(grid: Grid<T>) -> Self {
        Self::constant(grid, T::zero())
    }

    pub fn constant(grid: Grid<T>, value: T) -> Self {
        Self {
            grid,
            values: vec![value; grid.nodes()],
        }
    }

    /// Samples `f(x, y)` at every node.
    pub fn from_fn(grid: Grid<T>, f: impl Fn(T, T) -> T) -> Self {
        let mut values = Vec::with_capacity(grid.nodes());
        for j in 0..grid.my() {
            for i in 0..grid.mx() {
                values.push(f(grid.x(i), grid.y(j)));
            }
        }
        Self { grid, values }
    }

    pub fn grid(&self) -> &Grid<T> {
        &self.grid
    }
    pub fn values(&self) -> &[T] {
        &self.values
    }
    pub fn values_mut(&mut self) -> &mut [T] {
        &mut self.values
    }
    pub fn into_values(self) -> Vec<T> {
        self.values
    }

    pub fn at(&self, i: usize, j: usize) -> T {
        self.values[self.grid.index(i, j)]
    }

    /// Value at a periodically wrapped node.
    pub fn at_wrapped(&self, i: isize, j: isize) -> T {
        self.values[self
            .grid
            .index(wrap(i, self.grid.mx()), wrap(j, self.grid.my()))]
    }

    pub fn sum(&self) -> T {
        self.values.iter().copied().sum()
    }

    pub fn mean(&self) -> T {
        self.sum() / T::from_count(self.values.len())
    }

    pub fn max_abs(&self) -> T {
        self.values.iter().fold(T::zero(), |m, v| m.max(v.abs()))
    }

    pub fn dot(&self, other: &Self) -> T {
        self.values.iter().zip(&other.values).map(|(&a, &b)| a * b).sum()
    }

    pub fn map(&self, f: impl Fn(T) -> T) -> Self {
        Self {
            grid: self.grid,
            values: self.values.iter().map(|&v| f(v)).collect(),
        }
    }

    /// `a * self + b * other`.
    pub fn lincomb(&self, a: T, other: &Self, b: T) -> Result<Self, FracError> {
        self.check_grid(other.grid())?;
        Ok(Self {
            grid: self.grid,
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(&x, &y)| a * x + b * y)
                .collect(),
        })
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }

    pub(crate) fn check_grid(&self, grid: &Grid<T>) -> Result<(), FracError> {
        if self.grid == *grid {
            Ok(())
        } else {
            Err(FracError::GridMismatch)
        }
    }

    /// Field translated by `(si, sj)` nodes: `out(i + si, j + sj) = self(i, j)`.
    pub fn shifted(&self, si: isize, sj: isize) -> Self {
        let g = self.grid;
        let mut values = vec![T::zero(); g.nodes()];
        for j in 0..g.my() {
            for i in 0..g.mx() {
                let ti = wrap(i as isize + si, g.mx());
                let tj = wrap(j as isize + sj, g.my());
                values[g.index(ti, tj)] = self.at(i, j);
            }
        }
        Self { grid: g, values }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wrap_is_total() {
        assert_eq!(wrap(-1, 5), 4);
        assert_eq!(wrap(-11, 5), 4);
        assert_eq!(wrap(7, 5), 2);
        assert_eq!(wrap(0, 1), 0);
    }

    #[test]
    fn field_validation() {
        let g = Grid::new_2d(1.0, 2.0, 3, 4).unwrap();
        assert_eq!(g.nodes(), 12);
        assert!(GridField::new(g, vec![0.0; 11]).is_err());
        assert!(GridField::new(g, vec![f64::NAN; 12]).is_err());
        assert!(Grid::<f64>::new_1d(0.0, 3).is_err());
    }

    #[test]
    fn shift_round_trip() {
        let g = Grid::new_2d(1.0, 1.0, 4, 3).unwrap();
        let f = GridField::from_fn(g, |x, y| x + 10.0 * y);
        let back = f.shifted(1, -1).shifted(-1, 1);
        assert_eq!(back, f);
        assert_eq!(f.shifted(1, 0).at(1, 0), f.at(0, 0));
    }
}
