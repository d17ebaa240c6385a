use rand::Rng;
use rand_distr::StandardNormal;

use crate::frac::{Grid, GridField};
use crate::Real;

use super::{check_dt, DriverError, RngStream};

/// Truncated Q-Wiener process on a periodic box with cosine eigenbasis
/// `e_n(x) = sqrt(2/L) cos(2πnx/L)`, `n = 1..=K`, eigenvalues
/// `λ_n = 1/(1+n)` and tensor eigenvalues `λ_{m,n} = λ_m λ_n`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QWienerSpec<T> {
    pub lx: T,
    pub ly: T,
    pub modes: usize,
}

pub fn qwiener_eigenvalue<T: Real>(k: usize) -> T {
    T::one() / (T::one() + T::from_count(k))
}

impl<T: Real> QWienerSpec<T> {
    pub fn for_grid(grid: &Grid<T>, modes: usize) -> Self {
        Self {
            lx: grid.lx(),
            ly: grid.ly(),
            modes,
        }
    }

    /// `Σ_{k ≤ K} λ_k²`.
    pub fn truncated_trace(&self) -> T {
        (1..=self.modes).map(|k| qwiener_eigenvalue::<T>(k).powi(2)).sum()
    }

    fn check(&self, grid: &Grid<T>) -> Result<(), DriverError> {
        if self.modes == 0 {
            return Err(DriverError::InvalidParameter("Q-Wiener needs at least one mode".into()));
        }
        let tol = T::lit(1e-12);
        if (self.lx - grid.lx()).abs() > tol * grid.lx()
            || (grid.dim() == 2 && (self.ly - grid.ly()).abs() > tol * grid.ly())
        {
            return Err(DriverError::GridMismatch);
        }
        let axes: &[usize] = if grid.dim() == 2 { &[grid.mx(), grid.my()] } else { &[grid.mx()] };
        for &m in axes {
            if 2 * self.modes >= m {
                return Err(DriverError::NyquistViolation {
                    modes: self.modes,
                    nodes: m,
                });
            }
        }
        Ok(())
    }

    /// `λ_n e_n` sampled on the nodes of one axis, for `n = 1..=K`.
    fn weighted_basis(&self, length: T, nodes: usize) -> Vec<Vec<T>> {
        let norm = (T::lit(2.0) / length).sqrt();
        let two_pi = T::lit(2.0) * T::PI();
        let h = length / T::from_count(nodes);
        (1..=self.modes)
            .map(|n| {
                let lam = qwiener_eigenvalue::<T>(n);
                (0..nodes)
                    .map(|i| {
                        let x = T::from_count(i) * h;
                        lam * norm * (two_pi * T::from_count(n) * x / length).cos()
                    })
                    .collect()
            })
            .collect()
    }
}

/// Builds one increment from standard normal coefficients.
///
/// `z` has `K` entries on a 1D grid and `K²` entries on a 2D grid, where
/// `z[(m-1)K + (n-1)]` multiplies `e_n(x) e_m(y)`.
pub fn qwiener_field_from_coefficients<T: Real>(
    spec: &QWienerSpec<T>,
    grid: &Grid<T>,
    dt: f64,
    z: &[f64],
) -> Result<GridField<T>, DriverError> {
    check_dt(dt)?;
    spec.check(grid)?;
    let k = spec.modes;
    let expected = if grid.dim() == 2 { k * k } else { k };
    if z.len() != expected {
        return Err(DriverError::InvalidParameter(format!(
            "expected {expected} coefficients, got {}",
            z.len()
        )));
    }
    let sdt = T::lit(dt.sqrt());
    let (mx, my) = (grid.mx(), grid.my());
    let ex = spec.weighted_basis(grid.lx(), mx);
    let mut values = vec![T::zero(); grid.nodes()];
    if grid.dim() == 1 {
        for (n, row) in ex.iter().enumerate() {
            let c = T::lit(z[n]) * sdt;
            for (v, &e) in values.iter_mut().zip(row) {
                *v = *v + c * e;
            }
        }
    } else {
        let ey = spec.weighted_basis(grid.ly(), my);
        // partial[m][i] = Σ_n z_{mn} λ_n e_n(x_i)
        for (m, ym) in ey.iter().enumerate() {
            let mut partial = vec![T::zero(); mx];
            for (n, row) in ex.iter().enumerate() {
                let c = T::lit(z[m * k + n]);
                for (p, &e) in partial.iter_mut().zip(row) {
                    *p = *p + c * e;
                }
            }
            for (j, &e_y) in ym.iter().enumerate() {
                let scale = sdt * e_y;
                for (v, &p) in values[j * mx..(j + 1) * mx].iter_mut().zip(&partial) {
                    *v = *v + scale * p;
                }
            }
        }
    }
    GridField::new(*grid, values).map_err(|_| DriverError::InvalidParameter("non-finite increment".into()))
}

/// One increment `dW` over a step of length `dt`.
pub fn sample_qwiener_increment<T: Real>(
    spec: &QWienerSpec<T>,
    grid: &Grid<T>,
    dt: f64,
    rng: &mut RngStream,
) -> Result<GridField<T>, DriverError> {
    check_dt(dt)?;
    spec.check(grid)?;
    let count = if grid.dim() == 2 { spec.modes * spec.modes } else { spec.modes };
    let z: Vec<f64> = (0..count).map(|_| rng.sample(StandardNormal)).collect();
    qwiener_field_from_coefficients(spec, grid, dt, &z)
}

/// `dt Σ λ_{m,n}² e_n(x_i)² e_m(y_j)²`, the exact variance of the increment at node `(i, j)`.
pub fn qwiener_pointwise_variance<T: Real>(
    spec: &QWienerSpec<T>,
    grid: &Grid<T>,
    dt: f64,
    i: usize,
    j: usize,
) -> Result<T, DriverError> {
    check_dt(dt)?;
    spec.check(grid)?;
    let ex = spec.weighted_basis(grid.lx(), grid.mx());
    let sx: T = ex.iter().map(|row| row[i] * row[i]).sum();
    let sy: T = if grid.dim() == 2 {
        spec.weighted_basis(grid.ly(), grid.my())
            .iter()
            .map(|row| row[j] * row[j])
            .sum()
    } else {
        T::one()
    };
    Ok(T::lit(dt) * sx * sy)
}
