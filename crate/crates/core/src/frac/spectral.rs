use num_complex::Complex;
use rustfft::FftPlanner;

use crate::Real;

use super::{FracError, Grid, GridField};

/// Exact discrete Fourier-multiplier application of `-(-Δ)^{p/2}`:
/// every mode is multiplied by `-|2πk/L|^p`, the mean mode by zero.
/// Accepts `p ∈ (0, 2]`; `p = 2` is the spectral Laplacian.
pub fn spectral_oracle<T: Real>(
    grid: &Grid<T>,
    p: T,
    f: &GridField<T>,
) -> Result<GridField<T>, FracError> {
    let pf = p.as_f64();
    if !(pf > 0.0 && pf <= 2.0) {
        return Err(FracError::ExponentOutOfRange(pf));
    }
    f.check_grid(grid)?;
    let (mx, my) = (grid.mx(), grid.my());
    let mut data: Vec<Complex<T>> = f.values().iter().map(|&v| Complex::new(v, T::zero())).collect();

    let mut planner = FftPlanner::<T>::new();
    let fx = planner.plan_fft_forward(mx);
    let ix = planner.plan_fft_inverse(mx);
    for row in data.chunks_mut(mx) {
        fx.process(row);
    }
    let mut col = vec![Complex::new(T::zero(), T::zero()); my];
    if my > 1 {
        let fy = planner.plan_fft_forward(my);
        transform_columns(&mut data, &mut col, mx, |c| fy.process(c));
    }

    let tau = T::lit(2.0) * T::PI();
    let kx = wavenumbers(mx, tau / grid.lx());
    let ky = wavenumbers(my, tau / grid.ly());
    for j in 0..my {
        for i in 0..mx {
            let k2 = kx[i] * kx[i] + ky[j] * ky[j];
            let m = if k2 == T::zero() {
                T::zero()
            } else {
                -k2.powf(p / T::lit(2.0))
            };
            data[j * mx + i] = data[j * mx + i] * m;
        }
    }

    if my > 1 {
        let iy = planner.plan_fft_inverse(my);
        transform_columns(&mut data, &mut col, mx, |c| iy.process(c));
    }
    for row in data.chunks_mut(mx) {
        ix.process(row);
    }
    let scale = T::one() / T::from_count(mx * my);
    GridField::new(*grid, data.iter().map(|z| z.re * scale).collect())
}

fn transform_columns<T: Real>(
    data: &mut [Complex<T>],
    col: &mut [Complex<T>],
    mx: usize,
    mut run: impl FnMut(&mut [Complex<T>]),
) {
    for i in 0..mx {
        for (j, c) in col.iter_mut().enumerate() {
            *c = data[j * mx + i];
        }
        run(col);
        for (j, c) in col.iter().enumerate() {
            data[j * mx + i] = *c;
        }
    }
}

/// Signed angular wavenumbers in FFT order.
fn wavenumbers<T: Real>(m: usize, unit: T) -> Vec<T> {
    if m == 1 {
        return vec![T::zero()];
    }
    (0..m)
        .map(|k| {
            let signed = if k <= m / 2 { k as f64 } else { k as f64 - m as f64 };
            unit * T::lit(signed)
        })
        .collect()
}
