use crate::frac::{wrap, Grid, GridField};

/// Periodic bilinear interpolation weights of the four nodes around `x`.
pub fn bilinear_weights(grid: &Grid<f64>, x: [f64; 2]) -> [(usize, f64); 4] {
    let (mx, my) = (grid.mx(), grid.my());
    let fx = x[0] / grid.dx();
    let fy = if grid.dim() == 2 { x[1] / grid.dy() } else { 0.0 };
    let (i0, j0) = (fx.floor(), fy.floor());
    let (sx, sy) = (fx - i0, fy - j0);
    let (i0, j0) = (i0 as isize, j0 as isize);
    let (ia, ib) = (wrap(i0, mx), wrap(i0 + 1, mx));
    let (ja, jb) = (wrap(j0, my), wrap(j0 + 1, my));
    [
        (grid.index(ia, ja), (1.0 - sx) * (1.0 - sy)),
        (grid.index(ib, ja), sx * (1.0 - sy)),
        (grid.index(ia, jb), (1.0 - sx) * sy),
        (grid.index(ib, jb), sx * sy),
    ]
}

fn periodic_kernel(m: usize, h: f64, sigma: f64) -> Vec<f64> {
    let mut k = vec![0.0; m];
    if sigma <= 0.0 {
        k[0] = 1.0;
        return k;
    }
    let images = ((6.0 * sigma / (m as f64 * h)).ceil() as isize).max(1);
    for (r, w) in k.iter_mut().enumerate() {
        for img in -images..=images {
            let d = (r as f64 + (img * m as isize) as f64) * h;
            *w += (-d * d / (2.0 * sigma * sigma)).exp();
        }
    }
    let total: f64 = k.iter().sum();
    k.iter_mut().for_each(|w| *w /= total);
    k
}

/// Periodic convolution with a normalised Gaussian of standard deviation
/// `sigma`, applied per axis. The discrete kernel sums to one.
pub fn gaussian_smooth(f: &GridField<f64>, sigma: f64) -> GridField<f64> {
    let g = *f.grid();
    let (mx, my) = (g.mx(), g.my());
    let kx = periodic_kernel(mx, g.dx(), sigma);
    let mut out = f.clone();
    let src = f.values();
    let dst = out.values_mut();
    for j in 0..my {
        for i in 0..mx {
            dst[j * mx + i] = (0..mx).map(|r| kx[r] * src[j * mx + (i + r) % mx]).sum();
        }
    }
    if g.dim() == 2 {
        let ky = periodic_kernel(my, g.dy(), sigma);
        let tmp = dst.to_vec();
        for j in 0..my {
            for i in 0..mx {
                dst[j * mx + i] = (0..my).map(|r| ky[r] * tmp[((j + r) % my) * mx + i]).sum();
            }
        }
    }
    out
}

/// Kernel-smoothed macroscopic `(He, N)`.
pub fn deposit_fields(
    state: &super::MicroState,
    cfg: &super::MicroConfig,
) -> (GridField<f64>, GridField<f64>) {
    (
        gaussian_smooth(&state.he, cfg.sigma_dep),
        gaussian_smooth(&state.ntissue, cfg.sigma_dep),
    )
}

/// Fraction of positions per cell; `None` for an empty set. On a 1D grid
/// only the first coordinate is used.
pub fn histogram_of_positions(xs: &[[f64; 2]], grid: &Grid<f64>) -> Option<GridField<f64>> {
    if xs.is_empty() {
        return None;
    }
    let mut counts = GridField::zeros(*grid);
    let w = 1.0 / xs.len() as f64;
    for x in xs {
        let i = wrap((x[0] / grid.dx()).floor() as isize, grid.mx());
        let j = if grid.dim() == 2 {
            wrap((x[1] / grid.dy()).floor() as isize, grid.my())
        } else {
            0
        };
        counts.values_mut()[grid.index(i, j)] += w;
    }
    Some(counts)
}
