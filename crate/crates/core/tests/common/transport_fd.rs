//! Finite-difference solve of the 1D velocity-jump transport equation
//!
//!   ∂_t p_k + v_k ∂_x p_k = λ (p_{k-1}/2 + p_{k+1}/2 - p_k)
//!
//! on a periodic interval, with the velocity index cyclic. Transport is an
//! exact integer shift (every `v_k dt / dx` must be an integer) and the jump
//! part is integrated exactly; the two are Strang-split.

use std::f64::consts::PI;

pub struct TransportGrid {
    pub cells: usize,
    pub dt: f64,
}

/// `exp(s G)` for the cyclic jump generator, as a circulant row `g[r]`.
fn jump_kernel(nv: usize, rate: f64, s: f64) -> Vec<f64> {
    (0..nv)
        .map(|r| {
            (0..nv)
                .map(|j| {
                    let th = 2.0 * PI * j as f64 / nv as f64;
                    (rate * (th.cos() - 1.0) * s).exp() * (th * r as f64).cos()
                })
                .sum::<f64>()
                / nv as f64
        })
        .collect()
}

fn mix(p: &mut [Vec<f64>], g: &[f64]) {
    let nv = p.len();
    let n = p[0].len();
    let old = p.to_vec();
    for k in 0..nv {
        for i in 0..n {
            p[k][i] = (0..nv).map(|m| g[(k + nv - m) % nv] * old[m][i]).sum();
        }
    }
}

/// Cell masses of the total density at `t_end`, starting uniform on
/// `[x0.0, x0.1)` with velocities equally likely.
pub fn solve(velocities: &[f64], rate: f64, x0: (f64, f64), length: f64, t_end: f64, g: &TransportGrid) -> Vec<f64> {
    let n = g.cells;
    let dx = length / n as f64;
    let nv = velocities.len();
    let shifts: Vec<isize> = velocities
        .iter()
        .map(|v| {
            let s = v * g.dt / dx;
            assert!((s - s.round()).abs() < 1e-9, "v dt / dx = {s} is not an integer");
            s.round() as isize
        })
        .collect();

    let mut p = vec![vec![0.0; n]; nv];
    let (a, b) = (x0.0 / dx, x0.1 / dx);
    for i in 0..n {
        let (lo, hi) = (i as f64, i as f64 + 1.0);
        let overlap = (hi.min(b) - lo.max(a)).max(0.0);
        for row in p.iter_mut() {
            row[i] = overlap / (b - a) / nv as f64;
        }
    }

    let steps = (t_end / g.dt).round() as usize;
    assert!((steps as f64 * g.dt - t_end).abs() < 1e-9);
    let half = jump_kernel(nv, rate, 0.5 * g.dt);
    for _ in 0..steps {
        mix(&mut p, &half);
        for (row, &s) in p.iter_mut().zip(&shifts) {
            row.rotate_right(s.rem_euclid(n as isize) as usize);
        }
        mix(&mut p, &half);
    }
    (0..n).map(|i| p.iter().map(|row| row[i]).sum()).collect()
}

/// Sums consecutive cells into `bins` equal bins.
pub fn rebin(mass: &[f64], bins: usize) -> Vec<f64> {
    assert_eq!(mass.len() % bins, 0);
    mass.chunks(mass.len() / bins).map(|c| c.iter().sum()).collect()
}

/// Bin fractions of points on `[0, length)`.
pub fn histogram(xs: &[f64], length: f64, bins: usize) -> Vec<f64> {
    let mut h = vec![0.0; bins];
    for &x in xs {
        let k = ((x / length * bins as f64) as usize).min(bins - 1);
        h[k] += 1.0 / xs.len() as f64;
    }
    h
}

/// `Σ |p - q|`, the L1 distance between two probability vectors.
pub fn l1(p: &[f64], q: &[f64]) -> f64 {
    p.iter().zip(q).map(|(a, b)| (a - b).abs()).sum()
}
