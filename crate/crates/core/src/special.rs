//! Special functions and quadrature used by the symbol and operator code.
//!
//! Everything here works in `f64`; callers convert into their scalar type.

use std::f64::consts::PI;

pub fn gamma(x: f64) -> f64 {
    statrs::function::gamma::gamma(x)
}

/// Normalising constant of the isotropic `p`-stable jump density in `d`
/// dimensions: with `ν(dy) = c |y|^{-d-p} dy` the Lévy–Khintchine integral
/// `∫ (1 - cos(ξ·y)) ν(dy)` equals `|ξ|^p`.
pub fn stable_constant(d: usize, p: f64) -> f64 {
    let d = d as f64;
    2f64.powf(p) * gamma((d + p) / 2.0) / (PI.powf(d / 2.0) * gamma(-p / 2.0).abs())
}

/// Nodes and weights of the `n`-point Gauss–Legendre rule on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        // Tricomi initial guess, then Newton on P_n.
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, x);
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

/// Adaptive bisecting Gauss–Legendre integrator.
#[derive(Debug, Clone)]
pub struct AdaptiveGaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_depth: usize,
}

impl Default for AdaptiveGaussLegendre {
    fn default() -> Self {
        Self::new(1e-8)
    }
}

impl AdaptiveGaussLegendre {
    pub fn new(rel_tol: f64) -> Self {
        let (nodes, weights) = gauss_legendre(15);
        Self {
            nodes,
            weights,
            rel_tol,
            abs_tol: 1e-300,
            max_depth: 40,
        }
    }

    fn rule<F: Fn(f64) -> f64>(&self, f: &F, a: f64, b: f64) -> f64 {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(mid + half * x))
            .sum::<f64>()
            * half
    }

    pub fn integrate<F: Fn(f64) -> f64>(&self, f: F, a: f64, b: f64) -> f64 {
        let whole = self.rule(&f, a, b);
        self.refine(&f, a, b, whole, 0)
    }

    fn refine<F: Fn(f64) -> f64>(&self, f: &F, a: f64, b: f64, whole: f64, depth: usize) -> f64 {
        let mid = 0.5 * (a + b);
        let left = self.rule(f, a, mid);
        let right = self.rule(f, mid, b);
        let sum = left + right;
        let err = (sum - whole).abs();
        if depth >= self.max_depth || err <= self.abs_tol.max(self.rel_tol * sum.abs()) {
            return sum;
        }
        self.refine(f, a, mid, left, depth + 1) + self.refine(f, mid, b, right, depth + 1)
    }
}
