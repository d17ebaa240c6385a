//! Matrix-free BiCGSTAB for the nonsymmetric implicit stencils.

use thiserror::Error;

use crate::Real;

/// A square linear map applied without assembling a matrix.
pub trait LinearOperator<T> {
    fn dim(&self) -> usize;
    /// `y = A x`.
    fn apply(&self, x: &[T], y: &mut [T]);
}

/// Wraps a closure as a [`LinearOperator`].
pub struct FnOperator<F> {
    n: usize,
    f: F,
}

impl<F> FnOperator<F> {
    pub fn new(n: usize, f: F) -> Self {
        Self { n, f }
    }
}

impl<T, F: Fn(&[T], &mut [T])> LinearOperator<T> for FnOperator<F> {
    fn dim(&self) -> usize {
        self.n
    }
    fn apply(&self, x: &[T], y: &mut [T]) {
        (self.f)(x, y)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolveReport<T> {
    pub iterations: usize,
    /// True relative residual `‖b - Ax‖₂ / ‖b‖₂` at exit.
    pub residual: T,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SolveError {
    #[error("dimension mismatch: operator {op}, right-hand side {rhs}, guess {guess}")]
    DimensionMismatch { op: usize, rhs: usize, guess: usize },
    #[error("no convergence after {iterations} iterations, relative residual {residual:e}")]
    NotConverged { iterations: usize, residual: f64 },
    #[error("iteration produced non-finite values at step {0}")]
    NonFinite(usize),
}

fn dot<T: Real>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).map(|(&x, &y)| x * y).sum()
}

fn norm<T: Real>(a: &[T]) -> T {
    dot(a, a).sqrt()
}

fn residual<T: Real, A: LinearOperator<T>>(a: &A, b: &[T], x: &[T], r: &mut [T]) {
    a.apply(x, r);
    for (ri, &bi) in r.iter_mut().zip(b) {
        *ri = bi - *ri;
    }
}

/// Solves `A x = b` starting from the contents of `x`.
///
/// Stops when the true relative residual is at most `tol`. A breakdown of
/// the shadow residual restarts the recurrence from the current iterate.
pub fn bicgstab<T: Real, A: LinearOperator<T>>(
    a: &A,
    b: &[T],
    x: &mut [T],
    tol: T,
    max_iter: usize,
) -> Result<SolveReport<T>, SolveError> {
    let n = a.dim();
    if b.len() != n || x.len() != n {
        return Err(SolveError::DimensionMismatch {
            op: n,
            rhs: b.len(),
            guess: x.len(),
        });
    }
    let bnorm = norm(b);
    if bnorm == T::zero() {
        x.iter_mut().for_each(|v| *v = T::zero());
        return Ok(SolveReport {
            iterations: 0,
            residual: T::zero(),
        });
    }

    let zero = T::zero();
    let mut r = vec![zero; n];
    let mut v = vec![zero; n];
    let mut p = vec![zero; n];
    let mut s = vec![zero; n];
    let mut t = vec![zero; n];
    let mut iterations = 0;

    residual(a, b, x, &mut r);
    let mut rel = norm(&r) / bnorm;
    'restart: while rel > tol && iterations < max_iter {
        let r_hat = r.clone();
        let (mut rho, mut alpha, mut omega) = (T::one(), T::one(), T::one());
        v.iter_mut().for_each(|e| *e = zero);
        p.iter_mut().for_each(|e| *e = zero);

        while iterations < max_iter {
            iterations += 1;
            let rho_new = dot(&r_hat, &r);
            if rho_new == zero || omega == zero {
                residual(a, b, x, &mut r);
                rel = norm(&r) / bnorm;
                continue 'restart;
            }
            let beta = (rho_new / rho) * (alpha / omega);
            rho = rho_new;
            for i in 0..n {
                p[i] = r[i] + beta * (p[i] - omega * v[i]);
            }
            a.apply(&p, &mut v);
            let rv = dot(&r_hat, &v);
            if rv == zero {
                residual(a, b, x, &mut r);
                rel = norm(&r) / bnorm;
                continue 'restart;
            }
            alpha = rho / rv;
            for i in 0..n {
                s[i] = r[i] - alpha * v[i];
            }
            if norm(&s) / bnorm <= tol {
                for i in 0..n {
                    x[i] = x[i] + alpha * p[i];
                }
                break;
            }
            a.apply(&s, &mut t);
            let tt = dot(&t, &t);
            omega = if tt == zero { zero } else { dot(&t, &s) / tt };
            for i in 0..n {
                x[i] = x[i] + alpha * p[i] + omega * s[i];
                r[i] = s[i] - omega * t[i];
            }
            if !alpha.is_finite() || !omega.is_finite() {
                return Err(SolveError::NonFinite(iterations));
            }
            if norm(&r) / bnorm <= tol {
                break;
            }
        }
        residual(a, b, x, &mut r);
        rel = norm(&r) / bnorm;
    }

    if !rel.is_finite() {
        return Err(SolveError::NonFinite(iterations));
    }
    if rel > tol {
        return Err(SolveError::NotConverged {
            iterations,
            residual: rel.as_f64(),
        });
    }
    Ok(SolveReport {
        iterations,
        residual: rel,
    })
}
