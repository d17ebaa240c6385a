use crate::levy::{eval_symbol, LevyError, SymbolSpec};
use crate::Real;

use super::FracError;

/// Driver values `β_{t1}`, `β_{t2}` at times `t1`, `t2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BetaPair<T> {
    pub beta_t1: T,
    pub beta_t2: T,
    pub t1: T,
    pub t2: T,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MultiplierReport<T> {
    /// `sup_ξ m(ξ)` per pair.
    pub sup_m: Vec<T>,
    /// `sup_ξ m(ξ) / |β_{t1} - β_{t2}|` per pair; zero for equal values.
    pub ratios: Vec<T>,
    /// `(s/2) (β2/β1)^{r/2} / β1`.
    pub bound: T,
    pub max_ratio: T,
    pub within_bound: bool,
}

/// Checks the Lipschitz dependence of `(1 + βψ)^{-s/2}` on `β` measured in
/// the `r`-norm: evaluates
/// `m(ξ) = (1 + β_{t1}ψ)^{r/2} |(1 + β_{t1}ψ)^{-s/2} - (1 + β_{t2}ψ)^{-s/2}|`
/// on the probe grid. Every ratio `sup m / |Δβ|` must stay below
/// `(s/2)(β2/β1)^{r/2}/β1`, which follows from the mean value theorem for
/// `r ≤ s` and `β ∈ [β1, β2]`.
pub fn multiplier_lipschitz_check<T: Real>(
    base: &SymbolSpec<T>,
    s: T,
    r: T,
    beta_bounds: (T, T),
    pairs: &[BetaPair<T>],
    probe_grid: &[Vec<T>],
) -> Result<MultiplierReport<T>, FracError> {
    let (b1, b2) = beta_bounds;
    if !(b1 > T::zero() && b1 <= b2) {
        return Err(FracError::BetaOutOfRange(format!("bounds ({b1}, {b2})")));
    }
    if !(s > T::zero() && r > T::one() && r <= s) {
        return Err(FracError::ExponentOutOfRange(r.as_f64()));
    }
    if probe_grid.is_empty() {
        return Err(FracError::EmptyGrid);
    }
    for pair in pairs {
        for b in [pair.beta_t1, pair.beta_t2] {
            if !(b >= b1 && b <= b2) {
                return Err(FracError::BetaOutOfRange(format!("{b} outside [{b1}, {b2}]")));
            }
        }
    }

    let psi = real_symbol_values(base, probe_grid)?;
    let half = T::lit(0.5);
    let mut sup_m = Vec::with_capacity(pairs.len());
    let mut ratios = Vec::with_capacity(pairs.len());
    for pair in pairs {
        let sup = psi.iter().fold(T::zero(), |acc, &v| {
            let a1 = T::one() + pair.beta_t1 * v;
            let a2 = T::one() + pair.beta_t2 * v;
            let m = a1.powf(r * half) * (a1.powf(-s * half) - a2.powf(-s * half)).abs();
            acc.max(m)
        });
        let gap = (pair.beta_t1 - pair.beta_t2).abs();
        sup_m.push(sup);
        ratios.push(if gap > T::zero() { sup / gap } else { T::zero() });
    }
    let bound = s * half * (b2 / b1).powf(r * half) / b1;
    let max_ratio = ratios.iter().fold(T::zero(), |a, &b| a.max(b));
    Ok(MultiplierReport {
        sup_m,
        within_bound: max_ratio <= bound && max_ratio.is_finite(),
        ratios,
        bound,
        max_ratio,
    })
}

fn real_symbol_values<T: Real>(base: &SymbolSpec<T>, grid: &[Vec<T>]) -> Result<Vec<T>, FracError> {
    grid.iter()
        .map(|xi| {
            let v = eval_symbol(base, xi)?;
            if v.im.abs() > T::lit(1e-12) * (T::one() + v.re.abs()) || v.re < T::lit(-1e-12) {
                return Err(LevyError::NotRealValued(xi.iter().map(|x| x.as_f64()).collect()).into());
            }
            Ok(v.re.max(T::zero()))
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct AlphaHolderReport<T> {
    /// `sup_ξ w(ξ) ||ξ|^{-2α1} - |ξ|^{-2α2}|` per pair.
    pub sup_diff: Vec<T>,
    /// `sup / |α1 - α2|` per pair; zero for equal exponents.
    pub ratios: Vec<T>,
    pub max_ratio: T,
    pub finite: bool,
}

/// Sensitivity of the inverse fractional multiplier `|ξ|^{-2α}` to the
/// exponent, weighted by `w(ξ) = (1 + |ξ|²)^{η/2}`. The origin is skipped:
/// the difference is unbounded as `ξ → 0`, so probe radii should start away
/// from zero.
pub fn alpha_resolvent_holder_check<T: Real>(
    pairs: &[(T, T)],
    radii: &[T],
    eta: T,
) -> Result<AlphaHolderReport<T>, FracError> {
    let half = T::lit(0.5);
    for &(a1, a2) in pairs {
        for a in [a1, a2] {
            if !(a > half && a < T::one()) {
                return Err(FracError::ExponentOutOfRange(a.as_f64()));
            }
        }
    }
    let radii: Vec<T> = radii.iter().map(|r| r.abs()).filter(|&r| r > T::zero()).collect();
    if radii.is_empty() {
        return Err(FracError::EmptyGrid);
    }
    let two = T::lit(2.0);
    let mut sup_diff = Vec::with_capacity(pairs.len());
    let mut ratios = Vec::with_capacity(pairs.len());
    for &(a1, a2) in pairs {
        let sup = radii.iter().fold(T::zero(), |acc, &x| {
            let w = (T::one() + x * x).powf(eta * half);
            acc.max(w * (x.powf(-two * a1) - x.powf(-two * a2)).abs())
        });
        let gap = (a1 - a2).abs();
        sup_diff.push(sup);
        ratios.push(if gap > T::zero() { sup / gap } else { T::zero() });
    }
    let max_ratio = ratios.iter().fold(T::zero(), |a, &b| a.max(b));
    Ok(AlphaHolderReport {
        finite: ratios.iter().all(|r| r.is_finite()),
        sup_diff,
        ratios,
        max_ratio,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::levy::linear_probe_grid;

    fn pair(a: f64, b: f64) -> BetaPair<f64> {
        BetaPair {
            beta_t1: a,
            beta_t2: b,
            t1: 0.0,
            t2: 1.0,
        }
    }

    #[test]
    fn equal_betas_give_zero() {
        let base = SymbolSpec::stable(1, 2.0, 1.0).unwrap();
        let grid = linear_probe_grid(1, 10.0, 50);
        let rep = multiplier_lipschitz_check(&base, 2.0, 1.5, (1.0, 2.0), &[pair(1.3, 1.3)], &grid).unwrap();
        assert_eq!(rep.sup_m[0], 0.0);
        assert_eq!(rep.ratios[0], 0.0);
    }

    #[test]
    fn beta_range_is_enforced() {
        let base = SymbolSpec::stable(1, 2.0, 1.0).unwrap();
        let grid = linear_probe_grid(1, 10.0, 50);
        assert!(matches!(
            multiplier_lipschitz_check(&base, 2.0, 1.5, (1.0, 2.0), &[pair(0.5, 1.0)], &grid),
            Err(FracError::BetaOutOfRange(_))
        ));
    }

    #[test]
    fn complex_base_is_rejected() {
        let base = SymbolSpec::poisson(1, 1.0).unwrap();
        let grid = linear_probe_grid(1, 10.0, 50);
        assert!(multiplier_lipschitz_check(&base, 2.0, 1.5, (1.0, 2.0), &[pair(1.0, 1.1)], &grid).is_err());
    }

    #[test]
    fn alpha_equal_pair_and_range() {
        let radii: Vec<f64> = (1..100).map(|k| k as f64 * 0.1).collect();
        let rep = alpha_resolvent_holder_check(&[(0.7, 0.7)], &radii, 1.0).unwrap();
        assert_eq!(rep.ratios[0], 0.0);
        assert!(alpha_resolvent_holder_check(&[(0.4, 0.7)], &radii, 1.0).is_err());
    }
}
