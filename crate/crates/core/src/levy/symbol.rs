use num_complex::Complex;

use crate::special::AdaptiveGaussLegendre;
use crate::Real;

use super::matrix::{check_psd, check_symmetric};
use super::quadruple::{dot, quadratic_form};
use super::{JumpLaw, LevyError, LevyMeasureSpec, LevyQuadruple};

/// Bernstein functions used as outer functions in subordination.
#[derive(Debug, Clone, PartialEq)]
pub enum BernsteinSpec<T> {
    /// `λ^α`, `α ∈ (0, 1)`.
    Power { alpha: T },
    Identity,
    /// `c0 + c1 λ^α`.
    AffinePower { c0: T, c1: T, alpha: T },
}

impl<T: Real> BernsteinSpec<T> {
    pub fn validate(&self) -> Result<(), LevyError> {
        let alpha_ok = |a: &T| *a > T::zero() && *a < T::one();
        match self {
            BernsteinSpec::Power { alpha } if !alpha_ok(alpha) => Err(LevyError::InvalidParameter(
                format!("Bernstein power {alpha} outside (0, 1)"),
            )),
            BernsteinSpec::AffinePower { c0, c1, alpha }
                if !(alpha_ok(alpha) && *c0 >= T::zero() && *c1 >= T::zero()) =>
            {
                Err(LevyError::InvalidParameter(
                    "affine power needs c0, c1 >= 0 and alpha in (0, 1)".into(),
                ))
            }
            _ => Ok(()),
        }
    }

    pub fn eval(&self, lambda: T) -> T {
        match self {
            BernsteinSpec::Power { alpha } => lambda.powf(*alpha),
            BernsteinSpec::Identity => lambda,
            BernsteinSpec::AffinePower { c0, c1, alpha } => *c0 + *c1 * lambda.powf(*alpha),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum SymbolKind<T> {
    /// `½ (ξ, Qξ)`.
    Quadratic { q: Vec<Vec<T>> },
    /// `i (b, ξ) + ½ (ξ, Qξ)`.
    DriftQuadratic { b: Vec<T>, q: Vec<Vec<T>> },
    /// `scale · |ξ|^p` with spectral exponent `p ∈ (0, 2)`.
    Stable { p: T, scale: T },
    /// `λ (1 - e^{i(ξ, 1)})`: unit jumps along the all-ones vector.
    Poisson { lambda: T },
    /// `λ (1 - μ̂(ξ))`.
    CompoundPoisson { lambda: T, jump: JumpLaw<T> },
    /// `outer(inner(ξ))`.
    Composed {
        outer: BernsteinSpec<T>,
        inner: Box<SymbolSpec<T>>,
    },
    /// `factor · base(ξ)`.
    Scaled { factor: T, base: Box<SymbolSpec<T>> },
    /// `(1 + base(ξ))^{s/2}`.
    Shifted { base: Box<SymbolSpec<T>>, s: T },
    /// A general quadruple evaluated through the Lévy–Khintchine integral.
    Quadruple(LevyQuadruple<T>),
}

/// A continuous negative definite function on `ℝ^d`.
#[derive(Debug, Clone, PartialEq)]
pub struct SymbolSpec<T> {
    dim: usize,
    kind: SymbolKind<T>,
}

fn positive_dim(d: usize) -> Result<(), LevyError> {
    if d == 0 {
        Err(LevyError::InvalidParameter("dimension must be positive".into()))
    } else {
        Ok(())
    }
}

impl<T: Real> SymbolSpec<T> {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn kind(&self) -> &SymbolKind<T> {
        &self.kind
    }

    pub fn quadratic(q: Vec<Vec<T>>) -> Result<Self, LevyError> {
        let d = q.len();
        positive_dim(d)?;
        check_symmetric(&q, d)?;
        check_psd(&q)?;
        Ok(Self {
            dim: d,
            kind: SymbolKind::Quadratic { q },
        })
    }

    pub fn identity_quadratic(d: usize) -> Result<Self, LevyError> {
        Self::quadratic(
            (0..d)
                .map(|i| (0..d).map(|j| if i == j { T::one() } else { T::zero() }).collect())
                .collect(),
        )
    }

    pub fn drift_quadratic(b: Vec<T>, q: Vec<Vec<T>>) -> Result<Self, LevyError> {
        let d = b.len();
        positive_dim(d)?;
        check_symmetric(&q, d)?;
        check_psd(&q)?;
        Ok(Self {
            dim: d,
            kind: SymbolKind::DriftQuadratic { b, q },
        })
    }

    pub fn stable(d: usize, p: T, scale: T) -> Result<Self, LevyError> {
        positive_dim(d)?;
        if !(p > T::zero() && p <= T::lit(2.0)) {
            return Err(LevyError::InvalidParameter(format!(
                "stable exponent {p} outside (0, 2]"
            )));
        }
        if !(scale >= T::zero()) {
            return Err(LevyError::InvalidParameter("negative stable scale".into()));
        }
        Ok(Self {
            dim: d,
            kind: SymbolKind::Stable { p, scale },
        })
    }

    pub fn poisson(d: usize, lambda: T) -> Result<Self, LevyError> {
        positive_dim(d)?;
        if !(lambda >= T::zero()) {
            return Err(LevyError::InvalidParameter("negative intensity".into()));
        }
        Ok(Self {
            dim: d,
            kind: SymbolKind::Poisson { lambda },
        })
    }

    pub fn compound_poisson(d: usize, lambda: T, jump: JumpLaw<T>) -> Result<Self, LevyError> {
        positive_dim(d)?;
        if !(lambda >= T::zero()) {
            return Err(LevyError::InvalidParameter("negative intensity".into()));
        }
        jump.validate(d)?;
        Ok(Self {
            dim: d,
            kind: SymbolKind::CompoundPoisson { lambda, jump },
        })
    }

    pub fn scaled(self, factor: T) -> Result<Self, LevyError> {
        if !(factor >= T::zero()) {
            return Err(LevyError::InvalidParameter("negative scale factor".into()));
        }
        Ok(Self {
            dim: self.dim,
            kind: SymbolKind::Scaled {
                factor,
                base: Box::new(self),
            },
        })
    }

    pub fn shifted(self, s: T) -> Result<Self, LevyError> {
        if !(s > T::zero()) {
            return Err(LevyError::InvalidParameter("shift exponent s must be > 0".into()));
        }
        Ok(Self {
            dim: self.dim,
            kind: SymbolKind::Shifted {
                base: Box::new(self),
                s,
            },
        })
    }

    pub fn from_quadruple(quad: LevyQuadruple<T>) -> Result<Self, LevyError> {
        quad.validate()?;
        Ok(Self {
            dim: quad.dim(),
            kind: SymbolKind::Quadruple(quad),
        })
    }

    /// The killing constant `a = ψ(0)`.
    pub fn killing(&self) -> T {
        match &self.kind {
            SymbolKind::Quadruple(q) => q.a,
            SymbolKind::Composed { outer, inner } => outer.eval(inner.killing()),
            SymbolKind::Scaled { factor, base } => *factor * base.killing(),
            SymbolKind::Shifted { base, s } => (T::one() + base.killing()).powf(*s / T::lit(2.0)),
            _ => T::zero(),
        }
    }

    /// Lévy–Khintchine quadruple of the symbol, where it has a closed form.
    /// Subordinated and shifted symbols return `None`.
    pub fn quadruple(&self) -> Option<LevyQuadruple<T>> {
        let d = self.dim;
        let zeros = vec![T::zero(); d];
        let zero_q = vec![vec![T::zero(); d]; d];
        match &self.kind {
            SymbolKind::Quadratic { q } => Some(LevyQuadruple {
                a: T::zero(),
                b: zeros,
                q: q.clone(),
                nu: LevyMeasureSpec::Zero,
            }),
            SymbolKind::DriftQuadratic { b, q } => Some(LevyQuadruple {
                a: T::zero(),
                b: b.clone(),
                q: q.clone(),
                nu: LevyMeasureSpec::Zero,
            }),
            SymbolKind::Stable { p, scale } if d == 1 && *p < T::lit(2.0) => {
                LevyQuadruple::stable_1d(*p, *scale).ok()
            }
            SymbolKind::Poisson { lambda } => {
                // the compensator ∫ i(ξ,y)/(1+|y|²) ν(dy) is cancelled by the drift
                let y = vec![T::one(); d];
                let shrink = *lambda / (T::one() + T::from_count(d));
                Some(LevyQuadruple {
                    a: T::zero(),
                    b: vec![-shrink; d],
                    q: zero_q,
                    nu: LevyMeasureSpec::AtomList {
                        points: vec![y],
                        weights: vec![*lambda],
                    },
                })
            }
            SymbolKind::CompoundPoisson { lambda, jump } => {
                let b = match jump {
                    JumpLaw::Atoms { points, weights } => (0..d)
                        .map(|k| {
                            -*lambda
                                * points
                                    .iter()
                                    .zip(weights)
                                    .map(|(y, &w)| w * y[k] / (T::one() + dot(y, y)))
                                    .sum::<T>()
                        })
                        .collect(),
                    JumpLaw::Gaussian { .. } => zeros,
                };
                Some(LevyQuadruple {
                    a: T::zero(),
                    b,
                    q: zero_q,
                    nu: LevyMeasureSpec::CompoundPoisson {
                        intensity: *lambda,
                        jump: jump.clone(),
                    },
                })
            }
            SymbolKind::Scaled { factor, base } => base.quadruple().map(|q| q.scaled(*factor)),
            SymbolKind::Quadruple(q) => Some(q.clone()),
            _ => None,
        }
    }

    fn eval_unchecked(&self, xi: &[T]) -> Result<Complex<T>, LevyError> {
        let real = |v: T| Complex::new(v, T::zero());
        let half = T::lit(0.5);
        Ok(match &self.kind {
            SymbolKind::Quadratic { q } => real(half * quadratic_form(q, xi)),
            SymbolKind::DriftQuadratic { b, q } => Complex::new(half * quadratic_form(q, xi), dot(b, xi)),
            SymbolKind::Stable { p, scale } => real(*scale * dot(xi, xi).sqrt().powf(*p)),
            SymbolKind::Poisson { lambda } => {
                let s: T = xi.iter().copied().sum();
                Complex::new(T::one() - s.cos(), -s.sin()) * *lambda
            }
            SymbolKind::CompoundPoisson { lambda, jump } => (real(T::one()) - jump.fourier(xi)) * *lambda,
            SymbolKind::Composed { outer, inner } => {
                let v = inner.eval_unchecked(xi)?;
                if !is_real(v) {
                    return Err(LevyError::NotRealValued(xi.iter().map(|x| x.as_f64()).collect()));
                }
                real(outer.eval(v.re.max(T::zero())))
            }
            SymbolKind::Scaled { factor, base } => base.eval_unchecked(xi)? * *factor,
            SymbolKind::Shifted { base, s } => {
                let v = base.eval_unchecked(xi)? + T::one();
                let e = *s / T::lit(2.0);
                if is_real(v) {
                    real(v.re.powf(e))
                } else {
                    v.powf(e)
                }
            }
            SymbolKind::Quadruple(q) => q.eval(xi, &AdaptiveGaussLegendre::default())?,
        })
    }
}

fn is_real<T: Real>(v: Complex<T>) -> bool {
    v.im.abs() <= T::lit(1e-12) * (T::one() + v.re.abs())
}

/// Evaluates `ψ(ξ)`.
pub fn eval_symbol<T: Real>(spec: &SymbolSpec<T>, xi: &[T]) -> Result<Complex<T>, LevyError> {
    if xi.len() != spec.dim {
        return Err(LevyError::DimensionMismatch {
            expected: spec.dim,
            got: xi.len(),
        });
    }
    spec.eval_unchecked(xi)
}

/// `E exp(i ξ·X_t) = exp(-t ψ(ξ))`.
pub fn characteristic_function<T: Real>(
    spec: &SymbolSpec<T>,
    xi: &[T],
    t: T,
) -> Result<Complex<T>, LevyError> {
    if !(t >= T::zero()) {
        return Err(LevyError::NegativeTime(t.as_f64()));
    }
    let psi = eval_symbol(spec, xi)?;
    Ok((-psi * t).exp())
}

/// Evenly spaced probe points `r · u` for `r ∈ [-r_max, r_max]` along each
/// coordinate axis and, for `d > 1`, the main diagonal.
pub fn linear_probe_grid<T: Real>(d: usize, r_max: T, n: usize) -> Vec<Vec<T>> {
    let mut dirs: Vec<Vec<T>> = (0..d)
        .map(|k| (0..d).map(|j| if j == k { T::one() } else { T::zero() }).collect())
        .collect();
    if d > 1 {
        let c = T::one() / T::from_count(d).sqrt();
        dirs.push(vec![c; d]);
    }
    let mut points = Vec::with_capacity(dirs.len() * (2 * n + 1));
    for dir in &dirs {
        for i in 0..=2 * n {
            let r = r_max * (T::from_count(i) / T::from_count(n) - T::one());
            points.push(dir.iter().map(|&u| u * r).collect());
        }
    }
    points
}

/// Subordinates `inner` by the Bernstein function `outer`.
pub fn compose_symbols<T: Real>(
    outer: BernsteinSpec<T>,
    inner: SymbolSpec<T>,
) -> Result<SymbolSpec<T>, LevyError> {
    outer.validate()?;
    if matches!(outer, BernsteinSpec::Identity) {
        return Ok(inner);
    }
    for xi in linear_probe_grid(inner.dim, T::lit(50.0), 64) {
        let v = eval_symbol(&inner, &xi)?;
        if !is_real(v) || v.re < T::lit(-1e-12) {
            return Err(LevyError::NotRealValued(xi.iter().map(|x| x.as_f64()).collect()));
        }
    }
    Ok(SymbolSpec {
        dim: inner.dim,
        kind: SymbolKind::Composed {
            outer,
            inner: Box::new(inner),
        },
    })
}

/// `sup_ξ |ψ(ξ)| / (1 + |ξ|²)` over the probe grid.
pub fn growth_bound_constant<T: Real>(
    spec: &SymbolSpec<T>,
    probe_grid: &[Vec<T>],
) -> Result<T, LevyError> {
    if probe_grid.is_empty() {
        return Err(LevyError::EmptyGrid);
    }
    probe_grid.iter().try_fold(T::zero(), |acc, xi| {
        let psi = eval_symbol(spec, xi)?;
        Ok(acc.max(psi.norm() / (T::one() + dot(xi, xi))))
    })
}

/// The named generator examples: drifted Brownian motion, Poisson,
/// compound Poisson, a full `(b, Q, ν)` triple and the symmetric stable
/// process. All are one-dimensional.
pub fn generator_symbol_table<T: Real>() -> Vec<(&'static str, SymbolSpec<T>)> {
    let l = T::lit;
    let build = || -> Result<Vec<(&'static str, SymbolSpec<T>)>, LevyError> {
        Ok(vec![
            ("bm_drift", SymbolSpec::drift_quadratic(vec![l(0.5)], vec![vec![l(1.0)]])?),
            ("poisson", SymbolSpec::poisson(1, l(1.0))?),
            (
                "compound_poisson",
                SymbolSpec::compound_poisson(1, l(2.0), JumpLaw::Gaussian { sd: l(0.5) })?,
            ),
            (
                "full_triple",
                SymbolSpec::from_quadruple(LevyQuadruple::new(
                    T::zero(),
                    vec![l(0.3)],
                    vec![vec![l(0.5)]],
                    LevyMeasureSpec::CompoundPoisson {
                        intensity: l(1.0),
                        jump: JumpLaw::Atoms {
                            points: vec![vec![l(-1.0)], vec![l(1.0)]],
                            weights: vec![l(0.5), l(0.5)],
                        },
                    },
                )?)?,
            ),
            ("alpha_stable", SymbolSpec::stable(1, l(1.5), l(1.0))?),
        ])
    };
    build().expect("generator table parameters are valid")
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> Complex<f64> {
        Complex::new(re, im)
    }

    #[test]
    fn quadratic_identity_at_ones() {
        let spec = SymbolSpec::<f64>::identity_quadratic(2).unwrap();
        let v = eval_symbol(&spec, &[1.0, 1.0]).unwrap();
        assert!((v - c(1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn stable_is_power_of_modulus() {
        let spec = SymbolSpec::stable(2, 1.5, 1.0).unwrap();
        let v = eval_symbol(&spec, &[3.0, 4.0]).unwrap();
        assert!((v.re - 5f64.powf(1.5)).abs() < 1e-12 && v.im == 0.0);
    }

    #[test]
    fn poisson_at_pi() {
        let spec = SymbolSpec::poisson(1, 2.0).unwrap();
        let v = eval_symbol(&spec, &[PI]).unwrap();
        assert!((v - c(4.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn poisson_matches_generator_on_exponentials() {
        // generator λ[f(x+1) - f(x)] acting on f(x) = e^{iξx} gives -ψ(ξ) f
        let lambda = 1.7;
        let spec = SymbolSpec::poisson(1, lambda).unwrap();
        for &xi in &[0.3, 1.1, 2.9] {
            let f = |x: f64| Complex::from_polar(1.0, xi * x);
            let x = 0.4;
            let gen = (f(x + 1.0) - f(x)) * lambda / f(x);
            let psi = eval_symbol(&spec, &[xi]).unwrap();
            assert!((gen + psi).norm() < 1e-12);
        }
    }

    #[test]
    fn dimension_mismatch() {
        let spec = SymbolSpec::<f64>::identity_quadratic(2).unwrap();
        assert_eq!(
            eval_symbol(&spec, &[1.0]),
            Err(LevyError::DimensionMismatch { expected: 2, got: 1 })
        );
    }

    #[test]
    fn characteristic_function_examples() {
        let spec = SymbolSpec::<f64>::identity_quadratic(2).unwrap();
        let one = characteristic_function(&spec, &[0.3, 0.2], 0.0).unwrap();
        assert_eq!(one, c(1.0, 0.0));
        let v = characteristic_function(&spec, &[1.0, 0.0], 2.0).unwrap();
        assert!((v.re - (-1f64).exp()).abs() < 1e-15);
        assert!(characteristic_function(&spec, &[1.0, 0.0], -1.0).is_err());
    }

    #[test]
    fn compose_examples() {
        let q = SymbolSpec::<f64>::identity_quadratic(1).unwrap();
        // ½|ξ|² under λ^{1/2} is |ξ|/√2
        let s = compose_symbols(BernsteinSpec::Power { alpha: 0.5 }, q.clone()).unwrap();
        let v = eval_symbol(&s, &[3.0]).unwrap();
        assert!((v.re - 3.0 / 2f64.sqrt()).abs() < 1e-12);

        let same = compose_symbols(BernsteinSpec::Identity, q.clone()).unwrap();
        assert_eq!(same, q);

        let stable2 = SymbolSpec::<f64>::stable(1, 2.0, 1.0).unwrap();
        let s = compose_symbols(BernsteinSpec::Power { alpha: 0.75 }, stable2).unwrap();
        let v = eval_symbol(&s, &[2.0]).unwrap();
        assert!((v.re - 2.828427).abs() < 1e-6);
    }

    #[test]
    fn compose_rejects_complex_inner() {
        let drift = SymbolSpec::drift_quadratic(vec![1.0], vec![vec![1.0]]).unwrap();
        assert!(matches!(
            compose_symbols(BernsteinSpec::Power { alpha: 0.5 }, drift),
            Err(LevyError::NotRealValued(_))
        ));
    }

    #[test]
    fn bernstein_validation() {
        assert!(BernsteinSpec::Power { alpha: 1.0 }.validate().is_err());
        assert!(BernsteinSpec::AffinePower { c0: -1.0, c1: 1.0, alpha: 0.5 }
            .validate()
            .is_err());
    }

    #[test]
    fn growth_bound_examples() {
        let grid = linear_probe_grid(1, 100.0, 400);
        let q = SymbolSpec::<f64>::identity_quadratic(1).unwrap();
        assert!(growth_bound_constant(&q, &grid).unwrap() <= 0.5);
        let st = SymbolSpec::stable(1, 1.4, 1.0).unwrap();
        assert!(growth_bound_constant(&st, &grid).unwrap() <= 1.0);
        let po = SymbolSpec::poisson(1, 3.0).unwrap();
        assert!(growth_bound_constant(&po, &grid).unwrap() <= 6.0);
        assert_eq!(growth_bound_constant(&po, &[]), Err(LevyError::EmptyGrid));
    }

    #[test]
    fn table_contents() {
        let table = generator_symbol_table::<f64>();
        assert_eq!(table.len(), 5);
        assert!(table
            .iter()
            .any(|(n, s)| *n == "alpha_stable" && matches!(s.kind(), SymbolKind::Stable { .. })));
        assert!(table
            .iter()
            .any(|(n, s)| *n == "bm_drift" && matches!(s.kind(), SymbolKind::DriftQuadratic { .. })));
    }

    #[test]
    fn killing_constants() {
        let q = SymbolSpec::<f64>::identity_quadratic(1).unwrap();
        assert_eq!(q.killing(), 0.0);
        let shifted = q.shifted(1.0).unwrap();
        assert_eq!(shifted.killing(), 1.0);
        assert_eq!(eval_symbol(&shifted, &[0.0]).unwrap().re, 1.0);
    }
}
