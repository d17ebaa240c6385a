use num_complex::Complex;

use crate::special::{stable_constant, AdaptiveGaussLegendre};
use crate::Real;

use super::matrix::{check_psd, check_symmetric};
use super::LevyError;

/// Jump distribution of a compound Poisson component.
#[derive(Debug, Clone, PartialEq)]
pub enum JumpLaw<T> {
    /// Finitely many jump sizes with probabilities summing to one.
    Atoms { points: Vec<Vec<T>>, weights: Vec<T> },
    /// Isotropic centred normal jumps with per-axis standard deviation `sd`.
    Gaussian { sd: T },
}

impl<T: Real> JumpLaw<T> {
    pub(crate) fn validate(&self, d: usize) -> Result<(), LevyError> {
        match self {
            JumpLaw::Atoms { points, weights } => {
                validate_atoms(points, weights, d)?;
                let total: T = weights.iter().copied().sum();
                if (total - T::one()).abs() > T::lit(1e-9) {
                    return Err(LevyError::InvalidParameter(format!(
                        "jump law weights sum to {total}, expected 1"
                    )));
                }
                Ok(())
            }
            JumpLaw::Gaussian { sd } => {
                if !(*sd >= T::zero()) {
                    return Err(LevyError::InvalidParameter("negative jump sd".into()));
                }
                Ok(())
            }
        }
    }

    /// Fourier transform `∫ e^{i ξ·y} μ(dy)`.
    pub fn fourier(&self, xi: &[T]) -> Complex<T> {
        match self {
            JumpLaw::Atoms { points, weights } => points
                .iter()
                .zip(weights)
                .map(|(y, &w)| Complex::from_polar(w, dot(xi, y)))
                .fold(Complex::new(T::zero(), T::zero()), |a, b| a + b),
            JumpLaw::Gaussian { sd } => {
                let r2 = dot(xi, xi);
                Complex::new((-T::lit(0.5) * *sd * *sd * r2).exp(), T::zero())
            }
        }
    }

    /// `∫ (ξ·y) / (1 + |y|²) μ(dy)`, the drift compensator of the jump part.
    fn compensator(&self, xi: &[T]) -> T {
        match self {
            JumpLaw::Atoms { points, weights } => points
                .iter()
                .zip(weights)
                .map(|(y, &w)| w * dot(xi, y) / (T::one() + dot(y, y)))
                .sum(),
            JumpLaw::Gaussian { .. } => T::zero(),
        }
    }
}

/// Radially symmetric jump densities.
#[derive(Debug, Clone, PartialEq)]
pub enum RadialDensity<T> {
    /// `ν(dy) = constant · |y|^{-d-p} dy`, `p ∈ (0, 2)`.
    StableTail { p: T, constant: T },
}

#[derive(Debug, Clone, PartialEq)]
pub enum LevyMeasureSpec<T> {
    Zero,
    AtomList { points: Vec<Vec<T>>, weights: Vec<T> },
    Density(RadialDensity<T>),
    CompoundPoisson { intensity: T, jump: JumpLaw<T> },
}

fn validate_atoms<T: Real>(points: &[Vec<T>], weights: &[T], d: usize) -> Result<(), LevyError> {
    if points.len() != weights.len() {
        return Err(LevyError::InvalidParameter(
            "atom points and weights differ in length".into(),
        ));
    }
    for (y, w) in points.iter().zip(weights) {
        if y.len() != d {
            return Err(LevyError::DimensionMismatch {
                expected: d,
                got: y.len(),
            });
        }
        if !(*w >= T::zero()) {
            return Err(LevyError::InvalidParameter("negative atom weight".into()));
        }
        if y.iter().all(|v| *v == T::zero()) {
            return Err(LevyError::InvalidParameter("atom at the origin".into()));
        }
    }
    Ok(())
}

impl<T: Real> LevyMeasureSpec<T> {
    pub fn validate(&self, d: usize) -> Result<(), LevyError> {
        match self {
            LevyMeasureSpec::Zero => Ok(()),
            LevyMeasureSpec::AtomList { points, weights } => validate_atoms(points, weights, d),
            LevyMeasureSpec::Density(RadialDensity::StableTail { p, constant }) => {
                if !(*p > T::zero() && *p < T::lit(2.0)) {
                    return Err(LevyError::InvalidParameter(format!(
                        "stable tail exponent {p} outside (0, 2)"
                    )));
                }
                if !(*constant >= T::zero()) {
                    return Err(LevyError::InvalidParameter("negative density constant".into()));
                }
                Ok(())
            }
            LevyMeasureSpec::CompoundPoisson { intensity, jump } => {
                if !(*intensity >= T::zero()) {
                    return Err(LevyError::InvalidParameter("negative intensity".into()));
                }
                jump.validate(d)
            }
        }
    }

    /// `∫ (|y|² ∧ 1) ν(dy)`; finite for every valid measure.
    pub fn small_jump_moment(&self) -> f64 {
        match self {
            LevyMeasureSpec::Zero => 0.0,
            LevyMeasureSpec::AtomList { points, weights } => points
                .iter()
                .zip(weights)
                .map(|(y, w)| dot(y, y).as_f64().min(1.0) * w.as_f64())
                .sum(),
            LevyMeasureSpec::Density(RadialDensity::StableTail { p, constant }) => {
                // 1D: 2c (∫_0^1 y^{1-p} dy + ∫_1^∞ y^{-1-p} dy)
                let p = p.as_f64();
                2.0 * constant.as_f64() * (1.0 / (2.0 - p) + 1.0 / p)
            }
            LevyMeasureSpec::CompoundPoisson { intensity, .. } => intensity.as_f64(),
        }
    }

    /// Jump part of the Lévy–Khintchine integrand,
    /// `∫ (1 - e^{iξ·y} + i ξ·y / (1 + |y|²)) ν(dy)`.
    fn jump_term(
        &self,
        xi: &[T],
        quad: &AdaptiveGaussLegendre,
    ) -> Result<Complex<T>, LevyError> {
        let zero = Complex::new(T::zero(), T::zero());
        match self {
            LevyMeasureSpec::Zero => Ok(zero),
            LevyMeasureSpec::AtomList { points, weights } => Ok(points
                .iter()
                .zip(weights)
                .map(|(y, &w)| {
                    let s = dot(xi, y);
                    let comp = s / (T::one() + dot(y, y));
                    Complex::new(T::one() - s.cos(), -s.sin() + comp) * w
                })
                .fold(zero, |a, b| a + b)),
            LevyMeasureSpec::CompoundPoisson { intensity, jump } => {
                let one = Complex::new(T::one(), T::zero());
                let comp = Complex::new(T::zero(), jump.compensator(xi));
                Ok((one - jump.fourier(xi) + comp) * *intensity)
            }
            LevyMeasureSpec::Density(RadialDensity::StableTail { p, constant }) => {
                if xi.len() != 1 {
                    return Err(LevyError::UnsupportedMeasure(format!(
                        "density quadrature is implemented for d = 1, got d = {}",
                        xi.len()
                    )));
                }
                let v = stable_tail_integral(xi[0].as_f64(), p.as_f64(), quad);
                Ok(Complex::new(T::lit(constant.as_f64() * v), T::zero()))
            }
        }
    }
}

/// `∫_{ℝ∖0} (1 - cos(ξ y)) |y|^{-1-p} dy`, split at `|y| = 1`.
///
/// The inner panel is regularised by `y = v^{1/(2-p)}`; the outer panel is
/// integrated over half-periods up to a cutoff `R` and the remainder beyond
/// `R` is added from its two-term integration-by-parts expansion.
pub(crate) fn stable_tail_integral(xi: f64, p: f64, quad: &AdaptiveGaussLegendre) -> f64 {
    let xi = xi.abs();
    if xi == 0.0 {
        return 0.0;
    }
    let one_minus_cos = |y: f64| 2.0 * (0.5 * xi * y).sin().powi(2);
    let m = 1.0 / (2.0 - p);
    let inner = quad.integrate(
        |v: f64| {
            if v == 0.0 {
                return m * 0.5 * xi * xi;
            }
            let y = v.powf(m);
            m * one_minus_cos(y) * y.powf(-1.0 - p) * v.powf(m - 1.0)
        },
        0.0,
        1.0,
    );

    let q = 1.0 + p;
    let cutoff = (q * 1e10 / xi.powf(2.0 + p)).powf(1.0 / (2.0 + p)).max(2.0);
    let half_period = std::f64::consts::PI / xi;
    let panels = (((cutoff - 1.0) / half_period).ceil() as usize).clamp(1, 200_000);
    let width = (cutoff - 1.0) / panels as f64;
    let outer: f64 = (0..panels)
        .map(|k| {
            let a = 1.0 + k as f64 * width;
            quad.integrate(|y| one_minus_cos(y) * y.powf(-q), a, a + width)
        })
        .sum();
    let cos_tail =
        -(xi * cutoff).sin() * cutoff.powf(-q) / xi + q * (xi * cutoff).cos() * cutoff.powf(-q - 1.0) / (xi * xi);
    let remainder = cutoff.powf(-p) / p - cos_tail;
    2.0 * (inner + outer + remainder)
}

/// Lévy–Khintchine quadruple `(a, b, Q, ν)`.
#[derive(Debug, Clone, PartialEq)]
pub struct LevyQuadruple<T> {
    pub a: T,
    pub b: Vec<T>,
    pub q: Vec<Vec<T>>,
    pub nu: LevyMeasureSpec<T>,
}

impl<T: Real> LevyQuadruple<T> {
    pub fn new(a: T, b: Vec<T>, q: Vec<Vec<T>>, nu: LevyMeasureSpec<T>) -> Result<Self, LevyError> {
        let quad = Self { a, b, q, nu };
        quad.validate()?;
        Ok(quad)
    }

    pub fn dim(&self) -> usize {
        self.b.len()
    }

    pub fn validate(&self) -> Result<(), LevyError> {
        let d = self.dim();
        if d == 0 {
            return Err(LevyError::InvalidParameter("dimension must be positive".into()));
        }
        if !(self.a >= T::zero()) {
            return Err(LevyError::InvalidParameter("killing constant a < 0".into()));
        }
        check_symmetric(&self.q, d)?;
        check_psd(&self.q)?;
        self.nu.validate(d)
    }

    /// The isotropic `p`-stable quadruple in one dimension, whose symbol is
    /// `scale · |ξ|^p`.
    pub fn stable_1d(p: T, scale: T) -> Result<Self, LevyError> {
        let c = T::lit(stable_constant(1, p.as_f64())) * scale;
        Self::new(
            T::zero(),
            vec![T::zero()],
            vec![vec![T::zero()]],
            LevyMeasureSpec::Density(RadialDensity::StableTail { p, constant: c }),
        )
    }

    /// `ψ(ξ) = a + i(b,ξ) + ½(ξ,Qξ) + ∫ (1 - e^{i(ξ,y)} + i(ξ,y)/(1+|y|²)) ν(dy)`.
    pub fn eval(&self, xi: &[T], quad: &AdaptiveGaussLegendre) -> Result<Complex<T>, LevyError> {
        if xi.len() != self.dim() {
            return Err(LevyError::DimensionMismatch {
                expected: self.dim(),
                got: xi.len(),
            });
        }
        let quadratic = T::lit(0.5) * quadratic_form(&self.q, xi);
        let base = Complex::new(self.a + quadratic, dot(&self.b, xi));
        Ok(base + self.nu.jump_term(xi, quad)?)
    }

    pub fn scaled(&self, factor: T) -> Self {
        let nu = match &self.nu {
            LevyMeasureSpec::Zero => LevyMeasureSpec::Zero,
            LevyMeasureSpec::AtomList { points, weights } => LevyMeasureSpec::AtomList {
                points: points.clone(),
                weights: weights.iter().map(|&w| w * factor).collect(),
            },
            LevyMeasureSpec::Density(RadialDensity::StableTail { p, constant }) => {
                LevyMeasureSpec::Density(RadialDensity::StableTail {
                    p: *p,
                    constant: *constant * factor,
                })
            }
            LevyMeasureSpec::CompoundPoisson { intensity, jump } => LevyMeasureSpec::CompoundPoisson {
                intensity: *intensity * factor,
                jump: jump.clone(),
            },
        };
        Self {
            a: self.a * factor,
            b: self.b.iter().map(|&v| v * factor).collect(),
            q: self
                .q
                .iter()
                .map(|row| row.iter().map(|&v| v * factor).collect())
                .collect(),
            nu,
        }
    }
}

pub(crate) fn dot<T: Real>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).map(|(&x, &y)| x * y).sum()
}

pub(crate) fn quadratic_form<T: Real>(q: &[Vec<T>], xi: &[T]) -> T {
    q.iter()
        .zip(xi)
        .map(|(row, &xi_i)| xi_i * dot(row, xi))
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stable_density_quadrature_reproduces_power() {
        let quad = AdaptiveGaussLegendre::default();
        for &p in &[0.5, 1.0, 1.5, 1.9] {
            let c = stable_constant(1, p);
            for &xi in &[0.05, 0.7, 2.0, 13.0] {
                let v = c * stable_tail_integral(xi, p, &quad);
                let exact = f64::powf(xi, p);
                assert!(
                    (v - exact).abs() <= 1e-6 * exact,
                    "p={p} xi={xi}: {v} vs {exact}"
                );
            }
        }
    }

    #[test]
    fn density_in_two_dimensions_is_unsupported() {
        let quad = LevyQuadruple::<f64>::new(
            0.0,
            vec![0.0, 0.0],
            vec![vec![0.0, 0.0], vec![0.0, 0.0]],
            LevyMeasureSpec::Density(RadialDensity::StableTail { p: 1.0, constant: 1.0 }),
        )
        .unwrap();
        let err = quad.eval(&[1.0, 0.0], &AdaptiveGaussLegendre::default());
        assert!(matches!(err, Err(LevyError::UnsupportedMeasure(_))));
    }

    #[test]
    fn measure_validation() {
        let at_origin = LevyMeasureSpec::AtomList {
            points: vec![vec![0.0]],
            weights: vec![1.0],
        };
        assert!(at_origin.validate(1).is_err());
        let negative = LevyMeasureSpec::AtomList {
            points: vec![vec![1.0]],
            weights: vec![-1.0],
        };
        assert!(negative.validate(1).is_err());
        let bad_tail = LevyMeasureSpec::Density(RadialDensity::StableTail { p: 2.0, constant: 1.0 });
        assert!(bad_tail.validate(1).is_err());
        assert!(LevyQuadruple::new(-1.0, vec![0.0], vec![vec![0.0]], LevyMeasureSpec::Zero).is_err());
    }

    #[test]
    fn small_jump_moment_is_finite() {
        let nu = LevyMeasureSpec::Density(RadialDensity::StableTail { p: 1.2, constant: 0.3 });
        assert!(nu.small_jump_moment().is_finite());
    }
}
