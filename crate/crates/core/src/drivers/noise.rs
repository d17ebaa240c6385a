use rand::Rng;
use rand_distr::{Cauchy, Distribution, StandardNormal, Triangular};

use super::{check_dt, DriverError, RngStream};

/// Increment laws for the particle velocity noise `dL_t`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NoiseModel {
    /// Standard normal.
    Gaussian,
    /// Draws `U ~ Uniform(0, 1)` and picks a law by the cumulative weights.
    Switching(SwitchingLaw),
    /// `amplitude · sin(σ) · N(0, 1)` with `σ ~ Cauchy(0, 1)` redrawn per step.
    CauchyModulated { amplitude: f64 },
}

/// Mixture of `N(0,1)`, `Laplace(0,1)` and `Triangular(left, mode, right)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SwitchingLaw {
    pub weights: [f64; 3],
    pub triangular: (f64, f64, f64),
}

impl Default for SwitchingLaw {
    fn default() -> Self {
        Self {
            weights: [0.3, 0.2, 0.5],
            triangular: (-4.0, 0.0, 8.0),
        }
    }
}

impl NoiseModel {
    pub fn switching() -> Self {
        NoiseModel::Switching(SwitchingLaw::default())
    }

    pub fn cauchy_modulated() -> Self {
        NoiseModel::CauchyModulated { amplitude: 10.0 }
    }

    pub fn name(&self) -> &'static str {
        match self {
            NoiseModel::Gaussian => "gaussian",
            NoiseModel::Switching(_) => "switching",
            NoiseModel::CauchyModulated { .. } => "cauchy_modulated",
        }
    }

    /// Parses `gaussian`, `switching` or `cauchy_modulated` with default parameters.
    pub fn from_name(name: &str) -> Option<Self> {
        match name {
            "gaussian" => Some(NoiseModel::Gaussian),
            "switching" => Some(Self::switching()),
            "cauchy_modulated" => Some(Self::cauchy_modulated()),
            _ => None,
        }
    }

    pub fn validate(&self) -> Result<(), DriverError> {
        match self {
            NoiseModel::Switching(law) => {
                let total: f64 = law.weights.iter().sum();
                let (l, m, r) = law.triangular;
                if law.weights.iter().any(|w| *w < 0.0) || (total - 1.0).abs() > 1e-12 {
                    return Err(DriverError::InvalidParameter(format!(
                        "switching weights {:?} must be nonnegative and sum to 1",
                        law.weights
                    )));
                }
                if !(l <= m && m <= r && l < r) {
                    return Err(DriverError::InvalidParameter(format!(
                        "triangular parameters ({l}, {m}, {r}) are not ordered"
                    )));
                }
                Ok(())
            }
            NoiseModel::CauchyModulated { amplitude } if !(*amplitude >= 0.0) => Err(
                DriverError::InvalidParameter(format!("negative amplitude {amplitude}")),
            ),
            _ => Ok(()),
        }
    }
}

/// Index of the switching branch selected by `u ∈ [0, 1)`.
pub fn switching_branch(weights: &[f64; 3], u: f64) -> usize {
    if u < weights[0] {
        0
    } else if u < weights[0] + weights[1] {
        1
    } else {
        2
    }
}

/// Inverse CDF of the standard Laplace law.
pub fn laplace_from_uniform(u: f64) -> f64 {
    let c = u - 0.5;
    -c.signum() * (1.0 - 2.0 * c.abs()).ln()
}

/// `amplitude · sin(σ) · sqrt(dt) · z`.
pub fn cauchy_modulated_value(amplitude: f64, sigma: f64, z: f64, dt: f64) -> f64 {
    amplitude * sigma.sin() * dt.sqrt() * z
}

impl SwitchingLaw {
    /// One unscaled draw together with the selected branch.
    pub fn draw(&self, rng: &mut RngStream) -> (usize, f64) {
        let branch = switching_branch(&self.weights, rng.random::<f64>());
        let v = match branch {
            0 => rng.sample(StandardNormal),
            1 => laplace_from_uniform(rng.random::<f64>()),
            _ => {
                let (l, m, r) = self.triangular;
                Triangular::new(l, r, m)
                    .expect("triangular parameters validated")
                    .sample(rng)
            }
        };
        (branch, v)
    }
}

/// One noise increment over a step of length `dt`; every law is scaled by `sqrt(dt)`.
pub fn draw_noise(model: &NoiseModel, rng: &mut RngStream, dt: f64) -> Result<f64, DriverError> {
    check_dt(dt)?;
    Ok(match model {
        NoiseModel::Gaussian => dt.sqrt() * rng.sample::<f64, _>(StandardNormal),
        NoiseModel::Switching(law) => dt.sqrt() * law.draw(rng).1,
        NoiseModel::CauchyModulated { amplitude } => {
            let sigma: f64 = Cauchy::new(0.0, 1.0).expect("unit Cauchy").sample(rng);
            let z: f64 = rng.sample(StandardNormal);
            cauchy_modulated_value(*amplitude, sigma, z, dt)
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn branch_partition() {
        let w = [0.3, 0.2, 0.5];
        assert_eq!(switching_branch(&w, 0.1), 0);
        assert_eq!(switching_branch(&w, 0.3), 1);
        assert_eq!(switching_branch(&w, 0.49), 1);
        assert_eq!(switching_branch(&w, 0.5), 2);
        assert_eq!(switching_branch(&w, 0.999), 2);
    }

    #[test]
    fn cauchy_at_zero_modulator_is_zero() {
        assert_eq!(cauchy_modulated_value(10.0, 0.0, 1.7, 0.3), 0.0);
    }

    #[test]
    fn laplace_quantiles() {
        assert_eq!(laplace_from_uniform(0.5), 0.0);
        assert!((laplace_from_uniform(0.75) - 2f64.ln()).abs() < 1e-15);
        assert!((laplace_from_uniform(0.25) + 2f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn nonpositive_dt() {
        let mut rng = RngStream::new(1, 0);
        assert_eq!(
            draw_noise(&NoiseModel::Gaussian, &mut rng, 0.0),
            Err(DriverError::NonpositiveDt(0.0))
        );
    }

    #[test]
    fn validation() {
        assert!(NoiseModel::switching().validate().is_ok());
        let bad = NoiseModel::Switching(SwitchingLaw {
            weights: [0.3, 0.3, 0.3],
            ..Default::default()
        });
        assert!(bad.validate().is_err());
        assert_eq!(NoiseModel::from_name("switching"), Some(NoiseModel::switching()));
    }
}
