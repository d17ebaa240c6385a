use num_complex::Complex;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::levy::{eval_symbol, LevyError, SymbolSpec};
use crate::Real;

use super::{check_dt, DriverError, RngStream};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BetaBridgeParams {
    pub beta1: f64,
    pub beta2: f64,
    /// Bridge start value.
    pub beta3: f64,
    /// Bridge end value.
    pub beta4: f64,
    pub horizon: f64,
}

impl BetaBridgeParams {
    pub fn validate(&self) -> Result<(), DriverError> {
        if !(self.horizon > 0.0) || !(self.beta2 >= 0.0) || !self.beta1.is_finite() {
            return Err(DriverError::InvalidParameter(format!("{self:?}")));
        }
        Ok(())
    }

    /// `β1 + β2 I / (1 + I)`.
    pub fn beta_of_integral(&self, integral: f64) -> f64 {
        if integral.is_infinite() {
            return self.beta1 + self.beta2;
        }
        self.beta1 + self.beta2 * integral / (1.0 + integral)
    }
}

/// Brownian bridge from `β3` to `β4` built from a Wiener path value `w_t`
/// and its terminal value `w_T`.
pub fn bridge_value(params: &BetaBridgeParams, t: f64, w_t: f64, w_end: f64) -> Result<f64, DriverError> {
    let big_t = params.horizon;
    if !(0.0..=big_t).contains(&t) {
        return Err(DriverError::OutOfHorizon { t, horizon: big_t });
    }
    Ok(((big_t - t) * params.beta3 + big_t * w_t + t * (params.beta4 - w_end)) / big_t)
}

/// Bounded driver `β_t = β1 + β2 I_t/(1 + I_t)` with
/// `I_t = ∫_0^t sin²(B_s) ds` along a Brownian bridge `B`.
///
/// The Wiener path is sampled once on construction at spacing `dt`;
/// `I_t` advances with left-endpoint rectangles.
#[derive(Debug, Clone)]
pub struct BetaBridge {
    params: BetaBridgeParams,
    dt: f64,
    path: Vec<f64>,
    t: f64,
    integral: f64,
}

impl BetaBridge {
    pub fn new(params: BetaBridgeParams, dt: f64, rng: &mut RngStream) -> Result<Self, DriverError> {
        params.validate()?;
        check_dt(dt)?;
        let steps = (params.horizon / dt).ceil() as usize;
        let mut path = Vec::with_capacity(steps + 1);
        path.push(0.0);
        let mut w = 0.0;
        for k in 1..=steps {
            let h = (k as f64 * dt).min(params.horizon) - ((k - 1) as f64 * dt);
            w += h.sqrt() * rng.sample::<f64, _>(StandardNormal);
            path.push(w);
        }
        Ok(Self::from_path(params, dt, path))
    }

    /// Driver along a given Wiener path sampled at `0, dt, 2dt, ...`
    /// (the last sample at the horizon).
    pub fn from_path(params: BetaBridgeParams, dt: f64, path: Vec<f64>) -> Self {
        Self {
            params,
            dt,
            path,
            t: 0.0,
            integral: 0.0,
        }
    }

    pub fn params(&self) -> &BetaBridgeParams {
        &self.params
    }
    pub fn time(&self) -> f64 {
        self.t
    }
    pub fn integral(&self) -> f64 {
        self.integral
    }

    fn wiener_at(&self, t: f64) -> f64 {
        let pos = t / self.dt;
        let k = (pos.floor() as usize).min(self.path.len() - 1);
        if k + 1 >= self.path.len() {
            return self.path[k];
        }
        let t0 = k as f64 * self.dt;
        let t1 = ((k + 1) as f64 * self.dt).min(self.params.horizon);
        let s = if t1 > t0 { (t - t0) / (t1 - t0) } else { 0.0 };
        self.path[k] + s * (self.path[k + 1] - self.path[k])
    }

    /// Bridge value `B_t`.
    pub fn bridge_at(&self, t: f64) -> Result<f64, DriverError> {
        let w_end = *self.path.last().expect("path has at least one sample");
        bridge_value(&self.params, t, self.wiener_at(t), w_end)
    }

    /// Current `β_t`.
    pub fn beta(&self) -> f64 {
        self.params.beta_of_integral(self.integral)
    }

    /// Advances by `dt` and returns the new `β_t`.
    pub fn step(&mut self, dt: f64) -> Result<f64, DriverError> {
        check_dt(dt)?;
        let horizon = self.params.horizon;
        if self.t + dt > horizon * (1.0 + 1e-12) {
            return Err(DriverError::OutOfHorizon {
                t: self.t + dt,
                horizon,
            });
        }
        let b = self.bridge_at(self.t)?;
        self.integral += b.sin().powi(2) * dt;
        self.t = (self.t + dt).min(horizon);
        Ok(self.beta())
    }
}

/// `α(H) = a1 + (a2 - a1) aH / (1 + aH)`, with negative `H` clamped to 0.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AlphaOfH {
    pub a: f64,
    pub a1: f64,
    pub a2: f64,
}

impl AlphaOfH {
    pub fn new(a: f64, a1: f64, a2: f64) -> Result<Self, DriverError> {
        if !(a >= 0.0 && a1 <= a2 && a1.is_finite() && a2.is_finite()) {
            return Err(DriverError::InvalidParameter(format!(
                "alpha driver needs a >= 0 and a1 <= a2, got ({a}, {a1}, {a2})"
            )));
        }
        Ok(Self { a, a1, a2 })
    }

    pub fn alpha(&self, h: f64) -> f64 {
        let ah = self.a * h.max(0.0);
        if ah.is_infinite() {
            return self.a2;
        }
        self.a1 + (self.a2 - self.a1) * ah / (1.0 + ah)
    }
}

/// Time-indexed symbol `Θ_t(ξ) = (1 + β_t ψ(ξ))^{s/2}`.
#[derive(Debug, Clone)]
pub struct RandomSymbolProcess<T> {
    base: SymbolSpec<T>,
    s: T,
    driver: BetaBridge,
}

impl<T: Real> RandomSymbolProcess<T> {
    pub fn new(base: SymbolSpec<T>, s: T, driver: BetaBridge) -> Result<Self, DriverError> {
        if !(s > T::zero()) {
            return Err(DriverError::InvalidParameter(format!("exponent s = {s}")));
        }
        Ok(Self { base, s, driver })
    }

    pub fn driver(&self) -> &BetaBridge {
        &self.driver
    }

    pub fn base(&self) -> &SymbolSpec<T> {
        &self.base
    }

    pub fn advance(&mut self, dt: f64) -> Result<f64, DriverError> {
        self.driver.step(dt)
    }

    pub fn eval(&self, xi: &[T]) -> Result<Complex<T>, LevyError> {
        let psi = eval_symbol(&self.base, xi)?;
        let beta = T::lit(self.driver.beta());
        Ok((psi * beta + T::one()).powf(self.s / T::lit(2.0)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params() -> BetaBridgeParams {
        BetaBridgeParams {
            beta1: 1.0,
            beta2: 2.0,
            beta3: 0.5,
            beta4: 1.5,
            horizon: 2.0,
        }
    }

    #[test]
    fn bridge_endpoints() {
        let p = params();
        assert_eq!(bridge_value(&p, 0.0, 0.0, 0.7).unwrap(), 0.5);
        assert_eq!(bridge_value(&p, 2.0, 0.7, 0.7).unwrap(), 1.5);
        assert_eq!(bridge_value(&p, 1.0, 0.0, 0.0).unwrap(), 1.0);
        assert!(bridge_value(&p, 2.5, 0.0, 0.0).is_err());
    }

    #[test]
    fn sampled_bridge_is_pinned() {
        let mut rng = RngStream::new(3, 0);
        let b = BetaBridge::new(params(), 0.01, &mut rng).unwrap();
        assert!((b.bridge_at(0.0).unwrap() - 0.5).abs() < 1e-15);
        assert!((b.bridge_at(2.0).unwrap() - 1.5).abs() < 1e-12);
    }

    #[test]
    fn beta_of_integral_values() {
        let p = params();
        assert_eq!(p.beta_of_integral(0.0), 1.0);
        assert_eq!(p.beta_of_integral(1.0), 2.0);
        assert_eq!(p.beta_of_integral(f64::INFINITY), 3.0);
    }

    #[test]
    fn stepping_past_horizon_fails() {
        let mut b = BetaBridge::from_path(params(), 1.0, vec![0.0, 0.3, -0.2]);
        b.step(1.0).unwrap();
        b.step(1.0).unwrap();
        assert!(matches!(b.step(1.0), Err(DriverError::OutOfHorizon { .. })));
        assert!(b.step(-1.0).is_err());
    }

    #[test]
    fn alpha_values() {
        let d = AlphaOfH::new(1.0, 0.6, 0.9).unwrap();
        assert_eq!(d.alpha(0.0), 0.6);
        assert!((d.alpha(1.0) - 0.75).abs() < 1e-15);
        assert_eq!(d.alpha(-3.0), 0.6);
        assert!((d.alpha(1e300) - 0.9).abs() < 1e-12);
    }
}
