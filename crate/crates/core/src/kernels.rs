//! Covariance and mean functions of Gaussian random fields.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::GridDomain;
use crate::special::{bessel_k, gamma};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KernelFamily {
    Linear,
    SquaredExponential,
    OrnsteinUhlenbeck,
    Matern,
}

/// Covariance function specification.
///
/// `sigma` is the variance at zero distance for every stationary family
/// (the Matern form is scaled by it as well), `beta` is the length scale and
/// `nu` the Matern smoothness. The linear kernel ignores all three.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Kernel {
    pub family: KernelFamily,
    #[serde(default = "one")]
    pub sigma: f64,
    #[serde(default = "one")]
    pub beta: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nu: Option<f64>,
}

fn one() -> f64 {
    1.0
}

impl Kernel {
    pub fn linear() -> Self {
        Kernel { family: KernelFamily::Linear, sigma: 1.0, beta: 1.0, nu: None }
    }

    pub fn squared_exponential(sigma: f64, beta: f64) -> Self {
        Kernel { family: KernelFamily::SquaredExponential, sigma, beta, nu: None }
    }

    pub fn ornstein_uhlenbeck(sigma: f64, beta: f64) -> Self {
        Kernel { family: KernelFamily::OrnsteinUhlenbeck, sigma, beta, nu: None }
    }

    pub fn matern(sigma: f64, beta: f64, nu: f64) -> Self {
        Kernel { family: KernelFamily::Matern, sigma, beta, nu: Some(nu) }
    }

    pub fn is_stationary(&self) -> bool {
        self.family != KernelFamily::Linear
    }

    pub fn validate(&self) -> Result<()> {
        if self.family == KernelFamily::Linear {
            return Ok(());
        }
        if !(self.sigma > 0.0) || !self.sigma.is_finite() {
            return Err(Error::param(format!("sigma must be > 0, got {}", self.sigma)));
        }
        if !(self.beta > 0.0) || !self.beta.is_finite() {
            return Err(Error::param(format!("beta must be > 0, got {}", self.beta)));
        }
        if self.family == KernelFamily::Matern {
            match self.nu {
                Some(nu) if nu > 0.0 && nu.is_finite() => {}
                other => return Err(Error::param(format!("matern nu must be > 0, got {other:?}"))),
            }
        }
        Ok(())
    }

    /// Σ(d, d').
    pub fn eval(&self, d: &[f64], d_prime: &[f64]) -> Result<f64> {
        if d.len() != d_prime.len() {
            return Err(Error::input(format!(
                "point dimensions differ: {} vs {}",
                d.len(),
                d_prime.len()
            )));
        }
        self.validate()?;
        Ok(match self.family {
            KernelFamily::Linear => d.iter().zip(d_prime).map(|(a, b)| a * b).sum(),
            _ => {
                let r2: f64 = d.iter().zip(d_prime).map(|(a, b)| (a - b) * (a - b)).sum();
                self.stationary_unchecked(r2.sqrt())
            }
        })
    }

    /// Stationary covariance as a function of Euclidean distance.
    pub fn at_distance(&self, r: f64) -> Result<f64> {
        if !self.is_stationary() {
            return Err(Error::Unsupported("linear kernel is not a function of distance".into()));
        }
        if !(r >= 0.0) {
            return Err(Error::input(format!("distance must be >= 0, got {r}")));
        }
        self.validate()?;
        Ok(self.stationary_unchecked(r))
    }

    fn stationary_unchecked(&self, r: f64) -> f64 {
        let (sigma, beta) = (self.sigma, self.beta);
        match self.family {
            KernelFamily::Linear => unreachable!("linear kernel has no distance form"),
            KernelFamily::SquaredExponential => sigma * (-(r * r) / (2.0 * beta * beta)).exp(),
            KernelFamily::OrnsteinUhlenbeck => sigma * (-r / beta).exp(),
            KernelFamily::Matern => {
                let nu = self.nu.unwrap_or(0.5);
                if r == 0.0 {
                    return sigma;
                }
                let s = (2.0 * nu).sqrt() * r / beta;
                // bessel_k only fails for s <= 0, excluded above
                let k = bessel_k(nu, s).unwrap_or(0.0);
                if k == 0.0 {
                    return 0.0;
                }
                // 2^{1-nu}/Γ(ν) s^ν K_ν(s), in log space to avoid overflow of
                // s^ν when K_ν is tiny
                let log = (1.0 - nu) * std::f64::consts::LN_2 - gamma(nu).ln() + nu * s.ln() + k.ln();
                sigma * log.exp()
            }
        }
    }
}

/// Mean function μ(d).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum MeanSpec {
    Constant { value: f64 },
    /// amplitude·sin(2π d₀/period) + offset, using the first coordinate.
    Sinusoid { amplitude: f64, period: f64, offset: f64 },
    /// Values at every point of `grid`, row-major.
    Tabulated { grid: GridDomain, values: Vec<f64> },
}

impl MeanSpec {
    pub fn constant(value: f64) -> Self {
        MeanSpec::Constant { value }
    }

    pub fn sinusoid(amplitude: f64, period: f64, offset: f64) -> Self {
        MeanSpec::Sinusoid { amplitude, period, offset }
    }

    pub fn tabulated(grid: GridDomain, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::input(format!(
                "tabulated mean has {} values for {} grid points",
                values.len(),
                grid.len()
            )));
        }
        Ok(MeanSpec::Tabulated { grid, values })
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            MeanSpec::Constant { .. } => Ok(()),
            MeanSpec::Sinusoid { period, .. } if !(*period > 0.0) => {
                Err(Error::param(format!("sinusoid period must be > 0, got {period}")))
            }
            MeanSpec::Sinusoid { .. } => Ok(()),
            MeanSpec::Tabulated { grid, values } if values.len() != grid.len() => Err(Error::input(
                format!("tabulated mean has {} values for {} grid points", values.len(), grid.len()),
            )),
            MeanSpec::Tabulated { .. } => Ok(()),
        }
    }

    pub fn eval(&self, d: &[f64]) -> Result<f64> {
        match self {
            MeanSpec::Constant { value } => Ok(*value),
            MeanSpec::Sinusoid { amplitude, period, offset } => {
                let t = *d.first().ok_or_else(|| Error::input("empty point"))?;
                Ok(amplitude * (2.0 * PI * t / period).sin() + offset)
            }
            MeanSpec::Tabulated { grid, values } => grid
                .locate(d)
                .map(|i| values[i])
                .ok_or_else(|| Error::input(format!("point {d:?} is not on the tabulated grid"))),
        }
    }

    /// μ evaluated at every support point of `domain`.
    pub fn vector(&self, domain: &GridDomain) -> Result<Vec<f64>> {
        self.validate()?;
        if let MeanSpec::Tabulated { grid, values } = self {
            if grid == domain {
                return Ok(values.clone());
            }
        }
        (0..domain.len()).map(|i| self.eval(&domain.point(i))).collect()
    }
}
