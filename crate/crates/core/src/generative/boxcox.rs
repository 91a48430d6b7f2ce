//! Box-Cox t distribution in the GAMLSS (BCT) parameterization.
//!
//! With `z = ((y/mu)^nu - 1) / (nu sigma)` (or `log(y/mu) / sigma` when
//! `nu = 0`), `z` is a Student t with `tau` degrees of freedom truncated to
//! the range that maps onto `y > 0`.

use rand::Rng;
use rand_distr::Open01;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, StudentsT};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoxCoxT {
    pub mu: f64,
    pub sigma: f64,
    pub nu: f64,
    pub tau: f64,
}

impl BoxCoxT {
    pub fn new(mu: f64, sigma: f64, nu: f64, tau: f64) -> Result<Self> {
        if !(mu > 0.0 && mu.is_finite()) {
            return Err(Error::InvalidParameter(format!("BCT mu must be > 0 (got {mu})")));
        }
        if !(sigma > 0.0 && sigma.is_finite()) {
            return Err(Error::InvalidParameter(format!("BCT sigma must be > 0 (got {sigma})")));
        }
        if !nu.is_finite() {
            return Err(Error::InvalidParameter("BCT nu must be finite".into()));
        }
        if !(tau > 0.0) {
            return Err(Error::InvalidParameter(format!("BCT tau must be > 0 (got {tau})")));
        }
        Ok(BoxCoxT { mu, sigma, nu, tau })
    }

    fn t(&self) -> StudentsT {
        StudentsT::new(0.0, 1.0, self.tau).expect("validated tau")
    }

    /// `1 / (sigma |nu|)`, infinite for `nu = 0`.
    fn bound(&self) -> f64 {
        if self.nu == 0.0 {
            f64::INFINITY
        } else {
            1.0 / (self.sigma * self.nu.abs())
        }
    }

    fn z(&self, y: f64) -> f64 {
        if self.nu == 0.0 {
            (y / self.mu).ln() / self.sigma
        } else {
            ((y / self.mu).powf(self.nu) - 1.0) / (self.nu * self.sigma)
        }
    }

    pub fn cdf(&self, y: f64) -> f64 {
        if y <= 0.0 {
            return 0.0;
        }
        if y == f64::INFINITY {
            return 1.0;
        }
        let t = self.t();
        let b = self.bound();
        let lower = if self.nu > 0.0 { t.cdf(-b) } else { 0.0 };
        let norm = if b.is_infinite() { 1.0 } else { t.cdf(b) };
        ((t.cdf(self.z(y)) - lower) / norm).clamp(0.0, 1.0)
    }

    pub fn quantile(&self, p: f64) -> Result<f64> {
        if !(p > 0.0 && p < 1.0) {
            return Err(Error::InvalidProbability(format!("quantile level {p}")));
        }
        let t = self.t();
        let b = self.bound();
        let tb = if b.is_infinite() { 1.0 } else { t.cdf(b) };
        let z = if self.nu <= 0.0 {
            t.inverse_cdf(p * tb)
        } else {
            t.inverse_cdf(1.0 - (1.0 - p) * tb)
        };
        Ok(if self.nu == 0.0 {
            self.mu * (self.sigma * z).exp()
        } else {
            self.mu * (self.nu * self.sigma * z + 1.0).powf(1.0 / self.nu)
        })
    }

    /// Inverse-CDF draw.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let u: f64 = rng.sample(Open01);
        self.quantile(u).expect("open unit interval")
    }
}
