//! Construction parameters of the base map.

use crate::smooth::CAP_LAMBDA;
use crate::{Error, Result};
use serde::{Deserialize, Serialize};

/// Parameters of the homoclinic base map: corner contraction `K`, transit
/// slowdown `L`, and the fixed expansion `Lambda = 6/5`.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct Params {
    /// Corner contraction rate; the corner map contracts by `1/K` per step.
    pub k: f64,
    /// Transit slowdown factor; the transition time grows affinely in `L`.
    pub l: f64,
    /// Speed factor applied near the central square and near the disk rim,
    /// keeping the per-step stretch there below `Lambda`.
    pub inner_slowdown: f64,
    /// Lower bound enforced on `K` at validation.
    pub k_floor: f64,
}

impl Default for Params {
    fn default() -> Self {
        Self {
            k: 50.0,
            l: 20.0,
            inner_slowdown: 0.1,
            k_floor: 20.0,
        }
    }
}

impl Params {
    pub fn new(k: f64, l: f64) -> Result<Self> {
        let p = Self {
            k,
            l,
            ..Self::default()
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.k > self.k_floor) {
            return Err(Error::InvalidParam(format!(
                "K = {} must exceed the floor {}",
                self.k, self.k_floor
            )));
        }
        if !(self.l >= 1.0) {
            return Err(Error::InvalidParam(format!("L = {} must be >= 1", self.l)));
        }
        if !(self.inner_slowdown > 0.0 && self.inner_slowdown <= 1.0) {
            return Err(Error::InvalidParam(format!(
                "inner_slowdown = {} outside (0, 1]",
                self.inner_slowdown
            )));
        }
        Ok(())
    }

    /// `kappa = log K`.
    pub fn kappa(&self) -> f64 {
        self.k.ln()
    }

    /// `lambda = log Lambda`, `Lambda = 6/5`.
    pub fn lambda(&self) -> f64 {
        CAP_LAMBDA.ln()
    }

    /// The fixed expansion factor `Lambda`.
    pub fn cap_lambda(&self) -> f64 {
        CAP_LAMBDA
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validation_enforces_floors() {
        assert!(Params::new(50.0, 20.0).is_ok());
        assert!(Params::new(15.0, 20.0).is_err());
        assert!(Params::new(50.0, 0.5).is_err());
    }

    #[test]
    fn rates_are_logs() {
        let p = Params::new(std::f64::consts::E.powi(4), 20.0).unwrap();
        assert!((p.kappa() - 4.0).abs() < 1e-12);
        assert!((p.lambda() - (6.0f64 / 5.0).ln()).abs() < 1e-15);
    }
}
