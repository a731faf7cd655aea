//! Schwarzschild geometry in (1+1) dimensions.
//!
//! Every length and time is measured in units of the switching width σ, so
//! `BlackHoleParams::new(5.0)` is a hole with M/σ = 5.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest exponent accepted before `exp` overflows an `f64`.
const MAX_EXPONENT: f64 = 709.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BlackHoleParams {
    mass: f64,
}

impl BlackHoleParams {
    pub fn new(mass: f64) -> Result<Self> {
        if !(mass.is_finite() && mass > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "black hole mass must be positive and finite, got {mass}"
            )));
        }
        Ok(Self { mass })
    }

    pub fn mass(&self) -> f64 {
        self.mass
    }

    /// Schwarzschild radius r_s = 2M.
    pub fn horizon(&self) -> f64 {
        2.0 * self.mass
    }

    /// f(r) = 1 - r_s/r.
    pub fn metric_function(&self, r: f64) -> Result<f64> {
        if r <= 0.0 {
            return Err(Error::Singularity { r });
        }
        Ok(1.0 - self.horizon() / r)
    }

    /// Tortoise coordinate r_* = r + r_s ln|r/r_s - 1|.
    pub fn tortoise(&self, r: f64) -> Result<f64> {
        let rs = self.horizon();
        self.check_regular(r)?;
        Ok(r + rs * (r / rs - 1.0).abs().ln())
    }

    /// t_PG - t_S for an event at radius r.
    pub fn pg_time_offset(&self, r: f64) -> Result<f64> {
        let rs = self.horizon();
        self.check_regular(r)?;
        let y = (r / rs).sqrt();
        Ok(2.0 * rs * (y + 0.5 * ((y - 1.0) / (y + 1.0)).abs().ln()))
    }

    /// Kruskal pair (U, V) = (-2 r_s e^{-u/2r_s}, 2 r_s e^{v/2r_s}).
    pub fn kruskal_from_null(&self, u: f64, v: f64) -> Result<(f64, f64)> {
        let rs = self.horizon();
        let eu = -u / (2.0 * rs);
        let ev = v / (2.0 * rs);
        if !(eu.is_finite() && eu <= MAX_EXPONENT) {
            return Err(Error::KruskalRange { coordinate: u });
        }
        if !(ev.is_finite() && ev <= MAX_EXPONENT) {
            return Err(Error::KruskalRange { coordinate: v });
        }
        Ok((-2.0 * rs * eu.exp(), 2.0 * rs * ev.exp()))
    }

    /// ln|U| for the exterior map U = -2 r_s e^{-u/2r_s}; never overflows.
    pub fn ln_abs_kruskal_u(&self, u: f64) -> f64 {
        let rs = self.horizon();
        (2.0 * rs).ln() - u / (2.0 * rs)
    }

    /// ln V for V = 2 r_s e^{v/2r_s}.
    pub fn ln_kruskal_v(&self, v: f64) -> f64 {
        let rs = self.horizon();
        (2.0 * rs).ln() + v / (2.0 * rs)
    }

    fn check_regular(&self, r: f64) -> Result<()> {
        if r <= 0.0 {
            return Err(Error::Singularity { r });
        }
        if r == self.horizon() {
            return Err(Error::HorizonPole { r });
        }
        Ok(())
    }
}

/// Proper distance between two radii on a flat PG slice.
pub fn proper_distance(r1: f64, r2: f64) -> f64 {
    (r2 - r1).abs()
}
