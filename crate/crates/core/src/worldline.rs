//! Detector trajectories parametrized by proper time.
//!
//! Kruskal coordinates grow like e^{r_*/2r_s} and overflow long before the
//! physics becomes interesting, so they are carried as sign, log-magnitude
//! and log-rate. Correlators only ever need ratios of them.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::BlackHoleParams;

/// A linear null coordinate (u or v) and its proper-time derivative.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NullCoord {
    pub value: f64,
    pub rate: f64,
}

/// A Kruskal null coordinate `sign * exp(ln_abs)` whose proper-time
/// derivative is `exp(ln_rate)`. The derivative is positive on every
/// future-directed worldline considered here.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KruskalCoord {
    pub sign: f64,
    pub ln_abs: f64,
    pub ln_rate: f64,
}

impl KruskalCoord {
    pub fn value(&self) -> f64 {
        if self.sign == 0.0 {
            0.0
        } else {
            self.sign * self.ln_abs.exp()
        }
    }

    pub fn rate(&self) -> f64 {
        self.ln_rate.exp()
    }
}

/// Everything a correlator needs about one event on a worldline.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WorldlinePoint {
    pub tau: f64,
    pub u: Option<NullCoord>,
    pub v: Option<NullCoord>,
    pub big_u: Option<KruskalCoord>,
    pub big_v: Option<KruskalCoord>,
    /// Ordering time: PG time in Schwarzschild, inertial time in Minkowski.
    pub t_pg: f64,
    /// Areal radius (Schwarzschild) or spatial position x (Minkowski).
    pub r: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Worldline {
    /// Observer held at fixed radius r0 > r_s, τ = 0 at t_S = 0.
    Static {
        bh: BlackHoleParams,
        r0: f64,
        redshift: f64,
        tortoise: f64,
        pg_offset: f64,
    },
    /// Radial geodesic from rest at infinity, τ = 0 at the singularity.
    Infall { bh: BlackHoleParams },
    /// Inertial observer in flat space: x(τ) = x0 + β γ τ, t(τ) = γ τ.
    Minkowski { x0: f64, beta: f64, gamma: f64 },
}

impl Worldline {
    pub fn static_at(bh: BlackHoleParams, r0: f64) -> Result<Self> {
        if !(r0 > bh.horizon()) || !r0.is_finite() {
            return Err(Error::NoStaticObserver {
                r0,
                horizon: bh.horizon(),
            });
        }
        Ok(Worldline::Static {
            bh,
            r0,
            redshift: bh.metric_function(r0)?.sqrt(),
            tortoise: bh.tortoise(r0)?,
            pg_offset: bh.pg_time_offset(r0)?,
        })
    }

    pub fn infall(bh: BlackHoleParams) -> Self {
        Worldline::Infall { bh }
    }

    pub fn minkowski_static(x0: f64) -> Self {
        Worldline::Minkowski {
            x0,
            beta: 0.0,
            gamma: 1.0,
        }
    }

    /// Inertial observer passing x0 at τ = 0 and receding towards -x.
    pub fn minkowski_boosted(x0: f64, speed: f64) -> Result<Self> {
        Self::minkowski_moving(x0, -speed)
    }

    /// Inertial observer with signed velocity `beta` along x.
    pub fn minkowski_moving(x0: f64, beta: f64) -> Result<Self> {
        if !(beta.abs() < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "speed must satisfy |v| < 1, got {beta}"
            )));
        }
        Ok(Worldline::Minkowski {
            x0,
            beta,
            gamma: 1.0 / (1.0 - beta * beta).sqrt(),
        })
    }

    /// Open interval of admissible proper times.
    pub fn domain(&self) -> (f64, f64) {
        match self {
            Worldline::Infall { .. } => (f64::NEG_INFINITY, 0.0),
            _ => (f64::NEG_INFINITY, f64::INFINITY),
        }
    }

    pub fn contains(&self, tau: f64) -> bool {
        let (lo, hi) = self.domain();
        tau > lo && tau < hi
    }

    pub fn black_hole(&self) -> Option<BlackHoleParams> {
        match self {
            Worldline::Static { bh, .. } | Worldline::Infall { bh } => Some(*bh),
            Worldline::Minkowski { .. } => None,
        }
    }

    pub fn is_flat(&self) -> bool {
        matches!(self, Worldline::Minkowski { .. })
    }

    pub fn point(&self, tau: f64) -> Result<WorldlinePoint> {
        match *self {
            Worldline::Static {
                bh,
                r0,
                redshift,
                tortoise,
                pg_offset,
            } => {
                let rs = bh.horizon();
                let t = tau / redshift;
                let rate = 1.0 / redshift;
                let u = t - tortoise;
                let v = t + tortoise;
                Ok(WorldlinePoint {
                    tau,
                    u: Some(NullCoord { value: u, rate }),
                    v: Some(NullCoord { value: v, rate }),
                    big_u: Some(KruskalCoord {
                        sign: -1.0,
                        ln_abs: bh.ln_abs_kruskal_u(u),
                        ln_rate: -u / (2.0 * rs) + rate.ln(),
                    }),
                    big_v: Some(KruskalCoord {
                        sign: 1.0,
                        ln_abs: bh.ln_kruskal_v(v),
                        ln_rate: v / (2.0 * rs) + rate.ln(),
                    }),
                    t_pg: t + pg_offset,
                    r: r0,
                })
            }
            Worldline::Infall { bh } => infall_point(bh, tau),
            Worldline::Minkowski { x0, beta, gamma } => {
                let t = gamma * tau;
                let x = x0 + beta * gamma * tau;
                Ok(WorldlinePoint {
                    tau,
                    u: Some(NullCoord {
                        value: t - x,
                        rate: gamma * (1.0 - beta),
                    }),
                    v: Some(NullCoord {
                        value: t + x,
                        rate: gamma * (1.0 + beta),
                    }),
                    big_u: None,
                    big_v: None,
                    t_pg: t,
                    r: x,
                })
            }
        }
    }

    pub fn radius(&self, tau: f64) -> Result<f64> {
        Ok(self.point(tau)?.r)
    }

    pub fn t_pg(&self, tau: f64) -> Result<f64> {
        Ok(self.point(tau)?.t_pg)
    }

    pub fn u(&self, tau: f64) -> Result<NullCoord> {
        self.point(tau)?.u.ok_or(Error::Patch { patch: "u", tau })
    }

    pub fn v(&self, tau: f64) -> Result<NullCoord> {
        self.point(tau)?.v.ok_or(Error::Patch { patch: "v", tau })
    }

    /// Kruskal (U, V) as plain numbers; overflow is reported as a range error.
    pub fn kruskal(&self, tau: f64) -> Result<(f64, f64)> {
        let p = self.point(tau)?;
        let bu = p.big_u.ok_or(Error::Patch { patch: "U", tau })?;
        let bv = p.big_v.ok_or(Error::Patch { patch: "V", tau })?;
        let (uk, vk) = (bu.value(), bv.value());
        if !uk.is_finite() || !vk.is_finite() {
            return Err(Error::KruskalRange { coordinate: tau });
        }
        Ok((uk, vk))
    }

    /// Kruskal rates (dU/dτ, dV/dτ).
    pub fn kruskal_rates(&self, tau: f64) -> Result<(f64, f64)> {
        let p = self.point(tau)?;
        let bu = p.big_u.ok_or(Error::Patch { patch: "U", tau })?;
        let bv = p.big_v.ok_or(Error::Patch { patch: "V", tau })?;
        Ok((bu.rate(), bv.rate()))
    }
}

/// Horizon-crossing proper time τ_s = -4M/3 of the infall geodesic.
pub fn horizon_crossing_time(bh: BlackHoleParams) -> f64 {
    -4.0 * bh.mass() / 3.0
}

/// r(τ) = r_s (τ/τ_s)^{2/3} along the infall geodesic.
pub fn infall_radius(bh: BlackHoleParams, tau: f64) -> Result<f64> {
    if !(tau < 0.0) {
        return Err(Error::OutOfDomain { tau });
    }
    let x = tau / horizon_crossing_time(bh);
    Ok(bh.horizon() * x.cbrt().powi(2))
}

/// Rate-normalised separations (X(τ) − X(τ′))/√(Ẋ(τ) Ẋ(τ′)) between two
/// events on the same worldline, one per null coordinate (`None` where the
/// coordinate is undefined).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NullSeparations {
    pub u: Option<f64>,
    pub v: Option<f64>,
    pub big_u: Option<f64>,
    pub big_v: Option<f64>,
}

impl Worldline {
    /// Separations between two events of this worldline, formed from Δτ
    /// rather than by subtracting coordinate values, so they keep full
    /// relative precision near coincidence.
    pub fn separations(&self, p: &WorldlinePoint, q: &WorldlinePoint) -> NullSeparations {
        let dt = p.tau - q.tau;
        match *self {
            Worldline::Minkowski { .. } => NullSeparations {
                u: Some(dt),
                v: Some(dt),
                big_u: None,
                big_v: None,
            },
            Worldline::Static { bh, redshift, .. } => {
                let s = 4.0 * bh.horizon() * redshift;
                let k = s * (dt / s).sinh();
                NullSeparations {
                    u: Some(dt),
                    v: Some(dt),
                    big_u: Some(k),
                    big_v: Some(k),
                }
            }
            Worldline::Infall { bh } => {
                let rs = bh.horizon();
                let two_rs = 2.0 * rs;
                let tau_s = horizon_crossing_time(bh);
                let y = (p.tau / tau_s).cbrt();
                let yp = (q.tau / tau_s).cbrt();
                // y³ − y′³ = Δτ/τ_s
                let dy = (dt / tau_s) / (y * y + y * yp + yp * yp);
                let sum = y + yp;
                let root = (y * yp).sqrt();
                // U = 2r_s (1 − y) e^g, V = 2r_s (1 + y) e^h
                let dg = -dt / two_rs + dy + 0.5 * sum * dy;
                let dh = dt / two_rs - dy + 0.5 * sum * dy;
                let big_u = two_rs * ((1.0 - y) * dg.exp_m1() - dy) * (-0.5 * dg).exp() / root;
                let big_v = two_rs * ((1.0 + y) * dh.exp_m1() + dy) * (-0.5 * dh).exp() / root;
                let dv = dt - two_rs * dy + rs * sum * dy + two_rs * (dy / (1.0 + yp)).ln_1p();
                let v = dv / (y / (y + 1.0) * yp / (yp + 1.0)).sqrt();
                let u = (y > 1.0 && yp > 1.0).then(|| {
                    let du = dt - two_rs * dy - rs * sum * dy - two_rs * (dy / (yp - 1.0)).ln_1p();
                    du / (y / (y - 1.0) * yp / (yp - 1.0)).sqrt()
                });
                NullSeparations {
                    u,
                    v: Some(v),
                    big_u: Some(big_u),
                    big_v: Some(big_v),
                }
            }
        }
    }
}

fn infall_point(bh: BlackHoleParams, tau: f64) -> Result<WorldlinePoint> {
    if !(tau < 0.0) {
        return Err(Error::OutOfDomain { tau });
    }
    let rs = bh.horizon();
    let two_rs = 2.0 * rs;
    let y = (tau / horizon_crossing_time(bh)).cbrt();
    let r = rs * y * y;
    let half_y2 = 0.5 * y * y;

    let v = NullCoord {
        value: tau - two_rs * y + rs * y * y + two_rs * (1.0 + y).ln(),
        rate: y / (y + 1.0),
    };
    let u = (y > 1.0).then(|| NullCoord {
        value: tau - two_rs * y - rs * y * y - two_rs * (y - 1.0).ln(),
        rate: y / (y - 1.0),
    });
    let sign_u = if y < 1.0 {
        1.0
    } else if y > 1.0 {
        -1.0
    } else {
        0.0
    };
    let big_u = KruskalCoord {
        sign: sign_u,
        ln_abs: two_rs.ln() - tau / two_rs + y + half_y2 + (1.0 - y).abs().ln(),
        ln_rate: y.ln() - tau / two_rs + y + half_y2,
    };
    let big_v = KruskalCoord {
        sign: 1.0,
        ln_abs: two_rs.ln() + tau / two_rs - y + half_y2 + (1.0 + y).ln(),
        ln_rate: y.ln() + tau / two_rs - y + half_y2,
    };
    Ok(WorldlinePoint {
        tau,
        u,
        v: Some(v),
        big_u: Some(big_u),
        big_v: Some(big_v),
        t_pg: tau,
        r,
    })
}

/// Kinematic relative velocity of the E = 1 infaller at r_a seen by the
/// static observer at r_b: f(r_b) sqrt(1 - f(r_a)^2).
pub fn kinematic_relative_velocity(bh: BlackHoleParams, r_a: f64, r_b: f64) -> Result<f64> {
    if !(r_b > bh.horizon()) {
        return Err(Error::NoStaticObserver {
            r0: r_b,
            horizon: bh.horizon(),
        });
    }
    let fa = bh.metric_function(r_a)?;
    let fb = bh.metric_function(r_b)?;
    Ok(fb * (1.0 - fa * fa).max(0.0).sqrt())
}

/// Proper acceleration -M/r(τ)^2 along the infall geodesic.
pub fn infall_proper_acceleration(bh: BlackHoleParams, tau: f64) -> Result<f64> {
    let r = infall_radius(bh, tau)?;
    Ok(-bh.mass() / (r * r))
}

/// Proper time at which the infaller reaches radius `d`.
pub fn ff_peak_time(bh: BlackHoleParams, d: f64) -> Result<f64> {
    if !(d > 0.0) || !d.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "radius for the infall peak must be positive, got {d}"
        )));
    }
    Ok(-(d / 3.0) * (2.0 * d / bh.mass()).sqrt())
}

/// Delay of the static peak at r_b relative to the PG slice t_PG = τ_{A,0}.
pub fn delta_parameter(bh: BlackHoleParams, tau_a0: f64, r_b: f64, tau_b0: f64) -> Result<f64> {
    Ok(tau_b0 - slice_crossing_time(bh, tau_a0, r_b)?)
}

/// Proper time of the static observer at r_b on the slice t_PG = τ_{A,0},
/// shifted by `delta`. Inverse of [`delta_parameter`].
pub fn static_peak_for_delta(bh: BlackHoleParams, tau_a0: f64, r_b: f64, delta: f64) -> Result<f64> {
    Ok(delta + slice_crossing_time(bh, tau_a0, r_b)?)
}

fn slice_crossing_time(bh: BlackHoleParams, tau_a0: f64, r_b: f64) -> Result<f64> {
    let rs = bh.horizon();
    if !(r_b > rs) {
        return Err(Error::NoStaticObserver {
            r0: r_b,
            horizon: rs,
        });
    }
    let y = (r_b / rs).sqrt();
    let f = bh.metric_function(r_b)?;
    Ok(f.sqrt() * (tau_a0 - 2.0 * rs * y - rs * ((y - 1.0) / (y + 1.0)).ln()))
}
