//! Derivative-coupling vacuum two-point functions along pairs of worldlines.
//!
//! Each mode sector contributes Ẋ Ẋ′ / (X − X′ − iε)² for a null coordinate
//! X. The regulator is applied to the rate-normalized separation
//! D = (X − X′)/√(Ẋ Ẋ′), so that one ε in proper-time units works equally
//! for linear (u, v) and exponential (U, V) coordinates and Kruskal values
//! never need to be formed explicitly.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::worldline::{KruskalCoord, NullCoord, Worldline, WorldlinePoint};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum VacuumKind {
    Boulware,
    Unruh,
    HartleHawking,
    Minkowski,
}

impl VacuumKind {
    pub fn name(self) -> &'static str {
        match self {
            VacuumKind::Boulware => "boulware",
            VacuumKind::Unruh => "unruh",
            VacuumKind::HartleHawking => "hartle-hawking",
            VacuumKind::Minkowski => "minkowski",
        }
    }
}

impl std::str::FromStr for VacuumKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace(['_', ' '], "-").as_str() {
            "boulware" | "b" => Ok(VacuumKind::Boulware),
            "unruh" | "u" => Ok(VacuumKind::Unruh),
            "hartle-hawking" | "hartlehawking" | "hh" | "h" => Ok(VacuumKind::HartleHawking),
            "minkowski" | "flat" | "m" => Ok(VacuumKind::Minkowski),
            other => Err(Error::InvalidParameter(format!("unknown vacuum '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CorrelatorContext {
    pub vacuum: VacuumKind,
    pub wl_a: Worldline,
    pub wl_b: Worldline,
    pub epsilon: f64,
}

impl CorrelatorContext {
    pub fn new(vacuum: VacuumKind, wl_a: Worldline, wl_b: Worldline, epsilon: f64) -> Result<Self> {
        if !(epsilon > 0.0) || !epsilon.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "epsilon must be positive, got {epsilon}"
            )));
        }
        let flat = vacuum == VacuumKind::Minkowski;
        if wl_a.is_flat() != flat || wl_b.is_flat() != flat {
            return Err(Error::InvalidParameter(format!(
                "{} vacuum used with a worldline from the wrong spacetime",
                vacuum.name()
            )));
        }
        if let (Some(a), Some(b)) = (wl_a.black_hole(), wl_b.black_hole()) {
            if a != b {
                return Err(Error::InvalidParameter(
                    "worldlines live in different black-hole spacetimes".into(),
                ));
            }
        }
        Ok(Self {
            vacuum,
            wl_a,
            wl_b,
            epsilon,
        })
    }

    pub fn swapped(&self) -> Self {
        Self {
            wl_a: self.wl_b,
            wl_b: self.wl_a,
            ..*self
        }
    }

    pub fn with_epsilon(&self, epsilon: f64) -> Result<Self> {
        Self::new(self.vacuum, self.wl_a, self.wl_b, epsilon)
    }
}

/// A(τ, τ′) with τ on the first worldline and τ′ on the second.
pub fn two_point(ctx: &CorrelatorContext, tau: f64, tau_prime: f64) -> Result<Complex64> {
    let p = ctx.wl_a.point(tau)?;
    let q = ctx.wl_b.point(tau_prime)?;
    if ctx.wl_a == ctx.wl_b {
        two_point_along(ctx.vacuum, ctx.epsilon, &ctx.wl_a, &p, &q)
    } else {
        two_point_between(ctx.vacuum, ctx.epsilon, &p, &q)
    }
}

/// ⟨[∂φ(x_A(τ)), ∂φ(x_B(τ′))]⟩, state independent in the ε → 0 limit.
pub fn commutator_kernel(ctx: &CorrelatorContext, tau: f64, tau_prime: f64) -> Result<Complex64> {
    let p = ctx.wl_a.point(tau)?;
    let q = ctx.wl_b.point(tau_prime)?;
    if ctx.wl_a == ctx.wl_b {
        commutator_along(ctx.vacuum, ctx.epsilon, &ctx.wl_a, &p, &q)
    } else {
        commutator_between(ctx.vacuum, ctx.epsilon, &p, &q)
    }
}

/// Two-point function between precomputed events. `epsilon` may be negative
/// to obtain the opposite (advanced) regularization.
pub fn two_point_between(
    vacuum: VacuumKind,
    epsilon: f64,
    p: &WorldlinePoint,
    q: &WorldlinePoint,
) -> Result<Complex64> {
    let (du, dv) = separations(vacuum, p, q)?;
    Ok(wightman(du, dv, epsilon))
}

pub fn commutator_between(
    vacuum: VacuumKind,
    epsilon: f64,
    p: &WorldlinePoint,
    q: &WorldlinePoint,
) -> Result<Complex64> {
    let (du, dv) = separations(vacuum, p, q)?;
    Ok(commutator(du, dv, epsilon))
}

/// As [`two_point_between`] for two events of the same worldline; keeps full
/// precision as the events approach each other.
pub fn two_point_along(
    vacuum: VacuumKind,
    epsilon: f64,
    wl: &Worldline,
    p: &WorldlinePoint,
    q: &WorldlinePoint,
) -> Result<Complex64> {
    let (du, dv) = separations_along(vacuum, wl, p, q)?;
    Ok(wightman(du, dv, epsilon))
}

pub fn commutator_along(
    vacuum: VacuumKind,
    epsilon: f64,
    wl: &Worldline,
    p: &WorldlinePoint,
    q: &WorldlinePoint,
) -> Result<Complex64> {
    let (du, dv) = separations_along(vacuum, wl, p, q)?;
    Ok(commutator(du, dv, epsilon))
}

fn wightman(du: f64, dv: f64, epsilon: f64) -> Complex64 {
    -(sector(du, epsilon) + sector(dv, epsilon)) / (4.0 * PI)
}

fn commutator(du: f64, dv: f64, epsilon: f64) -> Complex64 {
    // A(p, q) − A(q, p): the swapped separations are −D, and
    // 1/(−D − iε)² = 1/(D + iε)².
    let c = sector(du, epsilon) - sector(du, -epsilon) + sector(dv, epsilon) - sector(dv, -epsilon);
    -c / (4.0 * PI)
}

fn separations_along(vacuum: VacuumKind, wl: &Worldline, p: &WorldlinePoint, q: &WorldlinePoint) -> Result<(f64, f64)> {
    let s = wl.separations(p, q);
    let need = |d: Option<f64>, patch| d.ok_or(Error::Patch { patch, tau: p.tau });
    Ok(match vacuum {
        VacuumKind::Boulware | VacuumKind::Minkowski => (need(s.u, "u")?, need(s.v, "v")?),
        VacuumKind::Unruh => (need(s.big_u, "U")?, need(s.v, "v")?),
        VacuumKind::HartleHawking => (need(s.big_u, "U")?, need(s.big_v, "V")?),
    })
}

fn sector(d: f64, epsilon: f64) -> Complex64 {
    if d.is_infinite() {
        return Complex64::new(0.0, 0.0);
    }
    let z = Complex64::new(d, -epsilon);
    (z * z).inv()
}

/// Rate-normalized separations in the two sectors of the chosen vacuum.
fn separations(vacuum: VacuumKind, p: &WorldlinePoint, q: &WorldlinePoint) -> Result<(f64, f64)> {
    let need_null = |c: Option<NullCoord>, pt: &WorldlinePoint, patch| {
        c.ok_or(Error::Patch { patch, tau: pt.tau })
    };
    let need_kruskal = |c: Option<KruskalCoord>, pt: &WorldlinePoint, patch| {
        c.ok_or(Error::Patch { patch, tau: pt.tau })
    };
    Ok(match vacuum {
        VacuumKind::Boulware | VacuumKind::Minkowski => (
            linear_separation(need_null(p.u, p, "u")?, need_null(q.u, q, "u")?),
            linear_separation(need_null(p.v, p, "v")?, need_null(q.v, q, "v")?),
        ),
        VacuumKind::Unruh => (
            kruskal_separation(need_kruskal(p.big_u, p, "U")?, need_kruskal(q.big_u, q, "U")?),
            linear_separation(need_null(p.v, p, "v")?, need_null(q.v, q, "v")?),
        ),
        VacuumKind::HartleHawking => (
            kruskal_separation(need_kruskal(p.big_u, p, "U")?, need_kruskal(q.big_u, q, "U")?),
            kruskal_separation(need_kruskal(p.big_v, p, "V")?, need_kruskal(q.big_v, q, "V")?),
        ),
    })
}

fn linear_separation(a: NullCoord, b: NullCoord) -> f64 {
    (a.value - b.value) / (a.rate * b.rate).sqrt()
}

/// (X − X′)/√(Ẋ Ẋ′) from log-magnitudes, without forming X itself.
fn kruskal_separation(a: KruskalCoord, b: KruskalCoord) -> f64 {
    let m = 0.5 * (a.ln_rate + b.ln_rate);
    let (ea, eb) = (a.ln_abs - m, b.ln_abs - m);
    let (sa, sb) = (a.sign, b.sign);
    // factor out the larger exponential so huge-minus-huge cannot appear
    if ea >= eb {
        (sa - sb * (eb - ea).exp()) * ea.exp()
    } else {
        (sa * (ea - eb).exp() - sb) * eb.exp()
    }
}
