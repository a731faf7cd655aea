//! Detector placement protocols and parameter sweeps.
//!
//! * SS — two static detectors with both peaks on the slice t_PG = 0.
//! * FS — Alice falls from rest at infinity, Bob is static at
//!   r_B = r_A + d_AB; δ delays Bob's peak off Alice's PG slice.
//! * FF — both detectors on the same infall geodesic, peaks where the
//!   geodesic crosses r_A and r_A + d_AB (Bob switches on first).
//! * FlatBoost — the flat-space stand-in for FS: Bob inertial at rest,
//!   Alice receding at the kinematic relative velocity of the matched FS
//!   configuration.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::correlator::VacuumKind;
use crate::detector_pair::{concurrence, mutual_information, pair_matrix, signalling_estimator, DetectorParams, PairMatrix};
use crate::error::{Error, Result};
use crate::geometry::BlackHoleParams;
use crate::quadrature::{LadderReport, QuadratureSpec};
use crate::worldline::{
    ff_peak_time, horizon_crossing_time, kinematic_relative_velocity, static_peak_for_delta, Worldline,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ScenarioKind {
    Ss,
    Fs,
    Ff,
    #[serde(rename = "flatboost")]
    FlatBoost,
}

impl FromStr for ScenarioKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace(['-', '_'], "").as_str() {
            "ss" => Ok(ScenarioKind::Ss),
            "fs" => Ok(ScenarioKind::Fs),
            "ff" => Ok(ScenarioKind::Ff),
            "flatboost" | "flat" | "boost" => Ok(ScenarioKind::FlatBoost),
            other => Err(Error::InvalidParameter(format!("unknown scenario '{other}'"))),
        }
    }
}

impl fmt::Display for ScenarioKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ScenarioKind::Ss => "ss",
            ScenarioKind::Fs => "fs",
            ScenarioKind::Ff => "ff",
            ScenarioKind::FlatBoost => "flatboost",
        })
    }
}

/// How the position parameter locates Alice.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Placement {
    /// Proper distance from the horizon, r_A = r_s + position.
    FromHorizon,
    /// Proper distance from the centre, r_A = position.
    FromCenter,
}

/// A complete point in parameter space, all lengths and times in σ units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScenarioConfig {
    pub kind: ScenarioKind,
    pub vacuum: VacuumKind,
    pub mass: f64,
    pub gap: f64,
    pub d_ab: f64,
    pub position: f64,
    pub placement: Placement,
    pub delta: f64,
    /// FlatBoost only: overrides the matched kinematic relative velocity.
    pub speed: Option<f64>,
    pub lambda: f64,
    pub quadrature: QuadratureSpec,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        Self {
            kind: ScenarioKind::Ss,
            vacuum: VacuumKind::Unruh,
            mass: 5.0,
            gap: 2.0,
            d_ab: 2.0,
            position: 1.0,
            placement: Placement::FromHorizon,
            delta: 0.0,
            speed: None,
            lambda: 0.01,
            quadrature: QuadratureSpec::default(),
        }
    }
}

/// The two detectors and the vacuum they probe.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DetectorPair {
    pub alice: DetectorParams,
    pub bob: DetectorParams,
    pub vacuum: VacuumKind,
}

impl ScenarioConfig {
    pub fn black_hole(&self) -> Result<BlackHoleParams> {
        BlackHoleParams::new(self.mass)
    }

    /// Alice's radius (or, for flat scenarios, her matched FS radius).
    pub fn alice_radius(&self) -> Result<f64> {
        let rs = self.black_hole()?.horizon();
        let r = match self.placement {
            Placement::FromHorizon => rs + self.position,
            Placement::FromCenter => self.position,
        };
        if !(r > 0.0) || !r.is_finite() {
            return Err(Error::Placement(format!("Alice's radius {r} is not positive")));
        }
        Ok(r)
    }

    pub fn bob_radius(&self) -> Result<f64> {
        Ok(self.alice_radius()? + self.d_ab)
    }

    /// Speed used by FlatBoost: the override, or the matched FS value.
    pub fn boost_speed(&self) -> Result<f64> {
        match self.speed {
            Some(v) => Ok(v),
            None => kinematic_relative_velocity(self.black_hole()?, self.alice_radius()?, self.bob_radius()?),
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.quadrature.validate()?;
        if !(self.d_ab > 0.0 && self.d_ab.is_finite()) {
            return Err(Error::InvalidParameter(format!("d_AB must be positive, got {}", self.d_ab)));
        }
        if !(self.lambda > 0.0 && self.lambda.is_finite()) {
            return Err(Error::InvalidParameter(format!("lambda must be positive, got {}", self.lambda)));
        }
        if !self.gap.is_finite() || !self.delta.is_finite() {
            return Err(Error::InvalidParameter("gap and delta must be finite".into()));
        }
        let flat_kind = self.kind == ScenarioKind::FlatBoost;
        let flat_vac = self.vacuum == VacuumKind::Minkowski;
        if flat_kind && !flat_vac {
            return Err(Error::InvalidParameter("the flat boosted scenario uses the Minkowski vacuum".into()));
        }
        if flat_vac && !matches!(self.kind, ScenarioKind::Ss | ScenarioKind::FlatBoost) {
            return Err(Error::InvalidParameter(format!(
                "the Minkowski vacuum is only available for ss and flatboost, not {}",
                self.kind
            )));
        }
        if let Some(v) = self.speed {
            if !(0.0..1.0).contains(&v) {
                return Err(Error::InvalidParameter(format!("speed must lie in [0, 1), got {v}")));
            }
        }
        Ok(())
    }

    /// Builds both detectors according to the scenario's placement protocol.
    pub fn build_pair(&self) -> Result<DetectorPair> {
        self.validate()?;
        let radius = self.quadrature.support_radius;
        let pair = if self.vacuum == VacuumKind::Minkowski {
            self.build_flat()?
        } else {
            self.build_curved()?
        };
        pair.alice.support(radius)?;
        pair.bob.support(radius)?;
        if self.vacuum == VacuumKind::Boulware {
            for det in [&pair.alice, &pair.bob] {
                if let Worldline::Infall { bh } = det.worldline {
                    if det.peak + radius * det.width > horizon_crossing_time(bh) {
                        return Err(Error::Placement(
                            "the Boulware vacuum is undefined once a strong support enters the interior".into(),
                        ));
                    }
                }
            }
        }
        Ok(pair)
    }

    fn build_flat(&self) -> Result<DetectorPair> {
        let (alice_wl, bob_x, bob_peak) = match self.kind {
            ScenarioKind::Ss => (Worldline::minkowski_static(0.0), self.d_ab, 0.0),
            _ => {
                // peaks simultaneous in Alice's rest frame, d_AB apart there
                let v = self.boost_speed()?;
                let gamma = 1.0 / (1.0 - v * v).sqrt();
                (Worldline::minkowski_boosted(0.0, v)?, gamma * self.d_ab, -v * gamma * self.d_ab)
            }
        };
        Ok(DetectorPair {
            alice: DetectorParams::new(self.gap, 1.0, 0.0, alice_wl)?,
            bob: DetectorParams::new(self.gap, 1.0, bob_peak, Worldline::minkowski_static(bob_x))?,
            vacuum: self.vacuum,
        })
    }

    fn build_curved(&self) -> Result<DetectorPair> {
        let bh = self.black_hole()?;
        let rs = bh.horizon();
        let r_a = self.alice_radius()?;
        let r_b = self.bob_radius()?;
        let (alice, bob) = match self.kind {
            ScenarioKind::Ss => {
                if !(r_a > rs) {
                    return Err(Error::Placement(format!("static Alice needs r_A > r_s, got r_A = {r_a}")));
                }
                let wa = Worldline::static_at(bh, r_a)?;
                let wb = Worldline::static_at(bh, r_b)?;
                // τ at which each static worldline crosses t_PG = 0
                let peak = |r: f64| -> Result<f64> { Ok(-bh.metric_function(r)?.sqrt() * bh.pg_time_offset(r)?) };
                (
                    DetectorParams::new(self.gap, 1.0, peak(r_a)?, wa)?,
                    DetectorParams::new(self.gap, 1.0, peak(r_b)?, wb)?,
                )
            }
            ScenarioKind::Fs => {
                if !(r_b > rs) {
                    return Err(Error::Placement(format!("static Bob needs r_B > r_s, got r_B = {r_b}")));
                }
                let tau_a0 = ff_peak_time(bh, r_a)?;
                let alice = DetectorParams::new(self.gap, 1.0, tau_a0, Worldline::infall(bh))
                    .map_err(|_| Error::Placement(format!("Alice's strong support around r_A = {r_a} reaches the singularity")))?;
                let tau_b0 = static_peak_for_delta(bh, tau_a0, r_b, self.delta)?;
                (alice, DetectorParams::new(self.gap, 1.0, tau_b0, Worldline::static_at(bh, r_b)?)?)
            }
            ScenarioKind::Ff => {
                let wl = Worldline::infall(bh);
                let alice = DetectorParams::new(self.gap, 1.0, ff_peak_time(bh, r_a)?, wl)
                    .map_err(|_| Error::Placement(format!("Alice's strong support around r_A = {r_a} reaches the singularity")))?;
                (alice, DetectorParams::new(self.gap, 1.0, ff_peak_time(bh, r_b)?, wl)?)
            }
            ScenarioKind::FlatBoost => unreachable!("flat scenarios are built separately"),
        };
        Ok(DetectorPair {
            alice,
            bob,
            vacuum: self.vacuum,
        })
    }
}

/// One evaluated point. Observables are per λ̃²; error rows carry NaNs and
/// the failure text (with the ladder report when there is one).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRow {
    pub axis_value: f64,
    pub c_per_lambda2: f64,
    pub i_per_lambda2: f64,
    pub abs_e_per_lambda2: f64,
    pub l_aa: f64,
    pub l_bb: f64,
    pub abs_l_ab: f64,
    pub abs_m: f64,
    pub converged: bool,
    pub rungs: usize,
    pub e_per_lambda2: f64,
    pub error: Option<String>,
}

impl ResultRow {
    pub fn from_error(axis_value: f64, err: &Error) -> Self {
        let mut text = err.to_string();
        if let Some(rep) = err.ladder() {
            // keep the whole ladder, not only the summary line
            if !text.contains("rung 0") {
                text.push('\n');
                text.push_str(&rep.to_string());
            }
        }
        Self {
            axis_value,
            c_per_lambda2: f64::NAN,
            i_per_lambda2: f64::NAN,
            abs_e_per_lambda2: f64::NAN,
            l_aa: f64::NAN,
            l_bb: f64::NAN,
            abs_l_ab: f64::NAN,
            abs_m: f64::NAN,
            converged: false,
            rungs: err.ladder().map_or(0, |r| r.rungs.len()),
            e_per_lambda2: f64::NAN,
            error: Some(text),
        }
    }
}

/// Everything computed at one point, for callers that want more than a row.
#[derive(Debug, Clone, PartialEq)]
pub struct Evaluation {
    pub pair: DetectorPair,
    pub matrix: PairMatrix,
    pub signalling: f64,
    pub signalling_report: LadderReport,
    pub row: ResultRow,
}

pub fn evaluate_full(cfg: &ScenarioConfig) -> Result<Evaluation> {
    let pair = cfg.build_pair()?;
    let matrix = pair_matrix(&pair.alice, &pair.bob, pair.vacuum, &cfg.quadrature)?;
    let (e, e_report) = signalling_estimator(&pair.alice, &pair.bob, pair.vacuum, &cfg.quadrature)
        .map_err(|err| err.for_element("E"))?;
    let (l_aa, l_bb) = matrix.local_probabilities();
    let row = ResultRow {
        axis_value: f64::NAN,
        c_per_lambda2: concurrence(&matrix),
        i_per_lambda2: mutual_information(&matrix, cfg.lambda),
        abs_e_per_lambda2: e.abs(),
        l_aa,
        l_bb,
        abs_l_ab: matrix.l_ab.norm(),
        abs_m: matrix.m.norm(),
        converged: true,
        rungs: matrix.max_rungs().max(e_report.rungs.len()),
        e_per_lambda2: e,
        error: None,
    };
    Ok(Evaluation {
        pair,
        matrix,
        signalling: e,
        signalling_report: e_report,
        row,
    })
}

pub fn evaluate(cfg: &ScenarioConfig) -> Result<ResultRow> {
    Ok(evaluate_full(cfg)?.row)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SweepAxis {
    /// The position parameter (distance from horizon or centre).
    Dist,
    Delta,
    Mass,
    Gap,
    Dab,
    Speed,
}

impl SweepAxis {
    pub const ALL: [SweepAxis; 6] = [
        SweepAxis::Dist,
        SweepAxis::Delta,
        SweepAxis::Mass,
        SweepAxis::Gap,
        SweepAxis::Dab,
        SweepAxis::Speed,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SweepAxis::Dist => "dist",
            SweepAxis::Delta => "delta",
            SweepAxis::Mass => "mass",
            SweepAxis::Gap => "gap",
            SweepAxis::Dab => "dab",
            SweepAxis::Speed => "speed",
        }
    }

    pub fn apply(self, cfg: &ScenarioConfig, value: f64) -> ScenarioConfig {
        let mut c = *cfg;
        match self {
            SweepAxis::Dist => c.position = value,
            SweepAxis::Delta => c.delta = value,
            SweepAxis::Mass => c.mass = value,
            SweepAxis::Gap => c.gap = value,
            SweepAxis::Dab => c.d_ab = value,
            SweepAxis::Speed => c.speed = Some(value),
        }
        c
    }

    pub fn current(self, cfg: &ScenarioConfig) -> f64 {
        match self {
            SweepAxis::Dist => cfg.position,
            SweepAxis::Delta => cfg.delta,
            SweepAxis::Mass => cfg.mass,
            SweepAxis::Gap => cfg.gap,
            SweepAxis::Dab => cfg.d_ab,
            SweepAxis::Speed => cfg.speed.unwrap_or(f64::NAN),
        }
    }
}

impl FromStr for SweepAxis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key = s.to_ascii_lowercase();
        Self::ALL
            .into_iter()
            .find(|a| a.name() == key || format!("{}_over_sigma", a.name()) == key)
            .or(match key.as_str() {
                "d_ab" | "distance" | "position" => Some(if key == "d_ab" { SweepAxis::Dab } else { SweepAxis::Dist }),
                _ => None,
            })
            .ok_or_else(|| {
                let names: Vec<_> = Self::ALL.iter().map(|a| a.name()).collect();
                Error::InvalidParameter(format!("unknown axis '{s}', expected one of {}", names.join(", ")))
            })
    }
}

/// Evaluates every value independently (in parallel); failures become error
/// rows and rows keep the input order.
pub fn sweep(cfg: &ScenarioConfig, axis: SweepAxis, values: &[f64]) -> Vec<ResultRow> {
    values
        .par_iter()
        .map(|&x| match evaluate(&axis.apply(cfg, x)) {
            Ok(mut row) => {
                row.axis_value = x;
                row
            }
            Err(e) => ResultRow::from_error(x, &e),
        })
        .collect()
}
