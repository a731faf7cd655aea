//! Run configuration: a preset, then a JSON file, then command-line flags,
//! each layer overriding the one before.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use harvest_core::{Placement, QuadratureSpec, ScenarioConfig, ScenarioKind, SweepAxis, VacuumKind};
use serde::Deserialize;

use crate::presets;

/// Anything that should end the process with exit status 1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfigError(pub String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for ConfigError {}

fn bad(msg: impl Into<String>) -> ConfigError {
    ConfigError(msg.into())
}

/// `lo:hi:lin|log:n`, end points included.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Range {
    pub lo: f64,
    pub hi: f64,
    pub n: usize,
    pub log: bool,
}

impl Range {
    pub fn values(&self) -> Vec<f64> {
        if self.n == 1 {
            return vec![self.lo];
        }
        let steps = (self.n - 1) as f64;
        (0..self.n)
            .map(|i| {
                let t = i as f64 / steps;
                if self.log {
                    (self.lo.ln() + t * (self.hi.ln() - self.lo.ln())).exp()
                } else {
                    self.lo + t * (self.hi - self.lo)
                }
            })
            .collect()
    }
}

impl FromStr for Range {
    type Err = ConfigError;

    fn from_str(s: &str) -> Result<Self, ConfigError> {
        let parts: Vec<&str> = s.split(':').map(str::trim).collect();
        let [lo, hi, spacing, n] = parts[..] else {
            return Err(bad(format!("range '{s}' is not of the form lo:hi:lin|log:n")));
        };
        let num = |x: &str| x.parse::<f64>().map_err(|_| bad(format!("range '{s}': '{x}' is not a number")));
        let (lo, hi) = (num(lo)?, num(hi)?);
        let n: usize = n.parse().map_err(|_| bad(format!("range '{s}': '{n}' is not a point count")))?;
        let log = match spacing {
            "log" => true,
            "lin" => false,
            other => return Err(bad(format!("range '{s}': spacing '{other}' is neither lin nor log"))),
        };
        if n == 0 || !lo.is_finite() || !hi.is_finite() {
            return Err(bad(format!("range '{s}' is empty or not finite")));
        }
        if log && !(lo > 0.0 && hi > 0.0) {
            return Err(bad(format!("range '{s}': log spacing needs positive end points")));
        }
        Ok(Range { lo, hi, n, log })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Csv,
    Jsonl,
}

impl FromStr for Format {
    type Err = ConfigError;

    fn from_str(s: &str) -> Result<Self, ConfigError> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(Format::Csv),
            "jsonl" | "json-lines" | "jsonlines" => Ok(Format::Jsonl),
            other => Err(bad(format!("unknown output format '{other}' (csv or jsonl)"))),
        }
    }
}

/// One override layer. Every field is optional; file keys carry the
/// `_over_sigma` suffix, the short names are accepted as aliases.
#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Overrides {
    pub preset: Option<String>,
    pub scenario: Option<String>,
    pub vacuum: Option<String>,
    #[serde(alias = "mass")]
    pub mass_over_sigma: Option<f64>,
    #[serde(alias = "gap", alias = "omega_sigma")]
    pub gap_over_sigma: Option<f64>,
    #[serde(alias = "dab", alias = "d_ab_over_sigma")]
    pub dab_over_sigma: Option<f64>,
    #[serde(alias = "dist", alias = "position")]
    pub dist_over_sigma: Option<f64>,
    pub placement: Option<String>,
    #[serde(alias = "delta")]
    pub delta_over_sigma: Option<f64>,
    pub speed: Option<f64>,
    pub lambda: Option<f64>,
    pub axis: Option<String>,
    pub range: Option<String>,
    pub values: Option<Vec<f64>>,
    pub out: Option<PathBuf>,
    pub format: Option<String>,
    pub quadrature: Option<QuadratureSpec>,
}

impl Overrides {
    pub fn from_json(text: &str, origin: &str) -> Result<Self, ConfigError> {
        serde_json::from_str(text).map_err(|e| {
            bad(format!(
                "{origin}: line {}, column {}: {}",
                e.line(),
                e.column(),
                strip_position(&e.to_string())
            ))
        })
    }

    pub fn from_file(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|e| bad(format!("{}: {e}", path.display())))?;
        Self::from_json(&text, &path.display().to_string())
    }

    /// Fields set in `top` win.
    pub fn layered(self, top: Overrides) -> Overrides {
        let replaces = top.range.is_some() || top.values.is_some();
        Overrides {
            preset: top.preset.or(self.preset),
            scenario: top.scenario.or(self.scenario),
            vacuum: top.vacuum.or(self.vacuum),
            mass_over_sigma: top.mass_over_sigma.or(self.mass_over_sigma),
            gap_over_sigma: top.gap_over_sigma.or(self.gap_over_sigma),
            dab_over_sigma: top.dab_over_sigma.or(self.dab_over_sigma),
            dist_over_sigma: top.dist_over_sigma.or(self.dist_over_sigma),
            placement: top.placement.or(self.placement),
            delta_over_sigma: top.delta_over_sigma.or(self.delta_over_sigma),
            speed: top.speed.or(self.speed),
            lambda: top.lambda.or(self.lambda),
            // an explicit range or value list replaces both of the lower layer's
            range: if replaces { top.range } else { self.range },
            values: if replaces { top.values } else { self.values },
            axis: top.axis.or(self.axis),
            out: top.out.or(self.out),
            format: top.format.or(self.format),
            quadrature: top.quadrature.or(self.quadrature),
        }
    }
}

fn strip_position(msg: &str) -> &str {
    msg.rfind(" at line ").map_or(msg, |i| &msg[..i])
}

fn parse_placement(s: &str) -> Result<Placement, ConfigError> {
    match s.to_ascii_lowercase().replace('-', "_").as_str() {
        "from_horizon" | "horizon" => Ok(Placement::FromHorizon),
        "from_center" | "from_centre" | "center" | "centre" => Ok(Placement::FromCenter),
        other => Err(bad(format!("unknown placement '{other}' (from_horizon or from_center)"))),
    }
}

/// A fully resolved run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub preset: Option<String>,
    pub scenario: ScenarioConfig,
    /// `None` evaluates the single configured point.
    pub axis: Option<SweepAxis>,
    pub values: Vec<f64>,
    pub out: Option<PathBuf>,
    pub format: Format,
}

impl RunConfig {
    pub fn resolve(o: Overrides) -> Result<Self, ConfigError> {
        let preset = match &o.preset {
            Some(name) => Some(presets::find(name).ok_or_else(|| {
                bad(format!("unknown preset '{name}'; available: {}", presets::names().join(", ")))
            })?),
            None => None,
        };
        let mut s = preset.map_or_else(ScenarioConfig::default, |p| p.scenario);
        let core = |e: harvest_core::Error| bad(e.to_string());
        if let Some(k) = &o.scenario {
            s.kind = k.parse::<ScenarioKind>().map_err(core)?;
            // the flat pipeline only makes sense in the flat vacuum
            if s.kind == ScenarioKind::FlatBoost && o.vacuum.is_none() {
                s.vacuum = VacuumKind::Minkowski;
            }
        }
        if let Some(v) = &o.vacuum {
            s.vacuum = v.parse::<VacuumKind>().map_err(core)?;
        }
        if let Some(p) = &o.placement {
            s.placement = parse_placement(p)?;
        }
        s.mass = o.mass_over_sigma.unwrap_or(s.mass);
        s.gap = o.gap_over_sigma.unwrap_or(s.gap);
        s.d_ab = o.dab_over_sigma.unwrap_or(s.d_ab);
        s.position = o.dist_over_sigma.unwrap_or(s.position);
        s.delta = o.delta_over_sigma.unwrap_or(s.delta);
        s.lambda = o.lambda.unwrap_or(s.lambda);
        if o.speed.is_some() {
            s.speed = o.speed;
        }
        if let Some(q) = o.quadrature {
            s.quadrature = q;
        }
        s.validate().map_err(core)?;

        let axis = match &o.axis {
            Some(a) => Some(a.parse::<SweepAxis>().map_err(core)?),
            None => preset.map(|p| p.axis),
        };
        let values = match (&o.values, &o.range) {
            (Some(v), _) => v.clone(),
            (None, Some(r)) => r.parse::<Range>()?.values(),
            (None, None) => match (preset, axis) {
                (Some(p), Some(a)) if a == p.axis => p.range.values(),
                (_, Some(a)) => return Err(bad(format!("axis '{}' needs --range or values", a.name()))),
                _ => Vec::new(),
            },
        };
        if axis.is_none() && !values.is_empty() {
            return Err(bad("a range was given without an axis"));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(bad("sweep values must be finite"));
        }
        let format = match (&o.format, &o.out) {
            (Some(f), _) => f.parse()?,
            (None, Some(p)) if p.extension().is_some_and(|e| e == "jsonl") => Format::Jsonl,
            _ => Format::Csv,
        };
        Ok(RunConfig {
            preset: preset.map(|p| p.name.to_string()),
            scenario: s,
            axis,
            values,
            out: o.out,
            format,
        })
    }
}
