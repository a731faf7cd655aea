//! Named parameter sets for each published figure. A preset fixes one
//! series; companions (SS against FS, the flat-space comparison, other
//! masses or vacua) are obtained by overriding single fields on top.

use harvest_core::{Placement, ScenarioConfig, ScenarioKind, SweepAxis, VacuumKind};

use crate::config::Range;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Preset {
    pub name: &'static str,
    pub about: &'static str,
    pub scenario: ScenarioConfig,
    pub axis: SweepAxis,
    pub range: Range,
}

fn fs(mass: f64, gap: f64, d_ab: f64) -> ScenarioConfig {
    ScenarioConfig {
        kind: ScenarioKind::Fs,
        vacuum: VacuumKind::Unruh,
        mass,
        gap,
        d_ab,
        ..ScenarioConfig::default()
    }
}

const fn log(lo: f64, hi: f64, n: usize) -> Range {
    Range { lo, hi, n, log: true }
}

const fn lin(lo: f64, hi: f64, n: usize) -> Range {
    Range { lo, hi, n, log: false }
}

pub fn all() -> Vec<Preset> {
    vec![
        Preset {
            name: "fig2a",
            about: "FS near the horizon, Unruh, Ωσ=2, M/σ=5, d_AB/σ=2 (use --scenario ss for the static pair)",
            scenario: fs(5.0, 2.0, 2.0),
            axis: SweepAxis::Dist,
            range: log(1e-3, 1.0, 20),
        },
        Preset {
            name: "fig2b",
            about: "FS away from the horizon, Unruh, Ωσ=2, M/σ=5, d_AB/σ=2",
            scenario: fs(5.0, 2.0, 2.0),
            axis: SweepAxis::Dist,
            range: log(1.0, 100.0, 20),
        },
        Preset {
            name: "fig3a",
            about: "FS near the horizon for the heaviest hole, M/σ=20 (also 5, 10 via --mass)",
            scenario: fs(20.0, 2.0, 2.0),
            axis: SweepAxis::Dist,
            range: log(1e-3, 1.0, 20),
        },
        Preset {
            name: "fig3b",
            about: "FS away from the horizon, M/σ=20",
            scenario: fs(20.0, 2.0, 2.0),
            axis: SweepAxis::Dist,
            range: log(1.0, 100.0, 20),
        },
        Preset {
            name: "fig4",
            about: "FS in the Boulware vacuum, Ωσ=2, M/σ=1, d_AB/σ=2 (flat comparison: --scenario flatboost --vacuum minkowski)",
            scenario: ScenarioConfig {
                vacuum: VacuumKind::Boulware,
                ..fs(1.0, 2.0, 2.0)
            },
            axis: SweepAxis::Dist,
            range: log(5.0, 1000.0, 20),
        },
        Preset {
            name: "fig5b",
            about: "FS signalling estimator against the delay δ, M/σ=5, d_AB/σ=5, d(r_A,r_s)/σ=1",
            scenario: ScenarioConfig {
                position: 1.0,
                ..fs(5.0, 2.0, 5.0)
            },
            axis: SweepAxis::Delta,
            // spike near δ = 0, bump from the outgoing rays, then the e^{−κt} tail
            range: lin(-10.0, 120.0, 53),
        },
        Preset {
            name: "fig6a",
            about: "FS concurrence and signalling against distance, Ωσ=2, M/σ=5, d_AB/σ=2, δ/σ=1",
            scenario: ScenarioConfig {
                delta: 1.0,
                ..fs(5.0, 2.0, 2.0)
            },
            axis: SweepAxis::Dist,
            range: log(1e-2, 100.0, 20),
        },
        Preset {
            name: "fig6b",
            about: "FS concurrence and signalling against distance, Ωσ=5, M/σ=5, d_AB/σ=5, δ/σ=1",
            scenario: ScenarioConfig {
                delta: 1.0,
                ..fs(5.0, 5.0, 5.0)
            },
            axis: SweepAxis::Dist,
            range: log(1e-2, 100.0, 20),
        },
        Preset {
            name: "fig7",
            about: "FS with Alice inside the hole: Ωσ=2, M/σ=10, d(r_A,0)/σ=14, d(r_B,r_s)/σ=7",
            scenario: ScenarioConfig {
                placement: Placement::FromCenter,
                position: 14.0,
                // r_B = 27σ, i.e. 7σ outside r_s = 20σ
                d_ab: 13.0,
                ..fs(10.0, 2.0, 13.0)
            },
            axis: SweepAxis::Delta,
            // past the maximum of I, which sits near δ = −2σ
            range: lin(0.0, 20.0, 11),
        },
        Preset {
            name: "fig9",
            about: "FF pair across the horizon, Ωσ=5, M/σ=50, d_AB/σ=5; axis is d(r_A,0)/σ with r_s/σ=100",
            scenario: ScenarioConfig {
                kind: ScenarioKind::Ff,
                placement: Placement::FromCenter,
                position: 100.0,
                ..fs(50.0, 5.0, 5.0)
            },
            axis: SweepAxis::Dist,
            range: lin(25.0, 175.0, 7),
        },
    ]
}

pub fn find(name: &str) -> Option<Preset> {
    all().into_iter().find(|p| p.name.eq_ignore_ascii_case(name))
}

pub fn names() -> Vec<&'static str> {
    all().iter().map(|p| p.name).collect()
}
