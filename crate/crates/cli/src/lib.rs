//! Sweeps, presets and ladder diagnostics on top of `harvest-core`.

pub mod config;
pub mod output;
pub mod presets;

use std::fmt::Write as _;

use harvest_core::scenario::evaluate_full;
use harvest_core::{sweep, ResultRow};

pub use config::{ConfigError, Format, Overrides, Range, RunConfig};

pub fn execute(run: &RunConfig) -> Vec<ResultRow> {
    match run.axis {
        Some(axis) => sweep(&run.scenario, axis, &run.values),
        None => sweep(&run.scenario, harvest_core::SweepAxis::Dist, &[run.scenario.position]),
    }
}

/// 0 when every row converged, 2 otherwise.
pub fn exit_status(rows: &[ResultRow]) -> i32 {
    if rows.iter().all(|r| r.converged && r.error.is_none()) {
        0
    } else {
        2
    }
}

/// Evaluates the configured point and prints every matrix element's ladder.
/// Returns the text and whether everything converged.
pub fn diagnose(run: &RunConfig) -> (String, bool) {
    let mut s = String::new();
    let cfg = match (run.axis, run.values.first()) {
        (Some(axis), Some(&x)) => axis.apply(&run.scenario, x),
        _ => run.scenario,
    };
    let _ = writeln!(s, "{}", serde_json::to_string(&cfg).expect("config serializes"));
    match evaluate_full(&cfg) {
        Ok(ev) => {
            let r = &ev.matrix.reports;
            let elements = [("L_AA", &r.l_aa), ("L_BB", &r.l_bb), ("L_AB", &r.l_ab), ("L_BA", &r.l_ba), ("M", &r.m)];
            for (name, rep) in elements {
                if let Some(rep) = rep {
                    let _ = write!(s, "{name}: {rep}");
                }
            }
            let _ = write!(s, "E: {}", ev.signalling_report);
            let row = &ev.row;
            let _ = writeln!(
                s,
                "C/λ̃²={:e} I/λ̃²={:e} E/λ̃²={:e} L_AA={:e} L_BB={:e} |L_AB|={:e} |M|={:e} clamped={:e}",
                row.c_per_lambda2,
                row.i_per_lambda2,
                row.e_per_lambda2,
                row.l_aa,
                row.l_bb,
                row.abs_l_ab,
                row.abs_m,
                ev.matrix.clamped
            );
            (s, true)
        }
        Err(e) => {
            // convergence errors already carry the full ladder
            let _ = writeln!(s, "error: {e}");
            (s, false)
        }
    }
}
