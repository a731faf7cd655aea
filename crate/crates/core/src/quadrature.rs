//! Double integrals over Gaussian strong supports.
//!
//! [`integrate_2d`] is a plain tensor Gauss–Legendre rule. The certified
//! path is an iterated, globally adaptive Gauss–Kronrod scheme seeded with
//! about N abscissae per axis: the regulated kernels put features of width ε
//! (poles on light-cone lines, and where those lines meet the ordering step,
//! Lorentzian ridges in the outer variable) into an otherwise smooth
//! σ-scale integrand.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::fmt;
use std::num::NonZeroUsize;

use gauss_quad::GaussLegendre;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Θ_k(z) = ½ + ½ tanh(kz).
pub fn smooth_step(k: f64, z: f64) -> f64 {
    0.5 + 0.5 * (k * z).tanh()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(Error::InvalidParameter(format!(
                "integration interval [{lo}, {hi}] must be finite and non-empty"
            )));
        }
        Ok(Self { lo, hi })
    }

    pub fn centered(center: f64, radius: f64) -> Result<Self> {
        Self::new(center - radius, center + radius)
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    fn map(&self, x: f64) -> f64 {
        0.5 * (self.lo + self.hi) + 0.5 * (self.hi - self.lo) * x
    }
}

/// Gauss–Legendre nodes and weights on [−1, 1].
pub fn gauss_legendre(n: usize) -> Result<Vec<(f64, f64)>> {
    let n = NonZeroUsize::new(n)
        .ok_or_else(|| Error::InvalidParameter("at least one quadrature node is required".into()))?;
    Ok(GaussLegendre::new(n).as_node_weight_pairs().to_vec())
}

fn scaled_rule(iv: Interval, n: usize) -> Result<Vec<(f64, f64)>> {
    let half = 0.5 * iv.width();
    Ok(gauss_legendre(n)?
        .into_iter()
        .map(|(x, w)| (iv.map(x), w * half))
        .collect())
}

fn checked(value: Complex64, tau: f64, tau_prime: f64) -> Result<Complex64> {
    if value.re.is_finite() && value.im.is_finite() {
        Ok(value)
    } else {
        Err(Error::NonFinite { tau, tau_prime })
    }
}

/// Sums per-row results in row order, so parallel evaluation stays bitwise
/// reproducible.
fn ordered_sum(rows: Vec<Result<Complex64>>) -> Result<Complex64> {
    let mut total = Complex64::new(0.0, 0.0);
    for r in rows {
        total += r?;
    }
    Ok(total)
}

/// Tensor Gauss–Legendre estimate of ∫_a ∫_b f(τ, τ′) dτ′ dτ with `n` nodes per axis.
pub fn integrate_2d<F>(f: F, a: Interval, b: Interval, n: usize) -> Result<Complex64>
where
    F: Fn(f64, f64) -> Result<Complex64> + Sync,
{
    let ra = scaled_rule(a, n)?;
    let rb = scaled_rule(b, n)?;
    let rows: Vec<Result<Complex64>> = ra
        .par_iter()
        .map(|&(x, wx)| {
            let mut row = Complex64::new(0.0, 0.0);
            for &(y, wy) in &rb {
                row += checked(f(x, y)?, x, y)? * wy;
            }
            Ok(row * wx)
        })
        .collect();
    ordered_sum(rows)
}

// Gauss–Kronrod 7/15 pair (abscissae symmetric about 0, listed from the end).
const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
// Gauss weights for XGK[1], XGK[3], XGK[5], XGK[7].
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

#[derive(Debug, Clone, Copy)]
struct Panel {
    lo: f64,
    hi: f64,
    value: Complex64,
    error: f64,
    /// ∫|f| over the panel; sets the floating-point noise floor.
    l1: f64,
    /// Uncertainty already present in the sampled values (inner rows).
    noise: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

/// Kronrod weights in the order of `kronrod_nodes`.
fn kronrod_weights() -> [f64; 15] {
    let mut w = [WGK[7]; 15];
    for i in 0..7 {
        w[1 + 2 * i] = WGK[i];
        w[2 + 2 * i] = WGK[i];
    }
    w
}

/// The 15 Kronrod abscissae of [lo, hi]: centre first, then ± pairs.
fn kronrod_nodes(lo: f64, hi: f64) -> [f64; 15] {
    let c = 0.5 * (lo + hi);
    let h = 0.5 * (hi - lo);
    let mut x = [c; 15];
    for i in 0..7 {
        x[1 + 2 * i] = c - h * XGK[i];
        x[2 + 2 * i] = c + h * XGK[i];
    }
    x
}

fn kronrod_panel(lo: f64, hi: f64, fx: &[Complex64; 15]) -> Panel {
    let h = 0.5 * (hi - lo);
    let mut k = fx[0] * WGK[7];
    let mut g = fx[0] * WG[3];
    let mut l1 = fx[0].norm() * WGK[7];
    for i in 0..7 {
        let s = fx[1 + 2 * i] + fx[2 + 2 * i];
        k += s * WGK[i];
        l1 += (fx[1 + 2 * i].norm() + fx[2 + 2 * i].norm()) * WGK[i];
        if i % 2 == 1 {
            g += s * WG[i / 2];
        }
    }
    let value = k * h;
    Panel {
        lo,
        hi,
        value,
        error: (value - g * h).norm(),
        l1: l1 * h.abs(),
        noise: 0.0,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AdaptiveOptions {
    pub rel_tol: f64,
    pub abs_tol: f64,
    /// Errors below `noise_floor · ∫|f|` are indistinguishable from rounding.
    pub noise_floor: f64,
    pub max_panels: usize,
    pub initial_panels: usize,
}

impl Default for AdaptiveOptions {
    fn default() -> Self {
        Self {
            rel_tol: 1e-10,
            abs_tol: 0.0,
            noise_floor: 1e-12,
            max_panels: 4000,
            initial_panels: 16,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdaptiveOutcome {
    pub value: Complex64,
    pub error: f64,
    pub panels: usize,
    pub min_width: f64,
    /// The panel budget ran out before the tolerance was met.
    pub saturated: bool,
}

/// Globally adaptive bisection driven by a panel evaluator.
fn adaptive_core<E>(mut eval: E, iv: Interval, opts: &AdaptiveOptions) -> Result<AdaptiveOutcome>
where
    E: FnMut(f64, f64) -> Result<Panel>,
{
    let n0 = opts.initial_panels.max(1);
    let mut heap = BinaryHeap::with_capacity(opts.max_panels.max(n0) + 2);
    let step = iv.width() / n0 as f64;
    for i in 0..n0 {
        let lo = iv.lo + step * i as f64;
        let hi = if i + 1 == n0 { iv.hi } else { lo + step };
        heap.push(eval(lo, hi)?);
    }
    let totals = |heap: &BinaryHeap<Panel>| {
        heap.iter().fold((Complex64::new(0.0, 0.0), 0.0, 0.0, 0.0), |(v, e, l, n), p| {
            (v + p.value, e + p.error, l + p.l1, n + p.noise)
        })
    };
    let (mut value, mut error, mut l1, mut noise) = totals(&heap);
    let mut saturated = false;
    let mut splits = 0usize;
    // refining below the noise in the samples themselves gains nothing
    while error > opts.abs_tol.max(opts.rel_tol * value.norm()).max(opts.noise_floor * l1).max(noise) {
        if heap.len() >= opts.max_panels {
            saturated = true;
            break;
        }
        let worst = heap.pop().expect("heap is never empty");
        let mid = 0.5 * (worst.lo + worst.hi);
        if !(mid > worst.lo && mid < worst.hi) {
            heap.push(worst);
            saturated = true;
            break;
        }
        let left = eval(worst.lo, mid)?;
        let right = eval(mid, worst.hi)?;
        value += left.value + right.value - worst.value;
        error += left.error + right.error - worst.error;
        l1 += left.l1 + right.l1 - worst.l1;
        noise += left.noise + right.noise - worst.noise;
        heap.push(left);
        heap.push(right);
        splits += 1;
        // running sums drift; refresh occasionally
        if splits % 128 == 0 {
            (value, error, l1, noise) = totals(&heap);
        }
    }
    // final value in a fixed (positional) order for reproducibility
    let mut panels = heap.into_vec();
    panels.sort_by(|a, b| a.lo.total_cmp(&b.lo));
    let value = panels.iter().fold(Complex64::new(0.0, 0.0), |v, p| v + p.value);
    let error = panels.iter().map(|p| p.error).sum();
    let min_width = panels.iter().map(|p| p.hi - p.lo).fold(f64::INFINITY, f64::min);
    Ok(AdaptiveOutcome {
        value,
        error,
        panels: panels.len(),
        min_width,
        saturated,
    })
}

/// Globally adaptive Gauss–Kronrod 7/15 integration of a complex function.
pub fn integrate_adaptive<F>(mut f: F, iv: Interval, opts: &AdaptiveOptions) -> Result<AdaptiveOutcome>
where
    F: FnMut(f64) -> Result<Complex64>,
{
    adaptive_core(
        |lo, hi| {
            let xs = kronrod_nodes(lo, hi);
            let mut fx = [Complex64::new(0.0, 0.0); 15];
            for (v, &x) in fx.iter_mut().zip(&xs) {
                *v = f(x)?;
            }
            Ok(kronrod_panel(lo, hi, &fx))
        },
        iv,
        opts,
    )
}

/// Regulator parameters handed to the integrand at each rung of the ladder.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Regulator {
    pub epsilon: f64,
    pub k_sharpness: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct QuadratureSpec {
    pub epsilon: f64,
    pub k_sharpness: f64,
    pub nodes: usize,
    pub support_radius: f64,
    pub rel_tol: f64,
    /// Changes below this magnitude are accepted regardless of `rel_tol`.
    pub abs_tol: f64,
    pub max_refinements: usize,
    pub inner_rel_tol: f64,
    /// Inner-axis errors below this fraction of ∫|f| count as rounding noise.
    pub inner_noise_floor: f64,
    pub inner_max_panels: usize,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self {
            epsilon: 1e-3,
            k_sharpness: 1e4,
            nodes: 400,
            support_radius: 5.0,
            rel_tol: 1e-3,
            abs_tol: 0.0,
            max_refinements: 3,
            inner_rel_tol: 1e-9,
            inner_noise_floor: 1e-11,
            inner_max_panels: 4000,
        }
    }
}

impl QuadratureSpec {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidParameter(msg));
        if !(self.epsilon > 0.0 && self.epsilon.is_finite()) {
            return bad(format!("epsilon must be positive, got {}", self.epsilon));
        }
        if !(self.k_sharpness > 0.0 && self.k_sharpness.is_finite()) {
            return bad(format!("k must be positive, got {}", self.k_sharpness));
        }
        if self.nodes < 32 {
            return bad(format!("at least 32 nodes per axis are required, got {}", self.nodes));
        }
        if !(self.support_radius >= 3.0) {
            return bad(format!("support radius must be at least 3, got {}", self.support_radius));
        }
        if !(self.rel_tol > 0.0) || !(self.abs_tol >= 0.0) || !(self.inner_rel_tol > 0.0) || !(self.inner_noise_floor >= 0.0) {
            return bad("tolerances must be positive".into());
        }
        if self.inner_max_panels < 16 {
            return bad("inner panel budget must be at least 16".into());
        }
        Ok(())
    }

    /// Raises the node count to at least 20 nodes per oscillation of e^{iΩτ}
    /// across the strong support.
    pub fn with_oscillation_budget(mut self, omega: f64) -> Self {
        let needed = (20.0 * omega.abs() * self.support_radius).ceil() as usize;
        self.nodes = self.nodes.max(needed);
        self
    }

    /// Parameters after `rung` refinements: (N·2^r, ε/2^r, k·2^r).
    pub fn at_rung(&self, rung: usize) -> (usize, Regulator) {
        let s = (1u64 << rung) as f64;
        (
            self.nodes << rung,
            Regulator {
                epsilon: self.epsilon / s,
                k_sharpness: self.k_sharpness * s,
            },
        )
    }

    /// Every refinement also halves the regulator and doubles k.
    pub fn escalated(&self, steps: usize) -> Self {
        let (nodes, reg) = self.at_rung(steps);
        Self {
            nodes,
            epsilon: reg.epsilon,
            k_sharpness: reg.k_sharpness,
            ..*self
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LadderRung {
    pub nodes: usize,
    pub epsilon: f64,
    pub k_sharpness: f64,
    pub value: Complex64,
    /// |value − previous| / |value|; absent on the first rung.
    pub rel_change: Option<f64>,
    /// Richardson estimate 2·value − previous, free of the O(ε) bias.
    #[serde(default)]
    pub extrapolated: Option<Complex64>,
    /// Relative change of the extrapolated value from the previous rung.
    #[serde(default)]
    pub extrapolated_change: Option<f64>,
    pub outer_panels: usize,
    pub outer_saturated: bool,
    pub max_inner_panels: usize,
    pub saturated_rows: usize,
    /// Narrowest inner panel divided by ε.
    pub min_panel_over_epsilon: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LadderReport {
    pub rungs: Vec<LadderRung>,
    pub converged: bool,
    pub achieved_tol: f64,
    pub rel_tol: f64,
    pub abs_tol: f64,
    /// Inner lines resolved features down to the regulator scale on the final rung.
    pub grid_guard_ok: bool,
}

impl LadderReport {
    pub fn final_value(&self) -> Option<Complex64> {
        self.rungs.last().map(|r| r.value)
    }

    /// Why a ladder failed, or `None` if it converged.
    pub fn diagnosis(&self) -> Option<String> {
        if self.converged {
            return None;
        }
        if let Some(i) = self.rungs.iter().position(|r| r.saturated_rows > 0 || r.outer_saturated) {
            return Some(format!("under-resolved from rung {i}: panels hit the cap before the integrand was resolved"));
        }
        let changes: Vec<f64> = self.rungs.iter().filter_map(|r| r.rel_change).collect();
        match changes.as_slice() {
            [] => Some("a single rung cannot be checked; allow refinements".into()),
            [.., a, b] if (1.6..2.5).contains(&(a / b)) => Some(format!(
                "regulator-limited: changes halve with ε (last {b:.2e}), i.e. an O(ε) bias that has not settled; \
                 start from a smaller ε or allow more rungs"
            )),
            _ => {
                let worst = (1..self.rungs.len())
                    .max_by(|&i, &j| {
                        let c = |k: usize| self.rungs[k].rel_change.unwrap_or(0.0);
                        c(i).total_cmp(&c(j))
                    })
                    .unwrap_or(0);
                Some(format!(
                    "no steady trend; largest change at rung {worst}: the integrand is not resolved by the grid \
                     (oscillation or features below the node spacing)"
                ))
            }
        }
    }
}

impl fmt::Display for LadderReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "ladder converged={} achieved_tol={:.3e} rel_tol={:.1e} abs_tol={:.1e} grid_guard={}",
            self.converged,
            self.achieved_tol,
            self.rel_tol,
            self.abs_tol,
            if self.grid_guard_ok { "ok" } else { "violated" }
        )?;
        for (i, r) in self.rungs.iter().enumerate() {
            let change = r
                .rel_change
                .map_or_else(|| "-".to_string(), |c| format!("{c:.3e}"));
            writeln!(
                f,
                "  rung {i}: N={} eps={:.3e} k={:.3e} k*eps={:.1} value=({:+.9e}, {:+.9e}) rel_change={} outer_panels={}{} inner_panels_max={} saturated_rows={} min_panel/eps={:.3}",
                r.nodes,
                r.epsilon,
                r.k_sharpness,
                r.k_sharpness * r.epsilon,
                r.value.re,
                r.value.im,
                change,
                r.outer_panels,
                if r.outer_saturated { " (saturated)" } else { "" },
                r.max_inner_panels,
                r.saturated_rows,
                r.min_panel_over_epsilon
            )?;
            if let (Some(x), Some(c)) = (r.extrapolated, r.extrapolated_change) {
                writeln!(f, "          extrapolated=({:+.9e}, {:+.9e}) rel_change={c:.3e}", x.re, x.im)?;
            }
        }
        if let Some(d) = self.diagnosis() {
            writeln!(f, "  diagnosis: {d}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Certified {
    pub value: Complex64,
    pub achieved_tol: f64,
    pub report: LadderReport,
}

#[derive(Default)]
struct RowStats {
    max_panels: usize,
    saturated: usize,
    min_width: f64,
}

/// One rung: adaptive Gauss–Kronrod on both axes. The outer axis starts from
/// about `nodes` abscissae; rows within a panel are evaluated in parallel.
fn iterated_rung<F>(
    f: &F,
    a: Interval,
    b: Interval,
    nodes: usize,
    reg: Regulator,
    spec: &QuadratureSpec,
) -> Result<LadderRung>
where
    F: Fn(f64, f64, Regulator) -> Result<Complex64> + Sync,
{
    let inner = AdaptiveOptions {
        rel_tol: spec.inner_rel_tol,
        noise_floor: spec.inner_noise_floor,
        max_panels: spec.inner_max_panels,
        ..Default::default()
    };
    // a rung only has to be well below the ladder tolerance; row errors are
    // carried along as panel noise
    let outer = AdaptiveOptions {
        rel_tol: 1e-2 * spec.rel_tol,
        noise_floor: 10.0 * spec.inner_rel_tol,
        max_panels: spec.inner_max_panels,
        initial_panels: nodes.div_ceil(15),
        ..Default::default()
    };
    let mut stats = RowStats {
        min_width: f64::INFINITY,
        ..Default::default()
    };
    let out = adaptive_core(
        |lo, hi| {
            let xs = kronrod_nodes(lo, hi);
            let rows: Vec<Result<AdaptiveOutcome>> = xs
                .par_iter()
                .map(|&x| integrate_adaptive(|y| checked(f(x, y, reg)?, x, y), b, &inner))
                .collect();
            let mut fx = [Complex64::new(0.0, 0.0); 15];
            let mut errs = [0.0; 15];
            for ((v, e), row) in fx.iter_mut().zip(errs.iter_mut()).zip(rows) {
                let row = row?;
                *v = row.value;
                *e = row.error;
                stats.max_panels = stats.max_panels.max(row.panels);
                stats.saturated += usize::from(row.saturated);
                stats.min_width = stats.min_width.min(row.min_width);
            }
            let mut panel = kronrod_panel(lo, hi, &fx);
            panel.noise = 0.5 * (hi - lo) * kronrod_weights().iter().zip(errs).map(|(w, e)| w * e).sum::<f64>();
            Ok(panel)
        },
        a,
        &outer,
    )?;
    Ok(LadderRung {
        nodes,
        epsilon: reg.epsilon,
        k_sharpness: reg.k_sharpness,
        value: out.value,
        rel_change: None,
        extrapolated: None,
        extrapolated_change: None,
        outer_panels: out.panels,
        outer_saturated: out.saturated,
        max_inner_panels: stats.max_panels,
        saturated_rows: stats.saturated,
        min_panel_over_epsilon: stats.min_width.min(out.min_width) / reg.epsilon,
    })
}

/// Runs the (N, ε, k) → (2N, ε/2, 2k) ladder until successive values agree.
///
/// The integrand receives the regulator of the current rung. On failure the
/// error carries the full ladder.
pub fn certified_integral<F>(f: F, a: Interval, b: Interval, spec: &QuadratureSpec) -> Result<Certified>
where
    F: Fn(f64, f64, Regulator) -> Result<Complex64> + Sync,
{
    spec.validate()?;
    let mut report = LadderReport {
        rungs: Vec::new(),
        converged: false,
        achieved_tol: f64::INFINITY,
        rel_tol: spec.rel_tol,
        abs_tol: spec.abs_tol,
        grid_guard_ok: false,
    };
    let accepts = |change: f64, rel: f64| change <= spec.abs_tol || rel < spec.rel_tol;
    let mut previous: Option<Complex64> = None;
    let mut previous_ext: Option<Complex64> = None;
    for rung in 0..=spec.max_refinements {
        let (nodes, reg) = spec.at_rung(rung);
        let mut entry = iterated_rung(&f, a, b, nodes, reg, spec)?;
        let value = entry.value;
        report.grid_guard_ok = entry.saturated_rows == 0 && !entry.outer_saturated;
        let mut accepted = None;
        if let Some(prev) = previous {
            let change = (value - prev).norm();
            let rel = change / value.norm();
            entry.rel_change = Some(rel);
            let mut achieved = rel;
            let mut settled = accepts(change, rel);
            // ε halves per rung, so a linear bias cancels in 2·V_r − V_{r−1}
            let ext = 2.0 * value - prev;
            entry.extrapolated = Some(ext);
            if let Some(pe) = previous_ext {
                let change = (ext - pe).norm();
                let rel = change / ext.norm();
                entry.extrapolated_change = Some(rel);
                achieved = achieved.min(rel);
                settled |= accepts(change, rel);
            }
            if settled {
                accepted = Some(ext);
            }
            report.achieved_tol = if achieved.is_finite() { achieved } else { f64::INFINITY };
            previous_ext = Some(ext);
        }
        report.rungs.push(entry);
        if let Some(value) = accepted {
            report.converged = true;
            return Ok(Certified {
                value,
                achieved_tol: report.achieved_tol,
                report,
            });
        }
        previous = Some(value);
    }
    Err(Error::Convergence {
        element: None,
        report: Box::new(report),
    })
}
