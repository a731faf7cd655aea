//! The O(λ²) two-detector state: local terms, the nonlocal term, the density
//! matrix and the correlation measures derived from it. Every returned
//! number is per λ̃² unless stated otherwise.

use nalgebra::Matrix4;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::correlator::{commutator_along, commutator_between, two_point_along, two_point_between, VacuumKind};
use crate::error::{Error, Result};
use crate::quadrature::{
    certified_integral, integrate_adaptive, smooth_step, AdaptiveOptions, Certified, Interval, LadderReport,
    QuadratureSpec, Regulator,
};
use crate::worldline::{Worldline, WorldlinePoint};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DetectorParams {
    pub gap: f64,
    pub width: f64,
    pub peak: f64,
    pub worldline: Worldline,
}

impl DetectorParams {
    /// A detector with switching exp(−(τ − peak)²/width²). The strong support
    /// `peak ± 5 width` must lie inside the worldline's domain.
    pub fn new(gap: f64, width: f64, peak: f64, worldline: Worldline) -> Result<Self> {
        if !(width > 0.0 && width.is_finite()) {
            return Err(Error::InvalidParameter(format!("switching width must be positive, got {width}")));
        }
        if !gap.is_finite() || !peak.is_finite() {
            return Err(Error::InvalidParameter("gap and peak must be finite".into()));
        }
        let det = Self { gap, width, peak, worldline };
        det.support(5.0)?;
        Ok(det)
    }

    pub fn switching(&self, tau: f64) -> f64 {
        let x = (tau - self.peak) / self.width;
        (-x * x).exp()
    }

    /// [peak − radius·width, peak + radius·width], checked against the domain.
    pub fn support(&self, radius: f64) -> Result<Interval> {
        let iv = Interval::centered(self.peak, radius * self.width)?;
        let (lo, hi) = self.worldline.domain();
        if !(iv.lo > lo && iv.hi < hi) {
            return Err(Error::Placement(format!(
                "strong support [{}, {}] leaves the worldline domain",
                iv.lo, iv.hi
            )));
        }
        Ok(iv)
    }
}

/// Which time coordinate orders events in the nonlocal term.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum OrderingTime {
    /// Painlevé–Gullstrand time (black-hole scenarios).
    PainleveGullstrand,
    /// Inertial time (flat space).
    Inertial,
}

impl OrderingTime {
    pub fn for_vacuum(vacuum: VacuumKind) -> Self {
        if vacuum == VacuumKind::Minkowski {
            OrderingTime::Inertial
        } else {
            OrderingTime::PainleveGullstrand
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct PairReports {
    pub l_aa: Option<LadderReport>,
    pub l_bb: Option<LadderReport>,
    pub l_ab: Option<LadderReport>,
    pub l_ba: Option<LadderReport>,
    pub m: Option<LadderReport>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairMatrix {
    pub l_aa: Complex64,
    pub l_bb: Complex64,
    pub l_ab: Complex64,
    pub m: Complex64,
    pub reports: PairReports,
    /// Magnitude of negative Re L_AA, Re L_BB removed by clamping.
    pub clamped: f64,
}

impl PairMatrix {
    /// A matrix from raw elements, with no quadrature provenance.
    pub fn from_elements(l_aa: Complex64, l_bb: Complex64, l_ab: Complex64, m: Complex64) -> Self {
        Self {
            l_aa,
            l_bb,
            l_ab,
            m,
            reports: PairReports::default(),
            clamped: 0.0,
        }
    }

    pub fn l_ba(&self) -> Complex64 {
        self.l_ab.conj()
    }

    /// Real local terms clamped at zero.
    pub fn local_probabilities(&self) -> (f64, f64) {
        (self.l_aa.re.max(0.0), self.l_bb.re.max(0.0))
    }

    /// Largest number of ladder rungs used by any element.
    pub fn max_rungs(&self) -> usize {
        let r = &self.reports;
        [&r.l_aa, &r.l_bb, &r.l_ab, &r.l_ba, &r.m]
            .into_iter()
            .flatten()
            .map(|rep| rep.rungs.len())
            .max()
            .unwrap_or(0)
    }
}

/// The common worldline of two detectors, if they share one.
fn shared_worldline(a: &DetectorParams, b: &DetectorParams) -> Option<Worldline> {
    (a.worldline == b.worldline).then_some(a.worldline)
}

fn wightman(
    vacuum: VacuumKind,
    epsilon: f64,
    shared: Option<&Worldline>,
    p: &WorldlinePoint,
    q: &WorldlinePoint,
) -> Result<Complex64> {
    match shared {
        Some(wl) => two_point_along(vacuum, epsilon, wl, p, q),
        None => two_point_between(vacuum, epsilon, p, q),
    }
}

fn two_supports(det_a: &DetectorParams, det_b: &DetectorParams, spec: &QuadratureSpec) -> Result<(Interval, Interval)> {
    Ok((det_a.support(spec.support_radius)?, det_b.support(spec.support_radius)?))
}

fn budget(spec: &QuadratureSpec, det_a: &DetectorParams, det_b: &DetectorParams) -> QuadratureSpec {
    let omega = det_a.gap.abs().max(det_b.gap.abs()) * det_a.width.max(det_b.width);
    precision(&spec.with_oscillation_budget(omega), det_a, det_b)
}

/// Separations along a shared worldline are exact to rounding, so their rows
/// can be integrated three orders of magnitude closer to the noise.
fn precision(spec: &QuadratureSpec, det_a: &DetectorParams, det_b: &DetectorParams) -> QuadratureSpec {
    let mut s = *spec;
    if shared_worldline(det_a, det_b).is_some() {
        s.inner_noise_floor *= 1e-3;
    }
    s
}

/// L_ij = ∫∫ χ_i(τ) χ_j(τ′) e^{−iΩ(τ − τ′)} A(x_i(τ), x_j(τ′)).
pub fn local_term(
    det_i: &DetectorParams,
    det_j: &DetectorParams,
    vacuum: VacuumKind,
    spec: &QuadratureSpec,
) -> Result<Certified> {
    let (ia, ib) = two_supports(det_i, det_j, spec)?;
    let shared = shared_worldline(det_i, det_j);
    let spec = budget(spec, det_i, det_j);
    certified_integral(
        |t, tp, reg| {
            let p = det_i.worldline.point(t)?;
            let q = det_j.worldline.point(tp)?;
            let w = det_i.switching(t) * det_j.switching(tp);
            let phase = Complex64::from_polar(w, -(det_i.gap * t - det_j.gap * tp));
            Ok(phase * wightman(vacuum, reg.epsilon, shared.as_ref(), &p, &q)?)
        },
        ia,
        ib,
        &spec,
    )
}

/// M = −∫∫ χ_A χ_B e^{iΩ(τ_A + τ_B)} [Θ(Δt) A(x_A, x_B) + Θ(−Δt) A(x_B, x_A)],
/// with Θ replaced by the smooth step of the current ladder rung.
pub fn nonlocal_term(
    det_a: &DetectorParams,
    det_b: &DetectorParams,
    vacuum: VacuumKind,
    ordering: OrderingTime,
    spec: &QuadratureSpec,
) -> Result<Certified> {
    let (ia, ib) = two_supports(det_a, det_b, spec)?;
    let shared = shared_worldline(det_a, det_b);
    let spec = budget(spec, det_a, det_b);
    let flat = det_a.worldline.is_flat() && det_b.worldline.is_flat();
    if flat != (ordering == OrderingTime::Inertial) {
        return Err(Error::InvalidParameter(format!(
            "{ordering:?} ordering does not match the detectors' spacetime"
        )));
    }
    let contact = if shared.is_some() {
        Some(ContactTerm::new(det_a, det_b, ia, ib)?)
    } else {
        None
    };
    certified_integral(
        |ta, tb, reg| {
            let p = det_a.worldline.point(ta)?;
            let q = det_b.worldline.point(tb)?;
            let w = det_a.switching(ta) * det_b.switching(tb);
            let phase = Complex64::from_polar(-w, det_a.gap * ta + det_b.gap * tb);
            let step = smooth_step(reg.k_sharpness, p.t_pg - q.t_pg);
            let mut sum = Complex64::new(0.0, 0.0);
            if step > 0.0 {
                sum += wightman(vacuum, reg.epsilon, shared.as_ref(), &p, &q)? * step;
            }
            if step < 1.0 {
                sum += wightman(vacuum, reg.epsilon, shared.as_ref(), &q, &p)? * (1.0 - step);
            }
            let mut value = phase * sum;
            if let Some(c) = &contact {
                value -= c.density(ta, tb, reg);
            }
            Ok(value)
        },
        ia,
        ib,
        &spec,
    )
}

/// Pole of M at coincidence for two detectors sharing a worldline.
///
/// There the ordering step jumps exactly where the commutator is a δ′ of
/// proper-time separation, and the regulated integral grows like
/// (1/2π)·G₀·J(kε)/ε with G₀ = ∫ χ_A χ_B e^{i(Ω_A+Ω_B)τ} dτ. The pole is
/// removed (minimal subtraction), which leaves the Hadamard finite part in
/// the limit ε → 0. It is spread over the box as a multiple of χ_A χ_B so
/// that every rung of the ladder subtracts its own pole.
#[derive(Debug, Clone, Copy)]
struct ContactTerm {
    g0: Complex64,
    /// ∫∫ χ_A χ_B over the box.
    norm: f64,
    /// dt_order/dτ along the shared worldline.
    order_rate: f64,
    a: DetectorParams,
    b: DetectorParams,
}

impl ContactTerm {
    fn new(a: &DetectorParams, b: &DetectorParams, ia: Interval, ib: Interval) -> Result<Self> {
        let opts = AdaptiveOptions {
            rel_tol: 1e-12,
            ..Default::default()
        };
        let (lo, hi) = (ia.lo.max(ib.lo), ia.hi.min(ib.hi));
        let g0 = if lo < hi {
            integrate_adaptive(
                |t| Ok(Complex64::from_polar(a.switching(t) * b.switching(t), (a.gap + b.gap) * t)),
                Interval::new(lo, hi)?,
                &opts,
            )?
            .value
        } else {
            Complex64::new(0.0, 0.0)
        };
        let mass = |d: &DetectorParams, iv: Interval| -> Result<f64> {
            Ok(integrate_adaptive(|t| Ok(Complex64::new(d.switching(t), 0.0)), iv, &opts)?.value.re)
        };
        let norm = mass(a, ia)? * mass(b, ib)?;
        let mid = 0.5 * (a.peak + b.peak);
        let h = 1e-4;
        let order_rate = (a.worldline.t_pg(mid + h)? - a.worldline.t_pg(mid - h)?) / (2.0 * h);
        Ok(Self {
            g0,
            norm,
            order_rate,
            a: *a,
            b: *b,
        })
    }

    fn pole(&self, reg: Regulator) -> Complex64 {
        self.g0 * contact_coefficient(reg.k_sharpness * reg.epsilon * self.order_rate)
            / (2.0 * std::f64::consts::PI * reg.epsilon)
    }

    fn density(&self, ta: f64, tb: f64, reg: Regulator) -> Complex64 {
        self.pole(reg) * (self.a.switching(ta) * self.b.switching(tb) / self.norm)
    }
}

/// J(a) = ∫ dx [Θ_a(x)/(x − i)² + Θ_a(−x)/(x + i)²] with Θ_a(x) = ½ + ½ tanh(ax);
/// 2i for a sharp step.
pub fn contact_coefficient(a: f64) -> Complex64 {
    // 1 − tanh(ax) = 2/(e^{2ax} + 1); the tail beyond 40/a is below e^{-80}
    let opts = AdaptiveOptions {
        rel_tol: 1e-12,
        ..Default::default()
    };
    let tail = integrate_adaptive(
        |x| Ok(Complex64::new(x / (((2.0 * a * x).exp() + 1.0) * (x * x + 1.0).powi(2)), 0.0)),
        Interval {
            lo: 0.0,
            hi: 40.0 / a,
        },
        &opts,
    )
    .map_or(f64::NAN, |o| o.value.re);
    Complex64::new(0.0, 2.0 - 8.0 * tail)
}

/// Absolute ladder tolerance for E, as a fraction of rel_tol · ∫∫χ_Aχ_B/(4π).
pub const SIGNALLING_ABS_FRACTION: f64 = 1e-2;

/// Signed E/λ̃² = ½ Im ∫∫ χ_A χ_B ⟨[∂φ(x_A), ∂φ(x_B)]⟩, with its ladder.
pub fn signalling_estimator(
    det_a: &DetectorParams,
    det_b: &DetectorParams,
    vacuum: VacuumKind,
    spec: &QuadratureSpec,
) -> Result<(f64, LadderReport)> {
    let (ia, ib) = two_supports(det_a, det_b, spec)?;
    let shared = shared_worldline(det_a, det_b);
    // E is exactly zero away from light-cone crossings, where a relative
    // criterion can never be met; compare against the switching overlap.
    let overlap = det_a.width * det_b.width / 4.0;
    let spec = QuadratureSpec {
        abs_tol: spec.abs_tol.max(SIGNALLING_ABS_FRACTION * spec.rel_tol * overlap),
        ..precision(spec, det_a, det_b)
    };
    let out = certified_integral(
        |ta, tb, reg| {
            let p = det_a.worldline.point(ta)?;
            let q = det_b.worldline.point(tb)?;
            let w = det_a.switching(ta) * det_b.switching(tb);
            let c = match &shared {
                Some(wl) => commutator_along(vacuum, reg.epsilon, wl, &p, &q)?,
                None => commutator_between(vacuum, reg.epsilon, &p, &q)?,
            };
            Ok(c * w)
        },
        ia,
        ib,
        &spec,
    )?;
    Ok((0.5 * out.value.im, out.report))
}

/// Computes L_AA, L_BB, L_AB (and L_BA as a cross-check) and M.
pub fn pair_matrix(
    det_a: &DetectorParams,
    det_b: &DetectorParams,
    vacuum: VacuumKind,
    spec: &QuadratureSpec,
) -> Result<PairMatrix> {
    let ordering = OrderingTime::for_vacuum(vacuum);
    let ((l_aa, l_bb), ((l_ab, l_ba), m)) = rayon::join(
        || {
            rayon::join(
                || local_term(det_a, det_a, vacuum, spec).map_err(|e| e.for_element("L_AA")),
                || local_term(det_b, det_b, vacuum, spec).map_err(|e| e.for_element("L_BB")),
            )
        },
        || {
            rayon::join(
                || {
                    rayon::join(
                        || local_term(det_a, det_b, vacuum, spec).map_err(|e| e.for_element("L_AB")),
                        || local_term(det_b, det_a, vacuum, spec).map_err(|e| e.for_element("L_BA")),
                    )
                },
                || nonlocal_term(det_a, det_b, vacuum, ordering, spec).map_err(|e| e.for_element("M")),
            )
        },
    );
    let (l_aa, l_bb, l_ab, l_ba, m) = (l_aa?, l_bb?, l_ab?, l_ba?, m?);

    let tol = |c: &Certified| spec.abs_tol.max(4.0 * spec.rel_tol * c.value.norm());
    if (l_ba.value - l_ab.value.conj()).norm() > tol(&l_ab).max(tol(&l_ba)) {
        return Err(Error::Inconsistent(format!(
            "L_BA = {} is not the conjugate of L_AB = {}",
            l_ba.value, l_ab.value
        )));
    }
    for (name, c) in [("L_AA", &l_aa), ("L_BB", &l_bb)] {
        if c.value.im.abs() > tol(c) {
            return Err(Error::Inconsistent(format!("{name} = {} is not real", c.value)));
        }
    }
    let clamped = (-l_aa.value.re).max(0.0) + (-l_bb.value.re).max(0.0);
    Ok(PairMatrix {
        l_aa: l_aa.value,
        l_bb: l_bb.value,
        l_ab: l_ab.value,
        m: m.value,
        reports: PairReports {
            l_aa: Some(l_aa.report),
            l_bb: Some(l_bb.report),
            l_ab: Some(l_ab.report),
            l_ba: Some(l_ba.report),
            m: Some(m.report),
        },
        clamped,
    })
}

/// ρ_AB in the basis (gg, ge, eg, ee) with entries scaled by λ̃².
pub fn assemble_density_matrix(pm: &PairMatrix, lambda: f64) -> Result<Matrix4<Complex64>> {
    let l2 = lambda * lambda;
    let z = Complex64::new(0.0, 0.0);
    let (laa, lbb) = (pm.l_aa.re * l2, pm.l_bb.re * l2);
    let (lab, m) = (pm.l_ab * l2, pm.m * l2);
    let rho = Matrix4::new(
        Complex64::new(1.0 - laa - lbb, 0.0), z, z, m.conj(),
        z, Complex64::new(lbb, 0.0), lab.conj(), z,
        z, lab, Complex64::new(laa, 0.0), z,
        m, z, z, z,
    );
    let trace = rho.trace();
    if (trace.re - 1.0).abs() > 1e-12 || trace.im.abs() > 1e-12 {
        return Err(Error::Inconsistent(format!("trace of the density matrix is {trace}")));
    }
    Ok(rho)
}

/// Ascending eigenvalues of a Hermitian 4×4 matrix.
pub fn density_eigenvalues(rho: &Matrix4<Complex64>) -> [f64; 4] {
    let eig = rho.symmetric_eigen();
    let mut v = [eig.eigenvalues[0], eig.eigenvalues[1], eig.eigenvalues[2], eig.eigenvalues[3]];
    v.sort_by(f64::total_cmp);
    v
}

/// C/λ̃² = 2 max(0, |M| − √(L_AA L_BB)).
pub fn concurrence(pm: &PairMatrix) -> f64 {
    let (laa, lbb) = pm.local_probabilities();
    2.0 * (pm.m.norm() - (laa * lbb).sqrt()).max(0.0)
}

fn xlnx(x: f64) -> f64 {
    if x > 0.0 {
        x * x.ln()
    } else {
        0.0
    }
}

/// I(λ̃)/λ̃² from the leading-order formula, evaluated on λ̃²-scaled entries.
///
/// Because L₊ + L₋ = L_AA + L_BB the ln λ̃² pieces cancel, so the result does
/// not actually depend on λ̃; it is kept as an input to make that explicit.
pub fn mutual_information(pm: &PairMatrix, lambda: f64) -> f64 {
    let l2 = lambda * lambda;
    let (laa, lbb) = pm.local_probabilities();
    let (a, b, c) = (laa * l2, lbb * l2, pm.l_ab.norm() * l2);
    let root = ((a - b) * (a - b) + 4.0 * c * c).sqrt();
    let lp = 0.5 * (a + b + root);
    let lm = (0.5 * (a + b - root)).max(0.0);
    (xlnx(lp) + xlnx(lm) - xlnx(a) - xlnx(b)) / l2
}
