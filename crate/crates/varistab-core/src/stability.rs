//! Executable checkers for the Lipschitz lower semicontinuity and calmness
//! criteria of variational systems, the coderivative and smooth-base
//! calmness criteria, and the descent tracker embodied in their proofs.
//!
//! Hypotheses that are inherently non-falsifiable by sampling (upper
//! semicontinuity, closedness, continuity) report `SampledEvidence`, never
//! `Holds`; a `Fails` status always carries a concrete witness.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)] // provides f64 math in no_std builds
use num_traits::Float;

use crate::dual::{c_constant, cone_slice, graph_normal_cone, min_singular_value_adjoint};
use crate::error::TrackStep;
use crate::geneq::GenEqProblem;
use crate::metric::{euclid, norm, GridSpec, Region};
use crate::oracle::{
    detect_trend, empirical_modulus, verdict_compare, EmpiricalEstimate, MapHandle,
    ModulusKind, ScaleLadder, Trend, VerdictKind, VerdictReport,
};
use crate::sample::{ball_points, LdStream};
use crate::slopes::{
    partial_strict_outer_slope_x, strict_outer_slope, RadiusSchedule, Sampler, SlopeEstimate,
};
use crate::{Error, ExtReal, Result, INF};

/// Verdict of a single hypothesis check.
#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub enum Status {
    Holds,
    Fails,
    SampledEvidence,
}

/// One hypothesis row of a report.
#[derive(Clone, Debug)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct HypothesisStatus {
    /// Roman label "i" … "vi".
    pub id: &'static str,
    pub status: Status,
    #[cfg_attr(feature = "serde", serde(serialize_with = "crate::serde_ext::ser_opt"))]
    pub constant: Option<ExtReal>,
    pub note: String,
    pub witness: Option<Vec<f64>>,
}

impl HypothesisStatus {
    fn holds(id: &'static str, constant: Option<ExtReal>, note: &str) -> Self {
        HypothesisStatus {
            id,
            status: Status::Holds,
            constant,
            note: note.into(),
            witness: None,
        }
    }

    fn evidence(id: &'static str, note: String) -> Self {
        HypothesisStatus {
            id,
            status: Status::SampledEvidence,
            constant: None,
            note,
            witness: None,
        }
    }

    fn fails(id: &'static str, note: String, witness: Option<Vec<f64>>) -> Self {
        HypothesisStatus {
            id,
            status: Status::Fails,
            constant: None,
            note,
            witness,
        }
    }
}

/// Shared configuration of the stability checkers.
#[derive(Clone, Debug)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct StabilityConfig {
    pub schedule: RadiusSchedule,
    pub ladder: ScaleLadder,
    /// Grid spacing of solution sweeps in X.
    pub x_resolution: f64,
    /// Grid spacing used to materialize field values in Y.
    pub y_resolution: f64,
    /// Displacement threshold accepting a grid point as a solution.
    pub solve_tol: f64,
    /// Positivity threshold for the slope hypotheses (vi).
    pub slope_floor: f64,
    /// Relative slack of the bound-versus-oracle comparisons.
    pub validation_slack: f64,
    /// State localization radius δ of the calmness oracle.
    pub delta: f64,
}

impl StabilityConfig {
    pub fn standard(seed: u64) -> Self {
        StabilityConfig {
            schedule: RadiusSchedule::standard(seed),
            ladder: ScaleLadder::standard(),
            x_resolution: 0.005,
            y_resolution: 0.05,
            solve_tol: 1e-6,
            slope_floor: 1e-3,
            validation_slack: 0.05,
            delta: 0.5,
        }
    }
}

// ---------------------------------------------------------------------------
// perturbation constants
// ---------------------------------------------------------------------------

/// Which version of the parameter-perturbation constants to estimate.
#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub enum PerturbationMode {
    /// Constants at the reference state only: `l_f`, `l_F`.
    Pointwise,
    /// Constants uniform over states near `x̄`: `ℓ_f`, `ℓ_F`.
    Uniform,
}

/// One estimated constant with its divergence diagnostics.
#[derive(Clone, Debug)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct PerturbationEstimate {
    #[cfg_attr(feature = "serde", serde(serialize_with = "crate::serde_ext::ser_ext"))]
    pub value: ExtReal,
    pub trend: Trend,
    pub scale_trace: Vec<(f64, ExtReal)>,
    pub witness: Option<Vec<f64>>,
}

/// The pair `(base constant, field constant)` for the requested mode.
#[derive(Clone, Debug)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct PerturbationConstants {
    pub mode: PerturbationMode,
    pub base: PerturbationEstimate,
    pub field: PerturbationEstimate,
}

fn axis_dirs(dim: usize) -> Vec<Vec<f64>> {
    let mut out = Vec::new();
    for i in 0..dim {
        for s in [1.0, -1.0] {
            let mut d = vec![0.0; dim];
            d[i] = s;
            out.push(d);
        }
    }
    out
}

/// Estimates the parameter-perturbation constants of the base and the field.
///
/// Pointwise mode bounds `d(f(p,x̄), ȳ)` and `dist(ȳ, F(p,x̄))` by multiples
/// of `d(p,p̄)`; uniform mode bounds `d(f(p,x), f(p̄,x))` and the excess of
/// `F(p,x)` over `F(p̄,x)` uniformly over a state grid near `x̄`. A constant
/// is reported `+∞` when the quotients grow without bound across the scales.
pub fn estimate_perturbation_constants(
    prob: &GenEqProblem,
    mode: PerturbationMode,
    cfg: &StabilityConfig,
) -> Result<PerturbationConstants> {
    let p_bar = prob.p_ref().coords();
    let x_bar = prob.x_ref().coords();
    let y_bar = prob.y_ref().coords();
    let dirs = axis_dirs(prob.dim_p());
    let scales = cfg.ladder.scales();

    // state grid for the uniform mode
    let x_points: Vec<Vec<f64>> = match mode {
        PerturbationMode::Pointwise => vec![x_bar.to_vec()],
        PerturbationMode::Uniform => {
            let r = cfg.delta.min(prob.x_region.radius());
            let region = intersect_region(&prob.x_region, &Region::ball(x_bar, r)?);
            let step = (2.0 * r / 8.0).max(cfg.x_resolution);
            GridSpec::new(region, step)?.points()?
        }
    };
    let y_grid = GridSpec::new(prob.y_region.clone(), cfg.y_resolution)?;

    let mut base_trace: Vec<(f64, ExtReal)> = Vec::new();
    let mut field_trace: Vec<(f64, ExtReal)> = Vec::new();
    let mut base_sup: f64 = 0.0;
    let mut field_sup: f64 = 0.0;
    let mut base_witness: Option<Vec<f64>> = None;
    let mut field_witness: Option<Vec<f64>> = None;
    let mut field_infinite = false;

    for s in &scales {
        let mut base_q: f64 = 0.0;
        let mut field_q: f64 = 0.0;
        for dir in &dirs {
            let p: Vec<f64> = p_bar.iter().zip(dir).map(|(c, d)| c + s * d).collect();
            let dp = prob.p_metric.dist(&p, p_bar);
            for x in &x_points {
                let qf = match mode {
                    PerturbationMode::Pointwise => {
                        prob.y_metric.dist(&prob.base.eval(&p, x), y_bar) / dp
                    }
                    PerturbationMode::Uniform => {
                        let fp = prob.base.eval(&p, x);
                        let f0 = prob.base.eval(p_bar, x);
                        prob.y_metric.dist(&fp, &f0) / dp
                    }
                };
                if qf > base_q {
                    base_q = qf;
                }
                if qf > base_sup {
                    base_sup = qf;
                    base_witness = Some(p.clone());
                }
                let qcap = match mode {
                    PerturbationMode::Pointwise => {
                        prob.field.eval(&p, x).dist(y_bar)? / dp
                    }
                    PerturbationMode::Uniform => {
                        let moved = prob.field.eval(&p, x);
                        let home = prob.field.eval(p_bar, x);
                        let sample = moved.sample_grid(&y_grid, prob.tol_feas)?;
                        crate::metric::excess_points(&sample, &home)? / dp
                    }
                };
                if !qcap.is_finite() {
                    field_infinite = true;
                }
                if qcap > field_q {
                    field_q = qcap;
                }
                if qcap > field_sup {
                    field_sup = qcap;
                    field_witness = Some(p.clone());
                }
            }
        }
        base_trace.push((*s, base_q));
        field_trace.push((*s, field_q));
    }

    let base_trend = detect_trend(&base_trace);
    let field_trend = if field_infinite {
        Trend::Diverging
    } else {
        detect_trend(&field_trace)
    };
    Ok(PerturbationConstants {
        mode,
        base: PerturbationEstimate {
            value: if base_trend == Trend::Diverging {
                INF
            } else {
                base_sup
            },
            trend: base_trend,
            scale_trace: base_trace,
            witness: base_witness,
        },
        field: PerturbationEstimate {
            value: if field_trend == Trend::Diverging {
                INF
            } else {
                field_sup
            },
            trend: field_trend,
            scale_trace: field_trace,
            witness: field_witness,
        },
    })
}

fn intersect_region(a: &Region, b: &Region) -> Region {
    Region {
        lo: a.lo.iter().zip(&b.lo).map(|(x, y)| x.max(*y)).collect(),
        hi: a.hi.iter().zip(&b.hi).map(|(x, y)| x.min(*y)).collect(),
    }
}

// ---------------------------------------------------------------------------
// sampled continuity / semicontinuity surrogates
// ---------------------------------------------------------------------------

/// Sampled surrogate of "F(p,·) is u.s.c. near x̄ for p near p̄": the excess
/// of `F(p,z)` over `F(p,x)` must vanish as `z → x`.
fn sampled_field_usc(prob: &GenEqProblem, cfg: &StabilityConfig) -> HypothesisStatus {
    let p_bar = prob.p_ref().coords();
    let x_bar = prob.x_ref().coords();
    let y_grid = match GridSpec::new(prob.y_region.clone(), cfg.y_resolution) {
        Ok(g) => g,
        Err(e) => return HypothesisStatus::fails("ii", format!("{e}"), None),
    };
    let mut stream = LdStream::new(prob.dim_p() + prob.dim_x(), cfg.schedule.seed ^ 0x11);
    let mut worst_first: f64 = 0.0;
    let mut worst_last: f64 = 0.0;
    let mut witness = None;
    let radii = [0.08, 0.04, 0.02, 0.01];
    for trial in 0..6 {
        let u = stream.next_unit();
        let scale = 0.2 * 0.5_f64.powi((trial % 3) as i32);
        let p: Vec<f64> = p_bar
            .iter()
            .enumerate()
            .map(|(i, c)| c + scale * (2.0 * u[i % u.len()] - 1.0))
            .collect();
        let x: Vec<f64> = x_bar
            .iter()
            .enumerate()
            .map(|(i, c)| c + 0.1 * (2.0 * u[(i + 1) % u.len()] - 1.0))
            .collect();
        let home = prob.field.eval(&p, &x);
        for (ri, r) in radii.iter().enumerate() {
            let zs = ball_points(&x, *r, 16, &prob.x_metric, &mut stream);
            let mut res: f64 = 0.0;
            for z in zs {
                let moved = prob.field.eval(&p, &z);
                let sample = match moved.sample_grid(&y_grid, prob.tol_feas) {
                    Ok(s) => s,
                    Err(_) => continue,
                };
                match crate::metric::excess_points(&sample, &home) {
                    Ok(e) => {
                        if e > res {
                            res = e;
                        }
                    }
                    Err(_) => {}
                }
            }
            if ri == 0 {
                worst_first = worst_first.max(res);
            }
            if ri + 1 == radii.len() && res > worst_last {
                worst_last = res;
                witness = Some({
                    let mut w = p.clone();
                    w.extend_from_slice(&x);
                    w
                });
            }
        }
    }
    // the excess must shrink with the radius (or be negligible outright)
    if worst_last <= (0.5 * worst_first).max(2.0 * cfg.y_resolution).max(1e-6) {
        HypothesisStatus::evidence(
            "ii",
            format!(
                "sampled u.s.c. surrogate: excess {:.2e} at radius {:.0e} (from {:.2e} at {:.0e})",
                worst_last, radii[3], worst_first, radii[0]
            ),
        )
    } else {
        HypothesisStatus::fails(
            "ii",
            format!(
                "excess(F(p,z), F(p,x)) stays at {worst_last:.3e} as z → x; upper semicontinuity looks violated"
            ),
            witness,
        )
    }
}

/// Sampled continuity of `x ↦ f(p,x)` near `x̄` (for `p` near `p̄` when
/// `vary_p`, else at `p̄` only).
fn sampled_base_continuity(
    prob: &GenEqProblem,
    cfg: &StabilityConfig,
    vary_p: bool,
) -> HypothesisStatus {
    let p_bar = prob.p_ref().coords();
    let x_bar = prob.x_ref().coords();
    let mut stream = LdStream::new(prob.dim_p() + prob.dim_x(), cfg.schedule.seed ^ 0x22);
    let mut worst_first: f64 = 0.0;
    let mut worst_last: f64 = 0.0;
    let mut witness = None;
    let radii = [0.08, 0.02, 0.005, 0.00125];
    for trial in 0..6 {
        let u = stream.next_unit();
        let p: Vec<f64> = if vary_p {
            p_bar
                .iter()
                .enumerate()
                .map(|(i, c)| c + 0.1 * (2.0 * u[i % u.len()] - 1.0))
                .collect()
        } else {
            p_bar.to_vec()
        };
        let x: Vec<f64> = x_bar
            .iter()
            .enumerate()
            .map(|(i, c)| c + 0.1 * (2.0 * u[(i + 1) % u.len()] - 1.0))
            .collect();
        let fx = prob.base.eval(&p, &x);
        for (ri, r) in radii.iter().enumerate() {
            let zs = ball_points(&x, *r, 16, &prob.x_metric, &mut stream);
            let mut res: f64 = 0.0;
            for z in zs {
                let fz = prob.base.eval(&p, &z);
                res = res.max(prob.y_metric.dist(&fz, &fx));
            }
            if ri == 0 {
                worst_first = worst_first.max(res);
            }
            if ri + 1 == radii.len() && res > worst_last {
                worst_last = res;
                witness = Some({
                    let mut w = p.clone();
                    w.extend_from_slice(&x);
                    w
                });
            }
        }
        let _ = trial;
    }
    if worst_last <= (0.25 * worst_first).max(1e-9) {
        HypothesisStatus::evidence(
            "iv",
            format!(
                "sampled continuity: oscillation {worst_last:.2e} at radius {:.0e}",
                radii[3]
            ),
        )
    } else {
        HypothesisStatus::fails(
            "iv",
            format!("f(p,·) oscillates by {worst_last:.3e} on shrinking balls"),
            witness,
        )
    }
}

// ---------------------------------------------------------------------------
// Lipschitz lower semicontinuity checker
// ---------------------------------------------------------------------------

/// Validation of a bound against grid solutions on a parameter ladder.
#[derive(Clone, Debug)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct ValidationOutcome {
    pub passed: bool,
    /// Largest observed quotient `dist(x̄, G(p)) / d(p,p̄)`.
    #[cfg_attr(feature = "serde", serde(serialize_with = "crate::serde_ext::ser_ext"))]
    pub empirical_constant: ExtReal,
    /// Rows `(d(p,p̄), achieved distance, allowance)`.
    pub rows: Vec<(f64, f64, f64)>,
}

/// Report of the Lipschitz lower semicontinuity criterion.
#[derive(Clone, Debug)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct LiplscReport {
    pub hypotheses: Vec<HypothesisStatus>,
    #[cfg_attr(feature = "serde", serde(serialize_with = "crate::serde_ext::ser_ext"))]
    pub l_f: ExtReal,
    #[cfg_attr(feature = "serde", serde(serialize_with = "crate::serde_ext::ser_ext"))]
    pub l_cap_f: ExtReal,
    pub slope: SlopeEstimate,
    #[cfg_attr(feature = "serde", serde(serialize_with = "crate::serde_ext::ser_opt"))]
    pub bound: Option<ExtReal>,
    /// Conservative localization radius recomputed from the proof recipe,
    /// reported for information only.
    pub zeta_info: f64,
    pub validation: Option<ValidationOutcome>,
}

impl LiplscReport {
    pub fn verdict(&self) -> VerdictKind {
        if self.hypotheses.iter().any(|h| h.status == Status::Fails) {
            return VerdictKind::Fail;
        }
        match (&self.bound, &self.validation) {
            (Some(_), Some(v)) if v.passed => VerdictKind::Pass,
            (Some(_), Some(_)) => VerdictKind::Fail,
            _ => VerdictKind::Undetermined,
        }
    }
}

/// Checks the sufficient condition for Lipschitz lower semicontinuity of the
/// solution mapping at `(p̄, x̄)` and validates the quantitative bound
/// `(l_f + l_F) / c` against grid solutions.
pub fn check_liplsc(prob: &GenEqProblem, cfg: &StabilityConfig) -> Result<LiplscReport> {
    let mut hyps = Vec::with_capacity(6);
    hyps.push(HypothesisStatus::holds(
        "i",
        None,
        "finite-dimensional state space is metrically complete",
    ));
    hyps.push(sampled_field_usc(prob, cfg));

    let pointwise = estimate_perturbation_constants(prob, PerturbationMode::Pointwise, cfg)?;
    let l_cap_f = pointwise.field.value;
    let l_f = pointwise.base.value;
    if pointwise.field.trend == Trend::Diverging {
        hyps.push(HypothesisStatus::fails(
            "iii",
            format!(
                "dist(ȳ, F(p,x̄)) is not bounded by any multiple of d(p,p̄); quotient trace {:?}",
                shorten(&pointwise.field.scale_trace)
            ),
            pointwise.field.witness.clone(),
        ));
    } else {
        hyps.push(HypothesisStatus::holds(
            "iii",
            Some(l_cap_f),
            "pointwise field constant over the scale ladder",
        ));
    }
    hyps.push(sampled_base_continuity(prob, cfg, true));
    if pointwise.base.trend == Trend::Diverging {
        hyps.push(HypothesisStatus::fails(
            "v",
            format!(
                "d(f(p,x̄), ȳ) is not bounded by any multiple of d(p,p̄); quotient trace {:?}",
                shorten(&pointwise.base.scale_trace)
            ),
            pointwise.base.witness.clone(),
        ));
    } else {
        hyps.push(HypothesisStatus::holds(
            "v",
            Some(l_f),
            "pointwise base constant over the scale ladder",
        ));
    }

    // (vi): partial strict outer slope of the displacement in x
    let psi = |p: &[f64], x: &[f64]| prob.displacement(p, x).unwrap_or(INF);
    let x_sampler = Sampler::ambient(prob.x_metric.clone());
    let slope = partial_strict_outer_slope_x(
        &psi,
        prob.p_ref().coords(),
        prob.x_ref().coords(),
        &prob.p_metric,
        &cfg.schedule,
        &x_sampler,
    )?;
    if slope.value >= cfg.slope_floor {
        hyps.push(HypothesisStatus::holds(
            "vi",
            Some(slope.value),
            if slope.vacuous {
                "no nearby point has slightly positive displacement; the condition holds vacuously"
            } else {
                "partial strict outer slope of the displacement"
            },
        ));
    } else {
        hyps.push(HypothesisStatus::fails(
            "vi",
            format!(
                "partial strict outer slope degenerates: {:.3e} < floor {:.1e}",
                slope.value, cfg.slope_floor
            ),
            None,
        ));
    }

    let all_ok = !hyps.iter().any(|h| h.status == Status::Fails);
    let bound = if all_ok {
        Some((l_f + l_cap_f) / slope.value)
    } else {
        None
    };

    let delta_star = prob.x_region.radius() / 2.0;
    let c = slope.value.min(1e12);
    let zeta_info = (0.5_f64)
        .min(c / (2.0 * (l_cap_f.min(1e12) + l_f.min(1e12) + 1.0)))
        .min(1.0 / (l_cap_f.min(1e12) + l_f.min(1e12) + 1.0))
        * delta_star;

    let validation = match bound {
        None => None,
        Some(b) => Some(validate_liplsc_bound(prob, cfg, b)?),
    };

    Ok(LiplscReport {
        hypotheses: hyps,
        l_f,
        l_cap_f,
        slope,
        bound,
        zeta_info,
        validation,
    })
}

fn shorten(trace: &[(f64, ExtReal)]) -> Vec<(f64, ExtReal)> {
    let n = trace.len();
    if n <= 4 {
        trace.to_vec()
    } else {
        trace[n - 4..].to_vec()
    }
}

/// Sampled Lipschitz constant of `x ↦ ψ(p,x)` near `x̄`, used to make grid
/// solve tolerances resolution-aware (a lattice neighbor of a true solution
/// carries a displacement up to `κ · step`).
pub(crate) fn displacement_lipschitz(prob: &GenEqProblem, p: &[f64], radius: f64) -> f64 {
    let x_bar = prob.x_ref().coords();
    let mut stream = LdStream::new(prob.dim_x(), 0xD15);
    let mut kappa: f64 = 0.0;
    let pts = ball_points(x_bar, radius, 32, &prob.x_metric, &mut stream);
    let psi0 = prob.displacement(p, x_bar).unwrap_or(INF);
    for z in &pts {
        let d = prob.x_metric.dist(z, x_bar);
        if d <= 0.0 {
            continue;
        }
        if let Ok(v) = prob.displacement(p, z) {
            if v.is_finite() && psi0.is_finite() {
                kappa = kappa.max((v - psi0).abs() / d);
            }
        }
    }
    kappa.max(1.0)
}

/// Grid-aware solve tolerance: a lattice point next to a true solution has
/// displacement up to `κ·step/2`; accept up to `0.75·κ·step` to cover the
/// sampling error of `κ` itself.
pub(crate) fn grid_solve_tol(prob: &GenEqProblem, cfg: &StabilityConfig) -> f64 {
    let kappa = displacement_lipschitz(prob, prob.p_ref().coords(), 8.0 * cfg.x_resolution);
    cfg.solve_tol.max(0.75 * kappa * cfg.x_resolution)
}

fn validate_liplsc_bound(
    prob: &GenEqProblem,
    cfg: &StabilityConfig,
    bound: f64,
) -> Result<ValidationOutcome> {
    let p_bar = prob.p_ref().coords();
    let x_bar = prob.x_ref().coords();
    let dirs = axis_dirs(prob.dim_p());
    let grid = GridSpec::new(prob.x_region.clone(), cfg.x_resolution)?;
    let mut rows = Vec::new();
    let mut passed = true;
    let mut empirical: f64 = 0.0;
    for s in cfg.ladder.scales() {
        if s < cfg.x_resolution {
            continue;
        }
        for dir in &dirs {
            let p: Vec<f64> = p_bar.iter().zip(dir).map(|(c, d)| c + s * d).collect();
            if !prob.p_region.contains(&p, 0.0) {
                continue;
            }
            let dp = prob.p_metric.dist(&p, p_bar);
            let kappa = displacement_lipschitz(prob, &p, 8.0 * grid.step);
            let tol = cfg.solve_tol.max(0.75 * kappa * grid.step);
            let sol = prob.solve_on_grid(&p, &grid, tol)?;
            let dist = sol.dist_to(x_bar, &prob.x_metric);
            let allowance = bound * dp * (1.0 + cfg.validation_slack) + grid.step;
            if dist > allowance {
                passed = false;
            }
            if dist.is_finite() {
                let q = (dist - grid.step).max(0.0) / dp;
                empirical = empirical.max(q);
            } else {
                empirical = INF;
                passed = false;
            }
            rows.push((dp, dist, allowance));
        }
    }
    Ok(ValidationOutcome {
        passed,
        empirical_constant: empirical,
        rows,
    })
}

// ---------------------------------------------------------------------------
// calmness checker
// ---------------------------------------------------------------------------

/// Report of the calmness criterion with its modulus estimate.
#[derive(Clone, Debug)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct CalmReport {
    pub hypotheses: Vec<HypothesisStatus>,
    #[cfg_attr(feature = "serde", serde(serialize_with = "crate::serde_ext::ser_ext"))]
    pub ell_f: ExtReal,
    #[cfg_attr(feature = "serde", serde(serialize_with = "crate::serde_ext::ser_ext"))]
    pub ell_cap_f: ExtReal,
    pub slope: SlopeEstimate,
    #[cfg_attr(feature = "serde", serde(serialize_with = "crate::serde_ext::ser_opt"))]
    pub bound: Option<ExtReal>,
    pub oracle: Option<EmpiricalEstimate>,
    pub verdict_detail: Option<VerdictReport>,
}

impl CalmReport {
    pub fn verdict(&self) -> VerdictKind {
        if self.hypotheses.iter().any(|h| h.status == Status::Fails) {
            return VerdictKind::Fail;
        }
        match &self.verdict_detail {
            Some(v) => v.kind,
            None => VerdictKind::Undetermined,
        }
    }
}

/// Checks the sufficient condition for calmness of the solution mapping at
/// `(p̄, x̄)`, reports the modulus bound `(ℓ_f + ℓ_F) / |∇>disp|(x̄,ȳ)`, and
/// cross-checks it against the empirical calmness modulus.
pub fn check_calm(prob: &GenEqProblem, cfg: &StabilityConfig) -> Result<CalmReport> {
    let graph = prob.field_graph().ok_or_else(|| {
        Error::Unsupported("calmness check requires a graph representation of F(p̄,·)".into())
    })?;
    let mut hyps = Vec::with_capacity(6);
    hyps.push(HypothesisStatus::holds(
        "i",
        None,
        "finite-dimensional spaces are metrically complete",
    ));

    // (ii): closedness of the localized graph. The representations are
    // closed by construction; sampled membership consistency is reported as
    // evidence, not proof.
    {
        let dim_x = prob.dim_x();
        let mut center = prob.x_ref().coords().to_vec();
        center.extend_from_slice(prob.y_ref().coords());
        let mut stream = LdStream::new(center.len(), cfg.schedule.seed ^ 0x33);
        let xy = prob.xy_metric();
        let mut attached = 0usize;
        let mut consistent = true;
        for z in ball_points(&center, 0.5, 64, &xy, &mut stream) {
            if let Ok(w) = graph.attach(&z, dim_x) {
                attached += 1;
                if !graph.contains(&w, dim_x, 10.0 * prob.tol_feas) {
                    consistent = false;
                }
            }
        }
        if consistent {
            hyps.push(HypothesisStatus::evidence(
                "ii",
                format!(
                    "graph representation is closed by construction; {attached} sampled attachments verified"
                ),
            ));
        } else {
            hyps.push(HypothesisStatus::fails(
                "ii",
                "graph attachment produced points failing the membership test".into(),
                None,
            ));
        }
    }

    let uniform = estimate_perturbation_constants(prob, PerturbationMode::Uniform, cfg)?;
    let ell_cap_f = uniform.field.value;
    let ell_f = uniform.base.value;
    if uniform.field.trend == Trend::Diverging {
        hyps.push(HypothesisStatus::fails(
            "iii",
            format!(
                "excess(F(p,x), F(p̄,x)) is not bounded by any multiple of d(p,p̄); trace {:?}",
                shorten(&uniform.field.scale_trace)
            ),
            uniform.field.witness.clone(),
        ));
    } else {
        hyps.push(HypothesisStatus::holds(
            "iii",
            Some(ell_cap_f),
            "uniform field inclusion constant over the scale ladder",
        ));
    }
    hyps.push(sampled_base_continuity(prob, cfg, false));
    if uniform.base.trend == Trend::Diverging {
        hyps.push(HypothesisStatus::fails(
            "v",
            format!(
                "d(f(p,x), f(p̄,x)) is not bounded uniformly; trace {:?}",
                shorten(&uniform.base.scale_trace)
            ),
            uniform.base.witness.clone(),
        ));
    } else {
        hyps.push(HypothesisStatus::holds(
            "v",
            Some(ell_f),
            "uniform base constant over the scale ladder",
        ));
    }

    // (vi): strict outer slope of the graph displacement at (x̄, ȳ),
    // sampled along the graph of F(p̄,·)
    let dim_x = prob.dim_x();
    let xy = prob.xy_metric();
    let graph_clone = graph.clone();
    let sampler = Sampler::attached(xy, move |z| graph_clone.attach(z, dim_x).ok());
    let disp = |xy_pt: &[f64]| prob.graph_displacement_xy(xy_pt).unwrap_or(INF);
    let mut center = prob.x_ref().coords().to_vec();
    center.extend_from_slice(prob.y_ref().coords());
    let slope = strict_outer_slope(&disp, &center, &cfg.schedule, &sampler)?;
    if slope.value >= cfg.slope_floor {
        hyps.push(HypothesisStatus::holds(
            "vi",
            Some(slope.value),
            if slope.vacuous {
                "no nearby graph point has slightly positive displacement; the condition holds vacuously"
            } else {
                "strict outer slope of the graph displacement"
            },
        ));
    } else {
        hyps.push(HypothesisStatus::fails(
            "vi",
            format!(
                "strict outer slope of the graph displacement degenerates: {:.3e} < floor {:.1e}",
                slope.value, cfg.slope_floor
            ),
            None,
        ));
    }

    let all_ok = !hyps.iter().any(|h| h.status == Status::Fails);
    let bound = if all_ok {
        Some((ell_f + ell_cap_f) / slope.value)
    } else {
        None
    };

    let (oracle, verdict_detail) = match bound {
        None => (None, None),
        Some(b) => {
            let handle = MapHandle::Grid {
                prob,
                x_region: prob.x_region.clone(),
                resolution: cfg.x_resolution,
                tol: cfg.solve_tol,
            };
            let est = empirical_modulus(
                &handle,
                ModulusKind::Calm { delta: cfg.delta },
                prob.p_ref().coords(),
                prob.x_ref().coords(),
                &cfg.ladder,
                &prob.p_metric,
                &prob.x_metric,
            )?;
            let v = verdict_compare(b, &est, cfg.validation_slack);
            (Some(est), Some(v))
        }
    };

    Ok(CalmReport {
        hypotheses: hyps,
        ell_f,
        ell_cap_f,
        slope,
        bound,
        oracle,
        verdict_detail,
    })
}

// ---------------------------------------------------------------------------
// coderivative calmness criterion (null base)
// ---------------------------------------------------------------------------

/// Report of the coderivative calmness criterion for `0 ∈ F(p,x)`.
#[derive(Clone, Debug)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct CoderivCalmReport {
    pub hypotheses: Vec<HypothesisStatus>,
    pub c_estimate: SlopeEstimate,
    pub calm: bool,
    pub oracle: Option<EmpiricalEstimate>,
}

impl CoderivCalmReport {
    pub fn verdict(&self) -> VerdictKind {
        if self.hypotheses.iter().any(|h| h.status == Status::Fails) {
            VerdictKind::Fail
        } else if self.calm {
            VerdictKind::Pass
        } else {
            VerdictKind::Fail
        }
    }
}

/// Calmness criterion through the coderivative nondegeneracy constant
/// `c[F(p̄,·)](x̄,0) > 0`; gives a calmness verdict without a modulus bound
/// and cross-checks that the empirical modulus is finite.
pub fn check_calm_coderivative(
    prob: &GenEqProblem,
    cfg: &StabilityConfig,
) -> Result<CoderivCalmReport> {
    if !prob.base.is_null() {
        return Err(Error::ContractViolation(
            "the coderivative criterion requires the null base 0 ∈ F(p,x)".into(),
        ));
    }
    let mut hyps = Vec::new();
    hyps.push(HypothesisStatus::holds(
        "i",
        None,
        "finite-dimensional spaces satisfy the dual-space hypotheses trivially",
    ));
    hyps.push(HypothesisStatus::evidence(
        "ii",
        "graph representation is closed by construction".into(),
    ));
    let uniform = estimate_perturbation_constants(prob, PerturbationMode::Uniform, cfg)?;
    if uniform.field.trend == Trend::Diverging {
        hyps.push(HypothesisStatus::fails(
            "iii",
            "the field inclusion constant diverges".into(),
            uniform.field.witness.clone(),
        ));
    } else {
        hyps.push(HypothesisStatus::holds(
            "iii",
            Some(uniform.field.value),
            "uniform field inclusion constant",
        ));
    }

    let c_est = c_constant(prob, &cfg.schedule)?;
    let positive = c_est.value >= cfg.slope_floor;
    if positive {
        hyps.push(HypothesisStatus::holds(
            "iv",
            Some(c_est.value),
            if c_est.vacuous {
                "no qualifying coderivative elements exist; the infimum over the empty set is +∞"
            } else {
                "coderivative nondegeneracy constant"
            },
        ));
    } else {
        hyps.push(HypothesisStatus::fails(
            "iv",
            format!(
                "coderivative constant degenerates: {:.3e} < floor {:.1e}",
                c_est.value, cfg.slope_floor
            ),
            None,
        ));
    }

    let calm = !hyps.iter().any(|h| h.status == Status::Fails);
    let oracle = if calm {
        let handle = MapHandle::Grid {
            prob,
            x_region: prob.x_region.clone(),
            resolution: cfg.x_resolution,
            tol: cfg.solve_tol,
        };
        let est = empirical_modulus(
            &handle,
            ModulusKind::Calm { delta: cfg.delta },
            prob.p_ref().coords(),
            prob.x_ref().coords(),
            &cfg.ladder,
            &prob.p_metric,
            &prob.x_metric,
        )?;
        Some(est)
    } else {
        None
    };
    let calm = calm
        && oracle
            .as_ref()
            .map_or(true, |o| o.trend != Trend::Diverging);

    Ok(CoderivCalmReport {
        hypotheses: hyps,
        c_estimate: c_est,
        calm,
        oracle,
    })
}

// ---------------------------------------------------------------------------
// smooth-base calmness criterion
// ---------------------------------------------------------------------------

/// Per-level outcome of the smooth-base criterion sweep.
#[derive(Clone, Debug)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct SmoothBaseLevel {
    pub epsilon: f64,
    pub qualifying: usize,
    /// `min over qualifying of σ_min(J*) − (1+γ)·outer_norm − γ`.
    #[cfg_attr(feature = "serde", serde(serialize_with = "crate::serde_ext::ser_ext"))]
    pub min_margin: ExtReal,
    pub passed: bool,
}

/// Report of the smooth-base calmness criterion.
#[derive(Clone, Debug)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct SmoothBaseReport {
    pub gamma: f64,
    pub levels: Vec<SmoothBaseLevel>,
    pub holds: bool,
    pub witness: Option<Vec<f64>>,
}

impl SmoothBaseReport {
    pub fn verdict(&self) -> VerdictKind {
        if self.holds {
            VerdictKind::Pass
        } else {
            VerdictKind::Fail
        }
    }
}

/// Calmness criterion for a smooth base: at qualifying graph points the
/// smallest adjoint singular value of the state Jacobian must strictly
/// dominate `(1+γ)·‖D̂*F(p̄,·)(x,y)‖₊ + γ`.
pub fn check_calm_smooth_base(
    prob: &GenEqProblem,
    gamma: f64,
    cfg: &StabilityConfig,
) -> Result<SmoothBaseReport> {
    if !prob.base.has_jacobian() {
        return Err(Error::Unsupported(
            "the smooth-base criterion requires an x-Jacobian evaluator".into(),
        ));
    }
    let graph = prob.field_graph().ok_or_else(|| {
        Error::Unsupported("the smooth-base criterion requires a graph representation".into())
    })?;
    if !(gamma > 0.0) {
        return Err(Error::ContractViolation(format!(
            "γ must be positive, got {gamma}"
        )));
    }
    let dim_x = prob.dim_x();
    let p_bar = prob.p_ref().coords();
    let xy = prob.xy_metric();
    let mut center = prob.x_ref().coords().to_vec();
    center.extend_from_slice(prob.y_ref().coords());
    let mut stream = LdStream::new(center.len(), cfg.schedule.seed ^ 0x44);
    let mut levels = Vec::new();
    let mut witness: Option<Vec<f64>> = None;
    let mut holds = false;
    for eps in cfg.schedule.radii() {
        let raw = ball_points(&center, eps, 4 * cfg.schedule.samples_per_level, &xy, &mut stream);
        let mut qualifying = 0usize;
        let mut min_margin = INF;
        let mut level_witness = None;
        for z in raw {
            let Ok(w) = graph.attach(&z, dim_x) else { continue };
            let (wx, wy) = w.split_at(dim_x);
            if euclid(wx, prob.x_ref().coords()) > eps
                || prob.y_metric.dist(wy, prob.y_ref().coords()) > eps
            {
                continue;
            }
            let fx = prob.base.eval(p_bar, wx);
            let gap = prob.y_metric.dist(&fx, wy);
            if gap <= 10.0 * prob.tol_feas || gap > eps {
                continue;
            }
            qualifying += 1;
            let jac = prob.base.jacobian_x(p_bar, wx).unwrap();
            let sigma = min_singular_value_adjoint(&jac);
            let cone = graph_normal_cone(graph, &w, dim_x, prob.tol_feas)?;
            let outer = outer_norm_from_cone(&cone, dim_x, prob.dim_y())?;
            let margin = sigma - (1.0 + gamma) * outer - gamma;
            if margin < min_margin {
                min_margin = margin;
                level_witness = Some(w.clone());
            }
        }
        let passed = min_margin > 0.0 || qualifying == 0;
        if passed {
            holds = true;
        } else if witness.is_none() {
            witness = level_witness.clone();
        }
        levels.push(SmoothBaseLevel {
            epsilon: eps,
            qualifying,
            min_margin,
            passed,
        });
    }
    // sustained failure across all levels loses the criterion; a failing
    // witness is only kept when no level passed
    if holds {
        witness = None;
    }
    Ok(SmoothBaseReport {
        gamma,
        levels,
        holds,
        witness,
    })
}

fn outer_norm_from_cone(
    cone: &crate::dual::ConeRep,
    dim_x: usize,
    dim_y: usize,
) -> Result<ExtReal> {
    if dim_y == 1 {
        let mut sup = 0.0_f64;
        for ys in [[1.0], [-1.0]] {
            sup = sup.max(cone_slice(cone, dim_x, &ys)?.max_norm());
        }
        Ok(sup)
    } else {
        let mut stream = LdStream::new(dim_y, 7);
        let mut sup = 0.0_f64;
        for _ in 0..128 {
            let ys = stream.next_direction();
            sup = sup.max(cone_slice(cone, dim_x, &ys)?.max_norm());
        }
        Ok(sup)
    }
}

// ---------------------------------------------------------------------------
// descent tracker
// ---------------------------------------------------------------------------

/// Configuration of the descent tracker.
#[derive(Clone, Debug)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct TrackerConfig {
    /// Descent threshold: a step to `z` is accepted only when
    /// `ψ(p,z) ≤ ψ(p,x) − c·d(z,x)`.
    pub c: f64,
    /// Initial step size; defaults to half the tracking ball radius.
    pub step_init: Option<f64>,
    pub step_decay: f64,
    /// Steps never shrink below this floor.
    pub step_floor: f64,
    pub max_iters: usize,
    pub tol_solution: f64,
    /// Radius of the ball around `x̄` the tracker may explore; defaults to
    /// half the search-region radius.
    pub delta_star: Option<f64>,
    pub seed: u64,
}

impl TrackerConfig {
    pub fn standard(c: f64, seed: u64) -> Self {
        TrackerConfig {
            c,
            step_init: None,
            step_decay: 0.5,
            step_floor: 1e-8,
            max_iters: 20_000,
            tol_solution: 5e-9,
            delta_star: None,
            seed,
        }
    }

    fn validate(&self) -> Result<()> {
        if !(self.c > 0.0) {
            return Err(Error::ContractViolation(format!(
                "tracker descent threshold must be positive, got {}",
                self.c
            )));
        }
        if self.step_floor < 1e-8 {
            return Err(Error::ContractViolation(format!(
                "step floor must stay at or above 1e-8, got {:e}",
                self.step_floor
            )));
        }
        if !(self.step_decay > 0.0 && self.step_decay < 1.0) {
            return Err(Error::ContractViolation(format!(
                "step decay must lie in (0,1), got {}",
                self.step_decay
            )));
        }
        Ok(())
    }
}

/// Certificate of a successful tracker run.
#[derive(Clone, Debug)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct TrackCertificate {
    pub x_hat: Vec<f64>,
    pub psi: f64,
    pub iterations: usize,
    /// `d(x̂, x̄)`.
    pub distance: f64,
    /// `(l_f + l_F)/c · d(p,p̄)` recomputed from pointwise constants.
    #[cfg_attr(feature = "serde", serde(serialize_with = "crate::serde_ext::ser_ext"))]
    pub lambda_bound: ExtReal,
    pub distance_ok: bool,
    pub trace: Vec<TrackStep>,
}

/// Tracks a solution of the generalized equation at parameter `p` by
/// steepest-descent-with-threshold on `ψ(p,·)` starting from `x̄`: a step is
/// accepted only when it decreases `ψ` by at least `c` times the step
/// length, mirroring the variational descent argument behind the
/// quantitative bound. The certificate records whether the solution lands
/// within `(l_f+l_F)/c · d(p,p̄)` of `x̄`.
pub fn ekeland_track(
    prob: &GenEqProblem,
    p: &[f64],
    cfg_track: &TrackerConfig,
    cfg: &StabilityConfig,
) -> Result<TrackCertificate> {
    cfg_track.validate()?;
    if !prob.p_region.contains(p, 1e-12) {
        return Err(Error::ContractViolation(
            "tracked parameter lies outside the declared search region".into(),
        ));
    }
    let x_bar = prob.x_ref().coords();
    let delta_star = cfg_track
        .delta_star
        .unwrap_or_else(|| prob.x_region.radius() / 2.0);
    let mut x = x_bar.to_vec();
    let mut psi = prob.displacement(p, &x)?;
    let mut step = cfg_track.step_init.unwrap_or(delta_star / 2.0);
    let mut trace = vec![TrackStep {
        iteration: 0,
        psi,
        distance: 0.0,
    }];
    let dim = prob.dim_x();
    let mut stream = LdStream::new(dim, cfg_track.seed);
    let mut iter = 0usize;

    while psi > cfg_track.tol_solution && iter < cfg_track.max_iters {
        iter += 1;
        // candidate directions: axes plus a few low-discrepancy ones
        let mut dirs = axis_dirs(dim);
        for _ in 0..(2 * dim) {
            dirs.push(stream.next_direction());
        }
        let mut best: Option<(f64, Vec<f64>)> = None;
        for dir in &dirs {
            for tau in [1.0, 0.5, 0.25, 0.125, 0.0625] {
                let z: Vec<f64> = x
                    .iter()
                    .zip(dir)
                    .map(|(xi, di)| xi + step * tau * di)
                    .collect();
                if prob.x_metric.dist(&z, x_bar) > delta_star
                    || !prob.x_region.contains(&z, 1e-12)
                {
                    continue;
                }
                let d = prob.x_metric.dist(&z, &x);
                if d <= 0.0 {
                    continue;
                }
                let pz = prob.displacement(p, &z)?;
                if pz <= psi - cfg_track.c * d {
                    let improvement = psi - pz;
                    if best
                        .as_ref()
                        .map_or(true, |(bi, _)| improvement > *bi)
                    {
                        best = Some((improvement, z));
                    }
                }
            }
        }
        match best {
            Some((_, z)) => {
                psi = prob.displacement(p, &z)?;
                x = z;
                trace.push(TrackStep {
                    iteration: iter,
                    psi,
                    distance: prob.x_metric.dist(&x, x_bar),
                });
            }
            None => {
                if step <= cfg_track.step_floor {
                    break;
                }
                step = (step * cfg_track.step_decay).max(cfg_track.step_floor);
            }
        }
    }

    if psi > cfg_track.tol_solution {
        return Err(Error::NoSolutionFound {
            final_psi: psi,
            trace,
        });
    }

    // certificate: distance bound from pointwise constants at scale d(p,p̄)
    let dp = prob.p_metric.dist(p, prob.p_ref().coords());
    let lambda_bound = if dp > 0.0 {
        let mut c2 = cfg.clone();
        c2.ladder = ScaleLadder::new(dp.max(1e-6), 0.5, 8)?;
        let pointwise =
            estimate_perturbation_constants(prob, PerturbationMode::Pointwise, &c2)?;
        (pointwise.base.value + pointwise.field.value) / cfg_track.c * dp
    } else {
        0.0
    };
    let distance = prob.x_metric.dist(&x, x_bar);
    let distance_ok = distance <= lambda_bound + 1e-9 * (1.0 + lambda_bound);
    Ok(TrackCertificate {
        x_hat: x,
        psi,
        iterations: iter,
        distance,
        lambda_bound,
        distance_ok,
        trace,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geneq::{BaseFn, FieldFn, GraphRep};
    use crate::metric::{ClosedSetRep, RealVector};
    use alloc::sync::Arc;

    fn region1(a: f64, b: f64) -> Region {
        Region::new(vec![a], vec![b]).unwrap()
    }

    fn affine_tracking() -> GenEqProblem {
        let base = BaseFn::new(1, 1, 1, |p, x| vec![x[0] - p[0]])
            .with_jacobian_x(|_, _| vec![vec![1.0]]);
        let field = FieldFn::constant(1, 1, ClosedSetRep::zero(1));
        GenEqProblem::new(
            base,
            field,
            RealVector::scalar(0.0).unwrap(),
            RealVector::scalar(0.0).unwrap(),
            region1(-1.0, 1.0),
            region1(-1.5, 1.5),
            region1(-2.0, 2.0),
            crate::TOL_FEAS,
        )
        .unwrap()
        .with_field_graph(GraphRep::Set(ClosedSetRep::CartesianProduct(vec![
            ClosedSetRep::all(1),
            ClosedSetRep::zero(1),
        ])))
    }

    fn bilinear_field() -> GenEqProblem {
        let base = BaseFn::zero(1, 1, 1);
        let field = FieldFn::new(1, 1, 1, |p, x| ClosedSetRep::AbsComplement {
            radius: (p[0] * x[0]).abs(),
        });
        GenEqProblem::new(
            base,
            field,
            RealVector::scalar(0.0).unwrap(),
            RealVector::scalar(0.0).unwrap(),
            region1(-1.0, 1.0),
            region1(-1.0, 1.0),
            region1(-2.0, 2.0),
            crate::TOL_FEAS,
        )
        .unwrap()
        .with_field_graph(GraphRep::Set(ClosedSetRep::all(2)))
    }

    /// `f(p,x) = x`, `F(p,x) = {y : y ≥ √|p|}` — the recast square-root
    /// epigraph, which is not Lipschitz lower semicontinuous at (0,0).
    fn sqrt_epigraph_ge() -> GenEqProblem {
        let base = BaseFn::new(1, 1, 1, |_, x| vec![x[0]]);
        let field = FieldFn::new(1, 1, 1, |p, _| {
            ClosedSetRep::halfline_ge(p[0].abs().sqrt())
        });
        GenEqProblem::new(
            base,
            field,
            RealVector::scalar(0.0).unwrap(),
            RealVector::scalar(0.0).unwrap(),
            region1(-1.0, 1.0),
            region1(-1.0, 2.0),
            region1(-2.0, 2.0),
            crate::TOL_FEAS,
        )
        .unwrap()
    }

    #[test]
    fn pointwise_constants_affine_tracking() {
        let prob = affine_tracking();
        let cfg = StabilityConfig::standard(3);
        let pc =
            estimate_perturbation_constants(&prob, PerturbationMode::Pointwise, &cfg).unwrap();
        assert!((pc.base.value - 1.0).abs() <= 1e-9, "l_f = {}", pc.base.value);
        assert!(pc.field.value.abs() <= 1e-9, "l_F = {}", pc.field.value);
    }

    #[test]
    fn uniform_constants_bilinear_vanish() {
        let prob = bilinear_field();
        let cfg = StabilityConfig::standard(5);
        let pc =
            estimate_perturbation_constants(&prob, PerturbationMode::Uniform, &cfg).unwrap();
        assert_eq!(pc.base.value, 0.0);
        assert_eq!(pc.field.value, 0.0);
    }

    #[test]
    fn pointwise_constants_detect_sqrt_divergence() {
        // f(p,x) = x − √|p|, F ≡ {0}: the base constant diverges
        let base = BaseFn::new(1, 1, 1, |p, x| vec![x[0] - p[0].abs().sqrt()]);
        let field = FieldFn::constant(1, 1, ClosedSetRep::zero(1));
        let prob = GenEqProblem::new(
            base,
            field,
            RealVector::scalar(0.0).unwrap(),
            RealVector::scalar(0.0).unwrap(),
            region1(-1.0, 1.0),
            region1(-1.0, 1.0),
            region1(-2.0, 2.0),
            crate::TOL_FEAS,
        )
        .unwrap();
        let cfg = StabilityConfig::standard(7);
        let pc =
            estimate_perturbation_constants(&prob, PerturbationMode::Pointwise, &cfg).unwrap();
        assert_eq!(pc.base.trend, Trend::Diverging);
        assert_eq!(pc.base.value, INF);
    }

    #[test]
    fn check_liplsc_affine_tracking_bound_one() {
        let prob = affine_tracking();
        let cfg = StabilityConfig::standard(11);
        let rep = check_liplsc(&prob, &cfg).unwrap();
        assert_eq!(rep.verdict(), VerdictKind::Pass, "report {:?}", rep.hypotheses);
        let b = rep.bound.unwrap();
        assert!((b - 1.0).abs() <= 0.07, "bound {b}");
        let v = rep.validation.unwrap();
        assert!(v.passed);
        assert!((v.empirical_constant - 1.0).abs() <= 0.07, "empirical {}", v.empirical_constant);
    }

    #[test]
    fn check_liplsc_sqrt_epigraph_fails_iii() {
        let prob = sqrt_epigraph_ge();
        let cfg = StabilityConfig::standard(13);
        let rep = check_liplsc(&prob, &cfg).unwrap();
        assert_eq!(rep.verdict(), VerdictKind::Fail);
        let h3 = rep.hypotheses.iter().find(|h| h.id == "iii").unwrap();
        assert_eq!(h3.status, Status::Fails);
        assert!(h3.witness.is_some());
        assert!(rep.bound.is_none());
    }

    #[test]
    fn check_liplsc_bilinear_fails_vi() {
        let prob = bilinear_field();
        let cfg = StabilityConfig::standard(17);
        let rep = check_liplsc(&prob, &cfg).unwrap();
        let h6 = rep.hypotheses.iter().find(|h| h.id == "vi").unwrap();
        assert_eq!(h6.status, Status::Fails, "slope {:?}", rep.slope.value);
    }

    #[test]
    fn check_calm_bilinear_bound_zero() {
        let prob = bilinear_field();
        let cfg = StabilityConfig::standard(19);
        let rep = check_calm(&prob, &cfg).unwrap();
        assert_eq!(rep.verdict(), VerdictKind::Pass, "hyps {:?}", rep.hypotheses);
        assert!((rep.slope.value - 1.0).abs() <= 0.05, "slope {}", rep.slope.value);
        assert_eq!(rep.ell_f, 0.0);
        assert_eq!(rep.ell_cap_f, 0.0);
        assert_eq!(rep.bound.unwrap(), 0.0);
        let oracle = rep.oracle.as_ref().unwrap();
        assert!(oracle.value <= 1e-9, "oracle modulus {}", oracle.value);
    }

    #[test]
    fn check_calm_affine_tracking_bound_one() {
        let prob = affine_tracking();
        let cfg = StabilityConfig::standard(23);
        let rep = check_calm(&prob, &cfg).unwrap();
        assert_eq!(rep.verdict(), VerdictKind::Pass, "hyps {:?}", rep.hypotheses);
        assert!((rep.slope.value - 1.0).abs() <= 0.05);
        assert!((rep.ell_f - 1.0).abs() <= 1e-9);
        assert_eq!(rep.ell_cap_f, 0.0);
        let b = rep.bound.unwrap();
        assert!((b - 1.0).abs() <= 0.06, "bound {b}");
        let oracle = rep.oracle.as_ref().unwrap();
        assert!((oracle.value - 1.0).abs() <= 0.05, "oracle {}", oracle.value);
    }

    #[test]
    fn check_calm_degenerate_parabola_fails_vi() {
        // f ≡ 0, F(x) = {y: y ≤ −x²}: G = {0}; the displacement slope
        // degenerates along the boundary, so (vi) fails and no bound exists
        let base = BaseFn::zero(1, 1, 1);
        let field = FieldFn::new(1, 1, 1, |_, x| ClosedSetRep::Box {
            lo: vec![f64::NEG_INFINITY],
            hi: vec![-x[0] * x[0]],
        });
        let prob = GenEqProblem::new(
            base,
            field,
            RealVector::scalar(0.0).unwrap(),
            RealVector::scalar(0.0).unwrap(),
            region1(-1.0, 1.0),
            region1(-1.0, 1.0),
            region1(-2.0, 2.0),
            crate::TOL_FEAS,
        )
        .unwrap()
        .with_field_graph(GraphRep::smooth_boundary(
            |x| -x[0] * x[0],
            |x| vec![-2.0 * x[0]],
            false,
        ));
        let cfg = StabilityConfig::standard(29);
        let rep = check_calm(&prob, &cfg).unwrap();
        let h6 = rep.hypotheses.iter().find(|h| h.id == "vi").unwrap();
        assert_eq!(h6.status, Status::Fails, "slope {}", rep.slope.value);
        assert!(rep.bound.is_none());
    }

    #[test]
    fn coderivative_calm_bilinear() {
        let prob = bilinear_field();
        let cfg = StabilityConfig::standard(31);
        let rep = check_calm_coderivative(&prob, &cfg).unwrap();
        assert!(rep.calm);
        assert_eq!(rep.c_estimate.value, INF);
        assert!(rep.c_estimate.vacuous);
        let oracle = rep.oracle.as_ref().unwrap();
        assert!(oracle.value <= 1e-9);
        assert_eq!(rep.verdict(), VerdictKind::Pass);
    }

    #[test]
    fn smooth_base_criterion_examples() {
        let cfg = StabilityConfig::standard(37);
        // f(p,x) = 2x, F ≡ {0}: σ = 2, outer norm 0, so 2 > γ holds
        let base = BaseFn::new(1, 1, 1, |_, x| vec![2.0 * x[0]])
            .with_jacobian_x(|_, _| vec![vec![2.0]]);
        let field = FieldFn::constant(1, 1, ClosedSetRep::zero(1));
        let prob = GenEqProblem::new(
            base,
            field,
            RealVector::scalar(0.0).unwrap(),
            RealVector::scalar(0.0).unwrap(),
            region1(-1.0, 1.0),
            region1(-1.0, 1.0),
            region1(-2.0, 2.0),
            crate::TOL_FEAS,
        )
        .unwrap()
        .with_field_graph(GraphRep::Set(ClosedSetRep::CartesianProduct(vec![
            ClosedSetRep::all(1),
            ClosedSetRep::zero(1),
        ])));
        let rep = check_calm_smooth_base(&prob, 0.5, &cfg).unwrap();
        assert!(rep.holds, "levels {:?}", rep.levels);

        // f(p,x) = x², F ≡ {0}: σ = 2|x| → 0 fails for every γ
        let base2 = BaseFn::new(1, 1, 1, |_, x| vec![x[0] * x[0]])
            .with_jacobian_x(|_, x| vec![vec![2.0 * x[0]]]);
        let field2 = FieldFn::constant(1, 1, ClosedSetRep::zero(1));
        let prob2 = GenEqProblem::new(
            base2,
            field2,
            RealVector::scalar(0.0).unwrap(),
            RealVector::scalar(0.0).unwrap(),
            region1(-1.0, 1.0),
            region1(-1.0, 1.0),
            region1(-2.0, 2.0),
            crate::TOL_FEAS,
        )
        .unwrap()
        .with_field_graph(GraphRep::Set(ClosedSetRep::CartesianProduct(vec![
            ClosedSetRep::all(1),
            ClosedSetRep::zero(1),
        ])));
        let rep2 = check_calm_smooth_base(&prob2, 0.1, &cfg).unwrap();
        assert!(!rep2.holds, "levels {:?}", rep2.levels);
        assert!(rep2.witness.is_some());

        // f(p,x) = x, F(p,x) = {y: y ≥ x/2}, γ = 0.1: 1 > 1.1·0.5 + 0.1
        let base3 = BaseFn::new(1, 1, 1, |_, x| vec![x[0]])
            .with_jacobian_x(|_, _| vec![vec![1.0]]);
        let field3 = FieldFn::new(1, 1, 1, |_, x| ClosedSetRep::halfline_ge(x[0] / 2.0));
        let prob3 = GenEqProblem::new(
            base3,
            field3,
            RealVector::scalar(0.0).unwrap(),
            RealVector::scalar(0.0).unwrap(),
            region1(-1.0, 1.0),
            region1(-1.0, 1.0),
            region1(-2.0, 2.0),
            crate::TOL_FEAS,
        )
        .unwrap()
        .with_field_graph(GraphRep::Set(ClosedSetRep::HalfspaceIntersection(vec![
            crate::metric::Halfspace {
                normal: vec![0.5, -1.0],
                offset: 0.0,
            },
        ])));
        let rep3 = check_calm_smooth_base(&prob3, 0.1, &cfg).unwrap();
        assert!(rep3.holds, "levels {:?}", rep3.levels);
    }

    #[test]
    fn tracker_affine() {
        let prob = affine_tracking();
        let cfg = StabilityConfig::standard(41);
        let track = TrackerConfig::standard(0.9, 41);
        let cert = ekeland_track(&prob, &[0.5], &track, &cfg).unwrap();
        assert!((cert.x_hat[0] - 0.5).abs() <= 1e-6, "x̂ = {:?}", cert.x_hat);
        assert!(cert.psi <= 1e-8);
        assert!(cert.distance_ok, "d = {}, λ = {}", cert.distance, cert.lambda_bound);
    }

    #[test]
    fn tracker_zero_iterations_at_solution() {
        let prob = bilinear_field();
        let cfg = StabilityConfig::standard(43);
        let track = TrackerConfig::standard(0.5, 43);
        // ψ(0.2, 0) = 0 already
        let cert = ekeland_track(&prob, &[0.2], &track, &cfg).unwrap();
        assert_eq!(cert.iterations, 0);
        assert_eq!(cert.x_hat, vec![0.0]);
    }

    #[test]
    fn tracker_cubic_root() {
        // f(p,x) = x³ − p, F ≡ {0}, p = 0.008 → x̂ = 0.2
        let base = BaseFn::new(1, 1, 1, |p, x| vec![x[0] * x[0] * x[0] - p[0]]);
        let field = FieldFn::constant(1, 1, ClosedSetRep::zero(1));
        let prob = GenEqProblem::new(
            base,
            field,
            RealVector::scalar(0.0).unwrap(),
            RealVector::scalar(0.0).unwrap(),
            region1(-1.0, 1.0),
            region1(-1.0, 1.0),
            region1(-2.0, 2.0),
            crate::TOL_FEAS,
        )
        .unwrap();
        let cfg = StabilityConfig::standard(47);
        let track = TrackerConfig::standard(0.01, 47);
        let cert = ekeland_track(&prob, &[0.008], &track, &cfg).unwrap();
        assert!((cert.x_hat[0] - 0.2).abs() <= 1e-3, "x̂ = {:?}", cert.x_hat);
        assert!(cert.psi <= 1e-8);
    }

    #[test]
    fn tracker_rejects_bad_config() {
        let prob = affine_tracking();
        let cfg = StabilityConfig::standard(53);
        let mut track = TrackerConfig::standard(0.9, 53);
        track.c = 0.0;
        assert!(matches!(
            ekeland_track(&prob, &[0.5], &track, &cfg),
            Err(Error::ContractViolation(_))
        ));
        let mut track2 = TrackerConfig::standard(0.9, 53);
        track2.step_floor = 1e-12;
        assert!(matches!(
            ekeland_track(&prob, &[0.5], &track2, &cfg),
            Err(Error::ContractViolation(_))
        ));
    }

    #[test]
    fn tracker_reports_no_solution_with_trace() {
        // F(p,x) = {y: |y| ≥ 1} with f ≡ 0 has no solution anywhere near p,
        // and ψ ≡ 1 admits no descent
        let base = BaseFn::zero(1, 1, 1);
        let field = FieldFn::new(1, 1, 1, |_, _| ClosedSetRep::AbsComplement {
            radius: 1.0,
        });
        // feasible reference requires a different construction: use a field
        // that is solvable only at p̄ = 0
        let field_at_ref = FieldFn::new(1, 1, 1, move |p, x| {
            if p[0] == 0.0 && x[0] == 0.0 {
                ClosedSetRep::zero(1)
            } else {
                field.eval(p, x)
            }
        });
        let prob = GenEqProblem::new(
            base,
            field_at_ref,
            RealVector::scalar(0.0).unwrap(),
            RealVector::scalar(0.0).unwrap(),
            region1(-1.0, 1.0),
            region1(-1.0, 1.0),
            region1(-2.0, 2.0),
            crate::TOL_FEAS,
        )
        .unwrap();
        let cfg = StabilityConfig::standard(59);
        let track = TrackerConfig {
            max_iters: 500,
            ..TrackerConfig::standard(0.9, 59)
        };
        match ekeland_track(&prob, &[0.5], &track, &cfg) {
            Err(Error::NoSolutionFound { final_psi, trace }) => {
                assert!(final_psi > 0.5);
                assert!(!trace.is_empty());
            }
            other => panic!("expected NoSolutionFound, got {other:?}"),
        }
    }

    #[test]
    fn smooth_family_member_reports() {
        // f(p,x) = a·x − b·p, F ≡ {0}: slope a, ℓ_f = b, bound b/a
        for (a, b) in [(2.0, 1.0), (1.0, 1.0), (3.0, 2.0)] {
            let base = BaseFn::new(1, 1, 1, move |p, x| vec![a * x[0] - b * p[0]])
                .with_jacobian_x(move |_, _| vec![vec![a]]);
            let field = FieldFn::constant(1, 1, ClosedSetRep::zero(1));
            let prob = GenEqProblem::new(
                base,
                field,
                RealVector::scalar(0.0).unwrap(),
                RealVector::scalar(0.0).unwrap(),
                region1(-1.0, 1.0),
                region1(-1.5, 1.5),
                region1(-4.0, 4.0),
                crate::TOL_FEAS,
            )
            .unwrap()
            .with_field_graph(GraphRep::Set(ClosedSetRep::CartesianProduct(vec![
                ClosedSetRep::all(1),
                ClosedSetRep::zero(1),
            ])));
            let cfg = StabilityConfig::standard(61);
            let lip = check_liplsc(&prob, &cfg).unwrap();
            assert_eq!(lip.verdict(), VerdictKind::Pass, "a={a} b={b}");
            let bound = lip.bound.unwrap();
            assert!(
                (bound - b / a).abs() <= 0.05 * (b / a) + 0.02,
                "a={a} b={b}: bound {bound}"
            );
            let calm = check_calm(&prob, &cfg).unwrap();
            assert_eq!(calm.verdict(), VerdictKind::Pass, "a={a} b={b}");
        }
    }

    #[test]
    fn liplsc_validation_rows_respect_allowance() {
        let prob = affine_tracking();
        let cfg = StabilityConfig::standard(67);
        let rep = check_liplsc(&prob, &cfg).unwrap();
        let v = rep.validation.unwrap();
        for (dp, dist, allowance) in &v.rows {
            assert!(dist <= allowance, "dp={dp}: {dist} > {allowance}");
        }
    }

    #[test]
    fn field_usc_failure_detected() {
        // F(p,x) jumps up at x ≠ 0: not u.s.c. at 0
        let base = BaseFn::zero(1, 1, 1);
        let field = FieldFn::new(1, 1, 1, |_, x| {
            if x[0].abs() < 1e-15 {
                ClosedSetRep::zero(1)
            } else {
                ClosedSetRep::halfline_ge(0.0)
            }
        });
        let prob = GenEqProblem::new(
            base,
            field,
            RealVector::scalar(0.0).unwrap(),
            RealVector::scalar(0.0).unwrap(),
            region1(-1.0, 1.0),
            region1(-1.0, 1.0),
            region1(-2.0, 2.0),
            crate::TOL_FEAS,
        )
        .unwrap();
        let cfg = StabilityConfig::standard(71);
        let status = sampled_field_usc(&prob, &cfg);
        assert_eq!(status.status, Status::Fails, "{}", status.note);
    }

    #[test]
    fn reports_are_deterministic() {
        let cfg = StabilityConfig::standard(73);
        let r1 = check_calm(&affine_tracking(), &cfg).unwrap();
        let r2 = check_calm(&affine_tracking(), &cfg).unwrap();
        assert_eq!(r1.bound, r2.bound);
        assert_eq!(r1.slope.per_level, r2.slope.per_level);
        assert_eq!(
            r1.oracle.as_ref().unwrap().scale_trace,
            r2.oracle.as_ref().unwrap().scale_trace
        );
        let _ = Arc::new(());
    }
}
