//! Brute-force empirical estimators of stability moduli: Lipschitz lower
//! semicontinuity, calmness, upper Lipschitz continuity and Aubin
//! continuity, evaluated on explicit parameter ladders with divergence
//! detection.
//!
//! These estimators are the independent ground truth against which every
//! theoretical bound is validated. Divergence is declared from sustained
//! growth across geometric scales, never from a single large quotient, so
//! coarse grids are not mistaken for unbounded moduli.

use alloc::format;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;

use crate::geneq::GenEqProblem;
use crate::metric::{ClosedSetRep, GridSpec, MetricSpec, RealVector, Region};
use crate::{Error, ExtReal, Result, INF};

/// A set-valued mapping the oracle can evaluate: either the grid-enumerated
/// solution mapping of a generalized equation, or an exact formula handle.
pub enum MapHandle<'a> {
    Grid {
        prob: &'a GenEqProblem,
        x_region: Region,
        resolution: f64,
        tol: f64,
    },
    Exact {
        map: Arc<dyn Fn(&[f64]) -> ClosedSetRep + Send + Sync>,
        x_region: Region,
        resolution: f64,
    },
}

impl MapHandle<'_> {
    pub fn resolution(&self) -> f64 {
        match self {
            MapHandle::Grid { resolution, .. } => *resolution,
            MapHandle::Exact { resolution, .. } => *resolution,
        }
    }

    /// Distance from `x` to `Φ(p)`; `+∞` when the value is empty.
    fn dist_to_value(&self, p: &[f64], x: &[f64], metric: &MetricSpec) -> Result<ExtReal> {
        match self {
            MapHandle::Grid {
                prob,
                x_region,
                resolution,
                tol,
            } => {
                let grid = GridSpec::new(x_region.clone(), *resolution)?;
                let sol = prob.solve_on_grid(p, &grid, *tol)?;
                Ok(sol.dist_to(x, metric))
            }
            MapHandle::Exact { map, .. } => map(p).dist(x),
        }
    }

    /// Points of `Φ(p)` within the sampling region (grid-materialized).
    fn value_points(&self, p: &[f64]) -> Result<Vec<RealVector>> {
        match self {
            MapHandle::Grid {
                prob,
                x_region,
                resolution,
                tol,
            } => {
                let grid = GridSpec::new(x_region.clone(), *resolution)?;
                Ok(prob.solve_on_grid(p, &grid, *tol)?.solutions)
            }
            MapHandle::Exact {
                map,
                x_region,
                resolution,
            } => {
                let grid = GridSpec::new(x_region.clone(), *resolution)?;
                map(p).sample_grid(&grid, crate::TOL_FEAS)
            }
        }
    }
}

/// Which modulus the oracle estimates.
#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub enum ModulusKind {
    /// `sup_p dist(x̄, Φ(p)) / d(p,p̄)`.
    LipschitzLsc,
    /// `sup_{p, x ∈ Φ(p)∩B(x̄,δ)} dist(x, Φ(p̄)) / d(p,p̄)`.
    Calm { delta: f64 },
    /// Calmness without the state localization.
    UpperLipschitz,
    /// Two-parameter version over pairs `p, p'`.
    Aubin { delta: f64 },
}

/// Geometric ladder of parameter scales `s_k = s₀ ρᵏ` taken along the `±`
/// axis directions of `P`.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct ScaleLadder {
    pub scale0: f64,
    pub ratio: f64,
    pub count: usize,
}

impl ScaleLadder {
    pub fn new(scale0: f64, ratio: f64, count: usize) -> Result<Self> {
        if !(scale0 > 0.0 && scale0.is_finite()) || !(ratio > 0.0 && ratio < 1.0) || count < 2
        {
            return Err(Error::ContractViolation(format!(
                "invalid scale ladder ({scale0}, {ratio}, {count})"
            )));
        }
        Ok(ScaleLadder {
            scale0,
            ratio,
            count,
        })
    }

    /// Dyadic ladder starting at 0.64, so the scale 0.01 is hit exactly.
    pub fn standard() -> Self {
        ScaleLadder {
            scale0: 0.64,
            ratio: 0.5,
            count: 12,
        }
    }

    pub fn scales(&self) -> Vec<f64> {
        (0..self.count)
            .map(|k| self.scale0 * num_traits::Float::powi(self.ratio, k as i32))
            .collect()
    }
}

/// Trend of the per-scale quotient trace.
#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub enum Trend {
    /// Quotients settle; the supremum is trusted as finite.
    Stable,
    /// Sustained geometric growth; the modulus is reported as `+∞`.
    Diverging,
    /// Growth over part of the tail; the estimate is not trusted either way.
    Inconclusive,
}

/// Witness of the extremal quotient.
#[derive(Clone, Debug)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct Witness {
    pub p: Vec<f64>,
    pub p2: Option<Vec<f64>>,
    pub x: Option<Vec<f64>>,
    #[cfg_attr(feature = "serde", serde(serialize_with = "crate::serde_ext::ser_ext"))]
    pub quotient: ExtReal,
}

/// Brute-force modulus over the stated grids, with witnesses and the
/// per-scale quotient trace.
#[derive(Clone, Debug)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct EmpiricalEstimate {
    pub kind: ModulusKind,
    #[cfg_attr(feature = "serde", serde(serialize_with = "crate::serde_ext::ser_ext"))]
    pub value: ExtReal,
    pub trend: Trend,
    pub witness: Option<Witness>,
    /// `(scale, max quotient at that scale)`, coarse to fine.
    pub scale_trace: Vec<(f64, ExtReal)>,
    /// State-grid spacing underlying the estimate (discretization slack).
    pub resolution: f64,
}

/// Axis directions `±e_i` of the parameter space.
fn axis_directions(dim: usize) -> Vec<Vec<f64>> {
    let mut out = Vec::with_capacity(2 * dim);
    for i in 0..dim {
        for s in [1.0, -1.0] {
            let mut d = vec![0.0; dim];
            d[i] = s;
            out.push(d);
        }
    }
    out
}

/// Estimates the requested modulus of `Φ` at `(p̄, x̄)` over the ladder.
pub fn empirical_modulus(
    map: &MapHandle<'_>,
    kind: ModulusKind,
    p_bar: &[f64],
    x_bar: &[f64],
    ladder: &ScaleLadder,
    p_metric: &MetricSpec,
    x_metric: &MetricSpec,
) -> Result<EmpiricalEstimate> {
    let scales = ladder.scales();
    let dirs = axis_directions(p_bar.len());
    let mut trace: Vec<(f64, ExtReal)> = Vec::with_capacity(scales.len());
    let mut best: Option<Witness> = None;
    let mut sup: f64 = 0.0;
    let mut saw_infinite = false;

    // the reference value Φ(p̄) is needed by all kinds except liplsc
    let needs_ref = !matches!(kind, ModulusKind::LipschitzLsc);
    let ref_points = if needs_ref {
        let pts = map.value_points(p_bar)?;
        if pts.is_empty() {
            return Err(Error::ContractViolation(
                "Φ(p̄) is empty on the sampling grid; the modulus is undefined".into(),
            ));
        }
        Some(pts)
    } else {
        None
    };
    let dist_to_ref = |x: &[f64]| -> Result<ExtReal> {
        match map {
            MapHandle::Exact { map, .. } => map(p_bar).dist(x),
            MapHandle::Grid { .. } => {
                let pts = ref_points.as_ref().unwrap();
                Ok(pts
                    .iter()
                    .map(|s| x_metric.dist(s.coords(), x))
                    .fold(INF, f64::min))
            }
        }
    };

    match kind {
        ModulusKind::LipschitzLsc => {
            for s in &scales {
                let mut qmax: f64 = 0.0;
                for dir in &dirs {
                    let p: Vec<f64> =
                        p_bar.iter().zip(dir).map(|(c, d)| c + s * d).collect();
                    let dp = p_metric.dist(&p, p_bar);
                    let q = map.dist_to_value(&p, x_bar, x_metric)? / dp;
                    if !q.is_finite() {
                        saw_infinite = true;
                    }
                    if best.as_ref().map_or(true, |w| q > w.quotient) {
                        best = Some(Witness {
                            p: p.clone(),
                            p2: None,
                            x: None,
                            quotient: q,
                        });
                    }
                    qmax = qmax.max(q);
                }
                trace.push((*s, qmax));
                sup = sup.max(qmax);
            }
        }
        ModulusKind::Calm { .. } | ModulusKind::UpperLipschitz => {
            let delta = match kind {
                ModulusKind::Calm { delta } => Some(delta),
                _ => None,
            };
            for s in &scales {
                let mut qmax: f64 = 0.0;
                for dir in &dirs {
                    let p: Vec<f64> =
                        p_bar.iter().zip(dir).map(|(c, d)| c + s * d).collect();
                    let dp = p_metric.dist(&p, p_bar);
                    for x in map.value_points(&p)? {
                        if let Some(d) = delta {
                            if x_metric.dist(x.coords(), x_bar) > d {
                                continue;
                            }
                        }
                        let q = dist_to_ref(x.coords())? / dp;
                        if !q.is_finite() {
                            saw_infinite = true;
                        }
                        if best.as_ref().map_or(true, |w| q > w.quotient) {
                            best = Some(Witness {
                                p: p.clone(),
                                p2: None,
                                x: Some(x.coords().to_vec()),
                                quotient: q,
                            });
                        }
                        qmax = qmax.max(q);
                    }
                }
                trace.push((*s, qmax));
                sup = sup.max(qmax);
            }
        }
        ModulusKind::Aubin { delta } => {
            // parameter grid: p̄ plus the full ladder along every direction
            let mut ps: Vec<Vec<f64>> = vec![p_bar.to_vec()];
            for s in &scales {
                for dir in &dirs {
                    ps.push(p_bar.iter().zip(dir).map(|(c, d)| c + s * d).collect());
                }
            }
            // localized source values and full target values, cached per p
            let mut sources: Vec<Vec<RealVector>> = Vec::with_capacity(ps.len());
            let mut targets: Vec<Vec<RealVector>> = Vec::with_capacity(ps.len());
            for p in &ps {
                let pts = map.value_points(p)?;
                sources.push(
                    pts.iter()
                        .filter(|x| x_metric.dist(x.coords(), x_bar) <= delta)
                        .cloned()
                        .collect(),
                );
                targets.push(pts);
            }
            let mut per_scale: Vec<(f64, f64)> =
                scales.iter().map(|s| (*s, 0.0_f64)).collect();
            for (i, p) in ps.iter().enumerate() {
                for (j, p2) in ps.iter().enumerate() {
                    if i == j {
                        continue;
                    }
                    let dp = p_metric.dist(p, p2);
                    if dp <= 0.0 {
                        continue;
                    }
                    // nearest ladder scale in the geometric sense
                    let slot = scales
                        .iter()
                        .enumerate()
                        .min_by(|(_, a), (_, b)| {
                            let da = (dp / *a).max(*a / dp);
                            let db = (dp / *b).max(*b / dp);
                            da.partial_cmp(&db).unwrap()
                        })
                        .map(|(k, _)| k)
                        .unwrap();
                    let mut qmax: f64 = 0.0;
                    for x in &sources[i] {
                        let dist = match map {
                            MapHandle::Exact { map, .. } => map(p2).dist(x.coords())?,
                            MapHandle::Grid { .. } => targets[j]
                                .iter()
                                .map(|s| x_metric.dist(s.coords(), x.coords()))
                                .fold(INF, f64::min),
                        };
                        let q = dist / dp;
                        if !q.is_finite() {
                            saw_infinite = true;
                        }
                        if best.as_ref().map_or(true, |w| q > w.quotient) {
                            best = Some(Witness {
                                p: p.clone(),
                                p2: Some(p2.clone()),
                                x: Some(x.coords().to_vec()),
                                quotient: q,
                            });
                        }
                        qmax = qmax.max(q);
                    }
                    if qmax > per_scale[slot].1 {
                        per_scale[slot].1 = qmax;
                    }
                }
            }
            for (s, q) in per_scale {
                sup = sup.max(q);
                trace.push((s, q));
            }
        }
    }

    let trend = detect_trend(&trace);
    let diverging = saw_infinite || trend == Trend::Diverging;
    Ok(EmpiricalEstimate {
        kind,
        value: if diverging { INF } else { sup },
        trend: if diverging { Trend::Diverging } else { trend },
        witness: best,
        scale_trace: trace,
        resolution: map.resolution(),
    })
}

/// Divergence is declared only from sustained growth: the quotient must grow
/// by a factor ≥ 1.5 across every 4-scale window in the tail of the trace.
pub(crate) fn detect_trend(trace: &[(f64, ExtReal)]) -> Trend {
    let qs: Vec<f64> = trace.iter().map(|(_, q)| *q).collect();
    let n = qs.len();
    if n < 5 {
        return Trend::Stable;
    }
    let windows = (n - 4).min(4);
    let mut grew = 0usize;
    for w in 0..windows {
        let k0 = n - 5 - w;
        let a = qs[k0];
        let b = qs[k0 + 4];
        if !a.is_finite() || !b.is_finite() {
            return Trend::Diverging;
        }
        if b > (1.5 * a).max(1e-12) {
            grew += 1;
        }
    }
    if grew == windows {
        Trend::Diverging
    } else if grew == 0 {
        Trend::Stable
    } else {
        Trend::Inconclusive
    }
}

/// Outcome of comparing a theoretical bound against the oracle.
#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub enum VerdictKind {
    Pass,
    Fail,
    Undetermined,
}

/// Bound-versus-oracle consistency gate:
/// pass iff `empirical ≤ bound·(1+slack) + spacing`.
#[derive(Clone, Debug)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct VerdictReport {
    pub kind: VerdictKind,
    #[cfg_attr(feature = "serde", serde(serialize_with = "crate::serde_ext::ser_ext"))]
    pub bound: ExtReal,
    #[cfg_attr(feature = "serde", serde(serialize_with = "crate::serde_ext::ser_ext"))]
    pub empirical: ExtReal,
    pub slack: f64,
    pub spacing: f64,
    pub witness: Option<Witness>,
}

pub fn verdict_compare(
    bound: ExtReal,
    empirical: &EmpiricalEstimate,
    slack: f64,
) -> VerdictReport {
    let spacing = empirical.resolution;
    let kind = if empirical.trend == Trend::Inconclusive {
        VerdictKind::Undetermined
    } else if empirical.value <= bound * (1.0 + slack) + spacing {
        VerdictKind::Pass
    } else {
        VerdictKind::Fail
    };
    VerdictReport {
        kind,
        bound,
        empirical: empirical.value,
        slack,
        spacing,
        witness: if kind == VerdictKind::Fail {
            empirical.witness.clone()
        } else {
            None
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::Float;

    fn exact_handle(
        f: impl Fn(&[f64]) -> ClosedSetRep + Send + Sync + 'static,
        lo: f64,
        hi: f64,
        res: f64,
    ) -> MapHandle<'static> {
        MapHandle::Exact {
            map: Arc::new(f),
            x_region: Region::new(vec![lo], vec![hi]).unwrap(),
            resolution: res,
        }
    }

    fn m1() -> MetricSpec {
        MetricSpec::simple(1)
    }

    /// `Φ(p) = {x : x ≥ √|p|}`.
    fn sqrt_epigraph() -> MapHandle<'static> {
        exact_handle(
            |p| ClosedSetRep::halfline_ge(p[0].abs().sqrt()),
            -2.0,
            2.0,
            0.01,
        )
    }

    /// `Φ(0) = [0,∞)`, `Φ(p) = (−∞,−1] ∪ {0}` otherwise.
    fn halfline_jump() -> MapHandle<'static> {
        exact_handle(
            |p| {
                if p[0] == 0.0 {
                    ClosedSetRep::halfline_ge(0.0)
                } else {
                    ClosedSetRep::Union(vec![
                        ClosedSetRep::Box {
                            lo: vec![f64::NEG_INFINITY],
                            hi: vec![-1.0],
                        },
                        ClosedSetRep::zero(1),
                    ])
                }
            },
            -2.0,
            2.0,
            0.05,
        )
    }

    #[test]
    fn sqrt_epigraph_liplsc_diverges() {
        let est = empirical_modulus(
            &sqrt_epigraph(),
            ModulusKind::LipschitzLsc,
            &[0.0],
            &[0.0],
            &ScaleLadder::standard(),
            &m1(),
            &m1(),
        )
        .unwrap();
        assert_eq!(est.trend, Trend::Diverging);
        assert_eq!(est.value, INF);
        // the dyadic trace matches |p|^(−1/2): quotient 10 at p = 0.01
        let (s, q) = est
            .scale_trace
            .iter()
            .find(|(s, _)| (*s - 0.01).abs() < 1e-12)
            .copied()
            .expect("scale 0.01 present");
        assert!((q - 10.0).abs() <= 0.1, "quotient {q} at scale {s}");
        for (s, q) in &est.scale_trace {
            let expected = 1.0 / s.sqrt();
            assert!(
                (q - expected).abs() <= 0.01 * expected,
                "q({s}) = {q}, expected {expected}"
            );
        }
    }

    #[test]
    fn halfline_jump_calm_zero_but_not_upper_or_aubin() {
        let calm = empirical_modulus(
            &halfline_jump(),
            ModulusKind::Calm { delta: 0.5 },
            &[0.0],
            &[0.0],
            &ScaleLadder::standard(),
            &m1(),
            &m1(),
        )
        .unwrap();
        assert_eq!(calm.trend, Trend::Stable);
        assert!(calm.value.abs() <= 1e-9, "calm modulus {}", calm.value);

        let ul = empirical_modulus(
            &halfline_jump(),
            ModulusKind::UpperLipschitz,
            &[0.0],
            &[0.0],
            &ScaleLadder::standard(),
            &m1(),
            &m1(),
        )
        .unwrap();
        assert_eq!(ul.trend, Trend::Diverging, "trace {:?}", ul.scale_trace);

        let aubin = empirical_modulus(
            &halfline_jump(),
            ModulusKind::Aubin { delta: 0.5 },
            &[0.0],
            &[0.0],
            &ScaleLadder::standard(),
            &m1(),
            &m1(),
        )
        .unwrap();
        assert_eq!(
            aubin.trend,
            Trend::Diverging,
            "trace {:?}",
            aubin.scale_trace
        );
    }

    #[test]
    fn affine_halfline_upper_lipschitz_is_one() {
        // Φ(p) = [p, ∞): upper Lipschitz with constant exactly 1
        let h = exact_handle(|p| ClosedSetRep::halfline_ge(p[0]), -2.0, 2.0, 0.01);
        let est = empirical_modulus(
            &h,
            ModulusKind::UpperLipschitz,
            &[0.0],
            &[0.0],
            &ScaleLadder::standard(),
            &m1(),
            &m1(),
        )
        .unwrap();
        assert_eq!(est.trend, Trend::Stable);
        assert!((est.value - 1.0).abs() <= 0.05, "value {}", est.value);
    }

    #[test]
    fn calm_with_huge_delta_equals_upper_lipschitz() {
        let mk = || exact_handle(|p| ClosedSetRep::halfline_ge(p[0]), -2.0, 2.0, 0.01);
        let calm = empirical_modulus(
            &mk(),
            ModulusKind::Calm { delta: 1e9 },
            &[0.0],
            &[0.0],
            &ScaleLadder::standard(),
            &m1(),
            &m1(),
        )
        .unwrap();
        let ul = empirical_modulus(
            &mk(),
            ModulusKind::UpperLipschitz,
            &[0.0],
            &[0.0],
            &ScaleLadder::standard(),
            &m1(),
            &m1(),
        )
        .unwrap();
        assert_eq!(calm.value, ul.value);
        assert_eq!(calm.scale_trace, ul.scale_trace);
    }

    #[test]
    fn aubin_dominates_calm() {
        let mk = || exact_handle(|p| ClosedSetRep::halfline_ge(p[0]), -2.0, 2.0, 0.01);
        let calm = empirical_modulus(
            &mk(),
            ModulusKind::Calm { delta: 0.5 },
            &[0.0],
            &[0.0],
            &ScaleLadder::standard(),
            &m1(),
            &m1(),
        )
        .unwrap();
        let aubin = empirical_modulus(
            &mk(),
            ModulusKind::Aubin { delta: 0.5 },
            &[0.0],
            &[0.0],
            &ScaleLadder::standard(),
            &m1(),
            &m1(),
        )
        .unwrap();
        assert!(aubin.value >= calm.value - 1e-12);
    }

    #[test]
    fn refinement_never_decreases_sup() {
        let coarse = empirical_modulus(
            &sqrt_epigraph(),
            ModulusKind::Calm { delta: 0.5 },
            &[0.0],
            &[0.0],
            &ScaleLadder::new(0.64, 0.5, 5).unwrap(),
            &m1(),
            &m1(),
        )
        .unwrap();
        let fine = empirical_modulus(
            &sqrt_epigraph(),
            ModulusKind::Calm { delta: 0.5 },
            &[0.0],
            &[0.0],
            &ScaleLadder::new(0.64, 0.5, 10).unwrap(),
            &m1(),
            &m1(),
        )
        .unwrap();
        let sup = |e: &EmpiricalEstimate| {
            e.scale_trace
                .iter()
                .map(|(_, q)| *q)
                .fold(0.0_f64, f64::max)
        };
        assert!(sup(&fine) >= sup(&coarse) - 1e-12);
    }

    #[test]
    fn calm_requires_nonempty_reference_value() {
        let h = exact_handle(|_| ClosedSetRep::FiniteCloud(Vec::new()), -1.0, 1.0, 0.1);
        let err = empirical_modulus(
            &h,
            ModulusKind::Calm { delta: 0.5 },
            &[0.0],
            &[0.0],
            &ScaleLadder::standard(),
            &m1(),
            &m1(),
        );
        assert!(matches!(err, Err(Error::ContractViolation(_))));
    }

    #[test]
    fn single_spike_is_not_divergence() {
        let trace: Vec<(f64, f64)> = vec![
            (0.64, 1.0),
            (0.32, 40.0),
            (0.16, 1.0),
            (0.08, 1.0),
            (0.04, 1.0),
            (0.02, 1.0),
            (0.01, 1.0),
            (0.005, 1.0),
            (0.0025, 1.0),
        ];
        assert_eq!(detect_trend(&trace), Trend::Stable);
    }

    #[test]
    fn verdicts() {
        let est = EmpiricalEstimate {
            kind: ModulusKind::LipschitzLsc,
            value: 1.0,
            trend: Trend::Stable,
            witness: None,
            scale_trace: Vec::new(),
            resolution: 0.01,
        };
        assert_eq!(verdict_compare(1.0, &est, 0.05).kind, VerdictKind::Pass);
        assert_eq!(verdict_compare(0.5, &est, 0.05).kind, VerdictKind::Fail);
        let mut inc = est.clone();
        inc.trend = Trend::Inconclusive;
        assert_eq!(
            verdict_compare(1.0, &inc, 0.05).kind,
            VerdictKind::Undetermined
        );
    }
}
