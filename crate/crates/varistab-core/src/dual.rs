//! Exact dual objects on an analytic catalog: Fréchet subdifferentials,
//! normal cones, coderivatives of polyhedral (and smooth-boundary) graphs,
//! their outer norms, and the coderivative nondegeneracy constant for
//! null-base inclusions.
//!
//! Exactness is restricted to the catalog (smooth with a gradient oracle,
//! weighted absolute values, max of finitely many smooth functions,
//! indicators of polyhedra); everything else routes through the sampling
//! slope estimators in [`crate::slopes`].

use alloc::format;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)] // provides f64 math in no_std builds
use num_traits::Float;

use crate::geneq::{GenEqProblem, GraphRep};
use crate::metric::{dot, norm, ClosedSetRep, Halfspace, MetricSpec, RealVector};
use crate::sample::{ball_points, LdStream};
use crate::slopes::{RadiusSchedule, SlopeEstimate};
use crate::{Error, ExtReal, Result, INF};

const KINK_TOL: f64 = 1e-12;

// ---------------------------------------------------------------------------
// subdifferential representations
// ---------------------------------------------------------------------------

/// Closed convex representation of a (sub)differential object.
#[derive(Clone, Debug)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub enum SubdifferentialRep {
    Empty,
    Singleton(RealVector),
    /// Axis-aligned interval box; bounds may be `±∞`.
    IntervalBox { lo: Vec<f64>, hi: Vec<f64> },
    /// Conic hull of finitely many generators (empty list = `{0}`).
    ConeFromGenerators(Vec<RealVector>),
    /// Convex hull of finitely many vertices.
    Polytope(Vec<RealVector>),
}

impl SubdifferentialRep {
    pub fn is_empty(&self) -> bool {
        matches!(self, SubdifferentialRep::Empty)
    }

    /// `inf ‖x*‖₂` over the set; `+∞` when empty.
    pub fn min_norm(&self) -> ExtReal {
        match self {
            SubdifferentialRep::Empty => INF,
            SubdifferentialRep::Singleton(v) => norm(v.coords()),
            SubdifferentialRep::IntervalBox { lo, hi } => lo
                .iter()
                .zip(hi)
                .map(|(l, h)| {
                    let c = 0.0_f64.max(*l).min(*h);
                    c * c
                })
                .sum::<f64>()
                .sqrt(),
            SubdifferentialRep::ConeFromGenerators(_) => 0.0,
            SubdifferentialRep::Polytope(vs) => min_norm_polytope(vs),
        }
    }

    /// `sup ‖x*‖₂` over the set; `0` when empty (supremum convention).
    pub fn max_norm(&self) -> ExtReal {
        match self {
            SubdifferentialRep::Empty => 0.0,
            SubdifferentialRep::Singleton(v) => norm(v.coords()),
            SubdifferentialRep::IntervalBox { lo, hi } => {
                let mut s = 0.0;
                for (l, h) in lo.iter().zip(hi) {
                    let m = l.abs().max(h.abs());
                    if !m.is_finite() {
                        return INF;
                    }
                    s += m * m;
                }
                s.sqrt()
            }
            SubdifferentialRep::ConeFromGenerators(gs) => {
                if gs.iter().any(|g| norm(g.coords()) > 0.0) {
                    INF
                } else {
                    0.0
                }
            }
            SubdifferentialRep::Polytope(vs) => {
                vs.iter().map(|v| norm(v.coords())).fold(0.0, f64::max)
            }
        }
    }

    /// Scales the set by `t > 0` (positive homogeneity checks).
    pub fn scale(&self, t: f64) -> SubdifferentialRep {
        let sv = |v: &RealVector| {
            RealVector::new(v.coords().iter().map(|c| c * t).collect()).unwrap()
        };
        match self {
            SubdifferentialRep::Empty => SubdifferentialRep::Empty,
            SubdifferentialRep::Singleton(v) => SubdifferentialRep::Singleton(sv(v)),
            SubdifferentialRep::IntervalBox { lo, hi } => SubdifferentialRep::IntervalBox {
                lo: lo.iter().map(|c| c * t).collect(),
                hi: hi.iter().map(|c| c * t).collect(),
            },
            SubdifferentialRep::ConeFromGenerators(gs) => {
                SubdifferentialRep::ConeFromGenerators(gs.iter().map(sv).collect())
            }
            SubdifferentialRep::Polytope(vs) => {
                SubdifferentialRep::Polytope(vs.iter().map(sv).collect())
            }
        }
    }
}

/// Minimum-norm point of a polytope via Frank–Wolfe on the simplex.
fn min_norm_polytope(vs: &[RealVector]) -> f64 {
    if vs.is_empty() {
        return INF;
    }
    let dim = vs[0].dim();
    let mut w = vec![1.0 / vs.len() as f64; vs.len()];
    let point = |w: &[f64]| -> Vec<f64> {
        let mut p = vec![0.0; dim];
        for (wi, v) in w.iter().zip(vs) {
            for (pj, vj) in p.iter_mut().zip(v.coords()) {
                *pj += wi * vj;
            }
        }
        p
    };
    for it in 0..400 {
        let p = point(&w);
        let mut best = 0;
        let mut bv = dot(&p, vs[0].coords());
        for (i, v) in vs.iter().enumerate().skip(1) {
            let d = dot(&p, v.coords());
            if d < bv {
                bv = d;
                best = i;
            }
        }
        let gamma = 2.0 / (it as f64 + 2.0);
        for (i, wi) in w.iter_mut().enumerate() {
            *wi *= 1.0 - gamma;
            if i == best {
                *wi += gamma;
            }
        }
    }
    norm(&point(&w))
}

// ---------------------------------------------------------------------------
// analytic function catalog
// ---------------------------------------------------------------------------

type ScalarFn = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;
type GradFn = Arc<dyn Fn(&[f64]) -> Vec<f64> + Send + Sync>;

/// Function descriptors for which exact subdifferential rules are available.
#[derive(Clone)]
pub enum CatalogFn {
    /// Smooth function with a gradient oracle.
    Smooth { value: ScalarFn, grad: GradFn },
    /// `Σ_i w_i |v_i − c_i|` with `w_i ≥ 0`.
    WeightedAbs { weights: Vec<f64>, center: Vec<f64> },
    /// `|⟨a,v⟩ − b|`.
    AbsAffine { normal: Vec<f64>, offset: f64 },
    /// Pointwise maximum of smooth functions.
    MaxOfSmooth(Vec<(ScalarFn, GradFn)>),
    /// Indicator of the polyhedron `⟨a_i, v⟩ ≤ b_i`.
    IndicatorPolyhedron(Vec<Halfspace>),
    /// Sum of catalog functions.
    Sum(Vec<CatalogFn>),
}

impl CatalogFn {
    pub fn smooth(
        value: impl Fn(&[f64]) -> f64 + Send + Sync + 'static,
        grad: impl Fn(&[f64]) -> Vec<f64> + Send + Sync + 'static,
    ) -> Self {
        CatalogFn::Smooth {
            value: Arc::new(value),
            grad: Arc::new(grad),
        }
    }

    pub fn max_of_smooth(
        parts: Vec<(
            Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>,
            Arc<dyn Fn(&[f64]) -> Vec<f64> + Send + Sync>,
        )>,
    ) -> Self {
        CatalogFn::MaxOfSmooth(parts)
    }

    /// `|v|` in one dimension.
    pub fn abs1() -> Self {
        CatalogFn::WeightedAbs {
            weights: vec![1.0],
            center: vec![0.0],
        }
    }

    pub fn value(&self, v: &[f64]) -> ExtReal {
        match self {
            CatalogFn::Smooth { value, .. } => value(v),
            CatalogFn::WeightedAbs { weights, center } => weights
                .iter()
                .zip(center)
                .zip(v)
                .map(|((w, c), x)| w * (x - c).abs())
                .sum(),
            CatalogFn::AbsAffine { normal, offset } => (dot(normal, v) - offset).abs(),
            CatalogFn::MaxOfSmooth(parts) => parts
                .iter()
                .map(|(f, _)| f(v))
                .fold(f64::NEG_INFINITY, f64::max),
            CatalogFn::IndicatorPolyhedron(hs) => {
                let inside = hs.iter().all(|h| {
                    dot(&h.normal, v) - h.offset
                        <= crate::TOL_FEAS * norm(&h.normal).max(1.0)
                });
                if inside {
                    0.0
                } else {
                    INF
                }
            }
            CatalogFn::Sum(parts) => parts.iter().map(|p| p.value(v)).sum(),
        }
    }

    /// Projector onto the domain when indicators participate; used to sample
    /// qualifying points of indicator-constrained functions.
    pub fn domain_attach(
        &self,
    ) -> Option<impl Fn(&[f64]) -> Option<Vec<f64>> + Send + Sync> {
        let mut polys: Vec<ClosedSetRep> = Vec::new();
        self.collect_indicators(&mut polys);
        if polys.is_empty() {
            return None;
        }
        Some(move |v: &[f64]| {
            let mut z = v.to_vec();
            for p in &polys {
                z = p.project(&z).ok()?;
            }
            Some(z)
        })
    }

    fn collect_indicators(&self, out: &mut Vec<ClosedSetRep>) {
        match self {
            CatalogFn::IndicatorPolyhedron(hs) => {
                out.push(ClosedSetRep::HalfspaceIntersection(hs.clone()))
            }
            CatalogFn::Sum(parts) => {
                for p in parts {
                    p.collect_indicators(out);
                }
            }
            _ => {}
        }
    }

    fn part_reps(&self, v: &[f64]) -> Result<Vec<SubdifferentialRep>> {
        match self {
            CatalogFn::Sum(parts) => {
                let mut reps = Vec::with_capacity(parts.len());
                for p in parts {
                    reps.extend(p.part_reps(v)?);
                }
                Ok(reps)
            }
            _ => Ok(vec![frechet_subdifferential(self, v)?]),
        }
    }
}

/// Exact Fréchet (regular) subdifferential of a catalog function.
///
/// A point outside the domain of an indicator yields `Empty`.
pub fn frechet_subdifferential(f: &CatalogFn, v: &[f64]) -> Result<SubdifferentialRep> {
    Ok(match f {
        CatalogFn::Smooth { grad, .. } => {
            SubdifferentialRep::Singleton(RealVector::new(grad(v))?)
        }
        CatalogFn::WeightedAbs { weights, center } => {
            let mut lo = Vec::with_capacity(v.len());
            let mut hi = Vec::with_capacity(v.len());
            for ((w, c), x) in weights.iter().zip(center).zip(v) {
                let d = x - c;
                if d.abs() <= KINK_TOL {
                    lo.push(-w);
                    hi.push(*w);
                } else {
                    let s = w * d.signum();
                    lo.push(s);
                    hi.push(s);
                }
            }
            if lo == hi {
                SubdifferentialRep::Singleton(RealVector::new(lo)?)
            } else {
                SubdifferentialRep::IntervalBox { lo, hi }
            }
        }
        CatalogFn::AbsAffine { normal, offset } => {
            let t = dot(normal, v) - offset;
            if t.abs() <= KINK_TOL {
                SubdifferentialRep::Polytope(vec![
                    RealVector::new(normal.iter().map(|a| -a).collect())?,
                    RealVector::new(normal.clone())?,
                ])
            } else {
                let s = t.signum();
                SubdifferentialRep::Singleton(RealVector::new(
                    normal.iter().map(|a| s * a).collect(),
                )?)
            }
        }
        CatalogFn::MaxOfSmooth(parts) => {
            let vals: Vec<f64> = parts.iter().map(|(f, _)| f(v)).collect();
            let m = vals.iter().fold(f64::NEG_INFINITY, |a, b| a.max(*b));
            let active: Vec<usize> = (0..parts.len())
                .filter(|i| vals[*i] >= m - 1e-11 * m.abs().max(1.0))
                .collect();
            if active.len() == 1 {
                SubdifferentialRep::Singleton(RealVector::new(parts[active[0]].1(v))?)
            } else {
                SubdifferentialRep::Polytope(
                    active
                        .iter()
                        .map(|i| RealVector::new(parts[*i].1(v)))
                        .collect::<Result<Vec<_>>>()?,
                )
            }
        }
        CatalogFn::IndicatorPolyhedron(hs) => {
            let dim = v.len();
            let mut active = Vec::new();
            let mut inside = true;
            for h in hs {
                let scale = norm(&h.normal).max(1e-300);
                let slack = (h.offset - dot(&h.normal, v)) / scale;
                if slack < -crate::TOL_FEAS {
                    inside = false;
                    break;
                }
                if slack <= crate::TOL_FEAS {
                    active.push(RealVector::new(h.normal.clone())?);
                }
            }
            if !inside {
                SubdifferentialRep::Empty
            } else if active.is_empty() {
                SubdifferentialRep::Singleton(RealVector::new(vec![0.0; dim])?)
            } else {
                SubdifferentialRep::ConeFromGenerators(active)
            }
        }
        CatalogFn::Sum(parts) => {
            let mut reps = Vec::with_capacity(parts.len());
            for p in parts {
                reps.push(frechet_subdifferential(p, v)?);
            }
            collapse_sum(reps)?
        }
    })
}

/// Minkowski sum of part representations, when it stays inside the
/// representable variants.
fn collapse_sum(reps: Vec<SubdifferentialRep>) -> Result<SubdifferentialRep> {
    if reps.iter().any(|r| r.is_empty()) {
        return Ok(SubdifferentialRep::Empty);
    }
    let mut shift: Vec<f64> = Vec::new();
    let mut nontrivial: Vec<SubdifferentialRep> = Vec::new();
    for r in reps {
        match r {
            SubdifferentialRep::Singleton(v) => {
                if shift.is_empty() {
                    shift = v.coords().to_vec();
                } else {
                    for (s, c) in shift.iter_mut().zip(v.coords()) {
                        *s += c;
                    }
                }
            }
            other => nontrivial.push(other),
        }
    }
    let shifted = |shift: &[f64], r: SubdifferentialRep| -> Result<SubdifferentialRep> {
        if shift.is_empty() || shift.iter().all(|s| *s == 0.0) {
            return Ok(r);
        }
        Ok(match r {
            SubdifferentialRep::IntervalBox { lo, hi } => SubdifferentialRep::IntervalBox {
                lo: lo.iter().zip(shift).map(|(a, s)| a + s).collect(),
                hi: hi.iter().zip(shift).map(|(a, s)| a + s).collect(),
            },
            SubdifferentialRep::Polytope(vs) => SubdifferentialRep::Polytope(
                vs.iter()
                    .map(|v| {
                        RealVector::new(
                            v.coords().iter().zip(shift).map(|(a, s)| a + s).collect(),
                        )
                    })
                    .collect::<Result<Vec<_>>>()?,
            ),
            SubdifferentialRep::ConeFromGenerators(_) => {
                return Err(Error::Unsupported(format!(
                    "shifted cone is not representable"
                )))
            }
            other => other,
        })
    };
    match nontrivial.len() {
        0 => Ok(SubdifferentialRep::Singleton(RealVector::new(
            if shift.is_empty() { vec![0.0] } else { shift },
        )?)),
        1 => shifted(&shift, nontrivial.pop().unwrap()),
        2 => {
            let b = nontrivial.pop().unwrap();
            let a = nontrivial.pop().unwrap();
            match (a, b) {
                (
                    SubdifferentialRep::IntervalBox { lo: l1, hi: h1 },
                    SubdifferentialRep::IntervalBox { lo: l2, hi: h2 },
                ) => shifted(
                    &shift,
                    SubdifferentialRep::IntervalBox {
                        lo: l1.iter().zip(&l2).map(|(a, b)| a + b).collect(),
                        hi: h1.iter().zip(&h2).map(|(a, b)| a + b).collect(),
                    },
                ),
                (
                    SubdifferentialRep::ConeFromGenerators(g1),
                    SubdifferentialRep::ConeFromGenerators(g2),
                ) => {
                    let mut g = g1;
                    g.extend(g2);
                    shifted(&shift, SubdifferentialRep::ConeFromGenerators(g))
                }
                _ => Err(Error::Unsupported(format!(
                    "Minkowski sum of these representations is not expressible"
                ))),
            }
        }
        _ => Err(Error::Unsupported(format!(
            "sum with more than two nonsmooth parts"
        ))),
    }
}

/// `inf` of the dual norm over the Minkowski sum of part representations,
/// computed by cyclic ternary-search coordinate descent over the part
/// parameterizations (every 1-d slice of the objective is convex).
pub fn min_dual_norm_sum(parts: &[SubdifferentialRep], metric: &MetricSpec) -> ExtReal {
    if parts.iter().any(|p| p.is_empty()) {
        return INF;
    }
    let dim = metric.total_dim();
    #[derive(Clone)]
    enum Par {
        Fixed(Vec<f64>),
        Box {
            lo: Vec<f64>,
            hi: Vec<f64>,
            th: Vec<f64>,
        },
        Cone {
            gens: Vec<Vec<f64>>,
            th: Vec<f64>,
        },
        Poly {
            vs: Vec<Vec<f64>>,
            th: Vec<f64>,
        },
    }
    let mut scale_hint = 1.0_f64;
    let mut pars: Vec<Par> = parts
        .iter()
        .map(|p| match p {
            SubdifferentialRep::Empty => unreachable!(),
            SubdifferentialRep::Singleton(v) => {
                scale_hint = scale_hint.max(norm(v.coords()));
                Par::Fixed(v.coords().to_vec())
            }
            SubdifferentialRep::IntervalBox { lo, hi } => {
                let th: Vec<f64> = lo
                    .iter()
                    .zip(hi)
                    .map(|(l, h)| 0.0_f64.max(*l).min(*h))
                    .collect();
                scale_hint = scale_hint.max(norm(&th));
                Par::Box {
                    lo: lo.clone(),
                    hi: hi.clone(),
                    th,
                }
            }
            SubdifferentialRep::ConeFromGenerators(gs) => Par::Cone {
                gens: gs.iter().map(|g| g.coords().to_vec()).collect(),
                th: vec![0.0; gs.len()],
            },
            SubdifferentialRep::Polytope(vs) => {
                for v in vs {
                    scale_hint = scale_hint.max(norm(v.coords()));
                }
                Par::Poly {
                    vs: vs.iter().map(|v| v.coords().to_vec()).collect(),
                    th: vec![1.0 / vs.len() as f64; vs.len()],
                }
            }
        })
        .collect();
    let bound = 8.0 * (1.0 + scale_hint);

    let eval = |pars: &[Par]| -> f64 {
        let mut s = vec![0.0; dim];
        for p in pars {
            match p {
                Par::Fixed(v) => {
                    for (a, b) in s.iter_mut().zip(v) {
                        *a += b;
                    }
                }
                Par::Box { th, .. } => {
                    for (a, b) in s.iter_mut().zip(th) {
                        *a += b;
                    }
                }
                Par::Cone { gens, th } => {
                    for (g, t) in gens.iter().zip(th) {
                        for (a, b) in s.iter_mut().zip(g) {
                            *a += t * b;
                        }
                    }
                }
                Par::Poly { vs, th } => {
                    let tot: f64 = th.iter().sum();
                    if tot > 0.0 {
                        for (v, t) in vs.iter().zip(th) {
                            for (a, b) in s.iter_mut().zip(v) {
                                *a += (t / tot) * b;
                            }
                        }
                    }
                }
            }
        }
        metric.dual_norm(&s)
    };

    let mut best = eval(&pars);
    for _sweep in 0..16 {
        for pi in 0..pars.len() {
            let ranges: Vec<(f64, f64)> = match &pars[pi] {
                Par::Fixed(_) => continue,
                Par::Box { lo, hi, .. } => lo
                    .iter()
                    .zip(hi)
                    .map(|(l, h)| (l.max(-bound), h.min(bound)))
                    .collect(),
                Par::Cone { th, .. } => th.iter().map(|_| (0.0, bound)).collect(),
                Par::Poly { th, .. } => th.iter().map(|_| (0.0, 1.0)).collect(),
            };
            for (ci, (lo, hi)) in ranges.iter().enumerate() {
                if hi <= lo {
                    continue;
                }
                let mut a = *lo;
                let mut b = *hi;
                let set = |pars: &mut [Par], t: f64| match &mut pars[pi] {
                    Par::Fixed(_) => {}
                    Par::Box { th, .. } => th[ci] = t,
                    Par::Cone { th, .. } => th[ci] = t,
                    Par::Poly { th, .. } => th[ci] = t,
                };
                for _ in 0..48 {
                    let m1 = a + (b - a) / 3.0;
                    let m2 = b - (b - a) / 3.0;
                    set(&mut pars, m1);
                    let f1 = eval(&pars);
                    set(&mut pars, m2);
                    let f2 = eval(&pars);
                    if f1 < f2 {
                        b = m2;
                        set(&mut pars, m1);
                    } else {
                        a = m1;
                    }
                }
                best = best.min(eval(&pars));
            }
        }
    }
    best
}

/// Strict outer subdifferential slope of a catalog function at `x̄`:
/// `lim_{ε→0⁺} inf { ‖x*‖ : x* ∈ ∂̂f(x), x ∈ B(x̄,ε), f(x̄) < f(x) ≤ f(x̄)+ε }`.
///
/// In finite dimension this agrees with the strict outer slope on l.s.c.
/// catalog functions, which the property suite verifies.
pub fn strict_outer_subdif_slope(
    f: &CatalogFn,
    x_bar: &[f64],
    metric: &MetricSpec,
    sched: &RadiusSchedule,
) -> Result<SlopeEstimate> {
    let f0 = f.value(x_bar);
    if !f0.is_finite() {
        return Err(Error::DomainError(format!(
            "catalog function is {f0} at the reference point"
        )));
    }
    let attach = f.domain_attach();
    let radii = sched.radii();
    let mut stream = LdStream::new(metric.total_dim(), sched.seed ^ 0x00C0_FFEE);
    let mut per_level = Vec::with_capacity(radii.len());
    for eps in &radii {
        let raw = ball_points(x_bar, *eps, 4 * sched.samples_per_level, metric, &mut stream);
        let mut vk = INF;
        let mut used = 0usize;
        for z in raw {
            let z = match &attach {
                None => z,
                Some(a) => match a(&z) {
                    Some(w) => w,
                    None => continue,
                },
            };
            let d = metric.dist(&z, x_bar);
            if d <= 0.0 || d > *eps {
                continue;
            }
            let fz = f.value(&z);
            if !(fz > f0 && fz <= f0 + eps) {
                continue;
            }
            let parts = f.part_reps(&z)?;
            vk = vk.min(min_dual_norm_sum(&parts, metric));
            used += 1;
            if used >= 2 * sched.samples_per_level {
                break;
            }
        }
        per_level.push(vk);
    }
    let value = *per_level.last().unwrap();
    let vacuous = per_level.iter().all(|v| !v.is_finite());
    Ok(SlopeEstimate {
        radii,
        per_level,
        value,
        monotone: true,
        local_min: false,
        vacuous,
    })
}

// ---------------------------------------------------------------------------
// polyhedral normal cones
// ---------------------------------------------------------------------------

/// A polyhedral cone `{Σ t_i g_i + Σ s_j l_j : t ≥ 0, s ∈ ℝ}`; `full`
/// short-circuits to the whole space.
#[derive(Clone, Debug)]
pub struct ConeRep {
    pub dim: usize,
    pub generators: Vec<Vec<f64>>,
    pub lines: Vec<Vec<f64>>,
    pub full: bool,
}

impl ConeRep {
    fn zero(dim: usize) -> Self {
        ConeRep {
            dim,
            generators: Vec::new(),
            lines: Vec::new(),
            full: false,
        }
    }

    fn full(dim: usize) -> Self {
        ConeRep {
            dim,
            generators: Vec::new(),
            lines: Vec::new(),
            full: true,
        }
    }

    fn is_zero_only(&self) -> bool {
        !self.full
            && self.generators.iter().all(|g| norm(g) <= 1e-14)
            && self.lines.iter().all(|l| norm(l) <= 1e-14)
    }

    /// All extreme ray directions (lines contribute both signs), normalized.
    fn rays(&self) -> Vec<Vec<f64>> {
        let mut out = Vec::new();
        for g in &self.generators {
            let n = norm(g);
            if n > 1e-14 {
                out.push(g.iter().map(|c| c / n).collect());
            }
        }
        for l in &self.lines {
            let n = norm(l);
            if n > 1e-14 {
                out.push(l.iter().map(|c| c / n).collect());
                out.push(l.iter().map(|c| -c / n).collect());
            }
        }
        out
    }

    /// Membership test (ambient dimension 1 and 2).
    pub fn contains(&self, v: &[f64], tol: f64) -> Result<bool> {
        if self.full {
            return Ok(true);
        }
        if norm(v) <= tol {
            return Ok(true);
        }
        match self.dim {
            1 => {
                let pos = self.rays().iter().any(|r| r[0] > 0.5);
                let neg = self.rays().iter().any(|r| r[0] < -0.5);
                Ok(if v[0] > 0.0 { pos } else { neg })
            }
            2 => Ok(classify2(&self.rays()).contains(v, tol)),
            d => Err(Error::Unsupported(format!(
                "cone membership in dimension {d}"
            ))),
        }
    }
}

/// Classification of a 2-d closed convex cone.
#[derive(Clone, Debug)]
enum Cone2 {
    Zero,
    Ray([f64; 2]),
    Line([f64; 2]),
    /// CCW sweep from `a` to `b`, width strictly below π.
    Sector { a: [f64; 2], b: [f64; 2] },
    /// `{v : ⟨n, v⟩ ≥ 0}`.
    Halfplane { n: [f64; 2] },
    Full,
}

fn cross2(a: &[f64], b: &[f64]) -> f64 {
    a[0] * b[1] - a[1] * b[0]
}

fn classify2(rays: &[Vec<f64>]) -> Cone2 {
    let mut rs: Vec<[f64; 2]> = Vec::new();
    for r in rays {
        let c = [r[0], r[1]];
        if !rs
            .iter()
            .any(|e| (e[0] - c[0]).abs() < 1e-10 && (e[1] - c[1]).abs() < 1e-10)
        {
            rs.push(c);
        }
    }
    if rs.is_empty() {
        return Cone2::Zero;
    }
    if rs.len() == 1 {
        return Cone2::Ray(rs[0]);
    }
    // an antipodal pair means the cone contains a full line
    let mut line_dir: Option<[f64; 2]> = None;
    'outer: for i in 0..rs.len() {
        for j in i + 1..rs.len() {
            if (rs[i][0] + rs[j][0]).abs() < 1e-10 && (rs[i][1] + rs[j][1]).abs() < 1e-10 {
                line_dir = Some(rs[i]);
                break 'outer;
            }
        }
    }
    if let Some(d) = line_dir {
        let n = [-d[1], d[0]];
        let mut pos = false;
        let mut neg = false;
        for r in &rs {
            let s = n[0] * r[0] + n[1] * r[1];
            if s > 1e-10 {
                pos = true;
            }
            if s < -1e-10 {
                neg = true;
            }
        }
        return match (pos, neg) {
            (true, true) => Cone2::Full,
            (true, false) => Cone2::Halfplane { n },
            (false, true) => Cone2::Halfplane { n: [-n[0], -n[1]] },
            (false, false) => Cone2::Line(d),
        };
    }
    // no lines: sort by angle and find the widest cyclic gap
    let mut angs: Vec<(f64, [f64; 2])> =
        rs.iter().map(|r| (r[1].atan2(r[0]), *r)).collect();
    angs.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    let m = angs.len();
    let tau = 2.0 * core::f64::consts::PI;
    let mut max_gap = 0.0;
    let mut idx = 0;
    for i in 0..m {
        let next = (i + 1) % m;
        let mut gap = angs[next].0 - angs[i].0;
        if next == 0 {
            gap += tau;
        }
        if gap > max_gap {
            max_gap = gap;
            idx = i;
        }
    }
    let width = tau - max_gap;
    let a = angs[(idx + 1) % m].1;
    let b = angs[idx].1;
    if width < 1e-10 {
        Cone2::Ray(a)
    } else if width < core::f64::consts::PI - 1e-9 {
        Cone2::Sector { a, b }
    } else if width < core::f64::consts::PI + 1e-9 {
        Cone2::Halfplane { n: [-a[1], a[0]] }
    } else {
        Cone2::Full
    }
}

impl Cone2 {
    fn contains(&self, v: &[f64], tol: f64) -> bool {
        let nv = norm(v);
        if nv <= tol {
            return true;
        }
        let u = [v[0] / nv, v[1] / nv];
        match self {
            Cone2::Zero => false,
            Cone2::Ray(r) => (u[0] - r[0]).abs() < 1e-9 && (u[1] - r[1]).abs() < 1e-9,
            Cone2::Line(d) => cross2(d, &u).abs() < 1e-9,
            Cone2::Sector { a, b } => cross2(a, &u) >= -1e-9 && cross2(&u, b) >= -1e-9,
            Cone2::Halfplane { n } => n[0] * u[0] + n[1] * u[1] >= -1e-9,
            Cone2::Full => true,
        }
    }
}

/// Fréchet normal cone to a closed-set representation at one of its points.
pub fn normal_cone(set: &ClosedSetRep, point: &[f64], tol: f64) -> Result<ConeRep> {
    if !set.contains(point, tol) {
        return Err(Error::NotOnGraph);
    }
    let dim = set.ambient_dim();
    Ok(match set {
        ClosedSetRep::FiniteCloud(_) | ClosedSetRep::Singleton(_) => ConeRep::full(dim),
        ClosedSetRep::HalfspaceIntersection(hs) => {
            let mut c = ConeRep::zero(dim);
            for h in hs {
                let scale = norm(&h.normal).max(1e-300);
                if (dot(&h.normal, point) - h.offset).abs() <= tol * scale {
                    c.generators.push(h.normal.clone());
                }
            }
            c
        }
        ClosedSetRep::ClosedBall { center, radius } => {
            if *radius == 0.0 {
                ConeRep::full(dim)
            } else {
                let d = crate::metric::euclid(center.coords(), point);
                if (d - radius).abs() <= tol {
                    let g: Vec<f64> = point
                        .iter()
                        .zip(center.coords())
                        .map(|(p, c)| p - c)
                        .collect();
                    ConeRep {
                        dim,
                        generators: vec![g],
                        lines: Vec::new(),
                        full: false,
                    }
                } else {
                    ConeRep::zero(dim)
                }
            }
        }
        ClosedSetRep::Box { lo, hi } => {
            let mut c = ConeRep::zero(dim);
            for i in 0..dim {
                let at_lo = lo[i].is_finite() && (point[i] - lo[i]).abs() <= tol;
                let at_hi = hi[i].is_finite() && (point[i] - hi[i]).abs() <= tol;
                let mut e = vec![0.0; dim];
                if at_lo && at_hi {
                    e[i] = 1.0;
                    c.lines.push(e);
                } else if at_lo {
                    e[i] = -1.0;
                    c.generators.push(e);
                } else if at_hi {
                    e[i] = 1.0;
                    c.generators.push(e);
                }
            }
            c
        }
        ClosedSetRep::CartesianProduct(parts) => {
            let mut c = ConeRep::zero(dim);
            let mut off = 0;
            for p in parts {
                let n = p.ambient_dim();
                let sub = normal_cone(p, &point[off..off + n], tol)?;
                let embed = |v: &[f64], off: usize| {
                    let mut e = vec![0.0; dim];
                    e[off..off + v.len()].copy_from_slice(v);
                    e
                };
                if sub.full {
                    for i in 0..n {
                        let mut e = vec![0.0; n];
                        e[i] = 1.0;
                        c.lines.push(embed(&e, off));
                    }
                } else {
                    for g in &sub.generators {
                        c.generators.push(embed(g, off));
                    }
                    for l in &sub.lines {
                        c.lines.push(embed(l, off));
                    }
                }
                off += n;
            }
            c
        }
        ClosedSetRep::AbsComplement { radius } => {
            if *radius == 0.0 {
                ConeRep::zero(1)
            } else if (point[0] - radius).abs() <= tol {
                ConeRep {
                    dim: 1,
                    generators: vec![vec![-1.0]],
                    lines: Vec::new(),
                    full: false,
                }
            } else if (point[0] + radius).abs() <= tol {
                ConeRep {
                    dim: 1,
                    generators: vec![vec![1.0]],
                    lines: Vec::new(),
                    full: false,
                }
            } else {
                ConeRep::zero(1)
            }
        }
        ClosedSetRep::Union(branches) => {
            let mut cones = Vec::new();
            for b in branches {
                if b.contains(point, tol) {
                    cones.push(normal_cone(b, point, tol)?);
                }
            }
            match cones.len() {
                0 => return Err(Error::NotOnGraph),
                1 => cones.pop().unwrap(),
                _ => {
                    // Fréchet normals to a union at a shared point:
                    // the intersection of the branch cones
                    if dim != 2 {
                        return Err(Error::Unsupported(format!(
                            "union normal cone at a multi-branch point in dimension {dim}"
                        )));
                    }
                    let mut acc = cones.pop().unwrap();
                    while let Some(next) = cones.pop() {
                        acc = intersect2(&acc, &next);
                    }
                    acc
                }
            }
        }
    })
}

/// Intersection of two 2-d cones. The extreme rays of the intersection are
/// among the extreme rays of the operands, so candidate filtering is exact.
fn intersect2(a: &ConeRep, b: &ConeRep) -> ConeRep {
    if a.full {
        return b.clone();
    }
    if b.full {
        return a.clone();
    }
    let ca = classify2(&a.rays());
    let cb = classify2(&b.rays());
    let mut keep: Vec<Vec<f64>> = Vec::new();
    for r in a.rays().into_iter().chain(b.rays()) {
        if ca.contains(&r, 1e-12) && cb.contains(&r, 1e-12) {
            keep.push(r);
        }
    }
    let mut gens: Vec<Vec<f64>> = Vec::new();
    let mut lines: Vec<Vec<f64>> = Vec::new();
    for r in keep {
        if let Some(pos) = gens
            .iter()
            .position(|g| (g[0] + r[0]).abs() < 1e-10 && (g[1] + r[1]).abs() < 1e-10)
        {
            gens.remove(pos);
            lines.push(r);
        } else if !gens
            .iter()
            .any(|g| (g[0] - r[0]).abs() < 1e-10 && (g[1] - r[1]).abs() < 1e-10)
        {
            gens.push(r);
        }
    }
    ConeRep {
        dim: 2,
        generators: gens,
        lines,
        full: false,
    }
}

/// Normal cone of a graph representation at a graph point.
pub fn graph_normal_cone(
    graph: &GraphRep,
    point: &[f64],
    dim_x: usize,
    tol: f64,
) -> Result<ConeRep> {
    match graph {
        GraphRep::Set(s) => normal_cone(s, point, tol),
        GraphRep::SmoothBoundary { .. } => {
            let dim = point.len();
            if !graph.contains(point, dim_x, tol) {
                return Err(Error::NotOnGraph);
            }
            let GraphRep::SmoothBoundary { g, grad, above } = graph else {
                unreachable!()
            };
            let gx = g(&point[..dim_x]);
            let y = point[dim_x];
            if (y - gx).abs() <= tol {
                let gr = grad(&point[..dim_x]);
                let mut gvec = Vec::with_capacity(dim);
                if *above {
                    gvec.extend(gr.iter().copied());
                    gvec.push(-1.0);
                } else {
                    gvec.extend(gr.iter().map(|c| -c));
                    gvec.push(1.0);
                }
                Ok(ConeRep {
                    dim,
                    generators: vec![gvec],
                    lines: Vec::new(),
                    full: false,
                })
            } else {
                Ok(ConeRep::zero(dim))
            }
        }
    }
}

// ---------------------------------------------------------------------------
// coderivatives
// ---------------------------------------------------------------------------

/// The coderivative value `D̂*F(x,y)(y*) = {x* : (x*,−y*) ∈ N̂((x,y), grph F)}`
/// together with the outer norm of the coderivative mapping at that point.
#[derive(Clone, Debug)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct CoderivativeResult {
    pub y_star: Vec<f64>,
    pub x_set: SubdifferentialRep,
    #[cfg_attr(feature = "serde", serde(serialize_with = "crate::serde_ext::ser_ext"))]
    pub outer_norm: ExtReal,
    /// Whether the outer norm was evaluated exactly (scalar `y`) or over a
    /// sampled dual sphere.
    pub outer_norm_exact: bool,
}

/// Solves `{x* : (x*, −y*) ∈ cone}` for the supported cone shapes.
pub fn cone_slice(
    cone: &ConeRep,
    dim_x: usize,
    y_star: &[f64],
) -> Result<SubdifferentialRep> {
    let dim_y = cone.dim - dim_x;
    let minus_y: Vec<f64> = y_star.iter().map(|v| -v).collect();
    if cone.full {
        return Ok(SubdifferentialRep::IntervalBox {
            lo: vec![f64::NEG_INFINITY; dim_x],
            hi: vec![f64::INFINITY; dim_x],
        });
    }
    if cone.is_zero_only() {
        return Ok(if norm(&minus_y) <= 1e-12 {
            SubdifferentialRep::Singleton(RealVector::new(vec![0.0; dim_x])?)
        } else {
            SubdifferentialRep::Empty
        });
    }
    // product shortcut: every ray has a zero x-block, so x* is forced to 0
    let x_blocks_zero = cone
        .generators
        .iter()
        .chain(&cone.lines)
        .all(|v| norm(&v[..dim_x]) <= 1e-14);
    if x_blocks_zero {
        let ycone = ConeRep {
            dim: dim_y,
            generators: cone
                .generators
                .iter()
                .map(|v| v[dim_x..].to_vec())
                .collect(),
            lines: cone.lines.iter().map(|v| v[dim_x..].to_vec()).collect(),
            full: false,
        };
        return Ok(if ycone.contains(&minus_y, 1e-12)? {
            SubdifferentialRep::Singleton(RealVector::new(vec![0.0; dim_x])?)
        } else {
            SubdifferentialRep::Empty
        });
    }
    // a single generator or line solves componentwise in any dimension
    let n_rays = cone.generators.len() + cone.lines.len();
    if n_rays == 1 {
        let (v, is_line) = if cone.generators.len() == 1 {
            (&cone.generators[0], false)
        } else {
            (&cone.lines[0], true)
        };
        let vy = &v[dim_x..];
        let ny = norm(vy);
        if ny <= 1e-14 {
            return Ok(if norm(&minus_y) <= 1e-12 {
                let g = RealVector::new(v[..dim_x].to_vec())?;
                if is_line {
                    SubdifferentialRep::ConeFromGenerators(vec![
                        g,
                        RealVector::new(v[..dim_x].iter().map(|c| -c).collect())?,
                    ])
                } else {
                    SubdifferentialRep::ConeFromGenerators(vec![g])
                }
            } else {
                SubdifferentialRep::Empty
            });
        }
        let t = dot(vy, &minus_y) / dot(vy, vy);
        let resid: f64 = vy
            .iter()
            .zip(&minus_y)
            .map(|(a, b)| (t * a - b) * (t * a - b))
            .sum::<f64>()
            .sqrt();
        if resid > 1e-9 * (1.0 + norm(&minus_y)) || (!is_line && t < -1e-12) {
            return Ok(SubdifferentialRep::Empty);
        }
        return Ok(SubdifferentialRep::Singleton(RealVector::new(
            v[..dim_x].iter().map(|c| t * c).collect(),
        )?));
    }
    if dim_x == 1 && dim_y == 1 {
        return Ok(slice2(&classify2(&cone.rays()), minus_y[0]));
    }
    Err(Error::Unsupported(format!(
        "coderivative slice for this cone shape (dim_x={dim_x}, dim_y={dim_y}, rays={n_rays})"
    )))
}

/// The set `{x : (x, h) ∈ C}` for a 2-d cone `C`; always a closed interval.
fn slice2(cone: &Cone2, h: f64) -> SubdifferentialRep {
    let near0 = h.abs() <= 1e-12;
    let interval = |lo: f64, hi: f64| {
        if lo > hi {
            SubdifferentialRep::Empty
        } else if lo == hi {
            SubdifferentialRep::Singleton(RealVector::new(vec![lo]).unwrap())
        } else {
            SubdifferentialRep::IntervalBox {
                lo: vec![lo],
                hi: vec![hi],
            }
        }
    };
    match cone {
        Cone2::Zero => {
            if near0 {
                interval(0.0, 0.0)
            } else {
                SubdifferentialRep::Empty
            }
        }
        Cone2::Full => interval(f64::NEG_INFINITY, f64::INFINITY),
        Cone2::Ray(u) => {
            if u[1].abs() <= 1e-12 {
                if near0 {
                    if u[0] > 0.0 {
                        interval(0.0, f64::INFINITY)
                    } else {
                        interval(f64::NEG_INFINITY, 0.0)
                    }
                } else {
                    SubdifferentialRep::Empty
                }
            } else {
                let t = h / u[1];
                if t >= -1e-12 {
                    let x = t.max(0.0) * u[0];
                    interval(x, x)
                } else {
                    SubdifferentialRep::Empty
                }
            }
        }
        Cone2::Line(u) => {
            if u[1].abs() <= 1e-12 {
                if near0 {
                    interval(f64::NEG_INFINITY, f64::INFINITY)
                } else {
                    SubdifferentialRep::Empty
                }
            } else {
                let t = h / u[1];
                interval(t * u[0], t * u[0])
            }
        }
        Cone2::Halfplane { n } => {
            // {x : n₀ x + n₁ h ≥ 0}
            if n[0].abs() <= 1e-12 {
                if n[1] * h >= -1e-12 {
                    interval(f64::NEG_INFINITY, f64::INFINITY)
                } else {
                    SubdifferentialRep::Empty
                }
            } else {
                let c = -n[1] * h / n[0];
                if n[0] > 0.0 {
                    interval(c, f64::INFINITY)
                } else {
                    interval(f64::NEG_INFINITY, c)
                }
            }
        }
        Cone2::Sector { a, b } => {
            let mut lo = f64::INFINITY;
            let mut hi = f64::NEG_INFINITY;
            let mut any = false;
            for u in [a, b] {
                if u[1].abs() > 1e-12 {
                    let t = h / u[1];
                    if t >= -1e-12 {
                        let x = t.max(0.0) * u[0];
                        lo = lo.min(x);
                        hi = hi.max(x);
                        any = true;
                    }
                } else if near0 {
                    any = true;
                    if u[0] > 0.0 {
                        hi = f64::INFINITY;
                        lo = lo.min(0.0);
                    } else {
                        lo = f64::NEG_INFINITY;
                        hi = hi.max(0.0);
                    }
                }
            }
            if near0 {
                // the apex belongs to every cone
                lo = lo.min(0.0);
                hi = hi.max(0.0);
                any = true;
            }
            if !any {
                return SubdifferentialRep::Empty;
            }
            let c = Cone2::Sector { a: *a, b: *b };
            if c.contains(&[1.0, 0.0], 0.0) {
                hi = f64::INFINITY;
            }
            if c.contains(&[-1.0, 0.0], 0.0) {
                lo = f64::NEG_INFINITY;
            }
            interval(lo, hi)
        }
    }
}

/// Fréchet coderivative of a set-valued mapping through its polyhedral graph
/// representation at a point `(x,y)` of the graph, plus the outer norm at
/// that point.
pub fn coderivative_at(
    graph: &ClosedSetRep,
    point: &[f64],
    dim_x: usize,
    y_star: &[f64],
    tol: f64,
) -> Result<CoderivativeResult> {
    let cone = normal_cone(graph, point, tol)?;
    coderivative_of_cone(&cone, dim_x, y_star)
}

/// Coderivative machinery shared between polyhedral and smooth-boundary
/// graphs, starting from an already-computed normal cone.
pub fn coderivative_of_cone(
    cone: &ConeRep,
    dim_x: usize,
    y_star: &[f64],
) -> Result<CoderivativeResult> {
    let dim_y = cone.dim - dim_x;
    let x_set = cone_slice(cone, dim_x, y_star)?;
    let (outer_norm, outer_norm_exact) = outer_norm_of_cone(cone, dim_x, dim_y)?;
    Ok(CoderivativeResult {
        y_star: y_star.to_vec(),
        x_set,
        outer_norm,
        outer_norm_exact,
    })
}

/// `‖D̂*F(x,y)‖₊ = sup_{‖y*‖=1} sup{‖x*‖ : x* ∈ D̂*F(x,y)(y*)}`.
///
/// Exact for scalar `y` (the dual sphere is `{±1}`); sampled and flagged
/// approximate otherwise. The supremum over an empty set is `0`.
fn outer_norm_of_cone(
    cone: &ConeRep,
    dim_x: usize,
    dim_y: usize,
) -> Result<(ExtReal, bool)> {
    if dim_y == 1 {
        let mut sup = 0.0_f64;
        for ys in [[1.0], [-1.0]] {
            let s = cone_slice(cone, dim_x, &ys)?;
            sup = sup.max(s.max_norm());
        }
        Ok((sup, true))
    } else {
        let mut stream = LdStream::new(dim_y, 2024);
        let mut sup = 0.0_f64;
        for _ in 0..256 {
            let ys = stream.next_direction();
            let s = cone_slice(cone, dim_x, &ys)?;
            sup = sup.max(s.max_norm());
        }
        Ok((sup, false))
    }
}

// ---------------------------------------------------------------------------
// the coderivative nondegeneracy constant c[F(p̄,·)](x̄, 0)
// ---------------------------------------------------------------------------

/// `liminf ‖x*‖` over coderivative elements at graph points near `(x̄, 0)`
/// with `y ≠ 0` and `‖y*‖ = 1`; `+∞` (vacuous) when every sampled qualifying
/// coderivative set is empty. Requires a null base and a graph
/// representation of `F(p̄,·)`.
pub fn c_constant(prob: &GenEqProblem, sched: &RadiusSchedule) -> Result<SlopeEstimate> {
    if !prob.base.is_null() {
        return Err(Error::ContractViolation(
            "c[F] requires the null base 0 ∈ F(p,x)".into(),
        ));
    }
    let graph = prob.field_graph().ok_or_else(|| {
        Error::Unsupported("c[F] requires a graph representation of F(p̄,·)".into())
    })?;
    let dim_x = prob.dim_x();
    let dim_y = prob.dim_y();
    let xy_metric = prob.xy_metric();
    let x_bar = prob.x_ref().coords();
    let mut center = x_bar.to_vec();
    center.extend(core::iter::repeat(0.0).take(dim_y));

    let unit_y: Vec<Vec<f64>> = if dim_y == 1 {
        vec![vec![1.0], vec![-1.0]]
    } else {
        let mut s = LdStream::new(dim_y, sched.seed ^ 0xBEEF);
        (0..64).map(|_| s.next_direction()).collect()
    };

    let mut stream = LdStream::new(dim_x + dim_y, sched.seed ^ 0xC0DE);
    let radii = sched.radii();
    // points with ‖y‖ below the face-activity tolerance are numerically
    // indistinguishable from y = 0 and are excluded from the qualification
    let y_floor = 10.0 * prob.tol_feas;
    let mut per_level = Vec::with_capacity(radii.len());
    for eps in &radii {
        let raw = ball_points(
            &center,
            *eps,
            4 * sched.samples_per_level,
            &xy_metric,
            &mut stream,
        );
        let mut vk = INF;
        for z in raw {
            let Ok(w) = graph.attach(&z, dim_x) else {
                continue;
            };
            let (wx, wy) = w.split_at(dim_x);
            let ny = norm(wy);
            if ny <= y_floor || ny > *eps {
                continue;
            }
            if crate::metric::euclid(wx, x_bar) > *eps {
                continue;
            }
            let cone = graph_normal_cone(graph, &w, dim_x, prob.tol_feas)?;
            for ys in &unit_y {
                let xs = cone_slice(&cone, dim_x, ys)?;
                if !xs.is_empty() {
                    vk = vk.min(xs.min_norm());
                }
            }
        }
        per_level.push(vk);
    }
    let value = *per_level.last().unwrap();
    let vacuous = per_level.iter().all(|v| !v.is_finite());
    Ok(SlopeEstimate {
        radii,
        per_level,
        value,
        monotone: true,
        local_min: false,
        vacuous,
    })
}

/// Smallest singular value of the adjoint: `inf_{‖y*‖=1} ‖Jᵀ y*‖`, i.e. the
/// square root of the smallest eigenvalue of `J Jᵀ` (rows of `j` indexed by
/// Y). Computed by cyclic Jacobi iteration.
pub fn min_singular_value_adjoint(j: &[Vec<f64>]) -> f64 {
    let m = j.len();
    if m == 0 {
        return 0.0;
    }
    let mut a = vec![vec![0.0; m]; m];
    for r in 0..m {
        for c in 0..m {
            a[r][c] = dot(&j[r], &j[c]);
        }
    }
    for _sweep in 0..64 {
        let mut off = 0.0;
        for p in 0..m {
            for q in p + 1..m {
                off += a[p][q] * a[p][q];
            }
        }
        if off < 1e-28 {
            break;
        }
        for p in 0..m {
            for q in p + 1..m {
                if a[p][q].abs() < 1e-300 {
                    continue;
                }
                let theta = 0.5 * (a[q][q] - a[p][p]) / a[p][q];
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..m {
                    let akp = a[k][p];
                    let akq = a[k][q];
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for k in 0..m {
                    let apk = a[p][k];
                    let aqk = a[q][k];
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
            }
        }
    }
    let mut lam = f64::INFINITY;
    for i in 0..m {
        lam = lam.min(a[i][i]);
    }
    lam.max(0.0).sqrt()
}
