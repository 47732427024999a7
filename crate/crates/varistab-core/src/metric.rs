//! Points, product metrics, and closed-set representations with exact
//! distance and projection evaluators.
//!
//! Product spaces always carry the sum metric
//! `d((a,b),(a',b')) = d(a,a') + d(b,b')`; its dual norm is the blockwise
//! maximum. Distances to the empty set are `+∞`; the excess of an empty
//! sampled set over anything is `0`. Both conventions are fixed here and
//! reused by every other module.

use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)] // provides f64 math in no_std builds
use num_traits::Float;

use crate::{Error, ExtReal, Result, INF, TOL_PROJ};

// ---------------------------------------------------------------------------
// vectors and metrics
// ---------------------------------------------------------------------------

/// A point of a finite-dimensional space. All coordinates are finite.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct RealVector {
    coords: Vec<f64>,
}

impl RealVector {
    /// Builds a vector, rejecting NaN and infinite coordinates.
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        for (i, c) in coords.iter().enumerate() {
            if !c.is_finite() {
                return Err(Error::NonFiniteCoordinate { index: i });
            }
        }
        Ok(RealVector { coords })
    }

    /// One-dimensional point.
    pub fn scalar(v: f64) -> Result<Self> {
        Self::new(vec![v])
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn into_coords(self) -> Vec<f64> {
        self.coords
    }
}

impl core::ops::Index<usize> for RealVector {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.coords[i]
    }
}

/// Euclidean norm of a slice.
pub fn norm(v: &[f64]) -> f64 {
    v.iter().map(|c| c * c).sum::<f64>().sqrt()
}

/// Euclidean distance between slices of equal length.
pub fn euclid(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Metric of a (possibly product) space: a list of component dimensions.
///
/// The distance is the sum over components of the Euclidean distance of the
/// corresponding coordinate blocks; a single component gives the plain
/// Euclidean metric. The dual norm of a covector is the blockwise maximum.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct MetricSpec {
    parts: Vec<usize>,
}

impl MetricSpec {
    pub fn simple(dim: usize) -> Self {
        MetricSpec { parts: vec![dim] }
    }

    /// Product of spaces under the sum metric; flattens nested products.
    pub fn product(parts: &[MetricSpec]) -> Self {
        let mut all = Vec::new();
        for p in parts {
            all.extend_from_slice(&p.parts);
        }
        MetricSpec { parts: all }
    }

    pub fn components(&self) -> &[usize] {
        &self.parts
    }

    pub fn total_dim(&self) -> usize {
        self.parts.iter().sum()
    }

    /// Sum metric: `Σ_blocks ‖a_block − b_block‖₂`.
    pub fn dist(&self, a: &[f64], b: &[f64]) -> f64 {
        debug_assert_eq!(a.len(), self.total_dim());
        debug_assert_eq!(b.len(), self.total_dim());
        let mut off = 0;
        let mut d = 0.0;
        for &n in &self.parts {
            d += euclid(&a[off..off + n], &b[off..off + n]);
            off += n;
        }
        d
    }

    /// Dual norm of the sum metric: `max_blocks ‖v_block‖₂`.
    pub fn dual_norm(&self, v: &[f64]) -> f64 {
        let mut off = 0;
        let mut m = 0.0_f64;
        for &n in &self.parts {
            m = m.max(norm(&v[off..off + n]));
            off += n;
        }
        m
    }
}

// ---------------------------------------------------------------------------
// axis-aligned regions and grids
// ---------------------------------------------------------------------------

/// A closed axis-aligned box used as a search region (finite bounds).
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct Region {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
}

impl Region {
    pub fn new(lo: Vec<f64>, hi: Vec<f64>) -> Result<Self> {
        if lo.len() != hi.len() {
            return Err(Error::DimensionMismatch {
                expected: lo.len(),
                got: hi.len(),
            });
        }
        for i in 0..lo.len() {
            if !lo[i].is_finite() || !hi[i].is_finite() {
                return Err(Error::NonFiniteCoordinate { index: i });
            }
            if lo[i] > hi[i] {
                return Err(Error::ContractViolation(alloc::format!(
                    "region bound lo[{i}] > hi[{i}]"
                )));
            }
        }
        Ok(Region { lo, hi })
    }

    /// Symmetric box `[c−r, c+r]` around a center.
    pub fn ball(center: &[f64], r: f64) -> Result<Self> {
        Region::new(
            center.iter().map(|c| c - r).collect(),
            center.iter().map(|c| c + r).collect(),
        )
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    pub fn contains(&self, x: &[f64], tol: f64) -> bool {
        x.iter()
            .zip(self.lo.iter().zip(&self.hi))
            .all(|(v, (l, h))| *v >= l - tol && *v <= h + tol)
    }

    pub fn clamp(&self, x: &[f64]) -> Vec<f64> {
        x.iter()
            .zip(self.lo.iter().zip(&self.hi))
            .map(|(v, (l, h))| v.max(*l).min(*h))
            .collect()
    }

    /// Half of the largest side length.
    pub fn radius(&self) -> f64 {
        self.lo
            .iter()
            .zip(&self.hi)
            .map(|(l, h)| (h - l) / 2.0)
            .fold(0.0, f64::max)
    }
}

/// Hard cap on the number of points a single grid sweep may enumerate.
pub const GRID_BUDGET: u64 = 10_000_000;

/// A uniform lattice over a region with fixed step per axis.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct GridSpec {
    pub region: Region,
    pub step: f64,
}

impl GridSpec {
    pub fn new(region: Region, step: f64) -> Result<Self> {
        if !(step > 0.0) || !step.is_finite() {
            return Err(Error::ContractViolation(alloc::format!(
                "grid step must be positive and finite, got {step}"
            )));
        }
        let g = GridSpec { region, step };
        let n = g.point_count()?;
        let _ = n;
        Ok(g)
    }

    fn counts(&self) -> Vec<u64> {
        self.region
            .lo
            .iter()
            .zip(&self.region.hi)
            .map(|(l, h)| ((h - l) / self.step + 1e-9).floor() as u64 + 1)
            .collect()
    }

    pub fn point_count(&self) -> Result<u64> {
        let mut total: u64 = 1;
        for c in self.counts() {
            total = total.saturating_mul(c);
            if total > GRID_BUDGET {
                return Err(Error::BudgetExceeded {
                    points: total,
                    budget: GRID_BUDGET,
                });
            }
        }
        Ok(total)
    }

    /// Enumerates all lattice points, row-major, deterministically.
    pub fn points(&self) -> Result<Vec<Vec<f64>>> {
        let total = self.point_count()?;
        let counts = self.counts();
        let dim = counts.len();
        let mut out = Vec::with_capacity(total as usize);
        let mut idx = vec![0u64; dim];
        loop {
            let pt: Vec<f64> = (0..dim)
                .map(|i| self.region.lo[i] + idx[i] as f64 * self.step)
                .collect();
            out.push(pt);
            let mut axis = dim;
            loop {
                if axis == 0 {
                    return Ok(out);
                }
                axis -= 1;
                idx[axis] += 1;
                if idx[axis] < counts[axis] {
                    break;
                }
                idx[axis] = 0;
            }
        }
    }
}

// ---------------------------------------------------------------------------
// closed sets
// ---------------------------------------------------------------------------

/// A closed halfspace `⟨normal, x⟩ ≤ offset`.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct Halfspace {
    pub normal: Vec<f64>,
    pub offset: f64,
}

/// Finite-dimensional closed sets with exact distance, projection and
/// membership evaluators.
///
/// `Union` is the only nonconvex representation; its distance is the minimum
/// over branches. `CartesianProduct` measures distance with the sum metric,
/// so product distances decompose exactly. Box bounds may be `±∞`.
#[derive(Clone, Debug)]
pub enum ClosedSetRep {
    /// A finite list of points; empty list represents the empty set.
    FiniteCloud(Vec<RealVector>),
    /// Intersection of halfspaces `⟨a_i, x⟩ ≤ b_i` (a convex polyhedron).
    HalfspaceIntersection(Vec<Halfspace>),
    /// Closed Euclidean ball.
    ClosedBall { center: RealVector, radius: f64 },
    /// A single point.
    Singleton(RealVector),
    /// Axis-aligned closed box; bounds may be infinite. Empty iff some
    /// `lo[i] > hi[i]`.
    Box { lo: Vec<f64>, hi: Vec<f64> },
    /// Product of sets, measured with the sum metric.
    CartesianProduct(Vec<ClosedSetRep>),
    /// `{y ∈ ℝ : |y| ≥ radius}` — complement of an open ball in one
    /// dimension.
    AbsComplement { radius: f64 },
    /// Finite union of branches.
    Union(Vec<ClosedSetRep>),
}

impl ClosedSetRep {
    /// Singleton at the origin of `ℝ^dim`.
    pub fn zero(dim: usize) -> Self {
        ClosedSetRep::Singleton(RealVector::new(vec![0.0; dim]).unwrap())
    }

    /// The whole space `ℝ^dim` as an unbounded box.
    pub fn all(dim: usize) -> Self {
        ClosedSetRep::Box {
            lo: vec![f64::NEG_INFINITY; dim],
            hi: vec![f64::INFINITY; dim],
        }
    }

    /// `{y ∈ ℝ : y ≥ t}` as a one-dimensional box.
    pub fn halfline_ge(t: f64) -> Self {
        ClosedSetRep::Box {
            lo: vec![t],
            hi: vec![f64::INFINITY],
        }
    }

    pub fn ambient_dim(&self) -> usize {
        match self {
            ClosedSetRep::FiniteCloud(pts) => pts.first().map_or(0, |p| p.dim()),
            ClosedSetRep::HalfspaceIntersection(hs) => {
                hs.first().map_or(0, |h| h.normal.len())
            }
            ClosedSetRep::ClosedBall { center, .. } => center.dim(),
            ClosedSetRep::Singleton(p) => p.dim(),
            ClosedSetRep::Box { lo, .. } => lo.len(),
            ClosedSetRep::CartesianProduct(parts) => {
                parts.iter().map(|p| p.ambient_dim()).sum()
            }
            ClosedSetRep::AbsComplement { .. } => 1,
            ClosedSetRep::Union(branches) => {
                branches.first().map_or(0, |b| b.ambient_dim())
            }
        }
    }

    /// Emptiness is decidable per variant. Halfspace intersections use
    /// Fourier–Motzkin elimination.
    pub fn is_empty(&self) -> bool {
        match self {
            ClosedSetRep::FiniteCloud(pts) => pts.is_empty(),
            ClosedSetRep::HalfspaceIntersection(hs) => fm_infeasible(hs),
            ClosedSetRep::ClosedBall { .. } => false,
            ClosedSetRep::Singleton(_) => false,
            ClosedSetRep::Box { lo, hi } => {
                lo.iter().zip(hi).any(|(l, h)| l > h)
            }
            ClosedSetRep::CartesianProduct(parts) => {
                parts.iter().any(|p| p.is_empty())
            }
            ClosedSetRep::AbsComplement { .. } => false,
            ClosedSetRep::Union(branches) => branches.iter().all(|b| b.is_empty()),
        }
    }

    /// Variant-specific membership test (independent of [`Self::dist`]).
    pub fn contains(&self, y: &[f64], tol: f64) -> bool {
        match self {
            ClosedSetRep::FiniteCloud(pts) => {
                pts.iter().any(|p| euclid(p.coords(), y) <= tol)
            }
            ClosedSetRep::HalfspaceIntersection(hs) => hs.iter().all(|h| {
                let scale = norm(&h.normal).max(1e-300);
                dot(&h.normal, y) - h.offset <= tol * scale
            }),
            ClosedSetRep::ClosedBall { center, radius } => {
                euclid(center.coords(), y) <= radius + tol
            }
            ClosedSetRep::Singleton(p) => euclid(p.coords(), y) <= tol,
            ClosedSetRep::Box { lo, hi } => y
                .iter()
                .zip(lo.iter().zip(hi))
                .all(|(v, (l, h))| *v >= l - tol && *v <= h + tol),
            ClosedSetRep::CartesianProduct(parts) => {
                let mut off = 0;
                for p in parts {
                    let n = p.ambient_dim();
                    if !p.contains(&y[off..off + n], tol) {
                        return false;
                    }
                    off += n;
                }
                true
            }
            ClosedSetRep::AbsComplement { radius } => y[0].abs() >= radius - tol,
            ClosedSetRep::Union(branches) => {
                branches.iter().any(|b| b.contains(y, tol))
            }
        }
    }

    /// Exact distance from `y` to the set; `+∞` iff the set is empty.
    /// 1-Lipschitz in `y` (for products, with respect to the sum metric).
    pub fn dist(&self, y: &[f64]) -> Result<ExtReal> {
        let dim = self.ambient_dim();
        if dim != y.len() && !matches!(self, ClosedSetRep::FiniteCloud(p) if p.is_empty())
        {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: y.len(),
            });
        }
        Ok(match self {
            ClosedSetRep::FiniteCloud(pts) => pts
                .iter()
                .map(|p| euclid(p.coords(), y))
                .fold(INF, f64::min),
            ClosedSetRep::HalfspaceIntersection(hs) => {
                if hs.iter().all(|h| {
                    dot(&h.normal, y) <= h.offset + TOL_PROJ * norm(&h.normal).max(1.0)
                }) {
                    // interior fast path, also covers the single-constraint case
                    let worst = hs
                        .iter()
                        .map(|h| {
                            (dot(&h.normal, y) - h.offset) / norm(&h.normal).max(1e-300)
                        })
                        .fold(f64::NEG_INFINITY, f64::max);
                    worst.max(0.0).min(TOL_PROJ)
                } else if hs.len() == 1 {
                    let h = &hs[0];
                    ((dot(&h.normal, y) - h.offset) / norm(&h.normal)).max(0.0)
                } else if self.is_empty() {
                    INF
                } else {
                    euclid(&dykstra(hs, y), y)
                }
            }
            ClosedSetRep::ClosedBall { center, radius } => {
                (euclid(center.coords(), y) - radius).max(0.0)
            }
            ClosedSetRep::Singleton(p) => euclid(p.coords(), y),
            ClosedSetRep::Box { lo, hi } => {
                if self.is_empty() {
                    INF
                } else {
                    y.iter()
                        .zip(lo.iter().zip(hi))
                        .map(|(v, (l, h))| {
                            let gap = (l - v).max(v - h).max(0.0);
                            gap * gap
                        })
                        .sum::<f64>()
                        .sqrt()
                }
            }
            ClosedSetRep::CartesianProduct(parts) => {
                // sum metric: distance decomposes over components
                let mut off = 0;
                let mut total = 0.0;
                for p in parts {
                    let n = p.ambient_dim();
                    total += p.dist(&y[off..off + n])?;
                    off += n;
                }
                total
            }
            ClosedSetRep::AbsComplement { radius } => (radius - y[0].abs()).max(0.0),
            ClosedSetRep::Union(branches) => {
                let mut best = INF;
                for b in branches {
                    best = best.min(b.dist(y)?);
                }
                best
            }
        })
    }

    /// Nearest point of the set (within [`TOL_PROJ`] for polyhedra).
    ///
    /// For `Union` the projection is taken on the nearest branch (ties go to
    /// the earliest branch), which makes it exact for nonconvex unions too.
    pub fn project(&self, y: &[f64]) -> Result<Vec<f64>> {
        if self.is_empty() {
            return Err(Error::NoProjection);
        }
        let dim = self.ambient_dim();
        if dim != y.len() {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: y.len(),
            });
        }
        Ok(match self {
            ClosedSetRep::FiniteCloud(pts) => {
                let mut best = pts[0].coords().to_vec();
                let mut bd = euclid(&best, y);
                for p in &pts[1..] {
                    let d = euclid(p.coords(), y);
                    if d < bd {
                        bd = d;
                        best = p.coords().to_vec();
                    }
                }
                best
            }
            ClosedSetRep::HalfspaceIntersection(hs) => {
                if hs
                    .iter()
                    .all(|h| dot(&h.normal, y) <= h.offset + 0.0)
                {
                    y.to_vec()
                } else if hs.len() == 1 {
                    project_halfspace(&hs[0], y)
                } else {
                    dykstra(hs, y)
                }
            }
            ClosedSetRep::ClosedBall { center, radius } => {
                let d = euclid(center.coords(), y);
                if d <= *radius {
                    y.to_vec()
                } else {
                    let c = center.coords();
                    let t = radius / d;
                    c.iter()
                        .zip(y)
                        .map(|(ci, yi)| ci + t * (yi - ci))
                        .collect()
                }
            }
            ClosedSetRep::Singleton(p) => p.coords().to_vec(),
            ClosedSetRep::Box { lo, hi } => y
                .iter()
                .zip(lo.iter().zip(hi))
                .map(|(v, (l, h))| v.max(*l).min(*h))
                .collect(),
            ClosedSetRep::CartesianProduct(parts) => {
                let mut out = Vec::with_capacity(dim);
                let mut off = 0;
                for p in parts {
                    let n = p.ambient_dim();
                    out.extend(p.project(&y[off..off + n])?);
                    off += n;
                }
                out
            }
            ClosedSetRep::AbsComplement { radius } => {
                let v = y[0];
                if v.abs() >= *radius {
                    vec![v]
                } else if v < 0.0 {
                    vec![-radius]
                } else {
                    // ties at v == 0 resolve to the positive side
                    vec![*radius]
                }
            }
            ClosedSetRep::Union(branches) => {
                let mut best: Option<(f64, Vec<f64>)> = None;
                for b in branches {
                    if b.is_empty() {
                        continue;
                    }
                    let z = b.project(y)?;
                    let d = euclid(&z, y);
                    if best.as_ref().map_or(true, |(bd, _)| d < *bd) {
                        best = Some((d, z));
                    }
                }
                best.ok_or(Error::NoProjection)?.1
            }
        })
    }

    /// Lattice points of `grid` belonging to the set within `tol`.
    pub fn sample_grid(&self, grid: &GridSpec, tol: f64) -> Result<Vec<RealVector>> {
        let mut out = Vec::new();
        for pt in grid.points()? {
            if self.contains(&pt, tol) {
                out.push(RealVector::new(pt)?);
            }
        }
        Ok(out)
    }
}

/// One-sided Hausdorff excess of a sampled set over `b`:
/// `sup_{a ∈ points} dist(a, b)`. Empty sample ⇒ `0` (empty inclusions hold).
pub fn excess_points(points: &[RealVector], b: &ClosedSetRep) -> Result<ExtReal> {
    let mut sup: f64 = 0.0;
    for a in points {
        sup = sup.max(b.dist(a.coords())?);
    }
    Ok(sup)
}

/// Excess of `a` over `b` with `a` materialized on a grid (finite clouds are
/// taken as-is).
pub fn excess(
    a: &ClosedSetRep,
    b: &ClosedSetRep,
    grid: &GridSpec,
    tol: f64,
) -> Result<ExtReal> {
    let sample = match a {
        ClosedSetRep::FiniteCloud(pts) => pts.clone(),
        _ => a.sample_grid(grid, tol)?,
    };
    excess_points(&sample, b)
}

fn project_halfspace(h: &Halfspace, y: &[f64]) -> Vec<f64> {
    let viol = dot(&h.normal, y) - h.offset;
    if viol <= 0.0 {
        return y.to_vec();
    }
    let nn = dot(&h.normal, &h.normal);
    let t = viol / nn;
    y.iter().zip(&h.normal).map(|(v, a)| v - t * a).collect()
}

/// Dykstra's alternating projection scheme for intersections of halfspaces.
/// Converges to the exact projection for convex polyhedra; iterated until
/// the per-cycle update falls below `TOL_PROJ/10`.
fn dykstra(hs: &[Halfspace], y: &[f64]) -> Vec<f64> {
    let dim = y.len();
    let mut x = y.to_vec();
    let mut corrections = vec![vec![0.0; dim]; hs.len()];
    for _cycle in 0..20_000 {
        let mut moved: f64 = 0.0;
        for (h, q) in hs.iter().zip(corrections.iter_mut()) {
            let shifted: Vec<f64> = x.iter().zip(q.iter()).map(|(a, b)| a + b).collect();
            let projected = project_halfspace(h, &shifted);
            for i in 0..dim {
                let new_q = shifted[i] - projected[i];
                moved += (projected[i] - x[i]).abs();
                q[i] = new_q;
                x[i] = projected[i];
            }
        }
        if moved <= TOL_PROJ / 10.0 {
            break;
        }
    }
    x
}

/// Fourier–Motzkin feasibility test for `⟨a_i, x⟩ ≤ b_i`.
fn fm_infeasible(hs: &[Halfspace]) -> bool {
    let dim = hs.first().map_or(0, |h| h.normal.len());
    let mut rows: Vec<(Vec<f64>, f64)> = hs
        .iter()
        .map(|h| (h.normal.clone(), h.offset))
        .collect();
    const CAP: usize = 4096;
    for axis in (0..dim).rev() {
        let mut pos = Vec::new();
        let mut neg = Vec::new();
        let mut zero = Vec::new();
        for (a, b) in rows {
            let c = a[axis];
            if c > 1e-12 {
                pos.push((a, b));
            } else if c < -1e-12 {
                neg.push((a, b));
            } else {
                zero.push((a, b));
            }
        }
        let mut next = zero;
        for (ap, bp) in &pos {
            for (an, bn) in &neg {
                // combine so the `axis` coefficient cancels
                let cp = ap[axis];
                let cn = -an[axis];
                let mut a: Vec<f64> = ap
                    .iter()
                    .zip(an)
                    .map(|(p, n)| p * cn + n * cp)
                    .collect();
                a[axis] = 0.0;
                let b = bp * cn + bn * cp;
                next.push((a, b));
                if next.len() > CAP {
                    // give up on exact elimination; only reachable for
                    // adversarial inputs far beyond the desk-scale catalog
                    return false;
                }
            }
        }
        rows = next;
    }
    rows.iter().any(|(_, b)| *b < -1e-9)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::TOL_FEAS;

    fn rv(c: &[f64]) -> RealVector {
        RealVector::new(c.to_vec()).unwrap()
    }

    #[test]
    fn vector_rejects_non_finite() {
        assert!(RealVector::new(vec![0.0, f64::NAN]).is_err());
        assert!(RealVector::new(vec![f64::INFINITY]).is_err());
        assert_eq!(rv(&[1.0, 2.0]).dim(), 2);
    }

    #[test]
    fn dist_box_endpoint() {
        // nearest endpoint of [1,2] seen from 0
        let s = ClosedSetRep::Box {
            lo: vec![1.0],
            hi: vec![2.0],
        };
        assert_eq!(s.dist(&[0.0]).unwrap(), 1.0);
    }

    #[test]
    fn dist_abs_complement() {
        let s = ClosedSetRep::AbsComplement { radius: 6.0 };
        assert_eq!(s.dist(&[0.0]).unwrap(), 6.0);
        assert_eq!(s.dist(&[7.0]).unwrap(), 0.0);
        assert_eq!(s.dist(&[-2.0]).unwrap(), 4.0);
    }

    #[test]
    fn dist_halfspace() {
        // x1 + x2 ≥ 1 ⇔ −x1 − x2 ≤ −1
        let s = ClosedSetRep::HalfspaceIntersection(vec![Halfspace {
            normal: vec![-1.0, -1.0],
            offset: -1.0,
        }]);
        let d = s.dist(&[0.0, 0.0]).unwrap();
        assert!((d - 1.0 / 2.0_f64.sqrt()).abs() < 1e-12, "d = {d}");
    }

    #[test]
    fn project_box_and_halfspace() {
        let b = ClosedSetRep::Box {
            lo: vec![0.0],
            hi: vec![1.0],
        };
        assert_eq!(b.project(&[3.0]).unwrap(), vec![1.0]);
        let s = ClosedSetRep::HalfspaceIntersection(vec![Halfspace {
            normal: vec![-1.0, -1.0],
            offset: -1.0,
        }]);
        let z = s.project(&[0.0, 0.0]).unwrap();
        assert!((z[0] - 0.5).abs() < 1e-9 && (z[1] - 0.5).abs() < 1e-9);
    }

    #[test]
    fn project_union_nearest_branch() {
        // (−∞,−1] ∪ {0}: nearest branch from 0 is {0} itself
        let s = ClosedSetRep::Union(vec![
            ClosedSetRep::Box {
                lo: vec![f64::NEG_INFINITY],
                hi: vec![-1.0],
            },
            ClosedSetRep::zero(1),
        ]);
        assert_eq!(s.project(&[0.0]).unwrap(), vec![0.0]);
        assert_eq!(s.project(&[-0.9]).unwrap(), vec![-1.0]);
    }

    #[test]
    fn empty_set_conventions() {
        let empty = ClosedSetRep::FiniteCloud(Vec::new());
        assert!(empty.is_empty());
        assert_eq!(empty.dist(&[0.0]).unwrap(), INF);
        assert!(matches!(empty.project(&[0.0]), Err(Error::NoProjection)));

        let inverted = ClosedSetRep::Box {
            lo: vec![1.0],
            hi: vec![0.0],
        };
        assert!(inverted.is_empty());
        assert_eq!(inverted.dist(&[0.5]).unwrap(), INF);
    }

    #[test]
    fn fm_detects_infeasible_polyhedron() {
        // x ≤ −1 together with −x ≤ −1 (x ≥ 1)
        let hs = vec![
            Halfspace {
                normal: vec![1.0],
                offset: -1.0,
            },
            Halfspace {
                normal: vec![-1.0],
                offset: -1.0,
            },
        ];
        assert!(ClosedSetRep::HalfspaceIntersection(hs.clone()).is_empty());
        // relax the second: x ≥ −2 — feasible
        let hs2 = vec![
            Halfspace {
                normal: vec![1.0],
                offset: -1.0,
            },
            Halfspace {
                normal: vec![-1.0],
                offset: 2.0,
            },
        ];
        assert!(!ClosedSetRep::HalfspaceIntersection(hs2).is_empty());
    }

    #[test]
    fn dykstra_wedge_projection() {
        // wedge {x ≤ 0, y ≤ 0} seen from (1,1): projection is the vertex
        let s = ClosedSetRep::HalfspaceIntersection(vec![
            Halfspace {
                normal: vec![1.0, 0.0],
                offset: 0.0,
            },
            Halfspace {
                normal: vec![0.0, 1.0],
                offset: 0.0,
            },
        ]);
        let z = s.project(&[1.0, 1.0]).unwrap();
        assert!(norm(&z) < 1e-8, "z = {z:?}");
        assert!((s.dist(&[1.0, 1.0]).unwrap() - 2.0_f64.sqrt()).abs() < 1e-8);
    }

    #[test]
    fn product_distance_is_sum() {
        let a = ClosedSetRep::Box {
            lo: vec![1.0],
            hi: vec![2.0],
        };
        let b = ClosedSetRep::AbsComplement { radius: 2.0 };
        let prod = ClosedSetRep::CartesianProduct(vec![a.clone(), b.clone()]);
        let d = prod.dist(&[0.0, 0.5]).unwrap();
        let da = a.dist(&[0.0]).unwrap();
        let db = b.dist(&[0.5]).unwrap();
        assert_eq!(d, da + db);
    }

    #[test]
    fn excess_examples() {
        // A = {0, 1}, B = [0, 0.5] → 0.5
        let a = ClosedSetRep::FiniteCloud(vec![rv(&[0.0]), rv(&[1.0])]);
        let b = ClosedSetRep::Box {
            lo: vec![0.0],
            hi: vec![0.5],
        };
        let grid = GridSpec::new(Region::new(vec![-1.0], vec![1.0]).unwrap(), 0.5).unwrap();
        assert_eq!(excess(&a, &b, &grid, TOL_FEAS).unwrap(), 0.5);

        // empty A → 0 by convention
        let empty = ClosedSetRep::FiniteCloud(Vec::new());
        assert_eq!(excess(&empty, &b, &grid, TOL_FEAS).unwrap(), 0.0);

        // A = [−2,2] sampled at step 0.5, B = {|y| ≥ 1} → 1 (attained at 0)
        let a2 = ClosedSetRep::Box {
            lo: vec![-2.0],
            hi: vec![2.0],
        };
        let b2 = ClosedSetRep::AbsComplement { radius: 1.0 };
        let grid2 =
            GridSpec::new(Region::new(vec![-2.0], vec![2.0]).unwrap(), 0.5).unwrap();
        assert_eq!(excess(&a2, &b2, &grid2, TOL_FEAS).unwrap(), 1.0);
    }

    #[test]
    fn grid_enumerates_lattice() {
        let g = GridSpec::new(Region::new(vec![-1.0], vec![1.0]).unwrap(), 0.5).unwrap();
        let pts = g.points().unwrap();
        assert_eq!(pts.len(), 5);
        assert_eq!(pts[0], vec![-1.0]);
        assert_eq!(pts[4], vec![1.0]);
    }

    #[test]
    fn grid_budget_enforced() {
        let r = Region::new(vec![0.0, 0.0, 0.0], vec![1.0, 1.0, 1.0]).unwrap();
        let err = GridSpec::new(r, 1e-4).and_then(|g| g.point_count());
        assert!(matches!(err, Err(Error::BudgetExceeded { .. })));
    }

    #[test]
    fn sum_metric_and_dual_norm() {
        let m = MetricSpec::product(&[MetricSpec::simple(2), MetricSpec::simple(1)]);
        let a = [0.0, 0.0, 0.0];
        let b = [3.0, 4.0, 2.0];
        assert_eq!(m.dist(&a, &b), 5.0 + 2.0);
        assert_eq!(m.dual_norm(&[3.0, 4.0, 2.0]), 5.0);
    }
}
