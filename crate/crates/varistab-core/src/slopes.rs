//! Sampling estimators for the strong slope, the strict outer slope, and the
//! partial (state-only) strict outer slope.
//!
//! A limit `ε → 0⁺` is reported as the value at the finest sampled level,
//! together with a level-monotonicity diagnostic — never extrapolated, since
//! extrapolation can manufacture false convergence on nonsmooth data. The
//! infimum over an empty qualifying set is `+∞` and is flagged as such.

use alloc::sync::Arc;
use alloc::vec::Vec;

#[allow(unused_imports)] // provides f64 math in no_std builds
use num_traits::Float;

use crate::metric::MetricSpec;
use crate::sample::{ball_points, LdStream};
use crate::{Error, ExtReal, Result, INF};

/// Geometric ladder of sampling radii `ε_k = ε₀ ρᵏ`.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct RadiusSchedule {
    pub eps0: f64,
    pub decay: f64,
    pub levels: usize,
    pub samples_per_level: usize,
    pub seed: u64,
}

impl RadiusSchedule {
    pub fn new(
        eps0: f64,
        decay: f64,
        levels: usize,
        samples_per_level: usize,
        seed: u64,
    ) -> Result<Self> {
        if !(eps0 > 0.0 && eps0.is_finite()) {
            return Err(Error::ContractViolation(alloc::format!(
                "eps0 must be positive, got {eps0}"
            )));
        }
        if !(decay > 0.0 && decay < 1.0) {
            return Err(Error::ContractViolation(alloc::format!(
                "decay must lie in (0,1), got {decay}"
            )));
        }
        if levels < 3 {
            return Err(Error::ContractViolation(alloc::format!(
                "at least 3 levels required, got {levels}"
            )));
        }
        if samples_per_level < 64 {
            return Err(Error::ContractViolation(alloc::format!(
                "at least 64 samples per level required, got {samples_per_level}"
            )));
        }
        Ok(RadiusSchedule {
            eps0,
            decay,
            levels,
            samples_per_level,
            seed,
        })
    }

    /// Default schedule used by the checkers.
    pub fn standard(seed: u64) -> Self {
        RadiusSchedule {
            eps0: 0.5,
            decay: 0.5,
            levels: 9,
            samples_per_level: 128,
            seed,
        }
    }

    pub fn radii(&self) -> Vec<f64> {
        (0..self.levels)
            .map(|k| self.eps0 * self.decay.powi(k as i32))
            .collect()
    }

    pub fn finest(&self) -> f64 {
        self.eps0 * self.decay.powi(self.levels as i32 - 1)
    }

    /// Schedule for the inner strong slopes inside a strict outer slope.
    fn inner(&self) -> RadiusSchedule {
        RadiusSchedule {
            eps0: self.finest() * 0.5,
            decay: 0.4,
            levels: 3,
            samples_per_level: 64,
            seed: self.seed.wrapping_mul(0x9E3779B97F4A7C15).wrapping_add(1),
        }
    }
}

/// Per-radius slope values with the reported finest-level value and
/// convergence diagnostics.
#[derive(Clone, Debug)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct SlopeEstimate {
    pub radii: Vec<f64>,
    /// One value per level; `+∞` marks an empty qualifying set.
    #[cfg_attr(feature = "serde", serde(serialize_with = "crate::serde_ext::ser_vec"))]
    pub per_level: Vec<ExtReal>,
    /// Value at the finest level.
    #[cfg_attr(feature = "serde", serde(serialize_with = "crate::serde_ext::ser_ext"))]
    pub value: ExtReal,
    /// Whether the level trend matches the defining limit (nonincreasing for
    /// the strong slope, nondecreasing for strict outer slopes), up to
    /// sampling noise.
    pub monotone: bool,
    /// Sampled evidence that the point is a local minimizer; forces value 0.
    pub local_min: bool,
    /// Every level had an empty qualifying set.
    pub vacuous: bool,
}

/// Produces candidate points in metric balls, optionally attached to a
/// feasible structure (a graph or constraint set) before use.
#[derive(Clone)]
pub struct Sampler {
    metric: MetricSpec,
    attach: Option<Arc<dyn Fn(&[f64]) -> Option<Vec<f64>> + Send + Sync>>,
}

impl Sampler {
    /// Samples the ambient space.
    pub fn ambient(metric: MetricSpec) -> Self {
        Sampler {
            metric,
            attach: None,
        }
    }

    /// Samples the ambient space and maps every candidate through `attach`
    /// (e.g. a projection onto a graph); candidates that fail to attach or
    /// leave the ball are discarded.
    pub fn attached(
        metric: MetricSpec,
        attach: impl Fn(&[f64]) -> Option<Vec<f64>> + Send + Sync + 'static,
    ) -> Self {
        Sampler {
            metric,
            attach: Some(Arc::new(attach)),
        }
    }

    pub fn metric(&self) -> &MetricSpec {
        &self.metric
    }

    fn refine(&self, z: &[f64]) -> Option<Vec<f64>> {
        match &self.attach {
            None => Some(z.to_vec()),
            Some(f) => f(z),
        }
    }

    pub fn sample(
        &self,
        center: &[f64],
        radius: f64,
        count: usize,
        stream: &mut LdStream,
    ) -> Vec<Vec<f64>> {
        let oversample = if self.attach.is_some() { 3 } else { 1 };
        let raw = ball_points(center, radius, count * oversample, &self.metric, stream);
        let mut out = Vec::with_capacity(count);
        for z in raw {
            let Some(w) = self.refine(&z) else { continue };
            let d = self.metric.dist(&w, center);
            if d > 0.0 && d <= radius {
                out.push(w);
                if out.len() == count {
                    break;
                }
            }
        }
        out
    }
}

fn descent_quotient(g_at_x: f64, g_at_z: ExtReal, d: f64) -> f64 {
    if d <= 0.0 {
        return 0.0;
    }
    let drop = g_at_x - g_at_z;
    if drop <= 0.0 {
        0.0
    } else {
        drop / d
    }
}

/// Strong slope of `g` at `x`: the maximal local descent rate
/// `limsup_{z→x} (g(x)−g(z))⁺ / d(z,x)`, realized as the supremum over
/// sampled shrinking balls, with a deterministic local refinement at the
/// finest level. Equals the gradient norm for smooth `g`.
pub fn strong_slope(
    g: &dyn Fn(&[f64]) -> ExtReal,
    x: &[f64],
    sched: &RadiusSchedule,
    sampler: &Sampler,
) -> Result<SlopeEstimate> {
    let gx = g(x);
    if !gx.is_finite() {
        return Err(Error::DomainError(alloc::format!(
            "function value at the base point is {gx}"
        )));
    }
    let metric = sampler.metric().clone();
    let radii = sched.radii();
    let mut stream = LdStream::new(metric.total_dim(), sched.seed);
    let mut per_level = Vec::with_capacity(radii.len());
    let mut any_descent = false;
    let mut best_finest: Option<(f64, Vec<f64>)> = None;

    for (k, eps) in radii.iter().enumerate() {
        let finest = k + 1 == radii.len();
        let pts = sampler.sample(x, *eps, sched.samples_per_level, &mut stream);
        let mut vk: f64 = 0.0;
        for z in pts {
            let gz = g(&z);
            let q = descent_quotient(gx, gz, metric.dist(&z, x));
            if finest && gz < gx {
                any_descent = true;
            }
            if q > vk {
                vk = q;
                if finest {
                    best_finest = Some((q, z));
                }
            }
        }
        per_level.push(vk);
    }

    // local refinement at the finest level: direction moves at constant
    // radius, radial shrinks toward x, and fresh probes from x itself, all
    // attached and kept inside the ball
    let eps_f = *radii.last().unwrap();
    let floor = eps_f * 1e-7;
    {
        let dim = metric.total_dim();
        let (mut q_best, mut z_best) = match best_finest {
            Some((q, z)) => (q, Some(z)),
            None => (0.0, None),
        };
        let mut step = eps_f * 0.25;
        while step > floor {
            let mut improved = false;
            let mut candidates: Vec<Vec<f64>> = Vec::with_capacity(4 * dim + 3);
            if let Some(zb) = &z_best {
                let r = metric.dist(zb, x);
                for i in 0..dim {
                    for s in [1.0, -1.0] {
                        let mut c = zb.clone();
                        c[i] += s * step;
                        // rescale back to the current radius so the move
                        // refines the direction without a radius trade-off
                        let d = metric.dist(&c, x);
                        if d > 0.0 {
                            let t = r / d;
                            let c2: Vec<f64> = x
                                .iter()
                                .zip(&c)
                                .map(|(xi, ci)| xi + t * (ci - xi))
                                .collect();
                            candidates.push(c2);
                        }
                        candidates.push(c);
                    }
                }
                for t in [0.5, 0.25, 0.0625] {
                    let c: Vec<f64> = x
                        .iter()
                        .zip(zb)
                        .map(|(xi, zi)| xi + t * (zi - xi))
                        .collect();
                    candidates.push(c);
                }
            }
            for i in 0..dim {
                for s in [1.0, -1.0] {
                    let mut c = x.to_vec();
                    c[i] += s * step;
                    candidates.push(c);
                }
            }
            for c in candidates {
                let Some(w) = sampler.refine(&c) else { continue };
                let d = metric.dist(&w, x);
                if d < floor || d > eps_f {
                    continue;
                }
                let gz = g(&w);
                if gz < gx {
                    any_descent = true;
                }
                let q = descent_quotient(gx, gz, d);
                if q > q_best {
                    q_best = q;
                    z_best = Some(w);
                    improved = true;
                }
            }
            if !improved {
                step *= 0.5;
            }
        }
        let last = per_level.len() - 1;
        per_level[last] = per_level[last].max(q_best);
    }

    let local_min = !any_descent;
    let value = if local_min {
        0.0
    } else {
        *per_level.last().unwrap()
    };
    let monotone = is_monotone(&per_level, false);
    Ok(SlopeEstimate {
        radii,
        per_level,
        value,
        monotone,
        local_min,
        vacuous: false,
    })
}

/// Strict outer slope of `g` at `x̄`:
/// `lim_{ε→0⁺} inf { |∇g|(z) : z ∈ B(x̄,ε), g(x̄) < g(z) ≤ g(x̄)+ε }`.
///
/// Per level, the infimum of sampled strong slopes over qualifying points;
/// `+∞` (flagged) when no qualifying point is found at a level.
pub fn strict_outer_slope(
    g: &dyn Fn(&[f64]) -> ExtReal,
    x_bar: &[f64],
    sched: &RadiusSchedule,
    sampler: &Sampler,
) -> Result<SlopeEstimate> {
    let g0 = g(x_bar);
    if !g0.is_finite() {
        return Err(Error::DomainError(alloc::format!(
            "function value at the reference point is {g0}"
        )));
    }
    let metric = sampler.metric().clone();
    let radii = sched.radii();
    let mut stream = LdStream::new(metric.total_dim(), sched.seed ^ 0x5DEE_CE66);
    let inner = sched.inner();
    let qual_cap = sched.samples_per_level.min(64);
    let mut per_level = Vec::with_capacity(radii.len());

    for eps in &radii {
        let cands = sampler.sample(x_bar, *eps, 3 * sched.samples_per_level, &mut stream);
        let mut vk: f64 = INF;
        let mut used = 0usize;
        for z in cands {
            let gz = g(&z);
            if !(gz > g0 && gz <= g0 + eps) {
                continue;
            }
            let est = strong_slope(g, &z, &inner, sampler)?;
            vk = vk.min(est.value);
            used += 1;
            if used >= qual_cap {
                break;
            }
        }
        per_level.push(vk);
    }

    let value = *per_level.last().unwrap();
    let vacuous = per_level.iter().all(|v| !v.is_finite());
    let monotone = is_monotone(&per_level, true);
    Ok(SlopeEstimate {
        radii,
        per_level,
        value,
        monotone,
        local_min: false,
        vacuous,
    })
}

/// Partial strict outer slope of `ψ(p,x)` with respect to `x`:
/// qualification runs over `(p,x) ∈ B(p̄,ε) × B(x̄,ε)` with
/// `ψ(p̄,x̄) < ψ(p,x) ≤ ψ(p̄,x̄)+ε`, while the inner strong slope is taken
/// in `x` only, with `p` frozen.
pub fn partial_strict_outer_slope_x(
    psi: &dyn Fn(&[f64], &[f64]) -> ExtReal,
    p_bar: &[f64],
    x_bar: &[f64],
    p_metric: &MetricSpec,
    sched: &RadiusSchedule,
    x_sampler: &Sampler,
) -> Result<SlopeEstimate> {
    let psi0 = psi(p_bar, x_bar);
    if !psi0.is_finite() {
        return Err(Error::DomainError(alloc::format!(
            "ψ(p̄,x̄) is {psi0}"
        )));
    }
    let x_metric = x_sampler.metric().clone();
    let radii = sched.radii();
    let mut p_stream = LdStream::new(p_metric.total_dim(), sched.seed ^ 0xA5A5_3C3C);
    let mut x_stream = LdStream::new(x_metric.total_dim(), sched.seed ^ 0x0F0F_1111);
    let inner = sched.inner();
    let qual_cap = sched.samples_per_level.min(64);
    let mut per_level = Vec::with_capacity(radii.len());

    for eps in &radii {
        let n = 3 * sched.samples_per_level;
        let p_pts = ball_points(p_bar, *eps, n, p_metric, &mut p_stream);
        let mut x_pts = x_sampler.sample(x_bar, *eps, n, &mut x_stream);
        // x̄ itself is admissible in the qualification rectangle
        x_pts.push(x_bar.to_vec());
        let mut vk: f64 = INF;
        let mut used = 0usize;
        'outer: for (i, p) in p_pts.iter().enumerate() {
            // pair p with a few x candidates in stream order
            for j in 0..3usize {
                let Some(x) = x_pts.get((i * 3 + j) % x_pts.len().max(1)) else {
                    break;
                };
                let v = psi(p, x);
                if !(v > psi0 && v <= psi0 + eps) {
                    continue;
                }
                let frozen = |z: &[f64]| psi(p, z);
                let est = strong_slope(&frozen, x, &inner, x_sampler)?;
                vk = vk.min(est.value);
                used += 1;
                if used >= qual_cap {
                    break 'outer;
                }
            }
        }
        per_level.push(vk);
    }

    let value = *per_level.last().unwrap();
    let vacuous = per_level.iter().all(|v| !v.is_finite());
    let monotone = is_monotone(&per_level, true);
    Ok(SlopeEstimate {
        radii,
        per_level,
        value,
        monotone,
        local_min: false,
        vacuous,
    })
}

/// Trend check with absolute noise allowance 0.02 (scaled for large values).
fn is_monotone(values: &[ExtReal], nondecreasing: bool) -> bool {
    for w in values.windows(2) {
        let (a, b) = (w[0], w[1]);
        if !a.is_finite() && !b.is_finite() {
            continue;
        }
        let tol = 0.02 * a.abs().max(b.abs()).max(1.0).min(1e12);
        let ok = if nondecreasing {
            !b.is_finite() || b >= a - tol
        } else {
            !a.is_finite() || b <= a + tol
        };
        if !ok {
            return false;
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric::norm;
    use alloc::vec;

    fn simple_sampler(dim: usize) -> Sampler {
        Sampler::ambient(MetricSpec::simple(dim))
    }

    #[test]
    fn schedule_validation() {
        assert!(RadiusSchedule::new(0.5, 0.5, 5, 64, 0).is_ok());
        assert!(RadiusSchedule::new(0.0, 0.5, 5, 64, 0).is_err());
        assert!(RadiusSchedule::new(0.5, 1.0, 5, 64, 0).is_err());
        assert!(RadiusSchedule::new(0.5, 0.5, 2, 64, 0).is_err());
        assert!(RadiusSchedule::new(0.5, 0.5, 5, 32, 0).is_err());
        let s = RadiusSchedule::new(1.0, 0.5, 4, 64, 0).unwrap();
        assert_eq!(s.radii(), vec![1.0, 0.5, 0.25, 0.125]);
    }

    #[test]
    fn strong_slope_of_quadratic_is_gradient_norm() {
        // g(x) = x₁² + 2x₂² at (1,1): ‖∇g‖ = ‖(2,4)‖ = √20
        let g = |v: &[f64]| v[0] * v[0] + 2.0 * v[1] * v[1];
        let sched = RadiusSchedule::standard(3);
        let est = strong_slope(&g, &[1.0, 1.0], &sched, &simple_sampler(2)).unwrap();
        let expected = 20.0_f64.sqrt();
        assert!(
            (est.value - expected).abs() <= 1e-2,
            "slope {} vs {}",
            est.value,
            expected
        );
        assert!(!est.local_min);
    }

    #[test]
    fn strong_slope_constant_is_local_min() {
        let g = |_: &[f64]| 3.5;
        let sched = RadiusSchedule::standard(1);
        let est = strong_slope(&g, &[0.0], &sched, &simple_sampler(1)).unwrap();
        assert!(est.local_min);
        assert_eq!(est.value, 0.0);
    }

    #[test]
    fn strong_slope_of_abs_y_under_sum_metric() {
        // g(x,y) = |y| with the sum metric: slope 1 at any point with y ≠ 0
        let g = |v: &[f64]| v[1].abs();
        let m = MetricSpec::product(&[MetricSpec::simple(1), MetricSpec::simple(1)]);
        let sched = RadiusSchedule::standard(5);
        let s = Sampler::ambient(m);
        for pt in [[0.3, 0.7], [-0.5, -0.2]] {
            let est = strong_slope(&g, &pt, &sched, &s).unwrap();
            assert!((est.value - 1.0).abs() <= 1e-2, "slope {}", est.value);
        }
    }

    #[test]
    fn strong_slope_domain_error() {
        let g = |_: &[f64]| INF;
        let sched = RadiusSchedule::standard(0);
        assert!(matches!(
            strong_slope(&g, &[0.0], &sched, &simple_sampler(1)),
            Err(Error::DomainError(_))
        ));
    }

    #[test]
    fn strict_outer_slope_of_abs() {
        let g = |v: &[f64]| v[0].abs();
        let sched = RadiusSchedule::standard(7);
        let est = strict_outer_slope(&g, &[0.0], &sched, &simple_sampler(1)).unwrap();
        assert!((est.value - 1.0).abs() <= 1e-2, "value {}", est.value);
        assert!(!est.vacuous);
    }

    #[test]
    fn strict_outer_slope_smooth_matches_gradient() {
        let g = |v: &[f64]| v[0] * v[0];
        let sched = RadiusSchedule::standard(9);
        let est = strict_outer_slope(&g, &[1.0], &sched, &simple_sampler(1)).unwrap();
        assert!((est.value - 2.0).abs() <= 1e-2, "value {}", est.value);
    }

    #[test]
    fn strict_outer_slope_vacuous_for_indicator() {
        // indicator of [0,∞): every nearby value is 0 or +∞, never in
        // (g(x̄), g(x̄)+ε] — qualifying set empty, inf over empty = +∞
        let g = |v: &[f64]| if v[0] >= 0.0 { 0.0 } else { INF };
        let sched = RadiusSchedule::standard(2);
        let est = strict_outer_slope(&g, &[0.0], &sched, &simple_sampler(1)).unwrap();
        assert!(est.vacuous);
        assert_eq!(est.value, INF);
    }

    #[test]
    fn partial_slope_affine_tracking() {
        // ψ(p,x) = |x − p|: the x-slope is 1 at every qualifying point
        let psi = |p: &[f64], x: &[f64]| (x[0] - p[0]).abs();
        let sched = RadiusSchedule::standard(11);
        let pm = MetricSpec::simple(1);
        let est = partial_strict_outer_slope_x(
            &psi,
            &[0.0],
            &[0.0],
            &pm,
            &sched,
            &simple_sampler(1),
        )
        .unwrap();
        assert!((est.value - 1.0).abs() <= 0.05, "value {}", est.value);
    }

    #[test]
    fn partial_slope_bilinear_degenerates() {
        // ψ(p,x) = |px|: qualifying points carry x-slope |p| → inf tends to 0
        let psi = |p: &[f64], x: &[f64]| (p[0] * x[0]).abs();
        let sched = RadiusSchedule::standard(13);
        let pm = MetricSpec::simple(1);
        let est = partial_strict_outer_slope_x(
            &psi,
            &[0.0],
            &[0.0],
            &pm,
            &sched,
            &simple_sampler(1),
        )
        .unwrap();
        assert!(
            est.value <= 0.05,
            "degenerate partial slope should approach 0, got {}",
            est.value
        );
    }

    #[test]
    fn slope_sum_rule_lower_bound() {
        // slope(φ+ψ) ≥ slope(φ) − k for k-Lipschitz ψ
        let phi = |v: &[f64]| v[0].abs();
        let k = 0.5;
        let combined = move |v: &[f64]| v[0].abs() + k * v[0];
        let sched = RadiusSchedule::standard(17);
        let s = simple_sampler(1);
        for x in [[0.0], [0.3], [-0.2]] {
            let a = strong_slope(&phi, &x, &sched, &s).unwrap().value;
            let b = strong_slope(&combined, &x, &sched, &s).unwrap().value;
            assert!(b >= a - k - 0.05, "x={x:?}: {b} < {a} - {k} - 0.05");
        }
    }

    #[test]
    fn attached_sampler_stays_on_line() {
        // sample the line y = 0 inside ℝ² and measure |x| along it
        let m = MetricSpec::product(&[MetricSpec::simple(1), MetricSpec::simple(1)]);
        let s = Sampler::attached(m, |z| Some(vec![z[0], 0.0]));
        let g = |v: &[f64]| if v[1] == 0.0 { v[0].abs() } else { INF };
        let sched = RadiusSchedule::standard(19);
        let est = strict_outer_slope(&g, &[0.0, 0.0], &sched, &s).unwrap();
        assert!((est.value - 1.0).abs() <= 0.05, "value {}", est.value);
    }

    #[test]
    fn gradient_norm_property_over_random_quadratics() {
        // deterministic "random" quadratics from the LD stream
        let mut stream = LdStream::new(6, 99);
        for _ in 0..20 {
            let u = stream.next_unit();
            let (a, b, c) = (4.0 * u[0] - 2.0, 4.0 * u[1] - 2.0, 4.0 * u[2] - 2.0);
            let (x0, y0) = (2.0 * u[3] - 1.0, 2.0 * u[4] - 1.0);
            let g = move |v: &[f64]| {
                a * v[0] * v[0] + b * v[1] * v[1] + c * v[0] * v[1]
            };
            let grad = [
                2.0 * a * x0 + c * y0,
                2.0 * b * y0 + c * x0,
            ];
            let gn = norm(&grad);
            let sched = RadiusSchedule::standard(7);
            let est = strong_slope(&g, &[x0, y0], &sched, &simple_sampler(2)).unwrap();
            assert!(
                (est.value - gn).abs() <= (1e-2_f64).max(1e-2 * gn),
                "slope {} vs gradient norm {}",
                est.value,
                gn
            );
        }
    }
}
