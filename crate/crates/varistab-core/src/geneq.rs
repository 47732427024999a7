//! Parameterized generalized equations `f(p,x) ∈ F(p,x)`, their displacement
//! functions, and brute-force grid enumeration of the solution mapping
//! `G(p) = {x : f(p,x) ∈ F(p,x)}`.

use alloc::format;
use alloc::sync::Arc;
use alloc::vec::Vec;

use crate::metric::{ClosedSetRep, GridSpec, MetricSpec, RealVector, Region};
use crate::sample::{ball_points, LdStream};
use crate::slopes::RadiusSchedule;
use crate::{Error, ExtReal, Result, INF};

type VecFn = Arc<dyn Fn(&[f64], &[f64]) -> Vec<f64> + Send + Sync>;
type JacFn = Arc<dyn Fn(&[f64], &[f64]) -> Vec<Vec<f64>> + Send + Sync>;
type SetFn = Arc<dyn Fn(&[f64], &[f64]) -> ClosedSetRep + Send + Sync>;
type ScalarXFn = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;

/// The single-valued base `f : P × X → Y`.
#[derive(Clone)]
pub struct BaseFn {
    eval: VecFn,
    jac_x: Option<JacFn>,
    dim_p: usize,
    dim_x: usize,
    dim_y: usize,
    null: bool,
}

impl BaseFn {
    pub fn new(
        dim_p: usize,
        dim_x: usize,
        dim_y: usize,
        eval: impl Fn(&[f64], &[f64]) -> Vec<f64> + Send + Sync + 'static,
    ) -> Self {
        BaseFn {
            eval: Arc::new(eval),
            jac_x: None,
            dim_p,
            dim_x,
            dim_y,
            null: false,
        }
    }

    /// The constant null base of an inclusion `0 ∈ F(p,x)`.
    pub fn zero(dim_p: usize, dim_x: usize, dim_y: usize) -> Self {
        let mut b = BaseFn::new(dim_p, dim_x, dim_y, move |_, _| {
            alloc::vec![0.0; dim_y]
        });
        b.null = true;
        b
    }

    /// Attaches an x-Jacobian evaluator (rows indexed by Y, columns by X).
    pub fn with_jacobian_x(
        mut self,
        jac: impl Fn(&[f64], &[f64]) -> Vec<Vec<f64>> + Send + Sync + 'static,
    ) -> Self {
        self.jac_x = Some(Arc::new(jac));
        self
    }

    pub fn eval(&self, p: &[f64], x: &[f64]) -> Vec<f64> {
        (self.eval)(p, x)
    }

    pub fn jacobian_x(&self, p: &[f64], x: &[f64]) -> Option<Vec<Vec<f64>>> {
        self.jac_x.as_ref().map(|j| j(p, x))
    }

    pub fn has_jacobian(&self) -> bool {
        self.jac_x.is_some()
    }

    pub fn is_null(&self) -> bool {
        self.null
    }

    pub fn dim_p(&self) -> usize {
        self.dim_p
    }
    pub fn dim_x(&self) -> usize {
        self.dim_x
    }
    pub fn dim_y(&self) -> usize {
        self.dim_y
    }

    /// Worst deviation `‖J·v − (f(p,x+hv)−f(p,x))/h‖` over sampled unit
    /// directions `v`, with `h = 1e−6`.
    pub fn jacobian_deviation(&self, p: &[f64], x: &[f64], stream: &mut LdStream) -> f64 {
        let Some(jac) = &self.jac_x else { return 0.0 };
        let j = jac(p, x);
        let h = 1e-6;
        let f0 = self.eval(p, x);
        let mut worst: f64 = 0.0;
        for _ in 0..16 {
            let v = stream.next_direction();
            let xs: Vec<f64> = x.iter().zip(&v).map(|(xi, vi)| xi + h * vi).collect();
            let f1 = self.eval(p, &xs);
            for r in 0..self.dim_y {
                let jv: f64 = j[r].iter().zip(&v).map(|(a, b)| a * b).sum();
                let fd = (f1[r] - f0[r]) / h;
                worst = worst.max((jv - fd).abs());
            }
        }
        worst
    }
}

/// The set-valued field `F : P × X → 2^Y`, returning closed representations.
#[derive(Clone)]
pub struct FieldFn {
    eval: SetFn,
    dim_p: usize,
    dim_x: usize,
    dim_y: usize,
}

impl FieldFn {
    pub fn new(
        dim_p: usize,
        dim_x: usize,
        dim_y: usize,
        eval: impl Fn(&[f64], &[f64]) -> ClosedSetRep + Send + Sync + 'static,
    ) -> Self {
        FieldFn {
            eval: Arc::new(eval),
            dim_p,
            dim_x,
            dim_y,
        }
    }

    /// A field that ignores `(p,x)`.
    pub fn constant(dim_p: usize, dim_x: usize, set: ClosedSetRep) -> Self {
        let dim_y = set.ambient_dim();
        FieldFn::new(dim_p, dim_x, dim_y, move |_, _| set.clone())
    }

    pub fn eval(&self, p: &[f64], x: &[f64]) -> ClosedSetRep {
        (self.eval)(p, x)
    }

    pub fn dim_y(&self) -> usize {
        self.dim_y
    }
}

/// Representation of the graph of `F(p̄,·)` inside `X × Y`, used by the
/// calmness machinery and the dual (coderivative) constructions.
#[derive(Clone)]
pub enum GraphRep {
    /// Polyhedral-style graph given directly as a closed set in `X × Y`.
    Set(ClosedSetRep),
    /// `{(x,y) : y ≥ g(x)}` when `above`, else `{(x,y) : y ≤ g(x)}`,
    /// with scalar `y` and smooth boundary profile `g`.
    SmoothBoundary {
        g: ScalarXFn,
        grad: VecFn2,
        above: bool,
    },
}

type VecFn2 = Arc<dyn Fn(&[f64]) -> Vec<f64> + Send + Sync>;

impl GraphRep {
    pub fn smooth_boundary(
        g: impl Fn(&[f64]) -> f64 + Send + Sync + 'static,
        grad: impl Fn(&[f64]) -> Vec<f64> + Send + Sync + 'static,
        above: bool,
    ) -> Self {
        GraphRep::SmoothBoundary {
            g: Arc::new(g),
            grad: Arc::new(grad),
            above,
        }
    }

    pub fn contains(&self, xy: &[f64], dim_x: usize, tol: f64) -> bool {
        match self {
            GraphRep::Set(s) => s.contains(xy, tol),
            GraphRep::SmoothBoundary { g, above, .. } => {
                let gx = g(&xy[..dim_x]);
                let y = xy[dim_x];
                if *above {
                    y >= gx - tol
                } else {
                    y <= gx + tol
                }
            }
        }
    }

    /// Moves an ambient point onto the graph. For `Set` this is the exact
    /// metric projection; for a smooth boundary the `y` coordinate is
    /// snapped onto the feasible side (sufficient for sampling purposes).
    pub fn attach(&self, xy: &[f64], dim_x: usize) -> Result<Vec<f64>> {
        match self {
            GraphRep::Set(s) => s.project(xy),
            GraphRep::SmoothBoundary { g, above, .. } => {
                let gx = g(&xy[..dim_x]);
                let mut out = xy.to_vec();
                if *above {
                    out[dim_x] = out[dim_x].max(gx);
                } else {
                    out[dim_x] = out[dim_x].min(gx);
                }
                Ok(out)
            }
        }
    }
}

/// A generalized equation with a feasible reference triple `(p̄, x̄, ȳ)`.
///
/// `ȳ = f(p̄,x̄)` is always computed, never user-supplied, and the
/// constructor verifies `dist(ȳ, F(p̄,x̄)) ≤ tol_feas`.
#[derive(Clone)]
pub struct GenEqProblem {
    pub base: BaseFn,
    pub field: FieldFn,
    p_ref: RealVector,
    x_ref: RealVector,
    y_ref: RealVector,
    pub p_region: Region,
    pub x_region: Region,
    pub y_region: Region,
    pub tol_feas: f64,
    pub p_metric: MetricSpec,
    pub x_metric: MetricSpec,
    pub y_metric: MetricSpec,
    field_graph: Option<GraphRep>,
}

impl GenEqProblem {
    pub fn new(
        base: BaseFn,
        field: FieldFn,
        p_ref: RealVector,
        x_ref: RealVector,
        p_region: Region,
        x_region: Region,
        y_region: Region,
        tol_feas: f64,
    ) -> Result<Self> {
        if base.dim_p != field.dim_p || base.dim_x != field.dim_x || base.dim_y != field.dim_y
        {
            return Err(Error::ContractViolation(format!(
                "base dims ({},{},{}) do not match field dims ({},{},{})",
                base.dim_p, base.dim_x, base.dim_y, field.dim_p, field.dim_x, field.dim_y
            )));
        }
        if p_ref.dim() != base.dim_p {
            return Err(Error::DimensionMismatch {
                expected: base.dim_p,
                got: p_ref.dim(),
            });
        }
        if x_ref.dim() != base.dim_x {
            return Err(Error::DimensionMismatch {
                expected: base.dim_x,
                got: x_ref.dim(),
            });
        }
        let y_ref = RealVector::new(base.eval(p_ref.coords(), x_ref.coords()))?;
        let feas = field
            .eval(p_ref.coords(), x_ref.coords())
            .dist(y_ref.coords())?;
        if !(feas <= tol_feas) {
            return Err(Error::ContractViolation(format!(
                "reference point is not feasible: dist(ȳ, F(p̄,x̄)) = {feas:.3e} > {tol_feas:.3e}"
            )));
        }
        if base.has_jacobian() {
            let mut stream = LdStream::new(base.dim_x, 17);
            let dev = base.jacobian_deviation(p_ref.coords(), x_ref.coords(), &mut stream);
            if dev > 1e-4 {
                return Err(Error::ContractViolation(format!(
                    "Jacobian fails the finite-difference check: deviation {dev:.3e} > 1e-4"
                )));
            }
        }
        let dim_p = base.dim_p;
        let dim_x = base.dim_x;
        let dim_y = base.dim_y;
        Ok(GenEqProblem {
            base,
            field,
            p_ref,
            x_ref,
            y_ref,
            p_region,
            x_region,
            y_region,
            tol_feas,
            p_metric: MetricSpec::simple(dim_p),
            x_metric: MetricSpec::simple(dim_x),
            y_metric: MetricSpec::simple(dim_y),
            field_graph: None,
        })
    }

    /// Overrides the image-space metric (products use the sum metric).
    pub fn with_y_metric(mut self, m: MetricSpec) -> Self {
        self.y_metric = m;
        self
    }

    /// Attaches a representation of `grph F(p̄,·) ⊆ X × Y`.
    pub fn with_field_graph(mut self, g: GraphRep) -> Self {
        self.field_graph = Some(g);
        self
    }

    pub fn p_ref(&self) -> &RealVector {
        &self.p_ref
    }
    pub fn x_ref(&self) -> &RealVector {
        &self.x_ref
    }
    pub fn y_ref(&self) -> &RealVector {
        &self.y_ref
    }
    pub fn field_graph(&self) -> Option<&GraphRep> {
        self.field_graph.as_ref()
    }

    pub fn dim_p(&self) -> usize {
        self.base.dim_p
    }
    pub fn dim_x(&self) -> usize {
        self.base.dim_x
    }
    pub fn dim_y(&self) -> usize {
        self.base.dim_y
    }

    /// Metric of the product `X × Y` (sum metric), where the graph
    /// displacement lives.
    pub fn xy_metric(&self) -> MetricSpec {
        MetricSpec::product(&[self.x_metric.clone(), self.y_metric.clone()])
    }

    /// Displacement `ψ(p,x) = dist(f(p,x), F(p,x))`; zero exactly on `G(p)`.
    pub fn displacement(&self, p: &[f64], x: &[f64]) -> Result<ExtReal> {
        if p.len() != self.dim_p() {
            return Err(Error::DimensionMismatch {
                expected: self.dim_p(),
                got: p.len(),
            });
        }
        if x.len() != self.dim_x() {
            return Err(Error::DimensionMismatch {
                expected: self.dim_x(),
                got: x.len(),
            });
        }
        let fy = self.base.eval(p, x);
        self.field.eval(p, x).dist(&fy)
    }

    /// Graph displacement `disp(x,y) = d(f(p̄,x), y) + ι((x,y), grph F(p̄,·))`.
    ///
    /// The indicator is realized as: membership within `tol_feas` ⇒ `0`,
    /// otherwise `+∞`.
    pub fn graph_displacement(&self, x: &[f64], y: &[f64]) -> Result<ExtReal> {
        if x.len() != self.dim_x() || y.len() != self.dim_y() {
            return Err(Error::DimensionMismatch {
                expected: self.dim_x() + self.dim_y(),
                got: x.len() + y.len(),
            });
        }
        let on_graph = self
            .field
            .eval(self.p_ref.coords(), x)
            .contains(y, self.tol_feas);
        if !on_graph {
            return Ok(INF);
        }
        let fy = self.base.eval(self.p_ref.coords(), x);
        Ok(self.y_metric.dist(&fy, y))
    }

    /// Graph displacement as a function of the stacked point `(x,y)`.
    pub fn graph_displacement_xy(&self, xy: &[f64]) -> Result<ExtReal> {
        let dx = self.dim_x();
        self.graph_displacement(&xy[..dx], &xy[dx..])
    }

    /// All grid points `x` with `ψ(p,x) ≤ tol`, in deterministic grid order.
    pub fn solve_on_grid(&self, p: &[f64], grid: &GridSpec, tol: f64) -> Result<SolutionSample> {
        let mut solutions = Vec::new();
        for x in grid.points()? {
            if self.displacement(p, &x)? <= tol {
                solutions.push(RealVector::new(x)?);
            }
        }
        Ok(SolutionSample {
            p: RealVector::new(p.to_vec())?,
            solutions,
            resolution: grid.step,
            tol,
        })
    }

    /// Sampled surrogate of the lower semicontinuity of `ψ(p,·)` at `x`:
    /// checks `liminf_{z→x} ψ(p,z) ≥ ψ(p,x) − tol` over shrinking sampled
    /// balls and reports the worst margin with a witness.
    pub fn displacement_lsc_check(
        &self,
        p: &[f64],
        x: &[f64],
        schedule: &RadiusSchedule,
        tol: f64,
    ) -> Result<LscCheck> {
        let psi0 = self.displacement(p, x)?;
        if !psi0.is_finite() {
            return Err(Error::DomainError(format!(
                "displacement is not finite at the reference point: {psi0}"
            )));
        }
        let mut stream = LdStream::new(self.dim_x(), schedule.seed);
        let dim = self.dim_x();
        let radii = schedule.radii();
        let mut infs: Vec<f64> = Vec::with_capacity(schedule.levels);
        let mut witness: Option<(Vec<f64>, f64)> = None;
        for radius in &radii {
            let mut pts = ball_points(
                x,
                *radius,
                schedule.samples_per_level,
                &self.x_metric,
                &mut stream,
            );
            // deterministic axis probes at the exact level radius
            for i in 0..dim {
                for s in [1.0, -1.0] {
                    let mut z = x.to_vec();
                    z[i] += s * radius;
                    pts.push(z);
                }
            }
            let mut inf_level = INF;
            let mut level_witness: Option<Vec<f64>> = None;
            for z in pts {
                let v = self.displacement(p, &z)?;
                if v < inf_level {
                    inf_level = v;
                    level_witness = Some(z);
                }
            }
            infs.push(inf_level);
            witness = level_witness.map(|z| (z, inf_level));
        }
        // Re-probe the last two levels along the best descent direction so
        // the linear trend is measured on one fixed ray.
        if let Some((z_star, _)) = &witness {
            let d = self.x_metric.dist(z_star, x);
            if d > 0.0 {
                for k in [schedule.levels - 2, schedule.levels - 1] {
                    let t = radii[k] / d;
                    let z: Vec<f64> = x
                        .iter()
                        .zip(z_star)
                        .map(|(xi, zi)| xi + t * (zi - xi))
                        .collect();
                    let v = self.displacement(p, &z)?;
                    if v < infs[k] {
                        infs[k] = v;
                    }
                }
            }
        }
        // The ball infima increase toward the liminf as the radius shrinks
        // (for Lipschitz-like ψ the gap is ∝ radius). Extrapolate the
        // geometric trend instead of reading the finest level raw, so a
        // continuous ψ reports margin ≈ 0 rather than −L·r.
        let last = infs[schedule.levels - 1];
        let prev = infs[schedule.levels - 2];
        let rho = schedule.decay;
        let diff = last - prev;
        let liminf_est = if last.is_finite() && prev.is_finite() && diff > 0.0 {
            last + diff * rho / (1.0 - rho)
        } else {
            last
        };
        let margin = liminf_est - psi0;
        Ok(LscCheck {
            holds: margin >= -tol,
            margin,
            witness,
        })
    }
}

/// Grid sample of `G(p)`: every listed `x` has displacement `≤ tol` at the
/// stated resolution. No completeness claim is made off-grid.
#[derive(Clone, Debug)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct SolutionSample {
    pub p: RealVector,
    pub solutions: Vec<RealVector>,
    pub resolution: f64,
    pub tol: f64,
}

impl SolutionSample {
    /// Distance from `x` to the sampled solution set (`+∞` when empty).
    pub fn dist_to(&self, x: &[f64], metric: &MetricSpec) -> ExtReal {
        self.solutions
            .iter()
            .map(|s| metric.dist(s.coords(), x))
            .fold(INF, f64::min)
    }
}

/// Outcome of the sampled lower-semicontinuity check.
#[derive(Clone, Debug)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct LscCheck {
    pub holds: bool,
    /// `inf_{z ∈ finest ball} ψ(p,z) − ψ(p,x)`; negative when a drop exists.
    pub margin: f64,
    pub witness: Option<(Vec<f64>, f64)>,
}
