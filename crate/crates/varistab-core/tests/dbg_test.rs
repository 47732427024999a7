// temp debug — appended as integration test
use varistab_core::geneq::{BaseFn, FieldFn, GenEqProblem, GraphRep};
use varistab_core::metric::{ClosedSetRep, RealVector, Region};
use varistab_core::stability::{check_liplsc, StabilityConfig};

#[test]
fn dbg_smooth_family() {
    let (a, b) = (2.0_f64, 1.0_f64);
    let base = BaseFn::new(1, 1, 1, move |p, x| vec![a * x[0] - b * p[0]])
        .with_jacobian_x(move |_, _| vec![vec![a]]);
    let field = FieldFn::constant(1, 1, ClosedSetRep::zero(1));
    let prob = GenEqProblem::new(
        base,
        field,
        RealVector::scalar(0.0).unwrap(),
        RealVector::scalar(0.0).unwrap(),
        Region::new(vec![-1.0], vec![1.0]).unwrap(),
        Region::new(vec![-1.5], vec![1.5]).unwrap(),
        Region::new(vec![-4.0], vec![4.0]).unwrap(),
        1e-9,
    )
    .unwrap()
    .with_field_graph(GraphRep::Set(ClosedSetRep::CartesianProduct(vec![
        ClosedSetRep::all(1),
        ClosedSetRep::zero(1),
    ])));
    let cfg = StabilityConfig::standard(61);
    let rep = check_liplsc(&prob, &cfg).unwrap();
    for h in &rep.hypotheses {
        println!("({}) {:?} const={:?} note={}", h.id, h.status, h.constant, h.note);
    }
    println!("slope={} per_level={:?}", rep.slope.value, rep.slope.per_level);
    println!("l_f={} l_F={} bound={:?}", rep.l_f, rep.l_cap_f, rep.bound);
    if let Some(v) = &rep.validation {
        println!("validation passed={} emp={}", v.passed, v.empirical_constant);
        for r in &v.rows { println!("  row {:?}", r); }
    }
}
