use cav_core::monops::*;
use cav_core::reprfn::*;
use cav_core::{int, rat, Finite, GridFn, LatticeGrid, Polytope, Rat, RatLinMap};
use proptest::prelude::*;

fn ints(lo: i64, hi: i64) -> LatticeGrid {
    LatticeGrid::integers(lo, hi).unwrap()
}

fn half_square(grid: &LatticeGrid) -> GridFn {
    GridFn::from_fn(grid.clone(), "phi", |p| Finite(0.5 * p[0] * p[0])).unwrap()
}

fn sep(lo: i64, hi: i64) -> ReprFn {
    ReprFn::separable(half_square(&ints(lo, hi)), &ints(lo, hi)).unwrap()
}

fn graph(v: &[(i64, i64)]) -> OperatorGraph {
    OperatorGraph::from_pairs(1, v.iter().map(|&(a, b)| (vec![int(a)], vec![int(b)]))).unwrap()
}

fn star(y: i64, lo: i64, hi: i64) -> CcInstance {
    CcInstance::Star {
        y: vec![int(y)],
        c: Polytope::interval(int(lo), int(hi)),
    }
}

fn space(lo: i64, hi: i64, ystar: i64) -> CcInstance {
    CcInstance::Space {
        c: Polytope::interval(int(lo), int(hi)),
        ystar: vec![int(ystar)],
    }
}

#[test]
fn sum_variant_on_half_squares() {
    let f = sep(-2, 2);
    let r = theorem15_verify(&f, &f, &RatLinMap::identity(1), Variant::A, None).unwrap();
    assert!(r.applicable);
    assert_eq!(r.graph, graph(&[(-1, -2), (0, 0), (1, 2)]));
    assert!(r.equal);
    assert!(r.success());
}

#[test]
fn parallel_variants_agree() {
    let f = sep(-2, 2);
    let b = theorem15_verify(&f, &f, &RatLinMap::identity(1), Variant::B, None).unwrap();
    let c = theorem15_verify(&f, &f, &RatLinMap::identity(1), Variant::C, None).unwrap();
    assert_eq!(c.graph, graph(&[(-2, -1), (0, 0), (2, 1)]));
    assert!(b.success() && c.success());
    assert_eq!(b.expected, c.expected);
    assert_eq!(b.graph, c.graph);
}

#[test]
fn parallel_variant_with_normal_cone() {
    let grid = ints(-2, 2).product(&ints(-2, 2));
    let f = sep(-2, 2);
    let g = ReprFn::example6(Polytope::interval(int(-1), int(1)), vec![int(0)], grid).unwrap();
    let r = theorem15_verify(&f, &g, &RatLinMap::identity(1), Variant::C, None).unwrap();
    assert!(r.applicable);
    let direct = graph_of(&f, None).parallel(&graph_of(&g, None)).unwrap();
    let direct = direct.restrict(|x, s| f.grid().locate(&[x, s].concat()).is_some());
    assert_eq!(r.expected, direct);
    assert!(r.success(), "graph {:?} expected {:?}", r.graph, r.expected);
}

#[test]
fn disjoint_domains_are_inapplicable() {
    let grid = ints(-1, 1).product(&ints(-1, 1));
    let f = ReprFn::sampled(GridFn::indicator(grid.clone(), &[vec![int(1), int(0)]], "f").unwrap()).unwrap();
    let g = ReprFn::sampled(GridFn::indicator(grid, &[vec![int(-1), int(0)]], "g").unwrap()).unwrap();
    let r = theorem15_verify(&f, &g, &RatLinMap::identity(1), Variant::A, None).unwrap();
    assert!(!r.applicable);
    assert!(!r.qualification.is_subspace);
    assert!(r.success());
}

#[test]
fn identity_cc_instances_hold() {
    let s = OperatorGraph::identity(&ints(-2, 2));
    let grid = ints(-2, 2).product(&ints(-2, 2));
    let window = ints(-1, 1).product(&ints(-1, 1));
    let instances = [star(0, -1, 1), star(1, 0, 2), star(-1, -2, 0), space(-1, 1, 0)];
    let r = theorem11_harness(&s, &instances, &grid, &window).unwrap();
    assert!(r.all_hold());
    assert_eq!(r.counterexamples(), 0);
    let first = &r.entries[0];
    assert!(first.cc.hypothesis && first.cc.conclusion);
    assert!(first.composed_monotone);
}

#[test]
fn abs_subdifferential_space_instance() {
    let abs = GridFn::from_fn(ints(-2, 2), "abs", |p| Finite(p[0].abs())).unwrap();
    let s = graph_of(&ReprFn::separable(abs, &ints(-1, 1)).unwrap(), None);
    let grid = ints(-2, 2).product(&ints(-2, 2));
    let window = ints(-1, 1).product(&ints(-1, 1));
    let r = theorem11_harness(&s, &[space(-1, 1, 0), space(1, 2, 1)], &grid, &window).unwrap();
    assert!(r.all_hold());
    assert_eq!(r.counterexamples(), 0);
}

#[test]
fn truncated_operator_is_skipped() {
    let s = graph(&[(-2, -2), (2, 2)]);
    let grid = ints(-2, 2).product(&ints(-2, 2));
    let window = ints(-1, 1).product(&ints(-1, 1));
    let r = theorem11_harness(&s, &[star(0, -1, 1)], &grid, &window).unwrap();
    assert_eq!(r.entries[0].verdict, Verdict::Skipped);
    assert!(r.entries[0].composed_maximal.as_ref().unwrap().addable.is_some());
}

#[test]
fn strongly_representable_operators_are_cc_maximal() {
    let f = sep(-2, 2);
    let r = theorem17_harness(&f, &[star(0, -1, 1), space(-1, 1, 0)]).unwrap();
    assert!(r.all_hold());
    assert!(r.entries.iter().all(|e| e.verdict == Verdict::Verified));

    let g7 = ReprFn::example7(vec![int(0)], Polytope::interval(int(-1), int(1)), ints(-2, 2).product(&ints(-2, 2))).unwrap();
    let r = theorem17_harness(&g7, &[star(1, -1, 1), space(-1, 1, 1)]).unwrap();
    assert!(r.all_hold());

    let r = theorem17_harness(&f, &[star(0, 5, 6)]).unwrap();
    assert_eq!(r.entries[0].verdict, Verdict::Vacuous);
}

fn arb_graph() -> impl Strategy<Value = OperatorGraph> {
    prop::collection::btree_set((-3i64..=3, -3i64..=3), 0..8).prop_map(|s| {
        OperatorGraph::from_pairs(1, s.into_iter().map(|(a, b)| (vec![int(a)], vec![int(b)]))).unwrap()
    })
}

fn monotone_graph() -> impl Strategy<Value = OperatorGraph> {
    // graphs of nondecreasing step functions are monotone
    prop::collection::vec((0i64..=2, 0i64..=2), 1..6).prop_map(|steps| {
        let mut x = -4;
        let mut s = -3;
        let mut pairs = Vec::new();
        for (dx, ds) in steps {
            x += dx;
            s += ds;
            pairs.push((vec![int(x)], vec![int(s)]));
        }
        OperatorGraph::from_pairs(1, pairs).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn parallel_sum_identity(s in arb_graph(), t in arb_graph()) {
        prop_assert_eq!(s.parallel(&t).unwrap(), s.parallel_via_inverses(&t).unwrap());
    }

    #[test]
    fn algebra_preserves_monotonicity(s in monotone_graph(), t in monotone_graph(), a in -2i64..=2) {
        prop_assert!(is_monotone(&s).monotone);
        prop_assert!(is_monotone(&s.sum(&t).unwrap()).monotone);
        prop_assert!(is_monotone(&s.inverse()).monotone);
        prop_assert!(is_monotone(&s.parallel(&t).unwrap()).monotone);
        let xs: Vec<Vec<Rat>> = (-4..=4).map(|k| vec![int(k)]).collect();
        prop_assert!(is_monotone(&s.conj_transform(&RatLinMap::scalar(1, int(a)), &xs).unwrap()).monotone);
    }

    #[test]
    fn representative_graphs_are_monotone(coef in prop::collection::vec(0i64..=3, 5)) {
        // a convex piecewise-quadratic phi built from nonnegative second differences
        let mut vals = vec![0.0f64; 5];
        let mut slope = -(coef.iter().sum::<i64>() as f64) / 2.0;
        for i in 1..5 {
            slope += coef[i - 1] as f64;
            vals[i] = vals[i - 1] + slope;
        }
        let phi = GridFn::new(ints(-2, 2), vals.into_iter().map(Finite).collect(), "phi").unwrap();
        let f = ReprFn::separable(phi, &ints(-6, 6)).unwrap();
        prop_assert!(is_representative(&f, 1e-12).ok);
        let g = graph_of(&f, None);
        prop_assert!(is_monotone(&g).monotone);
        prop_assert!(lemma14_check(&f, None).unwrap().equal);
    }

    #[test]
    fn closed_form_properties_hold(lo in -2i64..=0, hi in 0i64..=2, y in -2i64..=2) {
        let grid = ints(-3, 3).product(&ints(-3, 3));
        let k = Polytope::interval(int(lo), int(hi));
        for f in [
            ReprFn::example6(k.clone(), vec![int(y)], grid.clone()).unwrap(),
            ReprFn::example7(vec![int(y)], k.clone(), grid.clone()).unwrap(),
        ] {
            let g = graph_of(&f, None);
            prop_assert!(is_monotone(&g).monotone);
            for (v, s) in g.pairs() {
                prop_assert_eq!(f.property_holds(v, s), Some(true));
            }
            prop_assert!(is_strongly_representative(&f, 0.0).unwrap().ok);
            prop_assert!(lemma14_check(&f, None).unwrap().equal);
        }
    }

    #[test]
    fn br_finds_witnesses_on_fine_grids(xn in -6i64..=6, sn in -6i64..=6) {
        // step 1/4 = min(alpha, beta)/2
        let q = LatticeGrid::new(vec![int(0)], vec![rat(1, 4)], vec![-8], vec![8]).unwrap();
        let f = ReprFn::separable(half_square(&q), &q).unwrap();
        let (x, s) = (vec![rat(xn, 4)], vec![rat(sn, 4)]);
        let r = br_check(&f, 0.5, 0.5, &x, &s, None).unwrap();
        prop_assert!(r.outcome == BrOutcome::Vacuous || r.outcome == BrOutcome::Witness, "{:?}", r);
    }
}
