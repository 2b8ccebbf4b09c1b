use std::collections::BTreeSet;

use cav_core::conjugate::conjugate;
use cav_core::quadab::*;
use cav_core::{int, Error, ExtReal, Finite, GridFn, LatticeGrid, PosInf, Rat, RatLinMap};
use proptest::prelude::*;

fn g1() -> LatticeGrid {
    LatticeGrid::integers(-1, 1).unwrap()
}

fn duals(n: i64) -> DualGrids {
    let d = LatticeGrid::integers(-n, n).unwrap();
    DualGrids {
        x: d.clone(),
        u: d.clone(),
        y: d.clone(),
        v: d,
    }
}

fn sampled(vals: &[Option<i8>], label: &str) -> Option<GridFn> {
    let v = vals.iter().map(|x| x.map_or(PosInf, |a| Finite(a as f64))).collect();
    GridFn::new(g1().product(&g1()), v, label).ok()
}

fn values() -> impl Strategy<Value = Vec<Option<i8>>> {
    prop::collection::vec(prop::option::weighted(0.75, -3i8..=3), 9)
}

fn setup(f: GridFn, g: GridFn, a: i64, b: i64) -> QuadSetup {
    QuadSetup::new(
        f,
        1,
        g,
        1,
        RatLinMap::scalar(1, int(a)),
        RatLinMap::scalar(1, int(b)),
        duals(2),
    )
    .unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn weak_duality_holds_for_arbitrary_samples(fv in values(), gv in values(), a in -2i64..=2, b in -1i64..=1) {
        let (Some(f), Some(g)) = (sampled(&fv, "f"), sampled(&gv, "g")) else { return Ok(()) };
        match verify_t3(&setup(f, g, a, b), None) {
            Ok(r) => {
                prop_assert!(r.weak_ok, "violation at {:?}", r.weak_violation);
                for (v, w) in r.rhs.iter().zip(&r.witness) {
                    prop_assert_eq!(v.is_finite(), w.is_some() && v.is_finite());
                }
            }
            Err(Error::Improper(_)) => {}
            Err(e) => prop_assert!(false, "{e}"),
        }
    }

    #[test]
    fn cross_path_is_exact(fv in values(), gv in values(), a in -2i64..=2, b in -1i64..=1) {
        let (Some(f), Some(g)) = (sampled(&fv, "f"), sampled(&gv, "g")) else { return Ok(()) };
        let s = setup(f, g, a, b);
        let l = remark22_lift(&s).unwrap();
        let h3 = infconv_t3(&s);
        let h21 = infconv_t21(&l.k, l.w_dim, &l.c, &l.d, &l.x_grid, &l.u_grid);
        match (h3, h21) {
            (Ok(x), Ok(y)) => prop_assert_eq!(x.values(), y.values()),
            (Err(Error::Improper(_)), Err(Error::Improper(_))) => {}
            (x, y) => prop_assert!(false, "{:?} vs {:?}", x.err(), y.err()),
        }
        let c = t3_conjugates(&s).unwrap();
        let ks = lift_conjugate(&s, &c).unwrap();
        let dg = s.dual_grid();
        for i in 0..dg.len() {
            let p = dg.point_rat(i);
            let (v3, w3) = t3_dual_min_with(&s, &c, &p).unwrap();
            let (v21, w21) = t21_dual_min(&ks, l.w_dim, &l.c, &l.d, &p).unwrap();
            prop_assert_eq!(v3, v21);
            prop_assert_eq!(w3.is_some() && v3.is_finite(), w21.is_some() && v21.is_finite());
            if let Some(w) = w21 {
                // feasible range-form witnesses have the shape (x0* - Aᵀy*, y*)
                prop_assert_eq!(w[0], p[0] - s.a().get(0, 0) * w[1]);
            }
        }
    }

    #[test]
    fn identity_maps_match_bivariate_formula(fv in values(), gv in values()) {
        let (Some(f), Some(g)) = (sampled(&fv, "f"), sampled(&gv, "g")) else { return Ok(()) };
        let s = setup(f, g, 1, 1);
        let c = t3_conjugates(&s).unwrap();
        let fs = conjugate(s.f(), c.fstar.grid()).unwrap();
        let gs = conjugate(s.g(), c.gstar.grid()).unwrap();
        let dg = s.dual_grid();
        for i in 0..dg.len() {
            let p = dg.point_rat(i);
            let direct = (-2..=2)
                .map(|y| fs.value_at(&[p[0] - int(y), p[1]]) + gs.value_at(&[int(y), p[1]]))
                .fold(PosInf, ExtReal::min);
            prop_assert_eq!(t3_dual_min_with(&s, &c, &p).unwrap().0, direct);
        }
    }

    #[test]
    fn convex_quadratics_meet_strong_tolerance(a in 1i64..=3, b in 1i64..=3, c in -1i64..=1, p in 1i64..=2, q in 0i64..=2) {
        let grid = g1().product(&g1());
        let f = GridFn::from_fn(grid.clone(), "f", |z| {
            Finite(a as f64 * z[0] * z[0] + b as f64 * z[1] * z[1] + c as f64 * z[0] * z[1])
        }).unwrap();
        let g = GridFn::from_fn(grid, "g", |z| Finite(p as f64 * z[0] * z[0] + q as f64 * z[1] * z[1])).unwrap();
        let d = DualGrids::bracketing(&f, 1, &g, 1).unwrap();
        let s = QuadSetup::new(f, 1, g, 1, RatLinMap::identity(1), RatLinMap::identity(1), d).unwrap();
        let r = verify_t3(&s, None).unwrap();
        prop_assert!(r.hypotheses);
        prop_assert!(r.success(), "gap {:?} tol {}", r.max_gap, r.strong_tol);
    }

    #[test]
    fn lemma2_identity_is_exact(
        pts in prop::collection::vec((-2i64..=2, -2i64..=2), 1..4),
        r in -2i64..=2,
        den in 1i64..=2,
    ) {
        let g: Vec<Vec<Rat>> = pts.iter().map(|&(x, y)| vec![int(x), int(y)]).collect();
        let rm = RatLinMap::scalar(1, Rat::new(r, den));
        let bx = LatticeGrid::cube(2, -3, 3, int(1)).unwrap();
        let out = lemma2_sets(&g, &rm, &bx).unwrap();
        prop_assert!(out.equal);
    }
}

#[test]
fn sum_form_specializes_dual_formula() {
    // f on E×E*, g on F×F*, B = Aᵀ.
    let grid = g1().product(&g1());
    let f = GridFn::from_fn(grid.clone(), "f", |z| Finite(z[0] * z[0] + z[1] * z[1])).unwrap();
    let g = GridFn::from_fn(grid, "g", |z| Finite((z[0] - z[1]).abs())).unwrap();
    let a = RatLinMap::scalar(1, int(-1));
    let s = QuadSetup::sum_form(f, 1, g, 1, a.clone(), duals(2)).unwrap();
    assert_eq!(s.b(), &a.transpose());
    let c = t3_conjugates(&s).unwrap();
    let p = [int(1), int(-1)];
    let direct = (-2..=2)
        .map(|y| c.fstar.value_at(&[p[0] + int(y), p[1]]) + c.gstar.value_at(&[int(y), -p[1]]))
        .fold(PosInf, ExtReal::min);
    assert_eq!(t3_dual_min_with(&s, &c, &p).unwrap().0, direct);
}

#[test]
fn parallel_form_swaps_blocks() {
    let grid = g1().product(&g1());
    let f = GridFn::from_fn(grid.clone(), "f", |z| Finite(z[0] * z[0] + 2.0 * z[1] * z[1])).unwrap();
    let g = GridFn::from_fn(grid, "g", |z| Finite(z[0] * z[0] + z[1] * z[1])).unwrap();
    let s = QuadSetup::parallel_form(f.clone(), 1, g.clone(), 1, RatLinMap::identity(1), duals(2)).unwrap();
    let h = infconv_t3(&s).unwrap().swap_blocks(1).unwrap();
    // h(x, x*) = min_y f(x - y, x*) + g(y, x*)
    for i in 0..h.grid().len() {
        let pt = h.grid().point_rat(i);
        let brute = (-1..=1)
            .map(|y| f.value_at(&[pt[0] - int(y), pt[1]]) + g.value_at(&[int(y), pt[1]]))
            .fold(PosInf, ExtReal::min);
        assert_eq!(h.value(i), brute);
    }
}

#[test]
fn negative_infinity_is_reported_with_point() {
    let grid = g1().product(&g1());
    let f = GridFn::from_fn(grid.clone(), "f", |_| Finite(-f64::MAX)).unwrap();
    let g = GridFn::from_fn(grid, "g", |_| Finite(-f64::MAX)).unwrap();
    let e = infconv_t3(&setup(f, g, 1, 1)).unwrap_err();
    assert!(matches!(e, Error::NegativeInfinity { .. }), "{e}");
}

#[test]
fn disjoint_domains_are_improper() {
    let grid = g1().product(&g1());
    let f = GridFn::indicator(grid.clone(), &[vec![int(1), int(0)]], "f").unwrap();
    let g = GridFn::indicator(grid, &[vec![int(0), int(0)]], "g").unwrap();
    let s = setup(f, g, 1, 1);
    assert!(matches!(infconv_t3(&s), Err(Error::Improper(_))));
    let q = check_qc_t3(&s).unwrap();
    assert!(!q.is_subspace);
    assert_eq!(q.domains_meet, Some(false));
}

#[test]
fn witnesses_attain_recorded_values() {
    let grid = g1().product(&g1());
    let f = GridFn::from_fn(grid.clone(), "f", |z| Finite(z[0].abs() + z[1] * z[1])).unwrap();
    let g = GridFn::from_fn(grid, "g", |z| Finite(z[0] * z[0] + z[1].abs())).unwrap();
    let s = setup(f, g, 2, -1);
    let r = verify_t3(&s, None).unwrap();
    let c = t3_conjugates(&s).unwrap();
    let dg = s.dual_grid();
    let bt = s.b().transpose();
    for i in 0..dg.len() {
        let p = dg.point_rat(i);
        let Some(y) = &r.witness[i] else { continue };
        let xs = vec![p[0] - s.a().transpose().apply(y)[0]];
        let v = c.fstar.value_at(&[xs[0], p[1]]) + c.gstar.value_at(&[y[0], bt.apply(&p[1..])[0]]);
        assert_eq!(v, r.rhs[i]);
    }
    let seen: BTreeSet<_> = r.witness.iter().flatten().collect();
    assert!(!seen.is_empty());
}
