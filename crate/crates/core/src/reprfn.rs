//! Representative functions on `E×E*` and the multifunctions they define.
//!
//! `E**` is identified with `E` throughout, so `f*` is a function on
//! `E*×E` and `f@(x, x*) = f*(x*, x)`.

use crate::conjugate::{conjugate_fast, is_closed, slope_bracket};
use crate::error::{Error, Result};
use crate::monops::{OperatorGraph, Pair};
use crate::numcore::rat::{dot, fmt_point, sub, to_f64, to_f64_vec};
use crate::numcore::{ExtReal, Finite, GridFn, LatticeGrid, Polytope, PosInf, Rat};

/// How the function is evaluated.
#[derive(Clone, Debug)]
pub enum ReprKind {
    /// Values on the `E×E*` grid; `f*` by grid conjugation.
    Sampled(GridFn),
    /// `I_K(x) + <x, y*> + σ_K(x* - y*)`.
    Example6 { k: Polytope, ystar: Vec<Rat> },
    /// `σ_K(x - y) + I_K(x*) + <y, x*>`.
    Example7 { y: Vec<Rat>, k: Polytope },
    /// `φ(x) + φ*(x*)`.
    Separable { phi: GridFn, phistar: GridFn },
}

#[derive(Clone, Debug)]
pub struct ReprFn {
    kind: ReprKind,
    dim: usize,
    grid: LatticeGrid,
    dual_grid: LatticeGrid,
}

fn swapped(grid: &LatticeGrid, n: usize) -> Result<LatticeGrid> {
    let (a, b) = grid.split(n)?;
    Ok(b.product(&a))
}

fn half_dim(grid: &LatticeGrid) -> Result<usize> {
    if grid.dim() == 0 || grid.dim() % 2 != 0 {
        return Err(Error::DimensionMismatch(format!(
            "a grid over E×E* needs even dimension, got {}",
            grid.dim()
        )));
    }
    Ok(grid.dim() / 2)
}

fn to_ext(v: Option<Rat>) -> ExtReal {
    v.map_or(PosInf, |r| Finite(to_f64(&r)))
}

impl ReprFn {
    /// Sampled function; the dual grid defaults to the swapped grid widened
    /// to the slope bracket of `f`.
    pub fn sampled(f: GridFn) -> Result<Self> {
        let dim = half_dim(f.grid())?;
        let grid = f.grid().clone();
        let sw = swapped(&grid, dim)?;
        let br = slope_bracket(&f);
        // dual axis i pairs with primal axis (i + dim) mod 2dim
        let bounds: Vec<(f64, f64)> = (0..grid.dim())
            .map(|i| {
                let c = sw.axis_coords(i);
                let (mut lo, mut hi) = (c[0], c[c.len() - 1]);
                if let Some((a, b)) = br[(i + dim) % grid.dim()] {
                    lo = lo.min(a);
                    hi = hi.max(b);
                }
                (lo, hi)
            })
            .collect();
        let dual_grid = sw.widened_to(&bounds);
        Ok(ReprFn {
            kind: ReprKind::Sampled(f),
            dim,
            grid,
            dual_grid,
        })
    }

    pub fn example6(k: Polytope, ystar: Vec<Rat>, grid: LatticeGrid) -> Result<Self> {
        Self::closed_form(ReprKind::Example6 { k, ystar }, grid)
    }

    pub fn example7(y: Vec<Rat>, k: Polytope, grid: LatticeGrid) -> Result<Self> {
        Self::closed_form(ReprKind::Example7 { y, k }, grid)
    }

    fn closed_form(kind: ReprKind, grid: LatticeGrid) -> Result<Self> {
        let dim = half_dim(&grid)?;
        let (kd, pd) = match &kind {
            ReprKind::Example6 { k, ystar } => (k.dim(), ystar.len()),
            ReprKind::Example7 { y, k } => (k.dim(), y.len()),
            _ => unreachable!(),
        };
        if kd != dim || pd != dim {
            return Err(Error::DimensionMismatch(format!(
                "closed form over dimension {kd}/{pd} on a grid over E×E* with dim E = {dim}"
            )));
        }
        let dual_grid = swapped(&grid, dim)?;
        let f = ReprFn {
            kind,
            dim,
            grid,
            dual_grid,
        };
        if !(0..f.grid.len()).any(|i| f.value_flat(i).is_finite()) {
            return Err(Error::Improper("closed form is +inf on the whole grid".into()));
        }
        Ok(f)
    }

    /// `φ(x) + φ*(x*)` with `φ*` sampled on `dual`. `φ` must be convex and
    /// closed on its grid.
    pub fn separable(phi: GridFn, dual: &LatticeGrid) -> Result<Self> {
        if !is_closed(&phi, 1e-9 * (1.0 + phi.max_abs())) {
            return Err(Error::NonConvex(format!("`{}` differs from its closed convex hull", phi.label())));
        }
        let phistar = conjugate_fast(&phi, dual)?;
        let grid = phi.grid().product(dual);
        let dual_grid = dual.product(phi.grid());
        Ok(ReprFn {
            kind: ReprKind::Separable { phi, phistar },
            dim: dual.dim(),
            grid,
            dual_grid,
        })
    }

    /// Replaces the `E*×E` grid used for `f*`.
    pub fn with_dual_grid(mut self, dual: LatticeGrid) -> Result<Self> {
        if dual.dim() != 2 * self.dim {
            return Err(Error::DimensionMismatch(format!(
                "dual grid of dimension {} for dim E = {}",
                dual.dim(),
                self.dim
            )));
        }
        self.dual_grid = dual;
        Ok(self)
    }

    pub fn kind(&self) -> &ReprKind {
        &self.kind
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn grid(&self) -> &LatticeGrid {
        &self.grid
    }

    pub fn dual_grid(&self) -> &LatticeGrid {
        &self.dual_grid
    }

    pub fn is_closed_form(&self) -> bool {
        matches!(self.kind, ReprKind::Example6 { .. } | ReprKind::Example7 { .. })
    }

    /// Exact value for closed forms (`None` inside means `+inf`).
    pub fn exact_value(&self, x: &[Rat], xs: &[Rat]) -> Option<Option<Rat>> {
        match &self.kind {
            ReprKind::Example6 { k, ystar } => {
                Some(k.contains(x).then(|| dot(x, ystar) + k.support_rat(&sub(xs, ystar))))
            }
            ReprKind::Example7 { y, k } => Some(k.contains(xs).then(|| k.support_rat(&sub(x, y)) + dot(y, xs))),
            _ => None,
        }
    }

    /// Exact `f*(x*, x**)` for closed forms; both families satisfy
    /// `f*(x*, x) = f(x, x*)`.
    pub fn exact_conj(&self, xs: &[Rat], x: &[Rat]) -> Option<Option<Rat>> {
        self.exact_value(x, xs)
    }

    pub fn value(&self, x: &[Rat], xs: &[Rat]) -> ExtReal {
        match &self.kind {
            ReprKind::Sampled(f) => f.value_at(&[x, xs].concat()),
            ReprKind::Separable { phi, phistar } => phi.value_at(x) + phistar.value_at(xs),
            _ => to_ext(self.exact_value(x, xs).flatten()),
        }
    }

    fn value_flat(&self, i: usize) -> ExtReal {
        let p = self.grid.point_rat(i);
        self.value(&p[..self.dim], &p[self.dim..])
    }

    /// The function sampled on its grid.
    pub fn to_grid_fn(&self) -> Result<GridFn> {
        if let ReprKind::Sampled(f) = &self.kind {
            return Ok(f.clone());
        }
        GridFn::new(
            self.grid.clone(),
            (0..self.grid.len()).map(|i| self.value_flat(i)).collect(),
            "f",
        )
    }

    /// `f*` at the points of `grid` (a grid over `E*×E`).
    pub fn conjugate_on(&self, grid: &LatticeGrid) -> Result<Vec<ExtReal>> {
        let n = self.dim;
        match &self.kind {
            ReprKind::Sampled(f) => Ok(conjugate_fast(f, grid)?.values().to_vec()),
            ReprKind::Separable { phi, phistar } => Ok((0..grid.len())
                .map(|i| {
                    let p = grid.point_rat(i);
                    phistar.value_at(&p[..n]) + phi.value_at(&p[n..])
                })
                .collect()),
            _ => Ok((0..grid.len())
                .map(|i| {
                    let p = grid.point_rat(i);
                    to_ext(self.exact_conj(&p[..n], &p[n..]).flatten())
                })
                .collect()),
        }
    }

    /// Whether `(v, s)` satisfies the closed-form multifunction's structural
    /// property: for `N_{K,y*}`, `v ∈ K` and `<v - u, s - y*> ≥ 0` for all
    /// `u ∈ K`; for `M_{y,K}`, `s ∈ K` and `<v - y, s - w> ≥ 0` for all
    /// `w ∈ K`. `None` if `(v, s)` is not in the graph or the kind has no
    /// such property.
    pub fn property_holds(&self, v: &[Rat], s: &[Rat]) -> Option<bool> {
        let m = self.exact_value(v, s)??;
        if m != dot(v, s) {
            return None;
        }
        let zero = Rat::from_integer(0);
        Some(match &self.kind {
            ReprKind::Example6 { k, ystar } => {
                k.contains(v) && k.vertices().iter().all(|u| dot(&sub(v, u), &sub(s, ystar)) >= zero)
            }
            ReprKind::Example7 { y, k } => {
                k.contains(s) && k.vertices().iter().all(|w| dot(&sub(v, y), &sub(s, w)) >= zero)
            }
            _ => return None,
        })
    }
}

/// Outcome of a pairing lower-bound check.
#[derive(Clone, Debug, PartialEq)]
pub struct PairingCheck {
    pub ok: bool,
    /// Smallest `value - pairing` over finite points.
    pub worst_margin: f64,
    /// Point attaining `worst_margin`, first in grid order.
    pub worst: Option<Vec<Rat>>,
    /// Convex-closedness on the grid (always true for closed forms).
    pub closed: bool,
}

fn scan(grid: &LatticeGrid, n: usize, tol: f64, margin: impl Fn(&[Rat], &[Rat]) -> Option<f64>) -> (f64, Option<Vec<Rat>>, bool) {
    let mut worst = f64::INFINITY;
    let mut at = None;
    for i in 0..grid.len() {
        let p = grid.point_rat(i);
        if let Some(m) = margin(&p[..n], &p[n..]) {
            if at.is_none() || m < worst {
                worst = m;
                at = Some(p);
            }
        }
    }
    (worst, at.clone(), at.is_none() || worst >= -tol)
}

fn exact_margin(v: Option<Option<Rat>>, p: Rat) -> Option<f64> {
    v.flatten().map(|r| to_f64(&(r - p)))
}

fn float_margin(v: ExtReal, p: &Rat) -> Option<f64> {
    v.finite().map(|x| x - to_f64(p))
}

/// `f(x, x*) ≥ <x, x*>` on the grid, together with closedness.
pub fn is_representative(f: &ReprFn, tol: f64) -> PairingCheck {
    let n = f.dim;
    let (worst_margin, worst, ok) = scan(&f.grid, n, tol, |x, xs| {
        if f.is_closed_form() {
            exact_margin(f.exact_value(x, xs), dot(x, xs))
        } else {
            float_margin(f.value(x, xs), &dot(x, xs))
        }
    });
    let closed = match &f.kind {
        ReprKind::Sampled(g) => is_closed(g, 1e-9 * (1.0 + g.max_abs())),
        _ => true,
    };
    PairingCheck {
        ok: ok && closed,
        worst_margin,
        worst,
        closed,
    }
}

/// `f*(x*, x) ≥ <x, x*>` on the dual grid. For sampled functions the dual
/// grid must cover the slope bracket.
pub fn is_strongly_representative(f: &ReprFn, tol: f64) -> Result<PairingCheck> {
    let n = f.dim;
    if let ReprKind::Sampled(g) = &f.kind {
        for (i, b) in slope_bracket(g).iter().enumerate() {
            if let Some((lo, hi)) = *b {
                let axis = (i + n) % (2 * n);
                let c = f.dual_grid.axis_coords(axis);
                for slope in [lo, hi] {
                    if slope < c[0] || slope > c[c.len() - 1] {
                        return Err(Error::DualGridTooNarrow {
                            axis,
                            slope,
                            lo: c[0],
                            hi: c[c.len() - 1],
                        });
                    }
                }
            }
        }
    }
    let conj = f.conjugate_on(&f.dual_grid)?;
    let dg = &f.dual_grid;
    let mut worst = f64::INFINITY;
    let mut at = None;
    for (i, c) in conj.iter().enumerate() {
        let p = dg.point_rat(i);
        let m = if f.is_closed_form() {
            exact_margin(f.exact_conj(&p[..n], &p[n..]), dot(&p[..n], &p[n..]))
        } else {
            float_margin(*c, &dot(&p[..n], &p[n..]))
        };
        if let Some(m) = m {
            if at.is_none() || m < worst {
                worst = m;
                at = Some(p);
            }
        }
    }
    let ok = at.is_none() || worst >= -tol;
    Ok(PairingCheck {
        ok,
        worst_margin: worst,
        worst: at,
        closed: true,
    })
}

/// Default graph tolerance: `4ε · max(|f|, |<x,x*>|, 1)`.
pub fn graph_tol(v: f64, p: f64) -> f64 {
    4.0 * f64::EPSILON * v.abs().max(p.abs()).max(1.0)
}

/// Grid pairs where `f(x, x*) = <x, x*>` (exactly for closed forms, within
/// `tol` or [`graph_tol`] otherwise).
pub fn graph_of(f: &ReprFn, tol: Option<f64>) -> OperatorGraph {
    let n = f.dim;
    let mut g = OperatorGraph::new(n);
    for i in 0..f.grid.len() {
        let p = f.grid.point_rat(i);
        let (x, xs) = p.split_at(n);
        let pr = dot(x, xs);
        let on = if f.is_closed_form() {
            f.exact_value(x, xs).flatten() == Some(pr)
        } else {
            match f.value(x, xs) {
                Finite(v) => {
                    let pf = to_f64(&pr);
                    (v - pf).abs() <= tol.unwrap_or_else(|| graph_tol(v, pf))
                }
                PosInf => false,
            }
        };
        if on {
            g.insert(x.to_vec(), xs.to_vec()).expect("grid points have the graph dimension");
        }
    }
    g
}

/// `f@(x, x*) = f*(x*, x)` on the grid of `f`.
#[derive(Clone, Debug)]
pub struct AtTransform {
    pub source: ReprFn,
    pub values: GridFn,
}

pub fn at_transform(f: &ReprFn) -> Result<AtTransform> {
    let n = f.dim;
    let sw = swapped(&f.grid, n)?;
    let conj = f.conjugate_on(&sw)?;
    // conj is ordered over E*×E; reorder onto E×E*
    let values = (0..f.grid.len())
        .map(|i| {
            let p = f.grid.point_rat(i);
            let q = [&p[n..], &p[..n]].concat();
            conj[sw.locate(&q).expect("swapped grid holds every swapped point")]
        })
        .collect();
    let values = GridFn::new(f.grid.clone(), values, "f@")?;
    Ok(AtTransform {
        source: f.clone(),
        values,
    })
}

impl AtTransform {
    pub fn as_repr(&self) -> Result<ReprFn> {
        ReprFn::sampled(self.values.clone())
    }

    /// Graph of `f@`; exact for closed-form sources.
    pub fn graph(&self, tol: Option<f64>) -> Result<OperatorGraph> {
        let f = &self.source;
        if f.is_closed_form() {
            let n = f.dim;
            let mut g = OperatorGraph::new(n);
            for i in 0..f.grid.len() {
                let p = f.grid.point_rat(i);
                let (x, xs) = p.split_at(n);
                if f.exact_conj(xs, x).flatten() == Some(dot(x, xs)) {
                    g.insert(x.to_vec(), xs.to_vec())?;
                }
            }
            return Ok(g);
        }
        Ok(graph_of(&self.as_repr()?, tol))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Lemma14 {
    pub graph: OperatorGraph,
    pub at_graph: OperatorGraph,
    pub equal: bool,
}

/// Compares the graphs of `f` and `f@`.
pub fn lemma14_check(f: &ReprFn, tol: Option<f64>) -> Result<Lemma14> {
    let graph = graph_of(f, tol);
    let at_graph = at_transform(f)?.graph(tol)?;
    let equal = graph == at_graph;
    Ok(Lemma14 {
        graph,
        at_graph,
        equal,
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BrOutcome {
    /// `f(x, x*) - <x, x*> ≥ αβ`: nothing to check.
    Vacuous,
    /// A graph pair inside the open balls.
    Witness,
    /// No pair inside the balls, but one within one grid step of them.
    NearMiss,
    Failure,
}

#[derive(Clone, Debug, PartialEq)]
pub struct BrReport {
    pub outcome: BrOutcome,
    /// `f(x, x*) - <x, x*>`.
    pub gap: ExtReal,
    pub witness: Option<Pair>,
    /// `(|y - x|, |y* - x*|)` for the witness.
    pub distances: Option<(f64, f64)>,
}

fn norm(v: &[Rat]) -> f64 {
    to_f64_vec(v).iter().map(|a| a * a).sum::<f64>().sqrt()
}

/// Searches the graph of `f` for `(y, y*)` with `|y - x| < α` and
/// `|y* - x*| < β` when `f(x, x*) < <x, x*> + αβ`. Among candidates the one
/// with the smallest `max(|y - x|/α, |y* - x*|/β)` is reported.
pub fn br_check(f: &ReprFn, alpha: f64, beta: f64, x: &[Rat], xs: &[Rat], tol: Option<f64>) -> Result<BrReport> {
    if !(alpha > 0.0 && beta > 0.0) {
        return Err(Error::Invalid(format!("alpha and beta must be positive, got {alpha}, {beta}")));
    }
    if x.len() != f.dim || xs.len() != f.dim {
        return Err(Error::DimensionMismatch(format!(
            "point ({}, {}) for dim E = {}",
            fmt_point(x),
            fmt_point(xs),
            f.dim
        )));
    }
    let gap = match f.exact_value(x, xs) {
        Some(v) => v.map_or(PosInf, |r| Finite(to_f64(&(r - dot(x, xs))))),
        None => f.value(x, xs).sub_real(to_f64(&dot(x, xs))),
    };
    if gap >= Finite(alpha * beta) {
        return Ok(BrReport {
            outcome: BrOutcome::Vacuous,
            gap,
            witness: None,
            distances: None,
        });
    }
    let delta = f.grid.max_step();
    let mut best: Option<(f64, Pair, (f64, f64))> = None;
    for (y, ys) in graph_of(f, tol).pairs() {
        let d = (norm(&sub(y, x)), norm(&sub(ys, xs)));
        let score = (d.0 / alpha).max(d.1 / beta);
        if best.as_ref().is_none_or(|(s, _, _)| score < *s) {
            best = Some((score, (y.clone(), ys.clone()), d));
        }
    }
    let Some((_, pair, d)) = best else {
        return Ok(BrReport {
            outcome: BrOutcome::Failure,
            gap,
            witness: None,
            distances: None,
        });
    };
    let outcome = if d.0 < alpha && d.1 < beta {
        BrOutcome::Witness
    } else if d.0 < alpha + delta && d.1 < beta + delta {
        BrOutcome::NearMiss
    } else {
        BrOutcome::Failure
    };
    Ok(BrReport {
        outcome,
        gap,
        witness: Some(pair),
        distances: Some(d),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::monops::is_monotone;
    use crate::numcore::{int, rat};

    fn g1() -> LatticeGrid {
        LatticeGrid::integers(-1, 1).unwrap()
    }

    fn half_square(grid: &LatticeGrid) -> GridFn {
        GridFn::from_fn(grid.clone(), "phi", |p| Finite(0.5 * p[0] * p[0])).unwrap()
    }

    fn sep_quadratic() -> ReprFn {
        ReprFn::separable(half_square(&g1()), &g1()).unwrap()
    }

    fn ex6() -> ReprFn {
        ReprFn::example6(Polytope::interval(int(-1), int(1)), vec![int(0)], g1().product(&g1())).unwrap()
    }

    fn ex7() -> ReprFn {
        ReprFn::example7(vec![int(0)], Polytope::interval(int(-1), int(1)), g1().product(&g1())).unwrap()
    }

    fn pairs(v: &[(i64, i64)]) -> OperatorGraph {
        OperatorGraph::from_pairs(1, v.iter().map(|&(a, b)| (vec![int(a)], vec![int(b)]))).unwrap()
    }

    #[test]
    fn representativity_examples() {
        assert!(is_representative(&sep_quadratic(), 0.0).ok);
        assert!(is_representative(&ex6(), 0.0).ok);
        let zero = ReprFn::sampled(GridFn::from_fn(g1().product(&g1()), "0", |_| Finite(0.0)).unwrap()).unwrap();
        let r = is_representative(&zero, 1e-12);
        assert!(!r.ok);
        assert_eq!(r.worst_margin, -1.0);
        // (-1,-1) and (1,1) tie; the first in grid order is reported
        assert_eq!(r.worst, Some(vec![int(-1), int(-1)]));
    }

    #[test]
    fn strong_representativity_examples() {
        assert!(is_strongly_representative(&sep_quadratic(), 0.0).unwrap().ok);
        assert!(is_strongly_representative(&ex7(), 0.0).unwrap().ok);
        let point = ReprFn::sampled(GridFn::indicator(g1().product(&g1()), &[vec![int(0), int(0)]], "i").unwrap()).unwrap();
        assert!(is_representative(&point, 0.0).ok);
        let s = is_strongly_representative(&point, 0.0).unwrap();
        assert!(!s.ok);
        assert_eq!(s.worst_margin, -1.0);
        assert_eq!(s.worst, Some(vec![int(-1), int(-1)]));
    }

    #[test]
    fn narrow_dual_grid_is_rejected() {
        let grid = g1().product(&g1());
        let f = GridFn::from_fn(grid.clone(), "f", |p| Finite(3.0 * p[0] * p[0] + p[1] * p[1])).unwrap();
        let r = ReprFn::sampled(f).unwrap().with_dual_grid(grid).unwrap();
        assert!(matches!(is_strongly_representative(&r, 0.0), Err(Error::DualGridTooNarrow { .. })));
    }

    #[test]
    fn example_values() {
        let e6 = ReprFn::example6(Polytope::interval(int(-1), int(1)), vec![int(0)], g1().product(&g1())).unwrap();
        assert_eq!(e6.exact_value(&[rat(1, 2)], &[int(2)]), Some(Some(int(2))));
        let e7 = ex7();
        assert_eq!(e7.exact_value(&[int(2)], &[rat(1, 2)]), Some(Some(int(2))));
        let pt = ReprFn::example7(vec![int(0)], Polytope::point(vec![int(0)]).unwrap(), g1().product(&g1())).unwrap();
        assert_eq!(pt.value(&[int(1)], &[int(0)]), Finite(0.0));
        assert_eq!(pt.value(&[int(1)], &[int(1)]), PosInf);
    }

    #[test]
    fn degenerate_normal_cone() {
        let n = ReprFn::example6(Polytope::point(vec![int(0)]).unwrap(), vec![int(0)], g1().product(&g1())).unwrap();
        assert_eq!(graph_of(&n, None), pairs(&[(0, -1), (0, 0), (0, 1)]));
    }

    #[test]
    fn graph_examples() {
        assert_eq!(graph_of(&sep_quadratic(), None), pairs(&[(-1, -1), (0, 0), (1, 1)]));
        assert_eq!(graph_of(&ex6(), None), pairs(&[(-1, -1), (-1, 0), (0, 0), (1, 0), (1, 1)]));
        let bump = ReprFn::sampled(GridFn::from_fn(g1().product(&g1()), "b", |p| Finite(p[0] * p[1] + 1.0)).unwrap()).unwrap();
        assert!(graph_of(&bump, None).is_empty());
    }

    #[test]
    fn separable_graphs_are_subdifferentials() {
        let abs = GridFn::from_fn(g1(), "abs", |p| Finite(p[0].abs())).unwrap();
        let g = graph_of(&ReprFn::separable(abs, &g1()).unwrap(), None);
        assert_eq!(g, pairs(&[(-1, -1), (0, -1), (0, 0), (0, 1), (1, 1)]));
        let ind = GridFn::indicator(LatticeGrid::integers(-1, 2).unwrap(), &[vec![int(0)], vec![int(1)]], "ind").unwrap();
        let g = graph_of(&ReprFn::separable(ind, &g1()).unwrap(), None);
        assert_eq!(g, pairs(&[(0, -1), (0, 0), (1, 0), (1, 1)]));
        assert!(is_monotone(&g).monotone);
    }

    #[test]
    fn nonconvex_phi_is_rejected() {
        let w = GridFn::from_fn(g1(), "w", |p| Finite(if p[0] == 0.0 { 1.0 } else { 0.0 })).unwrap();
        assert!(matches!(ReprFn::separable(w, &g1()), Err(Error::NonConvex(_))));
    }

    #[test]
    fn at_transform_of_self_dual_quadratic_is_itself() {
        let f = sep_quadratic();
        let at = at_transform(&f).unwrap();
        assert_eq!(at.values.values(), f.to_grid_fn().unwrap().values());
        assert!(is_representative(&at.as_repr().unwrap(), 0.0).ok);
    }

    #[test]
    fn example6_conjugate_matches_grid_oracle() {
        // widen E* so that σ_K(x* - y*) is attained on the sampled grid
        let grid = g1().product(&LatticeGrid::integers(-2, 2).unwrap());
        let f = ReprFn::example6(Polytope::interval(int(-1), int(1)), vec![int(1)], grid).unwrap();
        let sampled = ReprFn::sampled(f.to_grid_fn().unwrap()).unwrap();
        let dual = LatticeGrid::integers(-2, 2).unwrap().product(&g1());
        let brute = sampled.conjugate_on(&dual).unwrap();
        let exact = f.conjugate_on(&dual).unwrap();
        assert_eq!(brute, exact);
    }

    #[test]
    fn lemma14_on_closed_forms_and_separable() {
        assert!(lemma14_check(&sep_quadratic(), None).unwrap().equal);
        assert!(lemma14_check(&ex6(), None).unwrap().equal);
        assert!(lemma14_check(&ex7(), None).unwrap().equal);
    }

    #[test]
    fn closed_form_properties() {
        let f = ex6();
        for (x, s) in graph_of(&f, None).pairs() {
            assert_eq!(f.property_holds(x, s), Some(true));
        }
        assert_eq!(f.property_holds(&[int(0)], &[int(1)]), None);
        let f = ex7();
        for (x, s) in graph_of(&f, None).pairs() {
            assert_eq!(f.property_holds(x, s), Some(true));
        }
    }

    #[test]
    fn br_examples() {
        let q = LatticeGrid::new(vec![int(0)], vec![rat(1, 4)], vec![-8], vec![8]).unwrap();
        let f = ReprFn::separable(half_square(&q), &q).unwrap();
        let r = br_check(&f, 0.5, 0.5, &[int(1)], &[rat(1, 2)], None).unwrap();
        assert_eq!(r.gap, Finite(0.125));
        assert_eq!(r.outcome, BrOutcome::Witness);
        assert_eq!(r.witness, Some((vec![rat(3, 4)], vec![rat(3, 4)])));

        let r = br_check(&f, 0.1, 0.1, &[int(1)], &[int(1)], None).unwrap();
        assert_eq!(r.witness, Some((vec![int(1)], vec![int(1)])));

        let r = br_check(&f, 0.25, 0.25, &[int(1)], &[int(0)], None).unwrap();
        assert_eq!(r.outcome, BrOutcome::Vacuous);
    }
}
