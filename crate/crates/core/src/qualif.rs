//! Qualification conditions: domain projections, the cone-is-subspace test
//! with exact certificates, and inclusion checks between subspaces and cones.
//!
//! Sampled domains are read as the convex hulls of their grid points, so a
//! difference set `P - A Q` is generated (as a convex cone) by the pairwise
//! differences of hull-preserving reductions of `P` and `Q`.

use std::collections::{BTreeMap, BTreeSet};

use num_rational::BigRational;
use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::lp::{big_dot, big_vec, in_convex_hull, in_span, nonneg_solve, rank, span_basis, Feasibility};
use crate::numcore::rat::{from_big, sub, to_f64};
use crate::numcore::{GridFn, RatLinMap, Rat};

pub const MAX_GENERATORS: usize = 64;
pub const MAX_CONE_DIM: usize = 8;

pub type PointSet = BTreeSet<Vec<Rat>>;

/// Evidence attached to one generator `d`.
#[derive(Clone, Debug, PartialEq)]
pub enum Certificate {
    /// Nonnegative weights `λ` with `sum λ_j d_j = -d`.
    Combination(Vec<BigRational>),
    /// `φ` with `<φ, d_j> <= 0` for all generators and `<φ, d> < 0`.
    Separator(Vec<BigRational>),
}

#[derive(Clone, Debug, PartialEq)]
pub struct QCResult {
    pub generators: Vec<Vec<Rat>>,
    pub is_subspace: bool,
    /// Echelon basis of the span of the generators (empty for the zero cone).
    pub basis: Vec<Vec<BigRational>>,
    pub certificates: Vec<Certificate>,
    /// Index of the first generator whose negative is outside the cone.
    pub failing: Option<usize>,
    /// Whether the two projected domains meet (after taking hulls), when
    /// the condition comes from a pair of domains.
    pub domains_meet: Option<bool>,
}

impl QCResult {
    /// Re-checks every certificate by substitution.
    pub fn verify(&self) -> bool {
        let gens: Vec<Vec<BigRational>> = self.generators.iter().map(|g| big_vec(g)).collect();
        if self.certificates.len() != gens.len() {
            return false;
        }
        let all_comb = self.certificates.iter().all(|c| matches!(c, Certificate::Combination(_)));
        if all_comb != self.is_subspace {
            return false;
        }
        self.certificates.iter().zip(&gens).all(|(c, d)| match c {
            Certificate::Combination(l) => {
                l.len() == gens.len()
                    && l.iter().all(|v| !v.is_negative())
                    && (0..d.len()).all(|r| {
                        gens.iter().zip(l).fold(BigRational::zero(), |a, (g, w)| a + &g[r] * w) == -d[r].clone()
                    })
            }
            Certificate::Separator(phi) => {
                gens.iter().all(|g| !big_dot(phi, g).is_positive()) && big_dot(phi, d).is_negative()
            }
        })
    }

    pub fn dim(&self) -> usize {
        self.generators.first().map_or(0, Vec::len)
    }
}

/// Block coordinates `from..to` of the points where `f` is finite.
pub fn dom_project(f: &GridFn, from: usize, to: usize) -> Result<PointSet> {
    if from >= to || to > f.grid().dim() {
        return Err(Error::DimensionMismatch(format!(
            "block {from}..{to} invalid for `{}` of dimension {}",
            f.label(),
            f.grid().dim()
        )));
    }
    Ok(f.finite_indices()
        .map(|i| f.grid().point_rat(i)[from..to].to_vec())
        .collect())
}

/// Drops points lying strictly between two others on an axis-parallel line;
/// the convex hull is unchanged.
pub fn hull_reduce(points: &PointSet) -> PointSet {
    let Some(d) = points.iter().next().map(Vec::len) else {
        return PointSet::new();
    };
    let mut cur: PointSet = points.clone();
    for axis in 0..d {
        let mut lines: BTreeMap<Vec<Rat>, (Rat, Rat)> = BTreeMap::new();
        for p in &cur {
            let mut key = p.clone();
            key.remove(axis);
            let e = lines.entry(key).or_insert((p[axis], p[axis]));
            e.0 = e.0.min(p[axis]);
            e.1 = e.1.max(p[axis]);
        }
        cur = cur
            .into_iter()
            .filter(|p| {
                let mut key = p.clone();
                key.remove(axis);
                let (lo, hi) = lines[&key];
                p[axis] == lo || p[axis] == hi
            })
            .collect();
    }
    cur
}

/// Generators `p - M q` over the reduced sets.
pub fn difference_generators(p: &PointSet, m: &RatLinMap, q: &PointSet) -> PointSet {
    let rp = hull_reduce(p);
    let rq: Vec<Vec<Rat>> = hull_reduce(q).iter().map(|x| m.apply(x)).collect();
    let diffs: PointSet = rp.iter().flat_map(|a| rq.iter().map(move |b| sub(a, b))).collect();
    hull_reduce(&diffs)
}

/// Decides whether the convex cone generated by `d` is a linear subspace:
/// it is iff `-d_i` lies in the cone for every generator `d_i`. Each test is
/// an exact phase-1 feasibility solve.
pub fn cone_is_subspace(d: &[Vec<Rat>]) -> Result<QCResult> {
    let Some(dim) = d.first().map(Vec::len) else {
        return Err(Error::Empty("cone needs at least one generator".into()));
    };
    if d.iter().any(|g| g.len() != dim) {
        return Err(Error::DimensionMismatch("generators differ in dimension".into()));
    }
    if d.len() > MAX_GENERATORS || dim > MAX_CONE_DIM {
        return Err(Error::SizeCap {
            what: format!("cone with {} generators in dimension {dim}", d.len()),
            needed: d.len().max(dim),
            cap: if d.len() > MAX_GENERATORS { MAX_GENERATORS } else { MAX_CONE_DIM },
        });
    }
    let cols: Vec<Vec<BigRational>> = d.iter().map(|g| big_vec(g)).collect();
    let mut certificates = Vec::with_capacity(d.len());
    let mut failing = None;
    for (i, g) in cols.iter().enumerate() {
        let target: Vec<BigRational> = g.iter().map(|v| -v.clone()).collect();
        match nonneg_solve(&cols, &target) {
            Feasibility::Feasible(l) => certificates.push(Certificate::Combination(l)),
            Feasibility::Infeasible(y) => {
                // yᵀd_j >= 0 and yᵀ(-d_i) < 0; flip to the stated sign.
                certificates.push(Certificate::Separator(y.iter().map(|v| -v.clone()).collect()));
                failing.get_or_insert(i);
            }
        }
    }
    let is_subspace = failing.is_none();
    Ok(QCResult {
        generators: d.to_vec(),
        is_subspace,
        basis: span_basis(&cols, dim),
        certificates,
        failing,
        domains_meet: None,
    })
}

/// Condition on `cone(π dom g - A π dom f)` for `f` on `X×U` (first `x_dim`
/// axes) and `g` on `Y×V` (first `y_dim` axes).
pub fn check_qc_pair(f: &GridFn, x_dim: usize, g: &GridFn, y_dim: usize, a: &RatLinMap) -> Result<QCResult> {
    let pf = dom_project(f, 0, x_dim)?;
    let pg = dom_project(g, 0, y_dim)?;
    if a.cols() != x_dim || a.rows() != y_dim {
        return Err(Error::DimensionMismatch(format!(
            "map is {}x{}, blocks are {x_dim} -> {y_dim}",
            a.rows(),
            a.cols()
        )));
    }
    let gens: Vec<Vec<Rat>> = difference_generators(&pg, a, &pf).into_iter().collect();
    let mut qc = cone_is_subspace(&gens)?;
    qc.domains_meet = Some(in_convex_hull(&gens, &vec![Rat::zero(); y_dim]));
    Ok(qc)
}

/// Condition on `cone(π_W dom k - C(X))` for `k` on `W×T` (first `w_dim`
/// axes). The range of `C` enters through `±` its columns.
pub fn check_qc_range(k: &GridFn, w_dim: usize, c: &RatLinMap) -> Result<QCResult> {
    if c.rows() != w_dim {
        return Err(Error::DimensionMismatch(format!("map has {} rows, block has {w_dim} axes", c.rows())));
    }
    let pk = hull_reduce(&dom_project(k, 0, w_dim)?);
    let mut gens: PointSet = pk.clone();
    for j in 0..c.cols() {
        let col = c.column(j);
        if col.iter().any(|v| !v.is_zero()) {
            gens.insert(col.iter().map(|v| -v).collect());
            gens.insert(col);
        }
    }
    let gens: Vec<Vec<Rat>> = gens.into_iter().collect();
    let mut qc = cone_is_subspace(&gens)?;
    // dom k meets C(X) iff some hull point of dom k is in the range of C.
    let cols: Vec<Vec<BigRational>> = (0..c.cols()).map(|j| big_vec(&c.column(j))).collect();
    let pk: Vec<Vec<Rat>> = pk.into_iter().collect();
    qc.domains_meet = Some(meets_subspace(&pk, &cols));
    Ok(qc)
}

/// Whether `conv(points)` meets `span(cols)`; exact.
fn meets_subspace(points: &[Vec<Rat>], cols: &[Vec<BigRational>]) -> bool {
    // conv(P) ∩ span(C) ≠ ∅ iff 0 ∈ conv(P) + span(C), i.e. the system
    // sum λ_i p_i + C(μ+ - μ-) = 0, sum λ = 1, λ, μ± >= 0 is feasible.
    use num_traits::One;
    let dim = points.first().map_or(0, Vec::len);
    let mut columns: Vec<Vec<BigRational>> = points
        .iter()
        .map(|p| {
            let mut v = big_vec(p);
            v.push(BigRational::one());
            v
        })
        .collect();
    for c in cols {
        let mut v = c.clone();
        v.push(BigRational::zero());
        columns.push(v.clone());
        columns.push(v.iter().map(|x| -x.clone()).collect());
    }
    let mut b = vec![BigRational::zero(); dim];
    b.push(BigRational::one());
    nonneg_solve(&columns, &b).is_feasible()
}

/// Outcome of [`sandwich_check`].
#[derive(Clone, Debug, PartialEq)]
pub struct Sandwich {
    pub inner_in_h: bool,
    /// First inner point outside `H`.
    pub inner_witness: Option<Vec<Rat>>,
    pub h_in_cone: bool,
    pub cone_is_h: bool,
    pub qc: QCResult,
}

impl Sandwich {
    pub fn holds(&self) -> bool {
        self.inner_in_h && self.h_in_cone && self.cone_is_h
    }
}

/// Checks `inner ⊂ H ⊂ cone(outer)` for the subspace `H = span(h_basis)`,
/// and then that `cone(outer) = H`.
pub fn sandwich_check(inner: &[Vec<Rat>], h_basis: &[Vec<Rat>], outer: &[Vec<Rat>]) -> Result<Sandwich> {
    let dim = outer
        .first()
        .or(inner.first())
        .map(Vec::len)
        .ok_or_else(|| Error::Empty("sandwich needs points".into()))?;
    if inner.iter().chain(h_basis).chain(outer).any(|v| v.len() != dim) {
        return Err(Error::DimensionMismatch("sandwich vectors differ in dimension".into()));
    }
    let hb: Vec<Vec<BigRational>> = h_basis.iter().map(|v| big_vec(v)).collect();
    let inner_witness = inner.iter().find(|p| !in_span(&hb, &big_vec(p))).cloned();
    let oc: Vec<Vec<BigRational>> = outer.iter().map(|v| big_vec(v)).collect();
    let h_in_cone = hb.iter().all(|h| {
        let neg: Vec<BigRational> = h.iter().map(|x| -x.clone()).collect();
        (oc.is_empty() && h.iter().all(Zero::is_zero))
            || (nonneg_solve(&oc, h).is_feasible() && nonneg_solve(&oc, &neg).is_feasible())
    });
    let qc = cone_is_subspace(outer)?;
    let cone_is_h = qc.is_subspace && rank(&oc, dim) == rank(&hb, dim) && oc.iter().all(|v| in_span(&hb, v));
    Ok(Sandwich {
        inner_in_h: inner_witness.is_none(),
        inner_witness,
        h_in_cone,
        cone_is_h,
        qc,
    })
}

/// Whether every point of `points` lies within Euclidean distance `tol` of
/// some point of `targets`. Returns the first point that does not.
pub fn closure_containment(points: &PointSet, targets: &PointSet, tol: f64) -> Option<Vec<Rat>> {
    points
        .iter()
        .find(|p| {
            !targets.iter().any(|t| {
                let d2: f64 = p.iter().zip(t).map(|(a, b)| to_f64(&(a - b)).powi(2)).sum();
                d2.sqrt() <= tol * (1.0 + 1e-12)
            })
        })
        .cloned()
}

/// Narrows a certificate vector for display.
pub fn cert_to_rat(v: &[BigRational]) -> Option<Vec<Rat>> {
    v.iter().map(from_big).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numcore::{int, Finite, LatticeGrid, PosInf};

    fn pts(v: &[&[i64]]) -> Vec<Vec<Rat>> {
        v.iter().map(|p| p.iter().map(|&x| int(x)).collect()).collect()
    }

    #[test]
    fn symmetric_pair_is_a_line() {
        let qc = cone_is_subspace(&pts(&[&[1, 0], &[-1, 0]])).unwrap();
        assert!(qc.is_subspace);
        assert_eq!(qc.basis.len(), 1);
        assert!(qc.basis[0][1].is_zero());
        assert!(qc.verify());
    }

    #[test]
    fn ray_is_not_a_subspace() {
        let qc = cone_is_subspace(&pts(&[&[1, 0]])).unwrap();
        assert!(!qc.is_subspace);
        assert_eq!(qc.failing, Some(0));
        assert!(qc.verify());
    }

    #[test]
    fn three_generators_fill_the_plane() {
        let qc = cone_is_subspace(&pts(&[&[1, 1], &[-1, 0], &[0, -1]])).unwrap();
        assert!(qc.is_subspace);
        assert_eq!(qc.basis.len(), 2);
        assert!(qc.verify());
    }

    #[test]
    fn empty_generators_error() {
        assert!(cone_is_subspace(&[]).is_err());
    }

    #[test]
    fn projections() {
        let g = LatticeGrid::cube(2, -1, 1, int(1)).unwrap();
        let ind = GridFn::indicator(g.clone(), &pts(&[&[0, 0]]), "i").unwrap();
        assert_eq!(dom_project(&ind, 0, 1).unwrap(), pts(&[&[0]]).into_iter().collect());
        let full = GridFn::from_fn(g.clone(), "z", |_| Finite(0.0)).unwrap();
        assert_eq!(dom_project(&full, 0, 1).unwrap().len(), 3);
        let row = GridFn::from_fn(g, "r", |p| if p[0] == 1.0 { Finite(0.0) } else { PosInf }).unwrap();
        assert_eq!(dom_project(&row, 0, 1).unwrap(), pts(&[&[1]]).into_iter().collect());
        assert!(dom_project(&row, 1, 3).is_err());
    }

    #[test]
    fn pair_conditions() {
        let g = LatticeGrid::cube(2, -1, 1, int(1)).unwrap();
        let id = RatLinMap::identity(1);
        let ind = GridFn::indicator(g.clone(), &pts(&[&[0, 0]]), "i").unwrap();
        let qc = check_qc_pair(&ind, 1, &ind, 1, &id).unwrap();
        assert!(qc.is_subspace);
        assert_eq!(qc.generators, pts(&[&[0]]));
        let full = GridFn::from_fn(g.clone(), "z", |_| Finite(0.0)).unwrap();
        assert!(check_qc_pair(&ind, 1, &full, 1, &id).unwrap().is_subspace);
        let one = GridFn::indicator(g, &pts(&[&[1, 0]]), "o").unwrap();
        let qc = check_qc_pair(&ind, 1, &one, 1, &id).unwrap();
        assert!(!qc.is_subspace);
        assert_eq!(qc.generators, pts(&[&[1]]));
        assert_eq!(qc.domains_meet, Some(false));
    }

    #[test]
    fn range_condition_uses_columns() {
        let g = LatticeGrid::cube(2, -1, 1, int(1)).unwrap();
        let k = GridFn::indicator(g, &pts(&[&[1, 0]]), "k").unwrap();
        let qc = check_qc_range(&k, 1, &RatLinMap::identity(1)).unwrap();
        assert!(qc.is_subspace);
        assert_eq!(qc.domains_meet, Some(true));
    }

    #[test]
    fn sandwich_cases() {
        let z = pts(&[&[0, 0]]);
        assert!(sandwich_check(&z, &z, &z).unwrap().holds());
        let axis = pts(&[&[1, 0]]);
        let inner = pts(&[&[2, 0], &[-1, 0]]);
        let outer = pts(&[&[1, 0], &[-3, 0]]);
        assert!(sandwich_check(&inner, &axis, &outer).unwrap().holds());
        let off = pts(&[&[0, 1]]);
        let s = sandwich_check(&off, &axis, &outer).unwrap();
        assert!(!s.holds());
        assert_eq!(s.inner_witness, Some(off[0].clone()));
    }

    #[test]
    fn reduction_keeps_hull_corners() {
        let all: PointSet = (-2..=2).flat_map(|a| (-2..=2).map(move |b| vec![int(a), int(b)])).collect();
        let r = hull_reduce(&all);
        assert_eq!(r.len(), 4);
    }
}
