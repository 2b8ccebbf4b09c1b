//! Finite graphs of multifunctions `E ⇉ E*` with rational coordinates, their
//! algebra, the two cc-maximality instance checks and the harnesses that tie
//! them to representative functions.

use std::collections::{BTreeMap, BTreeSet};

use crate::conjugate::closure;
use crate::error::{Error, Result};
use crate::numcore::rat::{add, dot, fmt_point, sub};
use crate::numcore::{GridFn, LatticeGrid, Polytope, Rat, RatLinMap};
use crate::quadab::{check_qc_t3, infconv_t3, DualGrids, QuadSetup};
use crate::qualif::QCResult;
use crate::reprfn::{at_transform, graph_of, is_strongly_representative, PairingCheck, ReprFn};

pub type Pair = (Vec<Rat>, Vec<Rat>);

/// Graph of a multifunction, kept as an ordered set of `(x, x*)` pairs.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord)]
pub struct OperatorGraph {
    dim: usize,
    pairs: BTreeSet<Pair>,
}

impl OperatorGraph {
    pub fn new(dim: usize) -> Self {
        OperatorGraph {
            dim,
            pairs: BTreeSet::new(),
        }
    }

    pub fn from_pairs(dim: usize, pairs: impl IntoIterator<Item = Pair>) -> Result<Self> {
        let mut g = Self::new(dim);
        for (x, s) in pairs {
            g.insert(x, s)?;
        }
        Ok(g)
    }

    /// `{(x, x)}` over the points of `grid`.
    pub fn identity(grid: &LatticeGrid) -> Self {
        let pairs = (0..grid.len()).map(|i| (grid.point_rat(i), grid.point_rat(i))).collect();
        OperatorGraph { dim: grid.dim(), pairs }
    }

    /// `{(x, 0)}` over the points of `grid`.
    pub fn zero(grid: &LatticeGrid) -> Self {
        let z = vec![Rat::from_integer(0); grid.dim()];
        let pairs = (0..grid.len()).map(|i| (grid.point_rat(i), z.clone())).collect();
        OperatorGraph { dim: grid.dim(), pairs }
    }

    pub fn insert(&mut self, x: Vec<Rat>, s: Vec<Rat>) -> Result<bool> {
        if x.len() != self.dim || s.len() != self.dim {
            return Err(Error::DimensionMismatch(format!(
                "pair ({}, {}) in a graph over dimension {}",
                fmt_point(&x),
                fmt_point(&s),
                self.dim
            )));
        }
        Ok(self.pairs.insert((x, s)))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn pairs(&self) -> &BTreeSet<Pair> {
        &self.pairs
    }

    pub fn contains(&self, x: &[Rat], s: &[Rat]) -> bool {
        self.pairs.contains(&(x.to_vec(), s.to_vec()))
    }

    pub fn domain(&self) -> BTreeSet<Vec<Rat>> {
        self.pairs.iter().map(|(x, _)| x.clone()).collect()
    }

    pub fn range(&self) -> BTreeSet<Vec<Rat>> {
        self.pairs.iter().map(|(_, s)| s.clone()).collect()
    }

    /// Values `Sx`.
    pub fn at(&self, x: &[Rat]) -> Vec<&Vec<Rat>> {
        self.pairs.iter().filter(|(p, _)| p.as_slice() == x).map(|(_, s)| s).collect()
    }

    fn by_point(&self) -> BTreeMap<&Vec<Rat>, Vec<&Vec<Rat>>> {
        let mut m: BTreeMap<&Vec<Rat>, Vec<&Vec<Rat>>> = BTreeMap::new();
        for (x, s) in &self.pairs {
            m.entry(x).or_default().push(s);
        }
        m
    }

    fn same_dim(&self, other: &OperatorGraph) -> Result<()> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch(format!(
                "graphs over dimensions {} and {}",
                self.dim, other.dim
            )));
        }
        Ok(())
    }

    pub fn inverse(&self) -> OperatorGraph {
        OperatorGraph {
            dim: self.dim,
            pairs: self.pairs.iter().map(|(x, s)| (s.clone(), x.clone())).collect(),
        }
    }

    /// `(S + T)x = Sx + Tx` on the common domain.
    pub fn sum(&self, other: &OperatorGraph) -> Result<OperatorGraph> {
        self.same_dim(other)?;
        let t = other.by_point();
        let mut out = BTreeSet::new();
        for (x, s) in &self.pairs {
            if let Some(ts) = t.get(x) {
                for tv in ts {
                    out.insert((x.clone(), add(s, tv)));
                }
            }
        }
        Ok(OperatorGraph { dim: self.dim, pairs: out })
    }

    /// `x* ∈ (S ∥ T)x` iff `x* ∈ S(x - v) ∩ Tv` for some `v`.
    pub fn parallel(&self, other: &OperatorGraph) -> Result<OperatorGraph> {
        self.same_dim(other)?;
        let mut by_value: BTreeMap<&Vec<Rat>, Vec<&Vec<Rat>>> = BTreeMap::new();
        for (v, t) in &other.pairs {
            by_value.entry(t).or_default().push(v);
        }
        let mut out = BTreeSet::new();
        for (a, s) in &self.pairs {
            if let Some(vs) = by_value.get(s) {
                for v in vs {
                    out.insert((add(a, v), s.clone()));
                }
            }
        }
        Ok(OperatorGraph { dim: self.dim, pairs: out })
    }

    /// `(S⁻¹ + T⁻¹)⁻¹`.
    pub fn parallel_via_inverses(&self, other: &OperatorGraph) -> Result<OperatorGraph> {
        Ok(self.inverse().sum(&other.inverse())?.inverse())
    }

    /// `x ↦ Aᵀ S(Ax)` for `A: E → F` and `self` a graph over `F`, evaluated
    /// at the points `xs` of `E`.
    pub fn conj_transform(&self, a: &RatLinMap, xs: &[Vec<Rat>]) -> Result<OperatorGraph> {
        if a.rows() != self.dim {
            return Err(Error::DimensionMismatch(format!(
                "map with {} rows applied to a graph over dimension {}",
                a.rows(),
                self.dim
            )));
        }
        let at = a.transpose();
        let m = self.by_point();
        let mut out = BTreeSet::new();
        for x in xs {
            if x.len() != a.cols() {
                return Err(Error::DimensionMismatch(format!("point {} for a map with {} columns", fmt_point(x), a.cols())));
            }
            if let Some(ss) = m.get(&a.apply(x)) {
                for s in ss {
                    out.insert((x.clone(), at.apply(s)));
                }
            }
        }
        Ok(OperatorGraph { dim: a.cols(), pairs: out })
    }

    /// Restriction to pairs whose point lies in `keep`.
    pub fn restrict(&self, keep: impl Fn(&[Rat], &[Rat]) -> bool) -> OperatorGraph {
        OperatorGraph {
            dim: self.dim,
            pairs: self.pairs.iter().filter(|(x, s)| keep(x, s)).cloned().collect(),
        }
    }
}

/// Result of the all-pairs monotonicity check.
#[derive(Clone, Debug, PartialEq)]
pub struct MonotoneCheck {
    pub monotone: bool,
    /// First pair of pairs with `<s - t, s* - t*> < 0`.
    pub violation: Option<(Pair, Pair)>,
}

pub fn is_monotone(g: &OperatorGraph) -> MonotoneCheck {
    let pairs: Vec<&Pair> = g.pairs.iter().collect();
    for (i, p) in pairs.iter().enumerate() {
        for q in &pairs[i + 1..] {
            if dot(&sub(&p.0, &q.0), &sub(&p.1, &q.1)) < Rat::from_integer(0) {
                return MonotoneCheck {
                    monotone: false,
                    violation: Some(((*p).clone(), (*q).clone())),
                };
            }
        }
    }
    MonotoneCheck {
        monotone: true,
        violation: None,
    }
}

/// Whether `(x, x*)` is monotonically related to every pair of `g`.
pub fn monotonically_related(g: &OperatorGraph, x: &[Rat], s: &[Rat]) -> bool {
    let zero = Rat::from_integer(0);
    g.pairs.iter().all(|(y, t)| dot(&sub(x, y), &sub(s, t)) >= zero)
}

/// Outcome of the grid-maximality test.
#[derive(Clone, Debug, PartialEq)]
pub struct Maximality {
    pub maximal: bool,
    /// First window point outside the graph that could be added.
    pub addable: Option<Pair>,
}

/// Grid surrogate for maximal monotonicity: no point of `window` (a grid
/// over `E×E*`) outside the graph is monotonically related to all of it.
/// Points near the edge of a truncated graph are almost always addable, so
/// the window should sit inside the region the graph was sampled on.
pub fn grid_maximal(g: &OperatorGraph, window: &LatticeGrid) -> Result<Maximality> {
    if window.dim() != 2 * g.dim {
        return Err(Error::DimensionMismatch(format!(
            "window of dimension {} for a graph over dimension {}",
            window.dim(),
            g.dim
        )));
    }
    for i in 0..window.len() {
        let p = window.point_rat(i);
        let (x, s) = p.split_at(g.dim);
        if !g.contains(x, s) && monotonically_related(g, x, s) {
            return Ok(Maximality {
                maximal: false,
                addable: Some((x.to_vec(), s.to_vec())),
            });
        }
    }
    Ok(Maximality {
        maximal: true,
        addable: None,
    })
}

/// Test data for one of the two cc-maximality conditions.
#[derive(Clone, Debug, PartialEq)]
pub enum CcInstance {
    /// `y ∈ E` and `C ⊂ E*`: hypothesis over `<s - y, s* - y*>`, conclusion
    /// `Sy ∩ C ≠ ∅`.
    Star { y: Vec<Rat>, c: Polytope },
    /// `C ⊂ E` and `y* ∈ E*`: hypothesis over `<s - w, s* - y*>`, conclusion
    /// `S⁻¹y* ∩ C ≠ ∅`.
    Space { c: Polytope, ystar: Vec<Rat> },
}

#[derive(Clone, Debug, PartialEq)]
pub struct CcOutcome {
    pub hypothesis: bool,
    pub conclusion: bool,
    /// A graph pair for which no point of `C` works (hypothesis failure).
    pub blocking_pair: Option<Pair>,
    /// A pair realizing the conclusion.
    pub witness: Option<Pair>,
}

impl CcOutcome {
    /// The implication holds (vacuously when the hypothesis fails).
    pub fn holds(&self) -> bool {
        !self.hypothesis || self.conclusion
    }
}

pub fn cc_check(g: &OperatorGraph, inst: &CcInstance) -> Result<CcOutcome> {
    let zero = Rat::from_integer(0);
    let (point, c) = match inst {
        CcInstance::Star { y, c } => (y, c),
        CcInstance::Space { c, ystar } => (ystar, c),
    };
    if point.len() != g.dim || c.dim() != g.dim {
        return Err(Error::DimensionMismatch("cc instance and graph dimensions differ".into()));
    }
    let mut blocking_pair = None;
    for (s, ss) in &g.pairs {
        // max over C of a linear expression is attained at a vertex
        let ok = match inst {
            CcInstance::Star { y, c } => {
                let d = sub(s, y);
                dot(&d, ss) - c.min_pairing(&d) >= zero
            }
            CcInstance::Space { c, ystar } => {
                let d = sub(ss, ystar);
                dot(s, &d) - c.min_pairing(&d) >= zero
            }
        };
        if !ok {
            blocking_pair = Some((s.clone(), ss.clone()));
            break;
        }
    }
    let witness = match inst {
        CcInstance::Star { y, c } => g
            .pairs
            .iter()
            .find(|(x, s)| x == y && c.contains(s))
            .cloned(),
        CcInstance::Space { c, ystar } => g
            .pairs
            .iter()
            .find(|(x, s)| s == ystar && c.contains(x))
            .cloned(),
    };
    Ok(CcOutcome {
        hypothesis: blocking_pair.is_none(),
        conclusion: witness.is_some(),
        blocking_pair,
        witness,
    })
}

/// Verdict for one cc instance inside a harness.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    /// Hypothesis and conclusion both hold.
    Verified,
    /// Hypothesis fails; nothing to conclude.
    Vacuous,
    /// The composed operator is not grid-maximal, so the instance does not
    /// meet the harness precondition.
    Skipped,
    /// Hypothesis holds, conclusion fails.
    Counterexample,
}

#[derive(Clone, Debug, PartialEq)]
pub struct InstanceReport {
    pub instance: CcInstance,
    /// `S + M_{y,K}` or `S ∥ N_{K,y*}` with `K = -C`.
    pub composed: OperatorGraph,
    pub composed_monotone: bool,
    pub composed_maximal: Option<Maximality>,
    pub cc: CcOutcome,
    pub verdict: Verdict,
}

#[derive(Clone, Debug, PartialEq)]
pub struct HarnessReport {
    pub entries: Vec<InstanceReport>,
}

impl HarnessReport {
    pub fn counterexamples(&self) -> usize {
        self.entries.iter().filter(|e| e.verdict == Verdict::Counterexample).count()
    }

    pub fn all_hold(&self) -> bool {
        self.entries.iter().all(|e| e.cc.holds())
    }
}

/// `S + M_{y,K}` (star kind) or `S ∥ N_{K,y*}` (space kind) with `K = -C`,
/// the auxiliary multifunction taken from its closed form on `grid`.
pub fn compose_for(s: &OperatorGraph, inst: &CcInstance, grid: &LatticeGrid) -> Result<OperatorGraph> {
    // a closed form that is +inf on the whole grid has an empty graph there
    let on_grid = |r: Result<ReprFn>| match r {
        Ok(f) => Ok(graph_of(&f, None)),
        Err(Error::Improper(_)) => Ok(OperatorGraph::new(s.dim())),
        Err(e) => Err(e),
    };
    match inst {
        CcInstance::Star { y, c } => s.sum(&on_grid(ReprFn::example7(y.clone(), c.negated(), grid.clone()))?),
        CcInstance::Space { c, ystar } => {
            s.parallel(&on_grid(ReprFn::example6(c.negated(), ystar.clone(), grid.clone()))?)
        }
    }
}

fn verdict(cc: &CcOutcome, maximal: bool) -> Verdict {
    match (maximal, cc.hypothesis, cc.conclusion) {
        (false, _, _) => Verdict::Skipped,
        (true, false, _) => Verdict::Vacuous,
        (true, true, true) => Verdict::Verified,
        (true, true, false) => Verdict::Counterexample,
    }
}

/// For each instance, composes `S` with the closed-form multifunction on
/// `grid` (over `E×E*`), asks the grid-maximality oracle about the result on
/// `window`, and evaluates the cc implication where the oracle agrees.
pub fn theorem11_harness(
    s: &OperatorGraph,
    instances: &[CcInstance],
    grid: &LatticeGrid,
    window: &LatticeGrid,
) -> Result<HarnessReport> {
    let mut entries = Vec::with_capacity(instances.len());
    for inst in instances {
        let composed = compose_for(s, inst, grid)?;
        let m = grid_maximal(&composed, window)?;
        let cc = cc_check(s, inst)?;
        entries.push(InstanceReport {
            instance: inst.clone(),
            composed_monotone: is_monotone(&composed).monotone,
            verdict: verdict(&cc, m.maximal),
            composed_maximal: Some(m),
            composed,
            cc,
        });
    }
    Ok(HarnessReport { entries })
}

/// cc implications for `S = M f` with `f` strongly representative. The
/// composed operators are reported for monotonicity; no maximality oracle
/// is consulted, since strong representability supplies it.
pub fn theorem17_harness(f: &ReprFn, instances: &[CcInstance]) -> Result<HarnessReport> {
    let s = graph_of(f, None);
    let mut entries = Vec::with_capacity(instances.len());
    for inst in instances {
        let composed = compose_for(&s, inst, f.grid())?;
        let cc = cc_check(&s, inst)?;
        entries.push(InstanceReport {
            instance: inst.clone(),
            composed_monotone: is_monotone(&composed).monotone,
            composed_maximal: None,
            verdict: verdict(&cc, true),
            composed,
            cc,
        });
    }
    Ok(HarnessReport { entries })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Variant {
    /// `M f + Aᵀ(M g)A` with `A: E → F`.
    A,
    /// `(M f* + B(M g*)Bᵀ)⁻¹` with `B: F → E`.
    B,
    /// `((M f)⁻¹ + B(M g)⁻¹Bᵀ)⁻¹` with `B: F → E`.
    C,
}

#[derive(Clone, Debug)]
pub struct Theorem15Report {
    pub variant: Variant,
    pub qualification: QCResult,
    /// False when the qualification condition fails; nothing else is
    /// computed then.
    pub applicable: bool,
    /// Closed convex hull of the inf-convolution, on `E×E*`.
    pub hbar: Option<GridFn>,
    pub hbar_strong: Option<PairingCheck>,
    /// `M h̄`.
    pub graph: OperatorGraph,
    /// The operator built from graphs, restricted to the grid of `f`.
    pub expected: OperatorGraph,
    pub equal: bool,
}

impl Theorem15Report {
    pub fn success(&self) -> bool {
        !self.applicable || (self.equal && self.hbar_strong.as_ref().is_some_and(|c| c.ok))
    }
}

/// Builds `h` from `f` and `g` (sum form for variant A, parallel form
/// otherwise), closes it, extracts `M h̄` and compares with the operator
/// assembled directly from `M f` and `M g`. `map` is `A: E → F` for
/// variant A and `B: F → E` otherwise; `tol` is the graph tolerance.
pub fn theorem15_verify(f: &ReprFn, g: &ReprFn, map: &RatLinMap, variant: Variant, tol: Option<f64>) -> Result<Theorem15Report> {
    let (n, m) = (f.dim(), g.dim());
    let fg = f.to_grid_fn()?;
    let gg = g.to_grid_fn()?;
    let setup = match variant {
        Variant::A => {
            let d = DualGrids::bracketing(&fg, n, &gg, m)?;
            QuadSetup::sum_form(fg, n, gg, m, map.clone(), d)?
        }
        Variant::B | Variant::C => {
            let d = DualGrids::bracketing(&fg.swap_blocks(n)?, n, &gg.swap_blocks(m)?, m)?;
            QuadSetup::parallel_form(fg, n, gg, m, map.clone(), d)?
        }
    };
    let qualification = check_qc_t3(&setup)?;
    if !qualification.is_subspace {
        return Ok(Theorem15Report {
            variant,
            qualification,
            applicable: false,
            hbar: None,
            hbar_strong: None,
            graph: OperatorGraph::new(n),
            expected: OperatorGraph::new(n),
            equal: false,
        });
    }
    let mut h = infconv_t3(&setup)?;
    if variant != Variant::A {
        h = h.swap_blocks(n)?;
    }
    let hbar = closure(&h)?;
    let hr = ReprFn::sampled(hbar.clone())?;
    let graph = graph_of(&hr, tol);
    let hbar_strong = is_strongly_representative(&hr, tol.unwrap_or(1e-9))?;

    let (eg, esg) = f.grid().split(n)?;
    let mf = graph_of(f, tol);
    let mg = graph_of(g, tol);
    let expected = match variant {
        Variant::A => {
            let xs: Vec<Vec<Rat>> = (0..eg.len()).map(|i| eg.point_rat(i)).collect();
            mf.sum(&mg.conj_transform(map, &xs)?)?
        }
        Variant::C => {
            let xs: Vec<Vec<Rat>> = (0..esg.len()).map(|i| esg.point_rat(i)).collect();
            let inner = mg.inverse().conj_transform(&map.transpose(), &xs)?;
            mf.inverse().sum(&inner)?.inverse()
        }
        Variant::B => {
            let xs: Vec<Vec<Rat>> = (0..esg.len()).map(|i| esg.point_rat(i)).collect();
            let mfs = at_transform(f)?.graph(tol)?.inverse();
            let mgs = at_transform(g)?.graph(tol)?.inverse();
            mfs.sum(&mgs.conj_transform(&map.transpose(), &xs)?)?.inverse()
        }
    };
    let grid = f.grid().clone();
    let expected = expected.restrict(|x, s| grid.locate(&[x, s].concat()).is_some());
    let equal = graph == expected;
    Ok(Theorem15Report {
        variant,
        qualification,
        applicable: true,
        hbar: Some(hbar),
        hbar_strong: Some(hbar_strong),
        graph,
        expected,
        equal,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numcore::{int, rat};

    fn pts(v: &[(i64, i64)]) -> OperatorGraph {
        OperatorGraph::from_pairs(1, v.iter().map(|&(a, b)| (vec![int(a)], vec![int(b)]))).unwrap()
    }

    #[test]
    fn monotonicity_examples() {
        let id = OperatorGraph::identity(&LatticeGrid::integers(-2, 2).unwrap());
        assert!(is_monotone(&id).monotone);
        let bad = pts(&[(0, 1), (1, 0)]);
        let m = is_monotone(&bad);
        assert!(!m.monotone);
        assert_eq!(m.violation, Some(((vec![int(0)], vec![int(1)]), (vec![int(1)], vec![int(0)]))));
    }

    #[test]
    fn parallel_sum_of_identities_halves() {
        let grid = LatticeGrid::new(vec![int(0)], vec![int(2)], vec![-2], vec![2]).unwrap();
        let id = OperatorGraph::identity(&grid);
        let p = id.parallel(&id).unwrap();
        assert_eq!(p, id.parallel_via_inverses(&id).unwrap());
        let expect: Vec<(i64, i64)> = (-2..=2).map(|k| (4 * k, 2 * k)).collect();
        assert_eq!(p, pts(&expect));
        assert!(p.pairs().iter().all(|(x, s)| s[0] == x[0] * rat(1, 2)));
    }

    #[test]
    fn inverse_is_an_involution_and_zero_is_neutral() {
        let g = pts(&[(0, 1), (1, 3), (1, 4), (2, -1)]);
        assert_eq!(g.inverse().inverse(), g);
        let z = OperatorGraph::zero(&LatticeGrid::integers(0, 1).unwrap());
        assert_eq!(g.sum(&z).unwrap(), pts(&[(0, 1), (1, 3), (1, 4)]));
    }

    #[test]
    fn conj_transform_scales() {
        let id = OperatorGraph::identity(&LatticeGrid::integers(-4, 4).unwrap());
        let a = RatLinMap::scalar(1, int(2));
        let xs: Vec<Vec<Rat>> = (-3..=3).map(|k| vec![int(k)]).collect();
        let t = id.conj_transform(&a, &xs).unwrap();
        assert_eq!(t, pts(&[(-2, -8), (-1, -4), (0, 0), (1, 4), (2, 8)]));
    }

    #[test]
    fn cc_examples() {
        let id = OperatorGraph::identity(&LatticeGrid::integers(-2, 2).unwrap());
        let star = CcInstance::Star {
            y: vec![int(0)],
            c: Polytope::interval(int(-1), int(1)),
        };
        let o = cc_check(&id, &star).unwrap();
        assert!(o.hypothesis && o.conclusion);
        assert_eq!(o.witness, Some((vec![int(0)], vec![int(0)])));

        let holey = pts(&[(-1, -1), (1, 1)]);
        let o = cc_check(&holey, &star).unwrap();
        assert!(o.hypothesis);
        assert!(!o.conclusion);
        assert!(!o.holds());

        let far = CcInstance::Star {
            y: vec![int(0)],
            c: Polytope::interval(int(5), int(6)),
        };
        let o = cc_check(&id, &far).unwrap();
        assert!(!o.hypothesis);
        assert!(o.holds());
    }

    #[test]
    fn space_kind_mirrors_star() {
        let id = OperatorGraph::identity(&LatticeGrid::integers(-2, 2).unwrap());
        let inst = CcInstance::Space {
            c: Polytope::interval(int(-1), int(1)),
            ystar: vec![int(1)],
        };
        let o = cc_check(&id, &inst).unwrap();
        assert!(o.hypothesis && o.conclusion);
        assert_eq!(o.witness, Some((vec![int(1)], vec![int(1)])));
    }

    #[test]
    fn integer_identity_is_not_grid_maximal() {
        let g = LatticeGrid::integers(-2, 2).unwrap();
        let id = OperatorGraph::identity(&g);
        let window = LatticeGrid::cube(2, -1, 1, int(1)).unwrap();
        let m = grid_maximal(&id, &window).unwrap();
        assert!(!m.maximal);
        // (0, 1) satisfies k(k - 1) >= 0 against every integer k
        assert_eq!(m.addable, Some((vec![int(-1)], vec![int(0)])));
    }

    #[test]
    fn full_vertical_line_is_grid_maximal() {
        let g = OperatorGraph::from_pairs(1, (-3..=3).map(|k| (vec![int(0)], vec![int(k)]))).unwrap();
        let window = LatticeGrid::cube(2, -1, 1, int(1)).unwrap();
        assert!(grid_maximal(&g, &window).unwrap().maximal);
    }
}
