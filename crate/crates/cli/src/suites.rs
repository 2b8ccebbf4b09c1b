//! Seeded randomized property suites. Every case is drawn from a ChaCha
//! stream keyed by the seed, so a suite run is reproducible bit for bit.

use cav_core::conjugate::{conjugate, conjugate_fast};
use cav_core::monops::{is_monotone, OperatorGraph};
use cav_core::qualif::cone_is_subspace;
use cav_core::quadab::{lemma2_sets, compare_t21, compare_t3, DualGrids, QuadSetup, RangeSetup, DEFAULT_MAX_CELLS};
use cav_core::{fmt_point, int, rat, Error, ExtReal, Finite, GridFn, LatticeGrid, PosInf, Rat, RatLinMap};
use num_traits::{Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Suite {
    ConjugateOracle,
    WeakDualityT3,
    WeakDualityT21,
    Lemma2,
    ConeOracle,
    ParallelSum,
}

impl Suite {
    pub const NAMES: [&'static str; 6] = [
        "conjugate_oracle",
        "weak_duality_t3",
        "weak_duality_t21",
        "lemma2",
        "cone_oracle",
        "parallel_sum",
    ];
    pub const ALL: [Suite; 6] = [
        Suite::ConjugateOracle,
        Suite::WeakDualityT3,
        Suite::WeakDualityT21,
        Suite::Lemma2,
        Suite::ConeOracle,
        Suite::ParallelSum,
    ];

    pub fn parse(s: &str) -> Option<Suite> {
        Self::NAMES.iter().position(|n| *n == s).map(|i| Self::ALL[i])
    }

    pub fn name(self) -> &'static str {
        Self::NAMES[Self::ALL.iter().position(|s| *s == self).unwrap()]
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct SuiteOutcome {
    pub cases: usize,
    /// Cases whose instance had nothing to check (e.g. improper inf-convolutions).
    pub vacuous: usize,
    pub failures: usize,
    pub first_failure: Option<String>,
}

impl SuiteOutcome {
    fn record(&mut self, r: Result<bool, String>) {
        self.cases += 1;
        match r {
            Ok(true) => {}
            Ok(false) => self.vacuous += 1,
            Err(msg) => {
                self.failures += 1;
                if self.first_failure.is_none() {
                    self.first_failure = Some(format!("case {}: {msg}", self.cases));
                }
            }
        }
    }
}

/// Runs `cases` instances of `suite`. Case `i` is drawn from its own stream
/// (seed, i), so prefixes of a run agree across case counts.
pub fn run_suite(suite: Suite, cases: usize, seed: u64) -> SuiteOutcome {
    let mut out = SuiteOutcome::default();
    for i in 0..cases {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(i as u64);
        let r = match suite {
            Suite::ConjugateOracle => conjugate_case(&mut rng),
            Suite::WeakDualityT3 => weak_t3_case(&mut rng),
            Suite::WeakDualityT21 => weak_t21_case(&mut rng),
            Suite::Lemma2 => lemma2_case(&mut rng),
            Suite::ConeOracle => cone_case(&mut rng),
            Suite::ParallelSum => parallel_case(&mut rng),
        };
        out.record(r);
    }
    out
}

fn random_grid(rng: &mut ChaCha8Rng, dim: usize, max_len: usize, cap: usize) -> LatticeGrid {
    let mut lens: Vec<usize> = (0..dim).map(|_| rng.gen_range(1..=max_len)).collect();
    while lens.iter().product::<usize>() > cap {
        let i = (0..dim).max_by_key(|&i| (lens[i], usize::MAX - i)).unwrap();
        lens[i] -= 1;
    }
    let steps = [rat(1, 1), rat(1, 2), rat(1, 3), rat(2, 1)];
    let mut origin = Vec::with_capacity(dim);
    let mut step = Vec::with_capacity(dim);
    let mut lo = Vec::with_capacity(dim);
    let mut hi = Vec::with_capacity(dim);
    for &n in &lens {
        origin.push(rat(rng.gen_range(-2..=2), rng.gen_range(1..=2)));
        step.push(steps[rng.gen_range(0..steps.len())]);
        let l = rng.gen_range(-(n as i64)..=0);
        lo.push(l);
        hi.push(l + n as i64 - 1);
    }
    LatticeGrid::new(origin, step, lo, hi).expect("valid random grid")
}

fn random_values(rng: &mut ChaCha8Rng, n: usize, p_inf: f64) -> Vec<ExtReal> {
    let mut v: Vec<ExtReal> = (0..n)
        .map(|_| {
            if rng.gen_bool(p_inf) {
                PosInf
            } else if rng.gen_bool(0.5) {
                Finite(rng.gen_range(-8..=8) as f64 / 4.0)
            } else {
                Finite(rng.gen_range(-5.0..5.0))
            }
        })
        .collect();
    if v.iter().all(|x| !x.is_finite()) {
        let i = rng.gen_range(0..n);
        v[i] = Finite(0.0);
    }
    v
}

fn conjugate_case(rng: &mut ChaCha8Rng) -> Result<bool, String> {
    let dim = rng.gen_range(1..=4);
    let grid = random_grid(rng, dim, 9, 400);
    let vals = random_values(rng, grid.len(), 0.25);
    let f = GridFn::new(grid, vals, "f").map_err(|e| e.to_string())?;
    let dual = random_grid(rng, dim, 9, 400);
    let slow = conjugate(&f, &dual).map_err(|e| e.to_string())?;
    let fast = conjugate_fast(&f, &dual).map_err(|e| e.to_string())?;
    match slow.values().iter().zip(fast.values()).position(|(a, b)| a != b) {
        None => Ok(true),
        Some(i) => Err(format!(
            "dim {dim}, dual point {}: {} vs {}",
            fmt_point(&dual.point_rat(i)),
            slow.value(i).render(),
            fast.value(i).render()
        )),
    }
}

fn int_box(rng: &mut ChaCha8Rng, dim: usize, r: i64) -> LatticeGrid {
    let lo: Vec<i64> = (0..dim).map(|_| rng.gen_range(-r..=0)).collect();
    let hi: Vec<i64> = lo.iter().map(|&l| (l + rng.gen_range(1..=r)).min(r)).collect();
    LatticeGrid::new(vec![Rat::zero(); dim], vec![int(1); dim], lo, hi).expect("valid box")
}

fn sym(dim: usize, r: i64) -> LatticeGrid {
    LatticeGrid::cube(dim, -r, r, int(1)).expect("valid cube")
}

fn int_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize, r: i64) -> RatLinMap {
    let v = (0..rows)
        .map(|_| (0..cols).map(|_| int(rng.gen_range(-r..=r))).collect())
        .collect();
    RatLinMap::from_rows(v).expect("valid matrix")
}

fn dims_pair(rng: &mut ChaCha8Rng) -> (usize, usize) {
    if rng.gen_bool(0.7) {
        (1, 1)
    } else if rng.gen_bool(0.5) {
        (2, 1)
    } else {
        (1, 2)
    }
}

fn weak_t3_case(rng: &mut ChaCha8Rng) -> Result<bool, String> {
    let (xd, ud) = dims_pair(rng);
    let (yd, vd) = dims_pair(rng);
    let fg = int_box(rng, xd, 2).product(&int_box(rng, ud, 2));
    let gg = int_box(rng, yd, 2).product(&int_box(rng, vd, 2));
    let fv = random_values(rng, fg.len(), 0.2);
    let gv = random_values(rng, gg.len(), 0.2);
    let f = GridFn::new(fg, fv, "f").map_err(|e| e.to_string())?;
    let g = GridFn::new(gg, gv, "g").map_err(|e| e.to_string())?;
    let a = int_matrix(rng, yd, xd, 2);
    let b = int_matrix(rng, ud, vd, 1);
    let duals = DualGrids {
        x: sym(xd, 2),
        u: sym(ud, 2),
        y: sym(yd, 2),
        v: sym(vd, 2),
    };
    let s = QuadSetup::new(f, xd, g, yd, a, b, duals).map_err(|e| e.to_string())?;
    match compare_t3(&s) {
        Ok(r) => match r.weak_violation() {
            None => Ok(true),
            Some(i) => Err(format!(
                "h* = {} exceeds dual minimum {} at {}",
                r.lhs.value(i).render(),
                r.rhs[i].render(),
                fmt_point(&r.lhs.grid().point_rat(i))
            )),
        },
        Err(Error::Improper(_)) => Ok(false),
        Err(e) => Err(e.to_string()),
    }
}

fn weak_t21_case(rng: &mut ChaCha8Rng) -> Result<bool, String> {
    let (wd, td) = dims_pair(rng);
    let xd = rng.gen_range(1..=2);
    let ud = rng.gen_range(1..=2);
    let kg = int_box(rng, wd, 2).product(&int_box(rng, td, 2));
    let kv = random_values(rng, kg.len(), 0.2);
    let k = GridFn::new(kg, kv, "k").map_err(|e| e.to_string())?;
    let s = RangeSetup {
        k,
        w_dim: wd,
        c: int_matrix(rng, wd, xd, 2),
        d: int_matrix(rng, ud, td, 1),
        x_grid: sym(xd, 2),
        u_grid: sym(ud, 2),
        x_dual: sym(xd, 2),
        u_dual: sym(ud, 2),
        k_dual: sym(wd + td, 3),
        max_cells: DEFAULT_MAX_CELLS,
    };
    match compare_t21(&s) {
        Ok(r) => match r.weak_violation() {
            None => Ok(true),
            Some(i) => Err(format!(
                "h* = {} exceeds dual minimum {} at {}",
                r.lhs.value(i).render(),
                r.rhs[i].render(),
                fmt_point(&r.lhs.grid().point_rat(i))
            )),
        },
        Err(Error::Improper(_)) => Ok(false),
        Err(e) => Err(e.to_string()),
    }
}

fn small_rat(rng: &mut ChaCha8Rng) -> Rat {
    rat(rng.gen_range(-3..=3), rng.gen_range(1..=2))
}

fn lemma2_case(rng: &mut ChaCha8Rng) -> Result<bool, String> {
    let total = rng.gen_range(2..=3);
    let xd = rng.gen_range(1..total);
    let zd = total - xd;
    let r = RatLinMap::from_rows((0..zd).map(|_| (0..xd).map(|_| small_rat(rng)).collect()).collect())
        .map_err(|e| e.to_string())?;
    let step = if rng.gen_bool(0.5) { int(1) } else { rat(1, 2) };
    let bx = LatticeGrid::cube(total, -3, 3, step).map_err(|e| e.to_string())?;
    let n = rng.gen_range(1..=4);
    let g: Vec<Vec<Rat>> = (0..n)
        .map(|_| (0..total).map(|_| int(rng.gen_range(-2..=2))).collect())
        .collect();
    let out = lemma2_sets(&g, &r, &bx).map_err(|e| e.to_string())?;
    if out.equal {
        Ok(true)
    } else {
        let diff = out.lhs.symmetric_difference(&out.rhs).next().cloned().unwrap_or_default();
        Err(format!("sides differ at {}", fmt_point(&diff)))
    }
}

/// Solves `M λ = b` for the columns of `m`; `Some(λ)` only when the columns
/// are independent and the system is consistent.
fn solve_independent(m: &[&Vec<Rat>], b: &[Rat]) -> Option<Vec<Rat>> {
    let rows = b.len();
    let cols = m.len();
    let mut a: Vec<Vec<Rat>> = (0..rows)
        .map(|r| {
            let mut row: Vec<Rat> = m.iter().map(|c| c[r]).collect();
            row.push(b[r]);
            row
        })
        .collect();
    let mut pivot_row = 0;
    for c in 0..cols {
        let p = (pivot_row..rows).find(|&r| !a[r][c].is_zero())?;
        a.swap(pivot_row, p);
        let pv = a[pivot_row][c];
        for v in a[pivot_row].iter_mut() {
            *v /= pv;
        }
        for r in 0..rows {
            if r != pivot_row && !a[r][c].is_zero() {
                let f = a[r][c];
                let src = a[pivot_row].clone();
                for (x, y) in a[r].iter_mut().zip(src) {
                    *x -= f * y;
                }
            }
        }
        pivot_row += 1;
    }
    if a[pivot_row..].iter().any(|row| !row[cols].is_zero()) {
        return None;
    }
    Some((0..cols).map(|c| a[c][cols]).collect())
}

/// Brute-force cone membership: `t ∈ cone(d)` iff some linearly independent
/// subset of `d` represents `t` with nonnegative weights.
pub fn in_cone_brute(d: &[Vec<Rat>], t: &[Rat]) -> bool {
    if t.iter().all(Zero::is_zero) {
        return true;
    }
    (1u32..(1 << d.len())).any(|mask| {
        let cols: Vec<&Vec<Rat>> = (0..d.len()).filter(|i| mask & (1 << i) != 0).map(|i| &d[i]).collect();
        cols.len() <= t.len()
            && solve_independent(&cols, t).is_some_and(|l| l.iter().all(|v| !v.is_negative()))
    })
}

/// Subspace oracle by enumeration.
pub fn cone_is_subspace_brute(d: &[Vec<Rat>]) -> bool {
    d.iter()
        .all(|g| in_cone_brute(d, &g.iter().map(|v| -v).collect::<Vec<_>>()))
}

fn cone_case(rng: &mut ChaCha8Rng) -> Result<bool, String> {
    let dim = rng.gen_range(1..=3);
    let n = rng.gen_range(1..=4);
    let mut d: Vec<Vec<Rat>> = (0..n)
        .map(|_| (0..dim).map(|_| int(rng.gen_range(-2..=2))).collect())
        .collect();
    // make subspaces common: close the set under negation some of the time
    if rng.gen_bool(0.4) {
        let m = d.len().min(2);
        for i in 0..m {
            let neg = d[i].iter().map(|v| -v).collect();
            d.push(neg);
        }
        d.truncate(4);
    }
    let r = cone_is_subspace(&d).map_err(|e| e.to_string())?;
    let brute = cone_is_subspace_brute(&d);
    if r.is_subspace != brute {
        return Err(format!("generators {:?}: LP says {}, enumeration says {brute}", d, r.is_subspace));
    }
    if !r.verify() {
        return Err(format!("certificates for {:?} do not re-verify", d));
    }
    Ok(true)
}

fn random_graph(rng: &mut ChaCha8Rng) -> OperatorGraph {
    let n = rng.gen_range(0..8);
    let pairs: Vec<(Vec<Rat>, Vec<Rat>)> = (0..n)
        .map(|_| (vec![int(rng.gen_range(-3..=3))], vec![int(rng.gen_range(-3..=3))]))
        .collect();
    OperatorGraph::from_pairs(1, pairs).expect("one-dimensional pairs")
}

/// Graph of a nondecreasing step relation, hence monotone.
fn monotone_graph(rng: &mut ChaCha8Rng) -> OperatorGraph {
    let (mut x, mut s) = (-4i64, -3i64);
    let n = rng.gen_range(1..6);
    let mut pairs = Vec::with_capacity(n);
    for _ in 0..n {
        x += rng.gen_range(0..=2);
        s += rng.gen_range(0..=2);
        pairs.push((vec![int(x)], vec![int(s)]));
    }
    OperatorGraph::from_pairs(1, pairs).expect("one-dimensional pairs")
}

fn parallel_case(rng: &mut ChaCha8Rng) -> Result<bool, String> {
    let (s, t) = (random_graph(rng), random_graph(rng));
    let lhs = s.parallel(&t).map_err(|e| e.to_string())?;
    let rhs = s.parallel_via_inverses(&t).map_err(|e| e.to_string())?;
    if lhs != rhs {
        return Err(format!("parallel sum differs from (S⁻¹ + T⁻¹)⁻¹ for {:?} and {:?}", s.pairs(), t.pairs()));
    }
    let (s, t) = (monotone_graph(rng), monotone_graph(rng));
    let a = RatLinMap::scalar(1, int(rng.gen_range(-2..=2)));
    let xs: Vec<Vec<Rat>> = (-4..=4).map(|k| vec![int(k)]).collect();
    let results = [
        ("sum", s.sum(&t)),
        ("inverse", Ok(s.inverse())),
        ("parallel", s.parallel(&t)),
        ("transform", s.conj_transform(&a, &xs)),
    ];
    for (name, g) in results {
        let g = g.map_err(|e| e.to_string())?;
        if !is_monotone(&g).monotone {
            return Err(format!("{name} of monotone graphs is not monotone"));
        }
    }
    Ok(true)
}
