//! Validation: turns a parsed [`Scenario`] into core objects.

use std::collections::BTreeMap;

use cav_core::monops::{CcInstance, OperatorGraph, Variant};
use cav_core::quadab::{DualGrids, QuadSetup, RangeSetup};
use cav_core::reprfn::{graph_of, ReprFn};
use cav_core::{parse_rat, GridFn, LatticeGrid, Polytope, Rat, RatLinMap};
use cav_core::{Finite, PosInf};
use num_traits::{CheckedAdd, CheckedMul, Signed, Zero};

use crate::scenario::*;
use crate::suites::Suite;

/// Validation failure; the message names the offending entity.
#[derive(Clone, Debug, PartialEq)]
pub struct Invalid(pub String);

impl std::fmt::Display for Invalid {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

type Res<T> = Result<T, Invalid>;

fn bad<T>(entity: &str, msg: impl std::fmt::Display) -> Res<T> {
    Err(Invalid(format!("{entity}: {msg}")))
}

#[derive(Clone, Debug)]
pub enum RangeSource {
    Range(String),
    /// The lifted range form of a setup.
    Lift(String),
}

#[derive(Clone, Debug)]
pub enum QcSource {
    Setup(String),
    Range(String),
}

pub type Point = (Vec<Rat>, Vec<Rat>);

#[derive(Clone, Debug)]
pub enum CheckKind {
    VerifyT3 { setup: String, exact: bool, tolerance: Option<f64> },
    VerifyT21 { source: RangeSource, exact: bool, tolerance: Option<f64> },
    CrossPath { setup: String },
    Qualification { source: QcSource, expect: Option<bool> },
    Representativity { repr: String, strong: bool, tolerance: f64 },
    Lemma14 { repr: String, tolerance: Option<f64> },
    Theorem11 { operator: String, grid: LatticeGrid, window: LatticeGrid, instances: Vec<CcInstance> },
    Theorem15 { f: String, g: String, map: String, variant: Variant, tolerance: Option<f64> },
    Theorem17 { repr: String, instances: Vec<CcInstance> },
    Br { repr: String, alpha: f64, beta: f64, points: Option<Vec<Point>>, tolerance: Option<f64> },
    Lemma2 { generators: Vec<Vec<Rat>>, map: String, bx: LatticeGrid },
    Suite { suite: Suite, cases: usize },
}

#[derive(Clone, Debug)]
pub struct Check {
    pub name: String,
    pub kind_name: String,
    pub kind: CheckKind,
}

/// A validated scenario.
#[derive(Clone, Debug)]
pub struct Model {
    pub name: String,
    pub description: String,
    pub grids: BTreeMap<String, LatticeGrid>,
    pub maps: BTreeMap<String, RatLinMap>,
    pub functions: BTreeMap<String, GridFn>,
    pub setups: BTreeMap<String, QuadSetup>,
    pub ranges: BTreeMap<String, RangeSetup>,
    pub reprs: BTreeMap<String, ReprFn>,
    pub operators: BTreeMap<String, OperatorGraph>,
    pub checks: Vec<Check>,
}

fn num(entity: &str, n: &Num) -> Res<Rat> {
    match n {
        Num::Int(v) => Ok(Rat::from_integer(*v)),
        Num::Str(s) => parse_rat(s).or_else(|e| bad(entity, e)),
    }
}

fn nums(entity: &str, v: &[Num]) -> Res<Vec<Rat>> {
    v.iter().map(|n| num(entity, n)).collect()
}

fn per_axis(entity: &str, what: &str, v: &PerAxis, dim: usize) -> Res<Vec<Rat>> {
    match v {
        PerAxis::One(n) => Ok(vec![num(entity, n)?; dim]),
        PerAxis::Many(ns) if ns.len() == dim => nums(entity, ns),
        PerAxis::Many(ns) => bad(entity, format!("`{what}` has {} entries for a {dim}-dimensional grid", ns.len())),
    }
}

fn lookup<'a, T>(m: &'a BTreeMap<String, T>, what: &str, name: &str, entity: &str) -> Res<&'a T> {
    m.get(name)
        .ok_or_else(|| Invalid(format!("{entity}: {what} `{name}` is not defined")))
}

fn polytope(entity: &str, p: &PolySpec) -> Res<Polytope> {
    let out = match (&p.vertices, &p.lo, &p.hi) {
        (Some(v), None, None) => {
            let v = v.iter().map(|r| nums(entity, r)).collect::<Res<Vec<_>>>()?;
            Polytope::new(v)
        }
        (None, Some(lo), Some(hi)) => Polytope::boxed(&nums(entity, lo)?, &nums(entity, hi)?),
        _ => return bad(entity, "a polytope needs either `vertices` or both `lo` and `hi`"),
    };
    out.or_else(|e| bad(entity, e))
}

fn build_grid(
    name: &str,
    specs: &BTreeMap<String, GridSpec>,
    done: &mut BTreeMap<String, LatticeGrid>,
    depth: usize,
    max_cells: usize,
) -> Res<LatticeGrid> {
    if let Some(g) = done.get(name) {
        return Ok(g.clone());
    }
    let entity = format!("grid `{name}`");
    let Some(spec) = specs.get(name) else {
        return bad(&entity, "is not defined");
    };
    if depth > specs.len() {
        return bad(&entity, "product definitions form a cycle");
    }
    let grid = if let Some(parts) = &spec.product {
        if spec.lo.is_some() || spec.hi.is_some() || spec.step.is_some() || spec.dim.is_some() {
            return bad(&entity, "`product` excludes `lo`, `hi`, `step` and `dim`");
        }
        let Some((first, rest)) = parts.split_first() else {
            return bad(&entity, "`product` is empty");
        };
        let mut g = build_grid(first, specs, done, depth + 1, max_cells)?;
        for p in rest {
            g = g.product(&build_grid(p, specs, done, depth + 1, max_cells)?);
        }
        g
    } else {
        let (Some(lo), Some(hi)) = (&spec.lo, &spec.hi) else {
            return bad(&entity, "needs `lo` and `hi` (or `product`)");
        };
        let dim = match (spec.dim, lo, hi) {
            (Some(d), _, _) => d,
            (None, PerAxis::Many(v), _) | (None, _, PerAxis::Many(v)) => v.len(),
            _ => 1,
        };
        if dim == 0 {
            return bad(&entity, "dimension must be positive");
        }
        let lo = per_axis(&entity, "lo", lo, dim)?;
        let hi = per_axis(&entity, "hi", hi, dim)?;
        let step = match &spec.step {
            Some(s) => per_axis(&entity, "step", s, dim)?,
            None => vec![Rat::from_integer(1); dim],
        };
        let mut ki = Vec::with_capacity(dim);
        let mut kh = Vec::with_capacity(dim);
        for i in 0..dim {
            if !step[i].is_positive() {
                return bad(&entity, format!("step on axis {i} must be positive"));
            }
            let (a, b) = (lo[i] / step[i], hi[i] / step[i]);
            if !a.is_integer() || !b.is_integer() {
                return bad(&entity, format!("bounds on axis {i} are not multiples of the step"));
            }
            ki.push(a.to_integer());
            kh.push(b.to_integer());
        }
        LatticeGrid::new(vec![Rat::zero(); dim], step, ki, kh).or_else(|e| bad(&entity, e))?
    };
    if grid.len() > max_cells {
        return bad(&entity, format!("{} cells exceed the cap of {max_cells}", grid.len()));
    }
    done.insert(name.to_string(), grid.clone());
    Ok(grid)
}

fn build_map(name: &str, m: &MapSpec) -> Res<RatLinMap> {
    let entity = format!("map `{name}`");
    match (&m.rows, m.identity, &m.scalar) {
        (Some(rows), None, None) if m.dim.is_none() => {
            let rows = rows.iter().map(|r| nums(&entity, r)).collect::<Res<Vec<_>>>()?;
            RatLinMap::from_rows(rows).or_else(|e| bad(&entity, e))
        }
        (None, Some(n), None) if m.dim.is_none() && n > 0 => Ok(RatLinMap::identity(n)),
        (None, None, Some(s)) => Ok(RatLinMap::scalar(m.dim.unwrap_or(1), num(&entity, s)?)),
        _ => bad(&entity, "give exactly one of `rows`, `identity` (positive) or `scalar` (with optional `dim`)"),
    }
}

/// Exact values on a grid; `None` is `+inf`.
type Samples = Vec<Option<Rat>>;

fn overflow<T>(entity: &str) -> Res<T> {
    bad(entity, "rational overflow while evaluating")
}

fn cadd(entity: &str, a: Rat, b: Rat) -> Res<Rat> {
    a.checked_add(&b).map_or_else(|| overflow(entity), Ok)
}

fn cmul(entity: &str, a: Rat, b: Rat) -> Res<Rat> {
    a.checked_mul(&b).map_or_else(|| overflow(entity), Ok)
}

fn cdot(entity: &str, a: &[Rat], b: &[Rat]) -> Res<Rat> {
    a.iter().zip(b).try_fold(Rat::zero(), |acc, (x, y)| cadd(entity, acc, cmul(entity, *x, *y)?))
}

fn need_len(entity: &str, what: &str, got: usize, want: usize) -> Res<()> {
    if got != want {
        return bad(entity, format!("`{what}` has length {got}, grid dimension is {want}"));
    }
    Ok(())
}

fn eval(entity: &str, e: &Expr, grid: &LatticeGrid) -> Res<Samples> {
    let n = grid.dim();
    let pts = || (0..grid.len()).map(|i| grid.point_rat(i));
    match e {
        Expr::Quadratic { q, l, c } => {
            need_len(entity, "q", q.len(), n)?;
            let q = q
                .iter()
                .map(|r| {
                    need_len(entity, "q row", r.len(), n)?;
                    nums(entity, r)
                })
                .collect::<Res<Vec<_>>>()?;
            let l = match l {
                Some(l) => {
                    need_len(entity, "l", l.len(), n)?;
                    nums(entity, l)?
                }
                None => vec![Rat::zero(); n],
            };
            let c = c.as_ref().map_or(Ok(Rat::zero()), |c| num(entity, c))?;
            pts()
                .map(|p| {
                    let qp = q.iter().map(|r| cdot(entity, r, &p)).collect::<Res<Vec<_>>>()?;
                    let v = cadd(entity, cdot(entity, &p, &qp)?, cdot(entity, &l, &p)?)?;
                    Ok(Some(cadd(entity, v, c)?))
                })
                .collect()
        }
        Expr::Abs { scale, center } => {
            let s = scale.as_ref().map_or(Ok(Rat::from_integer(1)), |s| num(entity, s))?;
            let c = match center {
                Some(c) => {
                    need_len(entity, "center", c.len(), n)?;
                    nums(entity, c)?
                }
                None => vec![Rat::zero(); n],
            };
            pts()
                .map(|p| {
                    let t = p.iter().zip(&c).map(|(a, b)| (a - b).abs()).try_fold(Rat::zero(), |acc, v| cadd(entity, acc, v))?;
                    Ok(Some(cmul(entity, s, t)?))
                })
                .collect()
        }
        Expr::Indicator(p) => {
            let k = polytope(entity, p)?;
            need_len(entity, "polytope", k.dim(), n)?;
            Ok(pts().map(|p| k.contains(&p).then(Rat::zero)).collect())
        }
        Expr::Points(ps) => {
            let mut out = vec![None; grid.len()];
            for p in ps {
                let p = nums(entity, p)?;
                match grid.locate(&p) {
                    Some(i) => out[i] = Some(Rat::zero()),
                    None => return bad(entity, format!("point {} is not on the grid", cav_core::fmt_point(&p))),
                }
            }
            Ok(out)
        }
        Expr::Support(p) => {
            let k = polytope(entity, p)?;
            need_len(entity, "polytope", k.dim(), n)?;
            pts()
                .map(|p| {
                    let vals = k.vertices().iter().map(|v| cdot(entity, v, &p)).collect::<Res<Vec<_>>>()?;
                    Ok(vals.into_iter().max())
                })
                .collect()
        }
        Expr::MaxAffine { slopes, offsets } => {
            if slopes.is_empty() {
                return bad(entity, "`max_affine` needs at least one slope");
            }
            let a = slopes
                .iter()
                .map(|s| {
                    need_len(entity, "slope", s.len(), n)?;
                    nums(entity, s)
                })
                .collect::<Res<Vec<_>>>()?;
            let b = match offsets {
                Some(o) if o.len() == a.len() => nums(entity, o)?,
                Some(o) => return bad(entity, format!("{} offsets for {} slopes", o.len(), a.len())),
                None => vec![Rat::zero(); a.len()],
            };
            pts()
                .map(|p| {
                    let vals = a.iter().zip(&b).map(|(s, c)| cadd(entity, cdot(entity, s, &p)?, *c)).collect::<Res<Vec<_>>>()?;
                    Ok(vals.into_iter().max())
                })
                .collect()
        }
        Expr::Pairing {} => {
            if n % 2 != 0 {
                return bad(entity, "`pairing` needs a grid over E×E* (even dimension)");
            }
            pts().map(|p| Ok(Some(cdot(entity, &p[..n / 2], &p[n / 2..])?))).collect()
        }
        Expr::Sum(parts) => {
            let mut acc = vec![Some(Rat::zero()); grid.len()];
            for part in parts {
                for (a, v) in acc.iter_mut().zip(eval(entity, part, grid)?) {
                    *a = match (*a, v) {
                        (Some(x), Some(y)) => Some(cadd(entity, x, y)?),
                        _ => None,
                    };
                }
            }
            Ok(acc)
        }
        Expr::Scale { by, of } => {
            let r = num(entity, by)?;
            if r.is_negative() {
                return bad(entity, "`scale.by` must be nonnegative");
            }
            eval(entity, of, grid)?
                .into_iter()
                .map(|v| v.map(|x| cmul(entity, r, x)).transpose())
                .collect()
        }
        Expr::Values(vs) => {
            need_len(entity, "values", vs.len(), grid.len())?;
            vs.iter()
                .map(|v| match v {
                    Num::Str(s) if s.trim() == "inf" || s.trim() == "+inf" => Ok(None),
                    _ => num(entity, v).map(Some),
                })
                .collect()
        }
        Expr::Example6 { k, ystar } => {
            let f = ReprFn::example6(polytope(entity, k)?, nums(entity, ystar)?, grid.clone()).or_else(|e| bad(entity, e))?;
            closed_form_samples(&f)
        }
        Expr::Example7 { y, k } => {
            let f = ReprFn::example7(nums(entity, y)?, polytope(entity, k)?, grid.clone()).or_else(|e| bad(entity, e))?;
            closed_form_samples(&f)
        }
    }
}

fn closed_form_samples(f: &ReprFn) -> Res<Samples> {
    let n = f.dim();
    Ok((0..f.grid().len())
        .map(|i| {
            let p = f.grid().point_rat(i);
            f.exact_value(&p[..n], &p[n..]).flatten()
        })
        .collect())
}

fn build_function(name: &str, spec: &FunctionSpec, grids: &BTreeMap<String, LatticeGrid>) -> Res<GridFn> {
    let entity = format!("function `{name}`");
    let grid = lookup(grids, "grid", &spec.grid, &entity)?;
    let vals = eval(&entity, &spec.expr, grid)?;
    let vals = vals
        .iter()
        .map(|v| v.map_or(PosInf, |r| Finite(cav_core::numcore::rat::to_f64(&r))))
        .collect();
    GridFn::new(grid.clone(), vals, name).or_else(|e| bad(&entity, e))
}

fn build_setup(name: &str, s: &SetupSpec, m: &Model, max_cells: usize) -> Res<QuadSetup> {
    let entity = format!("setup `{name}`");
    let f = lookup(&m.functions, "function", &s.f, &entity)?.clone();
    let g = lookup(&m.functions, "function", &s.g, &entity)?.clone();
    let duals = match &s.duals {
        DualsSpec::Auto(a) if a == "bracketing" => {
            DualGrids::bracketing(&f, s.x_dim, &g, s.y_dim).or_else(|e| bad(&entity, e))?
        }
        DualsSpec::Auto(a) => return bad(&entity, format!("unknown dual grid directive `{a}`")),
        DualsSpec::Named { x, u, y, v } => DualGrids {
            x: lookup(&m.grids, "grid", x, &entity)?.clone(),
            u: lookup(&m.grids, "grid", u, &entity)?.clone(),
            y: lookup(&m.grids, "grid", y, &entity)?.clone(),
            v: lookup(&m.grids, "grid", v, &entity)?.clone(),
        },
    };
    let map = |n: &Option<String>, role: &str| -> Res<RatLinMap> {
        match n {
            Some(n) => Ok(lookup(&m.maps, "map", n, &entity)?.clone()),
            None => bad(&entity, format!("map `{role}` is required")),
        }
    };
    let form = s.form.as_deref().unwrap_or("general");
    let out = match form {
        "general" => QuadSetup::new(f, s.x_dim, g, s.y_dim, map(&s.a, "a")?, map(&s.b, "b")?, duals),
        "sum" if s.b.is_none() => QuadSetup::sum_form(f, s.x_dim, g, s.y_dim, map(&s.a, "a")?, duals),
        "parallel" if s.a.is_none() => QuadSetup::parallel_form(f, s.x_dim, g, s.y_dim, map(&s.b, "b")?, duals),
        "sum" | "parallel" => return bad(&entity, format!("the {form} form takes a single map")),
        other => return bad(&entity, format!("unknown form `{other}`")),
    };
    Ok(out.or_else(|e| bad(&entity, e))?.with_max_cells(max_cells))
}

fn build_range(name: &str, r: &RangeSpec, m: &Model, max_cells: usize) -> Res<RangeSetup> {
    let entity = format!("range `{name}`");
    let grid = |n: &str| lookup(&m.grids, "grid", n, &entity).cloned();
    let s = RangeSetup {
        k: lookup(&m.functions, "function", &r.k, &entity)?.clone(),
        w_dim: r.w_dim,
        c: lookup(&m.maps, "map", &r.c, &entity)?.clone(),
        d: lookup(&m.maps, "map", &r.d, &entity)?.clone(),
        x_grid: grid(&r.x_grid)?,
        u_grid: grid(&r.u_grid)?,
        x_dual: grid(&r.x_dual)?,
        u_dual: grid(&r.u_dual)?,
        k_dual: grid(&r.k_dual)?,
        max_cells,
    };
    s.validate().or_else(|e| bad(&entity, e))?;
    Ok(s)
}

fn build_repr(name: &str, r: &ReprSpec, m: &Model) -> Res<ReprFn> {
    let entity = format!("repr `{name}`");
    let function = || match &r.function {
        Some(f) => lookup(&m.functions, "function", f, &entity).cloned(),
        None => bad(&entity, "`function` is required"),
    };
    let grid = |g: &Option<String>, what: &str| match g {
        Some(g) => lookup(&m.grids, "grid", g, &entity).cloned(),
        None => bad(&entity, format!("`{what}` is required")),
    };
    let k = || match &r.k {
        Some(k) => polytope(&entity, k),
        None => bad(&entity, "`k` is required"),
    };
    let vec = |v: &Option<Vec<Num>>, what: &str| match v {
        Some(v) => nums(&entity, v),
        None => bad(&entity, format!("`{what}` is required")),
    };
    let out = match r.kind.as_str() {
        "sampled" => {
            let f = ReprFn::sampled(function()?);
            match (&r.dual, f) {
                (Some(_), Ok(f)) => f.with_dual_grid(grid(&r.dual, "dual")?),
                (_, f) => f,
            }
        }
        "separable" => ReprFn::separable(function()?, &grid(&r.dual, "dual")?),
        "example6" => ReprFn::example6(k()?, vec(&r.ystar, "ystar")?, grid(&r.grid, "grid")?),
        "example7" => ReprFn::example7(vec(&r.y, "y")?, k()?, grid(&r.grid, "grid")?),
        other => return bad(&entity, format!("unknown kind `{other}`")),
    };
    out.or_else(|e| bad(&entity, e))
}

fn build_operator(name: &str, o: &OperatorSpec, m: &Model) -> Res<OperatorGraph> {
    let entity = format!("operator `{name}`");
    match (&o.identity, &o.pairs, &o.graph_of) {
        (Some(g), None, None) => Ok(OperatorGraph::identity(lookup(&m.grids, "grid", g, &entity)?)),
        (None, Some(pairs), None) => {
            let Some(first) = pairs.first() else {
                return bad(&entity, "`pairs` is empty");
            };
            let pts = pairs
                .iter()
                .map(|p| Ok((nums(&entity, &p.x)?, nums(&entity, &p.s)?)))
                .collect::<Res<Vec<_>>>()?;
            OperatorGraph::from_pairs(first.x.len(), pts).or_else(|e| bad(&entity, e))
        }
        (None, None, Some(r)) => Ok(graph_of(lookup(&m.reprs, "repr", r, &entity)?, None)),
        _ => bad(&entity, "give exactly one of `identity`, `pairs` or `graph_of`"),
    }
}

fn instances(entity: &str, v: &Option<Vec<InstanceSpec>>) -> Res<Vec<CcInstance>> {
    let Some(v) = v else {
        return bad(entity, "`instances` is required");
    };
    v.iter()
        .map(|i| {
            let c = polytope(entity, &i.c)?;
            match (i.kind.as_str(), &i.y, &i.ystar) {
                ("star", Some(y), None) => Ok(CcInstance::Star { y: nums(entity, y)?, c }),
                ("space", None, Some(s)) => Ok(CcInstance::Space { c, ystar: nums(entity, s)? }),
                _ => bad(entity, "an instance is `star` with `y` or `space` with `ystar`"),
            }
        })
        .collect()
}

fn build_check(i: usize, c: &CheckSpec, m: &Model) -> Res<Check> {
    let name = c.name.clone().unwrap_or_else(|| format!("{}-{}", c.kind, i + 1));
    let entity = format!("check `{name}`");
    let e = entity.as_str();
    let req = |v: &Option<String>, what: &str| -> Res<String> {
        v.clone().ok_or_else(|| Invalid(format!("{e}: `{what}` is required")))
    };
    let setup = |v: &Option<String>| -> Res<String> {
        let s = req(v, "setup")?;
        lookup(&m.setups, "setup", &s, e)?;
        Ok(s)
    };
    let repr = |v: &Option<String>| -> Res<String> {
        let s = req(v, "repr")?;
        lookup(&m.reprs, "repr", &s, e)?;
        Ok(s)
    };
    let grid = |v: &Option<String>, what: &str| -> Res<LatticeGrid> { lookup(&m.grids, "grid", &req(v, what)?, e).cloned() };
    if let Some(t) = c.tolerance {
        if !(t >= 0.0 && t.is_finite()) {
            return bad(e, "`tolerance` must be finite and nonnegative");
        }
    }
    let range_or_setup = || -> Res<Option<(bool, String)>> {
        match (&c.range, &c.setup) {
            (Some(r), None) => {
                lookup(&m.ranges, "range", r, e)?;
                Ok(Some((true, r.clone())))
            }
            (None, Some(_)) => Ok(Some((false, setup(&c.setup)?))),
            _ => Ok(None),
        }
    };
    let kind = match c.kind.as_str() {
        "verify_t3" => CheckKind::VerifyT3 {
            setup: setup(&c.setup)?,
            exact: c.exact.unwrap_or(false),
            tolerance: c.tolerance,
        },
        "verify_t21" => {
            let source = match range_or_setup()? {
                Some((true, r)) => RangeSource::Range(r),
                Some((false, s)) => RangeSource::Lift(s),
                None => return bad(e, "give exactly one of `range` or `setup`"),
            };
            CheckKind::VerifyT21 {
                source,
                exact: c.exact.unwrap_or(false),
                tolerance: c.tolerance,
            }
        }
        "cross_path" => CheckKind::CrossPath { setup: setup(&c.setup)? },
        "qualification" => {
            let source = match range_or_setup()? {
                Some((true, r)) => QcSource::Range(r),
                Some((false, s)) => QcSource::Setup(s),
                None => return bad(e, "give exactly one of `range` or `setup`"),
            };
            CheckKind::Qualification {
                source,
                expect: c.expect_subspace,
            }
        }
        "representativity" => CheckKind::Representativity {
            repr: repr(&c.repr)?,
            strong: c.strong.unwrap_or(false),
            tolerance: c.tolerance.unwrap_or(0.0),
        },
        "lemma14" => CheckKind::Lemma14 {
            repr: repr(&c.repr)?,
            tolerance: c.tolerance,
        },
        "theorem11" => {
            let op = req(&c.operator, "operator")?;
            lookup(&m.operators, "operator", &op, e)?;
            CheckKind::Theorem11 {
                operator: op,
                grid: grid(&c.grid, "grid")?,
                window: grid(&c.window, "window")?,
                instances: instances(e, &c.instances)?,
            }
        }
        "theorem15" => {
            let variant = match c.variant.as_deref() {
                Some("a") | Some("A") => Variant::A,
                Some("b") | Some("B") => Variant::B,
                Some("c") | Some("C") => Variant::C,
                _ => return bad(e, "`variant` must be one of a, b, c"),
            };
            let map = req(&c.map, "map")?;
            lookup(&m.maps, "map", &map, e)?;
            CheckKind::Theorem15 {
                f: repr(&c.f)?,
                g: repr(&c.g)?,
                map,
                variant,
                tolerance: c.tolerance,
            }
        }
        "theorem17" => CheckKind::Theorem17 {
            repr: repr(&c.repr)?,
            instances: instances(e, &c.instances)?,
        },
        "br_check" => {
            let (Some(alpha), Some(beta)) = (c.alpha, c.beta) else {
                return bad(e, "`alpha` and `beta` are required");
            };
            if !(alpha > 0.0 && beta > 0.0 && alpha.is_finite() && beta.is_finite()) {
                return bad(e, "`alpha` and `beta` must be positive");
            }
            let points = match &c.points {
                Some(p) => Some(
                    p.iter()
                        .map(|p| Ok((nums(e, &p.x)?, nums(e, &p.s)?)))
                        .collect::<Res<Vec<_>>>()?,
                ),
                None => None,
            };
            CheckKind::Br {
                repr: repr(&c.repr)?,
                alpha,
                beta,
                points,
                tolerance: c.tolerance,
            }
        }
        "lemma2" => {
            let Some(g) = &c.generators else {
                return bad(e, "`generators` is required");
            };
            let map = req(&c.map, "map")?;
            lookup(&m.maps, "map", &map, e)?;
            CheckKind::Lemma2 {
                generators: g.iter().map(|v| nums(e, v)).collect::<Res<_>>()?,
                map,
                bx: grid(&c.box_grid, "box")?,
            }
        }
        "property_suite" => {
            let s = req(&c.suite, "suite")?;
            let Some(suite) = Suite::parse(&s) else {
                return bad(e, format!("unknown suite `{s}`; known: {}", Suite::NAMES.join(", ")));
            };
            CheckKind::Suite {
                suite,
                cases: c.cases.unwrap_or(64),
            }
        }
        other => return bad(e, format!("unknown kind `{other}`")),
    };
    Ok(Check {
        name,
        kind_name: c.kind.clone(),
        kind,
    })
}

/// Validates every entity in declaration-independent (sorted) order and
/// every check in file order.
pub fn build(s: &Scenario, max_cells: usize) -> Res<Model> {
    let mut m = Model {
        name: s.name.clone(),
        description: s.description.clone(),
        grids: BTreeMap::new(),
        maps: BTreeMap::new(),
        functions: BTreeMap::new(),
        setups: BTreeMap::new(),
        ranges: BTreeMap::new(),
        reprs: BTreeMap::new(),
        operators: BTreeMap::new(),
        checks: Vec::new(),
    };
    if s.name.is_empty() || !s.name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-') {
        return bad("scenario", format!("name `{}` must be nonempty [A-Za-z0-9_-]", s.name));
    }
    for name in s.grids.keys() {
        build_grid(name, &s.grids, &mut m.grids, 0, max_cells)?;
    }
    for (name, spec) in &s.maps {
        m.maps.insert(name.clone(), build_map(name, spec)?);
    }
    for (name, spec) in &s.functions {
        let f = build_function(name, spec, &m.grids)?;
        m.functions.insert(name.clone(), f);
    }
    for (name, spec) in &s.setups {
        let v = build_setup(name, spec, &m, max_cells)?;
        m.setups.insert(name.clone(), v);
    }
    for (name, spec) in &s.ranges {
        let v = build_range(name, spec, &m, max_cells)?;
        m.ranges.insert(name.clone(), v);
    }
    for (name, spec) in &s.reprs {
        let v = build_repr(name, spec, &m)?;
        m.reprs.insert(name.clone(), v);
    }
    for (name, spec) in &s.operators {
        let v = build_operator(name, spec, &m)?;
        m.operators.insert(name.clone(), v);
    }
    for (i, c) in s.checks.iter().enumerate() {
        let c = build_check(i, c, &m)?;
        if m.checks.iter().any(|d| d.name == c.name) {
            return bad(&format!("check `{}`", c.name), "name is used twice");
        }
        m.checks.push(c);
    }
    Ok(m)
}
