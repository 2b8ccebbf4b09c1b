//! Quadrivariate inf-convolutions and their dual minimum formulas.
//!
//! Two shapes are covered. The coupled form
//!
//! ```text
//! h(x, u) = inf_v f(x, u - Bv) + g(Ax, v)
//! h*(x*, u*) = min_{y*} f*(x* - Aᵀy*, u*) + g*(y*, Bᵀu*)
//! ```
//!
//! with `f` on `X×U`, `g` on `Y×V`, and the range form
//!
//! ```text
//! h(x, u) = inf { k(Cx, t) : Dt = u }
//! h*(x*, u*) = min { k*(w*, Dᵀu*) : Cᵀw* = x* }
//! ```
//!
//! with `k` on `W×T`. Everything is evaluated on lattice grids; maps must be
//! lattice-compatible so that no interpolation is ever needed.

use std::collections::BTreeSet;

use crate::conjugate::{conjugate_fast, default_dual_grid, is_closed, slope_bracket};
use crate::error::{Error, Result};
use crate::numcore::linmap::require_index_map;
use crate::numcore::rat::{fmt_point, sub};
use crate::numcore::{ExtReal, Finite, GridFn, IndexMap, LatticeGrid, PosInf, Rat, RatLinMap};
use crate::qualif::{check_qc_pair, check_qc_range, QCResult};

pub const DEFAULT_MAX_CELLS: usize = 1 << 22;

/// Dual grids for the four blocks of a coupled setup.
#[derive(Clone, Debug, PartialEq)]
pub struct DualGrids {
    pub x: LatticeGrid,
    pub u: LatticeGrid,
    pub y: LatticeGrid,
    pub v: LatticeGrid,
}

impl DualGrids {
    /// Each block's primal lattice widened to its slope bracket.
    pub fn bracketing(f: &GridFn, x_dim: usize, g: &GridFn, y_dim: usize) -> Result<Self> {
        let (x, u) = default_dual_grid(f).split(x_dim)?;
        let (y, v) = default_dual_grid(g).split(y_dim)?;
        Ok(DualGrids { x, u, y, v })
    }
}

/// `f` on `X×U` (first `x_dim` axes), `g` on `Y×V` (first `y_dim` axes),
/// `A: X → Y`, `B: V → U`, and dual grids.
#[derive(Clone, Debug)]
pub struct QuadSetup {
    f: GridFn,
    g: GridFn,
    x_dim: usize,
    y_dim: usize,
    a: RatLinMap,
    b: RatLinMap,
    duals: DualGrids,
    max_cells: usize,
    xg: LatticeGrid,
    ug: LatticeGrid,
    yg: LatticeGrid,
    vg: LatticeGrid,
    a_idx: IndexMap,
    b_idx: IndexMap,
}

fn block_split(h: &GridFn, at: usize, what: &str) -> Result<(LatticeGrid, LatticeGrid)> {
    if at == 0 || at >= h.grid().dim() {
        return Err(Error::DimensionMismatch(format!(
            "{what} `{}` of dimension {} cannot split at {at}",
            h.label(),
            h.grid().dim()
        )));
    }
    h.grid().split(at)
}

fn map_dims(name: &str, m: &RatLinMap, cols: usize, rows: usize) -> Result<()> {
    if m.cols() != cols || m.rows() != rows {
        return Err(Error::DimensionMismatch(format!(
            "map `{name}` is {}x{}, expected {rows}x{cols}",
            m.rows(),
            m.cols()
        )));
    }
    Ok(())
}

fn grid_dim(name: &str, g: &LatticeGrid, dim: usize) -> Result<()> {
    if g.dim() != dim {
        return Err(Error::DimensionMismatch(format!(
            "dual grid `{name}` has dimension {}, expected {dim}",
            g.dim()
        )));
    }
    Ok(())
}

fn cap(what: String, needed: usize, max: usize) -> Result<()> {
    if needed > max {
        return Err(Error::SizeCap { what, needed, cap: max });
    }
    Ok(())
}

impl QuadSetup {
    pub fn new(
        f: GridFn,
        x_dim: usize,
        g: GridFn,
        y_dim: usize,
        a: RatLinMap,
        b: RatLinMap,
        duals: DualGrids,
    ) -> Result<Self> {
        let (xg, ug) = block_split(&f, x_dim, "f")?;
        let (yg, vg) = block_split(&g, y_dim, "g")?;
        map_dims("A", &a, xg.dim(), yg.dim())?;
        map_dims("B", &b, vg.dim(), ug.dim())?;
        grid_dim("X*", &duals.x, xg.dim())?;
        grid_dim("U*", &duals.u, ug.dim())?;
        grid_dim("Y*", &duals.y, yg.dim())?;
        grid_dim("V*", &duals.v, vg.dim())?;
        let a_idx = require_index_map("A", &a, &xg, &yg)?;
        let b_idx = require_index_map("B", &b, &vg, &ug.difference_lattice())?;
        Ok(QuadSetup {
            f,
            g,
            x_dim,
            y_dim,
            a,
            b,
            duals,
            max_cells: DEFAULT_MAX_CELLS,
            xg,
            ug,
            yg,
            vg,
            a_idx,
            b_idx,
        })
    }

    /// Setup for `h(x, x*) = inf_{y*} f(x, x* - Aᵀy*) + g(Ax, y*)` with `f` on
    /// `E×E*` and `g` on `F×F*`.
    pub fn sum_form(f: GridFn, e_dim: usize, g: GridFn, f_dim: usize, a: RatLinMap, duals: DualGrids) -> Result<Self> {
        let b = a.transpose();
        Self::new(f, e_dim, g, f_dim, a, b, duals)
    }

    /// Setup for `h(x, x*) = inf_y f(x - By, x*) + g(y, Bᵀx*)`, computed with
    /// the blocks of `f` and `g` swapped (`X = E*`, `U = E`, `Y = F*`,
    /// `V = F`). The resulting `h` lives on `E*×E`; swap it back with
    /// [`GridFn::swap_blocks`].
    pub fn parallel_form(f: GridFn, e_dim: usize, g: GridFn, f_dim: usize, b: RatLinMap, duals: DualGrids) -> Result<Self> {
        let es = f.grid().dim() - e_dim;
        let fs = g.grid().dim() - f_dim;
        let fsw = f.swap_blocks(e_dim)?;
        let gsw = g.swap_blocks(f_dim)?;
        let a = b.transpose();
        Self::new(fsw, es, gsw, fs, a, b, duals)
    }

    pub fn with_max_cells(mut self, max_cells: usize) -> Self {
        self.max_cells = max_cells;
        self
    }

    pub fn f(&self) -> &GridFn {
        &self.f
    }

    pub fn g(&self) -> &GridFn {
        &self.g
    }

    pub fn x_dim(&self) -> usize {
        self.x_dim
    }

    pub fn y_dim(&self) -> usize {
        self.y_dim
    }

    pub fn a(&self) -> &RatLinMap {
        &self.a
    }

    pub fn b(&self) -> &RatLinMap {
        &self.b
    }

    pub fn duals(&self) -> &DualGrids {
        &self.duals
    }

    pub fn max_cells(&self) -> usize {
        self.max_cells
    }

    pub fn x_grid(&self) -> &LatticeGrid {
        &self.xg
    }

    pub fn u_grid(&self) -> &LatticeGrid {
        &self.ug
    }

    pub fn y_grid(&self) -> &LatticeGrid {
        &self.yg
    }

    pub fn v_grid(&self) -> &LatticeGrid {
        &self.vg
    }

    /// The evaluation grid `X*×U*` of `h*`.
    pub fn dual_grid(&self) -> LatticeGrid {
        self.duals.x.product(&self.duals.u)
    }
}

/// Sum of two values that must stay above `-inf`.
fn checked_sum(a: ExtReal, b: ExtReal, at: impl Fn() -> String) -> Result<ExtReal> {
    match a + b {
        Finite(v) if v == f64::NEG_INFINITY => Err(Error::NegativeInfinity {
            point: at(),
            context: "inf-convolution".into(),
        }),
        Finite(v) if !v.is_finite() => Err(Error::Invalid(format!("overflow in inf-convolution at {}", at()))),
        s => Ok(s),
    }
}

/// `h(x, u) = min_v f(x, u - Bv) + g(Ax, v)` over the `V` grid, on the
/// `X×U` grid of `f`. Points `u - Bv` outside `f`'s extent contribute `+inf`.
pub fn infconv_t3(s: &QuadSetup) -> Result<GridFn> {
    Ok(infconv_t3_argmin(s)?.0)
}

/// [`infconv_t3`] with the first minimizing `v` (flat index on the `V`
/// grid) per point, `None` where `h = +inf`.
pub fn infconv_t3_argmin(s: &QuadSetup) -> Result<(GridFn, Vec<Option<usize>>)> {
    let fgrid = s.f.grid();
    let ay = s.a_idx.images();
    let bv = s.b_idx.images();
    let kv: Vec<Vec<i64>> = (0..s.vg.len()).map(|j| s.vg.multi_index(j)).collect();
    let kx: Vec<Vec<i64>> = (0..s.xg.len()).map(|j| s.xg.multi_index(j)).collect();
    let ku: Vec<Vec<i64>> = (0..s.ug.len()).map(|j| s.ug.multi_index(j)).collect();
    // g(Ax, v) does not depend on u.
    let gvals: Vec<Vec<ExtReal>> = ay
        .iter()
        .map(|y| kv.iter().map(|v| s.g.value_at_index(&[y.as_slice(), v.as_slice()].concat())).collect())
        .collect();
    let mut values = Vec::with_capacity(fgrid.len());
    let mut args = Vec::with_capacity(fgrid.len());
    let mut idx = vec![0i64; fgrid.dim()];
    for (ix, x) in kx.iter().enumerate() {
        idx[..s.x_dim].copy_from_slice(x);
        for u in &ku {
            let mut best = PosInf;
            let mut arg = None;
            for (jv, b) in bv.iter().enumerate() {
                let gv = gvals[ix][jv];
                if !gv.is_finite() {
                    continue;
                }
                for (r, (uu, bb)) in u.iter().zip(b).enumerate() {
                    idx[s.x_dim + r] = uu - bb;
                }
                let fv = s.f.value_at_index(&idx);
                if !fv.is_finite() {
                    continue;
                }
                let val = checked_sum(fv, gv, || {
                    let mut p = fgrid.point_rat(fgrid.flat_of(&[x.as_slice(), u.as_slice()].concat()).unwrap_or(0));
                    p.extend(s.vg.point_rat(jv));
                    fmt_point(&p)
                })?;
                if val < best {
                    best = val;
                    arg = Some(jv);
                }
            }
            values.push(best);
            args.push(arg);
        }
    }
    let h = GridFn::new(fgrid.clone(), values, format!("h[{},{}]", s.f.label(), s.g.label()))?;
    Ok((h, args))
}

/// Conjugates of `f` and `g` on the declared dual lattices, widened so that
/// every query made by [`t3_dual_min`] on the `X*×U*` grid is in range.
#[derive(Clone, Debug)]
pub struct T3Conjugates {
    pub fstar: GridFn,
    pub gstar: GridFn,
    at_idx: IndexMap,
    y_dim: usize,
}

pub fn t3_conjugates(s: &QuadSetup) -> Result<T3Conjugates> {
    let at = s.a.transpose();
    let bt = s.b.transpose();
    let at_idx = require_index_map("Aᵀ", &at, &s.duals.y, &s.duals.x.difference_lattice())?;
    require_index_map("Bᵀ", &bt, &s.duals.u, &s.duals.v)?;
    let xb = s.duals.x.bounds_rat();
    let atb = at.image_bounds(&s.duals.y.bounds_rat());
    let xw: Vec<(Rat, Rat)> = xb.iter().zip(&atb).map(|((xl, xh), (al, ah))| (xl - ah, xh - al)).collect();
    let xstar = s.duals.x.widened_to_rat(&xw);
    let vstar = s.duals.v.widened_to_rat(&bt.image_bounds(&s.duals.u.bounds_rat()));
    let fgrid = xstar.product(&s.duals.u);
    let ggrid = s.duals.y.product(&vstar);
    cap(format!("conjugate grid of `{}`", s.f.label()), fgrid.len(), s.max_cells)?;
    cap(format!("conjugate grid of `{}`", s.g.label()), ggrid.len(), s.max_cells)?;
    Ok(T3Conjugates {
        fstar: conjugate_fast(&s.f, &fgrid)?,
        gstar: conjugate_fast(&s.g, &ggrid)?,
        at_idx,
        y_dim: s.y_dim,
    })
}

impl T3Conjugates {
    /// Minimum over the `Y*` grid at a point of the `X*×U*` lattice.
    fn dual_min(&self, s: &QuadSetup, point: &[Rat]) -> Result<(ExtReal, Option<usize>)> {
        let dx = s.duals.x.dim();
        if point.len() != dx + s.duals.u.dim() {
            return Err(Error::DimensionMismatch(format!(
                "dual point {} has the wrong dimension",
                fmt_point(point)
            )));
        }
        let (x0, u0) = point.split_at(dx);
        let kx = s.duals.x.lattice_index_of(x0).ok_or_else(|| Error::OffGrid(fmt_point(x0)))?;
        let ku = s.duals.u.lattice_index_of(u0).ok_or_else(|| Error::OffGrid(fmt_point(u0)))?;
        let btu = s.b.transpose().apply(u0);
        let kv = s.duals.v.lattice_index_of(&btu).ok_or_else(|| Error::Incompatible {
            map: "Bᵀ".into(),
            detail: format!("Bᵀ{} is off the V* lattice", fmt_point(u0)),
        })?;
        let mut fidx = vec![0i64; self.fstar.grid().dim()];
        fidx[dx..].copy_from_slice(&ku);
        let mut gidx = vec![0i64; self.gstar.grid().dim()];
        gidx[self.y_dim..].copy_from_slice(&kv);
        let mut best = PosInf;
        let mut arg = None;
        for j in 0..s.duals.y.len() {
            let img = self.at_idx.image(j);
            for r in 0..dx {
                fidx[r] = kx[r] - img[r];
            }
            gidx[..self.y_dim].copy_from_slice(&s.duals.y.multi_index(j));
            let val = self.fstar.value_at_index(&fidx) + self.gstar.value_at_index(&gidx);
            if val < best {
                best = val;
                arg = Some(j);
            }
        }
        Ok((best, arg))
    }
}

/// `min_{y*} f*(x0* - Aᵀy*, u0*) + g*(y*, Bᵀu0*)` over the `Y*` grid, with the
/// lexicographically first minimizer (`None` if every term is `+inf`).
pub fn t3_dual_min(s: &QuadSetup, point: &[Rat]) -> Result<(ExtReal, Option<Vec<Rat>>)> {
    let c = t3_conjugates(s)?;
    t3_dual_min_with(s, &c, point)
}

/// [`t3_dual_min`] with precomputed conjugates.
pub fn t3_dual_min_with(s: &QuadSetup, c: &T3Conjugates, point: &[Rat]) -> Result<(ExtReal, Option<Vec<Rat>>)> {
    let (v, a) = c.dual_min(s, point)?;
    Ok((v, a.map(|j| s.duals.y.point_rat(j))))
}

/// Qualification data for a coupled setup: `π_Y dom g - A(π_X dom f)`.
pub fn check_qc_t3(s: &QuadSetup) -> Result<QCResult> {
    check_qc_pair(&s.f, s.x_dim, &s.g, s.y_dim, &s.a)
}

/// Outcome of a duality verification.
#[derive(Clone, Debug)]
pub struct DualityReport {
    pub h: GridFn,
    /// `h*` on the evaluation grid.
    pub lhs: GridFn,
    /// Dual minimum at every evaluation point.
    pub rhs: Vec<ExtReal>,
    /// Minimizing dual point per evaluation point.
    pub witness: Vec<Option<Vec<Rat>>>,
    /// `max (rhs - lhs)`.
    pub max_gap: ExtReal,
    /// Evaluation point (flat) where the gap is largest.
    pub worst: Option<usize>,
    pub weak_ok: bool,
    pub weak_tol: f64,
    /// First evaluation point where `lhs > rhs + weak_tol`.
    pub weak_violation: Option<usize>,
    /// `(L + 1) δ` for the instance (`L` the sum of the largest slope
    /// magnitudes, `δ` the largest grid step).
    pub strong_tol: f64,
    /// Tolerance used for the strong comparison (`strong_tol` unless
    /// overridden).
    pub tol_used: f64,
    pub qualification: QCResult,
    /// Convex-closedness of each input on its grid.
    pub closed: Vec<(String, bool)>,
    /// Whether the qualification condition and closedness all hold.
    pub hypotheses: bool,
    /// Strong comparison, only made when the hypotheses hold.
    pub strong_ok: Option<bool>,
}

impl DualityReport {
    pub fn success(&self) -> bool {
        self.weak_ok && self.strong_ok != Some(false)
    }
}

fn max_slope(f: &GridFn) -> f64 {
    slope_bracket(f)
        .iter()
        .flatten()
        .fold(0.0f64, |m, (lo, hi)| m.max(lo.abs()).max(hi.abs()))
}

fn max_coord(g: &LatticeGrid) -> Vec<f64> {
    (0..g.dim())
        .map(|i| g.axis_coords(i).iter().fold(0.0f64, |m, v| m.max(v.abs())))
        .collect()
}

/// Pairing magnitude `sum_i max|x_i| max|s_i|`.
fn pairing_scale(primal: &LatticeGrid, dual: &LatticeGrid) -> f64 {
    max_coord(primal).iter().zip(max_coord(dual)).map(|(a, b)| a * b).sum()
}

fn closedness(f: &GridFn) -> bool {
    is_closed(f, 1e-9 * (1.0 + f.max_abs()))
}

/// `h`, `h*` on the dual evaluation grid and the dual minimum there, with
/// the instance tolerances; no hypothesis is checked.
#[derive(Clone, Debug)]
pub struct Comparison {
    pub h: GridFn,
    pub lhs: GridFn,
    pub rhs: Vec<ExtReal>,
    pub witness: Vec<Option<Vec<Rat>>>,
    pub weak_tol: f64,
    pub strong_tol: f64,
}

impl Comparison {
    /// First evaluation point where `lhs > rhs + weak_tol`.
    pub fn weak_violation(&self) -> Option<usize> {
        self.lhs.values().iter().zip(&self.rhs).position(|(l, r)| match (l, r) {
            (Finite(lv), Finite(rv)) => *lv > rv + self.weak_tol,
            _ => false,
        })
    }
}

fn finish(c: Comparison, tol: Option<f64>, qualification: QCResult, closed: Vec<(String, bool)>) -> DualityReport {
    let mut max_gap = ExtReal::from(f64::NEG_INFINITY.max(-f64::MAX));
    let mut worst = None;
    for (i, (l, r)) in c.lhs.values().iter().zip(&c.rhs).enumerate() {
        let gap = match (l, r) {
            (_, PosInf) => PosInf,
            (Finite(lv), Finite(rv)) => Finite(rv - lv),
            (PosInf, Finite(_)) => Finite(f64::NEG_INFINITY.max(-f64::MAX)),
        };
        if worst.is_none() || gap > max_gap {
            max_gap = gap;
            worst = Some(i);
        }
    }
    let weak_violation = c.weak_violation();
    let hypotheses = qualification.is_subspace && closed.iter().all(|(_, c)| *c);
    let tol_used = tol.unwrap_or(c.strong_tol);
    let strong_ok = hypotheses.then(|| max_gap <= Finite(tol_used));
    DualityReport {
        h: c.h,
        lhs: c.lhs,
        rhs: c.rhs,
        witness: c.witness,
        max_gap,
        worst,
        weak_ok: weak_violation.is_none(),
        weak_tol: c.weak_tol,
        weak_violation,
        strong_tol: c.strong_tol,
        tol_used,
        qualification,
        closed,
        hypotheses,
        strong_ok,
    }
}

/// Computes `h`, `h*` on `X*×U*`, and the dual minimum at every point of
/// that grid, then compares them. `tol` overrides the instance-derived
/// strong tolerance.
pub fn verify_t3(s: &QuadSetup, tol: Option<f64>) -> Result<DualityReport> {
    let c = compare_t3(s)?;
    let qualification = check_qc_t3(s)?;
    let closed = vec![
        (s.f.label().to_string(), closedness(&s.f)),
        (s.g.label().to_string(), closedness(&s.g)),
    ];
    Ok(finish(c, tol, qualification, closed))
}

/// The comparison part of [`verify_t3`].
pub fn compare_t3(s: &QuadSetup) -> Result<Comparison> {
    let h = infconv_t3(s)?;
    let dgrid = s.dual_grid();
    cap("dual evaluation grid".into(), dgrid.len(), s.max_cells)?;
    let lhs = conjugate_fast(&h, &dgrid)?;
    let conj = t3_conjugates(s)?;
    let mut rhs = Vec::with_capacity(dgrid.len());
    let mut witness = Vec::with_capacity(dgrid.len());
    for i in 0..dgrid.len() {
        let (v, w) = t3_dual_min_with(s, &conj, &dgrid.point_rat(i))?;
        rhs.push(v);
        witness.push(w);
    }
    let terms = (s.f.grid().dim() + s.g.grid().dim() + 4) as f64;
    let scale = 1.0
        + s.f.max_abs()
        + s.g.max_abs()
        + pairing_scale(s.f.grid(), conj.fstar.grid())
        + pairing_scale(s.g.grid(), conj.gstar.grid());
    let weak_tol = 8.0 * f64::EPSILON * terms * scale;
    let delta = [
        s.f.grid(),
        s.g.grid(),
        &s.duals.x,
        &s.duals.u,
        &s.duals.y,
        &s.duals.v,
    ]
    .iter()
    .map(|g| g.max_step())
    .fold(0.0, f64::max);
    let strong_tol = (max_slope(&s.f) + max_slope(&s.g) + 1.0) * delta;
    Ok(Comparison {
        h,
        lhs,
        rhs,
        witness,
        weak_tol,
        strong_tol,
    })
}

/// `k` on `W×T` (first `w_dim` axes), `C: X → W`, `D: T → U`, primal grids
/// for `X` and `U`, dual grids for `X*`, `U*`, and the grid `W*×T*` on which
/// `k*` is sampled.
#[derive(Clone, Debug)]
pub struct RangeSetup {
    pub k: GridFn,
    pub w_dim: usize,
    pub c: RatLinMap,
    pub d: RatLinMap,
    pub x_grid: LatticeGrid,
    pub u_grid: LatticeGrid,
    pub x_dual: LatticeGrid,
    pub u_dual: LatticeGrid,
    pub k_dual: LatticeGrid,
    pub max_cells: usize,
}

impl RangeSetup {
    pub fn validate(&self) -> Result<()> {
        let (wg, tg) = block_split(&self.k, self.w_dim, "k")?;
        map_dims("C", &self.c, self.x_grid.dim(), wg.dim())?;
        map_dims("D", &self.d, tg.dim(), self.u_grid.dim())?;
        grid_dim("X*", &self.x_dual, self.x_grid.dim())?;
        grid_dim("U*", &self.u_dual, self.u_grid.dim())?;
        grid_dim("W*×T*", &self.k_dual, self.k.grid().dim())?;
        require_index_map("C", &self.c, &self.x_grid, &wg)?;
        Ok(())
    }

    pub fn dual_grid(&self) -> LatticeGrid {
        self.x_dual.product(&self.u_dual)
    }
}

/// `h(x, u) = min { k(Cx, t) : t on the T grid, Dt = u }` on `x_grid×u_grid`.
pub fn infconv_t21(
    k: &GridFn,
    w_dim: usize,
    c: &RatLinMap,
    d: &RatLinMap,
    x_grid: &LatticeGrid,
    u_grid: &LatticeGrid,
) -> Result<GridFn> {
    let (wg, tg) = block_split(k, w_dim, "k")?;
    map_dims("C", c, x_grid.dim(), wg.dim())?;
    map_dims("D", d, tg.dim(), u_grid.dim())?;
    let c_idx = require_index_map("C", c, x_grid, &wg)?;
    // Dt lands on the U grid only for some t; the rest never contribute.
    let mut by_u: Vec<Vec<usize>> = vec![Vec::new(); u_grid.len()];
    for t in 0..tg.len() {
        if let Some(iu) = u_grid.locate(&d.apply(&tg.point_rat(t))) {
            by_u[iu].push(t);
        }
    }
    let kt: Vec<Vec<i64>> = (0..tg.len()).map(|t| tg.multi_index(t)).collect();
    let out_grid = x_grid.product(u_grid);
    let mut values = Vec::with_capacity(out_grid.len());
    let mut idx = vec![0i64; k.grid().dim()];
    for ix in 0..x_grid.len() {
        idx[..w_dim].copy_from_slice(&c_idx.image(ix));
        for ts in &by_u {
            let mut best = PosInf;
            for &t in ts {
                idx[w_dim..].copy_from_slice(&kt[t]);
                best = best.min(k.value_at_index(&idx));
            }
            values.push(best);
        }
    }
    GridFn::new(out_grid, values, format!("h[{}]", k.label()))
}

/// Precomputed constraint data for [`t21_dual_min`].
struct RangeDual<'a> {
    kstar: &'a GridFn,
    w_dim: usize,
    ct_images: Vec<Vec<Rat>>,
    wg: LatticeGrid,
    d: &'a RatLinMap,
}

impl<'a> RangeDual<'a> {
    fn new(kstar: &'a GridFn, w_dim: usize, c: &RatLinMap, d: &'a RatLinMap) -> Result<Self> {
        let (wg, tg) = block_split(kstar, w_dim, "k*")?;
        map_dims("Cᵀ", &c.transpose(), wg.dim(), c.cols())?;
        map_dims("Dᵀ", &d.transpose(), d.rows(), tg.dim())?;
        let ct = c.transpose();
        let ct_images = (0..wg.len()).map(|j| ct.apply(&wg.point_rat(j))).collect();
        Ok(RangeDual {
            kstar,
            w_dim,
            ct_images,
            wg,
            d,
        })
    }

    fn min_at(&self, point: &[Rat], x_dim: usize) -> Result<(ExtReal, Option<usize>)> {
        if point.len() != x_dim + self.d.rows() {
            return Err(Error::DimensionMismatch(format!(
                "dual point {} has the wrong dimension",
                fmt_point(point)
            )));
        }
        let (x0, u0) = point.split_at(x_dim);
        let dtu = self.d.transpose().apply(u0);
        let tg = self.kstar.grid().axes(self.w_dim, self.kstar.grid().dim())?;
        let Some(kt) = tg.lattice_index_of(&dtu) else {
            return Err(Error::Incompatible {
                map: "Dᵀ".into(),
                detail: format!("Dᵀ{} is off the T* lattice", fmt_point(u0)),
            });
        };
        let mut best = PosInf;
        let mut arg = None;
        let mut idx = vec![0i64; self.kstar.grid().dim()];
        idx[self.w_dim..].copy_from_slice(&kt);
        for (j, img) in self.ct_images.iter().enumerate() {
            if img.as_slice() != x0 {
                continue;
            }
            idx[..self.w_dim].copy_from_slice(&self.wg.multi_index(j));
            let v = self.kstar.value_at_index(&idx);
            if arg.is_none() || v < best {
                best = v;
                arg = Some(j);
            }
        }
        Ok((best, arg))
    }
}

/// `min { k*(w*, Dᵀu0*) : w* on the W* grid, Cᵀw* = x0* }` for `kstar` on
/// `W*×T*`; `(+inf, None)` when no grid `w*` satisfies the constraint.
pub fn t21_dual_min(
    kstar: &GridFn,
    w_dim: usize,
    c: &RatLinMap,
    d: &RatLinMap,
    point: &[Rat],
) -> Result<(ExtReal, Option<Vec<Rat>>)> {
    let rd = RangeDual::new(kstar, w_dim, c, d)?;
    let (v, a) = rd.min_at(point, c.cols())?;
    Ok((v, a.map(|j| rd.wg.point_rat(j))))
}

/// Range-form analogue of [`verify_t3`], with `k*` sampled on `k_dual`.
pub fn verify_t21(s: &RangeSetup, tol: Option<f64>) -> Result<DualityReport> {
    s.validate()?;
    cap(format!("conjugate grid of `{}`", s.k.label()), s.k_dual.len(), s.max_cells)?;
    let kstar = conjugate_fast(&s.k, &s.k_dual)?;
    verify_t21_with(s, &kstar, tol)
}

/// [`verify_t21`] with a caller-supplied `k*` on `s.k_dual`.
pub fn verify_t21_with(s: &RangeSetup, kstar: &GridFn, tol: Option<f64>) -> Result<DualityReport> {
    let c = compare_t21_with(s, kstar)?;
    let qualification = check_qc_range(&s.k, s.w_dim, &s.c)?;
    let closed = vec![(s.k.label().to_string(), closedness(&s.k))];
    Ok(finish(c, tol, qualification, closed))
}

/// The comparison part of [`verify_t21_with`].
pub fn compare_t21_with(s: &RangeSetup, kstar: &GridFn) -> Result<Comparison> {
    s.validate()?;
    let h = infconv_t21(&s.k, s.w_dim, &s.c, &s.d, &s.x_grid, &s.u_grid)?;
    let dgrid = s.dual_grid();
    cap("dual evaluation grid".into(), dgrid.len(), s.max_cells)?;
    let lhs = conjugate_fast(&h, &dgrid)?;
    let rd = RangeDual::new(kstar, s.w_dim, &s.c, &s.d)?;
    let mut rhs = Vec::with_capacity(dgrid.len());
    let mut witness = Vec::with_capacity(dgrid.len());
    for i in 0..dgrid.len() {
        let (v, a) = rd.min_at(&dgrid.point_rat(i), s.x_grid.dim())?;
        rhs.push(v);
        witness.push(a.map(|j| rd.wg.point_rat(j)));
    }
    let terms = (s.k.grid().dim() + dgrid.dim() + 4) as f64;
    let scale = 1.0 + s.k.max_abs() + pairing_scale(s.k.grid(), kstar.grid()) + pairing_scale(h.grid(), &dgrid);
    let weak_tol = 8.0 * f64::EPSILON * terms * scale;
    let delta = [s.k.grid(), &s.x_grid, &s.u_grid, &s.x_dual, &s.u_dual, &s.k_dual]
        .iter()
        .map(|g| g.max_step())
        .fold(0.0, f64::max);
    let strong_tol = (max_slope(&s.k) + 1.0) * delta;
    Ok(Comparison {
        h,
        lhs,
        rhs,
        witness,
        weak_tol,
        strong_tol,
    })
}

/// [`compare_t21_with`] sampling `k*` on `s.k_dual`.
pub fn compare_t21(s: &RangeSetup) -> Result<Comparison> {
    s.validate()?;
    cap(format!("conjugate grid of `{}`", s.k.label()), s.k_dual.len(), s.max_cells)?;
    compare_t21_with(s, &conjugate_fast(&s.k, &s.k_dual)?)
}

/// Rewrites a coupled setup in range form: `W = X×Y`, `T = U×V`,
/// `k((x,y),(u,v)) = f(x,u) + g(y,v)`, `Cx = (x, Ax)`, `D(u,v) = u + Bv`.
/// `k*` is sampled on the widened conjugate lattices of [`t3_conjugates`].
pub fn remark22_lift(s: &QuadSetup) -> Result<RangeSetup> {
    let wgrid = s.xg.product(&s.yg);
    let tgrid = s.ug.product(&s.vg);
    let kgrid = wgrid.product(&tgrid);
    cap("lifted product grid".into(), kgrid.len(), s.max_cells)?;
    let (xd, yd, ud) = (s.x_dim, s.y_dim, s.ug.dim());
    let mut values = Vec::with_capacity(kgrid.len());
    for i in 0..kgrid.len() {
        let k = kgrid.multi_index(i);
        let (x, rest) = k.split_at(xd);
        let (y, rest) = rest.split_at(yd);
        let (u, v) = rest.split_at(ud);
        let fv = s.f.value_at_index(&[x, u].concat());
        let gv = s.g.value_at_index(&[y, v].concat());
        values.push(fv + gv);
    }
    let k = GridFn::new(kgrid, values, format!("k[{},{}]", s.f.label(), s.g.label()))?;
    let c = RatLinMap::identity(xd).vstack(&s.a)?;
    let d = RatLinMap::identity(ud).hstack(&s.b)?;
    let conj_grids = lifted_dual_grids(s)?;
    Ok(RangeSetup {
        k,
        w_dim: xd + yd,
        c,
        d,
        x_grid: s.xg.clone(),
        u_grid: s.ug.clone(),
        x_dual: s.duals.x.clone(),
        u_dual: s.duals.u.clone(),
        k_dual: conj_grids,
        max_cells: s.max_cells,
    })
}

fn lifted_dual_grids(s: &QuadSetup) -> Result<LatticeGrid> {
    let at = s.a.transpose();
    let bt = s.b.transpose();
    let xb = s.duals.x.bounds_rat();
    let atb = at.image_bounds(&s.duals.y.bounds_rat());
    let xw: Vec<(Rat, Rat)> = xb.iter().zip(&atb).map(|((xl, xh), (al, ah))| (xl - ah, xh - al)).collect();
    let xstar = s.duals.x.widened_to_rat(&xw);
    let vstar = s.duals.v.widened_to_rat(&bt.image_bounds(&s.duals.u.bounds_rat()));
    let g = xstar.product(&s.duals.y).product(&s.duals.u.product(&vstar));
    cap("lifted dual grid".into(), g.len(), s.max_cells)?;
    Ok(g)
}

/// `k*((x*,y*),(u*,v*)) = f*(x*,u*) + g*(y*,v*)` on the lifted dual grid,
/// summed in the same order as [`t3_dual_min`].
pub fn lift_conjugate(s: &QuadSetup, c: &T3Conjugates) -> Result<GridFn> {
    let grid = lifted_dual_grids(s)?;
    let (xd, yd, ud) = (s.duals.x.dim(), s.duals.y.dim(), s.duals.u.dim());
    let values = (0..grid.len())
        .map(|i| {
            let k = grid.multi_index(i);
            let (x, rest) = k.split_at(xd);
            let (y, rest) = rest.split_at(yd);
            let (u, v) = rest.split_at(ud);
            c.fstar.value_at_index(&[x, u].concat()) + c.gstar.value_at_index(&[y, v].concat())
        })
        .collect();
    GridFn::new(grid, values, format!("k*[{},{}]", s.f.label(), s.g.label()))
}

/// Both sides of the set identity
/// `{(x - x1, y - R x1) : (x,y) ∈ G, x1} = Q⁻¹[Q(G)]`, `Q(x,y) = y - Rx`,
/// intersected with the points of `bx` (a grid over `X×Z`).
#[derive(Clone, Debug, PartialEq)]
pub struct Lemma2 {
    pub lhs: BTreeSet<Vec<Rat>>,
    pub rhs: BTreeSet<Vec<Rat>>,
    pub equal: bool,
}

pub const LEMMA2_MAX_BOX: usize = 1 << 20;

pub fn lemma2_sets(g: &[Vec<Rat>], r: &RatLinMap, bx: &LatticeGrid) -> Result<Lemma2> {
    if g.is_empty() {
        return Err(Error::Empty("G needs at least one point".into()));
    }
    let (xd, zd) = (r.cols(), r.rows());
    if bx.dim() != xd + zd || g.iter().any(|p| p.len() != xd + zd) {
        return Err(Error::DimensionMismatch(format!(
            "R is {zd}x{xd}; box and G must have dimension {}",
            xd + zd
        )));
    }
    cap("lemma box".into(), bx.len(), LEMMA2_MAX_BOX)?;
    let xbox = bx.axes(0, xd)?;
    let mut lhs = BTreeSet::new();
    for p in g {
        let (x, y) = p.split_at(xd);
        for i in 0..xbox.len() {
            let xi = xbox.point_rat(i);
            let x1 = sub(x, &xi);
            let eta = sub(y, &r.apply(&x1));
            let pt = [xi, eta].concat();
            if bx.locate(&pt).is_some() {
                lhs.insert(pt);
            }
        }
    }
    let qg: BTreeSet<Vec<Rat>> = g
        .iter()
        .map(|p| {
            let (x, y) = p.split_at(xd);
            sub(y, &r.apply(x))
        })
        .collect();
    let mut rhs = BTreeSet::new();
    for i in 0..bx.len() {
        let pt = bx.point_rat(i);
        let (xi, eta) = pt.split_at(xd);
        if qg.contains(&sub(eta, &r.apply(xi))) {
            rhs.insert(pt);
        }
    }
    let equal = lhs == rhs;
    Ok(Lemma2 { lhs, rhs, equal })
}
