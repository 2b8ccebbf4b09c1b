//! Legendre–Fenchel conjugation on lattice grids.
//!
//! [`conjugate`] is the reference: a direct maximum over every finite primal
//! point. [`conjugate_fast`] factorizes the supremum axis by axis with
//! one-dimensional upper envelopes, uses the result only to discard primal
//! points that cannot be maximal, and re-evaluates the survivors with the
//! reference formula. Its output is therefore bit-for-bit the reference one.

use crate::error::{Error, Result};
use crate::lp::in_convex_hull;
use crate::numcore::{ExtReal, Finite, GridFn, LatticeGrid, PosInf, Rat};

/// Largest dual grid [`closure`] will build on its own.
pub const MAX_CLOSURE_CELLS: usize = 1 << 22;

fn check_dims(f: &GridFn, dual: &LatticeGrid) -> Result<()> {
    if f.grid().dim() != dual.dim() {
        return Err(Error::DimensionMismatch(format!(
            "`{}` lives in dimension {}, dual grid has dimension {}",
            f.label(),
            f.grid().dim(),
            dual.dim()
        )));
    }
    Ok(())
}

/// `<x, s> - fx` with the pairing summed in axis order. Every conjugate in
/// the crate goes through this expression.
#[inline]
pub fn pairing_minus(x: &[f64], s: &[f64], fx: f64) -> f64 {
    let mut p = 0.0;
    for (a, b) in x.iter().zip(s) {
        p += a * b;
    }
    p - fx
}

/// Finite primal points as `(flat index, coordinates, value)`.
fn finite_points(f: &GridFn) -> Vec<(usize, Vec<f64>, f64)> {
    f.finite_indices()
        .map(|i| (i, f.grid().point_f64(i), f.value(i).finite().expect("finite")))
        .collect()
}

fn argmax_over<'a>(pts: impl Iterator<Item = &'a (usize, Vec<f64>, f64)>, s: &[f64]) -> (f64, usize) {
    let mut best = f64::NEG_INFINITY;
    let mut arg = usize::MAX;
    for (i, x, fx) in pts {
        let v = pairing_minus(x, s, *fx);
        if arg == usize::MAX || v > best {
            best = v;
            arg = *i;
        }
    }
    (best, arg)
}

/// `f*(s)` at one dual point, with the lexicographically first maximizer.
pub fn conjugate_point(f: &GridFn, s: &[f64]) -> (f64, usize) {
    argmax_over(finite_points(f).iter(), s)
}

/// Reference conjugate: `f*(s) = max_x <x, s> - f(x)` over finite grid points.
pub fn conjugate(f: &GridFn, dual: &LatticeGrid) -> Result<GridFn> {
    Ok(conjugate_argmax(f, dual)?.0)
}

/// [`conjugate`] plus, per dual point, the flat index of the first maximizer.
pub fn conjugate_argmax(f: &GridFn, dual: &LatticeGrid) -> Result<(GridFn, Vec<usize>)> {
    check_dims(f, dual)?;
    let pts = finite_points(f);
    let mut vals = Vec::with_capacity(dual.len());
    let mut args = Vec::with_capacity(dual.len());
    for j in 0..dual.len() {
        let (v, a) = argmax_over(pts.iter(), &dual.point_f64(j));
        vals.push(ExtReal::from_f64(v, "conjugate")?);
        args.push(a);
    }
    Ok((GridFn::new(dual.clone(), vals, format!("{}*", f.label()))?, args))
}

/// Upper envelope of lines `slopes[j] * s + icpt[j]` (slopes strictly
/// increasing; `-inf` intercepts are absent lines) evaluated at ascending
/// `queries`. Writes `-inf` when no line is present.
fn envelope(slopes: &[f64], icpt: &[f64], queries: &[f64], out: &mut [f64], hull: &mut Vec<usize>) {
    hull.clear();
    for j in 0..slopes.len() {
        if icpt[j] == f64::NEG_INFINITY {
            continue;
        }
        while hull.len() >= 2 {
            let l1 = hull[hull.len() - 2];
            let l2 = hull[hull.len() - 1];
            let lhs = (icpt[j] - icpt[l1]) * (slopes[l2] - slopes[l1]);
            let rhs = (icpt[l2] - icpt[l1]) * (slopes[j] - slopes[l1]);
            if lhs >= rhs {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(j);
    }
    if hull.is_empty() {
        out.fill(f64::NEG_INFINITY);
        return;
    }
    let mut h = 0;
    for (q, o) in queries.iter().zip(out.iter_mut()) {
        while h + 1 < hull.len() {
            let a = slopes[hull[h]] * q + icpt[hull[h]];
            let b = slopes[hull[h + 1]] * q + icpt[hull[h + 1]];
            if b >= a {
                h += 1;
            } else {
                break;
            }
        }
        *o = slopes[hull[h]] * q + icpt[hull[h]];
    }
}

/// Fast conjugate with output identical to [`conjugate`].
pub fn conjugate_fast(f: &GridFn, dual: &LatticeGrid) -> Result<GridFn> {
    Ok(conjugate_fast_argmax(f, dual)?.0)
}

/// [`conjugate_fast`] with maximizers, identical to [`conjugate_argmax`].
pub fn conjugate_fast_argmax(f: &GridFn, dual: &LatticeGrid) -> Result<(GridFn, Vec<usize>)> {
    check_dims(f, dual)?;
    let g = f.grid();
    let d = g.dim();
    let n: Vec<usize> = g.shape();
    let m: Vec<usize> = dual.shape();

    // tables[k]: primal axes 0..k, dual axes k..d, holding
    // max over x_k..x_{d-1} of sum_{l>=k} x_l s_l - f(x).
    let mut tables: Vec<Vec<f64>> = vec![Vec::new(); d + 1];
    tables[d] = f
        .values()
        .iter()
        .map(|v| v.finite().map_or(f64::NEG_INFINITY, |x| -x))
        .collect();
    let mut hull = Vec::new();
    let mut line = Vec::new();
    let mut outl = Vec::new();
    for k in (0..d).rev() {
        let prefix: usize = n[..k].iter().product();
        let tail: usize = m[k + 1..].iter().product();
        let src = &tables[k + 1];
        let mut dst = vec![0.0; prefix * m[k] * tail];
        let xs = g.axis_coords(k);
        let ss = dual.axis_coords(k);
        line.resize(n[k], 0.0);
        outl.resize(m[k], 0.0);
        for p in 0..prefix {
            for t in 0..tail {
                for (j, l) in line.iter_mut().enumerate() {
                    *l = src[(p * n[k] + j) * tail + t];
                }
                envelope(xs, &line, ss, &mut outl, &mut hull);
                for (i, o) in outl.iter().enumerate() {
                    dst[(p * m[k] + i) * tail + t] = *o;
                }
            }
        }
        tables[k] = dst;
    }

    // Magnitude scale for the pruning tolerance.
    let mut scale = f.max_abs() + 1.0;
    for k in 0..d {
        let xm = g.axis_coords(k).iter().fold(0.0f64, |a, v| a.max(v.abs()));
        let sm = dual.axis_coords(k).iter().fold(0.0f64, |a, v| a.max(v.abs()));
        scale += xm * sm;
    }
    let tol = 2f64.powi(-40) * (d as f64 + 2.0) * scale;

    let tail_sizes: Vec<usize> = (0..=d).map(|k| m[k..].iter().product()).collect();
    let mut vals = Vec::with_capacity(dual.len());
    let mut args = Vec::with_capacity(dual.len());
    let mut cands: Vec<usize> = Vec::new();
    let mut stack: Vec<(usize, usize, f64)> = Vec::new();
    let mut xc = vec![0.0; d];
    let mut soff = vec![0usize; d];
    let mut s = vec![0.0; d];
    for sflat in 0..dual.len() {
        let mut rest = sflat;
        for k in (0..d).rev() {
            soff[k] = rest % m[k];
            rest /= m[k];
            s[k] = dual.axis_coords(k)[soff[k]];
        }
        // Flat offset of the dual tail `soff[k..]` inside a table.
        let tail_off = |k: usize| -> usize {
            let mut t = 0;
            for l in k..d {
                t = t * m[l] + soff[l];
            }
            t
        };
        let approx = tables[0][tail_off(0)];
        let thr = approx - 2.0 * tol;
        cands.clear();
        // (level, primal prefix flat, partial pairing); pushed in reverse so
        // that candidates come out in ascending flat order.
        stack.clear();
        stack.push((0, 0, 0.0));
        while let Some((k, pflat, ps)) = stack.pop() {
            if k == d {
                cands.push(pflat);
                continue;
            }
            let xs = g.axis_coords(k);
            let tk1 = &tables[k + 1];
            let toff = tail_off(k + 1);
            let tsz = tail_sizes[k + 1];
            for j in (0..n[k]).rev() {
                let np = pflat * n[k] + j;
                let b = tk1[np * tsz + toff];
                if b == f64::NEG_INFINITY {
                    continue;
                }
                let nps = ps + xs[j] * s[k];
                if nps + b >= thr {
                    stack.push((k + 1, np, nps));
                }
            }
        }
        let mut best = f64::NEG_INFINITY;
        let mut arg = usize::MAX;
        for &c in &cands {
            let fx = f.value(c).finite().expect("candidate is finite");
            let mut rest = c;
            for k in (0..d).rev() {
                xc[k] = g.axis_coords(k)[rest % n[k]];
                rest /= n[k];
            }
            let v = pairing_minus(&xc, &s, fx);
            if arg == usize::MAX || v > best {
                best = v;
                arg = c;
            }
        }
        if arg == usize::MAX {
            // Pruning should never empty the set; fall back to the full scan.
            let (v, a) = conjugate_point(f, &s);
            best = v;
            arg = a;
        }
        vals.push(ExtReal::from_f64(best, "conjugate")?);
        args.push(arg);
    }
    Ok((GridFn::new(dual.clone(), vals, format!("{}*", f.label()))?, args))
}

/// Per axis, the smallest and largest difference quotient between
/// consecutive finite points along axis lines; `None` for axes without such
/// pairs.
pub fn slope_bracket(f: &GridFn) -> Vec<Option<(f64, f64)>> {
    let g = f.grid();
    let mut out = vec![None; g.dim()];
    for (axis, slot) in out.iter_mut().enumerate() {
        let xs = g.axis_coords(axis);
        let stride: usize = g.shape()[axis + 1..].iter().product();
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in 0..g.len() {
            if g.offsets(i)[axis] != 0 {
                continue;
            }
            let mut prev: Option<(f64, f64)> = None;
            for (j, &x) in xs.iter().enumerate() {
                if let Finite(v) = f.value(i + j * stride) {
                    if let Some((px, pv)) = prev {
                        let q = (v - pv) / (x - px);
                        lo = lo.min(q);
                        hi = hi.max(q);
                    }
                    prev = Some((x, v));
                }
            }
        }
        if lo <= hi {
            *slot = Some((lo, hi));
        }
    }
    out
}

/// The primal lattice, widened so each axis covers the slope bracket.
pub fn default_dual_grid(f: &GridFn) -> LatticeGrid {
    let bounds: Vec<(f64, f64)> = slope_bracket(f)
        .iter()
        .map(|b| b.unwrap_or((0.0, 0.0)))
        .collect();
    f.grid().widened_to(&bounds)
}

/// Whether grid points lie in the convex hull of `dom f`, decided exactly.
pub fn conv_dom_mask(f: &GridFn) -> Vec<bool> {
    let g = f.grid();
    let finite: Vec<bool> = f.values().iter().map(|v| v.is_finite()).collect();
    if finite.iter().all(|&b| b) {
        return finite;
    }
    // Dropping points strictly between two kept points of the same axis line
    // does not change the hull.
    let mut keep = finite.clone();
    let shape = g.shape();
    for axis in 0..g.dim() {
        let stride: usize = shape[axis + 1..].iter().product();
        for i in 0..g.len() {
            if g.offsets(i)[axis] != 0 {
                continue;
            }
            let on: Vec<usize> = (0..shape[axis]).map(|j| i + j * stride).filter(|&p| keep[p]).collect();
            if on.len() > 2 {
                for &p in &on[1..on.len() - 1] {
                    keep[p] = false;
                }
            }
        }
    }
    let gens: Vec<Vec<Rat>> = (0..g.len()).filter(|&i| keep[i]).map(|i| g.point_rat(i)).collect();
    (0..g.len())
        .map(|i| finite[i] || in_convex_hull(&gens, &g.point_rat(i)))
        .collect()
}

/// Largest dual-step refinement tried by [`closure`].
pub const MAX_CLOSURE_REFINE: i64 = 16;

/// [`default_dual_grid`] with every step divided by `r`.
pub fn refined_dual_grid(f: &GridFn, r: i64) -> LatticeGrid {
    let g = f.grid();
    let rr = Rat::from_integer(r);
    let fine = LatticeGrid::new(
        g.origin().to_vec(),
        g.step().iter().map(|h| h / rr).collect(),
        g.lo().iter().map(|k| k * r).collect(),
        g.hi().iter().map(|k| k * r).collect(),
    )
    .expect("refining a valid lattice");
    let bounds: Vec<(f64, f64)> = slope_bracket(f)
        .iter()
        .map(|b| b.unwrap_or((0.0, 0.0)))
        .collect();
    fine.widened_to(&bounds)
}

/// Closed convex hull of `f` on its grid, as a biconjugate; points outside
/// the hull of the domain get `+inf`.
///
/// The biconjugate through a dual lattice only reaches the convex envelope
/// where the envelope's subgradients lie on that lattice, so the dual step
/// is halved (starting from [`default_dual_grid`]) until the result reaches
/// `f`, stops changing, or hits [`MAX_CLOSURE_REFINE`] or the size cap.
pub fn closure(f: &GridFn) -> Result<GridFn> {
    let mask = conv_dom_mask(f);
    let tol = 1e-12 * (1.0 + f.max_abs());
    let close = |a: &GridFn, b: &GridFn| a.max_abs_diff(b).is_some_and(|d| d <= tol);
    let mut prev: Option<GridFn> = None;
    let mut r = 1;
    loop {
        let dual = refined_dual_grid(f, r);
        if dual.len() > MAX_CLOSURE_CELLS {
            return prev.ok_or_else(|| Error::SizeCap {
                what: format!("closure dual grid for `{}`", f.label()),
                needed: dual.len(),
                cap: MAX_CLOSURE_CELLS,
            });
        }
        let c = biconjugate(f, &dual, &mask)?;
        if r >= MAX_CLOSURE_REFINE || close(&c, f) || prev.as_ref().is_some_and(|p| close(p, &c)) {
            return Ok(c);
        }
        prev = Some(c);
        r *= 2;
    }
}

/// Whether `f` agrees with its [`closure`] within `tol` at every point.
/// A closure that cannot be formed counts as not closed.
pub fn is_closed(f: &GridFn, tol: f64) -> bool {
    closure(f)
        .ok()
        .and_then(|c| c.max_abs_diff(f))
        .is_some_and(|d| d <= tol)
}

/// Biconjugate through an explicit dual grid, which must cover the slope
/// bracket of `f`.
pub fn closure_with(f: &GridFn, dual: &LatticeGrid) -> Result<GridFn> {
    check_dims(f, dual)?;
    for (axis, b) in slope_bracket(f).iter().enumerate() {
        if let Some((lo, hi)) = *b {
            let c = dual.axis_coords(axis);
            let (dlo, dhi) = (c[0], c[c.len() - 1]);
            for slope in [lo, hi] {
                if slope < dlo || slope > dhi {
                    return Err(Error::DualGridTooNarrow {
                        axis,
                        slope,
                        lo: dlo,
                        hi: dhi,
                    });
                }
            }
        }
    }
    biconjugate(f, dual, &conv_dom_mask(f))
}

fn biconjugate(f: &GridFn, dual: &LatticeGrid, mask: &[bool]) -> Result<GridFn> {
    let fs = conjugate_fast(f, dual)?;
    let fss = conjugate_fast(&fs, f.grid())?;
    let values = fss
        .values()
        .iter()
        .zip(mask)
        .map(|(v, &inside)| if inside { *v } else { PosInf })
        .collect();
    GridFn::new(f.grid().clone(), values, format!("cl {}", f.label()))
}

/// Pairing between a primal grid and a declared dual grid.
#[derive(Clone, Debug)]
pub struct DualPairing {
    primal: LatticeGrid,
    dual: LatticeGrid,
}

impl DualPairing {
    pub fn new(primal: LatticeGrid, dual: LatticeGrid) -> Result<Self> {
        if primal.dim() != dual.dim() {
            return Err(Error::DimensionMismatch(format!(
                "primal dimension {} vs dual dimension {}",
                primal.dim(),
                dual.dim()
            )));
        }
        Ok(DualPairing { primal, dual })
    }

    pub fn primal(&self) -> &LatticeGrid {
        &self.primal
    }

    pub fn dual(&self) -> &LatticeGrid {
        &self.dual
    }

    /// Fenchel–Young gap `f(x) + f*(s) - <x, s>`.
    pub fn fy_gap(&self, f: &GridFn, x: &[Rat], s: &[Rat]) -> Result<ExtReal> {
        if f.grid() != &self.primal {
            return Err(Error::Invalid(format!("`{}` is not sampled on the paired primal grid", f.label())));
        }
        let xi = self.primal.locate_or_err(x)?;
        let si = self.dual.locate_or_err(s)?;
        let sp = self.dual.point_f64(si);
        let (fs, _) = conjugate_point(f, &sp);
        Ok(match f.value(xi) {
            PosInf => PosInf,
            Finite(fx) => Finite(fx + fs - pairing_minus(&self.primal.point_f64(xi), &sp, 0.0)),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numcore::{int, rat};
    use proptest::prelude::*;

    fn fin(v: &[f64]) -> Vec<ExtReal> {
        v.iter().map(|&x| Finite(x)).collect()
    }

    fn half_square(lo: i64, hi: i64) -> GridFn {
        GridFn::from_fn(LatticeGrid::integers(lo, hi).unwrap(), "q", |x| Finite(0.5 * x[0] * x[0])).unwrap()
    }

    #[test]
    fn point_indicator_conjugates_to_zero() {
        let f = GridFn::new(LatticeGrid::integers(0, 0).unwrap(), fin(&[0.0]), "i").unwrap();
        let dual = LatticeGrid::integers(-5, 5).unwrap();
        let c = conjugate(&f, &dual).unwrap();
        assert!(c.values().iter().all(|v| *v == Finite(0.0)));
        assert_eq!(conjugate_fast(&f, &dual).unwrap(), c);
    }

    #[test]
    fn sampled_abs_conjugate() {
        let f = GridFn::new(LatticeGrid::integers(-1, 1).unwrap(), fin(&[1.0, 0.0, 1.0]), "abs").unwrap();
        let dual = LatticeGrid::integers(-1, 1).unwrap();
        // max over x in {-1,0,1} of s x - |x|
        let expect: Vec<ExtReal> = [-1.0f64, 0.0, 1.0]
            .iter()
            .map(|&s| Finite([-1.0f64, 0.0, 1.0].iter().map(|&x| s * x - x.abs()).fold(f64::MIN, f64::max)))
            .collect();
        let c = conjugate(&f, &dual).unwrap();
        assert_eq!(c.values(), &expect[..]);
        assert_eq!(conjugate_fast(&f, &dual).unwrap(), c);
    }

    #[test]
    fn ties_pick_first_maximizer() {
        let f = GridFn::new(LatticeGrid::integers(-1, 1).unwrap(), fin(&[1.0, 0.0, 1.0]), "abs").unwrap();
        let dual = LatticeGrid::integers(1, 1).unwrap();
        let (_, a) = conjugate_argmax(&f, &dual).unwrap();
        let (_, b) = conjugate_fast_argmax(&f, &dual).unwrap();
        assert_eq!(a, vec![1]);
        assert_eq!(b, a);
    }

    #[test]
    fn dimension_mismatch() {
        let f = half_square(-1, 1);
        assert!(conjugate(&f, &LatticeGrid::cube(2, -1, 1, int(1)).unwrap()).is_err());
    }

    #[test]
    fn closure_keeps_convex_samples() {
        let f = half_square(-2, 2);
        assert_eq!(closure(&f).unwrap().values(), f.values());
    }

    #[test]
    fn closure_fills_nonconvex_bump() {
        let f = GridFn::new(LatticeGrid::integers(-1, 1).unwrap(), fin(&[0.0, 1.0, 0.0]), "bump").unwrap();
        assert_eq!(closure(&f).unwrap().values(), &fin(&[0.0, 0.0, 0.0])[..]);
    }

    #[test]
    fn closure_of_two_point_indicator() {
        let g = LatticeGrid::integers(-1, 1).unwrap();
        let f = GridFn::indicator(g, &[vec![int(-1)], vec![int(1)]], "i").unwrap();
        assert_eq!(closure(&f).unwrap().values(), &fin(&[0.0, 0.0, 0.0])[..]);
    }

    #[test]
    fn closure_masks_outside_hull() {
        let g = LatticeGrid::cube(2, -1, 1, int(1)).unwrap();
        let f = GridFn::indicator(g, &[vec![int(0), int(0)], vec![int(1), int(1)]], "seg").unwrap();
        let c = closure(&f).unwrap();
        assert_eq!(c.value_at(&[int(0), int(1)]), PosInf);
        assert_eq!(c.value_at(&[int(1), int(1)]), Finite(0.0));
    }

    #[test]
    fn closure_reaches_fractional_facet_slopes() {
        // the envelope at 1 lies on the chord from 0 to 2, slope 1/2
        let f = GridFn::new(LatticeGrid::integers(0, 2).unwrap(), fin(&[0.0, 1.0, 1.0]), "f").unwrap();
        let coarse = closure_with(&f, &default_dual_grid(&f)).unwrap();
        assert_eq!(coarse.value(1), Finite(0.0));
        assert_eq!(closure(&f).unwrap().values(), &fin(&[0.0, 0.5, 1.0])[..]);
    }

    #[test]
    fn narrow_dual_grid_is_reported() {
        let f = half_square(-2, 2);
        let narrow = LatticeGrid::integers(-1, 1).unwrap();
        assert!(matches!(
            closure_with(&f, &narrow),
            Err(Error::DualGridTooNarrow { slope, .. }) if slope == 1.5 || slope == -1.5
        ));
    }

    #[test]
    fn fenchel_young_gaps() {
        let f = half_square(-2, 2);
        let p = DualPairing::new(f.grid().clone(), LatticeGrid::integers(-3, 3).unwrap()).unwrap();
        assert_eq!(p.fy_gap(&f, &[int(1)], &[int(1)]).unwrap(), Finite(0.0));
        assert_eq!(p.fy_gap(&f, &[int(1)], &[int(0)]).unwrap(), Finite(0.5));
        assert!(p.fy_gap(&f, &[rat(1, 2)], &[int(0)]).is_err());
        let ind = GridFn::new(LatticeGrid::integers(0, 0).unwrap(), fin(&[0.0]), "i").unwrap();
        let p0 = DualPairing::new(ind.grid().clone(), LatticeGrid::integers(-3, 3).unwrap()).unwrap();
        for s in -3..=3 {
            assert_eq!(p0.fy_gap(&ind, &[int(0)], &[int(s)]).unwrap(), Finite(0.0));
        }
    }

    fn arb_fn(max_dim: usize, max_n: i64) -> impl Strategy<Value = (GridFn, LatticeGrid)> {
        (1..=max_dim)
            .prop_flat_map(move |d| {
                (
                    proptest::collection::vec((1i64..=max_n, 1i64..=2, -2i64..=2), d),
                    proptest::collection::vec((1i64..=max_n, 1i64..=3), d),
                )
            })
            .prop_flat_map(|(ax, dx)| {
                let n: usize = ax.iter().map(|a| a.0 as usize).product();
                (
                    Just(ax),
                    Just(dx),
                    proptest::collection::vec(prop_oneof![3 => (-20i32..=20).prop_map(Some), 1 => Just(None)], n),
                )
            })
            .prop_filter_map("proper", |(ax, dx, vals)| {
                if vals.iter().all(Option::is_none) {
                    return None;
                }
                let g = LatticeGrid::new(
                    ax.iter().map(|a| rat(a.2, 2)).collect(),
                    ax.iter().map(|a| rat(1, a.1)).collect(),
                    vec![0; ax.len()],
                    ax.iter().map(|a| a.0 - 1).collect(),
                )
                .unwrap();
                let dual = LatticeGrid::new(
                    vec![int(0); dx.len()],
                    dx.iter().map(|a| rat(1, a.1)).collect(),
                    dx.iter().map(|a| -a.0).collect(),
                    dx.iter().map(|a| a.0).collect(),
                )
                .unwrap();
                let v = vals
                    .iter()
                    .map(|o| o.map_or(PosInf, |x| Finite(x as f64 / 7.0)))
                    .collect();
                Some((GridFn::new(g, v, "f").unwrap(), dual))
            })
    }

    proptest! {
        #[test]
        fn fast_matches_reference((f, dual) in arb_fn(3, 5)) {
            let a = conjugate_argmax(&f, &dual).unwrap();
            let b = conjugate_fast_argmax(&f, &dual).unwrap();
            for (x, y) in a.0.values().iter().zip(b.0.values()) {
                prop_assert_eq!(x.finite().map(f64::to_bits), y.finite().map(f64::to_bits));
            }
            prop_assert_eq!(a.1, b.1);
        }

        #[test]
        fn conjugate_reverses_order((f, dual) in arb_fn(2, 4), bump in 0u8..4) {
            let g = GridFn::new(
                f.grid().clone(),
                f.values().iter().enumerate().map(|(i, v)| if i % 3 == bump as usize % 3 { *v + 1.0 } else { *v }).collect(),
                "g",
            ).unwrap();
            let cf = conjugate(&f, &dual).unwrap();
            let cg = conjugate(&g, &dual).unwrap();
            for (a, b) in cg.values().iter().zip(cf.values()) {
                prop_assert!(a <= b);
            }
        }

        #[test]
        fn closure_laws((f, _dual) in arb_fn(2, 4)) {
            let dual = default_dual_grid(&f);
            let c = closure_with(&f, &dual).unwrap();
            for (a, b) in c.values().iter().zip(f.values()) {
                prop_assert!(a.finite().unwrap_or(f64::INFINITY) <= b.finite().unwrap_or(f64::INFINITY) + 1e-12);
            }
            let tol = 1e-12 * (f.max_abs() + 10.0);
            let dc = conjugate(&c, &dual).unwrap().max_abs_diff(&conjugate(&f, &dual).unwrap());
            prop_assert!(dc.is_some_and(|d| d <= tol));
            let cc = closure_with(&c, &dual).unwrap().max_abs_diff(&c);
            prop_assert!(cc.is_some_and(|d| d <= tol));
            let pair = DualPairing::new(c.grid().clone(), dual.clone()).unwrap();
            for i in c.finite_indices() {
                for j in 0..dual.len() {
                    let gap = pair.fy_gap(&c, &c.grid().point_rat(i), &dual.point_rat(j)).unwrap();
                    prop_assert!(gap.finite().unwrap() >= -1e-12);
                }
            }
        }
    }
}
