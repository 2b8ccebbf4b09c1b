use std::fmt;

use num_traits::{One, Zero};

use super::ext::{ExtReal, Finite, PosInf};
use super::rat::{fmt_point, int, to_f64, Rat};
use crate::error::{Error, Result};

/// Rectangular lattice grid: points `origin + step * k` for integer
/// multi-indices `k` with `lo[i] <= k[i] <= hi[i]`.
///
/// Points are enumerated in row-major order: the last axis varies fastest, so
/// flat order coincides with lexicographic order of the multi-indices.
#[derive(Clone, PartialEq)]
pub struct LatticeGrid {
    origin: Vec<Rat>,
    step: Vec<Rat>,
    lo: Vec<i64>,
    hi: Vec<i64>,
    coords: Vec<Vec<f64>>,
    strides: Vec<usize>,
    len: usize,
}

impl fmt::Debug for LatticeGrid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "LatticeGrid[")?;
        for i in 0..self.dim() {
            if i > 0 {
                write!(f, " x ")?;
            }
            write!(
                f,
                "{}+{}*{{{}..{}}}",
                self.origin[i], self.step[i], self.lo[i], self.hi[i]
            )?;
        }
        write!(f, "]")
    }
}

impl LatticeGrid {
    pub fn new(origin: Vec<Rat>, step: Vec<Rat>, lo: Vec<i64>, hi: Vec<i64>) -> Result<Self> {
        let d = origin.len();
        if d == 0 {
            return Err(Error::InvalidGrid("dimension must be positive".into()));
        }
        if step.len() != d || lo.len() != d || hi.len() != d {
            return Err(Error::InvalidGrid(format!(
                "axis data lengths differ: origin {d}, step {}, lo {}, hi {}",
                step.len(),
                lo.len(),
                hi.len()
            )));
        }
        for i in 0..d {
            if step[i] <= Rat::zero() {
                return Err(Error::InvalidGrid(format!("step on axis {i} must be positive")));
            }
            if lo[i] > hi[i] {
                return Err(Error::InvalidGrid(format!("empty extent on axis {i}")));
            }
        }
        let shape: Vec<usize> = (0..d).map(|i| (hi[i] - lo[i] + 1) as usize).collect();
        let mut strides = vec![1usize; d];
        for i in (0..d.saturating_sub(1)).rev() {
            strides[i] = strides[i + 1]
                .checked_mul(shape[i + 1])
                .ok_or_else(|| Error::InvalidGrid("grid too large".into()))?;
        }
        let len = strides[0]
            .checked_mul(shape[0])
            .ok_or_else(|| Error::InvalidGrid("grid too large".into()))?;
        let coords = (0..d)
            .map(|i| {
                (lo[i]..=hi[i])
                    .map(|k| to_f64(&(origin[i] + step[i] * int(k))))
                    .collect()
            })
            .collect();
        Ok(LatticeGrid {
            origin,
            step,
            lo,
            hi,
            coords,
            strides,
            len,
        })
    }

    /// One-dimensional integer grid `{lo, ..., hi}`.
    pub fn integers(lo: i64, hi: i64) -> Result<Self> {
        Self::new(vec![Rat::zero()], vec![Rat::one()], vec![lo], vec![hi])
    }

    /// `dim`-dimensional grid with origin 0, common `step` and indices `lo..=hi`.
    pub fn cube(dim: usize, lo: i64, hi: i64, step: Rat) -> Result<Self> {
        Self::new(vec![Rat::zero(); dim], vec![step; dim], vec![lo; dim], vec![hi; dim])
    }

    /// Single point `p` (unit step).
    pub fn point(p: &[Rat]) -> Result<Self> {
        Self::new(p.to_vec(), vec![Rat::one(); p.len()], vec![0; p.len()], vec![0; p.len()])
    }

    pub fn dim(&self) -> usize {
        self.origin.len()
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn origin(&self) -> &[Rat] {
        &self.origin
    }

    pub fn step(&self) -> &[Rat] {
        &self.step
    }

    pub fn lo(&self) -> &[i64] {
        &self.lo
    }

    pub fn hi(&self) -> &[i64] {
        &self.hi
    }

    pub fn shape(&self) -> Vec<usize> {
        (0..self.dim()).map(|i| self.axis_len(i)).collect()
    }

    pub fn axis_len(&self, axis: usize) -> usize {
        (self.hi[axis] - self.lo[axis] + 1) as usize
    }

    /// Ascending f64 coordinates of one axis.
    pub fn axis_coords(&self, axis: usize) -> &[f64] {
        &self.coords[axis]
    }

    pub fn axis_point(&self, axis: usize, k: i64) -> Rat {
        self.origin[axis] + self.step[axis] * int(k)
    }

    pub fn max_step(&self) -> f64 {
        self.step.iter().map(to_f64).fold(0.0, f64::max)
    }

    /// Lattice multi-index (not offset by `lo`) of a flat position.
    pub fn multi_index(&self, flat: usize) -> Vec<i64> {
        let mut rest = flat;
        (0..self.dim())
            .map(|i| {
                let q = rest / self.strides[i];
                rest %= self.strides[i];
                self.lo[i] + q as i64
            })
            .collect()
    }

    /// Offsets `k - lo` of a flat position.
    pub fn offsets(&self, flat: usize) -> Vec<usize> {
        let mut rest = flat;
        (0..self.dim())
            .map(|i| {
                let q = rest / self.strides[i];
                rest %= self.strides[i];
                q
            })
            .collect()
    }

    pub fn flat_of_offsets(&self, off: &[usize]) -> usize {
        off.iter().zip(&self.strides).map(|(o, s)| o * s).sum()
    }

    /// Flat position of a lattice multi-index, `None` when outside the extent.
    pub fn flat_of(&self, k: &[i64]) -> Option<usize> {
        let mut flat = 0usize;
        for i in 0..self.dim() {
            if k[i] < self.lo[i] || k[i] > self.hi[i] {
                return None;
            }
            flat += (k[i] - self.lo[i]) as usize * self.strides[i];
        }
        Some(flat)
    }

    pub fn point_rat(&self, flat: usize) -> Vec<Rat> {
        self.multi_index(flat)
            .iter()
            .enumerate()
            .map(|(i, &k)| self.axis_point(i, k))
            .collect()
    }

    pub fn point_f64(&self, flat: usize) -> Vec<f64> {
        self.offsets(flat)
            .iter()
            .enumerate()
            .map(|(i, &o)| self.coords[i][o])
            .collect()
    }

    /// Multi-index of `p` on the infinite lattice, if `p` lies on it.
    pub fn lattice_index_of(&self, p: &[Rat]) -> Option<Vec<i64>> {
        if p.len() != self.dim() {
            return None;
        }
        let mut k = Vec::with_capacity(p.len());
        for i in 0..self.dim() {
            let q = (p[i] - self.origin[i]) / self.step[i];
            if !q.is_integer() {
                return None;
            }
            k.push(q.to_integer());
        }
        Some(k)
    }

    /// Flat position of `p`, `None` when off-lattice or outside the extent.
    pub fn locate(&self, p: &[Rat]) -> Option<usize> {
        self.flat_of(&self.lattice_index_of(p)?)
    }

    pub fn locate_or_err(&self, p: &[Rat]) -> Result<usize> {
        self.locate(p).ok_or_else(|| Error::OffGrid(fmt_point(p)))
    }

    /// Cartesian product; axes of `self` come first.
    pub fn product(&self, other: &LatticeGrid) -> LatticeGrid {
        let cat = |a: &[Rat], b: &[Rat]| [a, b].concat();
        let cati = |a: &[i64], b: &[i64]| [a, b].concat();
        LatticeGrid::new(
            cat(&self.origin, &other.origin),
            cat(&self.step, &other.step),
            cati(&self.lo, &other.lo),
            cati(&self.hi, &other.hi),
        )
        .expect("product of valid grids is valid")
    }

    /// Grid formed by axes `from..to`.
    pub fn axes(&self, from: usize, to: usize) -> Result<LatticeGrid> {
        if from >= to || to > self.dim() {
            return Err(Error::DimensionMismatch(format!(
                "axis block {from}..{to} invalid for a {}-dimensional grid",
                self.dim()
            )));
        }
        LatticeGrid::new(
            self.origin[from..to].to_vec(),
            self.step[from..to].to_vec(),
            self.lo[from..to].to_vec(),
            self.hi[from..to].to_vec(),
        )
    }

    /// Splits into the blocks `0..at` and `at..dim`.
    pub fn split(&self, at: usize) -> Result<(LatticeGrid, LatticeGrid)> {
        Ok((self.axes(0, at)?, self.axes(at, self.dim())?))
    }

    /// The translation lattice `step * Z^d` (origin moved to zero).
    pub fn difference_lattice(&self) -> LatticeGrid {
        LatticeGrid::new(
            vec![Rat::zero(); self.dim()],
            self.step.clone(),
            vec![0; self.dim()],
            vec![0; self.dim()],
        )
        .expect("valid")
    }

    /// Same lattice, extent enlarged so that each axis covers `[lo_v, hi_v]`.
    pub fn widened_to(&self, bounds: &[(f64, f64)]) -> LatticeGrid {
        let mut lo = self.lo.clone();
        let mut hi = self.hi.clone();
        for (i, &(a, b)) in bounds.iter().enumerate() {
            let o = to_f64(&self.origin[i]);
            let h = to_f64(&self.step[i]);
            let ka = ((a - o) / h).floor() as i64;
            let kb = ((b - o) / h).ceil() as i64;
            lo[i] = lo[i].min(ka);
            hi[i] = hi[i].max(kb);
        }
        LatticeGrid::new(self.origin.clone(), self.step.clone(), lo, hi).expect("valid")
    }

    /// Exact version of [`widened_to`](Self::widened_to).
    pub fn widened_to_rat(&self, bounds: &[(Rat, Rat)]) -> LatticeGrid {
        let mut lo = self.lo.clone();
        let mut hi = self.hi.clone();
        for (i, (a, b)) in bounds.iter().enumerate() {
            let ka = ((a - self.origin[i]) / self.step[i]).floor().to_integer();
            let kb = ((b - self.origin[i]) / self.step[i]).ceil().to_integer();
            lo[i] = lo[i].min(ka);
            hi[i] = hi[i].max(kb);
        }
        LatticeGrid::new(self.origin.clone(), self.step.clone(), lo, hi).expect("valid")
    }

    /// Per-axis `(first, last)` point, exact.
    pub fn bounds_rat(&self) -> Vec<(Rat, Rat)> {
        (0..self.dim())
            .map(|i| (self.axis_point(i, self.lo[i]), self.axis_point(i, self.hi[i])))
            .collect()
    }

    /// Whether both grids describe the same infinite lattice.
    pub fn same_lattice(&self, other: &LatticeGrid) -> bool {
        self.dim() == other.dim()
            && self.step == other.step
            && self
                .origin
                .iter()
                .zip(&other.origin)
                .zip(&self.step)
                .all(|((a, b), h)| ((a - b) / h).is_integer())
    }
}

/// Extended-real function sampled on a [`LatticeGrid`], extended by `+inf`
/// off the grid.
#[derive(Clone, Debug, PartialEq)]
pub struct GridFn {
    grid: LatticeGrid,
    values: Vec<ExtReal>,
    label: String,
}

impl GridFn {
    pub fn new(grid: LatticeGrid, values: Vec<ExtReal>, label: impl Into<String>) -> Result<Self> {
        let label = label.into();
        if values.len() != grid.len() {
            return Err(Error::DimensionMismatch(format!(
                "`{label}` has {} values for {} grid points",
                values.len(),
                grid.len()
            )));
        }
        for (i, v) in values.iter().enumerate() {
            if let Finite(x) = v {
                if !x.is_finite() {
                    return Err(Error::NonFiniteSample { label, index: i });
                }
            }
        }
        if !values.iter().any(|v| v.is_finite()) {
            return Err(Error::Improper(label));
        }
        Ok(GridFn { grid, values, label })
    }

    pub fn from_fn(
        grid: LatticeGrid,
        label: impl Into<String>,
        mut f: impl FnMut(&[f64]) -> ExtReal,
    ) -> Result<Self> {
        let values = (0..grid.len()).map(|i| f(&grid.point_f64(i))).collect();
        Self::new(grid, values, label)
    }

    pub fn from_fn_rat(
        grid: LatticeGrid,
        label: impl Into<String>,
        mut f: impl FnMut(&[Rat]) -> ExtReal,
    ) -> Result<Self> {
        let values = (0..grid.len()).map(|i| f(&grid.point_rat(i))).collect();
        Self::new(grid, values, label)
    }

    /// Indicator of a set of grid points (0 on the set, `+inf` elsewhere).
    pub fn indicator(grid: LatticeGrid, points: &[Vec<Rat>], label: impl Into<String>) -> Result<Self> {
        let mut values = vec![PosInf; grid.len()];
        for p in points {
            values[grid.locate_or_err(p)?] = Finite(0.0);
        }
        Self::new(grid, values, label)
    }

    pub fn grid(&self) -> &LatticeGrid {
        &self.grid
    }

    pub fn values(&self) -> &[ExtReal] {
        &self.values
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn value(&self, flat: usize) -> ExtReal {
        self.values[flat]
    }

    /// Value at a lattice multi-index; `+inf` outside the extent.
    pub fn value_at_index(&self, k: &[i64]) -> ExtReal {
        self.grid.flat_of(k).map_or(PosInf, |i| self.values[i])
    }

    /// Value at a point; `+inf` off the lattice or outside the extent.
    pub fn value_at(&self, p: &[Rat]) -> ExtReal {
        self.grid.locate(p).map_or(PosInf, |i| self.values[i])
    }

    pub fn finite_indices(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.values.len()).filter(|&i| self.values[i].is_finite())
    }

    /// Largest magnitude among finite values.
    pub fn max_abs(&self) -> f64 {
        self.values
            .iter()
            .filter_map(|v| v.finite())
            .fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Reorders axes so that block `at..dim` comes first.
    pub fn swap_blocks(&self, at: usize) -> Result<GridFn> {
        let (a, b) = self.grid.split(at)?;
        let grid = b.product(&a);
        let db = b.dim();
        let values = (0..grid.len())
            .map(|i| {
                let k = grid.multi_index(i);
                let mut orig = k[db..].to_vec();
                orig.extend_from_slice(&k[..db]);
                self.value_at_index(&orig)
            })
            .collect();
        GridFn::new(grid, values, self.label.clone())
    }

    /// Pointwise comparison on a shared grid: `max |self - other|` over
    /// common finite points, or `None` if the `+inf` patterns differ.
    pub fn max_abs_diff(&self, other: &GridFn) -> Option<f64> {
        if self.grid != other.grid {
            return None;
        }
        let mut worst = 0.0f64;
        for (a, b) in self.values.iter().zip(&other.values) {
            match (a, b) {
                (Finite(x), Finite(y)) => worst = worst.max((x - y).abs()),
                (PosInf, PosInf) => {}
                _ => return None,
            }
        }
        Some(worst)
    }
}
