use std::fmt;

use num_traits::{One, Zero};

use super::grid::LatticeGrid;
use super::rat::{fmt_rat, int, Rat};
use crate::error::{Error, Result};

/// Dense rational matrix, row-major.
#[derive(Clone, PartialEq, Eq)]
pub struct RatLinMap {
    rows: usize,
    cols: usize,
    entries: Vec<Rat>,
}

impl fmt::Debug for RatLinMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for r in 0..self.rows {
            if r > 0 {
                write!(f, "; ")?;
            }
            let row: Vec<String> = self.row(r).iter().map(fmt_rat).collect();
            write!(f, "{}", row.join(" "))?;
        }
        write!(f, "]")
    }
}

impl RatLinMap {
    pub fn new(rows: usize, cols: usize, entries: Vec<Rat>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::DimensionMismatch("maps need positive dimensions".into()));
        }
        if entries.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!(
                "{rows}x{cols} map given {} entries",
                entries.len()
            )));
        }
        Ok(RatLinMap { rows, cols, entries })
    }

    pub fn from_rows(rows: Vec<Vec<Rat>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::DimensionMismatch("ragged matrix rows".into()));
        }
        Self::new(r, c, rows.concat())
    }

    pub fn identity(n: usize) -> Self {
        Self::scalar(n, Rat::one())
    }

    /// `r * I_n`.
    pub fn scalar(n: usize, r: Rat) -> Self {
        let mut e = vec![Rat::zero(); n * n];
        for i in 0..n {
            e[i * n + i] = r;
        }
        RatLinMap { rows: n, cols: n, entries: e }
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        RatLinMap {
            rows,
            cols,
            entries: vec![Rat::zero(); rows * cols],
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> Rat {
        self.entries[r * self.cols + c]
    }

    pub fn row(&self, r: usize) -> &[Rat] {
        &self.entries[r * self.cols..(r + 1) * self.cols]
    }

    pub fn column(&self, c: usize) -> Vec<Rat> {
        (0..self.rows).map(|r| self.get(r, c)).collect()
    }

    pub fn transpose(&self) -> RatLinMap {
        let mut e = Vec::with_capacity(self.entries.len());
        for c in 0..self.cols {
            for r in 0..self.rows {
                e.push(self.get(r, c));
            }
        }
        RatLinMap {
            rows: self.cols,
            cols: self.rows,
            entries: e,
        }
    }

    pub fn is_identity(&self) -> bool {
        *self == Self::identity(self.rows)
    }

    pub fn apply(&self, x: &[Rat]) -> Vec<Rat> {
        debug_assert_eq!(x.len(), self.cols);
        (0..self.rows)
            .map(|r| {
                self.row(r)
                    .iter()
                    .zip(x)
                    .fold(Rat::zero(), |acc, (a, b)| acc + a * b)
            })
            .collect()
    }

    /// `self * other`.
    pub fn compose(&self, other: &RatLinMap) -> Result<RatLinMap> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch(format!(
                "cannot compose {}x{} with {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut e = Vec::with_capacity(self.rows * other.cols);
        for r in 0..self.rows {
            for c in 0..other.cols {
                e.push((0..self.cols).fold(Rat::zero(), |acc, k| acc + self.get(r, k) * other.get(k, c)));
            }
        }
        RatLinMap::new(self.rows, other.cols, e)
    }

    /// Per-row range of `self * x` over the box `bounds`.
    pub fn image_bounds(&self, bounds: &[(Rat, Rat)]) -> Vec<(Rat, Rat)> {
        (0..self.rows)
            .map(|r| {
                self.row(r).iter().zip(bounds).fold(
                    (Rat::zero(), Rat::zero()),
                    |(lo, hi), (a, (bl, bh))| {
                        let (p, q) = (a * bl, a * bh);
                        (lo + p.min(q), hi + p.max(q))
                    },
                )
            })
            .collect()
    }

    /// `[self; other]`, stacking rows.
    pub fn vstack(&self, other: &RatLinMap) -> Result<RatLinMap> {
        if self.cols != other.cols {
            return Err(Error::DimensionMismatch("vstack needs equal column counts".into()));
        }
        RatLinMap::new(
            self.rows + other.rows,
            self.cols,
            [self.entries.as_slice(), other.entries.as_slice()].concat(),
        )
    }

    /// `[self, other]`, concatenating columns.
    pub fn hstack(&self, other: &RatLinMap) -> Result<RatLinMap> {
        if self.rows != other.rows {
            return Err(Error::DimensionMismatch("hstack needs equal row counts".into()));
        }
        let mut e = Vec::with_capacity(self.rows * (self.cols + other.cols));
        for r in 0..self.rows {
            e.extend_from_slice(self.row(r));
            e.extend_from_slice(other.row(r));
        }
        RatLinMap::new(self.rows, self.cols + other.cols, e)
    }
}

/// Integer affine map between lattice multi-indices induced by a rational map:
/// `dst_index = base + sum_i (k_i - lo_i) * cols[i]`.
#[derive(Clone, Debug)]
pub struct IndexMap {
    base: Vec<i64>,
    cols: Vec<Vec<i64>>,
    src: LatticeGrid,
}

impl IndexMap {
    /// Destination lattice index of a source flat position.
    pub fn image(&self, src_flat: usize) -> Vec<i64> {
        let off = self.src.offsets(src_flat);
        let mut out = self.base.clone();
        for (i, &o) in off.iter().enumerate() {
            if o != 0 {
                for (r, v) in out.iter_mut().enumerate() {
                    *v += o as i64 * self.cols[i][r];
                }
            }
        }
        out
    }

    /// Images of every source point, in source order.
    pub fn images(&self) -> Vec<Vec<i64>> {
        (0..self.src.len()).map(|i| self.image(i)).collect()
    }
}

fn check_dims(map: &RatLinMap, src: &LatticeGrid, dst: &LatticeGrid) -> Result<()> {
    if map.cols() != src.dim() || map.rows() != dst.dim() {
        return Err(Error::DimensionMismatch(format!(
            "map is {}x{}, grids have dims {} -> {}",
            map.rows(),
            map.cols(),
            src.dim(),
            dst.dim()
        )));
    }
    Ok(())
}

/// Whether `map` sends every point of `src` onto the infinite lattice of
/// `dst` (its extent is ignored). Exact rational arithmetic.
///
/// The source points are `corner + sum_i j_i step_i e_i`; the images all lie
/// on the lattice iff the corner does and, for every axis with at least two
/// points, `map(step_i e_i)` is a lattice translation.
pub fn grid_compatible(map: &RatLinMap, src: &LatticeGrid, dst: &LatticeGrid) -> Result<bool> {
    Ok(index_map(map, src, dst)?.is_some())
}

/// The integer index map behind [`grid_compatible`], when compatible.
pub fn index_map(map: &RatLinMap, src: &LatticeGrid, dst: &LatticeGrid) -> Result<Option<IndexMap>> {
    check_dims(map, src, dst)?;
    let corner: Vec<Rat> = (0..src.dim()).map(|i| src.axis_point(i, src.lo()[i])).collect();
    let Some(base) = dst.lattice_index_of(&map.apply(&corner)) else {
        return Ok(None);
    };
    let mut cols = Vec::with_capacity(src.dim());
    for i in 0..src.dim() {
        if src.axis_len(i) < 2 {
            cols.push(vec![0; dst.dim()]);
            continue;
        }
        let mut col = Vec::with_capacity(dst.dim());
        for r in 0..dst.dim() {
            let q = map.get(r, i) * src.step()[i] / dst.step()[r];
            if !q.is_integer() {
                return Ok(None);
            }
            col.push(q.to_integer());
        }
        cols.push(col);
    }
    Ok(Some(IndexMap {
        base,
        cols,
        src: src.clone(),
    }))
}

/// Like [`index_map`] but turns incompatibility into an error naming `name`.
pub fn require_index_map(
    name: &str,
    map: &RatLinMap,
    src: &LatticeGrid,
    dst: &LatticeGrid,
) -> Result<IndexMap> {
    index_map(map, src, dst)?.ok_or_else(|| Error::Incompatible {
        map: name.to_string(),
        detail: format!("image of {src:?} leaves the lattice of {dst:?}"),
    })
}

/// Brute-force compatibility check over every source point; used in tests to
/// cross-check [`grid_compatible`].
pub fn grid_compatible_enumerated(map: &RatLinMap, src: &LatticeGrid, dst: &LatticeGrid) -> Result<bool> {
    check_dims(map, src, dst)?;
    Ok((0..src.len()).all(|i| dst.lattice_index_of(&map.apply(&src.point_rat(i))).is_some()))
}

pub fn scalar_map(r: Rat) -> RatLinMap {
    RatLinMap::scalar(1, r)
}

pub fn int_map(rows: &[&[i64]]) -> RatLinMap {
    RatLinMap::from_rows(rows.iter().map(|r| r.iter().map(|&v| int(v)).collect()).collect())
        .expect("well-formed integer matrix")
}

#[cfg(test)]
mod tests {
    use super::super::rat::rat;
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn identity_is_compatible() {
        let g = LatticeGrid::integers(-2, 2).unwrap();
        assert!(grid_compatible(&RatLinMap::identity(1), &g, &g).unwrap());
    }

    #[test]
    fn integer_scaling_keeps_lattice() {
        let g = LatticeGrid::integers(-2, 2).unwrap();
        assert!(grid_compatible(&scalar_map(int(2)), &g, &g).unwrap());
    }

    #[test]
    fn half_scaling_leaves_integer_lattice() {
        let g = LatticeGrid::integers(-1, 1).unwrap();
        assert!(!grid_compatible(&scalar_map(rat(1, 2)), &g, &g).unwrap());
    }

    #[test]
    fn dimension_mismatch_is_an_error() {
        let g = LatticeGrid::integers(-1, 1).unwrap();
        assert!(grid_compatible(&RatLinMap::identity(2), &g, &g).is_err());
    }

    #[test]
    fn single_point_axes_ignore_step_ratio() {
        let src = LatticeGrid::point(&[int(2)]).unwrap();
        let dst = LatticeGrid::integers(0, 0).unwrap();
        assert!(grid_compatible(&scalar_map(rat(1, 2)), &src, &dst).unwrap());
    }

    #[test]
    fn transpose_is_involution() {
        let m = int_map(&[&[1, 2, 3], &[4, 5, 6]]);
        assert_eq!(m.transpose().rows(), 3);
        assert_eq!(m.transpose().transpose(), m);
    }

    #[test]
    fn index_map_matches_direct_location() {
        let src = LatticeGrid::new(vec![int(1), int(0)], vec![int(1), rat(1, 2)], vec![-1, 0], vec![1, 2]).unwrap();
        let dst = LatticeGrid::new(vec![rat(1, 2)], vec![rat(1, 2)], vec![0], vec![0]).unwrap();
        let m = int_map(&[&[1, 1]]);
        let im = index_map(&m, &src, &dst).unwrap().unwrap();
        for i in 0..src.len() {
            let p = m.apply(&src.point_rat(i));
            assert_eq!(dst.lattice_index_of(&p).unwrap(), im.image(i));
        }
    }

    fn small_rat() -> impl Strategy<Value = Rat> {
        (-4i64..=4, 1i64..=3).prop_map(|(n, d)| rat(n, d))
    }

    proptest! {
        #[test]
        fn compatibility_matches_enumeration(
            entries in proptest::collection::vec(small_rat(), 4),
            o in proptest::collection::vec(small_rat(), 2),
            s in proptest::collection::vec((1i64..=3, 1i64..=3), 2),
            ds in proptest::collection::vec((1i64..=3, 1i64..=2), 2),
            dor in proptest::collection::vec(small_rat(), 2),
            ext in proptest::collection::vec(0i64..=2, 2),
        ) {
            let m = RatLinMap::new(2, 2, entries).unwrap();
            let src = LatticeGrid::new(o, s.iter().map(|&(n, d)| rat(n, d)).collect(), vec![0, 0], ext).unwrap();
            let dst = LatticeGrid::new(dor, ds.iter().map(|&(n, d)| rat(n, d)).collect(), vec![0, 0], vec![0, 0]).unwrap();
            prop_assert_eq!(
                grid_compatible(&m, &src, &dst).unwrap(),
                grid_compatible_enumerated(&m, &src, &dst).unwrap()
            );
        }
    }
}
