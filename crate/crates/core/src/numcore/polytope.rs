use num_traits::Zero;

use super::rat::{dot, int, to_f64, Rat};
use crate::error::{Error, Result};
use crate::lp::in_convex_hull;

/// Convex hull of a finite nonempty vertex list.
#[derive(Clone, Debug, PartialEq)]
pub struct Polytope {
    dim: usize,
    vertices: Vec<Vec<Rat>>,
}

impl Polytope {
    pub fn new(vertices: Vec<Vec<Rat>>) -> Result<Self> {
        let Some(first) = vertices.first() else {
            return Err(Error::Empty("polytope needs at least one vertex".into()));
        };
        let dim = first.len();
        if dim == 0 {
            return Err(Error::DimensionMismatch("polytope vertices need positive dimension".into()));
        }
        if vertices.iter().any(|v| v.len() != dim) {
            return Err(Error::DimensionMismatch("polytope vertices differ in dimension".into()));
        }
        Ok(Polytope { dim, vertices })
    }

    pub fn point(p: Vec<Rat>) -> Result<Self> {
        Self::new(vec![p])
    }

    /// The segment `[a, b]` in one dimension.
    pub fn interval(a: Rat, b: Rat) -> Self {
        Polytope {
            dim: 1,
            vertices: vec![vec![a.min(b)], vec![a.max(b)]],
        }
    }

    /// Axis-aligned box with the given corners.
    pub fn boxed(lo: &[Rat], hi: &[Rat]) -> Result<Self> {
        if lo.len() != hi.len() {
            return Err(Error::DimensionMismatch("box corners differ in dimension".into()));
        }
        let d = lo.len();
        let mut vertices = Vec::with_capacity(1 << d);
        for mask in 0..(1usize << d) {
            vertices.push(
                (0..d)
                    .map(|i| if mask >> (d - 1 - i) & 1 == 1 { hi[i] } else { lo[i] })
                    .collect(),
            );
        }
        vertices.dedup();
        Self::new(vertices)
    }

    /// The centred symmetric interval `[-r, r]`.
    pub fn symmetric(r: Rat) -> Self {
        Self::interval(-r, r)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn vertices(&self) -> &[Vec<Rat>] {
        &self.vertices
    }

    /// `sup <K, s>` in floating point, the maximum over vertices.
    pub fn support(&self, s: &[f64]) -> f64 {
        self.vertices
            .iter()
            .map(|v| v.iter().zip(s).fold(0.0, |acc, (a, b)| acc + to_f64(a) * b))
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// `sup <K, s>`, exact.
    pub fn support_rat(&self, s: &[Rat]) -> Rat {
        self.vertices.iter().map(|v| dot(v, s)).max().expect("nonempty")
    }

    /// `min <K, s>`, exact.
    pub fn min_pairing(&self, s: &[Rat]) -> Rat {
        self.vertices.iter().map(|v| dot(v, s)).min().expect("nonempty")
    }

    /// Exact membership via convex-combination feasibility over the vertices.
    pub fn contains(&self, x: &[Rat]) -> bool {
        if x.len() != self.dim {
            return false;
        }
        if self.dim == 1 {
            let lo = self.vertices.iter().map(|v| v[0]).min().expect("nonempty");
            let hi = self.vertices.iter().map(|v| v[0]).max().expect("nonempty");
            return lo <= x[0] && x[0] <= hi;
        }
        in_convex_hull(&self.vertices, x)
    }

    /// `-K`.
    pub fn negated(&self) -> Polytope {
        Polytope {
            dim: self.dim,
            vertices: self.vertices.iter().map(|v| v.iter().map(|x| -x).collect()).collect(),
        }
    }

    /// `K + t`.
    pub fn translated(&self, t: &[Rat]) -> Polytope {
        Polytope {
            dim: self.dim,
            vertices: self
                .vertices
                .iter()
                .map(|v| v.iter().zip(t).map(|(a, b)| a + b).collect())
                .collect(),
        }
    }

    pub fn is_origin(&self) -> bool {
        self.vertices.iter().all(|v| v.iter().all(Zero::is_zero))
    }

    /// Per-axis bounding box `(min, max)`.
    pub fn bounds(&self) -> Vec<(Rat, Rat)> {
        (0..self.dim)
            .map(|i| {
                let it = self.vertices.iter().map(|v| v[i]);
                (it.clone().min().expect("nonempty"), it.max().expect("nonempty"))
            })
            .collect()
    }
}

/// `[-1, 1]^d`.
pub fn unit_box(d: usize) -> Polytope {
    Polytope::boxed(&vec![int(-1); d], &vec![int(1); d]).expect("valid")
}

#[cfg(test)]
mod tests {
    use super::super::rat::rat;
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn interval_support() {
        let k = Polytope::interval(int(-1), int(1));
        assert_eq!(k.support(&[2.0]), 2.0);
        assert_eq!(k.support(&[-3.0]), 3.0);
        assert_eq!(k.support_rat(&[rat(1, 2)]), rat(1, 2));
        assert_eq!(k.min_pairing(&[int(2)]), int(-2));
    }

    #[test]
    fn box_membership() {
        let b = unit_box(2);
        assert_eq!(b.vertices().len(), 4);
        assert!(b.contains(&[rat(1, 2), int(-1)]));
        assert!(!b.contains(&[rat(3, 2), int(0)]));
    }

    #[test]
    fn triangle_membership() {
        let t = Polytope::new(vec![vec![int(0), int(0)], vec![int(1), int(0)], vec![int(0), int(1)]]).unwrap();
        assert!(t.contains(&[rat(1, 2), rat(1, 2)]));
        assert!(!t.contains(&[rat(2, 3), rat(2, 3)]));
    }

    #[test]
    fn empty_is_rejected() {
        assert!(Polytope::new(vec![]).is_err());
    }

    proptest! {
        #[test]
        fn duplicate_vertex_keeps_support(
            verts in proptest::collection::vec(proptest::collection::vec(-5i64..=5, 2), 1..5),
            dup in 0usize..5,
            s in proptest::collection::vec(-5i64..=5, 2),
        ) {
            let vs: Vec<Vec<Rat>> = verts.iter().map(|v| v.iter().map(|&x| int(x)).collect()).collect();
            let k = Polytope::new(vs.clone()).unwrap();
            let mut vs2 = vs.clone();
            vs2.push(vs[dup % vs.len()].clone());
            let k2 = Polytope::new(vs2).unwrap();
            let sr: Vec<Rat> = s.iter().map(|&x| int(x)).collect();
            let sf: Vec<f64> = s.iter().map(|&x| x as f64).collect();
            prop_assert_eq!(k.support_rat(&sr), k2.support_rat(&sr));
            prop_assert_eq!(k.support(&sf), k2.support(&sf));
        }
    }
}
