//! Small dense exact linear algebra: phase-1 simplex feasibility with Farkas
//! certificates, plus Gaussian elimination helpers for spans.

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::numcore::rat::{from_big, to_big, Rat};

/// Outcome of `find λ >= 0 with M λ = b`.
#[derive(Clone, Debug, PartialEq)]
pub enum Feasibility {
    /// A nonnegative solution.
    Feasible(Vec<BigRational>),
    /// `y` with `yᵀM >= 0` componentwise and `yᵀb < 0`.
    Infeasible(Vec<BigRational>),
}

impl Feasibility {
    pub fn is_feasible(&self) -> bool {
        matches!(self, Feasibility::Feasible(_))
    }
}

/// Solves `M λ = b, λ >= 0` exactly. `columns[j]` is column `j` of `M`
/// (each of length `b.len()`).
///
/// Phase-1 simplex on the tableau `[M | I | b]` with artificial variables,
/// Bland's rule for anti-cycling. On infeasibility the dual prices of the
/// final basis give the Farkas certificate.
pub fn nonneg_solve(columns: &[Vec<BigRational>], b: &[BigRational]) -> Feasibility {
    let m = b.len();
    let n = columns.len();
    debug_assert!(columns.iter().all(|c| c.len() == m));
    if m == 0 {
        return Feasibility::Feasible(vec![BigRational::zero(); n]);
    }
    // Rows flipped so the right-hand side is nonnegative.
    let flip: Vec<bool> = b.iter().map(|v| v.is_negative()).collect();
    let width = n + m + 1;
    let mut t: Vec<Vec<BigRational>> = (0..m)
        .map(|r| {
            let s = if flip[r] { -BigRational::one() } else { BigRational::one() };
            let mut row = Vec::with_capacity(width);
            for col in columns {
                row.push(&col[r] * &s);
            }
            for a in 0..m {
                row.push(if a == r { BigRational::one() } else { BigRational::zero() });
            }
            row.push(&b[r] * &s);
            row
        })
        .collect();
    let mut basis: Vec<usize> = (n..n + m).collect();
    // Reduced costs for cost vector (0 on originals, 1 on artificials).
    let mut cost = vec![BigRational::zero(); width];
    for row in &t {
        for j in 0..n {
            cost[j] -= &row[j];
        }
        cost[width - 1] -= &row[width - 1];
    }

    loop {
        let Some(enter) = (0..n + m).find(|&j| cost[j].is_negative()) else {
            break;
        };
        let mut leave: Option<(usize, BigRational)> = None;
        for r in 0..m {
            if t[r][enter].is_positive() {
                let ratio = &t[r][width - 1] / &t[r][enter];
                let better = match &leave {
                    None => true,
                    Some((lr, best)) => ratio < *best || (ratio == *best && basis[r] < basis[*lr]),
                };
                if better {
                    leave = Some((r, ratio));
                }
            }
        }
        let Some((pr, _)) = leave else {
            // Unbounded direction cannot occur: the phase-1 objective is bounded below.
            unreachable!("phase-1 objective is bounded");
        };
        pivot(&mut t, &mut cost, pr, enter);
        basis[pr] = enter;
    }

    // Objective value is -cost[rhs].
    if cost[width - 1].is_zero() {
        let mut x = vec![BigRational::zero(); n];
        for (r, &bv) in basis.iter().enumerate() {
            if bv < n {
                x[bv] = t[r][width - 1].clone();
            }
        }
        Feasibility::Feasible(x)
    } else {
        // Reduced cost of artificial a_i is 1 - y_i for dual prices y of the
        // flipped system; undo the flip to get prices of the original rows.
        let y = (0..m)
            .map(|i| {
                let yi = BigRational::one() - &cost[n + i];
                // Prices of the flipped system satisfy yᵀM' <= 0 and yᵀb' > 0;
                // negate for the stated convention.
                if flip[i] {
                    yi
                } else {
                    -yi
                }
            })
            .collect();
        Feasibility::Infeasible(y)
    }
}

fn pivot(t: &mut [Vec<BigRational>], cost: &mut [BigRational], pr: usize, pc: usize) {
    let p = t[pr][pc].clone();
    for v in t[pr].iter_mut() {
        *v /= &p;
    }
    let prow = t[pr].clone();
    for (r, row) in t.iter_mut().enumerate() {
        if r == pr || row[pc].is_zero() {
            continue;
        }
        let f = row[pc].clone();
        for (v, pv) in row.iter_mut().zip(&prow) {
            if !pv.is_zero() {
                *v -= &f * pv;
            }
        }
    }
    if !cost[pc].is_zero() {
        let f = cost[pc].clone();
        for (v, pv) in cost.iter_mut().zip(&prow) {
            if !pv.is_zero() {
                *v -= &f * pv;
            }
        }
    }
}

pub fn big_vec(v: &[Rat]) -> Vec<BigRational> {
    v.iter().map(to_big).collect()
}

pub fn big_dot(a: &[BigRational], b: &[BigRational]) -> BigRational {
    a.iter().zip(b).fold(BigRational::zero(), |acc, (x, y)| acc + x * y)
}

/// Checks a [`Feasibility`] answer by direct substitution.
pub fn verify(columns: &[Vec<BigRational>], b: &[BigRational], ans: &Feasibility) -> bool {
    match ans {
        Feasibility::Feasible(x) => {
            x.len() == columns.len()
                && x.iter().all(|v| !v.is_negative())
                && (0..b.len()).all(|r| {
                    columns
                        .iter()
                        .zip(x)
                        .fold(BigRational::zero(), |acc, (c, xv)| acc + &c[r] * xv)
                        == b[r]
                })
        }
        Feasibility::Infeasible(y) => {
            y.len() == b.len()
                && columns.iter().all(|c| !big_dot(y, c).is_negative())
                && big_dot(y, b).is_negative()
        }
    }
}

/// Whether `x` is a convex combination of `points`; exact.
pub fn in_convex_hull(points: &[Vec<Rat>], x: &[Rat]) -> bool {
    if points.is_empty() {
        return false;
    }
    if points.len() == 1 {
        return points[0] == x;
    }
    let cols: Vec<Vec<BigRational>> = points
        .iter()
        .map(|p| {
            let mut c = big_vec(p);
            c.push(BigRational::one());
            c
        })
        .collect();
    let mut rhs = big_vec(x);
    rhs.push(BigRational::one());
    nonneg_solve(&cols, &rhs).is_feasible()
}

/// Row-reduced basis (echelon rows) of the span of `vectors`.
pub fn span_basis(vectors: &[Vec<BigRational>], dim: usize) -> Vec<Vec<BigRational>> {
    let mut rows: Vec<Vec<BigRational>> = vectors.iter().filter(|v| v.iter().any(|x| !x.is_zero())).cloned().collect();
    let mut basis = Vec::new();
    let mut col = 0;
    while col < dim && !rows.is_empty() {
        if let Some(p) = rows.iter().position(|r| !r[col].is_zero()) {
            let mut pr = rows.swap_remove(p);
            let lead = pr[col].clone();
            for v in pr.iter_mut() {
                *v /= &lead;
            }
            for r in rows.iter_mut() {
                if !r[col].is_zero() {
                    let f = r[col].clone();
                    for (v, pv) in r.iter_mut().zip(&pr) {
                        *v -= &f * pv;
                    }
                }
            }
            rows.retain(|r| r.iter().any(|x| !x.is_zero()));
            basis.push(pr);
        }
        col += 1;
    }
    basis
}

pub fn rank(vectors: &[Vec<BigRational>], dim: usize) -> usize {
    span_basis(vectors, dim).len()
}

/// Whether `x` lies in the span of `vectors`.
pub fn in_span(vectors: &[Vec<BigRational>], x: &[BigRational]) -> bool {
    let dim = x.len();
    let r = rank(vectors, dim);
    let mut ext = vectors.to_vec();
    ext.push(x.to_vec());
    rank(&ext, dim) == r
}

/// Narrows a big-rational vector, when every entry fits `i64` parts.
pub fn small_vec(v: &[BigRational]) -> Option<Vec<Rat>> {
    v.iter().map(from_big).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numcore::rat::{int, rat};
    use proptest::prelude::*;

    fn cols(v: &[&[i64]]) -> Vec<Vec<BigRational>> {
        v.iter().map(|c| c.iter().map(|&x| to_big(&int(x))).collect()).collect()
    }

    #[test]
    fn feasible_combination() {
        let c = cols(&[&[1, 0], &[0, 1]]);
        let b = big_vec(&[int(2), int(3)]);
        let ans = nonneg_solve(&c, &b);
        assert!(ans.is_feasible());
        assert!(verify(&c, &b, &ans));
    }

    #[test]
    fn infeasible_gives_certificate() {
        let c = cols(&[&[1, 0]]);
        let b = big_vec(&[int(-1), int(0)]);
        let ans = nonneg_solve(&c, &b);
        assert!(!ans.is_feasible());
        assert!(verify(&c, &b, &ans));
    }

    #[test]
    fn hull_membership() {
        let pts = vec![vec![int(0), int(0)], vec![int(2), int(0)], vec![int(0), int(2)]];
        assert!(in_convex_hull(&pts, &[int(1), int(1)]));
        assert!(in_convex_hull(&pts, &[rat(1, 2), rat(1, 3)]));
        assert!(!in_convex_hull(&pts, &[int(2), int(1)]));
    }

    #[test]
    fn span_rank() {
        let v = cols(&[&[1, 2, 3], &[2, 4, 6], &[0, 1, 0]]);
        assert_eq!(rank(&v, 3), 2);
        assert!(in_span(&v, &big_vec(&[int(1), int(3), int(3)])));
        assert!(!in_span(&v, &big_vec(&[int(0), int(0), int(1)])));
    }

    proptest! {
        #[test]
        fn answers_always_verify(
            raw in proptest::collection::vec(proptest::collection::vec(-3i64..=3, 3), 1..5),
            b in proptest::collection::vec(-3i64..=3, 3),
        ) {
            let c: Vec<Vec<BigRational>> = raw.iter().map(|v| v.iter().map(|&x| to_big(&int(x))).collect()).collect();
            let bb: Vec<BigRational> = b.iter().map(|&x| to_big(&int(x))).collect();
            let ans = nonneg_solve(&c, &bb);
            prop_assert!(verify(&c, &bb, &ans));
        }
    }
}
