//! Exact dense linear algebra over the rationals.
//!
//! Gaussian elimination with exact pivots: rank, determinant, square solves
//! and the interpolation-degree test used to check that a function on a finite
//! point set is a polynomial of bounded degree.

use alloc::vec::Vec;
use num_traits::{One, Zero};

use crate::orth::{monomials_up_to, Monomial};
use crate::rational::Q;

/// Row-major dense rational matrix.
pub type Matrix = Vec<Vec<Q>>;

/// Reduces `m` to row echelon form in place and returns the pivot columns.
fn echelon(m: &mut Matrix) -> Vec<usize> {
    let rows = m.len();
    let cols = if rows == 0 { 0 } else { m[0].len() };
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !m[i][c].is_zero()) else { continue };
        m.swap(r, p);
        let inv = m[r][c].recip();
        for j in c..cols {
            let v = &m[r][j] * &inv;
            m[r][j] = v;
        }
        for i in 0..rows {
            if i != r && !m[i][c].is_zero() {
                let factor = m[i][c].clone();
                for j in c..cols {
                    let v = &m[r][j] * &factor;
                    m[i][j] -= v;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

/// Rank of a rational matrix.
pub fn rank(m: &Matrix) -> usize {
    let mut a = m.clone();
    echelon(&mut a).len()
}

/// Determinant of a square matrix.
pub fn det(m: &Matrix) -> Q {
    let n = m.len();
    let mut a = m.clone();
    let mut d = Q::one();
    for c in 0..n {
        let Some(p) = (c..n).find(|&i| !a[i][c].is_zero()) else { return Q::zero() };
        if p != c {
            a.swap(p, c);
            d = -d;
        }
        d *= &a[c][c];
        let inv = a[c][c].recip();
        for i in c + 1..n {
            if !a[i][c].is_zero() {
                let f = &a[i][c] * &inv;
                for j in c..n {
                    let v = &a[c][j] * &f;
                    a[i][j] -= v;
                }
            }
        }
    }
    d
}

/// Solves `A x = b` for square non-singular `A`; `None` if singular.
pub fn solve(a: &Matrix, b: &[Q]) -> Option<Vec<Q>> {
    let n = a.len();
    let mut aug: Matrix = a.iter().zip(b).map(|(row, bi)| {
        let mut r = row.clone();
        r.push(bi.clone());
        r
    }).collect();
    let piv = echelon(&mut aug);
    if piv.len() < n || piv.iter().any(|&c| c >= n) {
        return None;
    }
    Some(aug.iter().map(|row| row[n].clone()).collect())
}

/// Whether `values` (given at `points`) agree with some polynomial whose
/// monomials are drawn from `basis`: true iff appending the value column does
/// not increase the rank of the evaluation matrix.
pub fn in_span(points: &[Vec<i64>], values: &[Q], basis: &[Monomial]) -> bool {
    let base: Matrix = points
        .iter()
        .map(|p| basis.iter().map(|m| Q::from_integer(m.eval(p))).collect())
        .collect();
    let r0 = rank(&base);
    let aug: Matrix = base
        .into_iter()
        .zip(values)
        .map(|(mut row, v)| {
            row.push(v.clone());
            row
        })
        .collect();
    rank(&aug) == r0
}

/// Smallest `D` such that the function `points -> values` is the restriction of
/// a polynomial of total degree at most `D` (`None` for the zero function is
/// never returned: the zero function has degree 0).
///
/// Exponents are capped per coordinate by the number of distinct values, which
/// loses nothing on a finite set.
pub fn interpolation_degree(points: &[Vec<i64>], values: &[Q]) -> u32 {
    if points.is_empty() || values.iter().all(|v| v.is_zero()) {
        return 0;
    }
    let n = points[0].len();
    let caps: Vec<u32> = (0..n)
        .map(|i| {
            let mut vs: Vec<i64> = points.iter().map(|p| p[i]).collect();
            vs.sort_unstable();
            vs.dedup();
            vs.len().saturating_sub(1) as u32
        })
        .collect();
    let max: u32 = caps.iter().sum();
    for d in 0..=max {
        if in_span(points, values, &monomials_up_to(&caps, d)) {
            return d;
        }
    }
    max
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::q;
    use alloc::vec;

    #[test]
    fn determinant_and_solve() {
        let a = vec![vec![q(2), q(1)], vec![q(1), q(3)]];
        assert_eq!(det(&a), q(5));
        let x = solve(&a, &[q(3), q(5)]).unwrap();
        assert_eq!(x, vec![Q::new(4.into(), 5.into()), Q::new(7.into(), 5.into())]);
        let sing = vec![vec![q(1), q(2)], vec![q(2), q(4)]];
        assert_eq!(det(&sing), q(0));
        assert!(solve(&sing, &[q(1), q(1)]).is_none());
        assert_eq!(rank(&sing), 1);
    }

    #[test]
    fn interpolation_degree_of_quadratic() {
        let pts: Vec<Vec<i64>> = (0..5).map(|t| vec![t]).collect();
        let vals: Vec<Q> = (0..5).map(|t| q(t * t - 3 * t + 1)).collect();
        assert_eq!(interpolation_degree(&pts, &vals), 2);
        let pts2: Vec<Vec<i64>> = vec![vec![0, 0], vec![0, 1], vec![1, 0], vec![1, 1]];
        let and = vec![q(0), q(0), q(0), q(1)];
        assert_eq!(interpolation_degree(&pts2, &and), 2);
        let x1 = vec![q(0), q(0), q(1), q(1)];
        assert_eq!(interpolation_degree(&pts2, &x1), 1);
    }
}
