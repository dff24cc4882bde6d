//! Finite domains of integer points.
//!
//! A [`Domain`] is a hypercube `{0,1}^n`, an integer box
//! `prod_i {lo_i, ..., hi_i}` (the usual box `{0..r_1} x ... x {0..r_n}` has
//! `lo = 0`), or a weight slice `X|_W = {x in X : |x| in W}` of either, where
//! `|x|` is the coordinate sum. Points are enumerated in lexicographic order so
//! every derived certificate is reproducible.

use alloc::boxed::Box;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};

/// A point of the integer lattice.
pub type Point = Vec<i64>;

/// Coordinate sum `|x|`.
pub fn weight(x: &[i64]) -> i64 {
    x.iter().sum()
}

/// `l1` distance `|x - y|`.
pub fn dist(x: &[i64], y: &[i64]) -> i64 {
    x.iter().zip(y).map(|(a, b)| (a - b).abs()).sum()
}

/// A finite set of integer points with a deterministic enumeration order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Domain {
    /// `{0,1}^n`.
    Hypercube(usize),
    /// `prod_i {lo_i, ..., hi_i}`.
    Grid {
        /// Per-coordinate lower ends.
        lo: Vec<i64>,
        /// Per-coordinate upper ends (inclusive).
        hi: Vec<i64>,
    },
    /// Points of `base` whose weight lies in `[lo, hi]`.
    Slice {
        /// Underlying hypercube or grid.
        base: Box<Domain>,
        /// Smallest admissible weight.
        lo: i64,
        /// Largest admissible weight.
        hi: i64,
    },
}

impl Domain {
    /// The box `{0..r_1} x ... x {0..r_n}`.
    pub fn boxed(r: &[i64]) -> Domain {
        Domain::Grid { lo: vec![0; r.len()], hi: r.to_vec() }
    }

    /// The box `{0..r}^n`.
    pub fn uniform_box(n: usize, r: i64) -> Domain {
        Domain::boxed(&vec![r; n])
    }

    /// The box spanned by two points, `cube(u, v)`.
    pub fn cube(u: &[i64], v: &[i64]) -> Domain {
        Domain::Grid {
            lo: u.iter().zip(v).map(|(a, b)| *a.min(b)).collect(),
            hi: u.iter().zip(v).map(|(a, b)| *a.max(b)).collect(),
        }
    }

    /// Restriction of `self` to weights in `[lo, hi]`.
    pub fn slice(self, lo: i64, hi: i64) -> Result<Domain> {
        match self {
            Domain::Slice { base, lo: l0, hi: h0 } => Ok(Domain::Slice { base, lo: lo.max(l0), hi: hi.min(h0) }),
            base => Ok(Domain::Slice { base: Box::new(base), lo, hi }),
        }
    }

    /// Restriction to weights at most `theta`.
    pub fn at_most(self, theta: i64) -> Domain {
        self.slice(i64::MIN, theta).expect("slice of a valid domain")
    }

    /// Dimension `n`.
    pub fn dim(&self) -> usize {
        match self {
            Domain::Hypercube(n) => *n,
            Domain::Grid { lo, .. } => lo.len(),
            Domain::Slice { base, .. } => base.dim(),
        }
    }

    /// Per-coordinate bounding box `(lo, hi)`.
    pub fn bounds(&self) -> (Vec<i64>, Vec<i64>) {
        match self {
            Domain::Hypercube(n) => (vec![0; *n], vec![1; *n]),
            Domain::Grid { lo, hi } => (lo.clone(), hi.clone()),
            Domain::Slice { base, .. } => base.bounds(),
        }
    }

    /// True when `x` belongs to the domain.
    pub fn contains(&self, x: &[i64]) -> bool {
        if x.len() != self.dim() {
            return false;
        }
        match self {
            Domain::Hypercube(_) => x.iter().all(|&c| c == 0 || c == 1),
            Domain::Grid { lo, hi } => x.iter().zip(lo.iter().zip(hi)).all(|(c, (l, h))| l <= c && c <= h),
            Domain::Slice { base, lo, hi } => {
                let w = weight(x);
                *lo <= w && w <= *hi && base.contains(x)
            }
        }
    }

    /// Number of points, computed by enumeration for slices.
    pub fn size(&self) -> u128 {
        match self {
            Domain::Hypercube(n) => 1u128 << *n,
            Domain::Grid { lo, hi } => lo.iter().zip(hi).map(|(l, h)| (h - l + 1).max(0) as u128).product(),
            Domain::Slice { .. } => self.points().len() as u128,
        }
    }

    /// All points in lexicographic order.
    pub fn points(&self) -> Vec<Point> {
        let (lo, hi) = self.bounds();
        let filter: Option<(i64, i64)> = match self {
            Domain::Slice { lo, hi, .. } => Some((*lo, *hi)),
            _ => None,
        };
        let mut out = Vec::new();
        if lo.iter().zip(&hi).any(|(l, h)| l > h) {
            return out;
        }
        let n = lo.len();
        let mut cur = lo.clone();
        loop {
            let keep = match filter {
                Some((a, b)) => {
                    let w = weight(&cur);
                    a <= w && w <= b
                }
                None => true,
            };
            if keep {
                out.push(cur.clone());
            }
            // advance odometer, last coordinate fastest
            let mut i = n;
            loop {
                if i == 0 {
                    return out;
                }
                i -= 1;
                if cur[i] < hi[i] {
                    cur[i] += 1;
                    for j in i + 1..n {
                        cur[j] = lo[j];
                    }
                    break;
                }
            }
        }
    }

    /// The product domain `self x other` (slices are replaced by their base).
    pub fn product(&self, other: &Domain) -> Domain {
        match (self, other) {
            (Domain::Hypercube(a), Domain::Hypercube(b)) => Domain::Hypercube(a + b),
            _ => {
                let (mut lo, mut hi) = self.bounds();
                let (lo2, hi2) = other.bounds();
                lo.extend(lo2);
                hi.extend(hi2);
                Domain::Grid { lo, hi }
            }
        }
    }

    /// Errors unless the domain is a hypercube; returns its dimension.
    pub fn require_hypercube(&self) -> Result<usize> {
        match self {
            Domain::Hypercube(n) => Ok(*n),
            other => Err(Error::Domain(alloc::format!("expected a hypercube, got {other:?}"))),
        }
    }

    /// Largest number of distinct values taken by any single coordinate.
    pub fn max_coordinate_range(&self) -> i64 {
        let (lo, hi) = self.bounds();
        lo.iter().zip(&hi).map(|(l, h)| h - l).max().unwrap_or(0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn enumeration_is_lexicographic() {
        let d = Domain::boxed(&[1, 2]);
        let pts = d.points();
        assert_eq!(pts, vec![vec![0, 0], vec![0, 1], vec![0, 2], vec![1, 0], vec![1, 1], vec![1, 2]]);
        assert_eq!(d.size(), 6);
        assert_eq!(Domain::Hypercube(3).points().len(), 8);
    }

    #[test]
    fn slices_filter_by_weight() {
        let d = Domain::uniform_box(2, 3).at_most(2);
        assert_eq!(d.points().len(), 6);
        assert!(d.contains(&[1, 1]));
        assert!(!d.contains(&[2, 1]));
        let ex = Domain::uniform_box(2, 3).slice(3, 3).unwrap();
        assert_eq!(ex.points(), vec![vec![0, 3], vec![1, 2], vec![2, 1], vec![3, 0]]);
    }

    #[test]
    fn cube_spans_two_points() {
        let d = Domain::cube(&[0, 2], &[2, 0]);
        assert_eq!(d.size(), 9);
        assert!(d.contains(&[1, 1]));
        assert_eq!(dist(&[0, 2], &[2, 0]), 4);
    }
}
