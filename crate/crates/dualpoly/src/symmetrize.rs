//! Symmetrization over blocks of hypercube coordinates.
//!
//! Averaging a function on `{0,1}^n` over all strings with prescribed block
//! weights `(t_1, ..., t_k)` turns a polynomial of degree `d` into a polynomial
//! of degree at most `d` in the block weights (Minsky–Papert for one block,
//! and its block-wise and Ambainis-style generalizations).

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec::Vec;
use num_bigint::BigInt;
use num_traits::Zero;

use crate::domain::{Domain, Point};
use crate::error::{Error, Result};
use crate::rational::Q;
use crate::table::FnTable;

/// Averages `f` (on `{0,1}^n`) over strings with each block weight fixed.
///
/// `blocks` must partition `0..n`. The output lives on the box
/// `{0..|B_1|} x ... x {0..|B_k|}`.
pub fn symmetrize(f: &FnTable, blocks: &[Vec<usize>]) -> Result<FnTable> {
    let n = f.domain().require_hypercube()?;
    let mut seen = alloc::vec![false; n];
    for b in blocks {
        for &i in b {
            if i >= n || seen[i] {
                return Err(Error::Invalid(format!("blocks do not partition 0..{n}")));
            }
            seen[i] = true;
        }
    }
    if seen.iter().any(|s| !s) {
        return Err(Error::Invalid(format!("blocks do not cover 0..{n}")));
    }
    let weights_of = |x: &[i64]| -> Point { blocks.iter().map(|b| b.iter().map(|&i| x[i]).sum()).collect() };
    let out_dom = Domain::boxed(&blocks.iter().map(|b| b.len() as i64).collect::<Vec<_>>());
    let mut sums: BTreeMap<Point, Q> = BTreeMap::new();
    for (p, v) in f.iter() {
        *sums.entry(weights_of(p)).or_insert_with(Q::zero) += v;
    }
    let entries = sums.into_iter().filter(|(_, v)| !v.is_zero()).map(|(t, v)| {
        let count: BigInt = blocks
            .iter()
            .zip(&t)
            .map(|(b, &ti)| crate::rational::binom(b.len() as u64, ti as u64))
            .product();
        (t, v / Q::from_integer(count))
    });
    FnTable::from_entries(out_dom, entries)
}

/// Single-block (Minsky–Papert) symmetrization onto `{0..n}`.
pub fn symmetrize_all(f: &FnTable) -> Result<FnTable> {
    let n = f.domain().require_hypercube()?;
    symmetrize(f, &[(0..n).collect()])
}

/// Consecutive blocks of size `r` covering `0..m*r`.
pub fn consecutive_blocks(m: usize, r: usize) -> Vec<Vec<usize>> {
    (0..m).map(|j| (j * r..(j + 1) * r).collect()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::interpolation_degree;
    use crate::rational::{q, qr};

    #[test]
    fn product_of_two_bits() {
        let f = FnTable::from_fn(Domain::Hypercube(2), |x| q(x[0] * x[1]));
        let s = symmetrize_all(&f).unwrap();
        assert_eq!(s.dense(), alloc::vec![q(0), q(0), q(1)]);
    }

    #[test]
    fn single_variable_gives_t_over_n() {
        let f = FnTable::from_fn(Domain::Hypercube(3), |x| q(x[0]));
        let s = symmetrize_all(&f).unwrap();
        assert_eq!(s.dense(), alloc::vec![q(0), qr(1, 3), qr(2, 3), q(1)]);
        let one = FnTable::from_fn(Domain::Hypercube(3), |_| q(1));
        assert!(symmetrize_all(&one).unwrap().dense().iter().all(|v| *v == q(1)));
    }

    #[test]
    fn block_symmetrization_keeps_degree() {
        let f = FnTable::from_fn(Domain::Hypercube(4), |x| q(x[0] * x[2] + 3 * x[1] - x[3]));
        let s = symmetrize(&f, &consecutive_blocks(2, 2)).unwrap();
        let pts = s.domain().points();
        let vals: Vec<Q> = pts.iter().map(|p| s.get(p)).collect();
        assert!(interpolation_degree(&pts, &vals) <= 2);
    }
}
