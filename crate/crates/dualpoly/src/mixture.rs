//! Lazy linear combinations of tensor products.
//!
//! A [`ProductMixture`] stores `sum_k c_k (f_{k,1} x ... x f_{k,n})` with
//! univariate factor tables, which is how the dual distributions for the
//! Minsky–Papert function are built. Evaluation at a point costs one product
//! per term; densification into an [`FnTable`] is available while the
//! bounding box stays below [`DENSE_LIMIT`] points.

use alloc::format;
use alloc::vec::Vec;
use num_traits::{One, Signed, Zero};

use crate::domain::{Domain, Point};
use crate::error::{Error, Result};
use crate::rational::Q;
use crate::table::FnTable;

/// Largest number of points a mixture may be densified onto.
pub const DENSE_LIMIT: u128 = 100_000;

/// One term `coef * (f_1 x ... x f_n)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProductTerm {
    /// Scalar coefficient.
    pub coef: Q,
    /// Univariate factors, one per coordinate.
    pub factors: Vec<FnTable>,
}

impl ProductTerm {
    /// Value of the term at `x`.
    pub fn eval(&self, x: &[i64]) -> Q {
        let mut acc = self.coef.clone();
        for (f, &c) in self.factors.iter().zip(x) {
            if acc.is_zero() {
                break;
            }
            acc *= f.get(&[c]);
        }
        acc
    }
}

/// A linear combination of tensor products of univariate tables.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProductMixture {
    dim: usize,
    terms: Vec<ProductTerm>,
}

impl ProductMixture {
    /// The empty (zero) mixture on `dim` coordinates.
    pub fn new(dim: usize) -> Self {
        ProductMixture { dim, terms: Vec::new() }
    }

    /// The single product `f_1 x ... x f_n` with coefficient one.
    pub fn product(factors: Vec<FnTable>) -> Result<Self> {
        let mut m = ProductMixture::new(factors.len());
        m.push(Q::one(), factors)?;
        Ok(m)
    }

    /// Appends `coef * (f_1 x ... x f_n)`; every factor must be univariate.
    pub fn push(&mut self, coef: Q, factors: Vec<FnTable>) -> Result<()> {
        if factors.len() != self.dim {
            return Err(Error::DimensionMismatch { left: self.dim, right: factors.len() });
        }
        if let Some(f) = factors.iter().find(|f| f.dim() != 1) {
            return Err(Error::Domain(format!("mixture factors must be univariate, got dimension {}", f.dim())));
        }
        if !coef.is_zero() {
            self.terms.push(ProductTerm { coef, factors });
        }
        Ok(())
    }

    /// Number of coordinates.
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Stored terms.
    pub fn terms(&self) -> &[ProductTerm] {
        &self.terms
    }

    /// Value at `x`.
    pub fn eval(&self, x: &[i64]) -> Q {
        self.terms.iter().fold(Q::zero(), |acc, t| acc + t.eval(x))
    }

    /// `s * self`.
    pub fn scale(&self, s: &Q) -> Self {
        let mut out = ProductMixture::new(self.dim);
        for t in &self.terms {
            out.push(&t.coef * s, t.factors.clone()).expect("same shape");
        }
        out
    }

    /// `self + other` (term lists are concatenated).
    pub fn add(&self, other: &ProductMixture) -> Result<Self> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch { left: self.dim, right: other.dim });
        }
        let mut out = self.clone();
        out.terms.extend(other.terms.iter().cloned());
        Ok(out)
    }

    /// `self - other`.
    pub fn sub(&self, other: &ProductMixture) -> Result<Self> {
        self.add(&other.scale(&-Q::one()))
    }

    /// Tensor product: every pair of terms is multiplied out.
    pub fn tensor(&self, other: &ProductMixture) -> Self {
        let mut out = ProductMixture::new(self.dim + other.dim);
        for a in &self.terms {
            for b in &other.terms {
                let mut factors = a.factors.clone();
                factors.extend(b.factors.iter().cloned());
                out.push(&a.coef * &b.coef, factors).expect("dimensions add up");
            }
        }
        out
    }

    /// Tensor product of a non-empty list of mixtures.
    pub fn tensor_all(parts: &[ProductMixture]) -> Self {
        let mut it = parts.iter();
        let first = it.next().expect("tensor_all of an empty list").clone();
        it.fold(first, |acc, p| acc.tensor(p))
    }

    /// Smallest box containing every factor domain.
    pub fn bounding_box(&self) -> Domain {
        let mut lo = alloc::vec![i64::MAX; self.dim];
        let mut hi = alloc::vec![i64::MIN; self.dim];
        for t in &self.terms {
            for (i, f) in t.factors.iter().enumerate() {
                let (l, h) = f.domain().bounds();
                lo[i] = lo[i].min(l[0]);
                hi[i] = hi[i].max(h[0]);
            }
        }
        if self.terms.is_empty() {
            return Domain::uniform_box(self.dim, 0);
        }
        Domain::Grid { lo, hi }
    }

    /// Dense table on the bounding box.
    pub fn densify(&self) -> Result<FnTable> {
        self.densify_on(self.bounding_box())
    }

    /// Dense table on `domain`; support points outside `domain` are an error.
    pub fn densify_on(&self, domain: Domain) -> Result<FnTable> {
        let (lo, hi) = domain.bounds();
        let size: u128 = lo.iter().zip(&hi).map(|(l, h)| (h - l + 1).max(0) as u128).product();
        if size > DENSE_LIMIT {
            return Err(Error::TooLarge(format!("densifying a mixture onto {size} points (limit {DENSE_LIMIT})")));
        }
        let mut acc: alloc::collections::BTreeMap<Point, Q> = alloc::collections::BTreeMap::new();
        for t in &self.terms {
            let supports: Vec<Vec<(i64, Q)>> =
                t.factors.iter().map(|f| f.iter().map(|(p, v)| (p[0], v.clone())).collect()).collect();
            let mut stack: Vec<(Point, Q)> = alloc::vec![(Vec::new(), t.coef.clone())];
            for s in &supports {
                let mut next = Vec::with_capacity(stack.len() * s.len());
                for (p, v) in &stack {
                    for (c, w) in s {
                        let mut q = p.clone();
                        q.push(*c);
                        next.push((q, v * w));
                    }
                }
                stack = next;
            }
            for (p, v) in stack {
                *acc.entry(p).or_insert_with(Q::zero) += v;
            }
        }
        FnTable::from_entries(domain, acc.into_iter().filter(|(_, v)| !v.is_zero()))
    }

    /// Sum of coefficients.
    pub fn coefficient_sum(&self) -> Q {
        self.terms.iter().fold(Q::zero(), |a, t| a + &t.coef)
    }

    /// True when the mixture is a convex combination of product
    /// distributions: non-negative coefficients summing to one and every
    /// factor a probability distribution.
    pub fn is_distribution_mixture(&self) -> bool {
        self.terms.iter().all(|t| !t.coef.is_negative() && t.factors.iter().all(FnTable::is_distribution))
            && self.coefficient_sum() == Q::one()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{q, qr};
    use crate::table::tensor_all;
    use alloc::vec;

    fn uni(vals: &[Q]) -> FnTable {
        FnTable::univariate(vals)
    }

    #[test]
    fn densify_matches_symbolic_evaluation() {
        let a = uni(&[qr(1, 2), qr(1, 2)]);
        let b = uni(&[qr(1, 3), qr(1, 3), qr(1, 3)]);
        let mut m = ProductMixture::new(2);
        m.push(qr(1, 4), vec![a.clone(), b.clone()]).unwrap();
        m.push(qr(3, 4), vec![b.clone(), a.clone()]).unwrap();
        assert!(m.is_distribution_mixture());
        let dense = m.densify().unwrap();
        for p in dense.domain().points() {
            assert_eq!(dense.get(&p), m.eval(&p));
        }
        assert_eq!(dense.sum(), q(1));
        let single = ProductMixture::product(vec![a.clone(), b.clone()]).unwrap().densify().unwrap();
        assert_eq!(single.dense(), tensor_all(&[a, b]).with_domain(single.domain().clone()).unwrap().dense());
    }

    #[test]
    fn cancellation_and_tensor() {
        let a = uni(&[q(1), q(-1)]);
        let m = ProductMixture::product(vec![a.clone()]).unwrap();
        assert!(m.sub(&m).unwrap().densify().unwrap().is_zero());
        let t = m.tensor(&m);
        assert_eq!(t.dim(), 2);
        assert_eq!(t.eval(&[1, 1]), q(1));
        assert!(!t.is_distribution_mixture());
        assert!(ProductMixture::product(vec![FnTable::zero(Domain::uniform_box(2, 1))]).is_err());
    }
}
