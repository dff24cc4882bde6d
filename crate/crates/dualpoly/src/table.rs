//! Finitely supported functions on a declared domain.
//!
//! [`FnTable`] is the universal carrier for dual objects, distributions and
//! truth tables: a map from points of a [`Domain`] to exact rationals, with
//! absent points meaning zero. Stored values are never zero, so the key set is
//! exactly the support.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec::Vec;
use num_traits::{One, Signed, Zero};

use crate::domain::{weight, Domain, Point};
use crate::error::{Error, Result};
use crate::rational::{binom_q, Q};

/// A finitely supported rational function on a domain.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FnTable {
    domain: Domain,
    entries: BTreeMap<Point, Q>,
}

impl FnTable {
    /// The zero function on `domain`.
    pub fn zero(domain: Domain) -> Self {
        FnTable { domain, entries: BTreeMap::new() }
    }

    /// Tabulates `f` over every point of `domain`.
    pub fn from_fn(domain: Domain, mut f: impl FnMut(&[i64]) -> Q) -> Self {
        let mut t = FnTable::zero(domain.clone());
        for p in domain.points() {
            let v = f(&p);
            if !v.is_zero() {
                t.entries.insert(p, v);
            }
        }
        t
    }

    /// Builds a table from values listed in the domain's enumeration order.
    pub fn from_values(domain: Domain, values: &[Q]) -> Result<Self> {
        let pts = domain.points();
        if pts.len() != values.len() {
            return Err(Error::Invalid(format!("expected {} values, got {}", pts.len(), values.len())));
        }
        let mut t = FnTable::zero(domain);
        for (p, v) in pts.into_iter().zip(values) {
            if !v.is_zero() {
                t.entries.insert(p, v.clone());
            }
        }
        Ok(t)
    }

    /// Univariate table on `{0, ..., values.len() - 1}`.
    pub fn univariate(values: &[Q]) -> Self {
        let r = values.len() as i64 - 1;
        FnTable::from_values(Domain::boxed(&[r.max(0)]), values).expect("length matches")
    }

    /// Boolean truth table: value one where `f` holds, zero elsewhere.
    pub fn boolean(domain: Domain, mut f: impl FnMut(&[i64]) -> bool) -> Self {
        FnTable::from_fn(domain, |x| if f(x) { Q::one() } else { Q::zero() })
    }

    /// Builds a table from `(point, value)` pairs; points must lie in `domain`.
    pub fn from_entries(domain: Domain, entries: impl IntoIterator<Item = (Point, Q)>) -> Result<Self> {
        let mut t = FnTable::zero(domain);
        for (p, v) in entries {
            t.add_at(&p, &v)?;
        }
        Ok(t)
    }

    /// Declared domain.
    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    /// Dimension of the declared domain.
    pub fn dim(&self) -> usize {
        self.domain.dim()
    }

    /// Value at `x` (zero when absent).
    pub fn get(&self, x: &[i64]) -> Q {
        self.entries.get(x).cloned().unwrap_or_else(Q::zero)
    }

    /// Sets the value at `x`; rejects points outside the domain.
    pub fn set(&mut self, x: &[i64], v: Q) -> Result<()> {
        if !self.domain.contains(x) {
            return Err(Error::Invalid(format!("point {x:?} outside domain {:?}", self.domain)));
        }
        if v.is_zero() {
            self.entries.remove(x);
        } else {
            self.entries.insert(x.to_vec(), v);
        }
        Ok(())
    }

    /// Adds `v` to the value at `x`.
    pub fn add_at(&mut self, x: &[i64], v: &Q) -> Result<()> {
        let cur = self.get(x);
        self.set(x, cur + v)
    }

    /// Iterates over the support in lexicographic order.
    pub fn iter(&self) -> impl Iterator<Item = (&Point, &Q)> {
        self.entries.iter()
    }

    /// Support points in lexicographic order.
    pub fn support(&self) -> Vec<Point> {
        self.entries.keys().cloned().collect()
    }

    /// Size of the support.
    pub fn support_len(&self) -> usize {
        self.entries.len()
    }

    /// True for the zero function.
    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    /// True when every value is non-negative.
    pub fn is_nonneg(&self) -> bool {
        self.entries.values().all(|v| !v.is_negative())
    }

    /// True when the table is a probability distribution.
    pub fn is_distribution(&self) -> bool {
        self.is_nonneg() && self.sum() == Q::one()
    }

    /// `sum_x f(x)`.
    pub fn sum(&self) -> Q {
        self.entries.values().fold(Q::zero(), |a, v| a + v)
    }

    /// `||f||_1`.
    pub fn l1(&self) -> Q {
        self.entries.values().fold(Q::zero(), |a, v| a + v.abs())
    }

    /// `||f||_inf`.
    pub fn linf(&self) -> Q {
        self.entries.values().map(|v| v.abs()).fold(Q::zero(), |a, v| if v > a { v } else { a })
    }

    /// Values at every domain point, in enumeration order.
    pub fn dense(&self) -> Vec<Q> {
        self.domain.points().iter().map(|p| self.get(p)).collect()
    }

    /// `s * f`.
    pub fn scale(&self, s: &Q) -> FnTable {
        if s.is_zero() {
            return FnTable::zero(self.domain.clone());
        }
        FnTable { domain: self.domain.clone(), entries: self.entries.iter().map(|(p, v)| (p.clone(), v * s)).collect() }
    }

    /// `-f`.
    pub fn neg(&self) -> FnTable {
        self.scale(&-Q::one())
    }

    /// `|f|` pointwise.
    pub fn abs(&self) -> FnTable {
        FnTable { domain: self.domain.clone(), entries: self.entries.iter().map(|(p, v)| (p.clone(), v.abs())).collect() }
    }

    /// `f + s * g`; the domain becomes the bounding hull when they differ.
    pub fn axpy(&self, s: &Q, g: &FnTable) -> Result<FnTable> {
        check_dims(self, g)?;
        let domain = hull(&self.domain, &g.domain);
        let mut out = FnTable { domain, entries: self.entries.clone() };
        if s.is_zero() {
            return Ok(out);
        }
        for (p, v) in g.iter() {
            let nv = out.get(p) + v * s;
            if nv.is_zero() {
                out.entries.remove(p);
            } else {
                out.entries.insert(p.clone(), nv);
            }
        }
        Ok(out)
    }

    /// `f + g`.
    pub fn add(&self, g: &FnTable) -> Result<FnTable> {
        self.axpy(&Q::one(), g)
    }

    /// `f - g`.
    pub fn sub(&self, g: &FnTable) -> Result<FnTable> {
        self.axpy(&-Q::one(), g)
    }

    /// Pointwise product `f * g`.
    pub fn mul(&self, g: &FnTable) -> Result<FnTable> {
        check_dims(self, g)?;
        let mut out = FnTable::zero(self.domain.clone());
        for (p, v) in self.iter() {
            let w = g.get(p);
            if !w.is_zero() {
                out.entries.insert(p.clone(), v * w);
            }
        }
        Ok(out)
    }

    /// Pointwise `(-1)^{b(x)} f(x)` for a Boolean table `b`.
    pub fn signed_by(&self, b: &FnTable) -> Result<FnTable> {
        check_dims(self, b)?;
        let mut out = self.clone();
        for (p, v) in out.entries.iter_mut() {
            if !b.get(p).is_zero() {
                *v = -v.clone();
            }
        }
        Ok(out)
    }

    /// Replaces the declared domain; every support point must lie in it.
    pub fn with_domain(&self, domain: Domain) -> Result<FnTable> {
        if let Some(p) = self.entries.keys().find(|p| !domain.contains(p)) {
            return Err(Error::Invalid(format!("support point {p:?} outside {domain:?}")));
        }
        Ok(FnTable { domain, entries: self.entries.clone() })
    }

    /// Restriction to the weight range `[lo, hi]` (the domain becomes a slice).
    pub fn restrict_weight(&self, lo: i64, hi: i64) -> FnTable {
        let domain = self.domain.clone().slice(lo, hi).expect("valid slice");
        let entries = self
            .entries
            .iter()
            .filter(|(p, _)| {
                let w = weight(p);
                lo <= w && w <= hi
            })
            .map(|(p, v)| (p.clone(), v.clone()))
            .collect();
        FnTable { domain, entries }
    }

    /// Restriction to points satisfying `keep`, on the same domain.
    pub fn filter(&self, mut keep: impl FnMut(&[i64]) -> bool) -> FnTable {
        FnTable {
            domain: self.domain.clone(),
            entries: self.entries.iter().filter(|(p, _)| keep(p)).map(|(p, v)| (p.clone(), v.clone())).collect(),
        }
    }

    /// Translation `x -> x + offset`, landing on `domain`.
    pub fn translate(&self, offset: &[i64], domain: Domain) -> Result<FnTable> {
        let mut out = FnTable::zero(domain);
        for (p, v) in self.iter() {
            let q: Point = p.iter().zip(offset).map(|(a, b)| a + b).collect();
            out.set(&q, v.clone())?;
        }
        Ok(out)
    }

    /// Largest weight of a support point (`None` for the zero function).
    pub fn max_weight(&self) -> Option<i64> {
        self.entries.keys().map(|p| weight(p)).max()
    }

    /// `l1` diameter of the support.
    pub fn support_diameter(&self) -> i64 {
        let pts: Vec<&Point> = self.entries.keys().collect();
        let mut best = 0;
        for (i, a) in pts.iter().enumerate() {
            for b in &pts[i + 1..] {
                best = best.max(crate::domain::dist(a, b));
            }
        }
        best
    }
}

fn check_dims(f: &FnTable, g: &FnTable) -> Result<()> {
    if f.dim() != g.dim() {
        return Err(Error::DimensionMismatch { left: f.dim(), right: g.dim() });
    }
    Ok(())
}

fn hull(a: &Domain, b: &Domain) -> Domain {
    if a == b {
        return a.clone();
    }
    let (lo1, hi1) = a.bounds();
    let (lo2, hi2) = b.bounds();
    Domain::Grid {
        lo: lo1.iter().zip(&lo2).map(|(x, y)| *x.min(y)).collect(),
        hi: hi1.iter().zip(&hi2).map(|(x, y)| *x.max(y)).collect(),
    }
}

/// `<f, g> = sum_x f(x) g(x)`, exact, over the intersection of supports.
pub fn inner_product(f: &FnTable, g: &FnTable) -> Result<Q> {
    check_dims(f, g)?;
    let (small, large) = if f.support_len() <= g.support_len() { (f, g) } else { (g, f) };
    let mut acc = Q::zero();
    for (p, v) in small.iter() {
        if let Some(w) = large.entries.get(p) {
            acc += v * w;
        }
    }
    Ok(acc)
}

/// Tensor product `(f (x) g)(x, y) = f(x) g(y)` on the product domain.
pub fn tensor(f: &FnTable, g: &FnTable) -> FnTable {
    let domain = f.domain.product(&g.domain);
    let mut entries = BTreeMap::new();
    for (p, v) in f.iter() {
        for (q, w) in g.iter() {
            let mut pt = p.clone();
            pt.extend_from_slice(q);
            entries.insert(pt, v * w);
        }
    }
    FnTable { domain, entries }
}

/// Tensor product of a non-empty list of tables.
pub fn tensor_all(fs: &[FnTable]) -> FnTable {
    let mut it = fs.iter();
    let first = it.next().expect("tensor_all of an empty list").clone();
    it.fold(first, |acc, g| tensor(&acc, g))
}

/// `k`-fold tensor power.
pub fn tensor_pow(f: &FnTable, k: usize) -> FnTable {
    assert!(k >= 1, "tensor power needs k >= 1");
    let mut out = f.clone();
    for _ in 1..k {
        out = tensor(&out, f);
    }
    out
}

/// Positive and negative parts: `f = pos - neg`, disjoint supports.
pub fn pos_neg_parts(f: &FnTable) -> (FnTable, FnTable) {
    let mut pos = FnTable::zero(f.domain.clone());
    let mut neg = FnTable::zero(f.domain.clone());
    for (p, v) in f.iter() {
        if v.is_positive() {
            pos.entries.insert(p.clone(), v.clone());
        } else {
            neg.entries.insert(p.clone(), -v.clone());
        }
    }
    (pos, neg)
}

/// Lifts a function on `{0..r}` to the symmetric function on `{0,1}^r` with
/// `out(x) = phi(|x|) / C(r, |x|)`; preserves the `l1` norm and orthogonal
/// content.
pub fn lift_symmetric_to_cube(phi: &FnTable) -> Result<FnTable> {
    if phi.dim() != 1 {
        return Err(Error::Domain(format!("expected a univariate table, got dimension {}", phi.dim())));
    }
    let (lo, hi) = phi.domain().bounds();
    if lo[0] < 0 || hi[0] < 1 {
        return Err(Error::Domain("lift needs a table on {0..r} with r >= 1".into()));
    }
    let r = hi[0] as usize;
    if r > 24 {
        return Err(Error::TooLarge(format!("lift to {{0,1}}^{r}")));
    }
    let domain = Domain::Hypercube(r);
    let mut out = FnTable::zero(domain.clone());
    for p in domain.points() {
        let w = weight(&p);
        let v = phi.get(&[w]);
        if !v.is_zero() {
            out.entries.insert(p, v / binom_q(r as u64, w as u64));
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{q, qr};
    use alloc::vec;

    fn chi(n: usize, s: &[usize]) -> FnTable {
        FnTable::from_fn(Domain::Hypercube(n), |x| {
            let par: i64 = s.iter().map(|&i| x[i]).sum();
            if par % 2 == 0 {
                q(1)
            } else {
                q(-1)
            }
        })
    }

    #[test]
    fn inner_products_of_characters() {
        let a = chi(2, &[0, 1]);
        assert_eq!(inner_product(&a, &a).unwrap(), q(4));
        assert_eq!(inner_product(&chi(2, &[0]), &chi(2, &[1])).unwrap(), q(0));
        let omega = FnTable::univariate(&[q(1), q(-1), q(0), q(0)]);
        let one = FnTable::from_fn(Domain::boxed(&[3]), |_| q(1));
        assert_eq!(inner_product(&omega, &one).unwrap(), q(0));
        assert!(inner_product(&a, &omega).is_err());
    }

    #[test]
    fn pos_neg_split() {
        let f = FnTable::univariate(&[q(1), q(-2), q(0)]);
        let (p, n) = pos_neg_parts(&f);
        assert_eq!(p.dense(), vec![q(1), q(0), q(0)]);
        assert_eq!(n.dense(), vec![q(0), q(2), q(0)]);
        assert_eq!(p.sub(&n).unwrap(), f);
    }

    #[test]
    fn lift_divides_by_binomials() {
        let phi = FnTable::univariate(&[q(1), q(-1), q(0), q(0)]);
        let lifted = lift_symmetric_to_cube(&phi).unwrap();
        assert_eq!(lifted.get(&[0, 0, 0]), q(1));
        assert_eq!(lifted.get(&[0, 1, 0]), qr(-1, 3));
        assert_eq!(lifted.l1(), phi.l1());
        let z = lift_symmetric_to_cube(&FnTable::zero(Domain::boxed(&[3]))).unwrap();
        assert!(z.is_zero());
    }

    #[test]
    fn tensor_supports_multiply() {
        let f = FnTable::univariate(&[q(1), q(-1)]);
        let t = tensor(&f, &f);
        assert_eq!(t.support_len(), 4);
        assert_eq!(t.get(&[1, 1]), q(1));
        let z = tensor(&f, &FnTable::zero(Domain::boxed(&[1])));
        assert!(z.is_zero());
    }
}
