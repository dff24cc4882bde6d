//! Orthogonal content.
//!
//! `orth f` is the least total degree of a monomial `x^alpha` with
//! `<f, x^alpha> != 0`, and `+inf` for the zero function. Because monomials of
//! degree below `d` span every polynomial of degree below `d`, checking
//! monomials suffices. On a support whose `i`-th coordinate takes `s_i`
//! distinct values, `x_i^a` with `a >= s_i` agrees with a lower-degree
//! polynomial, so only exponents `alpha_i < s_i` need to be enumerated.

use alloc::collections::BTreeSet;
use alloc::vec;
use alloc::vec::Vec;
use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::rational::Q;
use crate::table::FnTable;

/// A monomial `x^alpha`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Monomial {
    /// Exponent vector `alpha`.
    pub exponents: Vec<u32>,
}

impl Monomial {
    /// Monomial with the given exponents.
    pub fn new(exponents: Vec<u32>) -> Self {
        Monomial { exponents }
    }

    /// Total degree `|alpha|`.
    pub fn degree(&self) -> u32 {
        self.exponents.iter().sum()
    }

    /// Value `x^alpha` at an integer point.
    pub fn eval(&self, x: &[i64]) -> BigInt {
        let mut acc = BigInt::one();
        for (&e, &c) in self.exponents.iter().zip(x) {
            if e > 0 {
                if c == 0 {
                    return BigInt::zero();
                }
                acc *= num_traits::pow(BigInt::from(c), e as usize);
            }
        }
        acc
    }

    /// Multilinear monomial `prod_{i in S} x_i` on `n` variables.
    pub fn from_set(n: usize, set: &[usize]) -> Self {
        let mut e = vec![0; n];
        for &i in set {
            e[i] = 1;
        }
        Monomial { exponents: e }
    }
}

/// Outcome of an orthogonal-content computation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum OrthResult {
    /// `orth f = value`, witnessed by a monomial of that degree with non-zero
    /// inner product (all lower-degree monomials are orthogonal to `f`).
    Finite {
        /// The orthogonal content.
        value: u32,
        /// Monomial with `<f, witness> != 0`.
        witness: Monomial,
    },
    /// `f` is the zero function.
    Infinite,
    /// Every monomial of degree at most `cap` is orthogonal to `f`, so
    /// `orth f >= cap + 1`.
    AtLeast(u32),
}

impl OrthResult {
    /// A lower bound valid in every case (`u32::MAX` stands for infinity).
    pub fn lower_bound(&self) -> u32 {
        match self {
            OrthResult::Finite { value, .. } => *value,
            OrthResult::Infinite => u32::MAX,
            OrthResult::AtLeast(v) => *v,
        }
    }

    /// True when the result certifies `orth f >= d`.
    pub fn at_least(&self, d: u32) -> bool {
        self.lower_bound() >= d
    }
}

impl core::fmt::Display for OrthResult {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            OrthResult::Finite { value, .. } => write!(f, "{value}"),
            OrthResult::Infinite => write!(f, "inf"),
            OrthResult::AtLeast(v) => write!(f, ">= {v}"),
        }
    }
}

/// All exponent vectors of total degree exactly `d` with `alpha_i <= caps[i]`,
/// in lexicographic order.
pub fn exponents_of_degree(caps: &[u32], d: u32) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    let mut cur = vec![0u32; caps.len()];
    fn rec(i: usize, left: u32, caps: &[u32], cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if i == caps.len() {
            if left == 0 {
                out.push(cur.clone());
            }
            return;
        }
        let rest: u32 = caps[i + 1..].iter().sum();
        let hi = caps[i].min(left);
        let lo = left.saturating_sub(rest);
        for e in (lo..=hi).rev() {
            cur[i] = e;
            rec(i + 1, left - e, caps, cur, out);
        }
        cur[i] = 0;
    }
    rec(0, d, caps, &mut cur, &mut out);
    out
}

/// All monomials of total degree at most `d` with `alpha_i <= caps[i]`,
/// ordered by degree.
pub fn monomials_up_to(caps: &[u32], d: u32) -> Vec<Monomial> {
    (0..=d).flat_map(|k| exponents_of_degree(caps, k)).map(Monomial::new).collect()
}

/// Multilinear monomials of degree at most `d` on `n` variables.
pub fn multilinear_up_to(n: usize, d: u32) -> Vec<Monomial> {
    monomials_up_to(&vec![1; n], d)
}

/// Per-coordinate exponent caps `s_i - 1` for the support of `f`.
pub fn support_caps(f: &FnTable) -> Vec<u32> {
    let n = f.dim();
    let mut vals: Vec<BTreeSet<i64>> = vec![BTreeSet::new(); n];
    for (p, _) in f.iter() {
        for (i, &c) in p.iter().enumerate() {
            vals[i].insert(c);
        }
    }
    vals.iter().map(|s| s.len().saturating_sub(1) as u32).collect()
}

/// `<f, x^alpha>`.
pub fn moment(f: &FnTable, m: &Monomial) -> Q {
    let mut acc = Q::zero();
    for (p, v) in f.iter() {
        let e = m.eval(p);
        if !e.is_zero() {
            acc += v * Q::from_integer(e);
        }
    }
    acc
}

/// Orthogonal content of `f`, searching monomials up to total degree `cap`.
pub fn orth(f: &FnTable, cap: u32) -> OrthResult {
    if f.is_zero() {
        return OrthResult::Infinite;
    }
    let caps = support_caps(f);
    let max_deg: u32 = caps.iter().sum();
    for d in 0..=cap {
        if d > max_deg {
            // Unreachable for non-zero f: polynomials of per-coordinate degree
            // below s_i span all functions on the support grid.
            break;
        }
        for e in exponents_of_degree(&caps, d) {
            let m = Monomial::new(e);
            if !moment(f, &m).is_zero() {
                return OrthResult::Finite { value: d, witness: m };
            }
        }
    }
    if cap >= max_deg {
        unreachable!("non-zero function orthogonal to a spanning set");
    }
    OrthResult::AtLeast(cap + 1)
}

/// Default search cap: dimension times the largest coordinate range.
pub fn default_cap(f: &FnTable) -> u32 {
    let n = f.dim() as i64;
    (n * f.domain().max_coordinate_range().max(1)) as u32
}

/// Orthogonal content with the default cap.
pub fn orth_default(f: &FnTable) -> OrthResult {
    orth(f, default_cap(f))
}

/// True when every monomial of degree below `d` is orthogonal to `f`.
pub fn orth_at_least(f: &FnTable, d: u32) -> bool {
    if d == 0 || f.is_zero() {
        return true;
    }
    orth(f, d - 1).at_least(d)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::Domain;
    use crate::rational::q;
    use crate::table::tensor;

    #[test]
    fn small_examples() {
        let f = FnTable::univariate(&[q(1), q(-1)]);
        assert_eq!(orth(&f, 5).lower_bound(), 1);
        let chi = FnTable::from_values(Domain::Hypercube(2), &[q(1), q(-1), q(-1), q(1)]).unwrap();
        assert_eq!(orth(&chi, 5).lower_bound(), 2);
        assert_eq!(orth(&FnTable::zero(Domain::Hypercube(2)), 5), OrthResult::Infinite);
        assert_eq!(orth(&tensor(&f, &f), 5).lower_bound(), 2);
    }

    #[test]
    fn cap_is_reported() {
        let chi = FnTable::from_values(Domain::Hypercube(2), &[q(1), q(-1), q(-1), q(1)]).unwrap();
        assert_eq!(orth(&chi, 1), OrthResult::AtLeast(2));
        assert!(orth_at_least(&chi, 2));
        assert!(!orth_at_least(&chi, 3));
    }

    #[test]
    fn exponent_enumeration() {
        assert_eq!(exponents_of_degree(&[1, 1, 1], 2).len(), 3);
        assert_eq!(exponents_of_degree(&[2, 2], 2), vec![vec![2, 0], vec![1, 1], vec![0, 2]]);
        assert_eq!(multilinear_up_to(4, 2).len(), 11);
    }
}
