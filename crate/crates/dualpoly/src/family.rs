//! Families of univariate distributions and local smoothness.
//!
//! * `B(r, c, alpha)`: distributions `lambda` on `{0..r'}` (`r' <= r`, full
//!   support) with
//!   `c^{t+1} / ((t+1)^2 2^{alpha t}) <= lambda(t) <= 1 / (c (t+1)^2 2^{alpha t})`.
//! * `B*(r, c, alpha)`: the same with lower bound `c / ((t+1)^2 2^{alpha t})`.
//! * `S(n, K)`: distributions whose support is a full box `prod {0..r_i}` and
//!   which are `K`-smooth there: `|f(x)| <= K^{|x - x'|} |f(x')|`.
//!
//! Every family takes a translate budget `Delta`: a member may be shifted by
//! `a` with `a in [0, Delta]` (univariate) or `|a| <= Delta` (boxes).
//!
//! The rate `alpha` is typically `c_2 / sqrt r`, so only `alpha^2` is stored
//! and `2^{alpha t}` is enclosed in a rational [`Bracket`]. A membership check
//! passes only against the adverse side of every bracket.
//!
//! Smoothness on a box, or on a weight-truncated box `X|<=theta`, is decided
//! by checking adjacent pairs only: any two points are joined by a monotone
//! lattice path of length `|x - x'|` inside the region (first lower the
//! coordinates that must decrease, then raise the others), so the adjacent
//! ratios multiply up to the general bound. Other regions fall back to all
//! pairs.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use num_traits::{One, Signed, Zero};

use crate::bounds::{exp2_sqrt, Bracket};
use crate::domain::{dist, Domain, Point};
use crate::error::{Error, Result};
use crate::rational::{pow, q, Q};
use crate::table::FnTable;

/// A family of distributions, decided exactly by [`FamilySpec::contains`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FamilySpec {
    /// `B(r, c, alpha, Delta)`.
    B {
        /// Maximal support length `r`.
        r: u64,
        /// Envelope constant `c`.
        c: Q,
        /// `alpha^2` (the rate enters as `2^{alpha t}`).
        alpha_sq: Q,
        /// Translate budget.
        delta: u64,
    },
    /// `B*(r, c, alpha, Delta)`.
    BStar {
        /// Maximal support length `r`.
        r: u64,
        /// Envelope constant `c`.
        c: Q,
        /// `alpha^2`.
        alpha_sq: Q,
        /// Translate budget.
        delta: u64,
    },
    /// `S(n, K, Delta)`.
    Smooth {
        /// Dimension.
        n: usize,
        /// Smoothness constant `K >= 1`.
        k: Q,
        /// Translate budget on `|a|`.
        delta: u64,
    },
}

/// Brackets of `2^{alpha t}` for `t = 0..=t_max`, given `alpha^2`.
pub fn rate_brackets(alpha_sq: &Q, t_max: u64) -> Vec<Bracket> {
    (0..=t_max)
        .map(|t| {
            if alpha_sq.is_zero() || t == 0 {
                Bracket::exact(Q::one())
            } else {
                exp2_sqrt(&(alpha_sq * q(t as i64) * q(t as i64)))
            }
        })
        .collect()
}

/// Support `{a, .., a + r'}` of a univariate table as `(a, r')`, or `None`
/// if the support is empty or has gaps.
pub fn contiguous_support(f: &FnTable) -> Option<(i64, u64)> {
    let pts: Vec<i64> = f.iter().map(|(p, _)| p[0]).collect();
    let (&a, &b) = (pts.first()?, pts.last()?);
    if (b - a + 1) as usize != pts.len() {
        return None;
    }
    Some((a, (b - a) as u64))
}

/// Why a table is not a member of a family.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Membership {
    /// Every condition holds.
    Member,
    /// Some condition fails; the message names it.
    NotMember(String),
}

impl Membership {
    /// True for [`Membership::Member`].
    pub fn holds(&self) -> bool {
        matches!(self, Membership::Member)
    }
}

impl FamilySpec {
    /// `B(r, c, alpha)` without translates.
    pub fn b(r: u64, c: Q, alpha_sq: Q) -> Self {
        FamilySpec::B { r, c, alpha_sq, delta: 0 }
    }

    /// `B*(r, c, alpha, Delta)`.
    pub fn b_star(r: u64, c: Q, alpha_sq: Q, delta: u64) -> Self {
        FamilySpec::BStar { r, c, alpha_sq, delta }
    }

    /// Decides membership exactly.
    pub fn contains(&self, f: &FnTable) -> Membership {
        match self.check(f) {
            Ok(()) => Membership::Member,
            Err(msg) => Membership::NotMember(msg),
        }
    }

    fn check(&self, f: &FnTable) -> core::result::Result<(), String> {
        if !f.is_distribution() {
            return Err("not a probability distribution".into());
        }
        match self {
            FamilySpec::B { r, c, alpha_sq, delta } | FamilySpec::BStar { r, c, alpha_sq, delta } => {
                if f.dim() != 1 {
                    return Err(format!("expected a univariate table, got dimension {}", f.dim()));
                }
                let (a, len) = contiguous_support(f).ok_or("support is not an interval")?;
                if a < 0 || a as u64 > *delta {
                    return Err(format!("translate {a} outside [0, {delta}]"));
                }
                if len > *r {
                    return Err(format!("support length {len} exceeds r = {r}"));
                }
                let star = matches!(self, FamilySpec::BStar { .. });
                let br = rate_brackets(alpha_sq, len);
                for (t, e) in br.iter().enumerate() {
                    let v = f.get(&[a + t as i64]);
                    let sq = q(((t + 1) * (t + 1)) as i64);
                    let num = if star { c.clone() } else { pow(c, t as u32 + 1) };
                    // Adverse sides: the lower bound is largest for the lower
                    // end of 2^{alpha t}, the upper bound smallest for the upper.
                    if v < &num / (&sq * &e.lo) {
                        return Err(format!("lower envelope fails at t = {t}"));
                    }
                    if v * c * &sq * &e.hi > Q::one() {
                        return Err(format!("upper envelope fails at t = {t}"));
                    }
                }
                Ok(())
            }
            FamilySpec::Smooth { n, k, delta } => {
                if f.dim() != *n {
                    return Err(format!("expected dimension {n}, got {}", f.dim()));
                }
                let sup = f.support();
                let lo: Vec<i64> = (0..*n).map(|i| sup.iter().map(|p| p[i]).min().unwrap()).collect();
                let hi: Vec<i64> = (0..*n).map(|i| sup.iter().map(|p| p[i]).max().unwrap()).collect();
                if lo.iter().any(|&x| x < 0) || lo.iter().sum::<i64>() as u64 > *delta {
                    return Err(format!("translate {lo:?} outside |a| <= {delta}"));
                }
                let region = Domain::Grid { lo, hi };
                if region.size() != sup.len() as u128 {
                    return Err("support is not a full box".into());
                }
                check_smooth(f, &region, k).map(|_| ()).map_err(|e| format!("{e}"))
            }
        }
    }
}

/// Largest `c` for which `f` is in `B*(r, c, alpha, Delta)` at its own support
/// length; zero when `f` is not a contiguous, translated distribution.
pub fn best_b_star_constant(f: &FnTable, alpha_sq: &Q, delta: u64) -> Q {
    let Some((a, len)) = contiguous_support(f) else { return Q::zero() };
    if f.dim() != 1 || a < 0 || a as u64 > delta || !f.is_distribution() {
        return Q::zero();
    }
    let br = rate_brackets(alpha_sq, len);
    let mut best: Option<Q> = None;
    for (t, e) in br.iter().enumerate() {
        let v = f.get(&[a + t as i64]);
        let sq = q(((t + 1) * (t + 1)) as i64);
        let lower = &v * &sq * &e.lo;
        let upper = (&v * &sq * &e.hi).recip();
        let m = lower.min(upper);
        best = Some(match best {
            Some(b) if b < m => b,
            _ => m,
        });
    }
    best.unwrap_or_else(Q::zero).min(Q::one())
}

/// Result of a smoothness check on a region.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SmoothCertificate {
    /// The constant `K` that was verified.
    pub k: Q,
    /// The region on which smoothness holds.
    pub region: Domain,
    /// Number of ordered pairs compared.
    pub pairs_checked: u64,
    /// True when the adjacent-pair argument was used.
    pub by_adjacency: bool,
}

/// True when adjacent-pair checking is sound on `region`: a box, or a box cut
/// at a maximal weight.
pub fn adjacency_suffices(region: &Domain) -> bool {
    match region {
        Domain::Hypercube(_) | Domain::Grid { .. } => true,
        Domain::Slice { base, lo, .. } => {
            let (blo, _) = base.bounds();
            *lo <= blo.iter().sum::<i64>()
        }
    }
}

fn neighbours(region: &Domain, p: &[i64]) -> Vec<Point> {
    let mut out = Vec::new();
    for i in 0..p.len() {
        let mut x = p.to_vec();
        x[i] += 1;
        if region.contains(&x) {
            out.push(x);
        }
    }
    out
}

/// Smallest `K >= 1` such that `f` is `K`-smooth on `region` by adjacency;
/// `None` when `f` vanishes at some but not all points of the region (no
/// finite `K` exists). Requires [`adjacency_suffices`].
pub fn min_smooth_constant(f: &FnTable, region: &Domain) -> Result<Option<Q>> {
    if !adjacency_suffices(region) {
        return Err(Error::Domain(format!("adjacent-pair smoothness needs a (truncated) box, got {region:?}")));
    }
    let pts = region.points();
    let zeros = pts.iter().filter(|p| f.get(p).is_zero()).count();
    if zeros == pts.len() {
        return Ok(Some(Q::one()));
    }
    if zeros > 0 {
        return Ok(None);
    }
    let mut k = Q::one();
    for p in &pts {
        let a = f.get(p).abs();
        for nb in neighbours(region, p) {
            let b = f.get(&nb).abs();
            let ratio = if a > b { &a / &b } else { &b / &a };
            if ratio > k {
                k = ratio;
            }
        }
    }
    Ok(Some(k))
}

/// Checks `|f(x)| <= K^{|x-x'|} |f(x')|` on `region`.
pub fn check_smooth(f: &FnTable, region: &Domain, k: &Q) -> Result<SmoothCertificate> {
    if k < &Q::one() {
        return Err(Error::pre("smoothness", format!("K = {k} must be at least 1")));
    }
    if adjacency_suffices(region) {
        let pts = region.points();
        let mut pairs = 0u64;
        for p in &pts {
            let a = f.get(p).abs();
            for nb in neighbours(region, p) {
                let b = f.get(&nb).abs();
                pairs += 2;
                if a > k * &b || b > k * &a {
                    return Err(Error::cert("smoothness", format!("ratio between {p:?} and {nb:?} exceeds K = {k}")));
                }
            }
        }
        return Ok(SmoothCertificate { k: k.clone(), region: region.clone(), pairs_checked: pairs, by_adjacency: true });
    }
    check_smooth_all_pairs(f, region, k)
}

/// Checks smoothness over every ordered pair of points (quadratic; for
/// cross-validation and irregular regions).
pub fn check_smooth_all_pairs(f: &FnTable, region: &Domain, k: &Q) -> Result<SmoothCertificate> {
    let pts = region.points();
    let vals: Vec<Q> = pts.iter().map(|p| f.get(p).abs()).collect();
    let mut pairs = 0u64;
    for (i, x) in pts.iter().enumerate() {
        for (j, y) in pts.iter().enumerate() {
            if i == j {
                continue;
            }
            pairs += 1;
            let kd = pow(k, dist(x, y) as u32);
            if vals[i] > kd * &vals[j] {
                return Err(Error::cert("smoothness", format!("pair {x:?}, {y:?} violates K = {k}")));
            }
        }
    }
    Ok(SmoothCertificate { k: k.clone(), region: region.clone(), pairs_checked: pairs, by_adjacency: false })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::qr;
    use alloc::vec;

    #[test]
    fn b_family_membership() {
        // lambda(t) proportional to 1/(t+1)^2 on {0,1,2}.
        let w = [q(1), qr(1, 4), qr(1, 9)];
        let s: Q = w.iter().sum();
        let lam = FnTable::univariate(&w.iter().map(|x| x / &s).collect::<Vec<_>>());
        assert!(FamilySpec::b(2, qr(1, 2), q(0)).contains(&lam).holds());
        assert!(!FamilySpec::b(1, qr(1, 2), q(0)).contains(&lam).holds());
        assert!(!FamilySpec::b(2, q(2), q(0)).contains(&lam).holds());
        let shifted = lam.translate(&[1], Domain::boxed(&[3])).unwrap();
        assert!(!FamilySpec::b_star(2, qr(1, 2), q(0), 0).contains(&shifted).holds());
        assert!(FamilySpec::b_star(2, qr(1, 2), q(0), 1).contains(&shifted).holds());
        let c = best_b_star_constant(&shifted, &q(0), 1);
        assert!(FamilySpec::b_star(2, c.clone(), q(0), 1).contains(&shifted).holds());
        assert!(!FamilySpec::b_star(2, c + qr(1, 1000), q(0), 1).contains(&shifted).holds());
    }

    #[test]
    fn exponential_rate_is_bracketed() {
        // lambda(t) = 2^{-t}/(t+1)^2 normalized, alpha = 1.
        let w: Vec<Q> = (0..4).map(|t| crate::rational::pow2(-t) / q((t + 1) * (t + 1))).collect();
        let s: Q = w.iter().sum();
        let lam = FnTable::univariate(&w.iter().map(|x| x / &s).collect::<Vec<_>>());
        let c = best_b_star_constant(&lam, &q(1), 0);
        assert!(c > qr(1, 2) && c <= q(1));
        assert!(FamilySpec::b_star(3, c, q(1), 0).contains(&lam).holds());
    }

    #[test]
    fn smoothness_adjacency_matches_all_pairs() {
        let f = FnTable::from_fn(Domain::boxed(&[2, 2]), |x| crate::rational::pow2(x[0] - 2 * x[1]));
        let k = min_smooth_constant(&f, f.domain()).unwrap().unwrap();
        assert_eq!(k, q(4));
        check_smooth(&f, f.domain(), &k).unwrap();
        check_smooth_all_pairs(&f, f.domain(), &k).unwrap();
        assert!(check_smooth(&f, f.domain(), &q(3)).is_err());
        assert!(check_smooth_all_pairs(&f, f.domain(), &q(3)).is_err());
        let trunc = Domain::boxed(&[2, 2]).at_most(2);
        check_smooth_all_pairs(&f, &trunc, &min_smooth_constant(&f, &trunc).unwrap().unwrap()).unwrap();
        let s = f.sum();
        let dist_f = f.scale(&s.recip());
        assert!(FamilySpec::Smooth { n: 2, k: q(4), delta: 0 }.contains(&dist_f).holds());
        let g = FnTable::from_entries(Domain::boxed(&[1]), vec![(vec![0], q(1))]).unwrap();
        assert_eq!(min_smooth_constant(&g, g.domain()).unwrap(), None);
    }
}
