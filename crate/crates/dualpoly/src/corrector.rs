//! Corrector objects.
//!
//! A corrector `zeta` equals one at an anchor point, is otherwise supported on
//! points of weight at most `d`, and is orthogonal to every polynomial of
//! degree at most `d`; adding a multiple of it moves `l1` mass without being
//! detected by low-degree polynomials.
//!
//! * [`build_zeta_cube`]: the symmetric corrector on `{0,1}^n` with anchor
//!   `1^n`. Writing `a_k` for its value at each point of weight `k <= d`,
//!   orthogonality to `t^0, ..., t^d` after symmetrization is the square system
//!   `sum_{k<=d} C(n,k) k^j a_k = -n^j`, solved exactly; its determinant is
//!   recorded.
//! * [`build_zeta_u`]: the push-forward of the cube corrector on
//!   `{0,1}^{|u|}` under block sums of sizes `u_1, ..., u_n`, anchored at `u`.
//! * [`build_zeta_uv`]: the reflection `x -> (|x_i - v_i|)_i` of `zeta_{u*}`
//!   with `u* = (|u_i - v_i|)_i`, anchored at `u` and living on `cube(u, v)`.

use alloc::format;
use alloc::vec::Vec;
use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::domain::{dist, weight, Domain, Point};
use crate::error::{Error, Result};
use crate::linalg::{det, solve};
use crate::orth::orth_at_least;
use crate::rational::{binom, binom_q, pow2, Q};
use crate::table::FnTable;

/// Verified properties of a corrector.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ZetaCertificate {
    /// Anchor point (value one).
    pub anchor: Point,
    /// Reference point for the weight condition (`0` except for `zeta_{u,v}`).
    pub origin: Point,
    /// Degree budget `d`.
    pub d: u32,
    /// `||zeta||_1`.
    pub l1: Q,
    /// `1 + 2^d C(|u|, d)`.
    pub l1_bound: Q,
    /// `||zeta||_inf`.
    pub linf: Q,
    /// Determinant of the level system that produced the values.
    pub determinant: Q,
}

/// Per-level values `a_0..a_d` of the symmetric corrector on `{0,1}^n`
/// together with the determinant of the level system.
pub fn zeta_levels(n: u64, d: u32) -> Result<(Vec<Q>, Q)> {
    if u64::from(d) >= n {
        return Err(Error::pre("zeta", format!("need d < n, got d = {d}, n = {n}")));
    }
    let k_max = d as usize;
    let a: Vec<Vec<Q>> = (0..=k_max)
        .map(|j| {
            (0..=k_max)
                .map(|k| binom_q(n, k as u64) * Q::from_integer(num_traits::pow(BigInt::from(k), j)))
                .collect()
        })
        .collect();
    let b: Vec<Q> = (0..=k_max).map(|j| -Q::from_integer(num_traits::pow(BigInt::from(n), j))).collect();
    let determinant = det(&a);
    if determinant.is_zero() {
        return Err(Error::cert("zeta", "singular level system"));
    }
    let levels = solve(&a, &b).ok_or_else(|| Error::cert("zeta", "singular level system"))?;
    Ok((levels, determinant))
}

/// `1 + 2^d C(m, d)`.
pub fn l1_bound(m: u64, d: u32) -> Q {
    Q::one() + pow2(i64::from(d)) * binom_q(m, u64::from(d))
}

/// The symmetric corrector on `{0,1}^n` anchored at `1^n`.
pub fn build_zeta_cube(n: usize, d: u32) -> Result<(FnTable, ZetaCertificate)> {
    if n > 20 {
        return Err(Error::TooLarge(format!("dense corrector on {{0,1}}^{n}")));
    }
    let (levels, determinant) = zeta_levels(n as u64, d)?;
    let dom = Domain::Hypercube(n);
    let z = FnTable::from_fn(dom, |x| {
        let w = weight(x) as usize;
        if w == n {
            Q::one()
        } else if w <= d as usize {
            levels[w].clone()
        } else {
            Q::zero()
        }
    });
    let cert = certify(&z, alloc::vec![1; n], alloc::vec![0; n], d, determinant)?;
    Ok((z, cert))
}

/// The corrector `zeta_u` on the box `{0..u_1} x ... x {0..u_n}`.
pub fn build_zeta_u(u: &[i64], d: u32) -> Result<(FnTable, ZetaCertificate)> {
    let (z, determinant) = zeta_u_raw(u, d)?;
    let cert = certify(&z, u.to_vec(), alloc::vec![0; u.len()], d, determinant)?;
    Ok((z, cert))
}

/// `zeta_u` without certification, with the determinant of its level system.
/// Used in bulk by aggregates that certify the final sum instead.
pub fn zeta_u_raw(u: &[i64], d: u32) -> Result<(FnTable, Q)> {
    if u.iter().any(|&c| c < 0) {
        return Err(Error::pre("zeta_u", "anchor must be non-negative"));
    }
    let total = weight(u) as u64;
    let (levels, determinant) = zeta_levels(total, d)?;
    let dom = Domain::boxed(u);
    let mut entries: Vec<(Point, Q)> = Vec::new();
    for v in low_weight_points(u, i64::from(d)) {
        let w = weight(&v) as usize;
        let mult: BigInt = u.iter().zip(&v).map(|(&a, &b)| binom(a as u64, b as u64)).product();
        entries.push((v, &levels[w] * Q::from_integer(mult)));
    }
    entries.push((u.to_vec(), Q::one()));
    Ok((FnTable::from_entries(dom, entries)?, determinant))
}

/// Points of `prod {0..u_i}` of weight at most `w`, without enumerating the box.
fn low_weight_points(u: &[i64], w: i64) -> Vec<Point> {
    let mut out = Vec::new();
    let mut cur = alloc::vec![0i64; u.len()];
    fn rec(i: usize, left: i64, u: &[i64], cur: &mut Vec<i64>, out: &mut Vec<Point>) {
        if i == u.len() {
            out.push(cur.clone());
            return;
        }
        for c in 0..=u[i].min(left) {
            cur[i] = c;
            rec(i + 1, left - c, u, cur, out);
        }
        cur[i] = 0;
    }
    rec(0, w, u, &mut cur, &mut out);
    out
}

/// The corrector `zeta_{u,v}` on `cube(u, v)`, anchored at `u`, supported on
/// `{u} u {x : |x - v| <= d}`.
pub fn build_zeta_uv(u: &[i64], v: &[i64], d: u32) -> Result<(FnTable, ZetaCertificate)> {
    let (z, determinant) = zeta_uv_raw(u, v, d)?;
    let cert = certify(&z, u.to_vec(), v.to_vec(), d, determinant)?;
    Ok((z, cert))
}

/// `zeta_{u,v}` without certification, with its level-system determinant.
pub fn zeta_uv_raw(u: &[i64], v: &[i64], d: u32) -> Result<(FnTable, Q)> {
    if u.len() != v.len() {
        return Err(Error::DimensionMismatch { left: u.len(), right: v.len() });
    }
    let ustar: Vec<i64> = u.iter().zip(v).map(|(a, b)| (a - b).abs()).collect();
    let (base, determinant) = zeta_u_raw(&ustar, d)?;
    let dom = Domain::cube(u, v);
    let entries = base.iter().map(|(w, val)| {
        let x: Point = w
            .iter()
            .zip(u.iter().zip(v))
            .map(|(&wi, (&ui, &vi))| if ui >= vi { vi + wi } else { vi - wi })
            .collect();
        (x, val.clone())
    });
    Ok((FnTable::from_entries(dom, entries.collect::<Vec<_>>())?, determinant))
}

/// Checks the four corrector properties plus the sup-norm bound.
fn certify(z: &FnTable, anchor: Point, origin: Point, d: u32, determinant: Q) -> Result<ZetaCertificate> {
    let m = dist(&anchor, &origin) as u64;
    if z.get(&anchor) != Q::one() {
        return Err(Error::cert("zeta", "value at the anchor is not one"));
    }
    for (p, _) in z.iter() {
        if *p != anchor && dist(p, &origin) > i64::from(d) {
            return Err(Error::cert("zeta", format!("support point {p:?} is too far from the origin")));
        }
    }
    if !orth_at_least(z, d + 1) {
        return Err(Error::cert("zeta", format!("not orthogonal to degree {d}")));
    }
    let l1 = z.l1();
    let bound = l1_bound(m, d);
    if l1 > bound {
        return Err(Error::cert("zeta", format!("||zeta||_1 = {l1} exceeds {bound}")));
    }
    let linf = z.linf();
    let linf_bound = pow2(i64::from(d)) * binom_q(m, u64::from(d));
    if linf > linf_bound.clone().max(Q::one()) {
        return Err(Error::cert("zeta", format!("||zeta||_inf = {linf} exceeds {linf_bound}")));
    }
    if z.iter().any(|(_, v)| v.is_zero()) {
        return Err(Error::cert("zeta", "stored zero"));
    }
    Ok(ZetaCertificate { anchor, origin, d, l1, l1_bound: bound, linf, determinant })
}

/// Re-checks a corrector table against its certificate.
pub fn verify_zeta(z: &FnTable, cert: &ZetaCertificate) -> Result<()> {
    let again = certify(z, cert.anchor.clone(), cert.origin.clone(), cert.d, cert.determinant.clone())?;
    if again != *cert {
        return Err(Error::cert("zeta", "certificate does not match the table"));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::q;

    #[test]
    fn small_cube_correctors() {
        let (z, _) = build_zeta_cube(2, 0).unwrap();
        assert_eq!(z.get(&[1, 1]), q(1));
        assert_eq!(z.get(&[0, 0]), q(-1));
        let (z, c) = build_zeta_cube(2, 1).unwrap();
        assert_eq!(z.dense(), alloc::vec![q(1), q(-1), q(-1), q(1)]);
        assert_eq!(c.l1, q(4));
        let (_, c) = build_zeta_cube(6, 2).unwrap();
        assert!(c.l1 <= q(61));
        assert!(build_zeta_cube(3, 3).is_err());
    }

    #[test]
    fn push_forward_correctors() {
        let (z, _) = build_zeta_u(&[2, 0], 0).unwrap();
        assert_eq!(z.get(&[2, 0]), q(1));
        assert_eq!(z.get(&[0, 0]), q(-1));
        let (z11, _) = build_zeta_u(&[1, 1], 1).unwrap();
        let (zc, _) = build_zeta_cube(2, 1).unwrap();
        assert_eq!(z11.dense(), zc.dense());
        let (_, c) = build_zeta_u(&[3, 1], 1).unwrap();
        assert!(c.l1 <= q(9));
    }

    #[test]
    fn reflected_correctors() {
        let (a, _) = build_zeta_uv(&[2, 1], &[0, 0], 1).unwrap();
        let (b, _) = build_zeta_u(&[2, 1], 1).unwrap();
        assert_eq!(a, b);
        let (z, c) = build_zeta_uv(&[0, 0], &[2, 0], 1).unwrap();
        assert_eq!(z.get(&[0, 0]), q(1));
        for (p, _) in z.iter() {
            assert!(*p == alloc::vec![0, 0] || dist(p, &[2, 0]) <= 1);
        }
        verify_zeta(&z, &c).unwrap();
    }
}
