//! Rational brackets for irrational constants.
//!
//! Several inequalities involve quantities such as `2^{ct/sqrt(n)}`, `e`,
//! `ln n` or `pi`. They are never approximated by floats. Instead each is
//! enclosed in a [`Bracket`] `[lo, hi]` of exact rationals (dyadic where
//! convenient), and every check is evaluated against the adverse side of the
//! bracket, so a PASS is always sound.

use alloc::vec::Vec;
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::rational::{pow2, q, qi, qr, Q};

/// Default number of fractional bits used for exponent brackets.
pub const EXP_BITS: u32 = 8;
/// Default number of extra precision bits used for root extraction.
pub const ROOT_BITS: u32 = 40;

/// A closed interval `[lo, hi]` known to contain some real quantity.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Bracket {
    /// Lower end; never exceeds the enclosed value.
    pub lo: Q,
    /// Upper end; never below the enclosed value.
    pub hi: Q,
}

impl Bracket {
    /// Degenerate bracket for an exactly known rational.
    pub fn exact(x: Q) -> Self {
        Bracket { lo: x.clone(), hi: x }
    }

    /// Bracket with the given ends; panics if `lo > hi`.
    pub fn new(lo: Q, hi: Q) -> Self {
        assert!(lo <= hi, "bracket ends out of order");
        Bracket { lo, hi }
    }

    /// Product of two brackets of non-negative quantities.
    pub fn mul_nonneg(&self, other: &Bracket) -> Bracket {
        debug_assert!(!self.lo.is_negative() && !other.lo.is_negative());
        Bracket::new(&self.lo * &other.lo, &self.hi * &other.hi)
    }

    /// Reciprocal of a bracket of a positive quantity.
    pub fn recip_pos(&self) -> Bracket {
        assert!(self.lo.is_positive(), "reciprocal of a non-positive bracket");
        Bracket::new(self.hi.recip(), self.lo.recip())
    }

    /// Integer power of a bracket of a non-negative quantity.
    pub fn pow_nonneg(&self, e: u32) -> Bracket {
        let mut out = Bracket::exact(Q::one());
        for _ in 0..e {
            out = out.mul_nonneg(self);
        }
        out
    }

    /// Scales by a non-negative rational.
    pub fn scale_nonneg(&self, s: &Q) -> Bracket {
        debug_assert!(!s.is_negative());
        Bracket::new(&self.lo * s, &self.hi * s)
    }

    /// Width `hi - lo`.
    pub fn width(&self) -> Q {
        &self.hi - &self.lo
    }

    /// True when the enclosed value is certainly `<= x`.
    pub fn certainly_le(&self, x: &Q) -> bool {
        &self.hi <= x
    }

    /// True when the enclosed value is certainly `>= x`.
    pub fn certainly_ge(&self, x: &Q) -> bool {
        &self.lo >= x
    }
}

fn floor_div_pow2(m: &BigInt, k: u32) -> (BigInt, BigInt) {
    let d = BigInt::one() << k;
    m.div_mod_floor(&d)
}

/// Rounds a bracket outward to dyadics with `bits` fractional bits.
fn round_out(b: Bracket, bits: u32) -> Bracket {
    let den = qi(BigInt::one() << bits);
    let lo = qi((&b.lo * &den).floor().to_integer()) / &den;
    let hi = qi((&b.hi * &den).ceil().to_integer()) / den;
    Bracket::new(lo, hi)
}

/// Bracket for `2^{m / 2^k}` with integer `m`.
///
/// The fractional part is expanded in binary and assembled from brackets of
/// `2^{1/2^i}`, each obtained by a further square root of the previous one;
/// every step rounds outward, so the result always encloses the true value.
pub fn exp2_dyadic(m: &BigInt, k: u32) -> Bracket {
    let (whole, rem) = floor_div_pow2(m, k);
    let whole_i64 = i64::try_from(&whole).expect("exponent out of range");
    if rem.is_zero() {
        return Bracket::exact(pow2(whole_i64));
    }
    let rem_u = u64::try_from(&rem).expect("remainder fits");
    let bits = 2 * ROOT_BITS;
    // chain[i] encloses 2^{1/2^{i+1}}
    let mut chain: Vec<Bracket> = Vec::with_capacity(k as usize);
    let mut cur = Bracket::exact(q(2));
    for _ in 0..k {
        cur = Bracket::new(sqrt_prec(&cur.lo, bits).lo, sqrt_prec(&cur.hi, bits).hi);
        chain.push(cur.clone());
    }
    let mut acc = Bracket::exact(Q::one());
    for j in 0..k {
        if (rem_u >> j) & 1 == 1 {
            // bit j contributes 2^{2^j / 2^k} = 2^{1/2^{k-j}}
            acc = round_out(acc.mul_nonneg(&chain[(k - j - 1) as usize]), bits);
        }
    }
    acc.scale_nonneg(&pow2(whole_i64))
}

/// Bracket for `2^x` with rational `x`.
pub fn exp2(x: &Q) -> Bracket {
    exp2_prec(x, EXP_BITS)
}

/// Bracket for `2^x` using `k` fractional bits for the exponent.
pub fn exp2_prec(x: &Q, k: u32) -> Bracket {
    let scaled = x * qi(BigInt::one() << k);
    let lo_m = scaled.floor().to_integer();
    let hi_m = scaled.ceil().to_integer();
    let lo = exp2_dyadic(&lo_m, k).lo;
    let hi = exp2_dyadic(&hi_m, k).hi;
    Bracket::new(lo, hi)
}

/// Bracket for `sqrt(y_sq)` with a non-negative rational `y_sq`, as dyadics
/// with `k` fractional bits.
pub fn sqrt_prec(y_sq: &Q, k: u32) -> Bracket {
    assert!(!y_sq.is_negative(), "square root of a negative number");
    let four_k = qi(BigInt::one() << (2 * k));
    let lo_int = (y_sq * &four_k).floor().to_integer().sqrt();
    let hi_floor = (y_sq * &four_k).ceil().to_integer();
    let mut hi_int = hi_floor.sqrt();
    if &hi_int * &hi_int < hi_floor {
        hi_int += 1;
    }
    let den = qi(BigInt::one() << k);
    Bracket::new(qi(lo_int) / &den, qi(hi_int) / den)
}

/// Bracket for `sqrt(y_sq)` with the default precision.
pub fn sqrt(y_sq: &Q) -> Bracket {
    sqrt_prec(y_sq, 2 * ROOT_BITS)
}

/// Bracket for `2^{sqrt(y_sq)}` where only the square of the exponent is
/// rational, e.g. `2^{c t / sqrt(n)}` has `y_sq = c^2 t^2 / n`.
pub fn exp2_sqrt(y_sq: &Q) -> Bracket {
    let y = sqrt_prec(y_sq, EXP_BITS);
    let lo = exp2_prec(&y.lo, EXP_BITS).lo;
    let hi = exp2_prec(&y.hi, EXP_BITS).hi;
    Bracket::new(lo, hi)
}

/// Bracket for Euler's number `e`.
pub fn e() -> Bracket {
    Bracket::new(qr(271_828_182_845, 100_000_000_000), qr(271_828_182_846, 100_000_000_000))
}

/// Bracket for `pi`.
pub fn pi() -> Bracket {
    Bracket::new(qr(314_159_265_358_979, 100_000_000_000_000), qr(314_159_265_358_980, 100_000_000_000_000))
}

/// Bracket for `ln(1 + ...)` via the series `2 atanh z`, `z = (x-1)/(x+1)`,
/// valid for `x` in `[1, 2]`.
fn ln_small(x: &Q, terms: u32) -> Bracket {
    let z = (x - q(1)) / (x + q(1));
    let z2 = &z * &z;
    let mut sum = Q::zero();
    let mut zp = z.clone();
    for k in 0..terms {
        sum += &zp / q(2 * k as i64 + 1);
        zp *= &z2;
    }
    let lo = &sum * q(2);
    // Tail of 2 * sum_{j >= terms} z^{2j+1}/(2j+1) is at most
    // 2 z^{2 terms + 1} / ((2 terms + 1)(1 - z^2)).
    let tail = q(2) * &zp / (q(2 * terms as i64 + 1) * (q(1) - &z2));
    Bracket::new(lo.clone(), lo + tail)
}

/// Bracket for the natural logarithm of a rational `x >= 1`.
pub fn ln(x: &Q) -> Bracket {
    assert!(x >= &q(1), "ln bracket implemented for x >= 1");
    let mut j: i64 = 0;
    let mut y = x.clone();
    while y > q(2) {
        y /= q(2);
        j += 1;
    }
    let ln2 = ln_small(&q(2), 60);
    let rest = ln_small(&y, 60);
    Bracket::new(&ln2.lo * q(j) + rest.lo, &ln2.hi * q(j) + rest.hi)
}

/// Bracket for `log2 x` with rational `x >= 1`.
pub fn log2(x: &Q) -> Bracket {
    let l = ln(x);
    let l2 = ln(&q(2));
    Bracket::new(&l.lo / &l2.hi, &l.hi / &l2.lo)
}

/// `ceil(log2 x)` for a positive integer `x`, computed exactly.
pub fn ceil_log2(x: u64) -> u32 {
    assert!(x >= 1);
    let mut k = 0;
    while (1u128 << k) < x as u128 {
        k += 1;
    }
    k
}

/// Bracket for `alpha^{e/2}` given a bracket of `alpha` in `(0, 1]` and an
/// integer `e >= 0`.
pub fn pow_half(alpha: &Bracket, e: u64) -> Bracket {
    let whole = alpha.pow_nonneg((e / 2) as u32);
    if e % 2 == 0 {
        return whole;
    }
    let lo_root = sqrt_prec(&alpha.lo, 2 * ROOT_BITS).lo;
    let hi_root = sqrt_prec(&alpha.hi, 2 * ROOT_BITS).hi;
    whole.mul_nonneg(&Bracket::new(lo_root, hi_root))
}

/// Largest dyadic `a / 2^k` not exceeding `x`.
pub fn dyadic_below(x: &Q, k: u32) -> Q {
    let den = qi(BigInt::one() << k);
    qi((x * &den).floor().to_integer()) / den
}

/// Brackets of `2^{c t / sqrt(n)}` for `t = 0..=t_max`.
pub fn envelope_brackets(c: &Q, n: u64, t_max: u64) -> Vec<Bracket> {
    (0..=t_max)
        .map(|t| {
            let y_sq = c * c * q(t as i64) * q(t as i64) / q(n as i64);
            exp2_sqrt(&y_sq)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::to_f64;

    fn contains(b: &Bracket, v: f64) -> bool {
        to_f64(&b.lo) <= v + 1e-12 && v - 1e-12 <= to_f64(&b.hi)
    }

    #[test]
    fn exp2_brackets_contain_true_value() {
        for (n, d) in [(1, 3), (5, 2), (-7, 4), (0, 1), (13, 10)] {
            let x = qr(n, d);
            let b = exp2(&x);
            assert!(contains(&b, libm_exp2(n as f64 / d as f64)), "{n}/{d}");
            assert!(to_f64(&b.width()) < 0.01 * to_f64(&b.hi));
        }
        assert_eq!(exp2(&q(3)), Bracket::exact(q(8)));
    }

    fn libm_exp2(x: f64) -> f64 {
        // exp2 through repeated square roots keeps the test free of std.
        let whole = x.floor();
        let frac = x - whole;
        let mut acc = 1.0f64;
        let mut root = 2.0f64;
        let mut f = frac;
        for _ in 0..50 {
            root = sqrt_f64(root);
            f *= 2.0;
            if f >= 1.0 {
                acc *= root;
                f -= 1.0;
            }
        }
        let mut p = 1.0;
        for _ in 0..(whole.abs() as i64) {
            p *= if whole >= 0.0 { 2.0 } else { 0.5 };
        }
        acc * p
    }

    fn sqrt_f64(x: f64) -> f64 {
        let mut g = if x > 1.0 { x } else { 1.0 };
        for _ in 0..100 {
            g = 0.5 * (g + x / g);
        }
        g
    }

    #[test]
    fn sqrt_and_log_brackets() {
        let s = sqrt(&q(2));
        assert!(contains(&s, core::f64::consts::SQRT_2));
        assert!(&s.lo * &s.lo <= q(2) && &s.hi * &s.hi >= q(2));
        let l = ln(&q(10));
        assert!(contains(&l, core::f64::consts::LN_10));
        assert!(to_f64(&l.width()) < 1e-12);
        let l2 = log2(&q(8));
        assert!(contains(&l2, 3.0));
        assert_eq!(ceil_log2(1), 0);
        assert_eq!(ceil_log2(4), 2);
        assert_eq!(ceil_log2(5), 3);
    }

    #[test]
    fn exp2_sqrt_brackets() {
        // 2^{sqrt(2)} ~ 2.665144142690225
        let b = exp2_sqrt(&q(2));
        assert!(contains(&b, 2.665144142690225));
        let b = exp2_sqrt(&q(9));
        assert!(contains(&b, 8.0));
    }

    #[test]
    fn half_powers() {
        let a = Bracket::exact(qr(1, 4));
        let b = pow_half(&a, 3); // (1/4)^{3/2} = 1/8
        assert!(contains(&b, 0.125));
    }
}
