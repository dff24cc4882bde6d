//! Exact rational scalars and small arithmetic helpers.
//!
//! [`Q`] is an arbitrary-precision rational that is always kept in lowest
//! terms with a positive denominator. Rationals are rendered and parsed in the
//! `"p/q"` form used by every file format in the workspace; floats never
//! appear on exact paths.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

/// Exact rational number.
pub type Q = num_rational::BigRational;

/// The rational `n`.
pub fn q(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

/// The rational `n / d`; panics if `d == 0`.
pub fn qr(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

/// The rational with integer value `n`.
pub fn qi(n: BigInt) -> Q {
    Q::from_integer(n)
}

/// Renders `x` as `"p/q"`, or `"p"` when the denominator is one.
pub fn to_pq(x: &Q) -> String {
    if x.denom().is_one() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

/// Parses `"p/q"` or `"p"` into a reduced rational.
pub fn parse_q(s: &str) -> Result<Q> {
    let s = s.trim();
    let bad = || Error::Parse(format!("not a rational: {s:?}"));
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let n: BigInt = n.parse().map_err(|_| bad())?;
    let d: BigInt = d.parse().map_err(|_| bad())?;
    if d.is_zero() {
        return Err(Error::Parse(format!("zero denominator in {s:?}")));
    }
    Ok(Q::new(n, d))
}

/// `base^exp` for a non-negative integer exponent.
pub fn pow(base: &Q, exp: u32) -> Q {
    let mut out = Q::one();
    for _ in 0..exp {
        out *= base;
    }
    out
}

/// `2^k` as a rational, for any integer `k`.
pub fn pow2(k: i64) -> Q {
    let p = BigInt::one() << k.unsigned_abs();
    if k >= 0 {
        qi(p)
    } else {
        Q::new(BigInt::one(), p)
    }
}

/// Binomial coefficient `C(n, k)` (zero when `k > n`).
pub fn binom(n: u64, k: u64) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}

/// Binomial coefficient as a rational.
pub fn binom_q(n: u64, k: u64) -> Q {
    qi(binom(n, k))
}

/// `n!` as an integer.
pub fn factorial(n: u64) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, i| acc * BigInt::from(i))
}

/// Smallest integer `>= x`.
pub fn ceil_q(x: &Q) -> BigInt {
    x.ceil().to_integer()
}

/// Largest integer `<= x`.
pub fn floor_q(x: &Q) -> BigInt {
    x.floor().to_integer()
}

/// Converts a non-negative integer that fits in `u64`.
pub fn to_u64(x: &BigInt) -> Option<u64> {
    u64::try_from(x).ok()
}

/// Integer square root `floor(sqrt(x))` of a non-negative integer.
pub fn isqrt(x: &BigInt) -> BigInt {
    assert!(!x.is_negative(), "isqrt of a negative number");
    x.sqrt()
}

/// Integer `k`-th root `floor(x^(1/k))` of a non-negative integer.
pub fn iroot(x: &BigUint, k: u32) -> BigUint {
    x.nth_root(k)
}

/// Approximate `f64` value of `x`, for display and floating cross-checks only.
pub fn to_f64(x: &Q) -> f64 {
    // Scale to keep ~60 significant bits regardless of magnitude.
    let n = x.numer();
    let d = x.denom();
    let nb = n.bits() as i64;
    let db = d.bits() as i64;
    let shift = 62 - (nb - db);
    let scaled = if shift >= 0 { (n << shift as usize) / d } else { n / (d << (-shift) as usize) };
    let mant = match scaled.to_u64_digits() {
        (Sign::NoSign, _) => 0.0,
        (_, digits) => digits.iter().rev().fold(0.0f64, |acc, &dg| acc * 18446744073709551616.0 + dg as f64),
    };
    let signed = if scaled.is_negative() { -mant } else { mant };
    signed * pow2_f64(-shift)
}

fn pow2_f64(k: i64) -> f64 {
    let mut out = 1.0f64;
    let step = if k >= 0 { 2.0 } else { 0.5 };
    for _ in 0..k.unsigned_abs() {
        out *= step;
    }
    out
}

/// Exact decomposition of a rational into `(sign, numerator, denominator)`.
pub fn parts(x: &Q) -> (Sign, BigUint, BigUint) {
    let (s, n) = x.numer().clone().into_parts();
    let d = x.denom().magnitude().clone();
    (s, n, d)
}

/// Maximum of a non-empty slice of rationals.
pub fn max_of(xs: &[Q]) -> Option<Q> {
    xs.iter().cloned().reduce(|a, b| if a >= b { a } else { b })
}

/// Minimum of a non-empty slice of rationals.
pub fn min_of(xs: &[Q]) -> Option<Q> {
    xs.iter().cloned().reduce(|a, b| if a <= b { a } else { b })
}

/// Sum of absolute values.
pub fn l1(xs: impl IntoIterator<Item = Q>) -> Q {
    xs.into_iter().fold(Q::zero(), |acc, x| acc + x.abs())
}

/// `gcd`-reduced common denominator of a list, useful for integer scaling.
pub fn common_denominator(xs: &[Q]) -> BigInt {
    xs.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()))
}

/// Renders a vector of rationals in `"p/q"` form.
pub fn vec_to_pq(xs: &[Q]) -> Vec<String> {
    xs.iter().map(to_pq).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_render_round_trip() {
        for s in ["0", "1", "-3/4", "10/4", "7"] {
            let x = parse_q(s).unwrap();
            assert_eq!(parse_q(&to_pq(&x)).unwrap(), x);
        }
        assert_eq!(to_pq(&parse_q("10/4").unwrap()), "5/2");
        assert!(parse_q("1/0").is_err());
        assert!(parse_q("abc").is_err());
    }

    #[test]
    fn binomials_and_powers() {
        assert_eq!(binom(6, 2), BigInt::from(15));
        assert_eq!(binom(3, 5), BigInt::zero());
        assert_eq!(pow2(-3), qr(1, 8));
        assert_eq!(pow(&qr(2, 3), 3), qr(8, 27));
        assert_eq!(factorial(5), BigInt::from(120));
    }

    #[test]
    fn float_view_is_close() {
        let x = qr(1, 3);
        assert!((to_f64(&x) - 1.0 / 3.0).abs() < 1e-15);
        assert!((to_f64(&qr(-22, 7)) + 22.0 / 7.0).abs() < 1e-14);
        assert_eq!(to_f64(&q(0)), 0.0);
    }
}
