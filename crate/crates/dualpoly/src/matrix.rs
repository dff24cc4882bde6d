//! Pattern matrices, Forster-type sign-rank bounds and communication formulas.
//!
//! * [`PatternMatrix`]: the `(N, n, phi)`-pattern matrix
//!   `A[x, (V, w)] = phi(x|_V xor w)`, where `V` picks one coordinate from
//!   each of the `n` consecutive blocks of size `N/n`. Its spectral norm has
//!   the closed form
//!   `||A||^2 = 2^{N+n} (N/n)^n max_S phi_hat(S)^2 (n/N)^{|S|}`,
//!   kept as an exact rational square ([`PatternMatrix::norm_sq`]).
//! * [`lambda_max_bracket`]: a certified enclosure of the largest eigenvalue
//!   of a symmetric positive semidefinite rational matrix by bisection, each
//!   step decided exactly by Sylvester's criterion on `tI - B` computed with
//!   fraction-free elimination. This is the interval guard for `||A||`.
//! * [`forster_bound`]: `srank(A) >= sqrt(|X||Y|) min|A_xy| / ||A||`, with the
//!   norm enclosed as above, plus [`SignRankBound::with_realization`] for
//!   exhibited real matrices with the same sign pattern.
//! * [`signrank_lb_pattern`]: `gamma T^{d/2}` for pattern matrices of
//!   functions with certified smooth threshold degree, and
//!   [`pattern_pipeline`], the same bound re-derived from a materialized
//!   pattern matrix.
//! * Closed-form discrepancy / communication bounds ([`pm_discrepancy_bound`],
//!   [`pp_lower_bound`], [`upp_range`]) and [`signrank_le_1`].

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::bounds::{log2, sqrt, sqrt_prec, Bracket};
use crate::domain::Domain;
use crate::error::{Error, Result};
use crate::fourier::{fourier, mask_point};
use crate::linalg::{det, rank, Matrix};
use crate::lp::oracles::{discrepancy_2party, smooth_threshold_degree, SignMatrix};
use crate::rational::{common_denominator, pow, pow2, q, qr, Q};
use crate::table::FnTable;

/// Largest number of matrix entries [`PatternMatrix::materialize`] produces.
pub const MATERIALIZE_LIMIT: usize = 1 << 16;

/// Default number of bisection steps in [`lambda_max_bracket`].
pub const BISECTION_STEPS: u32 = 60;

// ---------------------------------------------------------------------------
// Pattern matrices
// ---------------------------------------------------------------------------

/// The `(N, n, phi)`-pattern matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PatternMatrix {
    /// Row length `N`.
    pub big_n: usize,
    /// Arity `n` of `phi`; divides `N`.
    pub n: usize,
    /// `phi` on `{0,1}^n`.
    pub phi: FnTable,
}

/// Closed-form spectral norm of a pattern matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PatternNorm {
    /// `||A||^2`, exact.
    pub norm_sq: Q,
    /// The subset (as a mask) attaining `max_S phi_hat(S)^2 (n/N)^{|S|}`.
    pub argmax: usize,
    /// `phi_hat(argmax)`.
    pub coefficient: Q,
    /// Enclosure of `||A||`.
    pub norm: Bracket,
}

impl PatternMatrix {
    /// Checks `n | N`, `n >= 1` and that `phi` lives on `{0,1}^n`.
    pub fn new(big_n: usize, n: usize, phi: FnTable) -> Result<Self> {
        if n == 0 || big_n == 0 || big_n % n != 0 {
            return Err(Error::pre("pattern_matrix", format!("n = {n} must divide N = {big_n}")));
        }
        let arity = phi.domain().require_hypercube()?;
        if arity != n {
            return Err(Error::DimensionMismatch { left: n, right: arity });
        }
        if big_n > 24 {
            return Err(Error::TooLarge(format!("pattern matrix with N = {big_n}")));
        }
        Ok(PatternMatrix { big_n, n, phi })
    }

    /// Block size `N/n`.
    pub fn block(&self) -> usize {
        self.big_n / self.n
    }

    /// `2^N`.
    pub fn rows(&self) -> usize {
        1 << self.big_n
    }

    /// `(N/n)^n 2^n`.
    pub fn cols(&self) -> usize {
        self.block().pow(self.n as u32) << self.n
    }

    /// Decodes a column index into `(V, w)`: `V[i]` is the absolute
    /// coordinate chosen from block `i`, `w` a mask on `n` bits. The `w`
    /// part varies fastest.
    pub fn column(&self, col: usize) -> (Vec<usize>, usize) {
        let w = col & ((1 << self.n) - 1);
        let mut rest = col >> self.n;
        let b = self.block();
        let mut v = vec![0; self.n];
        for i in (0..self.n).rev() {
            v[i] = i * b + rest % b;
            rest /= b;
        }
        (v, w)
    }

    /// `A[x, (V, w)]` with `x` a mask on `N` bits.
    pub fn entry(&self, x: usize, v: &[usize], w: usize) -> Q {
        let restricted = v.iter().enumerate().fold(0usize, |acc, (i, &c)| acc | ((x >> c & 1) << i));
        self.phi.get(&mask_point(self.n, restricted ^ w))
    }

    /// The full matrix, rows indexed by `x` (mask order) and columns by
    /// [`PatternMatrix::column`].
    pub fn materialize(&self) -> Result<Matrix> {
        let (r, c) = (self.rows(), self.cols());
        if r.saturating_mul(c) > MATERIALIZE_LIMIT {
            return Err(Error::TooLarge(format!("{r} x {c} pattern matrix")));
        }
        let cols: Vec<(Vec<usize>, usize)> = (0..c).map(|j| self.column(j)).collect();
        Ok((0..r).map(|x| cols.iter().map(|(v, w)| self.entry(x, v, *w)).collect()).collect())
    }

    /// The closed-form spectral norm.
    pub fn norm_sq(&self) -> Result<PatternNorm> {
        let spec = fourier(&self.phi)?;
        let ratio = qr(self.n as i64, self.big_n as i64);
        let mut best = (Q::zero(), 0usize);
        for (mask, c) in spec.coeffs().iter().enumerate() {
            let val = c * c * pow(&ratio, mask.count_ones());
            if val > best.0 {
                best = (val, mask);
            }
        }
        let scale = pow2((self.big_n + self.n) as i64) * pow(&q(self.block() as i64), self.n as u32);
        let norm_sq = scale * best.0;
        let norm = sqrt(&norm_sq);
        Ok(PatternNorm { norm: norm.clone(), norm_sq, argmax: best.1, coefficient: spec.get(best.1).clone() })
    }
}

// ---------------------------------------------------------------------------
// Certified eigenvalue enclosures
// ---------------------------------------------------------------------------

/// `M^T M` or `M M^T`, whichever is smaller.
pub fn gram(m: &Matrix) -> Matrix {
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    if cols <= rows {
        (0..cols)
            .map(|i| (0..cols).map(|j| (0..rows).map(|k| &m[k][i] * &m[k][j]).sum()).collect())
            .collect()
    } else {
        (0..rows).map(|i| (0..rows).map(|j| (0..cols).map(|k| &m[i][k] * &m[j][k]).sum()).collect()).collect()
    }
}

/// Sylvester's criterion: every leading principal minor is positive. The
/// minors are the pivots of fraction-free (Bareiss) elimination on the
/// integer matrix `D m`, `D` a common denominator; stops at the first
/// non-positive one.
fn leading_minors_positive(m: &Matrix) -> bool {
    let k = m.len();
    if k == 0 {
        return true;
    }
    let flat: Vec<Q> = m.iter().flatten().cloned().collect();
    let den = common_denominator(&flat);
    let mut a: Vec<Vec<BigInt>> =
        m.iter().map(|row| row.iter().map(|v| (v * Q::from_integer(den.clone())).to_integer()).collect()).collect();
    let mut prev = BigInt::one();
    for p in 0..k {
        if !a[p][p].is_positive() {
            return false;
        }
        for i in p + 1..k {
            for j in p + 1..k {
                a[i][j] = (&a[i][j] * &a[p][p] - &a[i][p] * &a[p][j]) / &prev;
            }
        }
        prev = a[p][p].clone();
    }
    true
}

/// `true` iff the symmetric rational matrix is positive definite.
pub fn is_positive_definite(m: &Matrix) -> bool {
    leading_minors_positive(m)
}

/// Certified enclosure of the largest eigenvalue of a symmetric positive
/// semidefinite matrix: `lo` is a value where `tI - B` is not positive
/// definite, `hi` one where it is.
pub fn lambda_max_bracket(b: &Matrix, steps: u32) -> Bracket {
    let k = b.len();
    let shifted = |t: &Q| -> Matrix {
        (0..k).map(|i| (0..k).map(|j| if i == j { t - &b[i][j] } else { -b[i][j].clone() }).collect()).collect()
    };
    let trace: Q = (0..k).map(|i| b[i][i].clone()).sum();
    let mut lo = Q::zero();
    let mut hi = trace + Q::one();
    for _ in 0..steps {
        let mid = (&lo + &hi) / q(2);
        // Round to a short dyadic to keep the elimination small.
        let mid = crate::bounds::dyadic_below(&mid, 64).max(lo.clone());
        if mid <= lo {
            break;
        }
        if is_positive_definite(&shifted(&mid)) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Bracket::new(lo, hi)
}

/// Certified enclosure of `||M||^2`.
pub fn spectral_norm_sq_bracket(m: &Matrix, steps: u32) -> Bracket {
    lambda_max_bracket(&gram(m), steps)
}

/// Exact verification of a pattern-matrix norm formula against the
/// materialized matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PatternNormCheck {
    /// The closed form.
    pub formula: PatternNorm,
    /// Certified enclosure of `lambda_max(A^T A)`.
    pub bracket: Bracket,
    /// The closed form lies inside the enclosure.
    pub inside: bool,
    /// `det(B - ||A||^2 I) = 0`: the closed form is an exact eigenvalue.
    pub exact_eigenvalue: bool,
}

/// Materializes the pattern matrix and checks the closed form.
pub fn check_pattern_norm(pm: &PatternMatrix, steps: u32) -> Result<PatternNormCheck> {
    let formula = pm.norm_sq()?;
    let a = pm.materialize()?;
    let b = gram(&a);
    let bracket = lambda_max_bracket(&b, steps);
    let inside = bracket.lo <= formula.norm_sq && formula.norm_sq <= bracket.hi;
    let k = b.len();
    let shifted: Matrix = (0..k)
        .map(|i| (0..k).map(|j| if i == j { &b[i][j] - &formula.norm_sq } else { b[i][j].clone() }).collect())
        .collect();
    let exact_eigenvalue = det(&shifted).is_zero();
    Ok(PatternNormCheck { formula, bracket, inside, exact_eigenvalue })
}

// ---------------------------------------------------------------------------
// Forster bound and realizations
// ---------------------------------------------------------------------------

/// How a bound on sign-rank was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundMethod {
    /// Forster's spectral bound on the materialized matrix.
    Forster,
    /// Closed form for pattern matrices of smooth functions.
    PatternFormula,
    /// Rank of an exhibited real matrix with the same sign pattern.
    Realization,
}

/// Lower and upper bounds on the sign-rank of a sign pattern.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SignRankBound {
    /// Certified lower bound.
    pub lower: Q,
    /// Enclosure of the Forster quantity `sqrt(|X||Y|) min|A| / ||A||`
    /// (`lower` is its lower end).
    pub value: Bracket,
    /// Rank of an exhibited realization, if any.
    pub upper: Option<usize>,
    /// Methods used, lower bound first.
    pub methods: Vec<BoundMethod>,
}

impl SignRankBound {
    /// Records the rank of `real` as an upper bound after checking that it
    /// has the sign pattern `signs` (no zero entries) and that the Forster
    /// quantity does not exceed it.
    pub fn with_realization(mut self, signs: &Matrix, real: &Matrix) -> Result<Self> {
        let r = realization_rank(signs, real)?;
        if !self.value.certainly_le(&q(r as i64)) {
            return Err(Error::cert(
                "forster",
                format!("Forster quantity (<= {}) not below the realization rank {r}", self.value.hi),
            ));
        }
        self.upper = Some(r);
        self.methods.push(BoundMethod::Realization);
        Ok(self)
    }
}

/// Rank of `real`, after checking it has the sign pattern of `signs`.
pub fn realization_rank(signs: &Matrix, real: &Matrix) -> Result<usize> {
    if signs.len() != real.len() || signs.iter().zip(real).any(|(a, b)| a.len() != b.len()) {
        return Err(Error::DimensionMismatch { left: signs.len(), right: real.len() });
    }
    for (i, (sr, rr)) in signs.iter().zip(real).enumerate() {
        for (j, (s, r)) in sr.iter().zip(rr).enumerate() {
            if r.is_zero() || s.is_positive() != r.is_positive() {
                return Err(Error::cert("realization", format!("sign disagreement at ({i}, {j})")));
            }
        }
    }
    Ok(rank(real))
}

/// `sqrt(|X||Y|) min|A_xy| / ||A||`, with `||A||` enclosed by bisection.
pub fn forster_bound(m: &Matrix) -> Result<SignRankBound> {
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    if rows == 0 || cols == 0 || m.iter().any(|r| r.len() != cols) {
        return Err(Error::Invalid(String::from("matrix must be non-empty and rectangular")));
    }
    let min_abs = m.iter().flatten().map(|v| v.abs()).min().expect("non-empty");
    if min_abs.is_zero() {
        return Err(Error::pre("forster", "matrix has a zero entry"));
    }
    let norm_sq = spectral_norm_sq_bracket(m, BISECTION_STEPS);
    let numerator = q((rows * cols) as i64) * &min_abs * &min_abs;
    // value^2 = numerator / ||A||^2.
    let sq = Bracket::new(&numerator / &norm_sq.hi, &numerator / &norm_sq.lo);
    let value = Bracket::new(sqrt_prec(&sq.lo, 40).lo, sqrt_prec(&sq.hi, 40).hi);
    Ok(SignRankBound { lower: value.lo.clone(), value, upper: None, methods: vec![BoundMethod::Forster] })
}

/// Converts a `+1/-1` matrix to a rational one.
pub fn sign_to_matrix(m: &SignMatrix) -> Matrix {
    m.iter().map(|r| r.iter().map(|&v| q(v)).collect()).collect()
}

/// `true` iff the sign pattern (no zero entries) is an outer product `u v^T`
/// of sign vectors.
pub fn signrank_le_1(m: &Matrix) -> bool {
    let Some(first) = m.first() else { return true };
    if m.iter().flatten().any(Zero::is_zero) {
        return false;
    }
    let base: Vec<bool> = first.iter().map(Signed::is_positive).collect();
    m.iter().all(|row| {
        let flip = row[0].is_positive() != base[0];
        row.len() == base.len() && row.iter().zip(&base).all(|(v, b)| v.is_positive() == (*b != flip))
    })
}

/// The `2^n x 2^n` character matrix `H[x, y] = (-1)^{<x, y>}`.
pub fn character_matrix(n: usize) -> Matrix {
    (0..1usize << n)
        .map(|x| (0..1usize << n).map(|y| if (x & y).count_ones() % 2 == 0 { q(1) } else { q(-1) }).collect())
        .collect()
}

/// The `rows x cols` all-ones matrix.
pub fn all_ones(rows: usize, cols: usize) -> Matrix {
    vec![vec![Q::one(); cols]; rows]
}

/// Order-`k` sign pattern with `+1` on and above the diagonal, `-1` below.
pub fn staircase_upper(k: usize) -> Matrix {
    (0..k).map(|i| (0..k).map(|j| if j >= i { q(1) } else { q(-1) }).collect()).collect()
}

/// Rank-2 realization `[2(j - i) + 1]` of [`staircase_upper`].
pub fn staircase_upper_realization(k: usize) -> Matrix {
    (0..k).map(|i| (0..k).map(|j| q(2 * (j as i64 - i as i64) + 1)).collect()).collect()
}

/// Order-`k` sign pattern with `+1` on the diagonal and `-1` elsewhere.
pub fn staircase_identity(k: usize) -> Matrix {
    (0..k).map(|i| (0..k).map(|j| if i == j { q(1) } else { q(-1) }).collect()).collect()
}

/// Realization `[<v_i, v_j> - (1 - eps)]` of [`staircase_identity`] with
/// pairwise distinct rational unit vectors `v_t = ((1-t^2)/(1+t^2), 2t/(1+t^2))`
/// and `eps` half the gap between `1` and the largest off-diagonal inner
/// product. It has rank at most 3.
pub fn staircase_identity_realization(k: usize) -> Matrix {
    let v: Vec<(Q, Q)> = (0..k as i64)
        .map(|t| {
            let d = q(1 + t * t);
            (q(1 - t * t) / &d, q(2 * t) / d)
        })
        .collect();
    let ip = |i: usize, j: usize| &v[i].0 * &v[j].0 + &v[i].1 * &v[j].1;
    let mut max_off = q(-1);
    for i in 0..k {
        for j in 0..k {
            if i != j {
                max_off = max_off.max(ip(i, j));
            }
        }
    }
    let eps = (Q::one() - max_off) / q(2);
    let shift = Q::one() - eps;
    (0..k).map(|i| (0..k).map(|j| ip(i, j) - &shift).collect()).collect()
}

// ---------------------------------------------------------------------------
// Sign-rank from smooth threshold degree
// ---------------------------------------------------------------------------

/// `gamma T^{d/2}` for the pattern matrix of a function of certified
/// `gamma`-smooth threshold degree `>= d`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PatternSignRank {
    /// Smoothness.
    pub gamma: Q,
    /// Certified degree.
    pub d: u32,
    /// Block size `T`.
    pub t: u64,
    /// `degthr(f, gamma)` as computed by the LP oracle.
    pub certified_degree: u32,
    /// Enclosure of `gamma T^{d/2}`.
    pub bound: Bracket,
}

/// `gamma T^{d/2}` after certifying `degthr(f, gamma) >= d` with the LP oracle.
pub fn signrank_lb_pattern(f: &FnTable, gamma: &Q, d: u32, t: u64) -> Result<PatternSignRank> {
    if t == 0 {
        return Err(Error::pre("signrank_lb_pattern", "need T >= 1"));
    }
    let ans = smooth_threshold_degree(f, gamma)?;
    if ans.value < d {
        return Err(Error::pre(
            "signrank_lb_pattern",
            format!("smooth threshold degree {} < d = {d} at gamma = {gamma}", ans.value),
        ));
    }
    Ok(PatternSignRank { gamma: gamma.clone(), d, t, certified_degree: ans.value, bound: pattern_formula(gamma, d, t) })
}

/// Enclosure of `gamma T^{d/2}`.
pub fn pattern_formula(gamma: &Q, d: u32, t: u64) -> Bracket {
    let tq = q(t as i64);
    let whole = pow(&tq, d / 2);
    let half = if d % 2 == 1 { sqrt(&tq) } else { Bracket::exact(Q::one()) };
    half.scale_nonneg(&(gamma * whole))
}

/// The bound re-derived on a materialized pattern matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PatternPipeline {
    /// `phi = (-1)^f mu`.
    pub phi: FnTable,
    /// The closed-form norm of the `(Tn, n, phi)` pattern matrix.
    pub norm: PatternNorm,
    /// Forster quantity of the materialized matrix (entries of `phi`).
    pub forster: SignRankBound,
    /// `gamma T^{d/2}`.
    pub formula: Bracket,
    /// The Forster quantity is not certainly below `gamma T^{d/2}`.
    pub consistent: bool,
}

/// Builds `phi = (-1)^f mu` with `mu` from the LP oracle at smoothness
/// `gamma`, materializes the `(Tn, n, phi)` pattern matrix, and applies the
/// Forster bound to it.
pub fn pattern_pipeline(f: &FnTable, gamma: &Q, d: u32, t: u64) -> Result<PatternPipeline> {
    let n = f.domain().require_hypercube()?;
    let ans = smooth_threshold_degree(f, gamma)?;
    if ans.value < d {
        return Err(Error::pre("pattern_pipeline", format!("smooth threshold degree {} < {d}", ans.value)));
    }
    let mu = ans.dual.ok_or_else(|| Error::cert("pattern_pipeline", "LP returned no distribution"))?;
    let phi = FnTable::from_fn(Domain::Hypercube(n), |x| {
        if f.get(x).is_zero() {
            mu.get(x)
        } else {
            -mu.get(x)
        }
    });
    let pm = PatternMatrix::new(t as usize * n, n, phi.clone())?;
    let norm = pm.norm_sq()?;
    let forster = forster_bound(&pm.materialize()?)?;
    let formula = pattern_formula(gamma, d, t);
    let consistent = forster.value.hi >= formula.lo;
    Ok(PatternPipeline { phi, norm, forster, formula, consistent })
}

// ---------------------------------------------------------------------------
// Communication formulas
// ---------------------------------------------------------------------------

/// `(c 2^l l / sqrt(m))^{deg/2}`, the discrepancy upper bound for
/// `l`-party pattern compositions.
pub fn pm_discrepancy_bound(c: &Q, l: u32, m: u64, deg: u32) -> Result<Bracket> {
    if m == 0 || c.is_negative() {
        return Err(Error::pre("pm_discrepancy", "need m >= 1 and c >= 0"));
    }
    let base_sq = c * c * pow2(2 * i64::from(l)) * q(i64::from(l) * i64::from(l)) / q(m as i64);
    // base^{deg/2} = (base^2)^{deg/4}: whole powers of base^2 times a
    // square root and/or a fourth root for the remainder.
    let mut out = Bracket::exact(pow(&base_sq, deg / 4));
    let root = sqrt(&base_sq);
    if deg % 4 >= 2 {
        out = out.mul_nonneg(&root);
    }
    if deg % 2 == 1 {
        let fourth = Bracket::new(sqrt_prec(&root.lo, 40).lo, sqrt_prec(&root.hi, 40).hi);
        out = out.mul_nonneg(&fourth);
    }
    Ok(out)
}

/// `log(2 / disc)`, the lower bound on PP complexity from discrepancy.
pub fn pp_lower_bound(disc: &Q) -> Result<Bracket> {
    if !disc.is_positive() {
        return Err(Error::pre("pp_lower_bound", "discrepancy must be positive"));
    }
    Ok(log2(&(q(2) / disc)))
}

/// `[log srank, log srank + 2]`, the range of unbounded-error complexity.
pub fn upp_range(srank: u64) -> Result<Bracket> {
    if srank == 0 {
        return Err(Error::pre("upp_range", "sign-rank is at least one"));
    }
    let l = log2(&q(srank as i64));
    Ok(Bracket::new(l.lo, l.hi + q(2)))
}

/// Comparison of the exact two-party discrepancy with the closed form.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DiscDirection {
    /// Exact discrepancy from the LP oracle.
    pub exact: Q,
    /// The closed-form upper bound.
    pub formula: Bracket,
    /// `exact <= formula` (the only direction the formula claims).
    pub consistent: bool,
    /// `log(2 / exact)`.
    pub pp: Bracket,
}

/// Exact discrepancy of `m` against `pm_discrepancy_bound(c, 2, m_param, deg)`.
pub fn disc_direction_check(m: &SignMatrix, c: &Q, m_param: u64, deg: u32) -> Result<DiscDirection> {
    let exact = discrepancy_2party(m)?.value;
    let formula = pm_discrepancy_bound(c, 2, m_param, deg)?;
    // The formula bounds the discrepancy of the pattern composition; as a
    // direction check it must never certify something below the exact value
    // when it applies, i.e. when it is at least the trivial bound 1 or above
    // the exact value.
    let consistent = formula.hi >= exact || formula.lo < Q::one();
    let pp = pp_lower_bound(&exact)?;
    Ok(DiscDirection { exact, formula, consistent, pp })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parity_phi(n: usize) -> FnTable {
        FnTable::from_fn(Domain::Hypercube(n), |x| if x.iter().sum::<i64>() % 2 == 0 { q(1) } else { q(-1) })
    }

    #[test]
    fn pattern_norm_examples() {
        let pm = PatternMatrix::new(2, 1, parity_phi(1)).unwrap();
        assert_eq!((pm.rows(), pm.cols()), (4, 4));
        let nf = pm.norm_sq().unwrap();
        assert_eq!(nf.norm_sq, q(8));
        let chk = check_pattern_norm(&pm, 40).unwrap();
        assert!(chk.inside && chk.exact_eigenvalue);
        let ones = FnTable::from_fn(Domain::Hypercube(2), |_| q(1));
        let pm = PatternMatrix::new(4, 2, ones).unwrap();
        assert_eq!(pm.norm_sq().unwrap().norm_sq, q(256));
        assert!(PatternMatrix::new(3, 2, parity_phi(2)).is_err());
    }

    #[test]
    fn forster_examples() {
        let h = forster_bound(&character_matrix(2)).unwrap();
        assert!(h.value.lo <= q(2) && h.value.hi >= q(2));
        let ones = forster_bound(&all_ones(3, 5)).unwrap();
        assert!(ones.value.certainly_le(&qr(101, 100)) && ones.value.hi >= q(1));
        assert!(forster_bound(&vec![vec![q(1), q(0)]]).is_err());
    }

    #[test]
    fn staircase_realizations() {
        let a = staircase_upper(4);
        let b = forster_bound(&a).unwrap().with_realization(&a, &staircase_upper_realization(4)).unwrap();
        assert_eq!(b.upper, Some(2));
        let a = staircase_identity(4);
        let b = forster_bound(&a).unwrap().with_realization(&a, &staircase_identity_realization(4)).unwrap();
        assert!(b.upper.unwrap() <= 3);
    }

    #[test]
    fn rank_one_patterns() {
        assert!(signrank_le_1(&all_ones(2, 3)));
        let u = [1, -1, 1];
        let v = [-1, 1];
        let m: Matrix = u.iter().map(|a| v.iter().map(|b| q(a * b)).collect()).collect();
        assert!(signrank_le_1(&m));
        assert!(signrank_le_1(&staircase_identity(2)));
        assert!(!signrank_le_1(&vec![vec![q(1), q(1)], vec![q(1), q(-1)]]));
        assert!(!signrank_le_1(&staircase_upper(3)));
    }

    #[test]
    fn formulas() {
        let b = pattern_formula(&q(1), 0, 5);
        assert_eq!(b.lo, q(1));
        let b = pattern_formula(&qr(1, 2), 2, 2);
        assert_eq!(b.lo, q(1));
        let r = upp_range(1).unwrap();
        assert!(r.lo <= q(0) && r.hi >= q(2));
        let pp = pp_lower_bound(&qr(1, 2)).unwrap();
        assert!(pp.lo <= q(2) && pp.hi >= q(2));
        let disc = pm_discrepancy_bound(&q(1), 2, 64, 2).unwrap();
        // (1 * 4 * 2 / 8)^1 = 1.
        assert!(disc.lo <= q(1) && disc.hi >= q(1));
    }
}
