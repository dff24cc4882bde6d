//! Dominant components, concentration, weight transfer and the locally smooth
//! toolkit.
//!
//! * [`select_heavy_set`]: for `||v||_1 >= theta` a set `S` of coordinates with
//!   `|S| >= ||v||_1/(2 ||v||_inf)`, `min_{i in S} |v_i| >= theta/(2|S|(1 + ln n))`
//!   and `sum_{i not in S} |v_i| < theta`.
//! * [`check_concentration`]: exact tail `P[||v||_1 >= theta]` of a product
//!   of univariate distributions against `alpha^{theta/2}`.
//! * [`weight_reduce`]: removes the mass of a product distribution (or a
//!   mixture of translated products) at weight `>= 2 theta` with a
//!   low-degree-invisible corrector aggregate.
//! * [`verify_cap_ball`], [`build_zu`], [`zero_out_heavy`],
//!   [`zero_out_mixture`], [`redistribute`]: the locally smooth toolkit. All
//!   multiplicative constants are computed from the actual objects and are
//!   reported next to the closed-form constants
//!   `2^{3d+1} K^{4d+1} C(n+d,d)^3 C(diam,d)` they improve on.
//!
//! Ratios of the form `theta/(2|S|(1+ln n))`, `8 C e n (1 + ln n)` or
//! `2^{alpha t}` are evaluated against the adverse side of rational brackets,
//! so a passing check is always sound.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use num_traits::{One, Signed, Zero};

use crate::bounds::{e, exp2_sqrt, ln, pow_half, Bracket};
use crate::corrector::{zeta_u_raw, zeta_uv_raw};
use crate::domain::{dist, weight, Domain, Point};
use crate::error::{Error, Result};
use crate::family::{check_smooth, contiguous_support, min_smooth_constant, FamilySpec, SmoothCertificate};
use crate::mixture::{ProductMixture, DENSE_LIMIT};
use crate::orth::orth_at_least;
use crate::rational::{binom_q, pow, pow2, q, Q};
use crate::table::{tensor_all, FnTable};

// ---------------------------------------------------------------------------
// Dominant components
// ---------------------------------------------------------------------------

/// A dominant set of coordinates together with the three inequalities it
/// satisfies.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HeavySet {
    /// Coordinates in `S`, increasing.
    pub set: Vec<usize>,
    /// `theta`.
    pub theta: Q,
    /// `||v||_1`.
    pub l1: Q,
    /// `||v||_inf`.
    pub linf: Q,
    /// `sum_{i not in S} |v_i|`.
    pub outside: Q,
    /// `|S| >= ||v||_1 / (2 ||v||_inf)`.
    pub large: bool,
    /// `min_{i in S} |v_i| >= theta / (2 |S| (1 + ln n))`.
    pub area: bool,
    /// `sum_{i not in S} |v_i| < theta`.
    pub outside_ok: bool,
}

/// Evaluates the three inequalities for a candidate `S`.
pub fn heavy_set_conditions(v: &[Q], theta: &Q, set: &[usize]) -> HeavySet {
    let n = v.len().max(1) as i64;
    let abs: Vec<Q> = v.iter().map(Signed::abs).collect();
    let l1: Q = abs.iter().sum();
    let linf = abs.iter().max().cloned().unwrap_or_else(Q::zero);
    let outside: Q = abs.iter().enumerate().filter(|(i, _)| !set.contains(i)).map(|(_, x)| x).sum();
    let s = q(set.len() as i64);
    let large = !linf.is_zero() && q(2) * &linf * &s >= l1;
    // Adverse side: the lower end of ln n makes the right-hand side largest.
    let ln_lo = ln(&q(n)).lo;
    let area = !set.is_empty() && {
        let min_s = set.iter().map(|&i| abs[i].clone()).min().unwrap();
        min_s * q(2) * &s * (Q::one() + ln_lo) >= *theta
    };
    let outside_ok = &outside < theta;
    let mut sorted = set.to_vec();
    sorted.sort_unstable();
    HeavySet { set: sorted, theta: theta.clone(), l1, linf, outside, large, area, outside_ok }
}

impl HeavySet {
    /// True when all three inequalities hold.
    pub fn holds(&self) -> bool {
        self.large && self.area && self.outside_ok
    }
}

/// One balanced block: among indices outside `taken`, sorted by `|v_i|`
/// descending with ties by index, the prefix of length `j >= ||w||_1/(2||w||_inf)`
/// maximizing `j * a_j` (the smallest such `j` on ties). Summation by parts
/// shows `j a_j >= ||w||_1 / (2 H_n) >= ||w||_1 / (2 (1 + ln n))`.
fn balanced_block(abs: &[Q], taken: &[bool]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..abs.len()).filter(|&i| !taken[i] && !abs[i].is_zero()).collect();
    idx.sort_by(|&a, &b| abs[b].cmp(&abs[a]).then(a.cmp(&b)));
    if idx.is_empty() {
        return idx;
    }
    let w1: Q = idx.iter().map(|&i| &abs[i]).sum();
    let top = abs[idx[0]].clone();
    let mut best: Option<(Q, usize)> = None;
    for j in 1..=idx.len() {
        if q(2 * j as i64) * &top < w1 {
            continue;
        }
        let val = q(j as i64) * &abs[idx[j - 1]];
        if best.as_ref().is_none_or(|(b, _)| val > *b) {
            best = Some((val, j));
        }
    }
    let j = best.map(|(_, j)| j).unwrap_or(idx.len());
    idx.truncate(j);
    idx
}

/// Selects a dominant set for `v` at threshold `theta` by repeatedly adding
/// balanced blocks of the not-yet-covered coordinates until the uncovered
/// mass drops below `theta`.
pub fn select_heavy_set(v: &[Q], theta: &Q) -> Result<HeavySet> {
    if !theta.is_positive() {
        return Err(Error::pre("heavy_set", format!("theta = {theta} must be positive")));
    }
    let abs: Vec<Q> = v.iter().map(Signed::abs).collect();
    let l1: Q = abs.iter().sum();
    if &l1 < theta {
        return Err(Error::pre("heavy_set", format!("||v||_1 = {l1} < theta = {theta}")));
    }
    let mut taken = vec![false; v.len()];
    let mut rest = l1;
    while &rest >= theta {
        let block = balanced_block(&abs, &taken);
        if block.is_empty() {
            break;
        }
        for i in block {
            taken[i] = true;
            rest -= &abs[i];
        }
    }
    let set: Vec<usize> = (0..v.len()).filter(|&i| taken[i]).collect();
    let hs = heavy_set_conditions(v, theta, &set);
    if !hs.holds() {
        return Err(Error::cert("heavy_set", format!("selected set {set:?} fails the dominance inequalities")));
    }
    Ok(hs)
}

/// Brute force over all non-empty subsets (for `n <= 16`): the first subset
/// in mask order satisfying the three inequalities.
pub fn brute_force_heavy_set(v: &[Q], theta: &Q) -> Option<Vec<usize>> {
    assert!(v.len() <= 16, "brute force limited to 16 coordinates");
    (1u32..(1 << v.len())).find_map(|mask| {
        let set: Vec<usize> = (0..v.len()).filter(|&i| mask >> i & 1 == 1).collect();
        heavy_set_conditions(v, theta, &set).holds().then_some(set)
    })
}

// ---------------------------------------------------------------------------
// Concentration
// ---------------------------------------------------------------------------

/// Outcome of a concentration check.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConcentrationReport {
    /// Number of factors.
    pub n: usize,
    /// Threshold `theta`.
    pub theta: u64,
    /// Upper bracket end of `8 C e n (1 + ln n)`.
    pub threshold: Q,
    /// Exact `P[||v||_1 >= theta]`.
    pub tail: Q,
    /// Bracket of `alpha^{theta/2}`.
    pub bound: Bracket,
    /// `tail <= bound.lo`.
    pub pass: bool,
}

/// Distribution of `|v|` for `v` drawn from the product of `lambdas`.
pub fn weight_distribution(lambdas: &[FnTable]) -> Result<Vec<Q>> {
    let mut acc = vec![Q::one()];
    for l in lambdas {
        if l.dim() != 1 || l.iter().any(|(p, _)| p[0] < 0) {
            return Err(Error::Domain("expected univariate tables on the naturals".into()));
        }
        let top = l.iter().map(|(p, _)| p[0] as usize).max().unwrap_or(0);
        let mut next = vec![Q::zero(); acc.len() + top];
        for (w, a) in acc.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (p, b) in l.iter() {
                next[w + p[0] as usize] += a * b;
            }
        }
        acc = next;
    }
    Ok(acc)
}

/// Checks `P[||v||_1 >= theta] <= alpha^{theta/2}` for `v ~ lambda_1 x ... x lambda_n`,
/// after verifying `lambda_i(t) <= C alpha^t/(t+1)^2` and
/// `theta >= 8 C e n (1 + ln n)`. A failed precondition is an error; a failed
/// tail bound is reported with `pass = false`.
pub fn check_concentration(lambdas: &[FnTable], c: &Q, alpha: &Bracket, theta: u64) -> Result<ConcentrationReport> {
    let n = lambdas.len();
    if n == 0 {
        return Err(Error::pre("concentration", "need at least one distribution"));
    }
    if !alpha.lo.is_positive() || alpha.hi > Q::one() {
        return Err(Error::pre("concentration", "alpha must lie in (0, 1]"));
    }
    for (i, l) in lambdas.iter().enumerate() {
        if !l.is_distribution() {
            return Err(Error::pre("concentration", format!("lambda_{i} is not a distribution")));
        }
        for (p, v) in l.iter() {
            let t = p[0];
            let rhs = c * pow(&alpha.lo, t as u32) / q((t + 1) * (t + 1));
            if v > &rhs {
                return Err(Error::pre("concentration", format!("lambda_{i}({t}) exceeds C alpha^t/(t+1)^2")));
            }
        }
    }
    let nq = q(n as i64);
    let threshold = q(8) * c * e().hi * &nq * (Q::one() + ln(&nq).hi);
    if q(theta as i64) < threshold {
        return Err(Error::pre("concentration", format!("theta = {theta} below 8 C e n (1 + ln n) <= {threshold}")));
    }
    let dist = weight_distribution(lambdas)?;
    let tail: Q = dist.iter().skip(theta as usize).sum();
    let bound = pow_half(alpha, theta);
    let pass = tail <= bound.lo;
    Ok(ConcentrationReport { n, theta, threshold, tail, bound, pass })
}

// ---------------------------------------------------------------------------
// Weight reduction
// ---------------------------------------------------------------------------

/// Output of [`weight_reduce`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeightReduction {
    /// The input mixture, densified.
    pub lambda: FnTable,
    /// `Lambda - Lambda~`, the corrector aggregate.
    pub zeta: FnTable,
    /// `Lambda~`.
    pub lambda_tilde: FnTable,
}

/// Verified properties of a weight reduction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeightReduceCertificate {
    /// Degree budget.
    pub d: u32,
    /// Threshold.
    pub theta: u64,
    /// The family every factor belongs to (`B(r, c, alpha, Delta)`).
    pub family: FamilySpec,
    /// Number of (term, point) pairs at weight `>= 2 theta`.
    pub heavy_points: usize,
    /// Largest translate used by any factor.
    pub max_shift: u64,
    /// `supp Lambda~` lies in `supp Lambda` at weight `< 2 theta + n Delta`.
    pub support_ok: bool,
    /// `orth(Lambda - Lambda~) > d`.
    pub orth_ok: bool,
    /// Smallest `F` with `|zeta_k| <= F Lambda_k` at local weight `< 2 theta`
    /// for every term `k`.
    pub computed_factor: Q,
    /// Upper bracket end of `(8nr/c)^d 2^{-ceil(theta/r) - alpha ceil(theta/2) + 2}`.
    pub stated_factor: Q,
    /// `computed_factor <= stated_factor`.
    pub factor_ok: bool,
    /// `2^{ceil(theta/r) + alpha ceil(theta/2)} >= 4 (8nr/c)^d` (checked
    /// against the lower bracket end).
    pub corollary_condition: bool,
    /// Under the corollary condition: `Lambda~` is a distribution.
    pub distribution: Option<bool>,
}

impl WeightReduceCertificate {
    /// True when every claimed property holds.
    pub fn holds(&self) -> bool {
        self.support_ok && self.orth_ok && self.factor_ok && self.distribution != Some(false)
    }
}

fn family_params(family: &FamilySpec) -> Result<(u64, Q, Q, u64)> {
    match family {
        FamilySpec::B { r, c, alpha_sq, delta } => Ok((*r, c.clone(), alpha_sq.clone(), *delta)),
        _ => Err(Error::pre("weight_reduce", "weight reduction is stated for the family B(r, c, alpha, Delta)")),
    }
}

struct ReducedTerms {
    lambda: FnTable,
    zeta: FnTable,
    factor: Q,
    heavy: usize,
    max_shift: u64,
}

/// Translate offsets and the local (shifted-to-origin) dense product of a term.
fn local_product(factors: &[FnTable]) -> Result<(Vec<i64>, FnTable)> {
    let mut offsets = Vec::with_capacity(factors.len());
    let mut locals = Vec::with_capacity(factors.len());
    let mut size: u128 = 1;
    for f in factors {
        let (a, len) =
            contiguous_support(f).ok_or_else(|| Error::pre("weight_reduce", "factor support is not an interval"))?;
        size = size.saturating_mul(len as u128 + 1);
        offsets.push(a);
        locals.push(f.translate(&[-a], Domain::boxed(&[len as i64]))?);
    }
    if size > DENSE_LIMIT {
        return Err(Error::TooLarge(format!("product box of {size} points (limit {DENSE_LIMIT})")));
    }
    Ok((offsets, tensor_all(&locals)))
}

fn reduce_terms(lambda: &ProductMixture, d: u32, theta: u64) -> Result<ReducedTerms> {
    let dom = lambda.bounding_box();
    let dense = lambda.densify_on(dom.clone())?;
    let mut zeta = FnTable::zero(dom.clone());
    let mut factor = Q::zero();
    let mut heavy = 0;
    let mut max_shift = 0;
    let th = theta as i64;
    for term in lambda.terms() {
        let (offsets, local) = local_product(&term.factors)?;
        max_shift = max_shift.max(offsets.iter().copied().max().unwrap_or(0) as u64);
        let mut z_loc = FnTable::zero(local.domain().clone());
        for (v, lv) in local.iter() {
            if weight(v) < 2 * th {
                continue;
            }
            heavy += 1;
            let vq: Vec<Q> = v.iter().map(|&x| q(x)).collect();
            let hs = select_heavy_set(&vq, &q(th))?;
            let u: Vec<i64> = hs.set.iter().map(|&i| v[i]).collect();
            let (zu, _) = zeta_u_raw(&u, d)?;
            for (p, zv) in zu.iter() {
                let mut x = v.clone();
                for (k, &i) in hs.set.iter().enumerate() {
                    x[i] = p[k];
                }
                z_loc.add_at(&x, &(lv * zv))?;
            }
        }
        for (x, zv) in z_loc.iter() {
            if weight(x) < 2 * th {
                let base = local.get(x);
                if base.is_zero() {
                    return Err(Error::cert("weight_reduce", format!("corrector leaves the support at {x:?}")));
                }
                let ratio = zv.abs() / base;
                if ratio > factor {
                    factor = ratio;
                }
            }
        }
        let moved = z_loc.translate(&offsets, dom.clone())?;
        zeta = zeta.axpy(&term.coef, &moved)?;
    }
    Ok(ReducedTerms { lambda: dense, zeta: zeta.with_domain(dom)?, factor, heavy, max_shift })
}

/// The mechanical construction only: `Lambda~ = Lambda - zeta`, without
/// checking the parameter inequalities. Support and orthogonality still hold
/// whenever `1 <= d < theta`; the pointwise bound is only claimed under the
/// preconditions enforced by [`weight_reduce`].
pub fn weight_reduce_construction(lambda: &ProductMixture, d: u32, theta: u64) -> Result<WeightReduction> {
    if theta == 0 || u64::from(d) >= theta {
        return Err(Error::pre("weight_reduce", format!("need 0 <= d < theta, got d = {d}, theta = {theta}")));
    }
    reduction_of(reduce_terms(lambda, d, theta)?)
}

fn reduction_of(t: ReducedTerms) -> Result<WeightReduction> {
    let lambda_tilde = t.lambda.sub(&t.zeta)?;
    Ok(WeightReduction { lambda: t.lambda, zeta: t.zeta, lambda_tilde })
}

/// Weight reduction for a convex combination of products of translated
/// members of `B(r, c, alpha, Delta)`.
///
/// Preconditions: `theta >= 2d` and `theta >= 4 e n (1 + ln n)/c^2`; every
/// factor belongs to `family`; the mixture is a convex combination.
pub fn weight_reduce(
    lambda: &ProductMixture,
    family: &FamilySpec,
    d: u32,
    theta: u64,
) -> Result<(WeightReduction, WeightReduceCertificate)> {
    let (r, c, alpha_sq, delta) = family_params(family)?;
    let n = lambda.dim();
    if !lambda.is_distribution_mixture() {
        return Err(Error::pre("weight_reduce", "input is not a convex combination of product distributions"));
    }
    for t in lambda.terms() {
        for f in &t.factors {
            if let crate::family::Membership::NotMember(why) = family.contains(f) {
                return Err(Error::pre("weight_reduce", format!("factor outside the family: {why}")));
            }
        }
    }
    let nq = q(n as i64);
    let th = q(theta as i64);
    if th < q(2 * i64::from(d)) {
        return Err(Error::pre("weight_reduce", format!("theta = {theta} < 2d = {}", 2 * d)));
    }
    let need = q(4) * e().hi * &nq * (Q::one() + ln(&nq).hi) / (&c * &c);
    if th < need {
        return Err(Error::pre("weight_reduce", format!("theta = {theta} below 4 e n (1 + ln n)/c^2 <= {need}")));
    }
    if r == 0 {
        let dense = lambda.densify()?;
        let zero = FnTable::zero(dense.domain().clone());
        let cert = WeightReduceCertificate {
            d,
            theta,
            family: family.clone(),
            heavy_points: 0,
            max_shift: 0,
            support_ok: true,
            orth_ok: true,
            computed_factor: Q::zero(),
            stated_factor: Q::zero(),
            factor_ok: true,
            corollary_condition: true,
            distribution: Some(dense.is_distribution()),
        };
        return Ok((WeightReduction { lambda: dense.clone(), zeta: zero, lambda_tilde: dense }, cert));
    }
    let t = reduce_terms(lambda, d, theta)?;
    let (factor, heavy, max_shift) = (t.factor.clone(), t.heavy, t.max_shift);
    let wr = reduction_of(t)?;
    let rq = q(r as i64);
    let ceil_r = theta.div_ceil(r);
    let half = theta.div_ceil(2);
    let rate = exp2_sqrt(&(&alpha_sq * q(half as i64) * q(half as i64)));
    let base = pow(&(q(8) * &nq * &rq / &c), d);
    let stated_factor = &base * pow2(2 - ceil_r as i64) / &rate.lo;
    let corollary_condition = pow2(ceil_r as i64) * &rate.lo >= q(4) * &base;
    let limit = 2 * theta as i64 + n as i64 * delta as i64;
    let support_ok = wr.lambda_tilde.iter().all(|(x, _)| !wr.lambda.get(x).is_zero() && weight(x) < limit);
    let orth_ok = orth_at_least(&wr.zeta, d + 1);
    let distribution = corollary_condition.then(|| wr.lambda_tilde.is_distribution());
    let cert = WeightReduceCertificate {
        d,
        theta,
        family: family.clone(),
        heavy_points: heavy,
        max_shift,
        support_ok,
        orth_ok,
        factor_ok: factor <= stated_factor,
        computed_factor: factor,
        stated_factor,
        corollary_condition,
        distribution,
    };
    if !cert.support_ok || !cert.orth_ok {
        return Err(Error::cert("weight_reduce", "support or orthogonality conclusion fails"));
    }
    Ok((wr, cert))
}

// ---------------------------------------------------------------------------
// Locally smooth toolkit
// ---------------------------------------------------------------------------

/// `2^{3d+1} K^{4d+1} C(n+d, d)^3 C(diam, d)`.
pub fn closed_form_factor(d: u32, k: &Q, n: usize, diam: i64) -> Q {
    pow2(3 * i64::from(d) + 1)
        * pow(k, 4 * d + 1)
        * pow(&binom_q(n as u64 + u64::from(d), u64::from(d)), 3)
        * binom_q(diam.max(0) as u64, u64::from(d))
}

/// The box `prod {0..r_i}` underlying a table's domain; errors unless the
/// lower corner is the origin.
fn origin_box(f: &FnTable) -> Result<Vec<i64>> {
    let (lo, hi) = f.domain().bounds();
    if lo.iter().any(|&x| x != 0) {
        return Err(Error::Domain(format!("expected a box with lower corner 0, got {lo:?}")));
    }
    Ok(hi)
}

fn mass_where(f: &FnTable, mut keep: impl FnMut(&[i64]) -> bool) -> Q {
    f.iter().filter(|(p, _)| keep(p)).map(|(_, v)| v.clone()).sum()
}

/// Outcome of the cap and ball inequalities.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CapBallReport {
    /// Smoothness certificate on `X|<=theta`.
    pub smooth: SmoothCertificate,
    /// `Lambda(X|<=theta) / Lambda(X|<=theta-d)`.
    pub cap_ratio: Q,
    /// `K^d C(n+d, d)`.
    pub cap_factor: Q,
    /// `cap_ratio <= cap_factor`.
    pub cap_ok: bool,
    /// Worst `Lambda(X|<=theta) / Lambda(X|<=theta minus B_d(u))` over the
    /// centres, when the ball inequality applies.
    pub ball_ratio: Option<Q>,
    /// `2^{d+1} K^{2d+1} C(n+d, d)`.
    pub ball_factor: Q,
    /// All ball inequalities hold (vacuous when not applicable).
    pub ball_ok: bool,
    /// Number of centres checked.
    pub centres: usize,
}

/// Checks the cap inequality `Lambda(X|<=theta) <= K^d C(n+d,d) Lambda(X|<=theta-d)`
/// and, when `d < min{theta, sum r_i}/2`, the ball inequality
/// `Lambda(X|<=theta) <= 2^{d+1} K^{2d+1} C(n+d,d) Lambda(X|<=theta minus B_d(u))`
/// for every centre `u` (default: all of `X|<=theta`).
pub fn verify_cap_ball(
    lambda: &FnTable,
    theta: u64,
    d: u32,
    k: Option<&Q>,
    centres: Option<&[Point]>,
) -> Result<CapBallReport> {
    let r = origin_box(lambda)?;
    if u64::from(d) > theta {
        return Err(Error::pre("cap_ball", format!("theta = {theta} < d = {d}")));
    }
    let n = r.len();
    let th = theta as i64;
    let di = i64::from(d);
    let region = Domain::boxed(&r).at_most(th);
    let k = match k {
        Some(k) => k.clone(),
        None => min_smooth_constant(lambda, &region)?
            .ok_or_else(|| Error::pre("cap_ball", "not smooth on X|<=theta (vanishes somewhere)"))?,
    };
    let smooth = check_smooth(lambda, &region, &k)?;
    let binom = binom_q(n as u64 + u64::from(d), u64::from(d));
    let full = mass_where(lambda, |p| weight(p) <= th);
    let inner = mass_where(lambda, |p| weight(p) <= th - di);
    let cap_factor = pow(&k, d) * &binom;
    let (cap_ratio, cap_ok) = if inner.is_zero() {
        (Q::zero(), full.is_zero())
    } else {
        let ratio = &full / &inner;
        let ok = ratio <= cap_factor;
        (ratio, ok)
    };
    let ball_factor = pow2(di + 1) * pow(&k, 2 * d + 1) * &binom;
    let sum_r: i64 = r.iter().sum();
    let applies = 2 * di < th.min(sum_r);
    let pts = match centres {
        Some(c) => c.to_vec(),
        None => region.points(),
    };
    let mut ball_ratio: Option<Q> = None;
    let mut ball_ok = true;
    if applies {
        for u in &pts {
            let rest = mass_where(lambda, |p| weight(p) <= th && dist(p, u) > di);
            if rest.is_zero() {
                if !full.is_zero() {
                    ball_ok = false;
                }
                continue;
            }
            let ratio = &full / &rest;
            if ratio > ball_factor {
                ball_ok = false;
            }
            if ball_ratio.as_ref().is_none_or(|b| ratio > *b) {
                ball_ratio = Some(ratio);
            }
        }
    }
    Ok(CapBallReport {
        smooth,
        cap_ratio,
        cap_factor,
        cap_ok,
        ball_ratio,
        ball_factor,
        ball_ok,
        centres: if applies { pts.len() } else { 0 },
    })
}

/// Verified properties of `Z_u`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ZuCertificate {
    /// Anchor.
    pub u: Point,
    /// Degree budget.
    pub d: u32,
    /// Threshold.
    pub theta: u64,
    /// Smoothness constant of `Lambda` on `X|<=theta`.
    pub k: Q,
    /// `diam({u} u supp Lambda)`.
    pub diam: i64,
    /// `||Z_u||_1`.
    pub l1: Q,
    /// `2^d C(diam, d) + 1`.
    pub l1_bound: Q,
    /// Smallest `F` with `|Z_u(x)| <= F Lambda(x)` for `x != u`.
    pub factor: Q,
    /// `2^{3d+1} K^{4d+1} C(n+d, d)^3 C(diam, d)`.
    pub stated_factor: Q,
}

fn diam_with(f: &FnTable, u: &[i64]) -> i64 {
    let to_u = f.iter().map(|(p, _)| dist(p, u)).max().unwrap_or(0);
    f.support_diameter().max(to_u)
}

/// Builds `Z_u = sum_v Lambda(v) zeta_{u,v} / Lambda(V)` over
/// `V = X|<=theta-d minus B_d(u)`, for a `K`-smooth distribution `Lambda`
/// on `X|<=theta` with `d < min{theta, sum r_i}/3`.
pub fn build_zu(lambda: &FnTable, u: &[i64], d: u32, theta: u64) -> Result<(FnTable, ZuCertificate)> {
    let r = origin_box(lambda)?;
    let (th, di) = (theta as i64, i64::from(d));
    let sum_r: i64 = r.iter().sum();
    if 3 * di >= th.min(sum_r) {
        return Err(Error::pre("Z_u", format!("need d < min(theta, sum r_i)/3, got d = {d}, theta = {theta}, sum r_i = {sum_r}")));
    }
    let xdom = Domain::boxed(&r);
    if !xdom.contains(u) {
        return Err(Error::pre("Z_u", format!("anchor {u:?} outside X")));
    }
    if !lambda.is_distribution() || lambda.iter().any(|(p, _)| weight(p) > th) {
        return Err(Error::pre("Z_u", "Lambda must be a distribution on X|<=theta"));
    }
    let region = xdom.clone().at_most(th);
    let k = min_smooth_constant(lambda, &region)?
        .ok_or_else(|| Error::pre("Z_u", "Lambda is not smooth on X|<=theta (vanishes somewhere)"))?;
    let pool: Vec<Point> = xdom.clone().at_most(th - di).points().into_iter().filter(|v| dist(v, u) > di).collect();
    let denom: Q = pool.iter().map(|v| lambda.get(v)).sum();
    if denom.is_zero() {
        return Err(Error::pre("Z_u", "no mass outside the ball around u"));
    }
    let mut z = FnTable::zero(xdom.clone());
    for v in &pool {
        let w = lambda.get(v) / &denom;
        let (zuv, _) = zeta_uv_raw(u, v, d)?;
        z = z.axpy(&w, &zuv)?;
    }
    let z = z.with_domain(xdom)?;
    let diam = diam_with(lambda, u);
    let n = r.len();
    let mut factor = Q::zero();
    for (x, zv) in z.iter() {
        if x.as_slice() == u {
            continue;
        }
        let base = lambda.get(x);
        if base.is_zero() {
            return Err(Error::cert("Z_u", format!("Z_u charges {x:?} outside supp Lambda")));
        }
        let ratio = zv.abs() / base;
        if ratio > factor {
            factor = ratio;
        }
    }
    let cert = ZuCertificate {
        u: u.to_vec(),
        d,
        theta,
        stated_factor: closed_form_factor(d, &k, n, diam),
        k,
        diam,
        l1: z.l1(),
        l1_bound: pow2(di) * binom_q(diam as u64, u64::from(d)) + Q::one(),
        factor,
    };
    cert.verify(&z)?;
    Ok((z, cert))
}

impl ZuCertificate {
    /// Re-checks the support, anchor, orthogonality, norm and factor claims.
    pub fn verify(&self, z: &FnTable) -> Result<()> {
        let th = self.theta as i64;
        if z.get(&self.u) != Q::one() {
            return Err(Error::cert("Z_u", "Z_u(u) != 1"));
        }
        if z.iter().any(|(x, _)| *x != self.u && weight(x) > th) {
            return Err(Error::cert("Z_u", "support leaves X|<=theta u {u}"));
        }
        if !orth_at_least(z, self.d + 1) {
            return Err(Error::cert("Z_u", format!("orth Z_u <= {}", self.d)));
        }
        if z.l1() != self.l1 || self.l1 > self.l1_bound {
            return Err(Error::cert("Z_u", format!("||Z_u||_1 = {} exceeds {}", self.l1, self.l1_bound)));
        }
        if self.factor > self.stated_factor {
            return Err(Error::cert("Z_u", "pointwise factor exceeds the closed form"));
        }
        Ok(())
    }
}

/// Verified properties of a heavy-tail zeroing.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ZeroOutCertificate {
    /// Lower corner of the box (translate).
    pub offset: Vec<i64>,
    /// Degree budget.
    pub d: u32,
    /// Threshold on the absolute weight.
    pub theta: u64,
    /// True when nothing had to be moved.
    pub trivial: bool,
    /// Smoothness constant of `Phi` on the truncated box.
    pub k: Q,
    /// Number of points above the threshold that were zeroed.
    pub heavy_points: usize,
    /// `||Phi|>theta||_1 / ||Phi|<=theta||_1`.
    pub ratio: Q,
    /// Largest `Z_u` factor used (`N` computed).
    pub factor: Q,
    /// `2^{3d+1} K^{4d+1} C(n+d,d)^3 C(diam supp Phi, d)`.
    pub stated_factor: Q,
    /// `|Phi - Phi~| <= factor * ratio * |Phi|` on `X|<=theta`.
    pub distance_ok: bool,
}

/// Zeroes a function above weight `theta`: with `Lambda = |Phi|/||Phi|<=theta||_1`
/// on `X|<=theta`, `Phi~ = Phi - sum_{u in X|>theta} Phi(u) Z_u`.
///
/// The domain may be a translated box `prod {a_i..a_i+r_i}`; the threshold
/// then applies to absolute weights and `d < (theta - sum a_i)/3` is required.
pub fn zero_out_heavy(phi: &FnTable, d: u32, theta: u64) -> Result<(FnTable, ZeroOutCertificate)> {
    let (lo, hi) = phi.domain().bounds();
    let shift: i64 = lo.iter().sum();
    let th_local = theta as i64 - shift;
    let di = i64::from(d);
    if 3 * di >= th_local {
        return Err(Error::pre("zero_out", format!("need d < (theta - sum a_i)/3, got d = {d}, theta = {theta}, shift = {shift}")));
    }
    let r: Vec<i64> = lo.iter().zip(&hi).map(|(a, b)| b - a).collect();
    let neg: Vec<i64> = lo.iter().map(|a| -a).collect();
    let local = phi.translate(&neg, Domain::boxed(&r))?;
    let low = local.filter(|p| weight(p) <= th_local);
    if low.is_zero() {
        return Err(Error::pre("zero_out", "Phi vanishes on X|<=theta"));
    }
    let region = Domain::boxed(&r).at_most(th_local);
    let k = min_smooth_constant(&local, &region)?
        .ok_or_else(|| Error::pre("zero_out", "Phi is not smooth on X|<=theta (vanishes somewhere)"))?;
    let sum_r: i64 = r.iter().sum();
    let n = r.len();
    let stated_factor = closed_form_factor(d, &k, n, local.support_diameter());
    let low_norm = low.l1();
    let high = local.filter(|p| weight(p) > th_local);
    let ratio = high.l1() / &low_norm;
    if th_local >= sum_r || high.is_zero() {
        let cert = ZeroOutCertificate {
            offset: lo,
            d,
            theta,
            trivial: true,
            k,
            heavy_points: 0,
            ratio,
            factor: Q::zero(),
            stated_factor,
            distance_ok: true,
        };
        return Ok((phi.clone(), cert));
    }
    let base = low.abs().scale(&low_norm.recip()).with_domain(Domain::boxed(&r))?;
    let mut tilde = local.clone();
    let mut factor = Q::zero();
    for (u, pu) in high.iter() {
        let (z, zc) = build_zu(&base, u, d, th_local as u64)?;
        tilde = tilde.axpy(&-pu.clone(), &z)?;
        if zc.factor > factor {
            factor = zc.factor;
        }
    }
    let tilde = tilde.with_domain(Domain::boxed(&r))?;
    if tilde.iter().any(|(p, _)| weight(p) > th_local) {
        return Err(Error::cert("zero_out", "Phi~ is supported above theta"));
    }
    let moved = local.sub(&tilde)?;
    if !orth_at_least(&moved, d + 1) {
        return Err(Error::cert("zero_out", format!("orth(Phi - Phi~) <= {d}")));
    }
    let scale = &factor * &ratio;
    let distance_ok = region.points().iter().all(|x| moved.get(x).abs() <= &scale * local.get(x).abs());
    if !distance_ok {
        return Err(Error::cert("zero_out", "pointwise distance bound fails"));
    }
    let out = tilde.translate(&lo, phi.domain().clone())?;
    let cert = ZeroOutCertificate {
        offset: lo,
        d,
        theta,
        trivial: false,
        k,
        heavy_points: high.support_len(),
        ratio,
        factor,
        stated_factor,
        distance_ok,
    };
    Ok((out, cert))
}

/// Verified properties of [`zero_out_mixture`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MixtureZeroOutCertificate {
    /// Degree budget.
    pub d: u32,
    /// Threshold.
    pub theta: u64,
    /// Largest total translate of a component.
    pub max_shift: u64,
    /// `max_k Lambda_k(N^n|>theta)`.
    pub delta: Q,
    /// Largest per-component `Z_u` factor.
    pub factor: Q,
    /// Largest per-component closed-form factor.
    pub stated_factor: Q,
    /// Smallest `F` with `|Lambda - Lambda~| <= F Lambda` on weight `<= theta`.
    pub distance_factor: Q,
    /// `factor * delta/(1 - delta)`, the bound `distance_factor` must respect.
    pub distance_bound: Q,
    /// `Lambda~` is a probability distribution.
    pub distribution: bool,
    /// Per-component certificates.
    pub components: Vec<ZeroOutCertificate>,
}

/// Applies [`zero_out_heavy`] to each product component of a convex
/// combination of translated smooth product distributions and recombines.
pub fn zero_out_mixture(
    lambda: &ProductMixture,
    d: u32,
    theta: u64,
) -> Result<(FnTable, FnTable, MixtureZeroOutCertificate)> {
    if !lambda.is_distribution_mixture() {
        return Err(Error::pre("zero_out_mixture", "not a convex combination of product distributions"));
    }
    let dom = lambda.bounding_box();
    let dense = lambda.densify_on(dom.clone())?;
    let mut tilde = FnTable::zero(dom.clone());
    let mut comps = Vec::new();
    let mut delta = Q::zero();
    let mut max_shift = 0u64;
    let th = theta as i64;
    for t in lambda.terms() {
        let (offsets, local) = local_product(&t.factors)?;
        let (lo, hi): (Vec<i64>, Vec<i64>) = {
            let (_, lh) = local.domain().bounds();
            (offsets.clone(), offsets.iter().zip(&lh).map(|(a, b)| a + b).collect())
        };
        let comp = local.translate(&offsets, Domain::Grid { lo, hi })?;
        max_shift = max_shift.max(offsets.iter().sum::<i64>() as u64);
        let tail = mass_where(&comp, |p| weight(p) > th);
        if tail > delta {
            delta = tail;
        }
        let (ct, cc) = zero_out_heavy(&comp, d, theta)?;
        tilde = tilde.axpy(&t.coef, &ct)?;
        comps.push(cc);
    }
    let tilde = tilde.with_domain(dom)?;
    if delta >= Q::one() {
        return Err(Error::pre("zero_out_mixture", "a component has no mass at weight <= theta"));
    }
    let moved = dense.sub(&tilde)?;
    if !orth_at_least(&moved, d + 1) {
        return Err(Error::cert("zero_out_mixture", format!("orth(Lambda - Lambda~) <= {d}")));
    }
    if tilde.iter().any(|(p, _)| weight(p) > th || dense.get(p).is_zero()) {
        return Err(Error::cert("zero_out_mixture", "Lambda~ leaves supp Lambda at weight <= theta"));
    }
    let factor = comps.iter().map(|c| c.factor.clone()).max().unwrap_or_else(Q::zero);
    let stated_factor = comps.iter().map(|c| c.stated_factor.clone()).max().unwrap_or_else(Q::zero);
    let distance_bound = &factor * &delta / (Q::one() - &delta);
    let mut distance_factor = Q::zero();
    for (x, v) in dense.iter() {
        if weight(x) <= th {
            let ratio = moved.get(x).abs() / v;
            if ratio > distance_factor {
                distance_factor = ratio;
            }
        }
    }
    if distance_factor > distance_bound {
        return Err(Error::cert("zero_out_mixture", "pointwise distance exceeds factor * delta/(1 - delta)"));
    }
    let cert = MixtureZeroOutCertificate {
        d,
        theta,
        max_shift,
        delta,
        factor,
        stated_factor,
        distance_factor,
        distance_bound,
        distribution: tilde.is_distribution(),
        components: comps,
    };
    Ok((dense, tilde, cert))
}

/// Verified properties of [`redistribute`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RedistributeCertificate {
    /// Degree budget.
    pub d: u32,
    /// Threshold.
    pub theta: u64,
    /// Smoothness constant of `Phi` on `X|<=theta`.
    pub k: Q,
    /// `N` used: `max(2, max_u factor(Z_u), 2(max_u ||Z_u||_1 - 1))`.
    pub n_used: Q,
    /// Closed-form `N`.
    pub n_stated: Q,
    /// `orth(Phi - Phi*) > d`.
    pub orth_ok: bool,
    /// `||Phi*||_1 <= 2 ||Phi||_1`.
    pub l1_ok: bool,
    /// `Phi Phi* >= 0` pointwise.
    pub sign_ok: bool,
    /// `|Phi*| >= ||Phi||_1 Lambda*/N` pointwise.
    pub min_smooth_ok: bool,
    /// `min_{Lambda*(x) > 0} |Phi*(x)| / Lambda*(x)`.
    pub min_ratio: Q,
    /// True for the `Phi = 0` case.
    pub trivial: bool,
}

impl RedistributeCertificate {
    /// True when all four properties hold.
    pub fn holds(&self) -> bool {
        self.orth_ok && self.l1_ok && self.sign_ok && self.min_smooth_ok
    }
}

/// Makes a locally smooth `Phi` on `X|<=theta` globally min-smooth relative
/// to `Lambda*`: `Phi* = Phi + (||Phi||_1/N) sum_u sgn(Phi(u)) Lambda*(u) Z_u`.
pub fn redistribute(
    phi: &FnTable,
    lambda_star: &FnTable,
    d: u32,
    theta: u64,
) -> Result<(FnTable, RedistributeCertificate)> {
    let r = origin_box(phi)?;
    let (th, di) = (theta as i64, i64::from(d));
    let sum_r: i64 = r.iter().sum();
    if 3 * di >= th.min(sum_r) {
        return Err(Error::pre("redistribute", format!("need d < min(theta, sum r_i)/3, got d = {d}, theta = {theta}")));
    }
    if !lambda_star.is_distribution() || lambda_star.iter().any(|(p, _)| weight(p) > th) {
        return Err(Error::pre("redistribute", "Lambda* must be a distribution on X|<=theta"));
    }
    if phi.iter().any(|(p, _)| weight(p) > th) {
        return Err(Error::pre("redistribute", "Phi must live on X|<=theta"));
    }
    let n = r.len();
    if phi.is_zero() {
        let cert = RedistributeCertificate {
            d,
            theta,
            k: Q::one(),
            n_used: q(2),
            n_stated: q(2),
            orth_ok: true,
            l1_ok: true,
            sign_ok: true,
            min_smooth_ok: lambda_star.is_zero(),
            min_ratio: Q::zero(),
            trivial: true,
        };
        return Ok((phi.clone(), cert));
    }
    let xdom = Domain::boxed(&r);
    let region = xdom.clone().at_most(th);
    let k = min_smooth_constant(phi, &region)?
        .ok_or_else(|| Error::pre("redistribute", "Phi is not smooth on X|<=theta (vanishes somewhere)"))?;
    let norm = phi.l1();
    let base = phi.abs().scale(&norm.recip()).with_domain(xdom.clone())?;
    let mut zs: Vec<(Point, Q, FnTable)> = Vec::new();
    let mut n_used = q(2);
    for (u, w) in lambda_star.iter() {
        let (z, zc) = build_zu(&base, u, d, theta)?;
        n_used = n_used.max(zc.factor.clone()).max(q(2) * (&zc.l1 - Q::one()));
        let sgn = if phi.get(u).is_negative() { -Q::one() } else { Q::one() };
        zs.push((u.clone(), sgn * w, z));
    }
    let mut star = phi.with_domain(xdom.clone())?;
    let step = &norm / &n_used;
    for (_, w, z) in &zs {
        star = star.axpy(&(&step * w), z)?;
    }
    let star = star.with_domain(xdom)?;
    let moved = star.sub(phi)?;
    let orth_ok = orth_at_least(&moved, d + 1);
    let l1_ok = star.l1() <= q(2) * &norm;
    let pts = region.points();
    let sign_ok = pts.iter().all(|x| !(phi.get(x) * star.get(x)).is_negative());
    let min_smooth_ok = pts.iter().all(|x| star.get(x).abs() >= &step * lambda_star.get(x));
    let min_ratio = lambda_star
        .iter()
        .map(|(x, w)| star.get(x).abs() / w)
        .min()
        .unwrap_or_else(Q::zero);
    let cert = RedistributeCertificate {
        d,
        theta,
        n_stated: closed_form_factor(d, &k, n, phi.support_diameter()),
        k,
        n_used,
        orth_ok,
        l1_ok,
        sign_ok,
        min_smooth_ok,
        min_ratio,
        trivial: false,
    };
    if !cert.holds() {
        return Err(Error::cert("redistribute", format!("{cert:?}")));
    }
    Ok((star, cert))
}

/// Human-readable one-line summary of a smoothness certificate.
pub fn describe_smooth(c: &SmoothCertificate) -> String {
    format!(
        "K = {} on {:?} ({} pairs, {})",
        c.k,
        c.region,
        c.pairs_checked,
        if c.by_adjacency { "adjacent pairs" } else { "all pairs" }
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::qr;

    fn qs(v: &[i64]) -> Vec<Q> {
        v.iter().map(|&x| q(x)).collect()
    }

    #[test]
    fn heavy_set_examples() {
        let v = qs(&[5, 1, 1, 1]);
        let hs = select_heavy_set(&v, &q(4)).unwrap();
        assert_eq!(hs.set, vec![0]);
        assert!(heavy_set_conditions(&v, &q(4), &[0]).holds());
        let hs = select_heavy_set(&qs(&[7, 0, 0]), &q(7)).unwrap();
        assert_eq!(hs.set, vec![0]);
        let hs = select_heavy_set(&qs(&[2, 2, 2, 2]), &q(4)).unwrap();
        assert!(hs.outside < q(4));
        assert!(brute_force_heavy_set(&qs(&[2, 2, 2, 2]), &q(4)).is_some());
        assert!(select_heavy_set(&qs(&[1, 1]), &q(3)).is_err());
    }

    #[test]
    fn concentration_point_mass_and_geometric() {
        let point = FnTable::univariate(&[q(1)]);
        let rep = check_concentration(&[point], &q(1), &Bracket::exact(qr(1, 2)), 22).unwrap();
        assert!(rep.pass && rep.tail.is_zero());
        let geo = FnTable::univariate(&[qr(1, 2), qr(1, 4), qr(1, 8), qr(1, 8)]);
        let dist = weight_distribution(&[geo.clone(), geo]).unwrap();
        assert_eq!(dist.iter().sum::<Q>(), q(1));
        assert_eq!(dist[0], qr(1, 4));
    }

    fn b_member() -> FnTable {
        let w = [q(1), qr(1, 4), qr(1, 9)];
        let s: Q = w.iter().sum();
        FnTable::univariate(&w.iter().map(|x| x / &s).collect::<Vec<_>>())
    }

    #[test]
    fn weight_reduction_mechanics() {
        let lam = ProductMixture::product(vec![b_member(); 3]).unwrap();
        let wr = weight_reduce_construction(&lam, 1, 2).unwrap();
        assert!(!wr.zeta.is_zero());
        assert!(orth_at_least(&wr.zeta, 2));
        for (x, _) in wr.lambda_tilde.iter() {
            assert!(weight(x) < 4);
        }
        let fam = FamilySpec::b(2, qr(1, 2), q(0));
        assert!(weight_reduce(&lam, &fam, 1, 2).is_err());
        let (wr, cert) = weight_reduce(&lam, &fam, 1, 300).unwrap();
        assert!(cert.holds());
        assert_eq!(wr.lambda_tilde, wr.lambda);
    }

    fn smooth_box() -> FnTable {
        // 2^{-(x+y)} on {0..4}^2, normalized: 2-smooth.
        let f = FnTable::from_fn(Domain::uniform_box(2, 4), |x| pow2(-(x[0] + x[1])));
        let s = f.sum();
        f.scale(&s.recip())
    }

    #[test]
    fn cap_ball_on_smooth_box() {
        let lam = smooth_box();
        let rep = verify_cap_ball(&lam, 6, 1, None, None).unwrap();
        assert!(rep.cap_ok && rep.ball_ok);
        assert_eq!(rep.smooth.k, q(2));
        assert!(verify_cap_ball(&lam, 0, 1, None, None).is_err());
    }

    #[test]
    fn zu_and_zero_out() {
        let lam = smooth_box().restrict_weight(0, 7).with_domain(Domain::uniform_box(2, 4)).unwrap();
        let s = lam.sum();
        let lam = lam.scale(&s.recip());
        let (z, c) = build_zu(&lam, &[4, 4], 1, 7).unwrap();
        assert_eq!(z.get(&[4, 4]), q(1));
        assert!(c.l1 <= c.l1_bound);
        let phi = smooth_box();
        let (t, c) = zero_out_heavy(&phi, 1, 6).unwrap();
        assert!(!c.trivial);
        assert!(t.iter().all(|(x, _)| weight(x) <= 6));
        let (t, c) = zero_out_heavy(&phi, 1, 9).unwrap();
        assert!(c.trivial);
        assert_eq!(t, phi);
    }

    #[test]
    fn redistribute_basics() {
        let phi = smooth_box().restrict_weight(0, 6).with_domain(Domain::uniform_box(2, 4)).unwrap();
        let dom = Domain::uniform_box(2, 4).at_most(6);
        let npts = q(dom.size() as i64);
        let uniform =
            FnTable::from_fn(Domain::uniform_box(2, 4), |x| if weight(x) <= 6 { npts.recip() } else { Q::zero() });
        let (star, c) = redistribute(&phi, &uniform, 1, 6).unwrap();
        assert!(c.holds());
        assert!(star.iter().all(|(_, v)| v.is_positive()));
        let zero = FnTable::zero(Domain::uniform_box(2, 4));
        let (same, c) = redistribute(&zero, &uniform, 1, 6).unwrap();
        assert!(c.trivial && same.is_zero());
    }
}
