//! Dual distributions for the Minsky–Papert function.
//!
//! `MP*_{m,R}` on `{0..R}^m` is one exactly when every coordinate is at least
//! one. All objects below are built from the OR gadget.
//!
//! **Gadget.** Take `psi` on `{0..R}` with bias `eps/2`, so that
//! `psi(0) > (1 - eps/2)/2`. Split `|psi|` into `mu_0` (mass at `0`), `mu_1`
//! (negative points) and `mu_2` (positive points other than `0`), each
//! normalized. Then `psi = ((1-delta)/2) mu_0 - mu_1/2 + (delta/2) mu_2` where
//! `delta` is twice the positive mass away from zero, and `delta < eps/2`.
//! With `D = 1 - delta^2`,
//!
//! * `lambda_0 = mu_0`,
//! * `lambda_1 = ((1 - eps delta)/D) mu_1 + (delta (eps - delta)/D) mu_2`,
//! * `lambda_2 = ((eps - delta)/(eps D)) mu_1 + (delta (1 - eps delta)/(eps D)) mu_2`,
//!
//! and `(1-eps) lambda_0 + eps lambda_2 - lambda_1 = 2 (1-eps)/(1-delta) psi`,
//! so its orthogonal content `d_gadget` equals that of `psi`.
//!
//! **Bounded witness** (`eps = 1/2`, `R = r`):
//! `Lambda_0 = (lambda_0/2 + lambda_2/2)^{(x)m} - (-lambda_0/2 + lambda_2/2)^{(x)m}`,
//! which is the average over odd `|S|` of `lambda_0^{(x)S} lambda_2^{(x)S-bar}`,
//! and `Lambda_1 = lambda_1^{(x)m}`.
//!
//! **Locally smooth witness** (`eps = 1/6`): with `a = lambda_0/(m+1) + m lambda_1/(m+1)`
//! and `b = (1-eps) lambda_0 + eps lambda_2`,
//! `Psi_1 = a^{(x)m} - 2 lambda_1^{(x)m}`,
//! `Psi_2 = 2 b^{(x)m} - 2 (-eps lambda_0 + eps lambda_2)^{(x)m} - (lambda_0/(m+1) + m b/(m+1))^{(x)m}`,
//! and `Lambda_0`, `Lambda_1` are the positive and negative parts of
//! `Psi_1 + Psi_2` scaled by `2/(||Psi_1||_1 + ||Psi_2||_1)`.
//!
//! **Min-smooth witness on the hypercube**: `psi` with bias `1/50` is lifted
//! to `{0,1}^r`; with `upsilon` uniform on the non-zero points,
//! `lambda_1 = (2/(3(1-delta))) mu_1 + (1 - 2/(3(1-delta))) upsilon`,
//! `lambda_2 = (2 delta/(1-delta)) mu_2 + (1 - 2 delta/(1-delta)) upsilon` and
//! `Lambda = (2 lambda_0/3 + lambda_2/3)^{(x)m}/2 - (-lambda_0/3 + lambda_2/3)^{(x)m}/2 + lambda_1^{(x)m}/2`.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use num_traits::{One, Signed, Zero};

use crate::domain::{Domain, Point};
use crate::dual_or::{build_psi_default, PsiCertificate};
use crate::error::{Error, Result};
use crate::family::{best_b_star_constant, min_smooth_constant, FamilySpec};
use crate::mixture::{ProductMixture, DENSE_LIMIT};
use crate::orth::{orth, orth_at_least, OrthResult};
use crate::rational::{pow, q, qr, Q};
use crate::table::{lift_symmetric_to_cube, pos_neg_parts, tensor_pow, FnTable};

/// `MP*_{m,R}(x)`: true when every coordinate is at least one.
pub fn mp_star_at(x: &[i64]) -> bool {
    x.iter().all(|&c| c >= 1)
}

/// `MP_{m,r}(x)` on `{0,1}^{mr}` (blocks of `r` consecutive bits).
pub fn mp_at(x: &[i64], r: usize) -> bool {
    x.chunks(r).all(|b| b.iter().any(|&c| c != 0))
}

/// The three gadget distributions together with `psi`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrGadget {
    /// `lambda_0, lambda_1, lambda_2` on `{0..R}`.
    pub lambda: [FnTable; 3],
    /// The underlying `psi` on `{0..R}`.
    pub psi: FnTable,
}

/// Verified properties of the OR gadget.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GadgetCertificate {
    /// Domain length `R`.
    pub big_r: u64,
    /// Scale `r` (envelope rate `1/sqrt r`).
    pub r: u64,
    /// Bias `eps`.
    pub eps: Q,
    /// `delta = 2 * (positive mass of psi away from 0)`.
    pub delta: Q,
    /// Certificate of `psi`.
    pub psi: PsiCertificate,
    /// `orth((1-eps) lambda_0 + eps lambda_2 - lambda_1)`, exact.
    pub d_gadget: u32,
    /// `alpha^2 = c_2^2 / r`, the squared envelope rate.
    pub alpha_sq: Q,
    /// Largest `c_1` with every `lambda_i` in `B*(R, c_1, alpha, 1)`.
    pub c1: Q,
    /// Per-distribution envelope constants.
    pub envelope: [Q; 3],
    /// Support intervals `[lo, hi]` of `lambda_0, lambda_1, lambda_2`.
    pub supports: [(i64, i64); 3],
}

fn normalized(f: &FnTable) -> FnTable {
    let s = f.sum();
    if s.is_zero() {
        f.clone()
    } else {
        f.scale(&s.recip())
    }
}

/// Splits `|psi|` into normalized mass at `zero`, on negative points and on
/// positive points other than `zero`; also returns `delta`.
fn split_psi(psi: &FnTable, zero: &[i64]) -> (FnTable, FnTable, FnTable, Q) {
    let dom = psi.domain().clone();
    let at0 = psi.filter(|x| x == zero);
    let (pos, neg) = pos_neg_parts(psi);
    let pos_off = pos.filter(|x| x != zero);
    let delta = q(2) * pos_off.sum();
    (normalized(&at0.with_domain(dom.clone()).unwrap()), normalized(&neg), normalized(&pos_off), delta)
}

fn support_interval(f: &FnTable) -> (i64, i64) {
    let pts: Vec<i64> = f.iter().map(|(p, _)| p[0]).collect();
    (*pts.first().unwrap_or(&0), *pts.last().unwrap_or(&-1))
}

fn combo(parts: &[(&Q, &FnTable)]) -> FnTable {
    let mut acc = FnTable::zero(parts[0].1.domain().clone());
    for (c, f) in parts {
        acc = acc.axpy(c, f).expect("same dimension");
    }
    acc
}

/// Builds `(lambda_0, lambda_1, lambda_2)` on `{0..R}` with scale `r`.
pub fn build_or_gadget(big_r: u64, r: u64, eps: &Q) -> Result<(OrGadget, GadgetCertificate)> {
    if r == 0 || big_r < r {
        return Err(Error::pre("or_gadget", format!("need R >= r >= 1, got R = {big_r}, r = {r}")));
    }
    if !eps.is_positive() || eps >= &Q::one() {
        return Err(Error::pre("or_gadget", format!("eps = {eps} outside (0, 1)")));
    }
    let (psi, psi_cert) = build_psi_default(r, big_r, &(eps / q(2)))?;
    let (mu0, mu1, mu2, delta) = split_psi(&psi, &[0]);
    if delta >= eps / q(2) {
        return Err(Error::cert(
            "or_gadget",
            format!("delta = {delta} >= eps/2: psi(0) is too small; rebuild psi with a smaller eps"),
        ));
    }
    let one = Q::one();
    let den = &one - &delta * &delta;
    let l1 = combo(&[(&((&one - eps * &delta) / &den), &mu1), (&(&delta * (eps - &delta) / &den), &mu2)]);
    let l2 = combo(&[
        (&((eps - &delta) / (eps * &den)), &mu1),
        (&(&delta * (&one - eps * &delta) / (eps * &den)), &mu2),
    ]);
    let gadget = OrGadget { lambda: [mu0, l1, l2], psi };
    let alpha_sq = &psi_cert.params.c2 * &psi_cert.params.c2 / q(r as i64);
    let envelope: [Q; 3] = core::array::from_fn(|i| best_b_star_constant(&gadget.lambda[i], &alpha_sq, 1));
    let c1 = envelope.iter().min().cloned().unwrap();
    let d_gadget = match orth(&gadget_combination(&gadget, eps), big_r as u32 + 1) {
        OrthResult::Finite { value, .. } => value,
        other => other.lower_bound(),
    };
    let cert = GadgetCertificate {
        big_r,
        r,
        eps: eps.clone(),
        delta,
        psi: psi_cert,
        d_gadget,
        alpha_sq,
        c1,
        envelope,
        supports: core::array::from_fn(|i| support_interval(&gadget.lambda[i])),
    };
    cert.verify(&gadget)?;
    Ok((gadget, cert))
}

/// `(1-eps) lambda_0 + eps lambda_2 - lambda_1`.
pub fn gadget_combination(g: &OrGadget, eps: &Q) -> FnTable {
    let [l0, l1, l2] = &g.lambda;
    combo(&[(&(Q::one() - eps), l0), (eps, l2), (&-Q::one(), l1)])
}

impl GadgetCertificate {
    /// Re-checks every recorded property against the tables.
    pub fn verify(&self, g: &OrGadget) -> Result<()> {
        self.psi.verify(&g.psi)?;
        for (i, l) in g.lambda.iter().enumerate() {
            if !l.is_distribution() {
                return Err(Error::cert("or_gadget", format!("lambda_{i} is not a distribution")));
            }
        }
        let big_r = self.big_r as i64;
        let expected = [(0, 0), (1, big_r), (1, big_r)];
        for (i, l) in g.lambda.iter().enumerate() {
            let (lo, hi) = support_interval(l);
            let full = (hi - lo + 1) as usize == l.support_len();
            if (lo, hi) != expected[i] || !full || self.supports[i] != (lo, hi) {
                return Err(Error::cert("or_gadget", format!("support of lambda_{i} is not {:?}", expected[i])));
            }
        }
        let comb = gadget_combination(g, &self.eps);
        let one = Q::one();
        let scaled = g.psi.scale(&(q(2) * (&one - &self.eps) / (&one - &self.delta)));
        if comb.sub(&scaled)?.iter().next().is_some() {
            return Err(Error::cert("or_gadget", "combination is not the stated multiple of psi"));
        }
        if !orth_at_least(&comb, self.d_gadget) {
            return Err(Error::cert("or_gadget", format!("orth of the combination below {}", self.d_gadget)));
        }
        let spec = FamilySpec::b_star(self.big_r, self.c1.clone(), self.alpha_sq.clone(), 1);
        for (i, l) in g.lambda.iter().enumerate() {
            if !self.c1.is_positive() || !spec.contains(l).holds() {
                return Err(Error::cert("or_gadget", format!("lambda_{i} outside B*(R, c_1, alpha, 1)")));
            }
        }
        Ok(())
    }
}

/// How an orthogonality bound was established.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum OrthEvidence {
    /// Exhaustive monomial check on the densified difference.
    Dense(OrthResult),
    /// Tensor factorization: the difference is a sum of products each
    /// containing a factor of orthogonal content `d_gadget`, or `m` factors of
    /// content at least one.
    Factorization,
}

/// The bounded dual pair for `MP*_{m,r}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MpWitness {
    /// Distribution on `MP*^{-1}(0)`.
    pub lambda0: ProductMixture,
    /// Distribution on `MP*^{-1}(1)`.
    pub lambda1: ProductMixture,
    /// The gadget it was built from.
    pub gadget: OrGadget,
}

/// Verified properties of [`MpWitness`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MpCertificate {
    /// Number of blocks `m`.
    pub m: usize,
    /// Block range `r`.
    pub r: u64,
    /// Gadget certificate (`eps = 1/2`, `R = r`).
    pub gadget: GadgetCertificate,
    /// `min{m, d_gadget}`.
    pub orth_bound: u32,
    /// Evidence for `orth(Lambda_1 - Lambda_0) >= orth_bound`.
    pub orth: OrthEvidence,
}

/// Builds the bounded witness for `MP*_{m,r}`.
pub fn build_mp_witness(m: usize, r: u64) -> Result<(MpWitness, MpCertificate)> {
    if m == 0 || r == 0 {
        return Err(Error::pre("mp_witness", "need m, r >= 1"));
    }
    if m > 16 {
        return Err(Error::TooLarge(format!("2^{} odd-subset terms", m - 1)));
    }
    let (gadget, gcert) = build_or_gadget(r, r, &qr(1, 2))?;
    let [l0, l1, l2] = &gadget.lambda;
    let mut lambda0 = ProductMixture::new(m);
    let odd = (1u32 << m) / 2;
    let w = Q::from_integer(odd.into()).recip();
    for mask in 0u32..(1 << m) {
        if mask.count_ones() % 2 == 1 {
            let factors = (0..m).map(|i| if mask >> i & 1 == 1 { l0.clone() } else { l2.clone() }).collect();
            lambda0.push(w.clone(), factors)?;
        }
    }
    let lambda1 = ProductMixture::product(vec![l1.clone(); m])?;
    let orth_bound = gcert.d_gadget.min(m as u32);
    let dense_ok = (r as u128 + 1).checked_pow(m as u32).is_some_and(|s| s <= DENSE_LIMIT);
    let evidence = if dense_ok {
        let diff = lambda1.sub(&lambda0)?.densify()?;
        OrthEvidence::Dense(orth(&diff, orth_bound))
    } else {
        OrthEvidence::Factorization
    };
    let cert = MpCertificate { m, r, gadget: gcert, orth_bound, orth: evidence };
    let wit = MpWitness { lambda0, lambda1, gadget };
    cert.verify(&wit)?;
    Ok((wit, cert))
}

impl MpCertificate {
    /// Re-checks the certificate against the witness.
    pub fn verify(&self, w: &MpWitness) -> Result<()> {
        self.gadget.verify(&w.gadget)?;
        if !w.lambda0.is_distribution_mixture() || !w.lambda1.is_distribution_mixture() {
            return Err(Error::cert("mp_witness", "Lambda_0 or Lambda_1 is not a convex mixture of products"));
        }
        // Support: every term of Lambda_0 has some factor lambda_0 (point mass
        // at 0); every factor of Lambda_1 is supported on {1..r}.
        for t in w.lambda0.terms() {
            if !t.factors.iter().any(|f| f.support() == vec![vec![0]]) {
                return Err(Error::cert("mp_witness", "a Lambda_0 term has no zero block"));
            }
        }
        for t in w.lambda1.terms() {
            if t.factors.iter().any(|f| f.get(&[0]) != Q::zero()) {
                return Err(Error::cert("mp_witness", "a Lambda_1 factor charges 0"));
            }
        }
        let spec = FamilySpec::b_star(self.r, self.gadget.c1.clone(), self.gadget.alpha_sq.clone(), 1);
        for t in w.lambda0.terms().iter().chain(w.lambda1.terms()) {
            if t.factors.iter().any(|f| !spec.contains(f).holds()) {
                return Err(Error::cert("mp_witness", "a factor lies outside B*(r, c_1, alpha, 1)"));
            }
        }
        if self.orth_bound != self.gadget.d_gadget.min(self.m as u32) {
            return Err(Error::cert("mp_witness", "orth bound is not min{m, d_gadget}"));
        }
        match &self.orth {
            OrthEvidence::Dense(res) => {
                let diff = w.lambda1.sub(&w.lambda0)?.densify()?;
                if !orth_at_least(&diff, self.orth_bound) || !res.at_least(self.orth_bound) {
                    return Err(Error::cert("mp_witness", format!("orth(Lambda_1 - Lambda_0) < {}", self.orth_bound)));
                }
                for (p, _) in w.lambda0.densify()?.iter() {
                    if mp_star_at(p) {
                        return Err(Error::cert("mp_witness", format!("Lambda_0 charges {p:?} in MP*^-1(1)")));
                    }
                }
            }
            OrthEvidence::Factorization => {}
        }
        Ok(())
    }
}

/// The locally smooth dual pair on `{0..R}^m`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MpSmoothWitness {
    /// Distribution with support exactly `MP*^{-1}(0)`.
    pub lambda0: FnTable,
    /// Distribution with support exactly `MP*^{-1}(1)`.
    pub lambda1: FnTable,
    /// `Lambda_0` as a convex combination of products of the gadget
    /// distributions.
    pub mixture0: ProductMixture,
    /// `Lambda_1` as a convex combination of products of the gadget
    /// distributions.
    pub mixture1: ProductMixture,
    /// `Psi_1` (symbolic).
    pub psi1: ProductMixture,
    /// `Psi_2` (symbolic).
    pub psi2: ProductMixture,
    /// The gadget (`eps = 1/6`).
    pub gadget: OrGadget,
}

/// Verified properties of [`MpSmoothWitness`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MpSmoothCertificate {
    /// Number of blocks.
    pub m: usize,
    /// Scale `r`.
    pub r: u64,
    /// Box side `R`.
    pub big_r: u64,
    /// Gadget certificate.
    pub gadget: GadgetCertificate,
    /// Smallest `K` such that the gadget building blocks are smooth:
    /// `lambda_1`, `lambda_2` on `{1..R}`, `(1-eps) lambda_0 + eps lambda_2`
    /// on `{0..R}` are `K`-smooth and `lambda_0/(m+1) + m lambda_1/(m+1)` is
    /// `K m`-smooth.
    pub k_gadget: Q,
    /// Smallest `K` for which `(Lambda_0 + Lambda_1)/2` is `K`-smooth on the box.
    pub k_mix: Q,
    /// `k_mix <= 25 k_gadget m`.
    pub k_within_bound: bool,
    /// `|Psi_1|/5 <= a^{(x)m} <= |Psi_1|` pointwise.
    pub psi1_sandwich: bool,
    /// `|Psi_2|/3 <= b^{(x)m} <= 3|Psi_2|` pointwise.
    pub psi2_sandwich: bool,
    /// `min{m, d_gadget}`.
    pub orth_bound: u32,
    /// Exhaustive result for `orth(Lambda_0 - Lambda_1)`.
    pub orth: OrthResult,
}

fn smooth_of(f: &FnTable, region: &Domain) -> Result<Q> {
    min_smooth_constant(f, region)?.ok_or_else(|| Error::cert("mp_smooth", "zero inside a smoothness region"))
}

/// Builds the locally smooth witness on `{0..R}^m` from the gadget at scale `r`.
pub fn build_mp_smooth_witness(m: usize, r: u64, big_r: u64) -> Result<(MpSmoothWitness, MpSmoothCertificate)> {
    if m == 0 || r == 0 || big_r < r {
        return Err(Error::pre("mp_smooth", format!("need m >= 1 and R >= r >= 1, got m = {m}, r = {r}, R = {big_r}")));
    }
    if (big_r as u128 + 1).checked_pow(m as u32).is_none_or(|s| s > DENSE_LIMIT) {
        return Err(Error::TooLarge(format!("{{0..{big_r}}}^{m} exceeds {DENSE_LIMIT} points")));
    }
    let eps = qr(1, 6);
    let (gadget, gcert) = build_or_gadget(big_r, r, &eps)?;
    let [l0, l1, l2] = &gadget.lambda;
    let mq = q(m as i64);
    let inv = (&mq + q(1)).recip();
    let a = combo(&[(&inv, l0), (&(&mq * &inv), l1)]);
    let b = combo(&[(&(Q::one() - &eps), l0), (&eps, l2)]);
    let e = combo(&[(&-eps.clone(), l0), (&eps, l2)]);
    let c = combo(&[(&inv, l0), (&(&mq * &inv), &b)]);
    let power = |f: &FnTable| ProductMixture::product(vec![f.clone(); m]).expect("univariate");
    let psi1 = power(&a).sub(&power(l1).scale(&q(2)))?;
    let psi2 = power(&b).scale(&q(2)).sub(&power(&e).scale(&q(2)))?.sub(&power(&c))?;
    let dom = Domain::uniform_box(m, big_r as i64);
    let p1 = psi1.densify_on(dom.clone())?;
    let p2 = psi2.densify_on(dom.clone())?;
    let total = p1.add(&p2)?;
    let norm = p1.l1() + p2.l1();
    if norm.is_zero() {
        return Err(Error::cert("mp_smooth", "Psi_1 and Psi_2 vanish"));
    }
    let (pos, neg) = pos_neg_parts(&total);
    let s = q(2) / &norm;
    let lambda0 = pos.scale(&s);
    let lambda1 = neg.scale(&s);
    // Expand Psi_1 over {lambda_0, lambda_1}^m and Psi_2 over {lambda_0, lambda_2}^m;
    // distinct products have disjoint supports, so the signs of the expansion
    // coefficients split the sum into its positive and negative parts.
    let (mut mixture0, mut mixture1) = (ProductMixture::new(m), ProductMixture::new(m));
    let k_pow = |x: &Q, k: usize| pow(x, k as u32);
    for mask in 0u32..(1 << m) {
        let k = mask.count_ones() as usize;
        let rest = m - k;
        let mut c1 = k_pow(&inv, k) * k_pow(&(&mq * &inv), rest);
        if k == 0 {
            c1 -= q(2);
        }
        let b0 = Q::one() - &eps;
        let c0 = &inv + &mq * &inv * &b0;
        let c2 = &mq * &inv * &eps;
        let c_2 = q(2) * k_pow(&b0, k) * k_pow(&eps, rest)
            - q(2) * k_pow(&-eps.clone(), k) * k_pow(&eps, rest)
            - k_pow(&c0, k) * k_pow(&c2, rest);
        for (coef, other) in [(c1, l1), (c_2, l2)] {
            let factors: Vec<FnTable> =
                (0..m).map(|i| if mask >> i & 1 == 1 { l0.clone() } else { other.clone() }).collect();
            if coef.is_positive() {
                mixture0.push(&coef * &s, factors)?;
            } else if coef.is_negative() {
                mixture1.push(-(&coef * &s), factors)?;
            }
        }
    }

    let full = Domain::boxed(&[big_r as i64]);
    let upper = Domain::Grid { lo: vec![1], hi: vec![big_r as i64] };
    let k_gadget = [smooth_of(l1, &upper)?, smooth_of(l2, &upper)?, smooth_of(&b, &full)?, smooth_of(&a, &full)? / &mq]
        .into_iter()
        .fold(Q::one(), |x, y| x.max(y));
    let mix = lambda0.add(&lambda1)?.scale(&qr(1, 2)).with_domain(dom.clone())?;
    let k_mix = smooth_of(&mix, &dom)?;
    let a_pow = tensor_pow(&a, m);
    let b_pow = tensor_pow(&b, m);
    let psi1_sandwich = dom.points().iter().all(|x| {
        let (v, t) = (p1.get(x).abs(), a_pow.get(x));
        &v / q(5) <= t && t <= v
    });
    let psi2_sandwich = dom.points().iter().all(|x| {
        let (v, t) = (p2.get(x).abs(), b_pow.get(x));
        &v / q(3) <= t && t <= q(3) * v
    });
    let orth_bound = gcert.d_gadget.min(m as u32);
    let diff = lambda0.sub(&lambda1)?;
    let cert = MpSmoothCertificate {
        m,
        r,
        big_r,
        k_within_bound: k_mix <= q(25) * &k_gadget * &mq,
        k_gadget,
        k_mix,
        psi1_sandwich,
        psi2_sandwich,
        orth_bound,
        orth: orth(&diff, orth_bound),
        gadget: gcert,
    };
    let wit = MpSmoothWitness { lambda0, lambda1, mixture0, mixture1, psi1, psi2, gadget };
    cert.verify(&wit)?;
    Ok((wit, cert))
}

impl MpSmoothCertificate {
    /// Re-checks the certificate against the witness.
    pub fn verify(&self, w: &MpSmoothWitness) -> Result<()> {
        self.gadget.verify(&w.gadget)?;
        let dom = Domain::uniform_box(self.m, self.big_r as i64);
        for (name, l) in [("Lambda_0", &w.lambda0), ("Lambda_1", &w.lambda1)] {
            if !l.is_distribution() {
                return Err(Error::cert("mp_smooth", format!("{name} is not a distribution")));
            }
        }
        for x in dom.points() {
            let one = mp_star_at(&x);
            if w.lambda0.get(&x).is_zero() != one || w.lambda1.get(&x).is_zero() == one {
                return Err(Error::cert("mp_smooth", format!("support equality fails at {x:?}")));
            }
        }
        for (name, mix, dense) in [("Lambda_0", &w.mixture0, &w.lambda0), ("Lambda_1", &w.mixture1, &w.lambda1)] {
            if !mix.is_distribution_mixture() || mix.densify_on(dom.clone())? != *dense {
                return Err(Error::cert("mp_smooth", format!("{name} is not the recorded convex combination")));
            }
        }
        let diff = w.lambda0.sub(&w.lambda1)?;
        if !orth_at_least(&diff, self.orth_bound) || !self.orth.at_least(self.orth_bound) {
            return Err(Error::cert("mp_smooth", format!("orth(Lambda_0 - Lambda_1) < {}", self.orth_bound)));
        }
        let mix = w.lambda0.add(&w.lambda1)?.scale(&qr(1, 2)).with_domain(dom.clone())?;
        crate::family::check_smooth(&mix, &dom, &self.k_mix)?;
        if !self.psi1_sandwich || !self.psi2_sandwich {
            return Err(Error::cert("mp_smooth", "sandwich bounds for Psi_1 / Psi_2 fail"));
        }
        Ok(())
    }
}

/// Verified properties of the hypercube min-smooth witness.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RsSmoothCertificate {
    /// Number of blocks.
    pub m: usize,
    /// Block length.
    pub r: usize,
    /// `delta` of the lifted `psi`.
    pub delta: Q,
    /// `psi(0)` (must exceed `49/100`).
    pub psi0: Q,
    /// Orthogonal content of the univariate `psi`.
    pub d_psi: u32,
    /// `(1/4) (1/(12 2^r))^m`.
    pub floor: Q,
    /// `min_x Lambda(x)`.
    pub min_value: Q,
    /// `min{d_psi, m}`.
    pub orth_bound: u32,
    /// Exhaustive result for `orth(Lambda (-1)^{MP})`.
    pub orth: OrthResult,
}

/// Builds the min-smooth witness `Lambda` on `({0,1}^r)^m`.
pub fn build_rs_smooth(m: usize, r: usize) -> Result<(FnTable, RsSmoothCertificate)> {
    if m == 0 || r == 0 {
        return Err(Error::pre("rs_smooth", "need m, r >= 1"));
    }
    if m * r > 12 {
        return Err(Error::TooLarge(format!("dense hypercube of dimension {}", m * r)));
    }
    let (psi_u, pcert) = build_psi_default(r as u64, r as u64, &qr(1, 50))?;
    if pcert.psi0 <= qr(49, 100) {
        return Err(Error::cert("rs_smooth", "psi(0) <= 0.49; rebuild psi with a smaller eps"));
    }
    let d_psi = match orth(&psi_u, r as u32 + 1) {
        OrthResult::Finite { value, .. } => value,
        other => other.lower_bound(),
    };
    let psi = lift_symmetric_to_cube(&psi_u)?;
    let zero = vec![0; r];
    let (mu0, mu1, mu2, delta) = split_psi(&psi, &zero);
    let cube = Domain::Hypercube(r);
    let npts = q((1i64 << r) - 1);
    let upsilon = FnTable::from_fn(cube.clone(), |x| if x == zero.as_slice() { Q::zero() } else { npts.recip() });
    let one = Q::one();
    let c1 = q(2) / (q(3) * (&one - &delta));
    let c2 = q(2) * &delta / (&one - &delta);
    let l1 = combo(&[(&c1, &mu1), (&(&one - &c1), &upsilon)]);
    let l2 = combo(&[(&c2, &mu2), (&(&one - &c2), &upsilon)]);
    let third = qr(1, 3);
    let a = combo(&[(&qr(2, 3), &mu0), (&third, &l2)]);
    let e = combo(&[(&-third.clone(), &mu0), (&third, &l2)]);
    let half = qr(1, 2);
    let lam = tensor_pow(&a, m)
        .scale(&half)
        .sub(&tensor_pow(&e, m).scale(&half))?
        .add(&tensor_pow(&l1, m).scale(&half))?
        .with_domain(Domain::Hypercube(m * r))?;
    let floor = qr(1, 4) * pow(&Q::from_integer((12i64 << r).into()).recip(), m as u32);
    let min_value = Domain::Hypercube(m * r).points().iter().map(|x| lam.get(x)).min().unwrap();
    let orth_bound = d_psi.min(m as u32);
    let signed = signed_by_mp(&lam, r);
    let cert = RsSmoothCertificate {
        m,
        r,
        delta,
        psi0: pcert.psi0,
        d_psi,
        floor,
        min_value,
        orth_bound,
        orth: orth(&signed, orth_bound),
    };
    cert.verify(&lam)?;
    Ok((lam, cert))
}

fn signed_by_mp(lam: &FnTable, r: usize) -> FnTable {
    let mut out = lam.clone();
    for (p, v) in lam.iter() {
        if mp_at(p, r) {
            out.set(p, -v.clone()).expect("same domain");
        }
    }
    out
}

impl RsSmoothCertificate {
    /// Re-checks the certificate against `Lambda`.
    pub fn verify(&self, lam: &FnTable) -> Result<()> {
        if lam.domain() != &Domain::Hypercube(self.m * self.r) {
            return Err(Error::cert("rs_smooth", "wrong domain"));
        }
        if lam.sum() != Q::one() {
            return Err(Error::cert("rs_smooth", "<Lambda, 1> != 1"));
        }
        let pts: Vec<Point> = lam.domain().points();
        let min = pts.iter().map(|x| lam.get(x)).min().unwrap();
        if min != self.min_value || min < self.floor {
            return Err(Error::cert("rs_smooth", format!("min Lambda = {min} below the floor {}", self.floor)));
        }
        let signed = signed_by_mp(lam, self.r);
        if !orth_at_least(&signed, self.orth_bound) || !self.orth.at_least(self.orth_bound) {
            return Err(Error::cert("rs_smooth", format!("orth(Lambda (-1)^MP) < {}", self.orth_bound)));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gadget_basic_properties() {
        let (g, c) = build_or_gadget(9, 9, &qr(1, 2)).unwrap();
        assert_eq!(g.lambda[0].support(), vec![vec![0]]);
        for i in 0..3 {
            for j in 0..3 {
                assert!((g.lambda[i].sum() - g.lambda[j].sum()).is_zero());
            }
        }
        assert!(c.d_gadget >= 1);
        assert!(c.delta < qr(1, 4));
        c.verify(&g).unwrap();
    }

    #[test]
    fn single_block_witnesses() {
        let (w, c) = build_mp_witness(1, 3).unwrap();
        assert_eq!(w.lambda0.densify().unwrap(), w.gadget.lambda[0].clone());
        assert_eq!(w.lambda1.densify().unwrap(), w.gadget.lambda[1].clone());
        assert_eq!(c.orth_bound, 1);
        let (s, _) = build_mp_smooth_witness(1, 3, 3).unwrap();
        assert_eq!(s.lambda0, s.gadget.lambda[0].with_domain(s.lambda0.domain().clone()).unwrap());
    }

    #[test]
    fn two_block_witnesses() {
        let (w, c) = build_mp_witness(2, 4).unwrap();
        assert!(matches!(c.orth, OrthEvidence::Dense(_)));
        c.verify(&w).unwrap();
        let (s, sc) = build_mp_smooth_witness(2, 4, 4).unwrap();
        assert_eq!(s.lambda0.sum(), s.lambda1.sum());
        for x in Domain::uniform_box(2, 4).points() {
            assert_eq!(s.lambda0.get(&x).is_zero(), x[0] != 0 && x[1] != 0);
        }
        assert!(sc.psi1_sandwich && sc.psi2_sandwich);
    }

    #[test]
    fn hypercube_witness() {
        let (lam, c) = build_rs_smooth(1, 2).unwrap();
        assert!(lam.get(&[0, 0]) >= qr(1, 48));
        assert!(c.min_value >= c.floor);
        assert!(c.psi0 > qr(49, 100));
    }
}
