//! The acceptance suite: twelve end-to-end checks with pinned parameters,
//! seeds, tolerances and time budgets.
//!
//! Each check returns a [`CriterionResult`]; a criterion passes only when
//! every exact property holds *and* it finishes within its budget. Criteria
//! listed in [`KNOWN_FAILURES`] are expected to fail with the shipped
//! constructions; the README explains why. They are still run and reported
//! as `FAIL`.

use std::time::{Duration, Instant};

use anyhow::{Context, Result};
use dualpoly::amplify::{
    booleanize_all, booleanize_degree_drop, booleanize_min_theta, build_compression, build_g, min_smooth_amplify,
    AmplifyParams, BitPoly,
};
use dualpoly::circuits::{dictator, krause_pudlak, mp, parity_dnf};
use dualpoly::corrector::{build_zeta_cube, l1_bound};
use dualpoly::domain::weight;
use dualpoly::dual_mp::{build_mp_witness, build_rs_smooth};
use dualpoly::dual_or::build_psi_default;
use dualpoly::family::FamilySpec;
use dualpoly::lp::oracles::{smooth_threshold_degree, threshold_degree, threshold_density, DensityAnswer};
use dualpoly::matrix::{
    forster_bound, staircase_identity, staircase_identity_realization, staircase_upper, staircase_upper_realization,
    PatternMatrix,
};
use dualpoly::mixture::ProductMixture;
use dualpoly::orth::{exponents_of_degree, orth_at_least, Monomial};
use dualpoly::rational::{pow, q, qr, to_f64, to_pq};
use dualpoly::smooth::weight_reduce;
use dualpoly::{Domain, FnTable, Q};
use num_traits::{One, Signed, Zero};
use rand::Rng;

use crate::numeric::{compare_pattern_norm, random_sparse_phi, rng, REL_TOL};

/// Seed for every randomized criterion.
pub const SEED: u64 = 20_240_601;

/// Criteria expected to fail with the shipped constructions.
pub const KNOWN_FAILURES: &[u8] = &[3];

/// Outcome of one criterion.
#[derive(Debug, Clone)]
pub struct CriterionResult {
    /// Criterion number (1-12).
    pub id: u8,
    /// Short title.
    pub title: &'static str,
    /// Every property held within the budget.
    pub pass: bool,
    /// What was checked and the key quantities.
    pub detail: String,
    /// Wall-clock time.
    pub elapsed: Duration,
    /// Time budget.
    pub budget: Duration,
}

impl CriterionResult {
    /// One summary line: `PASS [ 3] title (1.2s / 60s): detail`.
    pub fn line(&self) -> String {
        format!(
            "{} [{:>2}] {} ({:.2}s / {}s): {}",
            if self.pass { "PASS" } else { "FAIL" },
            self.id,
            self.title,
            self.elapsed.as_secs_f64(),
            self.budget.as_secs(),
            self.detail
        )
    }
}

/// Signature shared by all criteria: `Ok((pass, detail))`.
type Check = fn() -> Result<(bool, String)>;

/// `(id, title, budget in seconds, check)` for every criterion.
pub const CRITERIA: &[(u8, &str, u64, Check)] = &[
    (1, "oracle exactness: PARITY_n and AND_n threshold degree", 10, criterion_1),
    (2, "MP(2,4) witness orthogonality vs LP threshold degree", 300, criterion_2),
    (3, "psi certificates for n in {8,16,32,64}", 60, criterion_3),
    (4, "corrector suite n <= 10, d <= 3", 60, criterion_4),
    (5, "weight transfer on B(2,1/2,0)^3", 60, criterion_5),
    (6, "min-smooth MP(2,4) witness vs LP smooth threshold degree", 600, criterion_6),
    (7, "pattern-matrix norm formula vs SVD", 120, criterion_7),
    (8, "order-4 staircase realizations vs Forster bound", 10, criterion_8),
    (9, "Booleanize degree drop at n = 2, m = 2", 300, criterion_9),
    (10, "re-encoding moments and compression degree division", 300, criterion_10),
    (11, "Krause-Pudlak density vs threshold degree", 600, criterion_11),
    (12, "end-to-end smooth amplification", 900, criterion_12),
];

/// Runs one criterion by number.
pub fn run_one(id: u8) -> Result<CriterionResult> {
    let &(id, title, budget, check) =
        CRITERIA.iter().find(|c| c.0 == id).with_context(|| format!("no criterion {id}"))?;
    let start = Instant::now();
    let outcome = check();
    let elapsed = start.elapsed();
    let budget = Duration::from_secs(budget);
    let (ok, mut detail) = match outcome {
        Ok(r) => r,
        Err(e) => (false, format!("error: {e:#}")),
    };
    if elapsed > budget {
        detail.push_str("; over time budget");
    }
    Ok(CriterionResult { id, title, pass: ok && elapsed <= budget, detail, elapsed, budget })
}

/// Runs every criterion in order.
pub fn run_all() -> Vec<CriterionResult> {
    CRITERIA.iter().map(|c| run_one(c.0).expect("listed criterion")).collect()
}

fn parity(n: usize) -> FnTable {
    FnTable::boolean(Domain::Hypercube(n), |x| x.iter().sum::<i64>() % 2 == 1)
}

fn and_table(n: usize) -> FnTable {
    FnTable::boolean(Domain::Hypercube(n), |x| x.iter().all(|&b| b == 1))
}

fn sign_of(f: &FnTable, x: &[i64]) -> Q {
    if f.get(x).is_zero() {
        Q::one()
    } else {
        -Q::one()
    }
}

/// Threshold degree of PARITY_n is n and of AND_n is 1, n = 1..4.
pub fn criterion_1() -> Result<(bool, String)> {
    let mut ok = true;
    let mut parts = Vec::new();
    for n in 1..=4 {
        let p = threshold_degree(&parity(n))?.value;
        let a = threshold_degree(&and_table(n))?.value;
        ok &= p == n as u32 && a == 1;
        parts.push(format!("n={n}: parity {p}, and {a}"));
    }
    Ok((ok, parts.join("; ")))
}

/// `orth(Lambda_1 - Lambda_0) >= min{2, d_gadget}` densely, and the LP
/// threshold degree of MP_{2,4} is at least that bound.
pub fn criterion_2() -> Result<(bool, String)> {
    let (wit, cert) = build_mp_witness(2, 4)?;
    let bound = cert.gadget.d_gadget.min(2);
    let diff = wit.lambda1.densify()?.sub(&wit.lambda0.densify()?)?;
    let dense_ok = orth_at_least(&diff, bound);
    let table = mp(2, 4)?.truth_table()?;
    let lp = threshold_degree(&table)?.value;
    Ok((
        dense_ok && lp >= bound,
        format!("d_gadget = {}, bound = {bound}, dense orth >= bound: {dense_ok}, LP degthr(MP_2,4) = {lp}", cert.gadget.d_gadget),
    ))
}

/// psi at n in {8, 16, 32, 64}, eps = 1/3, N = n: exact l1, signs, psi(0) and
/// orthogonality against the target `n > Delta ? floor(sqrt(n/Delta)) + 2 : 1`.
pub fn criterion_3() -> Result<(bool, String)> {
    let eps = qr(1, 3);
    let mut ok = true;
    let mut parts = Vec::new();
    for n in [8u64, 16, 32, 64] {
        let (psi, cert) = match build_psi_default(n, n, &eps) {
            Ok(x) => x,
            Err(e) => {
                ok = false;
                parts.push(format!("n={n}: construction failed ({e})"));
                continue;
            }
        };
        let delta = cert.omega.spec.big_delta;
        let target = if n > delta {
            let k = n / delta;
            (0u32..).take_while(|&j| u64::from(j) * u64::from(j) <= k).last().unwrap_or(0) + 2
        } else {
            1
        };
        let l1 = psi.l1() == Q::one();
        let signs = (0..=n as i64).all(|t| {
            let v = psi.get(&[t]);
            !v.is_zero() && (v.is_positive() == (t % 2 == 0))
        });
        let psi0 = psi.get(&[0]) > (Q::one() - &eps) / q(2);
        let orth_ok = orth_at_least(&psi, target);
        let this = l1 && signs && psi0 && orth_ok;
        ok &= this;
        parts.push(format!(
            "n={n}: l1 {l1}, signs {signs}, psi(0) {psi0}, orth {} vs target {target}{}",
            cert.orth.lower_bound(),
            if this { "" } else { " FAIL" }
        ));
    }
    Ok((ok, parts.join("; ")))
}

/// Cube correctors for every `d < n <= 10`, `d <= 3`.
pub fn criterion_4() -> Result<(bool, String)> {
    let mut ok = true;
    let mut count = 0;
    let mut worst = Q::zero();
    for n in 1..=10usize {
        for d in 0..=3u32 {
            if d as usize >= n {
                continue;
            }
            let (z, _) = build_zeta_cube(n, d)?;
            let anchor = vec![1i64; n];
            let support = z.iter().all(|(p, _)| *p == anchor || weight(p) <= i64::from(d));
            let bound = l1_bound(n as u64, d);
            let l1 = z.l1();
            let this = z.get(&anchor) == Q::one() && support && orth_at_least(&z, d + 1) && l1 <= bound;
            ok &= this;
            worst = worst.max(l1 / bound);
            count += 1;
        }
    }
    Ok((ok, format!("{count} correctors (d >= n has none); max l1/bound = {}", to_pq(&worst))))
}

fn b_factor() -> FnTable {
    let w = [q(1), qr(1, 4), qr(1, 9)];
    let s: Q = w.iter().sum();
    FnTable::univariate(&w.iter().map(|x| x / &s).collect::<Vec<_>>())
}

/// Weight reduction on a product of three members of `B(2, 1/2, 0)` at the
/// smallest admissible theta for `d = 1`.
pub fn criterion_5() -> Result<(bool, String)> {
    let fam = FamilySpec::b(2, qr(1, 2), q(0));
    let lam = ProductMixture::product(vec![b_factor(); 3])?;
    let d = 1;
    let theta = booleanize_min_theta(3, &qr(1, 2), d);
    let (wr, cert) = weight_reduce(&lam, &fam, d, theta)?;
    let moved = wr.lambda.sub(&wr.lambda_tilde)?.l1();
    let ok = cert.support_ok && cert.orth_ok && cert.factor_ok && cert.distribution != Some(false);
    Ok((
        ok,
        format!(
            "theta = {theta}, support {}, orth {}, computed factor {} <= stated {}: {}; mass moved {} (trivial: support diameter 6 < theta)",
            cert.support_ok,
            cert.orth_ok,
            to_pq(&cert.computed_factor),
            to_f64(&cert.stated_factor),
            cert.factor_ok,
            to_pq(&moved)
        ),
    ))
}

/// `build_rs_smooth(2, 4)`: exact distribution, pointwise floor, orthogonality,
/// and the LP smooth threshold degree at gamma = 12^{-3}.
pub fn criterion_6() -> Result<(bool, String)> {
    let (lam, cert) = build_rs_smooth(2, 4)?;
    let dist = lam.is_distribution();
    let floor = qr(1, 4) * pow(&qr(1, 12 * 16), 2);
    let floor_ok = lam.domain().points().iter().all(|x| lam.get(x) >= floor);
    let target = cert.d_psi.min(2);
    let table = mp(2, 4)?.truth_table()?;
    let signed = FnTable::from_fn(lam.domain().clone(), |x| sign_of(&table, x) * lam.get(x));
    let orth_ok = orth_at_least(&signed, target);
    let gamma = pow(&qr(1, 12), 3);
    let lp = smooth_threshold_degree(&table, &gamma)?.value;
    Ok((
        dist && floor_ok && orth_ok && lp >= target,
        format!("distribution {dist}, floor {floor_ok}, orth >= {target}: {orth_ok}, LP degthr(MP_2,4, 12^-3) = {lp}"),
    ))
}

/// Closed-form pattern-matrix norm against the SVD for 20 seeded sparse
/// `phi` at each `(N, n)`.
pub fn criterion_7() -> Result<(bool, String)> {
    let mut r = rng(SEED);
    let mut worst = 0f64;
    let mut count = 0;
    for (big_n, n) in [(2usize, 1usize), (4, 2), (6, 3)] {
        for _ in 0..20 {
            let pm = PatternMatrix::new(big_n, n, random_sparse_phi(n, &mut r))?;
            worst = worst.max(compare_pattern_norm(&pm)?.relative_error);
            count += 1;
        }
    }
    Ok((worst <= REL_TOL, format!("{count} matrices, max relative error {worst:.3e} (tolerance {REL_TOL:e})")))
}

/// Rank-2 and rank-3 realizations of the order-4 staircase patterns, with
/// the Forster quantity certainly below each rank.
pub fn criterion_8() -> Result<(bool, String)> {
    let a = staircase_upper(4);
    let b1 = forster_bound(&a)?.with_realization(&a, &staircase_upper_realization(4))?;
    let i = staircase_identity(4);
    let b2 = forster_bound(&i)?.with_realization(&i, &staircase_identity_realization(4))?;
    let (r1, r2) = (b1.upper.unwrap_or(usize::MAX), b2.upper.unwrap_or(usize::MAX));
    Ok((
        r1 <= 2 && r2 <= 3,
        format!(
            "upper staircase: rank {r1}, Forster <= {:.4}; identity pattern: rank {r2}, Forster <= {:.4}",
            to_f64(&b1.value.hi),
            to_f64(&b2.value.hi)
        ),
    ))
}

fn random_poly(vars: usize, deg: u32, rng: &mut impl Rng) -> Vec<(Monomial, Q)> {
    let mut terms = Vec::new();
    let caps = vec![deg; vars];
    let top = exponents_of_degree(&caps, deg);
    let lead = top[rng.gen_range(0..top.len())].clone();
    terms.push((Monomial::new(lead), q(rng.gen_range(1..=4))));
    for _ in 0..4 {
        let k = rng.gen_range(0..=deg);
        let cands = exponents_of_degree(&caps, k);
        let e = cands[rng.gen_range(0..cands.len())].clone();
        terms.push((Monomial::new(e), q(rng.gen_range(-4..=4))));
    }
    terms
}

/// `z -> E_{Lambda~_z} p` has degree at most `floor(d / min{m, d_gadget})`
/// for 10 seeded polynomials of degree `d = 2` on `N^{nm}`, n = m = 2, r = 2.
pub fn criterion_9() -> Result<(bool, String)> {
    let (n, m, r, d) = (2usize, 2usize, 2u64, 2u32);
    let c1 = build_mp_witness(m, r)?.1.gadget.c1;
    let theta = booleanize_min_theta(n * m, &c1.min(Q::one()), d);
    let all = booleanize_all(n, m, r, d, theta)?;
    let mut rg = rng(SEED + 9);
    let mut ok = true;
    let mut degrees = Vec::new();
    let mut bound = 0;
    for _ in 0..10 {
        let p = random_poly(n * m, d, &mut rg);
        let drop = booleanize_degree_drop(&all, &p)?;
        ok &= drop.pass;
        bound = drop.bound;
        degrees.push(drop.degree);
    }
    let divisor = all[0].cert.orth_bound;
    Ok((ok, format!("r = {r}, theta = {theta}, min{{m, d_gadget}} = {divisor}, bound {bound}, degrees {degrees:?}")))
}

fn random_bit_poly(bits: usize, max_deg: usize, rng: &mut impl Rng) -> (BitPoly, usize) {
    let deg = rng.gen_range(1..=max_deg);
    let mut p: BitPoly = Vec::new();
    let pick = |k: usize, rng: &mut dyn rand::RngCore| {
        let mut s: Vec<usize> = Vec::new();
        while s.len() < k {
            let i = rng.gen_range(0..bits);
            if !s.contains(&i) {
                s.push(i);
            }
        }
        s.sort_unstable();
        s
    };
    p.push((pick(deg, rng), q(rng.gen_range(1..=3))));
    for _ in 0..3 {
        let k = rng.gen_range(0..=deg);
        p.push((pick(k, rng), q(rng.gen_range(-3..=3))));
    }
    (p, deg)
}

/// `g` for n = 1..3 passes every moment equality; `G` at theta = 2 divides
/// the degree of 10 seeded multilinear polynomials per n.
pub fn criterion_10() -> Result<(bool, String)> {
    let mut ok = true;
    let mut parts = Vec::new();
    let mut rg = rng(SEED + 10);
    for n in 1..=3usize {
        let g = build_g(n)?;
        let moments = g.verify()?;
        let big = build_compression(n, 2)?;
        let max_deg = 3 * (g.l as usize + 1);
        let mut fails = 0;
        for _ in 0..10 {
            let (p, _) = random_bit_poly(big.input_bits(), max_deg, &mut rg);
            if !big.degree_division(&p)?.pass {
                fails += 1;
            }
        }
        ok &= fails == 0;
        parts.push(format!("n={n}: L={}, {moments} moment checks, checks {:?}, degree division on 10 random polynomials: {fails} failures", g.l, g.checks));
    }
    Ok((ok, parts.join("; ")))
}

/// Threshold density of the Krause–Pudlák lift of x1 and PARITY_2 is at
/// least `2^{degthr(f)}`.
pub fn criterion_11() -> Result<(bool, String)> {
    let mut ok = true;
    let mut parts = Vec::new();
    for (name, circ, table) in [("x1", dictator(1)?, and_table(1)), ("PARITY_2", parity_dnf(2)?, parity(2))] {
        let deg = threshold_degree(&table)?.value;
        let lifted = krause_pudlak(&circ)?.truth_table()?;
        let need = 1usize << deg;
        let ans = threshold_density(&lifted, need - 1)?;
        let this = matches!(ans, DensityAnswer::AtLeast(v) if v >= need);
        ok &= this;
        parts.push(format!("{name}: degthr {deg}, density of lift >= {} (need {need})", ans.value()));
    }
    Ok((ok, parts.join("; ")))
}

/// `min_smooth_amplify` on `f = x1` with uniform `mu` at the smallest
/// parameters that pass all preconditions, re-verified, plus the LP smooth
/// threshold degree of the composed table at the certified factor.
pub fn criterion_12() -> Result<(bool, String)> {
    let f = and_table(1);
    let mu = FnTable::from_fn(Domain::Hypercube(1), |_| qr(1, 2));
    let params = AmplifyParams { m: 1, r: 1, big_r: 6, theta: 5, gamma: q(1), d: 1 };
    let out = min_smooth_amplify(&f, &mu, &params)?;
    out.verify()?;
    let gamma = out.cert.min_smooth_factor.clone().min(Q::one());
    let lp = smooth_threshold_degree(&out.composed, &gamma)?.value;
    let ok = out.cert.orth_ok && out.cert.min_smooth_ok && out.cert.sign_ok && lp >= params.d;
    Ok((
        ok,
        format!(
            "R = 6, theta = 5, d = 1: orth {}, min-smooth factor ~ {:.6e}, half condition {}, LP degthr(F, factor) = {lp}",
            out.cert.orth.lower_bound(),
            to_f64(&out.cert.min_smooth_factor),
            out.cert.half_condition
        ),
    ))
}
