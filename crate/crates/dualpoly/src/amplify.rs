//! Input compression, Booleanization, composition and smooth amplification.
//!
//! * [`build_g`]: a surjection `g: {0,1}^{6L} -> {0^n, e_1, ..., e_n}`,
//!   `L = ceil(log(n+1))`, whose fibres have identical moments up to degree
//!   `L`. It is found by a deterministic search restricted to maps that are
//!   constant on the cosets of a linear code: if the parity checks span a
//!   code of minimum distance `> L`, every coset is an orthogonal array of
//!   strength `L`, so any union of cosets has the uniform moments up to
//!   degree `L`. The moment equalities are then re-verified exhaustively.
//!   The map is search-based and may differ from other published encodings
//!   meeting the same contract; [`ReencodingMap::search_based`] records that.
//! * [`build_compression`]: `G(x_1, ..., x_theta) = g(x_1) + ... + g(x_theta)`,
//!   a surjection onto `N^n|<=theta` with exact fibre sizes, fibre
//!   expectations of multilinear polynomials, and per-coordinate DNFs for
//!   `OR*(G(x)_i)`.
//! * [`booleanize`]: `Lambda~_z` from the bounded Minsky–Papert witness and
//!   weight reduction, with its support and orthogonality certified, and
//!   [`booleanize_degree_drop`] measuring the degree of `z -> E_{Lambda~_z} p`
//!   by exact interpolation.
//! * [`compose_mp_star`]: truth tables of `(f o MP*_m)|<=theta`.
//! * [`min_smooth_amplify`]: the four-step smooth amplification (zero out the
//!   heavy part of every `Lambda_z`, combine, redistribute, mix).
//! * [`amplify_circuit_once`]: the circuit for `f o H` and `f o not H` with
//!   `H = (AND_m o OR*_theta) o G`.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use num_traits::{One, Signed, Zero};

use crate::bounds::ceil_log2;
use crate::circuits::{CircuitDesc, CircuitStats, GateKind, Wire};
use crate::domain::{weight, Domain, Point};
use crate::dual_mp::{build_mp_smooth_witness, build_mp_witness, mp_star_at, MpCertificate, MpSmoothCertificate};
use crate::error::{Error, Result};
use crate::family::FamilySpec;
use crate::linalg::interpolation_degree;
use crate::lp::oracles::eval_poly;
use crate::mixture::{ProductMixture, DENSE_LIMIT};
use crate::orth::{orth, orth_at_least, Monomial, OrthResult};
use crate::rational::{binom, q, Q};
use crate::smooth::{
    redistribute, weight_reduce, zero_out_mixture, MixtureZeroOutCertificate, RedistributeCertificate,
    WeightReduceCertificate,
};
use crate::table::FnTable;

/// Largest `n` accepted by [`build_g`] (the fibres are verified exhaustively).
pub const G_MAX_N: usize = 3;

/// Budget of candidate parity-check sets tried by the search.
pub const G_SEARCH_BUDGET: usize = 1_000_000;

// ---------------------------------------------------------------------------
// Re-encoding map g
// ---------------------------------------------------------------------------

/// The map `g: {0,1}^{6L} -> {0^n, e_1, ..., e_n}`, label `0` standing for
/// `0^n` and label `i >= 1` for `e_i`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReencodingMap {
    /// Number of labels minus one.
    pub n: usize,
    /// `L = ceil(log(n+1))`, the degree up to which fibre moments agree.
    pub l: u32,
    /// Input length `6L`.
    pub bits: usize,
    /// Parity checks as bit masks; the syndrome of `x` has bit `j` equal to
    /// `<checks[j], x> mod 2`.
    pub checks: Vec<u64>,
    /// Label assigned to each syndrome value.
    pub labels: Vec<usize>,
    /// Always true: the map comes from a search, not from a fixed published
    /// construction.
    pub search_based: bool,
    /// Number of candidate check sets examined.
    pub candidates_tried: usize,
}

impl ReencodingMap {
    /// Syndrome of a point given as a bit mask.
    pub fn syndrome(&self, x: u64) -> usize {
        self.checks.iter().enumerate().fold(0, |acc, (j, h)| acc | ((((h & x).count_ones() & 1) as usize) << j))
    }

    /// Label of a point given as a bit mask (bit `i` is coordinate `i`).
    pub fn label(&self, x: u64) -> usize {
        self.labels[self.syndrome(x)]
    }

    /// Label of a point given as bits.
    pub fn label_of(&self, x: &[bool]) -> usize {
        self.label(x.iter().enumerate().fold(0u64, |acc, (i, &b)| acc | ((b as u64) << i)))
    }

    /// Size of each fibre `g^{-1}(label)`.
    pub fn fibre_sizes(&self) -> Vec<u64> {
        let mut sizes = vec![0u64; self.n + 1];
        for x in 0u64..(1 << self.bits) {
            sizes[self.label(x)] += 1;
        }
        sizes
    }

    /// Union of the supports of the parity checks: the only coordinates `g`
    /// depends on.
    pub fn relevant_bits(&self) -> Vec<usize> {
        let all = self.checks.iter().fold(0u64, |a, h| a | h);
        (0..self.bits).filter(|i| all >> i & 1 == 1).collect()
    }

    /// Exact expectation of the multilinear monomial `prod_{i in set} x_i`
    /// over each fibre.
    pub fn fibre_moments(&self, set: u64) -> Vec<Q> {
        let mut hits = vec![0u64; self.n + 1];
        let mut sizes = vec![0u64; self.n + 1];
        for x in 0u64..(1 << self.bits) {
            let lab = self.label(x);
            sizes[lab] += 1;
            if x & set == set {
                hits[lab] += 1;
            }
        }
        hits.iter().zip(&sizes).map(|(h, s)| Q::new((*h).into(), (*s).into())).collect()
    }

    /// Checks surjectivity and, for every monomial of degree at most `L`,
    /// equality of the fibre expectations. Returns the number of monomials
    /// checked.
    pub fn verify(&self) -> Result<usize> {
        let sizes = self.fibre_sizes();
        if sizes.contains(&0) {
            return Err(Error::cert("reencoding", "g is not surjective"));
        }
        // Counting form: hits[a] * size[b] == hits[b] * size[a].
        let mut checked = 0;
        let mut subsets = Vec::new();
        subsets_up_to(self.bits, self.l as usize, 0, 0, &mut subsets);
        let mut hits = vec![vec![0u64; self.n + 1]; subsets.len()];
        for x in 0u64..(1 << self.bits) {
            let lab = self.label(x);
            for (k, s) in subsets.iter().enumerate() {
                if x & s == *s {
                    hits[k][lab] += 1;
                }
            }
        }
        for (k, s) in subsets.iter().enumerate() {
            for lab in 1..=self.n {
                if hits[k][lab] as u128 * sizes[0] as u128 != hits[k][0] as u128 * sizes[lab] as u128 {
                    return Err(Error::cert(
                        "reencoding",
                        format!("moment of monomial {s:#b} differs between labels 0 and {lab}"),
                    ));
                }
            }
            checked += 1;
        }
        Ok(checked)
    }
}

fn subsets_up_to(n: usize, k: usize, start: usize, cur: u64, out: &mut Vec<u64>) {
    out.push(cur);
    if k == 0 {
        return;
    }
    for i in start..n {
        subsets_up_to(n, k - 1, i + 1, cur | (1 << i), out);
    }
}

fn min_weight_of_span(rows: &[u64]) -> u32 {
    (1u32..(1 << rows.len()))
        .map(|c| rows.iter().enumerate().filter(|(j, _)| c >> j & 1 == 1).fold(0u64, |a, (_, r)| a ^ r).count_ones())
        .min()
        .unwrap_or(u32::MAX)
}

/// Depth-first search for `k` parity checks on `bits` coordinates whose span
/// has minimum weight `> l`, in increasing mask order.
fn search_checks(bits: usize, k: usize, l: u32, budget: usize) -> (Option<Vec<u64>>, usize) {
    let mut tried = 0usize;
    fn rec(
        bits: usize,
        k: usize,
        l: u32,
        start: u64,
        rows: &mut Vec<u64>,
        tried: &mut usize,
        budget: usize,
    ) -> bool {
        if rows.len() == k {
            return true;
        }
        let mut cand = start;
        while cand < (1u64 << bits) {
            if *tried >= budget {
                return false;
            }
            if cand.count_ones() > l {
                *tried += 1;
                rows.push(cand);
                if min_weight_of_span(rows) > l && rec(bits, k, l, cand + 1, rows, tried, budget) {
                    return true;
                }
                rows.pop();
            }
            cand += 1;
        }
        false
    }
    let mut rows = Vec::new();
    let ok = rec(bits, k, l, 1, &mut rows, &mut tried, budget);
    (ok.then_some(rows), tried)
}

/// Builds and verifies `g` for `1 <= n <= 3`.
pub fn build_g(n: usize) -> Result<ReencodingMap> {
    if n == 0 {
        return Err(Error::pre("build_g", "need n >= 1"));
    }
    if n > G_MAX_N {
        return Err(Error::TooLarge(format!("exhaustive fibre verification for n = {n} (limit {G_MAX_N})")));
    }
    let l = ceil_log2(n as u64 + 1);
    let bits = 6 * l as usize;
    let k = l as usize;
    let (checks, tried) = search_checks(bits, k, l, G_SEARCH_BUDGET);
    let checks = checks.ok_or_else(|| Error::SearchExhausted(format!("no parity checks within {G_SEARCH_BUDGET} candidates")))?;
    // Syndromes 0..2^k - 1; labels 0..n, the surplus syndromes joining label n.
    let labels: Vec<usize> = (0..1usize << k).map(|s| s.min(n)).collect();
    let g = ReencodingMap { n, l, bits, checks, labels, search_based: true, candidates_tried: tried };
    g.verify()?;
    Ok(g)
}

// ---------------------------------------------------------------------------
// Compression map G
// ---------------------------------------------------------------------------

/// `G: ({0,1}^{6L})^theta -> N^n|<=theta`, the block sum of `g`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CompressionMap {
    /// The block map.
    pub g: ReencodingMap,
    /// Number of blocks.
    pub theta: usize,
}

/// A multilinear polynomial on bits: `(set of coordinates as a list, coefficient)`.
pub type BitPoly = Vec<(Vec<usize>, Q)>;

/// Result of the degree-division check for `G`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DegreeDivision {
    /// Degree of the input polynomial.
    pub deg_p: u32,
    /// Interpolation degree of `v -> E_{G^{-1}(v)} p` on `N^n|<=theta`.
    pub degree: u32,
    /// `floor(deg p / (L + 1))`.
    pub bound: u32,
    /// `degree <= bound`.
    pub pass: bool,
}

/// Builds `G` for `1 <= n <= 3` and `theta >= 1`.
pub fn build_compression(n: usize, theta: usize) -> Result<CompressionMap> {
    if theta == 0 {
        return Err(Error::pre("build_G", "need theta >= 1"));
    }
    Ok(CompressionMap { g: build_g(n)?, theta })
}

impl CompressionMap {
    /// Number of labels minus one (the output dimension).
    pub fn n(&self) -> usize {
        self.g.n
    }

    /// Input length `6 L theta`.
    pub fn input_bits(&self) -> usize {
        self.g.bits * self.theta
    }

    /// The codomain `N^n|<=theta`.
    pub fn codomain(&self) -> Domain {
        Domain::uniform_box(self.n(), self.theta as i64).at_most(self.theta as i64)
    }

    /// `G(x)`.
    pub fn apply(&self, x: &[bool]) -> Result<Point> {
        if x.len() != self.input_bits() {
            return Err(Error::DimensionMismatch { left: self.input_bits(), right: x.len() });
        }
        let mut v = vec![0i64; self.n()];
        for block in x.chunks(self.g.bits) {
            let lab = self.g.label_of(block);
            if lab > 0 {
                v[lab - 1] += 1;
            }
        }
        Ok(v)
    }

    /// `|G^{-1}(v)|` in closed form: a multinomial count of label sequences
    /// times the product of fibre sizes.
    pub fn fibre_size(&self, v: &[i64]) -> num_bigint::BigInt {
        let sizes = self.g.fibre_sizes();
        let zeros = self.theta as i64 - weight(v);
        if zeros < 0 || v.iter().any(|&c| c < 0) {
            return num_bigint::BigInt::zero();
        }
        let mut left = self.theta as u64;
        let mut count = num_bigint::BigInt::one();
        for (i, &c) in v.iter().enumerate() {
            count *= binom(left, c as u64) * num_bigint::BigInt::from(sizes[i + 1]).pow(c as u32);
            left -= c as u64;
        }
        count * num_bigint::BigInt::from(sizes[0]).pow(zeros as u32)
    }

    /// Enumerates `G` on every input (only for `6 L theta <= 20`) and returns
    /// the fibre sizes.
    pub fn enumerate_fibres(&self) -> Result<BTreeMap<Point, u64>> {
        let nb = self.input_bits();
        if nb > 20 {
            return Err(Error::TooLarge(format!("enumerating 2^{nb} inputs")));
        }
        let mut out = BTreeMap::new();
        for x in 0u64..(1 << nb) {
            let bits: Vec<bool> = (0..nb).map(|i| x >> i & 1 == 1).collect();
            *out.entry(self.apply(&bits)?).or_insert(0) += 1;
        }
        Ok(out)
    }

    /// `v -> E_{G^{-1}(v)} p` on `N^n|<=theta`, computed from per-block fibre
    /// moments: the fibre of `v` is a disjoint union of equal-size products
    /// `g^{-1}(y_1) x ... x g^{-1}(y_theta)` over label sequences summing to
    /// `v`, and each monomial factorizes over blocks.
    pub fn fibre_expectation(&self, p: &BitPoly) -> Result<FnTable> {
        let bits = self.g.bits;
        let nb = self.input_bits();
        let mut per_block: BTreeMap<u64, Vec<Q>> = BTreeMap::new();
        let mut split: Vec<(Vec<u64>, Q)> = Vec::with_capacity(p.len());
        for (set, c) in p {
            let mut masks = vec![0u64; self.theta];
            for &i in set {
                if i >= nb {
                    return Err(Error::Invalid(format!("variable {i} out of range for {nb} inputs")));
                }
                masks[i / bits] |= 1 << (i % bits);
            }
            for m in &masks {
                per_block.entry(*m).or_insert_with(|| self.g.fibre_moments(*m));
            }
            split.push((masks, c.clone()));
        }
        let dom = self.codomain();
        let labels = self.n() + 1;
        let mut sums: BTreeMap<Point, (Q, u64)> = BTreeMap::new();
        let mut seq = vec![0usize; self.theta];
        loop {
            let mut v = vec![0i64; self.n()];
            for &y in &seq {
                if y > 0 {
                    v[y - 1] += 1;
                }
            }
            let val: Q = split
                .iter()
                .map(|(masks, c)| {
                    masks.iter().zip(&seq).fold(c.clone(), |acc, (m, &y)| acc * &per_block[m][y])
                })
                .sum();
            let e = sums.entry(v).or_insert((Q::zero(), 0));
            e.0 += val;
            e.1 += 1;
            // Advance the label sequence odometer.
            let mut i = 0;
            loop {
                if i == self.theta {
                    let entries = sums.into_iter().map(|(v, (s, c))| (v, s / Q::from_integer(c.into())));
                    return FnTable::from_entries(dom, entries);
                }
                seq[i] += 1;
                if seq[i] < labels {
                    break;
                }
                seq[i] = 0;
                i += 1;
            }
        }
    }

    /// The degree-division property for one polynomial: the fibre
    /// expectation has degree at most `floor(deg p / (L + 1))`.
    pub fn degree_division(&self, p: &BitPoly) -> Result<DegreeDivision> {
        let deg_p = p.iter().filter(|(_, c)| !c.is_zero()).map(|(s, _)| s.len() as u32).max().unwrap_or(0);
        let e = self.fibre_expectation(p)?;
        let pts = self.codomain().points();
        let vals: Vec<Q> = pts.iter().map(|v| e.get(v)).collect();
        let degree = interpolation_degree(&pts, &vals);
        let bound = deg_p / (self.g.l + 1);
        Ok(DegreeDivision { deg_p, degree, bound, pass: degree <= bound })
    }

    /// DNF for `x -> OR*(G(x)_i)` (coordinate `i` is zero-based): one term
    /// per block and per assignment of the relevant bits whose syndrome
    /// carries label `i + 1`.
    pub fn coordinate_dnf(&self, i: usize) -> Result<CircuitDesc> {
        if i >= self.n() {
            return Err(Error::Invalid(format!("coordinate {i} out of range")));
        }
        let rel = self.g.relevant_bits();
        let nb = self.input_bits();
        let mut terms = Vec::new();
        for block in 0..self.theta {
            for a in 0u64..(1 << rel.len()) {
                let x = rel.iter().enumerate().fold(0u64, |acc, (k, &b)| acc | ((a >> k & 1) << b));
                if self.g.label(x) == i + 1 {
                    let lits = rel
                        .iter()
                        .enumerate()
                        .map(|(k, &b)| Wire::Lit { var: block * self.g.bits + b, positive: a >> k & 1 == 1 })
                        .collect();
                    terms.push(CircuitDesc::single_gate(nb, GateKind::And, lits)?);
                }
            }
        }
        if terms.is_empty() {
            return Ok(CircuitDesc::constant(nb, false));
        }
        CircuitDesc::combine(GateKind::Or, &terms)
    }
}

// ---------------------------------------------------------------------------
// Composition with MP*
// ---------------------------------------------------------------------------

/// `(f o MP*_m)(x)` for `x in N^{nm}` (block `i` is `x_{im}, ..., x_{im+m-1}`).
pub fn compose_mp_star_at(f: &FnTable, m: usize, x: &[i64]) -> Result<bool> {
    let n = f.domain().require_hypercube()?;
    if x.len() != n * m {
        return Err(Error::DimensionMismatch { left: n * m, right: x.len() });
    }
    let z: Vec<i64> = x.chunks(m).map(|b| mp_star_at(b) as i64).collect();
    Ok(!f.get(&z).is_zero())
}

/// The truth table of `(f o MP*_{m,r})|<=theta` on `{0..r}^{nm}|<=theta`.
pub fn compose_mp_star_r(f: &FnTable, m: usize, r: usize, theta: usize) -> Result<FnTable> {
    let n = f.domain().require_hypercube()?;
    if m == 0 || r == 0 {
        return Err(Error::pre("compose_mp_star", "need m, r >= 1"));
    }
    let base = Domain::uniform_box(n * m, r as i64);
    if base.size() > DENSE_LIMIT {
        return Err(Error::TooLarge(format!("{{0..{r}}}^{} exceeds {DENSE_LIMIT} points", n * m)));
    }
    let dom = base.at_most(theta as i64);
    let pts = dom.points();
    let mut vals = Vec::with_capacity(pts.len());
    for p in &pts {
        vals.push(compose_mp_star_at(f, m, p)?);
    }
    let mut it = vals.into_iter();
    Ok(FnTable::boolean(dom, |_| it.next().expect("one value per point")))
}

/// `(f o MP*_{m,m^2})|<=theta`.
pub fn compose_mp_star(f: &FnTable, m: usize, theta: usize) -> Result<FnTable> {
    compose_mp_star_r(f, m, m * m, theta)
}

// ---------------------------------------------------------------------------
// Booleanize
// ---------------------------------------------------------------------------

/// `Lambda~_z` for one `z`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Booleanized {
    /// The Boolean input `z`.
    pub z: Point,
    /// `Lambda_z = Lambda_{z_1} x ... x Lambda_{z_n}` (dense).
    pub lambda: FnTable,
    /// `Lambda~_z` after weight reduction.
    pub lambda_tilde: FnTable,
    /// Certificate.
    pub cert: BooleanizeCertificate,
}

/// Verified properties of a Booleanized distribution.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BooleanizeCertificate {
    /// Blocks per coordinate.
    pub m: usize,
    /// Block range.
    pub r: u64,
    /// Degree budget of the weight reduction.
    pub d: u32,
    /// Threshold.
    pub theta: u64,
    /// `min{m, d_gadget}`: the degree divisor.
    pub orth_bound: u32,
    /// Certificate of the underlying Minsky–Papert witness.
    pub witness: MpCertificate,
    /// Certificate of the weight reduction.
    pub weight: WeightReduceCertificate,
    /// `supp Lambda~_z` lies in `prod (MP*)^{-1}(z_i)` at weight `< 2 theta + nm`.
    pub support_ok: bool,
    /// `Lambda~_z` is a probability distribution.
    pub distribution: bool,
}

/// Smallest `theta` satisfying the weight-reduction preconditions for
/// `coords` coordinates at constant `c` and degree `d`.
pub fn booleanize_min_theta(coords: usize, c: &Q, d: u32) -> u64 {
    let nq = q(coords as i64);
    let need = q(4) * crate::bounds::e().hi * &nq * (Q::one() + crate::bounds::ln(&nq).hi) / (c * c);
    let t = crate::rational::ceil_q(&need);
    let t = crate::rational::to_u64(&t).unwrap_or(u64::MAX);
    t.max(2 * u64::from(d))
}

/// `Lambda~_z` for every `z in {0,1}^n`, sharing one witness for `MP*_{m,r}`.
pub fn booleanize_all(n: usize, m: usize, r: u64, d: u32, theta: u64) -> Result<Vec<Booleanized>> {
    let (wit, wcert) = build_mp_witness(m, r)?;
    let family = FamilySpec::B {
        r,
        c: wcert.gadget.c1.clone().min(Q::one()),
        alpha_sq: wcert.gadget.alpha_sq.clone(),
        delta: 1,
    };
    let mut out = Vec::new();
    for z in Domain::Hypercube(n).points() {
        out.push(booleanize_with(&z, &wit.lambda0, &wit.lambda1, &wcert, &family, d, theta)?);
    }
    Ok(out)
}

/// `Lambda~_z` for one `z in {0,1}^n`.
pub fn booleanize(z: &[i64], m: usize, r: u64, d: u32, theta: u64) -> Result<Booleanized> {
    let (wit, wcert) = build_mp_witness(m, r)?;
    let family = FamilySpec::B {
        r,
        c: wcert.gadget.c1.clone().min(Q::one()),
        alpha_sq: wcert.gadget.alpha_sq.clone(),
        delta: 1,
    };
    booleanize_with(z, &wit.lambda0, &wit.lambda1, &wcert, &family, d, theta)
}

fn booleanize_with(
    z: &[i64],
    l0: &ProductMixture,
    l1: &ProductMixture,
    wcert: &MpCertificate,
    family: &FamilySpec,
    d: u32,
    theta: u64,
) -> Result<Booleanized> {
    if z.is_empty() || z.iter().any(|&b| b != 0 && b != 1) {
        return Err(Error::pre("booleanize", "z must be a non-empty 0/1 vector"));
    }
    let parts: Vec<ProductMixture> = z.iter().map(|&b| if b == 1 { l1.clone() } else { l0.clone() }).collect();
    let lam = ProductMixture::tensor_all(&parts);
    let (wr, wcert_reduce) = weight_reduce(&lam, family, d, theta)?;
    let m = wcert.m;
    let nm = (z.len() * m) as i64;
    let limit = 2 * theta as i64 + nm;
    let support_ok = wr.lambda_tilde.iter().all(|(x, _)| {
        weight(x) < limit && x.chunks(m).zip(z).all(|(blk, &zi)| mp_star_at(blk) == (zi == 1))
    });
    let distribution = wr.lambda_tilde.is_distribution();
    if !support_ok || !distribution {
        return Err(Error::cert("booleanize", "Lambda~_z is not a distribution on the required support"));
    }
    let cert = BooleanizeCertificate {
        m,
        r: wcert.r,
        d,
        theta,
        orth_bound: wcert.orth_bound,
        witness: wcert.clone(),
        weight: wcert_reduce,
        support_ok,
        distribution,
    };
    Ok(Booleanized { z: z.to_vec(), lambda: wr.lambda, lambda_tilde: wr.lambda_tilde, cert })
}

/// Result of the Booleanization degree-drop check.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DegreeDrop {
    /// `deg p`.
    pub deg_p: u32,
    /// `z -> E_{Lambda~_z} p` for every `z` (lexicographic).
    pub values: Vec<Q>,
    /// Interpolation degree on `{0,1}^n`.
    pub degree: u32,
    /// `floor(deg p / min{m, d_gadget})`.
    pub bound: u32,
    /// `degree <= bound`.
    pub pass: bool,
}

/// Exact interpolation of `z -> E_{Lambda~_z} p` over all Booleanized `z`.
pub fn booleanize_degree_drop(all: &[Booleanized], p: &[(Monomial, Q)]) -> Result<DegreeDrop> {
    let first = all.first().ok_or_else(|| Error::pre("degree_drop", "no Booleanized distributions"))?;
    let divisor = first.cert.orth_bound.max(1);
    let deg_p = p.iter().filter(|(_, c)| !c.is_zero()).map(|(m, _)| m.degree()).max().unwrap_or(0);
    if deg_p > first.cert.d {
        return Err(Error::pre("degree_drop", format!("deg p = {deg_p} exceeds the certified d = {}", first.cert.d)));
    }
    let pts: Vec<Point> = all.iter().map(|b| b.z.clone()).collect();
    let values: Vec<Q> = all
        .iter()
        .map(|b| b.lambda_tilde.iter().map(|(x, w)| w * eval_poly(p, x)).sum())
        .collect();
    let degree = interpolation_degree(&pts, &values);
    let bound = deg_p / divisor;
    Ok(DegreeDrop { deg_p, values, degree, bound, pass: degree <= bound })
}

// ---------------------------------------------------------------------------
// Smooth amplification
// ---------------------------------------------------------------------------

/// Parameters of [`min_smooth_amplify`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AmplifyParams {
    /// Blocks per coordinate.
    pub m: usize,
    /// Gadget scale.
    pub r: u64,
    /// Box side `R`.
    pub big_r: u64,
    /// Weight threshold.
    pub theta: u64,
    /// Smoothness of `mu` (`mu >= gamma 2^{-n}`).
    pub gamma: Q,
    /// Target orthogonality.
    pub d: u32,
}

/// Verified properties of the amplified distribution.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AmplifyCertificate {
    /// Parameters.
    pub params: AmplifyParams,
    /// Number of input variables of `f`.
    pub n: usize,
    /// `orth((-1)^f mu)` (exact, capped at `n + 1`).
    pub d_f: u32,
    /// Certificate of the locally smooth Minsky–Papert witness.
    pub witness: MpSmoothCertificate,
    /// Zero-out certificates, one per `z`.
    pub zero_out: Vec<MixtureZeroOutCertificate>,
    /// `|Lambda_z - Lambda~_z| <= Lambda_z / 2` on weight `<= theta` for all `z`.
    pub half_condition: bool,
    /// Redistribution certificate.
    pub redistribute: RedistributeCertificate,
    /// `||Phi_final||_1`.
    pub l1_final: Q,
    /// `(-1)^{F} Phi_final >= 0` on `X|<=theta`.
    pub sign_ok: bool,
    /// `orth((-1)^F Lambda)`, capped at `d + 1`.
    pub orth: OrthResult,
    /// `orth >= d`.
    pub orth_ok: bool,
    /// `min_x Lambda(x) / Lambda*(x)` over `X|<=theta`.
    pub min_smooth_factor: Q,
    /// `Lambda >= min_smooth_factor Lambda*` with a positive factor (vacuous
    /// for `gamma = 0`).
    pub min_smooth_ok: bool,
}

/// `Lambda` together with its certificate.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Amplified {
    /// The distribution `Lambda` on `{0..R}^{nm}|<=theta`.
    pub lambda: FnTable,
    /// `(f o MP*_{m,R})|<=theta` as a Boolean table on the same domain.
    pub composed: FnTable,
    /// `Lambda* `: uniform on `X|<=theta`.
    pub lambda_star: FnTable,
    /// Certificate.
    pub cert: AmplifyCertificate,
}

fn signed(f: &FnTable, x: &[i64]) -> Q {
    if f.get(x).is_zero() {
        Q::one()
    } else {
        -Q::one()
    }
}

/// Smooth amplification of a `gamma`-smooth dual witness `mu` for `f`.
///
/// 1. `Lambda_z = (x)_i Lambda_{z_i}` from the locally smooth witness for
///    `MP*_{m,R}` (as convex combinations of products), with the mass above
///    `theta` zeroed out: `Lambda~_z`.
/// 2. `Phi = 2^{-n} sum_z (-1)^{f(z)} Lambda~_z`.
/// 3. `Phi* = redistribute(Phi, Lambda*)` with `Lambda*` uniform on `X|<=theta`.
/// 4. `Phi_final = sum_z mu(z) (-1)^{f(z)} Lambda~_z - gamma Phi + gamma Phi*`
///    and `Lambda = |Phi_final| / ||Phi_final||_1`.
///
/// The certificate records the orthogonality of `(-1)^{f o MP*} Lambda` and
/// the computed min-smoothness factor relative to `Lambda*`.
pub fn min_smooth_amplify(f: &FnTable, mu: &FnTable, params: &AmplifyParams) -> Result<Amplified> {
    let n = f.domain().require_hypercube()?;
    if mu.domain() != f.domain() || !mu.is_distribution() {
        return Err(Error::pre("amplify", "mu must be a distribution on the domain of f"));
    }
    if params.gamma.is_negative() || params.gamma > Q::one() {
        return Err(Error::pre("amplify", "gamma must lie in [0, 1]"));
    }
    let floor = &params.gamma / Q::from_integer(num_bigint::BigInt::one() << n);
    if Domain::Hypercube(n).points().iter().any(|z| mu.get(z) < floor) {
        return Err(Error::pre("amplify", "mu is below gamma 2^{-n} somewhere"));
    }
    let signed_mu = FnTable::from_fn(f.domain().clone(), |z| signed(f, z) * mu.get(z));
    let d_f = orth(&signed_mu, n as u32 + 1).lower_bound();
    let m = params.m;
    let nm = n * m;
    let (wit, wcert) = build_mp_smooth_witness(m, params.r, params.big_r)
        .map_err(|e| Error::pre("amplify/witness", format!("{e}")))?;
    let big_r = params.big_r as i64;
    let xdom = Domain::uniform_box(nm, big_r);
    if xdom.size() > DENSE_LIMIT {
        return Err(Error::TooLarge(format!("{{0..{big_r}}}^{nm} exceeds {DENSE_LIMIT} points")));
    }
    let theta = params.theta;
    let th = theta as i64;

    // Step 1: zero out every Lambda_z above theta.
    let zs = Domain::Hypercube(n).points();
    let mut tildes = Vec::with_capacity(zs.len());
    let mut zcerts = Vec::with_capacity(zs.len());
    let mut half_condition = true;
    for z in &zs {
        let parts: Vec<ProductMixture> =
            z.iter().map(|&b| if b == 1 { wit.mixture1.clone() } else { wit.mixture0.clone() }).collect();
        let lam = ProductMixture::tensor_all(&parts);
        let (_, tilde, cert) =
            zero_out_mixture(&lam, params.d, theta).map_err(|e| Error::pre("amplify/zero_out", format!("{e}")))?;
        if &cert.distance_factor * q(2) > Q::one() {
            half_condition = false;
        }
        tildes.push(tilde.with_domain(xdom.clone())?);
        zcerts.push(cert);
    }

    // Step 2: Phi.
    let scale_n = Q::from_integer(num_bigint::BigInt::one() << n).recip();
    let mut phi = FnTable::zero(xdom.clone());
    for (z, t) in zs.iter().zip(&tildes) {
        phi = phi.axpy(&(signed(f, z) * &scale_n), t)?;
    }
    let phi = phi.with_domain(xdom.clone())?;

    // Step 3: redistribute against the uniform distribution on X|<=theta.
    let region = xdom.clone().at_most(th);
    let count = Q::from_integer(region.size().into());
    let lambda_star = FnTable::from_fn(xdom.clone(), |x| if weight(x) <= th { count.recip() } else { Q::zero() });
    let (phi_star, rcert) =
        redistribute(&phi, &lambda_star, params.d, theta).map_err(|e| Error::pre("amplify/redistribute", format!("{e}")))?;

    // Step 4: Phi_final.
    let mut fin = FnTable::zero(xdom.clone());
    for (z, t) in zs.iter().zip(&tildes) {
        fin = fin.axpy(&(signed(f, z) * mu.get(z)), t)?;
    }
    let fin = fin.axpy(&-params.gamma.clone(), &phi)?.axpy(&params.gamma, &phi_star)?.with_domain(xdom.clone())?;
    let l1_final = fin.l1();
    if l1_final.is_zero() {
        return Err(Error::cert("amplify", "Phi_final vanishes"));
    }
    let composed = compose_mp_star_r(f, m, params.big_r as usize, theta as usize)?;
    let sign_ok = fin.iter().all(|(x, v)| weight(x) <= th && !(signed(&composed, x) * v).is_negative());
    let lambda = fin.abs().scale(&l1_final.recip()).with_domain(region.clone())?;
    let lambda_star = lambda_star.with_domain(region.clone())?;
    let signed_lambda = FnTable::from_fn(region.clone(), |x| signed(&composed, x) * lambda.get(x));
    let orth_res = orth(&signed_lambda, params.d + 1);
    let orth_ok = orth_res.at_least(params.d);
    let min_smooth_factor = region
        .points()
        .iter()
        .map(|x| lambda.get(x) / lambda_star.get(x))
        .min()
        .unwrap_or_else(Q::zero);
    let min_smooth_ok = params.gamma.is_zero() || min_smooth_factor.is_positive();
    let cert = AmplifyCertificate {
        params: params.clone(),
        n,
        d_f,
        witness: wcert,
        zero_out: zcerts,
        half_condition,
        redistribute: rcert,
        l1_final,
        sign_ok,
        orth: orth_res,
        orth_ok,
        min_smooth_factor,
        min_smooth_ok,
    };
    let out = Amplified { lambda, composed, lambda_star, cert };
    out.verify()?;
    Ok(out)
}

impl Amplified {
    /// Re-checks the distribution, orthogonality and min-smoothness claims
    /// against the tables.
    pub fn verify(&self) -> Result<()> {
        let c = &self.cert;
        if !self.lambda.is_distribution() {
            return Err(Error::cert("amplify", "Lambda is not a distribution"));
        }
        if !c.sign_ok {
            return Err(Error::cert("amplify", "Phi_final disagrees in sign with (-1)^{f o MP*}"));
        }
        let signed_lambda = FnTable::from_fn(self.lambda.domain().clone(), |x| signed(&self.composed, x) * self.lambda.get(x));
        if !orth_at_least(&signed_lambda, c.params.d) || !c.orth_ok {
            return Err(Error::cert("amplify", format!("orth((-1)^F Lambda) < {}", c.params.d)));
        }
        for x in self.lambda.domain().points() {
            if self.lambda.get(&x) < &c.min_smooth_factor * self.lambda_star.get(&x) {
                return Err(Error::cert("amplify", format!("min-smoothness fails at {x:?}")));
            }
        }
        if !c.min_smooth_ok {
            return Err(Error::cert("amplify", "no positive min-smoothness factor"));
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// Circuit amplification
// ---------------------------------------------------------------------------

/// The circuits for `f o H` and `f o not H`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AmplifiedCircuit {
    /// `f o H` (normalized).
    pub composed: CircuitDesc,
    /// `f o not H` (normalized).
    pub negated: CircuitDesc,
    /// `H_i = AND_m(OR*(G(x)_{im}), ..., OR*(G(x)_{im+m-1}))`, one per input of `f`.
    pub h: Vec<CircuitDesc>,
    /// The compression map.
    pub compression: CompressionMap,
    /// Blocks per coordinate.
    pub m: usize,
    /// Statistics of `f`, `H` (largest `H_i`) and `f o H`.
    pub stats: [CircuitStats; 3],
}

/// Composes a circuit for `f` on `n` inputs with
/// `H = (AND_m o OR*_theta)^n o G`, where `G` compresses `N^{nm}|<=theta`.
pub fn amplify_circuit_once(f: &CircuitDesc, m: usize, theta: usize) -> Result<AmplifiedCircuit> {
    let n = f.inputs;
    if n == 0 || m == 0 {
        return Err(Error::pre("amplify_circuit", "need n, m >= 1"));
    }
    let compression = build_compression(n * m, theta)?;
    let dnfs: Vec<CircuitDesc> = (0..n * m).map(|i| compression.coordinate_dnf(i)).collect::<Result<_>>()?;
    let h: Vec<CircuitDesc> = (0..n)
        .map(|i| Ok(CircuitDesc::combine(GateKind::And, &dnfs[i * m..(i + 1) * m])?.normalize()))
        .collect::<Result<_>>()?;
    let composed = f.substitute(&h)?;
    let neg_h: Vec<CircuitDesc> = h.iter().map(CircuitDesc::negate).collect();
    let negated = f.substitute(&neg_h)?;
    let h_stats = h
        .iter()
        .map(CircuitDesc::stats)
        .max_by_key(|s| (s.size, s.depth))
        .expect("n >= 1");
    let stats = [f.stats(), h_stats, composed.stats()];
    Ok(AmplifiedCircuit { composed, negated, h, compression, m, stats })
}

impl AmplifiedCircuit {
    /// Checks `(f o H)(x) = (f o MP*_m)(G(x))` and
    /// `(f o not H)(x) = f(not MP*_m(G(x)))` at the given inputs.
    pub fn agrees_with_composition(&self, f: &FnTable, xs: &[Vec<bool>]) -> Result<bool> {
        for x in xs {
            let v = self.compression.apply(x)?;
            let want = compose_mp_star_at(f, self.m, &v)?;
            if self.composed.evaluate(x)? != want {
                return Ok(false);
            }
            let z: Vec<i64> = v.chunks(self.m).map(|b| !mp_star_at(b) as i64).collect();
            if self.negated.evaluate(x)? != !f.get(&z).is_zero() {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuits::{and_n, dictator};
    use crate::rational::qr;

    #[test]
    fn g_small_cases() {
        let g1 = build_g(1).unwrap();
        assert_eq!((g1.l, g1.bits), (1, 6));
        assert_eq!(g1.checks, vec![0b11]);
        assert_eq!(g1.fibre_sizes(), vec![32, 32]);
        let g2 = build_g(2).unwrap();
        assert_eq!(g2.bits, 12);
        assert!(g2.verify().unwrap() >= 79);
        let g3 = build_g(3).unwrap();
        assert!(g3.fibre_sizes().iter().all(|&s| s > 0));
        assert!(build_g(4).is_err());
    }

    #[test]
    fn compression_fibres_and_degree() {
        let big = build_compression(1, 2).unwrap();
        let fib = big.enumerate_fibres().unwrap();
        assert_eq!(fib.len(), 3);
        for (v, c) in &fib {
            assert_eq!(num_bigint::BigInt::from(*c), big.fibre_size(v));
        }
        assert_eq!(fib[&vec![1]], 2048);
        // Degree 1 -> constant; degree 2 (= L + 1) -> at most 1.
        let p1: BitPoly = vec![(vec![0], q(1)), (vec![7], q(3))];
        let dd = big.degree_division(&p1).unwrap();
        assert!(dd.pass && dd.degree == 0);
        let p2: BitPoly = vec![(vec![0, 1], q(1)), (vec![6, 7], q(-2)), (vec![3], q(1))];
        let dd = big.degree_division(&p2).unwrap();
        assert!(dd.pass && dd.degree == 1);
    }

    #[test]
    fn coordinate_dnf_matches_g() {
        let big = build_compression(2, 1).unwrap();
        for i in 0..2 {
            let dnf = big.coordinate_dnf(i).unwrap();
            assert!(dnf.stats().bottom_fan_in <= big.g.bits);
            for x in 0u64..(1 << 12) {
                let bits: Vec<bool> = (0..12).map(|k| x >> k & 1 == 1).collect();
                let v = big.apply(&bits).unwrap();
                assert_eq!(dnf.evaluate(&bits).unwrap(), v[i] >= 1);
            }
        }
    }

    #[test]
    fn composition_tables() {
        let id = FnTable::boolean(Domain::Hypercube(1), |x| x[0] == 1);
        let t = compose_mp_star(&id, 1, 1).unwrap();
        assert_eq!(t.domain().points(), vec![vec![0], vec![1]]);
        assert_eq!(t.get(&[1]), q(1));
        let and2 = FnTable::boolean(Domain::Hypercube(2), |x| x[0] == 1 && x[1] == 1);
        let t = compose_mp_star_r(&and2, 1, 2, 2).unwrap();
        for p in t.domain().points() {
            assert_eq!(!t.get(&p).is_zero(), p[0] >= 1 && p[1] >= 1);
        }
    }

    #[test]
    fn booleanize_single_bit() {
        let c1 = build_mp_witness(1, 2).unwrap().1.gadget.c1;
        let theta = booleanize_min_theta(1, &c1.min(Q::one()), 1);
        let b = booleanize(&[1], 1, 2, 1, theta).unwrap();
        assert!(b.lambda_tilde.iter().all(|(x, _)| x[0] >= 1));
        assert!(b.cert.support_ok);
    }

    #[test]
    fn circuit_amplification_agrees() {
        let f = dictator(1).unwrap();
        let amp = amplify_circuit_once(&f, 1, 2).unwrap();
        assert_eq!(amp.composed.inputs, 12);
        let id = FnTable::boolean(Domain::Hypercube(1), |x| x[0] == 1);
        let xs: Vec<Vec<bool>> = (0u64..(1 << 12)).map(|x| (0..12).map(|k| x >> k & 1 == 1).collect()).collect();
        assert!(amp.agrees_with_composition(&id, &xs).unwrap());
        let and2 = and_n(2).unwrap();
        let amp = amplify_circuit_once(&and2, 1, 1).unwrap();
        let s = amp.composed.stats();
        assert!(s.depth <= 3, "depth {}", s.depth);
    }

    #[test]
    fn smooth_amplification_toy() {
        let f = FnTable::boolean(Domain::Hypercube(1), |x| x[0] == 1);
        let mu = FnTable::from_fn(Domain::Hypercube(1), |_| qr(1, 2));
        let params = AmplifyParams { m: 1, r: 1, big_r: 6, theta: 5, gamma: q(1), d: 1 };
        let out = min_smooth_amplify(&f, &mu, &params).unwrap();
        assert!(out.cert.orth_ok && out.cert.min_smooth_ok);
        assert!(out.cert.min_smooth_factor.is_positive());
    }
}
