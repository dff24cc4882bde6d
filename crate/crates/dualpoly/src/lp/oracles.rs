//! Degree oracles built on the exact LP solver.
//!
//! Every answer is certified from both sides: a primal polynomial that
//! achieves the representation at the reported degree, and a dual object
//! proving that one degree less is impossible. All certificates are re-checked
//! directly (sign conditions and orthogonality), independently of the solver.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use num_traits::{One, Signed, Zero};

use super::{solve_verified, LpCertificate, LpProblem, Relation};
use crate::domain::{Domain, Point};
use crate::error::{Error, Result};
use crate::orth::{monomials_up_to, orth_at_least, Monomial};
use crate::rational::{q, Q};
use crate::table::FnTable;

/// Largest domain the degree oracles accept (matches `{0,1}^12`).
pub const MAX_ORACLE_POINTS: usize = 4096;

/// Certified answer of a degree oracle.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DegreeAnswer {
    /// The degree.
    pub value: u32,
    /// Polynomial as `(monomial, coefficient)` pairs. For threshold and
    /// `(I0, I1, I*)` degrees it achieves the representation at degree
    /// `value`; for the smooth threshold degree it is the Farkas polynomial of
    /// degree `value` proving that no admissible distribution reaches
    /// `value + 1`.
    pub primal: Vec<(Monomial, Q)>,
    /// Dual object: for threshold degrees a distribution `psi` with
    /// `orth((-1)^f psi) >= value` (absent when `value = 0`); for the smooth
    /// threshold degree the distribution `mu` itself; for `(I0, I1, I*)`
    /// degrees the Farkas weights proving degree `value - 1` impossible.
    pub dual: Option<FnTable>,
}

/// Evaluates `sum c_m x^m`.
pub fn eval_poly(p: &[(Monomial, Q)], x: &[i64]) -> Q {
    p.iter().fold(Q::zero(), |acc, (m, c)| acc + c * Q::from_integer(m.eval(x)))
}

fn sign(f: &FnTable, x: &[i64]) -> Q {
    if f.get(x).is_zero() {
        Q::one()
    } else {
        -Q::one()
    }
}

fn caps_of(domain: &Domain) -> Vec<u32> {
    let (lo, hi) = domain.bounds();
    lo.iter().zip(&hi).map(|(l, h)| (h - l).max(0) as u32).collect()
}

fn oracle_points(f: &FnTable) -> Result<Vec<Point>> {
    let pts = f.domain().points();
    if pts.len() > MAX_ORACLE_POINTS {
        return Err(Error::TooLarge(format!("{} points (limit {MAX_ORACLE_POINTS})", pts.len())));
    }
    Ok(pts)
}

/// LP in variables `nu_x >= 0`: `<(-1)^f (floor + nu), m> = 0` for every
/// monomial `m` in `mons` and `sum nu = total`.
fn orthogonality_lp(f: &FnTable, pts: &[Point], mons: &[Monomial], floor: &Q, total: &Q) -> LpProblem {
    let mut lp = LpProblem::new(pts.len());
    let signs: Vec<Q> = pts.iter().map(|x| sign(f, x)).collect();
    for m in mons {
        let mut coeffs = Vec::new();
        let mut rhs = Q::zero();
        for (j, x) in pts.iter().enumerate() {
            let v = m.eval(x);
            if !v.is_zero() {
                let c = &signs[j] * Q::from_integer(v);
                rhs -= floor * &c;
                coeffs.push((j, c));
            }
        }
        lp.add(coeffs, Relation::Eq, rhs);
    }
    lp.add((0..pts.len()).map(|j| (j, Q::one())).collect(), Relation::Eq, total.clone());
    lp
}

/// Reads the Farkas polynomial `sum_m u_m x^m` off an orthogonality LP.
fn farkas_poly(mons: &[Monomial], u: &[Q]) -> Vec<(Monomial, Q)> {
    mons.iter().zip(u).filter(|(_, c)| !c.is_zero()).map(|(m, c)| (m.clone(), c.clone())).collect()
}

/// Threshold degree of a Boolean table over its whole (finite) domain.
///
/// Scans `d = 0, 1, ...`: the LP asking for a distribution `psi` with
/// `orth((-1)^f psi) > d` is feasible exactly when no degree-`d` sign
/// representation exists; its Farkas multipliers give a polynomial `p` with
/// `(-1)^{f(x)} p(x) >= 1` everywhere.
pub fn threshold_degree(f: &FnTable) -> Result<DegreeAnswer> {
    let pts = oracle_points(f)?;
    let caps = caps_of(f.domain());
    let max_deg: u32 = caps.iter().sum();
    let mut last: Option<FnTable> = None;
    for d in 0..=max_deg {
        let mons = monomials_up_to(&caps, d);
        let lp = orthogonality_lp(f, &pts, &mons, &Q::zero(), &Q::one());
        match solve_verified(&lp)? {
            LpCertificate::Feasible { x, .. } => {
                last = Some(FnTable::from_values(f.domain().clone(), &x)?);
            }
            LpCertificate::Infeasible { farkas } => {
                let primal: Vec<(Monomial, Q)> =
                    farkas_poly(&mons, &farkas).into_iter().map(|(m, c)| (m, -c)).collect();
                for x in &pts {
                    if sign(f, x) * eval_poly(&primal, x) < Q::one() {
                        return Err(Error::cert("threshold_degree", "primal polynomial misses the margin"));
                    }
                }
                if let Some(psi) = &last {
                    let signed = FnTable::from_fn(f.domain().clone(), |x| sign(f, x) * psi.get(x));
                    if !psi.is_distribution() || !orth_at_least(&signed, d) {
                        return Err(Error::cert("threshold_degree", "dual witness fails re-check"));
                    }
                }
                return Ok(DegreeAnswer { value: d, primal, dual: last });
            }
            LpCertificate::Unbounded { .. } => return Err(Error::Unbounded),
        }
    }
    Err(Error::cert("threshold_degree", "no representation up to the full degree"))
}

/// Whether a distribution `mu >= gamma/|X|` with `orth((-1)^f mu) >= d` exists.
fn smooth_feasible(
    f: &FnTable,
    pts: &[Point],
    caps: &[u32],
    gamma: &Q,
    d: u32,
) -> Result<(LpCertificate, Vec<Monomial>)> {
    let floor = gamma / Q::from_integer(pts.len().into());
    let mons = if d == 0 { Vec::new() } else { monomials_up_to(caps, d - 1) };
    let lp = orthogonality_lp(f, pts, &mons, &floor, &(Q::one() - gamma));
    Ok((solve_verified(&lp)?, mons))
}

/// `gamma`-smooth threshold degree: the largest `d` for which some
/// distribution `mu >= gamma/|X|` has `orth((-1)^f mu) >= d`, by binary search.
pub fn smooth_threshold_degree(f: &FnTable, gamma: &Q) -> Result<DegreeAnswer> {
    if gamma.is_negative() || *gamma > Q::one() {
        return Err(Error::pre("smooth_threshold_degree", format!("gamma = {gamma} outside [0, 1]")));
    }
    let pts = oracle_points(f)?;
    let caps = caps_of(f.domain());
    // d = 0 is always feasible; orth of a non-zero function is at most sum(caps).
    let (mut lo, mut hi) = (0u32, caps.iter().sum::<u32>() + 1);
    let mut best = smooth_feasible(f, &pts, &caps, gamma, 0)?.0;
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        let (cert, _) = smooth_feasible(f, &pts, &caps, gamma, mid)?;
        match cert {
            LpCertificate::Feasible { .. } => {
                lo = mid;
                best = cert;
            }
            LpCertificate::Infeasible { .. } => hi = mid,
            LpCertificate::Unbounded { .. } => return Err(Error::Unbounded),
        }
    }
    // Ensure the refutation is for exactly lo + 1.
    let (cert, mons) = smooth_feasible(f, &pts, &caps, gamma, lo + 1)?;
    let primal = match cert {
        LpCertificate::Infeasible { farkas } => farkas_poly(&mons, &farkas),
        _ => return Err(Error::cert("smooth_threshold_degree", "binary search is not monotone")),
    };
    let floor = gamma / Q::from_integer(pts.len().into());
    let LpCertificate::Feasible { x, .. } = best else {
        return Err(Error::cert("smooth_threshold_degree", "no feasible level"));
    };
    let mu = FnTable::from_fn(f.domain().clone(), |p| {
        let j = pts.binary_search_by(|y| y.as_slice().cmp(p)).expect("point of the domain");
        &floor + &x[j]
    });
    let signed = FnTable::from_fn(f.domain().clone(), |p| sign(f, p) * mu.get(p));
    if !mu.is_distribution() || !orth_at_least(&signed, lo) {
        return Err(Error::cert("smooth_threshold_degree", "distribution fails re-check"));
    }
    if pts.iter().any(|p| mu.get(p) < floor) {
        return Err(Error::cert("smooth_threshold_degree", "distribution below the smoothness floor"));
    }
    Ok(DegreeAnswer { value: lo, primal, dual: Some(mu) })
}

/// One end of an interval.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Bound {
    /// No restriction.
    Unbounded,
    /// Endpoint included.
    Closed(Q),
    /// Endpoint excluded; realized by shifting inward by the margin.
    Open(Q),
}

/// A convex subset of the reals.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Interval {
    /// Lower end.
    pub lo: Bound,
    /// Upper end.
    pub hi: Bound,
}

impl Interval {
    /// `[a, b]`.
    pub fn closed(a: Q, b: Q) -> Self {
        Interval { lo: Bound::Closed(a), hi: Bound::Closed(b) }
    }

    /// The whole real line.
    pub fn everything() -> Self {
        Interval { lo: Bound::Unbounded, hi: Bound::Unbounded }
    }

    /// Closed-endpoint realization `(lo, hi)` after shifting open ends.
    pub fn realize(&self, margin: &Q) -> Result<(Option<Q>, Option<Q>)> {
        let lo = match &self.lo {
            Bound::Unbounded => None,
            Bound::Closed(a) => Some(a.clone()),
            Bound::Open(a) => Some(a + margin),
        };
        let hi = match &self.hi {
            Bound::Unbounded => None,
            Bound::Closed(b) => Some(b.clone()),
            Bound::Open(b) => Some(b - margin),
        };
        if let (Some(a), Some(b)) = (&lo, &hi) {
            if a > b {
                return Err(Error::pre("iii_approx_degree", format!("empty interval [{a}, {b}]")));
            }
        }
        Ok((lo, hi))
    }
}

/// The three target intervals and the margin for open endpoints.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IiiSpec {
    /// Target for `f^{-1}(0)`.
    pub i0: Interval,
    /// Target for `f^{-1}(1)`.
    pub i1: Interval,
    /// Target for undefined points.
    pub star: Interval,
    /// Shift applied to open endpoints.
    pub margin: Q,
}

impl IiiSpec {
    /// Sign representation: `p > 0` on zeros, `p < 0` on ones, anything on
    /// undefined points; with margin one this is `(-1)^f p >= 1`.
    pub fn threshold() -> Self {
        IiiSpec {
            i0: Interval { lo: Bound::Open(Q::zero()), hi: Bound::Unbounded },
            i1: Interval { lo: Bound::Unbounded, hi: Bound::Open(Q::zero()) },
            star: Interval::everything(),
            margin: Q::one(),
        }
    }

    /// `eps`-approximation: `|p - f| <= eps` on the defined points.
    pub fn approx(eps: &Q) -> Self {
        IiiSpec {
            i0: Interval::closed(-eps.clone(), eps.clone()),
            i1: Interval::closed(Q::one() - eps, Q::one() + eps),
            star: Interval::everything(),
            margin: Q::one(),
        }
    }

    /// One-sided approximation: `|p| <= eps` on zeros and `p >= 1 - eps` on ones.
    pub fn one_sided(eps: &Q) -> Self {
        IiiSpec {
            i0: Interval::closed(-eps.clone(), eps.clone()),
            i1: Interval { lo: Bound::Closed(Q::one() - eps), hi: Bound::Unbounded },
            star: Interval::everything(),
            margin: Q::one(),
        }
    }
}

/// Least degree of a polynomial mapping `f^{-1}(0)`, `f^{-1}(1)` and the
/// undefined points `star` into the (margin-adjusted) intervals of `spec`.
///
/// The dual object is the Farkas weight function `w` certifying that degree
/// `value - 1` is impossible: `orth w >= value` and `sum_x w(x) * (endpoint)`
/// is positive.
pub fn iii_approx_degree(f: &FnTable, star: &[Point], spec: &IiiSpec) -> Result<DegreeAnswer> {
    let pts = oracle_points(f)?;
    let caps = caps_of(f.domain());
    let max_deg: u32 = caps.iter().sum();
    let i0 = spec.i0.realize(&spec.margin)?;
    let i1 = spec.i1.realize(&spec.margin)?;
    let is = spec.star.realize(&spec.margin)?;
    let star: alloc::collections::BTreeSet<&Point> = star.iter().collect();
    // (point index, bound, is_lower)
    let mut targets: Vec<(usize, Q, bool)> = Vec::new();
    for (j, x) in pts.iter().enumerate() {
        let (lo, hi) = if star.contains(x) {
            &is
        } else if f.get(x).is_zero() {
            &i0
        } else {
            &i1
        };
        if let Some(a) = lo {
            targets.push((j, a.clone(), true));
        }
        if let Some(b) = hi {
            targets.push((j, b.clone(), false));
        }
    }
    let mut last: Option<FnTable> = None;
    for d in 0..=max_deg {
        let mons = monomials_up_to(&caps, d);
        let mut lp = LpProblem::new(mons.len());
        for j in 0..mons.len() {
            lp.set_free(j);
        }
        let vals: Vec<Vec<(usize, Q)>> = pts
            .iter()
            .map(|x| {
                mons.iter()
                    .enumerate()
                    .filter_map(|(k, m)| {
                        let v = m.eval(x);
                        (!v.is_zero()).then(|| (k, Q::from_integer(v)))
                    })
                    .collect()
            })
            .collect();
        for (j, b, lower) in &targets {
            lp.add(vals[*j].clone(), if *lower { Relation::Ge } else { Relation::Le }, b.clone());
        }
        match solve_verified(&lp)? {
            LpCertificate::Feasible { x, .. } => {
                let primal: Vec<(Monomial, Q)> =
                    mons.into_iter().zip(x).filter(|(_, c)| !c.is_zero()).collect();
                for (j, b, lower) in &targets {
                    let v = eval_poly(&primal, &pts[*j]);
                    if (*lower && v < *b) || (!*lower && v > *b) {
                        return Err(Error::cert("iii_approx_degree", "primal polynomial leaves its interval"));
                    }
                }
                if let Some(w) = &last {
                    if !orth_at_least(w, d) {
                        return Err(Error::cert("iii_approx_degree", "Farkas weights fail re-check"));
                    }
                }
                return Ok(DegreeAnswer { value: d, primal, dual: last });
            }
            LpCertificate::Infeasible { farkas } => {
                let mut w: BTreeMap<usize, Q> = BTreeMap::new();
                for ((j, _, lower), u) in targets.iter().zip(&farkas) {
                    let e = w.entry(*j).or_insert_with(Q::zero);
                    if *lower {
                        *e += u;
                    } else {
                        *e -= u;
                    }
                }
                last = Some(FnTable::from_entries(
                    f.domain().clone(),
                    w.into_iter().filter(|(_, v)| !v.is_zero()).map(|(j, v)| (pts[j].clone(), v)),
                )?);
            }
            LpCertificate::Unbounded { .. } => return Err(Error::Unbounded),
        }
    }
    Err(Error::cert("iii_approx_degree", "no polynomial up to the full degree"))
}

/// A matrix of `+1` / `-1` entries, row-major.
pub type SignMatrix = Vec<Vec<i64>>;

/// Largest `rows + cols` accepted by [`discrepancy_2party`].
pub const DISC_LIMIT: usize = 16;

/// Exact two-party discrepancy with its optimal strategies.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Discrepancy {
    /// `min_P max_R |sum_{(x,y) in R} M(x,y) P(x,y)|`.
    pub value: Q,
    /// An optimal distribution `P` on the cells.
    pub p: Vec<Vec<Q>>,
    /// Rectangles (row mask, column mask, sign, weight) of an optimal mixed
    /// strategy for the maximizer.
    pub rectangles: Vec<(u32, u32, i64, Q)>,
}

fn rect_corr(m: &SignMatrix, p: &[Vec<Q>], a: u32, b: u32) -> Q {
    let mut s = Q::zero();
    for (x, row) in m.iter().enumerate() {
        if (a >> x) & 1 == 1 {
            for (y, &e) in row.iter().enumerate() {
                if (b >> y) & 1 == 1 && !p[x][y].is_zero() {
                    s += &p[x][y] * Q::from_integer(e.into());
                }
            }
        }
    }
    s
}

/// All rectangles ordered by decreasing `|correlation|` under `p`, keeping
/// those above `t`.
fn violated(m: &SignMatrix, p: &[Vec<Q>], t: &Q, limit: usize) -> Vec<(u32, u32, i64, Q)> {
    let (rows, cols) = (m.len(), m[0].len());
    let mut out: Vec<(u32, u32, i64, Q)> = Vec::new();
    for a in 1u32..(1 << rows) {
        let colsum: Vec<Q> = (0..cols)
            .map(|y| {
                (0..rows)
                    .filter(|x| (a >> x) & 1 == 1)
                    .fold(Q::zero(), |acc, x| acc + &p[x][y] * Q::from_integer(m[x][y].into()))
            })
            .collect();
        for b in 1u32..(1 << cols) {
            let s = (0..cols).filter(|y| (b >> y) & 1 == 1).fold(Q::zero(), |acc, y| acc + &colsum[y]);
            if s.abs() > *t {
                out.push((a, b, if s.is_negative() { -1 } else { 1 }, s.abs()));
            }
        }
    }
    out.sort_by(|x, y| y.3.cmp(&x.3).then((x.0, x.1).cmp(&(y.0, y.1))));
    out.truncate(limit);
    out
}

/// Exact discrepancy of a sign matrix with respect to combinatorial
/// rectangles, by column generation over rectangles: each round solves the
/// restricted maximizer LP, reads the minimizer's distribution `P` off its
/// dual, and adds the rectangles that beat the current value. On exit `P`
/// achieves the value against every rectangle and the restricted mixed
/// strategy achieves it against every `P`, which proves optimality.
pub fn discrepancy_2party(m: &SignMatrix) -> Result<Discrepancy> {
    let rows = m.len();
    let cols = m.first().map_or(0, |r| r.len());
    if rows == 0 || cols == 0 || m.iter().any(|r| r.len() != cols) {
        return Err(Error::Invalid("sign matrix must be non-empty and rectangular".into()));
    }
    if rows + cols > DISC_LIMIT {
        return Err(Error::TooLarge(format!(
            "{rows}x{cols} matrix exceeds rows + cols <= {DISC_LIMIT}; use the closed-form bounds in the matrix module"
        )));
    }
    if m.iter().flatten().any(|&e| e != 1 && e != -1) {
        return Err(Error::Invalid("entries must be +1 or -1".into()));
    }
    let full_r = (1u32 << rows) - 1;
    let full_c = (1u32 << cols) - 1;
    let mut rects: Vec<(u32, u32, i64)> = vec![(full_r, full_c, 1), (full_r, full_c, -1)];
    for x in 0..rows {
        for y in 0..cols {
            rects.push((1 << x, 1 << y, m[x][y]));
        }
    }
    loop {
        // Variables: one weight per (rectangle, sign), then z (free).
        // Rows: for each cell, z - sum_{R contains cell} s M u_R <= 0; sum u = 1.
        let k = rects.len();
        let mut lp = LpProblem::new(k + 1);
        lp.set_free(k);
        for x in 0..rows {
            for y in 0..cols {
                let mut coeffs: Vec<(usize, Q)> = rects
                    .iter()
                    .enumerate()
                    .filter(|(_, (a, b, _))| (a >> x) & 1 == 1 && (b >> y) & 1 == 1)
                    .map(|(j, (_, _, s))| (j, q(-s * m[x][y])))
                    .collect();
                coeffs.push((k, Q::one()));
                lp.add(coeffs, Relation::Le, Q::zero());
            }
        }
        lp.add((0..k).map(|j| (j, Q::one())).collect(), Relation::Eq, Q::one());
        let mut obj = vec![Q::zero(); k + 1];
        obj[k] = -Q::one();
        lp.minimize(obj);
        let LpCertificate::Feasible { x: sol, dual: Some(u), value: Some(v) } = solve_verified(&lp)? else {
            return Err(Error::cert("discrepancy_2party", "restricted LP has no optimum"));
        };
        let value = -v;
        let p: Vec<Vec<Q>> = (0..rows).map(|x| (0..cols).map(|y| u[x * cols + y].clone()).collect()).collect();
        let new = violated(m, &p, &value, 8);
        if new.is_empty() {
            let total = p.iter().flatten().fold(Q::zero(), |a, b| a + b);
            if total != Q::one() || p.iter().flatten().any(|v| v.is_negative()) {
                return Err(Error::cert("discrepancy_2party", "minimizer is not a distribution"));
            }
            debug_assert!(rects.iter().all(|(a, b, _)| rect_corr(m, &p, *a, *b).abs() <= value));
            let rectangles = rects
                .iter()
                .zip(&sol)
                .filter(|(_, w)| !w.is_zero())
                .map(|((a, b, s), w)| (*a, *b, *s, w.clone()))
                .collect();
            return Ok(Discrepancy { value, p, rectangles });
        }
        for (a, b, s, _) in new {
            if !rects.contains(&(a, b, s)) {
                rects.push((a, b, s));
            }
        }
    }
}

/// Threshold density search result.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DensityAnswer {
    /// A smallest sign-representing parity family (subset masks) with weights
    /// satisfying `(-1)^{f(x)} sum_S w_S chi_S(x) >= 1`.
    Found {
        /// Subset masks.
        family: Vec<usize>,
        /// Weights, one per family member.
        weights: Vec<Q>,
    },
    /// No family of size at most `cap` works, so the density is `>= cap + 1`.
    AtLeast(usize),
}

impl DensityAnswer {
    /// The density, or the `cap + 1` sentinel.
    pub fn value(&self) -> usize {
        match self {
            DensityAnswer::Found { family, .. } => family.len(),
            DensityAnswer::AtLeast(v) => *v,
        }
    }
}

/// Largest dimension accepted by [`threshold_density`].
pub const DENSITY_MAX_N: usize = 6;

fn next_combination(c: &mut [usize], n: usize) -> bool {
    let k = c.len();
    let mut i = k;
    while i > 0 {
        i -= 1;
        if c[i] < n - k + i {
            c[i] += 1;
            for j in i + 1..k {
                c[j] = c[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

/// Threshold density: the least number of parities whose weighted sum
/// sign-represents `f`, by increasing-size search. For each candidate family
/// the points are grouped by their character pattern; a family is rejected
/// outright if two points with one pattern disagree on `f`, and otherwise
/// decided by a small exact LP over the distinct patterns.
pub fn threshold_density(f: &FnTable, cap: usize) -> Result<DensityAnswer> {
    let n = f.domain().require_hypercube()?;
    if n > DENSITY_MAX_N {
        return Err(Error::TooLarge(format!("threshold density on {n} variables (limit {DENSITY_MAX_N})")));
    }
    let pts = f.domain().points();
    let masks: Vec<usize> = pts.iter().map(|x| crate::fourier::point_mask(x)).collect();
    let labels: Vec<bool> = pts.iter().map(|x| !f.get(x).is_zero()).collect();
    let nchars = 1usize << n;
    for k in 1..=cap.min(nchars) {
        let mut fam: Vec<usize> = (0..k).collect();
        loop {
            // pattern bit j = parity of chi_{fam[j]} at x
            let mut groups: BTreeMap<u64, bool> = BTreeMap::new();
            let mut consistent = true;
            for (xm, &lab) in masks.iter().zip(&labels) {
                let key = fam
                    .iter()
                    .enumerate()
                    .fold(0u64, |acc, (j, s)| acc | ((((xm & s).count_ones() & 1) as u64) << j));
                match groups.insert(key, lab) {
                    Some(prev) if prev != lab => {
                        consistent = false;
                        break;
                    }
                    _ => {}
                }
            }
            if consistent {
                let mut lp = LpProblem::new(k);
                for j in 0..k {
                    lp.set_free(j);
                }
                for (key, lab) in &groups {
                    let s: i64 = if *lab { -1 } else { 1 };
                    let coeffs = (0..k).map(|j| (j, q(if (key >> j) & 1 == 1 { -s } else { s }))).collect();
                    lp.add(coeffs, Relation::Ge, Q::one());
                }
                if let LpCertificate::Feasible { x, .. } = solve_verified(&lp)? {
                    for (xm, &lab) in masks.iter().zip(&labels) {
                        let v = fam.iter().zip(&x).fold(Q::zero(), |acc, (s, w)| {
                            if (xm & s).count_ones() % 2 == 0 {
                                acc + w
                            } else {
                                acc - w
                            }
                        });
                        let v = if lab { -v } else { v };
                        if v < Q::one() {
                            return Err(Error::cert("threshold_density", "weights miss the margin"));
                        }
                    }
                    return Ok(DensityAnswer::Found { family: fam, weights: x });
                }
            }
            if !next_combination(&mut fam, nchars) {
                break;
            }
        }
    }
    Ok(DensityAnswer::AtLeast(cap + 1))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::qr;

    fn parity(n: usize) -> FnTable {
        FnTable::boolean(Domain::Hypercube(n), |x| x.iter().sum::<i64>() % 2 == 1)
    }

    fn and(n: usize) -> FnTable {
        FnTable::boolean(Domain::Hypercube(n), |x| x.iter().all(|&b| b == 1))
    }

    #[test]
    fn parity_and_and() {
        for n in 1..=3 {
            assert_eq!(threshold_degree(&parity(n)).unwrap().value, n as u32);
            assert_eq!(threshold_degree(&and(n)).unwrap().value, 1);
        }
        let c = FnTable::boolean(Domain::Hypercube(2), |_| false);
        let a = threshold_degree(&c).unwrap();
        assert_eq!(a.value, 0);
        assert!(a.dual.is_none());
    }

    #[test]
    fn smooth_degree_limits() {
        let f = and(2);
        assert_eq!(smooth_threshold_degree(&f, &Q::zero()).unwrap().value, 1);
        assert!(smooth_threshold_degree(&f, &qr(1, 2)).unwrap().value >= 1);
        assert_eq!(smooth_threshold_degree(&parity(2), &Q::one()).unwrap().value, 2);
        assert!(smooth_threshold_degree(&f, &q(2)).is_err());
    }

    #[test]
    fn approximate_degrees() {
        let x1 = FnTable::boolean(Domain::Hypercube(1), |x| x[0] == 1);
        assert_eq!(iii_approx_degree(&x1, &[], &IiiSpec::approx(&qr(1, 3))).unwrap().value, 1);
        let or2 = FnTable::boolean(Domain::Hypercube(2), |x| x[0] + x[1] > 0);
        let a = iii_approx_degree(&or2, &[], &IiiSpec::approx(&qr(1, 3))).unwrap();
        assert_eq!(a.value, 1);
        assert_eq!(iii_approx_degree(&and(2), &[], &IiiSpec::threshold()).unwrap().value, 1);
    }

    #[test]
    fn small_discrepancies() {
        assert_eq!(discrepancy_2party(&vec![vec![1]]).unwrap().value, q(1));
        // Every distribution puts mass >= 1/4 on some cell; uniform P meets it.
        assert_eq!(discrepancy_2party(&vec![vec![1, -1], vec![-1, 1]]).unwrap().value, qr(1, 4));
        let h: SignMatrix = (0..4u32)
            .map(|x| (0..4u32).map(|y| if (x & y).count_ones() % 2 == 0 { 1 } else { -1 }).collect())
            .collect();
        let d = discrepancy_2party(&h).unwrap();
        assert!(d.value > Q::zero() && d.value <= qr(1, 2));
    }

    #[test]
    fn densities() {
        let c = FnTable::boolean(Domain::Hypercube(2), |_| true);
        assert_eq!(threshold_density(&c, 3).unwrap().value(), 1);
        assert_eq!(threshold_density(&parity(2), 3).unwrap().value(), 1);
        assert_eq!(threshold_density(&and(2), 0).unwrap(), DensityAnswer::AtLeast(1));
    }
}
