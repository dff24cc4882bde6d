//! Dual polynomials for OR.
//!
//! [`build_omega`] constructs the univariate object `omega` on `{0..n}`: with
//! `Delta = 8 ceil(1/eps) + 3`, `d = floor(sqrt(n / Delta))` and support
//! `S = {1, (Delta+1)/2} u {i^2 Delta : 0 <= i <= d}`,
//!
//! `omega(t) = (-1)^{|{i in S : i < t}|} prod_{i in S \ {t}} 1/|t - i|` on `S`,
//!
//! which is a divided-difference functional, hence orthogonal to every
//! polynomial of degree below `|S| - 1 = d + 2`. When `n <= Delta` the
//! fallback `(1, -1, 0, ..., 0)` is used.
//!
//! [`build_psi`] spreads `omega` over `{0..N}`: with `n_w = ceil(n/2)` and
//! `omega` built on `{0..n_w}`,
//!
//! `Psi(t) = omega(t) + delta (sum_{i=1}^{N-n_w} (-1)^i w_i omega(t-i)
//!                             + sum_{i=N-n_w+1}^{N} (-1)^i w_i omega(i-t))`,
//!
//! and `psi = Psi / ||Psi||_1`. Shifts and reflections preserve
//! orthogonality, every term has sign `(-1)^t`, and every `t` is hit by some
//! `omega(0)` term, so `sign psi(t) = (-1)^t` on all of `{0..N}`. The weights
//! `w_i = 1/(i^2 U_i)` use an upper dyadic bracket `U_i` of `2^{c i/sqrt n}`,
//! and `delta` is a dyadic value below `5 eps/(pi^2 (1 - eps))`, halved until
//! `psi(0) > (1 - eps)/2`.

use alloc::format;
use alloc::vec::Vec;
use num_traits::{One, Signed, Zero};

use crate::bounds::{dyadic_below, envelope_brackets, pi, Bracket};
use crate::error::{Error, Result};
use crate::orth::{orth, orth_at_least, OrthResult};
use crate::rational::{ceil_q, q, qr, to_u64, Q};
use crate::table::FnTable;

/// Parameters of the `omega` construction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OmegaSpec {
    /// Length parameter: `omega` lives on `{0..n}`.
    pub n: u64,
    /// Target bias `eps` in `(0, 1)`.
    pub eps: Q,
    /// `Delta = 8 ceil(1/eps) + 3`.
    pub big_delta: u64,
    /// `d = floor(sqrt(n / Delta))`.
    pub d: u64,
    /// Support `S` in increasing order (the fallback uses `{0, 1}`).
    pub support: Vec<u64>,
    /// True when `n <= Delta` and the fallback table is used.
    pub fallback: bool,
}

impl OmegaSpec {
    /// Computes `Delta`, `d` and `S` for `(n, eps)`.
    pub fn new(n: u64, eps: &Q) -> Result<Self> {
        if n == 0 {
            return Err(Error::pre("omega", "n must be at least 1"));
        }
        if !eps.is_positive() || *eps >= Q::one() {
            return Err(Error::pre("omega", format!("eps = {eps} outside (0, 1)")));
        }
        let inv = to_u64(&ceil_q(&eps.recip())).ok_or_else(|| Error::TooLarge("1/eps".into()))?;
        let big_delta = 8 * inv + 3;
        let fallback = n <= big_delta;
        let d = if fallback { 0 } else { crate::rational::isqrt(&(n / big_delta).into()).try_into().unwrap_or(0) };
        let support = if fallback {
            alloc::vec![0, 1]
        } else {
            let mut s: Vec<u64> = (0..=d).map(|i| i * i * big_delta).collect();
            s.push(1);
            s.push((big_delta + 1) / 2);
            s.sort_unstable();
            s.dedup();
            s
        };
        Ok(OmegaSpec { n, eps: eps.clone(), big_delta, d, support, fallback })
    }

    /// Guaranteed orthogonal content: `d + 2`, or `1` for the fallback.
    pub fn orth_bound(&self) -> u32 {
        if self.fallback {
            1
        } else {
            self.d as u32 + 2
        }
    }
}

/// Verified properties of `omega`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OmegaCertificate {
    /// Construction parameters.
    pub spec: OmegaSpec,
    /// `||omega||_1`.
    pub l1: Q,
    /// `omega(0)`.
    pub omega0: Q,
    /// Orthogonal content, computed exhaustively.
    pub orth: OrthResult,
    /// `sign omega(t) = (-1)^t` on the support.
    pub alternating: bool,
}

/// Builds `omega` on `{0..n}` and re-checks its defining properties.
pub fn build_omega(n: u64, eps: &Q) -> Result<(FnTable, OmegaCertificate)> {
    let spec = OmegaSpec::new(n, eps)?;
    let mut vals = alloc::vec![Q::zero(); n as usize + 1];
    if spec.fallback {
        vals[0] = q(1);
        vals[1] = q(-1);
    } else {
        for (rank, &t) in spec.support.iter().enumerate() {
            let mut v = Q::one();
            for &i in &spec.support {
                if i != t {
                    v /= q((t as i64 - i as i64).abs());
                }
            }
            vals[t as usize] = if rank % 2 == 0 { v } else { -v };
        }
    }
    let omega = FnTable::univariate(&vals);
    let l1 = omega.l1();
    let omega0 = omega.get(&[0]);
    let alternating = omega.iter().all(|(p, v)| v.is_positive() == (p[0] % 2 == 0));
    let orth_res = orth(&omega, spec.orth_bound());
    let cert = OmegaCertificate { spec, l1, omega0, orth: orth_res, alternating };
    if !cert.alternating {
        return Err(Error::cert("omega", "sign pattern is not (-1)^t"));
    }
    if !cert.orth.at_least(cert.spec.orth_bound()) {
        return Err(Error::cert("omega", format!("orth = {} below {}", cert.orth, cert.spec.orth_bound())));
    }
    let half = (Q::one() - &cert.spec.eps) / q(2);
    if cert.omega0 <= &half * &cert.l1 {
        return Err(Error::cert("omega", "omega(0) <= ((1 - eps)/2) ||omega||_1"));
    }
    Ok((omega, cert))
}

/// Parameters of the `psi` construction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PsiParams {
    /// Scale parameter `n` (the envelope uses `sqrt n`).
    pub n: u64,
    /// `psi` lives on `{0..N}`; requires `N >= n`.
    pub big_n: u64,
    /// Target bias `eps` in `(0, 1)`.
    pub eps: Q,
    /// Shift mass `delta`; `None` picks the default and halves it as needed.
    pub delta: Option<Q>,
    /// Shift weights `w_1..w_N`; `None` uses `1/(i^2 U_i)`.
    pub weights: Option<Vec<Q>>,
    /// Rate `c` in the default weights `2^{-c i / sqrt n}`.
    pub c: Q,
    /// Rate `c''` at which the envelope is certified.
    pub c2: Q,
}

impl PsiParams {
    /// Default parameters for `(n, N, eps)`: `c = c'' = 1`.
    pub fn new(n: u64, big_n: u64, eps: Q) -> Self {
        PsiParams { n, big_n, eps, delta: None, weights: None, c: Q::one(), c2: Q::one() }
    }
}

/// Verified properties of `psi`, each re-checkable from the table alone.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PsiCertificate {
    /// Parameters used (with the final `delta` filled in).
    pub params: PsiParams,
    /// Certificate of the underlying `omega`.
    pub omega: OmegaCertificate,
    /// Number of times the default `delta` was halved.
    pub halvings: u32,
    /// `||psi||_1` (always one).
    pub l1: Q,
    /// `psi(0)`.
    pub psi0: Q,
    /// Guaranteed orthogonal content (that of `omega`).
    pub orth_bound: u32,
    /// Orthogonal content computed exhaustively.
    pub orth: OrthResult,
    /// `sign psi(t) = (-1)^t` for every `t` in `{0..N}`.
    pub alternating: bool,
    /// Largest `c'` for which the envelope holds at rate `c''`.
    pub c_prime: Q,
    /// Brackets of `2^{c'' t / sqrt n}` for `t = 0..N`.
    pub envelope: Vec<Bracket>,
}

/// Default `delta`: a dyadic value below `5 eps / (pi^2 (1 - eps))`.
pub fn default_delta(eps: &Q) -> Q {
    let pi_hi = pi().hi;
    dyadic_below(&(q(5) * eps / (&pi_hi * &pi_hi * (Q::one() - eps))), 24)
}

/// Default weights `w_i = 1/(i^2 U_i)`, `U_i >= 2^{c i/sqrt n}`, `i = 1..N`.
pub fn default_weights(c: &Q, n: u64, big_n: u64) -> Vec<Q> {
    let br = envelope_brackets(c, n, big_n);
    (1..=big_n).map(|i| (q((i * i) as i64) * &br[i as usize].hi).recip()).collect()
}

/// Largest `c'` with `c'/((t+1)^2 E_t) <= |psi(t)| <= 1/(c'(t+1)^2 E_t)` for all
/// `t`, evaluated against the adverse bracket sides of `E_t`.
pub fn envelope_constant(psi: &FnTable, env: &[Bracket]) -> Q {
    let mut best: Option<Q> = None;
    for (t, e) in env.iter().enumerate() {
        let a = psi.get(&[t as i64]).abs();
        if a.is_zero() {
            return Q::zero();
        }
        let sq = q(((t + 1) * (t + 1)) as i64);
        let lower = &a * &sq * &e.lo;
        let upper = (&a * &sq * &e.hi).recip();
        let m = if lower < upper { lower } else { upper };
        best = Some(match best {
            Some(b) if b < m => b,
            _ => m,
        });
    }
    best.unwrap_or_else(Q::zero)
}

fn assemble(omega: &FnTable, nw: u64, big_n: u64, delta: &Q, w: &[Q]) -> FnTable {
    let mut vals = alloc::vec![Q::zero(); big_n as usize + 1];
    for (p, v) in omega.iter() {
        vals[p[0] as usize] += v;
    }
    for i in 1..=big_n {
        let coef = if i % 2 == 0 { delta * &w[i as usize - 1] } else { -(delta * &w[i as usize - 1]) };
        for (p, v) in omega.iter() {
            let s = p[0] as u64;
            let t = if i <= big_n - nw { i + s } else { i - s };
            vals[t as usize] += &coef * v;
        }
    }
    let psi = FnTable::univariate(&vals);
    let norm = psi.l1();
    psi.scale(&norm.recip())
}

/// Builds `psi` on `{0..N}` with its certificate.
pub fn build_psi(params: &PsiParams) -> Result<(FnTable, PsiCertificate)> {
    let PsiParams { n, big_n, eps, .. } = params;
    let (n, big_n) = (*n, *big_n);
    if n == 0 || big_n < n {
        return Err(Error::pre("psi", format!("need N >= n >= 1, got n = {n}, N = {big_n}")));
    }
    let nw = n.div_ceil(2);
    let (omega, ocert) = build_omega(nw, eps)?;
    let w = match &params.weights {
        Some(w) => {
            if w.len() != big_n as usize || w.iter().any(|x| !x.is_positive()) {
                return Err(Error::pre("psi", "need N positive weights"));
            }
            w.clone()
        }
        None => default_weights(&params.c, n, big_n),
    };
    let half = (Q::one() - eps) / q(2);
    let (mut delta, auto) = match &params.delta {
        Some(d) if d.is_positive() => (d.clone(), false),
        Some(d) => return Err(Error::pre("psi", format!("delta = {d} must be positive"))),
        None => (default_delta(eps), true),
    };
    let mut halvings = 0;
    let psi = loop {
        let psi = assemble(&omega, nw, big_n, &delta, &w);
        if psi.get(&[0]) > half {
            break psi;
        }
        if !auto || halvings >= 64 {
            return Err(Error::cert(
                "psi",
                format!("psi(0) <= (1 - eps)/2 with delta = {delta}; retry with a smaller delta"),
            ));
        }
        delta /= q(2);
        halvings += 1;
    };
    let env = envelope_brackets(&params.c2, n, big_n);
    let c_prime = envelope_constant(&psi, &env);
    let orth_bound = ocert.spec.orth_bound();
    let mut final_params = params.clone();
    final_params.delta = Some(delta);
    let cert = PsiCertificate {
        params: final_params,
        halvings,
        l1: psi.l1(),
        psi0: psi.get(&[0]),
        orth_bound,
        orth: orth(&psi, orth_bound.max(1)),
        alternating: (0..=big_n as i64).all(|t| {
            let v = psi.get(&[t]);
            !v.is_zero() && v.is_positive() == (t % 2 == 0)
        }),
        c_prime,
        envelope: env,
        omega: ocert,
    };
    cert.verify(&psi)?;
    Ok((psi, cert))
}

/// `psi` with default parameters.
pub fn build_psi_default(n: u64, big_n: u64, eps: &Q) -> Result<(FnTable, PsiCertificate)> {
    build_psi(&PsiParams::new(n, big_n, eps.clone()))
}

impl PsiCertificate {
    /// Re-checks every recorded property against `psi`.
    pub fn verify(&self, psi: &FnTable) -> Result<()> {
        let big_n = self.params.big_n as i64;
        if psi.l1() != Q::one() || self.l1 != Q::one() {
            return Err(Error::cert("psi", "||psi||_1 != 1"));
        }
        if psi.get(&[0]) != self.psi0 || self.psi0 <= (Q::one() - &self.params.eps) / q(2) {
            return Err(Error::cert("psi", "psi(0) <= (1 - eps)/2"));
        }
        let alt = (0..=big_n).all(|t| {
            let v = psi.get(&[t]);
            !v.is_zero() && v.is_positive() == (t % 2 == 0)
        });
        if !alt || !self.alternating {
            return Err(Error::cert("psi", "sign psi(t) != (-1)^t"));
        }
        if !orth_at_least(psi, self.orth_bound) || !self.orth.at_least(self.orth_bound) {
            return Err(Error::cert("psi", format!("orth psi < {}", self.orth_bound)));
        }
        if self.envelope.len() != big_n as usize + 1 {
            return Err(Error::cert("psi", "envelope brackets missing"));
        }
        for (t, e) in self.envelope.iter().enumerate() {
            let a = psi.get(&[t as i64]).abs();
            let sq = q(((t + 1) * (t + 1)) as i64);
            if &self.c_prime > &(&a * &sq * &e.lo) || &self.c_prime * &a * &sq * &e.hi > Q::one() {
                return Err(Error::cert("psi", format!("envelope fails at t = {t}")));
            }
        }
        if !self.c_prime.is_positive() {
            return Err(Error::cert("psi", "envelope constant is not positive"));
        }
        Ok(())
    }
}

/// `(1 - eps)/2`, the bias threshold for `psi(0)`.
pub fn bias_threshold(eps: &Q) -> Q {
    (Q::one() - eps) / q(2)
}

/// The bias used by downstream consumers by default.
pub fn default_eps() -> Q {
    qr(1, 3)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::table::inner_product;
    use crate::Domain;

    #[test]
    fn omega_fallback() {
        let (w, c) = build_omega(3, &qr(1, 2)).unwrap();
        assert!(c.spec.fallback);
        assert_eq!(w.dense(), alloc::vec![q(1), q(-1), q(0), q(0)]);
        assert_eq!(&c.omega0 / &c.l1, qr(1, 2));
    }

    #[test]
    fn omega_product_formula() {
        let (w, c) = build_omega(20, &qr(1, 2)).unwrap();
        assert_eq!(c.spec.big_delta, 19);
        assert_eq!(c.spec.d, 1);
        assert_eq!(c.spec.support, alloc::vec![0, 1, 10, 19]);
        assert!(c.orth.at_least(3));
        let one = FnTable::from_fn(Domain::boxed(&[20]), |_| q(1));
        assert_eq!(inner_product(&w, &one).unwrap(), q(0));
    }

    #[test]
    fn psi_small() {
        let (psi, c) = build_psi_default(4, 4, &qr(1, 3)).unwrap();
        assert_eq!(psi.l1(), q(1));
        let signs: Vec<bool> = psi.dense().iter().map(|v| v.is_positive()).collect();
        assert_eq!(signs, alloc::vec![true, false, true, false, true]);
        assert!(c.c_prime.is_positive());
        let (_, c16) = build_psi_default(16, 16, &qr(1, 3)).unwrap();
        assert!(c16.psi0 > qr(1, 3));
    }

    #[test]
    fn psi_64_has_orth_three() {
        let (_, c) = build_psi_default(64, 64, &qr(1, 3)).unwrap();
        assert_eq!(c.orth_bound, 3);
        assert!(c.orth.at_least(3));
    }

    #[test]
    fn explicit_large_delta_is_rejected() {
        let mut p = PsiParams::new(4, 4, qr(1, 3));
        p.delta = Some(q(100));
        assert!(build_psi(&p).is_err());
    }
}
