//! Exact rational linear programming.
//!
//! [`LpProblem`] describes a finite LP over exact rationals; [`solve`] runs a
//! dense two-phase simplex with Bland's anti-cycling rule and returns an
//! [`LpCertificate`] that [`verify`] re-checks from scratch:
//!
//! * `Optimal`/`Feasible` carry a primal point (and, with an objective, a dual
//!   vector with equal objective value);
//! * `Infeasible` carries Farkas multipliers `u` for the canonical form in
//!   which every row reads `a_i x >= b_i` (`<=` rows are negated): `u_i >= 0`
//!   on inequality rows, `sum_i u_i a_i` is `<= 0` on non-negative variables
//!   and `= 0` on free ones, and `sum_i u_i b_i = 1 > 0`;
//! * `Unbounded` carries a feasible point and an improving ray.
//!
//! The [`oracles`] submodule builds the degree oracles on top.

mod simplex;
pub mod oracles;

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::rational::Q;

pub use oracles::{
    discrepancy_2party, iii_approx_degree, smooth_threshold_degree, threshold_degree, threshold_density,
    Bound, DegreeAnswer, DensityAnswer, Discrepancy, IiiSpec, Interval, SignMatrix,
};
pub use simplex::solve;

/// Relation of a constraint row.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    /// `a x <= b`.
    Le,
    /// `a x = b`.
    Eq,
    /// `a x >= b`.
    Ge,
}

/// A sparse constraint row.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Constraint {
    /// `(variable, coefficient)` pairs; repeated variables are summed.
    pub coeffs: Vec<(usize, Q)>,
    /// Relation between the row and the right-hand side.
    pub relation: Relation,
    /// Right-hand side.
    pub rhs: Q,
}

impl Constraint {
    /// `a . x` for a full assignment.
    pub fn lhs(&self, x: &[Q]) -> Q {
        self.coeffs.iter().fold(Q::zero(), |acc, (j, c)| acc + c * &x[*j])
    }

    /// Whether `x` satisfies the row.
    pub fn holds(&self, x: &[Q]) -> bool {
        let l = self.lhs(x);
        match self.relation {
            Relation::Le => l <= self.rhs,
            Relation::Eq => l == self.rhs,
            Relation::Ge => l >= self.rhs,
        }
    }

    /// Sign that turns the row into canonical `>=` form.
    fn canonical_sign(&self) -> Q {
        match self.relation {
            Relation::Le => -Q::from_integer(1.into()),
            _ => Q::from_integer(1.into()),
        }
    }
}

/// A finite linear program `min c.x` subject to rows, with each variable
/// either free or non-negative.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LpProblem {
    /// Number of variables.
    pub num_vars: usize,
    /// `free[j]` is true when variable `j` is unrestricted in sign.
    pub free: Vec<bool>,
    /// Constraint rows.
    pub constraints: Vec<Constraint>,
    /// Objective to minimize; `None` for a pure feasibility problem.
    pub objective: Option<Vec<Q>>,
}

impl LpProblem {
    /// A problem with `num_vars` non-negative variables and no rows.
    pub fn new(num_vars: usize) -> Self {
        LpProblem { num_vars, free: vec![false; num_vars], constraints: Vec::new(), objective: None }
    }

    /// Marks variable `j` as free.
    pub fn set_free(&mut self, j: usize) -> &mut Self {
        self.free[j] = true;
        self
    }

    /// Adds a sparse row.
    pub fn add(&mut self, coeffs: Vec<(usize, Q)>, relation: Relation, rhs: Q) -> &mut Self {
        self.constraints.push(Constraint { coeffs, relation, rhs });
        self
    }

    /// Adds a dense row (zero coefficients are dropped).
    pub fn add_dense(&mut self, row: &[Q], relation: Relation, rhs: Q) -> &mut Self {
        let coeffs = row.iter().enumerate().filter(|(_, c)| !c.is_zero()).map(|(j, c)| (j, c.clone())).collect();
        self.add(coeffs, relation, rhs)
    }

    /// Sets the objective `min c.x`.
    pub fn minimize(&mut self, c: Vec<Q>) -> &mut Self {
        self.objective = Some(c);
        self
    }

    /// Checks that every row references declared variables only.
    pub fn validate(&self) -> Result<()> {
        if self.free.len() != self.num_vars {
            return Err(Error::Invalid(format!("free flags: {} for {} variables", self.free.len(), self.num_vars)));
        }
        if let Some(c) = &self.objective {
            if c.len() != self.num_vars {
                return Err(Error::DimensionMismatch { left: c.len(), right: self.num_vars });
            }
        }
        for (i, row) in self.constraints.iter().enumerate() {
            if let Some((j, _)) = row.coeffs.iter().find(|(j, _)| *j >= self.num_vars) {
                return Err(Error::Invalid(format!("row {i} references undeclared variable {j}")));
            }
        }
        Ok(())
    }

    /// Whether `x` satisfies every row and sign restriction.
    pub fn is_feasible(&self, x: &[Q]) -> bool {
        x.len() == self.num_vars
            && x.iter().zip(&self.free).all(|(v, f)| *f || !v.is_negative())
            && self.constraints.iter().all(|c| c.holds(x))
    }

    /// Objective value at `x` (zero without an objective).
    pub fn objective_value(&self, x: &[Q]) -> Q {
        match &self.objective {
            Some(c) => c.iter().zip(x).fold(Q::zero(), |a, (ci, xi)| a + ci * xi),
            None => Q::zero(),
        }
    }

    /// `sum_i u_i a_i` in canonical `>=` form, as a dense vector over variables.
    fn canonical_combination(&self, u: &[Q]) -> Vec<Q> {
        let mut out = vec![Q::zero(); self.num_vars];
        for (row, ui) in self.constraints.iter().zip(u) {
            if ui.is_zero() {
                continue;
            }
            let s = row.canonical_sign() * ui;
            for (j, c) in &row.coeffs {
                out[*j] += c * &s;
            }
        }
        out
    }

    /// `sum_i u_i b_i` in canonical `>=` form.
    fn canonical_rhs(&self, u: &[Q]) -> Q {
        self.constraints.iter().zip(u).fold(Q::zero(), |acc, (row, ui)| acc + row.canonical_sign() * ui * &row.rhs)
    }

    /// Whether `u` has the right signs for canonical multipliers.
    fn multipliers_signed(&self, u: &[Q]) -> bool {
        u.len() == self.constraints.len()
            && self.constraints.iter().zip(u).all(|(row, ui)| row.relation == Relation::Eq || !ui.is_negative())
    }
}

/// Outcome of [`solve`], with everything needed to re-check it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LpCertificate {
    /// A feasible point; with an objective it is optimal and `dual` holds
    /// canonical multipliers whose value equals the objective value.
    Feasible {
        /// Primal point.
        x: Vec<Q>,
        /// Optimal dual multipliers (only with an objective).
        dual: Option<Vec<Q>>,
        /// Optimal objective value (only with an objective).
        value: Option<Q>,
    },
    /// Farkas multipliers proving infeasibility, normalized to `u.b = 1`.
    Infeasible {
        /// Canonical multipliers, one per row.
        farkas: Vec<Q>,
    },
    /// The objective is unbounded below along `x + t * ray`, `t >= 0`.
    Unbounded {
        /// Feasible starting point.
        x: Vec<Q>,
        /// Improving recession direction.
        ray: Vec<Q>,
    },
}

impl LpCertificate {
    /// True for a feasible (possibly optimal) answer.
    pub fn is_feasible(&self) -> bool {
        matches!(self, LpCertificate::Feasible { .. })
    }

    /// The primal point, if any.
    pub fn point(&self) -> Option<&[Q]> {
        match self {
            LpCertificate::Feasible { x, .. } | LpCertificate::Unbounded { x, .. } => Some(x),
            LpCertificate::Infeasible { .. } => None,
        }
    }
}

/// Re-checks a certificate against its problem using exact arithmetic only.
pub fn verify(p: &LpProblem, cert: &LpCertificate) -> Result<()> {
    match cert {
        LpCertificate::Feasible { x, dual, value } => {
            if !p.is_feasible(x) {
                return Err(Error::cert("lp", "primal point violates a constraint"));
            }
            if let Some(c) = &p.objective {
                let (Some(u), Some(v)) = (dual, value) else {
                    return Err(Error::cert("lp", "optimal answer without dual multipliers"));
                };
                if !p.multipliers_signed(u) {
                    return Err(Error::cert("lp", "dual multipliers have the wrong sign"));
                }
                let comb = p.canonical_combination(u);
                for j in 0..p.num_vars {
                    let ok = if p.free[j] { comb[j] == c[j] } else { comb[j] <= c[j] };
                    if !ok {
                        return Err(Error::cert("lp", format!("dual constraint for variable {j} fails")));
                    }
                }
                if p.objective_value(x) != *v || p.canonical_rhs(u) != *v {
                    return Err(Error::cert("lp", "primal and dual objective values differ"));
                }
            }
            Ok(())
        }
        LpCertificate::Infeasible { farkas } => {
            if !p.multipliers_signed(farkas) {
                return Err(Error::cert("lp", "Farkas multipliers have the wrong sign"));
            }
            let comb = p.canonical_combination(farkas);
            for j in 0..p.num_vars {
                let ok = if p.free[j] { comb[j].is_zero() } else { !comb[j].is_positive() };
                if !ok {
                    return Err(Error::cert("lp", format!("Farkas combination fails on variable {j}")));
                }
            }
            if !p.canonical_rhs(farkas).is_positive() {
                return Err(Error::cert("lp", "Farkas combination does not reach 0 >= positive"));
            }
            Ok(())
        }
        LpCertificate::Unbounded { x, ray } => {
            if !p.is_feasible(x) {
                return Err(Error::cert("lp", "unbounded answer with an infeasible base point"));
            }
            let Some(c) = &p.objective else {
                return Err(Error::cert("lp", "unbounded answer without an objective"));
            };
            if ray.len() != p.num_vars || ray.iter().zip(&p.free).any(|(r, f)| !f && r.is_negative()) {
                return Err(Error::cert("lp", "ray violates a sign restriction"));
            }
            for row in &p.constraints {
                let l = row.lhs(ray);
                let ok = match row.relation {
                    Relation::Le => !l.is_positive(),
                    Relation::Eq => l.is_zero(),
                    Relation::Ge => !l.is_negative(),
                };
                if !ok {
                    return Err(Error::cert("lp", "ray leaves the feasible region"));
                }
            }
            let slope = c.iter().zip(ray).fold(Q::zero(), |a, (ci, ri)| a + ci * ri);
            if !slope.is_negative() {
                return Err(Error::cert("lp", "ray does not improve the objective"));
            }
            Ok(())
        }
    }
}

/// Solves and verifies in one step.
pub fn solve_verified(p: &LpProblem) -> Result<LpCertificate> {
    let cert = solve(p)?;
    verify(p, &cert)?;
    Ok(cert)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{q, qr};

    #[test]
    fn infeasible_pair() {
        let mut p = LpProblem::new(1);
        p.add(vec![(0, q(1))], Relation::Ge, q(1)).add(vec![(0, q(1))], Relation::Le, q(0));
        let c = solve_verified(&p).unwrap();
        assert_eq!(c, LpCertificate::Infeasible { farkas: vec![q(1), q(1)] });
    }

    #[test]
    fn equality_point() {
        let mut p = LpProblem::new(1);
        p.add(vec![(0, q(1))], Relation::Eq, q(1));
        let c = solve_verified(&p).unwrap();
        assert_eq!(c.point().unwrap(), &[q(1)]);
    }

    #[test]
    fn small_optimum_with_free_variable() {
        // min x - y  s.t. x + y = 1, y <= 2/3, x >= 0, y free
        let mut p = LpProblem::new(2);
        p.set_free(1);
        p.add(vec![(0, q(1)), (1, q(1))], Relation::Eq, q(1));
        p.add(vec![(1, q(1))], Relation::Le, qr(2, 3));
        p.minimize(vec![q(1), q(-1)]);
        let c = solve_verified(&p).unwrap();
        match c {
            LpCertificate::Feasible { value, .. } => assert_eq!(value, Some(qr(-1, 3))),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn unbounded_is_reported() {
        let mut p = LpProblem::new(1);
        p.set_free(0);
        p.add(vec![(0, q(1))], Relation::Le, q(3));
        p.minimize(vec![q(1)]);
        assert!(matches!(solve_verified(&p).unwrap(), LpCertificate::Unbounded { .. }));
    }

    #[test]
    fn tampered_certificates_are_rejected() {
        let mut p = LpProblem::new(1);
        p.add(vec![(0, q(1))], Relation::Ge, q(1)).add(vec![(0, q(1))], Relation::Le, q(0));
        assert!(verify(&p, &LpCertificate::Infeasible { farkas: vec![q(0), q(1)] }).is_err());
        assert!(verify(&p, &LpCertificate::Infeasible { farkas: vec![q(-1), q(1)] }).is_err());
        assert!(verify(&p, &LpCertificate::Feasible { x: vec![q(1)], dual: None, value: None }).is_err());
    }
}
