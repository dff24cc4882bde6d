//! Dense two-phase simplex over exact rationals with Bland's rule.
//!
//! The standard form splits free variables into two non-negative columns,
//! adds a slack column per inequality and an artificial column per row. The
//! artificial columns are kept through phase II: their reduced costs give the
//! dual multipliers `y_i` directly (`y_i = 1 - rc` after phase I, `y_i = -rc`
//! after phase II), which are then mapped back to the canonical `>=` form of
//! the original rows.

use alloc::vec;
use alloc::vec::Vec;
use num_traits::{One, Signed, Zero};

use super::{LpCertificate, LpProblem, Relation};
use crate::error::Result;
use crate::rational::Q;

struct Tableau {
    rows: Vec<Vec<Q>>,
    rhs: Vec<Q>,
    rc: Vec<Q>,
    obj_rhs: Q,
    basis: Vec<usize>,
}

impl Tableau {
    fn pivot(&mut self, r: usize, e: usize) {
        let inv = self.rows[r][e].recip();
        if !inv.is_one() {
            for v in self.rows[r].iter_mut() {
                if !v.is_zero() {
                    *v *= &inv;
                }
            }
            self.rhs[r] *= &inv;
        }
        let nz: Vec<usize> = (0..self.rows[r].len()).filter(|&j| !self.rows[r][j].is_zero()).collect();
        let prow = self.rows[r].clone();
        let prhs = self.rhs[r].clone();
        for k in 0..self.rows.len() {
            if k == r || self.rows[k][e].is_zero() {
                continue;
            }
            let f = self.rows[k][e].clone();
            for &j in &nz {
                let v = &prow[j] * &f;
                self.rows[k][j] -= v;
            }
            self.rhs[k] -= &prhs * &f;
        }
        if !self.rc[e].is_zero() {
            let f = self.rc[e].clone();
            for &j in &nz {
                let v = &prow[j] * &f;
                self.rc[j] -= v;
            }
            self.obj_rhs -= &prhs * &f;
        }
        self.basis[r] = e;
    }

    /// Runs Bland's rule over columns `< limit`; returns `Some(e)` if the
    /// entering column `e` has no positive entry (unbounded direction).
    fn run(&mut self, limit: usize) -> Option<usize> {
        loop {
            let Some(e) = (0..limit).find(|&j| self.rc[j].is_negative()) else { return None };
            let mut best: Option<(usize, Q)> = None;
            for i in 0..self.rows.len() {
                let a = &self.rows[i][e];
                if a.is_positive() {
                    let ratio = &self.rhs[i] / a;
                    let better = match &best {
                        None => true,
                        Some((bi, br)) => ratio < *br || (ratio == *br && self.basis[i] < self.basis[*bi]),
                    };
                    if better {
                        best = Some((i, ratio));
                    }
                }
            }
            match best {
                None => return Some(e),
                Some((r, _)) => self.pivot(r, e),
            }
        }
    }
}

/// Solves `p` exactly; the certificate can be re-checked with
/// [`super::verify`].
pub fn solve(p: &LpProblem) -> Result<LpCertificate> {
    p.validate()?;
    let m = p.constraints.len();
    // Column layout: variable columns, slack columns, artificial columns.
    let mut pos_col = Vec::with_capacity(p.num_vars);
    let mut neg_col = Vec::with_capacity(p.num_vars);
    let mut ncols = 0;
    for j in 0..p.num_vars {
        pos_col.push(ncols);
        ncols += 1;
        if p.free[j] {
            neg_col.push(Some(ncols));
            ncols += 1;
        } else {
            neg_col.push(None);
        }
    }
    let mut slack_col = vec![None; m];
    for (i, row) in p.constraints.iter().enumerate() {
        if row.relation != Relation::Eq {
            slack_col[i] = Some(ncols);
            ncols += 1;
        }
    }
    let art0 = ncols;
    ncols += m;

    let mut sigma = Vec::with_capacity(m);
    let mut rows = Vec::with_capacity(m);
    let mut rhs = Vec::with_capacity(m);
    for (i, row) in p.constraints.iter().enumerate() {
        let s = if row.rhs.is_negative() { -Q::one() } else { Q::one() };
        let mut t = vec![Q::zero(); ncols];
        for (j, c) in &row.coeffs {
            let v = c * &s;
            t[pos_col[*j]] += &v;
            if let Some(nc) = neg_col[*j] {
                t[nc] -= &v;
            }
        }
        if let Some(sc) = slack_col[i] {
            t[sc] = match row.relation {
                Relation::Le => s.clone(),
                _ => -s.clone(),
            };
        }
        t[art0 + i] = Q::one();
        rhs.push(&row.rhs * &s);
        rows.push(t);
        sigma.push(s);
    }

    // Phase I: minimize the sum of artificials.
    let mut rc = vec![Q::zero(); ncols];
    for j in 0..art0 {
        rc[j] = -rows.iter().fold(Q::zero(), |a, r| a + &r[j]);
    }
    let obj_rhs = -rhs.iter().fold(Q::zero(), |a, b| a + b);
    let mut tab = Tableau { rows, rhs, rc, obj_rhs, basis: (art0..art0 + m).collect() };
    tab.run(ncols);

    let canonical = |y: &[Q]| -> Vec<Q> {
        p.constraints
            .iter()
            .enumerate()
            .map(|(i, row)| {
                let v = &y[i] * &sigma[i];
                if row.relation == Relation::Le {
                    -v
                } else {
                    v
                }
            })
            .collect()
    };

    let infeas = -tab.obj_rhs.clone();
    if infeas.is_positive() {
        let y: Vec<Q> = (0..m).map(|i| Q::one() - &tab.rc[art0 + i]).collect();
        let farkas = canonical(&y).into_iter().map(|u| u / &infeas).collect();
        return Ok(LpCertificate::Infeasible { farkas });
    }

    // Drive artificials out of the basis where possible.
    for i in 0..m {
        if tab.basis[i] >= art0 {
            if let Some(j) = (0..art0).find(|&j| !tab.rows[i][j].is_zero()) {
                tab.pivot(i, j);
            }
        }
    }

    let extract = |tab: &Tableau| -> Vec<Q> {
        let mut std = vec![Q::zero(); ncols];
        for (i, &b) in tab.basis.iter().enumerate() {
            std[b] = tab.rhs[i].clone();
        }
        (0..p.num_vars)
            .map(|j| match neg_col[j] {
                Some(nc) => &std[pos_col[j]] - &std[nc],
                None => std[pos_col[j]].clone(),
            })
            .collect()
    };

    let Some(c) = &p.objective else {
        return Ok(LpCertificate::Feasible { x: extract(&tab), dual: None, value: None });
    };

    // Phase II.
    let mut cost = vec![Q::zero(); ncols];
    for j in 0..p.num_vars {
        cost[pos_col[j]] = c[j].clone();
        if let Some(nc) = neg_col[j] {
            cost[nc] = -c[j].clone();
        }
    }
    let mut rc = cost.clone();
    let mut obj_rhs = Q::zero();
    for (i, &b) in tab.basis.iter().enumerate() {
        if cost[b].is_zero() {
            continue;
        }
        for j in 0..ncols {
            if !tab.rows[i][j].is_zero() {
                rc[j] -= &cost[b] * &tab.rows[i][j];
            }
        }
        obj_rhs -= &cost[b] * &tab.rhs[i];
    }
    tab.rc = rc;
    tab.obj_rhs = obj_rhs;
    if let Some(e) = tab.run(art0) {
        let x = extract(&tab);
        let mut d = vec![Q::zero(); ncols];
        d[e] = Q::one();
        for (i, &b) in tab.basis.iter().enumerate() {
            d[b] = -tab.rows[i][e].clone();
        }
        let ray = (0..p.num_vars)
            .map(|j| match neg_col[j] {
                Some(nc) => &d[pos_col[j]] - &d[nc],
                None => d[pos_col[j]].clone(),
            })
            .collect();
        return Ok(LpCertificate::Unbounded { x, ray });
    }
    let x = extract(&tab);
    let y: Vec<Q> = (0..m).map(|i| -tab.rc[art0 + i].clone()).collect();
    let value = p.objective_value(&x);
    Ok(LpCertificate::Feasible { x, dual: Some(canonical(&y)), value: Some(value) })
}
