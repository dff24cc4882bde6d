//! Floating-point cross-checks and seeded random instances.
//!
//! Floats appear only here and only to confirm exact results: spectral norms
//! by a deterministic SVD with a fixed iteration budget, compared against the
//! exact closed forms with an explicit relative tolerance.

use anyhow::{anyhow, Result};
use dualpoly::matrix::PatternMatrix;
use dualpoly::rational::{q, to_f64};
use dualpoly::{Domain, FnTable, Q};
use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Convergence tolerance for singular values.
pub const SVD_EPS: f64 = 1e-12;

/// Iteration budget for the SVD.
pub const SVD_MAX_ITER: usize = 10_000;

/// Relative tolerance for formula-versus-numeric comparisons.
pub const REL_TOL: f64 = 1e-9;

/// Converts an exact matrix to `f64`.
pub fn to_dmatrix(m: &[Vec<Q>]) -> DMatrix<f64> {
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    DMatrix::from_fn(rows, cols, |i, j| to_f64(&m[i][j]))
}

/// Largest singular value.
pub fn spectral_norm(m: &[Vec<Q>]) -> Result<f64> {
    let svd = nalgebra::SVD::try_new(to_dmatrix(m), false, false, SVD_EPS, SVD_MAX_ITER)
        .ok_or_else(|| anyhow!("SVD did not converge within {SVD_MAX_ITER} iterations"))?;
    Ok(svd.singular_values.iter().cloned().fold(0.0, f64::max))
}

/// `|a - b| / max(|a|, |b|, tiny)`.
pub fn relative_error(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(f64::MIN_POSITIVE)
}

/// Closed-form versus numeric spectral norm of a pattern matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct NormComparison {
    /// `sqrt` of the exact closed form, in `f64`.
    pub formula: f64,
    /// Largest singular value of the materialized matrix.
    pub numeric: f64,
    /// Relative disagreement.
    pub relative_error: f64,
}

/// Compares the closed form with the SVD of the materialized matrix.
pub fn compare_pattern_norm(pm: &PatternMatrix) -> Result<NormComparison> {
    let formula = to_f64(&pm.norm_sq()?.norm_sq).sqrt();
    let numeric = spectral_norm(&pm.materialize()?)?;
    Ok(NormComparison { formula, numeric, relative_error: relative_error(formula, numeric) })
}

/// Seeded generator used by every randomized check.
pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A random sparse function on `{0,1}^n`: each point is non-zero with
/// probability one half, with an integer value in `[-5, 5] \ {0}`. At least one
/// point is non-zero.
pub fn random_sparse_phi(n: usize, rng: &mut ChaCha8Rng) -> FnTable {
    let pts = Domain::Hypercube(n).points();
    let forced = rng.gen_range(0..pts.len());
    let mut vals = Vec::with_capacity(pts.len());
    for i in 0..pts.len() {
        if i == forced || rng.gen_bool(0.5) {
            let mut v = rng.gen_range(1..=5);
            if rng.gen_bool(0.5) {
                v = -v;
            }
            vals.push(q(v));
        } else {
            vals.push(q(0));
        }
    }
    FnTable::from_values(Domain::Hypercube(n), &vals).expect("one value per point")
}

#[cfg(test)]
mod tests {
    use super::*;
    use dualpoly::matrix::{character_matrix, PatternMatrix};

    #[test]
    fn hadamard_norm() {
        let n = spectral_norm(&character_matrix(3)).unwrap();
        assert!((n - 8f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn parity_pattern_norm() {
        let phi = FnTable::from_fn(Domain::Hypercube(1), |x| if x[0] == 0 { q(1) } else { q(-1) });
        let cmp = compare_pattern_norm(&PatternMatrix::new(2, 1, phi).unwrap()).unwrap();
        assert!((cmp.formula - 2.0 * 2f64.sqrt()).abs() < 1e-12);
        assert!(cmp.relative_error < REL_TOL);
    }

    #[test]
    fn random_phi_is_deterministic() {
        let a = random_sparse_phi(3, &mut rng(7));
        let b = random_sparse_phi(3, &mut rng(7));
        assert_eq!(a, b);
        assert!(!a.is_zero());
    }
}
