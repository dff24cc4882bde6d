//! Fourier transform on the hypercube.
//!
//! `phi_hat(S) = 2^{-n} <phi, chi_S>` with `chi_S(x) = (-1)^{sum_{i in S} x_i}`.
//! Subsets are bit masks: bit `i` is set when coordinate `i` belongs to `S`.
//! The transform is the exact fast Walsh–Hadamard transform.

use alloc::vec;
use alloc::vec::Vec;
use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::rational::{pow2, Q};
use crate::table::FnTable;
use crate::Domain;

/// All `2^n` Fourier coefficients of a function on `{0,1}^n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Spectrum {
    n: usize,
    coeffs: Vec<Q>,
}

/// Index of a hypercube point as a mask (bit `i` = coordinate `i`).
pub fn point_mask(x: &[i64]) -> usize {
    x.iter().enumerate().fold(0, |m, (i, &c)| if c != 0 { m | (1 << i) } else { m })
}

/// The hypercube point with the given mask.
pub fn mask_point(n: usize, mask: usize) -> Vec<i64> {
    (0..n).map(|i| ((mask >> i) & 1) as i64).collect()
}

/// Coordinates of a subset mask.
pub fn mask_set(n: usize, mask: usize) -> Vec<usize> {
    (0..n).filter(|i| (mask >> i) & 1 == 1).collect()
}

/// In-place unnormalized Walsh–Hadamard transform.
fn wht(a: &mut [Q]) {
    let len = a.len();
    let mut h = 1;
    while h < len {
        for start in (0..len).step_by(2 * h) {
            for j in start..start + h {
                let x = a[j].clone();
                let y = a[j + h].clone();
                a[j] = &x + &y;
                a[j + h] = x - y;
            }
        }
        h *= 2;
    }
}

/// Fourier coefficients of `f`, which must live on a hypercube.
pub fn fourier(f: &FnTable) -> Result<Spectrum> {
    let n = f.domain().require_hypercube()?;
    if n > 24 {
        return Err(Error::TooLarge(alloc::format!("Fourier transform on {{0,1}}^{n}")));
    }
    let mut a = vec![Q::zero(); 1 << n];
    for (p, v) in f.iter() {
        a[point_mask(p)] = v.clone();
    }
    wht(&mut a);
    let scale = pow2(-(n as i64));
    for c in a.iter_mut() {
        *c *= &scale;
    }
    Ok(Spectrum { n, coeffs: a })
}

impl Spectrum {
    /// Number of variables.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Coefficient `phi_hat(S)` for a subset mask.
    pub fn get(&self, mask: usize) -> &Q {
        &self.coeffs[mask]
    }

    /// Coefficient for a list of coordinates.
    pub fn get_set(&self, set: &[usize]) -> &Q {
        &self.coeffs[set.iter().fold(0, |m, &i| m | (1 << i))]
    }

    /// All coefficients, indexed by subset mask.
    pub fn coeffs(&self) -> &[Q] {
        &self.coeffs
    }

    /// `max_S |phi_hat(S)|`.
    pub fn max_abs(&self) -> Q {
        self.coeffs.iter().map(|c| c.abs()).max().unwrap_or_else(Q::zero)
    }

    /// `min{|S| : phi_hat(S) != 0}`, or `None` for the zero function; equals
    /// the orthogonal content on the hypercube.
    pub fn orth(&self) -> Option<u32> {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(m, _)| m.count_ones())
            .min()
    }

    /// Reconstructs `f = sum_S phi_hat(S) chi_S`.
    pub fn inverse(&self) -> FnTable {
        let mut a = self.coeffs.clone();
        wht(&mut a);
        let dom = Domain::Hypercube(self.n);
        FnTable::from_fn(dom, |x| a[point_mask(x)].clone())
    }
}

/// The character `chi_S` on `{0,1}^n`.
pub fn character(n: usize, set: &[usize]) -> FnTable {
    FnTable::from_fn(Domain::Hypercube(n), |x| {
        let par: i64 = set.iter().map(|&i| x[i]).sum();
        if par % 2 == 0 {
            Q::from_integer(1.into())
        } else {
            Q::from_integer((-1).into())
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::orth::orth;
    use crate::rational::{q, qr};

    #[test]
    fn characters_are_unit_vectors() {
        let s = fourier(&character(3, &[0, 2])).unwrap();
        assert_eq!(s.get_set(&[0, 2]), &q(1));
        assert_eq!(s.coeffs().iter().filter(|c| !c.is_zero()).count(), 1);
        let one = FnTable::from_fn(Domain::Hypercube(2), |_| q(1));
        assert_eq!(fourier(&one).unwrap().get(0), &q(1));
    }

    #[test]
    fn and_two_spectrum() {
        let f = FnTable::from_fn(Domain::Hypercube(2), |x| if x[0] == 1 && x[1] == 1 { q(-1) } else { q(1) });
        let s = fourier(&f).unwrap();
        assert_eq!(s.coeffs(), &[qr(1, 2), qr(1, 2), qr(1, 2), qr(-1, 2)]);
        assert_eq!(s.inverse(), f);
        assert_eq!(s.orth(), Some(0));
        assert_eq!(orth(&f, 4).lower_bound(), 0);
    }

    #[test]
    fn rejects_non_cube() {
        assert!(fourier(&FnTable::univariate(&[q(1), q(2), q(3)])).is_err());
    }
}
