//! Truncated integer lattices and twisted shift monomials.
//!
//! The canonical unitaries act on ℓ²(Z^g) by u_j e_m = exp(2πi Σ_{k>j} θ_jk m_k) e_{m+e_j},
//! so that u_j u_k = exp(2πi θ_jk) u_k u_j. Monomials u^n = u_1^{n_1}⋯u_g^{n_g} are
//! compressed to the box ‖m‖_∞ ≤ K: entries that would leave the box are dropped.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::matrix::C64;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Lattice {
    pub dim: usize,
    pub cutoff: i64,
}

impl Lattice {
    pub fn side(&self) -> usize {
        (2 * self.cutoff + 1) as usize
    }

    pub fn len(&self) -> usize {
        self.side().pow(self.dim as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Coordinates of a point; the first coordinate varies slowest.
    pub fn coords(&self, mut idx: usize) -> Vec<i64> {
        let side = self.side();
        let mut m = vec![0; self.dim];
        for k in (0..self.dim).rev() {
            m[k] = (idx % side) as i64 - self.cutoff;
            idx /= side;
        }
        m
    }

    pub fn index(&self, m: &[i64]) -> Option<usize> {
        let mut idx = 0usize;
        for &x in m {
            if x.abs() > self.cutoff {
                return None;
            }
            idx = idx * self.side() + (x + self.cutoff) as usize;
        }
        Some(idx)
    }
}

/// All exponent vectors in [−cap, cap]^dim, first coordinate slowest; the zero vector is moved to the front.
pub fn exponents(dim: usize, cap: i64) -> Vec<Vec<i64>> {
    let lat = Lattice { dim, cutoff: cap };
    let mut all: Vec<Vec<i64>> = (0..lat.len()).map(|i| lat.coords(i)).collect();
    let zero = all.iter().position(|n| n.iter().all(|&x| x == 0)).expect("zero exponent");
    let z = all.remove(zero);
    all.insert(0, z);
    all
}

pub fn check_antisymmetric(theta: &[Vec<f64>], dim: usize) -> Result<()> {
    if theta.len() != dim || theta.iter().any(|r| r.len() != dim) {
        return Err(Error::Precondition(format!("θ must be {dim}×{dim}")));
    }
    for i in 0..dim {
        for j in 0..dim {
            if !theta[i][j].is_finite() || (theta[i][j] + theta[j][i]).abs() > 1e-12 {
                return Err(Error::Precondition("θ is not antisymmetric".into()));
            }
        }
    }
    Ok(())
}

/// (row, col, phase) entries of the compressed monomial u^n.
pub fn monomial_entries(lat: &Lattice, theta: &[Vec<f64>], n: &[i64]) -> Vec<(usize, usize, C64)> {
    let g = lat.dim;
    let mut out = Vec::new();
    for col in 0..lat.len() {
        let mut cur = lat.coords(col);
        let mut phase = 0.0;
        for j in (0..g).rev() {
            if n[j] == 0 {
                continue;
            }
            let s: f64 = ((j + 1)..g).map(|k| theta[j][k] * cur[k] as f64).sum();
            phase += n[j] as f64 * s;
            cur[j] += n[j];
        }
        if let Some(row) = lat.index(&cur) {
            out.push((row, col, C64::from_polar(1.0, 2.0 * PI * phase)));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::{sparse_from_triplets, sparse_to_dense};

    #[test]
    fn index_round_trip() {
        let lat = Lattice { dim: 3, cutoff: 2 };
        for i in 0..lat.len() {
            assert_eq!(lat.index(&lat.coords(i)), Some(i));
        }
        assert_eq!(lat.index(&[3, 0, 0]), None);
    }

    #[test]
    fn twisted_commutation_on_interior() {
        let theta = vec![vec![0.0, 0.3], vec![-0.3, 0.0]];
        let lat = Lattice { dim: 2, cutoff: 3 };
        let n = lat.len();
        let u1 = sparse_to_dense(&sparse_from_triplets(n, monomial_entries(&lat, &theta, &[1, 0])));
        let u2 = sparse_to_dense(&sparse_from_triplets(n, monomial_entries(&lat, &theta, &[0, 1])));
        let lhs = &u1 * &u2;
        let rhs = &u2 * &u1 * C64::from_polar(1.0, 2.0 * PI * 0.3);
        // Columns well inside the box see no truncation.
        let col = lat.index(&[0, 0]).unwrap();
        for r in 0..n {
            assert!((lhs[(r, col)] - rhs[(r, col)]).norm() < 1e-14);
        }
        let u12 = sparse_to_dense(&sparse_from_triplets(n, monomial_entries(&lat, &theta, &[1, 1])));
        assert!((u12[(lat.index(&[1, 1]).unwrap(), col)] - lhs[(lat.index(&[1, 1]).unwrap(), col)]).norm() < 1e-14);
    }
}
