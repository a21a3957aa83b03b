//! 2×2 block model of a collapsing circle bundle.
//!
//! For base eigenvalue μ_j and fiber charge k the Dirac operator at fiber scale ℓε
//! restricts to [[μ_j, −ik/(ℓε)], [ik/(ℓε), −μ_j]] = μ_j σ_z + (k/(ℓε)) σ_y.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::clifford::{pauli_y, pauli_z};
use super::decomposed::{
    diagonal_expectation, unit_vectors, CliffordDecomposition, DecomposedParts, DecomposedTripleModel, ModelKind,
};
use super::lattice::exponents;
use crate::error::{Error, Result};
use crate::matrix::{c, drop_zeros, sparse_from_dense, sparse_from_triplets, sparse_identity, sparse_kron, CMatrix, SparseMatrix};
use crate::operator::{hermitian_spectrum, HermitianOperator};
use crate::triple::SpectralTripleModel;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CircleBundleParams {
    pub mu: Vec<f64>,
    pub ell: f64,
    pub k_min: i64,
    pub k_max: i64,
}

#[derive(Debug, Clone)]
pub struct CircleBundleBlockModel {
    pub mu: Vec<f64>,
    pub ell: f64,
    pub k_min: i64,
    pub k_max: i64,
}

pub fn build_circle_bundle_blocks(mu: &[f64], ell: f64, k_min: i64, k_max: i64) -> Result<CircleBundleBlockModel> {
    if mu.is_empty() {
        return Err(Error::Precondition("empty μ list".into()));
    }
    if !(ell > 0.0 && ell.is_finite()) {
        return Err(Error::Precondition(format!("ℓ must be positive, got {ell}")));
    }
    if k_min > k_max {
        return Err(Error::Precondition("empty k range".into()));
    }
    if mu.iter().any(|m| !m.is_finite()) {
        return Err(Error::NonFinite("μ list"));
    }
    Ok(CircleBundleBlockModel { mu: mu.to_vec(), ell, k_min, k_max })
}

impl CircleBundleBlockModel {
    pub fn from_params(p: &CircleBundleParams) -> Result<Self> {
        build_circle_bundle_blocks(&p.mu, p.ell, p.k_min, p.k_max)
    }

    pub fn ks(&self) -> impl Iterator<Item = i64> {
        self.k_min..=self.k_max
    }

    pub fn block_count(&self) -> usize {
        self.mu.len() * (self.k_max - self.k_min + 1) as usize
    }

    /// Block (j, k) at parameter ε.
    pub fn block(&self, j: usize, k: i64, eps: f64) -> CMatrix {
        let mu = self.mu[j];
        let t = k as f64 / (self.ell * eps);
        CMatrix::from_row_slice(2, 2, &[c(mu, 0.0), c(0.0, -t), c(0.0, t), c(-mu, 0.0)])
    }

    /// Numerically computed eigenvalues of block (j, k), ascending.
    pub fn eigenvalues(&self, j: usize, k: i64, eps: f64) -> Result<[f64; 2]> {
        let h = HermitianOperator::from_dense(&self.block(j, k, eps))?;
        let s = hermitian_spectrum(&h);
        Ok([s[0], s[1]])
    }

    /// ±√((k/ℓε)² + μ_j²)
    pub fn closed_form(&self, j: usize, k: i64, eps: f64) -> [f64; 2] {
        let t = k as f64 / (self.ell * eps);
        let r = t.hypot(self.mu[j]);
        [-r, r]
    }

    /// Half the smallest eigenvalue magnitude of the boundary charges k_min, k_max at ε = 1
    /// (∞ when the range is {0}).
    pub fn reliable_window(&self) -> f64 {
        [self.k_min, self.k_max]
            .into_iter()
            .filter(|&k| k != 0)
            .flat_map(|k| self.mu.iter().map(move |m| (k as f64 / self.ell).hypot(*m)))
            .fold(f64::INFINITY, f64::min)
            / 2.0
    }

    /// Assembles the blocks into one decomposed model on C^J ⊗ ℓ²(k range) ⊗ C².
    pub fn assemble(&self) -> Result<DecomposedTripleModel> {
        if self.k_min > 0 || self.k_max < 0 {
            return Err(Error::NoKernel);
        }
        if self.k_min == 0 && self.k_max == 0 {
            return Err(Error::VerticalGapUndefined);
        }
        let nj = self.mu.len();
        let nk = (self.k_max - self.k_min + 1) as usize;
        let n = nj * nk * 2;
        let kval = |i: usize| self.k_min + i as i64;
        let mu_op = sparse_from_triplets(nj, self.mu.iter().enumerate().map(|(j, &m)| (j, j, c(m, 0.0))));
        let z_op = sparse_from_triplets(nk, (0..nk).map(|i| (i, i, c(kval(i) as f64 / self.ell, 0.0))));
        let (id_j, id_k, id_s) = (sparse_identity(nj), sparse_identity(nk), sparse_identity(2));
        let lift = |a: &SparseMatrix, b: &SparseMatrix, s: &SparseMatrix| sparse_kron(&sparse_kron(a, b), s);
        let gammas = vec![lift(&id_j, &id_k, &sparse_from_dense(&pauli_z())), lift(&id_j, &id_k, &sparse_from_dense(&pauli_y()))];
        let components = vec![lift(&mu_op, &id_k, &id_s), lift(&id_j, &z_op, &id_s)];
        let d_h = HermitianOperator::new(drop_zeros(&(&components[0] * &gammas[0])))?;
        let d_v = HermitianOperator::new(drop_zeros(&(&components[1] * &gammas[1])))?;
        let dirac = HermitianOperator::new(d_h.matrix() + d_v.matrix())?;

        // Truncated shifts in k.
        let exps = exponents(1, 1);
        let basis: Vec<SparseMatrix> = exps
            .iter()
            .map(|e| {
                let s = sparse_from_triplets(
                    nk,
                    (0..nk).filter_map(|i| {
                        let t = i as i64 + e[0];
                        (t >= 0 && (t as usize) < nk).then(|| (t as usize, i, c(1.0, 0.0)))
                    }),
                );
                lift(&id_j, &s, &id_s)
            })
            .collect();
        let nb = basis.len();
        let keep: Vec<bool> = exps.iter().map(|e| e[0] == 0).collect();
        let total = SpectralTripleModel::new(format!("circle bundle ({nj} base modes, k {}..{})", self.k_min, self.k_max), basis, dirac)?;
        let labels = (0..n).map(|i| vec![kval((i / 2) % nk)]).collect();
        let boundary_window = self.reliable_window();
        DecomposedTripleModel::new(DecomposedParts {
            kind: ModelKind::CircleBundle,
            total,
            d_h,
            d_v,
            base: unit_vectors(nb, (0..nb).filter(|&i| keep[i])),
            sector_labels: Some(labels),
            expectation: diagonal_expectation(nb, &keep),
            group_dim: 1,
            group_diameter: PI * self.ell,
            vertical_gap: 1.0 / self.ell,
            comparison_constant: 1.0,
            clifford: Some(CliffordDecomposition { gammas, components, vertical: vec![false, true] }),
            reliable_window: boundary_window,
            fiber_length: Some(self.ell),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn block_examples() {
        let m = build_circle_bundle_blocks(&[1.0, 3.0, 2.0], 1.0, -3, 3).unwrap();
        let e = m.eigenvalues(0, 0, 0.37).unwrap();
        assert!((e[0] + 1.0).abs() < 1e-15 && (e[1] - 1.0).abs() < 1e-15);
        let e = m.eigenvalues(1, 1, 0.5).unwrap();
        assert!((e[1] - 13f64.sqrt()).abs() < 1e-14);
        assert!((e[1] - 3.605551).abs() < 1e-6);
        let e = m.eigenvalues(2, 3, 0.01).unwrap();
        assert!((e[1] - 300.006_666_592_6).abs() < 1e-6);
        assert!((0.01 * e[1] - 3.000_066_665_926).abs() < 1e-9);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(build_circle_bundle_blocks(&[], 1.0, 0, 1).is_err());
        assert!(build_circle_bundle_blocks(&[1.0], 0.0, 0, 1).is_err());
    }

    #[test]
    fn assembled_spectrum_matches_blocks() {
        let m = build_circle_bundle_blocks(&[1.0, -2.0], 0.5, -2, 2).unwrap();
        let a = m.assemble().unwrap();
        let mut want: Vec<f64> = Vec::new();
        for j in 0..2 {
            for k in m.ks() {
                want.extend(m.closed_form(j, k, 1.0));
            }
        }
        want.sort_by(f64::total_cmp);
        let got = hermitian_spectrum(a.total().dirac());
        for (x, y) in got.iter().zip(&want) {
            assert!((x - y).abs() < 1e-12);
        }
    }
}
