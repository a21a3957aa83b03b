//! Real coordinates on the self-adjoint part of a model algebra modulo scalars.

use crate::error::{Error, Result};
use crate::matrix::{self, c, sparse_commutator, CMatrix, CVector, SparseMatrix, I};
use crate::qmetric::states::StateFunctional;
use crate::triple::SpectralTripleModel;

/// Self-adjoint elements S_k, orthonormal for Re tr(A*B) and orthogonal to 1,
/// with the Hermitian commutators C_k = i[D, S_k].
#[derive(Debug, Clone)]
pub struct RealParams {
    pub coeffs: Vec<CVector>,
    pub matrices: Vec<SparseMatrix>,
    pub commutators: Vec<SparseMatrix>,
}

const RANK_TOL: f64 = 1e-10;

impl RealParams {
    pub fn new(model: &SpectralTripleModel) -> Self {
        let nb = model.basis_len();
        let gram = model.gram();
        let inner = |a: &CVector, b: &CVector| (a.adjoint() * gram * b)[(0, 0)].re;
        let id = model.identity_coeffs().clone();
        let id_norm = inner(&id, &id).sqrt();
        let mut ortho: Vec<CVector> = vec![&id / c(id_norm, 0.0)];
        let mut out = Vec::new();
        for i in 0..nb {
            let mut e = CVector::zeros(nb);
            e[i] = c(1.0, 0.0);
            let adj = model.adjoint_coeffs(&e);
            let h = (&e + &adj) * c(0.5, 0.0);
            let k = (&e - &adj) * (-I * 0.5);
            let scale = inner(&e, &e).sqrt();
            for cand in [h, k] {
                let mut v = cand;
                for _ in 0..2 {
                    for o in &ortho {
                        let p = inner(o, &v);
                        v -= o * c(p, 0.0);
                    }
                }
                let nrm = inner(&v, &v).sqrt();
                if nrm > RANK_TOL * scale {
                    let v = v / c(nrm, 0.0);
                    ortho.push(v.clone());
                    out.push(v);
                }
            }
        }
        let matrices: Vec<SparseMatrix> =
            out.iter().map(|v| model.element(v.clone()).expect("coefficients").matrix().clone()).collect();
        let commutators = matrices
            .iter()
            .map(|s| {
                let comm = sparse_commutator(model.dirac().matrix(), s).expect("square");
                matrix::sparse_scale(&comm, I)
            })
            .collect();
        Self { coeffs: out, matrices, commutators }
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// (φ − ψ)(S_k)
    pub fn gradient(&self, phi: &StateFunctional, psi: &StateFunctional) -> Vec<f64> {
        self.matrices.iter().map(|s| (phi.evaluate(s) - psi.evaluate(s)).re).collect()
    }

    pub fn dense_commutators(&self) -> Vec<CMatrix> {
        self.commutators.iter().map(matrix::sparse_to_dense).collect()
    }

    /// Coefficient vector of Σ x_k S_k.
    pub fn combine(&self, x: &[f64]) -> CVector {
        let nb = self.coeffs.first().map(|v| v.len()).unwrap_or(0);
        let mut out = CVector::zeros(nb);
        for (v, &t) in self.coeffs.iter().zip(x) {
            out += v * c(t, 0.0);
        }
        out
    }
}

/// Errors unless the seminorm vanishes only on scalars.
pub fn check_metric(model: &SpectralTripleModel) -> Result<()> {
    let params = RealParams::new(model);
    let m = params.len();
    if m == 0 {
        return Ok(());
    }
    let g = nalgebra::DMatrix::<f64>::from_fn(m, m, |i, j| {
        matrix::frobenius_inner(&params.commutators[i], &params.commutators[j]).re
    });
    let ev = g.symmetric_eigenvalues();
    let lo = ev.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = ev.iter().cloned().fold(0.0, f64::max);
    if hi == 0.0 || lo <= 1e-10 * hi {
        return Err(Error::NotMetric(lo.max(0.0).sqrt()));
    }
    Ok(())
}
