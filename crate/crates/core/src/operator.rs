//! Hermitian operators in sparse storage.

use crate::error::{Error, Result};
use crate::matrix::{
    self, c, components, dense_eigen, dense_spectrum, hermitian_tol, sparse_block, CMatrix, CVector,
    SparseMatrix, C64,
};

/// A validated Hermitian matrix.
#[derive(Debug, Clone)]
pub struct HermitianOperator {
    matrix: SparseMatrix,
}

/// Eigenpairs of one connected block of an operator.
#[derive(Debug, Clone)]
pub struct BlockEigen {
    pub indices: Vec<usize>,
    pub values: Vec<f64>,
    pub vectors: CMatrix,
}

impl HermitianOperator {
    pub fn new(matrix: SparseMatrix) -> Result<Self> {
        if matrix.nrows() != matrix.ncols() {
            return Err(Error::DimensionMismatch { expected: matrix.nrows(), got: matrix.ncols() });
        }
        if matrix.nrows() == 0 {
            return Err(Error::InvalidModel("operator dimension must be positive".into()));
        }
        if !matrix::is_finite_sparse(&matrix) {
            return Err(Error::NonFinite("Hermitian operator"));
        }
        let tol = hermitian_tol(matrix::sparse_max_abs(&matrix));
        let defect = matrix::sparse_hermitian_defect(&matrix);
        if defect > tol {
            return Err(Error::NotHermitian { defect, tol });
        }
        Ok(Self { matrix: matrix::drop_zeros(&matrix) })
    }

    pub fn from_dense(m: &CMatrix) -> Result<Self> {
        Self::new(matrix::sparse_from_dense(m))
    }

    pub fn zero(n: usize) -> Self {
        Self { matrix: matrix::sparse_zero(n) }
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &SparseMatrix {
        &self.matrix
    }

    pub fn to_dense(&self) -> CMatrix {
        matrix::sparse_to_dense(&self.matrix)
    }

    /// a·self + b·other
    pub fn combine(&self, a: f64, other: &HermitianOperator, b: f64) -> Result<Self> {
        if other.dim() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), got: other.dim() });
        }
        let m = matrix::sparse_combination(
            self.dim(),
            [(c(a, 0.0), &self.matrix), (c(b, 0.0), &other.matrix)],
        );
        Ok(Self { matrix: m })
    }

    pub fn norm(&self) -> f64 {
        matrix::sparse_op_norm(&self.matrix)
    }

    pub fn apply(&self, x: &CVector) -> CVector {
        matrix::sparse_mul_vec(&self.matrix, x)
    }

    /// Eigendecomposition by connected blocks of the nonzero pattern.
    pub fn block_eigen(&self) -> Vec<BlockEigen> {
        components(&self.matrix)
            .into_iter()
            .map(|idx| {
                let block = sparse_block(&self.matrix, &idx);
                let (values, vectors) = dense_eigen(&block);
                BlockEigen { indices: idx, values, vectors }
            })
            .collect()
    }

    /// exp(i t H) X for a dense block of columns X.
    pub fn exp_i_t_apply(&self, t: f64, x: &CMatrix) -> CMatrix {
        assert_eq!(x.nrows(), self.dim());
        let mut out = CMatrix::zeros(x.nrows(), x.ncols());
        for be in self.block_eigen() {
            let n = be.indices.len();
            let xb = CMatrix::from_fn(n, x.ncols(), |r, k| x[(be.indices[r], k)]);
            let coeff = be.vectors.adjoint() * xb;
            let phases = CMatrix::from_fn(n, x.ncols(), |r, k| {
                C64::from_polar(1.0, t * be.values[r]) * coeff[(r, k)]
            });
            let yb = &be.vectors * phases;
            for (r, &i) in be.indices.iter().enumerate() {
                for k in 0..x.ncols() {
                    out[(i, k)] = yb[(r, k)];
                }
            }
        }
        out
    }
}

/// Ascending eigenvalues with multiplicity.
pub fn hermitian_spectrum(h: &HermitianOperator) -> Vec<f64> {
    let mut all = Vec::with_capacity(h.dim());
    for idx in components(h.matrix()) {
        let block = sparse_block(h.matrix(), &idx);
        all.extend(dense_spectrum(&block));
    }
    all.sort_by(f64::total_cmp);
    all
}

/// ‖ξ‖ + ‖Dξ‖
pub fn graph_norm(d: &HermitianOperator, xi: &CVector) -> Result<f64> {
    if xi.len() != d.dim() {
        return Err(Error::DimensionMismatch { expected: d.dim(), got: xi.len() });
    }
    Ok(xi.norm() + d.apply(xi).norm())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::{ONE, ZERO};

    fn diag(v: &[f64]) -> HermitianOperator {
        let n = v.len();
        HermitianOperator::new(matrix::sparse_from_triplets(
            n,
            v.iter().enumerate().map(|(i, &x)| (i, i, c(x, 0.0))),
        ))
        .unwrap()
    }

    #[test]
    fn spectrum_examples() {
        assert_eq!(hermitian_spectrum(&diag(&[0.0, 1.0, -1.0])), vec![-1.0, 0.0, 1.0]);
        let x = HermitianOperator::from_dense(&CMatrix::from_row_slice(2, 2, &[ZERO, ONE, ONE, ZERO])).unwrap();
        let s = hermitian_spectrum(&x);
        assert!((s[0] + 1.0).abs() < 1e-15 && (s[1] - 1.0).abs() < 1e-15);
        assert_eq!(hermitian_spectrum(&HermitianOperator::zero(4)), vec![0.0; 4]);
    }

    #[test]
    fn rejects_non_hermitian() {
        let m = CMatrix::from_row_slice(2, 2, &[ZERO, ONE, ZERO, ZERO]);
        assert!(matches!(HermitianOperator::from_dense(&m), Err(Error::NotHermitian { .. })));
        let tiny = CMatrix::from_row_slice(2, 2, &[ZERO, ONE, c(1.0 + 1e-14, 0.0), ZERO]);
        assert!(HermitianOperator::from_dense(&tiny).is_ok());
    }

    #[test]
    fn graph_norm_examples() {
        let d = diag(&[0.0, 2.0]);
        assert_eq!(graph_norm(&d, &CVector::zeros(2)).unwrap(), 0.0);
        assert_eq!(graph_norm(&d, &CVector::from_vec(vec![ONE, ZERO])).unwrap(), 1.0);
        assert_eq!(graph_norm(&d, &CVector::from_vec(vec![ZERO, ONE])).unwrap(), 3.0);
        assert!(graph_norm(&d, &CVector::zeros(3)).is_err());
    }

    #[test]
    fn exp_of_diagonal() {
        let d = diag(&[1.0, 2.0]);
        let e = d.exp_i_t_apply(std::f64::consts::PI, &CMatrix::identity(2, 2));
        assert!((e[(0, 0)] + ONE).norm() < 1e-14);
        assert!((e[(1, 1)] - ONE).norm() < 1e-14);
    }
}
