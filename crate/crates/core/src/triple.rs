//! Finite spectral triples and elements of their algebras.

use nalgebra::Cholesky;

use crate::error::{Error, Result};
use crate::matrix::{
    self, c, frobenius_inner, sparse_adjoint, sparse_combination, sparse_commutator, sparse_identity,
    sparse_op_norm, CMatrix, CVector, SparseMatrix, C64, ONE,
};
use crate::operator::HermitianOperator;

/// Commutative point model data: basis element `i` is the indicator of point `i`.
#[derive(Debug, Clone, PartialEq)]
pub struct GraphStructure {
    pub n_points: usize,
    /// (i, j, length)
    pub edges: Vec<(usize, usize, f64)>,
}

/// A *-algebra of matrices (given by a basis) with a Dirac operator.
#[derive(Debug, Clone)]
pub struct SpectralTripleModel {
    label: String,
    basis: Vec<SparseMatrix>,
    dirac: HermitianOperator,
    gram: CMatrix,
    gram_chol: Cholesky<C64, nalgebra::Dyn>,
    identity_coeffs: CVector,
    adjoint_map: CMatrix,
    graph: Option<GraphStructure>,
    grading: Option<SparseMatrix>,
}

/// Element of a model algebra. Coefficients are authoritative; the matrix is a cache.
#[derive(Debug, Clone)]
pub struct AlgebraElement {
    coeffs: CVector,
    matrix: SparseMatrix,
}

impl AlgebraElement {
    pub fn coeffs(&self) -> &CVector {
        &self.coeffs
    }

    pub fn matrix(&self) -> &SparseMatrix {
        &self.matrix
    }

    pub fn to_dense(&self) -> CMatrix {
        matrix::sparse_to_dense(&self.matrix)
    }

    pub fn norm(&self) -> f64 {
        sparse_op_norm(&self.matrix)
    }
}

const GRAM_RCOND: f64 = 1e-12;
const SPAN_TOL: f64 = 1e-10;

impl SpectralTripleModel {
    pub fn new(label: impl Into<String>, basis: Vec<SparseMatrix>, dirac: HermitianOperator) -> Result<Self> {
        let n = dirac.dim();
        if basis.is_empty() {
            return Err(Error::InvalidModel("empty algebra basis".into()));
        }
        for b in &basis {
            if b.nrows() != n || b.ncols() != n {
                return Err(Error::DimensionMismatch { expected: n, got: b.nrows() });
            }
            if !matrix::is_finite_sparse(b) {
                return Err(Error::NonFinite("algebra basis"));
            }
        }
        let nb = basis.len();
        let gram = CMatrix::from_fn(nb, nb, |i, j| frobenius_inner(&basis[i], &basis[j]));
        let gram = (&gram + gram.adjoint()) * c(0.5, 0.0);
        let ev = gram.symmetric_eigenvalues();
        let (lo, hi) = ev.iter().fold((f64::INFINITY, 0.0_f64), |(l, h), &v| (l.min(v), h.max(v)));
        if !(lo > GRAM_RCOND * hi) {
            return Err(Error::InvalidModel(format!(
                "algebra basis is linearly dependent (Gram eigenvalues {lo:.3e} / {hi:.3e})"
            )));
        }
        let gram_chol = Cholesky::new(gram.clone()).ok_or_else(|| Error::InvalidModel("Gram matrix not positive".into()))?;
        let mut model = Self {
            label: label.into(),
            basis,
            dirac,
            gram,
            gram_chol,
            identity_coeffs: CVector::zeros(0),
            adjoint_map: CMatrix::zeros(0, 0),
            graph: None,
            grading: None,
        };
        let (id, res) = model.project(&sparse_identity(n));
        if res > SPAN_TOL * (n as f64).sqrt() {
            return Err(Error::InvalidModel(format!("identity is not in the algebra span (residual {res:.3e})")));
        }
        model.identity_coeffs = id;
        let mut adj = CMatrix::zeros(nb, nb);
        for i in 0..nb {
            let bi = sparse_adjoint(&model.basis[i]);
            let scale = matrix::sparse_frobenius(&bi).max(1.0);
            let (col, res) = model.project(&bi);
            if res > SPAN_TOL * scale {
                return Err(Error::InvalidModel(format!(
                    "algebra basis is not closed under adjoint (element {i}, residual {res:.3e})"
                )));
            }
            adj.set_column(i, &col);
        }
        model.adjoint_map = adj;
        Ok(model)
    }

    pub fn with_graph(mut self, graph: GraphStructure) -> Result<Self> {
        if graph.n_points != self.basis.len() {
            return Err(Error::InvalidModel("graph point count differs from basis size".into()));
        }
        self.graph = Some(graph);
        Ok(self)
    }

    pub fn with_grading(mut self, gamma: SparseMatrix) -> Self {
        self.grading = Some(gamma);
        self
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn hilbert_dim(&self) -> usize {
        self.dirac.dim()
    }

    pub fn basis(&self) -> &[SparseMatrix] {
        &self.basis
    }

    pub fn basis_len(&self) -> usize {
        self.basis.len()
    }

    pub fn dirac(&self) -> &HermitianOperator {
        &self.dirac
    }

    /// Frobenius Gram matrix tr(B_i* B_j) of the basis.
    pub fn gram(&self) -> &CMatrix {
        &self.gram
    }

    pub fn graph(&self) -> Option<&GraphStructure> {
        self.graph.as_ref()
    }

    pub fn grading(&self) -> Option<&SparseMatrix> {
        self.grading.as_ref()
    }

    pub fn identity_coeffs(&self) -> &CVector {
        &self.identity_coeffs
    }

    /// Orthogonal projection of `m` onto the span: coefficients and Frobenius residual.
    pub fn project(&self, m: &SparseMatrix) -> (CVector, f64) {
        let nb = self.basis.len();
        let rhs = CVector::from_fn(nb, |j, _| frobenius_inner(&self.basis[j], m));
        let coeffs = self.gram_chol.solve(&rhs);
        let recon = self.combine(&coeffs);
        let diff = &recon - m;
        (coeffs, matrix::sparse_frobenius(&diff))
    }

    fn combine(&self, coeffs: &CVector) -> SparseMatrix {
        sparse_combination(self.hilbert_dim(), coeffs.iter().copied().zip(self.basis.iter()))
    }

    pub fn element(&self, coeffs: CVector) -> Result<AlgebraElement> {
        if coeffs.len() != self.basis.len() {
            return Err(Error::DimensionMismatch { expected: self.basis.len(), got: coeffs.len() });
        }
        let matrix = self.combine(&coeffs);
        Ok(AlgebraElement { coeffs, matrix })
    }

    pub fn identity_element(&self) -> AlgebraElement {
        self.element(self.identity_coeffs.clone()).expect("identity coefficients")
    }

    pub fn basis_element(&self, i: usize) -> AlgebraElement {
        let mut v = CVector::zeros(self.basis.len());
        v[i] = ONE;
        self.element(v).expect("basis index")
    }

    /// Element whose matrix is `m`, which must lie in the span.
    pub fn element_from_matrix(&self, m: &SparseMatrix) -> Result<AlgebraElement> {
        let (coeffs, res) = self.project(m);
        let scale = matrix::sparse_frobenius(m).max(1.0);
        if res > SPAN_TOL * scale {
            return Err(Error::Precondition(format!("matrix is not in the algebra span (residual {res:.3e})")));
        }
        self.element(coeffs)
    }

    pub fn adjoint_coeffs(&self, coeffs: &CVector) -> CVector {
        &self.adjoint_map * coeffs.map(|z| z.conj())
    }

    pub fn adjoint(&self, a: &AlgebraElement) -> AlgebraElement {
        self.element(self.adjoint_coeffs(a.coeffs())).expect("adjoint coefficients")
    }

    /// (c + c*)/2 in coefficient space.
    pub fn self_adjoint_part(&self, coeffs: &CVector) -> CVector {
        (coeffs + self.adjoint_coeffs(coeffs)) * c(0.5, 0.0)
    }

    pub fn add_scalar(&self, a: &AlgebraElement, t: f64) -> AlgebraElement {
        self.element(a.coeffs() + &self.identity_coeffs * c(t, 0.0)).expect("shift")
    }

    pub fn lip(&self, m: &SparseMatrix) -> Result<f64> {
        Ok(sparse_op_norm(&sparse_commutator(self.dirac.matrix(), m)?))
    }
}

/// ‖[D, a]‖
pub fn lip_seminorm(model: &SpectralTripleModel, a: &AlgebraElement) -> Result<f64> {
    model.lip(a.matrix())
}

/// ‖[X, a]‖ for any operator X on the model space.
pub fn commutator_norm(x: &SparseMatrix, a: &SparseMatrix) -> Result<f64> {
    Ok(sparse_op_norm(&sparse_commutator(x, a)?))
}

/// Jordan product (ab + ba)/2 as a matrix.
pub fn jordan(a: &SparseMatrix, b: &SparseMatrix) -> SparseMatrix {
    let ab = a * b;
    let ba = b * a;
    matrix::sparse_scale(&(&ab + &ba), c(0.5, 0.0))
}

/// Diagonal model of C^n acting on itself with zero Dirac operator.
pub fn scalar_diagonal_basis(n: usize) -> Vec<SparseMatrix> {
    (0..n)
        .map(|i| matrix::sparse_from_triplets(n, [(i, i, ONE)]))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::{sparse_from_dense, ZERO};

    fn two_point(kappa: f64) -> SpectralTripleModel {
        let d = CMatrix::from_row_slice(2, 2, &[ZERO, c(kappa, 0.0), c(kappa, 0.0), ZERO]);
        SpectralTripleModel::new("two-point", scalar_diagonal_basis(2), HermitianOperator::from_dense(&d).unwrap())
            .unwrap()
    }

    #[test]
    fn identity_has_zero_seminorm() {
        let m = two_point(2.0);
        assert_eq!(lip_seminorm(&m, &m.identity_element()).unwrap(), 0.0);
        let f = m.basis_element(0);
        assert!((lip_seminorm(&m, &f).unwrap() - 2.0).abs() < 1e-14);
    }

    #[test]
    fn rejects_bad_bases() {
        let d = HermitianOperator::zero(2);
        let only_e0 = vec![matrix::sparse_from_triplets(2, [(0, 0, ONE)])];
        assert!(SpectralTripleModel::new("x", only_e0, d.clone()).is_err());
        let dup = vec![sparse_identity(2), sparse_identity(2)];
        assert!(SpectralTripleModel::new("x", dup, d.clone()).is_err());
        let nilpotent = sparse_from_dense(&CMatrix::from_row_slice(2, 2, &[ZERO, ONE, ZERO, ZERO]));
        assert!(SpectralTripleModel::new("x", vec![sparse_identity(2), nilpotent], d).is_err());
    }

    #[test]
    fn dirac_in_commutative_span_has_zero_seminorm() {
        let d = HermitianOperator::from_dense(&CMatrix::from_diagonal(&CVector::from_vec(vec![
            c(1.0, 0.0),
            c(-2.0, 0.0),
            c(0.5, 0.0),
        ])))
        .unwrap();
        let m = SpectralTripleModel::new("diag", scalar_diagonal_basis(3), d.clone()).unwrap();
        let a = m.element_from_matrix(d.matrix()).unwrap();
        assert_eq!(lip_seminorm(&m, &a).unwrap(), 0.0);
    }
}
