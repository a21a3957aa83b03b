//! Spectral triples with a vertical/horizontal split.

use crate::error::{Error, Result};
use crate::matrix::{self, c, sparse_commutator, sparse_op_norm, CMatrix, CVector, SparseMatrix};
use crate::operator::{hermitian_spectrum, HermitianOperator};
use crate::triple::{AlgebraElement, SpectralTripleModel};

/// Which construction produced a model.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModelKind {
    Torus,
    CrossedProduct,
    CircleBundle,
    Product,
    PointCollapse,
    Custom,
}

/// D = Σ_j D_j γ_j with every operator lifted to the full Hilbert space.
#[derive(Debug, Clone)]
pub struct CliffordDecomposition {
    pub gammas: Vec<SparseMatrix>,
    pub components: Vec<SparseMatrix>,
    pub vertical: Vec<bool>,
}

impl CliffordDecomposition {
    pub fn len(&self) -> usize {
        self.gammas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gammas.is_empty()
    }

    /// Σ_{j∈F} D_j γ_j
    pub fn partial_dirac(&self, subset: &[usize]) -> SparseMatrix {
        let n = self.gammas[0].nrows();
        let mut acc = matrix::sparse_zero(n);
        for &j in subset {
            acc = &acc + &(&self.components[j] * &self.gammas[j]);
        }
        matrix::drop_zeros(&acc)
    }
}

/// All parts of a decomposed model. Builders fill this in; `DecomposedTripleModel::new` checks it.
#[derive(Debug, Clone)]
pub struct DecomposedParts {
    pub kind: ModelKind,
    pub total: SpectralTripleModel,
    pub d_h: HermitianOperator,
    pub d_v: HermitianOperator,
    /// Linearly independent coefficient vectors (in the total basis) spanning the base algebra,
    /// which contains the identity.
    pub base: Vec<CVector>,
    pub sector_labels: Option<Vec<Vec<i64>>>,
    /// Conditional expectation as a map on coefficient vectors.
    pub expectation: CMatrix,
    pub group_dim: usize,
    pub group_diameter: f64,
    pub vertical_gap: f64,
    pub comparison_constant: f64,
    pub clifford: Option<CliffordDecomposition>,
    /// Largest window on which truncation leaves the spectrum intact (∞ if untruncated).
    pub reliable_window: f64,
    pub fiber_length: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct DecomposedTripleModel {
    parts: DecomposedParts,
    base_matrices: Vec<SparseMatrix>,
}

const BASE_COMMUTE_TOL: f64 = 1e-10;

impl DecomposedTripleModel {
    /// Builds and self-checks; any violated invariant is an error.
    pub fn new(parts: DecomposedParts) -> Result<Self> {
        let model = Self::new_unchecked(parts)?;
        let violations = model.invariant_violations();
        if !violations.is_empty() {
            return Err(Error::InvalidModel(violations.join("; ")));
        }
        Ok(model)
    }

    /// Structural checks only (shapes, d_h + d_v = D). Used for audit fixtures.
    pub fn new_unchecked(parts: DecomposedParts) -> Result<Self> {
        let n = parts.total.hilbert_dim();
        for op in [&parts.d_h, &parts.d_v] {
            if op.dim() != n {
                return Err(Error::DimensionMismatch { expected: n, got: op.dim() });
            }
        }
        let nb = parts.total.basis_len();
        if parts.expectation.nrows() != nb || parts.expectation.ncols() != nb {
            return Err(Error::DimensionMismatch { expected: nb, got: parts.expectation.nrows() });
        }
        if parts.base.is_empty() {
            return Err(Error::InvalidModel("empty base algebra".into()));
        }
        if let Some(labels) = &parts.sector_labels {
            if labels.len() != n {
                return Err(Error::DimensionMismatch { expected: n, got: labels.len() });
            }
        }
        if !(parts.vertical_gap > 0.0) {
            return Err(Error::VerticalGapUndefined);
        }
        let sum = parts.d_h.matrix() + parts.d_v.matrix();
        let diff = &sum - parts.total.dirac().matrix();
        if matrix::sparse_max_abs(&diff) != 0.0 {
            return Err(Error::InvalidModel("d_h + d_v differs from the Dirac operator".into()));
        }
        let base_matrices = parts
            .base
            .iter()
            .map(|b| parts.total.element(b.clone()).map(|e| e.matrix().clone()))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { parts, base_matrices })
    }

    pub fn invariant_violations(&self) -> Vec<String> {
        let mut out = Vec::new();
        let p = &self.parts;
        for (i, b) in self.base_matrices.iter().enumerate() {
            let comm = sparse_commutator(p.d_v.matrix(), b).map(|m| sparse_op_norm(&m)).unwrap_or(f64::INFINITY);
            if comm > BASE_COMMUTE_TOL {
                out.push(format!("d_v does not commute with base element {i} (norm {comm:.3e})"));
            }
        }
        let tol = self.kernel_tol();
        let spec = hermitian_spectrum(&p.d_v);
        let zeros = spec.iter().filter(|v| v.abs() < tol).count();
        if zeros == 0 {
            out.push("0 is not an eigenvalue of d_v".into());
        }
        if let Some(v) = spec.iter().find(|v| v.abs() >= tol && v.abs() < p.vertical_gap * (1.0 - 1e-12)) {
            out.push(format!("d_v eigenvalue {v:.6e} inside the gap {:.6e}", p.vertical_gap));
        }
        if let Some(labels) = &p.sector_labels {
            let zero_idx: Vec<usize> = (0..labels.len()).filter(|&i| labels[i].iter().all(|&k| k == 0)).collect();
            if zero_idx.len() != zeros {
                out.push(format!("sector 0 has {} states but ker d_v has dimension {zeros}", zero_idx.len()));
            }
            let dv = p.d_v.matrix();
            let leaks = zero_idx.iter().any(|&i| dv.row(i).values().iter().any(|v| v.norm() > tol));
            if leaks {
                out.push("sector 0 is not contained in ker d_v".into());
            }
        }
        for (i, b) in p.base.iter().enumerate() {
            let e = &p.expectation * b;
            if (e - b).norm() > 1e-10 * b.norm().max(1.0) {
                out.push(format!("expectation does not fix base element {i}"));
            }
        }
        out
    }

    pub fn kind(&self) -> ModelKind {
        self.parts.kind
    }

    pub fn total(&self) -> &SpectralTripleModel {
        &self.parts.total
    }

    pub fn d_h(&self) -> &HermitianOperator {
        &self.parts.d_h
    }

    pub fn d_v(&self) -> &HermitianOperator {
        &self.parts.d_v
    }

    pub fn base_coeffs(&self) -> &[CVector] {
        &self.parts.base
    }

    pub fn base_matrices(&self) -> &[SparseMatrix] {
        &self.base_matrices
    }

    pub fn sector_labels(&self) -> Option<&[Vec<i64>]> {
        self.parts.sector_labels.as_deref()
    }

    pub fn group_dim(&self) -> usize {
        self.parts.group_dim
    }

    pub fn group_diameter(&self) -> f64 {
        self.parts.group_diameter
    }

    /// k = dim(G)·diam, the constant of the averaging bound ‖a − E(a)‖ ≤ k‖[d_v, a]‖.
    pub fn mvt_constant(&self) -> f64 {
        self.parts.group_dim as f64 * self.parts.group_diameter
    }

    pub fn vertical_gap(&self) -> f64 {
        self.parts.vertical_gap
    }

    pub fn comparison_constant(&self) -> f64 {
        self.parts.comparison_constant
    }

    pub fn clifford(&self) -> Option<&CliffordDecomposition> {
        self.parts.clifford.as_ref()
    }

    pub fn reliable_window(&self) -> f64 {
        self.parts.reliable_window
    }

    pub fn fiber_length(&self) -> Option<f64> {
        self.parts.fiber_length
    }

    pub fn hilbert_dim(&self) -> usize {
        self.parts.total.hilbert_dim()
    }

    /// Default kernel tolerance 1e-9·max(1, ‖d_v‖).
    pub fn kernel_tol(&self) -> f64 {
        1e-9 * self.parts.d_v.norm().max(1.0)
    }

    pub fn expectation_coeffs(&self, coeffs: &CVector) -> CVector {
        &self.parts.expectation * coeffs
    }

    pub fn expectation(&self, a: &AlgebraElement) -> AlgebraElement {
        self.parts.total.element(self.expectation_coeffs(a.coeffs())).expect("expectation coefficients")
    }

    /// Default spectral window: the reliable window if finite, else 1 + ‖d_h‖.
    pub fn default_window(&self) -> f64 {
        if self.parts.reliable_window.is_finite() {
            self.parts.reliable_window
        } else {
            1.0 + self.parts.d_h.norm()
        }
    }
}

/// Unit coefficient vectors for the given indices.
pub(crate) fn unit_vectors(nb: usize, idx: impl IntoIterator<Item = usize>) -> Vec<CVector> {
    idx.into_iter()
        .map(|i| {
            let mut v = CVector::zeros(nb);
            v[i] = c(1.0, 0.0);
            v
        })
        .collect()
}

/// Diagonal coefficient projection keeping the listed indices.
pub(crate) fn diagonal_expectation(nb: usize, keep: &[bool]) -> CMatrix {
    CMatrix::from_fn(nb, nb, |i, j| if i == j && keep[i] { c(1.0, 0.0) } else { c(0.0, 0.0) })
}
