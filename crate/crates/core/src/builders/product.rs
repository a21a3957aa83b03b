//! Products of an even model with another model: D⊗1 + γ⊗S.
//!
//! For the decomposed version the second factor is rotated into an eigenbasis of S, so
//! that the eigenspaces of S are coordinate blocks and carry integer sector labels.

use super::decomposed::{DecomposedParts, DecomposedTripleModel, ModelKind};
use crate::error::{Error, Result};
use crate::matrix::{
    self, c, dense_eigen, sparse_from_dense, sparse_identity, sparse_kron, sparse_to_dense, CMatrix, CVector,
    SparseMatrix, C64, ZERO,
};
use crate::operator::HermitianOperator;
use crate::qmetric::{quantum_diameter, DiameterParams, StateFunctional};
use crate::triple::SpectralTripleModel;

const GRADING_TOL: f64 = 1e-12;

/// Checks that γ is a self-adjoint unitary commuting with the algebra and anticommuting with D.
pub fn check_grading(model: &SpectralTripleModel) -> Result<SparseMatrix> {
    let g = model
        .grading()
        .ok_or_else(|| Error::Precondition("even model carries no grading".into()))?
        .clone();
    let n = model.hilbert_dim();
    let gd = sparse_to_dense(&g);
    if matrix::hermitian_defect(&gd) > GRADING_TOL {
        return Err(Error::Precondition("grading is not self-adjoint".into()));
    }
    if matrix::max_abs(&(&gd * &gd - CMatrix::identity(n, n))) > GRADING_TOL {
        return Err(Error::Precondition("grading is not unitary".into()));
    }
    for (i, b) in model.basis().iter().enumerate() {
        let comm = matrix::sparse_max_abs(&matrix::sparse_commutator(&g, b)?);
        if comm > GRADING_TOL * (1.0 + matrix::sparse_max_abs(b)) {
            return Err(Error::Precondition(format!("grading does not commute with algebra element {i}")));
        }
    }
    let d = model.dirac().matrix();
    let anti = matrix::sparse_max_abs(&(&(&g * d) + &(d * &g)));
    if anti > GRADING_TOL * (1.0 + matrix::sparse_max_abs(d)) {
        return Err(Error::Precondition("grading does not anticommute with the Dirac operator".into()));
    }
    Ok(g)
}

fn product_basis(a: &SpectralTripleModel, b: &[SparseMatrix]) -> Vec<SparseMatrix> {
    a.basis().iter().flat_map(|x| b.iter().map(move |y| sparse_kron(x, y))).collect()
}

/// The product triple (𝔄⊗𝔅, ℋ_A⊗ℋ_B, D⊗1 + γ⊗S) without a decomposition.
pub fn product_triple(even: &SpectralTripleModel, other: &SpectralTripleModel) -> Result<SpectralTripleModel> {
    let g = check_grading(even)?;
    let d = &sparse_kron(even.dirac().matrix(), &sparse_identity(other.hilbert_dim()))
        + &sparse_kron(&g, other.dirac().matrix());
    let dirac = HermitianOperator::new(matrix::drop_zeros(&d))?;
    SpectralTripleModel::new(
        format!("{} × {}", even.label(), other.label()),
        product_basis(even, other.basis()),
        dirac,
    )
}

/// Distinct eigenvalue clusters labelled 0 (kernel), 1, 2, … (positive) and −1, −2, … (negative).
pub(crate) fn cluster_labels(values: &[f64], tol: f64) -> Vec<i64> {
    let mut pos: Vec<f64> = Vec::new();
    let mut neg: Vec<f64> = Vec::new();
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    for &v in &sorted {
        if v >= tol && pos.last().map_or(true, |&l| v - l > tol) {
            pos.push(v);
        }
    }
    for &v in sorted.iter().rev() {
        if v <= -tol && neg.last().map_or(true, |&l| l - v > tol) {
            neg.push(v);
        }
    }
    values
        .iter()
        .map(|&v| {
            if v.abs() < tol {
                0
            } else if v > 0.0 {
                1 + pos.iter().rposition(|&p| v - p > -tol).unwrap_or(0) as i64
            } else {
                -1 - neg.iter().rposition(|&p| p - v > -tol).unwrap_or(0) as i64
            }
        })
        .collect()
}

/// Eigen-rotation of a Hermitian operator with kernel eigenvalues snapped to zero.
pub(crate) struct Rotation {
    pub values: Vec<f64>,
    pub frame: CMatrix,
    pub kernel_dim: usize,
    pub gap: f64,
}

pub(crate) fn rotate(op: &HermitianOperator) -> Result<Rotation> {
    let norm = op.norm();
    if norm == 0.0 {
        return Err(Error::VerticalGapUndefined);
    }
    let tol = 1e-9 * norm.max(1.0);
    let (mut values, frame) = dense_eigen(&op.to_dense());
    let mut kernel_dim = 0;
    for v in values.iter_mut() {
        if v.abs() < tol {
            *v = 0.0;
            kernel_dim += 1;
        }
    }
    if kernel_dim == 0 {
        return Err(Error::NoKernel);
    }
    let gap = values.iter().filter(|v| **v != 0.0).map(|v| v.abs()).fold(f64::INFINITY, f64::min);
    Ok(Rotation { values, frame, kernel_dim, gap })
}

pub(crate) fn conjugate(m: &SparseMatrix, w: &CMatrix) -> SparseMatrix {
    let r = w.adjoint() * sparse_to_dense(m) * w;
    let scale = matrix::max_abs(&r).max(1.0);
    sparse_from_dense(&r.map(|z| if z.norm() < 1e-15 * scale { ZERO } else { z }))
}

/// Product model with d_h = D⊗1, d_v = γ⊗S, base 𝔄⊗1 and E = id⊗μ for the normalized
/// trace μ on ker S. The averaging constant is the quantum diameter of (𝔅, S).
pub fn build_product_triple(even: &SpectralTripleModel, other: &SpectralTripleModel) -> Result<DecomposedTripleModel> {
    let g = check_grading(even)?;
    let rot = rotate(other.dirac())?;
    let nb_h = other.hilbert_dim();
    let w = &rot.frame;
    let s_diag = CMatrix::from_diagonal(&CVector::from_iterator(nb_h, rot.values.iter().map(|&v| c(v, 0.0))));
    let b_rot: Vec<SparseMatrix> = other.basis().iter().map(|b| conjugate(b, w)).collect();
    let id_b = sparse_identity(nb_h);
    let d_h = HermitianOperator::new(matrix::drop_zeros(&sparse_kron(even.dirac().matrix(), &id_b)))?;
    let d_v = HermitianOperator::new(matrix::drop_zeros(&sparse_kron(&g, &sparse_from_dense(&s_diag))))?;
    let dirac = HermitianOperator::new(d_h.matrix() + d_v.matrix())?;
    let total = SpectralTripleModel::new(
        format!("{} × {}", even.label(), other.label()),
        product_basis(even, &b_rot),
        dirac,
    )?;

    let na = even.basis_len();
    let nbb = other.basis_len();
    let nb = na * nbb;
    let beta = other.identity_coeffs();
    let base: Vec<CVector> = (0..na)
        .map(|i| {
            let mut v = CVector::zeros(nb);
            for j in 0..nbb {
                v[i * nbb + j] = beta[j];
            }
            v
        })
        .collect();
    // μ(b) = tr(P_ker b) / dim ker in the rotated frame, where P_ker is diagonal.
    let mu: Vec<C64> = b_rot
        .iter()
        .map(|b| {
            let mut acc = ZERO;
            for (r, col, v) in b.triplet_iter() {
                if r == col && rot.values[r] == 0.0 {
                    acc += *v;
                }
            }
            acc / c(rot.kernel_dim as f64, 0.0)
        })
        .collect();
    let mut expectation = CMatrix::zeros(nb, nb);
    for i in 0..na {
        for j in 0..nbb {
            for l in 0..nbb {
                expectation[(i * nbb + l, i * nbb + j)] = mu[j] * beta[l];
            }
        }
    }
    let tol = 1e-9 * rot.values.iter().fold(1.0_f64, |m, v| m.max(v.abs()));
    let s_labels = cluster_labels(&rot.values, tol);
    let na_h = even.hilbert_dim();
    let labels: Vec<Vec<i64>> = (0..na_h * nb_h).map(|i| vec![s_labels[i % nb_h]]).collect();
    let diameter = quantum_diameter(other, &DiameterParams::default())?.value;

    DecomposedTripleModel::new(DecomposedParts {
        kind: ModelKind::Product,
        total,
        d_h,
        d_v,
        base,
        sector_labels: Some(labels),
        expectation,
        group_dim: 1,
        group_diameter: diameter,
        vertical_gap: rot.gap,
        comparison_constant: 1.0,
        clifford: None,
        reliable_window: f64::INFINITY,
        fiber_length: None,
    })
}

/// Pulls a state on ℋ_A⊗ℋ_B into the frame of [`build_product_triple`].
pub fn product_frame(other: &SpectralTripleModel, na_h: usize) -> Result<CMatrix> {
    let rot = rotate(other.dirac())?;
    Ok(CMatrix::identity(na_h, na_h).kronecker(&rot.frame))
}

/// Product state φ⊗ψ expressed in the frame of [`build_product_triple`].
pub fn product_state(
    other: &SpectralTripleModel,
    phi: &StateFunctional,
    psi: &StateFunctional,
) -> Result<StateFunctional> {
    Ok(phi.tensor(psi).conjugate(&product_frame(other, phi.dim())?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builders::graph::{graph_model, two_point_model, GraphSpec};
    use crate::operator::hermitian_spectrum;

    /// spec(S) = {−2, 0, 2}: a two-point graph with edge length 1/2 and one kernel slot.
    fn s_model() -> SpectralTripleModel {
        graph_model(&GraphSpec::two_point(0.5).with_kernel_points(vec![0])).unwrap()
    }

    #[test]
    fn spectrum_is_square_sum() {
        let even = two_point_model(c(1.0, 0.0)).unwrap();
        let m = build_product_triple(&even, &s_model()).unwrap();
        let got = hermitian_spectrum(m.total().dirac());
        let r5 = 5f64.sqrt();
        let want = [-r5, -r5, -1.0, 1.0, r5, r5];
        for (x, y) in got.iter().zip(want) {
            assert!((x - y).abs() < 1e-12, "{got:?}");
        }
        assert_eq!(m.vertical_gap(), 2.0);
        let plain = product_triple(&even, &s_model()).unwrap();
        for (x, y) in hermitian_spectrum(plain.dirac()).iter().zip(want) {
            assert!((x - y).abs() < 1e-12);
        }
    }

    #[test]
    fn degenerate_inputs() {
        let even = two_point_model(c(1.0, 0.0)).unwrap();
        let zero = crate::builders::graph::scalar_model(&[0.0, 0.0]).unwrap();
        assert!(matches!(build_product_triple(&even, &zero), Err(Error::VerticalGapUndefined)));
        let no_kernel = two_point_model(c(1.0, 0.0)).unwrap();
        assert!(matches!(build_product_triple(&even, &no_kernel), Err(Error::NoKernel)));
        let odd = crate::builders::graph::scalar_model(&[1.0]).unwrap();
        assert!(build_product_triple(&odd, &s_model()).is_err());
    }

    #[test]
    fn commuting_base_element_has_zero_seminorm() {
        let even = two_point_model(c(1.0, 0.0)).unwrap();
        let m = build_product_triple(&even, &s_model()).unwrap();
        let id = m.total().element(m.base_coeffs()[0].clone() + &m.base_coeffs()[1]).unwrap();
        assert!(m.total().lip(id.matrix()).unwrap() < 1e-12);
    }

    #[test]
    fn cluster_labels_are_signed_ranks() {
        assert_eq!(cluster_labels(&[-2.0, 0.0, 1.0, 2.0, 1.0, -2.0], 1e-9), vec![-1, 0, 1, 2, 1, -1]);
    }
}
