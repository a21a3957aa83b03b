//! Collapse of a whole model to a point: d_h = 0 and d_v = D.

use super::decomposed::{DecomposedParts, DecomposedTripleModel, ModelKind};
use super::product::{cluster_labels, conjugate, rotate};
use crate::error::{Error, Result};
use crate::matrix::{c, sparse_from_dense, CMatrix, CVector};
use crate::operator::HermitianOperator;
use crate::qmetric::{quantum_diameter, DiameterParams, StateFunctional};
use crate::triple::SpectralTripleModel;

/// Rotates the model into an eigenbasis of D, takes the scalars as base and E(a) = μ(a)·1.
/// The averaging constant is the quantum diameter of the model.
pub fn build_point_collapse(model: &SpectralTripleModel, mu: &StateFunctional) -> Result<DecomposedTripleModel> {
    if mu.dim() != model.hilbert_dim() {
        return Err(Error::DimensionMismatch { expected: model.hilbert_dim(), got: mu.dim() });
    }
    let rot = rotate(model.dirac())?;
    let n = model.hilbert_dim();
    let w = &rot.frame;
    let basis = model.basis().iter().map(|b| conjugate(b, w)).collect();
    let d = CMatrix::from_diagonal(&CVector::from_iterator(n, rot.values.iter().map(|&v| c(v, 0.0))));
    let d_v = HermitianOperator::new(sparse_from_dense(&d))?;
    let d_h = HermitianOperator::zero(n);
    let mut total = SpectralTripleModel::new(format!("point collapse of {}", model.label()), basis, d_v.clone())?;
    if let Some(g) = model.graph() {
        total = total.with_graph(g.clone())?;
    }
    let nb = model.basis_len();
    let id = total.identity_coeffs().clone();
    let weights: Vec<_> = model.basis().iter().map(|b| mu.evaluate(b)).collect();
    let expectation = CMatrix::from_fn(nb, nb, |i, j| id[i] * weights[j]);
    let tol = 1e-9 * rot.values.iter().fold(1.0_f64, |m, v| m.max(v.abs()));
    let labels = cluster_labels(&rot.values, tol).into_iter().map(|k| vec![k]).collect();
    let diameter = quantum_diameter(model, &DiameterParams::default())?.value;

    DecomposedTripleModel::new(DecomposedParts {
        kind: ModelKind::PointCollapse,
        total,
        d_h,
        d_v,
        base: vec![id],
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

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builders::graph::{graph_model, scalar_model, GraphSpec};
    use crate::operator::hermitian_spectrum;

    #[test]
    fn kernel_of_dimension_two() {
        let m = scalar_model(&[-1.0, 0.0, 0.0, 2.0]).unwrap();
        let mu = StateFunctional::basis_vector(4, 1).unwrap();
        let pc = build_point_collapse(&m, &mu).unwrap();
        assert_eq!(pc.vertical_gap(), 1.0);
        let zeros = hermitian_spectrum(pc.d_v()).iter().filter(|v| **v == 0.0).count();
        assert_eq!(zeros, 2);
        assert_eq!(pc.base_coeffs().len(), 1);
    }

    #[test]
    fn degenerate_inputs() {
        let pos = scalar_model(&[1.0, 2.0]).unwrap();
        let mu = StateFunctional::basis_vector(2, 0).unwrap();
        assert!(matches!(build_point_collapse(&pos, &mu), Err(Error::NoKernel)));
        let one = scalar_model(&[0.0]).unwrap();
        let mu = StateFunctional::basis_vector(1, 0).unwrap();
        assert!(matches!(build_point_collapse(&one, &mu), Err(Error::VerticalGapUndefined)));
    }

    #[test]
    fn graph_fixture_uses_exact_diameter() {
        let m = graph_model(&GraphSpec::two_point(1.0).with_kernel_points(vec![0, 1])).unwrap();
        let mu = StateFunctional::point(&m, 0).unwrap();
        let pc = build_point_collapse(&m, &mu).unwrap();
        assert_eq!(pc.mvt_constant(), 1.0);
        let e = pc.expectation(&pc.total().basis_element(1));
        assert!(e.coeffs().norm() < 1e-12);
    }
}
