//! Crossed products of a base model by Z^d.
//!
//! Hilbert space ℋ_B ⊗ ℓ²(‖z‖_∞ ≤ K) ⊗ spin, with d_h = D_B ⊗ 1 ⊗ γ_0 and
//! d_v = Σ_j 1 ⊗ Z_j ⊗ γ_j where Z_j multiplies by z_j.

use std::f64::consts::PI;

use super::clifford::make_clifford;
use super::decomposed::{
    diagonal_expectation, CliffordDecomposition, DecomposedParts, DecomposedTripleModel, ModelKind,
};
use super::lattice::{check_antisymmetric, exponents, monomial_entries, Lattice};
use crate::error::{Error, Result};
use crate::matrix::{c, drop_zeros, sparse_from_triplets, sparse_identity, sparse_kron, sparse_zero, CVector, SparseMatrix};
use crate::operator::HermitianOperator;
use crate::triple::SpectralTripleModel;

#[derive(Debug, Clone, Default)]
pub struct CrossedOptions {
    /// Antisymmetric cocycle phases between the shifts.
    pub cocycle: Option<Vec<Vec<f64>>>,
    pub degree: i64,
    /// Replaces Z_j by Z_j ⊗ X_B with X_B the flip of the first two base slots.
    /// The result breaks [d_v, b] = 0 on purpose and skips the build self-check.
    pub adversarial_twist: bool,
}

pub fn build_crossed_product_model(
    base: &SpectralTripleModel,
    d: usize,
    cutoff: i64,
    opts: &CrossedOptions,
) -> Result<DecomposedTripleModel> {
    if d == 0 {
        return Err(Error::Precondition("d must be positive".into()));
    }
    if cutoff < 1 {
        return Err(Error::Precondition(format!("cutoff must be at least 1, got {cutoff}")));
    }
    let degree = if opts.degree == 0 { 1 } else { opts.degree };
    if degree < 1 || degree > 2 * cutoff {
        return Err(Error::Precondition(format!("degree must lie in 1..={}", 2 * cutoff)));
    }
    let phases = opts.cocycle.clone().unwrap_or_else(|| vec![vec![0.0; d]; d]);
    check_antisymmetric(&phases, d)?;
    crate::qmetric::check_metric(base)?;

    let cliff = make_clifford(d)?;
    let spin = cliff.spin_dim;
    let lat = Lattice { dim: d, cutoff };
    let nb_h = base.hilbert_dim();
    let nl = lat.len();
    let n = nb_h * nl * spin;
    let id_b = sparse_identity(nb_h);
    let id_l = sparse_identity(nl);
    let id_s = sparse_identity(spin);
    let lift = |b: &SparseMatrix, l: &SparseMatrix, s: &SparseMatrix| sparse_kron(&sparse_kron(b, l), s);

    let z = |j: usize| -> SparseMatrix {
        sparse_from_triplets(nl, (0..nl).map(|i| (i, i, c(lat.coords(i)[j] as f64, 0.0))))
    };
    let flip = if opts.adversarial_twist {
        if nb_h < 2 {
            return Err(Error::Precondition("adversarial twist needs a base Hilbert space of dimension ≥ 2".into()));
        }
        let one = c(1.0, 0.0);
        sparse_from_triplets(
            nb_h,
            [(0, 1, one), (1, 0, one)].into_iter().chain((2..nb_h).map(|i| (i, i, one))),
        )
    } else {
        id_b.clone()
    };
    let gammas: Vec<SparseMatrix> = (0..=d).map(|j| lift(&id_b, &id_l, &cliff.sparse(j))).collect();
    let mut components = vec![lift(base.dirac().matrix(), &id_l, &id_s)];
    components.extend((0..d).map(|j| lift(&flip, &z(j), &id_s)));

    let d_h = HermitianOperator::new(drop_zeros(&(&components[0] * &gammas[0])))?;
    let mut dv = sparse_zero(n);
    for j in 1..=d {
        dv = &dv + &(&components[j] * &gammas[j]);
    }
    let d_v = HermitianOperator::new(drop_zeros(&dv))?;
    let dirac = HermitianOperator::new(d_h.matrix() + d_v.matrix())?;

    let exps = exponents(d, degree);
    let shifts: Vec<SparseMatrix> =
        exps.iter().map(|e| sparse_from_triplets(nl, monomial_entries(&lat, &phases, e))).collect();
    let mut basis = Vec::with_capacity(base.basis_len() * exps.len());
    let mut charge_zero = Vec::new();
    for b in base.basis() {
        for (k, s) in shifts.iter().enumerate() {
            basis.push(lift(b, s, &id_s));
            charge_zero.push(k == 0);
        }
    }
    let nb = basis.len();
    let label = format!("crossed product by Z^{d} (K {cutoff}) over {}", base.label());
    let total = SpectralTripleModel::new(label, basis, dirac)?;

    // exps[0] is the zero exponent, so base element i sits at i·|exps|.
    let base_coeffs: Vec<CVector> = (0..base.basis_len())
        .map(|i| {
            let mut e = CVector::zeros(nb);
            e[i * exps.len()] = c(1.0, 0.0);
            e
        })
        .collect();
    let labels: Vec<Vec<i64>> = (0..n).map(|i| lat.coords((i / spin) % nl)).collect();

    let parts = DecomposedParts {
        kind: ModelKind::CrossedProduct,
        total,
        d_h,
        d_v,
        base: base_coeffs,
        sector_labels: Some(labels),
        expectation: diagonal_expectation(nb, &charge_zero),
        group_dim: d,
        group_diameter: PI,
        vertical_gap: 1.0,
        comparison_constant: (d as f64).sqrt(),
        clifford: Some(CliffordDecomposition { gammas, components, vertical: (0..=d).map(|j| j > 0).collect() }),
        reliable_window: cutoff as f64 / 2.0,
        fiber_length: None,
    };
    if opts.adversarial_twist {
        DecomposedTripleModel::new_unchecked(parts)
    } else {
        DecomposedTripleModel::new(parts)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builders::graph::{graph_model, scalar_model, GraphSpec};
    use crate::operator::hermitian_spectrum;
    use crate::triple::commutator_norm;

    #[test]
    fn one_point_base_vertical_spectrum() {
        let base = scalar_model(&[0.0]).unwrap();
        let m = build_crossed_product_model(&base, 1, 1, &CrossedOptions::default()).unwrap();
        assert_eq!(hermitian_spectrum(m.d_v()), vec![-1.0, -1.0, 0.0, 0.0, 1.0, 1.0]);
    }

    #[test]
    fn shift_has_unit_vertical_commutator() {
        let base = graph_model(&GraphSpec::path(3)).unwrap();
        let m = build_crossed_product_model(&base, 1, 2, &CrossedOptions::default()).unwrap();
        // basis element (identity of point 0, shift +1): index 0·3 + position of [1]
        let pos = exponents(1, 1).iter().position(|e| e == &vec![1]).unwrap();
        let id = base.identity_coeffs();
        let shift_coeffs = {
            let mut s = CVector::zeros(m.total().basis_len());
            for i in 0..3 {
                s[i * 3 + pos] = id[i];
            }
            s
        };
        let v1 = m.total().element(shift_coeffs).unwrap();
        assert!((commutator_norm(m.d_v().matrix(), v1.matrix()).unwrap() - 1.0).abs() < 1e-12);
        for b in m.base_matrices() {
            assert_eq!(commutator_norm(m.d_v().matrix(), b).unwrap(), 0.0);
        }
    }

    #[test]
    fn adversarial_twist_breaks_base_commutation() {
        let base = graph_model(&GraphSpec::two_point(1.0)).unwrap();
        let opts = CrossedOptions { adversarial_twist: true, ..Default::default() };
        let m = build_crossed_product_model(&base, 1, 1, &opts).unwrap();
        assert!(!m.invariant_violations().is_empty());
        assert!(build_crossed_product_model(&base, 1, 0, &CrossedOptions::default()).is_err());
    }
}
