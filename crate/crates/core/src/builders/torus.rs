//! Flat and noncommutative tori with a fiber/base split of the directions.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::clifford::make_clifford;
use super::decomposed::{
    diagonal_expectation, unit_vectors, CliffordDecomposition, DecomposedParts, DecomposedTripleModel, ModelKind,
};
use super::lattice::{check_antisymmetric, exponents, monomial_entries, Lattice};
use crate::error::{Error, Result};
use crate::matrix::{c, sparse_from_triplets, sparse_identity, sparse_kron, SparseMatrix};
use crate::operator::HermitianOperator;
use crate::triple::SpectralTripleModel;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TorusParams {
    pub g_base: i64,
    pub g_fiber: i64,
    /// Antisymmetric deformation matrix; omitted means the flat torus.
    #[serde(default)]
    pub theta: Option<Vec<Vec<f64>>>,
    pub cutoff: i64,
    /// One positive weight per direction, base directions first; omitted means 1/(2π) everywhere.
    #[serde(default)]
    pub weights: Option<Vec<f64>>,
    /// Exponent cap of the monomial basis.
    #[serde(default = "default_degree")]
    pub degree: i64,
}

fn default_degree() -> i64 {
    1
}

impl TorusParams {
    pub fn flat(g_base: usize, g_fiber: usize, cutoff: usize) -> Self {
        Self {
            g_base: g_base as i64,
            g_fiber: g_fiber as i64,
            theta: None,
            cutoff: cutoff as i64,
            weights: None,
            degree: 1,
        }
    }

    pub fn with_theta(mut self, theta: Vec<Vec<f64>>) -> Self {
        self.theta = Some(theta);
        self
    }

    pub fn with_weights(mut self, w: Vec<f64>) -> Self {
        self.weights = Some(w);
        self
    }
}

/// Torus model: modes m with ‖m‖_∞ ≤ K tensored with spin, D = Σ_j 2π w_j m_j ⊗ γ_j.
pub fn build_torus_triple(p: &TorusParams) -> Result<DecomposedTripleModel> {
    if p.g_base < 0 {
        return Err(Error::Precondition("g_base must be nonnegative".into()));
    }
    if p.g_fiber < 1 {
        return Err(Error::Precondition("g_fiber must be positive".into()));
    }
    if p.cutoff < 1 {
        return Err(Error::Precondition(format!("cutoff must be at least 1, got {}", p.cutoff)));
    }
    let gb = p.g_base as usize;
    let gf = p.g_fiber as usize;
    let g = gb + gf;
    if p.degree < 1 || p.degree > 2 * p.cutoff {
        return Err(Error::Precondition(format!("degree must lie in 1..={}", 2 * p.cutoff)));
    }
    let theta = p.theta.clone().unwrap_or_else(|| vec![vec![0.0; g]; g]);
    check_antisymmetric(&theta, g)?;
    let weights = p.weights.clone().unwrap_or_else(|| vec![1.0 / (2.0 * PI); g]);
    if weights.len() != g {
        return Err(Error::Precondition(format!("expected {g} weights, got {}", weights.len())));
    }
    if weights.iter().any(|w| !(*w > 0.0 && w.is_finite())) {
        return Err(Error::Precondition("weights must be positive".into()));
    }
    let cliff = make_clifford(g)?;
    let spin = cliff.spin_dim;
    let lat = Lattice { dim: g, cutoff: p.cutoff };
    let n = lat.len() * spin;
    let modes: Vec<Vec<i64>> = (0..lat.len()).map(|i| lat.coords(i)).collect();

    // Direction j uses γ_j; the last gamma stays free (diagonal when g is even).
    let direction = |j: usize| -> SparseMatrix {
        sparse_from_triplets(
            lat.len(),
            modes.iter().enumerate().map(|(i, m)| (i, i, c(2.0 * PI * weights[j] * m[j] as f64, 0.0))),
        )
    };
    let components: Vec<SparseMatrix> = (0..g).map(|j| sparse_kron(&direction(j), &sparse_identity(spin))).collect();
    let gammas: Vec<SparseMatrix> =
        (0..g).map(|j| sparse_kron(&sparse_identity(lat.len()), &cliff.sparse(j))).collect();
    let sum = |range: std::ops::Range<usize>| -> SparseMatrix {
        let mut acc = crate::matrix::sparse_zero(n);
        for j in range {
            acc = &acc + &(&components[j] * &gammas[j]);
        }
        crate::matrix::drop_zeros(&acc)
    };
    let d_h = HermitianOperator::new(sum(0..gb))?;
    let d_v = HermitianOperator::new(sum(gb..g))?;
    let dirac = HermitianOperator::new(d_h.matrix() + d_v.matrix())?;

    let exps = exponents(g, p.degree);
    let basis: Vec<SparseMatrix> = exps
        .iter()
        .map(|e| {
            let shift = sparse_from_triplets(lat.len(), monomial_entries(&lat, &theta, e));
            sparse_kron(&shift, &sparse_identity(spin))
        })
        .collect();
    let nb = basis.len();
    let keep: Vec<bool> = exps.iter().map(|e| e[gb..].iter().all(|&x| x == 0)).collect();
    let label = format!("torus(base {gb}, fiber {gf}, K {})", p.cutoff);
    let total = SpectralTripleModel::new(label, basis, dirac)?;

    let labels: Vec<Vec<i64>> = (0..n).map(|i| modes[i / spin][gb..].to_vec()).collect();
    let fiber_w = &weights[gb..];
    let min_fiber = fiber_w.iter().cloned().fold(f64::INFINITY, f64::min);
    let min_w = weights.iter().cloned().fold(f64::INFINITY, f64::min);
    let diameter = fiber_w.iter().map(|w| 1.0 / (2.0 * w)).fold(0.0, f64::max);

    DecomposedTripleModel::new(DecomposedParts {
        kind: ModelKind::Torus,
        total,
        d_h,
        d_v,
        base: unit_vectors(nb, (0..nb).filter(|&i| keep[i])),
        sector_labels: Some(labels),
        expectation: diagonal_expectation(nb, &keep),
        group_dim: gf,
        group_diameter: diameter,
        vertical_gap: 2.0 * PI * min_fiber,
        comparison_constant: (gf as f64).sqrt(),
        clifford: Some(CliffordDecomposition { gammas, components, vertical: (0..g).map(|j| j >= gb).collect() }),
        reliable_window: PI * p.cutoff as f64 * min_w,
        fiber_length: None,
    })
}

/// Index of the exponent vector `n` in the torus basis.
pub fn monomial_index(g: usize, degree: i64, n: &[i64]) -> Option<usize> {
    exponents(g, degree).iter().position(|e| e.as_slice() == n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operator::hermitian_spectrum;

    #[test]
    fn circle_vertical_spectrum() {
        let m = build_torus_triple(&TorusParams::flat(0, 1, 2)).unwrap();
        assert_eq!(m.hilbert_dim(), 10);
        let s = hermitian_spectrum(m.d_v());
        let want = [-2.0, -2.0, -1.0, -1.0, 0.0, 0.0, 1.0, 1.0, 2.0, 2.0];
        for (a, b) in s.iter().zip(want) {
            assert!((a - b).abs() < 1e-12, "{s:?}");
        }
    }

    #[test]
    fn four_torus_spectrum_ignores_theta() {
        let flat = build_torus_triple(&TorusParams::flat(2, 2, 1)).unwrap();
        let theta = vec![
            vec![0.0, 0.13, 0.21, -0.4],
            vec![-0.13, 0.0, 0.37, 0.05],
            vec![-0.21, -0.37, 0.0, 0.61],
            vec![0.4, -0.05, -0.61, 0.0],
        ];
        let nc = build_torus_triple(&TorusParams::flat(2, 2, 1).with_theta(theta)).unwrap();
        let (a, b) = (hermitian_spectrum(flat.total().dirac()), hermitian_spectrum(nc.total().dirac()));
        assert_eq!(a.len(), 81 * 4);
        for (x, y) in a.iter().zip(&b) {
            assert!((x - y).abs() < 1e-12);
        }
        // |λ| = ‖m‖₂ for normalized weights
        let mut want: Vec<f64> = Vec::new();
        let lat = Lattice { dim: 4, cutoff: 1 };
        for i in 0..lat.len() {
            let r = lat.coords(i).iter().map(|&x| (x * x) as f64).sum::<f64>().sqrt();
            want.extend([-r, -r, r, r]);
        }
        want.sort_by(f64::total_cmp);
        for (x, y) in a.iter().zip(&want) {
            assert!((x - y).abs() < 1e-12);
        }
    }

    #[test]
    fn fiber_unitary_leaves_sector() {
        let theta = vec![vec![0.0, 0.25], vec![-0.25, 0.0]];
        let m = build_torus_triple(&TorusParams::flat(1, 1, 2).with_theta(theta)).unwrap();
        let idx = monomial_index(2, 1, &[0, 1]).unwrap();
        let u = m.total().basis_element(idx);
        assert_eq!(m.expectation(&u).coeffs().norm(), 0.0);
        let comm = crate::triple::commutator_norm(m.d_v().matrix(), u.matrix()).unwrap();
        assert!((comm - 1.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_parameters() {
        let mut p = TorusParams::flat(1, 1, 1);
        p.theta = Some(vec![vec![0.0, 0.1], vec![0.1, 0.0]]);
        assert!(build_torus_triple(&p).is_err());
        assert!(build_torus_triple(&TorusParams::flat(1, 1, 1).with_weights(vec![1.0, 0.0])).is_err());
        assert!(build_torus_triple(&TorusParams::flat(1, 1, 0)).is_err());
    }
}
