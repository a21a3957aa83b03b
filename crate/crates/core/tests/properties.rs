//! Property tests for the structural invariants of the models and estimates.

use std::sync::OnceLock;

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use collapse_lab::builders::{
    build_crossed_product_model, build_torus_triple, graph_model, CrossedOptions, DecomposedTripleModel, GraphSpec,
    TorusParams,
};
use collapse_lab::collapse::{self, hausdorff_window};
use collapse_lab::estimates::{self, tunnel_bounds};
use collapse_lab::matrix::{self, c, sparse_commutator, sparse_from_dense, sparse_op_norm, CMatrix, CVector};
use collapse_lab::operator::{hermitian_spectrum, HermitianOperator};
use collapse_lab::qmetric::{self, SolverParams, StateFunctional};
use collapse_lab::triple::{AlgebraElement, SpectralTripleModel};

fn torus() -> &'static DecomposedTripleModel {
    static M: OnceLock<DecomposedTripleModel> = OnceLock::new();
    M.get_or_init(|| build_torus_triple(&TorusParams::flat(1, 1, 1)).unwrap())
}

fn crossed() -> &'static DecomposedTripleModel {
    static M: OnceLock<DecomposedTripleModel> = OnceLock::new();
    M.get_or_init(|| {
        let base = graph_model(&GraphSpec::path(3)).unwrap();
        build_crossed_product_model(&base, 1, 1, &CrossedOptions::default()).unwrap()
    })
}

fn path_model() -> &'static SpectralTripleModel {
    static M: OnceLock<SpectralTripleModel> = OnceLock::new();
    M.get_or_init(|| {
        graph_model(&GraphSpec { points: 4, edges: vec![(0, 1, 1.0), (1, 2, 0.5), (2, 3, 2.0)], kernel_points: vec![] })
            .unwrap()
    })
}

fn gaussian_matrix(n: usize, rng: &mut ChaCha8Rng) -> CMatrix {
    CMatrix::from_fn(n, n, |_, _| c(rng.sample(StandardNormal), rng.sample(StandardNormal)))
}

fn random_element(model: &SpectralTripleModel, rng: &mut ChaCha8Rng) -> AlgebraElement {
    let n = model.basis_len();
    let v = CVector::from_fn(n, |_, _| c(rng.sample(StandardNormal), rng.sample(StandardNormal)));
    model.element(v).unwrap()
}

fn self_adjoint(model: &SpectralTripleModel, rng: &mut ChaCha8Rng) -> AlgebraElement {
    model.element(estimates::sample_self_adjoint(model, rng)).unwrap()
}

fn max_diff(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn spectrum_is_unitarily_invariant(seed in any::<u64>(), n in 1usize..7) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = gaussian_matrix(n, &mut rng);
        let h = (&g + g.adjoint()) * c(0.5, 0.0);
        let u = gaussian_matrix(n, &mut rng).qr().q();
        let conj = &u * &h * u.adjoint();
        let conj = (&conj + conj.adjoint()) * c(0.5, 0.0);
        let s1 = hermitian_spectrum(&HermitianOperator::from_dense(&h).unwrap());
        let s2 = hermitian_spectrum(&HermitianOperator::from_dense(&conj).unwrap());
        prop_assert!(max_diff(&s1, &s2) <= 1e-9 * (1.0 + s1.iter().fold(0.0_f64, |m, v| m.max(v.abs()))));
    }

    #[test]
    fn graded_spectrum_is_symmetric(log_eps in -12.0f64..0.0) {
        let s = hermitian_spectrum(&collapse::rescale(torus(), 2f64.powf(log_eps)).unwrap());
        let n = s.len();
        for i in 0..n {
            prop_assert!((s[i] + s[n - 1 - i]).abs() <= 1e-9 * (1.0 + s[i].abs()));
        }
    }

    #[test]
    fn theta_leaves_spectrum_unchanged(t in -1.0f64..1.0, log_eps in -12.0f64..0.0) {
        let eps = 2f64.powf(log_eps);
        let twisted = build_torus_triple(&TorusParams::flat(1, 1, 1).with_theta(vec![vec![0.0, t], vec![-t, 0.0]])).unwrap();
        let s1 = hermitian_spectrum(&collapse::rescale(torus(), eps).unwrap());
        let s2 = hermitian_spectrum(&collapse::rescale(&twisted, eps).unwrap());
        prop_assert!(max_diff(&s1, &s2) <= 1e-9 * (1.0 + s1.last().unwrap().abs()));
    }

    #[test]
    fn lip_ignores_scalars(seed in any::<u64>(), t in -10.0f64..10.0) {
        let m = torus().total();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = random_element(m, &mut rng);
        let l1 = m.lip(a.matrix()).unwrap();
        let l2 = m.lip(m.add_scalar(&a, t).matrix()).unwrap();
        prop_assert!((l1 - l2).abs() <= 1e-9 * (1.0 + l1));
    }

    #[test]
    fn lip_is_a_seminorm(seed in any::<u64>(), s in -5.0f64..5.0) {
        let m = crossed().total();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = random_element(m, &mut rng);
        let b = random_element(m, &mut rng);
        let (la, lb) = (m.lip(a.matrix()).unwrap(), m.lip(b.matrix()).unwrap());
        let sum = m.element(a.coeffs() + b.coeffs()).unwrap();
        prop_assert!(m.lip(sum.matrix()).unwrap() <= la + lb + 1e-9 * (1.0 + la + lb));
        let scaled = m.element(a.coeffs() * c(s, 0.0)).unwrap();
        prop_assert!((m.lip(scaled.matrix()).unwrap() - s.abs() * la).abs() <= 1e-9 * (1.0 + la * s.abs()));
        let adj = m.adjoint(&a);
        prop_assert!((m.lip(adj.matrix()).unwrap() - la).abs() <= 1e-9 * (1.0 + la));
    }

    #[test]
    fn leibniz_rule(seed in any::<u64>()) {
        let m = torus().total();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = random_element(m, &mut rng);
        let b = random_element(m, &mut rng);
        let ab = a.matrix() * b.matrix();
        let lhs = m.lip(&ab).unwrap();
        let rhs = a.norm() * m.lip(b.matrix()).unwrap() + m.lip(a.matrix()).unwrap() * b.norm();
        prop_assert!(lhs <= rhs + 1e-9 * (1.0 + rhs));
    }

    #[test]
    fn kernel_projection_commutes_with_rescaled_dirac(log_eps in -12.0f64..0.0) {
        for dec in [torus(), crossed()] {
            let kp = collapse::model_kernel(dec).unwrap();
            let d = collapse::rescale(dec, 2f64.powf(log_eps)).unwrap();
            let comm = sparse_op_norm(&sparse_commutator(&kp.projector, d.matrix()).unwrap());
            prop_assert!(comm <= 1e-10 * (1.0 + d.norm()));
        }
    }

    #[test]
    fn expectation_is_contractive_and_satisfies_the_averaging_bound(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for dec in [torus(), crossed()] {
            let m = dec.total();
            let a = random_element(m, &mut rng);
            let e = collapse::conditional_expectation(dec, &a);
            prop_assert!(e.norm() <= a.norm() * (1.0 + 1e-9) + 1e-12);
            let sa = self_adjoint(m, &mut rng);
            let chk = estimates::expectation_lipschitz_check(dec, &sa).unwrap();
            prop_assert!(chk.pass());
        }
    }

    #[test]
    fn connes_distance_is_a_metric(seed in any::<u64>()) {
        let m = path_model();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = m.hilbert_dim();
        let s: Vec<StateFunctional> = (0..3).map(|_| StateFunctional::haar_pure(n, &mut rng)).collect();
        let sp = SolverParams::default();
        let d = |i: usize, j: usize| qmetric::connes_distance(m, &s[i], &s[j], &sp).unwrap().value;
        prop_assert!((d(0, 1) - d(1, 0)).abs() <= 1e-9);
        prop_assert!(d(0, 0).abs() <= 1e-9);
        prop_assert!(d(0, 2) <= d(0, 1) + d(1, 2) + 1e-9);
    }

    #[test]
    fn tunnel_bound_is_monotone_in_eps(
        e1 in 1e-6f64..1.0, e2 in 1e-6f64..1.0, delta in 0.1f64..10.0, k in 0.1f64..10.0, mm in 0.1f64..10.0,
    ) {
        let (lo, hi) = if e1 <= e2 { (e1, e2) } else { (e2, e1) };
        let a = tunnel_bounds(lo, delta, k, mm).unwrap();
        let b = tunnel_bounds(hi, delta, k, mm).unwrap();
        prop_assert!(a.m_eps <= b.m_eps);
        prop_assert!(a.m_eps >= 0.0);
    }

    #[test]
    fn hausdorff_is_symmetric(
        x in prop::collection::vec(-5.0f64..5.0, 0..8),
        y in prop::collection::vec(-5.0f64..5.0, 0..8),
        w in 0.1f64..6.0,
    ) {
        let a = hausdorff_window(&x, &y, w);
        let b = hausdorff_window(&y, &x, w);
        prop_assert!(a == b || (a - b).abs() <= 1e-15);
        prop_assert_eq!(hausdorff_window(&x, &x, w), 0.0);
    }

    #[test]
    fn commutator_norm_matches_dense(seed in any::<u64>(), n in 1usize..6) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = gaussian_matrix(n, &mut rng);
        let sparse = sparse_from_dense(&a);
        let dense = matrix::op_norm(&a).unwrap();
        prop_assert!((sparse_op_norm(&sparse) - dense).abs() <= 1e-9 * (1.0 + dense));
    }
}
