//! Quantitative bounds for the collapse: the bump function, tunnel constants, the Clifford
//! comparison inequality, averaging bounds and the hypothesis audit.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::Serialize;

use crate::builders::{CliffordDecomposition, DecomposedTripleModel};
use crate::collapse::{self, KernelProjection};
use crate::error::{Error, Result};
use crate::matrix::{self, c, sparse_commutator, sparse_op_norm, CVector, SparseMatrix};
use crate::operator::HermitianOperator;
use crate::qmetric::check_metric;
use crate::triple::{AlgebraElement, SpectralTripleModel};

/// Absolute slack of the sampled inequalities.
pub const CHECK_SLACK: f64 = 1e-9;

/// f(t) = cos²(πεt/2δ) on |t| < δ/ε, zero outside.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BumpFunction {
    pub delta: f64,
    pub eps: f64,
}

fn check_positive(name: &str, v: f64) -> Result<()> {
    if !(v > 0.0) || !v.is_finite() {
        return Err(Error::Precondition(format!("{name} must be positive and finite, got {v}")));
    }
    Ok(())
}

impl BumpFunction {
    pub fn new(delta: f64, eps: f64) -> Result<Self> {
        check_positive("δ", delta)?;
        check_positive("ε", eps)?;
        Ok(Self { delta, eps })
    }

    pub fn support(&self) -> f64 {
        self.delta / self.eps
    }

    pub fn eval(&self, t: f64) -> f64 {
        if t.abs() >= self.support() {
            0.0
        } else {
            (PI * self.eps * t / (2.0 * self.delta)).cos().powi(2)
        }
    }

    pub fn derivative(&self, t: f64) -> f64 {
        if t.abs() >= self.support() {
            0.0
        } else {
            -(PI * self.eps / (2.0 * self.delta)) * (PI * self.eps * t / self.delta).sin()
        }
    }

    /// 2ε/δ, above the exact maximum πε/2δ.
    pub fn deriv_bound(&self) -> f64 {
        2.0 * self.eps / self.delta
    }

    /// ‖f′‖_{L²} = (π/2)√(ε/δ)
    pub fn l2_deriv_norm(&self) -> f64 {
        0.5 * PI * (self.eps / self.delta).sqrt()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TunnelBounds {
    pub eps: f64,
    pub delta: f64,
    pub k: f64,
    pub m: f64,
    /// 4√(2ε/δ)
    pub alpha: f64,
    /// max(kMε, α)
    pub k_eps: f64,
    /// α + K_ε
    pub m_eps: f64,
    /// kMε
    pub extent_bound: f64,
}

pub fn tunnel_bounds(eps: f64, delta: f64, k: f64, m: f64) -> Result<TunnelBounds> {
    check_positive("ε", eps)?;
    check_positive("δ", delta)?;
    check_positive("k", k)?;
    check_positive("M", m)?;
    Ok(tunnel_bounds_unchecked(eps, delta, k, m))
}

/// Same formulas without validation; k = 0 is meaningful for one-point fibers.
pub fn tunnel_bounds_unchecked(eps: f64, delta: f64, k: f64, m: f64) -> TunnelBounds {
    let alpha = 4.0 * (2.0 * eps / delta).sqrt();
    let extent_bound = k * m * eps;
    let k_eps = extent_bound.max(alpha);
    TunnelBounds { eps, delta, k, m, alpha, k_eps, m_eps: alpha + k_eps, extent_bound }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct InequalityCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub pass: bool,
}

impl InequalityCheck {
    fn le(lhs: f64, rhs: f64, slack: f64) -> Self {
        Self { lhs, rhs, pass: lhs <= rhs + slack }
    }

    pub fn margin(&self) -> f64 {
        self.rhs - self.lhs
    }
}

/// ‖ξ − pξ‖ ≤ 4√(2ε/δ)(‖ξ‖ + ‖d_v ξ‖/ε)
pub fn fourier_projection_check(d_v: &HermitianOperator, delta: f64, eps: f64, xi: &CVector) -> Result<InequalityCheck> {
    check_positive("δ", delta)?;
    let tol = 1e-9 * d_v.norm().max(1.0);
    let kp = collapse::kernel_projection(d_v, tol, Some(delta))?;
    fourier_projection_check_with(&kp, d_v, delta, eps, xi)
}

pub fn fourier_projection_check_with(
    kp: &KernelProjection,
    d_v: &HermitianOperator,
    delta: f64,
    eps: f64,
    xi: &CVector,
) -> Result<InequalityCheck> {
    check_positive("δ", delta)?;
    check_positive("ε", eps)?;
    if xi.len() != d_v.dim() {
        return Err(Error::DimensionMismatch { expected: d_v.dim(), got: xi.len() });
    }
    let p_xi = matrix::sparse_mul_vec(&kp.projector, xi);
    let lhs = (xi - p_xi).norm();
    let rhs = 4.0 * (2.0 * eps / delta).sqrt() * (xi.norm() + d_v.apply(xi).norm() / eps);
    Ok(InequalityCheck::le(lhs, rhs, 1e-10))
}

/// ‖[Σ_{j∈F} D_jγ_j, a]‖ ≤ √|F|·‖[D, a]‖
pub fn comparison_check(cliff: &CliffordDecomposition, a: &SparseMatrix, subset: &[usize]) -> Result<InequalityCheck> {
    Ok(comparison_check_subsets(cliff, a, &[subset.to_vec()])?.remove(0))
}

/// [`comparison_check`] for several subsets, sharing the commutators.
pub fn comparison_check_subsets(
    cliff: &CliffordDecomposition,
    a: &SparseMatrix,
    subsets: &[Vec<usize>],
) -> Result<Vec<InequalityCheck>> {
    let d = cliff.len();
    for f in subsets {
        if f.is_empty() {
            return Err(Error::Precondition("index subset must be nonempty".into()));
        }
        if let Some(j) = f.iter().find(|&&j| j >= d) {
            return Err(Error::Precondition(format!("index {j} out of range 0..{d}")));
        }
    }
    let parts: Vec<SparseMatrix> = (0..d)
        .map(|j| sparse_commutator(&(&cliff.components[j] * &cliff.gammas[j]), a))
        .collect::<Result<_>>()?;
    let n = a.nrows();
    let sum = |f: &[usize]| matrix::sparse_combination(n, f.iter().map(|&j| (c(1.0, 0.0), &parts[j])));
    let full = sparse_op_norm(&sum(&(0..d).collect::<Vec<_>>()));
    Ok(subsets
        .iter()
        .map(|f| InequalityCheck::le(sparse_op_norm(&sum(f)), (f.len() as f64).sqrt() * full, 1e-10))
        .collect())
}

/// All nonempty subsets of 0..d.
pub fn all_subsets(d: usize) -> Vec<Vec<usize>> {
    (1u32..(1 << d)).map(|mask| (0..d).filter(|j| mask & (1 << j) != 0).collect()).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ExpectationCheck {
    /// ‖a − E(a)‖ ≤ k‖[d_v, a]‖
    pub averaging: InequalityCheck,
    /// ‖[d_h, E(a)]‖ ≤ ‖[d_h, a]‖
    pub horizontal: InequalityCheck,
    /// ‖p[d_h, E(a)]p‖ (lhs) against ‖[d_h, E(a)]‖ (rhs); passes when equal.
    pub compressed: InequalityCheck,
    /// ‖[D_B, V*E(a)V]‖
    pub base_commutator: f64,
}

impl ExpectationCheck {
    pub fn pass(&self) -> bool {
        self.averaging.pass && self.horizontal.pass && self.compressed.pass
    }
}

pub fn expectation_lipschitz_check(dec: &DecomposedTripleModel, a: &AlgebraElement) -> Result<ExpectationCheck> {
    let kp = collapse::model_kernel(dec)?;
    let d_b = compressed_dirac(dec, &kp)?;
    expectation_lipschitz_check_with(dec, &kp, &d_b, a)
}

fn compressed_dirac(dec: &DecomposedTripleModel, kp: &KernelProjection) -> Result<SparseMatrix> {
    let m = kp.compress(dec.d_h().matrix());
    let adj = matrix::sparse_adjoint(&m);
    Ok(matrix::sparse_combination(m.nrows(), [(c(0.5, 0.0), &m), (c(0.5, 0.0), &adj)]))
}

pub fn expectation_lipschitz_check_with(
    dec: &DecomposedTripleModel,
    kp: &KernelProjection,
    d_b: &SparseMatrix,
    a: &AlgebraElement,
) -> Result<ExpectationCheck> {
    let ch_a = sparse_op_norm(&sparse_commutator(dec.d_h().matrix(), a.matrix())?);
    let cv = sparse_op_norm(&sparse_commutator(dec.d_v().matrix(), a.matrix())?);
    expectation_check_inner(dec, kp, d_b, a, ch_a, cv)
}

/// Takes ‖[d_h, a]‖ and ‖[d_v, a]‖ precomputed.
fn expectation_check_inner(
    dec: &DecomposedTripleModel,
    kp: &KernelProjection,
    d_b: &SparseMatrix,
    a: &AlgebraElement,
    ch_a: f64,
    cv: f64,
) -> Result<ExpectationCheck> {
    let e = dec.expectation(a);
    let diff = sparse_op_norm(&(a.matrix() - e.matrix()));
    let averaging = InequalityCheck::le(diff, dec.mvt_constant() * cv, CHECK_SLACK * diff.max(1.0));
    let comm_e = sparse_commutator(dec.d_h().matrix(), e.matrix())?;
    let ch_e = sparse_op_norm(&comm_e);
    let horizontal = InequalityCheck::le(ch_e, ch_a, CHECK_SLACK * ch_a.max(1.0));
    let pcp = if kp.rank() == 0 { 0.0 } else { sparse_op_norm(&kp.compress(&comm_e)) };
    let base_commutator =
        if kp.rank() == 0 { 0.0 } else { sparse_op_norm(&sparse_commutator(d_b, &kp.compress(e.matrix()))?) };
    let tol = CHECK_SLACK * ch_e.max(1.0);
    let compressed = InequalityCheck {
        lhs: pcp,
        rhs: ch_e,
        pass: (pcp - ch_e).abs() <= tol && (base_commutator - pcp).abs() <= tol,
    };
    Ok(ExpectationCheck { averaging, horizontal, compressed, base_commutator })
}

/// Self-adjoint element with standard complex Gaussian coefficients before symmetrization.
pub fn sample_self_adjoint<R: Rng>(model: &SpectralTripleModel, rng: &mut R) -> CVector {
    let nb = model.basis_len();
    let raw = CVector::from_fn(nb, |_, _| c(rng.sample(StandardNormal), rng.sample(StandardNormal)));
    model.self_adjoint_part(&raw)
}

/// Generator for sample `i` of a seeded sweep.
pub fn sample_rng(seed: u64, i: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(i as u64);
    rng
}

#[derive(Debug, Clone, Serialize)]
pub struct AuditConfig {
    pub eps_list: Vec<f64>,
    pub samples: usize,
    pub seed: u64,
}

impl Default for AuditConfig {
    fn default() -> Self {
        Self { eps_list: vec![1.0, 0.5, 0.25], samples: 1000, seed: 0xC0FFEE }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct HypothesisVerdict {
    pub hypothesis: u8,
    pub statement: String,
    pub pass: bool,
    pub checked: usize,
    /// Smallest rhs − lhs (slack excluded) over all checks.
    pub worst_margin: f64,
    pub witness: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct AuditReport {
    pub model: String,
    pub samples: usize,
    pub seed: u64,
    pub eps_list: Vec<f64>,
    pub mvt_constant: f64,
    pub comparison_constant: f64,
    pub verdicts: Vec<HypothesisVerdict>,
    pub all_pass: bool,
}

impl AuditReport {
    pub fn failed(&self) -> Vec<u8> {
        self.verdicts.iter().filter(|v| !v.pass).map(|v| v.hypothesis).collect()
    }
}

/// Running worst case of one hypothesis.
struct Tally {
    pass: bool,
    checked: usize,
    worst: f64,
    witness: String,
}

impl Tally {
    fn new() -> Self {
        Self { pass: true, checked: 0, worst: f64::INFINITY, witness: String::new() }
    }

    fn add(&mut self, check: InequalityCheck, witness: impl FnOnce() -> String) {
        self.checked += 1;
        let first_failure = self.pass && !check.pass;
        if check.margin() < self.worst || first_failure {
            self.worst = self.worst.min(check.margin());
            self.witness = witness();
        }
        self.pass &= check.pass;
    }

    fn verdict(self, hypothesis: u8, statement: &str) -> HypothesisVerdict {
        HypothesisVerdict {
            hypothesis,
            statement: statement.into(),
            pass: self.pass,
            checked: self.checked,
            worst_margin: if self.checked == 0 { 0.0 } else { self.worst },
            witness: self.witness,
        }
    }
}

struct SampleOutcome {
    horizontal: Vec<InequalityCheck>,
    vertical: Vec<InequalityCheck>,
    expectation: ExpectationCheck,
}

fn audit_sample(
    dec: &DecomposedTripleModel,
    kp: &KernelProjection,
    d_b: &SparseMatrix,
    eps_list: &[f64],
    seed: u64,
    i: usize,
) -> Result<SampleOutcome> {
    let mut rng = sample_rng(seed, i);
    let a = dec.total().element(sample_self_adjoint(dec.total(), &mut rng))?;
    let ch = sparse_commutator(dec.d_h().matrix(), a.matrix())?;
    let cv = sparse_commutator(dec.d_v().matrix(), a.matrix())?;
    let (nh, nv) = (sparse_op_norm(&ch), sparse_op_norm(&cv));
    let n = ch.nrows();
    let mut horizontal = Vec::new();
    let mut vertical = Vec::new();
    for &e in eps_list {
        let ce = sparse_op_norm(&matrix::sparse_combination(n, [(c(1.0, 0.0), &ch), (c(1.0 / e, 0.0), &cv)]));
        let slack = CHECK_SLACK * ce.max(1.0);
        horizontal.push(InequalityCheck::le(nh, ce, slack));
        vertical.push(InequalityCheck::le(nv, dec.comparison_constant() * e * ce, slack));
    }
    let expectation = expectation_check_inner(dec, kp, d_b, &a, nh, nv)?;
    Ok(SampleOutcome { horizontal, vertical, expectation })
}

const STATEMENTS: [&str; 6] = [
    "‖[d_h,a]‖ ≤ ‖[D_ε,a]‖",
    "‖[d_v,a]‖ ≤ M·ε·‖[D_ε,a]‖",
    "[d_v,b] = 0 on the base",
    "[p,b] = 0 on the base and [d_h,p] = 0",
    "compressed base triple is metric",
    "‖a − E(a)‖ ≤ k‖[d_v,a]‖ and ‖p[d_h,E(a)]p‖ = ‖[d_h,E(a)]‖ ≤ ‖[d_h,a]‖",
];

/// Checks the six hypotheses of the collapse theorem; failures are report content.
pub fn hypothesis_audit(dec: &DecomposedTripleModel, cfg: &AuditConfig) -> Result<AuditReport> {
    if cfg.samples == 0 {
        return Err(Error::Precondition("audit needs at least one sample".into()));
    }
    if cfg.eps_list.is_empty() {
        return Err(Error::Precondition("audit needs at least one ε".into()));
    }
    for &e in &cfg.eps_list {
        if !(e > 0.0 && e <= 1.0) {
            return Err(Error::Precondition(format!("audit ε must lie in (0, 1], got {e}")));
        }
    }
    let kp = collapse::kernel_projection(dec.d_v(), dec.kernel_tol(), None)?;
    let d_b = compressed_dirac(dec, &kp)?;
    let dv_norm = dec.d_v().norm().max(1.0);

    let mut t3 = Tally::new();
    let mut t4 = Tally::new();
    for (i, b) in dec.base_matrices().iter().enumerate() {
        let tol = 1e-10 * dv_norm;
        let comm = sparse_op_norm(&sparse_commutator(dec.d_v().matrix(), b)?);
        t3.add(InequalityCheck::le(comm, 0.0, tol), || format!("base element {i}: ‖[d_v,b]‖ = {comm:.6e}"));
        let comm = sparse_op_norm(&sparse_commutator(&kp.projector, b)?);
        t4.add(InequalityCheck::le(comm, 0.0, 1e-10), || format!("base element {i}: ‖[p,b]‖ = {comm:.6e}"));
    }
    let dh_p = collapse::horizontal_kernel_defect(dec, &kp)?;
    t4.add(InequalityCheck::le(dh_p, 0.0, 1e-10 * dec.d_h().norm().max(1.0)), || {
        format!("‖[d_h,p]‖ = {dh_p:.6e}")
    });

    let mut t5 = Tally::new();
    let metric = if kp.rank() == 0 {
        Err(Error::NoKernel)
    } else {
        collapse::compress_base_with(dec, &kp).and_then(|m| check_metric(&m))
    };
    let ok = metric.is_ok();
    t5.add(InequalityCheck { lhs: 0.0, rhs: 0.0, pass: ok }, || match &metric {
        Ok(()) => String::new(),
        Err(e) => e.to_string(),
    });

    let outcomes: Vec<SampleOutcome> = (0..cfg.samples)
        .into_par_iter()
        .map(|i| audit_sample(dec, &kp, &d_b, &cfg.eps_list, cfg.seed, i))
        .collect::<Result<_>>()?;
    let mut t1 = Tally::new();
    let mut t2 = Tally::new();
    let mut t6 = Tally::new();
    for (i, o) in outcomes.iter().enumerate() {
        for (k, &e) in cfg.eps_list.iter().enumerate() {
            t1.add(o.horizontal[k], || format!("sample {i}, ε = {e}"));
            t2.add(o.vertical[k], || format!("sample {i}, ε = {e}"));
        }
        let x = &o.expectation;
        t6.add(x.averaging, || format!("sample {i}: averaging bound"));
        t6.add(x.horizontal, || format!("sample {i}: horizontal contraction"));
        let eq = InequalityCheck {
            lhs: (x.compressed.lhs - x.compressed.rhs).abs(),
            rhs: 0.0,
            pass: x.compressed.pass,
        };
        t6.add(eq, || format!("sample {i}: compressed commutator norm"));
    }
    let verdicts: Vec<HypothesisVerdict> = [t1, t2, t3, t4, t5, t6]
        .into_iter()
        .enumerate()
        .map(|(i, t)| t.verdict(i as u8 + 1, STATEMENTS[i]))
        .collect();
    let all_pass = verdicts.iter().all(|v| v.pass);
    Ok(AuditReport {
        model: dec.total().label().to_string(),
        samples: cfg.samples,
        seed: cfg.seed,
        eps_list: cfg.eps_list.clone(),
        mvt_constant: dec.mvt_constant(),
        comparison_constant: dec.comparison_constant(),
        verdicts,
        all_pass,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builders::{build_torus_triple, TorusParams};
    use crate::collapse::diagonal_operator;

    #[test]
    #[allow(clippy::approx_constant)]
    fn bump_examples() {
        let f = BumpFunction::new(1.0, 1.0).unwrap();
        assert_eq!(f.eval(0.0), 1.0);
        assert!(f.eval(1.0).abs() < 1e-30 && f.eval(-1.0).abs() < 1e-30);
        assert!((f.l2_deriv_norm() - 1.570_796_326_794_896_6).abs() < 1e-15);
        assert!(f.l2_deriv_norm() <= 2.0 * 2f64.sqrt());
        let g = BumpFunction::new(1.0, 0.01).unwrap();
        assert!((g.l2_deriv_norm() - 0.157_079_632_679_489_66).abs() < 1e-15);
        assert!(g.l2_deriv_norm() <= 2.0 * 0.02f64.sqrt());
        assert!(BumpFunction::new(0.0, 1.0).is_err());
        assert!(BumpFunction::new(1.0, -1.0).is_err());
    }

    #[test]
    fn tunnel_examples() {
        let t = tunnel_bounds(0.01, 1.0, 1.0, 1.0).unwrap();
        assert!((t.alpha - 0.565_685_424_949_238).abs() < 1e-12);
        assert_eq!(t.k_eps, t.alpha);
        assert!((t.m_eps - 1.131_370_849_898_476).abs() < 1e-12);
        assert!((t.extent_bound - 0.01).abs() < 1e-18);
        let t = tunnel_bounds(1e-8, 1.0, 1.0, 1.0).unwrap();
        assert!((t.m_eps - 1.131_370_849_898_476e-3).abs() < 1e-15);
        let t = tunnel_bounds(0.9, 100.0, 10.0, 10.0).unwrap();
        assert!((t.extent_bound - 90.0).abs() < 1e-12);
        assert!((t.alpha - 0.536_656_314_599_949_5).abs() < 1e-12);
        assert_eq!(t.k_eps, t.extent_bound);
        assert!(tunnel_bounds(0.0, 1.0, 1.0, 1.0).is_err());
        assert!(tunnel_bounds(1.0, 1.0, 0.0, 1.0).is_err());
    }

    #[test]
    fn fourier_examples() {
        let d_v = diagonal_operator(&[0.0, 1.0]).unwrap();
        let xi = CVector::from_vec(vec![c(0.0, 0.0), c(1.0, 0.0)]);
        let r = fourier_projection_check(&d_v, 1.0, 0.04, &xi).unwrap();
        assert_eq!(r.lhs, 1.0);
        assert!((r.rhs - 4.0 * 0.08f64.sqrt() * 26.0).abs() < 1e-12);
        assert!((r.rhs - 29.4).abs() < 0.05 && r.pass);
        let k = CVector::from_vec(vec![c(1.0, 0.0), c(0.0, 0.0)]);
        assert_eq!(fourier_projection_check(&d_v, 1.0, 0.5, &k).unwrap().lhs, 0.0);
        assert!(fourier_projection_check(&diagonal_operator(&[0.0, 0.5]).unwrap(), 1.0, 0.5, &k).is_err());
    }

    #[test]
    fn comparison_on_torus() {
        let m = build_torus_triple(&TorusParams::flat(1, 1, 2)).unwrap();
        let cliff = m.clifford().unwrap();
        let idx = crate::builders::torus::monomial_index(2, 1, &[1, 0]).unwrap();
        let u = m.total().basis_element(idx);
        let r = comparison_check(cliff, u.matrix(), &[0]).unwrap();
        assert!(r.pass && r.lhs > 0.0);
        let full = comparison_check(cliff, u.matrix(), &[0, 1]).unwrap();
        assert!((full.rhs - 2f64.sqrt() * full.lhs).abs() < 1e-12);
        assert!(comparison_check(cliff, u.matrix(), &[]).is_err());
        let id = m.total().identity_element();
        assert_eq!(comparison_check(cliff, id.matrix(), &[1]).unwrap().lhs, 0.0);
        assert_eq!(all_subsets(3).len(), 7);
    }

    #[test]
    fn expectation_on_torus() {
        let m = build_torus_triple(&TorusParams::flat(1, 1, 2)).unwrap();
        let idx = crate::builders::torus::monomial_index(2, 1, &[0, 1]).unwrap();
        let u = m.total().basis_element(idx);
        assert!(m.expectation(&u).coeffs().norm() < 1e-15);
        let r = expectation_lipschitz_check(&m, &u).unwrap();
        assert!((r.averaging.lhs - 1.0).abs() < 1e-12);
        assert!(r.pass(), "{r:?}");
        let base = m.total().basis_element(crate::builders::torus::monomial_index(2, 1, &[1, 0]).unwrap());
        let r = expectation_lipschitz_check(&m, &base).unwrap();
        assert_eq!(r.averaging.lhs, 0.0);
    }

    #[test]
    fn audit_passes_on_torus() {
        let m = build_torus_triple(&TorusParams::flat(1, 1, 2)).unwrap();
        let rep = hypothesis_audit(&m, &AuditConfig { samples: 50, ..Default::default() }).unwrap();
        assert!(rep.all_pass, "{rep:#?}");
        assert!(hypothesis_audit(&m, &AuditConfig { samples: 0, ..Default::default() }).is_err());
    }
}
