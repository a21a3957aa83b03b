//! Connes distances, quantum diameters and brute-force oracles on model state spaces.

pub mod ascent;
pub mod exact;
pub mod oracle;
pub mod params;
pub mod states;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

pub use ascent::SolverParams;
pub use oracle::{distance_bruteforce_oracle, OracleResult};
pub use params::{check_metric, RealParams};
pub use states::StateFunctional;

use crate::error::{Error, Result};
use crate::matrix::{c, CVector};
use crate::triple::{AlgebraElement, SpectralTripleModel};

/// Largest Hilbert dimension handled by the dense ascent solver.
pub const ASCENT_DIM_LIMIT: usize = 512;

const LIP_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Method {
    #[serde(rename = "exact-shortest-path")]
    ExactShortestPath,
    #[serde(rename = "oracle")]
    Oracle,
    #[serde(rename = "ascent-lower-bound")]
    AscentLowerBound,
}

impl Method {
    pub fn tag(&self) -> &'static str {
        match self {
            Method::ExactShortestPath => "exact-shortest-path",
            Method::Oracle => "oracle",
            Method::AscentLowerBound => "ascent-lower-bound",
        }
    }
}

#[derive(Debug, Clone)]
pub struct DistanceResult {
    pub value: f64,
    /// Feasible self-adjoint element with φ(a) − ψ(a) = value.
    pub certificate: AlgebraElement,
    pub method: Method,
    pub converged: bool,
    /// ‖[D, certificate]‖
    pub lip: f64,
}

fn check_state(model: &SpectralTripleModel, s: &StateFunctional) -> Result<()> {
    if s.dim() != model.hilbert_dim() {
        return Err(Error::DimensionMismatch { expected: model.hilbert_dim(), got: s.dim() });
    }
    Ok(())
}

/// Connes distance: exact on graph models, a certified lower bound elsewhere.
pub fn connes_distance(
    model: &SpectralTripleModel,
    phi: &StateFunctional,
    psi: &StateFunctional,
    solver: &SolverParams,
) -> Result<DistanceResult> {
    check_state(model, phi)?;
    check_state(model, psi)?;
    if model.graph().is_some() {
        let (value, f) = exact::graph_distance(model, phi, psi)?;
        let coeffs = CVector::from_iterator(f.len(), f.iter().map(|&v| c(v, 0.0)));
        let certificate = model.element(coeffs)?;
        let lip = model.lip(certificate.matrix())?;
        assert!(lip <= 1.0 + LIP_SLACK, "infeasible certificate: lip = {lip}");
        return Ok(DistanceResult { value, certificate, method: Method::ExactShortestPath, converged: true, lip });
    }
    if model.hilbert_dim() > ASCENT_DIM_LIMIT {
        return Err(Error::Precondition(format!(
            "Hilbert dimension {} exceeds the dense solver limit {ASCENT_DIM_LIMIT}",
            model.hilbert_dim()
        )));
    }
    let params = RealParams::new(model);
    let g = params.gradient(phi, psi);
    let mut sp = solver.clone();
    if let Some(init) = &solver.initial {
        if init.len() != params.len() {
            return Err(Error::DimensionMismatch { expected: params.len(), got: init.len() });
        }
    }
    sp.initial = solver.initial.clone();
    let run = ascent::maximize(&params.dense_commutators(), &g, &sp);
    if run.value.is_infinite() {
        return Err(Error::NotMetric(0.0));
    }
    let mut x = run.x;
    let mut certificate = model.element(params.combine(&x))?;
    let mut lip = model.lip(certificate.matrix())?;
    if lip > 1.0 {
        x.iter_mut().for_each(|v| *v /= lip);
        certificate = model.element(params.combine(&x))?;
        lip = model.lip(certificate.matrix())?;
    }
    assert!(lip <= 1.0 + LIP_SLACK, "infeasible certificate: lip = {lip}");
    let value = (phi.evaluate(certificate.matrix()) - psi.evaluate(certificate.matrix())).re;
    Ok(DistanceResult { value, certificate, method: Method::AscentLowerBound, converged: run.converged, lip })
}

/// Initial iterate for [`SolverParams`] built from an element: its self-adjoint part in the
/// real coordinates. Scalar components are dropped.
pub fn initial_from_element(model: &SpectralTripleModel, a: &AlgebraElement) -> Vec<f64> {
    let params = RealParams::new(model);
    let sa = model.self_adjoint_part(a.coeffs());
    let gram = model.gram();
    params.coeffs.iter().map(|v| (v.adjoint() * gram * &sa)[(0, 0)].re).collect()
}

#[derive(Debug, Clone)]
pub struct DiameterParams {
    /// Haar-random pure-state pairs evaluated on top of the basis vectors.
    pub random_pairs: usize,
    pub seed: u64,
    pub solver: SolverParams,
}

impl Default for DiameterParams {
    fn default() -> Self {
        Self { random_pairs: 8, seed: 0xC0FFEE, solver: SolverParams::default() }
    }
}

#[derive(Debug, Clone)]
pub struct DiameterResult {
    pub value: f64,
    pub pair: (StateFunctional, StateFunctional),
    pub method: Method,
}

/// Quantum diameter: exact for graph models, otherwise a lower bound over sampled pure pairs.
pub fn quantum_diameter(model: &SpectralTripleModel, sampler: &DiameterParams) -> Result<DiameterResult> {
    check_metric(model)?;
    let n = model.hilbert_dim();
    if let Some(g) = model.graph() {
        let (d, (i, j)) = exact::graph_diameter(g);
        if !d.is_finite() {
            return Err(Error::NotMetric(0.0));
        }
        let pair = (StateFunctional::point(model, i)?, StateFunctional::point(model, j)?);
        return Ok(DiameterResult { value: d, pair, method: Method::ExactShortestPath });
    }
    let mut candidates: Vec<(StateFunctional, StateFunctional)> = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            candidates.push((StateFunctional::basis_vector(n, i)?, StateFunctional::basis_vector(n, j)?));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(sampler.seed);
    for _ in 0..sampler.random_pairs {
        let a = StateFunctional::haar_pure(n, &mut rng);
        let b = StateFunctional::haar_pure(n, &mut rng);
        candidates.push((a, b));
    }
    if candidates.is_empty() {
        let s = StateFunctional::basis_vector(n, 0)?;
        return Ok(DiameterResult { value: 0.0, pair: (s.clone(), s), method: Method::AscentLowerBound });
    }
    let values: Vec<f64> = candidates
        .par_iter()
        .map(|(a, b)| connes_distance(model, a, b, &sampler.solver).map(|r| r.value))
        .collect::<Result<_>>()?;
    let (k, v) = values
        .iter()
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |(bk, bv), (k, &v)| if v > bv { (k, v) } else { (bk, bv) });
    Ok(DiameterResult { value: v.max(0.0), pair: candidates.swap_remove(k), method: Method::AscentLowerBound })
}

#[derive(Debug, Clone, Serialize)]
pub struct ProductDistanceRow {
    pub product: f64,
    pub first: f64,
    pub second: f64,
    pub violation: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ProductDistanceReport {
    pub samples: usize,
    pub max_violation: f64,
    pub rows: Vec<ProductDistanceRow>,
}

/// Samples (φ, μ, ψ, ν) and checks mk(φ⊗ψ, μ⊗ν) ≤ mk(φ, μ) + mk(ψ, ν) on the product of
/// an even model with another model. Each factor draws point states on graph models and
/// Haar pure states otherwise.
pub fn product_state_distance_check(
    even: &SpectralTripleModel,
    other: &SpectralTripleModel,
    samples: usize,
    seed: u64,
    solver: &SolverParams,
) -> Result<ProductDistanceReport> {
    let total = &crate::builders::product::product_triple(even, other)?;
    let draw = |m: &SpectralTripleModel, rng: &mut ChaCha8Rng| -> Result<StateFunctional> {
        use rand::Rng;
        match m.graph() {
            Some(g) if rng.gen_bool(0.5) => StateFunctional::point(m, rng.gen_range(0..g.n_points)),
            _ => Ok(StateFunctional::haar_pure(m.hilbert_dim(), rng)),
        }
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut quads = Vec::with_capacity(samples);
    for _ in 0..samples {
        quads.push((draw(even, &mut rng)?, draw(even, &mut rng)?, draw(other, &mut rng)?, draw(other, &mut rng)?));
    }
    let rows: Vec<ProductDistanceRow> = quads
        .par_iter()
        .map(|(phi, mu, psi, nu)| {
            let first = connes_distance(even, phi, mu, solver)?.value;
            let second = connes_distance(other, psi, nu, solver)?.value;
            let a = phi.tensor(psi);
            let b = mu.tensor(nu);
            let prod = connes_distance(total, &a, &b, solver)?.value;
            Ok(ProductDistanceRow { product: prod, first, second, violation: (prod - first - second).max(0.0) })
        })
        .collect::<Result<_>>()?;
    let max_violation = rows.iter().map(|r| r.violation).fold(0.0, f64::max);
    Ok(ProductDistanceReport { samples, max_violation, rows })
}
