//! Exact distances on commutative graph models.
//!
//! The seminorm of f is max over edges |f_i − f_j| / ℓ_e, so the distance between
//! point evaluations is the shortest-path metric and the distance between general
//! states is the Kantorovich transport cost, solved here as a linear program.

use minilp::{ComparisonOp, OptimizationDirection, Problem};

use crate::error::{Error, Result};
use crate::qmetric::states::StateFunctional;
use crate::triple::{GraphStructure, SpectralTripleModel};

/// All-pairs shortest paths (∞ between components).
pub fn shortest_paths(g: &GraphStructure) -> Vec<Vec<f64>> {
    let n = g.n_points;
    let mut d = vec![vec![f64::INFINITY; n]; n];
    for (i, row) in d.iter_mut().enumerate() {
        row[i] = 0.0;
    }
    for &(i, j, len) in &g.edges {
        d[i][j] = d[i][j].min(len);
        d[j][i] = d[j][i].min(len);
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                let via = d[i][k] + d[k][j];
                if via < d[i][j] {
                    d[i][j] = via;
                }
            }
        }
    }
    d
}

/// Point masses of a state on a commutative model.
pub fn point_masses(model: &SpectralTripleModel, s: &StateFunctional) -> Vec<f64> {
    model.basis().iter().map(|e| s.evaluate(e).re).collect()
}

/// (distance, potential f with f 1-Lipschitz attaining it)
pub fn graph_distance(
    model: &SpectralTripleModel,
    phi: &StateFunctional,
    psi: &StateFunctional,
) -> Result<(f64, Vec<f64>)> {
    let g = model.graph().ok_or_else(|| Error::Precondition("model has no graph structure".into()))?;
    let p = point_masses(model, phi);
    let q = point_masses(model, psi);
    let n = g.n_points;
    let diff: Vec<f64> = p.iter().zip(&q).map(|(a, b)| a - b).collect();
    if diff.iter().all(|d| d.abs() < 1e-15) {
        return Ok((0.0, vec![0.0; n]));
    }
    let dist = shortest_paths(g);
    let atom = |m: &[f64]| m.iter().position(|&x| (x - 1.0).abs() < 1e-12);
    if let (Some(x), Some(y)) = (atom(&p), atom(&q)) {
        let d = dist[x][y];
        if !d.is_finite() {
            return Err(Error::NotMetric(0.0));
        }
        let f: Vec<f64> = (0..n).map(|i| dist[i][y].min(d)).collect();
        return Ok((d, f));
    }
    if dist.iter().flatten().any(|d| !d.is_finite()) {
        return Err(Error::NotMetric(0.0));
    }
    let mut lp = Problem::new(OptimizationDirection::Maximize);
    let vars: Vec<_> = (0..n)
        .map(|i| {
            let bound = if i == 0 { (0.0, 0.0) } else { (f64::NEG_INFINITY, f64::INFINITY) };
            lp.add_var(diff[i], bound)
        })
        .collect();
    for &(i, j, len) in &g.edges {
        lp.add_constraint([(vars[i], 1.0), (vars[j], -1.0)], ComparisonOp::Le, len);
        lp.add_constraint([(vars[j], 1.0), (vars[i], -1.0)], ComparisonOp::Le, len);
    }
    let sol = lp.solve().map_err(|e| Error::Precondition(format!("transport LP failed: {e}")))?;
    let f: Vec<f64> = vars.iter().map(|&v| sol[v]).collect();
    let value = f.iter().zip(&diff).map(|(a, b)| a * b).sum();
    Ok((value, f))
}

/// Largest shortest-path distance and the pair achieving it.
pub fn graph_diameter(g: &GraphStructure) -> (f64, (usize, usize)) {
    let d = shortest_paths(g);
    let mut best = (0.0, (0, 0));
    for i in 0..g.n_points {
        for j in (i + 1)..g.n_points {
            if d[i][j] > best.0 {
                best = (d[i][j], (i, j));
            }
        }
    }
    best
}
