//! Brute-force Connes distance for models with at most four real parameters.
//!
//! The distance is the support function of the unit ball {L ≤ 1} in direction g, i.e.
//! the maximum of g·u / L(u) over unit directions u. Directions are gridded on the
//! surface of the cube [−1, 1]^m and the best one is refined by a pattern search.

use crate::error::{Error, Result};
use crate::qmetric::ascent::Seminorm;
use crate::qmetric::params::RealParams;
use crate::qmetric::states::StateFunctional;
use crate::triple::SpectralTripleModel;

pub const MAX_ORACLE_PARAMS: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleResult {
    pub value: f64,
    /// The true distance lies in [value, value + accuracy].
    pub accuracy: f64,
}

fn ratio(sn: &Seminorm, g: &[f64], u: &[f64]) -> f64 {
    let l = sn.value(u);
    let gu: f64 = g.iter().zip(u).map(|(a, b)| a * b).sum();
    if l > 0.0 {
        gu / l
    } else if gu > 0.0 {
        f64::INFINITY
    } else {
        0.0
    }
}

fn cube_surface(m: usize, res: usize) -> Vec<Vec<f64>> {
    let ticks: Vec<f64> = (0..=res).map(|i| -1.0 + 2.0 * i as f64 / res as f64).collect();
    let mut out = Vec::new();
    let total = (res + 1).pow(m as u32);
    for mut code in 0..total {
        let mut x = Vec::with_capacity(m);
        for _ in 0..m {
            x.push(ticks[code % (res + 1)]);
            code /= res + 1;
        }
        if x.iter().any(|v| v.abs() == 1.0) {
            out.push(x);
        }
    }
    out
}

/// Grid search with `resolution` intervals per cube edge, then local refinement.
pub fn distance_bruteforce_oracle(
    model: &SpectralTripleModel,
    phi: &StateFunctional,
    psi: &StateFunctional,
    resolution: usize,
) -> Result<OracleResult> {
    let params = RealParams::new(model);
    let m = params.len();
    if m > MAX_ORACLE_PARAMS {
        return Err(Error::TooLarge { params: m, limit: MAX_ORACLE_PARAMS });
    }
    let g = params.gradient(phi, psi);
    let gn = g.iter().map(|v| v * v).sum::<f64>().sqrt();
    if m == 0 || gn == 0.0 {
        return Ok(OracleResult { value: 0.0, accuracy: 0.0 });
    }
    let comms = params.dense_commutators();
    let sn = Seminorm::new(&comms);
    if m == 1 {
        let l = sn.value(&[1.0]);
        if l == 0.0 {
            return Err(Error::NotMetric(0.0));
        }
        return Ok(OracleResult { value: g[0].abs() / l, accuracy: 0.0 });
    }
    let res = resolution.max(2);
    let grid = cube_surface(m, res);
    let mut best_u = grid[0].clone();
    let mut best = f64::NEG_INFINITY;
    let (mut l_min, mut l_max) = (f64::INFINITY, 0.0_f64);
    for u in &grid {
        let nrm = u.iter().map(|v| v * v).sum::<f64>().sqrt();
        let l = sn.value(u) / nrm;
        l_min = l_min.min(l);
        l_max = l_max.max(l);
        let r = ratio(&sn, &g, u);
        if r > best {
            best = r;
            best_u = u.clone();
        }
    }
    if !(l_min > 0.0) {
        return Err(Error::NotMetric(l_min));
    }
    // Pattern search over the unit sphere.
    let mut u = best_u;
    let mut step = 2.0 / res as f64;
    while step > 1e-12 {
        let mut moved = false;
        for k in 0..m {
            for s in [step, -step] {
                let mut v = u.clone();
                v[k] += s;
                let r = ratio(&sn, &g, &v);
                if r > best {
                    best = r;
                    u = v;
                    moved = true;
                }
            }
        }
        if !moved {
            step *= 0.5;
        }
    }
    // Angular net spacing of the cube grid, times the distortion of the unit ball.
    let h = (m as f64 - 1.0).sqrt() / res as f64;
    let accuracy = gn * h * l_max / (l_min * l_min);
    Ok(OracleResult { value: best.max(0.0), accuracy })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builders::graph::{graph_model, two_point_model, GraphSpec};
    use crate::matrix::c;

    #[test]
    fn two_point_kappa_two() {
        let m = two_point_model(c(2.0, 0.0)).unwrap();
        let phi = StateFunctional::point(&m, 0).unwrap();
        let psi = StateFunctional::point(&m, 1).unwrap();
        let r = distance_bruteforce_oracle(&m, &phi, &psi, 16).unwrap();
        assert!((r.value - 0.5).abs() <= 1e-12 + r.accuracy);
        let same = distance_bruteforce_oracle(&m, &phi, &phi, 16).unwrap();
        assert_eq!(same.value, 0.0);
    }

    #[test]
    fn three_point_path_endpoints() {
        let m = graph_model(&GraphSpec::path(3)).unwrap();
        let phi = StateFunctional::point(&m, 0).unwrap();
        let psi = StateFunctional::point(&m, 2).unwrap();
        let r = distance_bruteforce_oracle(&m, &phi, &psi, 24).unwrap();
        assert!((r.value - 2.0).abs() <= 1e-6 + r.accuracy, "{r:?}");
    }

    #[test]
    fn rejects_large_models() {
        let m = graph_model(&GraphSpec::path(6)).unwrap();
        let phi = StateFunctional::point(&m, 0).unwrap();
        assert!(matches!(
            distance_bruteforce_oracle(&m, &phi, &phi, 4),
            Err(Error::TooLarge { .. })
        ));
    }
}
