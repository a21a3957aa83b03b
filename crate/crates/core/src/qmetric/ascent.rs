//! Lower bounds on the Connes distance by subgradient ascent.
//!
//! Over real coordinates x (self-adjoint a = Σ x_k S_k, scalars removed) the problem is
//! max g·x subject to L(x) = ‖Σ x_k C_k‖ ≤ 1. Iterates are kept on the boundary by
//! rescaling x ← x / L(x) and move along the gradient of the ratio g·x / L(x).

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::matrix::{c, CMatrix};

#[derive(Debug, Clone)]
pub struct SolverParams {
    pub iterations: usize,
    /// c in the step size c/√t
    pub step: f64,
    pub restarts: usize,
    pub seed: u64,
    /// Optional starting point in the real coordinates.
    pub initial: Option<Vec<f64>>,
}

impl Default for SolverParams {
    fn default() -> Self {
        Self { iterations: 2000, step: 0.5, restarts: 3, seed: 0xC0FFEE, initial: None }
    }
}

#[derive(Debug, Clone)]
pub struct AscentResult {
    pub value: f64,
    pub x: Vec<f64>,
    pub converged: bool,
}

pub(crate) struct Seminorm<'a> {
    comms: &'a [CMatrix],
}

impl<'a> Seminorm<'a> {
    pub fn new(comms: &'a [CMatrix]) -> Self {
        Self { comms }
    }

    fn assemble(&self, x: &[f64]) -> CMatrix {
        let n = self.comms[0].nrows();
        let mut m = CMatrix::zeros(n, n);
        for (ck, &t) in self.comms.iter().zip(x) {
            if t != 0.0 {
                m += ck * c(t, 0.0);
            }
        }
        m
    }

    pub fn value(&self, x: &[f64]) -> f64 {
        let m = self.assemble(x);
        crate::matrix::op_norm_unchecked(&m)
    }

    /// L(x) and a subgradient.
    pub fn value_and_subgradient(&self, x: &[f64]) -> (f64, Vec<f64>) {
        let m = self.assemble(x);
        let (vals, vecs) = crate::matrix::dense_eigen(&m);
        let (k, lam) = vals
            .iter()
            .enumerate()
            .fold((0, 0.0_f64), |(bk, bv), (k, &v)| if v.abs() > bv.abs() { (k, v) } else { (bk, bv) });
        let v = vecs.column(k);
        let sign = if lam >= 0.0 { 1.0 } else { -1.0 };
        let s = self.comms.iter().map(|ck| sign * (v.adjoint() * ck * v)[(0, 0)].re).collect();
        (lam.abs(), s)
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

fn rescale(sn: &Seminorm, x: &mut [f64]) -> bool {
    let l = sn.value(x);
    if !(l > 0.0) {
        return false;
    }
    x.iter_mut().for_each(|v| *v /= l);
    true
}

/// Maximizes g·x over L(x) ≤ 1. Returns +∞ when g·x > 0 on a direction with L = 0.
pub fn maximize(comms: &[CMatrix], g: &[f64], params: &SolverParams) -> AscentResult {
    let m = g.len();
    let gn = norm(g);
    if m == 0 || gn == 0.0 {
        return AscentResult { value: 0.0, x: vec![0.0; m], converged: true };
    }
    let sn = Seminorm::new(comms);
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let mut starts: Vec<Vec<f64>> = vec![params.initial.clone().unwrap_or_else(|| g.to_vec())];
    for _ in 0..params.restarts {
        starts.push((0..m).map(|_| rng.sample::<f64, _>(StandardNormal)).collect());
    }
    let mut best = AscentResult { value: f64::NEG_INFINITY, x: vec![0.0; m], converged: false };
    for mut x in starts {
        if dot(&x, g) <= 0.0 {
            // move into the half-space where the objective is positive
            let proj = dot(&x, g) / (gn * gn);
            x.iter_mut().zip(g).for_each(|(v, gi)| *v += (1.0 - proj) * gi);
        }
        if !rescale(&sn, &mut x) {
            if dot(&x, g) > 0.0 {
                return AscentResult { value: f64::INFINITY, x, converged: true };
            }
            continue;
        }
        let run = ascend(&sn, g, x, params, &mut rng);
        if run.value > best.value {
            best = run;
        }
    }
    if best.value < 0.0 {
        best.value = 0.0;
        best.x = vec![0.0; m];
    }
    best
}

fn ascend(sn: &Seminorm, g: &[f64], mut x: Vec<f64>, params: &SolverParams, rng: &mut ChaCha8Rng) -> AscentResult {
    let m = g.len();
    let gn = norm(g);
    let mut best_x = x.clone();
    let mut best = dot(g, &x);
    let mut converged = false;
    for t in 1..=params.iterations {
        let (_, s) = sn.value_and_subgradient(&x);
        let r = dot(g, &x);
        let grad: Vec<f64> = g.iter().zip(&s).map(|(gi, si)| gi - r * si).collect();
        let gnorm = norm(&grad);
        if gnorm <= 1e-14 * gn {
            converged = true;
            break;
        }
        let eta = params.step / (t as f64).sqrt() * norm(&x);
        let mut y: Vec<f64> = x.iter().zip(&grad).map(|(xi, di)| xi + eta * di / gnorm).collect();
        if !rescale(sn, &mut y) {
            break;
        }
        x = y;
        let v = dot(g, &x);
        if v > best {
            best = v;
            best_x = x.clone();
        }
    }
    // Polish: accept only improving moves, shrinking the step on failure.
    let mut x = best_x;
    let mut eta = 1e-2;
    let mut stalls = 0;
    for _ in 0..2000 {
        if eta < 1e-13 {
            converged = true;
            break;
        }
        let (_, s) = sn.value_and_subgradient(&x);
        let r = dot(g, &x);
        let grad: Vec<f64> = g.iter().zip(&s).map(|(gi, si)| gi - r * si).collect();
        let gnorm = norm(&grad);
        if gnorm <= 1e-14 * gn {
            converged = true;
            break;
        }
        let scale = norm(&x);
        let mut dirs = vec![grad.iter().map(|d| d / gnorm).collect::<Vec<f64>>()];
        for _ in 0..(2 * m).min(8) {
            let d: Vec<f64> = (0..m).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
            let dn = norm(&d);
            dirs.push(d.iter().map(|v| v / dn).collect());
        }
        let mut improved = false;
        for d in &dirs {
            let mut y: Vec<f64> = x.iter().zip(d).map(|(xi, di)| xi + eta * scale * di).collect();
            if !rescale(sn, &mut y) {
                continue;
            }
            let v = dot(g, &y);
            if v > best {
                best = v;
                x = y;
                improved = true;
                break;
            }
        }
        if improved {
            eta *= 1.5;
            stalls = 0;
        } else {
            eta *= 0.5;
            stalls += 1;
        }
        let _ = stalls;
    }
    AscentResult { value: best, x, converged }
}
