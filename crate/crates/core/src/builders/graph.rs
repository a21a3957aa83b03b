//! Commutative models on weighted graphs.
//!
//! Each edge (i, j) of length ℓ contributes a 2-dimensional block with Dirac
//! operator [[0, 1/ℓ], [1/ℓ, 0]] on which a function f acts as diag(f_i, f_j).
//! Optional kernel points add 1-dimensional slots with zero Dirac operator.
//! The Connes distance between point evaluations is the shortest-path distance.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{c, sparse_from_triplets, C64, ONE};
use crate::operator::HermitianOperator;
use crate::triple::{GraphStructure, SpectralTripleModel};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphSpec {
    pub points: usize,
    /// (i, j, length)
    pub edges: Vec<(usize, usize, f64)>,
    #[serde(default)]
    pub kernel_points: Vec<usize>,
}

impl GraphSpec {
    pub fn path(points: usize) -> Self {
        Self { points, edges: (1..points).map(|i| (i - 1, i, 1.0)).collect(), kernel_points: vec![] }
    }

    pub fn cycle(points: usize) -> Self {
        let mut g = Self::path(points);
        g.edges.push((points - 1, 0, 1.0));
        g
    }

    pub fn two_point(length: f64) -> Self {
        Self { points: 2, edges: vec![(0, 1, length)], kernel_points: vec![] }
    }

    pub fn with_kernel_points(mut self, pts: Vec<usize>) -> Self {
        self.kernel_points = pts;
        self
    }

    pub fn hilbert_dim(&self) -> usize {
        2 * self.edges.len() + self.kernel_points.len()
    }

    /// Point owning each Hilbert slot.
    pub fn slots(&self) -> Vec<usize> {
        let mut s: Vec<usize> = self.edges.iter().flat_map(|&(i, j, _)| [i, j]).collect();
        s.extend(self.kernel_points.iter().copied());
        s
    }
}

pub fn graph_model(spec: &GraphSpec) -> Result<SpectralTripleModel> {
    if spec.points == 0 {
        return Err(Error::Precondition("graph needs at least one point".into()));
    }
    for &(i, j, len) in &spec.edges {
        if i >= spec.points || j >= spec.points || i == j {
            return Err(Error::Precondition(format!("bad edge ({i}, {j})")));
        }
        if !(len > 0.0 && len.is_finite()) {
            return Err(Error::Precondition(format!("edge length must be positive, got {len}")));
        }
    }
    if spec.kernel_points.iter().any(|&p| p >= spec.points) {
        return Err(Error::Precondition("kernel point out of range".into()));
    }
    let slots = spec.slots();
    for p in 0..spec.points {
        if !slots.contains(&p) {
            return Err(Error::Precondition(format!("point {p} is not represented on the Hilbert space")));
        }
    }
    let n = slots.len();
    let mut dirac = Vec::new();
    for (e, &(_, _, len)) in spec.edges.iter().enumerate() {
        let w = c(1.0 / len, 0.0);
        dirac.push((2 * e, 2 * e + 1, w));
        dirac.push((2 * e + 1, 2 * e, w));
    }
    let dirac = HermitianOperator::new(sparse_from_triplets(n, dirac))?;
    let basis = (0..spec.points)
        .map(|p| {
            sparse_from_triplets(
                n,
                slots.iter().enumerate().filter(|(_, &q)| q == p).map(|(s, _)| (s, s, ONE)),
            )
        })
        .collect();
    let grading = sparse_from_triplets(
        n,
        (0..n).map(|s| {
            let sign = if s < 2 * spec.edges.len() && s % 2 == 1 { -1.0 } else { 1.0 };
            (s, s, c(sign, 0.0))
        }),
    );
    let label = format!("graph({} points, {} edges)", spec.points, spec.edges.len());
    SpectralTripleModel::new(label, basis, dirac)?
        .with_graph(GraphStructure { n_points: spec.points, edges: spec.edges.clone() })
        .map(|m| m.with_grading(grading))
}

/// 𝔄 = diagonal 2×2, D = [[0, κ], [κ̄, 0]].
pub fn two_point_model(kappa: C64) -> Result<SpectralTripleModel> {
    if kappa.norm() == 0.0 {
        return Err(Error::Precondition("coupling must be nonzero".into()));
    }
    let dirac = HermitianOperator::new(sparse_from_triplets(2, [(0, 1, kappa), (1, 0, kappa.conj())]))?;
    let basis = vec![sparse_from_triplets(2, [(0, 0, ONE)]), sparse_from_triplets(2, [(1, 1, ONE)])];
    let grading = sparse_from_triplets(2, [(0, 0, ONE), (1, 1, -ONE)]);
    SpectralTripleModel::new("two-point", basis, dirac)?
        .with_graph(GraphStructure { n_points: 2, edges: vec![(0, 1, 1.0 / kappa.norm())] })
        .map(|m| m.with_grading(grading))
}

/// 𝔄 = C acting by scalars, D = diag(values).
pub fn scalar_model(values: &[f64]) -> Result<SpectralTripleModel> {
    if values.is_empty() {
        return Err(Error::Precondition("empty Dirac spectrum".into()));
    }
    let n = values.len();
    let dirac = HermitianOperator::new(sparse_from_triplets(
        n,
        values.iter().enumerate().map(|(i, &v)| (i, i, c(v, 0.0))),
    ))?;
    let id = crate::matrix::sparse_identity(n);
    SpectralTripleModel::new("scalar", vec![id], dirac)?
        .with_graph(GraphStructure { n_points: 1, edges: vec![] })
}
