//! States as density matrices.

use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::matrix::{self, c, hermitian_defect, CMatrix, CVector, SparseMatrix, C64, ZERO};
use crate::triple::SpectralTripleModel;

const TRACE_TOL: f64 = 1e-12;

/// Positive unital functional φ(a) = tr(ρ a).
#[derive(Debug, Clone)]
pub struct StateFunctional {
    density: CMatrix,
    pub label: Option<String>,
}

impl StateFunctional {
    pub fn new(density: CMatrix, label: Option<String>) -> Result<Self> {
        if density.nrows() != density.ncols() {
            return Err(Error::DimensionMismatch { expected: density.nrows(), got: density.ncols() });
        }
        if density.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return Err(Error::NonFinite("density"));
        }
        let tol = matrix::hermitian_tol(matrix::max_abs(&density));
        let defect = hermitian_defect(&density);
        if defect > tol {
            return Err(Error::NotHermitian { defect, tol });
        }
        let tr = density.trace();
        if (tr - c(1.0, 0.0)).norm() > TRACE_TOL {
            return Err(Error::Precondition(format!("density trace {tr} differs from 1")));
        }
        let lo = matrix::dense_spectrum(&density).first().copied().unwrap_or(0.0);
        if lo < -TRACE_TOL {
            return Err(Error::Precondition(format!("density has negative eigenvalue {lo:.3e}")));
        }
        Ok(Self { density, label })
    }

    /// Vector state of a nonzero vector (normalized here).
    pub fn vector(v: &CVector) -> Result<Self> {
        let nrm = v.norm();
        if nrm == 0.0 {
            return Err(Error::Precondition("zero vector".into()));
        }
        let u = v / c(nrm, 0.0);
        let rho = &u * u.adjoint();
        let rho = (&rho + rho.adjoint()) * c(0.5, 0.0);
        Self::new(rho, None)
    }

    pub fn basis_vector(n: usize, i: usize) -> Result<Self> {
        let mut v = CVector::zeros(n);
        v[i] = c(1.0, 0.0);
        Self::vector(&v).map(|s| s.labelled(format!("vector:{i}")))
    }

    /// Evaluation at point `i` of a commutative model, realized as e_i / tr(e_i).
    pub fn point(model: &SpectralTripleModel, i: usize) -> Result<Self> {
        if model.graph().is_none() || i >= model.basis_len() {
            return Err(Error::Precondition(format!("point state {i} is not available for this model")));
        }
        let e = matrix::sparse_to_dense(&model.basis()[i]);
        let tr = e.trace();
        Self::new(e / tr, Some(format!("point:{i}")))
    }

    /// Haar-random pure state.
    pub fn haar_pure<R: Rng>(n: usize, rng: &mut R) -> Self {
        loop {
            let v = CVector::from_fn(n, |_, _| {
                c(rng.sample::<f64, _>(StandardNormal), rng.sample::<f64, _>(StandardNormal))
            });
            if let Ok(s) = Self::vector(&v) {
                return s;
            }
        }
    }

    pub fn labelled(mut self, label: impl Into<String>) -> Self {
        self.label = Some(label.into());
        self
    }

    pub fn dim(&self) -> usize {
        self.density.nrows()
    }

    pub fn density(&self) -> &CMatrix {
        &self.density
    }

    pub fn evaluate(&self, m: &SparseMatrix) -> C64 {
        let mut acc = ZERO;
        for (i, j, v) in m.triplet_iter() {
            acc += self.density[(j, i)] * *v;
        }
        acc
    }

    /// φ ⊗ ψ on the tensor product.
    pub fn tensor(&self, other: &StateFunctional) -> StateFunctional {
        let label = match (&self.label, &other.label) {
            (Some(a), Some(b)) => Some(format!("{a}⊗{b}")),
            _ => None,
        };
        StateFunctional { density: self.density.kronecker(&other.density), label }
    }

    /// W* ρ W for a change of basis W (columns = new basis vectors).
    pub fn conjugate(&self, w: &CMatrix) -> StateFunctional {
        let rho = w.adjoint() * &self.density * w;
        let rho = (&rho + rho.adjoint()) * c(0.5, 0.0);
        StateFunctional { density: rho, label: self.label.clone() }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn validation() {
        assert!(StateFunctional::new(CMatrix::identity(2, 2), None).is_err());
        assert!(StateFunctional::new(CMatrix::identity(2, 2) * c(0.5, 0.0), None).is_ok());
        let neg = CMatrix::from_diagonal(&CVector::from_vec(vec![c(1.5, 0.0), c(-0.5, 0.0)]));
        assert!(StateFunctional::new(neg, None).is_err());
    }

    #[test]
    fn haar_states_are_pure() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let s = StateFunctional::haar_pure(5, &mut rng);
        let purity = (s.density() * s.density()).trace().re;
        assert!((purity - 1.0).abs() < 1e-12);
    }
}
