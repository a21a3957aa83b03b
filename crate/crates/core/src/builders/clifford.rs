//! Anticommuting self-adjoint unitaries from Pauli tensor words.

use crate::error::{Error, Result};
use crate::matrix::{c, sparse_from_dense, CMatrix, SparseMatrix, ONE, ZERO};

pub const MAX_CLIFFORD_DEGREE: usize = 12;

/// γ_0 … γ_d on a spin space of dimension `spin_dim`.
#[derive(Debug, Clone)]
pub struct CliffordSet {
    pub spin_dim: usize,
    pub gammas: Vec<CMatrix>,
}

pub fn pauli_x() -> CMatrix {
    CMatrix::from_row_slice(2, 2, &[ZERO, ONE, ONE, ZERO])
}

pub fn pauli_y() -> CMatrix {
    CMatrix::from_row_slice(2, 2, &[ZERO, c(0.0, -1.0), c(0.0, 1.0), ZERO])
}

pub fn pauli_z() -> CMatrix {
    CMatrix::from_row_slice(2, 2, &[ONE, ZERO, ZERO, -ONE])
}

fn word(factors: &[CMatrix]) -> CMatrix {
    factors
        .iter()
        .skip(1)
        .fold(factors[0].clone(), |acc, f| acc.kronecker(f))
}

/// d+1 gammas. γ_{2p} and γ_{2p+1} carry X resp. Y at qubit p behind a string of Z's;
/// when d+1 is odd the last gamma is Z on every qubit.
pub fn make_clifford(d: usize) -> Result<CliffordSet> {
    if d > MAX_CLIFFORD_DEGREE {
        return Err(Error::Precondition(format!("Clifford degree {d} above cap {MAX_CLIFFORD_DEGREE}")));
    }
    let q = d.div_ceil(2).max(1);
    let id = CMatrix::identity(2, 2);
    let gammas = (0..=d)
        .map(|j| {
            let p = j / 2;
            let factors: Vec<CMatrix> = if p >= q {
                vec![pauli_z(); q]
            } else {
                (0..q)
                    .map(|k| match k.cmp(&p) {
                        std::cmp::Ordering::Less => pauli_z(),
                        std::cmp::Ordering::Equal if j % 2 == 0 => pauli_x(),
                        std::cmp::Ordering::Equal => pauli_y(),
                        std::cmp::Ordering::Greater => id.clone(),
                    })
                    .collect()
            };
            word(&factors)
        })
        .collect();
    Ok(CliffordSet { spin_dim: 1 << q, gammas })
}

impl CliffordSet {
    pub fn count(&self) -> usize {
        self.gammas.len()
    }

    pub fn sparse(&self, j: usize) -> SparseMatrix {
        sparse_from_dense(&self.gammas[j])
    }

    /// Exact check of γ_j* = γ_j, γ_j² = 1 and γ_jγ_k + γ_kγ_j = 0.
    pub fn verify_exact(&self) -> bool {
        let n = self.spin_dim;
        let id = CMatrix::identity(n, n);
        let zero = CMatrix::zeros(n, n);
        for (j, g) in self.gammas.iter().enumerate() {
            if g.adjoint() != *g || g * g != id {
                return false;
            }
            for h in &self.gammas[j + 1..] {
                if g * h + h * g != zero {
                    return false;
                }
            }
        }
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operator::{hermitian_spectrum, HermitianOperator};

    #[test]
    fn degree_zero_is_one_symmetry() {
        let cl = make_clifford(0).unwrap();
        assert_eq!(cl.count(), 1);
        let s = hermitian_spectrum(&HermitianOperator::from_dense(&cl.gammas[0]).unwrap());
        assert_eq!(s, vec![-1.0, 1.0]);
    }

    #[test]
    fn degree_one_pair_has_traceless_product() {
        let cl = make_clifford(1).unwrap();
        assert_eq!((cl.count(), cl.spin_dim), (2, 2));
        assert_eq!((&cl.gammas[0] * &cl.gammas[1]).trace(), ZERO);
        assert!(cl.verify_exact());
    }

    #[test]
    fn degree_three_anticommutes() {
        let cl = make_clifford(3).unwrap();
        assert_eq!((cl.count(), cl.spin_dim), (4, 4));
        for j in 0..4 {
            for k in 0..4 {
                if j != k {
                    let ac = &cl.gammas[j] * &cl.gammas[k] + &cl.gammas[k] * &cl.gammas[j];
                    assert_eq!(ac, CMatrix::zeros(4, 4));
                }
            }
        }
    }

    #[test]
    fn dims_and_cap() {
        let dims: Vec<usize> = (0..=12).map(|d| make_clifford(d).unwrap().spin_dim).collect();
        assert_eq!(dims, vec![2, 2, 2, 4, 4, 8, 8, 16, 16, 32, 32, 64, 64]);
        for d in 0..=12 {
            assert!(make_clifford(d).unwrap().verify_exact(), "d = {d}");
        }
        assert!(make_clifford(13).is_err());
    }
}
