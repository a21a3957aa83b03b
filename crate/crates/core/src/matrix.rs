//! Matrix primitives: dense helpers, sparse assembly, commutators, norms, spectra.
//!
//! Dense matrices are `DMatrix<Complex64>`. Operators on large Hilbert spaces are
//! kept in CSR form; spectra and norms of a sparse operator are computed on the
//! connected components of its nonzero pattern, each handled by a dense solver.

use nalgebra::{DMatrix, DVector};
use nalgebra_sparse::{CooMatrix, CsrMatrix};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;
pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;
pub type SparseMatrix = CsrMatrix<Complex64>;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

/// Relative Hermiticity tolerance.
pub const HERMITIAN_RTOL: f64 = 1e-12;

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub fn commutator(a: &CMatrix, b: &CMatrix) -> Result<CMatrix> {
    check_square(a)?;
    check_square(b)?;
    if a.nrows() != b.nrows() {
        return Err(Error::DimensionMismatch { expected: a.nrows(), got: b.nrows() });
    }
    Ok(a * b - b * a)
}

fn check_square(a: &CMatrix) -> Result<()> {
    if a.nrows() != a.ncols() {
        return Err(Error::DimensionMismatch { expected: a.nrows(), got: a.ncols() });
    }
    Ok(())
}

pub fn max_abs(a: &CMatrix) -> f64 {
    a.iter().fold(0.0_f64, |m, z| m.max(z.norm()))
}

fn all_finite(a: &CMatrix) -> bool {
    a.iter().all(|z| z.re.is_finite() && z.im.is_finite())
}

/// max |a_ij - conj(a_ji)|
pub fn hermitian_defect(a: &CMatrix) -> f64 {
    let n = a.nrows();
    let mut d = 0.0_f64;
    for i in 0..n {
        for j in i..n {
            d = d.max((a[(i, j)] - a[(j, i)].conj()).norm());
        }
    }
    d
}

pub fn hermitian_tol(max_entry: f64) -> f64 {
    HERMITIAN_RTOL * (1.0 + max_entry)
}

/// Largest singular value.
pub fn op_norm(a: &CMatrix) -> Result<f64> {
    if !all_finite(a) {
        return Err(Error::NonFinite("op_norm input"));
    }
    Ok(op_norm_unchecked(a))
}

pub(crate) fn op_norm_unchecked(a: &CMatrix) -> f64 {
    if a.is_empty() {
        return 0.0;
    }
    let scale = max_abs(a);
    if scale == 0.0 {
        return 0.0;
    }
    if a.nrows() == a.ncols() {
        // Hermitian and anti-Hermitian inputs (commutators of self-adjoint
        // elements) go straight to the Hermitian eigensolver.
        let tol = 1e-13 * scale;
        if hermitian_defect(a) <= tol {
            return max_abs_eigenvalue(&symmetrize(a));
        }
        let ia = a * I;
        if hermitian_defect(&ia) <= tol {
            return max_abs_eigenvalue(&symmetrize(&ia));
        }
    }
    let gram = if a.nrows() >= a.ncols() { a.adjoint() * a } else { a * a.adjoint() };
    let top = gram
        .symmetric_eigenvalues()
        .iter()
        .fold(0.0_f64, |m, &v| m.max(v));
    top.max(0.0).sqrt()
}

fn symmetrize(a: &CMatrix) -> CMatrix {
    (a + a.adjoint()) * c(0.5, 0.0)
}

fn max_abs_eigenvalue(h: &CMatrix) -> f64 {
    h.symmetric_eigenvalues().iter().fold(0.0_f64, |m, v| m.max(v.abs()))
}

/// Ascending eigenvalues of a dense Hermitian matrix.
pub fn dense_spectrum(h: &CMatrix) -> Vec<f64> {
    if h.nrows() == 1 {
        return vec![h[(0, 0)].re];
    }
    let mut ev: Vec<f64> = h.symmetric_eigenvalues().iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    ev
}

/// Eigenvalues (ascending) and matching eigenvector columns.
pub fn dense_eigen(h: &CMatrix) -> (Vec<f64>, CMatrix) {
    let n = h.nrows();
    if n == 1 {
        return (vec![h[(0, 0)].re], CMatrix::identity(1, 1));
    }
    let eig = h.clone().symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = CMatrix::from_fn(n, n, |r, k| eig.eigenvectors[(r, order[k])]);
    (values, vectors)
}

/// ‖ξ‖ + ‖Dξ‖ for a dense operator.
pub fn graph_norm_dense(d: &CMatrix, xi: &CVector) -> Result<f64> {
    if d.ncols() != xi.len() {
        return Err(Error::DimensionMismatch { expected: d.ncols(), got: xi.len() });
    }
    Ok(xi.norm() + (d * xi).norm())
}

pub fn kron_dense(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

// Sparse helpers

pub fn sparse_from_triplets(n: usize, entries: impl IntoIterator<Item = (usize, usize, C64)>) -> SparseMatrix {
    let mut coo = CooMatrix::new(n, n);
    for (i, j, v) in entries {
        if v != ZERO {
            coo.push(i, j, v);
        }
    }
    CsrMatrix::from(&coo)
}

pub fn sparse_zero(n: usize) -> SparseMatrix {
    CsrMatrix::zeros(n, n)
}

pub fn sparse_identity(n: usize) -> SparseMatrix {
    CsrMatrix::identity(n)
}

pub fn sparse_from_dense(a: &CMatrix) -> SparseMatrix {
    let n = a.nrows();
    let mut coo = CooMatrix::new(n, a.ncols());
    for i in 0..n {
        for j in 0..a.ncols() {
            let v = a[(i, j)];
            if v != ZERO {
                coo.push(i, j, v);
            }
        }
    }
    CsrMatrix::from(&coo)
}

pub fn sparse_to_dense(a: &SparseMatrix) -> CMatrix {
    let mut d = CMatrix::zeros(a.nrows(), a.ncols());
    for (i, j, v) in a.triplet_iter() {
        d[(i, j)] += *v;
    }
    d
}

pub fn sparse_scale(a: &SparseMatrix, s: C64) -> SparseMatrix {
    let mut out = a.clone();
    for v in out.values_mut() {
        *v *= s;
    }
    out
}

pub fn sparse_adjoint(a: &SparseMatrix) -> SparseMatrix {
    let mut t = a.transpose();
    for v in t.values_mut() {
        *v = v.conj();
    }
    t
}

/// Linear combination Σ c_i A_i; all inputs share one shape.
pub fn sparse_combination<'a>(
    n: usize,
    terms: impl IntoIterator<Item = (C64, &'a SparseMatrix)>,
) -> SparseMatrix {
    let mut coo = CooMatrix::new(n, n);
    for (coef, m) in terms {
        if coef == ZERO {
            continue;
        }
        for (i, j, v) in m.triplet_iter() {
            coo.push(i, j, coef * *v);
        }
    }
    drop_zeros(&CsrMatrix::from(&coo))
}

/// Removes stored entries that are exactly zero.
pub fn drop_zeros(a: &SparseMatrix) -> SparseMatrix {
    if a.values().iter().all(|v| *v != ZERO) {
        return a.clone();
    }
    let mut coo = CooMatrix::new(a.nrows(), a.ncols());
    for (i, j, v) in a.triplet_iter() {
        if *v != ZERO {
            coo.push(i, j, *v);
        }
    }
    CsrMatrix::from(&coo)
}

pub fn sparse_commutator(a: &SparseMatrix, b: &SparseMatrix) -> Result<SparseMatrix> {
    if a.nrows() != b.nrows() || a.ncols() != b.ncols() || a.nrows() != a.ncols() {
        return Err(Error::DimensionMismatch { expected: a.nrows(), got: b.nrows() });
    }
    let ab = a * b;
    let ba = b * a;
    Ok(drop_zeros(&(&ab - &ba)))
}

pub fn sparse_kron(a: &SparseMatrix, b: &SparseMatrix) -> SparseMatrix {
    let (m, n) = (a.nrows(), b.nrows());
    let mut coo = CooMatrix::new(m * n, a.ncols() * b.ncols());
    for (i, j, x) in a.triplet_iter() {
        for (k, l, y) in b.triplet_iter() {
            let v = *x * *y;
            if v != ZERO {
                coo.push(i * n + k, j * b.ncols() + l, v);
            }
        }
    }
    CsrMatrix::from(&coo)
}

pub fn sparse_max_abs(a: &SparseMatrix) -> f64 {
    a.values().iter().fold(0.0_f64, |m, v| m.max(v.norm()))
}

pub fn sparse_frobenius(a: &SparseMatrix) -> f64 {
    a.values().iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
}

/// Frobenius inner product tr(A* B).
pub fn frobenius_inner(a: &SparseMatrix, b: &SparseMatrix) -> C64 {
    let mut acc = ZERO;
    for i in 0..a.nrows() {
        let ra = a.row(i);
        let rb = b.row(i);
        let (ca, va) = (ra.col_indices(), ra.values());
        let (cb, vb) = (rb.col_indices(), rb.values());
        let (mut p, mut q) = (0, 0);
        while p < ca.len() && q < cb.len() {
            match ca[p].cmp(&cb[q]) {
                std::cmp::Ordering::Less => p += 1,
                std::cmp::Ordering::Greater => q += 1,
                std::cmp::Ordering::Equal => {
                    acc += va[p].conj() * vb[q];
                    p += 1;
                    q += 1;
                }
            }
        }
    }
    acc
}

pub fn sparse_trace(a: &SparseMatrix) -> C64 {
    a.triplet_iter().filter(|(i, j, _)| i == j).map(|(_, _, v)| *v).sum()
}

pub fn sparse_mul_vec(a: &SparseMatrix, x: &CVector) -> CVector {
    let mut y = CVector::zeros(a.nrows());
    for (i, j, v) in a.triplet_iter() {
        y[i] += *v * x[j];
    }
    y
}

pub fn sparse_hermitian_defect(a: &SparseMatrix) -> f64 {
    let diff = a - &sparse_adjoint(a);
    sparse_max_abs(&diff)
}

/// Connected components of the undirected nonzero pattern, ordered by smallest index.
pub fn components(a: &SparseMatrix) -> Vec<Vec<usize>> {
    let n = a.nrows();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    for (i, j, v) in a.triplet_iter() {
        if *v == ZERO || i == j {
            continue;
        }
        let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
        if ri != rj {
            let (lo, hi) = if ri < rj { (ri, rj) } else { (rj, ri) };
            parent[hi] = lo;
        }
    }
    let mut slot = vec![usize::MAX; n];
    let mut groups: Vec<Vec<usize>> = Vec::new();
    for i in 0..n {
        let r = find(&mut parent, i);
        if slot[r] == usize::MAX {
            slot[r] = groups.len();
            groups.push(Vec::new());
        }
        groups[slot[r]].push(i);
    }
    groups
}

/// Dense principal submatrix on `idx`.
pub fn sparse_block(a: &SparseMatrix, idx: &[usize]) -> CMatrix {
    let mut pos = std::collections::HashMap::with_capacity(idx.len());
    for (k, &i) in idx.iter().enumerate() {
        pos.insert(i, k);
    }
    let mut d = CMatrix::zeros(idx.len(), idx.len());
    for (k, &i) in idx.iter().enumerate() {
        let row = a.row(i);
        for (&j, v) in row.col_indices().iter().zip(row.values()) {
            if let Some(&l) = pos.get(&j) {
                d[(k, l)] += *v;
            }
        }
    }
    d
}

/// Operator norm of a sparse matrix, block by block. A block whose pattern is bipartite
/// between index sets S and T is reduced to its off-diagonal parts A = a[S,T], B = a[T,S].
pub fn sparse_op_norm(a: &SparseMatrix) -> f64 {
    if a.nnz() == 0 {
        return 0.0;
    }
    components(a)
        .iter()
        .map(|comp| {
            if comp.len() == 1 {
                let i = comp[0];
                return a.get_entry(i, i).map(|e| e.into_value().norm()).unwrap_or(0.0);
            }
            match bipartition(a, comp) {
                Some((s, t)) => {
                    let ab = sparse_rect_block(a, &s, &t);
                    let ba = sparse_rect_block(a, &t, &s);
                    let scale = max_abs(&ab).max(max_abs(&ba));
                    let adj = ab.adjoint();
                    let skew = max_abs(&(&ba - &adj)).min(max_abs(&(&ba + &adj)));
                    if skew <= 1e-13 * scale {
                        op_norm_unchecked(&ab)
                    } else {
                        op_norm_unchecked(&ab).max(op_norm_unchecked(&ba))
                    }
                }
                None => op_norm_unchecked(&sparse_block(a, comp)),
            }
        })
        .fold(0.0, f64::max)
}

/// Two-colouring of the pattern restricted to `comp`, if it has no diagonal entries and no odd cycles.
fn bipartition(a: &SparseMatrix, comp: &[usize]) -> Option<(Vec<usize>, Vec<usize>)> {
    let mut pos = std::collections::HashMap::with_capacity(comp.len());
    for (k, &i) in comp.iter().enumerate() {
        pos.insert(i, k);
    }
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); comp.len()];
    for (k, &i) in comp.iter().enumerate() {
        let row = a.row(i);
        for (&j, v) in row.col_indices().iter().zip(row.values()) {
            if *v == ZERO {
                continue;
            }
            if j == i {
                return None;
            }
            if let Some(&l) = pos.get(&j) {
                adj[k].push(l);
                adj[l].push(k);
            }
        }
    }
    let mut colour = vec![u8::MAX; comp.len()];
    let mut stack = vec![0];
    colour[0] = 0;
    while let Some(k) = stack.pop() {
        for &l in &adj[k] {
            if colour[l] == u8::MAX {
                colour[l] = 1 - colour[k];
                stack.push(l);
            } else if colour[l] == colour[k] {
                return None;
            }
        }
    }
    let s = comp.iter().zip(&colour).filter(|(_, &c)| c == 0).map(|(&i, _)| i).collect();
    let t = comp.iter().zip(&colour).filter(|(_, &c)| c == 1).map(|(&i, _)| i).collect();
    Some((s, t))
}

/// Dense submatrix a[rows, cols].
pub fn sparse_rect_block(a: &SparseMatrix, rows: &[usize], cols: &[usize]) -> CMatrix {
    let mut pos = std::collections::HashMap::with_capacity(cols.len());
    for (k, &j) in cols.iter().enumerate() {
        pos.insert(j, k);
    }
    let mut d = CMatrix::zeros(rows.len(), cols.len());
    for (k, &i) in rows.iter().enumerate() {
        let row = a.row(i);
        for (&j, v) in row.col_indices().iter().zip(row.values()) {
            if let Some(&l) = pos.get(&j) {
                d[(k, l)] += *v;
            }
        }
    }
    d
}

pub fn is_finite_sparse(a: &SparseMatrix) -> bool {
    a.values().iter().all(|z| z.re.is_finite() && z.im.is_finite())
}
