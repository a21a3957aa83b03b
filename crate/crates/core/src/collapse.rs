//! Vertical rescaling D_ε = d_h + d_v/ε, kernel projections, the compressed base triple,
//! and ε sweeps of the spectrum.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::Serialize;

use crate::builders::{CircleBundleBlockModel, DecomposedTripleModel};
use crate::error::{Error, Result};
use crate::estimates::tunnel_bounds_unchecked;
use crate::matrix::{
    self, c, components, dense_spectrum, sparse_adjoint, sparse_block, sparse_from_triplets, CMatrix, SparseMatrix,
    C64,
};
use crate::operator::{hermitian_spectrum, HermitianOperator};
use crate::triple::{AlgebraElement, SpectralTripleModel};

/// Tolerance on ‖[d_h, p]‖ when compressing the base.
pub const COMMUTE_TOL: f64 = 1e-10;

/// d_h + (1/ε)·d_v
pub fn rescale(dec: &DecomposedTripleModel, eps: f64) -> Result<HermitianOperator> {
    check_eps(eps)?;
    if eps == 1.0 {
        return Ok(dec.total().dirac().clone());
    }
    dec.d_h().combine(1.0, dec.d_v(), 1.0 / eps)
}

fn check_eps(eps: f64) -> Result<()> {
    if !(eps > 0.0) || !eps.is_finite() {
        return Err(Error::Precondition(format!("ε must be positive and finite, got {eps}")));
    }
    Ok(())
}

/// Orthonormal basis V of ker d_v (columns) and the projection p = VV*.
#[derive(Debug, Clone)]
pub struct KernelProjection {
    pub basis: SparseMatrix,
    pub projector: SparseMatrix,
}

impl KernelProjection {
    pub fn rank(&self) -> usize {
        self.basis.ncols()
    }

    /// V as a dense n×r matrix.
    pub fn dense_basis(&self) -> CMatrix {
        let n = self.basis.nrows();
        let mut out = CMatrix::zeros(n, self.rank());
        for (r, col, v) in self.basis.triplet_iter() {
            out[(r, col)] = *v;
        }
        out
    }

    /// V* m V
    pub fn compress(&self, m: &SparseMatrix) -> SparseMatrix {
        &(&sparse_adjoint(&self.basis) * m) * &self.basis
    }
}

/// Projection onto the eigenvectors of d_v with |λ| < tol. With `gap = Some(δ)`, an
/// eigenvalue with tol ≤ |λ| < δ is a gap violation.
pub fn kernel_projection(d_v: &HermitianOperator, tol: f64, gap: Option<f64>) -> Result<KernelProjection> {
    let n = d_v.dim();
    let mut entries: Vec<(usize, usize, C64)> = Vec::new();
    let mut rank = 0;
    for be in d_v.block_eigen() {
        for (k, &lam) in be.values.iter().enumerate() {
            if lam.abs() < tol {
                let col = be.vectors.column(k);
                let scale = col.iter().fold(0.0_f64, |m, z| m.max(z.norm()));
                for (r, &i) in be.indices.iter().enumerate() {
                    if col[r].norm() > 1e-15 * scale {
                        entries.push((i, rank, col[r]));
                    }
                }
                rank += 1;
            } else if let Some(delta) = gap {
                if lam.abs() < delta * (1.0 - 1e-12) {
                    return Err(Error::GapViolation { value: lam, tol, gap: delta });
                }
            }
        }
    }
    let mut coo = nalgebra_sparse::CooMatrix::new(n, rank);
    for (i, j, v) in entries {
        coo.push(i, j, v);
    }
    let basis = SparseMatrix::from(&coo);
    let projector = matrix::drop_zeros(&(&basis * &sparse_adjoint(&basis)));
    Ok(KernelProjection { basis, projector })
}

/// Kernel projection of a decomposed model with its default tolerance and gap.
pub fn model_kernel(dec: &DecomposedTripleModel) -> Result<KernelProjection> {
    kernel_projection(dec.d_v(), dec.kernel_tol(), Some(dec.vertical_gap()))
}

/// ‖[d_h, p]‖
pub fn horizontal_kernel_defect(dec: &DecomposedTripleModel, kp: &KernelProjection) -> Result<f64> {
    Ok(matrix::sparse_op_norm(&matrix::sparse_commutator(dec.d_h().matrix(), &kp.projector)?))
}

/// The base triple (𝔅, ker d_v, V* d_h V).
pub fn compress_base(dec: &DecomposedTripleModel) -> Result<SpectralTripleModel> {
    let kp = model_kernel(dec)?;
    compress_base_with(dec, &kp)
}

pub fn compress_base_with(dec: &DecomposedTripleModel, kp: &KernelProjection) -> Result<SpectralTripleModel> {
    if kp.rank() == 0 {
        return Err(Error::NoKernel);
    }
    let defect = horizontal_kernel_defect(dec, kp)?;
    if defect > COMMUTE_TOL * dec.d_h().norm().max(1.0) {
        return Err(Error::Precondition(format!("[d_h, p] has norm {defect:.3e}")));
    }
    let d_b = symmetrize(&kp.compress(dec.d_h().matrix()));
    let basis = dec.base_matrices().iter().map(|b| matrix::drop_zeros(&kp.compress(b))).collect();
    SpectralTripleModel::new(format!("base of {}", dec.total().label()), basis, HermitianOperator::new(d_b)?)
}

fn symmetrize(m: &SparseMatrix) -> SparseMatrix {
    let s = matrix::sparse_combination(m.nrows(), [(c(0.5, 0.0), m), (c(0.5, 0.0), &sparse_adjoint(m))]);
    matrix::drop_zeros(&s)
}

pub fn conditional_expectation(dec: &DecomposedTripleModel, a: &AlgebraElement) -> AlgebraElement {
    dec.expectation(a)
}

/// Hausdorff distance between s1 ∩ [−Λ, Λ] and s2 ∩ [−Λ, Λ]. 0 when both are empty,
/// +∞ when exactly one is.
pub fn hausdorff_window(s1: &[f64], s2: &[f64], window: f64) -> f64 {
    let a: Vec<f64> = s1.iter().copied().filter(|x| x.abs() <= window).collect();
    let b: Vec<f64> = s2.iter().copied().filter(|x| x.abs() <= window).collect();
    match (a.is_empty(), b.is_empty()) {
        (true, true) => 0.0,
        (true, false) | (false, true) => f64::INFINITY,
        _ => directed(&a, &b).max(directed(&b, &a)),
    }
}

fn directed(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .map(|x| b.iter().map(|y| (x - y).abs()).fold(f64::INFINITY, f64::min))
        .fold(0.0, f64::max)
}

/// 2^0, 2^−1, …, 2^−12
pub fn default_eps_grid() -> Vec<f64> {
    (0..=12).map(|i| 0.5f64.powi(i)).collect()
}

/// One eigenvalue followed across the grid.
#[derive(Debug, Clone, Serialize)]
pub struct Track {
    /// Sector label; empty for unlabelled (heuristic) tracks.
    pub sector: Vec<i64>,
    /// Position in ascending order within the sector.
    pub index: usize,
    pub values: Vec<f64>,
}

impl Track {
    pub fn is_zero_sector(&self) -> bool {
        self.sector.iter().all(|&k| k == 0)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct EpsSweepResult {
    pub eps_grid: Vec<f64>,
    pub spectra: Vec<Vec<f64>>,
    pub tracks: Vec<Track>,
    pub window: f64,
    pub hausdorff_curve: Vec<f64>,
    pub bound_curve: Vec<f64>,
    pub base_spectrum: Vec<f64>,
    /// Tracks come from sorted order rather than sector labels.
    pub heuristic: bool,
    pub fiber_length: Option<f64>,
    pub vertical_gap: f64,
    pub horizontal_norm: f64,
}

fn check_grid(grid: &[f64]) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::Precondition("empty ε grid".into()));
    }
    for &e in grid {
        check_eps(e)?;
    }
    if grid.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::Precondition("ε grid must be strictly descending".into()));
    }
    Ok(())
}

fn check_window(window: f64, limit: f64) -> Result<()> {
    if !(window > 0.0) || !window.is_finite() {
        return Err(Error::Precondition(format!("window must be positive and finite, got {window}")));
    }
    if window > limit * (1.0 + 1e-12) {
        return Err(Error::WindowExceeded { window, limit });
    }
    Ok(())
}

/// True when neither d_h nor d_v couples different sectors.
fn labels_respected(dec: &DecomposedTripleModel, labels: &[Vec<i64>]) -> bool {
    [dec.d_h(), dec.d_v()]
        .iter()
        .all(|op| op.matrix().triplet_iter().all(|(r, col, _)| labels[r] == labels[col]))
}

fn sector_spectra(op: &HermitianOperator, labels: &[Vec<i64>]) -> BTreeMap<Vec<i64>, Vec<f64>> {
    let mut out: BTreeMap<Vec<i64>, Vec<f64>> = BTreeMap::new();
    for idx in components(op.matrix()) {
        let block = sparse_block(op.matrix(), &idx);
        out.entry(labels[idx[0]].clone()).or_default().extend(dense_spectrum(&block));
    }
    for v in out.values_mut() {
        v.sort_by(f64::total_cmp);
    }
    out
}

fn tracks_from(per_eps: &[BTreeMap<Vec<i64>, Vec<f64>>]) -> Vec<Track> {
    let mut tracks = Vec::new();
    for (sector, first) in &per_eps[0] {
        for index in 0..first.len() {
            tracks.push(Track {
                sector: sector.clone(),
                index,
                values: per_eps.iter().map(|m| m[sector][index]).collect(),
            });
        }
    }
    tracks
}

/// Spectra of D_ε over a descending grid, sector tracks, windowed Hausdorff distances to
/// the base spectrum and the tunnel bound M_ε.
pub fn sweep(dec: &DecomposedTripleModel, eps_grid: &[f64], window: f64) -> Result<EpsSweepResult> {
    check_grid(eps_grid)?;
    check_window(window, dec.reliable_window())?;
    let base = compress_base(dec)?;
    let base_spectrum = hermitian_spectrum(base.dirac());
    let labels = dec.sector_labels().filter(|l| labels_respected(dec, l));
    let heuristic = labels.is_none();
    let n = dec.hilbert_dim();
    let flat = vec![Vec::new(); n];
    let labels = labels.unwrap_or(&flat);

    let per_eps: Vec<BTreeMap<Vec<i64>, Vec<f64>>> = eps_grid
        .par_iter()
        .map(|&e| rescale(dec, e).map(|op| sector_spectra(&op, labels)))
        .collect::<Result<_>>()?;
    let spectra: Vec<Vec<f64>> = per_eps
        .iter()
        .map(|m| {
            let mut all: Vec<f64> = m.values().flatten().copied().collect();
            all.sort_by(f64::total_cmp);
            all
        })
        .collect();
    let hausdorff_curve = spectra.iter().map(|s| hausdorff_window(s, &base_spectrum, window)).collect();
    let (delta, k, m) = (dec.vertical_gap(), dec.mvt_constant(), dec.comparison_constant());
    let bound_curve = eps_grid.iter().map(|&e| tunnel_bounds_unchecked(e, delta, k, m).m_eps).collect();
    Ok(EpsSweepResult {
        eps_grid: eps_grid.to_vec(),
        tracks: tracks_from(&per_eps),
        spectra,
        window,
        hausdorff_curve,
        bound_curve,
        base_spectrum,
        heuristic,
        fiber_length: dec.fiber_length(),
        vertical_gap: delta,
        horizontal_norm: dec.d_h().norm(),
    })
}

/// [`sweep`] for the circle-bundle block model, one 2×2 block per (j, k).
pub fn sweep_blocks(model: &CircleBundleBlockModel, eps_grid: &[f64], window: f64) -> Result<EpsSweepResult> {
    check_grid(eps_grid)?;
    check_window(window, model.reliable_window())?;
    let per_eps: Vec<BTreeMap<Vec<i64>, Vec<f64>>> = eps_grid
        .par_iter()
        .map(|&e| {
            let mut out: BTreeMap<Vec<i64>, Vec<f64>> = BTreeMap::new();
            for k in model.ks() {
                for j in 0..model.mu.len() {
                    out.entry(vec![k]).or_default().extend(model.eigenvalues(j, k, e)?);
                }
            }
            for v in out.values_mut() {
                v.sort_by(f64::total_cmp);
            }
            Ok(out)
        })
        .collect::<Result<_>>()?;
    let spectra: Vec<Vec<f64>> = per_eps
        .iter()
        .map(|m| {
            let mut all: Vec<f64> = m.values().flatten().copied().collect();
            all.sort_by(f64::total_cmp);
            all
        })
        .collect();
    let mut base_spectrum: Vec<f64> = model.mu.iter().flat_map(|&m| [-m.abs(), m.abs()]).collect();
    base_spectrum.sort_by(f64::total_cmp);
    let hausdorff_curve = spectra.iter().map(|s| hausdorff_window(s, &base_spectrum, window)).collect();
    let kmin = model.ks().filter(|&k| k != 0).map(|k| k.unsigned_abs()).min();
    let delta = kmin.map_or(f64::INFINITY, |k| k as f64 / model.ell);
    let bound_curve = eps_grid
        .iter()
        .map(|&e| tunnel_bounds_unchecked(e, delta, std::f64::consts::PI * model.ell, 1.0).m_eps)
        .collect();
    let horizontal_norm = model.mu.iter().fold(0.0_f64, |a, m| a.max(m.abs()));
    Ok(EpsSweepResult {
        eps_grid: eps_grid.to_vec(),
        tracks: tracks_from(&per_eps),
        spectra,
        window,
        hausdorff_curve,
        bound_curve,
        base_spectrum,
        heuristic: false,
        fiber_length: Some(model.ell),
        vertical_gap: delta,
        horizontal_norm,
    })
}

/// ‖exp(itD_ε)V − V exp(itD_B)‖ with D_B = V* d_h V.
pub fn unitary_restriction_check(dec: &DecomposedTripleModel, eps: f64, t: f64) -> Result<f64> {
    let kp = model_kernel(dec)?;
    unitary_restriction_check_with(dec, &kp, eps, t)
}

pub fn unitary_restriction_check_with(
    dec: &DecomposedTripleModel,
    kp: &KernelProjection,
    eps: f64,
    t: f64,
) -> Result<f64> {
    if !t.is_finite() {
        return Err(Error::Precondition("t must be finite".into()));
    }
    let d_eps = rescale(dec, eps)?;
    let r = kp.rank();
    if r == 0 {
        return Ok(0.0);
    }
    let v = kp.dense_basis();
    let d_b = HermitianOperator::new(symmetrize(&kp.compress(dec.d_h().matrix())))?;
    let lhs = d_eps.exp_i_t_apply(t, &v);
    let rhs = &v * d_b.exp_i_t_apply(t, &CMatrix::identity(r, r));
    let diff = lhs - rhs;
    let gram = diff.adjoint() * &diff;
    let top = matrix::dense_spectrum(&gram).last().copied().unwrap_or(0.0);
    Ok(top.max(0.0).sqrt())
}

/// Limit estimate of a sector-0 track.
#[derive(Debug, Clone, Serialize)]
pub struct ZeroTrackRow {
    pub sector: Vec<i64>,
    pub index: usize,
    pub limit: f64,
    /// Largest change over the last three grid points.
    pub cauchy: f64,
    pub base_distance: f64,
}

/// Growth of a nonzero-sector track.
#[derive(Debug, Clone, Serialize)]
pub struct NonzeroTrackRow {
    pub sector: Vec<i64>,
    pub index: usize,
    /// ℓ·ε·|λ(ε)| when ℓ is known, otherwise ε·|λ(ε)|.
    pub scaled: Vec<f64>,
    /// |k| for one-dimensional sectors of models with known ℓ.
    pub target: Option<f64>,
    /// |scaled − target| at the smallest ε.
    pub deviation: Option<f64>,
    /// min over ε of |λ(ε)| − (δ/ε − ‖d_h‖).
    pub lower_bound_margin: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct TrackReport {
    pub zero_sector: Vec<ZeroTrackRow>,
    pub nonzero_sector: Vec<NonzeroTrackRow>,
}

pub fn track_convergence_report(sweep: &EpsSweepResult, base_spec: &[f64]) -> TrackReport {
    let mut zero_sector = Vec::new();
    let mut nonzero_sector = Vec::new();
    for tr in &sweep.tracks {
        if tr.is_zero_sector() && !sweep.heuristic {
            let limit = *tr.values.last().expect("nonempty grid");
            let tail = &tr.values[tr.values.len().saturating_sub(3)..];
            let cauchy = tail.iter().fold(0.0_f64, |m, v| m.max((v - limit).abs()));
            let base_distance = base_spec.iter().map(|b| (b - limit).abs()).fold(f64::INFINITY, f64::min);
            zero_sector.push(ZeroTrackRow { sector: tr.sector.clone(), index: tr.index, limit, cauchy, base_distance });
            continue;
        }
        if sweep.heuristic {
            continue;
        }
        let ell = sweep.fiber_length;
        let scaled: Vec<f64> =
            tr.values.iter().zip(&sweep.eps_grid).map(|(v, e)| ell.unwrap_or(1.0) * e * v.abs()).collect();
        let target = match (ell, tr.sector.as_slice()) {
            (Some(_), [k]) => Some(k.unsigned_abs() as f64),
            _ => None,
        };
        let deviation = target.map(|t| (scaled.last().expect("nonempty grid") - t).abs());
        let lower_bound_margin = tr
            .values
            .iter()
            .zip(&sweep.eps_grid)
            .map(|(v, e)| v.abs() - (sweep.vertical_gap / e - sweep.horizontal_norm))
            .fold(f64::INFINITY, f64::min);
        nonzero_sector.push(NonzeroTrackRow {
            sector: tr.sector.clone(),
            index: tr.index,
            scaled,
            target,
            deviation,
            lower_bound_margin,
        });
    }
    TrackReport { zero_sector, nonzero_sector }
}

/// Diagonal operator from real entries.
pub fn diagonal_operator(values: &[f64]) -> Result<HermitianOperator> {
    HermitianOperator::new(sparse_from_triplets(
        values.len(),
        values.iter().enumerate().map(|(i, &v)| (i, i, c(v, 0.0))),
    ))
}
