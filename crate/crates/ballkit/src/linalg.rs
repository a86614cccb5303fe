//! Small dense-linear-algebra helpers shared by the operator modules:
//! Hermitian eigendecompositions with deterministic ordering, spectral
//! norms, numerical ranks, and orthonormal range frames.

use nalgebra::{DMatrix, DVector};

use crate::{C64, CMatrix, CVector};

/// Eigendecomposition of a Hermitian matrix, eigenvalues sorted descending,
/// each eigenvector's phase fixed so its first significant entry is real
/// and positive. The input is symmetrized first so tiny Hermiticity
/// violations from rounding do not leak into the output.
pub fn hermitian_eigen(matrix: &CMatrix) -> (DVector<f64>, CMatrix) {
    let herm = (matrix + matrix.adjoint()).scale(0.5);
    let eig = nalgebra::SymmetricEigen::new(herm);
    let n = eig.eigenvalues.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        eig.eigenvalues[b]
            .partial_cmp(&eig.eigenvalues[a])
            .expect("eigenvalues are finite")
    });

    let mut values = DVector::zeros(n);
    let mut vectors = CMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        values[dst] = eig.eigenvalues[src];
        let mut col = eig.eigenvectors.column(src).clone_owned();
        fix_phase(&mut col);
        vectors.set_column(dst, &col);
    }
    (values, vectors)
}

/// Rotate a vector by a unimodular scalar so its first entry of significant
/// modulus becomes real positive. Leaves the zero vector untouched.
pub fn fix_phase(v: &mut CVector) {
    let max_abs = v.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if max_abs == 0.0 {
        return;
    }
    let pivot = v.iter().find(|z| z.norm() > 1e-12 * max_abs).copied();
    if let Some(z) = pivot {
        let phase = z / z.norm();
        let correction = phase.conj();
        for entry in v.iter_mut() {
            *entry *= correction;
        }
    }
}

/// Singular values of a matrix, descending. Falls back to the Hermitian
/// spectrum of the Gram matrix if the SVD iteration does not converge.
pub fn singular_values(matrix: &CMatrix) -> DVector<f64> {
    match matrix.clone().try_svd(false, false, 1e-14, 0) {
        Some(svd) => {
            let mut sv: Vec<f64> = svd.singular_values.iter().copied().collect();
            sv.sort_by(|a, b| b.partial_cmp(a).expect("singular values are finite"));
            DVector::from_vec(sv)
        }
        None => {
            let gram = if matrix.nrows() <= matrix.ncols() {
                matrix * matrix.adjoint()
            } else {
                matrix.adjoint() * matrix
            };
            let (values, _) = hermitian_eigen(&gram);
            values.map(|x| x.max(0.0).sqrt())
        }
    }
}

/// Spectral (operator) norm.
pub fn spectral_norm(matrix: &CMatrix) -> f64 {
    if matrix.nrows() == 0 || matrix.ncols() == 0 {
        return 0.0;
    }
    singular_values(matrix)[0]
}

/// Numerical rank with a relative singular-value threshold.
pub fn rank_with_tol(matrix: &CMatrix, rel_tol: f64) -> usize {
    let sv = singular_values(matrix);
    if sv.is_empty() {
        return 0;
    }
    let cut = rel_tol * sv[0];
    sv.iter().filter(|&&s| s > cut && s > 0.0).count()
}

/// Rank of a wide column collection computed through its (small) Gram
/// matrix; equivalent to `rank_with_tol` on the columns but avoids an SVD
/// of the full rectangle. The threshold is relative on singular values.
pub fn rank_via_gram(columns: &CMatrix, rel_tol: f64) -> usize {
    let gram = columns * columns.adjoint();
    let (values, _) = hermitian_eigen(&gram);
    if values.is_empty() {
        return 0;
    }
    let top = values[0].max(0.0);
    let cut = rel_tol * rel_tol * top;
    values.iter().filter(|&&v| v > cut && v > 0.0).count()
}

/// Orthonormal frame for the column span, via SVD; rank decided by a
/// relative threshold. Columns are phase-fixed for determinism.
pub fn orthonormal_range(matrix: &CMatrix, rel_tol: f64) -> CMatrix {
    let svd = matrix
        .clone()
        .try_svd(true, false, 1e-14, 0)
        .expect("svd of a finite matrix");
    let u = svd.u.expect("u requested");
    let mut pairs: Vec<(f64, usize)> = svd
        .singular_values
        .iter()
        .copied()
        .enumerate()
        .map(|(i, s)| (s, i))
        .collect();
    pairs.sort_by(|a, b| b.0.partial_cmp(&a.0).expect("finite"));
    let top = pairs.first().map(|p| p.0).unwrap_or(0.0);
    let rank = pairs.iter().filter(|(s, _)| *s > rel_tol * top && *s > 0.0).count();

    let mut frame = CMatrix::zeros(matrix.nrows(), rank);
    for (dst, (_, src)) in pairs.iter().take(rank).enumerate() {
        let mut col = u.column(*src).clone_owned();
        fix_phase(&mut col);
        frame.set_column(dst, &col);
    }
    frame
}

/// Max entrywise modulus, for "entrywise to tolerance" checks.
pub fn max_abs_entry(matrix: &CMatrix) -> f64 {
    matrix.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Hermitian positive-semidefinite square root, clamping eigenvalues in
/// `[-clamp_tol, 0)` to zero. Returns the root together with the clamped
/// spectrum and its eigenvector frame (descending order).
pub fn psd_sqrt(
    matrix: &CMatrix,
    clamp_tol: f64,
) -> Result<(CMatrix, DVector<f64>, CMatrix), f64> {
    let (values, vectors) = hermitian_eigen(matrix);
    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    if min < -clamp_tol {
        return Err(min);
    }
    let clamped = values.map(|v| v.max(0.0));
    let n = values.len();
    let mut scaled = vectors.clone();
    for j in 0..n {
        let s = C64::new(clamped[j].sqrt(), 0.0);
        let col = vectors.column(j) * s;
        scaled.set_column(j, &col);
    }
    let root = &scaled * vectors.adjoint();
    Ok((root, clamped, vectors))
}

/// Identity matrix shorthand.
pub fn identity(dim: usize) -> CMatrix {
    DMatrix::identity(dim, dim)
}
