//! Thin wrappers over nalgebra's complex SVD and Hermitian eigensolver.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::algebra::CMatrix;

/// Singular values in descending order.
pub(crate) fn singular_values(m: &CMatrix) -> Vec<f64> {
    if m.nrows() == 0 || m.ncols() == 0 {
        return Vec::new();
    }
    if m.nrows() == 1 && m.ncols() == 1 {
        return vec![m[(0, 0)].norm()];
    }
    let mut s: Vec<f64> = m.clone().svd(false, false).singular_values.iter().copied().collect();
    s.sort_by(|a, b| b.total_cmp(a));
    s
}

pub(crate) fn spectral_norm(m: &CMatrix) -> f64 {
    singular_values(m).first().copied().unwrap_or(0.0)
}

pub(crate) fn hermitian_part(m: &CMatrix) -> CMatrix {
    (m + m.adjoint()).scale(0.5)
}

/// Eigenvalues (ascending) and matching unit eigenvectors of the Hermitian
/// part of `m`.
pub(crate) fn hermitian_eigen(m: &CMatrix) -> (Vec<f64>, CMatrix) {
    let h = hermitian_part(m);
    let eig = h.symmetric_eigen();
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = DMatrix::from_fn(m.nrows(), order.len(), |r, c| eig.eigenvectors[(r, order[c])]);
    (values, vectors)
}

pub(crate) fn hermitian_eigenvalues(m: &CMatrix) -> Vec<f64> {
    if m.nrows() == 1 {
        return vec![m[(0, 0)].re];
    }
    hermitian_eigen(m).0
}

/// Left singular structure of `m` (r × c): the r singular values of `m`
/// padded with zero columns to at least r columns, descending, together
/// with the full r × r left singular basis (columns, same order).
///
/// Row vectors `w` with `w · m = 0` are the conjugate transposes of the
/// columns whose singular value vanishes.
pub(crate) fn left_singular_basis(m: &CMatrix) -> (Vec<f64>, CMatrix) {
    let (r, c) = m.shape();
    let padded = if c < r {
        let mut p = CMatrix::zeros(r, r);
        p.view_mut((0, 0), (r, c)).copy_from(m);
        p
    } else {
        m.clone()
    };
    let svd = padded.svd(true, false);
    let u = svd.u.expect("left singular vectors requested");
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&a, &b| svd.singular_values[b].total_cmp(&svd.singular_values[a]));
    let values = order.iter().map(|&i| svd.singular_values[i]).collect();
    let basis = DMatrix::from_fn(r, order.len(), |row, col| u[(row, order[col])]);
    (values, basis)
}

/// Minimum-norm least-squares solution of `a · z = b` with the usual
/// machine-precision rank cutoff.
pub(crate) fn lstsq(a: &CMatrix, b: &CMatrix) -> CMatrix {
    let (r, c) = a.shape();
    let svd = a.clone().svd(true, true);
    let smax = svd.singular_values.iter().copied().fold(0.0, f64::max);
    let eps = f64::EPSILON * r.max(c) as f64 * smax;
    svd.solve(b, eps).expect("both singular bases computed")
}

pub(crate) fn frobenius(m: &CMatrix) -> f64 {
    m.iter().map(Complex64::norm_sqr).sum::<f64>().sqrt()
}

/// `(m⁺)*` for a matrix of full column rank: `U Σ⁻¹ V*` from the thin SVD.
/// Returns `None` if some singular value is zero.
pub(crate) fn pinv_adjoint(m: &CMatrix) -> Option<CMatrix> {
    let svd = m.clone().svd(true, true);
    let u = svd.u?;
    let v_t = svd.v_t?;
    if svd.singular_values.iter().any(|&s| s <= 0.0) {
        return None;
    }
    let inv = svd.singular_values.map(|s| Complex64::new(1.0 / s, 0.0));
    Some(u * CMatrix::from_diagonal(&inv) * v_t)
}
