//! Independent numerical oracles and shared fixtures for integration tests.
//!
//! Nothing here calls into nalgebra's decompositions: eigenvalues come from
//! a cyclic Jacobi sweep on the real-symmetric embedding of a Hermitian
//! matrix.
#![allow(dead_code)]

use cstar_frames::{AlgebraElement, AlgebraSignature, CMatrix, Complex64, FrameSystem, ModuleVector};
use proptest::prelude::*;

pub type Dense = Vec<Vec<Complex64>>;

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn dense(m: &CMatrix) -> Dense {
    (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| m[(i, j)]).collect()).collect()
}

pub fn dense_mul(a: &Dense, b: &Dense) -> Dense {
    let (n, k, m) = (a.len(), b.len(), b.first().map_or(0, Vec::len));
    let mut out = vec![vec![Complex64::new(0.0, 0.0); m]; n];
    for i in 0..n {
        for l in 0..k {
            for j in 0..m {
                out[i][j] += a[i][l] * b[l][j];
            }
        }
    }
    out
}

pub fn dense_adjoint(a: &Dense) -> Dense {
    let cols = a.first().map_or(0, Vec::len);
    (0..cols).map(|j| a.iter().map(|row| row[j].conj()).collect()).collect()
}

/// Eigenvalues of a real symmetric matrix, ascending, by cyclic Jacobi.
#[allow(clippy::needless_range_loop)]
pub fn jacobi_eigenvalues(mut a: Vec<Vec<f64>>) -> Vec<f64> {
    let n = a.len();
    for _sweep in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[i][j].powi(2))
            .sum();
        let diag: f64 = (0..n).map(|i| a[i][i].powi(2)).sum();
        if off <= 1e-30 * diag.max(f64::MIN_POSITIVE) {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                if a[p][q].abs() < f64::MIN_POSITIVE {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let cs = 1.0 / (t * t + 1.0).sqrt();
                let sn = t * cs;
                for k in 0..n {
                    let (akp, akq) = (a[k][p], a[k][q]);
                    a[k][p] = cs * akp - sn * akq;
                    a[k][q] = sn * akp + cs * akq;
                }
                for k in 0..n {
                    let (apk, aqk) = (a[p][k], a[q][k]);
                    a[p][k] = cs * apk - sn * aqk;
                    a[q][k] = sn * apk + cs * aqk;
                }
            }
        }
    }
    let mut ev: Vec<f64> = (0..n).map(|i| a[i][i]).collect();
    ev.sort_by(f64::total_cmp);
    ev
}

/// Eigenvalues of a Hermitian matrix via `[[Re, −Im], [Im, Re]]`, whose
/// spectrum is that of `h` with every eigenvalue doubled.
pub fn hermitian_eigenvalues(h: &Dense) -> Vec<f64> {
    let n = h.len();
    let mut a = vec![vec![0.0; 2 * n]; 2 * n];
    for i in 0..n {
        for j in 0..n {
            let z = (h[i][j] + h[j][i].conj()) * 0.5;
            a[i][j] = z.re;
            a[i + n][j + n] = z.re;
            a[i][j + n] = -z.im;
            a[i + n][j] = z.im;
        }
    }
    jacobi_eigenvalues(a).into_iter().step_by(2).collect()
}

pub fn max_singular_value(m: &Dense) -> f64 {
    let gram = dense_mul(&dense_adjoint(m), m);
    hermitian_eigenvalues(&gram).last().copied().unwrap_or(0.0).max(0.0).sqrt()
}

/// `λ_min, λ_max` of a 2×2 Hermitian matrix in closed form.
pub fn eig2(a: f64, b: Complex64, d: f64) -> (f64, f64) {
    let mean = (a + d) / 2.0;
    let r = (((a - d) / 2.0).powi(2) + b.norm_sqr()).sqrt();
    (mean - r, mean + r)
}

pub fn sig(blocks: &[usize]) -> AlgebraSignature {
    AlgebraSignature::new(blocks.to_vec()).unwrap()
}

pub fn scalar_vector(values: &[f64]) -> ModuleVector {
    let s = sig(&[1]);
    ModuleVector::new(&s, values.iter().map(|&v| AlgebraElement::scalar(&s, c(v, 0.0))).collect()).unwrap()
}

/// `{(1,0), (0,1), (1,1)}` over `ℂ`.
pub fn mercedes() -> FrameSystem {
    FrameSystem::new(vec![scalar_vector(&[1.0, 0.0]), scalar_vector(&[0.0, 1.0]), scalar_vector(&[1.0, 1.0])]).unwrap()
}

/// Block `k` of entry `i` of `v`.
pub fn entry_block(v: &ModuleVector, i: usize, k: usize) -> Dense {
    dense(v.entry(i).block(k))
}

/// Frame sum `Σ_j <x, x_j><x_j, x>` evaluated blockwise from raw matrices.
pub fn frame_sum_direct(frame: &FrameSystem, x: &ModuleVector) -> Vec<Dense> {
    let sizes = frame.signature().block_sizes().to_vec();
    sizes
        .iter()
        .enumerate()
        .map(|(k, &n)| {
            let mut acc = vec![vec![c(0.0, 0.0); n]; n];
            for xj in frame.vectors() {
                let ip = inner_direct(x, xj, k);
                let t = dense_mul(&ip, &dense_adjoint(&ip));
                for r in 0..n {
                    for s in 0..n {
                        acc[r][s] += t[r][s];
                    }
                }
            }
            acc
        })
        .collect()
}

/// Block `k` of `<x, y> = Σ_i x_i y_i*` from raw matrices.
pub fn inner_direct(x: &ModuleVector, y: &ModuleVector, k: usize) -> Dense {
    let n = x.signature().block_sizes()[k];
    let mut acc = vec![vec![c(0.0, 0.0); n]; n];
    for i in 0..x.rank() {
        let t = dense_mul(&entry_block(x, i, k), &dense_adjoint(&entry_block(y, i, k)));
        for r in 0..n {
            for s in 0..n {
                acc[r][s] += t[r][s];
            }
        }
    }
    acc
}

// ---- proptest strategies ----

pub const SIGNATURES: [&[usize]; 6] = [&[1], &[2], &[1, 1], &[1, 2], &[2, 2], &[3]];

pub fn signature() -> impl Strategy<Value = AlgebraSignature> {
    prop::sample::select(SIGNATURES.to_vec()).prop_map(sig)
}

fn entries(len: usize) -> impl Strategy<Value = Vec<(f64, f64)>> {
    prop::collection::vec((-2.0f64..2.0, -2.0f64..2.0), len)
}

pub fn element_of(s: AlgebraSignature) -> impl Strategy<Value = AlgebraElement> {
    let len: usize = s.block_sizes().iter().map(|n| n * n).sum();
    entries(len).prop_map(move |v| build_element(&s, &v))
}

pub fn build_element(s: &AlgebraSignature, v: &[(f64, f64)]) -> AlgebraElement {
    let mut it = v.iter();
    let blocks = s
        .block_sizes()
        .iter()
        .map(|&n| {
            CMatrix::from_fn(n, n, |_, _| {
                let (re, im) = it.next().expect("enough entries");
                c(*re, *im)
            })
        })
        .collect();
    AlgebraElement::from_blocks(s, blocks).unwrap()
}

pub fn element() -> impl Strategy<Value = AlgebraElement> {
    signature().prop_flat_map(element_of)
}

pub fn element_pair() -> impl Strategy<Value = (AlgebraElement, AlgebraElement)> {
    signature().prop_flat_map(|s| (element_of(s.clone()), element_of(s)))
}

pub fn vector_of(s: AlgebraSignature, rank: usize) -> impl Strategy<Value = ModuleVector> {
    prop::collection::vec(element_of(s.clone()), rank).prop_map(move |e| ModuleVector::new(&s, e).unwrap())
}

/// A system of `m` vectors in `A^d`.
pub fn system_of(s: AlgebraSignature, d: usize, m: usize) -> impl Strategy<Value = FrameSystem> {
    prop::collection::vec(vector_of(s, d), m).prop_map(|v| FrameSystem::new(v).unwrap())
}

pub fn system() -> impl Strategy<Value = FrameSystem> {
    (signature(), 1usize..=3, 0usize..=2).prop_flat_map(|(s, d, extra)| system_of(s, d, d + extra))
}
