//! Finite-dimensional C*-algebras `M_{n_1}(C) ⊕ … ⊕ M_{n_K}(C)`.
//!
//! Elements are stored as one dense complex matrix per block. Norm,
//! positivity and invertibility are decided spectrally block by block.

use std::fmt;
use std::sync::Arc;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{structural, Error, Result};
use crate::linalg;

pub type CMatrix = DMatrix<Complex64>;

/// Block structure `(n_1, …, n_K)` of the algebra.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct AlgebraSignature {
    blocks: Arc<[usize]>,
}

impl AlgebraSignature {
    pub fn new(block_sizes: impl Into<Vec<usize>>) -> Result<Self> {
        let blocks: Vec<usize> = block_sizes.into();
        if blocks.is_empty() {
            return Err(structural("algebra signature needs at least one block"));
        }
        if let Some(k) = blocks.iter().position(|&n| n == 0) {
            return Err(structural(format!("block {k} has size 0")));
        }
        Ok(Self { blocks: blocks.into() })
    }

    /// The commutative algebra `C^n`, signature `(1, …, 1)`.
    pub fn diagonal(n: usize) -> Result<Self> {
        Self::new(vec![1; n])
    }

    pub fn block_sizes(&self) -> &[usize] {
        &self.blocks
    }

    pub fn num_blocks(&self) -> usize {
        self.blocks.len()
    }

    /// Complex dimension `Σ n_k²`.
    pub fn dim(&self) -> usize {
        self.blocks.iter().map(|n| n * n).sum()
    }

    pub(crate) fn ensure_same(&self, other: &Self) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(structural(format!("signature mismatch: {self:?} vs {other:?}")))
        }
    }
}

impl fmt::Debug for AlgebraSignature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", &*self.blocks)
    }
}

/// Relative and absolute tolerances shared by every spectral decision of
/// one computation.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Tolerance {
    pub rel_tol: f64,
    pub abs_tol: f64,
}

impl Default for Tolerance {
    fn default() -> Self {
        Self { rel_tol: 1e-9, abs_tol: 1e-12 }
    }
}

impl Tolerance {
    pub fn new(rel_tol: f64, abs_tol: f64) -> Result<Self> {
        if !(rel_tol > 0.0 && rel_tol.is_finite()) {
            return Err(Error::Domain(format!("rel_tol must be positive, got {rel_tol}")));
        }
        if !(abs_tol >= 0.0 && abs_tol.is_finite()) {
            return Err(Error::Domain(format!("abs_tol must be nonnegative, got {abs_tol}")));
        }
        Ok(Self { rel_tol, abs_tol })
    }

    /// Absolute threshold for a quantity of the given magnitude:
    /// `max(abs_tol, rel_tol · magnitude)`.
    pub fn threshold(&self, magnitude: f64) -> f64 {
        self.abs_tol.max(self.rel_tol * magnitude)
    }
}

/// An element of the algebra: one `n_k × n_k` complex matrix per block.
#[derive(Clone, PartialEq)]
pub struct AlgebraElement {
    signature: AlgebraSignature,
    blocks: Vec<CMatrix>,
}

impl fmt::Debug for AlgebraElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list()
            .entries(self.blocks.iter().map(|b| {
                (0..b.nrows())
                    .map(|r| (0..b.ncols()).map(|c| (b[(r, c)].re, b[(r, c)].im)).collect::<Vec<_>>())
                    .collect::<Vec<_>>()
            }))
            .finish()
    }
}

impl AlgebraElement {
    pub fn from_blocks(signature: &AlgebraSignature, blocks: Vec<CMatrix>) -> Result<Self> {
        if blocks.len() != signature.num_blocks() {
            return Err(structural(format!("expected {} blocks, got {}", signature.num_blocks(), blocks.len())));
        }
        for (k, (b, &n)) in blocks.iter().zip(signature.block_sizes()).enumerate() {
            if b.shape() != (n, n) {
                return Err(structural(format!("block {k}: expected {n}x{n}, got {}x{}", b.nrows(), b.ncols())));
            }
        }
        Ok(Self { signature: signature.clone(), blocks })
    }

    /// Element whose block `k` is the scalar `values[k]` times the identity.
    pub fn from_block_scalars(signature: &AlgebraSignature, values: &[Complex64]) -> Result<Self> {
        if values.len() != signature.num_blocks() {
            return Err(structural(format!("expected {} block scalars, got {}", signature.num_blocks(), values.len())));
        }
        let blocks = signature
            .block_sizes()
            .iter()
            .zip(values)
            .map(|(&n, &v)| CMatrix::from_diagonal_element(n, n, v))
            .collect();
        Ok(Self { signature: signature.clone(), blocks })
    }

    pub fn zero(signature: &AlgebraSignature) -> Self {
        Self::scalar(signature, Complex64::new(0.0, 0.0))
    }

    pub fn identity(signature: &AlgebraSignature) -> Self {
        Self::scalar(signature, Complex64::new(1.0, 0.0))
    }

    pub fn scalar(signature: &AlgebraSignature, value: Complex64) -> Self {
        let blocks = signature.block_sizes().iter().map(|&n| CMatrix::from_diagonal_element(n, n, value)).collect();
        Self { signature: signature.clone(), blocks }
    }

    pub fn signature(&self) -> &AlgebraSignature {
        &self.signature
    }

    pub fn blocks(&self) -> &[CMatrix] {
        &self.blocks
    }

    pub fn block(&self, k: usize) -> &CMatrix {
        &self.blocks[k]
    }

    pub fn into_blocks(self) -> Vec<CMatrix> {
        self.blocks
    }

    pub fn multiply(&self, other: &Self) -> Result<Self> {
        self.signature.ensure_same(&other.signature)?;
        Ok(self.mul_unchecked(other))
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.signature.ensure_same(&other.signature)?;
        Ok(self.zip_with(other, |a, b| a + b))
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.signature.ensure_same(&other.signature)?;
        Ok(self.zip_with(other, |a, b| a - b))
    }

    pub(crate) fn mul_unchecked(&self, other: &Self) -> Self {
        self.zip_with(other, |a, b| a * b)
    }

    pub(crate) fn add_unchecked(&self, other: &Self) -> Self {
        self.zip_with(other, |a, b| a + b)
    }

    pub(crate) fn sub_unchecked(&self, other: &Self) -> Self {
        self.zip_with(other, |a, b| a - b)
    }

    pub(crate) fn add_assign_unchecked(&mut self, other: &Self) {
        for (a, b) in self.blocks.iter_mut().zip(&other.blocks) {
            *a += b;
        }
    }

    fn zip_with(&self, other: &Self, f: impl Fn(&CMatrix, &CMatrix) -> CMatrix) -> Self {
        debug_assert_eq!(self.signature, other.signature);
        let blocks = self.blocks.iter().zip(&other.blocks).map(|(a, b)| f(a, b)).collect();
        Self { signature: self.signature.clone(), blocks }
    }

    pub fn scale(&self, c: Complex64) -> Self {
        let blocks = self.blocks.iter().map(|b| b * c).collect();
        Self { signature: self.signature.clone(), blocks }
    }

    pub fn neg(&self) -> Self {
        self.scale(Complex64::new(-1.0, 0.0))
    }

    /// Blockwise conjugate transpose.
    pub fn adjoint(&self) -> Self {
        let blocks = self.blocks.iter().map(|b| b.adjoint()).collect();
        Self { signature: self.signature.clone(), blocks }
    }

    /// C*-norm: the largest singular value over all blocks.
    pub fn norm(&self) -> f64 {
        self.blocks.iter().map(linalg::spectral_norm).fold(0.0, f64::max)
    }

    /// `norm(self − other)`; panics on signature mismatch.
    pub fn distance(&self, other: &Self) -> f64 {
        self.sub_unchecked(other).norm()
    }

    fn hermitian_defect(&self) -> f64 {
        self.sub_unchecked(&self.adjoint()).norm()
    }

    pub fn is_hermitian(&self, tol: Tolerance) -> bool {
        self.hermitian_defect() <= tol.threshold(self.norm())
    }

    /// `a ≥ 0`: Hermitian within tolerance and no block eigenvalue below
    /// `−max(abs_tol, rel_tol·‖a‖)`.
    pub fn is_positive(&self, tol: Tolerance) -> bool {
        let t = tol.threshold(self.norm());
        if self.hermitian_defect() > t {
            return false;
        }
        self.blocks.iter().all(|b| linalg::hermitian_eigenvalues(b).first().is_none_or(|&lmin| lmin >= -t))
    }

    /// Every block's smallest singular value exceeds `rel_tol` times the
    /// largest singular value over all blocks; elements of norm at most
    /// `abs_tol` are never invertible.
    pub fn is_invertible(&self, tol: Tolerance) -> bool {
        let svs: Vec<Vec<f64>> = self.blocks.iter().map(linalg::singular_values).collect();
        let smax = svs.iter().filter_map(|s| s.first()).copied().fold(0.0, f64::max);
        if smax <= tol.abs_tol {
            return false;
        }
        svs.iter().all(|s| s.last().is_some_and(|&smin| smin > tol.rel_tol * smax))
    }

    /// Invertibility measured against a fixed reference scale instead of the
    /// element's own norm: every block's smallest singular value must exceed
    /// `max(abs_tol, rel_tol · max(reference, ‖a‖))`.
    ///
    /// Used for perturbations of the unit, where `reference = ‖1‖ = 1` and an
    /// element made only of rounding noise must not count as invertible.
    pub fn is_invertible_against(&self, reference: f64, tol: Tolerance) -> bool {
        let svs: Vec<Vec<f64>> = self.blocks.iter().map(linalg::singular_values).collect();
        let smax = svs.iter().filter_map(|s| s.first()).copied().fold(0.0, f64::max);
        let t = tol.threshold(reference.max(smax));
        svs.iter().all(|s| s.last().is_some_and(|&smin| smin > t))
    }

    /// Blockwise inverse; fails when [`is_invertible`](Self::is_invertible) does.
    pub fn inverse(&self, tol: Tolerance) -> Result<Self> {
        if !self.is_invertible(tol) {
            return Err(Error::Domain("element is not invertible".into()));
        }
        let blocks = self
            .blocks
            .iter()
            .map(|b| b.clone().try_inverse().ok_or_else(|| Error::Domain("singular block".into())))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { signature: self.signature.clone(), blocks })
    }

    /// `(min_k λ_min, max_k λ_max)` of the Hermitian part. Errors if the
    /// element is not Hermitian within tolerance.
    pub fn spectrum_bounds(&self, tol: Tolerance) -> Result<(f64, f64)> {
        if !self.is_hermitian(tol) {
            return Err(Error::Domain("spectrum_bounds requires a Hermitian element".into()));
        }
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for b in &self.blocks {
            let ev = linalg::hermitian_eigenvalues(b);
            lo = lo.min(ev[0]);
            hi = hi.max(ev[ev.len() - 1]);
        }
        Ok((lo, hi))
    }
}
