//! Frames in `A^d`: Gram/frame operator, optimal bounds, canonical dual,
//! reconstruction and the Riesz-type coefficient inequality.
//!
//! A finite family `{x_j}` is packed into its synthesis matrix `X` (row `j`
//! is `x_j`). With row vectors acting on the right:
//!
//! * synthesis `{a_j} ↦ Σ a_j x_j` is `a ↦ a·X`,
//! * analysis `x ↦ {<x, x_j>}` is `x ↦ x·X*`,
//! * the frame operator `x ↦ Σ <x, x_j> x_j` is `x ↦ x·G` with `G = X*X`.

use num_complex::Complex64;

use crate::algebra::{AlgebraElement, AlgebraSignature, Tolerance};
use crate::error::{structural, Error, Result};
use crate::linalg;
use crate::module::{ModuleMap, ModuleVector};

/// An indexed finite family `{x_j}` in `A^d`.
#[derive(Clone, Debug, PartialEq)]
pub struct FrameSystem {
    signature: AlgebraSignature,
    rank: usize,
    vectors: Vec<ModuleVector>,
}

/// Optimal frame bounds `(C, D)`, `0 ≤ C ≤ D`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FrameBounds {
    pub lower: f64,
    pub upper: f64,
}

impl FrameBounds {
    /// `D / C`; infinite when `C = 0`.
    pub fn condition(&self) -> f64 {
        if self.lower > 0.0 {
            self.upper / self.lower
        } else {
            f64::INFINITY
        }
    }
}

impl FrameSystem {
    pub fn new(vectors: Vec<ModuleVector>) -> Result<Self> {
        let first = vectors.first().ok_or_else(|| structural("frame system must be nonempty"))?;
        let signature = first.signature().clone();
        let rank = first.rank();
        for (j, v) in vectors.iter().enumerate() {
            if v.signature() != &signature || v.rank() != rank {
                return Err(structural(format!("vector {j} does not match vector 0 in signature/rank")));
            }
        }
        Ok(Self { signature, rank, vectors })
    }

    /// The family of rows of a synthesis matrix.
    pub fn from_synthesis(x: &ModuleMap) -> Self {
        Self { signature: x.signature().clone(), rank: x.codomain_rank(), vectors: x.rows() }
    }

    pub fn signature(&self) -> &AlgebraSignature {
        &self.signature
    }

    /// Module rank `d`.
    pub fn rank(&self) -> usize {
        self.rank
    }

    /// Index-set size `|J|`.
    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn vectors(&self) -> &[ModuleVector] {
        &self.vectors
    }

    pub fn vector(&self, j: usize) -> &ModuleVector {
        &self.vectors[j]
    }

    /// The family with index `l` removed; `None` for a singleton.
    pub fn without(&self, l: usize) -> Option<Self> {
        if self.vectors.len() <= 1 {
            return None;
        }
        let vectors = self.vectors.iter().enumerate().filter(|(j, _)| *j != l).map(|(_, v)| v.clone()).collect();
        Some(Self { signature: self.signature.clone(), rank: self.rank, vectors })
    }

    pub(crate) fn ensure_same_shape(&self, other: &Self) -> Result<()> {
        self.signature.ensure_same(&other.signature)?;
        if self.rank != other.rank || self.len() != other.len() {
            return Err(structural(format!(
                "frame shape mismatch: |J|={} d={} vs |J|={} d={}",
                self.len(),
                self.rank,
                other.len(),
                other.rank
            )));
        }
        Ok(())
    }

    /// The `|J| × d` synthesis matrix `X`.
    pub fn synthesis_matrix(&self) -> ModuleMap {
        ModuleMap::from_rows(&self.vectors).expect("frame vectors are shape-consistent")
    }

    /// `Σ_j a_j x_j` by direct summation.
    pub fn synthesize(&self, coeffs: &[AlgebraElement]) -> Result<ModuleVector> {
        if coeffs.len() != self.len() {
            return Err(structural(format!("expected {} coefficients, got {}", self.len(), coeffs.len())));
        }
        let mut acc = ModuleVector::zero(&self.signature, self.rank)?;
        for (a, x) in coeffs.iter().zip(&self.vectors) {
            acc = acc.add_unchecked(&x.left_mul(a)?);
        }
        Ok(acc)
    }

    /// `{<x, x_j>}_j`.
    pub fn analyze(&self, x: &ModuleVector) -> Result<Vec<AlgebraElement>> {
        self.vectors.iter().map(|xj| x.inner_product(xj)).collect()
    }

    /// `Σ_j <x, x_j> x_j` by direct summation.
    pub fn frame_operator_apply(&self, x: &ModuleVector) -> Result<ModuleVector> {
        let coeffs = self.analyze(x)?;
        self.synthesize(&coeffs)
    }

    /// `Σ_j <x, x_j><x_j, x>`, the middle term of the frame inequality.
    pub fn frame_sum(&self, x: &ModuleVector) -> Result<AlgebraElement> {
        let mut acc = AlgebraElement::zero(&self.signature);
        for xj in &self.vectors {
            let c = x.inner_product(xj)?;
            acc.add_assign_unchecked(&c.mul_unchecked(&c.adjoint()));
        }
        Ok(acc)
    }

    /// The frame operator as right multiplication by `G = X*X` (`d × d`).
    pub fn gram_operator(&self) -> ModuleMap {
        let x = self.synthesis_matrix();
        x.adjoint().compose(&x).expect("X* and X are composable")
    }

    /// Optimal bounds: extreme eigenvalues over the flattened blocks of `G`,
    /// clamped below at zero.
    pub fn frame_bounds(&self) -> FrameBounds {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for block in self.gram_operator().flatten() {
            let ev = linalg::hermitian_eigenvalues(&block);
            lo = lo.min(ev[0]);
            hi = hi.max(ev[ev.len() - 1]);
        }
        FrameBounds { lower: lo.max(0.0), upper: hi.max(0.0) }
    }

    /// Unit vectors `(x_C, x_D)` on which the frame inequality is attained:
    /// `Σ_j <x,x_j><x_j,x> = C<x,x>` resp. `D<x,x>`.
    ///
    /// Each is the pullback of an extremal eigenvector `v` of a flattened
    /// Gram block: the vector whose block-`k` first row is `v*`.
    pub fn extremal_vectors(&self) -> (ModuleVector, ModuleVector) {
        let flat = self.gram_operator().flatten();
        let mut low = (f64::INFINITY, 0, None);
        let mut high = (f64::NEG_INFINITY, 0, None);
        for (k, block) in flat.iter().enumerate() {
            let (vals, vecs) = linalg::hermitian_eigen(block);
            let last = vals.len() - 1;
            if vals[0] < low.0 {
                low = (vals[0], k, Some(vecs.column(0).into_owned()));
            }
            if vals[last] > high.0 {
                high = (vals[last], k, Some(vecs.column(last).into_owned()));
            }
        }
        let pull = |k: usize, v: nalgebra::DVector<Complex64>| {
            let n = self.signature.block_sizes()[k];
            let entries = (0..self.rank)
                .map(|i| {
                    let blocks = self
                        .signature
                        .block_sizes()
                        .iter()
                        .enumerate()
                        .map(|(kk, &nn)| {
                            let mut b = crate::CMatrix::zeros(nn, nn);
                            if kk == k {
                                for c in 0..n {
                                    b[(0, c)] = v[i * n + c].conj();
                                }
                            }
                            b
                        })
                        .collect();
                    AlgebraElement::from_blocks(&self.signature, blocks).expect("block shapes follow signature")
                })
                .collect();
            ModuleVector::new(&self.signature, entries).expect("rank matches frame")
        };
        (pull(low.1, low.2.expect("nonempty spectrum")), pull(high.1, high.2.expect("nonempty spectrum")))
    }

    /// `{S⁻¹x_j} = {x_j · G⁻¹}`.
    ///
    /// Computed blockwise as `(X⁺)* = U Σ⁻¹ V*` from the thin SVD of the
    /// flattened synthesis matrix, which equals `X·G⁻¹` for frames without
    /// forming `G⁻¹`.
    pub fn canonical_dual(&self, tol: Tolerance) -> Result<Self> {
        let b = self.frame_bounds();
        if !(b.upper > tol.abs_tol && b.lower > tol.rel_tol * b.upper) {
            return Err(Error::Domain("frame operator not invertible".into()));
        }
        let dual_blocks = self
            .synthesis_matrix()
            .flatten()
            .iter()
            .map(|xk| linalg::pinv_adjoint(xk).ok_or_else(|| Error::Domain("frame operator not invertible".into())))
            .collect::<Result<Vec<_>>>()?;
        let dual = ModuleMap::from_flat(&self.signature, self.len(), self.rank, &dual_blocks)?;
        Ok(Self::from_synthesis(&dual))
    }

    /// `‖x − Σ_j <x, S⁻¹x_j> x_j‖`, summed directly over the index set.
    pub fn reconstruction_residual(&self, x: &ModuleVector, tol: Tolerance) -> Result<f64> {
        let dual = self.canonical_dual(tol)?;
        let coeffs = dual.analyze(x)?;
        let rebuilt = self.synthesize(&coeffs)?;
        Ok(x.try_sub(&rebuilt)?.norm())
    }

    /// `(self, other)` reconstruct each other as `x = Σ <x, y_j> x_j`,
    /// checked as the matrix identity `Y*X = I_d`.
    pub fn is_dual_pair(&self, other: &Self, tol: Tolerance) -> Result<bool> {
        self.ensure_same_shape(other)?;
        let x = self.synthesis_matrix();
        let y = other.synthesis_matrix();
        let defect = y.adjoint().compose(&x)?.try_sub(&ModuleMap::identity(&self.signature, self.rank)?)?;
        let scale = x.operator_norm() * y.operator_norm();
        Ok(defect.max_entry_norm() <= tol.threshold(scale.max(1.0)))
    }

    /// Riesz-type inequality for one coefficient family:
    /// `C‖Σ a_i a_i*‖ ≤ ‖Σ a_i x_i‖² ≤ D‖Σ a_i a_i*‖` within tolerance, with
    /// `(C, D)` the optimal frame bounds. `‖Σ a_i a_i*‖` is the squared norm
    /// of `{a_i}` in `ℓ²(J, A)` under the inner product used throughout.
    pub fn riesz_bounds_check(&self, coeffs: &[AlgebraElement], tol: Tolerance) -> Result<bool> {
        if coeffs.is_empty() {
            return Err(structural("coefficient family must be nonempty"));
        }
        let (lhs, mass) = self.riesz_terms(coeffs)?;
        let b = self.frame_bounds();
        let t = tol.threshold(b.upper * mass);
        Ok(b.lower * mass - t <= lhs && lhs <= b.upper * mass + t)
    }

    /// `(‖Σ a_i x_i‖², ‖Σ a_i a_i*‖)`.
    pub fn riesz_terms(&self, coeffs: &[AlgebraElement]) -> Result<(f64, f64)> {
        let v = self.synthesize(coeffs)?;
        let mut mass = AlgebraElement::zero(&self.signature);
        for a in coeffs {
            mass.add_assign_unchecked(&a.mul_unchecked(&a.adjoint()));
        }
        Ok((v.norm().powi(2), mass.norm()))
    }
}
