//! The free Hilbert module `A^d` and A-linear maps between free modules.
//!
//! Vectors are rows; a map `M` from `A^m` to `A^d` is an `m × d` matrix over
//! `A` acting on the right, `x ↦ x·M`. Left multiplication by scalars from
//! `A` then commutes with every map by associativity.

use num_complex::Complex64;

use crate::algebra::{AlgebraElement, AlgebraSignature, CMatrix, Tolerance};
use crate::error::{structural, Error, Result};
use crate::linalg;

/// An element of `A^d`.
#[derive(Clone, Debug, PartialEq)]
pub struct ModuleVector {
    signature: AlgebraSignature,
    entries: Vec<AlgebraElement>,
}

impl ModuleVector {
    pub fn new(signature: &AlgebraSignature, entries: Vec<AlgebraElement>) -> Result<Self> {
        if entries.is_empty() {
            return Err(structural("module rank must be at least 1"));
        }
        for (i, e) in entries.iter().enumerate() {
            if e.signature() != signature {
                return Err(structural(format!("entry {i} has signature {:?}", e.signature())));
            }
        }
        Ok(Self { signature: signature.clone(), entries })
    }

    pub fn zero(signature: &AlgebraSignature, rank: usize) -> Result<Self> {
        Self::new(signature, vec![AlgebraElement::zero(signature); rank])
    }

    /// Canonical basis vector `e_i` of `A^d`.
    pub fn basis(signature: &AlgebraSignature, rank: usize, i: usize) -> Result<Self> {
        if i >= rank {
            return Err(structural(format!("basis index {i} out of range for rank {rank}")));
        }
        let mut v = Self::zero(signature, rank)?;
        v.entries[i] = AlgebraElement::identity(signature);
        Ok(v)
    }

    pub fn signature(&self) -> &AlgebraSignature {
        &self.signature
    }

    pub fn rank(&self) -> usize {
        self.entries.len()
    }

    pub fn entries(&self) -> &[AlgebraElement] {
        &self.entries
    }

    pub fn entry(&self, i: usize) -> &AlgebraElement {
        &self.entries[i]
    }

    fn ensure_compatible(&self, other: &Self) -> Result<()> {
        self.signature.ensure_same(&other.signature)?;
        if self.rank() != other.rank() {
            return Err(structural(format!("rank mismatch: {} vs {}", self.rank(), other.rank())));
        }
        Ok(())
    }

    /// `Σ_i x_i · y_i*`.
    pub fn inner_product(&self, other: &Self) -> Result<AlgebraElement> {
        self.ensure_compatible(other)?;
        Ok(self.inner_unchecked(other))
    }

    pub(crate) fn inner_unchecked(&self, other: &Self) -> AlgebraElement {
        let mut acc = AlgebraElement::zero(&self.signature);
        for (x, y) in self.entries.iter().zip(&other.entries) {
            acc.add_assign_unchecked(&x.mul_unchecked(&y.adjoint()));
        }
        acc
    }

    /// `‖<x, x>‖^{1/2}`.
    pub fn norm(&self) -> f64 {
        self.inner_unchecked(self).norm().sqrt()
    }

    /// The module action `a · x`.
    pub fn left_mul(&self, a: &AlgebraElement) -> Result<Self> {
        self.signature.ensure_same(a.signature())?;
        Ok(self.left_mul_unchecked(a))
    }

    pub(crate) fn left_mul_unchecked(&self, a: &AlgebraElement) -> Self {
        let entries = self.entries.iter().map(|e| a.mul_unchecked(e)).collect();
        Self { signature: self.signature.clone(), entries }
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.ensure_compatible(other)?;
        Ok(self.add_unchecked(other))
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.ensure_compatible(other)?;
        let entries = self.entries.iter().zip(&other.entries).map(|(a, b)| a.sub_unchecked(b)).collect();
        Ok(Self { signature: self.signature.clone(), entries })
    }

    pub(crate) fn add_unchecked(&self, other: &Self) -> Self {
        let entries = self.entries.iter().zip(&other.entries).map(|(a, b)| a.add_unchecked(b)).collect();
        Self { signature: self.signature.clone(), entries }
    }

    pub fn scale(&self, c: Complex64) -> Self {
        let entries = self.entries.iter().map(|e| e.scale(c)).collect();
        Self { signature: self.signature.clone(), entries }
    }
}

/// An A-linear adjointable map `A^m → A^d`, stored as an `m × d` matrix
/// over `A` in row-major order.
#[derive(Clone, Debug, PartialEq)]
pub struct ModuleMap {
    signature: AlgebraSignature,
    domain_rank: usize,
    codomain_rank: usize,
    entries: Vec<AlgebraElement>,
}

impl ModuleMap {
    pub fn new(
        signature: &AlgebraSignature,
        domain_rank: usize,
        codomain_rank: usize,
        entries: Vec<AlgebraElement>,
    ) -> Result<Self> {
        if domain_rank == 0 || codomain_rank == 0 {
            return Err(structural("module maps need nonzero domain and codomain rank"));
        }
        if entries.len() != domain_rank * codomain_rank {
            return Err(structural(format!(
                "{domain_rank}x{codomain_rank} map needs {} entries, got {}",
                domain_rank * codomain_rank,
                entries.len()
            )));
        }
        if let Some(i) = entries.iter().position(|e| e.signature() != signature) {
            return Err(structural(format!("map entry {i} has the wrong signature")));
        }
        Ok(Self { signature: signature.clone(), domain_rank, codomain_rank, entries })
    }

    /// The map whose `i`-th row is `rows[i]`; sends `e_i` to `rows[i]`.
    pub fn from_rows(rows: &[ModuleVector]) -> Result<Self> {
        let first = rows.first().ok_or_else(|| structural("map needs at least one row"))?;
        let sig = first.signature().clone();
        let d = first.rank();
        let mut entries = Vec::with_capacity(rows.len() * d);
        for (i, r) in rows.iter().enumerate() {
            if r.signature() != &sig || r.rank() != d {
                return Err(structural(format!("row {i} does not match row 0 in signature/rank")));
            }
            entries.extend(r.entries().iter().cloned());
        }
        Self::new(&sig, rows.len(), d, entries)
    }

    pub fn identity(signature: &AlgebraSignature, rank: usize) -> Result<Self> {
        let rows = (0..rank).map(|i| ModuleVector::basis(signature, rank, i)).collect::<Result<Vec<_>>>()?;
        Self::from_rows(&rows)
    }

    pub fn zero(signature: &AlgebraSignature, domain_rank: usize, codomain_rank: usize) -> Result<Self> {
        Self::new(
            signature,
            domain_rank,
            codomain_rank,
            vec![AlgebraElement::zero(signature); domain_rank * codomain_rank],
        )
    }

    pub fn signature(&self) -> &AlgebraSignature {
        &self.signature
    }

    pub fn domain_rank(&self) -> usize {
        self.domain_rank
    }

    pub fn codomain_rank(&self) -> usize {
        self.codomain_rank
    }

    pub fn entry(&self, i: usize, j: usize) -> &AlgebraElement {
        &self.entries[i * self.codomain_rank + j]
    }

    pub fn row(&self, i: usize) -> ModuleVector {
        let start = i * self.codomain_rank;
        ModuleVector {
            signature: self.signature.clone(),
            entries: self.entries[start..start + self.codomain_rank].to_vec(),
        }
    }

    pub fn rows(&self) -> Vec<ModuleVector> {
        (0..self.domain_rank).map(|i| self.row(i)).collect()
    }

    /// `x ↦ x·M`, i.e. `result_j = Σ_i x_i · M[i][j]`.
    pub fn apply(&self, x: &ModuleVector) -> Result<ModuleVector> {
        x.signature().ensure_same(&self.signature)?;
        if x.rank() != self.domain_rank {
            return Err(structural(format!(
                "vector of rank {} applied to map with domain rank {}",
                x.rank(),
                self.domain_rank
            )));
        }
        let entries = (0..self.codomain_rank)
            .map(|j| {
                let mut acc = AlgebraElement::zero(&self.signature);
                for (i, xi) in x.entries().iter().enumerate() {
                    acc.add_assign_unchecked(&xi.mul_unchecked(self.entry(i, j)));
                }
                acc
            })
            .collect();
        Ok(ModuleVector { signature: self.signature.clone(), entries })
    }

    /// The adjoint map `A^d → A^m`: entries `M*[j][i] = M[i][j]*`.
    pub fn adjoint(&self) -> Self {
        let mut entries = Vec::with_capacity(self.entries.len());
        for j in 0..self.codomain_rank {
            for i in 0..self.domain_rank {
                entries.push(self.entry(i, j).adjoint());
            }
        }
        Self {
            signature: self.signature.clone(),
            domain_rank: self.codomain_rank,
            codomain_rank: self.domain_rank,
            entries,
        }
    }

    /// Matrix product over `A`; as maps on row vectors this is "first
    /// `self`, then `other`".
    pub fn compose(&self, other: &Self) -> Result<Self> {
        self.signature.ensure_same(&other.signature)?;
        if self.codomain_rank != other.domain_rank {
            return Err(structural(format!(
                "cannot compose {}x{} with {}x{}",
                self.domain_rank, self.codomain_rank, other.domain_rank, other.codomain_rank
            )));
        }
        let mut entries = Vec::with_capacity(self.domain_rank * other.codomain_rank);
        for i in 0..self.domain_rank {
            for j in 0..other.codomain_rank {
                let mut acc = AlgebraElement::zero(&self.signature);
                for l in 0..self.codomain_rank {
                    acc.add_assign_unchecked(&self.entry(i, l).mul_unchecked(other.entry(l, j)));
                }
                entries.push(acc);
            }
        }
        Self::new(&self.signature, self.domain_rank, other.codomain_rank, entries)
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.signature.ensure_same(&other.signature)?;
        if (self.domain_rank, self.codomain_rank) != (other.domain_rank, other.codomain_rank) {
            return Err(structural("map shape mismatch"));
        }
        let entries = self.entries.iter().zip(&other.entries).map(|(a, b)| a.sub_unchecked(b)).collect();
        Ok(Self { entries, ..self.clone() })
    }

    /// Largest entrywise algebra norm.
    pub fn max_entry_norm(&self) -> f64 {
        self.entries.iter().map(AlgebraElement::norm).fold(0.0, f64::max)
    }

    /// Block `k` is the `(m·n_k) × (d·n_k)` complex matrix whose `(i, j)`
    /// sub-block of size `n_k × n_k` is block `k` of `M[i][j]`.
    pub fn flatten(&self) -> Vec<CMatrix> {
        self.signature
            .block_sizes()
            .iter()
            .enumerate()
            .map(|(k, &n)| {
                let mut out = CMatrix::zeros(self.domain_rank * n, self.codomain_rank * n);
                for i in 0..self.domain_rank {
                    for j in 0..self.codomain_rank {
                        out.view_mut((i * n, j * n), (n, n)).copy_from(self.entry(i, j).block(k));
                    }
                }
                out
            })
            .collect()
    }

    /// Inverse of [`flatten`](Self::flatten).
    pub fn from_flat(
        signature: &AlgebraSignature,
        domain_rank: usize,
        codomain_rank: usize,
        blocks: &[CMatrix],
    ) -> Result<Self> {
        if blocks.len() != signature.num_blocks() {
            return Err(structural("wrong number of flattened blocks"));
        }
        for (k, (b, &n)) in blocks.iter().zip(signature.block_sizes()).enumerate() {
            if b.shape() != (domain_rank * n, codomain_rank * n) {
                return Err(structural(format!("flattened block {k} has shape {:?}", b.shape())));
            }
        }
        let mut entries = Vec::with_capacity(domain_rank * codomain_rank);
        for i in 0..domain_rank {
            for j in 0..codomain_rank {
                let parts = blocks
                    .iter()
                    .zip(signature.block_sizes())
                    .map(|(b, &n)| b.view((i * n, j * n), (n, n)).into_owned())
                    .collect();
                entries.push(AlgebraElement::from_blocks(signature, parts)?);
            }
        }
        Self::new(signature, domain_rank, codomain_rank, entries)
    }

    /// Operator norm: the largest singular value over flattened blocks.
    pub fn operator_norm(&self) -> f64 {
        self.flatten().iter().map(linalg::spectral_norm).fold(0.0, f64::max)
    }

    /// Square, and every flattened block's smallest singular value exceeds
    /// `rel_tol` times the largest singular value over all blocks.
    pub fn is_invertible(&self, tol: Tolerance) -> bool {
        if self.domain_rank != self.codomain_rank {
            return false;
        }
        let svs: Vec<Vec<f64>> = self.flatten().iter().map(linalg::singular_values).collect();
        let smax = svs.iter().filter_map(|s| s.first()).copied().fold(0.0, f64::max);
        if smax <= tol.abs_tol {
            return false;
        }
        svs.iter().all(|s| s.last().is_some_and(|&smin| smin > tol.rel_tol * smax))
    }

    /// Blockwise flattened inversion, unflattened back to a map.
    pub fn inverse(&self, tol: Tolerance) -> Result<Self> {
        if !self.is_invertible(tol) {
            return Err(Error::Domain("module map is not invertible".into()));
        }
        let inv = self
            .flatten()
            .into_iter()
            .map(|b| b.try_inverse().ok_or_else(|| Error::Domain("singular flattened block".into())))
            .collect::<Result<Vec<_>>>()?;
        Self::from_flat(&self.signature, self.codomain_rank, self.domain_rank, &inv)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn scalar_vec(vals: &[Complex64]) -> ModuleVector {
        let s = AlgebraSignature::new(vec![1]).unwrap();
        let entries = vals.iter().map(|&v| AlgebraElement::scalar(&s, v)).collect();
        ModuleVector::new(&s, entries).unwrap()
    }

    fn scalar_map(rows: &[&[Complex64]]) -> ModuleMap {
        let r: Vec<_> = rows.iter().map(|r| scalar_vec(r)).collect();
        ModuleMap::from_rows(&r).unwrap()
    }

    #[test]
    fn rank_zero_rejected() {
        let s = AlgebraSignature::new(vec![2]).unwrap();
        assert!(ModuleVector::new(&s, vec![]).is_err());
        assert!(ModuleMap::zero(&s, 0, 2).is_err());
    }

    #[test]
    fn canonical_basis_is_orthonormal() {
        let s = AlgebraSignature::new(vec![2, 1]).unwrap();
        let one = AlgebraElement::identity(&s);
        let zero = AlgebraElement::zero(&s);
        for i in 0..3 {
            for j in 0..3 {
                let ip = ModuleVector::basis(&s, 3, i)
                    .unwrap()
                    .inner_product(&ModuleVector::basis(&s, 3, j).unwrap())
                    .unwrap();
                assert_eq!(ip, if i == j { one.clone() } else { zero.clone() });
            }
        }
    }

    #[test]
    fn scalar_inner_product_conjugates_second_slot() {
        let ip =
            scalar_vec(&[c(1.0, 0.0), c(0.0, 2.0)]).inner_product(&scalar_vec(&[c(1.0, 0.0), c(1.0, 0.0)])).unwrap();
        assert_eq!(ip.block(0)[(0, 0)], c(1.0, 2.0));
    }

    #[test]
    fn inner_product_rejects_rank_mismatch() {
        let x = scalar_vec(&[c(1.0, 0.0)]);
        let y = scalar_vec(&[c(1.0, 0.0), c(0.0, 0.0)]);
        assert!(matches!(x.inner_product(&y), Err(Error::Structural(_))));
    }

    #[test]
    fn vector_norms() {
        let s = AlgebraSignature::new(vec![2]).unwrap();
        assert_eq!(ModuleVector::basis(&s, 2, 1).unwrap().norm(), 1.0);
        assert_eq!(ModuleVector::zero(&s, 3).unwrap().norm(), 0.0);
        assert!((scalar_vec(&[c(3.0, 4.0)]).norm() - 5.0).abs() < 1e-14);
    }

    #[test]
    fn apply_examples() {
        let x = scalar_vec(&[c(1.0, 1.0), c(-2.0, 0.5)]);
        let s = x.signature().clone();
        assert_eq!(ModuleMap::identity(&s, 2).unwrap().apply(&x).unwrap(), x);
        assert_eq!(ModuleMap::zero(&s, 2, 3).unwrap().apply(&x).unwrap(), ModuleVector::zero(&s, 3).unwrap());
        let swap = scalar_map(&[&[c(0.0, 0.0), c(1.0, 0.0)], &[c(1.0, 0.0), c(0.0, 0.0)]]);
        assert_eq!(swap.apply(&x).unwrap(), scalar_vec(&[c(-2.0, 0.5), c(1.0, 1.0)]));
        assert!(swap.apply(&scalar_vec(&[c(1.0, 0.0)])).is_err());
    }

    #[test]
    fn adjoint_examples() {
        let m = scalar_map(&[&[c(0.0, 1.0)]]);
        assert_eq!(m.adjoint(), scalar_map(&[&[c(0.0, -1.0)]]));
        let s = AlgebraSignature::new(vec![2, 1]).unwrap();
        let id = ModuleMap::identity(&s, 3).unwrap();
        assert_eq!(id.adjoint(), id);
    }

    #[test]
    fn flatten_identity_and_scalar_case() {
        let s = AlgebraSignature::new(vec![3]).unwrap();
        let f = ModuleMap::identity(&s, 2).unwrap().flatten();
        assert_eq!(f, vec![CMatrix::identity(6, 6)]);
        let m = scalar_map(&[&[c(1.0, 2.0), c(3.0, 0.0)], &[c(0.0, -1.0), c(5.0, 5.0)]]);
        let flat = m.flatten();
        assert_eq!(flat.len(), 1);
        assert_eq!(flat[0][(0, 1)], c(3.0, 0.0));
        assert_eq!(flat[0][(1, 0)], c(0.0, -1.0));
    }

    #[test]
    fn invertibility_examples() {
        let tol = Tolerance::default();
        let s = AlgebraSignature::new(vec![1, 1]).unwrap();
        assert!(ModuleMap::identity(&s, 2).unwrap().is_invertible(tol));
        assert!(!ModuleMap::zero(&s, 2, 3).unwrap().is_invertible(tol));
        // column of the algebra element (1, 0): flattened blocks [1] and [0]
        let e = AlgebraElement::from_block_scalars(&s, &[c(1.0, 0.0), c(0.0, 0.0)]).unwrap();
        let m = ModuleMap::new(&s, 1, 1, vec![e]).unwrap();
        assert!(!m.is_invertible(tol));
        assert!(m.inverse(tol).is_err());
    }
}
