//! Deterministic, seeded generators of frame systems.
//!
//! Randomness comes from ChaCha8 seeded with the spec's seed. Every row of
//! every attempt draws from its own ChaCha stream, and auxiliary choices
//! (duplicated index, projection direction, target condition) from a
//! dedicated stream, so the output depends only on the spec.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::algebra::{AlgebraElement, AlgebraSignature, CMatrix, Tolerance};
use crate::classify;
use crate::error::{structural, Error, Result};
use crate::frame::FrameSystem;
use crate::module::{ModuleMap, ModuleVector};

pub const MAX_BLOCK_SIZE: usize = 8;
pub const MAX_BLOCKS: usize = 8;
pub const MAX_RANK: usize = 8;
pub const MAX_COUNT: usize = 16;
/// Cap on the Gram condition number `D/C` of generated frames.
pub const CONDITION_CAP: f64 = 1e6;
/// Range of Gram condition numbers for `near_singular` systems.
pub const NEAR_SINGULAR_RANGE: (f64, f64) = (1e4, 1e6);
pub const MAX_ATTEMPTS: usize = 100;

const AUX_ROW: u32 = u32::MAX;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GeneratorKind {
    ModularRiesz,
    OvercompleteFrame,
    DeltaExample,
    DuplicatedVector,
    NearSingular,
    NonFrame,
}

impl GeneratorKind {
    pub const ALL: [GeneratorKind; 6] = [
        GeneratorKind::ModularRiesz,
        GeneratorKind::OvercompleteFrame,
        GeneratorKind::DeltaExample,
        GeneratorKind::DuplicatedVector,
        GeneratorKind::NearSingular,
        GeneratorKind::NonFrame,
    ];

    pub fn name(self) -> &'static str {
        match self {
            GeneratorKind::ModularRiesz => "modular_riesz",
            GeneratorKind::OvercompleteFrame => "overcomplete_frame",
            GeneratorKind::DeltaExample => "delta_example",
            GeneratorKind::DuplicatedVector => "duplicated_vector",
            GeneratorKind::NearSingular => "near_singular",
            GeneratorKind::NonFrame => "non_frame",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GeneratorSpec {
    pub seed: u64,
    pub signature: Vec<usize>,
    pub rank: usize,
    pub count: usize,
    pub kind: GeneratorKind,
}

impl GeneratorSpec {
    /// The truncated `δ_j` system in `C^n` over itself.
    pub fn delta(n: usize) -> Self {
        Self { seed: 0, signature: vec![1; n], rank: 1, count: n, kind: GeneratorKind::DeltaExample }
    }

    pub fn validate(&self) -> Result<AlgebraSignature> {
        let sig = AlgebraSignature::new(self.signature.clone())?;
        if sig.num_blocks() > MAX_BLOCKS || sig.block_sizes().iter().any(|&n| n > MAX_BLOCK_SIZE) {
            return Err(structural(format!(
                "signature {:?} exceeds {MAX_BLOCKS} blocks of size ≤ {MAX_BLOCK_SIZE}",
                self.signature
            )));
        }
        if !(1..=MAX_RANK).contains(&self.rank) {
            return Err(structural(format!("rank {} outside 1..={MAX_RANK}", self.rank)));
        }
        if !(1..=MAX_COUNT).contains(&self.count) {
            return Err(structural(format!("count {} outside 1..={MAX_COUNT}", self.count)));
        }
        let (m, d) = (self.count, self.rank);
        let ok = match self.kind {
            GeneratorKind::ModularRiesz => m == d,
            GeneratorKind::OvercompleteFrame => m > d,
            GeneratorKind::DeltaExample => d == 1 && sig.block_sizes().iter().all(|&n| n == 1) && sig.num_blocks() == m,
            GeneratorKind::DuplicatedVector => m > d,
            // needs at least two flattened singular values to spread
            GeneratorKind::NearSingular => m >= d && d * sig.block_sizes().iter().sum::<usize>() >= 2,
            GeneratorKind::NonFrame => true,
        };
        if !ok {
            return Err(structural(format!(
                "{} cannot be generated with signature {:?}, rank {d}, count {m}",
                self.kind.name(),
                self.signature
            )));
        }
        Ok(sig)
    }
}

fn stream_rng(seed: u64, attempt: usize, row: u32) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(((attempt as u64) << 32) | u64::from(row));
    rng
}

fn normal(rng: &mut ChaCha8Rng) -> f64 {
    rng.sample(StandardNormal)
}

fn random_element(sig: &AlgebraSignature, rng: &mut ChaCha8Rng) -> AlgebraElement {
    let blocks = sig
        .block_sizes()
        .iter()
        .map(|&n| {
            let mut b = CMatrix::zeros(n, n);
            for r in 0..n {
                for c in 0..n {
                    let re = normal(rng);
                    let im = normal(rng);
                    b[(r, c)] = Complex64::new(re, im);
                }
            }
            b
        })
        .collect();
    AlgebraElement::from_blocks(sig, blocks).expect("shapes follow the signature")
}

fn random_map(sig: &AlgebraSignature, m: usize, d: usize, seed: u64, attempt: usize) -> ModuleMap {
    let rows: Vec<ModuleVector> = (0..m)
        .map(|j| {
            let mut rng = stream_rng(seed, attempt, j as u32);
            let entries = (0..d).map(|_| random_element(sig, &mut rng)).collect();
            ModuleVector::new(sig, entries).expect("rank ≥ 1")
        })
        .collect();
    ModuleMap::from_rows(&rows).expect("rows are consistent")
}

/// The canonical basis `{e_1, …, e_d}` of `A^d`.
pub fn canonical_basis(signature: &AlgebraSignature, rank: usize) -> Result<FrameSystem> {
    Ok(FrameSystem::from_synthesis(&ModuleMap::identity(signature, rank)?))
}

/// `{δ_1, …, δ_n}` in `C^n` viewed as a rank-one module over the algebra
/// `C^n` (signature `(1, …, 1)`), `δ_j` being the `j`-th minimal projection.
pub fn delta_example(n: usize) -> Result<FrameSystem> {
    generate(&GeneratorSpec::delta(n))
}

fn well_conditioned_frame(frame: &FrameSystem, tol: Tolerance) -> bool {
    let v = classify::is_frame(frame, tol);
    v.is_frame && v.bounds.condition() <= CONDITION_CAP
}

pub fn generate(spec: &GeneratorSpec) -> Result<FrameSystem> {
    let sig = spec.validate()?;
    let tol = Tolerance::default();
    let (m, d) = (spec.count, spec.rank);
    if spec.kind == GeneratorKind::DeltaExample {
        let vectors = (0..m)
            .map(|j| {
                let mut vals = vec![Complex64::new(0.0, 0.0); m];
                vals[j] = Complex64::new(1.0, 0.0);
                ModuleVector::new(&sig, vec![AlgebraElement::from_block_scalars(&sig, &vals)?])
            })
            .collect::<Result<Vec<_>>>()?;
        return FrameSystem::new(vectors);
    }
    for attempt in 0..MAX_ATTEMPTS {
        let candidate = match spec.kind {
            GeneratorKind::ModularRiesz => {
                let x = random_map(&sig, m, d, spec.seed, attempt);
                let f = FrameSystem::from_synthesis(&x);
                (x.is_invertible(tol) && well_conditioned_frame(&f, tol)).then_some(f)
            }
            GeneratorKind::OvercompleteFrame => {
                let f = FrameSystem::from_synthesis(&random_map(&sig, m, d, spec.seed, attempt));
                well_conditioned_frame(&f, tol).then_some(f)
            }
            GeneratorKind::DuplicatedVector => {
                let base = FrameSystem::from_synthesis(&random_map(&sig, m - 1, d, spec.seed, attempt));
                let mut aux = stream_rng(spec.seed, attempt, AUX_ROW);
                let src = aux.random_range(0..m - 1);
                let pos = aux.random_range(0..m);
                let mut vectors = base.vectors().to_vec();
                vectors.insert(pos, base.vector(src).clone());
                let f = FrameSystem::new(vectors)?;
                well_conditioned_frame(&f, tol).then_some(f)
            }
            GeneratorKind::NearSingular => {
                let f = near_singular(&sig, m, d, spec.seed, attempt)?;
                let v = classify::is_frame(&f, tol);
                let c = v.bounds.condition();
                (v.is_frame && (NEAR_SINGULAR_RANGE.0..=NEAR_SINGULAR_RANGE.1).contains(&c)).then_some(f)
            }
            GeneratorKind::NonFrame => {
                let f = rank_deficient(&sig, m, d, spec.seed, attempt)?;
                (!classify::is_frame(&f, tol).is_frame).then_some(f)
            }
            GeneratorKind::DeltaExample => unreachable!("handled above"),
        };
        if let Some(f) = candidate {
            return Ok(f);
        }
    }
    Err(Error::Generation(format!(
        "{} contract not met after {MAX_ATTEMPTS} attempts (seed {})",
        spec.kind.name(),
        spec.seed
    )))
}

// Random X with its flattened singular values replaced by a log-uniform
// spread over [κ^{-1/2}, 1], both extremes attained, so that cond(G) = κ.
fn near_singular(sig: &AlgebraSignature, m: usize, d: usize, seed: u64, attempt: usize) -> Result<FrameSystem> {
    let x = random_map(sig, m, d, seed, attempt);
    let mut aux = stream_rng(seed, attempt, AUX_ROW);
    // keep clear of the range ends so rounding cannot push cond(G) outside
    let (lo, hi) = (NEAR_SINGULAR_RANGE.0.ln() + 0.01, NEAR_SINGULAR_RANGE.1.ln() - 0.01);
    let kappa = aux.random_range(lo..hi).exp();
    let smin = kappa.powf(-0.5);
    let mut blocks = Vec::with_capacity(sig.num_blocks());
    for (k, xk) in x.flatten().into_iter().enumerate() {
        let svd = xk.svd(true, true);
        let (u, v_t) = (svd.u.expect("u requested"), svd.v_t.expect("v_t requested"));
        let r = svd.singular_values.len();
        let mut s: Vec<f64> = (0..r).map(|_| (smin.ln() * aux.random::<f64>()).exp()).collect();
        if k == 0 {
            s[0] = 1.0;
        }
        if k == sig.num_blocks() - 1 {
            s[r - 1] = smin;
        }
        let diag =
            CMatrix::from_diagonal(&nalgebra::DVector::from_iterator(r, s.iter().map(|&v| Complex64::new(v, 0.0))));
        blocks.push(u * diag * v_t);
    }
    Ok(FrameSystem::from_synthesis(&ModuleMap::from_flat(sig, m, d, &blocks)?))
}

// Random X with one flattened block projected off a random direction, so
// the Gram block has a kernel.
fn rank_deficient(sig: &AlgebraSignature, m: usize, d: usize, seed: u64, attempt: usize) -> Result<FrameSystem> {
    let x = random_map(sig, m, d, seed, attempt);
    let mut aux = stream_rng(seed, attempt, AUX_ROW);
    let k = aux.random_range(0..sig.num_blocks());
    let mut blocks = x.flatten();
    let dim = blocks[k].ncols();
    let mut v = nalgebra::DVector::from_fn(dim, |_, _| {
        let re = normal(&mut aux);
        let im = normal(&mut aux);
        Complex64::new(re, im)
    });
    v /= Complex64::new(v.norm(), 0.0);
    let proj = CMatrix::identity(dim, dim) - &v * v.adjoint();
    blocks[k] = &blocks[k] * proj;
    Ok(FrameSystem::from_synthesis(&ModuleMap::from_flat(sig, m, d, &blocks)?))
}
