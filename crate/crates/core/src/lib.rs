//! Frame theory in free Hilbert modules over finite-dimensional C*-algebras.
//!
//! The algebra is always in canonical form `M_{n_1}(C) ⊕ … ⊕ M_{n_K}(C)`,
//! modules are the free modules `A^d` with the inner product
//! `<x, y> = Σ_i x_i y_i*` (A-linear in the first slot), and module maps are
//! matrices over `A` acting on row vectors from the right. Every rank,
//! kernel and spectral decision goes through the blockwise complex
//! "flattening" of those matrices.
//!
//! ```
//! use cstar_frames::{classify, corpus, Tolerance};
//!
//! let frame = corpus::delta_example(4).unwrap();
//! let report = classify::classify(&frame, Tolerance::default()).unwrap();
//! assert!(report.is_parseval && report.is_exact_by_removal);
//! assert!(report.is_riesz_frank_larson && !report.is_modular_riesz);
//! ```

pub mod algebra;
pub mod classify;
pub mod cli;
pub mod corpus;
pub mod document;
pub mod error;
pub mod frame;
mod linalg;
pub mod module;
pub mod verify;

pub use algebra::{AlgebraElement, AlgebraSignature, CMatrix, Tolerance};
pub use classify::ClassificationReport;
pub use corpus::{GeneratorKind, GeneratorSpec};
pub use error::{Error, Result};
pub use frame::{FrameBounds, FrameSystem};
pub use module::{ModuleMap, ModuleVector};
pub use num_complex::Complex64;
