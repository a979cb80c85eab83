//! JSON file format for frame systems and classification reports.
//!
//! ```json
//! {
//!   "algebra": { "blocks": [1, 2] },
//!   "module_rank": 1,
//!   "frame": [ [ [ [[ [1.0, 0.0] ]], [[ [1.0, 0.0], [0.0, 0.0] ], [ [0.0, 0.0], [1.0, 0.0] ]] ] ] ],
//!   "tolerance": { "rel_tol": 1e-9 }
//! }
//! ```
//!
//! `frame` holds `m` rows of `d` algebra elements; an element is a list of
//! `K` square matrices, each a row-major list of rows of `[re, im]` pairs.
//! Floats are written in shortest round-trip form and parsed exactly, so
//! emit/parse is bit-exact.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::algebra::{AlgebraElement, AlgebraSignature, CMatrix, Tolerance};
use crate::classify::{ClassificationReport, Witnesses};
use crate::frame::{FrameBounds, FrameSystem};
use crate::module::ModuleVector;

pub type MatrixDoc = Vec<Vec<[f64; 2]>>;
pub type ElementDoc = Vec<MatrixDoc>;

#[derive(Debug, Error, PartialEq)]
pub enum DocumentError {
    #[error("{path}: {message}")]
    Json { path: String, message: String },
    #[error("{path}: {message}")]
    Shape { path: String, message: String },
}

fn shape(path: impl Into<String>, message: impl Into<String>) -> DocumentError {
    DocumentError::Shape { path: path.into(), message: message.into() }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AlgebraDoc {
    pub blocks: Vec<usize>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ToleranceDoc {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rel_tol: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub abs_tol: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FrameDocument {
    pub algebra: AlgebraDoc,
    pub module_rank: usize,
    pub frame: Vec<Vec<ElementDoc>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<ToleranceDoc>,
}

impl FrameDocument {
    pub fn parse(text: &str) -> Result<Self, DocumentError> {
        let de = &mut serde_json::Deserializer::from_str(text);
        serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            DocumentError::Json {
                path: if path == "." || path == "?" { "$".into() } else { path },
                message: e.into_inner().to_string(),
            }
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("documents contain only finite numbers")
    }

    pub fn from_frame(frame: &FrameSystem) -> Self {
        Self {
            algebra: AlgebraDoc { blocks: frame.signature().block_sizes().to_vec() },
            module_rank: frame.rank(),
            frame: frame.vectors().iter().map(|v| v.entries().iter().map(element_doc).collect()).collect(),
            tolerance: None,
        }
    }

    /// Tolerance overrides from the document applied over `base`.
    pub fn tolerance_over(&self, base: Tolerance) -> Result<Tolerance, DocumentError> {
        let Some(t) = &self.tolerance else { return Ok(base) };
        Tolerance::new(t.rel_tol.unwrap_or(base.rel_tol), t.abs_tol.unwrap_or(base.abs_tol))
            .map_err(|e| shape("tolerance", e.to_string()))
    }

    /// Validate every shape and build the frame system.
    pub fn to_frame(&self) -> Result<FrameSystem, DocumentError> {
        let sig = AlgebraSignature::new(self.algebra.blocks.clone())
            .map_err(|_| shape("algebra.blocks", "expected a nonempty list of positive block sizes"))?;
        if self.module_rank == 0 {
            return Err(shape("module_rank", "must be at least 1"));
        }
        if self.frame.is_empty() {
            return Err(shape("frame", "must contain at least one vector"));
        }
        let mut vectors = Vec::with_capacity(self.frame.len());
        for (j, row) in self.frame.iter().enumerate() {
            if row.len() != self.module_rank {
                return Err(shape(
                    format!("frame[{j}]"),
                    format!("expected {} algebra elements, got {}", self.module_rank, row.len()),
                ));
            }
            let entries = row
                .iter()
                .enumerate()
                .map(|(i, e)| parse_element(&sig, e, &format!("frame[{j}][{i}]")))
                .collect::<Result<Vec<_>, _>>()?;
            vectors.push(ModuleVector::new(&sig, entries).expect("entries validated against the signature"));
        }
        Ok(FrameSystem::new(vectors).expect("vectors validated against signature and rank"))
    }
}

pub fn element_doc(a: &AlgebraElement) -> ElementDoc {
    a.blocks()
        .iter()
        .map(|b| (0..b.nrows()).map(|r| (0..b.ncols()).map(|c| [b[(r, c)].re, b[(r, c)].im]).collect()).collect())
        .collect()
}

fn parse_element(sig: &AlgebraSignature, e: &ElementDoc, path: &str) -> Result<AlgebraElement, DocumentError> {
    if e.len() != sig.num_blocks() {
        return Err(shape(path, format!("expected {} blocks, got {}", sig.num_blocks(), e.len())));
    }
    let mut blocks = Vec::with_capacity(e.len());
    for (k, (m, &n)) in e.iter().zip(sig.block_sizes()).enumerate() {
        if m.len() != n {
            return Err(shape(format!("{path}[{k}]"), format!("expected {n} rows, got {}", m.len())));
        }
        let mut b = CMatrix::zeros(n, n);
        for (r, row) in m.iter().enumerate() {
            if row.len() != n {
                return Err(shape(format!("{path}[{k}][{r}]"), format!("expected {n} entries, got {}", row.len())));
            }
            for (c, &[re, im]) in row.iter().enumerate() {
                if !(re.is_finite() && im.is_finite()) {
                    return Err(shape(format!("{path}[{k}][{r}][{c}]"), "entries must be finite"));
                }
                b[(r, c)] = Complex64::new(re, im);
            }
        }
        blocks.push(b);
    }
    Ok(AlgebraElement::from_blocks(sig, blocks).expect("shapes validated"))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoundsDoc {
    pub lower: f64,
    pub upper: f64,
}

impl From<FrameBounds> for BoundsDoc {
    fn from(b: FrameBounds) -> Self {
        Self { lower: b.lower, upper: b.upper }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DiagonalWitnessDoc {
    pub index: usize,
    pub element: ElementDoc,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WitnessesDoc {
    pub kernel_element: Option<Vec<ElementDoc>>,
    pub removable_index: Option<usize>,
    pub non_invertible_diagonal: Option<DiagonalWitnessDoc>,
    pub biorthogonal_sequence: Option<Vec<Vec<ElementDoc>>>,
}

impl From<&Witnesses> for WitnessesDoc {
    fn from(w: &Witnesses) -> Self {
        Self {
            kernel_element: w.kernel_element.as_ref().map(|a| a.iter().map(element_doc).collect()),
            removable_index: w.removable_index,
            non_invertible_diagonal: w
                .non_invertible_diagonal
                .as_ref()
                .map(|(i, e)| DiagonalWitnessDoc { index: *i, element: element_doc(e) }),
            biorthogonal_sequence: w.biorthogonal_sequence.as_ref().map(|f| FrameDocument::from_frame(f).frame),
        }
    }
}

/// Machine form of a [`ClassificationReport`]; keys keep this field order.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ReportDoc {
    pub is_bessel: bool,
    pub is_frame: bool,
    pub is_tight: bool,
    pub is_parseval: bool,
    pub is_omega_independent: bool,
    pub is_biorthogonal_to_canonical_dual: bool,
    pub has_biorthogonal_sequence: bool,
    pub is_exact_by_lemma: bool,
    pub is_exact_by_removal: bool,
    pub is_riesz_frank_larson: bool,
    pub is_modular_riesz: bool,
    pub bounds: BoundsDoc,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witnesses: Option<WitnessesDoc>,
}

impl ReportDoc {
    pub fn new(r: &ClassificationReport, with_witnesses: bool) -> Self {
        Self {
            is_bessel: r.is_bessel,
            is_frame: r.is_frame,
            is_tight: r.is_tight,
            is_parseval: r.is_parseval,
            is_omega_independent: r.is_omega_independent,
            is_biorthogonal_to_canonical_dual: r.is_biorthogonal_to_canonical_dual,
            has_biorthogonal_sequence: r.has_biorthogonal_sequence,
            is_exact_by_lemma: r.is_exact_by_lemma,
            is_exact_by_removal: r.is_exact_by_removal,
            is_riesz_frank_larson: r.is_riesz_frank_larson,
            is_modular_riesz: r.is_modular_riesz,
            bounds: r.bounds.into(),
            witnesses: with_witnesses.then(|| (&r.witnesses).into()),
        }
    }
}
