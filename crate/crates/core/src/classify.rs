//! Decision procedures for frame properties.
//!
//! Every predicate is computed from its own definition, never from another
//! predicate, so the known equivalences between them (modular Riesz basis,
//! ω-independence, biorthogonality with the canonical dual, existence of a
//! biorthogonal sequence; exactness via removal vs. via invertibility of
//! `1 − <x_l, S⁻¹x_l>`) are genuine cross-checks. [`classify`] runs all of
//! them and refuses to report a verdict set that violates one.

use crate::algebra::{AlgebraElement, CMatrix, Tolerance};
use crate::error::{Error, Result};
use crate::frame::{FrameBounds, FrameSystem};
use crate::linalg;
use crate::module::ModuleMap;

/// Least-squares residual floor for the biorthogonal-sequence search.
pub const BIORTHOGONAL_RESIDUAL_FLOOR: f64 = 1e-7;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FrameVerdict {
    pub is_bessel: bool,
    pub is_frame: bool,
    pub is_tight: bool,
    pub is_parseval: bool,
    pub bounds: FrameBounds,
}

/// Frame, tight and Parseval verdicts from the optimal bounds.
pub fn is_frame(frame: &FrameSystem, tol: Tolerance) -> FrameVerdict {
    let bounds = frame.frame_bounds();
    let (c, d) = (bounds.lower, bounds.upper);
    let is_frame = d > tol.abs_tol && c > tol.rel_tol * d;
    let is_tight = is_frame && (d - c) <= tol.rel_tol * d;
    let is_parseval = is_tight && (d - 1.0).abs() <= tol.rel_tol;
    // Finite families in A^d are always Bessel.
    FrameVerdict { is_bessel: true, is_frame, is_tight, is_parseval, bounds }
}

// Left singular structure of each flattened synthesis block, shared by the
// kernel-based predicates.
struct SynthesisSpectrum {
    blocks: Vec<(Vec<f64>, CMatrix)>,
    smax: f64,
}

impl SynthesisSpectrum {
    fn new(frame: &FrameSystem) -> Self {
        let blocks: Vec<_> = frame.synthesis_matrix().flatten().iter().map(linalg::left_singular_basis).collect();
        let smax = blocks.iter().filter_map(|(s, _)| s.first()).copied().fold(0.0, f64::max);
        Self { blocks, smax }
    }

    fn is_null(&self, s: f64, tol: Tolerance) -> bool {
        s <= tol.rel_tol * self.smax || self.smax <= tol.abs_tol
    }

    // Columns of the left singular basis spanning `{w : w·X_k = 0}`, per block.
    fn null_directions(
        &self,
        tol: Tolerance,
    ) -> impl Iterator<Item = (usize, nalgebra::DVector<num_complex::Complex64>)> + '_ {
        self.blocks.iter().enumerate().flat_map(move |(k, (s, u))| {
            s.iter()
                .enumerate()
                .filter(move |(_, &sv)| self.is_null(sv, tol))
                .map(move |(c, _)| (k, u.column(c).into_owned()))
        })
    }
}

/// Turn a left null direction `u` of flattened block `k` into coefficients
/// `{a_j}` with `Σ a_j x_j = 0`: row `row` of block `k` of `a_j` is the
/// `j`-th segment of `u*`, everything else zero.
fn unflatten_coefficients(
    frame: &FrameSystem,
    k: usize,
    u: &nalgebra::DVector<num_complex::Complex64>,
    row: usize,
) -> Vec<AlgebraElement> {
    let sig = frame.signature();
    let n = sig.block_sizes()[k];
    (0..frame.len())
        .map(|j| {
            let blocks = sig
                .block_sizes()
                .iter()
                .enumerate()
                .map(|(kk, &nn)| {
                    let mut b = CMatrix::zeros(nn, nn);
                    if kk == k {
                        for c in 0..n {
                            b[(row, c)] = u[j * n + c].conj();
                        }
                    }
                    b
                })
                .collect();
            AlgebraElement::from_blocks(sig, blocks).expect("shapes follow the signature")
        })
        .collect()
}

/// A complex basis of `{a ∈ A^|J| : Σ a_j x_j = 0}`.
pub fn synthesis_kernel_basis(frame: &FrameSystem, tol: Tolerance) -> Vec<Vec<AlgebraElement>> {
    let spec = SynthesisSpectrum::new(frame);
    let sizes = frame.signature().block_sizes();
    spec.null_directions(tol)
        .flat_map(|(k, u)| (0..sizes[k]).map(move |row| (k, u.clone(), row)))
        .map(|(k, u, row)| unflatten_coefficients(frame, k, &u, row))
        .collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct OmegaIndependence {
    pub independent: bool,
    /// Unit-norm coefficients `{a_j}` with `Σ a_j x_j = 0`, when dependent.
    pub kernel_witness: Option<Vec<AlgebraElement>>,
}

/// Trivial kernel of the synthesis map `a ↦ a·X`, decided on the smallest
/// singular value of each flattened block.
pub fn is_omega_independent(frame: &FrameSystem, tol: Tolerance) -> OmegaIndependence {
    let spec = SynthesisSpectrum::new(frame);
    let witness = spec.null_directions(tol).next().map(|(k, u)| unflatten_coefficients(frame, k, &u, 0));
    OmegaIndependence { independent: witness.is_none(), kernel_witness: witness }
}

/// `<x_i, y_j> = δ_ij 1` for all `i, j`.
pub fn is_biorthogonal(frame: &FrameSystem, other: &FrameSystem, tol: Tolerance) -> Result<bool> {
    frame.ensure_same_shape(other)?;
    let sig = frame.signature();
    let one = AlgebraElement::identity(sig);
    let zero = AlgebraElement::zero(sig);
    let xmax = frame.vectors().iter().map(|v| v.norm()).fold(0.0, f64::max);
    let ymax = other.vectors().iter().map(|v| v.norm()).fold(0.0, f64::max);
    let t = tol.threshold((xmax * ymax).max(1.0));
    for (i, x) in frame.vectors().iter().enumerate() {
        for (j, y) in other.vectors().iter().enumerate() {
            let target = if i == j { &one } else { &zero };
            if x.inner_product(y)?.distance(target) > t {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Biorthogonality with the canonical dual; `false` when there is none.
pub fn is_biorthogonal_to_canonical_dual(frame: &FrameSystem, tol: Tolerance) -> bool {
    match frame.canonical_dual(tol) {
        Ok(dual) => is_biorthogonal(frame, &dual, tol).expect("dual has the frame's shape"),
        Err(_) => false,
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct BiorthogonalSearch {
    pub exists: bool,
    /// `‖X·Y* − I‖_F / ‖I‖_F` over all flattened blocks.
    pub relative_residual: f64,
    /// The least-squares candidate `Y`.
    pub candidate: FrameSystem,
}

/// Solve `X·Y* = I_|J|` over `A` in least squares and accept when the
/// relative residual is at most `max(rel_tol, 1e-7)`.
pub fn has_biorthogonal_sequence(frame: &FrameSystem, tol: Tolerance) -> BiorthogonalSearch {
    let flat = frame.synthesis_matrix().flatten();
    let mut res2 = 0.0;
    let mut norm2 = 0.0;
    let mut z_blocks = Vec::with_capacity(flat.len());
    for xk in &flat {
        let rows = xk.nrows();
        let eye = CMatrix::identity(rows, rows);
        let z = linalg::lstsq(xk, &eye);
        res2 += linalg::frobenius(&(xk * &z - &eye)).powi(2);
        norm2 += rows as f64;
        z_blocks.push(z);
    }
    let relative_residual = (res2 / norm2).sqrt();
    // z is Y* as a d × |J| map; its adjoint has rows y_j.
    let z = ModuleMap::from_flat(frame.signature(), frame.rank(), frame.len(), &z_blocks)
        .expect("least-squares solution has the flattened shape of Y*");
    BiorthogonalSearch {
        exists: relative_residual <= tol.rel_tol.max(BIORTHOGONAL_RESIDUAL_FLOOR),
        relative_residual,
        candidate: FrameSystem::from_synthesis(&z.adjoint()),
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct LemmaVerdict {
    pub exact: bool,
    /// Index `l` is removable iff `1 − <x_l, S⁻¹x_l>` is invertible.
    pub removable: Vec<bool>,
    /// `1 − <x_l, S⁻¹x_l>` for every `l`.
    pub complements: Vec<AlgebraElement>,
}

fn require_frame(frame: &FrameSystem, tol: Tolerance) -> Result<()> {
    if is_frame(frame, tol).is_frame {
        Ok(())
    } else {
        Err(Error::Domain("not a frame".into()))
    }
}

/// Exactness through invertibility of `1 − <x_l, S⁻¹x_l>`.
///
/// These elements are perturbations of the unit, so invertibility is judged
/// against `‖1‖ = 1` rather than against their own (possibly
/// rounding-sized) norm.
pub fn is_exact_by_lemma(frame: &FrameSystem, tol: Tolerance) -> Result<LemmaVerdict> {
    require_frame(frame, tol)?;
    let dual = frame.canonical_dual(tol)?;
    let one = AlgebraElement::identity(frame.signature());
    let complements = frame
        .vectors()
        .iter()
        .zip(dual.vectors())
        .map(|(x, y)| Ok(one.sub_unchecked(&x.inner_product(y)?)))
        .collect::<Result<Vec<_>>>()?;
    let removable: Vec<bool> = complements.iter().map(|e| e.is_invertible_against(1.0, tol)).collect();
    Ok(LemmaVerdict { exact: !removable.iter().any(|&r| r), removable, complements })
}

#[derive(Clone, Debug, PartialEq)]
pub struct RemovalVerdict {
    pub exact: bool,
    /// Index `l` is removable iff `{x_j}_{j≠l}` is still a frame.
    pub removable: Vec<bool>,
}

/// Exactness by removing each vector in turn and re-running [`is_frame`].
/// A singleton frame is exact: the empty family spans nothing.
pub fn is_exact_by_removal(frame: &FrameSystem, tol: Tolerance) -> Result<RemovalVerdict> {
    require_frame(frame, tol)?;
    let removable: Vec<bool> =
        (0..frame.len()).map(|l| frame.without(l).is_some_and(|rest| is_frame(&rest, tol).is_frame)).collect();
    Ok(RemovalVerdict { exact: !removable.iter().any(|&r| r), removable })
}

/// Riesz basis in the sense of nonzero vectors for which every vanishing
/// combination `Σ a_j x_j = 0` has `a_j x_j = 0` termwise.
///
/// `a ↦ a_j x_j` is linear, so it suffices to check a basis of the full
/// synthesis kernel.
pub fn is_riesz_frank_larson(frame: &FrameSystem, tol: Tolerance) -> bool {
    let norms: Vec<f64> = frame.vectors().iter().map(|v| v.norm()).collect();
    let scale = norms.iter().copied().fold(0.0, f64::max);
    let t = tol.threshold(scale);
    if norms.iter().any(|&n| n <= t) {
        return false;
    }
    synthesis_kernel_basis(frame, tol)
        .iter()
        .all(|coeffs| coeffs.iter().zip(frame.vectors()).all(|(a, x)| x.left_mul_unchecked(a).norm() <= t))
}

/// Image of the standard basis of `A^|J|` under an invertible module map,
/// i.e. `|J| = d` and the synthesis matrix is invertible over `A`.
pub fn is_modular_riesz(frame: &FrameSystem, tol: Tolerance) -> bool {
    frame.len() == frame.rank() && frame.synthesis_matrix().is_invertible(tol)
}

/// `max_j ‖<x_j, S⁻¹x_j> − 1‖`, or `None` for non-frames.
pub fn diagonal_defect(frame: &FrameSystem, tol: Tolerance) -> Option<f64> {
    let dual = frame.canonical_dual(tol).ok()?;
    let one = AlgebraElement::identity(frame.signature());
    Some(
        frame
            .vectors()
            .iter()
            .zip(dual.vectors())
            .map(|(x, y)| x.inner_unchecked(y).distance(&one))
            .fold(0.0, f64::max),
    )
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Witnesses {
    /// Nonzero `{a_j}` with `Σ a_j x_j = 0`.
    pub kernel_element: Option<Vec<AlgebraElement>>,
    /// An index whose removal leaves a frame.
    pub removable_index: Option<usize>,
    /// `(l, 1 − <x_l, S⁻¹x_l>)` for the first index where it is not invertible.
    pub non_invertible_diagonal: Option<(usize, AlgebraElement)>,
    /// A sequence biorthogonal to the frame.
    pub biorthogonal_sequence: Option<FrameSystem>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ClassificationReport {
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
    pub bounds: FrameBounds,
    pub witnesses: Witnesses,
    /// Per-index removability from both exactness routes (frames only).
    pub removable_by_lemma: Vec<bool>,
    pub removable_by_removal: Vec<bool>,
}

impl ClassificationReport {
    /// The report-level invariants: the four-way equivalence and the
    /// lemma/removal agreement for frames, and the frame hierarchy.
    pub fn check_consistency(&self) -> Result<()> {
        let hierarchy = (!self.is_parseval || self.is_tight)
            && (!self.is_tight || self.is_frame)
            && (!self.is_frame || self.is_bessel);
        if !hierarchy {
            return Err(Error::Inconsistent {
                invariant: "frame hierarchy".into(),
                detail: format!(
                    "parseval={} tight={} frame={} bessel={}",
                    self.is_parseval, self.is_tight, self.is_frame, self.is_bessel
                ),
            });
        }
        if !self.is_frame {
            return Ok(());
        }
        let four = [
            self.is_modular_riesz,
            self.is_omega_independent,
            self.is_biorthogonal_to_canonical_dual,
            self.has_biorthogonal_sequence,
        ];
        if four.iter().any(|&v| v != four[0]) {
            return Err(Error::Inconsistent {
                invariant: "modular Riesz equivalence".into(),
                detail: format!(
                    "is_modular_riesz={} is_omega_independent={} is_biorthogonal_to_canonical_dual={} has_biorthogonal_sequence={}",
                    four[0], four[1], four[2], four[3]
                ),
            });
        }
        if self.is_exact_by_lemma != self.is_exact_by_removal || self.removable_by_lemma != self.removable_by_removal {
            return Err(Error::Inconsistent {
                invariant: "exactness lemma".into(),
                detail: format!(
                    "is_exact_by_lemma={} (removable {:?}) is_exact_by_removal={} (removable {:?})",
                    self.is_exact_by_lemma,
                    self.removable_by_lemma,
                    self.is_exact_by_removal,
                    self.removable_by_removal
                ),
            });
        }
        Ok(())
    }
}

/// Run every predicate without checking cross-predicate invariants.
pub fn classify_unchecked(frame: &FrameSystem, tol: Tolerance) -> ClassificationReport {
    let fv = is_frame(frame, tol);
    let omega = is_omega_independent(frame, tol);
    let bio = has_biorthogonal_sequence(frame, tol);
    let mut witnesses = Witnesses {
        kernel_element: omega.kernel_witness.clone(),
        biorthogonal_sequence: bio.exists.then(|| bio.candidate.clone()),
        ..Witnesses::default()
    };
    let (mut lemma_exact, mut removal_exact) = (false, false);
    let (mut by_lemma, mut by_removal) = (Vec::new(), Vec::new());
    if fv.is_frame {
        if let Ok(l) = is_exact_by_lemma(frame, tol) {
            lemma_exact = l.exact;
            witnesses.non_invertible_diagonal =
                l.removable.iter().position(|&r| !r).map(|i| (i, l.complements[i].clone()));
            by_lemma = l.removable;
        }
        if let Ok(r) = is_exact_by_removal(frame, tol) {
            removal_exact = r.exact;
            witnesses.removable_index = r.removable.iter().position(|&x| x);
            by_removal = r.removable;
        }
    }
    ClassificationReport {
        is_bessel: fv.is_bessel,
        is_frame: fv.is_frame,
        is_tight: fv.is_tight,
        is_parseval: fv.is_parseval,
        is_omega_independent: omega.independent,
        is_biorthogonal_to_canonical_dual: is_biorthogonal_to_canonical_dual(frame, tol),
        has_biorthogonal_sequence: bio.exists,
        is_exact_by_lemma: lemma_exact,
        is_exact_by_removal: removal_exact,
        is_riesz_frank_larson: is_riesz_frank_larson(frame, tol),
        is_modular_riesz: is_modular_riesz(frame, tol),
        bounds: fv.bounds,
        witnesses,
        removable_by_lemma: by_lemma,
        removable_by_removal: by_removal,
    }
}

/// Run every predicate and verify the report-level invariants.
pub fn classify(frame: &FrameSystem, tol: Tolerance) -> Result<ClassificationReport> {
    let report = classify_unchecked(frame, tol);
    report.check_consistency()?;
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::AlgebraSignature;
    use crate::module::ModuleVector;
    use num_complex::Complex64;

    fn scalar_frame(rows: &[&[f64]]) -> FrameSystem {
        let s = AlgebraSignature::new(vec![1]).unwrap();
        let vectors = rows
            .iter()
            .map(|r| {
                ModuleVector::new(&s, r.iter().map(|&v| AlgebraElement::scalar(&s, Complex64::new(v, 0.0))).collect())
                    .unwrap()
            })
            .collect();
        FrameSystem::new(vectors).unwrap()
    }

    fn mercedes() -> FrameSystem {
        scalar_frame(&[&[1.0, 0.0], &[0.0, 1.0], &[1.0, 1.0]])
    }

    fn basis(sig: &[usize], d: usize) -> FrameSystem {
        let s = AlgebraSignature::new(sig.to_vec()).unwrap();
        FrameSystem::from_synthesis(&ModuleMap::identity(&s, d).unwrap())
    }

    fn scalar_of(a: &AlgebraElement) -> f64 {
        assert!(a.block(0)[(0, 0)].im.abs() < 1e-12);
        a.block(0)[(0, 0)].re
    }

    const TOL: Tolerance = Tolerance { rel_tol: 1e-9, abs_tol: 1e-12 };

    #[test]
    fn frame_verdicts() {
        let v = is_frame(&mercedes(), TOL);
        assert!(v.is_frame && !v.is_tight && !v.is_parseval);
        assert!(!is_frame(&scalar_frame(&[&[1.0, 0.0]]), TOL).is_frame);
        let b = is_frame(&basis(&[2, 1], 3), TOL);
        assert!(b.is_parseval && b.is_tight);
    }

    #[test]
    fn mercedes_kernel_witness_is_proportional_to_one_one_minus_one() {
        let omega = is_omega_independent(&mercedes(), TOL);
        assert!(!omega.independent);
        let w: Vec<Complex64> = omega.kernel_witness.unwrap().iter().map(|a| a.block(0)[(0, 0)]).collect();
        // normalize the phase on the first entry
        let ratio: Vec<Complex64> = w.iter().map(|z| z / w[0]).collect();
        for (r, e) in ratio.iter().zip([1.0, 1.0, -1.0]) {
            assert!((r - Complex64::new(e, 0.0)).norm() < 1e-12);
        }
        let norm: f64 = w.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        assert!((norm - 1.0).abs() < 1e-12);
    }

    #[test]
    fn basis_is_omega_independent() {
        assert!(is_omega_independent(&basis(&[2, 1], 2), TOL).independent);
    }

    #[test]
    fn biorthogonal_sequence_search() {
        let found = has_biorthogonal_sequence(&basis(&[1, 2], 2), TOL);
        assert!(found.exists);
        assert!(is_biorthogonal(&basis(&[1, 2], 2), &found.candidate, TOL).unwrap());
        let none = has_biorthogonal_sequence(&mercedes(), TOL);
        assert!(!none.exists);
        // rank-2 left side of a 3×3 system: one of three directions is missed
        assert!((none.relative_residual - (1.0f64 / 3.0).sqrt()).abs() < 1e-12);
    }

    #[test]
    fn biorthogonal_shape_mismatch() {
        assert!(matches!(is_biorthogonal(&mercedes(), &scalar_frame(&[&[1.0, 0.0]]), TOL), Err(Error::Structural(_))));
    }

    #[test]
    fn mercedes_lemma_values() {
        let l = is_exact_by_lemma(&mercedes(), TOL).unwrap();
        let vals: Vec<f64> = l.complements.iter().map(scalar_of).collect();
        for (v, e) in vals.iter().zip([1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0]) {
            assert!((v - e).abs() < 1e-12);
        }
        assert_eq!(l.removable, vec![true, true, true]);
        assert!(!l.exact);
    }

    #[test]
    fn exactness_requires_a_frame() {
        let nf = scalar_frame(&[&[1.0, 0.0]]);
        assert!(matches!(is_exact_by_lemma(&nf, TOL), Err(Error::Domain(_))));
        assert!(matches!(is_exact_by_removal(&nf, TOL), Err(Error::Domain(_))));
    }

    #[test]
    fn removal_examples() {
        assert!(!is_exact_by_removal(&mercedes(), TOL).unwrap().exact);
        let dup = scalar_frame(&[&[1.0, 0.0], &[1.0, 0.0], &[0.0, 1.0]]);
        let r = is_exact_by_removal(&dup, TOL).unwrap();
        assert_eq!(r.removable, vec![true, true, false]);
        let single = scalar_frame(&[&[2.0]]);
        assert!(is_exact_by_removal(&single, TOL).unwrap().exact);
        assert!(is_exact_by_lemma(&single, TOL).unwrap().exact);
    }

    #[test]
    fn frank_larson_examples() {
        assert!(is_riesz_frank_larson(&basis(&[2], 3), TOL));
        assert!(!is_riesz_frank_larson(&mercedes(), TOL));
        assert!(!is_riesz_frank_larson(&scalar_frame(&[&[1.0], &[0.0]]), TOL));
    }

    #[test]
    fn modular_riesz_examples() {
        assert!(is_modular_riesz(&basis(&[1, 2], 3), TOL));
        assert!(!is_modular_riesz(&mercedes(), TOL));
    }

    #[test]
    fn canonical_basis_report() {
        let r = classify(&basis(&[2, 1], 2), TOL).unwrap();
        assert!(r.is_frame && r.is_parseval && r.is_omega_independent && r.is_modular_riesz);
        assert!(r.is_biorthogonal_to_canonical_dual && r.has_biorthogonal_sequence);
        assert!(r.is_exact_by_lemma && r.is_exact_by_removal && r.is_riesz_frank_larson);
        assert_eq!((r.bounds.lower, r.bounds.upper), (1.0, 1.0));
        assert_eq!(r.witnesses.removable_index, None);
        assert_eq!(r.witnesses.non_invertible_diagonal.as_ref().map(|w| w.0), Some(0));
    }

    #[test]
    fn consistency_violation_is_reported() {
        let mut r = classify(&mercedes(), TOL).unwrap();
        r.is_modular_riesz = true;
        match r.check_consistency() {
            Err(Error::Inconsistent { invariant, detail }) => {
                assert_eq!(invariant, "modular Riesz equivalence");
                assert!(detail.contains("is_modular_riesz=true"));
                assert!(detail.contains("is_omega_independent=false"));
            }
            other => panic!("expected inconsistency, got {other:?}"),
        }
    }
}
