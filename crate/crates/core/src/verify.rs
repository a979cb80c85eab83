//! Randomized cross-checks of the frame-theoretic identities over the
//! generated corpus.
//!
//! For every generator kind, `trials` systems are planned from the master
//! seed; each frame among them is put through every suite. Trials run in
//! parallel but results are collected in trial order, so the report is a
//! pure function of `(trials, seed, tolerance)`.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::Serialize;

use crate::algebra::{AlgebraElement, AlgebraSignature, CMatrix, Tolerance};
use crate::classify;
use crate::corpus::{self, GeneratorKind, GeneratorSpec};
use crate::frame::FrameSystem;
use crate::module::ModuleVector;

/// Signatures the planner draws from.
pub const SIGNATURES: [&[usize]; 5] = [&[1], &[2], &[1, 1], &[1, 2], &[2, 2]];
pub const MAX_PLANNED_RANK: usize = 4;
pub const RECONSTRUCTION_SAMPLES: usize = 10;
pub const RIESZ_SAMPLES: usize = 20;
pub const INEQUALITY_SAMPLES: usize = 5;
/// Reconstruction residuals may reach `RECONSTRUCTION_FACTOR · rel_tol · cond(G) · ‖x‖`.
pub const RECONSTRUCTION_FACTOR: f64 = 10.0;

/// Smallest `rel_tol` the corpus can honour: unit roundoff times the
/// largest condition number the generators produce. Failures below it are
/// reported as tolerance-floor failures.
pub const TOLERANCE_FLOOR: f64 = f64::EPSILON * corpus::CONDITION_CAP;

/// Suite names, in report order.
pub const SUITES: [&str; 8] = [
    "generation",
    "modular_riesz_equivalence",
    "unit_diagonal",
    "exactness_lemma",
    "riesz_implies_exact",
    "reconstruction",
    "riesz_bounds",
    "frame_inequality",
];

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct VerifyConfig {
    pub trials: usize,
    pub seed: u64,
    pub tol: Tolerance,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SuiteSummary {
    pub name: String,
    /// Systems the suite looked at.
    pub checked: usize,
    /// Systems on which the suite's premise held.
    pub applicable: usize,
    pub passed: usize,
    pub failed: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Failure {
    pub suite: String,
    pub trial: usize,
    pub spec: GeneratorSpec,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VerifyReport {
    pub seed: u64,
    pub trials: usize,
    pub rel_tol: f64,
    pub abs_tol: f64,
    /// `rel_tol < TOLERANCE_FLOOR`; any failures are expected rounding artefacts.
    pub below_tolerance_floor: bool,
    pub systems: usize,
    pub frames: usize,
    pub suites: Vec<SuiteSummary>,
    pub failures: Vec<Failure>,
    pub passed: bool,
}

impl VerifyReport {
    pub fn suite(&self, name: &str) -> Option<&SuiteSummary> {
        self.suites.iter().find(|s| s.name == name)
    }
}

/// One suite's verdict on one system; `None` when the premise does not hold.
#[derive(Clone, Debug, PartialEq)]
pub struct Check {
    pub suite: &'static str,
    pub outcome: Option<Result<(), String>>,
}

impl Check {
    fn vacuous(suite: &'static str) -> Self {
        Self { suite, outcome: None }
    }

    fn of(suite: &'static str, ok: bool, detail: impl FnOnce() -> String) -> Self {
        Self { suite, outcome: Some(if ok { Ok(()) } else { Err(detail()) }) }
    }
}

/// Draw the generator specs for every `(kind, trial)`, kind-major.
pub fn plan(trials: usize, seed: u64) -> Vec<(usize, GeneratorSpec)> {
    let mut out = Vec::with_capacity(trials * GeneratorKind::ALL.len());
    for (ki, kind) in GeneratorKind::ALL.into_iter().enumerate() {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(ki as u64);
        for i in 0..trials {
            let signature = SIGNATURES[rng.random_range(0..SIGNATURES.len())].to_vec();
            let mut d = rng.random_range(1..=MAX_PLANNED_RANK);
            let extra = rng.random_range(0..=3usize);
            let spec_seed = rng.random::<u64>();
            let spec = match kind {
                GeneratorKind::DeltaExample => GeneratorSpec { seed: spec_seed, ..GeneratorSpec::delta(2 + i % 7) },
                _ => {
                    if kind == GeneratorKind::NearSingular && d * signature.iter().sum::<usize>() < 2 {
                        d = 2;
                    }
                    let count = match kind {
                        GeneratorKind::ModularRiesz => d,
                        GeneratorKind::OvercompleteFrame | GeneratorKind::DuplicatedVector => d + 1 + extra.min(2),
                        GeneratorKind::NearSingular => d + extra,
                        _ => (d + extra).saturating_sub(1).max(1),
                    };
                    GeneratorSpec { seed: spec_seed, signature, rank: d, count, kind }
                }
            };
            out.push((i, spec));
        }
    }
    out
}

fn sample_rng(spec: &GeneratorSpec) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    rng.set_stream(u64::MAX);
    rng
}

fn random_element(sig: &AlgebraSignature, rng: &mut ChaCha8Rng) -> AlgebraElement {
    let blocks = sig
        .block_sizes()
        .iter()
        .map(|&n| {
            CMatrix::from_fn(n, n, |_, _| {
                let re: f64 = rng.sample(StandardNormal);
                let im: f64 = rng.sample(StandardNormal);
                Complex64::new(re, im)
            })
        })
        .collect();
    AlgebraElement::from_blocks(sig, blocks).expect("shapes follow the signature")
}

fn random_vector(sig: &AlgebraSignature, d: usize, rng: &mut ChaCha8Rng) -> ModuleVector {
    ModuleVector::new(sig, (0..d).map(|_| random_element(sig, rng)).collect()).expect("d ≥ 1")
}

// Sample `s` of the Riesz-bound family: dense, single-index, or random-support.
fn random_coefficients(frame: &FrameSystem, s: usize, rng: &mut ChaCha8Rng) -> Vec<AlgebraElement> {
    let sig = frame.signature();
    let m = frame.len();
    let single = rng.random_range(0..m);
    (0..m)
        .map(|j| {
            let a = random_element(sig, rng);
            let keep = match s % 3 {
                0 => true,
                1 => j == single,
                _ => j == single || rng.random_bool(0.5),
            };
            if keep {
                a
            } else {
                AlgebraElement::zero(sig)
            }
        })
        .collect()
}

/// Run every suite on one frame system.
pub fn check_frame(frame: &FrameSystem, spec: &GeneratorSpec, tol: Tolerance) -> Vec<Check> {
    let verdict = classify::is_frame(frame, tol);
    if !verdict.is_frame {
        return SUITES[1..].iter().map(|&s| Check::vacuous(s)).collect();
    }
    let mut rng = sample_rng(spec);
    let mut checks = Vec::with_capacity(SUITES.len() - 1);

    let mrb = classify::is_modular_riesz(frame, tol);
    let omega = classify::is_omega_independent(frame, tol).independent;
    let bio_dual = classify::is_biorthogonal_to_canonical_dual(frame, tol);
    let bio_seq = classify::has_biorthogonal_sequence(frame, tol);
    checks.push(Check::of("modular_riesz_equivalence", mrb == omega && omega == bio_dual && bio_dual == bio_seq.exists, || {
        format!(
            "modular_riesz={mrb} omega_independent={omega} biorthogonal_to_dual={bio_dual} has_biorthogonal_sequence={} (residual {:e})",
            bio_seq.exists, bio_seq.relative_residual
        )
    }));

    match classify::diagonal_defect(frame, tol) {
        Some(defect) if defect <= tol.rel_tol => checks.push(Check::of("unit_diagonal", mrb, || {
            format!("max_j ‖<x_j,S⁻¹x_j> − 1‖ = {defect:e} but modular_riesz=false")
        })),
        _ => checks.push(Check::vacuous("unit_diagonal")),
    }

    let lemma = classify::is_exact_by_lemma(frame, tol);
    let removal = classify::is_exact_by_removal(frame, tol);
    let (lemma_ok, removal_exact) = match (&lemma, &removal) {
        (Ok(l), Ok(r)) => {
            let bad: Vec<usize> = (0..frame.len()).filter(|&i| l.removable[i] != r.removable[i]).collect();
            checks.push(Check::of("exactness_lemma", bad.is_empty() && l.exact == r.exact, || {
                format!(
                    "indices {bad:?}: invertible(1 − <x_l,S⁻¹x_l>)={:?} removal_leaves_frame={:?}",
                    bad.iter().map(|&i| l.removable[i]).collect::<Vec<_>>(),
                    bad.iter().map(|&i| r.removable[i]).collect::<Vec<_>>()
                )
            }));
            (true, r.exact)
        }
        (l, r) => {
            checks.push(Check::of("exactness_lemma", false, || format!("lemma: {l:?}, removal: {r:?}")));
            (false, false)
        }
    };

    if classify::is_riesz_frank_larson(frame, tol) {
        checks.push(Check::of("riesz_implies_exact", lemma_ok && removal_exact, || {
            let removable = removal.as_ref().map(|r| r.removable.iter().position(|&x| x));
            format!("Frank-Larson Riesz but removable index {removable:?}")
        }));
    } else {
        checks.push(Check::vacuous("riesz_implies_exact"));
    }

    let cond = verdict.bounds.condition();
    let mut worst = (0.0f64, 0usize);
    let mut recon_err = None;
    for s in 0..RECONSTRUCTION_SAMPLES {
        let x = random_vector(frame.signature(), frame.rank(), &mut rng);
        match frame.reconstruction_residual(&x, tol) {
            Ok(r) => {
                let rel = r / x.norm();
                if rel > worst.0 {
                    worst = (rel, s);
                }
            }
            Err(e) => recon_err = Some(e.to_string()),
        }
    }
    let bound = RECONSTRUCTION_FACTOR * tol.rel_tol * cond;
    checks.push(Check::of("reconstruction", recon_err.is_none() && worst.0 <= bound, || match &recon_err {
        Some(e) => e.clone(),
        None => format!("sample {}: relative residual {:e} > {bound:e} (cond {cond:e})", worst.1, worst.0),
    }));

    if mrb {
        let mut bad = Vec::new();
        for s in 0..RIESZ_SAMPLES {
            let coeffs = random_coefficients(frame, s, &mut rng);
            if !frame.riesz_bounds_check(&coeffs, tol).unwrap_or(false) {
                let (lhs, mass) = frame.riesz_terms(&coeffs).unwrap_or((f64::NAN, f64::NAN));
                bad.push(format!("sample {s}: ‖Σa_jx_j‖²={lhs:e} ‖Σa_ja_j*‖={mass:e}"));
            }
        }
        let b = verdict.bounds;
        checks.push(Check::of("riesz_bounds", bad.is_empty(), || {
            format!("bounds ({:e}, {:e}); {}", b.lower, b.upper, bad.join("; "))
        }));
    } else {
        checks.push(Check::vacuous("riesz_bounds"));
    }

    let (c, d) = (verdict.bounds.lower, verdict.bounds.upper);
    let mut bad = Vec::new();
    for s in 0..INEQUALITY_SAMPLES {
        let x = random_vector(frame.signature(), frame.rank(), &mut rng);
        let ip = x.inner_unchecked(&x);
        let sum = frame.frame_sum(&x).expect("shapes agree");
        let upper = ip.scale(Complex64::new(d, 0.0)).sub_unchecked(&sum);
        let lower = sum.sub_unchecked(&ip.scale(Complex64::new(c, 0.0)));
        // positivity is judged at the scale of D<x,x>, the size of both sides
        let scale = d * ip.norm();
        let t = tol.threshold(scale);
        let psd = |a: &AlgebraElement| {
            let herm = a.add_unchecked(&a.adjoint()).scale(Complex64::new(0.5, 0.0));
            a.distance(&a.adjoint()) <= t && herm.spectrum_bounds(tol).is_ok_and(|(lo, _)| lo >= -t)
        };
        let n2 = ip.norm();
        let ns = sum.norm();
        let norm_form = c * n2 - t <= ns && ns <= d * n2 + t;
        if !(psd(&upper) && psd(&lower) && norm_form) {
            bad.push(format!("sample {s}: C‖x‖²={:e} ‖Σ<x,x_j><x_j,x>‖={ns:e} D‖x‖²={:e}", c * n2, d * n2));
        }
    }
    checks.push(Check::of("frame_inequality", bad.is_empty(), || bad.join("; ")));

    checks
}

struct TrialResult {
    trial: usize,
    spec: GeneratorSpec,
    is_frame: bool,
    generation: Result<(), String>,
    checks: Vec<Check>,
}

pub fn run(config: &VerifyConfig) -> VerifyReport {
    let planned = plan(config.trials, config.seed);
    let results: Vec<TrialResult> = planned
        .par_iter()
        .map(|(trial, spec)| match corpus::generate(spec) {
            Ok(frame) => {
                let checks = check_frame(&frame, spec, config.tol);
                TrialResult {
                    trial: *trial,
                    spec: spec.clone(),
                    is_frame: classify::is_frame(&frame, config.tol).is_frame,
                    generation: Ok(()),
                    checks,
                }
            }
            Err(e) => TrialResult {
                trial: *trial,
                spec: spec.clone(),
                is_frame: false,
                generation: Err(e.to_string()),
                checks: Vec::new(),
            },
        })
        .collect();

    let mut suites: Vec<SuiteSummary> = SUITES
        .iter()
        .map(|&name| SuiteSummary { name: name.into(), checked: 0, applicable: 0, passed: 0, failed: 0 })
        .collect();
    let mut failures = Vec::new();
    let mut record = |suite: &str, outcome: &Option<Result<(), String>>, r: &TrialResult| {
        let s = suites.iter_mut().find(|s| s.name == suite).expect("known suite");
        s.checked += 1;
        if let Some(o) = outcome {
            s.applicable += 1;
            match o {
                Ok(()) => s.passed += 1,
                Err(detail) => {
                    s.failed += 1;
                    failures.push(Failure {
                        suite: suite.into(),
                        trial: r.trial,
                        spec: r.spec.clone(),
                        detail: detail.clone(),
                    });
                }
            }
        }
    };
    for r in &results {
        record("generation", &Some(r.generation.clone()), r);
        for c in &r.checks {
            record(c.suite, &c.outcome, r);
        }
    }
    let frames = results.iter().filter(|r| r.is_frame).count();
    let passed = failures.is_empty();
    VerifyReport {
        seed: config.seed,
        trials: config.trials,
        rel_tol: config.tol.rel_tol,
        abs_tol: config.tol.abs_tol,
        below_tolerance_floor: config.tol.rel_tol < TOLERANCE_FLOOR,
        systems: results.len(),
        frames,
        suites,
        failures,
        passed,
    }
}
