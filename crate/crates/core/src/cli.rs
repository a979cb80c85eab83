//! Command-line front end.
//!
//! Exit codes: 0 ok, 2 input error, 3 consistency or suite failure,
//! 4 precondition failure.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::algebra::{AlgebraSignature, Tolerance};
use crate::classify::{self, ClassificationReport};
use crate::corpus::{self, GeneratorKind, GeneratorSpec};
use crate::document::{BoundsDoc, FrameDocument, ReportDoc, WitnessesDoc};
use crate::error::Error;
use crate::verify::{self, VerifyConfig, VerifyReport};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_CONSISTENCY: i32 = 3;
pub const EXIT_PRECONDITION: i32 = 4;

/// `--tol T` sets `rel_tol = T` and `abs_tol = T · ABS_TOL_RATIO`.
pub const ABS_TOL_RATIO: f64 = 1e-3;

#[derive(Debug, Parser)]
#[command(
    name = "cstar-frames",
    version,
    about = "Frames and Riesz bases in Hilbert C*-modules over finite-dimensional C*-algebras"
)]
pub struct Cli {
    /// Relative tolerance for every spectral decision.
    #[arg(long, global = true)]
    pub tol: Option<f64>,

    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,

    /// Include certificates (kernel elements, removable indices, ...) in reports.
    #[arg(long, global = true)]
    pub witnesses: bool,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Classify a frame document.
    Classify { path: PathBuf },
    /// Print the optimal frame bounds, optionally with the canonical dual.
    Bounds {
        path: PathBuf,
        #[arg(long)]
        dual: bool,
    },
    /// Run the randomized cross-check suites.
    Verify {
        #[arg(long, default_value_t = 50, value_parser = clap::value_parser!(u64).range(1..))]
        trials: u64,
        #[arg(long, env = "CSTAR_FRAMES_SEED", default_value_t = 0)]
        seed: u64,
    },
    /// Emit an example frame document.
    Example {
        kind: ExampleKind,
        /// Number of blocks for `delta`.
        #[arg(long, default_value_t = 4)]
        n: usize,
        /// Module rank.
        #[arg(long, default_value_t = 2)]
        d: usize,
        /// Number of vectors (defaults to d for bases, d + 1 otherwise).
        #[arg(long)]
        m: Option<usize>,
        /// Block sizes, comma separated.
        #[arg(long, value_delimiter = ',', default_value = "1")]
        blocks: Vec<usize>,
        #[arg(long, env = "CSTAR_FRAMES_SEED", default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ExampleKind {
    /// Truncated δ-sequence over the diagonal algebra C^n.
    Delta,
    /// Canonical basis of A^d.
    Basis,
    /// Random modular Riesz basis.
    Mrb,
    Overcomplete,
    Duplicated,
    NearSingular,
    NonFrame,
}

struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn new(code: i32, message: impl Into<String>) -> Self {
        Self { code, message: message.into() }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Structural(_) => EXIT_INPUT,
            Error::Inconsistent { .. } => EXIT_CONSISTENCY,
            Error::Domain(_) | Error::Generation(_) => EXIT_PRECONDITION,
        };
        Self::new(code, e.to_string())
    }
}

/// Parse `args` (including the program name) and run; returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() { err.write_all(text.as_bytes()) } else { out.write_all(text.as_bytes()) };
            return code;
        }
    };
    match dispatch(&cli, out) {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message);
            f.code
        }
    }
}

fn cli_tolerance(cli: &Cli) -> Result<Option<Tolerance>, Failure> {
    cli.tol
        .map(|t| Tolerance::new(t, t * ABS_TOL_RATIO).map_err(|e| Failure::new(EXIT_INPUT, e.to_string())))
        .transpose()
}

fn load(path: &Path, cli: &Cli) -> Result<(crate::FrameSystem, Tolerance), Failure> {
    let text =
        std::fs::read_to_string(path).map_err(|e| Failure::new(EXIT_INPUT, format!("{}: {e}", path.display())))?;
    let doc = FrameDocument::parse(&text).map_err(|e| Failure::new(EXIT_INPUT, format!("{}: {e}", path.display())))?;
    let frame = doc.to_frame().map_err(|e| Failure::new(EXIT_INPUT, format!("{}: {e}", path.display())))?;
    let tol = match cli_tolerance(cli)? {
        Some(t) => t,
        None => doc
            .tolerance_over(Tolerance::default())
            .map_err(|e| Failure::new(EXIT_INPUT, format!("{}: {e}", path.display())))?,
    };
    Ok((frame, tol))
}

fn json<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("reports contain only finite numbers")
}

fn compact<T: Serialize>(value: &T) -> String {
    serde_json::to_string(value).expect("reports contain only finite numbers")
}

fn dispatch(cli: &Cli, out: &mut dyn Write) -> Result<i32, Failure> {
    let io = |e: std::io::Error| Failure::new(EXIT_INPUT, format!("write failed: {e}"));
    match &cli.command {
        Command::Classify { path } => {
            let (frame, tol) = load(path, cli)?;
            let report = classify::classify(&frame, tol)?;
            let text = match cli.format {
                Format::Json => json(&ReportDoc::new(&report, cli.witnesses)),
                Format::Text => report_text(&report, cli.witnesses),
            };
            writeln!(out, "{text}").map_err(io)?;
            Ok(EXIT_OK)
        }
        Command::Bounds { path, dual } => {
            let (frame, tol) = load(path, cli)?;
            let verdict = classify::is_frame(&frame, tol);
            if !verdict.is_frame {
                return Err(Failure::new(EXIT_PRECONDITION, "not a frame (lower bound 0)"));
            }
            let dual_doc = if *dual { Some(FrameDocument::from_frame(&frame.canonical_dual(tol)?)) } else { None };
            match cli.format {
                Format::Json => {
                    #[derive(Serialize)]
                    struct BoundsOut {
                        #[serde(flatten)]
                        bounds: BoundsDoc,
                        #[serde(skip_serializing_if = "Option::is_none")]
                        dual: Option<FrameDocument>,
                    }
                    writeln!(out, "{}", json(&BoundsOut { bounds: verdict.bounds.into(), dual: dual_doc }))
                        .map_err(io)?;
                }
                Format::Text => {
                    writeln!(out, "{} {}", significant(verdict.bounds.lower), significant(verdict.bounds.upper))
                        .map_err(io)?;
                    if let Some(doc) = dual_doc {
                        writeln!(out, "{}", doc.to_json()).map_err(io)?;
                    }
                }
            }
            Ok(EXIT_OK)
        }
        Command::Verify { trials, seed } => {
            let tol = cli_tolerance(cli)?.unwrap_or_default();
            let report = verify::run(&VerifyConfig { trials: *trials as usize, seed: *seed, tol });
            let text = match cli.format {
                Format::Json => json(&report),
                Format::Text => verify_text(&report),
            };
            writeln!(out, "{text}").map_err(io)?;
            Ok(if report.passed { EXIT_OK } else { EXIT_CONSISTENCY })
        }
        Command::Example { kind, n, d, m, blocks, seed } => {
            let frame = match kind {
                ExampleKind::Delta => corpus::delta_example(*n)?,
                ExampleKind::Basis => corpus::canonical_basis(&AlgebraSignature::new(blocks.clone())?, *d)?,
                _ => {
                    let gen = match kind {
                        ExampleKind::Mrb => GeneratorKind::ModularRiesz,
                        ExampleKind::Overcomplete => GeneratorKind::OvercompleteFrame,
                        ExampleKind::Duplicated => GeneratorKind::DuplicatedVector,
                        ExampleKind::NearSingular => GeneratorKind::NearSingular,
                        _ => GeneratorKind::NonFrame,
                    };
                    let count = m.unwrap_or(if gen == GeneratorKind::ModularRiesz { *d } else { d + 1 });
                    corpus::generate(&GeneratorSpec {
                        seed: *seed,
                        signature: blocks.clone(),
                        rank: *d,
                        count,
                        kind: gen,
                    })?
                }
            };
            writeln!(out, "{}", FrameDocument::from_frame(&frame).to_json()).map_err(io)?;
            Ok(EXIT_OK)
        }
    }
}

/// Round to 12 significant digits, then print in shortest form.
pub fn significant(x: f64) -> String {
    let rounded: f64 = format!("{x:.11e}").parse().expect("formatted float parses");
    format!("{rounded:?}")
}

fn report_text(r: &ClassificationReport, witnesses: bool) -> String {
    let mut lines = vec![
        format!("is_bessel: {}", r.is_bessel),
        format!("is_frame: {}", r.is_frame),
        format!("is_tight: {}", r.is_tight),
        format!("is_parseval: {}", r.is_parseval),
        format!("is_omega_independent: {}", r.is_omega_independent),
        format!("is_biorthogonal_to_canonical_dual: {}", r.is_biorthogonal_to_canonical_dual),
        format!("has_biorthogonal_sequence: {}", r.has_biorthogonal_sequence),
        format!("is_exact_by_lemma: {}", r.is_exact_by_lemma),
        format!("is_exact_by_removal: {}", r.is_exact_by_removal),
        format!("is_riesz_frank_larson: {}", r.is_riesz_frank_larson),
        format!("is_modular_riesz: {}", r.is_modular_riesz),
        format!("bounds: {} {}", significant(r.bounds.lower), significant(r.bounds.upper)),
    ];
    if witnesses {
        let w = WitnessesDoc::from(&r.witnesses);
        let field = |v: Option<String>| v.unwrap_or_else(|| "none".into());
        lines.push(format!("witness.kernel_element: {}", field(w.kernel_element.as_ref().map(compact))));
        lines.push(format!("witness.removable_index: {}", field(w.removable_index.map(|i| i.to_string()))));
        lines.push(format!(
            "witness.non_invertible_diagonal: {}",
            field(w.non_invertible_diagonal.as_ref().map(compact))
        ));
        lines.push(format!("witness.biorthogonal_sequence: {}", field(w.biorthogonal_sequence.as_ref().map(compact))));
    }
    lines.join("\n")
}

fn verify_text(r: &VerifyReport) -> String {
    let mut lines = vec![format!(
        "verify: seed {} trials {} rel_tol {:e} abs_tol {:e}: {} systems, {} frames",
        r.seed, r.trials, r.rel_tol, r.abs_tol, r.systems, r.frames
    )];
    for s in &r.suites {
        lines.push(format!(
            "{:<26} {} passed {:>4} failed {:>4} (applicable {}, checked {})",
            s.name,
            if s.failed == 0 { "PASS" } else { "FAIL" },
            s.passed,
            s.failed,
            s.applicable,
            s.checked
        ));
    }
    for f in &r.failures {
        lines.push(format!("failure [{}] trial {} spec {}: {}", f.suite, f.trial, compact(&f.spec), f.detail));
    }
    lines.push(match (r.passed, r.below_tolerance_floor) {
        (true, _) => "all suites passed".into(),
        (false, false) => "SUITE FAILURES".into(),
        (false, true) => format!(
            "SUITE FAILURES: tolerance-floor failures (rel_tol {:e} is below {:e}, the rounding floor of the corpus)",
            r.rel_tol,
            verify::TOLERANCE_FLOOR
        ),
    });
    lines.join("\n")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_args(args: &[&str]) -> (i32, String, String) {
        let (mut out, mut err) = (Vec::new(), Vec::new());
        let code = run(std::iter::once("cstar-frames").chain(args.iter().copied()), &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn significant_digits() {
        assert_eq!(significant(1.0), "1.0");
        assert_eq!(significant(3.0000000000000004), "3.0");
        assert_eq!(significant(2.0 / 3.0), "0.666666666667");
        assert_eq!(significant(1.2345678901234e-7), "1.23456789012e-7");
        assert_eq!(significant(0.0), "0.0");
    }

    #[test]
    fn error_kinds_map_to_exit_codes() {
        let code = |e: Error| Failure::from(e).code;
        assert_eq!(code(Error::Structural("x".into())), EXIT_INPUT);
        assert_eq!(code(Error::Domain("x".into())), EXIT_PRECONDITION);
        assert_eq!(code(Error::Generation("x".into())), EXIT_PRECONDITION);
        assert_eq!(code(Error::Inconsistent { invariant: "x".into(), detail: "y".into() }), EXIT_CONSISTENCY);
    }

    #[test]
    fn example_then_version() {
        let (code, out, _) = run_args(&["example", "delta", "--n", "2"]);
        assert_eq!(code, EXIT_OK);
        let doc = FrameDocument::parse(&out).unwrap();
        assert_eq!(doc.algebra.blocks, vec![1, 1]);
        let (code, out, _) = run_args(&["--version"]);
        assert_eq!(code, EXIT_OK);
        assert!(out.starts_with("cstar-frames"));
    }

    #[test]
    fn unsatisfiable_example_is_an_input_error() {
        let (code, _, err) = run_args(&["example", "mrb", "--d", "2", "--m", "3"]);
        assert_eq!(code, EXIT_INPUT);
        assert!(err.starts_with("error:"));
    }
}
