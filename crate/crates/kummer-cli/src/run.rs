//! Subcommand implementations: translate requests into core calls and emit
//! deterministic reports.
//!
//! Exit-code contract: 0 = the command ran and produced a report; 1 = the
//! request never validated (bad flags, bad expressions, bad config); 2 = the
//! request was well-formed but evaluation failed (domain error, refused sum
//! constant, …); 3 = a corpus run finished with label contradictions.

use std::collections::BTreeMap;
use std::fs::File;
use std::path::{Path, PathBuf};

use kummer_core::catalog::{Corpus, Label};
use kummer_core::classical::{self, Conclusion, GaussParams, Side};
use kummer_core::corpus::{corpus_run, CorpusTest};
use kummer_core::engine::{self, Evidence, WindowVerdict};
use kummer_core::numeric::{parse_rational_text, NumericContext, Value};
use kummer_core::oracle::{evidence_probe, find_catalog_entry, resolve_sum_constant};
use kummer_core::report::{
    self, AnalysisReport, IdentityMeta, NamedVerdict, RequestEcho, SamplePoint, SumMeta,
    VerdictReport, WitnessMeta, WitnessReport, SCHEMA_VERSION,
};
use kummer_core::seq::{SequenceSpec, TestWindow};
use kummer_core::witness::{
    conv_witness, div_witness, expr_witness, weighted_conv_witness, weighted_div_witness,
    Provenance, SumConstant, WitnessSequence,
};
use kummer_core::Error;

use crate::settings::Settings;

/// Consecutive blocks the `probe` evidence choice must complete.
const PROBE_BLOCKS: usize = 5;
/// Index bound for the `probe` evidence scan.
const PROBE_BOUND: u64 = 1_000_000;
/// Oracle partial-sum horizon when a sum constant has to be estimated.
const DEFAULT_HORIZON: u64 = 1_000;

/// A command failure, carrying its exit code.
#[derive(Debug)]
pub enum CliError {
    /// The request did not validate (exit 1).
    Usage(String),
    /// Evaluation failed (exit 2).
    Eval(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Eval(_) => 2,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            CliError::Usage(m) | CliError::Eval(m) => m,
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match &e {
            Error::Config(_) | Error::Syntax { .. } => CliError::Usage(e.to_string()),
            _ => CliError::Eval(e.to_string()),
        }
    }
}

/// Successful command output: the report text and the exit code (0, or 3 for
/// a corpus run with contradictions).
pub struct CmdOutput {
    pub stdout: String,
    pub exit: i32,
}

impl CmdOutput {
    fn ok(stdout: String) -> Self {
        CmdOutput { stdout, exit: 0 }
    }
}

/// The test selected by `analyze --test`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TestKind {
    Raabe,
    Bertrand,
    Gauss,
    KummerStep,
    KummerDiv,
    WeightedConv,
    WeightedDiv,
    Condensation,
    Olivier,
}

impl TestKind {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        match text {
            "raabe" => Ok(TestKind::Raabe),
            "bertrand" => Ok(TestKind::Bertrand),
            "gauss" => Ok(TestKind::Gauss),
            "kummer-step" => Ok(TestKind::KummerStep),
            "kummer-div" => Ok(TestKind::KummerDiv),
            "weighted-conv" => Ok(TestKind::WeightedConv),
            "weighted-div" => Ok(TestKind::WeightedDiv),
            "condensation" => Ok(TestKind::Condensation),
            "olivier" => Ok(TestKind::Olivier),
            other => Err(CliError::Usage(format!(
                "unknown test `{other}` (expected raabe, bertrand, gauss, kummer-step, \
                 kummer-div, weighted-conv, weighted-div, condensation, or olivier)"
            ))),
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            TestKind::Raabe => "raabe",
            TestKind::Bertrand => "bertrand",
            TestKind::Gauss => "gauss",
            TestKind::KummerStep => "kummer-step",
            TestKind::KummerDiv => "kummer-div",
            TestKind::WeightedConv => "weighted-conv",
            TestKind::WeightedDiv => "weighted-div",
            TestKind::Condensation => "condensation",
            TestKind::Olivier => "olivier",
        }
    }

    /// The claim the divergence-side evidence must support for this test.
    fn evidence_claim(self) -> &'static str {
        match self {
            TestKind::Raabe | TestKind::Gauss => "Σ c(n)/n diverges",
            TestKind::Bertrand => "Σ c(n)/(n ln n) diverges",
            _ => "Σ 1/q(n) diverges",
        }
    }
}

/// Plain-data arguments for `analyze` (built from the clap layer).
pub struct AnalyzeArgs {
    pub a: String,
    pub c: Option<String>,
    pub test: String,
    pub witness: String,
    pub m: u64,
    pub margin: String,
    pub sum: Option<String>,
    pub side: String,
    pub theta: Option<String>,
    pub mu: String,
    pub gamma: String,
    pub assert_qrecip_divergent: Option<String>,
    pub emit_trace: Option<PathBuf>,
}

/// Plain-data arguments for `witness`.
pub struct WitnessArgs {
    pub a: String,
    pub c: Option<String>,
    pub kind: String,
    pub m: u64,
    pub sum: Option<String>,
    pub sample: u64,
    pub emit_trace: Option<PathBuf>,
}

/// Plain-data arguments for `corpus`.
pub struct CorpusArgs {
    pub tests: String,
    pub format: String,
}

fn parse_spec(text: &str, what: &str) -> Result<SequenceSpec, CliError> {
    SequenceSpec::parse(text)
        .map_err(|e| CliError::Usage(format!("{what} expression `{text}`: {e}")))
}

fn parse_side(text: &str) -> Result<Side, CliError> {
    match text {
        "conv" => Ok(Side::Convergence),
        "div" => Ok(Side::Divergence),
        other => Err(CliError::Usage(format!(
            "unknown side `{other}` (expected conv or div)"
        ))),
    }
}

fn load_corpus(settings: &Settings) -> Result<Corpus, CliError> {
    match &settings.corpus {
        Some(path) => Corpus::from_path(path).map_err(CliError::from),
        None => Ok(Corpus::builtin().clone()),
    }
}

fn echo_base(settings: &Settings, window: TestWindow) -> RequestEcho {
    RequestEcho {
        a: String::new(),
        c: None,
        test: String::new(),
        witness: None,
        m: None,
        window: window.to_string(),
        mode: settings.mode.as_str().to_string(),
        digits: match settings.mode {
            kummer_core::numeric::Mode::Exact => None,
            kummer_core::numeric::Mode::Float => Some(settings.digits),
        },
        epsilon: match settings.mode {
            kummer_core::numeric::Mode::Exact => None,
            kummer_core::numeric::Mode::Float => Some(settings.epsilon.clone()),
        },
        evidence: Vec::new(),
    }
}

fn witness_meta(q: &WitnessSequence) -> WitnessMeta {
    WitnessMeta {
        provenance: q.provenance().as_str().to_string(),
        describe: q.describe(),
        sum: q.sum_constant().map(|s| SumMeta {
            value: s.value.render(),
            source: s.source.describe(),
        }),
        step: match q.provenance() {
            Provenance::TailSumQuotient => Some(q.step()),
            _ => None,
        },
    }
}

/// Resolve the sum constant for Σ c(n)·a(n). With c ≡ 1 this is Σ a(n) and
/// the catalog can be consulted directly; otherwise the product series is
/// resolved (the catalog key is its canonical form, so composed products
/// only match when an entry was written that way).
fn resolve_weighted_sum(
    a: &SequenceSpec,
    c: &SequenceSpec,
    corpus: &Corpus,
    user: Option<Value>,
    ctx: &NumericContext,
) -> Result<SumConstant, Error> {
    if c.display() == "1" {
        let entry = find_catalog_entry(corpus, a);
        return resolve_sum_constant(a, entry, user, DEFAULT_HORIZON, ctx);
    }
    let product = SequenceSpec::parse(&format!("({})*({})", c.display(), a.display()))?;
    let entry = find_catalog_entry(corpus, &product);
    resolve_sum_constant(&product, entry, user, DEFAULT_HORIZON, ctx)
}

/// Build the divergence-side evidence requested by
/// `--assert-qrecip-divergent`. The probe scans the reciprocal series named
/// by the test's claim: Σ 1/q for the kummer checks, Σ c/n for Raabe and
/// Gauss, Σ c/(n ln n) for Bertrand.
fn build_evidence(
    choice: &str,
    test: TestKind,
    a: &SequenceSpec,
    c: &SequenceSpec,
    witness: Option<&WitnessSequence>,
    corpus: &Corpus,
    window: TestWindow,
) -> Result<Evidence, CliError> {
    match choice {
        "catalog" => {
            let entry = find_catalog_entry(corpus, a).ok_or_else(|| {
                CliError::Usage(format!("no corpus entry matches a = {a} for catalog evidence"))
            })?;
            if entry.label != Label::Diverges {
                return Err(CliError::Usage(format!(
                    "corpus entry `{}` is labeled {}; catalog evidence needs a divergent label",
                    entry.id, entry.label
                )));
            }
            Ok(Evidence::CatalogLabel {
                id: entry.id.clone(),
            })
        }
        "asserted" => Ok(Evidence::Asserted {
            note: "divergence asserted by the caller via --assert-qrecip-divergent".to_string(),
        }),
        "probe" => {
            let probed: WitnessSequence;
            let (q, start) = match test {
                TestKind::Raabe | TestKind::Gauss => {
                    let spec =
                        SequenceSpec::parse(&format!("(n)/({})", c.display())).map_err(CliError::from)?;
                    probed = expr_witness(spec, a.clone());
                    (&probed, window.start())
                }
                TestKind::Bertrand => {
                    let spec = SequenceSpec::parse(&format!("(n*ln(n))/({})", c.display()))
                        .map_err(CliError::from)?;
                    probed = expr_witness(spec, a.clone());
                    (&probed, window.start().max(2))
                }
                _ => {
                    let q = witness.ok_or_else(|| {
                        CliError::Usage(format!(
                            "test {} has no witness to probe",
                            test.as_str()
                        ))
                    })?;
                    (q, window.start())
                }
            };
            evidence_probe(q, start, PROBE_BLOCKS, PROBE_BOUND).map_err(CliError::from)
        }
        other => Err(CliError::Usage(format!(
            "unknown evidence choice `{other}` (expected catalog, asserted, or probe)"
        ))),
    }
}

fn conclusion_str(c: Conclusion) -> String {
    match c {
        Conclusion::ConvergesCertified => "converges-certified-on-window".to_string(),
        Conclusion::DivergesCertified => "diverges-certified-on-window".to_string(),
        Conclusion::Inconclusive => "inconclusive".to_string(),
    }
}

/// Conclusion wording for single-verdict checks with a fixed direction.
fn directional_conclusion(v: &WindowVerdict, certifies: Conclusion) -> String {
    if v.is_certified() {
        conclusion_str(certifies)
    } else {
        "inconclusive".to_string()
    }
}

fn write_trace(path: &Path, trace: &[engine::MarginPoint]) -> Result<(), CliError> {
    let mut f = File::create(path)
        .map_err(|e| CliError::Eval(format!("cannot create trace file {}: {e}", path.display())))?;
    report::write_margin_trace_csv(&mut f, trace)
        .map_err(|e| CliError::Eval(format!("writing trace {}: {e}", path.display())))
}

/// `analyze`: run one test and emit the JSON report.
pub fn cmd_analyze(args: &AnalyzeArgs, settings: &Settings) -> Result<CmdOutput, CliError> {
    let test = TestKind::parse(&args.test)?;
    let ctx = settings.context().map_err(CliError::from)?;
    let window = settings.window_or(1, 1_000).map_err(CliError::from)?;
    let corpus = load_corpus(settings)?;

    let a = parse_spec(&args.a, "--a")?;
    let c = match &args.c {
        Some(text) => parse_spec(text, "--c")?,
        None => SequenceSpec::one(),
    };
    let user_sum = match &args.sum {
        Some(text) => Some(
            ctx.parse_number(text)
                .map_err(|e| CliError::Usage(format!("--sum `{text}`: {e}")))?,
        ),
        None => None,
    };

    // Witness, for the tests that take one.
    let takes_witness = matches!(
        test,
        TestKind::KummerStep
            | TestKind::KummerDiv
            | TestKind::WeightedConv
            | TestKind::WeightedDiv
            | TestKind::Condensation
            | TestKind::Olivier
    );
    if !takes_witness && args.witness != "auto" {
        return Err(CliError::Usage(format!(
            "test {} does not take a --witness (it builds its own comparison sequence)",
            test.as_str()
        )));
    }

    // Condensation compares against a plain sequence, not a quotient witness.
    let condensation_q: Option<SequenceSpec> = if test == TestKind::Condensation {
        if args.witness == "auto" {
            let entry = find_catalog_entry(&corpus, &a);
            match entry.and_then(|e| e.condensation_witness.clone()) {
                Some(q) => Some(q),
                None => {
                    return Err(CliError::Usage(format!(
                        "condensation needs --witness <expr> (no corpus entry with a \
                         condensation witness matches a = {a})"
                    )))
                }
            }
        } else {
            Some(parse_spec(&args.witness, "--witness")?)
        }
    } else {
        None
    };

    let witness: Option<WitnessSequence> = if takes_witness && test != TestKind::Condensation {
        Some(if args.witness == "auto" {
            match test {
                TestKind::KummerStep => {
                    let entry = find_catalog_entry(&corpus, &a);
                    let s = resolve_sum_constant(&a, entry, user_sum.clone(), DEFAULT_HORIZON, &ctx)
                        .map_err(CliError::from)?;
                    conv_witness(a.clone(), args.m, s, &ctx).map_err(CliError::from)?
                }
                TestKind::KummerDiv => div_witness(a.clone()),
                TestKind::WeightedConv => {
                    let s = resolve_weighted_sum(&a, &c, &corpus, user_sum.clone(), &ctx)
                        .map_err(CliError::from)?;
                    weighted_conv_witness(a.clone(), c.clone(), s)
                }
                TestKind::WeightedDiv => weighted_div_witness(a.clone(), c.clone()),
                TestKind::Olivier => {
                    // Σ a(n) = Σ (1/n)·(n·a(n)): the index-scaled factorization
                    // turns term decay into a weighted tail-sum problem.
                    let entry = find_catalog_entry(&corpus, &a);
                    let s = resolve_sum_constant(&a, entry, user_sum.clone(), DEFAULT_HORIZON, &ctx)
                        .map_err(CliError::from)?;
                    let scaled = a.clone().scaled_by_index();
                    let inv_index = SequenceSpec::parse("1/n").map_err(CliError::from)?;
                    weighted_conv_witness(scaled, inv_index, s)
                }
                _ => unreachable!("takes_witness matched"),
            }
        } else {
            expr_witness(parse_spec(&args.witness, "--witness")?, a.clone())
        })
    } else {
        None
    };

    let evidence = match &args.assert_qrecip_divergent {
        Some(choice) => Some(build_evidence(
            choice,
            test,
            &a,
            &c,
            witness.as_ref(),
            &corpus,
            window,
        )?),
        None => None,
    };

    let mut request = echo_base(settings, window);
    request.a = a.to_string();
    request.c = Some(c.to_string());
    request.test = test.as_str().to_string();
    request.m = match test {
        TestKind::KummerStep | TestKind::KummerDiv => Some(args.m),
        _ => None,
    };
    request.witness = if takes_witness {
        Some(args.witness.clone())
    } else {
        None
    };
    if let Some(ev) = &evidence {
        request.evidence.push(ev.describe(test.evidence_claim()));
    }

    let conclusion: Option<String>;
    let mut verdicts: Vec<NamedVerdict> = Vec::new();
    let mut observations: BTreeMap<String, String> = BTreeMap::new();
    let mut diagnostics: Vec<String> = Vec::new();
    // The trace written to --emit-trace (the conclusion-carrying branch).
    let trace: Vec<engine::MarginPoint>;

    match test {
        TestKind::Raabe => {
            let r = classical::raabe(&a, &c, window, &ctx, evidence.as_ref())
                .map_err(CliError::from)?;
            conclusion = Some(conclusion_str(r.conclusion));
            trace = match r.conclusion {
                Conclusion::DivergesCertified => r.div_verdict.trace.clone(),
                _ => r.conv_verdict.trace.clone(),
            };
            verdicts.push(NamedVerdict {
                name: "raabe-convergence".to_string(),
                verdict: VerdictReport::from_verdict(&r.conv_verdict),
            });
            verdicts.push(NamedVerdict {
                name: "raabe-divergence".to_string(),
                verdict: VerdictReport::from_verdict(&r.div_verdict),
            });
            diagnostics = r.diagnostics;
        }
        TestKind::Bertrand => {
            let side = parse_side(&args.side)?;
            let theta_text = args.theta.as_deref().ok_or_else(|| {
                CliError::Usage("bertrand needs --theta <expr> (the slack sequence)".to_string())
            })?;
            let theta = parse_spec(theta_text, "--theta")?;
            let r = classical::bertrand(&a, &c, &theta, side, window, &ctx, evidence.as_ref())
                .map_err(CliError::from)?;
            conclusion = Some(conclusion_str(r.conclusion));
            trace = r.verdict.trace.clone();
            request.window = r.window.to_string();
            observations.insert(
                match side {
                    Side::Convergence => "theta-min".to_string(),
                    Side::Divergence => "theta-max".to_string(),
                },
                r.theta_stat.render(),
            );
            observations.insert("kummer-margin-min".to_string(), r.kummer_margin_min.render());
            observations.insert("kummer-margin-max".to_string(), r.kummer_margin_max.render());
            verdicts.push(NamedVerdict {
                name: format!("bertrand-{}", side.as_str()),
                verdict: VerdictReport::from_verdict(&r.verdict),
            });
            diagnostics = r.diagnostics;
        }
        TestKind::Gauss => {
            let side = parse_side(&args.side)?;
            let mu = ctx
                .parse_number(&args.mu)
                .map_err(|e| CliError::Usage(format!("--mu `{}`: {e}", args.mu)))?;
            let gamma = parse_rational_text(&args.gamma).ok_or_else(|| {
                CliError::Usage(format!(
                    "--gamma `{}` is not a rational number (use p/q or a decimal)",
                    args.gamma
                ))
            })?;
            let theta = match &args.theta {
                Some(text) => parse_spec(text, "--theta")?,
                None => SequenceSpec::parse("0").map_err(CliError::from)?,
            };
            let params = GaussParams { mu, gamma, theta };
            let r = classical::gauss(&a, &c, &params, side, window, &ctx, evidence.as_ref())
                .map_err(CliError::from)?;
            conclusion = Some(conclusion_str(r.conclusion));
            trace = r.verdict.trace.clone();
            observations.insert("theta-max-abs".to_string(), r.theta_max_abs.render());
            verdicts.push(NamedVerdict {
                name: format!("gauss-{}", side.as_str()),
                verdict: VerdictReport::from_verdict(&r.verdict),
            });
            diagnostics = r.diagnostics;
        }
        TestKind::KummerStep => {
            let q = witness.as_ref().expect("witness built above");
            let margin = ctx
                .parse_number(&args.margin)
                .map_err(|e| CliError::Usage(format!("--margin `{}`: {e}", args.margin)))?;
            let v = engine::kummer_step_check(&a, q, args.m, &margin, window, &ctx)
                .map_err(CliError::from)?;
            conclusion = Some(directional_conclusion(&v, Conclusion::ConvergesCertified));
            observations.insert("margin-constant".to_string(), margin.render());
            trace = v.trace.clone();
            verdicts.push(NamedVerdict {
                name: "kummer-step".to_string(),
                verdict: VerdictReport::from_verdict(&v),
            });
        }
        TestKind::KummerDiv => {
            let q = witness.as_ref().expect("witness built above");
            let v = engine::kummer_div_step_check(&a, q, args.m, window, &ctx, evidence.as_ref())
                .map_err(CliError::from)?;
            conclusion = Some(directional_conclusion(&v, Conclusion::DivergesCertified));
            trace = v.trace.clone();
            verdicts.push(NamedVerdict {
                name: "kummer-div".to_string(),
                verdict: VerdictReport::from_verdict(&v),
            });
        }
        TestKind::WeightedConv => {
            let q = witness.as_ref().expect("witness built above");
            let v = engine::weighted_conv_check(&a, &c, q, window, &ctx).map_err(CliError::from)?;
            conclusion = Some(directional_conclusion(&v, Conclusion::ConvergesCertified));
            trace = v.trace.clone();
            verdicts.push(NamedVerdict {
                name: "weighted-conv".to_string(),
                verdict: VerdictReport::from_verdict(&v),
            });
        }
        TestKind::WeightedDiv => {
            let q = witness.as_ref().expect("witness built above");
            // With c ≡ 1 the Σ c/q and Σ 1/q claims coincide, so one piece
            // of evidence serves both; otherwise the Σ c/q side is left
            // unsupported and the report says which consequences survive.
            let cq_evidence = if c.display() == "1" {
                evidence.as_ref()
            } else {
                None
            };
            let v = engine::weighted_div_check(
                &a,
                &c,
                q,
                window,
                &ctx,
                evidence.as_ref(),
                cq_evidence,
            )
            .map_err(CliError::from)?;
            conclusion = Some(directional_conclusion(&v, Conclusion::DivergesCertified));
            trace = v.trace.clone();
            verdicts.push(NamedVerdict {
                name: "weighted-div".to_string(),
                verdict: VerdictReport::from_verdict(&v),
            });
        }
        TestKind::Condensation => {
            let q = condensation_q.as_ref().expect("checked above");
            let v = classical::condensation_check(&a, q, window, &ctx).map_err(CliError::from)?;
            conclusion = Some(directional_conclusion(&v, Conclusion::ConvergesCertified));
            observations.insert("condensation-witness".to_string(), q.display().to_string());
            trace = v.trace.clone();
            verdicts.push(NamedVerdict {
                name: "condensation".to_string(),
                verdict: VerdictReport::from_verdict(&v),
            });
        }
        TestKind::Olivier => {
            let q = witness.as_ref().expect("witness built above");
            let r = classical::olivier_check(&a, q, window, &ctx).map_err(CliError::from)?;
            conclusion = Some(match r.verdict.status {
                engine::CheckStatus::HoldsOnWindow => "term-decay-bounded-on-window".to_string(),
                _ => "inconclusive".to_string(),
            });
            observations.insert("final-d".to_string(), r.final_d.render());
            observations.insert("final-n-a".to_string(), r.final_na.render());
            observations.insert("tail-max-abs-d".to_string(), r.tail_max_abs_d.render());
            observations.insert("tail-max-n-a".to_string(), r.tail_max_na.render());
            trace = r.verdict.trace.clone();
            verdicts.push(NamedVerdict {
                name: "olivier".to_string(),
                verdict: VerdictReport::from_verdict(&r.verdict),
            });
            diagnostics = r.diagnostics;
        }
    }

    let trace_file = match &args.emit_trace {
        Some(path) => {
            write_trace(path, &trace)?;
            Some(path.display().to_string())
        }
        None => None,
    };

    let reportv = AnalysisReport {
        schema: SCHEMA_VERSION,
        command: "analyze".to_string(),
        request,
        conclusion,
        verdicts,
        witness: witness.as_ref().map(witness_meta),
        observations,
        diagnostics,
        trace_file,
    };
    Ok(CmdOutput::ok(report::to_json_string(&reportv)))
}

/// `witness`: build a constructed witness, sample it, verify its identity.
pub fn cmd_witness(args: &WitnessArgs, settings: &Settings) -> Result<CmdOutput, CliError> {
    let ctx = settings.context().map_err(CliError::from)?;
    let window = settings.window_or(1, 32).map_err(CliError::from)?;
    let corpus = load_corpus(settings)?;

    let a = parse_spec(&args.a, "--a")?;
    let c = match &args.c {
        Some(text) => parse_spec(text, "--c")?,
        None => SequenceSpec::one(),
    };
    let user_sum = match &args.sum {
        Some(text) => Some(
            ctx.parse_number(text)
                .map_err(|e| CliError::Usage(format!("--sum `{text}`: {e}")))?,
        ),
        None => None,
    };

    let q = match args.kind.as_str() {
        "conv" => {
            let entry = find_catalog_entry(&corpus, &a);
            let s = resolve_sum_constant(&a, entry, user_sum, DEFAULT_HORIZON, &ctx)
                .map_err(CliError::from)?;
            conv_witness(a.clone(), args.m, s, &ctx).map_err(CliError::from)?
        }
        "div" => div_witness(a.clone()),
        "weighted-conv" => {
            let s = resolve_weighted_sum(&a, &c, &corpus, user_sum, &ctx).map_err(CliError::from)?;
            weighted_conv_witness(a.clone(), c.clone(), s)
        }
        "weighted-div" => weighted_div_witness(a.clone(), c.clone()),
        other => {
            return Err(CliError::Usage(format!(
                "unknown witness kind `{other}` (expected conv, div, weighted-conv, or weighted-div)"
            )))
        }
    };

    let sample_len = args.sample.min(window.len());
    let mut sample = Vec::with_capacity(sample_len as usize);
    for n in window.start()..window.start() + sample_len {
        sample.push(SamplePoint {
            n,
            q: q.q(n, &ctx).map_err(CliError::from)?.render(),
        });
    }

    let identity = q
        .identity_residual(window, &ctx)
        .map_err(CliError::from)?
        .map(|r| IdentityMeta {
            max_residual: r.max_residual.render(),
            predicted: r.predicted,
        });

    let trace_file = match &args.emit_trace {
        Some(path) => {
            let m = q.step();
            let mut rows = Vec::with_capacity(window.len() as usize);
            for n in window.iter() {
                let qn = q.q(n, &ctx).map_err(CliError::from)?;
                let margin = engine::step_margin(&a, &q, m, n, &ctx).map_err(CliError::from)?;
                rows.push((n, qn, margin));
            }
            let mut f = File::create(path).map_err(|e| {
                CliError::Eval(format!("cannot create trace file {}: {e}", path.display()))
            })?;
            report::write_witness_trace_csv(&mut f, &rows)
                .map_err(|e| CliError::Eval(format!("writing trace {}: {e}", path.display())))?;
            Some(path.display().to_string())
        }
        None => None,
    };

    let mut request = echo_base(settings, window);
    request.a = a.to_string();
    request.c = Some(c.to_string());
    request.test = format!("witness-{}", args.kind);
    request.m = match args.kind.as_str() {
        "conv" => Some(args.m),
        _ => None,
    };

    let reportv = WitnessReport {
        schema: SCHEMA_VERSION,
        command: "witness".to_string(),
        request,
        witness: witness_meta(&q),
        sample,
        identity,
        trace_file,
    };
    Ok(CmdOutput::ok(report::to_json_string(&reportv)))
}

/// `corpus`: sweep a corpus file against the selected tests.
pub fn cmd_corpus(args: &CorpusArgs, settings: &Settings) -> Result<CmdOutput, CliError> {
    let ctx = settings.context().map_err(CliError::from)?;
    let window = settings.window_or(1, 500).map_err(CliError::from)?;
    let corpus = load_corpus(settings)?;

    let tests: Vec<CorpusTest> = match args.tests.as_str() {
        "default" => CorpusTest::DEFAULT.to_vec(),
        "all" => CorpusTest::ALL.to_vec(),
        list => {
            let mut v = Vec::new();
            for part in list.split(',') {
                v.push(CorpusTest::parse(part.trim()).map_err(CliError::from)?);
            }
            v
        }
    };

    let run = corpus_run(&corpus, &tests, window, &ctx);
    let stdout = match args.format.as_str() {
        "json" => {
            let r = report::corpus_report(&run, &tests, window, settings.mode);
            report::to_json_string(&r)
        }
        "csv" => report::corpus_csv(&run),
        other => {
            return Err(CliError::Usage(format!(
                "unknown format `{other}` (expected json or csv)"
            )))
        }
    };

    let exit = if run.contradictions > 0 { 3 } else { 0 };
    Ok(CmdOutput { stdout, exit })
}
