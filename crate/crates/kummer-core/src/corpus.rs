//! Corpus sweep harness: runs a set of tests across every catalog entry and
//! compares certified verdicts against the labels.
//!
//! Agreement semantics are deliberately asymmetric: only a *certified*
//! verdict can contradict a label. Errors, skips, inconclusive outcomes,
//! and inequalities that hold without supporting evidence are all neutral —
//! a test that certifies nothing cannot be wrong about anything.

use num::BigRational;
use rayon::prelude::*;
use std::fmt;

use crate::catalog::{Corpus, CorpusEntry, Label};
use crate::classical::{self, Conclusion};
use crate::engine::{
    kummer_div_step_check, weighted_conv_check, weighted_div_check, CheckStatus, Evidence,
    WindowVerdict,
};
use crate::error::{Error, Result};
use crate::numeric::{Mode, NumericContext};
use crate::oracle::{evidence_probe, resolve_sum_constant};
use crate::seq::{SequenceSpec, TestWindow};
use crate::witness::{div_witness, expr_witness, weighted_conv_witness, weighted_div_witness};

/// Tests the sweep can run per entry.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum CorpusTest {
    /// Weighted Raabe with c ≡ 1/2 (both branches).
    Raabe,
    /// Tail-sum witness construction + weighted convergence check, c ≡ 1.
    WeightedConv,
    /// Partial-sum witness construction + weighted divergence check, c ≡ 1,
    /// with probe evidence for Σ1/q.
    WeightedDiv,
    /// Condensation inequality with the shipped per-entry witness.
    Condensation,
    /// Classify the condensed series Σ 2^m·a(2^m) and map the verdict back.
    CondensedClass,
}

impl CorpusTest {
    pub const ALL: [CorpusTest; 5] = [
        CorpusTest::Raabe,
        CorpusTest::WeightedConv,
        CorpusTest::WeightedDiv,
        CorpusTest::Condensation,
        CorpusTest::CondensedClass,
    ];
    pub const DEFAULT: [CorpusTest; 3] = [
        CorpusTest::Raabe,
        CorpusTest::WeightedConv,
        CorpusTest::WeightedDiv,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            CorpusTest::Raabe => "raabe",
            CorpusTest::WeightedConv => "weighted-conv",
            CorpusTest::WeightedDiv => "weighted-div",
            CorpusTest::Condensation => "condensation",
            CorpusTest::CondensedClass => "condensed-class",
        }
    }

    pub fn parse(text: &str) -> Result<Self> {
        match text {
            "raabe" => Ok(CorpusTest::Raabe),
            "weighted-conv" => Ok(CorpusTest::WeightedConv),
            "weighted-div" => Ok(CorpusTest::WeightedDiv),
            "condensation" => Ok(CorpusTest::Condensation),
            "condensed-class" => Ok(CorpusTest::CondensedClass),
            other => Err(Error::Config(format!(
                "unknown corpus test `{other}` (expected raabe, weighted-conv, weighted-div, condensation, or condensed-class)"
            ))),
        }
    }
}

impl fmt::Display for CorpusTest {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// How a row relates to the entry's label.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Agreement {
    Consistent,
    Contradicts,
    Neutral,
}

impl Agreement {
    pub fn as_str(self) -> &'static str {
        match self {
            Agreement::Consistent => "consistent",
            Agreement::Contradicts => "contradicts",
            Agreement::Neutral => "neutral",
        }
    }
}

/// One entry × test outcome.
#[derive(Debug, Clone)]
pub struct CorpusRow {
    pub entry_id: String,
    pub test: CorpusTest,
    /// Scan status or row-level disposition: holds-on-window,
    /// fails-at-index, error, or skipped.
    pub status: String,
    /// What the test concluded: converges-certified, diverges-certified, or
    /// inconclusive.
    pub conclusion: String,
    pub agreement: Agreement,
    pub min_margin: Option<String>,
    pub max_margin: Option<String>,
    pub detail: String,
}

#[derive(Debug, Clone)]
pub struct CorpusRunReport {
    pub rows: Vec<CorpusRow>,
    pub contradictions: usize,
}

impl CorpusRunReport {
    pub fn has_contradiction(&self) -> bool {
        self.contradictions > 0
    }
}

// Frozen sweep parameters: per-test window caps keep the cross-product
// cheap and the 2^n indices in range; probes are hardware-double evidence.
const WEIGHTED_CONV_END_CAP: u64 = 500;
const WEIGHTED_DIV_END_CAP: u64 = 1000;
const CONDENSATION_END_CAP: u64 = 14;
const CONDENSED_END_CAP: u64 = 12;
const CONDENSED_CONV_START: u64 = 5;
const SWEEP_PROBE_BLOCKS: usize = 3;
const WEIGHTED_DIV_PROBE_BOUND: u64 = 20_000;
const CONDENSED_PROBE_BOUND: u64 = 60;

/// Run `tests` against every corpus entry on (per-test clampings of) the
/// base window. Entries run in parallel; rows come back sorted by
/// (entry id, test) and are fully deterministic for a fixed context mode.
pub fn corpus_run(
    corpus: &Corpus,
    tests: &[CorpusTest],
    window: TestWindow,
    ctx: &NumericContext,
) -> CorpusRunReport {
    // `NumericContext` holds interior caches and is not `Sync`; rebuild one
    // per entry from the (plain-data) parameters instead of sharing.
    let mode = ctx.mode();
    let digits = ctx.digits();
    let epsilon = ctx.epsilon_text().to_string();
    let mut rows: Vec<CorpusRow> = corpus
        .entries()
        .par_iter()
        .flat_map_iter(|entry| {
            let ctx = match mode {
                Mode::Exact => NumericContext::exact(),
                Mode::Float => NumericContext::float(digits, &epsilon)
                    .expect("parameters came from a valid context"),
            };
            tests
                .iter()
                .map(move |test| run_one(entry, *test, window, &ctx))
                .collect::<Vec<_>>()
        })
        .collect();
    rows.sort_by(|a, b| (&a.entry_id, a.test).cmp(&(&b.entry_id, b.test)));
    let contradictions = rows
        .iter()
        .filter(|r| r.agreement == Agreement::Contradicts)
        .count();
    CorpusRunReport {
        rows,
        contradictions,
    }
}

fn run_one(
    entry: &CorpusEntry,
    test: CorpusTest,
    window: TestWindow,
    ctx: &NumericContext,
) -> CorpusRow {
    let result = match test {
        CorpusTest::Raabe => run_raabe(entry, window, ctx),
        CorpusTest::WeightedConv => run_weighted_conv(entry, window, ctx),
        CorpusTest::WeightedDiv => run_weighted_div(entry, window, ctx),
        CorpusTest::Condensation => run_condensation(entry, window, ctx),
        CorpusTest::CondensedClass => run_condensed_class(entry, window, ctx),
    };
    match result {
        Ok(row) => row,
        Err(e) => CorpusRow {
            entry_id: entry.id.clone(),
            test,
            status: "error".to_string(),
            conclusion: "inconclusive".to_string(),
            agreement: Agreement::Neutral,
            min_margin: None,
            max_margin: None,
            detail: e.to_string(),
        },
    }
}

/// Map a certified classification (or none) against the entry label.
fn agreement_for(certified: Option<Label>, label: Label) -> Agreement {
    match certified {
        None => Agreement::Neutral,
        Some(l) if l == label => Agreement::Consistent,
        Some(_) => Agreement::Contradicts,
    }
}

fn margins_of(v: &WindowVerdict) -> (Option<String>, Option<String>) {
    (
        v.min_margin.as_ref().map(|m| m.render()),
        v.max_margin.as_ref().map(|m| m.render()),
    )
}

fn run_raabe(entry: &CorpusEntry, window: TestWindow, ctx: &NumericContext) -> Result<CorpusRow> {
    let w = window.clamp_start(2)?;
    let c = SequenceSpec::constant(BigRational::new(1.into(), 2.into()));
    // Σ c(n)/n = Σ 1/(2n), a constant multiple of the harmonic series.
    let ev = Evidence::CatalogLabel {
        id: "harmonic".to_string(),
    };
    let report = classical::raabe(&entry.series, &c, w, ctx, Some(&ev))?;
    let (certified, status, margins, detail) = match report.conclusion {
        Conclusion::ConvergesCertified => (
            Some(Label::Converges),
            report.conv_verdict.status.as_str().to_string(),
            margins_of(&report.conv_verdict),
            format!("convergence branch holds on {w} with c ≡ 1/2"),
        ),
        Conclusion::DivergesCertified => (
            Some(Label::Diverges),
            report.div_verdict.status.as_str().to_string(),
            margins_of(&report.div_verdict),
            format!("divergence branch holds on {w} with c ≡ 1/2 and harmonic-multiple evidence"),
        ),
        Conclusion::Inconclusive => (
            None,
            "fails-at-index".to_string(),
            margins_of(&report.conv_verdict),
            format!(
                "neither branch certifies: {}",
                report
                    .diagnostics
                    .first()
                    .map(String::as_str)
                    .unwrap_or("margins on the convergence branch shown")
            ),
        ),
    };
    Ok(CorpusRow {
        entry_id: entry.id.clone(),
        test: CorpusTest::Raabe,
        status,
        conclusion: report.conclusion.as_str().to_string(),
        agreement: agreement_for(certified, entry.label),
        min_margin: margins.0,
        max_margin: margins.1,
        detail,
    })
}

fn run_weighted_conv(
    entry: &CorpusEntry,
    window: TestWindow,
    ctx: &NumericContext,
) -> Result<CorpusRow> {
    let w = TestWindow::new(window.start(), window.end().min(WEIGHTED_CONV_END_CAP))?;
    let c = SequenceSpec::one();
    let horizon = 1000.max(w.end() + 1);
    let sum = match resolve_sum_constant(&entry.series, Some(entry), None, horizon, ctx) {
        Ok(s) => s,
        Err(Error::SumNotCertified(msg)) => {
            return Ok(CorpusRow {
                entry_id: entry.id.clone(),
                test: CorpusTest::WeightedConv,
                status: "skipped".to_string(),
                conclusion: "inconclusive".to_string(),
                agreement: Agreement::Neutral,
                min_margin: None,
                max_margin: None,
                detail: format!("no sum constant: {msg}"),
            });
        }
        Err(e) => return Err(e),
    };
    let sum_desc = sum.source.describe();
    let witness = weighted_conv_witness(entry.series.clone(), c.clone(), sum);
    let verdict = weighted_conv_check(&entry.series, &c, &witness, w, ctx)?;
    let certified = if verdict.is_certified() {
        Some(Label::Converges)
    } else {
        None
    };
    let margins = margins_of(&verdict);
    Ok(CorpusRow {
        entry_id: entry.id.clone(),
        test: CorpusTest::WeightedConv,
        status: verdict.status.as_str().to_string(),
        conclusion: match certified {
            Some(_) => "converges-certified".to_string(),
            None => "inconclusive".to_string(),
        },
        agreement: agreement_for(certified, entry.label),
        min_margin: margins.0,
        max_margin: margins.1,
        detail: format!("tail-sum witness with S from {sum_desc}"),
    })
}

fn run_weighted_div(
    entry: &CorpusEntry,
    window: TestWindow,
    ctx: &NumericContext,
) -> Result<CorpusRow> {
    let w = TestWindow::new(window.start(), window.end().min(WEIGHTED_DIV_END_CAP))?;
    let c = SequenceSpec::one();
    let witness = weighted_div_witness(entry.series.clone(), c.clone());
    let ev = evidence_probe(&witness, 1, SWEEP_PROBE_BLOCKS, WEIGHTED_DIV_PROBE_BOUND)?;
    // With c ≡ 1, Σ c/q and Σ 1/q are the same series: one probe serves
    // both evidence slots.
    let verdict = weighted_div_check(&entry.series, &c, &witness, w, ctx, Some(&ev), Some(&ev))?;
    let certified = if verdict.is_certified() {
        Some(Label::Diverges)
    } else {
        None
    };
    let margins = margins_of(&verdict);
    Ok(CorpusRow {
        entry_id: entry.id.clone(),
        test: CorpusTest::WeightedDiv,
        status: verdict.status.as_str().to_string(),
        conclusion: match certified {
            Some(_) => "diverges-certified".to_string(),
            None => "inconclusive".to_string(),
        },
        agreement: agreement_for(certified, entry.label),
        min_margin: margins.0,
        max_margin: margins.1,
        detail: format!("partial-sum witness; {}", ev.describe("Σ 1/q(n) diverges")),
    })
}

fn run_condensation(
    entry: &CorpusEntry,
    window: TestWindow,
    ctx: &NumericContext,
) -> Result<CorpusRow> {
    let w = TestWindow::new(window.start(), window.end().min(CONDENSATION_END_CAP))?;
    let Some(q) = &entry.condensation_witness else {
        return Ok(CorpusRow {
            entry_id: entry.id.clone(),
            test: CorpusTest::Condensation,
            status: "skipped".to_string(),
            conclusion: "inconclusive".to_string(),
            agreement: Agreement::Neutral,
            min_margin: None,
            max_margin: None,
            detail: "entry ships no condensation witness".to_string(),
        });
    };
    let verdict = classical::condensation_check(&entry.series, q, w, ctx)?;
    let certified = if verdict.is_certified() {
        Some(Label::Converges)
    } else {
        None
    };
    let margins = margins_of(&verdict);
    Ok(CorpusRow {
        entry_id: entry.id.clone(),
        test: CorpusTest::Condensation,
        status: verdict.status.as_str().to_string(),
        conclusion: match certified {
            Some(_) => "converges-certified".to_string(),
            None => "inconclusive".to_string(),
        },
        agreement: agreement_for(certified, entry.label),
        min_margin: margins.0,
        max_margin: margins.1,
        detail: match certified {
            Some(_) => format!("witness q = {q} satisfies the condensation inequality"),
            None => format!(
                "witness q = {q} fails the inequality — certifies nothing by itself"
            ),
        },
    })
}

fn run_condensed_class(
    entry: &CorpusEntry,
    window: TestWindow,
    ctx: &NumericContext,
) -> Result<CorpusRow> {
    let conv_w = TestWindow::new(
        window.start().max(CONDENSED_CONV_START),
        window.end().min(CONDENSED_END_CAP),
    )?;
    let div_w = TestWindow::new(window.start(), window.end().min(CONDENSED_END_CAP))?;
    // The condensed↔original equivalence needs nonincreasing terms.
    classical::check_sampled_nonincreasing(&entry.series, 1u64 << (CONDENSED_END_CAP + 1), ctx)?;
    let t = SequenceSpec::condensed(entry.series.clone());

    // Convergence route: index witness, margin ≥ 1.
    let index_witness = expr_witness(SequenceSpec::index(), t.clone());
    let conv_verdict = weighted_conv_check(&t, &SequenceSpec::one(), &index_witness, conv_w, ctx)?;
    if conv_verdict.status == CheckStatus::HoldsOnWindow {
        let margins = margins_of(&conv_verdict);
        return Ok(CorpusRow {
            entry_id: entry.id.clone(),
            test: CorpusTest::CondensedClass,
            status: conv_verdict.status.as_str().to_string(),
            conclusion: "converges-certified".to_string(),
            agreement: agreement_for(Some(Label::Converges), entry.label),
            min_margin: margins.0,
            max_margin: margins.1,
            detail: format!(
                "condensed series margin ≥ 1 on {conv_w} with q(m) = m; terms nonincreasing (sampled), so the original series classifies with it"
            ),
        });
    }

    // Divergence route: partial-sum witness on the condensed series, with a
    // block probe over the condensed index range.
    let witness = div_witness(t.clone());
    let ev = evidence_probe(&witness, 1, SWEEP_PROBE_BLOCKS, CONDENSED_PROBE_BOUND)?;
    let div_verdict = kummer_div_step_check(&t, &witness, 1, div_w, ctx, Some(&ev))?;
    let certified = if div_verdict.is_certified() {
        Some(Label::Diverges)
    } else {
        None
    };
    let margins = margins_of(&div_verdict);
    Ok(CorpusRow {
        entry_id: entry.id.clone(),
        test: CorpusTest::CondensedClass,
        status: div_verdict.status.as_str().to_string(),
        conclusion: match certified {
            Some(_) => "diverges-certified".to_string(),
            None => "inconclusive".to_string(),
        },
        agreement: agreement_for(certified, entry.label),
        min_margin: margins.0,
        max_margin: margins.1,
        detail: format!(
            "condensed convergence route fails at n = {:?}; divergence route: {}",
            conv_verdict.failing_index,
            ev.describe("Σ 1/q(n) diverges over condensed indices")
        ),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::NumericContext;

    #[test]
    fn empty_test_list_gives_empty_table() {
        let ctx = NumericContext::float_default();
        let report = corpus_run(
            Corpus::builtin(),
            &[],
            TestWindow::new(1, 100).unwrap(),
            &ctx,
        );
        assert!(report.rows.is_empty());
        assert_eq!(report.contradictions, 0);
    }

    #[test]
    fn default_sweep_has_no_contradictions() {
        let ctx = NumericContext::float_default();
        let report = corpus_run(
            Corpus::builtin(),
            &CorpusTest::DEFAULT,
            TestWindow::new(1, 2000).unwrap(),
            &ctx,
        );
        assert_eq!(report.rows.len(), Corpus::builtin().len() * 3);
        for row in &report.rows {
            assert_ne!(
                row.agreement,
                Agreement::Contradicts,
                "{} / {}: {}",
                row.entry_id,
                row.test,
                row.detail
            );
        }
    }

    #[test]
    fn rows_are_sorted_and_complete() {
        let ctx = NumericContext::float_default();
        let report = corpus_run(
            Corpus::builtin(),
            &[CorpusTest::Raabe, CorpusTest::Condensation],
            TestWindow::new(1, 200).unwrap(),
            &ctx,
        );
        let mut keys: Vec<(String, CorpusTest)> = report
            .rows
            .iter()
            .map(|r| (r.entry_id.clone(), r.test))
            .collect();
        let sorted = {
            let mut k = keys.clone();
            k.sort();
            k
        };
        assert_eq!(keys, sorted);
        keys.dedup();
        assert_eq!(keys.len(), report.rows.len(), "no duplicate rows");
    }

    #[test]
    fn raabe_certifies_expected_entries() {
        let ctx = NumericContext::float_default();
        let report = corpus_run(
            Corpus::builtin(),
            &[CorpusTest::Raabe],
            TestWindow::new(2, 10_000).unwrap(),
            &ctx,
        );
        let conclusion = |id: &str| {
            report
                .rows
                .iter()
                .find(|r| r.entry_id == id)
                .map(|r| r.conclusion.clone())
                .unwrap()
        };
        assert_eq!(conclusion("basel"), "converges-certified");
        assert_eq!(conclusion("p-cubed"), "converges-certified");
        assert_eq!(conclusion("geom-half"), "converges-certified");
        assert_eq!(conclusion("factorial"), "converges-certified");
        assert_eq!(conclusion("telescoping"), "converges-certified");
        assert_eq!(conclusion("p-half"), "diverges-certified");
        // Borderline entries sit between the two branches.
        assert_eq!(conclusion("harmonic"), "inconclusive");
        assert_eq!(conclusion("n-log-n"), "inconclusive");
        assert_eq!(conclusion("n-log2-n"), "inconclusive");
        assert_eq!(conclusion("n-log3-n"), "inconclusive");
    }

    #[test]
    fn weighted_conv_exact_certifies_catalog_and_oracle_sums() {
        let ctx = NumericContext::exact();
        let report = corpus_run(
            Corpus::builtin(),
            &[CorpusTest::WeightedConv],
            TestWindow::new(1, 500).unwrap(),
            &ctx,
        );
        let row = |id: &str| report.rows.iter().find(|r| r.entry_id == id).unwrap();
        // Catalog sums certify with exact ties (margin ≡ 1 = c).
        for id in ["geom-half", "geom-third", "telescoping", "factorial"] {
            let r = row(id);
            assert_eq!(r.conclusion, "converges-certified", "{id}");
            assert!(r.detail.contains("catalog"), "{id}");
            assert_eq!(r.min_margin.as_deref(), Some("1"), "{id}");
            assert_eq!(r.max_margin.as_deref(), Some("1"), "{id}");
        }
        // Oracle-certified sums for p-series without a closed form.
        assert_eq!(row("basel").conclusion, "converges-certified");
        assert!(row("basel").detail.contains("integral"));
        assert_eq!(row("p-cubed").conclusion, "converges-certified");
        // Divergent entries refuse the construction: skipped, neutral.
        assert_eq!(row("harmonic").status, "skipped");
        assert!(row("harmonic").detail.contains("divergent"));
        assert_eq!(row("p-half").status, "skipped");
        assert_eq!(report.contradictions, 0);
    }

    #[test]
    fn weighted_conv_float_skips_uncertifiable_sums() {
        let ctx = NumericContext::float_default();
        let report = corpus_run(
            Corpus::builtin(),
            &[CorpusTest::WeightedConv],
            TestWindow::new(1, 500).unwrap(),
            &ctx,
        );
        let row = |id: &str| report.rows.iter().find(|r| r.entry_id == id).unwrap();
        // Logarithmic entries have no certified tail bound: skipped, neutral.
        assert_eq!(row("n-log2-n").status, "skipped");
        assert_eq!(row("n-log2-n").agreement, Agreement::Neutral);
        assert_eq!(row("n-log3-n").status, "skipped");
        // Noise-safe entries still certify in float mode (slow tails keep
        // S minus the running weighted sum resolvable above rounding noise).
        assert_eq!(row("basel").conclusion, "converges-certified");
        assert_eq!(row("telescoping").conclusion, "converges-certified");
        // Fast tails hit the precision floor instead: at 50 digits the
        // partial sum of 1/2^n rounds to the full sum once n exceeds the
        // mantissa width, the tail-sum witness loses positivity, and the row
        // degrades to an error — never to a false certificate.
        assert_eq!(row("geom-half").status, "error");
        assert!(row("geom-half").detail.contains("not positive"));
        assert_eq!(row("geom-half").agreement, Agreement::Neutral);
        assert_eq!(report.contradictions, 0);
    }

    #[test]
    fn weighted_div_certifies_three_of_four_divergent_entries() {
        let ctx = NumericContext::float_default();
        let report = corpus_run(
            Corpus::builtin(),
            &[CorpusTest::WeightedDiv],
            TestWindow::new(1, 1000).unwrap(),
            &ctx,
        );
        let row = |id: &str| report.rows.iter().find(|r| r.entry_id == id).unwrap();
        for id in ["harmonic", "p-half", "n-log-n"] {
            assert_eq!(row(id).conclusion, "diverges-certified", "{id}");
            assert_eq!(row(id).agreement, Agreement::Consistent, "{id}");
        }
        // The triple-log entry diverges too slowly for three blocks within
        // the probe bound: the inequality holds but nothing is certified.
        let slow = row("n-logn-loglogn");
        assert_eq!(slow.status, "holds-on-window");
        assert_eq!(slow.conclusion, "inconclusive");
        assert_eq!(slow.agreement, Agreement::Neutral);
        // Convergent entries: identity still holds, probe must not complete.
        for id in ["basel", "geom-half", "telescoping", "factorial"] {
            let r = row(id);
            assert_eq!(r.conclusion, "inconclusive", "{id}");
            assert_eq!(r.agreement, Agreement::Neutral, "{id}");
        }
    }

    #[test]
    fn condensed_class_matches_labels_for_all_entries() {
        let ctx = NumericContext::float_default();
        let report = corpus_run(
            Corpus::builtin(),
            &[CorpusTest::CondensedClass],
            TestWindow::new(1, 10_000).unwrap(),
            &ctx,
        );
        for row in &report.rows {
            let entry = Corpus::builtin().get(&row.entry_id).unwrap();
            let expected = match entry.label {
                Label::Converges => "converges-certified",
                Label::Diverges => "diverges-certified",
            };
            assert_eq!(row.conclusion, expected, "{}: {}", row.entry_id, row.detail);
            assert_eq!(row.agreement, Agreement::Consistent, "{}", row.entry_id);
        }
    }

    #[test]
    fn condensation_certifies_convergent_entries_only() {
        let ctx = NumericContext::float_default();
        let report = corpus_run(
            Corpus::builtin(),
            &[CorpusTest::Condensation],
            TestWindow::new(1, 14).unwrap(),
            &ctx,
        );
        for row in &report.rows {
            let entry = Corpus::builtin().get(&row.entry_id).unwrap();
            match entry.label {
                Label::Converges => {
                    assert_eq!(row.conclusion, "converges-certified", "{}", row.entry_id);
                    assert_eq!(row.agreement, Agreement::Consistent, "{}", row.entry_id);
                }
                Label::Diverges => {
                    assert_eq!(row.conclusion, "inconclusive", "{}", row.entry_id);
                    assert_eq!(row.agreement, Agreement::Neutral, "{}", row.entry_id);
                }
            }
        }
    }

    #[test]
    fn exact_mode_errors_are_isolated_rows() {
        let ctx = NumericContext::exact();
        let report = corpus_run(
            Corpus::builtin(),
            &[CorpusTest::Raabe],
            TestWindow::new(2, 200).unwrap(),
            &ctx,
        );
        let row = |id: &str| report.rows.iter().find(|r| r.entry_id == id).unwrap();
        // Transcendental entries cannot be evaluated exactly: error rows.
        assert_eq!(row("n-log-n").status, "error");
        assert_eq!(row("n-log-n").agreement, Agreement::Neutral);
        // Rational entries are unaffected.
        assert_eq!(row("basel").conclusion, "converges-certified");
        assert_eq!(report.contradictions, 0);
    }

    #[test]
    fn domain_error_entry_is_isolated() {
        let toml = r#"
            [[entry]]
            id = "bad-pole"
            expr = "1/(n-2)"
            label = "diverges"
            decreasing = false
            note = "pole at n = 2, for error isolation"

            [[entry]]
            id = "good"
            expr = "1/n^2"
            label = "converges"
            decreasing = true
            note = "control"
        "#;
        let corpus = Corpus::from_toml_str(toml).unwrap();
        let ctx = NumericContext::exact();
        let report = corpus_run(
            &corpus,
            &[CorpusTest::Raabe],
            TestWindow::new(1, 50).unwrap(),
            &ctx,
        );
        let row = |id: &str| report.rows.iter().find(|r| r.entry_id == id).unwrap();
        assert_eq!(row("bad-pole").status, "error");
        assert_eq!(row("good").conclusion, "converges-certified");
        assert_eq!(report.contradictions, 0);
    }

    #[test]
    fn mislabeled_entry_is_caught_as_contradiction() {
        let toml = r#"
            [[entry]]
            id = "mislabeled-basel"
            expr = "1/n^2"
            label = "diverges"
            decreasing = true
            note = "deliberately wrong label, for harness self-test"
        "#;
        let corpus = Corpus::from_toml_str(toml).unwrap();
        let ctx = NumericContext::exact();
        let report = corpus_run(
            &corpus,
            &[CorpusTest::Raabe],
            TestWindow::new(2, 100).unwrap(),
            &ctx,
        );
        assert_eq!(report.contradictions, 1);
        assert_eq!(report.rows[0].agreement, Agreement::Contradicts);
    }
}
