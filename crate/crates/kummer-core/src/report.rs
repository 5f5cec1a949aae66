//! Machine-readable reports: versioned JSON structures and CSV traces.
//!
//! Every numeric field is serialized as the string produced by
//! [`Value::render`], so reports are byte-identical across runs for the
//! same request and mode — floats never pass through `f64` formatting, and
//! exact rationals stay exact.

use serde::Serialize;
use std::collections::BTreeMap;
use std::io::{self, Write};

use crate::corpus::{CorpusRunReport, CorpusTest};
use crate::engine::{MarginPoint, TrendStats, WindowVerdict};
use crate::numeric::{Mode, Value};
use crate::seq::TestWindow;

/// Current JSON schema version, included in every top-level report.
pub const SCHEMA_VERSION: u32 = 1;

/// A [`WindowVerdict`] with all values rendered.
#[derive(Debug, Clone, Serialize)]
pub struct VerdictReport {
    pub status: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub failing_index: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub min_margin: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_margin: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trend: Option<TrendReport>,
    pub hypotheses: Vec<String>,
    pub consequences: Vec<String>,
    pub diagnostics: Vec<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct TrendReport {
    pub first_quartile_min: String,
    pub last_quartile_min: String,
    pub direction: String,
}

impl TrendReport {
    fn from_stats(t: &TrendStats) -> Self {
        TrendReport {
            first_quartile_min: t.first_quartile_min.render(),
            last_quartile_min: t.last_quartile_min.render(),
            direction: t.direction.as_str().to_string(),
        }
    }
}

impl VerdictReport {
    pub fn from_verdict(v: &WindowVerdict) -> Self {
        VerdictReport {
            status: v.status.as_str().to_string(),
            failing_index: v.failing_index,
            min_margin: v.min_margin.as_ref().map(Value::render),
            max_margin: v.max_margin.as_ref().map(Value::render),
            trend: v.trend.as_ref().map(TrendReport::from_stats),
            hypotheses: v.hypotheses.clone(),
            consequences: v.consequences.clone(),
            diagnostics: v.diagnostics.clone(),
        }
    }
}

/// A named verdict inside an analysis report (tests with two branches emit
/// one entry per branch).
#[derive(Debug, Clone, Serialize)]
pub struct NamedVerdict {
    pub name: String,
    pub verdict: VerdictReport,
}

/// Echo of the request that produced a report.
#[derive(Debug, Clone, Serialize)]
pub struct RequestEcho {
    pub a: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub c: Option<String>,
    pub test: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub m: Option<u64>,
    pub window: String,
    pub mode: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub digits: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<String>,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub evidence: Vec<String>,
}

/// Top-level report for `analyze`.
#[derive(Debug, Clone, Serialize)]
pub struct AnalysisReport {
    pub schema: u32,
    pub command: String,
    pub request: RequestEcho,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub conclusion: Option<String>,
    pub verdicts: Vec<NamedVerdict>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<WitnessMeta>,
    /// Test-specific scalar observations (θ statistics, floors, …).
    #[serde(skip_serializing_if = "BTreeMap::is_empty", default)]
    pub observations: BTreeMap<String, String>,
    /// Report-level diagnostics from the test (branch summaries, …).
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub diagnostics: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trace_file: Option<String>,
}

/// Witness metadata attached to reports.
#[derive(Debug, Clone, Serialize)]
pub struct WitnessMeta {
    pub provenance: String,
    pub describe: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sum: Option<SumMeta>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub step: Option<u64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct SumMeta {
    pub value: String,
    pub source: String,
}

/// Top-level report for `witness`.
#[derive(Debug, Clone, Serialize)]
pub struct WitnessReport {
    pub schema: u32,
    pub command: String,
    pub request: RequestEcho,
    pub witness: WitnessMeta,
    /// The first few witness values, rendered.
    pub sample: Vec<SamplePoint>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub identity: Option<IdentityMeta>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trace_file: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct SamplePoint {
    pub n: u64,
    pub q: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct IdentityMeta {
    pub max_residual: String,
    pub predicted: String,
}

/// One corpus row, rendered.
#[derive(Debug, Clone, Serialize)]
pub struct CorpusRowReport {
    pub entry: String,
    pub test: String,
    pub status: String,
    pub conclusion: String,
    pub agreement: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub min_margin: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_margin: Option<String>,
    pub detail: String,
}

/// Top-level report for `corpus`.
#[derive(Debug, Clone, Serialize)]
pub struct CorpusReport {
    pub schema: u32,
    pub command: String,
    pub mode: String,
    pub window: String,
    pub tests: Vec<String>,
    pub rows: Vec<CorpusRowReport>,
    pub contradictions: usize,
}

/// Build the corpus report structure from a run.
pub fn corpus_report(
    run: &CorpusRunReport,
    tests: &[CorpusTest],
    window: TestWindow,
    mode: Mode,
) -> CorpusReport {
    CorpusReport {
        schema: SCHEMA_VERSION,
        command: "corpus".to_string(),
        mode: mode.as_str().to_string(),
        window: window.to_string(),
        tests: tests.iter().map(|t| t.as_str().to_string()).collect(),
        rows: run
            .rows
            .iter()
            .map(|r| CorpusRowReport {
                entry: r.entry_id.clone(),
                test: r.test.as_str().to_string(),
                status: r.status.clone(),
                conclusion: r.conclusion.clone(),
                agreement: r.agreement.as_str().to_string(),
                min_margin: r.min_margin.clone(),
                max_margin: r.max_margin.clone(),
                detail: r.detail.clone(),
            })
            .collect(),
        contradictions: run.contradictions,
    }
}

/// Serialize any report deterministically (pretty, two-space indent,
/// trailing newline).
pub fn to_json_string<T: Serialize>(report: &T) -> String {
    let mut s = serde_json::to_string_pretty(report).expect("report structures always serialize");
    s.push('\n');
    s
}

/// Quote a CSV field only when it needs quoting.
fn csv_field(text: &str) -> String {
    if text.contains([',', '"', '\n']) {
        format!("\"{}\"", text.replace('"', "\"\""))
    } else {
        text.to_string()
    }
}

/// Margin trace CSV: header `n,value,bound`.
pub fn write_margin_trace_csv<W: Write>(out: &mut W, trace: &[MarginPoint]) -> io::Result<()> {
    writeln!(out, "n,value,bound")?;
    for p in trace {
        writeln!(out, "{},{},{}", p.n, p.value.render(), p.bound.render())?;
    }
    Ok(())
}

/// Witness trace CSV: header `n,q,margin`.
pub fn write_witness_trace_csv<W: Write>(
    out: &mut W,
    rows: &[(u64, Value, Value)],
) -> io::Result<()> {
    writeln!(out, "n,q,margin")?;
    for (n, q, margin) in rows {
        writeln!(out, "{},{},{}", n, q.render(), margin.render())?;
    }
    Ok(())
}

/// Corpus rows as CSV (same columns as the JSON rows).
pub fn corpus_csv(run: &CorpusRunReport) -> String {
    let mut out = String::from("entry,test,status,conclusion,agreement,min_margin,max_margin,detail\n");
    for r in &run.rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{}\n",
            csv_field(&r.entry_id),
            r.test.as_str(),
            csv_field(&r.status),
            csv_field(&r.conclusion),
            r.agreement.as_str(),
            csv_field(r.min_margin.as_deref().unwrap_or("")),
            csv_field(r.max_margin.as_deref().unwrap_or("")),
            csv_field(&r.detail),
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::{weighted_conv_check, Evidence};
    use crate::numeric::NumericContext;
    use crate::seq::SequenceSpec;
    use crate::witness::expr_witness;

    #[test]
    fn verdict_report_renders_values_as_strings() {
        let ctx = NumericContext::exact();
        let a = SequenceSpec::parse("1/n^2").unwrap();
        let q = expr_witness(SequenceSpec::parse("n").unwrap(), a.clone());
        let c = SequenceSpec::one();
        let v = weighted_conv_check(&a, &c, &q, TestWindow::new(1, 100).unwrap(), &ctx).unwrap();
        let r = VerdictReport::from_verdict(&v);
        assert_eq!(r.status, "holds-on-window");
        assert_eq!(r.min_margin.as_deref(), Some("101/100"));
        let json = to_json_string(&r);
        assert!(json.contains("\"min_margin\": \"101/100\""));
        assert!(json.ends_with('\n'));
    }

    #[test]
    fn margin_trace_csv_shape() {
        let ctx = NumericContext::exact();
        let a = SequenceSpec::parse("1/2^n").unwrap();
        let q = expr_witness(SequenceSpec::one(), a.clone());
        let c = SequenceSpec::one();
        let v = weighted_conv_check(&a, &c, &q, TestWindow::new(1, 3).unwrap(), &ctx).unwrap();
        let mut buf = Vec::new();
        write_margin_trace_csv(&mut buf, &v.trace).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "n,value,bound");
        assert_eq!(lines[1], "1,1,1");
        assert_eq!(lines.len(), 4);
    }

    #[test]
    fn csv_fields_with_commas_are_quoted() {
        assert_eq!(csv_field("plain"), "plain");
        assert_eq!(csv_field("a, b"), "\"a, b\"");
        assert_eq!(csv_field("say \"hi\""), "\"say \"\"hi\"\"\"");
    }

    #[test]
    fn evidence_description_round_trips_into_reports() {
        let ev = Evidence::Asserted {
            note: "user-asserted divergence".to_string(),
        };
        let echo = RequestEcho {
            a: "(1/n)".to_string(),
            c: None,
            test: "weighted-div".to_string(),
            witness: Some("auto".to_string()),
            m: None,
            window: "[1, 100]".to_string(),
            mode: "exact".to_string(),
            digits: None,
            epsilon: None,
            evidence: vec![ev.describe("Σ 1/q(n) diverges")],
        };
        let json = to_json_string(&echo);
        assert!(json.contains("user-asserted divergence"));
    }
}
