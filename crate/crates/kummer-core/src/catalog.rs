//! Labeled corpus of positive series: the built-in catalog and the TOML
//! loader for user corpora.
//!
//! A corpus file is a list of `[[entry]]` tables, each naming a series by a
//! DSL expression (or an explicit `table` of rational values), a ground-truth
//! `label`, and optional metadata: a certified `exact_sum`, a `decreasing`
//! flag, a free-text `note`, and a `condensation_witness` expression.

use num::BigRational;
use serde::Deserialize;
use std::fmt;
use std::sync::OnceLock;

use crate::error::{Error, Result};
use crate::numeric::parse_rational_text;
use crate::seq::SequenceSpec;

const BUILTIN_TOML: &str = include_str!("../corpus/default.toml");

/// Ground-truth label for a corpus entry.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Label {
    Converges,
    Diverges,
}

impl Label {
    pub fn as_str(self) -> &'static str {
        match self {
            Label::Converges => "converges",
            Label::Diverges => "diverges",
        }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One corpus series with its metadata, ready for evaluation.
#[derive(Debug, Clone)]
pub struct CorpusEntry {
    pub id: String,
    pub series: SequenceSpec,
    pub label: Label,
    /// Certified sum constant: exact where a closed form exists, or a strict
    /// decimal upper bound (documented in `note`). Absent when no certified
    /// constant is shipped.
    pub exact_sum: Option<BigRational>,
    pub decreasing: bool,
    pub note: String,
    pub condensation_witness: Option<SequenceSpec>,
}

/// A loaded corpus (file order preserved).
#[derive(Debug, Clone)]
pub struct Corpus {
    entries: Vec<CorpusEntry>,
}

#[derive(Deserialize)]
struct CorpusFile {
    #[serde(default)]
    entry: Vec<EntryToml>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct EntryToml {
    id: String,
    expr: Option<String>,
    table: Option<Vec<String>>,
    label: Label,
    exact_sum: Option<String>,
    #[serde(default = "default_true")]
    decreasing: bool,
    #[serde(default)]
    note: String,
    condensation_witness: Option<String>,
}

fn default_true() -> bool {
    true
}

impl Corpus {
    /// Parses a corpus from TOML text.
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let file: CorpusFile = toml::from_str(text)
            .map_err(|e| Error::Corpus(format!("invalid corpus TOML: {e}")))?;
        if file.entry.is_empty() {
            return Err(Error::Corpus("corpus has no entries".into()));
        }
        let mut entries = Vec::with_capacity(file.entry.len());
        let mut seen = std::collections::BTreeSet::new();
        for raw in file.entry {
            if !seen.insert(raw.id.clone()) {
                return Err(Error::Corpus(format!("duplicate entry id `{}`", raw.id)));
            }
            let series = match (&raw.expr, &raw.table) {
                (Some(expr), None) => SequenceSpec::parse(expr).map_err(|e| {
                    Error::Corpus(format!("entry `{}`: bad expr: {e}", raw.id))
                })?,
                (None, Some(rows)) => {
                    let mut values = Vec::with_capacity(rows.len());
                    for (i, row) in rows.iter().enumerate() {
                        let v = parse_rational_text(row).ok_or_else(|| {
                            Error::Corpus(format!(
                                "entry `{}`: table row {} (`{row}`) is not a rational",
                                raw.id,
                                i + 1
                            ))
                        })?;
                        values.push(v);
                    }
                    SequenceSpec::from_table(values)
                }
                _ => {
                    return Err(Error::Corpus(format!(
                        "entry `{}` must have exactly one of `expr` or `table`",
                        raw.id
                    )))
                }
            };
            let exact_sum = match &raw.exact_sum {
                Some(text) => Some(parse_rational_text(text).ok_or_else(|| {
                    Error::Corpus(format!(
                        "entry `{}`: exact_sum `{text}` is not a decimal or p/q rational",
                        raw.id
                    ))
                })?),
                None => None,
            };
            let condensation_witness = match &raw.condensation_witness {
                Some(text) => Some(SequenceSpec::parse(text).map_err(|e| {
                    Error::Corpus(format!(
                        "entry `{}`: bad condensation_witness: {e}",
                        raw.id
                    ))
                })?),
                None => None,
            };
            entries.push(CorpusEntry {
                id: raw.id,
                series,
                label: raw.label,
                exact_sum,
                decreasing: raw.decreasing,
                note: raw.note,
                condensation_witness,
            });
        }
        Ok(Corpus { entries })
    }

    /// Loads a corpus TOML file from disk.
    pub fn from_path(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Corpus::from_toml_str(&text)
    }

    /// The built-in corpus shipped with the crate.
    pub fn builtin() -> &'static Corpus {
        static BUILTIN: OnceLock<Corpus> = OnceLock::new();
        BUILTIN.get_or_init(|| {
            Corpus::from_toml_str(BUILTIN_TOML).expect("built-in corpus is valid")
        })
    }

    pub fn entries(&self) -> &[CorpusEntry] {
        &self.entries
    }

    pub fn get(&self, id: &str) -> Option<&CorpusEntry> {
        self.entries.iter().find(|e| e.id == id)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}
