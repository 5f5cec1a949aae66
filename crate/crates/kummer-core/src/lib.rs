//! Kummer-type summability criteria with constructive witnesses.
//!
//! The crate decides convergence questions for positive series Σ a(n) and
//! weighted series Σ c(n)·a(n) by scanning *margin inequalities* over finite
//! index windows:
//!
//! * the m-step convergence and divergence criteria with an auxiliary
//!   positive sequence q(n) ([`engine::kummer_step_check`],
//!   [`engine::kummer_div_step_check`]),
//! * their weighted forms with margin bound c(n+1)
//!   ([`engine::weighted_conv_check`], [`engine::weighted_div_check`]),
//! * the classical consequences: Raabe, Bertrand, and Gauss tests, a Cauchy
//!   condensation check, and an Olivier-style term-decay check
//!   ([`classical`]).
//!
//! Every criterion is paired with the *constructive witness* from its
//! converse direction ([`witness`]): tail sums S − Σ_{i≤n} c(i)a(i) scaled by
//! 1/a(n), or partial sums Σ_{i≤n} a(i) scaled the same way. Witnesses are
//! validated against a partial-sum oracle ([`oracle`]) and a labeled corpus
//! of series with known behavior ([`corpus`]).
//!
//! Two numeric modes share one code path ([`numeric`]): exact rational
//! arithmetic (default) and high-precision floating point with directed
//! comparison tolerances. All reported values render as strings so output is
//! reproducible byte-for-byte ([`report`]).

pub mod catalog;
pub mod classical;
pub mod corpus;
pub mod dsl;
pub mod engine;
pub mod error;
pub mod numeric;
pub mod oracle;
pub mod report;
pub mod seq;
pub mod witness;

pub use catalog::{Corpus, CorpusEntry, Label};
pub use classical::{
    bertrand, condensation_check, gauss, olivier_check, raabe, BertrandReport, Conclusion,
    GaussParams, GaussReport, OlivierReport, RaabeReport, Side,
};
pub use corpus::{corpus_run, Agreement, CorpusRow, CorpusRunReport, CorpusTest};
pub use engine::{
    kummer_div_step_check, kummer_step_check, weighted_conv_check, weighted_div_check,
    BlockRecord, CheckStatus, Evidence, WindowVerdict,
};
pub use error::{Error, Result};
pub use numeric::{Mode, NumericContext, Value};
pub use oracle::{
    cauchy_block_probe, domination_index, evidence_probe, resolve_sum_constant, sum_estimate,
    MethodChoice, SumEstimate,
};
pub use seq::{SequenceSpec, TestWindow};
pub use witness::{
    conv_witness, div_witness, expr_witness, verify_witness_identity, weighted_conv_witness,
    weighted_div_witness, IdentityReport, Provenance, SumConstant, WitnessSequence,
};
