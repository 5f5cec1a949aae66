//! Independent ground truth: partial-sum based sum estimation with certified
//! tail bounds, the Cauchy-block probe for Σ1/q divergence, and the
//! domination-index search.
//!
//! Sum estimates never fail silently: when a tail-bound hypothesis cannot be
//! checked the estimate is downgraded to `heuristic` with the reason
//! recorded. Probes run on hardware doubles — they produce *evidence*, not
//! certificates, and are labeled as such wherever they feed a verdict.

use num::{BigRational, One, Signed};
use std::fmt;

use crate::catalog::{Corpus, CorpusEntry, Label};
use crate::dsl::ExprAst;
use crate::engine::{BlockRecord, Evidence};
use crate::error::{Error, Result};
use crate::numeric::{NumericContext, Value};
use crate::seq::{partial_sum, SeqSource, SequenceSpec};
use crate::witness::{SumConstant, WitnessSequence};

/// Which tail-bound method to attempt.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MethodChoice {
    /// Try p-series integral bound, then geometric ratio, then dyadic blocks.
    Auto,
    Geometric,
    Integral,
}

impl MethodChoice {
    pub fn as_str(self) -> &'static str {
        match self {
            MethodChoice::Auto => "auto",
            MethodChoice::Geometric => "geometric",
            MethodChoice::Integral => "integral",
        }
    }

    pub fn parse(text: &str) -> Result<Self> {
        match text {
            "auto" => Ok(MethodChoice::Auto),
            "geometric" => Ok(MethodChoice::Geometric),
            "integral" => Ok(MethodChoice::Integral),
            other => Err(Error::Config(format!(
                "unknown sum-estimate method `{other}` (expected auto, geometric, or integral)"
            ))),
        }
    }
}

/// How a tail bound was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TailMethod {
    GeometricRatio,
    Integral,
    None,
}

impl TailMethod {
    pub fn as_str(self) -> &'static str {
        match self {
            TailMethod::GeometricRatio => "geometric-ratio",
            TailMethod::Integral => "integral",
            TailMethod::None => "none",
        }
    }
}

impl fmt::Display for TailMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Confidence {
    Certified,
    Heuristic,
}

impl Confidence {
    pub fn as_str(self) -> &'static str {
        match self {
            Confidence::Certified => "certified",
            Confidence::Heuristic => "heuristic",
        }
    }
}

/// A partial-sum estimate with an optional certified tail bound.
///
/// `certified` means: assuming the recorded hypothesis (checked on the
/// stated segment, assumed to persist), the true sum lies in
/// `[value, value + tail_bound]`.
#[derive(Debug, Clone)]
pub struct SumEstimate {
    /// Partial sum through the horizon.
    pub value: Value,
    pub horizon: u64,
    pub tail_bound: Option<Value>,
    pub tail_method: TailMethod,
    pub confidence: Confidence,
    /// The hypothesis backing the bound, or the downgrade reason.
    pub hypothesis: String,
}

impl SumEstimate {
    pub fn is_certified(&self) -> bool {
        self.confidence == Confidence::Certified
    }

    /// `value + tail_bound`: an upper bound for the sum when certified.
    pub fn upper_bound(&self, ctx: &NumericContext) -> Result<Value> {
        match &self.tail_bound {
            Some(t) => ctx.add(&self.value, t),
            None => Err(Error::SumNotCertified(
                "estimate carries no tail bound".to_string(),
            )),
        }
    }
}

/// Syntactic p-series recognition: `c/n`, `c/n^p`, `c/sqrt(n)` with a
/// positive rational constant `c`. Returns `(c, p)`.
pub fn recognize_p_series(a: &SequenceSpec) -> Option<(BigRational, BigRational)> {
    let ast = match a.source() {
        SeqSource::Expr(ast) => ast,
        _ => return None,
    };
    let (num, den) = match ast {
        ExprAst::Div(num, den) => (num.as_ref(), den.as_ref()),
        _ => return None,
    };
    let c = match num {
        ExprAst::Const(c) if c.is_positive() => c.clone(),
        _ => return None,
    };
    let p = match den {
        ExprAst::Var => BigRational::one(),
        ExprAst::Sqrt(inner) if matches!(inner.as_ref(), ExprAst::Var) => {
            BigRational::new(1.into(), 2.into())
        }
        ExprAst::Pow(base, exp) => match (base.as_ref(), exp.as_ref()) {
            (ExprAst::Var, ExprAst::Const(p)) if p.is_positive() => p.clone(),
            _ => return None,
        },
        _ => return None,
    };
    Some((c, p))
}

/// Positive identification of divergence, used to refuse sum constants for
/// series that certainly have none: a catalog label, or a p-series with
/// exponent ≤ 1.
pub fn positively_divergent(a: &SequenceSpec, catalog: Option<&CorpusEntry>) -> Option<String> {
    if let Some(entry) = catalog {
        if entry.label == Label::Diverges {
            return Some(format!("catalog entry `{}` is labeled divergent", entry.id));
        }
    }
    if let Some((_, p)) = recognize_p_series(a) {
        if p <= BigRational::one() {
            return Some(format!("p-series with exponent p = {p} ≤ 1 diverges"));
        }
    }
    None
}

/// Look up a builtin/loaded corpus entry whose series has the same canonical
/// form as `a`.
pub fn find_catalog_entry<'a>(corpus: &'a Corpus, a: &SequenceSpec) -> Option<&'a CorpusEntry> {
    corpus
        .entries()
        .iter()
        .find(|e| e.series.display() == a.display())
}

// Number of dyadic blocks examined before closing with the geometric tail.
const DYADIC_BLOCKS: u32 = 24;
// Ratio segment length for the geometric bound.
const RATIO_SEGMENT: u64 = 16;

/// Estimate Σ a(n) by partial summation with a tail bound.
///
/// `Auto` tries, in order: integral bound for a syntactic p-series
/// (p > 1 ⇒ tail ≤ c·H^(1−p)/(p−1)); geometric-ratio bound (term ratios
/// < 1 and nonincreasing on the closing segment ⇒ tail ≤ a(H+1)/(1−ρ));
/// dyadic majorization for sampled-nonincreasing terms (block bounds
/// D_j = H·2^j·a(H·2^j+1) with observed D-ratios ≤ 3/4 ⇒ geometric
/// closure). When no hypothesis checks out the estimate is heuristic, with
/// the reason recorded — never silent.
pub fn sum_estimate(
    a: &SequenceSpec,
    horizon: u64,
    method: MethodChoice,
    ctx: &NumericContext,
) -> Result<SumEstimate> {
    if horizon == 0 {
        return Err(Error::Precondition("sum horizon must be at least 1".into()));
    }
    let value = partial_sum(a, horizon, ctx)?;

    let mut downgrade_reasons: Vec<String> = Vec::new();

    // 1. p-series integral bound.
    if matches!(method, MethodChoice::Auto | MethodChoice::Integral) {
        if let Some((c, p)) = recognize_p_series(a) {
            if p > BigRational::one() {
                match p_series_tail(&c, &p, horizon, ctx) {
                    Ok(tail) => {
                        return Ok(SumEstimate {
                            value,
                            horizon,
                            tail_bound: Some(tail),
                            tail_method: TailMethod::Integral,
                            confidence: Confidence::Certified,
                            hypothesis: format!(
                                "p-series with p = {p} > 1: tail ≤ c·H^(1−p)/(p−1) by the integral comparison"
                            ),
                        });
                    }
                    Err(Error::ExactTranscendental { .. }) => downgrade_reasons.push(format!(
                        "integral tail needs H^(1−p) with non-integer p = {p}, unavailable in exact mode"
                    )),
                    Err(e) => return Err(e),
                }
            } else {
                return Ok(SumEstimate {
                    value,
                    horizon,
                    tail_bound: None,
                    tail_method: TailMethod::None,
                    confidence: Confidence::Heuristic,
                    hypothesis: format!(
                        "p-series with p = {p} ≤ 1 diverges; partial sum is not an estimate of any sum"
                    ),
                });
            }
        } else if method == MethodChoice::Integral {
            downgrade_reasons
                .push("integral bound implemented for syntactic p-series only".to_string());
        }
    }

    // 2. Geometric-ratio bound.
    if matches!(method, MethodChoice::Auto | MethodChoice::Geometric) {
        match geometric_tail(a, horizon, ctx)? {
            Ok((tail, seg_start)) => {
                return Ok(SumEstimate {
                    value,
                    horizon,
                    tail_bound: Some(tail),
                    tail_method: TailMethod::GeometricRatio,
                    confidence: Confidence::Certified,
                    hypothesis: format!(
                        "term ratios a(n+1)/a(n) < 1 and nonincreasing on [{seg_start}, {horizon}], assumed to persist: tail ≤ a(H+1)/(1−ρ)"
                    ),
                });
            }
            Err(reason) => downgrade_reasons.push(reason),
        }
    }

    // 3. Dyadic majorization.
    if method == MethodChoice::Auto {
        match dyadic_tail(a, horizon, ctx)? {
            Ok((tail, blocks)) => {
                return Ok(SumEstimate {
                    value,
                    horizon,
                    tail_bound: Some(tail),
                    tail_method: TailMethod::Integral,
                    confidence: Confidence::Certified,
                    hypothesis: format!(
                        "a(n) nonincreasing (sampled) and dyadic block bounds D_j = H·2^j·a(H·2^j+1) contract by ≤ 3/4 over {blocks} blocks, assumed to persist: geometric closure 3·D_last"
                    ),
                });
            }
            Err(reason) => downgrade_reasons.push(reason),
        }
    }

    Ok(SumEstimate {
        value,
        horizon,
        tail_bound: None,
        tail_method: TailMethod::None,
        confidence: Confidence::Heuristic,
        hypothesis: format!("no tail-bound hypothesis verified: {}", downgrade_reasons.join("; ")),
    })
}

/// Tail of a p-series beyond H: c·H^(1−p)/(p−1).
fn p_series_tail(
    c: &BigRational,
    p: &BigRational,
    horizon: u64,
    ctx: &NumericContext,
) -> Result<Value> {
    let p_m1 = p - BigRational::one();
    let h = ctx.from_u64(horizon);
    let h_pow = if p_m1.is_integer() {
        // H^(1−p) = 1/H^(p−1), exact.
        let pos = ctx.pow_int(&h, p_m1.numer())?;
        ctx.div(&ctx.one(), &pos)?
    } else {
        let e = ctx.from_rational(&(-p_m1.clone()));
        ctx.pow(&h, &e)?
    };
    let cv = ctx.from_rational(c);
    ctx.div(&ctx.mul(&cv, &h_pow)?, &ctx.from_rational(&p_m1))
}

/// Geometric tail: Ok(Ok((tail, segment_start))) when the ratio hypothesis
/// checks out, Ok(Err(reason)) when it does not.
#[allow(clippy::type_complexity)]
fn geometric_tail(
    a: &SequenceSpec,
    horizon: u64,
    ctx: &NumericContext,
) -> Result<std::result::Result<(Value, u64), String>> {
    let seg_start = horizon.saturating_sub(RATIO_SEGMENT).max(1);
    let one = ctx.one();
    let mut prev_ratio: Option<Value> = None;
    let mut rho: Option<Value> = None;
    for j in seg_start..=horizon {
        let aj = a.eval(j, ctx)?;
        let aj1 = a.eval(j + 1, ctx)?;
        let r = ctx.div_at(&aj1, &aj, j)?;
        if !ctx.lt_strict(&r, &one)? {
            return Ok(Err(format!(
                "geometric hypothesis fails: ratio at n = {j} is {} (not < 1)",
                r.render()
            )));
        }
        if let Some(prev) = &prev_ratio {
            if ctx.gt_strict(&r, prev)? {
                return Ok(Err(format!(
                    "geometric hypothesis fails: ratios increase at n = {j} ({} > {})",
                    r.render(),
                    prev.render()
                )));
            }
        }
        rho = Some(match rho {
            Some(m) => ctx.max(&m, &r)?,
            None => r.clone(),
        });
        prev_ratio = Some(r);
    }
    let rho = rho.expect("nonempty segment");
    let first_tail_term = a.eval(horizon + 1, ctx)?;
    let tail = ctx.div(&first_tail_term, &ctx.sub(&one, &rho)?)?;
    Ok(Ok((tail, seg_start)))
}

/// Dyadic majorization tail: Σ_{n>H} a(n) ≤ Σ_j H·2^j·a(H·2^j + 1) for
/// nonincreasing a; blocks closed geometrically once their ratios stay
/// ≤ 3/4.
#[allow(clippy::type_complexity)]
fn dyadic_tail(
    a: &SequenceSpec,
    horizon: u64,
    ctx: &NumericContext,
) -> Result<std::result::Result<(Value, u32), String>> {
    // Shrink the block count if the top index would overflow u64.
    let fits = |b: u32| horizon.checked_mul(1u64 << b).and_then(|v| v.checked_add(4)).is_some();
    let mut blocks = DYADIC_BLOCKS;
    while blocks > 1 && !fits(blocks) {
        blocks -= 1;
    }
    if !fits(blocks) {
        return Ok(Err("horizon too large for dyadic blocks".to_string()));
    }
    for j in 0..=blocks {
        let b = horizon << j;
        for n in [b, b + 1, b + 2] {
            let prev = a.eval(n, ctx)?;
            let next = a.eval(n + 1, ctx)?;
            if ctx.gt_strict(&next, &prev)? {
                return Ok(Err(format!(
                    "dyadic hypothesis fails: a increases at n = {n}"
                )));
            }
        }
    }
    let three_quarters = ctx.div(&ctx.from_u64(3), &ctx.from_u64(4))?;
    let mut total = ctx.zero();
    let mut last_d: Option<Value> = None;
    for j in 0..blocks {
        let start = horizon << j;
        let d = ctx.mul(&ctx.from_u64(start), &a.eval(start + 1, ctx)?)?;
        if let Some(prev) = &last_d {
            let ratio = ctx.div(&d, prev)?;
            if ctx.gt_strict(&ratio, &three_quarters)? {
                return Ok(Err(format!(
                    "dyadic hypothesis fails: block ratio {} > 3/4 at block {j}",
                    ratio.render()
                )));
            }
        }
        total = ctx.add(&total, &d)?;
        last_d = Some(d);
    }
    let closure = ctx.mul(&ctx.from_u64(3), &last_d.expect("at least one block"))?;
    Ok(Ok((ctx.add(&total, &closure)?, blocks)))
}

/// Resolve the sum constant S for a tail-sum witness, in priority order:
/// catalog exact_sum, user-supplied (refused when the series is positively
/// identified as divergent), oracle estimate with certified tail bound
/// (taking S = value + tail, an upper bound — which the construction
/// tolerates: the margin identity holds for any constant, and an upper
/// bound keeps the witness positive).
pub fn resolve_sum_constant(
    a: &SequenceSpec,
    catalog: Option<&CorpusEntry>,
    user: Option<Value>,
    horizon: u64,
    ctx: &NumericContext,
) -> Result<SumConstant> {
    if let Some(entry) = catalog {
        if let Some(sum) = &entry.exact_sum {
            return Ok(SumConstant::catalog(&entry.id, ctx.from_rational(sum)));
        }
    }
    if let Some(diag) = positively_divergent(a, catalog) {
        if user.is_some() {
            return Err(Error::SumNotCertified(format!(
                "refusing user sum: {diag}; the tail-sum construction presupposes convergence"
            )));
        }
        return Err(Error::SumNotCertified(diag));
    }
    if let Some(v) = user {
        return Ok(SumConstant::user(v));
    }
    let est = sum_estimate(a, horizon, MethodChoice::Auto, ctx)?;
    if !est.is_certified() {
        return Err(Error::SumNotCertified(format!(
            "no certified sum for a = {a}: {}",
            est.hypothesis
        )));
    }
    let upper = est.upper_bound(ctx)?;
    Ok(SumConstant::certified(
        upper,
        est.tail_method.as_str(),
        est.hypothesis,
    ))
}

/// Search for one Cauchy block: the least n ≥ start with
/// Σ_{j=start}^{n} 1/q(j) > 1/2, inclusive of the start index, scanning at
/// most `max_len` indices. Runs on hardware doubles; a nonpositive or
/// non-finite reciprocal aborts the search (no block claimed).
pub fn cauchy_block_probe(
    q: &WitnessSequence,
    start: u64,
    max_len: u64,
) -> Result<Option<BlockRecord>> {
    let mut iter = q.reciprocals_from(start)?;
    let mut acc = 0.0f64;
    for _ in 0..max_len {
        let (j, r) = iter.next_recip();
        if !r.is_finite() || r <= 0.0 {
            return Ok(None);
        }
        acc += r;
        if acc > 0.5 {
            return Ok(Some(BlockRecord {
                start,
                end: j,
                sum: acc,
            }));
        }
    }
    Ok(None)
}

/// Greedy consecutive-block probe: `k_blocks` disjoint blocks each with
/// Σ1/q > 1/2, the first starting at `start`, each next starting where the
/// previous ended, all indices ≤ `index_bound`. Returns probe evidence —
/// complete or not — for Σ1/q divergence.
pub fn evidence_probe(
    q: &WitnessSequence,
    start: u64,
    k_blocks: usize,
    index_bound: u64,
) -> Result<Evidence> {
    let mut blocks = Vec::with_capacity(k_blocks);
    let mut cursor = start;
    while blocks.len() < k_blocks && cursor <= index_bound {
        let max_len = index_bound - cursor + 1;
        match cauchy_block_probe(q, cursor, max_len)? {
            Some(block) => {
                cursor = block.end + 1;
                blocks.push(block);
            }
            None => break,
        }
    }
    let complete = blocks.len() == k_blocks;
    Ok(Evidence::ProbeBlocks {
        blocks,
        complete,
        bound: index_bound,
    })
}

/// Smallest r in [m, search_bound] with a(m)+…+a(r) ≥ c(m)a(m)+…+c(r)a(r),
/// by direct accumulation of Σ (1 − c(i))·a(i); the first nonnegative
/// running sum wins, ties (exact zero) included.
pub fn domination_index(
    a: &SequenceSpec,
    c: &SequenceSpec,
    m: u64,
    search_bound: u64,
    ctx: &NumericContext,
) -> Result<Option<u64>> {
    if search_bound < m || m == 0 {
        return Err(Error::Precondition(format!(
            "domination search needs 1 ≤ m ≤ bound, got m = {m}, bound = {search_bound}"
        )));
    }
    let zero = ctx.zero();
    let one = ctx.one();
    let mut acc = ctx.zero();
    for i in m..=search_bound {
        let ai = a.eval(i, ctx)?;
        let ci = c.eval(i, ctx)?;
        acc = ctx.add(&acc, &ctx.mul(&ctx.sub(&one, &ci)?, &ai)?)?;
        if ctx.ge_tol(&acc, &zero)? {
            return Ok(Some(i));
        }
    }
    Ok(None)
}
