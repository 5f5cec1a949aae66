//! Sequences over the index n ≥ 1: evaluation, windows, and prefix sums.
//!
//! A [`SequenceSpec`] wraps one of four sources — a DSL expression, an
//! explicit table of rationals, the condensed transform n ↦ 2ⁿ·a(2ⁿ), or the
//! index-scaled transform n ↦ n·a(n) — behind one evaluation interface.
//! Series terms are validated to be finite and positive at every queried
//! index; evaluation never silently continues past a pole, a zero term, or a
//! table miss.

use num::{BigRational, Signed, ToPrimitive};
use std::cell::RefCell;
use std::fmt;

use crate::dsl::{self, ExprAst};
use crate::error::{Error, Result};
use crate::numeric::{Mode, NumericContext, Value};

/// Inclusive index window `[start, end]`, `1 ≤ start ≤ end`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TestWindow {
    start: u64,
    end: u64,
}

impl TestWindow {
    pub fn new(start: u64, end: u64) -> Result<Self> {
        if start == 0 {
            return Err(Error::Precondition(
                "window start must be at least 1".into(),
            ));
        }
        if end < start {
            return Err(Error::Precondition(format!(
                "window end {end} is before start {start}"
            )));
        }
        Ok(TestWindow { start, end })
    }

    /// Parses the CLI form `"start:end"`.
    pub fn parse(text: &str) -> Result<Self> {
        let (a, b) = text.split_once(':').ok_or_else(|| {
            Error::Config(format!("window `{text}` is not of the form start:end"))
        })?;
        let start: u64 = a.trim().parse().map_err(|_| {
            Error::Config(format!("window start `{a}` is not a positive integer"))
        })?;
        let end: u64 = b.trim().parse().map_err(|_| {
            Error::Config(format!("window end `{b}` is not a positive integer"))
        })?;
        TestWindow::new(start, end)
    }

    pub fn start(&self) -> u64 {
        self.start
    }

    pub fn end(&self) -> u64 {
        self.end
    }

    pub fn len(&self) -> u64 {
        self.end - self.start + 1
    }

    pub fn is_empty(&self) -> bool {
        false // construction guarantees start ≤ end
    }

    pub fn iter(&self) -> impl Iterator<Item = u64> {
        self.start..=self.end
    }

    /// Number of points in one quartile (the trend statistic granularity).
    pub fn quartile_len(&self) -> u64 {
        self.len().div_ceil(4)
    }

    /// Clamps the start upward (used by checks that need n ≥ 2).
    pub fn clamp_start(&self, min_start: u64) -> Result<Self> {
        TestWindow::new(self.start.max(min_start), self.end)
    }
}

impl fmt::Display for TestWindow {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.start, self.end)
    }
}

/// Where a sequence's values come from.
#[derive(Debug, Clone)]
pub enum SeqSource {
    /// A term expression in the DSL variable `n`.
    Expr(ExprAst),
    /// Explicit 1-based values; queries past the end are errors.
    Table(Vec<BigRational>),
    /// The condensed series terms `t(n) = 2ⁿ·a(2ⁿ)`.
    Condensed(Box<SequenceSpec>),
    /// Index-scaled terms `t(n) = n·a(n)`.
    ScaledByIndex(Box<SequenceSpec>),
}

/// A sequence with a stable display name for reports.
#[derive(Debug, Clone)]
pub struct SequenceSpec {
    source: SeqSource,
    display: String,
}

impl SequenceSpec {
    /// Parses DSL text.
    pub fn parse(text: &str) -> Result<Self> {
        let ast = dsl::parse(text)?;
        Ok(SequenceSpec {
            source: SeqSource::Expr(ast),
            display: text.trim().to_string(),
        })
    }

    pub fn from_ast(ast: ExprAst) -> Self {
        let display = ast.to_canonical_string();
        SequenceSpec {
            source: SeqSource::Expr(ast),
            display,
        }
    }

    /// The constant sequence `c`.
    pub fn constant(c: BigRational) -> Self {
        SequenceSpec::from_ast(ExprAst::Const(c))
    }

    pub fn one() -> Self {
        SequenceSpec::constant(BigRational::from_integer(1.into()))
    }

    /// The identity sequence `q(n) = n`.
    pub fn index() -> Self {
        SequenceSpec::from_ast(ExprAst::Var)
    }

    pub fn from_table(values: Vec<BigRational>) -> Self {
        let display = format!("table[{} values]", values.len());
        SequenceSpec {
            source: SeqSource::Table(values),
            display,
        }
    }

    /// The condensed transform `n ↦ 2ⁿ·a(2ⁿ)` of this sequence.
    pub fn condensed(self) -> Self {
        let display = format!("condensed({})", self.display);
        SequenceSpec {
            source: SeqSource::Condensed(Box::new(self)),
            display,
        }
    }

    /// The index-scaled transform `n ↦ n·a(n)` of this sequence.
    pub fn scaled_by_index(self) -> Self {
        let display = format!("n*({})", self.display);
        SequenceSpec {
            source: SeqSource::ScaledByIndex(Box::new(self)),
            display,
        }
    }

    pub fn display(&self) -> &str {
        &self.display
    }

    pub fn source(&self) -> &SeqSource {
        &self.source
    }

    pub fn uses_transcendental(&self) -> bool {
        match &self.source {
            SeqSource::Expr(ast) => ast.uses_transcendental(),
            SeqSource::Table(_) => false,
            SeqSource::Condensed(inner) | SeqSource::ScaledByIndex(inner) => {
                inner.uses_transcendental()
            }
        }
    }

    /// Evaluates without the positivity requirement (finite-only).
    pub fn eval_any(&self, n: u64, ctx: &NumericContext) -> Result<Value> {
        if n == 0 {
            return Err(Error::IndexOverflow("sequence index 0 (indices start at 1)".into()));
        }
        match &self.source {
            SeqSource::Expr(ast) => eval_ast(ast, n, ctx),
            SeqSource::Table(values) => {
                let idx = usize::try_from(n - 1)
                    .ok()
                    .filter(|i| *i < values.len())
                    .ok_or(Error::TableIndex {
                        n,
                        len: values.len(),
                    })?;
                Ok(ctx.from_rational(&values[idx]))
            }
            SeqSource::Condensed(inner) => {
                let idx = condensed_index(n)?;
                let scale = ctx.from_u64(idx);
                let term = inner.eval_any(idx, ctx)?;
                ctx.mul(&scale, &term)
            }
            SeqSource::ScaledByIndex(inner) => {
                let term = inner.eval_any(n, ctx)?;
                ctx.mul(&ctx.from_u64(n), &term)
            }
        }
    }

    /// Evaluates and requires the value to be finite and strictly positive.
    pub fn eval(&self, n: u64, ctx: &NumericContext) -> Result<Value> {
        let value = self.eval_any(n, ctx)?;
        if !ctx.is_positive(&value) {
            let detail = if ctx.is_zero(&value) {
                "value is 0".to_string()
            } else {
                format!("value is negative ({})", value.render())
            };
            return Err(Error::Domain { n, detail });
        }
        Ok(value)
    }

    /// Hardware-double evaluation for heuristic scans; may return NaN or
    /// infinities, which callers must handle.
    pub fn eval_f64(&self, n: u64) -> f64 {
        match &self.source {
            SeqSource::Expr(ast) => eval_ast_f64(ast, n),
            SeqSource::Table(values) => usize::try_from(n)
                .ok()
                .and_then(|i| i.checked_sub(1))
                .and_then(|i| values.get(i))
                .and_then(|r| r.to_f64())
                .unwrap_or(f64::NAN),
            SeqSource::Condensed(inner) => match condensed_index(n) {
                Ok(idx) => idx as f64 * inner.eval_f64(idx),
                Err(_) => f64::NAN,
            },
            SeqSource::ScaledByIndex(inner) => n as f64 * inner.eval_f64(n),
        }
    }

    /// ln of the term via structural decomposition (float mode only):
    /// products, quotients, powers, square roots, and `n!` decompose without
    /// materializing the (possibly huge or tiny) direct value.
    pub fn eval_ln(&self, n: u64, ctx: &NumericContext) -> Result<Value> {
        match &self.source {
            SeqSource::Expr(ast) => eval_ast_ln(ast, n, ctx),
            SeqSource::Condensed(inner) => {
                let idx = condensed_index(n)?;
                let scale = ctx.ln(&ctx.from_u64(idx))?;
                let term = inner.eval_ln(idx, ctx)?;
                ctx.add(&scale, &term)
            }
            SeqSource::ScaledByIndex(inner) => {
                let scale = ctx.ln(&ctx.from_u64(n))?;
                let term = inner.eval_ln(n, ctx)?;
                ctx.add(&scale, &term)
            }
            SeqSource::Table(_) => ctx.ln(&self.eval(n, ctx)?),
        }
    }

    /// Term ratio `a(n)/a(n+m)`. If direct evaluation overflows and the
    /// context has `log_space` enabled, retries as exp(ln a(n) − ln a(n+m)).
    pub fn ratio(&self, n: u64, m: u64, ctx: &NumericContext) -> Result<Value> {
        let upper = n.checked_add(m).ok_or_else(|| {
            Error::IndexOverflow(format!("ratio index {n} + {m} overflows"))
        })?;
        let direct = (|| {
            let num = self.eval(n, ctx)?;
            let den = self.eval(upper, ctx)?;
            ctx.div_at(&num, &den, n)
        })();
        match direct {
            Err(Error::Numeric(_)) if ctx.log_space() && ctx.mode() == Mode::Float => {
                let top = self.eval_ln(n, ctx)?;
                let bottom = self.eval_ln(upper, ctx)?;
                ctx.exp(&ctx.sub(&top, &bottom)?)
            }
            other => other,
        }
    }
}

impl fmt::Display for SequenceSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.display)
    }
}

fn condensed_index(n: u64) -> Result<u64> {
    if n > 63 {
        return Err(Error::IndexOverflow(format!(
            "condensed index 2^{n} exceeds the 64-bit range"
        )));
    }
    Ok(1u64 << n)
}

/// Evaluates `expr` at index `n` and requires a finite positive value.
pub fn eval_term(spec: &SequenceSpec, n: u64, ctx: &NumericContext) -> Result<Value> {
    spec.eval(n, ctx)
}

/// Σ_{i=1}^{upto} a(i), folded in ascending index order (so the result is
/// bit-identical to the memoized prefix sums).
pub fn partial_sum(spec: &SequenceSpec, upto: u64, ctx: &NumericContext) -> Result<Value> {
    let mut acc = ctx.zero();
    for i in 1..=upto {
        let term = spec.eval(i, ctx)?;
        acc = ctx.add(&acc, &term)?;
    }
    Ok(acc)
}

fn eval_ast(ast: &ExprAst, n: u64, ctx: &NumericContext) -> Result<Value> {
    match ast {
        ExprAst::Const(r) => Ok(ctx.from_rational(r)),
        ExprAst::Var => Ok(ctx.from_u64(n)),
        ExprAst::Add(a, b) => ctx.add(&eval_ast(a, n, ctx)?, &eval_ast(b, n, ctx)?),
        ExprAst::Sub(a, b) => ctx.sub(&eval_ast(a, n, ctx)?, &eval_ast(b, n, ctx)?),
        ExprAst::Mul(a, b) => ctx.mul(&eval_ast(a, n, ctx)?, &eval_ast(b, n, ctx)?),
        ExprAst::Div(a, b) => {
            ctx.div_at(&eval_ast(a, n, ctx)?, &eval_ast(b, n, ctx)?, n)
        }
        ExprAst::Pow(base, exponent) => {
            let b = eval_ast(base, n, ctx)?;
            if let ExprAst::Const(r) = exponent.as_ref() {
                if r.is_integer() {
                    return ctx.pow_int(&b, r.numer());
                }
            }
            let e = eval_ast(exponent, n, ctx)?;
            match &e {
                Value::Exact(r) if r.is_integer() => ctx.pow_int(&b, r.numer()),
                _ => ctx.pow(&b, &e),
            }
        }
        ExprAst::Ln(x) => ctx.ln(&eval_ast(x, n, ctx)?),
        ExprAst::Exp(x) => ctx.exp(&eval_ast(x, n, ctx)?),
        ExprAst::Sqrt(x) => {
            let v = eval_ast(x, n, ctx)?;
            if ctx.cmp(&v, &ctx.zero())? == std::cmp::Ordering::Less {
                return Err(Error::Domain {
                    n,
                    detail: format!("sqrt of negative value {}", v.render()),
                });
            }
            ctx.sqrt(&v)
        }
        ExprAst::Factorial(inner) => match inner.as_ref() {
            ExprAst::Var => ctx.factorial(n),
            other => {
                let v = eval_ast(other, n, ctx)?;
                match &v {
                    Value::Exact(r) if r.is_integer() && !r.is_negative() => {
                        let k = r.numer().to_u64().ok_or_else(|| {
                            Error::IndexOverflow("factorial argument too large".into())
                        })?;
                        ctx.factorial(k)
                    }
                    _ => Err(Error::Domain {
                        n,
                        detail: "factorial of a non-integer value".into(),
                    }),
                }
            }
        },
    }
}

fn eval_ast_f64(ast: &ExprAst, n: u64) -> f64 {
    match ast {
        ExprAst::Const(r) => r.to_f64().unwrap_or(f64::NAN),
        ExprAst::Var => n as f64,
        ExprAst::Add(a, b) => eval_ast_f64(a, n) + eval_ast_f64(b, n),
        ExprAst::Sub(a, b) => eval_ast_f64(a, n) - eval_ast_f64(b, n),
        ExprAst::Mul(a, b) => eval_ast_f64(a, n) * eval_ast_f64(b, n),
        ExprAst::Div(a, b) => eval_ast_f64(a, n) / eval_ast_f64(b, n),
        ExprAst::Pow(a, b) => eval_ast_f64(a, n).powf(eval_ast_f64(b, n)),
        ExprAst::Ln(x) => eval_ast_f64(x, n).ln(),
        ExprAst::Exp(x) => eval_ast_f64(x, n).exp(),
        ExprAst::Sqrt(x) => eval_ast_f64(x, n).sqrt(),
        ExprAst::Factorial(inner) => {
            let arg = eval_ast_f64(inner, n);
            if !arg.is_finite() || arg < 0.0 || arg.fract() != 0.0 {
                return f64::NAN;
            }
            let k = arg as u64;
            if k > 170 {
                return f64::INFINITY;
            }
            let mut acc = 1.0f64;
            for i in 2..=k {
                acc *= i as f64;
            }
            acc
        }
    }
}

fn eval_ast_ln(ast: &ExprAst, n: u64, ctx: &NumericContext) -> Result<Value> {
    match ast {
        ExprAst::Mul(a, b) => ctx.add(&eval_ast_ln(a, n, ctx)?, &eval_ast_ln(b, n, ctx)?),
        ExprAst::Div(a, b) => ctx.sub(&eval_ast_ln(a, n, ctx)?, &eval_ast_ln(b, n, ctx)?),
        ExprAst::Pow(base, exponent) => {
            let e = eval_ast(exponent, n, ctx)?;
            ctx.mul(&e, &eval_ast_ln(base, n, ctx)?)
        }
        ExprAst::Sqrt(x) => {
            let half = ctx.parse_number("0.5")?;
            ctx.mul(&half, &eval_ast_ln(x, n, ctx)?)
        }
        ExprAst::Exp(x) => eval_ast(x, n, ctx),
        ExprAst::Factorial(inner) if matches!(inner.as_ref(), ExprAst::Var) => {
            ctx.ln_factorial(n)
        }
        other => ctx.ln(&eval_ast(other, n, ctx)?),
    }
}

/// What the memoized prefix sums accumulate.
#[derive(Debug, Clone)]
pub enum TermSource {
    /// Σ a(i).
    Plain(SequenceSpec),
    /// Σ c(i)·a(i).
    Product { c: SequenceSpec, a: SequenceSpec },
    /// Σ a(i + offset) — the m-step tail terms a_{i+m−1} use offset = m − 1.
    Shifted { a: SequenceSpec, offset: u64 },
}

impl TermSource {
    fn eval(&self, i: u64, ctx: &NumericContext) -> Result<Value> {
        match self {
            TermSource::Plain(a) => a.eval(i, ctx),
            TermSource::Product { c, a } => {
                let cv = c.eval(i, ctx)?;
                let av = a.eval(i, ctx)?;
                ctx.mul(&cv, &av)
            }
            TermSource::Shifted { a, offset } => {
                let idx = i.checked_add(*offset).ok_or_else(|| {
                    Error::IndexOverflow(format!("shifted index {i} + {offset} overflows"))
                })?;
                a.eval(idx, ctx)
            }
        }
    }

    fn eval_f64(&self, i: u64) -> f64 {
        match self {
            TermSource::Plain(a) => a.eval_f64(i),
            TermSource::Product { c, a } => c.eval_f64(i) * a.eval_f64(i),
            TermSource::Shifted { a, offset } => match i.checked_add(*offset) {
                Some(idx) => a.eval_f64(idx),
                None => f64::NAN,
            },
        }
    }
}

#[derive(Debug)]
struct PrefixCache {
    terms: Vec<Value>,
    sums: Vec<Value>,
}

/// Memoized terms and prefix sums over a [`TermSource`], growing on demand.
///
/// Interior mutability keeps the read API `&self`; the cache is not `Sync`,
/// so parallel callers clone one `PrefixSums` per thread (corpus rows each
/// build their own).
#[derive(Debug)]
pub struct PrefixSums {
    src: TermSource,
    cache: RefCell<PrefixCache>,
}

impl PrefixSums {
    pub fn new(src: TermSource) -> Self {
        PrefixSums {
            src,
            cache: RefCell::new(PrefixCache {
                terms: Vec::new(),
                sums: Vec::new(),
            }),
        }
    }

    pub fn source(&self) -> &TermSource {
        &self.src
    }

    fn grow(&self, n: u64, ctx: &NumericContext) -> Result<()> {
        let want = usize::try_from(n)
            .map_err(|_| Error::IndexOverflow(format!("prefix index {n} too large")))?;
        let mut cache = self.cache.borrow_mut();
        while cache.terms.len() < want {
            let i = cache.terms.len() as u64 + 1;
            let term = self.src.eval(i, ctx)?;
            let sum = match cache.sums.last() {
                Some(prev) => ctx.add(prev, &term)?,
                None => term.clone(),
            };
            cache.terms.push(term);
            cache.sums.push(sum);
        }
        Ok(())
    }

    /// The i-th term (1-based).
    pub fn term(&self, i: u64, ctx: &NumericContext) -> Result<Value> {
        if i == 0 {
            return Err(Error::IndexOverflow("term index 0".into()));
        }
        self.grow(i, ctx)?;
        Ok(self.cache.borrow().terms[i as usize - 1].clone())
    }

    /// Σ_{i=1}^{n} term(i); n = 0 gives 0.
    pub fn sum_upto(&self, n: u64, ctx: &NumericContext) -> Result<Value> {
        if n == 0 {
            return Ok(ctx.zero());
        }
        self.grow(n, ctx)?;
        Ok(self.cache.borrow().sums[n as usize - 1].clone())
    }

    /// Hardware-double term for heuristic scans.
    pub fn term_f64(&self, i: u64) -> f64 {
        self.src.eval_f64(i)
    }
}
