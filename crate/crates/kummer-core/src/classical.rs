//! Classical ratio-style criteria layered on the step engine: weighted
//! Raabe, Bertrand, and Gauss tests, the condensation characterization for
//! nonincreasing terms, and the Olivier-type bound.
//!
//! Each test reports a [`Conclusion`] alongside the underlying
//! [`WindowVerdict`]s: `converges-certified` / `diverges-certified` when the
//! inequality (and, for divergence sides, the series-divergence evidence)
//! fully supports it, `inconclusive` otherwise. Both branches of the Raabe
//! test are always evaluated so callers see the margins even when neither
//! certifies.

use num::{BigRational, One};
use std::fmt;

use crate::engine::{
    scan_window, step_margin, CheckStatus, CompareMode, Evidence, WindowVerdict,
};
use crate::error::{Error, Result};
use crate::numeric::{NumericContext, Value};
use crate::seq::{SequenceSpec, TestWindow};
use crate::witness::{expr_witness, WitnessSequence};

/// What a classical test concludes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Conclusion {
    ConvergesCertified,
    DivergesCertified,
    Inconclusive,
}

impl Conclusion {
    pub fn as_str(self) -> &'static str {
        match self {
            Conclusion::ConvergesCertified => "converges-certified",
            Conclusion::DivergesCertified => "diverges-certified",
            Conclusion::Inconclusive => "inconclusive",
        }
    }
}

impl fmt::Display for Conclusion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Which side of a two-sided test to run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Convergence,
    Divergence,
}

impl Side {
    pub fn as_str(self) -> &'static str {
        match self {
            Side::Convergence => "convergence",
            Side::Divergence => "divergence",
        }
    }
}

/// Weighted Raabe report: both branch margins, always.
#[derive(Debug, Clone)]
pub struct RaabeReport {
    pub conclusion: Conclusion,
    /// R⁻(n) = n·a(n)/a(n+1) − (n+1) − c(n+1), checked ≥ 0.
    pub conv_verdict: WindowVerdict,
    /// R⁺(n) = n·a(n)/a(n+1) − (n+1) + c(n+1), checked ≤ 0.
    pub div_verdict: WindowVerdict,
    pub diagnostics: Vec<String>,
}

/// Weighted Raabe test with weight sequence `c`. The divergence conclusion
/// additionally requires evidence that Σ c(n)/n diverges.
pub fn raabe(
    a: &SequenceSpec,
    c: &SequenceSpec,
    window: TestWindow,
    ctx: &NumericContext,
    div_evidence: Option<&Evidence>,
) -> Result<RaabeReport> {
    let index_witness = expr_witness(SequenceSpec::index(), a.clone());
    let zero = ctx.zero();

    let conv_scan = scan_window(window, ctx, CompareMode::AtLeast, &mut |n| {
        let base = step_margin(a, &index_witness, 1, n, ctx)?;
        let cv = c.eval(n + 1, ctx)?;
        Ok((ctx.sub(&base, &cv)?, zero.clone()))
    })?;
    let div_scan = scan_window(window, ctx, CompareMode::AtMost, &mut |n| {
        let base = step_margin(a, &index_witness, 1, n, ctx)?;
        let cv = c.eval(n + 1, ctx)?;
        Ok((ctx.add(&base, &cv)?, zero.clone()))
    })?;

    let mut conv_verdict = conv_scan.into_verdict();
    conv_verdict.hypotheses.push(format!(
        "weighted Raabe convergence branch: R⁻(n) = n·a(n)/a(n+1) − (n+1) − c(n+1) ≥ 0 on {window} (c = {c})"
    ));
    let mut div_verdict = div_scan.into_verdict();
    div_verdict.hypotheses.push(format!(
        "weighted Raabe divergence branch: R⁺(n) = n·a(n)/a(n+1) − (n+1) + c(n+1) ≤ 0 on {window} (c = {c})"
    ));
    match div_evidence {
        Some(ev) => div_verdict.hypotheses.push(ev.describe("Σ c(n)/n diverges")),
        None => div_verdict
            .hypotheses
            .push("Σ c(n)/n diverges — no evidence supplied".to_string()),
    }

    let mut diagnostics = Vec::new();
    let conclusion = if conv_verdict.status == CheckStatus::HoldsOnWindow {
        conv_verdict
            .consequences
            .push(format!("Σ a(n) converges — weighted Raabe margin ≥ 0 on {window}"));
        Conclusion::ConvergesCertified
    } else if div_verdict.status == CheckStatus::HoldsOnWindow {
        let supported = div_evidence.map(Evidence::is_supporting).unwrap_or(false);
        if supported {
            div_verdict.consequences.push(format!(
                "Σ a(n) diverges — weighted Raabe divergence branch holds on {window}, conditional on Σ c(n)/n divergence evidence"
            ));
            Conclusion::DivergesCertified
        } else {
            diagnostics.push(
                "divergence branch inequality holds, but Σ c(n)/n divergence evidence is missing or inconclusive"
                    .to_string(),
            );
            Conclusion::Inconclusive
        }
    } else {
        diagnostics.push(format!(
            "neither branch holds: R⁻ first fails at {:?}, R⁺ first fails at {:?}",
            conv_verdict.failing_index, div_verdict.failing_index
        ));
        Conclusion::Inconclusive
    };

    Ok(RaabeReport {
        conclusion,
        conv_verdict,
        div_verdict,
        diagnostics,
    })
}

/// Bertrand-type report.
#[derive(Debug, Clone)]
pub struct BertrandReport {
    pub conclusion: Conclusion,
    pub side: Side,
    /// The ratio-inequality scan (margins are differences against the RHS).
    pub verdict: WindowVerdict,
    /// Window actually scanned (start clamped to ≥ 2 for ln n).
    pub window: TestWindow,
    /// min θ(n) (convergence side) or max θ(n) (divergence side).
    pub theta_stat: Value,
    /// Reduced Kummer margin n·ln n·a(n)/a(n+1) − (n+1)·ln(n+1) ∓ c(n+1):
    /// window minimum and maximum.
    pub kummer_margin_min: Value,
    pub kummer_margin_max: Value,
    pub diagnostics: Vec<String>,
}

/// Bertrand-type test with weight `c` and slack sequence θ.
///
/// Convergence side: a(n)/a(n+1) > 1 + 1/n + (θ(n) + c(n+1))/(n ln n) with
/// θ(n) ≥ θ > 1 observed on the window (strict margins). Divergence side:
/// a(n)/a(n+1) ≤ 1 + 1/n + (θ(n) − c(n+1))/(n ln n) with θ(n) ≤ θ < 1, plus
/// evidence that Σ c(n)/(n ln n) diverges.
pub fn bertrand(
    a: &SequenceSpec,
    c: &SequenceSpec,
    theta: &SequenceSpec,
    side: Side,
    window: TestWindow,
    ctx: &NumericContext,
    div_evidence: Option<&Evidence>,
) -> Result<BertrandReport> {
    let window = window.clamp_start(2)?;
    let one = ctx.one();

    // θ bound: a single constant θ must separate θ(n) from 1 on the window.
    let mut theta_stat: Option<Value> = None;
    for n in window.iter() {
        let t = theta.eval_any(n, ctx)?;
        theta_stat = Some(match (&theta_stat, side) {
            (None, _) => t,
            (Some(prev), Side::Convergence) => ctx.min(prev, &t)?,
            (Some(prev), Side::Divergence) => ctx.max(prev, &t)?,
        });
    }
    let theta_stat = theta_stat.expect("nonempty window");
    match side {
        Side::Convergence => {
            if !ctx.gt_strict(&theta_stat, &one)? {
                return Err(Error::Precondition(format!(
                    "convergence side needs θ(n) ≥ θ > 1 on the window, but min θ = {}",
                    theta_stat.render()
                )));
            }
        }
        Side::Divergence => {
            if !ctx.lt_strict(&theta_stat, &one)? {
                return Err(Error::Precondition(format!(
                    "divergence side needs θ(n) ≤ θ < 1 on the window, but max θ = {}",
                    theta_stat.render()
                )));
            }
        }
    }

    let mode = match side {
        Side::Convergence => CompareMode::StrictlyGreater,
        Side::Divergence => CompareMode::AtMost,
    };
    let mut kmin: Option<Value> = None;
    let mut kmax: Option<Value> = None;
    let scan = scan_window(window, ctx, mode, &mut |n| {
        let ratio = a.ratio(n, 1, ctx)?;
        let nv = ctx.from_u64(n);
        let ln_n = ctx.ln(&nv)?;
        let n_ln_n = ctx.mul(&nv, &ln_n)?;
        let cv = c.eval(n + 1, ctx)?;
        let tv = theta.eval_any(n, ctx)?;
        let slack_num = match side {
            Side::Convergence => ctx.add(&tv, &cv)?,
            Side::Divergence => ctx.sub(&tv, &cv)?,
        };
        let rhs = ctx.add(
            &ctx.add(&one, &ctx.div_at(&one, &nv, n)?)?,
            &ctx.div_at(&slack_num, &n_ln_n, n)?,
        )?;
        // Reduced Kummer margin with q(n) = n ln n.
        let np1 = ctx.from_u64(n + 1);
        let ln_np1 = ctx.ln(&np1)?;
        let reduced_base = ctx.sub(&ctx.mul(&n_ln_n, &ratio)?, &ctx.mul(&np1, &ln_np1)?)?;
        let reduced = match side {
            Side::Convergence => ctx.sub(&reduced_base, &cv)?,
            Side::Divergence => ctx.add(&reduced_base, &cv)?,
        };
        kmin = Some(match kmin.take() {
            Some(prev) => ctx.min(&prev, &reduced)?,
            None => reduced.clone(),
        });
        kmax = Some(match kmax.take() {
            Some(prev) => ctx.max(&prev, &reduced)?,
            None => reduced,
        });
        // Margin = ratio − RHS, compared against 0.
        Ok((ctx.sub(&ratio, &rhs)?, ctx.zero()))
    })?;

    let mut verdict = scan.into_verdict();
    let mut diagnostics = Vec::new();
    match side {
        Side::Convergence => verdict.hypotheses.push(format!(
            "Bertrand convergence side on {window}: a(n)/a(n+1) > 1 + 1/n + (θ(n)+c(n+1))/(n ln n), min θ = {} > 1 (c = {c}, θ = {theta})",
            theta_stat.render()
        )),
        Side::Divergence => {
            verdict.hypotheses.push(format!(
                "Bertrand divergence side on {window}: a(n)/a(n+1) ≤ 1 + 1/n + (θ(n)−c(n+1))/(n ln n), max θ = {} < 1 (c = {c}, θ = {theta})",
                theta_stat.render()
            ));
            match div_evidence {
                Some(ev) => verdict
                    .hypotheses
                    .push(ev.describe("Σ c(n)/(n ln n) diverges")),
                None => verdict
                    .hypotheses
                    .push("Σ c(n)/(n ln n) diverges — no evidence supplied".to_string()),
            }
        }
    }

    let conclusion = match (side, verdict.status) {
        (Side::Convergence, CheckStatus::HoldsOnWindow) => {
            verdict.consequences.push(format!(
                "Σ a(n) converges — Bertrand convergence inequality strict on {window}"
            ));
            Conclusion::ConvergesCertified
        }
        (Side::Divergence, CheckStatus::HoldsOnWindow) => {
            if div_evidence.map(Evidence::is_supporting).unwrap_or(false) {
                verdict.consequences.push(format!(
                    "Σ a(n) diverges — Bertrand divergence inequality holds on {window}, conditional on Σ c(n)/(n ln n) divergence evidence"
                ));
                Conclusion::DivergesCertified
            } else {
                diagnostics.push(
                    "inequality holds, but Σ c(n)/(n ln n) divergence evidence is missing or inconclusive"
                        .to_string(),
                );
                Conclusion::Inconclusive
            }
        }
        _ => Conclusion::Inconclusive,
    };

    Ok(BertrandReport {
        conclusion,
        side,
        verdict,
        window,
        theta_stat,
        kummer_margin_min: kmin.expect("nonempty window"),
        kummer_margin_max: kmax.expect("nonempty window"),
        diagnostics,
    })
}

/// Gauss-type parameters: a(n)/a(n+1) compared against
/// 1 ± c(n+1)/n + μ/n + θ(n)/n^γ with γ ≥ 1 and bounded θ.
#[derive(Debug, Clone)]
pub struct GaussParams {
    pub mu: Value,
    pub gamma: BigRational,
    pub theta: SequenceSpec,
}

/// Gauss-type report.
#[derive(Debug, Clone)]
pub struct GaussReport {
    pub conclusion: Conclusion,
    pub side: Side,
    /// Margin scan in Kummer units (see below), against 0.
    pub verdict: WindowVerdict,
    /// max |θ(n)| observed (the boundedness hypothesis, recorded).
    pub theta_max_abs: Value,
    pub diagnostics: Vec<String>,
}

/// Gauss-type test. The margin is expressed in Kummer units,
/// `n·a(n)/a(n+1) − (n+1) − (μ−1) − θ(n)/n^(γ−1) ∓ c(n+1)`, so that
/// γ = 1, θ ≡ 0, μ = 1 reproduces the weighted Raabe margin exactly.
/// Also enforces the side condition θ(n) ≥ (1−μ)·n^(γ−1) (convergence) or
/// θ(n) ≤ (1−μ)·n^(γ−1) (divergence) pointwise.
pub fn gauss(
    a: &SequenceSpec,
    c: &SequenceSpec,
    params: &GaussParams,
    side: Side,
    window: TestWindow,
    ctx: &NumericContext,
    div_evidence: Option<&Evidence>,
) -> Result<GaussReport> {
    if params.gamma < BigRational::one() {
        return Err(Error::Precondition(format!(
            "γ must be at least 1, got {}",
            params.gamma
        )));
    }
    let gamma_m1 = &params.gamma - BigRational::one();
    let index_witness = expr_witness(SequenceSpec::index(), a.clone());
    let mu_m1 = ctx.sub(&params.mu, &ctx.one())?;

    let mut theta_max_abs = ctx.zero();
    let mut side_violation: Option<(u64, Value, Value)> = None;

    let scan = scan_window(window, ctx, side_mode(side), &mut |n| {
        let theta_v = params.theta.eval_any(n, ctx)?;
        theta_max_abs = ctx.max(&theta_max_abs, &ctx.abs(&theta_v)?)?;
        let n_pow = pow_rational_index(n, &gamma_m1, ctx)?;
        // Side condition θ(n) ≷ (1−μ)·n^(γ−1).
        let threshold = ctx.mul(&ctx.neg(&mu_m1)?, &n_pow)?;
        let side_ok = match side {
            Side::Convergence => ctx.ge_tol(&theta_v, &threshold)?,
            Side::Divergence => ctx.le_tol(&theta_v, &threshold)?,
        };
        if !side_ok && side_violation.is_none() {
            side_violation = Some((n, theta_v.clone(), threshold.clone()));
        }
        let base = step_margin(a, &index_witness, 1, n, ctx)?;
        let cv = c.eval(n + 1, ctx)?;
        let theta_term = ctx.div_at(&theta_v, &n_pow, n)?;
        let core = ctx.sub(&ctx.sub(&base, &mu_m1)?, &theta_term)?;
        let margin = match side {
            Side::Convergence => ctx.sub(&core, &cv)?,
            Side::Divergence => ctx.add(&core, &cv)?,
        };
        Ok((margin, ctx.zero()))
    })?;

    let mut verdict = scan.into_verdict();
    let mut diagnostics = Vec::new();
    verdict.hypotheses.push(format!(
        "Gauss-type {} side on {window}: μ = {}, γ = {}, θ = {}, |θ| ≤ {} observed",
        side.as_str(),
        params.mu.render(),
        params.gamma,
        params.theta,
        theta_max_abs.render()
    ));
    if let Some((n, tv, thr)) = &side_violation {
        diagnostics.push(format!(
            "side condition θ(n) {} (1−μ)·n^(γ−1) violated at n = {n}: θ = {}, threshold = {}",
            match side {
                Side::Convergence => "≥",
                Side::Divergence => "≤",
            },
            tv.render(),
            thr.render()
        ));
        if verdict.status == CheckStatus::HoldsOnWindow {
            verdict.status = CheckStatus::FailsAtIndex;
            verdict.failing_index = Some(*n);
        }
    }
    if side == Side::Divergence {
        match div_evidence {
            Some(ev) => verdict.hypotheses.push(ev.describe("Σ c(n)/n diverges")),
            None => verdict
                .hypotheses
                .push("Σ c(n)/n diverges — no evidence supplied".to_string()),
        }
    }

    let conclusion = match (side, verdict.status) {
        (Side::Convergence, CheckStatus::HoldsOnWindow) => {
            verdict.consequences.push(format!(
                "Σ a(n) converges — Gauss-type margin ≥ 0 on {window}"
            ));
            Conclusion::ConvergesCertified
        }
        (Side::Divergence, CheckStatus::HoldsOnWindow) => {
            if div_evidence.map(Evidence::is_supporting).unwrap_or(false) {
                verdict.consequences.push(format!(
                    "Σ a(n) diverges — Gauss-type margin ≤ 0 on {window}, conditional on Σ c(n)/n divergence evidence"
                ));
                Conclusion::DivergesCertified
            } else {
                diagnostics.push(
                    "inequality holds, but Σ c(n)/n divergence evidence is missing or inconclusive"
                        .to_string(),
                );
                Conclusion::Inconclusive
            }
        }
        _ => Conclusion::Inconclusive,
    };

    Ok(GaussReport {
        conclusion,
        side,
        verdict,
        theta_max_abs,
        diagnostics,
    })
}

fn side_mode(side: Side) -> CompareMode {
    match side {
        Side::Convergence => CompareMode::AtLeast,
        Side::Divergence => CompareMode::AtMost,
    }
}

/// n^e for a rational exponent e ≥ 0 (exact for integer e, float otherwise).
fn pow_rational_index(n: u64, e: &BigRational, ctx: &NumericContext) -> Result<Value> {
    let base = ctx.from_u64(n);
    if e.is_integer() {
        ctx.pow_int(&base, e.numer())
    } else {
        let ev = ctx.from_rational(e);
        ctx.pow(&base, &ev)
    }
}

/// Condensation characterization for nonincreasing positive terms:
/// q(n) − 2·q(n+1) ≥ 2·a(2^(n+1)) on the window certifies convergence of
/// Σ a(n); failure of the inequality is recorded per index.
///
/// Monotonicity of `a` is pre-checked by sampling (dense over
/// [1, min(1024, 2^(end+1))] plus ±2 neighbourhoods of every power of two up
/// to 2^(end+1)); a violation aborts with index information.
pub fn condensation_check(
    a: &SequenceSpec,
    q: &SequenceSpec,
    window: TestWindow,
    ctx: &NumericContext,
) -> Result<WindowVerdict> {
    if window.end() > 62 {
        return Err(Error::IndexOverflow(format!(
            "condensation window end {} needs 2^{} indices, beyond the 64-bit range",
            window.end(),
            window.end() + 1
        )));
    }
    let top = 1u64 << (window.end() + 1);
    check_sampled_nonincreasing(a, top, ctx)?;

    let two = ctx.from_u64(2);
    let scan = scan_window(window, ctx, CompareMode::AtLeast, &mut |n| {
        let qn = q.eval(n, ctx)?;
        let qn1 = q.eval(n + 1, ctx)?;
        let value = ctx.sub(&qn, &ctx.mul(&two, &qn1)?)?;
        let a_at = a.eval(1u64 << (n + 1), ctx)?;
        let bound = ctx.mul(&two, &a_at)?;
        Ok((value, bound))
    })?;
    let mut verdict = scan.into_verdict();
    verdict.hypotheses.push(format!(
        "a(n) nonincreasing (sampled up to index {top}); witness q = {q}"
    ));
    if verdict.status == CheckStatus::HoldsOnWindow {
        verdict.consequences.push(format!(
            "Σ a(n) converges — condensation inequality q(n) − 2q(n+1) ≥ 2a(2^(n+1)) holds on {window}"
        ));
    } else if let Some(n) = verdict.failing_index {
        verdict.diagnostics.push(format!(
            "condensation inequality fails at n = {n}; for nonincreasing terms this witness certifies nothing (and for a divergent series every witness fails)"
        ));
    }
    Ok(verdict)
}

/// Sampled monotonicity check: errors with the violating index.
pub(crate) fn check_sampled_nonincreasing(
    a: &SequenceSpec,
    top: u64,
    ctx: &NumericContext,
) -> Result<()> {
    let check_pair = |prev: u64, n: u64| -> Result<()> {
        let ap = a.eval(prev, ctx)?;
        let an = a.eval(n, ctx)?;
        if ctx.gt_strict(&an, &ap)? {
            return Err(Error::NotDecreasing { n, prev });
        }
        Ok(())
    };
    let dense_top = top.min(1024);
    for n in 2..=dense_top {
        check_pair(n - 1, n)?;
    }
    let mut p = 1u64;
    while p <= top / 2 {
        p *= 2;
        // Neighbourhood [p−2, p+2] of each power of two.
        let lo = p.saturating_sub(2).max(2);
        let hi = (p + 2).min(top);
        for n in lo..=hi {
            if n > dense_top {
                check_pair(n - 1, n)?;
            }
        }
    }
    Ok(())
}

/// Olivier-type report.
#[derive(Debug, Clone)]
pub struct OlivierReport {
    /// The inequality d(n) = q(n)·(n+1)/n − q(n+1) ≥ (n+1)·a(n+1), scanned.
    pub verdict: WindowVerdict,
    /// d at the window's final index.
    pub final_d: Value,
    /// n·a(n) at the window's final index.
    pub final_na: Value,
    /// max |d(n)| over the last quartile of the window.
    pub tail_max_abs_d: Value,
    /// max n·a(n) over the last quartile of the window.
    pub tail_max_na: Value,
    pub diagnostics: Vec<String>,
}

/// Olivier-type check: when Σ a(n) is seen through a witness q, the
/// difference sequence d(n) = q(n)·(n+1)/n − q(n+1) dominates (n+1)·a(n+1);
/// on a window where this holds, n·a(n) is bounded by the d-tail there (a
/// window statement — no limit claim is made).
pub fn olivier_check(
    a: &SequenceSpec,
    q: &WitnessSequence,
    window: TestWindow,
    ctx: &NumericContext,
) -> Result<OlivierReport> {
    let mut d_values = Vec::with_capacity(window.len() as usize);
    let scan = scan_window(window, ctx, CompareMode::AtLeast, &mut |n| {
        let qn = q.q(n, ctx)?;
        let qn1 = q.q(n + 1, ctx)?;
        let nv = ctx.from_u64(n);
        let np1 = ctx.from_u64(n + 1);
        let d = ctx.sub(&ctx.div_at(&ctx.mul(&qn, &np1)?, &nv, n)?, &qn1)?;
        let a_next = a.eval(n + 1, ctx)?;
        let bound = ctx.mul(&np1, &a_next)?;
        d_values.push(d.clone());
        Ok((d, bound))
    })?;

    let end = window.end();
    let final_d = d_values.last().expect("nonempty window").clone();
    let final_na = ctx.mul(&ctx.from_u64(end), &a.eval(end, ctx)?)?;

    let quart = window.quartile_len() as usize;
    let tail_start_idx = d_values.len() - quart;
    let mut tail_max_abs_d = ctx.zero();
    for d in &d_values[tail_start_idx..] {
        tail_max_abs_d = ctx.max(&tail_max_abs_d, &ctx.abs(d)?)?;
    }
    let mut tail_max_na = ctx.zero();
    for n in window.iter().skip(tail_start_idx) {
        let na = ctx.mul(&ctx.from_u64(n), &a.eval(n, ctx)?)?;
        tail_max_na = ctx.max(&tail_max_na, &na)?;
    }

    let mut verdict = scan.into_verdict();
    verdict
        .hypotheses
        .push(format!("witness q = {}; q(n) > 0 verified on {window}", q.describe()));
    let mut diagnostics = Vec::new();
    if verdict.status == CheckStatus::HoldsOnWindow {
        verdict.consequences.push(format!(
            "d(n) ≥ (n+1)·a(n+1) on {window}; n·a(n) is bounded by the d-sequence tail on this window"
        ));
    } else if let Some(n) = verdict.failing_index {
        diagnostics.push(format!("domination fails at n = {n}"));
    }
    diagnostics.push(format!(
        "final index {end}: d = {}, n·a(n) = {}",
        final_d.render(),
        final_na.render()
    ));
    diagnostics.push(format!(
        "last-quartile maxima: |d| ≤ {}, n·a(n) ≤ {}",
        tail_max_abs_d.render(),
        tail_max_na.render()
    ));

    Ok(OlivierReport {
        verdict,
        final_d,
        final_na,
        tail_max_abs_d,
        tail_max_na,
        diagnostics,
    })
}
