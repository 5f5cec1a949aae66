//! Witness sequences: user-supplied expressions and the constructive
//! sequences extracted from the converse direction of each criterion.
//!
//! Four constructions are shipped:
//! * [`div_witness`] — `q(n) = P(n)/a(n)` from the partial sums of a
//!   divergent series; satisfies `q(1) = 1` and the step identity
//!   `q(n)·a(n)/a(n+1) − q(n+1) = −1` exactly.
//! * [`conv_witness`] — `q(n) = (S_m − Σ_{i≤n} a_{i+m−1})/a(n)` from the
//!   m-step tail sums of a convergent series with certified sum `S`;
//!   the m-step margin equals `1 + (a_{n+m+1} + … + a_{n+2m−1})/a_{n+m} ≥ 1`,
//!   with equality exactly at m = 1.
//! * [`weighted_conv_witness`] — `q(n) = (S − Σ_{i≤n} c_i a_i)/a(n)`; the
//!   weighted margin equals `c(n+1)` identically, for any constant `S`
//!   (the constant cancels), though positivity needs `S` at or above the sum.
//! * [`weighted_div_witness`] — `q(n) = (Σ_{i≤n} c_i a_i)/a(n)`; the weighted
//!   margin equals `−c(n+1)` identically and `q(1) = c(1)`.

use std::fmt;

use crate::error::{Error, Result};
use crate::numeric::{NumericContext, Value};
use crate::seq::{PrefixSums, SequenceSpec, TermSource, TestWindow};

/// Where a witness sequence came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Provenance {
    /// Supplied by the caller as an expression or table.
    User,
    /// Tail-sum quotient construction (convergence direction).
    TailSumQuotient,
    /// Partial-sum quotient construction (divergence direction).
    PartialSumQuotient,
    /// Weighted tail-sum quotient (weighted convergence direction).
    WeightedTailSum,
    /// Weighted partial-sum quotient (weighted divergence direction).
    WeightedPartialSum,
}

impl Provenance {
    pub fn as_str(self) -> &'static str {
        match self {
            Provenance::User => "user",
            Provenance::TailSumQuotient => "tail-sum-quotient",
            Provenance::PartialSumQuotient => "partial-sum-quotient",
            Provenance::WeightedTailSum => "weighted-tail-sum",
            Provenance::WeightedPartialSum => "weighted-partial-sum",
        }
    }
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Where a sum constant came from (recorded in reports).
#[derive(Debug, Clone)]
pub enum SumSource {
    /// The corpus entry's certified `exact_sum`.
    CatalogExact { id: String },
    /// Supplied by the caller.
    UserSupplied,
    /// Oracle estimate plus certified tail bound.
    OracleCertified { method: String, hypothesis: String },
    /// A named analytic constant evaluated at context precision.
    AnalyticConstant { name: String },
}

impl SumSource {
    pub fn describe(&self) -> String {
        match self {
            SumSource::CatalogExact { id } => format!("catalog exact_sum for `{id}`"),
            SumSource::UserSupplied => "user-supplied".to_string(),
            SumSource::OracleCertified { method, hypothesis } => {
                format!("oracle estimate ({method}; {hypothesis})")
            }
            SumSource::AnalyticConstant { name } => {
                format!("analytic constant {name}")
            }
        }
    }
}

/// A sum constant with provenance, used by the tail-sum constructions.
#[derive(Debug, Clone)]
pub struct SumConstant {
    pub value: Value,
    pub source: SumSource,
}

impl SumConstant {
    pub fn user(value: Value) -> Self {
        SumConstant {
            value,
            source: SumSource::UserSupplied,
        }
    }

    pub fn catalog(id: &str, value: Value) -> Self {
        SumConstant {
            value,
            source: SumSource::CatalogExact { id: id.to_string() },
        }
    }

    pub fn certified(value: Value, method: &str, hypothesis: String) -> Self {
        SumConstant {
            value,
            source: SumSource::OracleCertified {
                method: method.to_string(),
                hypothesis,
            },
        }
    }

    pub fn analytic(name: &str, value: Value) -> Self {
        SumConstant {
            value,
            source: SumSource::AnalyticConstant {
                name: name.to_string(),
            },
        }
    }
}

#[derive(Debug)]
enum WitnessKind {
    Expr(SequenceSpec),
    PartialSumQuotient {
        sums: PrefixSums,
    },
    TailSumQuotient {
        m: u64,
        /// S_m = S − Σ_{i<m} a_i, in the construction context's mode.
        s_m: Value,
        s: SumConstant,
        shifted: PrefixSums,
    },
    WeightedTailSum {
        s: SumConstant,
        c: SequenceSpec,
        products: PrefixSums,
    },
    WeightedPartialSum {
        c: SequenceSpec,
        products: PrefixSums,
    },
}

/// A positive witness sequence `q(n)` together with the series it certifies.
#[derive(Debug)]
pub struct WitnessSequence {
    a: SequenceSpec,
    kind: WitnessKind,
    provenance: Provenance,
}

/// User-supplied witness from a sequence spec.
pub fn expr_witness(q: SequenceSpec, a: SequenceSpec) -> WitnessSequence {
    WitnessSequence {
        a,
        kind: WitnessKind::Expr(q),
        provenance: Provenance::User,
    }
}

/// Partial-sum quotient witness `q(n) = P(n)/a(n)` for a divergent series.
pub fn div_witness(a: SequenceSpec) -> WitnessSequence {
    let sums = PrefixSums::new(TermSource::Plain(a.clone()));
    WitnessSequence {
        a,
        kind: WitnessKind::PartialSumQuotient { sums },
        provenance: Provenance::PartialSumQuotient,
    }
}

/// m-step tail-sum quotient witness for a convergent series with sum
/// constant `s` (the full sum Σ_{i≥1} a_i, or a certified upper bound).
pub fn conv_witness(
    a: SequenceSpec,
    m: u64,
    s: SumConstant,
    ctx: &NumericContext,
) -> Result<WitnessSequence> {
    if m == 0 {
        return Err(Error::Precondition("step m must be at least 1".into()));
    }
    // S_m = Σ_{i≥m} a_i = S − Σ_{i<m} a_i.
    let head = crate::seq::partial_sum(&a, m - 1, ctx)?;
    let s_m = ctx.sub(&s.value, &head)?;
    if !ctx.is_positive(&s_m) {
        return Err(Error::SumNotCertified(format!(
            "sum constant {} leaves a nonpositive m-step tail S_m = {}",
            s.value.render(),
            s_m.render()
        )));
    }
    let shifted = PrefixSums::new(TermSource::Shifted {
        a: a.clone(),
        offset: m - 1,
    });
    Ok(WitnessSequence {
        a,
        kind: WitnessKind::TailSumQuotient { m, s_m, s, shifted },
        provenance: Provenance::TailSumQuotient,
    })
}

/// Weighted tail-sum quotient witness `q(n) = (S − Σ_{i≤n} c_i a_i)/a(n)`.
pub fn weighted_conv_witness(
    a: SequenceSpec,
    c: SequenceSpec,
    s: SumConstant,
) -> WitnessSequence {
    let products = PrefixSums::new(TermSource::Product {
        c: c.clone(),
        a: a.clone(),
    });
    WitnessSequence {
        a,
        kind: WitnessKind::WeightedTailSum { s, c, products },
        provenance: Provenance::WeightedTailSum,
    }
}

/// Weighted partial-sum quotient witness `q(n) = (Σ_{i≤n} c_i a_i)/a(n)`.
pub fn weighted_div_witness(a: SequenceSpec, c: SequenceSpec) -> WitnessSequence {
    let products = PrefixSums::new(TermSource::Product {
        c: c.clone(),
        a: a.clone(),
    });
    WitnessSequence {
        a,
        kind: WitnessKind::WeightedPartialSum { c, products },
        provenance: Provenance::WeightedPartialSum,
    }
}

/// Max over the window of |q(n)·a(n)/a(n+1) − q(n+1) ∓ c(n+1)|: the residual
/// of the telescoping identity each construction satisfies. The expected
/// value is +c(n+1) for tail-sum constructions (and user witnesses) and
/// −c(n+1) for partial-sum constructions; exact mode returns 0 for every
/// constructed witness.
pub fn verify_witness_identity(
    a: &SequenceSpec,
    c: &SequenceSpec,
    q: &WitnessSequence,
    window: TestWindow,
    ctx: &NumericContext,
) -> Result<Value> {
    let negate_c = matches!(
        q.provenance(),
        Provenance::PartialSumQuotient | Provenance::WeightedPartialSum
    );
    let mut max_residual = ctx.zero();
    for n in window.iter() {
        let qn = q.q(n, ctx)?;
        let qn1 = q.q(n + 1, ctx)?;
        let an = a.eval(n, ctx)?;
        let an1 = a.eval(n + 1, ctx)?;
        let ratio = ctx.div_at(&an, &an1, n + 1)?;
        let margin = ctx.sub(&ctx.mul(&qn, &ratio)?, &qn1)?;
        let cn1 = c.eval(n + 1, ctx)?;
        let expected = if negate_c { ctx.neg(&cn1)? } else { cn1 };
        let residual = ctx.abs(&ctx.sub(&margin, &expected)?)?;
        max_residual = ctx.max(&max_residual, &residual)?;
    }
    Ok(max_residual)
}

impl WitnessSequence {
    pub fn provenance(&self) -> Provenance {
        self.provenance
    }

    pub fn series(&self) -> &SequenceSpec {
        &self.a
    }

    /// The sum constant backing a tail-sum construction, if any.
    pub fn sum_constant(&self) -> Option<&SumConstant> {
        match &self.kind {
            WitnessKind::TailSumQuotient { s, .. }
            | WitnessKind::WeightedTailSum { s, .. } => Some(s),
            _ => None,
        }
    }

    /// The weight sequence of a weighted construction, if any.
    pub fn weight(&self) -> Option<&SequenceSpec> {
        match &self.kind {
            WitnessKind::WeightedTailSum { c, .. }
            | WitnessKind::WeightedPartialSum { c, .. } => Some(c),
            _ => None,
        }
    }

    /// Stable human-readable description for reports.
    pub fn describe(&self) -> String {
        match &self.kind {
            WitnessKind::Expr(spec) => spec.display().to_string(),
            WitnessKind::PartialSumQuotient { .. } => {
                format!("P(n)/a(n) with a(n) = {}", self.a)
            }
            WitnessKind::TailSumQuotient { m, s, .. } => format!(
                "(S_{m} - T(n))/a(n) with a(n) = {}, S from {}",
                self.a,
                s.source.describe()
            ),
            WitnessKind::WeightedTailSum { s, c, .. } => format!(
                "(S - W(n))/a(n) with a(n) = {}, c(n) = {c}, S from {}",
                self.a,
                s.source.describe()
            ),
            WitnessKind::WeightedPartialSum { c, .. } => {
                format!("W(n)/a(n) with a(n) = {}, c(n) = {c}", self.a)
            }
        }
    }

    /// Evaluates q(n); errors if the value is not strictly positive.
    pub fn q(&self, n: u64, ctx: &NumericContext) -> Result<Value> {
        let value = match &self.kind {
            WitnessKind::Expr(spec) => spec.eval_any(n, ctx)?,
            WitnessKind::PartialSumQuotient { sums } => {
                let p = sums.sum_upto(n, ctx)?;
                let a = sums.term(n, ctx)?;
                ctx.div_at(&p, &a, n)?
            }
            WitnessKind::TailSumQuotient { s_m, shifted, .. } => {
                let t = shifted.sum_upto(n, ctx)?;
                let numer = ctx.sub(s_m, &t)?;
                let a = self.a.eval(n, ctx)?;
                ctx.div_at(&numer, &a, n)?
            }
            WitnessKind::WeightedTailSum { s, products, .. } => {
                let w = products.sum_upto(n, ctx)?;
                let numer = ctx.sub(&s.value, &w)?;
                let a = self.a.eval(n, ctx)?;
                ctx.div_at(&numer, &a, n)?
            }
            WitnessKind::WeightedPartialSum { products, .. } => {
                let w = products.sum_upto(n, ctx)?;
                let a = self.a.eval(n, ctx)?;
                ctx.div_at(&w, &a, n)?
            }
        };
        if !ctx.is_positive(&value) {
            let detail = match &self.kind {
                WitnessKind::Expr(_) => "witness expression is not positive here".to_string(),
                WitnessKind::TailSumQuotient { s, .. }
                | WitnessKind::WeightedTailSum { s, .. } => format!(
                    "sum constant {} underestimates the series (partial sums exceed it)",
                    s.value.render()
                ),
                _ => "witness value is not positive".to_string(),
            };
            return Err(Error::NonpositiveWitness {
                n,
                value: value.render(),
                detail,
            });
        }
        Ok(value)
    }

    /// q(n)·a(n). For the partial-sum constructions this *is* the memoized
    /// prefix sum — returned directly, so it matches `partial_sum` to the
    /// last bit rather than within rounding.
    pub fn q_times_a(&self, n: u64, ctx: &NumericContext) -> Result<Value> {
        match &self.kind {
            WitnessKind::PartialSumQuotient { sums } => sums.sum_upto(n, ctx),
            WitnessKind::WeightedPartialSum { products, .. } => products.sum_upto(n, ctx),
            _ => {
                let q = self.q(n, ctx)?;
                let a = self.a.eval(n, ctx)?;
                ctx.mul(&q, &a)
            }
        }
    }

    /// Eagerly validates positivity of q over a window.
    pub fn validate_positive(&self, window: TestWindow, ctx: &NumericContext) -> Result<()> {
        for n in window.iter() {
            self.q(n, ctx)?;
        }
        Ok(())
    }

    /// The step size this witness was built for (1 except for the m-step
    /// tail-sum construction).
    pub fn step(&self) -> u64 {
        match &self.kind {
            WitnessKind::TailSumQuotient { m, .. } => *m,
            _ => 1,
        }
    }

    /// The margin value the construction's identity predicts at index n,
    /// with a description; `None` for user-supplied witnesses.
    ///
    /// * partial-sum quotient: margin ≡ −1;
    /// * m-step tail-sum quotient: margin = 1 + (a_{n+m+1}+…+a_{n+2m−1})/a_{n+m};
    /// * weighted tail-sum: margin ≡ c(n+1);
    /// * weighted partial-sum: margin ≡ −c(n+1).
    pub fn expected_margin(
        &self,
        n: u64,
        ctx: &NumericContext,
    ) -> Result<Option<(Value, &'static str)>> {
        match &self.kind {
            WitnessKind::Expr(_) => Ok(None),
            WitnessKind::PartialSumQuotient { .. } => {
                Ok(Some((ctx.from_i64(-1), "-1 identically")))
            }
            WitnessKind::TailSumQuotient { m, .. } => {
                let mut acc = ctx.zero();
                for j in (n + m + 1)..(n + 2 * m) {
                    let term = self.a.eval(j, ctx)?;
                    acc = ctx.add(&acc, &term)?;
                }
                let denom = self.a.eval(n + m, ctx)?;
                let extra = ctx.div_at(&acc, &denom, n)?;
                let value = ctx.add(&ctx.one(), &extra)?;
                Ok(Some((value, "1 + (a(n+m+1)+…+a(n+2m-1))/a(n+m)")))
            }
            WitnessKind::WeightedTailSum { c, .. } => {
                Ok(Some((c.eval(n + 1, ctx)?, "c(n+1) identically")))
            }
            WitnessKind::WeightedPartialSum { c, .. } => {
                let cv = c.eval(n + 1, ctx)?;
                Ok(Some((ctx.neg(&cv)?, "-c(n+1) identically")))
            }
        }
    }

    /// Maximum |observed margin − predicted margin| over the window, where
    /// the observed margin is `q(n)·a(n)/a(n+m) − q(n+m)` with this witness's
    /// step m. `None` for user witnesses (no construction identity).
    pub fn identity_residual(
        &self,
        window: TestWindow,
        ctx: &NumericContext,
    ) -> Result<Option<IdentityReport>> {
        let m = self.step();
        let mut max_residual: Option<Value> = None;
        let mut description = "";
        for n in window.iter() {
            let predicted = match self.expected_margin(n, ctx)? {
                Some((value, desc)) => {
                    description = desc;
                    value
                }
                None => return Ok(None),
            };
            let qn = self.q(n, ctx)?;
            let qnm = self.q(n + m, ctx)?;
            let ratio = self.a.ratio(n, m, ctx)?;
            let observed = ctx.sub(&ctx.mul(&qn, &ratio)?, &qnm)?;
            let residual = ctx.abs(&ctx.sub(&observed, &predicted)?)?;
            max_residual = Some(match max_residual {
                Some(prev) => ctx.max(&prev, &residual)?,
                None => residual,
            });
        }
        Ok(Some(IdentityReport {
            max_residual: max_residual.expect("window is nonempty"),
            predicted: description.to_string(),
        }))
    }

    /// Streaming Σ 1/q(j) evaluator on hardware doubles, for block probes.
    pub fn reciprocals_from(&self, start: u64) -> Result<ReciprocalIter<'_>> {
        if start == 0 {
            return Err(Error::Precondition("probe start must be at least 1".into()));
        }
        let mut iter = ReciprocalIter {
            witness: self,
            next: 1,
            acc: 0.0,
        };
        // Advance the running prefix to just before `start`.
        while iter.next < start {
            iter.advance_acc();
            iter.next += 1;
        }
        Ok(iter)
    }
}

/// Result of verifying a construction identity on a window.
#[derive(Debug, Clone)]
pub struct IdentityReport {
    /// max over the window of |observed margin − predicted margin|.
    pub max_residual: Value,
    /// What the construction predicts the margin to be.
    pub predicted: String,
}

/// Iterator producing (j, 1/q(j)) on hardware doubles in ascending j.
pub struct ReciprocalIter<'w> {
    witness: &'w WitnessSequence,
    next: u64,
    /// Running prefix: P(j−1), W(j−1), or T(j−1) depending on the kind.
    acc: f64,
}

impl ReciprocalIter<'_> {
    fn advance_acc(&mut self) {
        let j = self.next;
        match &self.witness.kind {
            WitnessKind::Expr(_) => {}
            WitnessKind::PartialSumQuotient { sums } => {
                self.acc += sums.term_f64(j);
            }
            WitnessKind::TailSumQuotient { shifted, .. } => {
                self.acc += shifted.term_f64(j);
            }
            WitnessKind::WeightedTailSum { products, .. }
            | WitnessKind::WeightedPartialSum { products, .. } => {
                self.acc += products.term_f64(j);
            }
        }
    }

    /// The next (index, 1/q(index)) pair; NaN flags evaluation trouble.
    pub fn next_recip(&mut self) -> (u64, f64) {
        let j = self.next;
        self.advance_acc();
        self.next += 1;
        let recip = match &self.witness.kind {
            WitnessKind::Expr(spec) => 1.0 / spec.eval_f64(j),
            WitnessKind::PartialSumQuotient { .. } => {
                self.witness.a.eval_f64(j) / self.acc
            }
            WitnessKind::TailSumQuotient { s_m, .. } => {
                let numer = s_m.to_f64_lossy() - self.acc;
                self.witness.a.eval_f64(j) / numer
            }
            WitnessKind::WeightedTailSum { s, .. } => {
                let numer = s.value.to_f64_lossy() - self.acc;
                self.witness.a.eval_f64(j) / numer
            }
            WitnessKind::WeightedPartialSum { .. } => {
                self.witness.a.eval_f64(j) / self.acc
            }
        };
        (j, recip)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::NumericContext;
    use crate::seq::partial_sum;
    use std::cmp::Ordering;

    fn window(a: u64, b: u64) -> TestWindow {
        TestWindow::new(a, b).unwrap()
    }

    #[test]
    fn div_witness_hand_values() {
        let ctx = NumericContext::exact();
        let w = div_witness(SequenceSpec::parse("1/n").unwrap());
        assert_eq!(w.q(1, &ctx).unwrap().render(), "1");
        assert_eq!(w.q(2, &ctx).unwrap().render(), "3");
        assert_eq!(w.q(3, &ctx).unwrap().render(), "11/2");
        assert_eq!(w.provenance(), Provenance::PartialSumQuotient);
    }

    #[test]
    fn div_witness_identity_is_exactly_minus_one() {
        let ctx = NumericContext::exact();
        let w = div_witness(SequenceSpec::parse("1/n").unwrap());
        let report = w.identity_residual(window(1, 50), &ctx).unwrap().unwrap();
        assert_eq!(report.max_residual.render(), "0");
        assert!(report.predicted.contains("-1"));
    }

    #[test]
    fn verify_identity_signs_expected_value_by_provenance() {
        let ctx = NumericContext::exact();
        let c = SequenceSpec::one();
        // Partial-sum witness: margin ≡ −c(n+1), residual 0.
        let a = SequenceSpec::parse("1/n").unwrap();
        let q = div_witness(a.clone());
        let r = verify_witness_identity(&a, &c, &q, window(1, 50), &ctx).unwrap();
        assert_eq!(r.render(), "0");
        // Tail-sum witness: margin ≡ +c(n+1), residual 0 for any constant S.
        let g = SequenceSpec::parse("1/2^n").unwrap();
        let qe = weighted_conv_witness(g.clone(), c.clone(), SumConstant::user(ctx.from_u64(7)));
        let r = verify_witness_identity(&g, &c, &qe, window(1, 40), &ctx).unwrap();
        assert_eq!(r.render(), "0");
        // A user witness is measured against +c(n+1) and misses it here.
        let qu = expr_witness(SequenceSpec::parse("n").unwrap(), a.clone());
        let r = verify_witness_identity(&a, &c, &qu, window(1, 10), &ctx).unwrap();
        assert!(ctx.is_positive(&r));
    }

    #[test]
    fn div_witness_q_times_a_is_the_partial_sum_bit_for_bit() {
        for ctx in [NumericContext::exact(), NumericContext::float_default()] {
            let a = SequenceSpec::parse("1/n").unwrap();
            let w = div_witness(a.clone());
            for n in [1u64, 5, 100] {
                let lhs = w.q_times_a(n, &ctx).unwrap();
                let rhs = partial_sum(&a, n, &ctx).unwrap();
                assert_eq!(lhs.render(), rhs.render(), "n = {n}");
            }
        }
    }

    #[test]
    fn conv_witness_geometric_m1() {
        let ctx = NumericContext::exact();
        let a = SequenceSpec::parse("1/2^n").unwrap();
        let s = SumConstant::user(ctx.one());
        let w = conv_witness(a, 1, s, &ctx).unwrap();
        // q ≡ 1 and the margin identity gives exactly 1 at m = 1.
        for n in 1..=20 {
            assert_eq!(w.q(n, &ctx).unwrap().render(), "1");
        }
        for n in [1u64, 3, 10] {
            let (margin, _) = w.expected_margin(n, &ctx).unwrap().unwrap();
            assert_eq!(margin.render(), "1");
        }
        let report = w.identity_residual(window(1, 20), &ctx).unwrap().unwrap();
        assert_eq!(report.max_residual.render(), "0");
    }

    #[test]
    fn conv_witness_geometric_m2() {
        let ctx = NumericContext::exact();
        let a = SequenceSpec::parse("1/2^n").unwrap();
        let s = SumConstant::user(ctx.one());
        let w = conv_witness(a, 2, s, &ctx).unwrap();
        // S_2 = 1/2 leads to q ≡ 1/2; the 2-step margin is exactly 3/2.
        for n in 1..=15 {
            assert_eq!(w.q(n, &ctx).unwrap().render(), "1/2");
        }
        let (margin, _) = w.expected_margin(4, &ctx).unwrap().unwrap();
        assert_eq!(margin.render(), "3/2");
        let report = w.identity_residual(window(1, 15), &ctx).unwrap().unwrap();
        assert_eq!(report.max_residual.render(), "0");
        assert_eq!(w.step(), 2);
    }

    #[test]
    fn conv_witness_check_value_at_least_one() {
        let ctx = NumericContext::exact();
        for m in 1..=4u64 {
            let a = SequenceSpec::parse("1/2^n").unwrap();
            let w = conv_witness(a, m, SumConstant::user(ctx.one()), &ctx).unwrap();
            for n in 1..=10 {
                let (margin, _) = w.expected_margin(n, &ctx).unwrap().unwrap();
                assert!(
                    ctx.ge_tol(&margin, &ctx.one()).unwrap(),
                    "m = {m}, n = {n}: margin {}",
                    margin.render()
                );
                if m == 1 {
                    assert_eq!(ctx.cmp(&margin, &ctx.one()).unwrap(), Ordering::Equal);
                } else {
                    assert_eq!(ctx.cmp(&margin, &ctx.one()).unwrap(), Ordering::Greater);
                }
            }
        }
    }

    #[test]
    fn conv_witness_underestimated_sum_fails_positivity() {
        let ctx = NumericContext::exact();
        let a = SequenceSpec::parse("1/2^n").unwrap();
        let s = SumConstant::user(ctx.parse_number("0.9").unwrap());
        let w = conv_witness(a, 1, s, &ctx).unwrap();
        // q(n) = (0.9 − (1 − 2^−n))/2^−n goes nonpositive once 2^−n ≤ 0.1.
        match w.validate_positive(window(1, 10), &ctx).unwrap_err() {
            Error::NonpositiveWitness { n, detail, .. } => {
                assert_eq!(n, 4);
                assert!(detail.contains("underestimates"));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn weighted_conv_margin_is_c_for_any_sum_constant() {
        let ctx = NumericContext::exact();
        let a = SequenceSpec::parse("1/2^n").unwrap();
        let c = SequenceSpec::one();
        // Correct sum S = 1.
        let w = weighted_conv_witness(a.clone(), c.clone(), SumConstant::user(ctx.one()));
        for n in 1..=10 {
            assert_eq!(w.q(n, &ctx).unwrap().render(), "1");
        }
        let report = w.identity_residual(window(1, 10), &ctx).unwrap().unwrap();
        assert_eq!(report.max_residual.render(), "0");

        // Any larger constant: q changes, the margin identity does not.
        let w7 = weighted_conv_witness(a, c, SumConstant::user(ctx.from_u64(7)));
        assert_eq!(w7.q(1, &ctx).unwrap().render(), "13");
        let report = w7.identity_residual(window(1, 10), &ctx).unwrap().unwrap();
        assert_eq!(report.max_residual.render(), "0");
    }

    #[test]
    fn weighted_div_witness_hand_values() {
        let ctx = NumericContext::exact();
        // a = 1/n, c ≡ 1: q(n) = n·H_n.
        let w = weighted_div_witness(SequenceSpec::parse("1/n").unwrap(), SequenceSpec::one());
        assert_eq!(w.q(1, &ctx).unwrap().render(), "1"); // q(1) = c(1)
        assert_eq!(w.q(2, &ctx).unwrap().render(), "3");
        assert_eq!(w.q(3, &ctx).unwrap().render(), "11/2");
        let report = w.identity_residual(window(1, 30), &ctx).unwrap().unwrap();
        assert_eq!(report.max_residual.render(), "0");
        assert!(report.predicted.contains("-c(n+1)"));

        // a = 1/2^n, c ≡ 1: q(n) = 2^n − 1.
        let w = weighted_div_witness(SequenceSpec::parse("1/2^n").unwrap(), SequenceSpec::one());
        assert_eq!(w.q(5, &ctx).unwrap().render(), "31");
    }

    #[test]
    fn weighted_div_q1_equals_c1_generally() {
        let ctx = NumericContext::exact();
        let c = SequenceSpec::parse("1/2 + 1/n").unwrap();
        let w = weighted_div_witness(SequenceSpec::parse("1/n^2").unwrap(), c.clone());
        let q1 = w.q(1, &ctx).unwrap();
        let c1 = c.eval(1, &ctx).unwrap();
        assert_eq!(q1.render(), c1.render());
    }

    #[test]
    fn expr_witness_positivity_enforced() {
        let ctx = NumericContext::exact();
        let q = SequenceSpec::parse("n - 3").unwrap();
        let w = expr_witness(q, SequenceSpec::parse("1/n").unwrap());
        assert_eq!(w.q(5, &ctx).unwrap().render(), "2");
        assert!(matches!(
            w.q(3, &ctx),
            Err(Error::NonpositiveWitness { n: 3, .. })
        ));
        assert!(matches!(
            w.q(2, &ctx),
            Err(Error::NonpositiveWitness { n: 2, .. })
        ));
        // User witnesses have no construction identity.
        assert!(w
            .identity_residual(window(4, 10), &ctx)
            .unwrap()
            .is_none());
    }

    #[test]
    fn conv_witness_rejects_m_zero_and_tiny_sum() {
        let ctx = NumericContext::exact();
        let a = SequenceSpec::parse("1/2^n").unwrap();
        assert!(matches!(
            conv_witness(a.clone(), 0, SumConstant::user(ctx.one()), &ctx),
            Err(Error::Precondition(_))
        ));
        // S smaller than the head Σ_{i<m} a_i leaves S_m ≤ 0 at build time.
        let tiny = SumConstant::user(ctx.parse_number("0.4").unwrap());
        assert!(matches!(
            conv_witness(a, 2, tiny, &ctx),
            Err(Error::SumNotCertified(_))
        ));
    }

    #[test]
    fn reciprocal_iter_matches_hand_values() {
        let w = div_witness(SequenceSpec::parse("1/n").unwrap());
        let mut iter = w.reciprocals_from(1).unwrap();
        let (j1, r1) = iter.next_recip();
        assert_eq!(j1, 1);
        assert!((r1 - 1.0).abs() < 1e-12);
        let (_, r2) = iter.next_recip();
        assert!((r2 - 1.0 / 3.0).abs() < 1e-12);
        let (_, r3) = iter.next_recip();
        assert!((r3 - 2.0 / 11.0).abs() < 1e-12);

        // Starting mid-stream reproduces the same values.
        let mut iter = w.reciprocals_from(3).unwrap();
        let (j, r) = iter.next_recip();
        assert_eq!(j, 3);
        assert!((r - 2.0 / 11.0).abs() < 1e-12);
    }

    #[test]
    fn float_mode_constructions_work() {
        let ctx = NumericContext::float_default();
        let a = SequenceSpec::parse("1/((n+1)*ln(n+1))").unwrap();
        let w = div_witness(a);
        let q5 = w.q(5, &ctx).unwrap();
        assert!(ctx.is_positive(&q5));
        let report = w.identity_residual(window(1, 30), &ctx).unwrap().unwrap();
        let tol = ctx.parse_number("1e-40").unwrap();
        assert!(
            ctx.cmp(&report.max_residual, &tol).unwrap() == Ordering::Less,
            "residual {}",
            report.max_residual.render()
        );
    }
}
