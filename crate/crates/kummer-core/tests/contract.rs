//! Cross-module contracts: probe guarantees on divergence witnesses, the
//! termwise domination shortcut against a brute-force oracle, and the
//! empirical window-stability regression for engine checks.

use kummer_core::engine::TrendDirection;
use kummer_core::{
    cauchy_block_probe, div_witness, domination_index, kummer_div_step_check, weighted_conv_check,
    weighted_conv_witness, CheckStatus, Corpus, Evidence, Label, NumericContext, SequenceSpec,
    SumConstant, TestWindow,
};

fn window(a: u64, b: u64) -> TestWindow {
    TestWindow::new(a, b).unwrap()
}

#[test]
fn probe_finds_blocks_from_sampled_starts_for_polynomial_divergence() {
    // For 1/n and 1/sqrt(n) the divergence witness satisfies
    // Σ1/q = Σ P(1)/P(n)·(something ≥ 1/n-ish): blocks exist quickly from
    // any start. Sampled starts stand in for "every start ≤ 10³".
    for id in ["harmonic", "p-half"] {
        let entry = Corpus::builtin().get(id).unwrap();
        let q = div_witness(entry.series.clone());
        for start in [1u64, 9, 97, 501, 1000] {
            let block = cauchy_block_probe(&q, start, 1_000_000)
                .unwrap()
                .unwrap_or_else(|| panic!("{id}: no block from start {start}"));
            assert_eq!(block.start, start, "{id}");
            assert!(block.sum > 0.5, "{id}");
            assert!(block.end <= 1_000_000, "{id}");
        }
    }
}

#[test]
fn probe_documents_its_limit_on_log_density_series() {
    // Blocks always exist in theory, but for 1/(n ln n ln ln n) the block
    // from start 1000 ends far beyond any feasible bound; the probe reports
    // not-found rather than pretending.
    let entry = Corpus::builtin().get("n-logn-loglogn").unwrap();
    let q = div_witness(entry.series.clone());
    assert!(cauchy_block_probe(&q, 1000, 1_000_000).unwrap().is_none());
    // From the beginning the mass is still accessible.
    assert!(cauchy_block_probe(&q, 1, 1_000_000).unwrap().is_some());
}

#[test]
fn termwise_domination_returns_m_and_matches_brute_force() {
    let ctx = NumericContext::float_default();
    // Pairs (a, c) with c(n) ≤ 1 termwise and Σc·a divergent.
    let pairs = [
        ("1/sqrt(n)", "1/sqrt(n)"), // c·a = 1/n
        ("1/n", "1"),
        ("1/n", "(n+1)/(2*n)"), // c ≤ 1, c·a ~ 1/(2n)
    ];
    for (a_text, c_text) in pairs {
        let a = SequenceSpec::parse(a_text).unwrap();
        let c = SequenceSpec::parse(c_text).unwrap();
        for m in [1u64, 5, 17] {
            let got = domination_index(&a, &c, m, 10_000, &ctx).unwrap();
            assert_eq!(got, Some(m), "a = {a_text}, c = {c_text}, m = {m}");
            assert_eq!(
                got,
                brute_force_domination(&a, &c, m, 10_000, &ctx),
                "oracle disagrees for a = {a_text}, c = {c_text}, m = {m}"
            );
        }
    }
}

/// Independent accumulation oracle: smallest r ≥ m with
/// a(m)+…+a(r) ≥ c(m)a(m)+…+c(r)a(r).
fn brute_force_domination(
    a: &SequenceSpec,
    c: &SequenceSpec,
    m: u64,
    bound: u64,
    ctx: &NumericContext,
) -> Option<u64> {
    let mut lhs = ctx.zero();
    let mut rhs = ctx.zero();
    for r in m..=bound {
        let an = a.eval_any(r, ctx).unwrap();
        let cn = c.eval_any(r, ctx).unwrap();
        lhs = ctx.add(&lhs, &an).unwrap();
        rhs = ctx.add(&rhs, &ctx.mul(&cn, &an).unwrap()).unwrap();
        if ctx.ge_tol(&lhs, &rhs).unwrap() {
            return Some(r);
        }
    }
    None
}

#[test]
fn holds_with_stable_trend_extends_to_doubled_windows() {
    // Empirical regression: when a check holds on [N, N+W] and the slack
    // trend is not degrading, doubling the window must not break it.
    let exact = NumericContext::exact();
    let float = NumericContext::float_default();

    for entry in Corpus::builtin().entries() {
        match entry.label {
            Label::Diverges => {
                let q = div_witness(entry.series.clone());
                let ev = Evidence::CatalogLabel {
                    id: entry.id.clone(),
                };
                let short = kummer_div_step_check(
                    &entry.series,
                    &q,
                    1,
                    window(1, 100),
                    &float,
                    Some(&ev),
                )
                .unwrap();
                assert_eq!(short.status, CheckStatus::HoldsOnWindow, "{}", entry.id);
                if short.trend.as_ref().unwrap().direction != TrendDirection::Degrading {
                    let long = kummer_div_step_check(
                        &entry.series,
                        &q,
                        1,
                        window(1, 200),
                        &float,
                        Some(&ev),
                    )
                    .unwrap();
                    assert_eq!(long.status, CheckStatus::HoldsOnWindow, "{}", entry.id);
                }
            }
            Label::Converges => {
                // Only entries with a certified catalog sum construct a
                // tail-sum witness without oracle help.
                let Some(sum) = &entry.exact_sum else { continue };
                let c = SequenceSpec::one();
                let s = SumConstant::catalog(&entry.id, exact.from_rational(sum));
                let q = weighted_conv_witness(entry.series.clone(), c.clone(), s);
                let short =
                    weighted_conv_check(&entry.series, &c, &q, window(1, 100), &exact).unwrap();
                assert_eq!(short.status, CheckStatus::HoldsOnWindow, "{}", entry.id);
                if short.trend.as_ref().unwrap().direction != TrendDirection::Degrading {
                    let long =
                        weighted_conv_check(&entry.series, &c, &q, window(1, 200), &exact).unwrap();
                    assert_eq!(long.status, CheckStatus::HoldsOnWindow, "{}", entry.id);
                }
            }
        }
    }
}

#[test]
fn corpus_file_round_trips_through_toml() {
    let text = std::fs::read_to_string(concat!(
        env!("CARGO_MANIFEST_DIR"),
        "/corpus/default.toml"
    ))
    .unwrap();
    let parsed = Corpus::from_toml_str(&text).unwrap();
    assert_eq!(parsed.len(), Corpus::builtin().len());
    for (a, b) in parsed.entries().iter().zip(Corpus::builtin().entries()) {
        assert_eq!(a.id, b.id);
        assert_eq!(a.label, b.label);
        assert_eq!(a.exact_sum, b.exact_sum);
    }
}
