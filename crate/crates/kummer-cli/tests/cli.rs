//! End-to-end tests of the `kummer` binary: exit codes, report shapes,
//! config layering, and byte-level determinism.

use std::io::Write;
use std::process::{Command, Output};

use serde_json::Value;

fn kummer() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_kummer"));
    // Tests control the environment layer explicitly.
    cmd.env_remove("KUMMER_MODE")
        .env_remove("KUMMER_DIGITS")
        .env_remove("KUMMER_EPSILON")
        .env_remove("KUMMER_WINDOW")
        .env_remove("KUMMER_CORPUS")
        .env_remove("KUMMER_CONFIG");
    cmd
}

fn run(args: &[&str]) -> Output {
    kummer().args(args).output().expect("binary runs")
}

fn stdout_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!(
            "stdout is not JSON ({e}): {}",
            String::from_utf8_lossy(&out.stdout)
        )
    })
}

fn stderr_text(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

#[test]
fn analyze_raabe_certifies_p_series() {
    let out = run(&[
        "analyze", "--a", "1/n^2", "--test", "raabe", "--c", "1", "--window", "2:10000",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr_text(&out));
    let v = stdout_json(&out);
    assert_eq!(v["conclusion"], "converges-certified-on-window");
    assert_eq!(v["schema"], 1);
    assert_eq!(v["request"]["mode"], "exact");
    assert_eq!(v["verdicts"][0]["name"], "raabe-convergence");
    assert_eq!(v["verdicts"][0]["verdict"]["status"], "holds-on-window");
}

#[test]
fn analyze_weighted_div_with_probe_certifies_divergence() {
    let out = run(&[
        "analyze",
        "--a",
        "1/n",
        "--test",
        "weighted-div",
        "--c",
        "1",
        "--witness",
        "auto",
        "--window",
        "1:1000",
        "--assert-qrecip-divergent",
        "probe",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr_text(&out));
    let v = stdout_json(&out);
    assert_eq!(v["conclusion"], "diverges-certified-on-window");
    // Partial-sum witness identity: the margin is −c ≡ −1 exactly.
    assert_eq!(v["verdicts"][0]["verdict"]["min_margin"], "-1");
    assert_eq!(v["verdicts"][0]["verdict"]["max_margin"], "-1");
    let consequences = v["verdicts"][0]["verdict"]["consequences"]
        .as_array()
        .expect("consequence list");
    assert!(
        consequences
            .iter()
            .any(|c| c.as_str().unwrap().contains("Σ a(n) diverges")),
        "missing divergence consequence: {consequences:?}"
    );
    let evidence = v["request"]["evidence"][0].as_str().unwrap();
    assert!(evidence.contains("block probe found 5 consecutive blocks"));
}

#[test]
fn analyze_maps_domain_errors_to_exit_2() {
    // a(n) = 1/(n−3) has a pole at n = 3, inside the window.
    let out = run(&["analyze", "--a", "1/(n-3)", "--test", "raabe", "--window", "3:100"]);
    assert_eq!(out.status.code(), Some(2));
    let err = stderr_text(&out);
    assert!(err.contains("n = 3"), "stderr: {err}");
}

#[test]
fn usage_errors_exit_1() {
    // Unknown test name.
    let out = run(&["analyze", "--a", "1/n", "--test", "frobnicate"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr_text(&out).contains("unknown test"));

    // Malformed expression (DSL syntax error).
    let out = run(&["analyze", "--a", "1/((n", "--test", "raabe"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr_text(&out).contains("syntax error"));

    // Missing required flag (clap-level).
    let out = run(&["analyze", "--test", "raabe"]);
    assert_eq!(out.status.code(), Some(1));

    // Bad window text (config-level).
    let out = run(&["analyze", "--a", "1/n", "--test", "raabe", "--window", "10"]);
    assert_eq!(out.status.code(), Some(1));

    // --witness on a test that builds its own comparison sequence.
    let out = run(&["analyze", "--a", "1/n", "--test", "raabe", "--witness", "n"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr_text(&out).contains("does not take a --witness"));
}

#[test]
fn help_exits_zero() {
    let out = run(&["--help"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).contains("analyze"));
}

#[test]
fn witness_div_matches_known_partial_sum_quotients() {
    let out = run(&["witness", "--a", "1/n", "--kind", "div"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr_text(&out));
    let v = stdout_json(&out);
    assert_eq!(v["witness"]["provenance"], "partial-sum-quotient");
    // q(1) = 1 and q(2) = P(2)/a(2) = (3/2)/(1/2) = 3, exactly.
    assert_eq!(v["sample"][0]["q"], "1");
    assert_eq!(v["sample"][1]["q"], "3");
    assert_eq!(v["identity"]["max_residual"], "0");
    assert_eq!(v["identity"]["predicted"], "-1 identically");
}

#[test]
fn witness_weighted_conv_geometric_is_constant_one() {
    let out = run(&[
        "witness", "--a", "1/2^n", "--c", "1", "--kind", "weighted-conv", "--sum", "1",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr_text(&out));
    let v = stdout_json(&out);
    for point in v["sample"].as_array().expect("sample") {
        assert_eq!(point["q"], "1");
    }
    assert_eq!(v["identity"]["max_residual"], "0");
    assert_eq!(v["witness"]["sum"]["value"], "1");
}

#[test]
fn witness_refuses_user_sum_for_divergent_series() {
    let out = run(&["witness", "--a", "1/n", "--kind", "weighted-conv", "--sum", "10"]);
    assert_eq!(out.status.code(), Some(2));
    let err = stderr_text(&out);
    assert!(err.contains("refusing user sum"), "stderr: {err}");
}

#[test]
fn corpus_default_run_is_clean() {
    let out = run(&["corpus", "--window", "1:120"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr_text(&out));
    let v = stdout_json(&out);
    assert_eq!(v["contradictions"], 0);
    // 12 builtin entries × 3 default tests.
    assert_eq!(v["rows"].as_array().unwrap().len(), 36);
}

#[test]
fn mislabeled_corpus_entry_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.toml");
    let mut f = std::fs::File::create(&path).unwrap();
    // Geometric series deliberately labeled divergent: the tail-sum witness
    // certifies convergence and contradicts the label.
    writeln!(
        f,
        "[[entry]]\n\
         id = \"mislabeled-geometric\"\n\
         expr = \"1/2^n\"\n\
         label = \"diverges\"\n\
         exact_sum = \"1\"\n\
         decreasing = true\n\
         note = \"deliberately wrong label for harness self-test\"\n"
    )
    .unwrap();
    drop(f);

    let out = run(&[
        "corpus",
        "--corpus",
        path.to_str().unwrap(),
        "--tests",
        "weighted-conv",
        "--window",
        "1:60",
    ]);
    assert_eq!(out.status.code(), Some(3), "{}", stderr_text(&out));
    let v = stdout_json(&out);
    assert_eq!(v["contradictions"], 1);
    assert_eq!(v["rows"][0]["agreement"], "contradicts");
    assert_eq!(v["rows"][0]["conclusion"], "converges-certified");
}

#[test]
fn corpus_csv_has_documented_header() {
    let out = run(&["corpus", "--format", "csv", "--window", "1:60", "--tests", "raabe"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr_text(&out));
    let text = String::from_utf8_lossy(&out.stdout).into_owned();
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "entry,test,status,conclusion,agreement,min_margin,max_margin,detail"
    );
    assert_eq!(lines.count(), 12);
}

#[test]
fn exact_reports_are_byte_identical_across_runs() {
    let args = [
        "corpus", "--mode", "exact", "--tests", "weighted-conv", "--window", "1:60",
    ];
    let first = run(&args);
    let second = run(&args);
    assert_eq!(first.status.code(), Some(0));
    assert_eq!(first.stdout, second.stdout);

    let args = [
        "analyze", "--a", "1/n^2", "--test", "raabe", "--window", "2:200",
    ];
    let first = run(&args);
    let second = run(&args);
    assert_eq!(first.stdout, second.stdout);
}

#[test]
fn config_file_env_and_flags_layer_correctly() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("kummer.toml");
    std::fs::write(&path, "mode = \"float\"\ndigits = 30\n").unwrap();
    let config = path.to_str().unwrap();
    let witness_args = ["witness", "--a", "1/n", "--kind", "div", "--window", "1:4"];

    // File layer alone.
    let out = kummer()
        .args(witness_args)
        .args(["--config", config])
        .output()
        .unwrap();
    let v = stdout_json(&out);
    assert_eq!(v["request"]["mode"], "float");
    assert_eq!(v["request"]["digits"], 30);

    // Environment overrides the file.
    let out = kummer()
        .args(witness_args)
        .args(["--config", config])
        .env("KUMMER_MODE", "exact")
        .output()
        .unwrap();
    let v = stdout_json(&out);
    assert_eq!(v["request"]["mode"], "exact");

    // Flags override the environment.
    let out = kummer()
        .args(witness_args)
        .args(["--config", config, "--mode", "float", "--digits", "40"])
        .env("KUMMER_MODE", "exact")
        .output()
        .unwrap();
    let v = stdout_json(&out);
    assert_eq!(v["request"]["mode"], "float");
    assert_eq!(v["request"]["digits"], 40);

    // KUMMER_CONFIG names the file when --config is absent.
    let out = kummer()
        .args(witness_args)
        .env("KUMMER_CONFIG", config)
        .output()
        .unwrap();
    let v = stdout_json(&out);
    assert_eq!(v["request"]["mode"], "float");
}

#[test]
fn env_window_applies_when_no_flag() {
    let out = kummer()
        .args(["witness", "--a", "1/n", "--kind", "div"])
        .env("KUMMER_WINDOW", "2:6")
        .output()
        .unwrap();
    let v = stdout_json(&out);
    assert_eq!(v["request"]["window"], "[2, 6]");
    assert_eq!(v["sample"].as_array().unwrap().len(), 5);
}

#[test]
fn trace_files_have_documented_shapes() {
    let dir = tempfile::tempdir().unwrap();

    let trace = dir.path().join("margin.csv");
    let out = run(&[
        "analyze",
        "--a",
        "1/2^n",
        "--test",
        "kummer-step",
        "--witness",
        "1",
        "--m",
        "2",
        "--margin",
        "3",
        "--window",
        "1:20",
        "--emit-trace",
        trace.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr_text(&out));
    let v = stdout_json(&out);
    assert_eq!(v["trace_file"], trace.to_str().unwrap());
    let text = std::fs::read_to_string(&trace).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "n,value,bound");
    assert_eq!(lines.len(), 21);
    // 2-step geometric margin is exactly 2² − 1 at every index.
    assert_eq!(lines[1], "1,3,3");

    let trace = dir.path().join("witness.csv");
    let out = run(&[
        "witness",
        "--a",
        "1/n",
        "--kind",
        "div",
        "--window",
        "1:10",
        "--emit-trace",
        trace.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr_text(&out));
    let text = std::fs::read_to_string(&trace).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "n,q,margin");
    assert_eq!(lines[1], "1,1,-1");
    assert_eq!(lines[2], "2,3,-1");
    assert_eq!(lines.len(), 11);
}

/// The CLI examples double as library-vs-binary consistency checks: the
/// Gauss equality case must report zero slack through the binary too.
#[test]
fn gauss_equality_case_round_trips_through_cli() {
    let out = run(&[
        "analyze",
        "--a",
        "1/n^3",
        "--test",
        "gauss",
        "--mu",
        "2",
        "--gamma",
        "2",
        "--theta",
        "3+1/n",
        "--window",
        "1:200",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr_text(&out));
    let v = stdout_json(&out);
    assert_eq!(v["conclusion"], "converges-certified-on-window");
    assert_eq!(v["verdicts"][0]["verdict"]["min_margin"], "0");
    assert_eq!(v["verdicts"][0]["verdict"]["max_margin"], "0");
}
