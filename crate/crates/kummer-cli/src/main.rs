//! `kummer`: window-checked convergence and divergence criteria for positive
//! series, with constructive witness sequences and a labeled benchmark
//! corpus. Reports are JSON (schema-versioned) and byte-identical across
//! runs for the same request.

use clap::error::ErrorKind;
use clap::{Parser, Subcommand};
use std::path::PathBuf;
use std::process::ExitCode;

mod run;
mod settings;

use run::{AnalyzeArgs, CorpusArgs, WitnessArgs};
use settings::CliOverrides;

#[derive(Debug, Parser)]
#[command(name = "kummer", version)]
#[command(about = "Kummer-type summability criteria for positive series")]
struct Cli {
    /// TOML settings file (overridden by KUMMER_* variables and flags).
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,

    /// Numeric mode: exact (rational arithmetic) or float (high precision).
    #[arg(long, global = true)]
    mode: Option<String>,

    /// Float-mode precision in decimal digits.
    #[arg(long, global = true)]
    digits: Option<u32>,

    /// Float-mode comparison tolerance, e.g. 1e-30.
    #[arg(long, global = true)]
    epsilon: Option<String>,

    /// Inclusive index window, as start:end.
    #[arg(long, global = true)]
    window: Option<String>,

    /// Corpus TOML file; default is the builtin corpus.
    #[arg(long, global = true, value_name = "FILE")]
    corpus: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run one test on a series and emit a JSON verdict report
    Analyze {
        /// Term expression a(n) of the series Σ a(n).
        #[arg(long)]
        a: String,

        /// Weight expression c(n); default is the constant 1.
        #[arg(long)]
        c: Option<String>,

        /// Test to run: raabe | bertrand | gauss | kummer-step | kummer-div
        /// | weighted-conv | weighted-div | condensation | olivier.
        #[arg(long)]
        test: String,

        /// Witness sequence: `auto` to construct one from the test's proof,
        /// or an expression q(n).
        #[arg(long, default_value = "auto")]
        witness: String,

        /// Step size m for the m-step Kummer checks.
        #[arg(long, default_value_t = 1)]
        m: u64,

        /// Constant margin c for kummer-step.
        #[arg(long, default_value = "1")]
        margin: String,

        /// Sum constant S for tail-sum witness constructions; without it the
        /// catalog or the partial-sum oracle supplies a certified value.
        #[arg(long)]
        sum: Option<String>,

        /// Branch for bertrand/gauss: conv | div.
        #[arg(long, default_value = "conv")]
        side: String,

        /// Slack sequence θ(n) for bertrand/gauss.
        #[arg(long)]
        theta: Option<String>,

        /// Gauss μ constant.
        #[arg(long, default_value = "1")]
        mu: String,

        /// Gauss γ exponent (rational, ≥ 1).
        #[arg(long, default_value = "1")]
        gamma: String,

        /// Evidence that the divergence-side reciprocal series diverges:
        /// catalog | asserted | probe.
        #[arg(long, value_name = "SOURCE")]
        assert_qrecip_divergent: Option<String>,

        /// Write the margin trace (CSV: n,value,bound) to this file.
        #[arg(long, value_name = "FILE")]
        emit_trace: Option<PathBuf>,
    },

    /// Construct a witness sequence, sample it, and verify its identity
    Witness {
        /// Term expression a(n).
        #[arg(long)]
        a: String,

        /// Weight expression c(n) for the weighted constructions.
        #[arg(long)]
        c: Option<String>,

        /// Construction: conv | div | weighted-conv | weighted-div.
        #[arg(long)]
        kind: String,

        /// Step size m for the conv (m-step tail-sum) construction.
        #[arg(long, default_value_t = 1)]
        m: u64,

        /// Sum constant S; without it the catalog or oracle supplies one.
        #[arg(long)]
        sum: Option<String>,

        /// Number of leading q(n) samples included in the report.
        #[arg(long, default_value_t = 8)]
        sample: u64,

        /// Write the witness trace (CSV: n,q,margin) to this file.
        #[arg(long, value_name = "FILE")]
        emit_trace: Option<PathBuf>,
    },

    /// Sweep a labeled corpus against the test battery
    Corpus {
        /// Comma-separated test list, or `default` (raabe, weighted-conv,
        /// weighted-div) or `all`.
        #[arg(long, default_value = "default")]
        tests: String,

        /// Output format: json | csv.
        #[arg(long, default_value = "json")]
        format: String,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // Help/version are not usage errors; everything else exits 1.
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    print!("{e}");
                    ExitCode::SUCCESS
                }
                _ => {
                    eprint!("{e}");
                    ExitCode::from(1)
                }
            };
        }
    };

    let overrides = CliOverrides {
        mode: cli.mode.clone(),
        digits: cli.digits,
        epsilon: cli.epsilon.clone(),
        window: cli.window.clone(),
        corpus: cli.corpus.clone(),
    };
    let env = |key: &str| std::env::var(key).ok();
    let settings = match settings::resolve(&overrides, &env, cli.config.as_deref()) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("kummer: {e}");
            return ExitCode::from(1);
        }
    };

    let result = match cli.command {
        Command::Analyze {
            a,
            c,
            test,
            witness,
            m,
            margin,
            sum,
            side,
            theta,
            mu,
            gamma,
            assert_qrecip_divergent,
            emit_trace,
        } => run::cmd_analyze(
            &AnalyzeArgs {
                a,
                c,
                test,
                witness,
                m,
                margin,
                sum,
                side,
                theta,
                mu,
                gamma,
                assert_qrecip_divergent,
                emit_trace,
            },
            &settings,
        ),
        Command::Witness {
            a,
            c,
            kind,
            m,
            sum,
            sample,
            emit_trace,
        } => run::cmd_witness(
            &WitnessArgs {
                a,
                c,
                kind,
                m,
                sum,
                sample,
                emit_trace,
            },
            &settings,
        ),
        Command::Corpus { tests, format } => run::cmd_corpus(&CorpusArgs { tests, format }, &settings),
    };

    match result {
        Ok(out) => {
            print!("{}", out.stdout);
            if out.exit == 3 {
                eprintln!("kummer: corpus run found label contradictions");
            }
            ExitCode::from(out.exit as u8)
        }
        Err(e) => {
            eprintln!("kummer: {}", e.message());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
