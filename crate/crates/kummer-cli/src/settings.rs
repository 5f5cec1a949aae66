//! Layered runtime configuration.
//!
//! Precedence, highest first: command-line flags, `KUMMER_*` environment
//! variables, the TOML config file (`--config` or `KUMMER_CONFIG`), builtin
//! defaults. The environment is injected as a lookup closure so the layering
//! is unit-testable without touching the process environment.

use std::path::{Path, PathBuf};

use serde::Deserialize;

use kummer_core::numeric::{Mode, NumericContext};
use kummer_core::seq::TestWindow;
use kummer_core::{Error, Result};

pub const DEFAULT_DIGITS: u32 = 50;
pub const DEFAULT_EPSILON: &str = "1e-30";

/// Values supplied on the command line (highest-precedence layer).
#[derive(Debug, Default, Clone)]
pub struct CliOverrides {
    pub mode: Option<String>,
    pub digits: Option<u32>,
    pub epsilon: Option<String>,
    pub window: Option<String>,
    pub corpus: Option<PathBuf>,
}

/// The config-file layer; every key optional.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileSettings {
    mode: Option<String>,
    digits: Option<u32>,
    epsilon: Option<String>,
    window: Option<String>,
    corpus: Option<PathBuf>,
}

/// Fully resolved settings shared by every subcommand.
#[derive(Debug, Clone)]
pub struct Settings {
    pub mode: Mode,
    pub digits: u32,
    pub epsilon: String,
    /// Parsed window override; `None` lets each subcommand use its default.
    pub window: Option<TestWindow>,
    /// Corpus file override; `None` means the builtin corpus.
    pub corpus: Option<PathBuf>,
}

impl Settings {
    /// Numeric context matching the resolved mode.
    pub fn context(&self) -> Result<NumericContext> {
        match self.mode {
            Mode::Exact => Ok(NumericContext::exact()),
            Mode::Float => NumericContext::float(self.digits, &self.epsilon),
        }
    }

    /// Window to use: the resolved override, or the subcommand default.
    pub fn window_or(&self, default_start: u64, default_end: u64) -> Result<TestWindow> {
        match self.window {
            Some(w) => Ok(w),
            None => TestWindow::new(default_start, default_end),
        }
    }
}

fn parse_mode(text: &str) -> Result<Mode> {
    match text {
        "exact" => Ok(Mode::Exact),
        "float" => Ok(Mode::Float),
        other => Err(Error::Config(format!(
            "unknown mode `{other}` (expected exact or float)"
        ))),
    }
}

/// Resolve the three layers into [`Settings`]. `env` looks up environment
/// variables by full name (`KUMMER_MODE`, …); `config_path` comes from
/// `--config`, falling back to `KUMMER_CONFIG`.
pub fn resolve(
    cli: &CliOverrides,
    env: &dyn Fn(&str) -> Option<String>,
    config_path: Option<&Path>,
) -> Result<Settings> {
    let env_path = env("KUMMER_CONFIG").map(PathBuf::from);
    let path = config_path.or(env_path.as_deref());
    let file = match path {
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(|e| {
                Error::Config(format!("cannot read config file {}: {e}", p.display()))
            })?;
            toml::from_str::<FileSettings>(&text)
                .map_err(|e| Error::Config(format!("config file {}: {e}", p.display())))?
        }
        None => FileSettings::default(),
    };

    let mode = match cli
        .mode
        .clone()
        .or_else(|| env("KUMMER_MODE"))
        .or(file.mode)
    {
        Some(text) => parse_mode(&text)?,
        None => Mode::Exact,
    };

    let digits = match cli.digits {
        Some(d) => d,
        None => match env("KUMMER_DIGITS") {
            Some(text) => text.parse::<u32>().map_err(|_| {
                Error::Config(format!("KUMMER_DIGITS `{text}` is not a whole number"))
            })?,
            None => file.digits.unwrap_or(DEFAULT_DIGITS),
        },
    };
    if digits == 0 {
        return Err(Error::Config("digits must be at least 1".into()));
    }

    let epsilon = cli
        .epsilon
        .clone()
        .or_else(|| env("KUMMER_EPSILON"))
        .or(file.epsilon)
        .unwrap_or_else(|| DEFAULT_EPSILON.to_string());

    let window = match cli
        .window
        .clone()
        .or_else(|| env("KUMMER_WINDOW"))
        .or(file.window)
    {
        Some(text) => Some(TestWindow::parse(&text)?),
        None => None,
    };

    let corpus = cli
        .corpus
        .clone()
        .or_else(|| env("KUMMER_CORPUS").map(PathBuf::from))
        .or(file.corpus);

    // Validate the float parameters eagerly so a bad --epsilon fails as a
    // config error before any work happens, regardless of mode.
    NumericContext::float(digits, &epsilon)
        .map_err(|e| Error::Config(format!("invalid precision settings: {e}")))?;

    Ok(Settings {
        mode,
        digits,
        epsilon,
        window,
        corpus,
    })
}
