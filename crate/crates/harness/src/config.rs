use std::fmt;
use std::path::PathBuf;

use serde::Serialize;
use wittcheck_core::extension::ExtensionSpec;
use wittcheck_core::universal::ResourceLimits;

use crate::specfile;

pub const DEFAULT_PRECISION: u32 = 32;
pub const DEFAULT_TRIALS: u64 = 200;
pub const DEFAULT_M: usize = 1;

/// A configuration problem; maps to exit code 2.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConfigError(pub String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "configuration error: {}", self.0)
    }
}

impl std::error::Error for ConfigError {}

/// Suites in execution order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    Symbolic,
    TraceLemmas,
    Cascade,
    Proposition,
    H1,
    NegativeControl,
}

impl Suite {
    pub const ALL: [Suite; 6] =
        [Suite::Symbolic, Suite::TraceLemmas, Suite::Cascade, Suite::Proposition, Suite::H1, Suite::NegativeControl];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Symbolic => "symbolic",
            Suite::TraceLemmas => "trace-lemmas",
            Suite::Cascade => "cascade",
            Suite::Proposition => "proposition",
            Suite::H1 => "h1",
            Suite::NegativeControl => "negative-control",
        }
    }

    pub fn parse(s: &str) -> Result<Suite, ConfigError> {
        Suite::ALL.into_iter().find(|x| x.name() == s).ok_or_else(|| ConfigError(format!("unknown suite {s:?}")))
    }

    /// Comma-separated list, or `all`.
    pub fn parse_list(s: &str) -> Result<Vec<Suite>, ConfigError> {
        if s.trim() == "all" {
            return Ok(Suite::ALL.to_vec());
        }
        let mut out = s.split(',').map(|x| Suite::parse(x.trim())).collect::<Result<Vec<_>, _>>()?;
        out.sort();
        out.dedup();
        Ok(out)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Text,
    Json,
    Csv,
}

impl Format {
    pub fn parse(s: &str) -> Result<Format, ConfigError> {
        match s {
            "text" => Ok(Format::Text),
            "json" => Ok(Format::Json),
            "csv" => Ok(Format::Csv),
            other => Err(ConfigError(format!("unknown format {other:?}"))),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Format::Text => "text",
            Format::Json => "json",
            Format::Csv => "csv",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ExtensionSource {
    Builtin { name: String, p: Option<u64> },
    File(PathBuf),
}

impl fmt::Display for ExtensionSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtensionSource::Builtin { name, p: Some(p) } => write!(f, "{name} (p = {p})"),
            ExtensionSource::Builtin { name, p: None } => write!(f, "{name}"),
            ExtensionSource::File(path) => write!(f, "{}", path.display()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RunConfig {
    pub extension: ExtensionSource,
    /// Overrides the precision of a spec file; defaults to 32.
    pub precision: Option<u32>,
    pub m: usize,
    pub trials: u64,
    pub seed: u64,
    pub suites: Vec<Suite>,
    pub format: Format,
    pub limits: ResourceLimits,
    /// Adds wall-clock timings to the report, which then stops being
    /// reproducible byte for byte.
    pub timings: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            extension: ExtensionSource::Builtin { name: "quadratic-gaussian".into(), p: None },
            precision: None,
            m: DEFAULT_M,
            trials: DEFAULT_TRIALS,
            seed: 0,
            suites: Suite::ALL.to_vec(),
            format: Format::Text,
            limits: ResourceLimits::default(),
            timings: false,
        }
    }
}

impl RunConfig {
    pub fn builtin(name: &str) -> Self {
        RunConfig { extension: ExtensionSource::Builtin { name: name.into(), p: None }, ..Default::default() }
    }

    /// The extension spec at the effective precision.
    pub fn resolve_spec(&self) -> Result<ExtensionSpec, ConfigError> {
        match &self.extension {
            ExtensionSource::Builtin { name, p } => {
                ExtensionSpec::builtin(name, *p, self.precision.unwrap_or(DEFAULT_PRECISION))
                    .map_err(|e| ConfigError(e.to_string()))
            }
            ExtensionSource::File(path) => {
                let spec = specfile::load_spec(path)?;
                Ok(match self.precision {
                    Some(n) => spec.with_precision(n),
                    None => spec,
                })
            }
        }
    }

    pub fn sorted_suites(&self) -> Vec<Suite> {
        let mut s = self.suites.clone();
        s.sort();
        s.dedup();
        s
    }
}
