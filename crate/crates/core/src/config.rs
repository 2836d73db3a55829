//! CLI configuration: defaults shared with the service, optionally
//! overridden by a `key=value` file.

use std::path::{Path, PathBuf};

use crate::cluster::DEFAULT_ITERATIONS;
use crate::error::{Error, Result};
use crate::ngot::Variant;
use crate::pipeline::{DEFAULT_D, DEFAULT_N};
use crate::service::DEFAULT_PORT;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum OutputFormat {
    #[default]
    Json,
    Tsv,
}

impl std::str::FromStr for OutputFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "json" => Ok(OutputFormat::Json),
            "tsv" => Ok(OutputFormat::Tsv),
            other => Err(Error::param("format", format!("expected json or tsv, got {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CliConfig {
    pub data_dir: PathBuf,
    pub corpus: Option<String>,
    pub n: usize,
    pub d: usize,
    pub variant: Variant,
    pub iterations: usize,
    pub format: OutputFormat,
    pub port: u16,
}

impl Default for CliConfig {
    fn default() -> Self {
        Self {
            data_dir: PathBuf::from("data"),
            corpus: None,
            n: DEFAULT_N,
            d: DEFAULT_D,
            variant: Variant::Interval,
            iterations: DEFAULT_ITERATIONS,
            format: OutputFormat::Json,
            port: DEFAULT_PORT,
        }
    }
}

impl CliConfig {
    /// Applies `key=value` lines on top of the defaults. Blank lines and
    /// lines starting with `#` are ignored.
    pub fn parse(text: &str, source: &Path) -> Result<Self> {
        let mut cfg = CliConfig::default();
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let parse_err = |message: String| Error::Parse {
                file: source.to_path_buf(),
                line: idx + 1,
                message,
            };
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| parse_err("expected key=value".to_string()))?;
            let (key, value) = (key.trim(), value.trim());
            let number = |v: &str| v.parse::<usize>().map_err(|_| parse_err(format!("{key}: not a number: {v:?}")));
            match key {
                "data_dir" => cfg.data_dir = PathBuf::from(value),
                "corpus" => cfg.corpus = Some(value.to_string()),
                "n" => cfg.n = number(value)?,
                "d" => cfg.d = number(value)?,
                "iterations" => cfg.iterations = number(value)?,
                "variant" => cfg.variant = value.parse().map_err(|e: Error| parse_err(e.to_string()))?,
                "format" => cfg.format = value.parse().map_err(|e: Error| parse_err(e.to_string()))?,
                "port" => {
                    cfg.port = value
                        .parse()
                        .map_err(|_| parse_err(format!("port: not a port number: {value:?}")))?
                }
                other => return Err(parse_err(format!("unknown key {other:?}"))),
            }
        }
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?, path)
    }
}
