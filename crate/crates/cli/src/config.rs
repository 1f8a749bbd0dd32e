//! Optional TOML configuration. Every field mirrors a command-line flag;
//! flags always win over the file, and built-in defaults fill the rest.

use std::path::{Path, PathBuf};

use anyhow::Context;
use serde::Deserialize;

use crate::CliError;

#[derive(Debug, Default, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub corpus: Option<PathBuf>,
    pub seeds: Option<Vec<String>>,
    pub out: Option<PathBuf>,
    pub pool_depth: Option<usize>,
    #[serde(default)]
    pub crawl: CrawlSection,
    #[serde(default)]
    pub pagerank: PageRankSection,
    #[serde(default)]
    pub hits: HitsSection,
    #[serde(default)]
    pub dedup: DedupSection,
    #[serde(default)]
    pub search: SearchSection,
    #[serde(default)]
    pub eval: EvalSection,
}

#[derive(Debug, Default, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CrawlSection {
    pub max_depth: Option<usize>,
    pub max_docs: Option<usize>,
}

#[derive(Debug, Default, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PageRankSection {
    pub damping: Option<f64>,
    pub tolerance: Option<f64>,
    pub max_iterations: Option<usize>,
    pub variant: Option<String>,
}

#[derive(Debug, Default, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HitsSection {
    pub tolerance: Option<f64>,
    pub max_iterations: Option<usize>,
    pub root_size: Option<usize>,
    pub expand: Option<bool>,
}

#[derive(Debug, Default, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DedupSection {
    pub w: Option<usize>,
    pub threshold: Option<f64>,
}

#[derive(Debug, Default, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SearchSection {
    pub alpha: Option<f64>,
    pub limit: Option<usize>,
    pub tag: Option<String>,
}

#[derive(Debug, Default, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EvalSection {
    pub measures: Option<Vec<String>>,
    pub gain: Option<String>,
    pub discount: Option<String>,
}

impl FileConfig {
    pub fn load(path: Option<&Path>) -> Result<Self, CliError> {
        let Some(path) = path else {
            return Ok(FileConfig::default());
        };
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("cannot read config file {}", path.display()))
            .map_err(CliError::Data)?;
        toml::from_str(&text)
            .with_context(|| format!("config file {} is invalid", path.display()))
            .map_err(CliError::Data)
    }
}

/// Flag value if given, else config value, else the built-in default.
pub fn pick<T>(flag: Option<T>, file: Option<T>, default: T) -> T {
    flag.or(file).unwrap_or(default)
}

/// Same, for settings with no default (required somewhere).
pub fn pick_required<T>(flag: Option<T>, file: Option<T>, what: &str) -> Result<T, CliError> {
    flag.or(file)
        .ok_or_else(|| CliError::Usage(format!("{what} is required (flag or config file)")))
}
