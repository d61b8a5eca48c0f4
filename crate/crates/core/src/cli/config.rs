//! Run configuration: defaults, config file, flag overrides.
//!
//! The config file is a flat list of `key = value` lines in TOML syntax.
//! Blank lines and `#` comments are ignored, strings are quoted, numbers are
//! bare. Recognized keys:
//!
//! ```text
//! tolerance = 1e-10        # absolute tolerance, > 0
//! seed = 2024              # base seed for randomized trials
//! format = "text"          # "json", "csv" or "text"
//! trials = 100             # random logical states per recovery check
//! threads = 4              # worker threads (CHI2QEC_THREADS and --threads override)
//! max_n = 64               # bound searches: largest n
//! max_q = 16               # bound sweeps: largest q
//! max_b = 16               # bound sweeps: largest b
//! max_k = 6                # bound sweeps: largest k
//! max_q_enumeration = 10   # corrupted-subspace enumeration: largest q
//! ```

use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::bounds::SearchCaps;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
    Text,
}

impl fmt::Display for Format {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Format::Json => "json",
            Format::Csv => "csv",
            Format::Text => "text",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub tolerance: f64,
    pub seed: u64,
    pub format: Format,
    pub trials: usize,
    /// Worker threads; `None` leaves the pool size to rayon.
    #[serde(skip)]
    pub threads: Option<usize>,
    pub caps: SearchCaps,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            tolerance: crate::DEFAULT_TOL,
            seed: 2024,
            format: Format::Text,
            trials: 100,
            threads: None,
            caps: SearchCaps::default(),
        }
    }
}

/// Optional settings as they appear in a config file or on the command line.
#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Overrides {
    pub tolerance: Option<f64>,
    pub seed: Option<u64>,
    pub format: Option<Format>,
    pub trials: Option<usize>,
    pub threads: Option<usize>,
    pub max_n: Option<u32>,
    pub max_q: Option<u32>,
    pub max_b: Option<u32>,
    pub max_k: Option<u32>,
    pub max_q_enumeration: Option<u32>,
}

impl Overrides {
    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Parse(format!("config: {}", e.message())))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Parse(format!("config {}: {e}", path.display())))?;
        Self::parse(&text)
    }
}

impl RunConfig {
    /// Applies every `Some` field of `o` on top of `self`.
    pub fn apply(mut self, o: &Overrides) -> Self {
        if let Some(x) = o.tolerance {
            self.tolerance = x;
        }
        if let Some(x) = o.seed {
            self.seed = x;
        }
        if let Some(x) = o.format {
            self.format = x;
        }
        if let Some(x) = o.trials {
            self.trials = x;
        }
        if let Some(x) = o.threads {
            self.threads = Some(x);
        }
        let c = &mut self.caps;
        c.max_n = o.max_n.unwrap_or(c.max_n);
        c.max_q = o.max_q.unwrap_or(c.max_q);
        c.max_b = o.max_b.unwrap_or(c.max_b);
        c.max_k = o.max_k.unwrap_or(c.max_k);
        c.max_q_enumeration = o.max_q_enumeration.unwrap_or(c.max_q_enumeration);
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.tolerance > 0.0 && self.tolerance.is_finite()) {
            return Err(Error::InvalidParameter(format!("tolerance must be positive, got {}", self.tolerance)));
        }
        if self.threads == Some(0) {
            return Err(Error::InvalidParameter("threads must be at least 1".into()));
        }
        let c = &self.caps;
        if c.max_n == 0 || c.max_q < 2 || c.max_b < 2 || c.max_k == 0 || c.max_q_enumeration < 2 {
            return Err(Error::InvalidParameter(format!("search caps out of range: {c:?}")));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn file_then_flags() {
        let file = Overrides::parse("# run\ntolerance = 1e-9\nformat = \"json\"\nmax_q = 8\n").unwrap();
        let flags = Overrides { format: Some(Format::Csv), ..Default::default() };
        let c = RunConfig::default().apply(&file).apply(&flags);
        assert_eq!(c.tolerance, 1e-9);
        assert_eq!(c.format, Format::Csv);
        assert_eq!(c.caps.max_q, 8);
        assert_eq!(c.caps.max_n, 64);
        c.validate().unwrap();
    }

    #[test]
    fn rejects_unknown_keys_and_bad_values() {
        assert!(Overrides::parse("tolerence = 1e-9").is_err());
        assert!(Overrides::parse("format = \"xml\"").is_err());
        let c = RunConfig::default().apply(&Overrides { tolerance: Some(0.0), ..Default::default() });
        assert!(c.validate().is_err());
    }
}
