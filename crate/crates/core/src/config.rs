//! JSON configuration files and angle literals.
//!
//! A braid configuration looks like
//!
//! ```json
//! {"N": 4, "mode": "unitary",
//!  "parameters": [{"i": 1, "j": 2, "epsilon": "+", "value": 0.5},
//!                 {"i": 2, "j": 2, "epsilon": "-", "rational": [1, 3]}]}
//! ```
//!
//! Keys must be canonical representatives (`i, j ≤ ⌈N/2⌉`). A parameter may be given as a
//! float `value` or as an exact `rational` pair `[numerator, denominator]`; period detection
//! needs every parameter exact. Setting `"enforce_symmetry": false` lets non-canonical keys
//! overwrite single entries of the full parameter map, which breaks the bar symmetry on
//! purpose. A reference configuration is `{"reference": true, "n": 2}`.

use std::collections::BTreeMap;
use std::path::Path;

use num_rational::Ratio;
use serde::Deserialize;
use thiserror::Error;

use crate::braid::{canonical_keys, BraidError, BraidFamily, Mode, ParamKey, ParameterSet};
use crate::projector::Sign;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("malformed config: {0}")]
    Json(#[from] serde_json::Error),
    #[error("invalid config: {0}")]
    Invalid(String),
    #[error("constraint violation: {0}")]
    Braid(#[from] BraidError),
    #[error("cannot parse angle {0:?}")]
    Angle(String),
}

pub type Result<T> = std::result::Result<T, ConfigError>;

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamEntry {
    pub i: usize,
    pub j: usize,
    pub epsilon: Sign,
    #[serde(default)]
    pub value: Option<f64>,
    #[serde(default)]
    pub rational: Option<[i64; 2]>,
}

impl ParamEntry {
    pub fn key(&self) -> ParamKey {
        ParamKey::new(self.i, self.j, self.epsilon)
    }

    fn exact(&self) -> Result<Option<Ratio<i64>>> {
        match self.rational {
            Some([_, 0]) => Err(ConfigError::Invalid(format!(
                "parameter {}: zero denominator",
                self.key()
            ))),
            Some([p, q]) => Ok(Some(Ratio::new(p, q))),
            None => Ok(None),
        }
    }

    fn float(&self) -> Result<f64> {
        match (self.value, self.exact()?) {
            (Some(_), Some(_)) => Err(ConfigError::Invalid(format!(
                "parameter {}: give either \"value\" or \"rational\", not both",
                self.key()
            ))),
            (Some(v), None) => Ok(v),
            (None, Some(r)) => Ok(*r.numer() as f64 / *r.denom() as f64),
            (None, None) => Err(ConfigError::Invalid(format!(
                "parameter {}: missing \"value\" or \"rational\"",
                self.key()
            ))),
        }
    }
}

fn default_true() -> bool {
    true
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BraidConfig {
    #[serde(rename = "N")]
    pub side: usize,
    pub mode: Mode,
    #[serde(default)]
    pub parameters: Vec<ParamEntry>,
    #[serde(default = "default_true")]
    pub enforce_symmetry: bool,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReferenceConfig {
    pub reference: bool,
    pub n: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Config {
    Braid(BraidConfig),
    Reference(ReferenceConfig),
}

impl Config {
    pub fn from_json(text: &str) -> Result<Self> {
        let value: serde_json::Value = serde_json::from_str(text)?;
        if value.get("reference").is_some() {
            let cfg: ReferenceConfig = serde_json::from_value(value)?;
            if !cfg.reference {
                return Err(ConfigError::Invalid(
                    "\"reference\" must be true when present".into(),
                ));
            }
            if cfg.n == 0 {
                return Err(ConfigError::Invalid(
                    "reference n must be at least 1".into(),
                ));
            }
            Ok(Config::Reference(cfg))
        } else {
            let cfg: BraidConfig = serde_json::from_value(value)?;
            cfg.params()?;
            Ok(Config::Braid(cfg))
        }
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::from_json(&text)
    }

    pub fn braid(&self) -> Result<&BraidConfig> {
        match self {
            Config::Braid(b) => Ok(b),
            Config::Reference(_) => Err(ConfigError::Invalid(
                "this command needs a braid config, not a reference config".into(),
            )),
        }
    }
}

impl BraidConfig {
    fn check_duplicates(&self) -> Result<()> {
        let mut seen = std::collections::BTreeSet::new();
        for e in &self.parameters {
            if !seen.insert(e.key()) {
                return Err(ConfigError::Invalid(format!(
                    "duplicate parameter {}",
                    e.key()
                )));
            }
        }
        Ok(())
    }

    /// Builds the parameter set, enforcing canonical keys and the central constraint unless
    /// `enforce_symmetry` is off.
    pub fn params(&self) -> Result<ParameterSet> {
        self.check_duplicates()?;
        let canonical = canonical_keys(self.side)?;
        let mut free = BTreeMap::new();
        let mut overrides = Vec::new();
        for e in &self.parameters {
            let v = e.float()?;
            if self.enforce_symmetry || canonical.contains(&e.key()) {
                free.insert(e.key(), v);
            } else {
                overrides.push((e.key(), v));
            }
        }
        let mut params = ParameterSet::new(self.side, self.mode, &free)?;
        for (key, v) in overrides {
            params = params.with_unchecked_entry(key, v)?;
        }
        Ok(params)
    }

    pub fn family(&self) -> Result<BraidFamily> {
        Ok(BraidFamily::new(self.params()?)?)
    }

    /// Exact values for every canonical key, or `None` if any parameter is float-only.
    /// Canonical keys absent from the file are exactly zero.
    pub fn exact_params(&self) -> Result<Option<BTreeMap<ParamKey, Ratio<i64>>>> {
        let mut out: BTreeMap<ParamKey, Ratio<i64>> = canonical_keys(self.side)?
            .into_iter()
            .map(|k| (k, Ratio::from_integer(0)))
            .collect();
        for e in &self.parameters {
            match e.exact()? {
                Some(r) => {
                    out.insert(e.key(), r);
                }
                None => return Ok(None),
            }
        }
        Ok(Some(out))
    }
}

/// Parses a decimal literal or a rational multiple of π: `0.5`, `-1e-3`, `pi`, `-pi/4`,
/// `3pi/4`, `3*pi/4`, `2.5*pi`.
pub fn parse_angle(text: &str) -> Result<f64> {
    let err = || ConfigError::Angle(text.to_string());
    let s: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    let lower = s.to_ascii_lowercase();
    let Some(pos) = lower.find("pi").or_else(|| lower.find('π')) else {
        let v: f64 = s.parse().map_err(|_| err())?;
        return if v.is_finite() { Ok(v) } else { Err(err()) };
    };
    let marker_len = if lower[pos..].starts_with("pi") {
        2
    } else {
        'π'.len_utf8()
    };
    let head = lower[..pos].trim_end_matches('*');
    let tail = &lower[pos + marker_len..];
    let coeff = match head {
        "" | "+" => 1.0,
        "-" => -1.0,
        h => h.parse::<f64>().map_err(|_| err())?,
    };
    let denom = match tail {
        "" => 1.0,
        t => t
            .strip_prefix('/')
            .ok_or_else(err)?
            .parse::<f64>()
            .map_err(|_| err())?,
    };
    let v = coeff * std::f64::consts::PI / denom;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(err())
    }
}
