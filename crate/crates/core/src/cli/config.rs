//! Resolved run configuration: experiment settings plus an optional `[scan]`
//! table for the commands that loop over sizes or strengths.

use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Deserializer, Serialize};
use serde_json::{Map, Value};

use crate::error::{Error, Result};
use crate::experiments::{ExperimentConfig, InitialState};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scan {
    /// Chain sizes.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sizes: Option<Vec<usize>>,
    /// Measurement strengths of a sweep.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gammas: Option<Vec<f64>>,
    /// Haar states per size.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub states: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    #[serde(flatten)]
    pub experiment: ExperimentConfig,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub scan: Option<Scan>,
}

impl<'de> Deserialize<'de> for RunConfig {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let mut map = Map::<String, Value>::deserialize(d)?;
        let scan = map.remove("scan").map(serde_json::from_value).transpose().map_err(D::Error::custom)?;
        let experiment = serde_json::from_value(Value::Object(map)).map_err(D::Error::custom)?;
        Ok(RunConfig { experiment, scan })
    }
}

pub const SWEEP_GAMMAS: [f64; 4] = [0.4, 0.6, 0.8, 1.0];
pub const SWEEP_SIZES: [usize; 2] = [8, 12];
pub const HAAR_SIZES: [usize; 3] = [8, 10, 12];
pub const HAAR_STATES: usize = 32;
pub const WICK_SIZES: [usize; 4] = [6, 8, 10, 12];

/// Built-in defaults of each subcommand.
pub fn defaults(subcommand: &str) -> RunConfig {
    let base = ExperimentConfig::default();
    let (experiment, scan) = match subcommand {
        "critical" => (ExperimentConfig::critical(base.sites, base.shots), None),
        "validate-cov" => (
            ExperimentConfig { sites: 10, times: vec![0.0, 1.0, 2.0], gammas: vec![0.8], ..base },
            None,
        ),
        "sweep-gamma" => (
            base,
            Some(Scan { sizes: Some(SWEEP_SIZES.to_vec()), gammas: Some(SWEEP_GAMMAS.to_vec()), states: None }),
        ),
        "haar" => (
            ExperimentConfig { initial: InitialState::Haar, ..base },
            Some(Scan { sizes: Some(HAAR_SIZES.to_vec()), gammas: None, states: Some(HAAR_STATES) }),
        ),
        "wick" => (base, Some(Scan { sizes: Some(WICK_SIZES.to_vec()), gammas: None, states: None })),
        _ => (base, None),
    };
    RunConfig { experiment, scan }
}

/// Parses a JSON or TOML document, chosen by file extension.
pub fn read_document<T: DeserializeOwned>(path: &Path, what: &str) -> Result<T> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_document(&text, path.extension().and_then(|e| e.to_str()) == Some("toml"), what)
}

pub fn parse_document<T: DeserializeOwned>(text: &str, toml: bool, what: &str) -> Result<T> {
    let bad = |message: String| Error::Parse { what: what.into(), message };
    if toml {
        toml::from_str(text).map_err(|e| bad(e.to_string()))
    } else {
        serde_json::from_str(text).map_err(|e| bad(e.to_string()))
    }
}

/// Layers a partial document over `base`. A document with a `config` key
/// (a run manifest) contributes that key only.
pub fn overlay(base: &RunConfig, mut doc: Map<String, Value>) -> Result<RunConfig> {
    if let Some(Value::Object(inner)) = doc.remove("config") {
        doc = inner;
    }
    let mut merged = match serde_json::to_value(base).map_err(|e| Error::invalid(e.to_string()))? {
        Value::Object(m) => m,
        _ => unreachable!("configs serialize to maps"),
    };
    for (k, v) in doc {
        match (merged.get_mut(&k), v) {
            (Some(Value::Object(old)), Value::Object(new)) if k == "scan" => old.extend(new),
            (_, v) => {
                merged.insert(k, v);
            }
        }
    }
    serde_json::from_value(Value::Object(merged)).map_err(|e| Error::Parse { what: "config".into(), message: e.to_string() })
}

impl RunConfig {
    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::invalid(format!("config cannot be written as TOML: {e}")))
    }

    pub fn scan(&self) -> Scan {
        self.scan.clone().unwrap_or(Scan { sizes: None, gammas: None, states: None })
    }

    pub fn validate(&self) -> Result<()> {
        self.experiment.validate()?;
        if let Some(scan) = &self.scan {
            if scan.sizes.as_ref().is_some_and(|s| s.is_empty()) {
                return Err(Error::invalid("scan.sizes is empty"));
            }
        }
        Ok(())
    }
}
