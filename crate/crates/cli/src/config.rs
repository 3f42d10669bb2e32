//! Experiment configs: flags, `key = value` files and JSON files merged into one canonical form.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::CliError;

/// Every field a subcommand may read. Absent fields stay out of the canonical form.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub command: String,
    /// Univariate polynomial in `x` (the sequence `p`, or the congruence polynomial).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub poly: Option<String>,
    /// Bivariate polynomials in `x, y`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub f: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub g: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub a: Option<i64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub b: Option<i64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<i64>,
    #[serde(rename = "B", skip_serializing_if = "Option::is_none")]
    pub bound: Option<u64>,
    #[serde(rename = "B_list", skip_serializing_if = "Option::is_none")]
    pub bounds: Option<Vec<u64>>,
    /// Counts paired with `B_list`, fitted without computing anything.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub counts: Option<Vec<u64>>,
    #[serde(rename = "Q", skip_serializing_if = "Option::is_none")]
    pub q_limit: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha: Option<i64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub form: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub algo: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kind: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub family: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub q: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub l: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub m: Option<i64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<i64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub h: Option<i64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub d: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub threads: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_pairs: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_quadruples: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_millis: Option<u64>,
    /// CSV export of a scan table.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub csv: Option<String>,
    /// Per-pair table written by `sieve`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub table: Option<String>,
}

/// Keys that do not change the payload and so stay out of the digest.
const UNHASHED: [&str; 2] = ["threads", "csv"];

const LIST_KEYS: [&str; 2] = ["B_list", "counts"];

const TEXT_KEYS: [&str; 10] = ["command", "poly", "f", "g", "form", "algo", "kind", "family", "csv", "table"];

impl ExperimentConfig {
    /// Checks what can be checked before running: polynomials parse, `B_list` increases.
    pub fn validate(&self) -> Result<(), CliError> {
        if let Some(p) = &self.poly {
            polyenergy::polyarith::parse_uni(p, "x")?;
        }
        for p in [&self.f, &self.g].into_iter().flatten() {
            polyenergy::polyarith::parse_poly(p, &["x", "y"])?;
        }
        if let Some(bs) = &self.bounds {
            if bs.windows(2).any(|w| w[0] >= w[1]) {
                return Err(CliError::Config("B_list must be strictly increasing".into()));
            }
        }
        if let (Some(bs), Some(cs)) = (&self.bounds, &self.counts) {
            if bs.len() != cs.len() {
                return Err(CliError::Config("counts and B_list differ in length".into()));
            }
        }
        Ok(())
    }

    pub fn canonical(&self) -> String {
        let mut v = serde_json::to_value(self).expect("config serializes");
        if let Value::Object(map) = &mut v {
            for key in UNHASHED {
                map.remove(key);
            }
        }
        v.to_string()
    }

    /// Hex sha256 of the canonical JSON form.
    pub fn digest(&self) -> String {
        hex::encode(Sha256::digest(self.canonical().as_bytes()))
    }
}

/// Reads a config file: a JSON object, or `key = value` lines with `#` comments.
pub fn read_config_file(path: &Path) -> Result<BTreeMap<String, Value>, CliError> {
    let text = std::fs::read_to_string(path)?;
    parse_config_text(&text)
}

pub fn parse_config_text(text: &str) -> Result<BTreeMap<String, Value>, CliError> {
    if text.trim_start().starts_with('{') {
        let v: Value = serde_json::from_str(text).map_err(|e| CliError::Config(format!("config JSON: {e}")))?;
        return match v {
            Value::Object(map) => Ok(map
                .into_iter()
                .map(|(k, v)| match v {
                    Value::String(s) if LIST_KEYS.contains(&k.as_str()) => {
                        let v = scalar(&k, &s);
                        (k, v)
                    }
                    v => (k, v),
                })
                .collect()),
            _ => Err(CliError::Config("config JSON must be an object".into())),
        };
    }
    let mut out = BTreeMap::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| CliError::Config(format!("line {}: expected key = value", lineno + 1)))?;
        let key = key.trim().to_string();
        let value = value.trim().trim_matches('"');
        out.insert(key.clone(), scalar(&key, value));
    }
    Ok(out)
}

fn scalar(key: &str, text: &str) -> Value {
    if LIST_KEYS.contains(&key) {
        let items: Option<Vec<Value>> = text
            .split(',')
            .map(|s| s.trim().parse::<u64>().ok().map(Value::from))
            .collect();
        return items.map(Value::Array).unwrap_or_else(|| Value::String(text.into()));
    }
    if !TEXT_KEYS.contains(&key) {
        if let Ok(n) = text.parse::<i64>() {
            return Value::from(n);
        }
    }
    Value::String(text.into())
}

/// File values first, then flag values on top.
pub fn merge(
    command: &str,
    file: BTreeMap<String, Value>,
    flags: BTreeMap<String, Value>,
) -> Result<ExperimentConfig, CliError> {
    let mut map = file;
    if let Some(c) = map.get("command").and_then(Value::as_str) {
        if command != "run" && c != command {
            return Err(CliError::Config(format!("config is for `{c}`, not `{command}`")));
        }
    }
    map.extend(flags);
    if command != "run" {
        map.insert("command".into(), Value::String(command.into()));
    }
    if !map.contains_key("command") {
        return Err(CliError::Config("config has no `command`".into()));
    }
    let obj = Value::Object(map.into_iter().collect());
    let cfg: ExperimentConfig = serde_json::from_value(obj).map_err(|e| CliError::Config(e.to_string()))?;
    cfg.validate()?;
    Ok(cfg)
}
