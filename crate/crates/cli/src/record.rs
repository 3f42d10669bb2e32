//! Result records, the JSON-lines cache and JSON-safe numbers.

use std::fs::{self, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use num_bigint::BigUint;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::CliError;

/// Largest integer a double represents exactly.
pub const SAFE_INTEGER: u64 = 1 << 53;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResultRecord {
    pub config_hash: String,
    pub command: String,
    pub config: Value,
    pub payload: Value,
    /// Seconds since the Unix epoch.
    pub timestamp: u64,
    pub elapsed_ms: u64,
    pub version: String,
    #[serde(default)]
    pub cached: bool,
}

impl ResultRecord {
    pub fn new(config_hash: String, command: String, config: Value, payload: Value, elapsed_ms: u64) -> Self {
        ResultRecord {
            config_hash,
            command,
            config,
            payload: json_safe(payload),
            timestamp: SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0),
            elapsed_ms,
            version: env!("CARGO_PKG_VERSION").to_string(),
            cached: false,
        }
    }
}

/// Integers beyond 2^53 in magnitude become decimal strings.
pub fn json_safe(v: Value) -> Value {
    match v {
        Value::Number(n) => {
            let too_big = n.as_u64().is_some_and(|x| x > SAFE_INTEGER)
                || n.as_i64().is_some_and(|x| x.unsigned_abs() > SAFE_INTEGER);
            if too_big {
                Value::String(n.to_string())
            } else {
                Value::Number(n)
            }
        }
        Value::Array(xs) => Value::Array(xs.into_iter().map(json_safe).collect()),
        Value::Object(map) => Value::Object(map.into_iter().map(|(k, v)| (k, json_safe(v))).collect()),
        v => v,
    }
}

/// A count as a JSON number when exact in a double, else as a string.
pub fn count_value(c: &BigUint) -> Value {
    match c.to_u64() {
        Some(x) if x <= SAFE_INTEGER => Value::from(x),
        _ => Value::String(c.to_string()),
    }
}

/// One JSON-lines file per command kind under the cache directory.
pub struct Cache {
    dir: PathBuf,
}

impl Cache {
    pub fn new(dir: &Path) -> Self {
        Cache { dir: dir.to_path_buf() }
    }

    fn file(&self, command: &str) -> PathBuf {
        self.dir.join(format!("{command}.jsonl"))
    }

    /// Latest stored record with this digest.
    pub fn lookup(&self, command: &str, hash: &str) -> Result<Option<ResultRecord>, CliError> {
        let path = self.file(command);
        if !path.exists() {
            return Ok(None);
        }
        let mut found = None;
        for line in BufReader::new(fs::File::open(&path)?).lines() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            if let Ok(r) = serde_json::from_str::<ResultRecord>(&line) {
                if r.config_hash == hash {
                    found = Some(r);
                }
            }
        }
        Ok(found)
    }

    pub fn store(&self, record: &ResultRecord) -> Result<(), CliError> {
        fs::create_dir_all(&self.dir)?;
        append_line(&self.file(&record.command), record)
    }
}

pub fn append_line(path: &Path, record: &ResultRecord) -> Result<(), CliError> {
    let mut file = OpenOptions::new().create(true).append(true).open(path)?;
    writeln!(file, "{}", serde_json::to_string(record).expect("record serializes"))?;
    Ok(())
}
