//! Flat `key = value` configuration file. Command-line flags take precedence
//! over the file, which takes precedence over built-in defaults.

use std::collections::BTreeMap;
use std::path::Path;

use crate::failure::Failure;

pub const KEYS: [&str; 13] = [
    "key",
    "bands",
    "nmr_limit",
    "skip_floor",
    "clip",
    "mode",
    "decoy",
    "attack",
    "seed",
    "sidecar",
    "report",
    "threads",
    "max_ber",
];

#[derive(Debug, Clone, Default, PartialEq)]
pub struct FileConfig {
    entries: BTreeMap<String, String>,
}

impl FileConfig {
    /// `#` starts a comment line; blank lines are skipped. Unknown and
    /// repeated keys are errors.
    pub fn parse(text: &str) -> Result<Self, Failure> {
        let mut entries = BTreeMap::new();
        for (n, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let Some((k, v)) = line.split_once('=') else {
                return Err(Failure::Usage(format!("config line {}: expected key = value", n + 1)));
            };
            let (k, v) = (k.trim(), v.trim());
            if !KEYS.contains(&k) {
                return Err(Failure::Usage(format!("config line {}: unknown key `{k}`", n + 1)));
            }
            if entries.insert(k.to_string(), v.to_string()).is_some() {
                return Err(Failure::Usage(format!("config line {}: `{k}` given twice", n + 1)));
            }
        }
        Ok(Self { entries })
    }

    pub fn load(path: &Path) -> Result<Self, Failure> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Failure::Io(format!("cannot read config {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        debug_assert!(KEYS.contains(&key));
        self.entries.get(key).map(String::as_str)
    }

    /// The flag value if given, else the parsed file value.
    pub fn pick<T>(
        &self,
        flag: Option<T>,
        key: &str,
        parse: impl Fn(&str) -> Result<T, String>,
    ) -> Result<Option<T>, Failure> {
        if flag.is_some() {
            return Ok(flag);
        }
        self.get(key)
            .map(|v| parse(v).map_err(|e| Failure::Usage(format!("config `{key}`: {e}"))))
            .transpose()
    }
}

/// Hex key, with or without `0x`, at most 16 digits.
pub fn parse_key(s: &str) -> Result<u64, String> {
    let h = s.strip_prefix("0x").or_else(|| s.strip_prefix("0X")).unwrap_or(s);
    if h.is_empty() || h.len() > 16 {
        return Err(format!("key `{s}` must be 1 to 16 hex digits"));
    }
    u64::from_str_radix(h, 16).map_err(|_| format!("key `{s}` is not hex"))
}

/// Comma-separated band numbers and `a-b` ranges, e.g. `1-5,7`.
pub fn parse_bands(s: &str) -> Result<Vec<usize>, String> {
    let mut out = Vec::new();
    for part in s.split(',').map(str::trim) {
        let num = |v: &str| v.trim().parse::<usize>().map_err(|_| format!("bad band `{v}`"));
        match part.split_once('-') {
            Some((a, b)) => {
                let (a, b) = (num(a)?, num(b)?);
                if a > b {
                    return Err(format!("empty band range `{part}`"));
                }
                out.extend(a..=b);
            }
            None => out.push(num(part)?),
        }
    }
    out.sort_unstable();
    out.dedup();
    Ok(out)
}

pub fn parse_f64(s: &str) -> Result<f64, String> {
    s.parse().map_err(|_| format!("`{s}` is not a number"))
}

pub fn parse_u64(s: &str) -> Result<u64, String> {
    s.parse().map_err(|_| format!("`{s}` is not a non-negative integer"))
}

pub fn parse_usize(s: &str) -> Result<usize, String> {
    s.parse().map_err(|_| format!("`{s}` is not a non-negative integer"))
}

pub fn parse_string(s: &str) -> Result<String, String> {
    Ok(s.to_string())
}
