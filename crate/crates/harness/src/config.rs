//! Flat `key = value` files. Keys mirror the long command-line flags;
//! underscores and dashes are interchangeable. `#` starts a comment.

use std::collections::BTreeMap;
use std::path::Path;

use crate::error::{HarnessError, Result};

pub type KeyValues = BTreeMap<String, String>;

pub fn parse_kv(text: &str) -> Result<KeyValues> {
    let mut map = KeyValues::new();
    for (no, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| HarnessError::Parse(format!("line {}: expected `key = value`", no + 1)))?;
        let key = k.trim().replace('_', "-");
        if key.is_empty() {
            return Err(HarnessError::Parse(format!("line {}: empty key", no + 1)));
        }
        if map.insert(key.clone(), v.trim().to_string()).is_some() {
            return Err(HarnessError::Parse(format!("line {}: duplicate key `{key}`", no + 1)));
        }
    }
    Ok(map)
}

pub fn read_kv(path: &Path) -> Result<KeyValues> {
    let text = std::fs::read_to_string(path).map_err(|e| HarnessError::io(path, e))?;
    parse_kv(&text)
}

/// Parses the value under `key`, if present.
pub fn get<T: std::str::FromStr>(kv: &KeyValues, key: &str) -> Result<Option<T>> {
    kv.get(key)
        .map(|s| s.parse().map_err(|_| HarnessError::Parse(format!("bad value `{s}` for `{key}`"))))
        .transpose()
}

pub fn get_list<T: std::str::FromStr>(kv: &KeyValues, key: &str) -> Result<Option<Vec<T>>> {
    kv.get(key)
        .map(|s| {
            s.split(',')
                .map(|p| p.trim().parse().map_err(|_| HarnessError::Parse(format!("bad entry `{p}` in `{key}`"))))
                .collect()
        })
        .transpose()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_comments_and_normalizes_keys() {
        let kv = parse_kv("# run\ngamma_e = 0.2\n\ntrials=10 # short\nschemes = srm, zf\n").unwrap();
        assert_eq!(get::<f64>(&kv, "gamma-e").unwrap(), Some(0.2));
        assert_eq!(get::<usize>(&kv, "trials").unwrap(), Some(10));
        assert_eq!(get_list::<String>(&kv, "schemes").unwrap().unwrap(), vec!["srm", "zf"]);
        assert_eq!(get::<u64>(&kv, "seed").unwrap(), None);
    }

    #[test]
    fn rejects_malformed_lines() {
        assert!(parse_kv("trials 10").is_err());
        assert!(parse_kv("a = 1\na = 2").is_err());
        assert!(parse_kv("= 3").is_err());
        let kv = parse_kv("trials = many").unwrap();
        assert!(get::<usize>(&kv, "trials").is_err());
    }
}
