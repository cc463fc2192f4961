//! Flat `key = value` experiment manifests.
//!
//! One assignment per line, `#` starts a comment, keys use the long flag
//! spelling (`samples`, `knn-k`, `theta-draws`, …). A repeated key keeps
//! its last value, mirroring how repeated flags behave. Precedence is
//! command line over file over built-in default, resolved per key by
//! [`resolve`].

use std::collections::BTreeMap;
use std::path::Path;
use std::str::FromStr;

use crate::error::{CliError, Result};

#[derive(Debug, Default, Clone)]
pub struct FileConfig {
    values: BTreeMap<String, String>,
}

impl FileConfig {
    /// Parses manifest text; the returned map is empty for empty input.
    pub fn parse(text: &str) -> Result<Self> {
        let mut values = BTreeMap::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = match raw.find('#') {
                Some(pos) => &raw[..pos],
                None => raw,
            };
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(CliError::Usage(format!(
                    "config line {}: expected `key = value`, found {:?}",
                    idx + 1,
                    line
                )));
            };
            let key = key.trim();
            if key.is_empty() {
                return Err(CliError::Usage(format!(
                    "config line {}: empty key",
                    idx + 1
                )));
            }
            values.insert(key.to_string(), value.trim().to_string());
        }
        Ok(Self { values })
    }

    /// Reads and parses a manifest file.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        Self::parse(&text).map_err(|e| match e {
            CliError::Usage(msg) => CliError::Usage(format!("{}: {}", path.display(), msg)),
            other => other,
        })
    }

    /// Parsed value for `key`; `Ok(None)` when absent, `Err` when present
    /// but malformed.
    pub fn get<T>(&self, key: &str) -> Result<Option<T>>
    where
        T: FromStr,
        T::Err: std::fmt::Display,
    {
        match self.values.get(key) {
            None => Ok(None),
            Some(raw) => raw.parse::<T>().map(Some).map_err(|e| {
                CliError::Usage(format!("config key `{}`: bad value {:?}: {}", key, raw, e))
            }),
        }
    }

    /// Rejects keys outside the supported set, so a typo in a manifest
    /// fails loudly instead of silently falling back to a default.
    pub fn ensure_known(&self, known: &[&str]) -> Result<()> {
        for key in self.values.keys() {
            if !known.contains(&key.as_str()) {
                return Err(CliError::Usage(format!(
                    "config: unknown key `{}` (supported: {})",
                    key,
                    known.join(", ")
                )));
            }
        }
        Ok(())
    }
}

/// Applies the precedence chain for one setting: explicit flag, then
/// manifest value, then the built-in default.
pub fn resolve<T>(cli: Option<T>, config: &FileConfig, key: &str, default: T) -> Result<T>
where
    T: FromStr,
    T::Err: std::fmt::Display,
{
    if let Some(v) = cli {
        return Ok(v);
    }
    Ok(config.get::<T>(key)?.unwrap_or(default))
}

/// Like [`resolve`] but with no default: absent everywhere stays `None`.
pub fn resolve_opt<T>(cli: Option<T>, config: &FileConfig, key: &str) -> Result<Option<T>>
where
    T: FromStr,
    T::Err: std::fmt::Display,
{
    if let Some(v) = cli {
        return Ok(Some(v));
    }
    config.get::<T>(key)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_assignments_comments_and_blanks() {
        let cfg = FileConfig::parse(
            "# manifest\nsamples = 500\n\nknn-k=4   # inline note\nmode = sigma-dual\n",
        )
        .unwrap();
        assert_eq!(cfg.get::<usize>("samples").unwrap(), Some(500));
        assert_eq!(cfg.get::<usize>("knn-k").unwrap(), Some(4));
        assert_eq!(
            cfg.get::<String>("mode").unwrap(),
            Some("sigma-dual".into())
        );
        assert_eq!(cfg.get::<u64>("seed").unwrap(), None);
    }

    #[test]
    fn last_assignment_wins() {
        let cfg = FileConfig::parse("seed = 1\nseed = 7\n").unwrap();
        assert_eq!(cfg.get::<u64>("seed").unwrap(), Some(7));
    }

    #[test]
    fn rejects_lines_without_equals() {
        let err = FileConfig::parse("samples 500\n").unwrap_err();
        assert_eq!(err.exit_code(), 2);
        assert!(err.to_string().contains("line 1"));
    }

    #[test]
    fn rejects_malformed_values_by_key() {
        let cfg = FileConfig::parse("samples = many\n").unwrap();
        let err = cfg.get::<usize>("samples").unwrap_err();
        assert!(err.to_string().contains("samples"));
        assert!(err.to_string().contains("many"));
    }

    #[test]
    fn unknown_keys_are_caught() {
        let cfg = FileConfig::parse("smaples = 500\n").unwrap();
        let err = cfg.ensure_known(&["samples", "seed"]).unwrap_err();
        assert!(err.to_string().contains("smaples"));
    }

    #[test]
    fn command_line_beats_file_beats_default() {
        let cfg = FileConfig::parse("samples = 500\n").unwrap();
        assert_eq!(resolve(Some(9usize), &cfg, "samples", 2000).unwrap(), 9);
        assert_eq!(resolve(None::<usize>, &cfg, "samples", 2000).unwrap(), 500);
        assert_eq!(resolve(None::<usize>, &cfg, "partitions", 10).unwrap(), 10);
    }
}
