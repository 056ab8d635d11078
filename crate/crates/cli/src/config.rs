//! Flat `key = value` config files and their merge with command-line flags.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::error::CliError;

/// Keys accepted in a config file.
const KNOWN_KEYS: &[&str] = &[
    "input",
    "date_column",
    "value_column",
    "name",
    "boundary",
    "d_max",
    "p_max",
    "q_max",
    "criterion",
    "adf_alpha",
    "adf_max_lag",
    "diagnostics_max_lag",
    "forecast_horizon",
    "output_dir",
    "df_adjust",
];

/// Parsed config file; values stay textual until a command asks for them.
#[derive(Debug, Default, Clone)]
pub struct ConfigFile {
    entries: BTreeMap<String, String>,
    source: Option<PathBuf>,
}

impl ConfigFile {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::data(format!("cannot read config {}: {e}", path.display())))?;
        let mut cfg = Self::parse(&text)?;
        cfg.source = Some(path.to_path_buf());
        Ok(cfg)
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        let mut entries = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| CliError::usage(format!("config line {}: expected `key = value`", i + 1)))?;
            let key = key.trim();
            if !KNOWN_KEYS.contains(&key) {
                return Err(CliError::usage(format!(
                    "config line {}: unknown key `{key}` (known: {})",
                    i + 1,
                    KNOWN_KEYS.join(", ")
                )));
            }
            entries.insert(key.to_string(), value.trim().to_string());
        }
        Ok(Self { entries, source: None })
    }

    pub fn get_str(&self, key: &str) -> Option<&str> {
        self.entries.get(key).map(String::as_str)
    }

    /// Typed lookup; a present but unparsable value is a usage error.
    pub fn get<T: FromStr>(&self, key: &str) -> Result<Option<T>, CliError> {
        match self.entries.get(key) {
            None => Ok(None),
            Some(v) => v.parse().map(Some).map_err(|_| {
                let origin = self
                    .source
                    .as_ref()
                    .map(|p| format!(" in {}", p.display()))
                    .unwrap_or_default();
                CliError::usage(format!("invalid value `{v}` for `{key}`{origin}"))
            }),
        }
    }
}

/// Flag value, else config value, else default.
pub fn pick<T: FromStr>(flag: Option<T>, cfg: &ConfigFile, key: &str, default: T) -> Result<T, CliError> {
    Ok(match flag {
        Some(v) => v,
        None => cfg.get(key)?.unwrap_or(default),
    })
}

/// Like [`pick`] without a default.
pub fn pick_opt<T: FromStr>(flag: Option<T>, cfg: &ConfigFile, key: &str) -> Result<Option<T>, CliError> {
    Ok(match flag {
        Some(v) => Some(v),
        None => cfg.get(key)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_comments_and_whitespace() {
        let cfg = ConfigFile::parse("# pipeline\ninput = data.csv  # raw\n\n  p_max=3\n").unwrap();
        assert_eq!(cfg.get_str("input"), Some("data.csv"));
        assert_eq!(cfg.get::<usize>("p_max").unwrap(), Some(3));
        assert_eq!(cfg.get::<usize>("q_max").unwrap(), None);
    }

    #[test]
    fn rejects_unknown_keys_and_bad_lines() {
        assert!(ConfigFile::parse("colour = red").is_err());
        assert!(ConfigFile::parse("p_max 3").is_err());
    }

    #[test]
    fn flags_override_file() {
        let cfg = ConfigFile::parse("p_max = 3").unwrap();
        assert_eq!(pick(Some(4usize), &cfg, "p_max", 5).unwrap(), 4);
        assert_eq!(pick(None::<usize>, &cfg, "p_max", 5).unwrap(), 3);
        assert_eq!(pick(None::<usize>, &cfg, "q_max", 5).unwrap(), 5);
        let bad = ConfigFile::parse("p_max = lots").unwrap();
        assert!(pick(None::<usize>, &bad, "p_max", 5).is_err());
    }
}
