//! Flat `key=value` configuration files. Explicit flags override file values.

use std::collections::BTreeMap;
use std::path::Path;
use std::str::FromStr;

use crate::CliError;

/// Keys accepted in a configuration file (flag names without the dashes;
/// underscores are accepted in place of hyphens).
pub const KNOWN_KEYS: [&str; 24] = [
    "r", "s", "d", "threads", "tol", "quad-tol", "seed", "out-dir", "format", "x", "family", "alpha", "rule", "b",
    "mass", "strict", "shrinkage", "mu", "mu-min", "mu-max", "points", "samples", "only", "fig1-d",
];

#[derive(Debug, Default, Clone, PartialEq)]
pub struct ConfigFile {
    entries: BTreeMap<String, String>,
}

impl ConfigFile {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("cannot read config file {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    /// Parses `key = value` lines; blank lines and `#` comments are ignored.
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let mut entries = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| CliError::Usage(format!("config line {}: expected key=value, got {raw:?}", i + 1)))?;
            let key = key.trim().replace('_', "-");
            if !KNOWN_KEYS.contains(&key.as_str()) {
                return Err(CliError::Usage(format!("config line {}: unknown key {key:?}", i + 1)));
            }
            entries.insert(key, value.trim().to_string());
        }
        Ok(Self { entries })
    }

    pub fn raw(&self, key: &str) -> Option<&str> {
        self.entries.get(key).map(String::as_str)
    }

    /// The flag value if given, otherwise the parsed file value.
    pub fn pick<T: FromStr>(&self, flag: Option<T>, key: &str) -> Result<Option<T>, CliError> {
        if flag.is_some() {
            return Ok(flag);
        }
        self.raw(key)
            .map(|v| v.parse::<T>().map_err(|_| CliError::Usage(format!("config key {key}: cannot parse {v:?}"))))
            .transpose()
    }

    /// Comma-separated list variant of [`ConfigFile::pick`].
    pub fn pick_list<T: FromStr>(&self, flag: Option<Vec<T>>, key: &str) -> Result<Option<Vec<T>>, CliError> {
        if flag.is_some() {
            return Ok(flag);
        }
        self.raw(key)
            .map(|v| {
                v.split(',')
                    .map(|item| {
                        item.trim()
                            .parse::<T>()
                            .map_err(|_| CliError::Usage(format!("config key {key}: cannot parse {item:?}")))
                    })
                    .collect()
            })
            .transpose()
    }

    /// Boolean switch: set by the flag or by `key = true`.
    pub fn switch(&self, flag: bool, key: &str) -> Result<bool, CliError> {
        Ok(flag || self.pick::<bool>(None, key)?.unwrap_or(false))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_and_prefers_flags() {
        let c = ConfigFile::parse("# model\nr = 2\ns=0.5  # future\nquad_tol = 1e-10\nx = 1, 2,3\n").unwrap();
        assert_eq!(c.pick::<f64>(None, "r").unwrap(), Some(2.0));
        assert_eq!(c.pick(Some(3.0), "r").unwrap(), Some(3.0));
        assert_eq!(c.pick::<f64>(None, "quad-tol").unwrap(), Some(1e-10));
        assert_eq!(c.pick_list::<u64>(None, "x").unwrap(), Some(vec![1, 2, 3]));
        assert_eq!(c.pick::<f64>(None, "d").unwrap(), None);
    }

    #[test]
    fn rejects_bad_lines() {
        assert!(ConfigFile::parse("r 2").is_err());
        assert!(ConfigFile::parse("colour = red").is_err());
        let c = ConfigFile::parse("r = two").unwrap();
        assert!(c.pick::<f64>(None, "r").is_err());
    }
}
