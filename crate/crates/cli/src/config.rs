//! `key=value` configuration file. Flags given on the command line win.

use std::collections::BTreeMap;
use std::path::Path;
use std::str::FromStr;

use anyhow::{bail, Context, Result};

/// Keys a config file may set.
pub const KEYS: [&str; 7] = ["threads", "t", "radius", "width", "chunk_rows", "pairs", "m"];

#[derive(Debug, Default, Clone)]
pub struct Config {
    values: BTreeMap<String, String>,
}

impl Config {
    pub fn load(path: &Path) -> Result<Config> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
        Config::parse(&text).with_context(|| format!("in config {}", path.display()))
    }

    pub fn parse(text: &str) -> Result<Config> {
        let mut values = BTreeMap::new();
        for (n, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let Some((k, v)) = line.split_once('=') else {
                bail!("line {}: expected key=value", n + 1);
            };
            let k = k.trim().replace('-', "_");
            if !KEYS.contains(&k.as_str()) {
                bail!("line {}: unknown key {k:?}", n + 1);
            }
            values.insert(k, v.trim().to_string());
        }
        Ok(Config { values })
    }

    /// Flag value, else the config value, else `default`.
    pub fn resolve<T: FromStr>(&self, flag: Option<T>, key: &str, default: T) -> Result<T>
    where
        T::Err: std::fmt::Display,
    {
        Ok(self.optional(flag, key)?.unwrap_or(default))
    }

    /// Flag value, else the config value, if either is set.
    pub fn optional<T: FromStr>(&self, flag: Option<T>, key: &str) -> Result<Option<T>>
    where
        T::Err: std::fmt::Display,
    {
        if flag.is_some() {
            return Ok(flag);
        }
        self.values
            .get(key)
            .map(|s| s.parse().map_err(|e| anyhow::anyhow!("config key {key}: {e}")))
            .transpose()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flags_override_file() {
        let c = Config::parse("# defaults\nt = 0.8\nchunk-rows=100\n").unwrap();
        assert_eq!(c.resolve(None, "t", 0.75).unwrap(), 0.8);
        assert_eq!(c.resolve(Some(0.5), "t", 0.75).unwrap(), 0.5);
        assert_eq!(c.resolve(None, "chunk_rows", 1usize).unwrap(), 100);
        assert_eq!(c.resolve(None, "radius", 2u32).unwrap(), 2);
        assert!(Config::parse("seed=1").is_err());
        assert!(Config::parse("t").is_err());
        assert!(Config::parse("t=x").unwrap().resolve(None, "t", 0.1).is_err());
    }
}
