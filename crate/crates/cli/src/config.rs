//! `key = value` run configuration. Blank lines and `#` comments are
//! skipped; every key must be one the subcommand accepts.

use std::collections::BTreeMap;
use std::path::Path;
use std::str::FromStr;

use crate::CliError;

#[derive(Debug, Default)]
pub struct ConfigFile {
    entries: BTreeMap<String, (usize, String)>,
    source: String,
}

impl ConfigFile {
    pub fn load(path: &Path, allowed: &[&str]) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
        Self::parse(&text, &path.display().to_string(), allowed)
    }

    pub fn parse(text: &str, source: &str, allowed: &[&str]) -> Result<Self, CliError> {
        let mut entries = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(CliError::Usage(format!("{source}:{}: expected `key = value`, got `{line}`", i + 1)));
            };
            let key = key.trim().replace('_', "-");
            if !allowed.contains(&key.as_str()) {
                return Err(CliError::Usage(format!(
                    "{source}:{}: unknown key `{key}` (allowed: {})",
                    i + 1,
                    allowed.join(", ")
                )));
            }
            if entries.insert(key.clone(), (i + 1, value.trim().to_string())).is_some() {
                return Err(CliError::Usage(format!("{source}:{}: duplicate key `{key}`", i + 1)));
            }
        }
        Ok(Self {
            entries,
            source: source.to_string(),
        })
    }

    /// The value for `key`, parsed.
    pub fn get<T: FromStr>(&self, key: &str) -> Result<Option<T>, CliError>
    where
        T::Err: std::fmt::Display,
    {
        match self.entries.get(key) {
            None => Ok(None),
            Some((line, v)) => v
                .parse()
                .map(Some)
                .map_err(|e| CliError::Usage(format!("{}:{line}: bad value `{v}` for `{key}`: {e}", self.source))),
        }
    }

    pub fn flag(&self, key: &str) -> Result<bool, CliError> {
        Ok(self.get::<bool>(key)?.unwrap_or(false))
    }
}

/// Flag value if given, else the config value.
pub fn pick<T: FromStr>(flag: Option<T>, cfg: &ConfigFile, key: &str) -> Result<Option<T>, CliError>
where
    T::Err: std::fmt::Display,
{
    match flag {
        Some(v) => Ok(Some(v)),
        None => cfg.get(key),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_and_validates_keys() {
        let text = "# run\n dgp = c-e\nn=250\n\nsigma_floor = 0.01\n";
        let cfg = ConfigFile::parse(text, "t", &["dgp", "n", "sigma-floor"]).unwrap();
        assert_eq!(cfg.get::<String>("dgp").unwrap().as_deref(), Some("c-e"));
        assert_eq!(cfg.get::<usize>("n").unwrap(), Some(250));
        assert_eq!(cfg.get::<f64>("sigma-floor").unwrap(), Some(0.01));
        assert_eq!(cfg.get::<usize>("missing").unwrap(), None);
    }

    #[test]
    fn rejects_unknown_duplicate_and_malformed() {
        let allowed = ["n"];
        for bad in ["m = 3", "n = 1\nn = 2", "n 3"] {
            assert!(matches!(ConfigFile::parse(bad, "t", &allowed), Err(CliError::Usage(_))), "{bad}");
        }
        let cfg = ConfigFile::parse("n = three", "t", &allowed).unwrap();
        let err = cfg.get::<usize>("n").unwrap_err();
        assert!(err.to_string().contains("t:1"));
    }

    #[test]
    fn flags_win() {
        let cfg = ConfigFile::parse("n = 5", "t", &["n"]).unwrap();
        assert_eq!(pick(Some(7usize), &cfg, "n").unwrap(), Some(7));
        assert_eq!(pick(None::<usize>, &cfg, "n").unwrap(), Some(5));
    }
}
