//! Optional TOML config file with the same keys as the command-line flags.

use std::path::Path;

use serde::Deserialize;

/// Every key is optional; a flag given on the command line wins.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct FileConfig {
    pub n: Option<usize>,
    pub m: Option<usize>,
    pub lambda: Option<String>,
    pub seed: Option<u64>,
    pub modulation: Option<String>,
    pub entanglement: Option<String>,
    pub fraction_check: Option<bool>,
    pub eq8_check: Option<bool>,
    pub audit_pairs: Option<usize>,
    pub alice: Option<String>,
    pub bob: Option<String>,
    pub bit: Option<u8>,
    pub trials: Option<u64>,
    pub ns: Option<Vec<usize>>,
    pub format: Option<String>,
    pub output: Option<String>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self, String> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| format!("--config {}: {e}", path.display()))?;
        toml::from_str(&text).map_err(|e| format!("--config {}: {e}", path.display()))
    }
}

/// Parses a string from the config file with the same parser as the flag.
pub fn parse_key<T>(key: &str, value: Option<&String>) -> Result<Option<T>, String>
where
    T: std::str::FromStr,
    T::Err: std::fmt::Display,
{
    value
        .map(|v| {
            v.parse::<T>()
                .map_err(|e| format!("config key `{key}`: {e}"))
        })
        .transpose()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_keys_are_rejected() {
        assert!(toml::from_str::<FileConfig>("n = 3\nwat = 1\n").is_err());
        let c: FileConfig = toml::from_str("n = 3\nfraction-check = false\nns = [2, 3]\n").unwrap();
        assert_eq!(c.n, Some(3));
        assert_eq!(c.fraction_check, Some(false));
        assert_eq!(c.ns, Some(vec![2, 3]));
    }
}
