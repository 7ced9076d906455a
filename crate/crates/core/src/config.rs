//! Tool configuration, loadable from an `abcde.toml` file.
//!
//! Three sections mirror the three configurable stages:
//!
//! ```toml
//! [lint]
//! enabled_rules = ["CL-TXORIGIN", "CL-LOWLEVEL"]   # omit for all rules
//! fail_level = "warning"
//!
//! [lint.severity_overrides]
//! "CL-DIV" = "warning"
//!
//! [gas]
//! enabled_rules = ["GA-PACK"]
//!
//! [scaffold]
//! solidity_version = "0.5.16"
//! one_file_per_contract = true
//! license_header = "..."
//! ```

use crate::catalog;
use crate::diag::Severity;
use serde::Deserialize;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::path::Path;

#[derive(Debug, Clone, Default, Deserialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct Config {
    pub lint: LintConfig,
    pub gas: GasConfig,
    pub scaffold: ScaffoldConfig,
}

/// Rule selection and severity tuning for the code linter.
#[derive(Debug, Clone, Default, Deserialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct LintConfig {
    /// Rules to run; absent means every rule.
    pub enabled_rules: Option<BTreeSet<String>>,
    pub severity_overrides: BTreeMap<String, Severity>,
    /// Findings at or above this level make the CLI exit non-zero.
    pub fail_level: Option<Severity>,
}

/// Same toggles for the gas analyzer.
#[derive(Debug, Clone, Default, Deserialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct GasConfig {
    pub enabled_rules: Option<BTreeSet<String>>,
    pub severity_overrides: BTreeMap<String, Severity>,
}

#[derive(Debug, Clone, Deserialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct ScaffoldConfig {
    /// Exact compiler version for the generated pragma; scaffolds never
    /// float so they always pass the pragma lint.
    pub solidity_version: String,
    pub one_file_per_contract: bool,
    /// Comment block emitted at the top of each generated file.
    pub license_header: String,
}

impl Default for ScaffoldConfig {
    fn default() -> Self {
        ScaffoldConfig {
            solidity_version: "0.5.16".to_string(),
            one_file_per_contract: true,
            license_header: String::new(),
        }
    }
}

#[derive(Debug)]
pub enum ConfigError {
    Io(std::io::Error),
    Parse(toml::de::Error),
    /// A rule id in `enabled_rules` or `severity_overrides` is not in the
    /// catalog, or a version string is not an exact `X.Y.Z` triple.
    Invalid(String),
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConfigError::Io(e) => write!(f, "cannot read config: {e}"),
            ConfigError::Parse(e) => write!(f, "cannot parse config: {e}"),
            ConfigError::Invalid(m) => write!(f, "invalid config: {m}"),
        }
    }
}

impl std::error::Error for ConfigError {}

impl Config {
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(ConfigError::Io)?;
        Self::from_toml(&text)
    }

    pub fn from_toml(text: &str) -> Result<Self, ConfigError> {
        let config: Config = toml::from_str(text).map_err(ConfigError::Parse)?;
        config.validate()?;
        Ok(config)
    }

    fn validate(&self) -> Result<(), ConfigError> {
        for id in self
            .lint
            .enabled_rules
            .iter()
            .flatten()
            .chain(self.lint.severity_overrides.keys())
            .chain(self.gas.enabled_rules.iter().flatten())
            .chain(self.gas.severity_overrides.keys())
        {
            if catalog::rule(id).is_none() {
                return Err(ConfigError::Invalid(format!("unknown rule id `{id}`")));
            }
        }
        if parse_version(&self.scaffold.solidity_version).is_none() {
            return Err(ConfigError::Invalid(format!(
                "solidity_version must be an exact X.Y.Z triple, got `{}`",
                self.scaffold.solidity_version
            )));
        }
        Ok(())
    }
}

/// Parses an exact `X.Y.Z` version string.
pub fn parse_version(s: &str) -> Option<(u32, u32, u32)> {
    let mut parts = s.split('.');
    let x = parts.next()?.parse().ok()?;
    let y = parts.next()?.parse().ok()?;
    let z = parts.next()?.parse().ok()?;
    if parts.next().is_some() {
        return None;
    }
    Some((x, y, z))
}

/// Applies rule selection and overrides shared by the lint and gas stages.
pub(crate) fn rule_enabled(enabled: &Option<BTreeSet<String>>, id: &str) -> bool {
    match enabled {
        Some(set) => set.contains(id),
        None => true,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_config_is_default() {
        let c = Config::from_toml("").unwrap();
        assert_eq!(c, Config::default());
        assert_eq!(c.scaffold.solidity_version, "0.5.16");
        assert!(c.scaffold.one_file_per_contract);
    }

    #[test]
    fn sections_parse() {
        let c = Config::from_toml(
            r#"
[lint]
enabled_rules = ["CL-TXORIGIN", "CL-DIV"]
fail_level = "warning"

[lint.severity_overrides]
"CL-DIV" = "error"

[gas]
enabled_rules = ["GA-PACK"]

[scaffold]
solidity_version = "0.5.12"
one_file_per_contract = false
license_header = "// (c) example"
"#,
        )
        .unwrap();
        assert_eq!(c.lint.enabled_rules.as_ref().unwrap().len(), 2);
        assert_eq!(c.lint.fail_level, Some(Severity::Warning));
        assert_eq!(
            c.lint.severity_overrides.get("CL-DIV"),
            Some(&Severity::Error)
        );
        assert_eq!(c.scaffold.solidity_version, "0.5.12");
        assert!(!c.scaffold.one_file_per_contract);
    }

    #[test]
    fn unknown_rule_rejected() {
        let err = Config::from_toml("[lint]\nenabled_rules = [\"CL-NOPE\"]\n").unwrap_err();
        assert!(matches!(err, ConfigError::Invalid(_)));
    }

    #[test]
    fn floating_scaffold_version_rejected() {
        let err =
            Config::from_toml("[scaffold]\nsolidity_version = \"^0.5.0\"\n").unwrap_err();
        assert!(matches!(err, ConfigError::Invalid(_)));
    }

    #[test]
    fn unknown_keys_rejected() {
        assert!(Config::from_toml("[lint]\ntypo_field = 1\n").is_err());
    }
}
