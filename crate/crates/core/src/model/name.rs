use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::ModelError;

/// A prefixed name such as `ex:dashboard` or `dash:name`.
///
/// Ordering is by prefix, then local part. Both comparisons are case-sensitive.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct QualifiedName {
    prefix: String,
    local: String,
}

impl QualifiedName {
    pub fn new(prefix: impl Into<String>, local: impl Into<String>) -> Result<Self, ModelError> {
        let prefix = prefix.into();
        let local = local.into();
        if !is_valid_prefix(&prefix) {
            return Err(ModelError::InvalidPrefix(prefix));
        }
        if !is_valid_local(&local) {
            return Err(ModelError::InvalidQualifiedName(format!("{prefix}:{local}")));
        }
        Ok(Self { prefix, local })
    }

    pub fn prefix(&self) -> &str {
        &self.prefix
    }

    pub fn local(&self) -> &str {
        &self.local
    }
}

impl fmt::Display for QualifiedName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.prefix, self.local)
    }
}

impl FromStr for QualifiedName {
    type Err = ModelError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.split_once(':') {
            Some((prefix, local)) => Self::new(prefix, local),
            None => Err(ModelError::InvalidQualifiedName(s.to_string())),
        }
    }
}

impl Serialize for QualifiedName {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for QualifiedName {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Prefix tokens are empty (the default prefix) or an ASCII letter followed by
/// letters, digits, `_`, `-` or `.`, not ending in `.`.
pub fn is_valid_prefix(prefix: &str) -> bool {
    let mut chars = prefix.chars();
    match chars.next() {
        None => true,
        Some(c) if c.is_ascii_alphabetic() => {
            chars.all(|c| c.is_ascii_alphanumeric() || matches!(c, '_' | '-' | '.'))
                && !prefix.ends_with('.')
        }
        Some(_) => false,
    }
}

/// Local parts start with a letter, digit or `_`; later characters may also be
/// `-` or `.`, and the last character is never `.`. Letters may be non-ASCII.
pub fn is_valid_local(local: &str) -> bool {
    let mut chars = local.chars();
    match chars.next() {
        Some(c) if is_local_start(c) => chars.all(is_local_continue) && !local.ends_with('.'),
        _ => false,
    }
}

pub(crate) fn is_local_start(c: char) -> bool {
    c.is_alphanumeric() || c == '_'
}

pub(crate) fn is_local_continue(c: char) -> bool {
    c.is_alphanumeric() || matches!(c, '_' | '-' | '.')
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_prefixed_names() {
        let q: QualifiedName = "ex:dashboard".parse().unwrap();
        assert_eq!(q.prefix(), "ex");
        assert_eq!(q.local(), "dashboard");
        assert_eq!(q.to_string(), "ex:dashboard");

        let unicode: QualifiedName = "ex:Óbitos-novos".parse().unwrap();
        assert_eq!(unicode.local(), "Óbitos-novos");

        let default_prefix: QualifiedName = ":dashboard".parse().unwrap();
        assert_eq!(default_prefix.prefix(), "");
    }

    #[test]
    fn rejects_bad_locals() {
        for bad in ["ex:", "ex:has space", "ex:trailing.", "ex:-dash", "nocolon", "1x:a", "ex:a:b"] {
            assert!(bad.parse::<QualifiedName>().is_err(), "{bad} should be rejected");
        }
    }

    #[test]
    fn equality_is_case_sensitive() {
        let a: QualifiedName = "ex:Casos".parse().unwrap();
        let b: QualifiedName = "ex:casos".parse().unwrap();
        assert_ne!(a, b);
    }
}
