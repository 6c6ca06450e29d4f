//! Test support: random documents, brute-force oracles, a DOT grammar
//! checker and the fixture corpus with its single-rule mutants.

pub mod dot;
pub mod fixtures;
pub mod gen;
pub mod oracle;

use dashprov::QualifiedName;

/// Parses `prefix:local`, panicking on malformed input.
pub fn q(s: &str) -> QualifiedName {
    s.parse().unwrap_or_else(|e| panic!("bad test name `{s}`: {e}"))
}
