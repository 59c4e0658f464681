//! Minimal RDF model: IRIs, terms and triples, plus the line-oriented
//! N-Triples subset used for ontologies, link tables and repository files.

mod ntriples;
pub mod vocab;

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use ntriples::{parse_ntriples, serialize_ntriples, ParseError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("invalid IRI {value:?}: {reason}")]
pub struct InvalidIri {
    pub value: String,
    pub reason: &'static str,
}

/// An absolute IRI (`scheme ":" rest`).
///
/// Characters that cannot appear inside an N-Triples `<...>` reference are
/// rejected so every `Iri` serializes losslessly.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct Iri(String);

impl Iri {
    pub fn new(value: impl Into<String>) -> Result<Self, InvalidIri> {
        let value = value.into();
        match check_iri(&value) {
            Ok(()) => Ok(Iri(value)),
            Err(reason) => Err(InvalidIri { value, reason }),
        }
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    /// The fragment after `#`, or the last path segment, or the whole IRI.
    pub fn local_name(&self) -> &str {
        let s = self.0.as_str();
        if let Some(idx) = s.rfind('#')
            && idx + 1 < s.len()
        {
            return &s[idx + 1..];
        }
        match s.trim_end_matches('/').rsplit_once('/') {
            Some((_, last)) if !last.is_empty() => last,
            _ => s,
        }
    }
}

fn check_iri(value: &str) -> Result<(), &'static str> {
    if value.is_empty() {
        return Err("empty");
    }
    let Some((scheme, _)) = value.split_once(':') else {
        return Err("missing scheme");
    };
    let mut chars = scheme.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() => {}
        _ => return Err("scheme must start with a letter"),
    }
    if !chars.all(|c| c.is_ascii_alphanumeric() || matches!(c, '+' | '-' | '.')) {
        return Err("invalid scheme character");
    }
    if value
        .chars()
        .any(|c| c.is_whitespace() || c.is_control() || matches!(c, '<' | '>' | '"' | '{' | '}' | '|' | '\\' | '^' | '`'))
    {
        return Err("forbidden character");
    }
    Ok(())
}

impl TryFrom<String> for Iri {
    type Error = InvalidIri;
    fn try_from(value: String) -> Result<Self, Self::Error> {
        Iri::new(value)
    }
}

impl From<Iri> for String {
    fn from(iri: Iri) -> String {
        iri.0
    }
}

impl fmt::Display for Iri {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// Object position of a triple. IRIs order before literals.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Term {
    Iri(Iri),
    Literal(String),
}

impl Term {
    pub fn literal(value: impl Into<String>) -> Self {
        Term::Literal(value.into())
    }

    pub fn as_iri(&self) -> Option<&Iri> {
        match self {
            Term::Iri(iri) => Some(iri),
            Term::Literal(_) => None,
        }
    }

    pub fn as_literal(&self) -> Option<&str> {
        match self {
            Term::Literal(s) => Some(s),
            Term::Iri(_) => None,
        }
    }
}

impl From<Iri> for Term {
    fn from(iri: Iri) -> Self {
        Term::Iri(iri)
    }
}

/// Renders IRIs bare and literals quoted, the way query results are displayed.
impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Iri(iri) => f.write_str(iri.as_str()),
            Term::Literal(s) => write!(f, "\"{}\"", ntriples::escape_literal(s)),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Triple {
    pub subject: Iri,
    pub predicate: Iri,
    pub object: Term,
}

impl Triple {
    pub fn new(subject: Iri, predicate: Iri, object: impl Into<Term>) -> Self {
        Triple {
            subject,
            predicate,
            object: object.into(),
        }
    }
}
