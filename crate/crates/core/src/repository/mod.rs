//! Embedded triple store with single-pattern queries.
//!
//! Only base triples are stored. Two entailments are answered at query time:
//! `owl:sameAs` is symmetric, and `rdf:type` lifts along `rdfs:subClassOf`
//! chains when the predicate is bound to `rdf:type`.

mod query;

use std::collections::{BTreeMap, BTreeSet, HashSet, VecDeque};
use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::rdf::{self, vocab, Iri, ParseError, Term, Triple};

pub use query::{parse_query, QueryError};

/// A triple pattern; `None` is a wildcard.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct Pattern {
    pub subject: Option<Iri>,
    pub predicate: Option<Iri>,
    pub object: Option<Term>,
}

impl Pattern {
    pub fn new(subject: Option<Iri>, predicate: Option<Iri>, object: Option<Term>) -> Self {
        Pattern { subject, predicate, object }
    }

    pub fn describe(subject: Iri) -> Self {
        Pattern { subject: Some(subject), ..Default::default() }
    }

    pub fn matches(&self, t: &Triple) -> bool {
        self.subject.as_ref().is_none_or(|s| *s == t.subject)
            && self.predicate.as_ref().is_none_or(|p| *p == t.predicate)
            && self.object.as_ref().is_none_or(|o| *o == t.object)
    }
}

#[derive(Debug, Error)]
pub enum RepositoryError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error("{path}: {source}")]
    Parse { path: PathBuf, source: ParseError },
}

/// One result row as served over HTTP: IRIs bare, literals quoted.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QueryRow {
    pub s: String,
    pub p: String,
    pub o: String,
}

impl From<&Triple> for QueryRow {
    fn from(t: &Triple) -> Self {
        QueryRow { s: t.subject.to_string(), p: t.predicate.to_string(), o: t.object.to_string() }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Repository {
    base: BTreeSet<Triple>,
    by_subject: BTreeMap<Iri, BTreeSet<Triple>>,
}

impl Repository {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_triples(triples: impl IntoIterator<Item = Triple>) -> Self {
        let mut repo = Repository::new();
        repo.insert(triples);
        repo
    }

    /// Adds triples with set semantics; returns how many were new.
    pub fn insert(&mut self, triples: impl IntoIterator<Item = Triple>) -> usize {
        let mut added = 0;
        for t in triples {
            if self.base.insert(t.clone()) {
                self.by_subject.entry(t.subject.clone()).or_default().insert(t);
                added += 1;
            }
        }
        added
    }

    pub fn len(&self) -> usize {
        self.base.len()
    }

    pub fn is_empty(&self) -> bool {
        self.base.is_empty()
    }

    /// Stored triples in (s, p, o) order, without inferred ones.
    pub fn base_triples(&self) -> impl Iterator<Item = &Triple> {
        self.base.iter()
    }

    fn candidates<'s>(&'s self, subject: Option<&Iri>) -> Box<dyn Iterator<Item = &'s Triple> + 's> {
        match subject {
            Some(s) => Box::new(self.by_subject.get(s).into_iter().flatten()),
            None => Box::new(self.base.iter()),
        }
    }

    /// Matching triples, base and inferred, sorted by (s, p, o).
    pub fn query(&self, pattern: &Pattern) -> Vec<Triple> {
        let mut out: BTreeSet<Triple> =
            self.candidates(pattern.subject.as_ref()).filter(|t| pattern.matches(t)).cloned().collect();

        let same_as = vocab::owl_same_as();
        if pattern.predicate.as_ref().is_none_or(|p| *p == same_as) {
            // (a sameAs b) answers (b sameAs a); scan by object when the subject is bound.
            for t in self.base.iter().filter(|t| t.predicate == same_as) {
                if let Term::Iri(b) = &t.object {
                    let flipped = Triple::new(b.clone(), same_as.clone(), t.subject.clone());
                    if pattern.matches(&flipped) {
                        out.insert(flipped);
                    }
                }
            }
        }

        let rdf_type = vocab::rdf_type();
        if pattern.predicate.as_ref() == Some(&rdf_type) {
            let typings: Vec<&Triple> =
                self.candidates(pattern.subject.as_ref()).filter(|t| t.predicate == rdf_type).collect();
            for t in typings {
                let Term::Iri(class) = &t.object else { continue };
                for sup in self.superclasses(class) {
                    let lifted = Triple::new(t.subject.clone(), rdf_type.clone(), sup);
                    if pattern.matches(&lifted) {
                        out.insert(lifted);
                    }
                }
            }
        }
        out.into_iter().collect()
    }

    /// Strict `rdfs:subClassOf+` ancestors of `class` over stored triples.
    fn superclasses(&self, class: &Iri) -> Vec<Iri> {
        let sub = vocab::rdfs_subclass_of();
        let mut seen: HashSet<Iri> = HashSet::new();
        let mut queue = VecDeque::from([class.clone()]);
        let mut out = Vec::new();
        while let Some(c) = queue.pop_front() {
            for t in self.by_subject.get(&c).into_iter().flatten().filter(|t| t.predicate == sub) {
                if let Term::Iri(parent) = &t.object
                    && parent != class
                    && seen.insert(parent.clone())
                {
                    out.push(parent.clone());
                    queue.push_back(parent.clone());
                }
            }
        }
        out
    }

    pub fn describe(&self, subject: &Iri) -> Vec<Triple> {
        self.query(&Pattern::describe(subject.clone()))
    }

    /// Parses and runs a query string.
    pub fn run_query(&self, text: &str) -> Result<Vec<Triple>, QueryError> {
        Ok(self.query(&parse_query(text)?))
    }

    pub fn to_ntriples(&self) -> String {
        rdf::serialize_ntriples(self.base.iter())
    }

    pub fn from_ntriples(text: &str) -> Result<Self, ParseError> {
        Ok(Repository::from_triples(rdf::parse_ntriples(text)?))
    }

    /// Writes the base triples via a temporary file and rename.
    pub fn persist(&self, path: &Path) -> Result<(), RepositoryError> {
        let io_err = |source| RepositoryError::Io { path: path.to_path_buf(), source };
        let mut tmp = path.as_os_str().to_owned();
        tmp.push(".tmp");
        let tmp = PathBuf::from(tmp);
        fs::write(&tmp, self.to_ntriples()).map_err(io_err)?;
        fs::rename(&tmp, path).map_err(io_err)
    }

    pub fn load(path: &Path) -> Result<Self, RepositoryError> {
        let text = fs::read_to_string(path).map_err(|source| RepositoryError::Io { path: path.to_path_buf(), source })?;
        Repository::from_ntriples(&text).map_err(|source| RepositoryError::Parse { path: path.to_path_buf(), source })
    }

    /// Replaces the contents with the file's; on any error the store is unchanged.
    pub fn reload(&mut self, path: &Path) -> Result<(), RepositoryError> {
        *self = Repository::load(path)?;
        Ok(())
    }
}
