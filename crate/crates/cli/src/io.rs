//! File access with path and line context in every error.

use std::fmt;
use std::fs;
use std::path::Path;

use anyhow::Context;
use ontodomain_core::jsonl::{read_jsonl, read_posts, write_jsonl, JsonlError};
use ontodomain_core::ontology::{declared_domain, OntologyError};
use ontodomain_core::rdf::{parse_ntriples, ParseError};
use ontodomain_core::{Ontology, Post, Triple};
use serde::de::DeserializeOwned;
use serde::Serialize;

/// Bad invocation: missing input, malformed flag value. Exits with 1.
#[derive(Debug)]
pub struct UsageError(pub String);

impl fmt::Display for UsageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

pub fn usage<T>(msg: impl Into<String>) -> anyhow::Result<T> {
    Err(UsageError(msg.into()).into())
}

pub fn read_text(path: &Path) -> anyhow::Result<String> {
    fs::read_to_string(path).with_context(|| format!("{}: cannot read", path.display()))
}

pub fn write_text(path: &Path, text: &str) -> anyhow::Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).with_context(|| format!("{}: cannot create directory", dir.display()))?;
    }
    fs::write(path, text).with_context(|| format!("{}: cannot write", path.display()))
}

fn jsonl_err(path: &Path, e: JsonlError) -> anyhow::Error {
    anyhow::anyhow!("{}:{}: {}", path.display(), e.line, e.message)
}

fn nt_err(path: &Path, e: ParseError) -> anyhow::Error {
    anyhow::anyhow!("{}:{}: {}", path.display(), e.line, e.reason)
}

pub fn posts_from(path: &Path, text: &str) -> anyhow::Result<Vec<Post>> {
    read_posts(text).map_err(|e| jsonl_err(path, e))
}

pub fn records_from<T: DeserializeOwned>(path: &Path, text: &str) -> anyhow::Result<Vec<T>> {
    read_jsonl(text).map_err(|e| jsonl_err(path, e))
}

pub fn read_records<T: DeserializeOwned>(path: &Path) -> anyhow::Result<Vec<T>> {
    records_from(path, &read_text(path)?)
}

pub fn write_records<T: Serialize>(path: &Path, items: &[T]) -> anyhow::Result<()> {
    write_text(path, &write_jsonl(items))
}

pub fn triples_from(path: &Path, text: &str) -> anyhow::Result<Vec<Triple>> {
    parse_ntriples(text).map_err(|e| nt_err(path, e))
}

/// Domain comes from the file's declaration, else from its file stem.
pub fn load_ontology(path: &Path) -> anyhow::Result<Ontology> {
    let triples = triples_from(path, &read_text(path)?)?;
    let domain = match declared_domain(&triples) {
        Some(d) => d,
        None => path.file_stem().map(|s| s.to_string_lossy().to_lowercase()).unwrap_or_default(),
    };
    Ontology::build(&triples, &domain).map_err(|e| match e {
        OntologyError::Parse(p) => nt_err(path, p),
        other => anyhow::anyhow!("{}: {other}", path.display()),
    })
}
