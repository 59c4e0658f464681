//! Per-user domain knowledge inference.
//!
//! During start-up every confident taxonomy label of a post names a domain
//! and bumps that user's history. Once a user has enough history the learning
//! stage ranks the historic domains by post count and picks the top ontologies.

use std::collections::BTreeMap;
use std::fmt;
use std::num::NonZeroUsize;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ontology::Ontology;
use crate::taxonomy::{top_level_domain, TaxonomyLabel};

pub const DEFAULT_MIN_POSTS: u64 = 10;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("invalid domain label {0:?}")]
pub struct InvalidDomain(pub String);

/// Lowercase, trimmed, non-empty domain name.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct DomainLabel(String);

impl DomainLabel {
    pub fn new(name: &str) -> Result<Self, InvalidDomain> {
        let norm = name.trim().to_lowercase();
        if norm.is_empty() {
            return Err(InvalidDomain(name.to_string()));
        }
        Ok(DomainLabel(norm))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl TryFrom<String> for DomainLabel {
    type Error = InvalidDomain;
    fn try_from(value: String) -> Result<Self, Self::Error> {
        DomainLabel::new(&value)
    }
}

impl From<DomainLabel> for String {
    fn from(d: DomainLabel) -> String {
        d.0
    }
}

impl fmt::Display for DomainLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct UserDomainHistory {
    #[serde(skip)]
    pub user_id: String,
    #[serde(default)]
    pub counts: BTreeMap<DomainLabel, u64>,
    /// Domains fixed for a user whose interests are known up front; when
    /// present they replace ranking.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub pinned: Vec<DomainLabel>,
}

impl UserDomainHistory {
    pub fn new(user_id: impl Into<String>) -> Self {
        UserDomainHistory { user_id: user_id.into(), ..Default::default() }
    }

    pub fn total(&self) -> u64 {
        self.counts.values().sum()
    }
}

/// Start-up stage: maps confident labels to their top-level domains
/// (deduplicated, in order) and counts each once in the user's history.
pub fn startup_infer(history: &mut UserDomainHistory, labels: &[TaxonomyLabel]) -> Vec<DomainLabel> {
    let mut domains: Vec<DomainLabel> = Vec::new();
    for label in labels {
        // Labels are validated upstream; skip anything that slipped through.
        let Ok(domain) = top_level_domain(&label.path) else {
            continue;
        };
        if !domains.contains(&domain) {
            domains.push(domain);
        }
    }
    for d in &domains {
        *history.counts.entry(d.clone()).or_insert(0) += 1;
    }
    domains
}

/// Domains by descending count, ties broken by name.
pub fn rank_domains(history: &UserDomainHistory) -> Vec<(DomainLabel, u64)> {
    let mut ranked: Vec<(DomainLabel, u64)> = history.counts.iter().map(|(d, c)| (d.clone(), *c)).collect();
    ranked.sort_by(|(da, ca), (db, cb)| cb.cmp(ca).then_with(|| da.cmp(db)));
    ranked
}

/// Learning stage: the top-`k` ranked domains that have a registered
/// ontology. Unregistered domains are skipped without using up a slot.
pub fn select_ontologies<'r>(
    history: &UserDomainHistory,
    registry: &'r OntologyRegistry,
    k: NonZeroUsize,
) -> Vec<&'r Ontology> {
    let candidates: Vec<DomainLabel> = if history.pinned.is_empty() {
        rank_domains(history).into_iter().map(|(d, _)| d).collect()
    } else {
        history.pinned.clone()
    };
    candidates.iter().filter_map(|d| registry.get(d)).take(k.get()).collect()
}

pub fn is_learning_ready(history: &UserDomainHistory, min_posts: u64) -> bool {
    history.total() >= min_posts
}

#[derive(Debug, Clone, Default)]
pub struct OntologyRegistry {
    ontologies: BTreeMap<DomainLabel, Ontology>,
}

impl OntologyRegistry {
    pub fn new() -> Self {
        Self::default()
    }

    /// Registers under the ontology's own domain name, replacing any previous one.
    pub fn register(&mut self, ontology: Ontology) -> Result<(), InvalidDomain> {
        let key = DomainLabel::new(ontology.domain_name())?;
        self.ontologies.insert(key, ontology);
        Ok(())
    }

    pub fn get(&self, domain: &DomainLabel) -> Option<&Ontology> {
        self.ontologies.get(domain)
    }

    pub fn get_by_name(&self, name: &str) -> Option<&Ontology> {
        DomainLabel::new(name).ok().and_then(|d| self.ontologies.get(&d))
    }

    pub fn contains(&self, domain: &DomainLabel) -> bool {
        self.ontologies.contains_key(domain)
    }

    pub fn len(&self) -> usize {
        self.ontologies.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ontologies.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &Ontology> {
        self.ontologies.values()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Stage {
    Startup,
    Learning,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Inference {
    pub stage: Stage,
    /// Domains named by this post's confident labels.
    pub domains: Vec<DomainLabel>,
    /// Domains whose ontologies are selected for enrichment of this post.
    pub selected: Vec<DomainLabel>,
}

/// One post through both stages: the stage is decided from the history
/// *before* the post is recorded, then the post is recorded either way.
pub fn infer_for_post(
    history: &mut UserDomainHistory,
    labels: &[TaxonomyLabel],
    registry: &OntologyRegistry,
    min_posts: u64,
    top_k: NonZeroUsize,
) -> Inference {
    let learning = !history.pinned.is_empty() || is_learning_ready(history, min_posts);
    let selected_learning: Vec<DomainLabel> = if learning {
        select_ontologies(history, registry, top_k)
            .into_iter()
            .filter_map(|o| DomainLabel::new(o.domain_name()).ok())
            .collect()
    } else {
        Vec::new()
    };
    let domains = startup_infer(history, labels);
    if learning {
        Inference { stage: Stage::Learning, domains, selected: selected_learning }
    } else {
        let selected = domains.iter().filter(|d| registry.contains(d)).cloned().collect();
        Inference { stage: Stage::Startup, domains, selected }
    }
}

#[derive(Debug, Error)]
pub enum HistoryError {
    #[error("malformed history file: {0}")]
    Malformed(#[from] serde_json::Error),
}

/// All users' histories; serialized as `{user_id: {"counts": {...}, "pinned": [...]}}`.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct HistoryStore {
    users: BTreeMap<String, UserDomainHistory>,
}

impl HistoryStore {
    pub fn from_json(text: &str) -> Result<Self, HistoryError> {
        let mut users: BTreeMap<String, UserDomainHistory> = serde_json::from_str(text)?;
        for (id, h) in users.iter_mut() {
            h.user_id = id.clone();
        }
        Ok(HistoryStore { users })
    }

    pub fn to_json(&self) -> String {
        let mut out = serde_json::to_string_pretty(&self.users).expect("history serializes");
        out.push('\n');
        out
    }

    pub fn get(&self, user_id: &str) -> Option<&UserDomainHistory> {
        self.users.get(user_id)
    }

    pub fn entry(&mut self, user_id: &str) -> &mut UserDomainHistory {
        self.users.entry(user_id.to_string()).or_insert_with(|| UserDomainHistory::new(user_id))
    }

    pub fn users(&self) -> impl Iterator<Item = &UserDomainHistory> {
        self.users.values()
    }
}
