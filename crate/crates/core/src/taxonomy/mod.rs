//! External taxonomy/entity classifier contract.
//!
//! Two backends implement [`Classifier`]: [`FixtureClassifier`] replays
//! recorded responses keyed by post id, and [`HttpClassifier`] talks to a live
//! service speaking the same JSON schema.

mod http;

use std::collections::HashMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::domain::DomainLabel;

pub use http::{HttpClassifier, HttpConfig};

/// Labels must score strictly above this to be kept.
pub const CONFIDENCE_THRESHOLD: f64 = 0.4;
pub const MAX_TAXONOMIES: usize = 3;

#[derive(Debug, Error)]
pub enum ClassifierError {
    #[error("no recorded classifier response for post {0:?}")]
    MissingFixture(String),
    #[error("classifier transport error: {0}")]
    Transport(String),
    #[error("malformed classifier data: {0}")]
    Malformed(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("malformed taxonomy path {0:?}")]
pub struct MalformedPath(pub String);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Confidence {
    Yes,
    No,
    Unknown,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TaxonomyLabel {
    pub path: String,
    pub score: f64,
    pub confident: Confidence,
}

impl TaxonomyLabel {
    pub fn new(path: impl Into<String>, score: f64, confident: Confidence) -> Result<Self, ClassifierError> {
        let label = TaxonomyLabel { path: path.into(), score, confident };
        label.validate()?;
        Ok(label)
    }

    fn validate(&self) -> Result<(), ClassifierError> {
        if !(0.0..=1.0).contains(&self.score) {
            return Err(ClassifierError::Malformed(format!("score {} outside [0, 1]", self.score)));
        }
        top_level_domain(&self.path).map_err(|e| ClassifierError::Malformed(e.to_string()))?;
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExternalEntity {
    pub surface: String,
    #[serde(rename = "type")]
    pub entity_type: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassifierResponse {
    #[serde(rename = "id")]
    pub post_id: String,
    #[serde(default)]
    pub taxonomies: Vec<TaxonomyLabel>,
    #[serde(default)]
    pub entities: Vec<ExternalEntity>,
}

impl ClassifierResponse {
    /// Validates labels and entities and keeps at most three taxonomies,
    /// preferring higher scores (ties keep input order).
    pub fn normalized(mut self) -> Result<Self, ClassifierError> {
        for label in &self.taxonomies {
            label.validate()?;
        }
        if let Some(e) = self.entities.iter().find(|e| e.surface.trim().is_empty()) {
            return Err(ClassifierError::Malformed(format!("empty entity surface (type {:?})", e.entity_type)));
        }
        if self.taxonomies.len() > MAX_TAXONOMIES {
            let mut ranked: Vec<(usize, TaxonomyLabel)> = self.taxonomies.drain(..).enumerate().collect();
            ranked.sort_by(|(ia, a), (ib, b)| b.score.total_cmp(&a.score).then(ia.cmp(ib)));
            ranked.truncate(MAX_TAXONOMIES);
            ranked.sort_by_key(|(i, _)| *i);
            self.taxonomies = ranked.into_iter().map(|(_, l)| l).collect();
        }
        Ok(self)
    }
}

pub trait Classifier {
    fn classify(&self, post_id: &str, text: &str) -> Result<ClassifierResponse, ClassifierError>;
}

/// Keeps labels scoring strictly above [`CONFIDENCE_THRESHOLD`] whose
/// confidence flag is not `no`, in input order.
pub fn filter_confident(labels: &[TaxonomyLabel]) -> Vec<TaxonomyLabel> {
    labels.iter().filter(|l| is_confident(l)).cloned().collect()
}

pub fn is_confident(label: &TaxonomyLabel) -> bool {
    label.score > CONFIDENCE_THRESHOLD && label.confident != Confidence::No
}

/// First segment of a slash path, lowercased: `/society/work/unions` → `society`.
pub fn top_level_domain(path: &str) -> Result<DomainLabel, MalformedPath> {
    let malformed = || MalformedPath(path.to_string());
    let rest = path.strip_prefix('/').ok_or_else(malformed)?;
    let first = rest.split('/').next().unwrap_or_default().trim();
    if first.is_empty() {
        return Err(malformed());
    }
    DomainLabel::new(first).map_err(|_| malformed())
}

/// Replays recorded responses from a JSON Lines fixture.
#[derive(Debug, Clone, Default)]
pub struct FixtureClassifier {
    responses: HashMap<String, ClassifierResponse>,
}

impl FixtureClassifier {
    pub fn from_jsonl(text: &str) -> Result<Self, ClassifierError> {
        let mut responses = HashMap::new();
        for (idx, line) in text.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let response: ClassifierResponse = serde_json::from_str(line)
                .map_err(|e| ClassifierError::Malformed(format!("line {}: {e}", idx + 1)))?;
            let response = response
                .normalized()
                .map_err(|e| ClassifierError::Malformed(format!("line {}: {e}", idx + 1)))?;
            if responses.insert(response.post_id.clone(), response).is_some() {
                return Err(ClassifierError::Malformed(format!("line {}: duplicate post id", idx + 1)));
            }
        }
        Ok(FixtureClassifier { responses })
    }

    pub fn len(&self) -> usize {
        self.responses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.responses.is_empty()
    }
}

impl Classifier for FixtureClassifier {
    fn classify(&self, post_id: &str, _text: &str) -> Result<ClassifierResponse, ClassifierError> {
        self.responses
            .get(post_id)
            .cloned()
            .ok_or_else(|| ClassifierError::MissingFixture(post_id.to_string()))
    }
}
