//! Lexicon annotation of cleansed posts, merging with classifier entities,
//! per-post domain classification and the four-way category partition.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::domain::DomainLabel;
use crate::ontology::{ElementKind, Lexicon, Ontology};
use crate::rdf::Iri;
use crate::taxonomy::{top_level_domain, ExternalEntity, TaxonomyLabel};
use crate::text::CleanText;

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct EntityAnnotation {
    /// Byte range `[start, end)` into the cleansed text.
    pub span: (usize, usize),
    pub surface: String,
    pub kind: ElementKind,
    pub element: Iri,
    /// The instance's concept, the concept itself, or the relation for triggers.
    pub concept: Option<Iri>,
}

impl EntityAnnotation {
    /// Name shown for the annotation's type: concept local name, or the
    /// relation name for triggers.
    pub fn type_label(&self) -> &str {
        self.concept.as_ref().unwrap_or(&self.element).local_name()
    }
}

/// Reusable matcher; builds the lexicon once per ontology.
pub struct Annotator<'o> {
    ontology: &'o Ontology,
    lexicon: Lexicon,
}

impl<'o> Annotator<'o> {
    pub fn new(ontology: &'o Ontology) -> Self {
        Annotator { ontology, lexicon: ontology.lexicon() }
    }

    pub fn ontology(&self) -> &'o Ontology {
        self.ontology
    }

    pub fn lexicon(&self) -> &Lexicon {
        &self.lexicon
    }

    /// Leftmost-longest greedy match of token n-grams against the lexicon.
    pub fn annotate(&self, text: &CleanText) -> Vec<EntityAnnotation> {
        let tokens = &text.tokens;
        let lowered: Vec<String> = tokens.iter().map(|t| t.text.to_lowercase()).collect();
        let max_n = self.lexicon.max_tokens();
        let mut out = Vec::new();
        let mut i = 0;
        while i < tokens.len() {
            let longest = max_n.min(tokens.len() - i);
            let hit = (1..=longest).rev().find_map(|n| {
                let key = lowered[i..i + n].join(" ");
                self.lexicon.get(&key).and_then(|b| b.first()).map(|b| (n, b))
            });
            let Some((n, binding)) = hit else {
                i += 1;
                continue;
            };
            let start = tokens[i].offset;
            let end = tokens[i + n - 1].end();
            let concept = match binding.kind {
                ElementKind::Instance => self.ontology.instance(&binding.element).map(|inst| inst.concept.clone()),
                ElementKind::Concept | ElementKind::RelationTrigger => Some(binding.element.clone()),
            };
            out.push(EntityAnnotation {
                span: (start, end),
                surface: text.text[start..end].to_string(),
                kind: binding.kind,
                element: binding.element.clone(),
                concept,
            });
            i += n;
        }
        out
    }
}

pub fn annotate(text: &CleanText, o: &Ontology) -> Vec<EntityAnnotation> {
    Annotator::new(o).annotate(text)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Source {
    External,
    Ontology,
    Both,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct MergedEntity {
    pub surface: String,
    #[serde(rename = "type")]
    pub type_label: String,
    pub source: Source,
}

/// Union of classifier entities and annotations keyed by lowercase surface,
/// sorted by that key. Where both sources name a surface the ontology type wins.
pub fn merge_entities(external: &[ExternalEntity], anns: &[EntityAnnotation]) -> Vec<MergedEntity> {
    let mut sorted_external: Vec<&ExternalEntity> = external.iter().collect();
    sorted_external.sort_by(|a, b| {
        (a.surface.to_lowercase(), &a.surface, &a.entity_type).cmp(&(b.surface.to_lowercase(), &b.surface, &b.entity_type))
    });
    let mut merged: BTreeMap<String, MergedEntity> = BTreeMap::new();
    for e in sorted_external {
        merged.entry(e.surface.to_lowercase()).or_insert_with(|| MergedEntity {
            surface: e.surface.clone(),
            type_label: e.entity_type.clone(),
            source: Source::External,
        });
    }
    let mut sorted_anns: Vec<&EntityAnnotation> = anns.iter().collect();
    sorted_anns.sort_by(|a, b| (a.surface.to_lowercase(), a.kind, &a.element).cmp(&(b.surface.to_lowercase(), b.kind, &b.element)));
    for ann in sorted_anns {
        let key = ann.surface.to_lowercase();
        match merged.get_mut(&key) {
            Some(m) if m.source == Source::External => {
                m.type_label = ann.type_label().to_string();
                m.source = Source::Both;
            }
            Some(_) => {}
            None => {
                merged.insert(key, MergedEntity {
                    surface: ann.surface.clone(),
                    type_label: ann.type_label().to_string(),
                    source: Source::Ontology,
                });
            }
        }
    }
    merged.into_values().collect()
}

/// Top-level domains of the taxonomies, with the ontology's domain appended
/// when it annotated anything.
pub fn classify_post_domains(taxonomies: &[TaxonomyLabel], anns: &[EntityAnnotation], o: &Ontology) -> Vec<DomainLabel> {
    let mut out: Vec<DomainLabel> = Vec::new();
    for label in taxonomies {
        if let Ok(d) = top_level_domain(&label.path)
            && !out.contains(&d)
        {
            out.push(d);
        }
    }
    if !anns.is_empty()
        && let Ok(d) = DomainLabel::new(o.domain_name())
        && !out.contains(&d)
    {
        out.push(d);
    }
    out
}

/// Whether any confident taxonomy maps onto the ontology's domain.
pub fn classifier_says_domain(taxonomies: &[TaxonomyLabel], o: &Ontology) -> bool {
    taxonomies
        .iter()
        .filter_map(|l| top_level_domain(&l.path).ok())
        .any(|d| d.as_str() == o.domain_name())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "u8", into = "u8")]
pub enum Category {
    /// Classifier and ontology both place the post in the domain.
    One = 1,
    /// Only the ontology does.
    Two = 2,
    /// Only the classifier does.
    Three = 3,
    Four = 4,
}

impl Category {
    pub const ALL: [Category; 4] = [Category::One, Category::Two, Category::Three, Category::Four];

    pub fn value(self) -> u8 {
        self as u8
    }
}

impl TryFrom<u8> for Category {
    type Error = String;
    fn try_from(v: u8) -> Result<Self, Self::Error> {
        match v {
            1 => Ok(Category::One),
            2 => Ok(Category::Two),
            3 => Ok(Category::Three),
            4 => Ok(Category::Four),
            other => Err(format!("category must be 1-4, got {other}")),
        }
    }
}

impl From<Category> for u8 {
    fn from(c: Category) -> u8 {
        c.value()
    }
}

impl fmt::Display for Category {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value())
    }
}

pub fn category_of(classifier_says_domain: bool, ontology_annotates: bool) -> Category {
    match (classifier_says_domain, ontology_annotates) {
        (true, true) => Category::One,
        (false, true) => Category::Two,
        (true, false) => Category::Three,
        (false, false) => Category::Four,
    }
}

/// One line of the annotation dump.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnnotatedPost {
    pub id: String,
    pub domains: Vec<DomainLabel>,
    pub category: Category,
    pub annotations: Vec<EntityAnnotation>,
    pub merged: Vec<MergedEntity>,
}

impl AnnotatedPost {
    /// Annotates one post against `target` (which also decides the category)
    /// and any further selected ontologies.
    pub fn build(
        id: &str,
        text: &CleanText,
        taxonomies: &[TaxonomyLabel],
        external: &[ExternalEntity],
        target: &Annotator<'_>,
        others: &[&Annotator<'_>],
    ) -> Self {
        let target_anns = target.annotate(text);
        let mut domains = classify_post_domains(taxonomies, &target_anns, target.ontology());
        let category = category_of(classifier_says_domain(taxonomies, target.ontology()), !target_anns.is_empty());
        let mut annotations = target_anns;
        for other in others {
            if other.ontology().domain_name() == target.ontology().domain_name() {
                continue;
            }
            let anns = other.annotate(text);
            if !anns.is_empty()
                && let Ok(d) = DomainLabel::new(other.ontology().domain_name())
                && !domains.contains(&d)
            {
                domains.push(d);
            }
            annotations.extend(anns);
        }
        annotations.sort();
        annotations.dedup();
        let merged = merge_entities(external, &annotations);
        AnnotatedPost { id: id.to_string(), domains, category, annotations, merged }
    }
}
