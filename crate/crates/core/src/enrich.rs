//! Enrichment triples for annotated instances and `owl:sameAs` interlinking.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::annotate::{EntityAnnotation, MergedEntity, Source};
use crate::ontology::{ElementKind, Ontology};
use crate::rdf::{self, vocab, Iri, ParseError, Term, Triple};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EnrichError {
    #[error("{element} is annotated as {kind:?}, not an instance")]
    NotAnInstance { element: Iri, kind: ElementKind },
    #[error("{0} is not an instance of the ontology")]
    UnknownInstance(Iri),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LinkTableError {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("line {line}: link table holds only owl:sameAs statements between IRIs")]
    NotSameAs { line: usize },
    #[error("{0} is linked to itself")]
    SelfLink(Iri),
}

/// Instance IRI → equivalent IRIs in external vocabularies.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct LinkTable {
    links: BTreeMap<Iri, BTreeSet<Iri>>,
}

impl LinkTable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_ntriples(text: &str) -> Result<Self, LinkTableError> {
        let mut table = LinkTable::new();
        for (idx, t) in rdf::parse_ntriples(text)?.into_iter().enumerate() {
            let target = match (&t.object, t.predicate.as_str() == vocab::OWL_SAME_AS) {
                (Term::Iri(o), true) => o.clone(),
                _ => return Err(LinkTableError::NotSameAs { line: statement_line(text, idx) }),
            };
            table.insert(t.subject, target)?;
        }
        Ok(table)
    }

    pub fn insert(&mut self, instance: Iri, target: Iri) -> Result<bool, LinkTableError> {
        if instance == target {
            return Err(LinkTableError::SelfLink(instance));
        }
        Ok(self.links.entry(instance).or_default().insert(target))
    }

    /// Adds the `owl:sameAs` statements carried by the ontology itself.
    pub fn merge_ontology(&mut self, o: &Ontology) {
        for inst in o.instances().values() {
            for target in inst.same_as.iter().filter(|t| **t != inst.iri) {
                self.links.entry(inst.iri.clone()).or_default().insert(target.clone());
            }
        }
    }

    pub fn get(&self, instance: &Iri) -> Option<&BTreeSet<Iri>> {
        self.links.get(instance)
    }

    pub fn len(&self) -> usize {
        self.links.values().map(BTreeSet::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.links.is_empty()
    }
}

/// 1-based source line of the `idx`-th statement (comments and blanks skipped).
fn statement_line(text: &str, idx: usize) -> usize {
    text.lines()
        .enumerate()
        .filter(|(_, l)| {
            let l = l.trim();
            !l.is_empty() && !l.starts_with('#')
        })
        .nth(idx)
        .map(|(n, _)| n + 1)
        .unwrap_or(0)
}

/// Type, directly asserted superclasses, resolved name, data properties and
/// primary surface form of an annotated instance.
pub fn enrich(ann: &EntityAnnotation, o: &Ontology) -> Result<Vec<Triple>, EnrichError> {
    if ann.kind != ElementKind::Instance {
        return Err(EnrichError::NotAnInstance { element: ann.element.clone(), kind: ann.kind });
    }
    let inst = o.instance(&ann.element).ok_or_else(|| EnrichError::UnknownInstance(ann.element.clone()))?;
    let s = &inst.iri;
    let mut out = vec![Triple::new(s.clone(), vocab::rdf_type(), inst.concept.clone())];
    for sup in &inst.asserted_superclasses {
        out.push(Triple::new(s.clone(), vocab::rdfs_subclass_of(), sup.clone()));
    }
    out.push(Triple::new(s.clone(), vocab::onto_resolved_name(), Term::literal(&inst.resolved_name)));
    for (p, v) in &inst.data_properties {
        out.push(Triple::new(s.clone(), p.clone(), Term::literal(v)));
    }
    if let Some(form) = inst.primary_form.as_ref().or_else(|| inst.surface_forms.first()) {
        out.push(Triple::new(s.clone(), vocab::onto_value(), Term::literal(form)));
    }
    Ok(out)
}

pub fn interlink(instance: &Iri, links: &LinkTable) -> Vec<Triple> {
    links
        .get(instance)
        .into_iter()
        .flatten()
        .map(|target| Triple::new(instance.clone(), vocab::owl_same_as(), target.clone()))
        .collect()
}

/// Enrichment and links for every instance annotation plus a provenance
/// triple per relation trigger, deduplicated and sorted. Annotations naming
/// elements of another ontology are left to that ontology's pass.
pub fn enrich_post(post_id: &str, anns: &[EntityAnnotation], o: &Ontology, links: &LinkTable) -> Vec<Triple> {
    let mut out = BTreeSet::new();
    for ann in anns {
        match ann.kind {
            ElementKind::Instance if o.instance(&ann.element).is_some() => {
                out.extend(enrich(ann, o).expect("instance checked above"));
                out.extend(interlink(&ann.element, links));
            }
            ElementKind::RelationTrigger if o.relation(&ann.element).is_some() => {
                out.insert(Triple::new(vocab::post_iri(post_id), vocab::onto_trigger(), ann.element.clone()));
            }
            _ => {}
        }
    }
    out.into_iter().collect()
}

/// Type and surface of entities only the external classifier found, minted
/// under `onto:entity/`.
pub fn external_entity_triples(merged: &[MergedEntity]) -> Vec<Triple> {
    let mut out = BTreeSet::new();
    for m in merged.iter().filter(|m| m.source == Source::External) {
        let subject = vocab::external_entity_iri(&m.surface);
        let class: String = m.type_label.chars().filter(|c| c.is_ascii_alphanumeric()).collect();
        if !class.is_empty() {
            out.insert(Triple::new(subject.clone(), vocab::rdf_type(), vocab::onto(&class)));
        }
        out.insert(Triple::new(subject, vocab::onto_value(), Term::literal(&m.surface)));
    }
    out.into_iter().collect()
}
