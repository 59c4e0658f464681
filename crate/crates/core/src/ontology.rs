//! Domain ontologies assembled from the fixture vocabulary: concepts and their
//! subclass hierarchy, relations with converses, instances with surface forms,
//! and the lexicon the annotator matches against.

use std::collections::{BTreeMap, BTreeSet, HashSet, VecDeque};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::rdf::{self, vocab, Iri, ParseError, Term, Triple};
use crate::text::clean_text;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OntologyError {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("invalid ontology: {0}")]
    Validation(String),
    #[error("unknown concept {0}")]
    UnknownConcept(Iri),
}

fn invalid<T>(reason: impl Into<String>) -> Result<T, OntologyError> {
    Err(OntologyError::Validation(reason.into()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum ElementKind {
    Instance,
    Concept,
    RelationTrigger,
}

impl ElementKind {
    /// Disambiguation rank: instances win over relation triggers over concepts.
    fn priority(self) -> u8 {
        match self {
            ElementKind::Instance => 0,
            ElementKind::RelationTrigger => 1,
            ElementKind::Concept => 2,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Relation {
    pub iri: Iri,
    pub trigger_forms: BTreeSet<String>,
    pub converse: Option<Iri>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instance {
    pub iri: Iri,
    pub concept: Iri,
    pub resolved_name: String,
    /// The `onto:value` literal as written in the source.
    pub primary_form: Option<String>,
    pub surface_forms: BTreeSet<String>,
    pub data_properties: Vec<(Iri, String)>,
    pub same_as: BTreeSet<Iri>,
    /// `rdfs:subClassOf` statements made directly on the individual.
    pub asserted_superclasses: BTreeSet<Iri>,
}

/// An immutable, validated domain ontology.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Ontology {
    domain_name: String,
    concepts: BTreeSet<Iri>,
    concept_forms: BTreeMap<Iri, BTreeSet<String>>,
    subclass_edges: BTreeSet<(Iri, Iri)>,
    relations: BTreeMap<Iri, Relation>,
    instances: BTreeMap<Iri, Instance>,
    instance_links: BTreeSet<(Iri, Iri, Iri)>,
}

/// Lowercased, cleansed form of a label so it lines up with annotator tokens.
pub fn normalize_form(raw: &str) -> String {
    clean_text(raw).text.to_lowercase()
}

/// The `onto:domainTag` literal, if the triples declare one.
pub fn declared_domain(triples: &[Triple]) -> Option<String> {
    triples
        .iter()
        .find(|t| t.predicate.as_str() == vocab::ONTO_DOMAIN_TAG)
        .and_then(|t| t.object.as_literal())
        .map(|s| s.trim().to_lowercase())
}

impl Ontology {
    /// An ontology with no elements.
    pub fn empty(domain_name: &str) -> Self {
        Ontology {
            domain_name: domain_name.trim().to_lowercase(),
            concepts: BTreeSet::new(),
            concept_forms: BTreeMap::new(),
            subclass_edges: BTreeSet::new(),
            relations: BTreeMap::new(),
            instances: BTreeMap::new(),
            instance_links: BTreeSet::new(),
        }
    }

    pub fn from_ntriples(text: &str, domain_name: &str) -> Result<Self, OntologyError> {
        Self::build(&rdf::parse_ntriples(text)?, domain_name)
    }

    /// Assembles and validates an ontology from fixture-vocabulary triples.
    pub fn build(triples: &[Triple], domain_name: &str) -> Result<Self, OntologyError> {
        let domain_name = domain_name.trim().to_lowercase();
        if domain_name.is_empty() {
            return invalid("empty domain name");
        }
        let mut o = Ontology::empty(&domain_name);

        // Declarations first, so statement order in the file does not matter.
        let mut typings: BTreeMap<Iri, Vec<Iri>> = BTreeMap::new();
        for t in triples.iter().filter(|t| t.predicate.as_str() == vocab::RDF_TYPE) {
            let Term::Iri(class) = &t.object else {
                return invalid(format!("rdf:type of {} must be an IRI", t.subject));
            };
            match class.as_str() {
                vocab::OWL_CLASS => {
                    o.concepts.insert(t.subject.clone());
                }
                vocab::OWL_OBJECT_PROPERTY => {
                    o.relations.insert(
                        t.subject.clone(),
                        Relation { iri: t.subject.clone(), trigger_forms: BTreeSet::new(), converse: None },
                    );
                }
                vocab::OWL_NAMED_INDIVIDUAL | vocab::OWL_ONTOLOGY => {}
                _ => typings.entry(t.subject.clone()).or_default().push(class.clone()),
            }
        }
        for (subject, classes) in typings {
            if o.concepts.contains(&subject) || o.relations.contains_key(&subject) {
                return invalid(format!("{subject} is declared both as a class/relation and an individual"));
            }
            if classes.len() > 1 {
                return invalid(format!("individual {subject} has more than one concept"));
            }
            let concept = classes.into_iter().next().expect("non-empty");
            if !o.concepts.contains(&concept) {
                return Err(OntologyError::UnknownConcept(concept));
            }
            o.instances.insert(
                subject.clone(),
                Instance {
                    iri: subject,
                    concept,
                    resolved_name: String::new(),
                    primary_form: None,
                    surface_forms: BTreeSet::new(),
                    data_properties: Vec::new(),
                    same_as: BTreeSet::new(),
                    asserted_superclasses: BTreeSet::new(),
                },
            );
        }

        let mut converses: BTreeMap<Iri, BTreeSet<Iri>> = BTreeMap::new();
        for t in triples.iter().filter(|t| t.predicate.as_str() != vocab::RDF_TYPE) {
            o.apply_statement(t, &domain_name, &mut converses)?;
        }

        for (rel, targets) in &converses {
            if targets.len() > 1 {
                return invalid(format!("relation {rel} has conflicting converses"));
            }
        }
        for (rel, targets) in converses {
            o.relations.get_mut(&rel).expect("checked when recorded").converse = targets.into_iter().next();
        }

        for inst in o.instances.values_mut() {
            if inst.resolved_name.is_empty() {
                inst.resolved_name = inst.iri.local_name().to_string();
            }
        }
        o.check_acyclic()?;
        Ok(o)
    }

    fn apply_statement(
        &mut self,
        t: &Triple,
        domain_name: &str,
        converses: &mut BTreeMap<Iri, BTreeSet<Iri>>,
    ) -> Result<(), OntologyError> {
        let s = &t.subject;
        let literal = t.object.as_literal();
        match t.predicate.as_str() {
            vocab::ONTO_DOMAIN_TAG => {
                let tag = literal.map(|l| l.trim().to_lowercase());
                if tag.as_deref() != Some(domain_name) {
                    return invalid(format!("domainTag {:?} does not match domain {domain_name:?}", t.object));
                }
            }
            vocab::RDFS_SUBCLASS_OF => {
                let Some(parent) = t.object.as_iri() else {
                    return invalid(format!("subClassOf object of {s} must be an IRI"));
                };
                if !self.concepts.contains(parent) {
                    return Err(OntologyError::UnknownConcept(parent.clone()));
                }
                if self.concepts.contains(s) {
                    if s == parent {
                        return invalid(format!("subclass cycle through {s}"));
                    }
                    self.subclass_edges.insert((s.clone(), parent.clone()));
                } else if let Some(inst) = self.instances.get_mut(s) {
                    inst.asserted_superclasses.insert(parent.clone());
                } else {
                    return Err(OntologyError::UnknownConcept(s.clone()));
                }
            }
            vocab::OWL_INVERSE_OF => {
                let Some(other) = t.object.as_iri() else {
                    return invalid(format!("inverseOf object of {s} must be an IRI"));
                };
                for r in [s, other] {
                    if !self.relations.contains_key(r) {
                        return invalid(format!("inverseOf names undeclared relation {r}"));
                    }
                }
                converses.entry(s.clone()).or_default().insert(other.clone());
                converses.entry(other.clone()).or_default().insert(s.clone());
            }
            vocab::ONTO_TRIGGER => {
                let form = required_form(s, literal)?;
                match self.relations.get_mut(s) {
                    Some(rel) => {
                        rel.trigger_forms.insert(form);
                    }
                    None => return invalid(format!("trigger on undeclared relation {s}")),
                }
            }
            vocab::ONTO_VALUE | vocab::ONTO_ALIAS => {
                let form = required_form(s, literal)?;
                let is_value = t.predicate.as_str() == vocab::ONTO_VALUE;
                if let Some(inst) = self.instances.get_mut(s) {
                    if is_value {
                        if inst.primary_form.is_some() {
                            return invalid(format!("{s} has more than one onto:value"));
                        }
                        inst.primary_form = literal.map(str::to_string);
                    }
                    inst.surface_forms.insert(form);
                } else if self.concepts.contains(s) {
                    self.concept_forms.entry(s.clone()).or_default().insert(form);
                } else if let Some(rel) = self.relations.get_mut(s) {
                    rel.trigger_forms.insert(form);
                } else {
                    return invalid(format!("surface form on undeclared element {s}"));
                }
            }
            vocab::ONTO_RESOLVED_NAME => {
                let inst = self.instance_mut(s)?;
                let Some(name) = literal else {
                    return invalid(format!("ResolvedName of {s} must be a literal"));
                };
                if !inst.resolved_name.is_empty() {
                    return invalid(format!("{s} has more than one ResolvedName"));
                }
                inst.resolved_name = name.to_string();
            }
            vocab::OWL_SAME_AS => {
                let Some(target) = t.object.as_iri() else {
                    return invalid(format!("sameAs object of {s} must be an IRI"));
                };
                if target == s {
                    return invalid(format!("{s} sameAs itself"));
                }
                let target = target.clone();
                self.instance_mut(s)?.same_as.insert(target);
            }
            _ if self.relations.contains_key(&t.predicate) => {
                let Some(object) = t.object.as_iri() else {
                    return invalid(format!("relation {} needs an individual as object", t.predicate));
                };
                if !self.instances.contains_key(s) || !self.instances.contains_key(object) {
                    return invalid(format!("relation {} links non-individuals", t.predicate));
                }
                self.instance_links.insert((s.clone(), t.predicate.clone(), object.clone()));
            }
            _ => match &t.object {
                Term::Literal(value) => {
                    let value = value.clone();
                    let predicate = t.predicate.clone();
                    self.instance_mut(s)?.data_properties.push((predicate, value));
                }
                Term::Iri(_) => return invalid(format!("unknown object property {}", t.predicate)),
            },
        }
        Ok(())
    }

    fn instance_mut(&mut self, iri: &Iri) -> Result<&mut Instance, OntologyError> {
        match self.instances.get_mut(iri) {
            Some(inst) => Ok(inst),
            None => invalid(format!("statement about undeclared individual {iri}")),
        }
    }

    fn check_acyclic(&self) -> Result<(), OntologyError> {
        #[derive(Clone, Copy, PartialEq)]
        enum Mark {
            Active,
            Done,
        }
        let mut marks: BTreeMap<&Iri, Mark> = BTreeMap::new();
        for root in &self.concepts {
            if marks.contains_key(root) {
                continue;
            }
            // Iterative DFS: (node, next parent index).
            let mut stack: Vec<(&Iri, Vec<&Iri>)> = vec![(root, self.parents(root).collect())];
            marks.insert(root, Mark::Active);
            while let Some((node, pending)) = stack.last_mut() {
                match pending.pop() {
                    Some(parent) => match marks.get(parent) {
                        Some(Mark::Active) => return invalid(format!("subclass cycle through {parent}")),
                        Some(Mark::Done) => {}
                        None => {
                            marks.insert(parent, Mark::Active);
                            let next = self.parents(parent).collect();
                            stack.push((parent, next));
                        }
                    },
                    None => {
                        marks.insert(*node, Mark::Done);
                        stack.pop();
                    }
                }
            }
        }
        Ok(())
    }

    fn parents<'a>(&'a self, child: &'a Iri) -> impl Iterator<Item = &'a Iri> + 'a {
        self.subclass_edges.iter().filter(move |(c, _)| c == child).map(|(_, p)| p)
    }

    pub fn domain_name(&self) -> &str {
        &self.domain_name
    }

    pub fn concepts(&self) -> &BTreeSet<Iri> {
        &self.concepts
    }

    pub fn subclass_edges(&self) -> &BTreeSet<(Iri, Iri)> {
        &self.subclass_edges
    }

    pub fn relations(&self) -> &BTreeMap<Iri, Relation> {
        &self.relations
    }

    pub fn relation(&self, iri: &Iri) -> Option<&Relation> {
        self.relations.get(iri)
    }

    pub fn instances(&self) -> &BTreeMap<Iri, Instance> {
        &self.instances
    }

    pub fn instance(&self, iri: &Iri) -> Option<&Instance> {
        self.instances.get(iri)
    }

    pub fn instance_links(&self) -> &BTreeSet<(Iri, Iri, Iri)> {
        &self.instance_links
    }

    pub fn instances_of<'a>(&'a self, concept: &'a Iri) -> impl Iterator<Item = &'a Instance> + 'a {
        self.instances.values().filter(move |i| &i.concept == concept)
    }

    /// Transitive superclasses of `concept`, breadth-first, without `concept` itself.
    pub fn superclasses(&self, concept: &Iri) -> Result<Vec<Iri>, OntologyError> {
        if !self.concepts.contains(concept) {
            return Err(OntologyError::UnknownConcept(concept.clone()));
        }
        let mut seen: HashSet<&Iri> = HashSet::from([concept]);
        let mut queue: VecDeque<&Iri> = VecDeque::from([concept]);
        let mut out = Vec::new();
        while let Some(current) = queue.pop_front() {
            for parent in self.parents(current) {
                if seen.insert(parent) {
                    out.push(parent.clone());
                    queue.push_back(parent);
                }
            }
        }
        Ok(out)
    }

    /// Surface form → every element it can denote.
    pub fn lexicon(&self) -> Lexicon {
        let mut lex = Lexicon::default();
        for inst in self.instances.values() {
            for form in &inst.surface_forms {
                lex.bind(form, ElementKind::Instance, &inst.iri);
            }
        }
        for rel in self.relations.values() {
            for form in &rel.trigger_forms {
                lex.bind(form, ElementKind::RelationTrigger, &rel.iri);
            }
        }
        for (concept, forms) in &self.concept_forms {
            for form in forms {
                lex.bind(form, ElementKind::Concept, concept);
            }
        }
        lex
    }

    /// Class declarations, hierarchy, relation declarations with converses,
    /// and individual-to-individual links. Individual descriptions are left
    /// to enrichment so a repository only describes what was annotated.
    pub fn schema_triples(&self) -> Vec<Triple> {
        let mut out = Vec::new();
        for c in &self.concepts {
            out.push(Triple::new(c.clone(), vocab::rdf_type(), vocab::owl_class()));
        }
        for (child, parent) in &self.subclass_edges {
            out.push(Triple::new(child.clone(), vocab::rdfs_subclass_of(), parent.clone()));
        }
        for rel in self.relations.values() {
            out.push(Triple::new(rel.iri.clone(), vocab::rdf_type(), vocab::owl_object_property()));
            if let Some(conv) = &rel.converse {
                out.push(Triple::new(rel.iri.clone(), vocab::owl_inverse_of(), conv.clone()));
            }
        }
        for (s, p, o) in &self.instance_links {
            out.push(Triple::new(s.clone(), p.clone(), o.clone()));
        }
        out
    }
}

fn required_form(subject: &Iri, literal: Option<&str>) -> Result<String, OntologyError> {
    let Some(raw) = literal else {
        return invalid(format!("surface form of {subject} must be a literal"));
    };
    let form = normalize_form(raw);
    if form.is_empty() {
        return invalid(format!("surface form {raw:?} of {subject} is empty after normalization"));
    }
    Ok(form)
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LexiconBinding {
    pub kind: ElementKind,
    pub element: Iri,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Lexicon {
    entries: BTreeMap<String, Vec<LexiconBinding>>,
    max_tokens: usize,
}

impl Lexicon {
    pub fn bind(&mut self, form: &str, kind: ElementKind, element: &Iri) {
        let key = form.split_whitespace().collect::<Vec<_>>().join(" ");
        if key.is_empty() {
            return;
        }
        self.max_tokens = self.max_tokens.max(key.split(' ').count());
        let bindings = self.entries.entry(key).or_default();
        let binding = LexiconBinding { kind, element: element.clone() };
        if !bindings.contains(&binding) {
            bindings.push(binding);
            bindings.sort_by(|a, b| {
                (a.kind.priority(), &a.element).cmp(&(b.kind.priority(), &b.element))
            });
        }
    }

    /// Bindings for a lowercase, single-space-joined form, best first.
    pub fn get(&self, form: &str) -> Option<&[LexiconBinding]> {
        self.entries.get(form).map(Vec::as_slice)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Token count of the longest entry.
    pub fn max_tokens(&self) -> usize {
        self.max_tokens
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &[LexiconBinding])> {
        self.entries.iter().map(|(k, v)| (k.as_str(), v.as_slice()))
    }
}
