//! Reserved predicates and namespaces of the fixture vocabulary.

use super::Iri;

pub const RDF_TYPE: &str = "http://www.w3.org/1999/02/22-rdf-syntax-ns#type";
pub const RDFS_SUBCLASS_OF: &str = "http://www.w3.org/2000/01/rdf-schema#subClassOf";
pub const OWL_SAME_AS: &str = "http://www.w3.org/2002/07/owl#sameAs";
pub const OWL_INVERSE_OF: &str = "http://www.w3.org/2002/07/owl#inverseOf";
pub const OWL_CLASS: &str = "http://www.w3.org/2002/07/owl#Class";
pub const OWL_OBJECT_PROPERTY: &str = "http://www.w3.org/2002/07/owl#ObjectProperty";
pub const OWL_NAMED_INDIVIDUAL: &str = "http://www.w3.org/2002/07/owl#NamedIndividual";
pub const OWL_ONTOLOGY: &str = "http://www.w3.org/2002/07/owl#Ontology";

/// Namespace of the annotation properties (`ResolvedName`, `value`, ...).
pub const ONTO_NS: &str = "http://www.semanticweb.org/owl/owlapi/turtle#";
/// Namespace of the politics individuals (`Politics:labour`).
pub const POLITICS_NS: &str = "http://www.semanticweb.org/ontologies/Politics.owl#";

pub const ONTO_RESOLVED_NAME: &str = "http://www.semanticweb.org/owl/owlapi/turtle#ResolvedName";
pub const ONTO_WEBSITE: &str = "http://www.semanticweb.org/owl/owlapi/turtle#Website";
pub const ONTO_VALUE: &str = "http://www.semanticweb.org/owl/owlapi/turtle#value";
pub const ONTO_ALIAS: &str = "http://www.semanticweb.org/owl/owlapi/turtle#alias";
pub const ONTO_TRIGGER: &str = "http://www.semanticweb.org/owl/owlapi/turtle#trigger";
pub const ONTO_DOMAIN_TAG: &str = "http://www.semanticweb.org/owl/owlapi/turtle#domainTag";

fn fixed(s: &'static str) -> Iri {
    Iri::new(s).expect("vocabulary IRIs are valid")
}

pub fn rdf_type() -> Iri {
    fixed(RDF_TYPE)
}
pub fn rdfs_subclass_of() -> Iri {
    fixed(RDFS_SUBCLASS_OF)
}
pub fn owl_same_as() -> Iri {
    fixed(OWL_SAME_AS)
}
pub fn owl_inverse_of() -> Iri {
    fixed(OWL_INVERSE_OF)
}
pub fn owl_class() -> Iri {
    fixed(OWL_CLASS)
}
pub fn owl_object_property() -> Iri {
    fixed(OWL_OBJECT_PROPERTY)
}
pub fn onto_resolved_name() -> Iri {
    fixed(ONTO_RESOLVED_NAME)
}
pub fn onto_value() -> Iri {
    fixed(ONTO_VALUE)
}
pub fn onto_trigger() -> Iri {
    fixed(ONTO_TRIGGER)
}

/// `onto:<local>`; panics if `local` would make an invalid IRI.
pub fn onto(local: &str) -> Iri {
    Iri::new(format!("{ONTO_NS}{local}")).expect("valid onto: local name")
}

/// IRI minted for a post: `onto:post/{id}`, with unsafe characters percent-encoded.
pub fn post_iri(post_id: &str) -> Iri {
    Iri::new(format!("{ONTO_NS}post/{}", encode_segment(post_id))).expect("encoded post IRI is valid")
}

/// IRI minted for an external (classifier-only) entity: `onto:entity/{surface}`.
pub fn external_entity_iri(surface: &str) -> Iri {
    let slug: String = surface.split_whitespace().collect::<Vec<_>>().join("_");
    Iri::new(format!("{ONTO_NS}entity/{}", encode_segment(&slug))).expect("encoded entity IRI is valid")
}

fn encode_segment(raw: &str) -> String {
    let mut out = String::with_capacity(raw.len());
    for b in raw.bytes() {
        if b.is_ascii_alphanumeric() || matches!(b, b'-' | b'.' | b'_' | b'~') {
            out.push(b as char);
        } else {
            out.push_str(&format!("%{b:02X}"));
        }
    }
    out
}
