//! The bundled politics fixtures, embedded at compile time.

use crate::enrich::LinkTable;
use crate::ontology::{declared_domain, Ontology};
use crate::rdf::parse_ntriples;
use crate::taxonomy::FixtureClassifier;

pub const POLITICS_NT: &str = include_str!("../fixtures/politics.nt");
pub const POLITICS_LINKS_NT: &str = include_str!("../fixtures/politics_links.nt");
pub const CLASSIFIER_JSONL: &str = include_str!("../fixtures/classifier.jsonl");
pub const DATASET_JSONL: &str = include_str!("../fixtures/dataset.jsonl");
pub const GOLD_JSONL: &str = include_str!("../fixtures/gold.jsonl");

pub fn politics_ontology() -> Ontology {
    let triples = parse_ntriples(POLITICS_NT).expect("bundled ontology parses");
    let domain = declared_domain(&triples).expect("bundled ontology declares its domain");
    Ontology::build(&triples, &domain).expect("bundled ontology is valid")
}

pub fn politics_links() -> LinkTable {
    LinkTable::from_ntriples(POLITICS_LINKS_NT).expect("bundled link table is valid")
}

pub fn classifier() -> FixtureClassifier {
    FixtureClassifier::from_jsonl(CLASSIFIER_JSONL).expect("bundled classifier fixture is valid")
}
