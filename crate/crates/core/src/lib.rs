//! Ontology-driven entity annotation and domain classification of short
//! social posts, with enrichment, interlinking, an embedded triple store and
//! the evaluation harness.

pub mod annotate;
pub mod domain;
pub mod enrich;
pub mod eval;
pub mod fixtures;
pub mod jsonl;
pub mod ontology;
pub mod pipeline;
pub mod rdf;
pub mod repository;
pub mod taxonomy;
pub mod text;

pub use annotate::{
    annotate, category_of, classify_post_domains, merge_entities, AnnotatedPost, Annotator, Category, EntityAnnotation,
    MergedEntity, Source,
};
pub use domain::{
    is_learning_ready, rank_domains, select_ontologies, startup_infer, DomainLabel, HistoryStore, OntologyRegistry,
    UserDomainHistory,
};
pub use enrich::{enrich, enrich_post, interlink, LinkTable};
pub use eval::{
    entity_counts, extraction_rate, f_measure, precision, recall, EntityCounts, GoldLabel, Metrics, SourceFilter,
};
pub use ontology::{ElementKind, Ontology};
pub use rdf::{Iri, Term, Triple};
pub use repository::{parse_query, Pattern, Repository};
pub use taxonomy::{filter_confident, top_level_domain, Classifier, ClassifierResponse, TaxonomyLabel};
pub use text::{clean_text, is_clean, CleanText, Post};
