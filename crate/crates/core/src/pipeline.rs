//! The stages chained end to end: cleanse, classify, infer domains, annotate,
//! enrich, load. Each stage's records are what the next stage reads.

use std::collections::BTreeSet;
use std::num::NonZeroUsize;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::annotate::{AnnotatedPost, Annotator};
use crate::domain::{infer_for_post, HistoryStore, Inference, OntologyRegistry, DEFAULT_MIN_POSTS};
use crate::enrich::{enrich_post, external_entity_triples, LinkTable};
use crate::ontology::Ontology;
use crate::rdf::Triple;
use crate::repository::Repository;
use crate::taxonomy::{filter_confident, Classifier, ClassifierError, ExternalEntity, TaxonomyLabel};
use crate::text::{clean_text, Post};

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error(transparent)]
    Classifier(#[from] ClassifierError),
    #[error("no ontology registered for domain {0:?}")]
    UnknownDomain(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PipelineConfig {
    pub min_posts: u64,
    pub top_k: NonZeroUsize,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig { min_posts: DEFAULT_MIN_POSTS, top_k: NonZeroUsize::MIN }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassifiedPost {
    #[serde(flatten)]
    pub post: Post,
    /// All labels as returned; confidence filtering happens downstream.
    pub taxonomies: Vec<TaxonomyLabel>,
    pub entities: Vec<ExternalEntity>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InferredPost {
    #[serde(flatten)]
    pub classified: ClassifiedPost,
    #[serde(flatten)]
    pub inference: Inference,
}

fn by_id<T>(items: &mut [T], id: impl Fn(&T) -> &str) {
    items.sort_by(|a, b| id(a).cmp(id(b)));
}

/// Replaces each post's text with its cleansed form.
pub fn clean_posts(posts: &[Post]) -> Vec<Post> {
    let mut out: Vec<Post> = posts.iter().map(|p| Post { raw_text: clean_text(&p.raw_text).text, ..p.clone() }).collect();
    by_id(&mut out, |p| &p.id);
    out
}

pub fn classify_posts(posts: &[Post], classifier: &dyn Classifier) -> Result<Vec<ClassifiedPost>, ClassifierError> {
    let mut out = posts
        .iter()
        .map(|p| {
            let r = classifier.classify(&p.id, &p.raw_text)?;
            Ok(ClassifiedPost { post: p.clone(), taxonomies: r.taxonomies, entities: r.entities })
        })
        .collect::<Result<Vec<_>, ClassifierError>>()?;
    by_id(&mut out, |c| &c.post.id);
    Ok(out)
}

/// Feeds posts to each author's history in (timestamp, id) order.
pub fn infer_domains(
    posts: &[ClassifiedPost],
    history: &mut HistoryStore,
    registry: &OntologyRegistry,
    config: PipelineConfig,
) -> Vec<InferredPost> {
    let mut order: Vec<&ClassifiedPost> = posts.iter().collect();
    order.sort_by(|a, b| (&a.post.created_at, &a.post.id).cmp(&(&b.post.created_at, &b.post.id)));
    let mut out: Vec<InferredPost> = order
        .into_iter()
        .map(|c| {
            let confident = filter_confident(&c.taxonomies);
            let user = history.entry(&c.post.user_id);
            let inference = infer_for_post(user, &confident, registry, config.min_posts, config.top_k);
            InferredPost { classified: c.clone(), inference }
        })
        .collect();
    by_id(&mut out, |p| &p.classified.post.id);
    out
}

/// Annotator set for one run: the target ontology plus every registered one.
pub struct Annotators<'r> {
    target: Annotator<'r>,
    others: Vec<Annotator<'r>>,
}

impl<'r> Annotators<'r> {
    pub fn new(registry: &'r OntologyRegistry, target_domain: &str) -> Result<Self, PipelineError> {
        let target = registry
            .get_by_name(target_domain)
            .ok_or_else(|| PipelineError::UnknownDomain(target_domain.to_string()))?;
        let others = registry
            .iter()
            .filter(|o| o.domain_name() != target.domain_name())
            .map(Annotator::new)
            .collect();
        Ok(Annotators { target: Annotator::new(target), others })
    }

    pub fn target(&self) -> &Ontology {
        self.target.ontology()
    }

    /// Annotates against the target ontology and the post's selected ones.
    pub fn annotate(&self, post: &InferredPost) -> AnnotatedPost {
        let c = &post.classified;
        let text = clean_text(&c.post.raw_text);
        let selected: BTreeSet<&str> = post.inference.selected.iter().map(|d| d.as_str()).collect();
        let others: Vec<&Annotator<'_>> =
            self.others.iter().filter(|a| selected.contains(a.ontology().domain_name())).collect();
        AnnotatedPost::build(&c.post.id, &text, &filter_confident(&c.taxonomies), &c.entities, &self.target, &others)
    }
}

pub fn annotate_posts(posts: &[InferredPost], annotators: &Annotators<'_>) -> Vec<AnnotatedPost> {
    let mut out: Vec<AnnotatedPost> = posts.iter().map(|p| annotators.annotate(p)).collect();
    by_id(&mut out, |p| &p.id);
    out
}

/// Enrichment, links and external-entity triples of one annotated post.
pub fn enrich_annotated(post: &AnnotatedPost, registry: &OntologyRegistry, links: &LinkTable) -> BTreeSet<Triple> {
    let mut out = BTreeSet::new();
    for o in registry.iter() {
        out.extend(enrich_post(&post.id, &post.annotations, o, links));
    }
    out.extend(external_entity_triples(&post.merged));
    out
}

/// Every post's triples plus the schema of each registered ontology, sorted.
pub fn enrich_all(dump: &[AnnotatedPost], registry: &OntologyRegistry, links: &LinkTable) -> Vec<Triple> {
    let mut out: BTreeSet<Triple> = registry.iter().flat_map(Ontology::schema_triples).collect();
    for post in dump {
        out.extend(enrich_annotated(post, registry, links));
    }
    out.into_iter().collect()
}

#[derive(Debug, Clone)]
pub struct PipelineOutput {
    pub cleaned: Vec<Post>,
    pub classified: Vec<ClassifiedPost>,
    pub inferred: Vec<InferredPost>,
    pub annotated: Vec<AnnotatedPost>,
    pub triples: Vec<Triple>,
    pub repository: Repository,
}

pub fn run_pipeline(
    posts: &[Post],
    classifier: &dyn Classifier,
    registry: &OntologyRegistry,
    target_domain: &str,
    links: &LinkTable,
    history: &mut HistoryStore,
    config: PipelineConfig,
) -> Result<PipelineOutput, PipelineError> {
    let annotators = Annotators::new(registry, target_domain)?;
    let cleaned = clean_posts(posts);
    let classified = classify_posts(&cleaned, classifier)?;
    let inferred = infer_domains(&classified, history, registry, config);
    let annotated = annotate_posts(&inferred, &annotators);
    let triples = enrich_all(&annotated, registry, links);
    let repository = Repository::from_triples(triples.iter().cloned());
    Ok(PipelineOutput { cleaned, classified, inferred, annotated, triples, repository })
}
