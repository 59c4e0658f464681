use std::collections::BTreeSet;
use std::num::NonZeroUsize;
use std::path::{Path, PathBuf};

use anyhow::Context;
use ontodomain_core::domain::{HistoryStore, OntologyRegistry, DEFAULT_MIN_POSTS};
use ontodomain_core::eval::{evaluate, render_csv, render_markdown, EntityCounts, Ratio};
use ontodomain_core::fixtures;
use ontodomain_core::pipeline::{
    classify_posts, clean_posts, enrich_annotated, infer_domains, Annotators, ClassifiedPost, InferredPost, PipelineConfig,
};
use ontodomain_core::rdf::serialize_ntriples;
use ontodomain_core::repository::QueryRow;
use ontodomain_core::taxonomy::{FixtureClassifier, HttpClassifier, HttpConfig};
use ontodomain_core::{AnnotatedPost, Classifier, GoldLabel, LinkTable, Ontology, Post, Repository, Triple};
use rayon::prelude::*;

use crate::args::{CommonArgs, Command};
use crate::io::{
    load_ontology, posts_from, read_records, read_text, records_from, triples_from, usage, write_records, write_text,
};
use crate::serve;

pub const CLEANED: &str = "cleaned.jsonl";
pub const CLASSIFIED: &str = "classified.jsonl";
pub const INFERRED: &str = "inferred.jsonl";
pub const HISTORY: &str = "history.json";
pub const ANNOTATED: &str = "annotated.jsonl";
pub const TRIPLES: &str = "triples.nt";
pub const REPOSITORY: &str = "repository.nt";
pub const EVALUATION: &str = "evaluation.json";
pub const REPORT: &str = "report.md";

const DEFAULT_SERVE_ADDR: &str = "127.0.0.1:7878";

/// Resolved flags and the output directory.
pub struct Env {
    args: CommonArgs,
    out: PathBuf,
}

impl Env {
    pub fn new(args: CommonArgs) -> Self {
        let out = args.out.clone().unwrap_or_else(|| PathBuf::from("out"));
        Env { args, out }
    }

    fn out_file(&self, name: &str) -> PathBuf {
        self.out.join(name)
    }

    fn input_or(&self, default: &str) -> PathBuf {
        self.args.input.clone().unwrap_or_else(|| self.out_file(default))
    }

    fn config(&self) -> anyhow::Result<PipelineConfig> {
        let top_k = match self.args.top_k {
            None => NonZeroUsize::MIN,
            Some(k) => match NonZeroUsize::new(k) {
                Some(k) => k,
                None => return usage("--top-k must be at least 1"),
            },
        };
        Ok(PipelineConfig { min_posts: self.args.min_posts.unwrap_or(DEFAULT_MIN_POSTS), top_k })
    }

    fn dataset(&self) -> anyhow::Result<Vec<Post>> {
        match &self.args.dataset {
            Some(p) => posts_from(p, &read_text(p)?),
            None if self.args.bundled => posts_from(Path::new("<bundled dataset>"), fixtures::DATASET_JSONL),
            None => usage("no dataset: pass --dataset or --bundled"),
        }
    }

    fn registry(&self) -> anyhow::Result<OntologyRegistry> {
        let mut registry = OntologyRegistry::new();
        let ontologies: Vec<Ontology> = if !self.args.ontology.is_empty() {
            self.args.ontology.iter().map(|p| load_ontology(p)).collect::<anyhow::Result<_>>()?
        } else if self.args.bundled {
            vec![fixtures::politics_ontology()]
        } else {
            return usage("no ontology: pass --ontology or --bundled");
        };
        for o in ontologies {
            let name = o.domain_name().to_string();
            registry.register(o).with_context(|| format!("ontology for domain {name:?}"))?;
        }
        Ok(registry)
    }

    fn target_domain(&self, registry: &OntologyRegistry) -> anyhow::Result<String> {
        if let Some(d) = &self.args.domain {
            return Ok(d.trim().to_lowercase());
        }
        let mut names = registry.iter().map(|o| o.domain_name().to_string());
        match (names.next(), names.next()) {
            (Some(only), None) => Ok(only),
            _ => usage("several ontologies registered: pass --domain to name the target"),
        }
    }

    fn classifier(&self) -> anyhow::Result<Box<dyn Classifier + Sync>> {
        if let Some(url) = &self.args.classifier_url {
            return Ok(Box::new(HttpClassifier::new(HttpConfig::new(url.clone()))?));
        }
        match &self.args.fixtures {
            Some(p) => {
                let c = FixtureClassifier::from_jsonl(&read_text(p)?).map_err(|e| anyhow::anyhow!("{}: {e}", p.display()))?;
                Ok(Box::new(c))
            }
            None if self.args.bundled => Ok(Box::new(fixtures::classifier())),
            None => usage("no classifier: pass --fixtures, --classifier-url or --bundled"),
        }
    }

    fn links(&self) -> anyhow::Result<LinkTable> {
        match &self.args.links {
            Some(p) => {
                let text = read_text(p)?;
                LinkTable::from_ntriples(&text).map_err(|e| anyhow::anyhow!("{}: {e}", p.display()))
            }
            None if self.args.bundled => Ok(fixtures::politics_links()),
            None => Ok(LinkTable::new()),
        }
    }

    fn gold(&self) -> anyhow::Result<Option<Vec<GoldLabel>>> {
        match &self.args.gold {
            Some(p) => read_records(p).map(Some),
            None if self.args.bundled => records_from(Path::new("<bundled gold>"), fixtures::GOLD_JSONL).map(Some),
            None => Ok(None),
        }
    }

    fn require_gold(&self) -> anyhow::Result<Vec<GoldLabel>> {
        match self.gold()? {
            Some(g) => Ok(g),
            None => usage("no gold labels: pass --gold or --bundled"),
        }
    }

    fn history_path(&self) -> PathBuf {
        self.args.history.clone().unwrap_or_else(|| self.out_file(HISTORY))
    }

    fn history(&self) -> anyhow::Result<HistoryStore> {
        let path = self.history_path();
        if !path.exists() {
            return Ok(HistoryStore::default());
        }
        HistoryStore::from_json(&read_text(&path)?).map_err(|e| anyhow::anyhow!("{}: {e}", path.display()))
    }

    fn write(&self, name: &str, text: &str) -> anyhow::Result<()> {
        let path = self.out_file(name);
        write_text(&path, text)?;
        eprintln!("wrote {}", path.display());
        Ok(())
    }

    fn write_records<T: serde::Serialize>(&self, name: &str, items: &[T]) -> anyhow::Result<()> {
        let path = self.out_file(name);
        write_records(&path, items)?;
        eprintln!("wrote {} ({} records)", path.display(), items.len());
        Ok(())
    }
}

fn classify(env: &Env, cleaned: &[Post]) -> anyhow::Result<Vec<ClassifiedPost>> {
    let classifier = env.classifier()?;
    Ok(classify_posts(cleaned, classifier.as_ref())?)
}

fn infer(env: &Env, classified: &[ClassifiedPost], registry: &OntologyRegistry) -> anyhow::Result<Vec<InferredPost>> {
    let mut history = env.history()?;
    let inferred = infer_domains(classified, &mut history, registry, env.config()?);
    let path = env.history_path();
    write_text(&path, &history.to_json())?;
    eprintln!("wrote {}", path.display());
    Ok(inferred)
}

fn annotate(env: &Env, inferred: &[InferredPost], registry: &OntologyRegistry) -> anyhow::Result<Vec<AnnotatedPost>> {
    let annotators = Annotators::new(registry, &env.target_domain(registry)?)?;
    let mut out: Vec<AnnotatedPost> = inferred.par_iter().map(|p| annotators.annotate(p)).collect();
    out.sort_by(|a, b| a.id.cmp(&b.id));
    Ok(out)
}

fn enrich(annotated: &[AnnotatedPost], registry: &OntologyRegistry, links: &LinkTable) -> Vec<Triple> {
    let per_post: Vec<BTreeSet<Triple>> = annotated.par_iter().map(|p| enrich_annotated(p, registry, links)).collect();
    let mut all: BTreeSet<Triple> = registry.iter().flat_map(Ontology::schema_triples).collect();
    for set in per_post {
        all.extend(set);
    }
    all.into_iter().collect()
}

fn write_reports(env: &Env, annotated: &[AnnotatedPost], gold: &[GoldLabel]) -> anyhow::Result<()> {
    let report = evaluate(annotated, gold)?;
    env.write(REPORT, &render_markdown(&report))?;
    for (name, csv) in render_csv(&report) {
        env.write(name, &csv)?;
    }
    Ok(())
}

fn parse_counts(text: &str) -> anyhow::Result<EntityCounts> {
    let parts: Vec<&str> = text.split(',').map(str::trim).collect();
    let nums: Option<Vec<u64>> = parts.iter().map(|p| p.parse().ok()).collect();
    match nums.as_deref() {
        Some(&[correct, incorrect, missing]) => Ok(EntityCounts { correct, incorrect, missing }),
        _ => usage(format!("--counts expects correct,incorrect,missing as three integers, got {text:?}")),
    }
}

fn ratio(r: Ratio) -> String {
    if r.degenerate { "n/a".into() } else { format!("{:.4}", r.value) }
}

pub fn render_counts(c: &EntityCounts) -> String {
    let m = c.metrics();
    let f = if m.precision.degenerate && m.recall.degenerate { "n/a".into() } else { format!("{:.4}", m.f_measure) };
    format!(
        "correct {}\nincorrect {}\nmissing {}\nretrieved {}\nrelevant {}\nprecision {}\nrecall {}\nf_measure {f}\n",
        c.correct,
        c.incorrect,
        c.missing,
        c.retrieved(),
        c.relevant(),
        ratio(m.precision),
        ratio(m.recall)
    )
}

fn query_text(query: Option<String>) -> anyhow::Result<String> {
    match query {
        Some(q) => Ok(q),
        None => {
            let mut q = String::new();
            std::io::Read::read_to_string(&mut std::io::stdin(), &mut q).context("stdin: cannot read query")?;
            Ok(q)
        }
    }
}

pub fn run(env: &Env, command: Command) -> anyhow::Result<()> {
    match command {
        Command::Clean => {
            let posts = env.dataset()?;
            env.write_records(CLEANED, &clean_posts(&posts))
        }
        Command::Classify => {
            let path = env.input_or(CLEANED);
            let posts = posts_from(&path, &read_text(&path)?)?;
            env.write_records(CLASSIFIED, &classify(env, &posts)?)
        }
        Command::InferDomains => {
            let registry = env.registry()?;
            let classified: Vec<ClassifiedPost> = read_records(&env.input_or(CLASSIFIED))?;
            env.write_records(INFERRED, &infer(env, &classified, &registry)?)
        }
        Command::Annotate => {
            let registry = env.registry()?;
            let inferred: Vec<InferredPost> = read_records(&env.input_or(INFERRED))?;
            env.write_records(ANNOTATED, &annotate(env, &inferred, &registry)?)
        }
        Command::Enrich => {
            let (registry, links) = (env.registry()?, env.links()?);
            let annotated: Vec<AnnotatedPost> = read_records(&env.input_or(ANNOTATED))?;
            let triples = enrich(&annotated, &registry, &links);
            env.write(TRIPLES, &serialize_ntriples(&triples))
        }
        Command::Load => {
            let path = env.input_or(TRIPLES);
            let triples = triples_from(&path, &read_text(&path)?)?;
            let repo = Repository::from_triples(triples);
            let out = env.out_file(REPOSITORY);
            repo.persist(&out)?;
            eprintln!("wrote {} ({} triples)", out.display(), repo.len());
            Ok(())
        }
        Command::Query { query, repository, json } => {
            let repo = Repository::load(&repository.unwrap_or_else(|| env.out_file(REPOSITORY)))?;
            let rows = repo.run_query(&query_text(query)?)?;
            if json {
                let rows: Vec<QueryRow> = rows.iter().map(QueryRow::from).collect();
                println!("{}", serde_json::to_string_pretty(&rows)?);
            } else {
                for t in &rows {
                    println!("{}\t{}\t{}", t.subject, t.predicate, t.object);
                }
            }
            Ok(())
        }
        Command::Evaluate { counts: Some(counts) } => {
            print!("{}", render_counts(&parse_counts(&counts)?));
            Ok(())
        }
        Command::Evaluate { counts: None } => {
            let annotated: Vec<AnnotatedPost> = read_records(&env.input_or(ANNOTATED))?;
            let report = evaluate(&annotated, &env.require_gold()?)?;
            let json = serde_json::to_string_pretty(&report)? + "\n";
            env.write(EVALUATION, &json)?;
            print!("{json}");
            Ok(())
        }
        Command::Report => {
            let annotated: Vec<AnnotatedPost> = read_records(&env.input_or(ANNOTATED))?;
            write_reports(env, &annotated, &env.require_gold()?)
        }
        Command::Pipeline => pipeline(env),
        Command::Serve { repository } => {
            let repo = Repository::load(&repository.unwrap_or_else(|| env.out_file(REPOSITORY)))?;
            let addr = env.args.serve_addr.clone().unwrap_or_else(|| DEFAULT_SERVE_ADDR.to_string());
            serve::serve(&repo, &addr)
        }
    }
}

fn pipeline(env: &Env) -> anyhow::Result<()> {
    let posts = env.dataset()?;
    let registry = env.registry()?;
    let links = env.links()?;
    let gold = env.gold()?;

    let cleaned = clean_posts(&posts);
    env.write_records(CLEANED, &cleaned)?;
    let classified = classify(env, &cleaned)?;
    env.write_records(CLASSIFIED, &classified)?;
    let inferred = infer(env, &classified, &registry)?;
    env.write_records(INFERRED, &inferred)?;
    let annotated = annotate(env, &inferred, &registry)?;
    env.write_records(ANNOTATED, &annotated)?;
    let triples = enrich(&annotated, &registry, &links);
    env.write(TRIPLES, &serialize_ntriples(&triples))?;
    let repo = Repository::from_triples(triples);
    env.write(REPOSITORY, &repo.to_ntriples())?;
    if let Some(gold) = gold {
        let report = evaluate(&annotated, &gold)?;
        env.write(EVALUATION, &(serde_json::to_string_pretty(&report)? + "\n"))?;
        write_reports(env, &annotated, &gold)?;
    }
    Ok(())
}
