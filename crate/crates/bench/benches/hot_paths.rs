use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion, Throughput};
use ontodomain_bench::{posts, ScaledClassifier};
use ontodomain_core::domain::{HistoryStore, OntologyRegistry};
use ontodomain_core::pipeline::{run_pipeline, PipelineConfig};
use ontodomain_core::rdf::{parse_ntriples, vocab};
use ontodomain_core::{clean_text, fixtures, Annotator, Iri, Pattern};

const POSTS: usize = 600;

fn cleansing(c: &mut Criterion) {
    let posts = posts(POSTS);
    let mut g = c.benchmark_group("clean_text");
    g.throughput(Throughput::Elements(posts.len() as u64));
    g.bench_function("posts", |b| {
        b.iter(|| {
            for p in &posts {
                black_box(clean_text(black_box(&p.raw_text)));
            }
        })
    });
    g.finish();
}

fn annotation(c: &mut Criterion) {
    let ontology = fixtures::politics_ontology();
    let annotator = Annotator::new(&ontology);
    let texts: Vec<_> = posts(POSTS).iter().map(|p| clean_text(&p.raw_text)).collect();
    let mut g = c.benchmark_group("annotate");
    g.throughput(Throughput::Elements(texts.len() as u64));
    g.bench_function("politics", |b| {
        b.iter(|| {
            for t in &texts {
                black_box(annotator.annotate(black_box(t)));
            }
        })
    });
    g.finish();
}

fn repository(c: &mut Criterion) {
    let mut registry = OntologyRegistry::new();
    registry.register(fixtures::politics_ontology()).unwrap();
    let out = run_pipeline(
        &posts(POSTS),
        &ScaledClassifier(fixtures::classifier()),
        &registry,
        "politics",
        &fixtures::politics_links(),
        &mut HistoryStore::default(),
        PipelineConfig::default(),
    )
    .expect("pipeline runs on scaled fixtures");
    let repo = out.repository;
    let labour = Iri::new(format!("{}labour", vocab::POLITICS_NS)).unwrap();
    let person = vocab::onto("Person");

    let mut g = c.benchmark_group("repository");
    g.bench_function("describe", |b| b.iter(|| black_box(repo.describe(black_box(&labour)))));
    g.bench_function("type_lift", |b| {
        let pattern = Pattern::new(None, Some(vocab::rdf_type()), Some(person.clone().into()));
        b.iter(|| black_box(repo.query(black_box(&pattern))))
    });
    g.bench_function("scan", |b| {
        let pattern = Pattern::new(None, None, None);
        b.iter(|| black_box(repo.query(black_box(&pattern))))
    });
    g.finish();

    let text = repo.to_ntriples();
    let mut g = c.benchmark_group("ntriples");
    g.throughput(Throughput::Bytes(text.len() as u64));
    g.bench_function("parse", |b| b.iter(|| black_box(parse_ntriples(black_box(&text)).unwrap())));
    g.finish();
}

criterion_group!(benches, cleansing, annotation, repository);
criterion_main!(benches);
