//! Property checks shared by the `properties` and `acceptance` targets. Each
//! runs a proptest runner for `CASES` generated inputs and reports the first
//! minimized failure.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use proptest::prelude::*;
use proptest::test_runner::{Config, TestCaseError, TestRunner};

use ontodomain_core::annotate::{category_of, AnnotatedPost, Category};
use ontodomain_core::eval::{category_report, f_measure, precision, recall, GoldLabel};
use ontodomain_core::ontology::{ElementKind, Ontology};
use ontodomain_core::rdf::{parse_ntriples, serialize_ntriples, vocab, Iri, Term, Triple};
use ontodomain_core::repository::{Pattern, Repository};
use ontodomain_core::text::{clean_text, clean_text_with, is_emoji, CleanOptions, URL_PATTERN};

pub const CASES: u32 = 256;

pub type Check = fn() -> Result<(), String>;

fn run<S: Strategy>(strategy: S, test: impl Fn(S::Value) -> Result<(), TestCaseError>) -> Result<(), String> {
    let mut runner = TestRunner::new(Config { cases: CASES, failure_persistence: None, ..Config::default() });
    runner.run(&strategy, test).map_err(|e| e.to_string())
}

// ---- cleansing ----

fn messy_text() -> impl Strategy<Value = String> {
    let piece = prop_oneof![
        "[a-zA-Z]{1,8}",
        Just(" ".to_string()),
        Just("  \t\n".to_string()),
        Just("@".to_string()),
        Just("#".to_string()),
        Just("http://t.co/x1".to_string()),
        Just("www.example.org/a?b".to_string()),
        Just("https://".to_string()),
        Just("â€™".to_string()),
        Just("â€œ".to_string()),
        Just("Ã©".to_string()),
        Just("'".to_string()),
        Just("-".to_string()),
        Just("\u{2019}".to_string()),
        Just("!?.,;:".to_string()),
        Just("👍🏽".to_string()),
        Just("❤️".to_string()),
        Just("\u{200D}".to_string()),
        Just("\u{0007}".to_string()),
        any::<char>().prop_map(String::from),
    ];
    prop::collection::vec(piece, 0..16).prop_map(|v| v.concat())
}

pub fn cleansing_idempotent() -> Result<(), String> {
    run(messy_text(), |s| {
        let once = clean_text(&s).text;
        let twice = clean_text(&once).text;
        prop_assert_eq!(&twice, &once, "input {:?}", s);
        Ok(())
    })
}

pub fn cleansing_forbidden_chars() -> Result<(), String> {
    run(messy_text(), |s| {
        let c = clean_text(&s);
        prop_assert!(!c.text.contains('@') && !c.text.contains('#'), "{:?} -> {:?}", s, c.text);
        prop_assert!(!URL_PATTERN.is_match(&c.text), "{:?} -> {:?}", s, c.text);
        prop_assert!(!c.text.chars().any(is_emoji), "{:?} -> {:?}", s, c.text);
        let joined: Vec<&str> = c.tokens.iter().map(|t| t.text.as_str()).collect();
        prop_assert_eq!(joined.join(" "), c.text.clone());
        let mut last_end = 0;
        for (i, t) in c.tokens.iter().enumerate() {
            prop_assert!(i == 0 || t.offset > last_end);
            prop_assert_eq!(&c.text[t.offset..t.end()], t.text.as_str());
            last_end = t.end();
        }
        let plain = clean_text_with(&s, CleanOptions { repair_mojibake: false });
        prop_assert!(plain.text.chars().count() <= s.chars().count());
        Ok(())
    })
}

// ---- annotator ----

const WORDS: [&str; 4] = ["a", "b", "c", "d"];

fn phrase(max: usize) -> impl Strategy<Value = Vec<&'static str>> {
    prop::collection::vec(prop::sample::select(WORDS.to_vec()), 1..=max)
}

fn kind() -> impl Strategy<Value = ElementKind> {
    prop_oneof![Just(ElementKind::Instance), Just(ElementKind::Concept), Just(ElementKind::RelationTrigger)]
}

fn lexicon_ontology(entries: &[(Vec<&str>, ElementKind, u8)]) -> Ontology {
    let ns = "http://t/";
    let t = |s: String, p: &str, o: Term| Triple::new(Iri::new(s).unwrap(), Iri::new(p).unwrap(), o);
    let class = |name: String| Term::Iri(Iri::new(name).unwrap());
    let mut triples = vec![t(format!("{ns}C"), vocab::RDF_TYPE, class(vocab::OWL_CLASS.into()))];
    for (form, kind, id) in entries {
        let lit = Term::literal(form.join(" "));
        match kind {
            ElementKind::Instance => {
                triples.push(t(format!("{ns}i{id}"), vocab::RDF_TYPE, class(format!("{ns}C"))));
                triples.push(t(format!("{ns}i{id}"), vocab::ONTO_ALIAS, lit));
            }
            ElementKind::Concept => {
                triples.push(t(format!("{ns}K{id}"), vocab::RDF_TYPE, class(vocab::OWL_CLASS.into())));
                triples.push(t(format!("{ns}K{id}"), vocab::ONTO_ALIAS, lit));
            }
            ElementKind::RelationTrigger => {
                triples.push(t(format!("{ns}r{id}"), vocab::RDF_TYPE, class(vocab::OWL_OBJECT_PROPERTY.into())));
                triples.push(t(format!("{ns}r{id}"), vocab::ONTO_TRIGGER, lit));
            }
        }
    }
    triples.sort();
    triples.dedup();
    Ontology::build(&triples, "t").expect("generated ontology is valid")
}

fn rank(kind: ElementKind) -> u8 {
    match kind {
        ElementKind::Instance => 0,
        ElementKind::RelationTrigger => 1,
        ElementKind::Concept => 2,
    }
}

pub fn annotator_matches_brute_force() -> Result<(), String> {
    let entries = prop::collection::vec((phrase(3), kind(), 0u8..4), 1..=6);
    let text = phrase(8);
    run((entries, text), |(entries, words)| {
        let o = lexicon_ontology(&entries);
        let ns = "http://t/";
        // Best element per form, chosen independently of the lexicon.
        let mut best: BTreeMap<String, (u8, String, ElementKind)> = BTreeMap::new();
        for (form, kind, id) in &entries {
            let prefix = match kind {
                ElementKind::Instance => "i",
                ElementKind::Concept => "K",
                ElementKind::RelationTrigger => "r",
            };
            let cand = (rank(*kind), format!("{ns}{prefix}{id}"), *kind);
            let key = form.join(" ");
            if best.get(&key).is_none_or(|b| (cand.0, &cand.1) < (b.0, &b.1)) {
                best.insert(key, cand);
            }
        }
        // Every candidate match as (start token, length).
        let n = words.len();
        let mut candidates: Vec<(usize, usize)> = Vec::new();
        for start in 0..n {
            for len in 1..=n - start {
                if best.contains_key(&words[start..start + len].join(" ")) {
                    candidates.push((start, len));
                }
            }
        }
        // Leftmost-longest selection over the candidate set.
        let mut chosen: Vec<(usize, usize)> = Vec::new();
        let mut pos = 0;
        while let Some(&(s, l)) = candidates
            .iter()
            .filter(|(s, _)| *s >= pos)
            .min_by(|a, b| a.0.cmp(&b.0).then(b.1.cmp(&a.1)))
        {
            chosen.push((s, l));
            pos = s + l;
        }

        let clean = clean_text(&words.join(" "));
        let anns = ontodomain_core::annotate::annotate(&clean, &o);
        prop_assert_eq!(anns.len(), chosen.len(), "words {:?} entries {:?}", words, entries);
        let offsets: Vec<usize> = clean.tokens.iter().map(|t| t.offset).collect();
        for (ann, (s, l)) in anns.iter().zip(&chosen) {
            let form = words[*s..s + l].join(" ");
            let (_, iri, kind) = &best[&form];
            prop_assert_eq!(ann.span.0, offsets[*s]);
            prop_assert_eq!(&ann.surface, &form);
            prop_assert_eq!(ann.element.as_str(), iri.as_str());
            prop_assert_eq!(ann.kind, *kind);
        }
        for w in anns.windows(2) {
            prop_assert!(w[0].span.1 < w[1].span.0);
        }
        // No candidate lies wholly in text left unannotated.
        let covered: BTreeSet<usize> = chosen.iter().flat_map(|(s, l)| *s..s + l).collect();
        for (s, l) in &candidates {
            prop_assert!((*s..s + l).any(|i| covered.contains(&i)));
        }
        Ok(())
    })
}

// ---- triples ----

fn iri_strategy() -> impl Strategy<Value = Iri> {
    prop_oneof![
        "[a-z]{1,6}".prop_map(|s| Iri::new(format!("http://ex.org/{s}")).unwrap()),
        "[A-Za-z0-9_.~%-]{1,8}".prop_map(|s| Iri::new(format!("urn:x:{s}")).unwrap()),
        Just(vocab::rdf_type()),
        Just(vocab::owl_same_as()),
    ]
}

fn term_strategy() -> impl Strategy<Value = Term> {
    prop_oneof![iri_strategy().prop_map(Term::Iri), any::<String>().prop_map(Term::Literal), "[\"\\\\\n\r\t a]{0,6}".prop_map(Term::Literal)]
}

fn triple_strategy() -> impl Strategy<Value = Triple> {
    (iri_strategy(), iri_strategy(), term_strategy()).prop_map(|(s, p, o)| Triple::new(s, p, o))
}

pub fn ntriples_round_trip() -> Result<(), String> {
    run(prop::collection::vec(triple_strategy(), 0..20), |triples| {
        let text = serialize_ntriples(&triples);
        let back = parse_ntriples(&text).map_err(|e| TestCaseError::fail(e.to_string()))?;
        prop_assert_eq!(back, triples);
        Ok(())
    })
}

// ---- repository ----

const NODES: [&str; 5] = ["a", "b", "c", "d", "e"];

fn node(n: &str) -> Iri {
    Iri::new(format!("http://r/{n}")).unwrap()
}

fn predicates() -> Vec<Iri> {
    vec![vocab::rdf_type(), vocab::rdfs_subclass_of(), vocab::owl_same_as(), node("p")]
}

fn small_store() -> impl Strategy<Value = Vec<Triple>> {
    let n = || prop::sample::select(NODES.to_vec());
    let o = prop_oneof![4 => n().prop_map(|x| Term::Iri(node(x))), 1 => Just(Term::literal("v"))];
    prop::collection::vec(
        (n(), prop::sample::select(predicates()), o).prop_map(|(s, p, o)| Triple::new(node(s), p, o)),
        0..=50,
    )
}

/// Every pattern over the store's vocabulary, wildcards included.
fn all_patterns() -> Vec<Pattern> {
    let subjects: Vec<Option<Iri>> = std::iter::once(None).chain(NODES.iter().map(|n| Some(node(n)))).collect();
    let preds: Vec<Option<Iri>> = std::iter::once(None).chain(predicates().into_iter().map(Some)).collect();
    let objects: Vec<Option<Term>> = std::iter::once(None)
        .chain(NODES.iter().map(|n| Some(Term::Iri(node(n)))))
        .chain(std::iter::once(Some(Term::literal("v"))))
        .collect();
    let mut out = Vec::new();
    for s in &subjects {
        for p in &preds {
            for o in &objects {
                out.push(Pattern::new(s.clone(), p.clone(), o.clone()));
            }
        }
    }
    out
}

pub fn persistence_round_trip() -> Result<(), String> {
    let dir = std::env::temp_dir().join(format!("ontodomain-props-{}", std::process::id()));
    std::fs::create_dir_all(&dir).map_err(|e| e.to_string())?;
    let path = dir.join("store.nt");
    let patterns = all_patterns();
    let result = run(small_store(), |triples| {
        let before = Repository::from_triples(triples);
        before.persist(&path).map_err(|e| TestCaseError::fail(e.to_string()))?;
        let after = Repository::load(&path).map_err(|e| TestCaseError::fail(e.to_string()))?;
        for p in &patterns {
            prop_assert_eq!(before.query(p), after.query(p));
        }
        Ok(())
    });
    let _ = std::fs::remove_dir_all(&dir);
    result
}

/// All triples a store entails, materialized by fixed-point iteration.
fn materialize(base: &BTreeSet<Triple>) -> (BTreeSet<Triple>, BTreeSet<Triple>) {
    let same = vocab::owl_same_as();
    let ty = vocab::rdf_type();
    let sub = vocab::rdfs_subclass_of();
    let symmetric: BTreeSet<Triple> = base
        .iter()
        .filter(|t| t.predicate == same)
        .filter_map(|t| t.object.as_iri().map(|o| Triple::new(o.clone(), same.clone(), t.subject.clone())))
        .collect();
    let mut edges: BTreeSet<(Iri, Iri)> = base
        .iter()
        .filter(|t| t.predicate == sub)
        .filter_map(|t| t.object.as_iri().map(|o| (t.subject.clone(), o.clone())))
        .collect();
    loop {
        let mut grown = edges.clone();
        for (a, b) in &edges {
            for (c, d) in &edges {
                if b == c {
                    grown.insert((a.clone(), d.clone()));
                }
            }
        }
        if grown.len() == edges.len() {
            break;
        }
        edges = grown;
    }
    let lifted: BTreeSet<Triple> = base
        .iter()
        .filter(|t| t.predicate == ty)
        .filter_map(|t| t.object.as_iri().map(|c| (t.subject.clone(), c.clone())))
        .flat_map(|(x, c)| {
            edges
                .iter()
                .filter(move |(a, _)| *a == c)
                .map(|(_, d)| Triple::new(x.clone(), vocab::rdf_type(), d.clone()))
                .collect::<Vec<_>>()
        })
        .collect();
    (symmetric, lifted)
}

pub fn inference_closure() -> Result<(), String> {
    let patterns = all_patterns();
    run(small_store(), |triples| {
        let repo = Repository::from_triples(triples.clone());
        let base: BTreeSet<Triple> = triples.into_iter().collect();
        let (symmetric, lifted) = materialize(&base);
        for p in &patterns {
            let mut expected: BTreeSet<Triple> = base.iter().filter(|t| p.matches(t)).cloned().collect();
            let pred = p.predicate.as_ref();
            if pred.is_none() || pred == Some(&vocab::owl_same_as()) {
                expected.extend(symmetric.iter().filter(|t| p.matches(t)).cloned());
            }
            if pred == Some(&vocab::rdf_type()) {
                expected.extend(lifted.iter().filter(|t| p.matches(t)).cloned());
            }
            let got = repo.query(p);
            prop_assert!(got.windows(2).all(|w| w[0] < w[1]), "unsorted or duplicated rows");
            prop_assert_eq!(got.into_iter().collect::<BTreeSet<_>>(), expected, "pattern {:?}", p);
        }
        Ok(())
    })
}

/// Narrowing any wildcard never adds rows. A wildcard predicate narrowed to
/// `rdf:type` is exempt: the type lift only fires for a bound `rdf:type`.
pub fn query_monotonicity() -> Result<(), String> {
    let patterns = all_patterns();
    run(small_store(), |triples| {
        let repo = Repository::from_triples(triples);
        let rows: Vec<BTreeSet<Triple>> = patterns.iter().map(|p| repo.query(p).into_iter().collect()).collect();
        for (wi, wide) in patterns.iter().enumerate() {
            for (ni, narrow) in patterns.iter().enumerate().filter(|(_, n)| narrows(wide, n)) {
                if wide.predicate.is_none() && narrow.predicate == Some(vocab::rdf_type()) {
                    continue;
                }
                prop_assert!(rows[ni].is_subset(&rows[wi]), "{:?} gained rows over {:?}", narrow, wide);
            }
        }
        Ok(())
    })
}

fn narrows(wide: &Pattern, narrow: &Pattern) -> bool {
    fn slot<T: PartialEq>(w: &Option<T>, n: &Option<T>) -> bool {
        w.is_none() || w == n
    }
    wide != narrow
        && slot(&wide.subject, &narrow.subject)
        && slot(&wide.predicate, &narrow.predicate)
        && slot(&wide.object, &narrow.object)
}

// ---- metrics ----

pub fn metric_bounds() -> Result<(), String> {
    run((0u64..500, 0u64..500, 0u64..500, 1u64..20), |(a, b, c, k)| {
        let retrieved = a + b;
        let relevant = a + c;
        let p = precision(a, retrieved).map_err(|e| TestCaseError::fail(e.to_string()))?;
        let r = recall(a, relevant).map_err(|e| TestCaseError::fail(e.to_string()))?;
        prop_assert!((0.0..=1.0).contains(&p.value) && (0.0..=1.0).contains(&r.value));
        prop_assert_eq!(p.degenerate, retrieved == 0);
        let pk = precision(a * k, retrieved * k).unwrap();
        let rk = recall(a * k, relevant * k).unwrap();
        prop_assert!((pk.value - p.value).abs() < 1e-12 && (rk.value - r.value).abs() < 1e-12);
        let f = f_measure(p.value, r.value);
        prop_assert!((f - f_measure(r.value, p.value)).abs() < 1e-12);
        if p.value > 0.0 && r.value > 0.0 {
            let (lo, hi) = (p.value.min(r.value), p.value.max(r.value));
            prop_assert!(lo - 1e-12 <= f && f <= hi + 1e-12, "f {} outside [{}, {}]", f, lo, hi);
        } else {
            prop_assert_eq!(f, 0.0);
        }
        Ok(())
    })
}

// ---- categories ----

fn category() -> impl Strategy<Value = Category> {
    prop::sample::select(Category::ALL.to_vec())
}

pub fn category_partition() -> Result<(), String> {
    let pairs = [(true, true), (false, true), (true, false), (false, false)];
    let image: BTreeSet<u8> = pairs.iter().map(|(a, b)| category_of(*a, *b).value()).collect();
    if image != BTreeSet::from([1, 2, 3, 4]) {
        return Err(format!("category_of is not a bijection: {image:?}"));
    }
    run(prop::collection::vec((category(), any::<bool>()), 0..40), |posts| {
        let dump: Vec<AnnotatedPost> = posts
            .iter()
            .enumerate()
            .map(|(i, (c, _))| AnnotatedPost {
                id: format!("p{i}"),
                domains: vec![],
                category: *c,
                annotations: vec![],
                merged: vec![],
            })
            .collect();
        let gold: Vec<GoldLabel> = posts
            .iter()
            .enumerate()
            .map(|(i, (_, d))| GoldLabel { post_id: format!("p{i}"), is_domain: *d, gold_entities: vec![] })
            .collect();
        let rows = category_report(&dump, &gold).map_err(|e| TestCaseError::fail(e.to_string()))?;
        prop_assert_eq!(rows.len(), 4);
        prop_assert_eq!(rows.iter().map(|r| r.size).sum::<u64>(), posts.len() as u64);
        for row in &rows {
            let size = posts.iter().filter(|(c, _)| *c == row.category).count() as u64;
            let relevant = posts.iter().filter(|(c, d)| *c == row.category && *d).count() as u64;
            prop_assert_eq!(row.size, size);
            prop_assert_eq!(row.domain_relevant, relevant);
            prop_assert_eq!(row.percent.is_none(), size == 0);
        }
        Ok(())
    })
}

/// The property suites the acceptance gate requires.
pub fn required_suites() -> Vec<(&'static str, Check)> {
    vec![
        ("cleansing idempotence", cleansing_idempotent as Check),
        ("cleansing forbidden characters", cleansing_forbidden_chars),
        ("annotator vs brute force", annotator_matches_brute_force),
        ("n-triples round trip", ntriples_round_trip),
        ("repository persistence round trip", persistence_round_trip),
        ("repository inference closure", inference_closure),
        ("metric bounds", metric_bounds),
        ("category partition", category_partition),
    ]
}
