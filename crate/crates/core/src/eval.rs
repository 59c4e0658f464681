//! Precision, recall and F-measure, entity counting against gold labels, the
//! per-category domain report, and rendering of the summary tables.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::annotate::{AnnotatedPost, Category, Source};
use crate::ontology::ElementKind;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("invalid counts: {0}")]
    InvalidCounts(String),
    #[error("no gold label for post {0:?}")]
    MissingGold(String),
}

/// A ratio that falls back to 0 on a zero denominator, flagged as degenerate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Ratio {
    pub value: f64,
    pub degenerate: bool,
}

impl Ratio {
    fn of(num: u64, den: u64) -> Ratio {
        if den == 0 {
            Ratio { value: 0.0, degenerate: true }
        } else {
            Ratio { value: num as f64 / den as f64, degenerate: false }
        }
    }
}

fn checked_ratio(num: u64, den: u64, what: &str) -> Result<Ratio, EvalError> {
    if num > den {
        return Err(EvalError::InvalidCounts(format!("{num} relevant retrieved exceeds {den} {what}")));
    }
    Ok(Ratio::of(num, den))
}

pub fn precision(relevant_retrieved: u64, total_retrieved: u64) -> Result<Ratio, EvalError> {
    checked_ratio(relevant_retrieved, total_retrieved, "retrieved")
}

pub fn recall(relevant_retrieved: u64, total_relevant: u64) -> Result<Ratio, EvalError> {
    checked_ratio(relevant_retrieved, total_relevant, "relevant")
}

/// Harmonic mean; 0 when both inputs are 0.
pub fn f_measure(p: f64, r: f64) -> f64 {
    if p + r == 0.0 {
        0.0
    } else {
        2.0 * p * r / (p + r)
    }
}

/// Nearest-integer percentage of `correct` over the sample.
pub fn extraction_rate(correct: u64, sample_size: u64) -> Result<u32, EvalError> {
    if sample_size == 0 {
        return Err(EvalError::InvalidCounts("sample size must be positive".into()));
    }
    Ok(percent(correct, sample_size))
}

fn percent(num: u64, den: u64) -> u32 {
    (100.0 * num as f64 / den as f64).round() as u32
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct EntityCounts {
    pub correct: u64,
    pub incorrect: u64,
    pub missing: u64,
}

impl EntityCounts {
    pub fn retrieved(&self) -> u64 {
        self.correct + self.incorrect
    }

    pub fn relevant(&self) -> u64 {
        self.correct + self.missing
    }

    pub fn metrics(&self) -> Metrics {
        let p = Ratio::of(self.correct, self.retrieved());
        let r = Ratio::of(self.correct, self.relevant());
        Metrics { precision: p, recall: r, f_measure: f_measure(p.value, r.value) }
    }
}

impl std::ops::AddAssign for EntityCounts {
    fn add_assign(&mut self, rhs: Self) {
        self.correct += rhs.correct;
        self.incorrect += rhs.incorrect;
        self.missing += rhs.missing;
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Metrics {
    pub precision: Ratio,
    pub recall: Ratio,
    pub f_measure: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SourceFilter {
    External,
    Ontology,
    Combined,
}

impl SourceFilter {
    pub const ALL: [SourceFilter; 3] = [SourceFilter::External, SourceFilter::Ontology, SourceFilter::Combined];

    fn admits(self, source: Source) -> bool {
        match self {
            SourceFilter::External => source != Source::Ontology,
            SourceFilter::Ontology => source != Source::External,
            SourceFilter::Combined => true,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            SourceFilter::External => "external",
            SourceFilter::Ontology => "ontology",
            SourceFilter::Combined => "combined",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GoldEntity {
    pub surface: String,
    pub concept: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GoldLabel {
    #[serde(rename = "id")]
    pub post_id: String,
    pub is_domain: bool,
    #[serde(rename = "entities", default)]
    pub gold_entities: Vec<GoldEntity>,
}

type Pair = (String, String);

/// Entities the post extracted under `filter`, as lowercase (surface, type)
/// pairs. Relation triggers are not entities and are left out.
pub fn extracted_pairs(post: &AnnotatedPost, filter: SourceFilter) -> BTreeSet<Pair> {
    let triggers: BTreeSet<Pair> = post
        .annotations
        .iter()
        .filter(|a| a.kind == ElementKind::RelationTrigger)
        .map(|a| (a.surface.to_lowercase(), a.type_label().to_lowercase()))
        .collect();
    post.merged
        .iter()
        .filter(|m| filter.admits(m.source))
        .map(|m| (m.surface.to_lowercase(), m.type_label.to_lowercase()))
        .filter(|pair| !triggers.contains(pair))
        .collect()
}

pub fn gold_pairs(gold: &GoldLabel) -> BTreeSet<Pair> {
    gold.gold_entities.iter().map(|g| (g.surface.to_lowercase(), g.concept.to_lowercase())).collect()
}

fn gold_index(gold: &[GoldLabel]) -> HashMap<&str, &GoldLabel> {
    gold.iter().map(|g| (g.post_id.as_str(), g)).collect()
}

fn lookup<'g>(index: &HashMap<&str, &'g GoldLabel>, id: &str) -> Result<&'g GoldLabel, EvalError> {
    index.get(id).copied().ok_or_else(|| EvalError::MissingGold(id.to_string()))
}

fn post_counts(post: &AnnotatedPost, gold: &GoldLabel, filter: SourceFilter) -> EntityCounts {
    let extracted = extracted_pairs(post, filter);
    let wanted = gold_pairs(gold);
    let correct = extracted.intersection(&wanted).count() as u64;
    EntityCounts {
        correct,
        incorrect: extracted.len() as u64 - correct,
        missing: wanted.len() as u64 - correct,
    }
}

pub fn entity_counts(dump: &[AnnotatedPost], gold: &[GoldLabel], filter: SourceFilter) -> Result<EntityCounts, EvalError> {
    let index = gold_index(gold);
    let mut total = EntityCounts::default();
    for post in dump {
        total += post_counts(post, lookup(&index, &post.id)?, filter);
    }
    Ok(total)
}

/// Entity counts split by post category.
pub fn entity_counts_by_category(
    dump: &[AnnotatedPost],
    gold: &[GoldLabel],
    filter: SourceFilter,
) -> Result<BTreeMap<Category, EntityCounts>, EvalError> {
    let index = gold_index(gold);
    let mut out: BTreeMap<Category, EntityCounts> = Category::ALL.iter().map(|c| (*c, EntityCounts::default())).collect();
    for post in dump {
        *out.get_mut(&post.category).expect("all categories present") +=
            post_counts(post, lookup(&index, &post.id)?, filter);
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CategoryRow {
    pub category: Category,
    pub size: u64,
    pub domain_relevant: u64,
    /// `None` for an empty category.
    pub percent: Option<u32>,
}

pub fn category_report(dump: &[AnnotatedPost], gold: &[GoldLabel]) -> Result<Vec<CategoryRow>, EvalError> {
    let index = gold_index(gold);
    let mut tally: BTreeMap<Category, (u64, u64)> = Category::ALL.iter().map(|c| (*c, (0, 0))).collect();
    for post in dump {
        let g = lookup(&index, &post.id)?;
        let entry = tally.get_mut(&post.category).expect("all categories present");
        entry.0 += 1;
        entry.1 += u64::from(g.is_domain);
    }
    Ok(tally
        .into_iter()
        .map(|(category, (size, relevant))| CategoryRow {
            category,
            size,
            domain_relevant: relevant,
            percent: (size > 0).then(|| percent(relevant, size)),
        })
        .collect())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SourceSummary {
    pub source: SourceFilter,
    pub by_category: BTreeMap<Category, EntityCounts>,
    pub total: EntityCounts,
    /// Correct entities as a percentage of the number of posts.
    pub extraction_rate: Option<u32>,
    pub metrics: Metrics,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvaluationReport {
    pub posts: u64,
    pub sources: Vec<SourceSummary>,
    /// Correct entities found by both sources; the combined row counts each once.
    pub overlap: u64,
    pub categories: Vec<CategoryRow>,
}

pub fn evaluate(dump: &[AnnotatedPost], gold: &[GoldLabel]) -> Result<EvaluationReport, EvalError> {
    let posts = dump.len() as u64;
    let mut sources = Vec::new();
    for filter in SourceFilter::ALL {
        let by_category = entity_counts_by_category(dump, gold, filter)?;
        let mut total = EntityCounts::default();
        for c in by_category.values() {
            total += *c;
        }
        sources.push(SourceSummary {
            source: filter,
            by_category,
            total,
            extraction_rate: extraction_rate(total.correct, posts).ok(),
            metrics: total.metrics(),
        });
    }
    let overlap = sources[0].total.correct + sources[1].total.correct - sources[2].total.correct;
    Ok(EvaluationReport { posts, sources, overlap, categories: category_report(dump, gold)? })
}

fn ratio_cell(r: Ratio) -> String {
    if r.degenerate { "n/a".to_string() } else { format!("{:.4}", r.value) }
}

fn f_cell(m: &Metrics) -> String {
    if m.precision.degenerate && m.recall.degenerate { "n/a".to_string() } else { format!("{:.4}", m.f_measure) }
}

fn opt_percent(p: Option<u32>) -> String {
    p.map_or_else(|| "n/a".to_string(), |v| format!("{v}%"))
}

pub fn render_markdown(report: &EvaluationReport) -> String {
    let mut out = String::new();
    let cats = "| Cat 1 | Cat 2 | Cat 3 | Cat 4 |";
    let _ = writeln!(out, "# Evaluation\n\nPosts: {}\n", report.posts);

    let _ = writeln!(out, "## Correct extracted entities\n\n| Source {cats} Total | % of sample |");
    let _ = writeln!(out, "|---|---|---|---|---|---|---|");
    for s in &report.sources {
        let cells: Vec<String> = s.by_category.values().map(|c| c.correct.to_string()).collect();
        let _ = writeln!(out, "| {} | {} | {} | {} |", s.source.name(), cells.join(" | "), s.total.correct, opt_percent(s.extraction_rate));
    }
    if report.overlap > 0 {
        let _ = writeln!(out, "\nBoth sources found {} of the same correct entities; the combined row counts them once.", report.overlap);
    }

    let _ = writeln!(out, "\n## Incorrect extracted entities\n\n| Source {cats} Total |");
    let _ = writeln!(out, "|---|---|---|---|---|---|");
    for s in &report.sources {
        let cells: Vec<String> = s.by_category.values().map(|c| c.incorrect.to_string()).collect();
        let _ = writeln!(out, "| {} | {} | {} |", s.source.name(), cells.join(" | "), s.total.incorrect);
    }

    let _ = writeln!(out, "\n## Precision, recall and F-measure\n");
    let _ = writeln!(out, "| Source | Correct | Incorrect | Missing | Retrieved | Relevant | Precision | Recall | F-measure |");
    let _ = writeln!(out, "|---|---|---|---|---|---|---|---|---|");
    for s in &report.sources {
        let t = &s.total;
        let m = &s.metrics;
        let _ = writeln!(
            out,
            "| {} | {} | {} | {} | {} | {} | {} | {} | {} |",
            s.source.name(),
            t.correct,
            t.incorrect,
            t.missing,
            t.retrieved(),
            t.relevant(),
            ratio_cell(m.precision),
            ratio_cell(m.recall),
            f_cell(m)
        );
    }

    let _ = writeln!(out, "\n## Posts judged in-domain by category\n\n| Category | Posts | In-domain | Percent |");
    let _ = writeln!(out, "|---|---|---|---|");
    for row in &report.categories {
        let _ = writeln!(out, "| {} | {} | {} | {} |", row.category, row.size, row.domain_relevant, opt_percent(row.percent));
    }
    out
}

/// `(file name, contents)` pairs: one CSV per table.
pub fn render_csv(report: &EvaluationReport) -> Vec<(&'static str, String)> {
    let mut entities = String::from("source,category,correct,incorrect,missing\n");
    let mut metrics = String::from("source,correct,incorrect,missing,retrieved,relevant,precision,recall,f_measure,extraction_rate\n");
    for s in &report.sources {
        for (cat, c) in &s.by_category {
            let _ = writeln!(entities, "{},{},{},{},{}", s.source.name(), cat, c.correct, c.incorrect, c.missing);
        }
        let t = &s.total;
        let _ = writeln!(entities, "{},total,{},{},{}", s.source.name(), t.correct, t.incorrect, t.missing);
        let m = &s.metrics;
        let _ = writeln!(
            metrics,
            "{},{},{},{},{},{},{},{},{},{}",
            s.source.name(),
            t.correct,
            t.incorrect,
            t.missing,
            t.retrieved(),
            t.relevant(),
            ratio_cell(m.precision),
            ratio_cell(m.recall),
            f_cell(m),
            s.extraction_rate.map_or("n/a".to_string(), |v| v.to_string())
        );
    }
    let mut categories = String::from("category,posts,in_domain,percent\n");
    for row in &report.categories {
        let pct = row.percent.map_or("n/a".to_string(), |v| v.to_string());
        let _ = writeln!(categories, "{},{},{},{}", row.category, row.size, row.domain_relevant, pct);
    }
    vec![("entities.csv", entities), ("metrics.csv", metrics), ("categories.csv", categories)]
}
