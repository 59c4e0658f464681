//! `key = value` defaults file; flags given on the command line win.

use std::path::{Path, PathBuf};

use anyhow::Context;
use serde::Deserialize;

use crate::args::CommonArgs;

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum OneOrMany {
    One(PathBuf),
    Many(Vec<PathBuf>),
}

const KEYS: [&str; 13] = [
    "dataset", "ontology", "fixtures", "classifier-url", "links", "gold", "history", "out", "min-posts", "top-k",
    "serve-addr", "domain", "bundled",
];

#[derive(Debug, Default, Deserialize)]
#[serde(rename_all = "kebab-case")]
struct ConfigFile {
    dataset: Option<PathBuf>,
    ontology: Option<OneOrMany>,
    fixtures: Option<PathBuf>,
    classifier_url: Option<String>,
    links: Option<PathBuf>,
    gold: Option<PathBuf>,
    history: Option<PathBuf>,
    out: Option<PathBuf>,
    min_posts: Option<u64>,
    top_k: Option<usize>,
    serve_addr: Option<String>,
    domain: Option<String>,
    bundled: Option<bool>,
}

/// Fills unset flags from the config file, if one was named.
/// Relative paths in the file resolve against the file's directory.
pub fn apply(mut args: CommonArgs) -> anyhow::Result<CommonArgs> {
    let Some(path) = args.config.clone() else {
        return Ok(args);
    };
    let text = std::fs::read_to_string(&path).with_context(|| format!("{}: cannot read", path.display()))?;
    let located = |offset: usize, message: &str| {
        anyhow::anyhow!("{}:{}: {message}", path.display(), text[..offset].matches('\n').count() + 1)
    };
    let table: toml::Table = toml::from_str(&text).map_err(|e| match e.span() {
        Some(span) => located(span.start, e.message()),
        None => anyhow::anyhow!("{}: {}", path.display(), e.message()),
    })?;
    if let Some(key) = table.keys().find(|k| !KEYS.contains(&k.as_str())) {
        let offset = text.find(key.as_str()).unwrap_or(0);
        return Err(located(offset, &format!("unknown key `{key}`; expected one of {}", KEYS.join(", "))));
    }
    let file: ConfigFile = toml::from_str(&text).map_err(|e| match e.span() {
        Some(span) => located(span.start, e.message()),
        None => anyhow::anyhow!("{}: {}", path.display(), e.message()),
    })?;
    let base = path.parent().unwrap_or(Path::new(""));
    let rel = |p: PathBuf| if p.is_absolute() { p } else { base.join(p) };

    args.dataset = args.dataset.or(file.dataset.map(rel));
    if args.ontology.is_empty() {
        args.ontology = match file.ontology {
            Some(OneOrMany::One(p)) => vec![rel(p)],
            Some(OneOrMany::Many(ps)) => ps.into_iter().map(rel).collect(),
            None => Vec::new(),
        };
    }
    args.fixtures = args.fixtures.or(file.fixtures.map(rel));
    args.classifier_url = args.classifier_url.or(file.classifier_url);
    args.links = args.links.or(file.links.map(rel));
    args.gold = args.gold.or(file.gold.map(rel));
    args.history = args.history.or(file.history.map(rel));
    args.out = args.out.or(file.out.map(rel));
    args.min_posts = args.min_posts.or(file.min_posts);
    args.top_k = args.top_k.or(file.top_k);
    args.serve_addr = args.serve_addr.or(file.serve_addr);
    args.domain = args.domain.or(file.domain);
    args.bundled |= file.bundled.unwrap_or(false);
    Ok(args)
}
