use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

#[derive(Debug, Parser)]
#[command(name = "ontodomain", version, about = "Ontology-based entity annotation and domain classification of short posts")]
pub struct Cli {
    #[command(flatten)]
    pub common: CommonArgs,
    #[command(subcommand)]
    pub command: Command,
}

/// Flags shared by every subcommand. Each may also come from `--config`.
#[derive(Debug, Clone, Default, Args)]
pub struct CommonArgs {
    /// key = value file supplying defaults for the flags below
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,
    /// Input dataset, JSON Lines with id, user, text and optional created_at
    #[arg(long, global = true, value_name = "FILE")]
    pub dataset: Option<PathBuf>,
    /// Ontology in N-Triples; repeat to register several domains
    #[arg(long, global = true, value_name = "FILE")]
    pub ontology: Vec<PathBuf>,
    /// Recorded classifier responses, JSON Lines
    #[arg(long, global = true, value_name = "FILE")]
    pub fixtures: Option<PathBuf>,
    /// Classifier service root; used instead of --fixtures when given
    #[arg(long, global = true, value_name = "URL")]
    pub classifier_url: Option<String>,
    /// owl:sameAs link table in N-Triples
    #[arg(long, global = true, value_name = "FILE")]
    pub links: Option<PathBuf>,
    /// Gold labels, JSON Lines
    #[arg(long, global = true, value_name = "FILE")]
    pub gold: Option<PathBuf>,
    /// Per-user domain history, read if present and written back
    #[arg(long, global = true, value_name = "FILE")]
    pub history: Option<PathBuf>,
    /// Output directory
    #[arg(long, global = true, value_name = "DIR")]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_name = "N")]
    pub min_posts: Option<u64>,
    #[arg(long, global = true, value_name = "K")]
    pub top_k: Option<usize>,
    #[arg(long, global = true, value_name = "ADDR")]
    pub serve_addr: Option<String>,
    /// Target domain whose ontology always annotates
    #[arg(long, global = true, value_name = "NAME")]
    pub domain: Option<String>,
    /// Stage input; defaults to the previous stage's file in --out
    #[arg(long, global = true, value_name = "FILE")]
    pub input: Option<PathBuf>,
    /// Fall back to the bundled politics fixtures for unset inputs
    #[arg(long, global = true)]
    pub bundled: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Cleanse post texts
    Clean,
    /// Attach classifier taxonomies and entities
    Classify,
    /// Infer each post's domains from its author's history
    InferDomains,
    /// Annotate posts against the ontologies and assign categories
    Annotate,
    /// Emit enrichment and link triples
    Enrich,
    /// Build a repository file from triples
    Load,
    /// Run a single-pattern query against a repository file
    Query {
        /// Query text; read from stdin when absent
        query: Option<String>,
        #[arg(long, value_name = "FILE")]
        repository: Option<PathBuf>,
        /// Print rows as a JSON array of {s,p,o}
        #[arg(long)]
        json: bool,
    },
    /// Entity metrics and the category report
    Evaluate {
        /// correct,incorrect,missing counts to score directly
        #[arg(long, value_name = "C,I,M")]
        counts: Option<String>,
    },
    /// Markdown and CSV tables
    Report,
    /// Every stage in order
    Pipeline,
    /// Serve POST /query over HTTP
    Serve {
        #[arg(long, value_name = "FILE")]
        repository: Option<PathBuf>,
    },
}
