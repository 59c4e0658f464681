//! JSON Lines input with line-numbered errors.

use std::collections::HashSet;

use serde::de::DeserializeOwned;
use serde::Serialize;
use thiserror::Error;

use crate::text::Post;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}: {message}")]
pub struct JsonlError {
    pub line: usize,
    pub message: String,
}

/// Parses every non-blank line as one `T`.
pub fn read_jsonl<T: DeserializeOwned>(text: &str) -> Result<Vec<T>, JsonlError> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| serde_json::from_str(l).map_err(|e| JsonlError { line: i + 1, message: e.to_string() }))
        .collect()
}

pub fn write_jsonl<T: Serialize>(items: &[T]) -> String {
    let mut out = String::new();
    for item in items {
        out.push_str(&serde_json::to_string(item).expect("records serialize"));
        out.push('\n');
    }
    out
}

/// Reads a dataset, rejecting empty and repeated ids.
pub fn read_posts(text: &str) -> Result<Vec<Post>, JsonlError> {
    let mut seen = HashSet::new();
    let mut posts = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let err = |message: String| JsonlError { line: i + 1, message };
        let post: Post = serde_json::from_str(line).map_err(|e| err(e.to_string()))?;
        if post.id.is_empty() {
            return Err(err("empty post id".into()));
        }
        if !seen.insert(post.id.clone()) {
            return Err(err(format!("duplicate post id {:?}", post.id)));
        }
        posts.push(post);
    }
    Ok(posts)
}
