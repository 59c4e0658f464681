//! Benchmark inputs scaled up from the bundled fixtures.

use ontodomain_core::fixtures;
use ontodomain_core::jsonl::read_posts;
use ontodomain_core::taxonomy::{ClassifierError, FixtureClassifier};
use ontodomain_core::{Classifier, ClassifierResponse, Post};

/// The bundled posts repeated until `n` exist, with unique ids.
pub fn posts(n: usize) -> Vec<Post> {
    let base = read_posts(fixtures::DATASET_JSONL).expect("bundled dataset parses");
    (0..n)
        .map(|i| {
            let p = &base[i % base.len()];
            Post { id: format!("{}-{i}", p.id), ..p.clone() }
        })
        .collect()
}

/// Answers for a scaled post with the recorded response of its original.
pub struct ScaledClassifier(pub FixtureClassifier);

impl Classifier for ScaledClassifier {
    fn classify(&self, post_id: &str, text: &str) -> Result<ClassifierResponse, ClassifierError> {
        let original = post_id.rsplit_once('-').map_or(post_id, |(id, _)| id);
        let mut response = self.0.classify(original, text)?;
        response.post_id = post_id.to_string();
        Ok(response)
    }
}
