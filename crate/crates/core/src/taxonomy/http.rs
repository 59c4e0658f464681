use std::time::Duration;

use serde::{Deserialize, Serialize};

use super::{Classifier, ClassifierError, ClassifierResponse, ExternalEntity, TaxonomyLabel};

#[derive(Debug, Clone)]
pub struct HttpConfig {
    /// Service root; requests go to `{base_url}/classify`.
    pub base_url: String,
    pub timeout: Duration,
    /// Extra attempts after the first failure.
    pub retries: u32,
    pub retry_backoff: Duration,
}

impl HttpConfig {
    pub fn new(base_url: impl Into<String>) -> Self {
        HttpConfig {
            base_url: base_url.into(),
            timeout: Duration::from_secs(10),
            retries: 2,
            retry_backoff: Duration::from_millis(200),
        }
    }
}

#[derive(Serialize)]
struct ClassifyRequest<'a> {
    text: &'a str,
}

#[derive(Deserialize)]
struct ClassifyReply {
    #[serde(default)]
    taxonomies: Vec<TaxonomyLabel>,
    #[serde(default)]
    entities: Vec<ExternalEntity>,
}

/// Live classifier client. Holds only a connection pool; calls are independent.
pub struct HttpClassifier {
    client: reqwest::blocking::Client,
    config: HttpConfig,
}

impl HttpClassifier {
    pub fn new(config: HttpConfig) -> Result<Self, ClassifierError> {
        let client = reqwest::blocking::Client::builder()
            .timeout(config.timeout)
            .build()
            .map_err(|e| ClassifierError::Transport(e.to_string()))?;
        Ok(HttpClassifier { client, config })
    }

    fn attempt(&self, url: &str, text: &str) -> Result<ClassifyReply, Attempt> {
        let response = self
            .client
            .post(url)
            .json(&ClassifyRequest { text })
            .send()
            .map_err(|e| Attempt::Retry(e.to_string()))?;
        let status = response.status();
        if status.is_server_error() {
            return Err(Attempt::Retry(format!("HTTP {status}")));
        }
        if status != reqwest::StatusCode::OK {
            return Err(Attempt::Fatal(ClassifierError::Transport(format!("HTTP {status}"))));
        }
        response
            .json::<ClassifyReply>()
            .map_err(|e| Attempt::Fatal(ClassifierError::Malformed(e.to_string())))
    }
}

enum Attempt {
    Retry(String),
    Fatal(ClassifierError),
}

impl Classifier for HttpClassifier {
    fn classify(&self, post_id: &str, text: &str) -> Result<ClassifierResponse, ClassifierError> {
        let url = format!("{}/classify", self.config.base_url.trim_end_matches('/'));
        let mut last = String::new();
        for attempt in 0..=self.config.retries {
            if attempt > 0 {
                std::thread::sleep(self.config.retry_backoff * attempt);
            }
            match self.attempt(&url, text) {
                Ok(reply) => {
                    return ClassifierResponse {
                        post_id: post_id.to_string(),
                        taxonomies: reply.taxonomies,
                        entities: reply.entities,
                    }
                    .normalized();
                }
                Err(Attempt::Fatal(e)) => return Err(e),
                Err(Attempt::Retry(reason)) => last = reason,
            }
        }
        Err(ClassifierError::Transport(format!(
            "{last} (after {} attempts)",
            self.config.retries + 1
        )))
    }
}
