//! Batch classification against a sentiment inference service.
//!
//! Contract: `POST {endpoint}/classify` with `{"texts": [...]}` returning
//! `{"labels": [...]}` of equal length.

use std::thread;
use std::time::Duration;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{Label, LabelRecord, SentimentError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ClassifierError {
    /// Connection failures, timeouts and 5xx/429 responses.
    #[error("transient failure: {0}")]
    Transient(String),
    #[error("service answered HTTP {0}")]
    Status(u16),
    #[error("sent {sent} texts but received {received} labels")]
    LengthMismatch { sent: usize, received: usize },
    #[error("malformed response: {0}")]
    Malformed(String),
}

impl ClassifierError {
    fn retryable(&self) -> bool {
        matches!(self, ClassifierError::Transient(_))
    }
}

/// Anything that assigns one raw label string per input text.
pub trait Classifier: Sync {
    fn classify(&self, texts: &[String]) -> Result<Vec<String>, ClassifierError>;
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RetryPolicy {
    pub max_retries: u32,
    pub base_delay: Duration,
    pub max_delay: Duration,
}

impl Default for RetryPolicy {
    fn default() -> Self {
        RetryPolicy {
            max_retries: 4,
            base_delay: Duration::from_millis(200),
            max_delay: Duration::from_secs(5),
        }
    }
}

impl RetryPolicy {
    /// Delay before retry number `attempt` (0-based): `base * 2^attempt`,
    /// capped at `max_delay`.
    pub fn delay(&self, attempt: u32) -> Duration {
        let factor = 2u32.saturating_pow(attempt);
        self.base_delay.saturating_mul(factor).min(self.max_delay)
    }
}

#[derive(Serialize)]
struct ClassifyRequest<'a> {
    texts: &'a [String],
}

#[derive(Deserialize)]
struct ClassifyResponse {
    labels: Vec<String>,
}

/// Blocking HTTP client with bounded exponential backoff.
pub struct HttpClassifier {
    url: String,
    client: reqwest::blocking::Client,
    retry: RetryPolicy,
}

impl HttpClassifier {
    pub fn new(endpoint: &str, timeout: Duration, retry: RetryPolicy) -> Result<Self, ClassifierError> {
        let client = reqwest::blocking::Client::builder()
            .timeout(timeout)
            .build()
            .map_err(|e| ClassifierError::Transient(e.to_string()))?;
        Ok(HttpClassifier {
            url: format!("{}/classify", endpoint.trim_end_matches('/')),
            client,
            retry,
        })
    }

    fn attempt(&self, texts: &[String]) -> Result<Vec<String>, ClassifierError> {
        let resp = self
            .client
            .post(&self.url)
            .json(&ClassifyRequest { texts })
            .send()
            .map_err(|e| ClassifierError::Transient(e.to_string()))?;
        let status = resp.status();
        if status.is_server_error() || status.as_u16() == 429 {
            return Err(ClassifierError::Transient(format!("HTTP {}", status.as_u16())));
        }
        if status.as_u16() != 200 {
            return Err(ClassifierError::Status(status.as_u16()));
        }
        let body: ClassifyResponse = resp
            .json()
            .map_err(|e| ClassifierError::Malformed(e.to_string()))?;
        if body.labels.len() != texts.len() {
            return Err(ClassifierError::LengthMismatch {
                sent: texts.len(),
                received: body.labels.len(),
            });
        }
        Ok(body.labels)
    }
}

impl Classifier for HttpClassifier {
    fn classify(&self, texts: &[String]) -> Result<Vec<String>, ClassifierError> {
        let mut attempt = 0;
        loop {
            match self.attempt(texts) {
                Err(e) if e.retryable() && attempt < self.retry.max_retries => {
                    log::warn!("classify attempt {} failed: {e}; retrying", attempt + 1);
                    thread::sleep(self.retry.delay(attempt));
                    attempt += 1;
                }
                other => return other,
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClassifyItem {
    pub target_id: String,
    pub context_id: String,
    pub text: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClassifyConfig {
    pub source_id: String,
    pub batch_size: usize,
    /// Upper bound on concurrently running batches.
    pub max_in_flight: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ItemError {
    pub target_id: String,
    pub context_id: String,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BatchFailure {
    pub context_ids: Vec<String>,
    pub error: ClassifierError,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ClassificationOutcome {
    pub records: Vec<LabelRecord>,
    pub item_errors: Vec<ItemError>,
    pub batch_failures: Vec<BatchFailure>,
}

enum BatchResult {
    Labels(Vec<Result<LabelRecord, ItemError>>),
    Failed(BatchFailure),
}

/// Classifies contexts in batches. A failed batch is reported with its
/// context ids; an unknown label only fails its own item. Results keep the
/// input order regardless of scheduling.
pub fn classify_contexts(
    items: &[ClassifyItem],
    classifier: &dyn Classifier,
    config: &ClassifyConfig,
) -> Result<ClassificationOutcome, SentimentError> {
    if config.batch_size == 0 || config.max_in_flight == 0 {
        return Err(SentimentError::InvalidBatchSize);
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.max_in_flight)
        .build()
        .map_err(|e| SentimentError::ThreadPool(e.to_string()))?;

    let results: Vec<BatchResult> = pool.install(|| {
        items
            .par_chunks(config.batch_size)
            .map(|batch| {
                let texts: Vec<String> = batch.iter().map(|i| i.text.clone()).collect();
                match classifier.classify(&texts) {
                    Ok(labels) if labels.len() == batch.len() => BatchResult::Labels(
                        batch
                            .iter()
                            .zip(labels)
                            .map(|(item, raw)| {
                                raw.parse::<Label>()
                                    .map(|label| LabelRecord {
                                        target_id: item.target_id.clone(),
                                        context_id: item.context_id.clone(),
                                        label,
                                        source_id: config.source_id.clone(),
                                    })
                                    .map_err(|message| ItemError {
                                        target_id: item.target_id.clone(),
                                        context_id: item.context_id.clone(),
                                        message,
                                    })
                            })
                            .collect(),
                    ),
                    Ok(labels) => BatchResult::Failed(BatchFailure {
                        context_ids: batch.iter().map(|i| i.context_id.clone()).collect(),
                        error: ClassifierError::LengthMismatch {
                            sent: batch.len(),
                            received: labels.len(),
                        },
                    }),
                    Err(error) => BatchResult::Failed(BatchFailure {
                        context_ids: batch.iter().map(|i| i.context_id.clone()).collect(),
                        error,
                    }),
                }
            })
            .collect()
    });

    let mut outcome = ClassificationOutcome::default();
    for r in results {
        match r {
            BatchResult::Labels(items) => {
                for item in items {
                    match item {
                        Ok(rec) => outcome.records.push(rec),
                        Err(e) => outcome.item_errors.push(e),
                    }
                }
            }
            BatchResult::Failed(f) => outcome.batch_failures.push(f),
        }
    }
    Ok(outcome)
}
