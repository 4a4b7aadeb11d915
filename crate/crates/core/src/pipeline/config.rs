//! Run configuration: one TOML file, overridable by command-line flags.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::PipelineError;
use crate::corpus::UnitPolicy;
use crate::lexicon::DuplicatePolicy;
use crate::regression::{CvConfig, CvMetric};
use crate::sentiment::ComparisonMode;
use crate::valence::Pooling;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Unit {
    #[default]
    Document,
    Sentence,
}

impl Unit {
    pub fn policy(&self) -> UnitPolicy {
        match self {
            Unit::Document => UnitPolicy::WholeDocument,
            Unit::Sentence => UnitPolicy::PerSentence,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CompareMode {
    #[default]
    Sign,
    Epsilon,
}

/// Input files. Relative paths resolve against the config file's directory.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Paths {
    pub targets: PathBuf,
    #[serde(default)]
    pub corpora: Vec<PathBuf>,
    pub lexicon: Option<PathBuf>,
    pub tagged: Option<PathBuf>,
    pub labels: Option<PathBuf>,
    pub metadata: Option<PathBuf>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MatchingConfig {
    pub unit: Unit,
    pub case_insensitive: bool,
    pub exclude_overlaps: bool,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScoringConfig {
    pub pooling: Pooling,
    pub duplicate_policy: DuplicatePolicy,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CompareConfig {
    pub mode: CompareMode,
    pub epsilon: f64,
}

impl Default for CompareConfig {
    fn default() -> Self {
        CompareConfig {
            mode: CompareMode::Sign,
            epsilon: 0.1,
        }
    }
}

impl CompareConfig {
    pub fn comparison_mode(&self) -> ComparisonMode {
        match self.mode {
            CompareMode::Sign => ComparisonMode::SignClass,
            CompareMode::Epsilon => ComparisonMode::NumericEpsilon(self.epsilon),
        }
    }
}

/// An HTTP classification service whose labels are added to the label file's.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ServiceConfig {
    pub endpoint: String,
    pub source_id: String,
    #[serde(default = "default_batch_size")]
    pub batch_size: usize,
    #[serde(default = "default_in_flight")]
    pub max_in_flight: usize,
    #[serde(default = "default_timeout_ms")]
    pub timeout_ms: u64,
    #[serde(default = "default_retries")]
    pub max_retries: u32,
}

fn default_batch_size() -> usize {
    16
}
fn default_in_flight() -> usize {
    4
}
fn default_timeout_ms() -> u64 {
    10_000
}
fn default_retries() -> u32 {
    3
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SentimentConfig {
    /// Annotator ids whose labels pool into the human approach; every other
    /// source id is treated as a model.
    pub human_sources: Vec<String>,
    /// Annotators left out of agreement and of the human pool.
    pub exclude_annotators: Vec<String>,
    pub service: Option<ServiceConfig>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RegressionConfig {
    pub folds: usize,
    pub repeats: usize,
    pub candidates: usize,
    pub metric: CvMetric,
}

impl Default for RegressionConfig {
    fn default() -> Self {
        let cv = CvConfig::default();
        RegressionConfig {
            folds: cv.folds,
            repeats: cv.repeats,
            candidates: cv.n_candidates,
            metric: cv.metric,
        }
    }
}

fn default_min_freq() -> usize {
    5
}

fn default_out() -> PathBuf {
    PathBuf::from("out")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub paths: Paths,
    #[serde(default = "default_min_freq")]
    pub min_freq: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub matching: MatchingConfig,
    #[serde(default)]
    pub scoring: ScoringConfig,
    #[serde(default)]
    pub compare: CompareConfig,
    #[serde(default)]
    pub sentiment: SentimentConfig,
    #[serde(default)]
    pub regression: RegressionConfig,
    /// Output directory; not part of the config hash.
    #[serde(default = "default_out", skip_serializing)]
    pub out: PathBuf,
    /// Directory that relative input paths resolve against.
    #[serde(skip)]
    pub base_dir: PathBuf,
    /// Worker threads for parallel stages; not part of the config hash.
    #[serde(skip)]
    pub threads: Option<usize>,
}

/// Flag values that take precedence over the config file.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    pub min_freq: Option<usize>,
    pub seed: Option<u64>,
    pub unit: Option<Unit>,
    pub compare_mode: Option<CompareMode>,
    pub epsilon: Option<f64>,
    pub out: Option<PathBuf>,
    pub threads: Option<usize>,
}

impl RunConfig {
    pub fn from_toml(text: &str, base_dir: &Path) -> Result<Self, PipelineError> {
        let mut cfg: RunConfig =
            toml::from_str(text).map_err(|e| PipelineError::Validation(vec![format!("config: {e}")]))?;
        cfg.base_dir = base_dir.to_path_buf();
        cfg.out = base_dir.join(&cfg.out);
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, PipelineError> {
        let text = std::fs::read_to_string(path).map_err(|_| {
            PipelineError::Validation(vec![format!("config file {} cannot be read", path.display())])
        })?;
        let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
        RunConfig::from_toml(&text, &base)
    }

    /// Applies flag overrides; a flag `--out` is taken relative to the
    /// current directory, like any other command-line path.
    pub fn apply(&mut self, o: &Overrides) {
        if let Some(v) = o.min_freq {
            self.min_freq = v;
        }
        if let Some(v) = o.seed {
            self.seed = v;
        }
        if let Some(v) = o.unit {
            self.matching.unit = v;
        }
        if let Some(v) = o.compare_mode {
            self.compare.mode = v;
        }
        if let Some(v) = o.epsilon {
            self.compare.epsilon = v;
        }
        if let Some(v) = &o.out {
            self.out = v.clone();
        }
        if o.threads.is_some() {
            self.threads = o.threads;
        }
    }

    pub fn resolve(&self, p: &Path) -> PathBuf {
        self.base_dir.join(p)
    }

    /// Every problem with the configuration at once.
    pub fn validate(&self) -> Result<(), PipelineError> {
        let mut problems = Vec::new();
        if self.min_freq < 1 {
            problems.push(format!("min_freq must be at least 1, got {}", self.min_freq));
        }
        if !(self.compare.epsilon >= 0.0) || !self.compare.epsilon.is_finite() {
            problems.push(format!("epsilon must be a non-negative number, got {}", self.compare.epsilon));
        }
        if self.regression.folds < 2 {
            problems.push(format!("regression.folds must be at least 2, got {}", self.regression.folds));
        }
        if self.regression.repeats < 1 || self.regression.candidates < 1 {
            problems.push("regression.repeats and regression.candidates must be at least 1".into());
        }
        if self.threads == Some(0) {
            problems.push("threads must be at least 1".into());
        }
        if self.paths.corpora.is_empty() {
            problems.push("paths.corpora lists no corpus file".into());
        }
        let p = &self.paths;
        let mut referenced: Vec<(&str, &PathBuf)> = vec![("paths.targets", &p.targets)];
        referenced.extend(p.corpora.iter().map(|c| ("paths.corpora", c)));
        for (key, opt) in [
            ("paths.lexicon", &p.lexicon),
            ("paths.tagged", &p.tagged),
            ("paths.labels", &p.labels),
            ("paths.metadata", &p.metadata),
        ] {
            if let Some(path) = opt {
                referenced.push((key, path));
            }
        }
        for (key, path) in referenced {
            if !self.resolve(path).is_file() {
                problems.push(format!("{key}: {} does not exist", self.resolve(path).display()));
            }
        }
        if let Some(s) = &self.sentiment.service {
            if s.batch_size < 1 || s.max_in_flight < 1 {
                problems.push("sentiment.service batch_size and max_in_flight must be at least 1".into());
            }
        }
        if problems.is_empty() {
            Ok(())
        } else {
            Err(PipelineError::Validation(problems))
        }
    }

    pub fn cv_config(&self) -> CvConfig {
        CvConfig {
            folds: self.regression.folds,
            repeats: self.regression.repeats,
            n_candidates: self.regression.candidates,
            seed: self.seed,
            metric: self.regression.metric,
        }
    }

    /// Hex SHA-256 prefix of the canonical config, excluding the output
    /// directory and thread count so that neither changes any output byte.
    pub fn hash(&self) -> String {
        let canonical = serde_json::to_vec(self).expect("config serializes");
        let digest = Sha256::digest(&canonical);
        hex::encode(&digest[..8])
    }
}
