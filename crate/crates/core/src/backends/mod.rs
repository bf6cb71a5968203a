//! Question-generation and question-answering backends: a deterministic
//! rule-based stub, a record/replay cache, and a remote service client.

use serde::{Deserialize, Serialize};

use crate::annotate::CandidateSpan;
use crate::error::{Error, Result};

pub mod replay;
pub mod service;
pub mod stub;

pub use replay::{RecordingQa, RecordingQg, ReplayBackend};
pub use service::ServiceBackend;
pub use stub::StubBackend;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    Model,
    HumanShort,
    HumanIntermediate,
    HumanLong,
    Stub,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Question {
    pub question_id: String,
    pub text: String,
    pub target_span_id: String,
    pub provenance: Provenance,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Answer {
    pub text: String,
    pub start: Option<usize>,
    pub end: Option<usize>,
    pub answerable_prob: f64,
    pub unanswerable: bool,
}

impl Answer {
    pub fn unanswerable() -> Self {
        Answer {
            text: String::new(),
            start: None,
            end: None,
            answerable_prob: 0.0,
            unanswerable: true,
        }
    }

    /// The unanswerable flag must agree with the threshold rule.
    pub fn validate(&self, threshold: f64) -> Result<()> {
        if !(0.0..=1.0).contains(&self.answerable_prob) {
            return Err(Error::Backend(format!(
                "answerable_prob {} outside [0, 1]",
                self.answerable_prob
            )));
        }
        if self.unanswerable != (self.answerable_prob < threshold) {
            return Err(Error::Backend(format!(
                "unanswerable flag inconsistent with prob {} at threshold {}",
                self.answerable_prob, threshold
            )));
        }
        if self.unanswerable && (!self.text.is_empty() || self.start.is_some()) {
            return Err(Error::Backend(
                "unanswerable answer carries text or offsets".into(),
            ));
        }
        Ok(())
    }
}

pub trait QuestionGenerator: Send + Sync {
    fn provider_id(&self) -> &str;
    fn generate(&self, span: &CandidateSpan, summary_context: &str) -> Result<Vec<Question>>;
}

pub trait QuestionAnswerer: Send + Sync {
    fn provider_id(&self) -> &str;
    fn answer(&self, question: &Question, context: &str) -> Result<Answer>;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Provider {
    Service,
    Replay,
    Stub,
}

/// Backend selection and shared knobs.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BackendConfig {
    pub provider: Provider,
    #[serde(default)]
    pub qg_endpoint: Option<String>,
    #[serde(default)]
    pub qa_endpoint: Option<String>,
    #[serde(default)]
    pub cache_path: Option<String>,
    #[serde(default = "default_questions_per_span")]
    pub questions_per_span: usize,
    #[serde(default = "default_answerability_threshold")]
    pub answerability_threshold: f64,
    #[serde(default = "default_max_concurrency")]
    pub max_concurrency: usize,
    /// Stub question context window: tokens kept on each side of the
    /// target span; None keeps the full sentence.
    #[serde(default)]
    pub context_window: Option<usize>,
    #[serde(default = "default_retries")]
    pub retries: u32,
    #[serde(default = "default_timeout_ms")]
    pub timeout_ms: u64,
}

fn default_questions_per_span() -> usize {
    1
}
fn default_answerability_threshold() -> f64 {
    0.5
}
fn default_max_concurrency() -> usize {
    4
}
fn default_retries() -> u32 {
    3
}
fn default_timeout_ms() -> u64 {
    30_000
}

impl BackendConfig {
    pub fn stub() -> Self {
        BackendConfig {
            provider: Provider::Stub,
            qg_endpoint: None,
            qa_endpoint: None,
            cache_path: None,
            questions_per_span: default_questions_per_span(),
            answerability_threshold: default_answerability_threshold(),
            max_concurrency: default_max_concurrency(),
            context_window: None,
            retries: default_retries(),
            timeout_ms: default_timeout_ms(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.questions_per_span == 0 {
            return Err(Error::Config("questions_per_span must be positive".into()));
        }
        if !(0.0..=1.0).contains(&self.answerability_threshold) {
            return Err(Error::Config(
                "answerability_threshold must lie in [0, 1]".into(),
            ));
        }
        if self.max_concurrency == 0 {
            return Err(Error::Config("max_concurrency must be positive".into()));
        }
        match self.provider {
            Provider::Service => {
                let qg = self
                    .qg_endpoint
                    .clone()
                    .or_else(|| std::env::var("FCL_QG_ENDPOINT").ok());
                let qa = self
                    .qa_endpoint
                    .clone()
                    .or_else(|| std::env::var("FCL_QA_ENDPOINT").ok());
                if qg.is_none() || qa.is_none() {
                    return Err(Error::Config(
                        "service provider requires qg/qa endpoints (flags or FCL_QG_ENDPOINT / FCL_QA_ENDPOINT)"
                            .into(),
                    ));
                }
            }
            Provider::Replay => {
                if self.cache_path.is_none() {
                    return Err(Error::Config("replay provider requires cache_path".into()));
                }
            }
            Provider::Stub => {}
        }
        Ok(())
    }

    /// Construct the QG and QA backends this config describes.
    pub fn build(&self) -> Result<(Box<dyn QuestionGenerator>, Box<dyn QuestionAnswerer>)> {
        self.validate()?;
        match self.provider {
            Provider::Stub => {
                let stub = StubBackend::new(
                    self.questions_per_span,
                    self.context_window,
                    self.answerability_threshold,
                );
                Ok((Box::new(stub.clone()), Box::new(stub)))
            }
            Provider::Replay => {
                let cache = ReplayBackend::load(self.cache_path.as_ref().unwrap())?;
                Ok((Box::new(cache.clone()), Box::new(cache)))
            }
            Provider::Service => {
                let svc = ServiceBackend::from_config(self)?;
                Ok((Box::new(svc.clone()), Box::new(svc)))
            }
        }
    }
}
