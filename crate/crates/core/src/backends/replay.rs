//! Record/replay cache for QG and QA calls.
//!
//! Cache lines are keyed by a digest of the canonical request JSON, so a
//! recorded run replays bit-identically regardless of which provider
//! produced it.

use std::collections::BTreeMap;
use std::io::BufRead;
use std::path::Path;
use std::sync::{Arc, Mutex};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::annotate::CandidateSpan;
use crate::backends::{Answer, Question, QuestionAnswerer, QuestionGenerator};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct GenerateRequest {
    pub span_text: String,
    pub span_start: usize,
    pub span_end: usize,
    pub context: String,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct AnswerRequest {
    pub question: String,
    pub context: String,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CacheEntry {
    Generate {
        key: String,
        model_id: String,
        request: GenerateRequest,
        questions: Vec<Question>,
    },
    Answer {
        key: String,
        model_id: String,
        request: AnswerRequest,
        answer: Answer,
    },
}

fn digest<T: Serialize>(value: &T) -> String {
    let json = serde_json::to_string(value).expect("request serializes");
    let mut hasher = Sha256::new();
    hasher.update(json.as_bytes());
    let out = hasher.finalize();
    out.iter().map(|b| format!("{b:02x}")).collect()
}

pub fn generate_key(span: &CandidateSpan, context: &str) -> (String, GenerateRequest) {
    let req = GenerateRequest {
        span_text: span.text.clone(),
        span_start: span.start,
        span_end: span.end,
        context: context.to_string(),
    };
    (digest(&req), req)
}

pub fn answer_key(question: &Question, context: &str) -> (String, AnswerRequest) {
    let req = AnswerRequest {
        question: question.text.clone(),
        context: context.to_string(),
    };
    (digest(&req), req)
}

/// Replay backend answering exactly the cached mappings.
#[derive(Debug, Clone, Default)]
pub struct ReplayBackend {
    generates: Arc<BTreeMap<String, Vec<Question>>>,
    answers: Arc<BTreeMap<String, Answer>>,
}

impl ReplayBackend {
    pub fn from_entries(entries: Vec<CacheEntry>) -> Result<Self> {
        let mut generates: BTreeMap<String, Vec<Question>> = BTreeMap::new();
        let mut answers: BTreeMap<String, Answer> = BTreeMap::new();
        for entry in entries {
            match entry {
                CacheEntry::Generate { key, questions, .. } => {
                    if let Some(prev) = generates.get(&key) {
                        if *prev != questions {
                            return Err(Error::Backend(format!(
                                "conflicting cached questions for key {key}"
                            )));
                        }
                    }
                    generates.insert(key, questions);
                }
                CacheEntry::Answer { key, answer, .. } => {
                    if let Some(prev) = answers.get(&key) {
                        if *prev != answer {
                            return Err(Error::Backend(format!(
                                "conflicting cached answers for key {key}"
                            )));
                        }
                    }
                    answers.insert(key, answer);
                }
            }
        }
        Ok(ReplayBackend {
            generates: Arc::new(generates),
            answers: Arc::new(answers),
        })
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let file =
            std::fs::File::open(path).map_err(|e| Error::io(path.display().to_string(), e))?;
        let mut entries = Vec::new();
        for (idx, line) in std::io::BufReader::new(file).lines().enumerate() {
            let line = line.map_err(|e| Error::io(path.display().to_string(), e))?;
            if line.trim().is_empty() {
                continue;
            }
            let entry: CacheEntry = serde_json::from_str(&line).map_err(|e| Error::Malformed {
                line: idx + 1,
                message: e.to_string(),
            })?;
            entries.push(entry);
        }
        Self::from_entries(entries)
    }
}

impl QuestionGenerator for ReplayBackend {
    fn provider_id(&self) -> &str {
        "replay"
    }

    fn generate(&self, span: &CandidateSpan, summary_context: &str) -> Result<Vec<Question>> {
        let (key, _) = generate_key(span, summary_context);
        self.generates
            .get(&key)
            .cloned()
            .ok_or(Error::ReplayMiss(key))
    }
}

impl QuestionAnswerer for ReplayBackend {
    fn provider_id(&self) -> &str {
        "replay"
    }

    fn answer(&self, question: &Question, context: &str) -> Result<Answer> {
        let (key, _) = answer_key(question, context);
        self.answers.get(&key).cloned().ok_or(Error::ReplayMiss(key))
    }
}

/// Shared sink the recording wrappers append to.
#[derive(Debug, Clone, Default)]
pub struct CacheLog {
    entries: Arc<Mutex<Vec<CacheEntry>>>,
}

impl CacheLog {
    pub fn new() -> Self {
        Self::default()
    }

    fn push(&self, entry: CacheEntry) {
        self.entries.lock().expect("cache log poisoned").push(entry);
    }

    pub fn into_entries(self) -> Vec<CacheEntry> {
        self.entries.lock().expect("cache log poisoned").clone()
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let entries = self.entries.lock().expect("cache log poisoned");
        // sort by key for a stable file regardless of call order
        let mut sorted: Vec<&CacheEntry> = entries.iter().collect();
        sorted.sort_by_key(|e| match e {
            CacheEntry::Generate { key, .. } => (0u8, key.clone()),
            CacheEntry::Answer { key, .. } => (1u8, key.clone()),
        });
        let mut out = String::new();
        let mut last: Option<&CacheEntry> = None;
        for entry in sorted {
            if last == Some(entry) {
                continue;
            }
            out.push_str(&serde_json::to_string(entry).expect("entry serializes"));
            out.push('\n');
            last = Some(entry);
        }
        std::fs::write(path.as_ref(), out)
            .map_err(|e| Error::io(path.as_ref().display().to_string(), e))
    }

    pub fn replay(&self) -> Result<ReplayBackend> {
        ReplayBackend::from_entries(self.entries.lock().expect("cache log poisoned").clone())
    }
}

/// Wraps a generator, recording every call into a [`CacheLog`].
pub struct RecordingQg<G> {
    inner: G,
    log: CacheLog,
}

impl<G: QuestionGenerator> RecordingQg<G> {
    pub fn new(inner: G, log: CacheLog) -> Self {
        RecordingQg { inner, log }
    }
}

impl<G: QuestionGenerator> QuestionGenerator for RecordingQg<G> {
    fn provider_id(&self) -> &str {
        self.inner.provider_id()
    }

    fn generate(&self, span: &CandidateSpan, summary_context: &str) -> Result<Vec<Question>> {
        let questions = self.inner.generate(span, summary_context)?;
        let (key, request) = generate_key(span, summary_context);
        self.log.push(CacheEntry::Generate {
            key,
            model_id: self.inner.provider_id().to_string(),
            request,
            questions: questions.clone(),
        });
        Ok(questions)
    }
}

/// Wraps an answerer, recording every call into a [`CacheLog`].
pub struct RecordingQa<A> {
    inner: A,
    log: CacheLog,
}

impl<A: QuestionAnswerer> RecordingQa<A> {
    pub fn new(inner: A, log: CacheLog) -> Self {
        RecordingQa { inner, log }
    }
}

impl<A: QuestionAnswerer> QuestionAnswerer for RecordingQa<A> {
    fn provider_id(&self) -> &str {
        self.inner.provider_id()
    }

    fn answer(&self, question: &Question, context: &str) -> Result<Answer> {
        let answer = self.inner.answer(question, context)?;
        let (key, request) = answer_key(question, context);
        self.log.push(CacheEntry::Answer {
            key,
            model_id: self.inner.provider_id().to_string(),
            request,
            answer: answer.clone(),
        });
        Ok(answer)
    }
}
