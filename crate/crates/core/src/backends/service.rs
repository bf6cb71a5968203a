//! HTTP client for remote QG/QA services.
//!
//! Protocol (JSON over HTTP, v1):
//!   POST {qg}/v1/generate {"span_text","span_start","span_end","context"}
//!     -> {"questions":[{"text"}]}
//!   POST {qa}/v1/answer {"question","context"}
//!     -> {"answer","start","end","answerable_prob"}
//! Unknown response fields are ignored for forward compatibility.

use std::sync::{Arc, Condvar, Mutex};
use std::time::Duration;

use serde::{Deserialize, Serialize};

use crate::annotate::CandidateSpan;
use crate::backends::{
    Answer, BackendConfig, Provenance, Question, QuestionAnswerer, QuestionGenerator,
};
use crate::error::{Error, Result};

#[derive(Debug, Serialize)]
struct GenerateBody<'a> {
    span_text: &'a str,
    span_start: usize,
    span_end: usize,
    context: &'a str,
}

#[derive(Debug, Deserialize)]
struct GenerateResponse {
    questions: Vec<QuestionText>,
}

#[derive(Debug, Deserialize)]
struct QuestionText {
    text: String,
}

#[derive(Debug, Serialize)]
struct AnswerBody<'a> {
    question: &'a str,
    context: &'a str,
}

#[derive(Debug, Deserialize)]
struct AnswerResponse {
    answer: String,
    start: Option<usize>,
    end: Option<usize>,
    answerable_prob: f64,
}

/// Counting semaphore bounding in-flight requests.
#[derive(Debug)]
struct Gate {
    state: Mutex<usize>,
    cv: Condvar,
    limit: usize,
}

impl Gate {
    fn new(limit: usize) -> Self {
        Gate {
            state: Mutex::new(0),
            cv: Condvar::new(),
            limit,
        }
    }

    fn enter(&self) -> GateGuard<'_> {
        let mut inflight = self.state.lock().expect("gate poisoned");
        while *inflight >= self.limit {
            inflight = self.cv.wait(inflight).expect("gate poisoned");
        }
        *inflight += 1;
        GateGuard { gate: self }
    }
}

struct GateGuard<'a> {
    gate: &'a Gate,
}

impl Drop for GateGuard<'_> {
    fn drop(&mut self) {
        let mut inflight = self.gate.state.lock().expect("gate poisoned");
        *inflight -= 1;
        self.gate.cv.notify_one();
    }
}

#[derive(Clone)]
pub struct ServiceBackend {
    client: reqwest::blocking::Client,
    qg_url: String,
    qa_url: String,
    retries: u32,
    answerability_threshold: f64,
    gate: Arc<Gate>,
}

impl ServiceBackend {
    pub fn from_config(config: &BackendConfig) -> Result<Self> {
        let qg_url = config
            .qg_endpoint
            .clone()
            .or_else(|| std::env::var("FCL_QG_ENDPOINT").ok())
            .ok_or_else(|| Error::Config("missing QG endpoint".into()))?;
        let qa_url = config
            .qa_endpoint
            .clone()
            .or_else(|| std::env::var("FCL_QA_ENDPOINT").ok())
            .ok_or_else(|| Error::Config("missing QA endpoint".into()))?;
        let client = reqwest::blocking::Client::builder()
            .timeout(Duration::from_millis(config.timeout_ms))
            .build()
            .map_err(|e| Error::Config(format!("http client: {e}")))?;
        Ok(ServiceBackend {
            client,
            qg_url,
            qa_url,
            retries: config.retries.max(1),
            answerability_threshold: config.answerability_threshold,
            gate: Arc::new(Gate::new(config.max_concurrency)),
        })
    }

    fn post_json<B: Serialize, R: for<'de> Deserialize<'de>>(
        &self,
        url: &str,
        body: &B,
    ) -> Result<R> {
        let _guard = self.gate.enter();
        let mut last_err = String::new();
        for attempt in 1..=self.retries {
            match self.client.post(url).json(body).send() {
                Ok(resp) => {
                    if !resp.status().is_success() {
                        last_err = format!("http status {}", resp.status());
                    } else {
                        match resp.json::<R>() {
                            Ok(parsed) => return Ok(parsed),
                            Err(e) => last_err = format!("decode: {e}"),
                        }
                    }
                }
                Err(e) => last_err = e.to_string(),
            }
            if attempt < self.retries {
                std::thread::sleep(Duration::from_millis(50 * u64::from(attempt)));
            }
        }
        Err(Error::Service {
            attempts: self.retries,
            message: format!("{url}: {last_err}"),
        })
    }
}

impl QuestionGenerator for ServiceBackend {
    fn provider_id(&self) -> &str {
        "service"
    }

    fn generate(&self, span: &CandidateSpan, summary_context: &str) -> Result<Vec<Question>> {
        let body = GenerateBody {
            span_text: &span.text,
            span_start: span.start,
            span_end: span.end,
            context: summary_context,
        };
        let url = format!("{}/v1/generate", self.qg_url.trim_end_matches('/'));
        let resp: GenerateResponse = self.post_json(&url, &body)?;
        if resp.questions.is_empty() {
            return Err(Error::Backend(format!(
                "service returned no questions for span {}",
                span.span_id
            )));
        }
        Ok(resp
            .questions
            .into_iter()
            .enumerate()
            .map(|(i, q)| Question {
                question_id: format!("{}#q{}", span.span_id, i),
                text: q.text,
                target_span_id: span.span_id.clone(),
                provenance: Provenance::Model,
            })
            .collect())
    }
}

impl QuestionAnswerer for ServiceBackend {
    fn provider_id(&self) -> &str {
        "service"
    }

    fn answer(&self, question: &Question, context: &str) -> Result<Answer> {
        let body = AnswerBody {
            question: &question.text,
            context,
        };
        let url = format!("{}/v1/answer", self.qa_url.trim_end_matches('/'));
        let resp: AnswerResponse = self.post_json(&url, &body)?;
        let unanswerable = resp.answerable_prob < self.answerability_threshold;
        if unanswerable {
            return Ok(Answer {
                text: String::new(),
                start: None,
                end: None,
                answerable_prob: resp.answerable_prob.clamp(0.0, 1.0),
                unanswerable: true,
            });
        }
        Ok(Answer {
            text: resp.answer,
            start: resp.start,
            end: resp.end,
            answerable_prob: resp.answerable_prob.clamp(0.0, 1.0),
            unanswerable: false,
        })
    }
}
