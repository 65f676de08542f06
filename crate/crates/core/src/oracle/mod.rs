//! Gateway to every LLM-style capability the pipeline uses.
//!
//! [`Oracle`] wraps a completion [`Transport`] and an [`Embedder`] with a
//! reply cache, a budget ceiling, retries, one repair re-prompt for replies
//! that violate their contract, and a cost ledger. The mock implementations
//! in [`mock`] make the whole pipeline runnable offline.

pub mod cache;
pub mod embed;
pub mod ledger;
pub mod mock;
pub mod prompts;
pub mod remote;

use std::path::{Path, PathBuf};
use std::thread;
use std::time::{Duration, Instant};

use parking_lot::{Condvar, Mutex};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

pub use cache::ReplyCache;
pub use embed::{EmbeddingVector, HashedNgramEmbedder};
pub use ledger::{CostTable, LedgerEntry, LedgerSummary, PipelineStep, Price, PriceTable, UsageLedger};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TaskTag {
    SchemaMatch,
    TaxonomyMap,
    PairLabel,
    FusionSelectEntities,
    FusionGroundtruth,
    /// Resolver proposal for data fusion.
    FusionStrategy,
}

impl TaskTag {
    pub fn name(self) -> &'static str {
        match self {
            TaskTag::SchemaMatch => "schema_match",
            TaskTag::TaxonomyMap => "taxonomy_map",
            TaskTag::PairLabel => "pair_label",
            TaskTag::FusionSelectEntities => "fusion_select_entities",
            TaskTag::FusionGroundtruth => "fusion_groundtruth",
            TaskTag::FusionStrategy => "fusion_strategy",
        }
    }
}

/// Required top-level shape of a structured reply.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ReplyShape {
    Object { required: Vec<String> },
    Array { item_required: Vec<String> },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResponseContract {
    pub description: String,
    pub shape: ReplyShape,
}

impl ResponseContract {
    pub fn object(description: impl Into<String>, required: &[&str]) -> Self {
        Self {
            description: description.into(),
            shape: ReplyShape::Object {
                required: required.iter().map(|s| s.to_string()).collect(),
            },
        }
    }

    pub fn array(description: impl Into<String>, item_required: &[&str]) -> Self {
        Self {
            description: description.into(),
            shape: ReplyShape::Array {
                item_required: item_required.iter().map(|s| s.to_string()).collect(),
            },
        }
    }

    pub fn validate(&self, reply: &serde_json::Value) -> Result<(), String> {
        match &self.shape {
            ReplyShape::Object { required } => {
                let obj = reply.as_object().ok_or("expected a JSON object")?;
                for key in required {
                    if !obj.contains_key(key) {
                        return Err(format!("missing key `{key}`"));
                    }
                }
            }
            ReplyShape::Array { item_required } => {
                let items = reply.as_array().ok_or("expected a JSON array")?;
                for (i, item) in items.iter().enumerate() {
                    let obj = item.as_object().ok_or_else(|| format!("item {i} is not an object"))?;
                    for key in item_required {
                        if !obj.contains_key(key) {
                            return Err(format!("item {i} is missing key `{key}`"));
                        }
                    }
                }
            }
        }
        Ok(())
    }
}

/// A structured completion request. `payload` carries the prompt content in
/// machine-readable form; the mock oracle answers from it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleRequest {
    pub task_tag: TaskTag,
    pub system_text: String,
    pub user_text: String,
    pub response_contract: ResponseContract,
    #[serde(default)]
    pub payload: serde_json::Value,
    /// Route through the search-grounded oracle variant.
    #[serde(default)]
    pub grounded: bool,
}

impl OracleRequest {
    /// Stable digest of every request field.
    pub fn hash(&self) -> String {
        let canonical = serde_json::to_vec(self).expect("request serializes");
        hex::encode(Sha256::digest(&canonical))
    }

    fn repair(&self, raw: &str, reason: &str) -> OracleRequest {
        let mut repaired = self.clone();
        repaired.user_text = format!(
            "{}\n\nYour previous reply was:\n{raw}\n\nIt could not be used: {reason}. \
             Reply again with only {}.",
            self.user_text, self.response_contract.description
        );
        repaired
    }
}

/// Raw reply from a transport with provider-reported usage.
#[derive(Debug, Clone, PartialEq)]
pub struct Completion {
    pub text: String,
    pub input_units: u64,
    pub output_units: u64,
}

#[derive(Debug, Clone, PartialEq, Error)]
#[error("{message}")]
pub struct TransportError {
    pub message: String,
    pub retryable: bool,
}

impl TransportError {
    pub fn retryable(message: impl Into<String>) -> Self {
        Self {
            message: message.into(),
            retryable: true,
        }
    }

    pub fn fatal(message: impl Into<String>) -> Self {
        Self {
            message: message.into(),
            retryable: false,
        }
    }
}

pub trait Transport: Send + Sync {
    fn complete(&self, request: &OracleRequest) -> Result<Completion, TransportError>;
}

#[derive(Debug, Clone, PartialEq)]
pub struct EmbedResponse {
    pub vectors: Vec<Vec<f32>>,
    pub input_units: u64,
}

pub trait Embedder: Send + Sync {
    /// Identifies the model; part of the embedding cache key.
    fn model_id(&self) -> String;
    fn embed(&self, texts: &[String]) -> Result<EmbedResponse, TransportError>;
}

#[derive(Debug, Error)]
pub enum OracleError {
    #[error("oracle budget exhausted ({spent_micro} of {budget_micro} micro-units spent)")]
    BudgetExhausted { spent_micro: u64, budget_micro: u64 },
    #[error("transport failed after {attempts} attempts: {source}")]
    Transport {
        attempts: u32,
        #[source]
        source: TransportError,
    },
    #[error("reply violates the {task} contract after repair ({reason}); raw reply: {raw}")]
    ContractViolation {
        task: &'static str,
        reason: String,
        raw: String,
    },
    #[error("embedding request with no texts")]
    EmptyEmbedding,
    #[error("embedding dimensions differ within one batch ({0} vs {1})")]
    DimensionMismatch(usize, usize),
    #[error("embedding count {got} does not match input count {expected}")]
    EmbeddingCount { expected: usize, got: usize },
    #[error("grounded request but no search-grounded oracle is registered")]
    NoGroundedOracle,
    #[error("oracle cache I/O on {path}: {source}")]
    CacheIo {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

/// Counting semaphore bounding in-flight transport calls.
struct Permits {
    available: Mutex<usize>,
    freed: Condvar,
}

impl Permits {
    fn new(n: usize) -> Self {
        Self {
            available: Mutex::new(n.max(1)),
            freed: Condvar::new(),
        }
    }

    fn acquire(&self) -> PermitGuard<'_> {
        let mut available = self.available.lock();
        while *available == 0 {
            self.freed.wait(&mut available);
        }
        *available -= 1;
        PermitGuard { permits: self }
    }
}

struct PermitGuard<'a> {
    permits: &'a Permits,
}

impl Drop for PermitGuard<'_> {
    fn drop(&mut self) {
        *self.permits.available.lock() += 1;
        self.permits.freed.notify_one();
    }
}

#[derive(Debug, Clone)]
pub struct OracleSettings {
    pub prices: PriceTable,
    pub budget_micro: Option<u64>,
    pub retries: u32,
    pub backoff: Duration,
    pub max_in_flight: usize,
}

impl Default for OracleSettings {
    fn default() -> Self {
        Self {
            prices: PriceTable::default(),
            budget_micro: None,
            retries: 2,
            backoff: Duration::from_millis(500),
            max_in_flight: 4,
        }
    }
}

pub struct Oracle {
    transport: Box<dyn Transport>,
    grounded: Option<Box<dyn Transport>>,
    embedder: Box<dyn Embedder>,
    settings: OracleSettings,
    cache: Mutex<ReplyCache>,
    ledger: Mutex<UsageLedger>,
    ledger_path: Option<PathBuf>,
    permits: Permits,
    busy: Mutex<Duration>,
}

impl Oracle {
    pub fn new(transport: Box<dyn Transport>, embedder: Box<dyn Embedder>, settings: OracleSettings) -> Self {
        let permits = Permits::new(settings.max_in_flight);
        Self {
            transport,
            grounded: None,
            embedder,
            settings,
            cache: Mutex::new(ReplyCache::in_memory()),
            ledger: Mutex::new(UsageLedger::new()),
            ledger_path: None,
            permits,
            busy: Mutex::new(Duration::ZERO),
        }
    }

    /// Registers the search-grounded variant used for `grounded` requests.
    pub fn with_grounded(mut self, transport: Box<dyn Transport>) -> Self {
        self.grounded = Some(transport);
        self
    }

    /// Backs the reply cache with an append-only file, loading prior replies.
    pub fn with_cache_file(self, path: &Path) -> Result<Self, OracleError> {
        let cache = ReplyCache::open(path)?;
        *self.cache.lock() = cache;
        Ok(self)
    }

    /// Persists ledger entries as JSON lines, continuing an existing file.
    pub fn with_ledger_file(mut self, path: &Path) -> Result<Self, OracleError> {
        let entries = cache::read_jsonl::<LedgerEntry>(path)?;
        *self.ledger.lock() = UsageLedger::from_entries(entries);
        self.ledger_path = Some(path.to_path_buf());
        Ok(self)
    }

    pub fn has_grounded(&self) -> bool {
        self.grounded.is_some()
    }

    pub fn ledger(&self) -> UsageLedger {
        self.ledger.lock().clone()
    }

    pub fn usage_report(&self) -> LedgerSummary {
        self.ledger.lock().summary()
    }

    /// Wall-clock time spent waiting on transports.
    pub fn busy_time(&self) -> Duration {
        *self.busy.lock()
    }

    fn check_budget(&self) -> Result<(), OracleError> {
        if let Some(budget) = self.settings.budget_micro {
            let spent = self.ledger.lock().total_micro();
            if spent >= budget {
                return Err(OracleError::BudgetExhausted {
                    spent_micro: spent,
                    budget_micro: budget,
                });
            }
        }
        Ok(())
    }

    fn record(
        &self,
        task: TaskTag,
        grounded: bool,
        input_units: u64,
        output_units: u64,
        price: Price,
    ) -> Result<(), OracleError> {
        let entry = LedgerEntry {
            task_tag: task,
            grounded,
            input_units,
            output_units,
            cost_micro: price.cost_micro(input_units, output_units),
        };
        if let Some(path) = &self.ledger_path {
            cache::append_jsonl(path, &entry)?;
        }
        self.ledger.lock().record(entry);
        Ok(())
    }

    fn with_retries<T>(&self, mut call: impl FnMut() -> Result<T, TransportError>) -> Result<T, OracleError> {
        let mut attempt = 0u32;
        loop {
            self.check_budget()?;
            let started = Instant::now();
            let result = {
                let _permit = self.permits.acquire();
                call()
            };
            *self.busy.lock() += started.elapsed();
            match result {
                Ok(v) => return Ok(v),
                Err(e) if e.retryable && attempt < self.settings.retries => {
                    let wait = self.settings.backoff * 2u32.pow(attempt);
                    log::warn!("oracle transport error, retrying in {wait:?}: {e}");
                    if !wait.is_zero() {
                        thread::sleep(wait);
                    }
                    attempt += 1;
                }
                Err(e) => {
                    return Err(OracleError::Transport {
                        attempts: attempt + 1,
                        source: e,
                    })
                }
            }
        }
    }

    fn complete_once(&self, request: &OracleRequest) -> Result<Completion, OracleError> {
        let transport: &dyn Transport = if request.grounded {
            self.grounded.as_deref().ok_or(OracleError::NoGroundedOracle)?
        } else {
            self.transport.as_ref()
        };
        let completion = self.with_retries(|| transport.complete(request))?;
        let price = self.settings.prices.for_task(request.task_tag, request.grounded);
        self.record(
            request.task_tag,
            request.grounded,
            completion.input_units,
            completion.output_units,
            price,
        )?;
        Ok(completion)
    }

    /// Sends a request and returns its contract-checked reply. Cached
    /// replies are returned without transport use or cost.
    pub fn invoke(&self, request: &OracleRequest) -> Result<serde_json::Value, OracleError> {
        let key = request.hash();
        if let Some(hit) = self.cache.lock().get_reply(&key) {
            return Ok(hit);
        }
        if request.grounded && self.grounded.is_none() {
            return Err(OracleError::NoGroundedOracle);
        }
        let first = self.complete_once(request)?;
        let reply = match parse_reply(&first.text, &request.response_contract) {
            Ok(v) => v,
            Err(reason) => {
                log::warn!(
                    "{} reply violated its contract ({reason}); re-prompting",
                    request.task_tag.name()
                );
                let repair = request.repair(&first.text, &reason);
                let second = self.complete_once(&repair)?;
                parse_reply(&second.text, &request.response_contract).map_err(|reason| {
                    OracleError::ContractViolation {
                        task: request.task_tag.name(),
                        reason,
                        raw: second.text.clone(),
                    }
                })?
            }
        };
        self.cache.lock().put_reply(&key, request.task_tag, &reply)?;
        Ok(reply)
    }

    /// Embeds texts in order. The ledger attributes the cost to `task`.
    pub fn embed(&self, texts: &[String], task: TaskTag) -> Result<Vec<EmbeddingVector>, OracleError> {
        if texts.is_empty() {
            return Err(OracleError::EmptyEmbedding);
        }
        let key = embed_key(&self.embedder.model_id(), texts);
        if let Some(hit) = self.cache.lock().get_embeddings(&key) {
            return Ok(hit);
        }
        let response = self.with_retries(|| self.embedder.embed(texts))?;
        self.record(task, false, response.input_units, 0, self.settings.prices.embedding)?;
        if response.vectors.len() != texts.len() {
            return Err(OracleError::EmbeddingCount {
                expected: texts.len(),
                got: response.vectors.len(),
            });
        }
        let dim = response.vectors[0].len();
        if let Some(bad) = response.vectors.iter().find(|v| v.len() != dim) {
            return Err(OracleError::DimensionMismatch(dim, bad.len()));
        }
        let vectors: Vec<EmbeddingVector> = response.vectors.into_iter().map(EmbeddingVector::new).collect();
        self.cache.lock().put_embeddings(&key, &vectors)?;
        Ok(vectors)
    }
}

fn embed_key(model: &str, texts: &[String]) -> String {
    let mut hasher = Sha256::new();
    hasher.update(b"embed\0");
    hasher.update(model.as_bytes());
    for t in texts {
        hasher.update(b"\0");
        hasher.update(t.as_bytes());
    }
    hex::encode(hasher.finalize())
}

/// Extracts the JSON value from a reply, tolerating code fences and prose
/// around it, then checks it against the contract.
pub fn parse_reply(text: &str, contract: &ResponseContract) -> Result<serde_json::Value, String> {
    let trimmed = text.trim();
    let value = serde_json::from_str::<serde_json::Value>(trimmed).or_else(|_| {
        let start = trimmed.find(['{', '[']).ok_or("no JSON value in reply")?;
        let end = trimmed.rfind(['}', ']']).ok_or("no JSON value in reply")?;
        if end < start {
            return Err("no JSON value in reply".to_string());
        }
        serde_json::from_str::<serde_json::Value>(&trimmed[start..=end]).map_err(|e| format!("invalid JSON: {e}"))
    })?;
    contract.validate(&value)?;
    Ok(value)
}

/// Rough token estimate for transports that do not report usage.
pub fn estimate_units(text: &str) -> u64 {
    (text.chars().count() as u64).div_ceil(4)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::VecDeque;
    use std::sync::atomic::{AtomicUsize, Ordering};
    use std::sync::Arc;

    /// Replays queued outcomes in order.
    struct Scripted {
        replies: Mutex<VecDeque<Result<String, TransportError>>>,
        calls: Arc<AtomicUsize>,
    }

    impl Scripted {
        fn new(replies: Vec<Result<&str, TransportError>>) -> (Self, Arc<AtomicUsize>) {
            let calls = Arc::new(AtomicUsize::new(0));
            let s = Self {
                replies: Mutex::new(replies.into_iter().map(|r| r.map(str::to_string)).collect()),
                calls: calls.clone(),
            };
            (s, calls)
        }
    }

    impl Transport for Scripted {
        fn complete(&self, _request: &OracleRequest) -> Result<Completion, TransportError> {
            self.calls.fetch_add(1, Ordering::SeqCst);
            let next = self.replies.lock().pop_front().expect("script exhausted")?;
            Ok(Completion {
                text: next,
                input_units: 100,
                output_units: 10,
            })
        }
    }

    fn request() -> OracleRequest {
        OracleRequest {
            task_tag: TaskTag::PairLabel,
            system_text: "sys".into(),
            user_text: "user".into(),
            response_contract: ResponseContract::object("an object with a `label` key", &["label"]),
            payload: serde_json::json!({"a": 1}),
            grounded: false,
        }
    }

    fn settings() -> OracleSettings {
        OracleSettings {
            prices: PriceTable {
                default: Price {
                    input_per_million_micro: 1_000_000,
                    output_per_million_micro: 1_000_000,
                },
                ..Default::default()
            },
            backoff: Duration::ZERO,
            ..Default::default()
        }
    }

    fn oracle(replies: Vec<Result<&str, TransportError>>) -> (Oracle, Arc<AtomicUsize>) {
        let (t, calls) = Scripted::new(replies);
        (
            Oracle::new(Box::new(t), Box::new(HashedNgramEmbedder::default()), settings()),
            calls,
        )
    }

    #[test]
    fn cache_hit_is_free_and_identical() {
        let (o, calls) = oracle(vec![Ok(r#"{"label":"match"}"#)]);
        let a = o.invoke(&request()).unwrap();
        let b = o.invoke(&request()).unwrap();
        assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
        assert_eq!(calls.load(Ordering::SeqCst), 1);
        assert_eq!(o.ledger().len(), 1);
    }

    #[test]
    fn malformed_then_repaired_reply_costs_two_entries() {
        let (o, _) = oracle(vec![
            Ok("sorry, I cannot"),
            Ok(r#"```json
{"label": "non-match"}
```"#),
        ]);
        let reply = o.invoke(&request()).unwrap();
        assert_eq!(reply["label"], "non-match");
        assert_eq!(o.ledger().len(), 2);
    }

    #[test]
    fn twice_malformed_reply_is_an_error_with_raw_text() {
        let (o, _) = oracle(vec![Ok("{}"), Ok(r#"{"nope": 1}"#)]);
        match o.invoke(&request()) {
            Err(OracleError::ContractViolation { raw, .. }) => assert!(raw.contains("nope")),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn transport_failures_retry_twice_then_fail() {
        let (o, calls) = oracle(vec![
            Err(TransportError::retryable("503")),
            Err(TransportError::retryable("503")),
            Err(TransportError::retryable("503")),
        ]);
        match o.invoke(&request()) {
            Err(OracleError::Transport { attempts, .. }) => assert_eq!(attempts, 3),
            other => panic!("unexpected {other:?}"),
        }
        assert_eq!(calls.load(Ordering::SeqCst), 3);
        assert!(o.ledger().is_empty());
    }

    #[test]
    fn transient_failure_recovers() {
        let (o, _) = oracle(vec![
            Err(TransportError::retryable("timeout")),
            Ok(r#"{"label":"match"}"#),
        ]);
        assert_eq!(o.invoke(&request()).unwrap()["label"], "match");
    }

    #[test]
    fn fatal_transport_errors_do_not_retry() {
        let (o, calls) = oracle(vec![Err(TransportError::fatal("401"))]);
        assert!(o.invoke(&request()).is_err());
        assert_eq!(calls.load(Ordering::SeqCst), 1);
    }

    #[test]
    fn budget_is_enforced_before_calls() {
        let (t, _) = Scripted::new(vec![Ok(r#"{"label":"match"}"#), Ok(r#"{"label":"match"}"#)]);
        let mut s = settings();
        s.budget_micro = Some(50);
        let o = Oracle::new(Box::new(t), Box::new(HashedNgramEmbedder::default()), s);
        o.invoke(&request()).unwrap(); // costs 110 micro
        let mut other = request();
        other.user_text = "different".into();
        assert!(matches!(o.invoke(&other), Err(OracleError::BudgetExhausted { .. })));
        // cached replies remain available
        assert!(o.invoke(&request()).is_ok());
    }

    #[test]
    fn grounded_request_without_grounded_oracle_errors() {
        let (o, _) = oracle(vec![]);
        let mut r = request();
        r.grounded = true;
        assert!(matches!(o.invoke(&r), Err(OracleError::NoGroundedOracle)));
    }

    #[test]
    fn request_hash_covers_every_field() {
        let base = request();
        let mut changed = base.clone();
        changed.payload = serde_json::json!({"a": 2});
        assert_ne!(base.hash(), changed.hash());
        let mut grounded = base.clone();
        grounded.grounded = true;
        assert_ne!(base.hash(), grounded.hash());
        assert_eq!(base.hash(), request().hash());
    }

    #[test]
    fn embed_rejects_empty_input_and_is_deterministic() {
        let (o, _) = oracle(vec![]);
        assert!(matches!(
            o.embed(&[], TaskTag::PairLabel),
            Err(OracleError::EmptyEmbedding)
        ));
        let v = o
            .embed(&["a".to_string(), "a".to_string()], TaskTag::PairLabel)
            .unwrap();
        assert_eq!(v[0], v[1]);
    }

    #[test]
    fn array_contract_checks_items() {
        let c = ResponseContract::array("a list", &["source_column"]);
        assert!(c.validate(&serde_json::json!([{"source_column": "a"}])).is_ok());
        assert!(c.validate(&serde_json::json!([{"x": 1}])).is_err());
        assert!(c.validate(&serde_json::json!({"x": 1})).is_err());
    }
}
