//! OpenAI-compatible chat-completions and embeddings over HTTP.

use std::time::Duration;

use serde::{Deserialize, Serialize};

use super::{Completion, EmbedResponse, Embedder, OracleRequest, Transport, TransportError};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RemoteSettings {
    /// Base URL; `/chat/completions` and `/embeddings` are appended.
    pub endpoint: String,
    pub model: String,
    /// Model used for search-grounded requests, when configured.
    pub grounded_model: Option<String>,
    pub embed_model: String,
    /// Environment variable holding the API key.
    pub api_key_env: String,
    pub timeout_secs: u64,
}

impl Default for RemoteSettings {
    fn default() -> Self {
        Self {
            endpoint: "https://api.openai.com/v1".into(),
            model: "gpt-5.2".into(),
            grounded_model: None,
            embed_model: "text-embedding-3-small".into(),
            api_key_env: "OPENAI_API_KEY".into(),
            timeout_secs: 120,
        }
    }
}

#[derive(Clone)]
pub struct RemoteClient {
    agent: ureq::Agent,
    endpoint: String,
    api_key: Option<String>,
}

impl RemoteClient {
    pub fn new(settings: &RemoteSettings) -> Self {
        let agent: ureq::Agent = ureq::Agent::config_builder()
            .timeout_global(Some(Duration::from_secs(settings.timeout_secs)))
            .http_status_as_error(false)
            .build()
            .into();
        Self {
            agent,
            endpoint: settings.endpoint.trim_end_matches('/').to_string(),
            api_key: std::env::var(&settings.api_key_env).ok().filter(|k| !k.is_empty()),
        }
    }

    fn post<B: Serialize, R: serde::de::DeserializeOwned>(&self, path: &str, body: &B) -> Result<R, TransportError> {
        let url = format!("{}{path}", self.endpoint);
        let mut req = self.agent.post(&url).header("Content-Type", "application/json");
        if let Some(key) = &self.api_key {
            req = req.header("Authorization", &format!("Bearer {key}"));
        }
        let mut resp = req.send_json(body).map_err(|e| match e {
            ureq::Error::Timeout(_) | ureq::Error::Io(_) | ureq::Error::ConnectionFailed => {
                TransportError::retryable(format!("{url}: {e}"))
            }
            other => TransportError::fatal(format!("{url}: {other}")),
        })?;
        let status = resp.status().as_u16();
        if status != 200 {
            let text = resp.body_mut().read_to_string().unwrap_or_default();
            let message = format!("{url}: HTTP {status}: {text}");
            return Err(if status == 429 || status >= 500 {
                TransportError::retryable(message)
            } else {
                TransportError::fatal(message)
            });
        }
        resp.body_mut()
            .read_json::<R>()
            .map_err(|e| TransportError::fatal(format!("{url}: unreadable response: {e}")))
    }
}

#[derive(Serialize)]
struct ChatMessage<'a> {
    role: &'a str,
    content: &'a str,
}

#[derive(Serialize)]
struct ChatBody<'a> {
    model: &'a str,
    messages: Vec<ChatMessage<'a>>,
}

#[derive(Deserialize)]
struct ChatResponse {
    choices: Vec<ChatChoice>,
    #[serde(default)]
    usage: Option<ChatUsage>,
}

#[derive(Deserialize)]
struct ChatChoice {
    message: ChatReplyMessage,
}

#[derive(Deserialize)]
struct ChatReplyMessage {
    #[serde(default)]
    content: Option<String>,
}

#[derive(Deserialize, Default)]
struct ChatUsage {
    #[serde(default)]
    prompt_tokens: u64,
    #[serde(default)]
    completion_tokens: u64,
}

pub struct RemoteTransport {
    client: RemoteClient,
    model: String,
}

impl RemoteTransport {
    pub fn new(settings: &RemoteSettings) -> Self {
        Self {
            client: RemoteClient::new(settings),
            model: settings.model.clone(),
        }
    }

    /// Transport for grounded requests, if a grounded model is configured.
    pub fn grounded(settings: &RemoteSettings) -> Option<Self> {
        settings.grounded_model.as_ref().map(|m| Self {
            client: RemoteClient::new(settings),
            model: m.clone(),
        })
    }
}

impl Transport for RemoteTransport {
    fn complete(&self, request: &OracleRequest) -> Result<Completion, TransportError> {
        let system = format!(
            "{}\nReply with {} and nothing else.",
            request.system_text, request.response_contract.description
        );
        let body = ChatBody {
            model: &self.model,
            messages: vec![
                ChatMessage {
                    role: "system",
                    content: &system,
                },
                ChatMessage {
                    role: "user",
                    content: &request.user_text,
                },
            ],
        };
        let resp: ChatResponse = self.client.post("/chat/completions", &body)?;
        let text = resp
            .choices
            .into_iter()
            .next()
            .and_then(|c| c.message.content)
            .ok_or_else(|| TransportError::fatal("completion without content"))?;
        let usage = resp.usage.unwrap_or_default();
        Ok(Completion {
            text,
            input_units: usage.prompt_tokens,
            output_units: usage.completion_tokens,
        })
    }
}

#[derive(Serialize)]
struct EmbedBody<'a> {
    model: &'a str,
    input: &'a [String],
}

#[derive(Deserialize)]
struct EmbedApiResponse {
    data: Vec<EmbedDatum>,
    #[serde(default)]
    usage: Option<EmbedUsage>,
}

#[derive(Deserialize)]
struct EmbedDatum {
    #[serde(default)]
    index: usize,
    embedding: Vec<f32>,
}

#[derive(Deserialize, Default)]
struct EmbedUsage {
    #[serde(default)]
    prompt_tokens: u64,
}

pub struct RemoteEmbedder {
    client: RemoteClient,
    model: String,
}

impl RemoteEmbedder {
    pub fn new(settings: &RemoteSettings) -> Self {
        Self {
            client: RemoteClient::new(settings),
            model: settings.embed_model.clone(),
        }
    }
}

impl Embedder for RemoteEmbedder {
    fn model_id(&self) -> String {
        self.model.clone()
    }

    fn embed(&self, texts: &[String]) -> Result<EmbedResponse, TransportError> {
        // the API rejects empty strings
        let inputs: Vec<String> = texts
            .iter()
            .map(|t| if t.is_empty() { " ".to_string() } else { t.clone() })
            .collect();
        let resp: EmbedApiResponse = self.client.post(
            "/embeddings",
            &EmbedBody {
                model: &self.model,
                input: &inputs,
            },
        )?;
        let mut data = resp.data;
        data.sort_by_key(|d| d.index);
        Ok(EmbedResponse {
            vectors: data.into_iter().map(|d| d.embedding).collect(),
            input_units: resp.usage.unwrap_or_default().prompt_tokens,
        })
    }
}
