//! Append-only reply cache keyed by request hash.

use std::collections::HashMap;
use std::fs::{self, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use super::{EmbeddingVector, OracleError, TaskTag};

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
enum CacheLine {
    Reply {
        hash: String,
        task_tag: TaskTag,
        reply: serde_json::Value,
    },
    Embedding {
        hash: String,
        vectors: Vec<Vec<f32>>,
    },
}

#[derive(Debug, Default)]
pub struct ReplyCache {
    replies: HashMap<String, serde_json::Value>,
    embeddings: HashMap<String, Vec<EmbeddingVector>>,
    path: Option<PathBuf>,
}

impl ReplyCache {
    pub fn in_memory() -> Self {
        Self::default()
    }

    /// Loads every line of an existing cache file and appends to it
    /// afterwards. A missing file starts an empty cache.
    pub fn open(path: &Path) -> Result<Self, OracleError> {
        let mut cache = Self {
            path: Some(path.to_path_buf()),
            ..Self::default()
        };
        for line in read_jsonl::<CacheLine>(path)? {
            match line {
                CacheLine::Reply { hash, reply, .. } => {
                    cache.replies.insert(hash, reply);
                }
                CacheLine::Embedding { hash, vectors } => {
                    cache
                        .embeddings
                        .insert(hash, vectors.into_iter().map(EmbeddingVector::new).collect());
                }
            }
        }
        Ok(cache)
    }

    pub fn len(&self) -> usize {
        self.replies.len() + self.embeddings.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn get_reply(&self, hash: &str) -> Option<serde_json::Value> {
        self.replies.get(hash).cloned()
    }

    pub fn get_embeddings(&self, hash: &str) -> Option<Vec<EmbeddingVector>> {
        self.embeddings.get(hash).cloned()
    }

    pub fn put_reply(&mut self, hash: &str, task_tag: TaskTag, reply: &serde_json::Value) -> Result<(), OracleError> {
        if let Some(path) = &self.path {
            append_jsonl(
                path,
                &CacheLine::Reply {
                    hash: hash.to_string(),
                    task_tag,
                    reply: reply.clone(),
                },
            )?;
        }
        self.replies.insert(hash.to_string(), reply.clone());
        Ok(())
    }

    pub fn put_embeddings(&mut self, hash: &str, vectors: &[EmbeddingVector]) -> Result<(), OracleError> {
        if let Some(path) = &self.path {
            append_jsonl(
                path,
                &CacheLine::Embedding {
                    hash: hash.to_string(),
                    vectors: vectors.iter().map(|v| v.values.clone()).collect(),
                },
            )?;
        }
        self.embeddings.insert(hash.to_string(), vectors.to_vec());
        Ok(())
    }
}

fn io_err(path: &Path, source: std::io::Error) -> OracleError {
    OracleError::CacheIo {
        path: path.to_path_buf(),
        source,
    }
}

/// Reads a JSON-lines file; a missing file yields nothing. A truncated last
/// line (interrupted write) is skipped.
pub fn read_jsonl<T: DeserializeOwned>(path: &Path) -> Result<Vec<T>, OracleError> {
    let file = match fs::File::open(path) {
        Ok(f) => f,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(Vec::new()),
        Err(e) => return Err(io_err(path, e)),
    };
    let mut out = Vec::new();
    for line in BufReader::new(file).lines() {
        let line = line.map_err(|e| io_err(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        match serde_json::from_str(&line) {
            Ok(v) => out.push(v),
            Err(e) => log::warn!("skipping unreadable line in {}: {e}", path.display()),
        }
    }
    Ok(out)
}

pub fn append_jsonl<T: Serialize>(path: &Path, value: &T) -> Result<(), OracleError> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            fs::create_dir_all(parent).map_err(|e| io_err(path, e))?;
        }
    }
    let mut file = OpenOptions::new()
        .create(true)
        .append(true)
        .open(path)
        .map_err(|e| io_err(path, e))?;
    let mut line = serde_json::to_string(value).expect("cache line serializes");
    line.push('\n');
    file.write_all(line.as_bytes()).map_err(|e| io_err(path, e))
}
