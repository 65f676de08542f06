//! Embedding vectors and the offline hashed n-gram embedder.

use serde::{Deserialize, Serialize};

use super::{estimate_units, EmbedResponse, Embedder, TransportError};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmbeddingVector {
    pub values: Vec<f32>,
}

impl EmbeddingVector {
    pub fn new(values: Vec<f32>) -> Self {
        Self { values }
    }

    pub fn dimension(&self) -> usize {
        self.values.len()
    }

    pub fn norm(&self) -> f64 {
        self.values
            .iter()
            .map(|v| (*v as f64) * (*v as f64))
            .sum::<f64>()
            .sqrt()
    }

    /// Cosine similarity; zero when either vector has zero norm.
    pub fn cosine(&self, other: &EmbeddingVector) -> f64 {
        let dot: f64 = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| *a as f64 * *b as f64)
            .sum();
        let n = self.norm() * other.norm();
        if n == 0.0 {
            0.0
        } else {
            (dot / n).clamp(-1.0, 1.0)
        }
    }

    /// Copy scaled to unit length (unchanged when the norm is zero).
    pub fn normalized(&self) -> EmbeddingVector {
        let n = self.norm();
        if n == 0.0 {
            return self.clone();
        }
        EmbeddingVector::new(self.values.iter().map(|v| (*v as f64 / n) as f32).collect())
    }
}

fn fnv1a(bytes: &[u8]) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in bytes {
        h ^= *b as u64;
        h = h.wrapping_mul(0x0100_0000_01b3);
    }
    h
}

/// Deterministic embedder: character trigrams and lowercase word tokens
/// hashed into a fixed number of buckets with signed counts, then
/// unit-normalized.
#[derive(Debug, Clone)]
pub struct HashedNgramEmbedder {
    pub dimension: usize,
}

impl Default for HashedNgramEmbedder {
    fn default() -> Self {
        Self { dimension: 256 }
    }
}

impl HashedNgramEmbedder {
    pub fn embed_text(&self, text: &str) -> Vec<f32> {
        let lower = text.to_lowercase();
        let mut v = vec![0f32; self.dimension];
        let mut add = |feature: &str, weight: f32| {
            let h = fnv1a(feature.as_bytes());
            let idx = (h % self.dimension as u64) as usize;
            let sign = if (h >> 63) == 0 { 1.0 } else { -1.0 };
            v[idx] += sign * weight;
        };
        let mut any = false;
        for word in lower.split(|c: char| !c.is_alphanumeric()).filter(|w| !w.is_empty()) {
            add(&format!("w:{word}"), 1.0);
            any = true;
            let padded: Vec<char> = format!(" {word} ").chars().collect();
            for g in padded.windows(3) {
                let gram: String = g.iter().collect();
                add(&format!("g:{gram}"), 0.5);
            }
        }
        if !any {
            add("<empty>", 1.0);
        }
        let norm = v.iter().map(|x| x * x).sum::<f32>().sqrt();
        if norm > 0.0 {
            for x in &mut v {
                *x /= norm;
            }
        }
        v
    }
}

impl Embedder for HashedNgramEmbedder {
    fn model_id(&self) -> String {
        format!("hashed-ngram-{}", self.dimension)
    }

    fn embed(&self, texts: &[String]) -> Result<EmbedResponse, TransportError> {
        Ok(EmbedResponse {
            vectors: texts.iter().map(|t| self.embed_text(t)).collect(),
            input_units: texts.iter().map(|t| estimate_units(t)).sum(),
        })
    }
}
