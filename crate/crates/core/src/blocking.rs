//! Candidate pair generation by exact k-nearest-neighbour search over record
//! embeddings.

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::clustering::RecordRef;
use crate::datamodel::{DataError, Dataset, Value};
use crate::oracle::{EmbeddingVector, Oracle, OracleError, TaskTag};

pub const DEFAULT_EMBED_BATCH: usize = 512;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CandidatePair {
    pub a: RecordRef,
    pub b: RecordRef,
    pub similarity: f64,
    /// Rank of `b` among all records of B by similarity to `a`, from 1.
    pub rank_from_a: usize,
}

impl CandidatePair {
    pub fn key(&self) -> (RecordRef, RecordRef) {
        (self.a.clone(), self.b.clone())
    }
}

/// `attr: value` lines in the given attribute order, nulls omitted.
pub fn record_text(ds: &Dataset, row: usize, attributes: &[String]) -> String {
    let mut lines = Vec::new();
    for a in attributes {
        if let Some(v) = ds.value(row, a) {
            let rendered = match v {
                Value::List(items) => items.join(", "),
                other => other.render(),
            };
            lines.push(format!("{a}: {rendered}"));
        }
    }
    lines.join("\n")
}

/// Embeds every record of `ds` in record order, `batch_size` texts per call.
pub fn embed_records(
    ds: &Dataset,
    attributes: &[String],
    oracle: &Oracle,
    batch_size: usize,
) -> Result<Vec<EmbeddingVector>, OracleError> {
    let texts: Vec<String> = (0..ds.len()).map(|i| record_text(ds, i, attributes)).collect();
    let mut out = Vec::with_capacity(texts.len());
    for chunk in texts.chunks(batch_size.max(1)) {
        out.extend(oracle.embed(chunk, TaskTag::PairLabel)?);
    }
    Ok(out)
}

fn unit(vectors: &[EmbeddingVector]) -> Vec<Vec<f32>> {
    vectors.iter().map(|v| v.normalized().values).collect()
}

fn dot(a: &[f32], b: &[f32]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum::<f32>() as f64
}

/// Indices of the `k` most similar rows of `others`, best first, ties by id.
fn top_k(query: &[f32], others: &[Vec<f32>], ids: &[&str], k: usize) -> Vec<(usize, f64)> {
    let mut scored: Vec<(usize, f64)> = others.iter().enumerate().map(|(j, o)| (j, dot(query, o))).collect();
    let cmp = |x: &(usize, f64), y: &(usize, f64)| y.1.total_cmp(&x.1).then_with(|| ids[x.0].cmp(ids[y.0]));
    if scored.len() > k {
        scored.select_nth_unstable_by(k - 1, cmp);
        scored.truncate(k);
    }
    scored.sort_by(cmp);
    scored
}

/// Union of the top-k neighbours in both directions, canonicalized so that
/// the dataset with the smaller name is `a`, sorted by descending similarity
/// then ids.
pub fn generate_candidates(
    a: &Dataset,
    emb_a: &[EmbeddingVector],
    b: &Dataset,
    emb_b: &[EmbeddingVector],
    k: usize,
) -> Vec<CandidatePair> {
    if a.name() > b.name() {
        return generate_candidates(b, emb_b, a, emb_a, k);
    }
    if a.is_empty() || b.is_empty() || k == 0 {
        return Vec::new();
    }
    let ua = unit(emb_a);
    let ub = unit(emb_b);
    let ids_a: Vec<&str> = a.records().iter().map(|r| r.id.as_str()).collect();
    let ids_b: Vec<&str> = b.records().iter().map(|r| r.id.as_str()).collect();
    let from_a: Vec<(usize, usize)> = ua
        .par_iter()
        .enumerate()
        .flat_map_iter(|(i, q)| top_k(q, &ub, &ids_b, k).into_iter().map(move |(j, _)| (i, j)))
        .collect();
    let from_b: Vec<(usize, usize)> = ub
        .par_iter()
        .enumerate()
        .flat_map_iter(|(j, q)| top_k(q, &ua, &ids_a, k).into_iter().map(move |(i, _)| (i, j)))
        .collect();
    let mut partners: BTreeMap<usize, BTreeSet<usize>> = BTreeMap::new();
    for (i, j) in from_a.into_iter().chain(from_b) {
        partners.entry(i).or_default().insert(j);
    }
    let rows: Vec<(usize, BTreeSet<usize>)> = partners.into_iter().collect();
    let mut pairs: Vec<CandidatePair> = rows
        .par_iter()
        .flat_map_iter(|(i, js)| {
            let q = &ua[*i];
            let sims: Vec<f64> = ub.iter().map(|o| dot(q, o)).collect();
            js.iter()
                .map(|&j| {
                    let s = sims[j];
                    let better = sims
                        .iter()
                        .enumerate()
                        .filter(|(jj, x)| **x > s || (**x == s && ids_b[*jj] < ids_b[j]))
                        .count();
                    CandidatePair {
                        a: RecordRef::new(a.name(), ids_a[*i]),
                        b: RecordRef::new(b.name(), ids_b[j]),
                        similarity: s,
                        rank_from_a: better + 1,
                    }
                })
                .collect::<Vec<_>>()
        })
        .collect();
    sort_pool(&mut pairs);
    pairs
}

pub fn sort_pool(pairs: &mut [CandidatePair]) {
    pairs.sort_by(|x, y| {
        y.similarity
            .total_cmp(&x.similarity)
            .then_with(|| x.a.id.cmp(&y.a.id))
            .then_with(|| x.b.id.cmp(&y.b.id))
    });
}

#[derive(Serialize, Deserialize)]
struct PoolRow {
    id_a: String,
    id_b: String,
    similarity: f64,
    rank_from_a: usize,
}

pub fn pool_file_name(dataset_a: &str, dataset_b: &str) -> String {
    format!("{dataset_a}__{dataset_b}.csv")
}

pub fn write_pool(path: &Path, pairs: &[CandidatePair]) -> Result<(), DataError> {
    let err = |source| DataError::Csv {
        path: path.to_path_buf(),
        source,
    };
    let mut w = csv::Writer::from_path(path).map_err(err)?;
    for p in pairs {
        w.serialize(PoolRow {
            id_a: p.a.id.clone(),
            id_b: p.b.id.clone(),
            similarity: p.similarity,
            rank_from_a: p.rank_from_a,
        })
        .map_err(err)?;
    }
    w.flush().map_err(|source| DataError::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub fn read_pool(path: &Path, dataset_a: &str, dataset_b: &str) -> Result<Vec<CandidatePair>, DataError> {
    let err = |source| DataError::Csv {
        path: path.to_path_buf(),
        source,
    };
    let mut r = csv::Reader::from_path(path).map_err(err)?;
    let mut out = Vec::new();
    for row in r.deserialize::<PoolRow>() {
        let row = row.map_err(err)?;
        out.push(CandidatePair {
            a: RecordRef::new(dataset_a, row.id_a),
            b: RecordRef::new(dataset_b, row.id_b),
            similarity: row.similarity,
            rank_from_a: row.rank_from_a,
        });
    }
    Ok(out)
}
