//! Attribute correspondences from source schemas to the target schema.
//!
//! Three matchers: label similarity (Monge-Elkan over label tokens),
//! instance similarity (TF-IDF cosine over column values) and the oracle.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::datamodel::{DataError, Dataset, TargetSchema, Value};
use crate::metrics::macro_average;
use crate::oracle::prompts::{self, ColumnSummary, SchemaMatchItem, SchemaMatchPayload};
use crate::oracle::{Oracle, OracleError};
use crate::similarity::{label_tokens, monge_elkan, StringMetric};

pub const DEFAULT_LABEL_THRESHOLD: f64 = 0.8;
pub const DEFAULT_INSTANCE_THRESHOLD: f64 = 0.3;
const SAMPLE_ROWS: usize = 5;
const SUMMARY_VALUES: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Matcher {
    Label,
    Instance,
    Oracle,
    Manual,
}

fn one() -> f64 {
    1.0
}

fn manual() -> Matcher {
    Matcher::Manual
}

/// A source attribute linked to a target attribute. Gold files omit score
/// and matcher.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SchemaCorrespondence {
    pub source_dataset: String,
    pub source_attribute: String,
    pub target_attribute: Option<String>,
    #[serde(default = "one")]
    pub score: f64,
    #[serde(default = "manual")]
    pub matcher: Matcher,
}

pub fn load_correspondences(path: &Path) -> Result<Vec<SchemaCorrespondence>, DataError> {
    let text = std::fs::read_to_string(path).map_err(|source| DataError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    serde_json::from_str(&text).map_err(|source| DataError::Json {
        path: path.to_path_buf(),
        source,
    })
}

pub fn save_correspondences(path: &Path, correspondences: &[SchemaCorrespondence]) -> Result<(), DataError> {
    let text = serde_json::to_string_pretty(correspondences).expect("correspondences serialize");
    std::fs::write(path, text + "\n").map_err(|source| DataError::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Greedy one-to-one selection by descending score; ties by source then
/// target name.
fn greedy_one_to_one(mut scored: Vec<(String, String, f64)>) -> Vec<(String, String, f64)> {
    scored.sort_by(|a, b| {
        b.2.total_cmp(&a.2)
            .then_with(|| a.0.cmp(&b.0))
            .then_with(|| a.1.cmp(&b.1))
    });
    let mut used_source = BTreeSet::new();
    let mut used_target = BTreeSet::new();
    let mut kept = Vec::new();
    for (s, t, score) in scored {
        if used_source.contains(&s) || used_target.contains(&t) {
            continue;
        }
        used_source.insert(s.clone());
        used_target.insert(t.clone());
        kept.push((s, t, score));
    }
    kept.sort_by(|a, b| a.0.cmp(&b.0));
    kept
}

fn to_correspondences(dataset: &str, kept: Vec<(String, String, f64)>, matcher: Matcher) -> Vec<SchemaCorrespondence> {
    kept.into_iter()
        .map(|(s, t, score)| SchemaCorrespondence {
            source_dataset: dataset.to_string(),
            source_attribute: s,
            target_attribute: Some(t),
            score,
            matcher,
        })
        .collect()
}

/// Label-based matching: Monge-Elkan of source label tokens against target
/// label tokens.
pub fn match_labels(
    source: &Dataset,
    target: &TargetSchema,
    inner: StringMetric,
    threshold: f64,
) -> Vec<SchemaCorrespondence> {
    let targets: Vec<(String, Vec<String>)> = target
        .value_attributes()
        .map(|a| (a.name.clone(), label_tokens(&a.name)))
        .collect();
    let mut scored = Vec::new();
    for attr in source.attributes() {
        if Some(attr.name.as_str()) == source.id_attribute() {
            continue;
        }
        let tokens = label_tokens(&attr.name);
        for (t, t_tokens) in &targets {
            let score = monge_elkan(&tokens, t_tokens, inner);
            if score >= threshold {
                scored.push((attr.name.clone(), t.clone(), score));
            }
        }
    }
    to_correspondences(source.name(), greedy_one_to_one(scored), Matcher::Label)
}

/// Inner metric giving the best macro F1 against gold; ties keep the first
/// candidate.
pub fn select_label_metric(
    sources: &[Dataset],
    target: &TargetSchema,
    gold: &[SchemaCorrespondence],
    threshold: f64,
) -> StringMetric {
    let candidates = [StringMetric::LevenshteinSim, StringMetric::JaroWinkler];
    let mut best = (candidates[0], f64::NEG_INFINITY);
    for metric in candidates {
        let predicted: Vec<SchemaCorrespondence> = sources
            .iter()
            .flat_map(|s| match_labels(s, target, metric, threshold))
            .collect();
        let f1 = evaluate_correspondences(&predicted, gold).macro_f1;
        if f1 > best.1 {
            best = (metric, f1);
        }
    }
    best.0
}

fn value_tokens(v: &Value, out: &mut Vec<String>) {
    match v {
        Value::List(items) => {
            for i in items {
                out.extend(i.split_whitespace().map(str::to_lowercase));
            }
        }
        other => out.extend(other.render().split_whitespace().map(str::to_lowercase)),
    }
}

fn column_document(ds: &Dataset, column: &str) -> Vec<String> {
    let mut tokens = Vec::new();
    for v in ds.column_values(column).into_iter().flatten().flatten() {
        value_tokens(v, &mut tokens);
    }
    tokens
}

/// TF-IDF vectors of token documents: raw term frequency times smoothed
/// idf `ln((1+N)/(1+df)) + 1`.
pub fn tfidf_vectors(docs: &[Vec<String>]) -> Vec<HashMap<String, f64>> {
    let n = docs.len() as f64;
    let mut df: HashMap<&str, usize> = HashMap::new();
    for d in docs {
        let unique: BTreeSet<&str> = d.iter().map(String::as_str).collect();
        for t in unique {
            *df.entry(t).or_default() += 1;
        }
    }
    docs.iter()
        .map(|d| {
            let mut tf: HashMap<String, f64> = HashMap::new();
            for t in d {
                *tf.entry(t.clone()).or_default() += 1.0;
            }
            for (t, w) in tf.iter_mut() {
                let idf = ((1.0 + n) / (1.0 + df[t.as_str()] as f64)).ln() + 1.0;
                *w *= idf;
            }
            tf
        })
        .collect()
}

pub fn sparse_cosine(a: &HashMap<String, f64>, b: &HashMap<String, f64>) -> f64 {
    let (small, large) = if a.len() <= b.len() { (a, b) } else { (b, a) };
    let dot: f64 = small.iter().filter_map(|(t, w)| large.get(t).map(|v| w * v)).sum();
    let na = a.values().map(|w| w * w).sum::<f64>().sqrt();
    let nb = b.values().map(|w| w * w).sum::<f64>().sqrt();
    if na == 0.0 || nb == 0.0 {
        0.0
    } else {
        (dot / (na * nb)).min(1.0)
    }
}

/// Instance-based matching against a reference dataset in target layout.
pub fn match_instances(
    source: &Dataset,
    reference: &Dataset,
    target: &TargetSchema,
    threshold: f64,
) -> Vec<SchemaCorrespondence> {
    if reference.is_empty() {
        return Vec::new();
    }
    let source_cols: Vec<String> = source
        .attributes()
        .iter()
        .map(|a| a.name.clone())
        .filter(|n| Some(n.as_str()) != source.id_attribute())
        .collect();
    let target_cols: Vec<String> = target
        .value_attributes()
        .map(|a| a.name.clone())
        .filter(|n| reference.has_column(n))
        .collect();
    let mut docs: Vec<Vec<String>> = source_cols.iter().map(|c| column_document(source, c)).collect();
    docs.extend(target_cols.iter().map(|c| column_document(reference, c)));
    let vectors = tfidf_vectors(&docs);
    let (src_vecs, tgt_vecs) = vectors.split_at(source_cols.len());
    let mut scored = Vec::new();
    for (s, sv) in source_cols.iter().zip(src_vecs) {
        for (t, tv) in target_cols.iter().zip(tgt_vecs) {
            let score = sparse_cosine(sv, tv);
            if score >= threshold && score > 0.0 {
                scored.push((s.clone(), t.clone(), score));
            }
        }
    }
    to_correspondences(source.name(), greedy_one_to_one(scored), Matcher::Instance)
}

/// Unique count and the most frequent values, most frequent first, ties in
/// lexicographic order.
pub fn summarize_column(ds: &Dataset, column: &str) -> ColumnSummary {
    let mut freq: BTreeMap<String, usize> = BTreeMap::new();
    for v in ds.column_values(column).into_iter().flatten().flatten() {
        *freq.entry(v.render()).or_default() += 1;
    }
    let unique_count = freq.len();
    let mut ranked: Vec<(String, usize)> = freq.into_iter().collect();
    ranked.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
    ColumnSummary {
        name: column.to_string(),
        unique_count,
        examples: ranked.into_iter().take(SUMMARY_VALUES).map(|(v, _)| v).collect(),
    }
}

/// Row indices of the most complete rows, ties by row order.
pub fn sample_rows(ds: &Dataset, n: usize) -> Vec<usize> {
    let mut rows: Vec<(usize, usize)> = ds
        .records()
        .iter()
        .enumerate()
        .map(|(i, r)| (i, r.values.iter().filter(|v| v.is_some()).count()))
        .collect();
    rows.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(&b.0)));
    rows.into_iter().take(n).map(|(i, _)| i).collect()
}

/// Plain-text grid of the given rows.
pub fn render_grid(ds: &Dataset, rows: &[usize]) -> String {
    let escape = |s: String| s.replace('|', "\\|").replace('\n', " ");
    let mut out = String::from("|");
    for a in ds.attributes() {
        out.push_str(&format!(" {} |", escape(a.name.clone())));
    }
    out.push_str("\n|");
    for _ in ds.attributes() {
        out.push_str(" --- |");
    }
    for &i in rows {
        out.push_str("\n|");
        for v in &ds.records()[i].values {
            out.push_str(&format!(
                " {} |",
                escape(v.as_ref().map(Value::render).unwrap_or_default())
            ));
        }
    }
    out
}

pub fn oracle_request(source: &Dataset, target: &TargetSchema) -> crate::oracle::OracleRequest {
    let payload = SchemaMatchPayload {
        dataset: source.name().to_string(),
        columns: source
            .attributes()
            .iter()
            .map(|a| summarize_column(source, &a.name))
            .collect(),
        target_attributes: target.value_attributes().map(|a| a.name.clone()).collect(),
    };
    let grid = render_grid(source, &sample_rows(source, SAMPLE_ROWS));
    prompts::schema_match(&payload, &grid, &target.json_schema())
}

/// One oracle call per source. Columns answered with null, unknown columns
/// and repeated targets are dropped.
pub fn match_with_oracle(
    source: &Dataset,
    target: &TargetSchema,
    oracle: &Oracle,
) -> Result<Vec<SchemaCorrespondence>, OracleError> {
    if source.attributes().is_empty() {
        return Ok(Vec::new());
    }
    let reply = oracle.invoke(&oracle_request(source, target))?;
    let items: Vec<SchemaMatchItem> = serde_json::from_value(reply).unwrap_or_else(|e| {
        log::warn!("unusable schema-match reply for {}: {e}", source.name());
        Vec::new()
    });
    let valid_targets: BTreeSet<String> = target.value_attributes().map(|a| a.name.clone()).collect();
    let mut used_source = BTreeSet::new();
    let mut used_target = BTreeSet::new();
    let mut out = Vec::new();
    for item in items {
        let Some(t) = item.target_attribute else { continue };
        if !source.has_column(&item.source_column) || !valid_targets.contains(&t) {
            log::warn!("ignoring oracle correspondence {} -> {t}", item.source_column);
            continue;
        }
        if !used_source.insert(item.source_column.clone()) || !used_target.insert(t.clone()) {
            continue;
        }
        out.push(SchemaCorrespondence {
            source_dataset: source.name().to_string(),
            source_attribute: item.source_column,
            target_attribute: Some(t),
            score: 1.0,
            matcher: Matcher::Oracle,
        });
    }
    out.sort_by(|a, b| a.source_attribute.cmp(&b.source_attribute));
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Prf {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

impl Prf {
    /// From confusion counts. No predictions and no positives is a perfect score.
    pub fn from_counts(tp: usize, fp: usize, fn_: usize) -> Self {
        if tp + fp + fn_ == 0 {
            return Self {
                precision: 1.0,
                recall: 1.0,
                f1: 1.0,
            };
        }
        let precision = if tp + fp == 0 {
            0.0
        } else {
            tp as f64 / (tp + fp) as f64
        };
        let recall = if tp + fn_ == 0 {
            0.0
        } else {
            tp as f64 / (tp + fn_) as f64
        };
        let f1 = if precision + recall == 0.0 {
            0.0
        } else {
            2.0 * precision * recall / (precision + recall)
        };
        Self { precision, recall, f1 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatchEvaluation {
    pub per_dataset: BTreeMap<String, Prf>,
    pub macro_f1: f64,
}

/// Set-based P/R/F1 per source dataset and their unweighted mean.
pub fn evaluate_correspondences(predicted: &[SchemaCorrespondence], gold: &[SchemaCorrespondence]) -> MatchEvaluation {
    let pairs = |cs: &[SchemaCorrespondence]| -> BTreeMap<String, BTreeSet<(String, String)>> {
        let mut m: BTreeMap<String, BTreeSet<(String, String)>> = BTreeMap::new();
        for c in cs {
            let entry = m.entry(c.source_dataset.clone()).or_default();
            if let Some(t) = &c.target_attribute {
                entry.insert((c.source_attribute.clone(), t.clone()));
            }
        }
        m
    };
    let p = pairs(predicted);
    let g = pairs(gold);
    let datasets: BTreeSet<&String> = p.keys().chain(g.keys()).collect();
    let empty = BTreeSet::new();
    let per_dataset: BTreeMap<String, Prf> = datasets
        .into_iter()
        .map(|ds| {
            let pred = p.get(ds).unwrap_or(&empty);
            let truth = g.get(ds).unwrap_or(&empty);
            let tp = pred.intersection(truth).count();
            (ds.clone(), Prf::from_counts(tp, pred.len() - tp, truth.len() - tp))
        })
        .collect();
    let f1s: Vec<f64> = per_dataset.values().map(|e| e.f1).collect();
    MatchEvaluation {
        macro_f1: if f1s.is_empty() { 1.0 } else { macro_average(&f1s) },
        per_dataset,
    }
}
