//! Similarity feature vectors for record pairs.

use std::collections::BTreeSet;

use chrono::Datelike;
use serde::{Deserialize, Serialize};

use crate::datamodel::{AttributeType, Dataset, TargetSchema, Value};
use crate::similarity::{string_similarity, StringMetric};

/// Feature value for a missing attribute on either side.
pub const MISSING: f64 = -1.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FeatureKind {
    String(StringMetric),
    ScaledAbsDiff,
    YearDiff,
    DayDiff,
    ListJaccard,
    EmbeddingCosine,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureSpec {
    pub attribute: Option<String>,
    pub kind: FeatureKind,
}

impl FeatureSpec {
    pub fn name(&self) -> String {
        let kind = match self.kind {
            FeatureKind::String(m) => m.name(),
            FeatureKind::ScaledAbsDiff => "scaled-abs-diff",
            FeatureKind::YearDiff => "year-diff",
            FeatureKind::DayDiff => "day-diff",
            FeatureKind::ListJaccard => "jaccard",
            FeatureKind::EmbeddingCosine => "embedding-cosine",
        };
        match &self.attribute {
            Some(a) => format!("{a}:{kind}"),
            None => kind.to_string(),
        }
    }
}

/// Computes fixed-length feature vectors for pairs drawn from two datasets
/// in target layout.
#[derive(Debug, Clone)]
pub struct FeatureExtractor {
    specs: Vec<FeatureSpec>,
    /// Per spec: column in A, column in B, numeric range.
    columns: Vec<(usize, usize, f64)>,
}

fn kinds_for(t: AttributeType) -> Vec<FeatureKind> {
    match t {
        AttributeType::String | AttributeType::Categorical => {
            StringMetric::ALL.iter().map(|m| FeatureKind::String(*m)).collect()
        }
        AttributeType::Number | AttributeType::Integer | AttributeType::Duration => vec![FeatureKind::ScaledAbsDiff],
        AttributeType::Date => vec![FeatureKind::YearDiff, FeatureKind::DayDiff],
        AttributeType::List => vec![FeatureKind::ListJaccard],
    }
}

fn has_values(ds: &Dataset, col: usize) -> bool {
    ds.records().iter().any(|r| r.values[col].is_some())
}

fn numeric_range(a: &Dataset, ca: usize, b: &Dataset, cb: usize) -> f64 {
    let nums = a
        .records()
        .iter()
        .filter_map(|r| r.values[ca].as_ref().and_then(Value::as_num))
        .chain(
            b.records()
                .iter()
                .filter_map(|r| r.values[cb].as_ref().and_then(Value::as_num)),
        );
    let (lo, hi) = nums.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), x| (lo.min(x), hi.max(x)));
    if lo.is_finite() {
        hi - lo
    } else {
        0.0
    }
}

impl FeatureExtractor {
    /// Features over the target attributes that hold values in both datasets,
    /// in target order, followed by the embedding cosine.
    pub fn new(a: &Dataset, b: &Dataset, target: &TargetSchema) -> Self {
        let mut specs = Vec::new();
        let mut columns = Vec::new();
        for attr in target.value_attributes() {
            let (Some(ca), Some(cb)) = (a.column(&attr.name), b.column(&attr.name)) else {
                continue;
            };
            if !has_values(a, ca) || !has_values(b, cb) {
                continue;
            }
            let range = numeric_range(a, ca, b, cb);
            for kind in kinds_for(attr.declared_type) {
                specs.push(FeatureSpec {
                    attribute: Some(attr.name.clone()),
                    kind,
                });
                columns.push((ca, cb, range));
            }
        }
        specs.push(FeatureSpec {
            attribute: None,
            kind: FeatureKind::EmbeddingCosine,
        });
        Self { specs, columns }
    }

    pub fn specs(&self) -> &[FeatureSpec] {
        &self.specs
    }

    pub fn len(&self) -> usize {
        self.specs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.specs.is_empty()
    }

    pub fn compute(&self, a: &Dataset, row_a: usize, b: &Dataset, row_b: usize, embedding_cosine: f64) -> Vec<f64> {
        let ra = &a.records()[row_a];
        let rb = &b.records()[row_b];
        let mut out = Vec::with_capacity(self.specs.len());
        for (spec, (ca, cb, range)) in self.specs.iter().zip(&self.columns) {
            let value = match (&ra.values[*ca], &rb.values[*cb]) {
                (Some(x), Some(y)) => feature(spec.kind, x, y, *range),
                _ => None,
            };
            out.push(value.unwrap_or(MISSING));
        }
        out.push(embedding_cosine.clamp(0.0, 1.0));
        out
    }
}

fn text(v: &Value) -> String {
    match v {
        Value::List(items) => items.join(" "),
        other => other.render(),
    }
    .trim()
    .to_lowercase()
}

fn feature(kind: FeatureKind, x: &Value, y: &Value, range: f64) -> Option<f64> {
    match kind {
        FeatureKind::String(m) => Some(string_similarity(&text(x), &text(y), m)),
        FeatureKind::ScaledAbsDiff => {
            let (p, q) = (x.as_num()?, y.as_num()?);
            if range <= 0.0 {
                return Some(if p == q { 1.0 } else { 0.0 });
            }
            Some((1.0 - (p - q).abs() / range).clamp(0.0, 1.0))
        }
        FeatureKind::YearDiff => {
            let (p, q) = (x.as_date()?, y.as_date()?);
            Some(1.0 / (1.0 + (p.year() - q.year()).abs() as f64))
        }
        FeatureKind::DayDiff => {
            let (p, q) = (x.as_date()?, y.as_date()?);
            Some(1.0 / (1.0 + (p - q).num_days().abs() as f64 / 30.0))
        }
        FeatureKind::ListJaccard => {
            let items = |v: &Value| -> Option<BTreeSet<String>> {
                Some(v.as_list()?.iter().map(|i| i.trim().to_lowercase()).collect())
            };
            Some(crate::similarity::jaccard_sets(&items(x)?, &items(y)?))
        }
        FeatureKind::EmbeddingCosine => None,
    }
}
