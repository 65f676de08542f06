//! Data fusion: conflict resolution functions, validation sets, strategy
//! proposal, refinement and selection, and fused output with provenance.

use std::collections::{BTreeMap, BTreeSet};
use std::io::Write;
use std::path::{Path, PathBuf};

use chrono::NaiveDate;
use rand::seq::IndexedRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::clustering::{EntityCluster, RecordRef};
use crate::datamodel::{canonical_text, parse_typed, AttributeType, DataError, Dataset, Record, TargetSchema, Value};
use crate::matching::active::record_view;
use crate::oracle::prompts::{
    self, AttributeInfo, FusionGroundtruthPayload, FusionGroundtruthReply, FusionSelectPayload, FusionSelectReply,
    FusionStrategyPayload, FusionStrategyReply, GroupView,
};
use crate::oracle::{Oracle, OracleError};

#[derive(Debug, Error)]
pub enum FusionError {
    #[error("resolver `{resolver}` does not apply to attribute `{attribute}` of type {type_name}")]
    Inapplicable {
        attribute: String,
        resolver: String,
        type_name: String,
    },
    #[error("strategy has no resolver for attribute `{0}`")]
    MissingAttribute(String),
    #[error("strategy names unknown attribute `{0}`")]
    UnknownAttribute(String),
    #[error("unknown resolver `{0}`")]
    UnknownResolver(String),
    #[error("validation entry refers to unknown cluster `{0}`")]
    UnknownCluster(String),
    #[error("source `{0}` is not loaded")]
    UnknownSource(String),
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error(transparent)]
    Data(#[from] DataError),
    #[error("cannot access {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("invalid strategy file {path}: {source}")]
    Json {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Resolver {
    Voting,
    Average,
    Median,
    LongestString,
    ShortestString,
    MostRecent,
    SourcePriority,
    UnionList,
    FavourNonNull,
}

impl Resolver {
    pub const ALL: [Resolver; 9] = [
        Resolver::Voting,
        Resolver::Average,
        Resolver::Median,
        Resolver::LongestString,
        Resolver::ShortestString,
        Resolver::MostRecent,
        Resolver::SourcePriority,
        Resolver::UnionList,
        Resolver::FavourNonNull,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Resolver::Voting => "voting",
            Resolver::Average => "average",
            Resolver::Median => "median",
            Resolver::LongestString => "longest_string",
            Resolver::ShortestString => "shortest_string",
            Resolver::MostRecent => "most_recent",
            Resolver::SourcePriority => "source_priority",
            Resolver::UnionList => "union_list",
            Resolver::FavourNonNull => "favour_non_null",
        }
    }

    /// Accepts `-`, `_` or space separated names in any case.
    pub fn parse(s: &str) -> Option<Self> {
        let key: String = s
            .trim()
            .to_lowercase()
            .chars()
            .map(|c| if c == '-' || c == ' ' { '_' } else { c })
            .collect();
        let key = match key.as_str() {
            "favor_non_null" => "favour_non_null",
            "most_recent_value" => "most_recent",
            "union" => "union_list",
            "longest" => "longest_string",
            "shortest" => "shortest_string",
            other => other,
        };
        Self::ALL.into_iter().find(|r| r.name() == key)
    }

    pub fn applies_to(self, t: AttributeType) -> bool {
        match self {
            Resolver::Voting | Resolver::SourcePriority | Resolver::FavourNonNull | Resolver::MostRecent => true,
            Resolver::Average | Resolver::Median => t.is_numeric() || t == AttributeType::Duration,
            Resolver::LongestString | Resolver::ShortestString => t.is_textual(),
            Resolver::UnionList => t == AttributeType::List,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TieBreak {
    #[default]
    Priority,
    Longest,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResolverSpec {
    pub resolver: Resolver,
    /// Voting only.
    #[serde(default, skip_serializing_if = "is_default_tie")]
    pub tie_break: TieBreak,
    /// Explicit source order for priority decisions; empty means the
    /// context default for the attribute.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub source_order: Vec<String>,
}

fn is_default_tie(t: &TieBreak) -> bool {
    *t == TieBreak::Priority
}

impl ResolverSpec {
    pub fn new(resolver: Resolver) -> Self {
        Self {
            resolver,
            tie_break: TieBreak::Priority,
            source_order: Vec::new(),
        }
    }

    pub fn voting_longest() -> Self {
        Self {
            tie_break: TieBreak::Longest,
            ..Self::new(Resolver::Voting)
        }
    }

    pub fn label(&self) -> String {
        match (self.resolver, self.tie_break) {
            (Resolver::Voting, TieBreak::Longest) => "voting(longest)".into(),
            (r, _) => r.name().into(),
        }
    }
}

/// Per-attribute source ranking and per-source snapshot dates.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct FusionContext {
    pub source_order: BTreeMap<String, Vec<String>>,
    pub snapshot_dates: BTreeMap<String, NaiveDate>,
}

impl FusionContext {
    /// Sources ranked per attribute by descending non-null share, then name.
    pub fn from_datasets(
        datasets: &[Dataset],
        target: &TargetSchema,
        snapshot_dates: BTreeMap<String, NaiveDate>,
    ) -> Self {
        let mut source_order = BTreeMap::new();
        for attr in target.value_attributes() {
            let mut ranked: Vec<(f64, String)> = datasets
                .iter()
                .map(|d| {
                    let share = if d.has_column(&attr.name) {
                        crate::datamodel::density(d, std::slice::from_ref(&attr.name))
                    } else {
                        0.0
                    };
                    (share, d.name().to_string())
                })
                .collect();
            ranked.sort_by(|x, y| y.0.total_cmp(&x.0).then_with(|| x.1.cmp(&y.1)));
            source_order.insert(attr.name.clone(), ranked.into_iter().map(|(_, n)| n).collect());
        }
        Self {
            source_order,
            snapshot_dates,
        }
    }

    fn rank(&self, spec: &ResolverSpec, attribute: &str, source: &str) -> (usize, String) {
        let order = if spec.source_order.is_empty() {
            self.source_order.get(attribute).map(Vec::as_slice).unwrap_or(&[])
        } else {
            &spec.source_order
        };
        (
            order.iter().position(|s| s == source).unwrap_or(usize::MAX),
            source.to_string(),
        )
    }
}

/// One non-null input value and the dataset it came from.
#[derive(Debug, Clone, PartialEq)]
pub struct Candidate {
    pub value: Value,
    pub source: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Resolved {
    pub value: Option<Value>,
    pub sources: Vec<String>,
    pub conflict: bool,
}

fn text_len(v: &Value) -> usize {
    v.render().chars().count()
}

fn round_if_integer(x: f64, t: AttributeType) -> f64 {
    if t == AttributeType::Integer {
        x.round()
    } else {
        x
    }
}

/// Resolves one attribute of one cluster. Nulls never reach the resolver;
/// an empty input gives null. Unanimous inputs return their common value
/// under every resolver.
pub fn resolve(
    inputs: &[Candidate],
    spec: &ResolverSpec,
    ctx: &FusionContext,
    attribute: &str,
    attr_type: AttributeType,
) -> Resolved {
    if inputs.is_empty() {
        return Resolved {
            value: None,
            sources: Vec::new(),
            conflict: false,
        };
    }
    let mut ranked: Vec<&Candidate> = inputs.iter().collect();
    ranked.sort_by_key(|c| ctx.rank(spec, attribute, &c.source));
    let distinct: BTreeSet<String> = inputs.iter().map(|c| c.value.group_key()).collect();
    let conflict = distinct.len() > 1;
    let pick = |c: &Candidate| Resolved {
        value: Some(c.value.clone()),
        sources: vec![c.source.clone()],
        conflict,
    };
    if !conflict {
        return Resolved {
            value: Some(ranked[0].value.clone()),
            sources: ranked.iter().map(|c| c.source.clone()).collect(),
            conflict,
        };
    }
    let numbers = || -> Vec<f64> { ranked.iter().filter_map(|c| c.value.as_num()).collect() };
    match spec.resolver {
        Resolver::Voting => {
            let mut groups: Vec<(String, Vec<&Candidate>)> = Vec::new();
            for c in &ranked {
                let k = c.value.group_key();
                match groups.iter_mut().find(|(g, _)| *g == k) {
                    Some((_, members)) => members.push(c),
                    None => groups.push((k, vec![c])),
                }
            }
            // groups are in priority order of their best source
            let best = groups
                .iter()
                .enumerate()
                .max_by(|(i, x), (j, y)| {
                    x.1.len().cmp(&y.1.len()).then_with(|| match spec.tie_break {
                        TieBreak::Longest => text_len(&x.1[0].value).cmp(&text_len(&y.1[0].value)).then(j.cmp(i)),
                        TieBreak::Priority => j.cmp(i),
                    })
                })
                .map(|(_, g)| g)
                .expect("non-empty");
            Resolved {
                value: Some(best.1[0].value.clone()),
                sources: best.1.iter().map(|c| c.source.clone()).collect(),
                conflict,
            }
        }
        Resolver::Average => {
            let nums = numbers();
            if nums.is_empty() {
                return pick(ranked[0]);
            }
            Resolved {
                value: Some(Value::Num(round_if_integer(
                    nums.iter().sum::<f64>() / nums.len() as f64,
                    attr_type,
                ))),
                sources: ranked
                    .iter()
                    .filter(|c| c.value.as_num().is_some())
                    .map(|c| c.source.clone())
                    .collect(),
                conflict,
            }
        }
        Resolver::Median => {
            let mut with_src: Vec<(f64, &Candidate)> = ranked
                .iter()
                .filter_map(|c| c.value.as_num().map(|n| (n, *c)))
                .collect();
            if with_src.is_empty() {
                return pick(ranked[0]);
            }
            with_src.sort_by(|x, y| x.0.total_cmp(&y.0));
            let n = with_src.len();
            if n % 2 == 1 {
                pick(with_src[n / 2].1)
            } else {
                let (l, r) = (&with_src[n / 2 - 1], &with_src[n / 2]);
                Resolved {
                    value: Some(Value::Num(round_if_integer((l.0 + r.0) / 2.0, attr_type))),
                    sources: vec![l.1.source.clone(), r.1.source.clone()],
                    conflict,
                }
            }
        }
        Resolver::LongestString => pick(
            ranked
                .iter()
                .rev()
                .max_by_key(|c| text_len(&c.value))
                .expect("non-empty"),
        ),
        Resolver::ShortestString => pick(ranked.iter().min_by_key(|c| text_len(&c.value)).expect("non-empty")),
        Resolver::MostRecent => pick(
            ranked
                .iter()
                .rev()
                .max_by_key(|c| ctx.snapshot_dates.get(&c.source).copied())
                .expect("non-empty"),
        ),
        Resolver::SourcePriority => pick(ranked[0]),
        Resolver::UnionList => {
            let mut seen = BTreeSet::new();
            let mut items = Vec::new();
            for c in &ranked {
                let values: Vec<String> = match &c.value {
                    Value::List(l) => l.clone(),
                    other => vec![other.render()],
                };
                for v in values {
                    if seen.insert(canonical_text(&v)) {
                        items.push(v);
                    }
                }
            }
            Resolved {
                value: Some(Value::List(items)),
                sources: ranked.iter().map(|c| c.source.clone()).collect(),
                conflict,
            }
        }
        Resolver::FavourNonNull => pick(&inputs[0]),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StrategyOrigin {
    Heuristic,
    Oracle,
    Refined,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FusionStrategy {
    pub resolvers: BTreeMap<String, ResolverSpec>,
    pub origin: StrategyOrigin,
    #[serde(default)]
    pub validation_accuracy: Option<f64>,
}

impl FusionStrategy {
    /// Every value attribute needs exactly one applicable resolver.
    pub fn check(&self, target: &TargetSchema, ctx: &FusionContext) -> Result<(), FusionError> {
        for name in self.resolvers.keys() {
            if target.attribute(name).is_none() || *name == target.id_attribute {
                return Err(FusionError::UnknownAttribute(name.clone()));
            }
        }
        for attr in target.value_attributes() {
            let spec = self
                .resolvers
                .get(&attr.name)
                .ok_or_else(|| FusionError::MissingAttribute(attr.name.clone()))?;
            if !applicable(spec.resolver, attr.declared_type, ctx) {
                return Err(FusionError::Inapplicable {
                    attribute: attr.name.clone(),
                    resolver: spec.resolver.name().into(),
                    type_name: attr.declared_type.name().into(),
                });
            }
        }
        Ok(())
    }

    pub fn save(&self, path: &Path) -> Result<(), FusionError> {
        std::fs::write(path, serde_json::to_string_pretty(self).expect("strategy serializes")).map_err(|source| {
            FusionError::Io {
                path: path.to_path_buf(),
                source,
            }
        })
    }

    pub fn load(path: &Path) -> Result<Self, FusionError> {
        let text = std::fs::read_to_string(path).map_err(|source| FusionError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        serde_json::from_str(&text).map_err(|source| FusionError::Json {
            path: path.to_path_buf(),
            source,
        })
    }
}

/// `most_recent` additionally needs snapshot dates.
pub fn applicable(r: Resolver, t: AttributeType, ctx: &FusionContext) -> bool {
    r.applies_to(t) && (r != Resolver::MostRecent || !ctx.snapshot_dates.is_empty())
}

/// Rule table by declared type.
pub fn heuristic_spec(t: AttributeType, ctx: &FusionContext) -> ResolverSpec {
    match t {
        AttributeType::Number | AttributeType::Duration => ResolverSpec::new(Resolver::Median),
        AttributeType::Integer | AttributeType::Categorical => ResolverSpec::new(Resolver::Voting),
        AttributeType::String => ResolverSpec::voting_longest(),
        AttributeType::List => ResolverSpec::new(Resolver::UnionList),
        AttributeType::Date if !ctx.snapshot_dates.is_empty() => ResolverSpec::new(Resolver::MostRecent),
        AttributeType::Date => ResolverSpec::new(Resolver::Voting),
    }
}

pub fn heuristic_strategy(target: &TargetSchema, ctx: &FusionContext) -> FusionStrategy {
    FusionStrategy {
        resolvers: target
            .value_attributes()
            .map(|a| (a.name.clone(), heuristic_spec(a.declared_type, ctx)))
            .collect(),
        origin: StrategyOrigin::Heuristic,
        validation_accuracy: None,
    }
}

/// Oracle-chosen resolver per attribute; unusable answers fall back to the
/// heuristic for that attribute.
pub fn oracle_strategy(
    target: &TargetSchema,
    ctx: &FusionContext,
    oracle: &Oracle,
) -> Result<FusionStrategy, FusionError> {
    let payload = FusionStrategyPayload {
        attributes: target
            .value_attributes()
            .map(|a| AttributeInfo {
                name: a.name.clone(),
                type_name: a.declared_type.name().into(),
                description: (!a.description.is_empty()).then(|| a.description.clone()),
            })
            .collect(),
        resolvers: Resolver::ALL.iter().map(|r| r.name().to_string()).collect(),
    };
    let reply = oracle.invoke(&prompts::fusion_strategy(&payload))?;
    let reply: FusionStrategyReply = serde_json::from_value(reply).unwrap_or(FusionStrategyReply {
        assignments: BTreeMap::new(),
    });
    let mut resolvers = BTreeMap::new();
    for attr in target.value_attributes() {
        let chosen = reply
            .assignments
            .get(&attr.name)
            .and_then(|s| Resolver::parse(s))
            .filter(|r| applicable(*r, attr.declared_type, ctx));
        let spec = match chosen {
            Some(r) => ResolverSpec::new(r),
            None => {
                log::warn!(
                    "no usable resolver proposed for `{}`; using the type default",
                    attr.name
                );
                heuristic_spec(attr.declared_type, ctx)
            }
        };
        resolvers.insert(attr.name.clone(), spec);
    }
    Ok(FusionStrategy {
        resolvers,
        origin: StrategyOrigin::Oracle,
        validation_accuracy: None,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ValidationOrigin {
    HumanFile,
    Oracle,
    OracleRag,
}

impl ValidationOrigin {
    pub fn name(self) -> &'static str {
        match self {
            ValidationOrigin::HumanFile => "human-file",
            ValidationOrigin::Oracle => "oracle",
            ValidationOrigin::OracleRag => "oracle-rag",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationEntry {
    pub cluster_id: String,
    pub attribute: String,
    pub value: Option<Value>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FusionValidationSet {
    pub origin: ValidationOrigin,
    pub entries: Vec<ValidationEntry>,
}

impl FusionValidationSet {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn clusters(&self) -> BTreeSet<&str> {
        self.entries.iter().map(|e| e.cluster_id.as_str()).collect()
    }
}

/// Datasets by name plus a record-to-cluster index.
pub struct FusionInputs<'a> {
    datasets: BTreeMap<&'a str, &'a Dataset>,
    clusters: &'a [EntityCluster],
    by_member: BTreeMap<String, usize>,
}

impl<'a> FusionInputs<'a> {
    pub fn new(datasets: &'a [Dataset], clusters: &'a [EntityCluster]) -> Self {
        let mut by_member = BTreeMap::new();
        for (i, c) in clusters.iter().enumerate() {
            for m in &c.members {
                by_member.insert(m.to_string(), i);
            }
        }
        Self {
            datasets: datasets.iter().map(|d| (d.name(), d)).collect(),
            clusters,
            by_member,
        }
    }

    pub fn clusters(&self) -> &[EntityCluster] {
        self.clusters
    }

    /// Cluster holding `token`, a cluster id or any member `dataset:id`.
    pub fn cluster_of(&self, token: &str) -> Option<&EntityCluster> {
        self.by_member.get(token).map(|&i| &self.clusters[i])
    }

    fn row(&self, r: &RecordRef) -> Result<(&Dataset, usize), FusionError> {
        let ds = self
            .datasets
            .get(r.dataset.as_str())
            .ok_or_else(|| FusionError::UnknownSource(r.dataset.clone()))?;
        let row = ds
            .position(&r.id)
            .ok_or_else(|| FusionError::UnknownCluster(r.to_string()))?;
        Ok((ds, row))
    }

    /// Non-null values of one attribute across the cluster, in member order.
    pub fn candidates(&self, cluster: &EntityCluster, attribute: &str) -> Result<Vec<Candidate>, FusionError> {
        let mut out = Vec::new();
        for m in &cluster.members {
            let (ds, row) = self.row(m)?;
            if let Some(v) = ds.value(row, attribute) {
                out.push(Candidate {
                    value: v.clone(),
                    source: m.dataset.clone(),
                });
            }
        }
        Ok(out)
    }

    /// Attributes with two or more distinct non-null values in the cluster.
    pub fn conflicting_attributes(
        &self,
        cluster: &EntityCluster,
        target: &TargetSchema,
    ) -> Result<Vec<String>, FusionError> {
        let mut out = Vec::new();
        for attr in target.value_attributes() {
            let distinct: BTreeSet<String> = self
                .candidates(cluster, &attr.name)?
                .iter()
                .map(|c| c.value.group_key())
                .collect();
            if distinct.len() > 1 {
                out.push(attr.name.clone());
            }
        }
        Ok(out)
    }

    fn views(&self, cluster: &EntityCluster, attributes: &[String]) -> Result<Vec<prompts::RecordView>, FusionError> {
        cluster
            .members
            .iter()
            .map(|m| {
                let (ds, row) = self.row(m)?;
                Ok(record_view(ds, row, attributes))
            })
            .collect()
    }
}

/// Converts an oracle answer to a value of the declared type.
pub fn value_from_json(v: &serde_json::Value, t: AttributeType) -> Option<Value> {
    match v {
        serde_json::Value::Null => None,
        serde_json::Value::Number(n) => n.as_f64().map(Value::Num),
        serde_json::Value::String(s) if s.trim().is_empty() => None,
        serde_json::Value::String(s) => Some(parse_typed(s, t)),
        serde_json::Value::Array(items) => Some(Value::List(
            items
                .iter()
                .filter_map(|i| match i {
                    serde_json::Value::String(s) => Some(s.clone()),
                    serde_json::Value::Null => None,
                    other => Some(other.to_string()),
                })
                .collect(),
        )),
        other => Some(Value::Str(other.to_string())),
    }
}

#[derive(Debug, Clone)]
pub struct ValidationSettings {
    pub sample_groups: usize,
    pub rag: bool,
    pub seed: u64,
}

impl Default for ValidationSettings {
    fn default() -> Self {
        Self {
            sample_groups: 100,
            rag: false,
            seed: 42,
        }
    }
}

/// Samples multi-member groups, lets the oracle pick the well-known ones and
/// asks for the true value of every conflicting attribute. Unknown (null)
/// answers are left out.
pub fn generate_validation_set(
    inputs: &FusionInputs,
    target: &TargetSchema,
    oracle: &Oracle,
    settings: &ValidationSettings,
) -> Result<FusionValidationSet, FusionError> {
    let origin = if settings.rag {
        ValidationOrigin::OracleRag
    } else {
        ValidationOrigin::Oracle
    };
    if settings.rag && !oracle.has_grounded() {
        return Err(OracleError::NoGroundedOracle.into());
    }
    let multi: Vec<&EntityCluster> = inputs.clusters().iter().filter(|c| c.len() > 1).collect();
    if multi.is_empty() {
        log::warn!("no multi-record groups; the fusion validation set is empty");
        return Ok(FusionValidationSet {
            origin,
            entries: Vec::new(),
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(settings.seed);
    let mut sample: Vec<&EntityCluster> = multi
        .choose_multiple(&mut rng, settings.sample_groups.min(multi.len()))
        .copied()
        .collect();
    sample.sort_by_key(|c| c.id());
    let attributes = target.value_attributes().map(|a| a.name.clone()).collect::<Vec<_>>();
    let groups = sample
        .iter()
        .map(|c| {
            Ok(GroupView {
                group_id: c.id(),
                records: inputs.views(c, &attributes)?,
            })
        })
        .collect::<Result<Vec<_>, FusionError>>()?;
    let reply = oracle.invoke(&prompts::fusion_select(&FusionSelectPayload { groups }))?;
    let selected: BTreeSet<String> = serde_json::from_value::<FusionSelectReply>(reply)
        .map(|r| r.selected.into_iter().collect())
        .unwrap_or_default();
    let mut entries = Vec::new();
    for c in sample.iter().filter(|c| selected.contains(&c.id())) {
        let conflicting = inputs.conflicting_attributes(c, target)?;
        if conflicting.is_empty() {
            continue;
        }
        let payload = FusionGroundtruthPayload {
            group_id: c.id(),
            records: inputs.views(c, &attributes)?,
            attributes: conflicting.clone(),
        };
        let reply = oracle.invoke(&prompts::fusion_groundtruth(&payload, settings.rag))?;
        let Ok(reply) = serde_json::from_value::<FusionGroundtruthReply>(reply) else {
            log::warn!("unusable ground truth reply for group {}", c.id());
            continue;
        };
        for attr in conflicting {
            let t = target
                .attribute(&attr)
                .map(|a| a.declared_type)
                .unwrap_or(AttributeType::String);
            if let Some(v) = reply
                .values
                .get(&attr)
                .and_then(|v| v.as_ref())
                .and_then(|v| value_from_json(v, t))
            {
                entries.push(ValidationEntry {
                    cluster_id: c.id(),
                    attribute: attr,
                    value: Some(v),
                });
            }
        }
    }
    Ok(FusionValidationSet { origin, entries })
}

#[derive(Serialize, Deserialize)]
struct ValidationRow {
    cluster_id: String,
    attribute: String,
    value: String,
    #[serde(default)]
    origin: Option<String>,
}

pub fn write_validation_set(path: &Path, set: &FusionValidationSet) -> Result<(), FusionError> {
    let err = |source| DataError::Csv {
        path: path.to_path_buf(),
        source,
    };
    let mut w = csv::Writer::from_path(path).map_err(err)?;
    for e in &set.entries {
        w.serialize(ValidationRow {
            cluster_id: e.cluster_id.clone(),
            attribute: e.attribute.clone(),
            value: e.value.as_ref().map(Value::render).unwrap_or_default(),
            origin: Some(set.origin.name().into()),
        })
        .map_err(err)?;
    }
    w.flush().map_err(|source| FusionError::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Reads a validation or test file. `cluster_id` may name any member record;
/// it is resolved to the id of the cluster holding it. An empty value is an
/// explicit null.
pub fn read_validation_set(
    path: &Path,
    inputs: &FusionInputs,
    target: &TargetSchema,
    origin: ValidationOrigin,
) -> Result<FusionValidationSet, FusionError> {
    let err = |source| DataError::Csv {
        path: path.to_path_buf(),
        source,
    };
    let mut r = csv::Reader::from_path(path).map_err(err)?;
    let mut seen = BTreeSet::new();
    let mut entries = Vec::new();
    for row in r.deserialize::<ValidationRow>() {
        let row = row.map_err(err)?;
        let cluster = inputs
            .cluster_of(row.cluster_id.trim())
            .ok_or_else(|| FusionError::UnknownCluster(row.cluster_id.clone()))?;
        let attr = target
            .attribute(&row.attribute)
            .ok_or_else(|| FusionError::UnknownAttribute(row.attribute.clone()))?;
        if !seen.insert((cluster.id(), row.attribute.clone())) {
            continue;
        }
        let value = (!row.value.trim().is_empty()).then(|| parse_typed(&row.value, attr.declared_type));
        entries.push(ValidationEntry {
            cluster_id: cluster.id(),
            attribute: row.attribute,
            value,
        });
    }
    Ok(FusionValidationSet { origin, entries })
}

/// Equality used for fusion accuracy: canonical text for strings, 1%
/// relative tolerance for numbers, same day for dates, item Jaccard ≥ 0.8
/// for lists. A null fused value is right only against an explicit null.
pub fn values_equal(fused: Option<&Value>, truth: Option<&Value>) -> bool {
    match (fused, truth) {
        (None, None) => true,
        (None, Some(_)) | (Some(_), None) => false,
        (Some(f), Some(t)) => match (f, t) {
            (Value::Num(a), Value::Num(b)) => {
                let scale = a.abs().max(b.abs());
                (a - b).abs() <= 0.01 * scale
            }
            (Value::Date(a), Value::Date(b)) => a == b,
            (Value::List(_), _) | (_, Value::List(_)) => {
                let items = |v: &Value| -> BTreeSet<String> {
                    match v {
                        Value::List(l) => l.iter().map(|i| canonical_text(i)).filter(|s| !s.is_empty()).collect(),
                        other => [canonical_text(&other.render())].into_iter().collect(),
                    }
                };
                crate::similarity::jaccard_sets(&items(f), &items(t)) >= 0.8
            }
            _ => canonical_text(&f.render()) == canonical_text(&t.render()),
        },
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Accuracy {
    pub correct: usize,
    pub total: usize,
    pub accuracy: f64,
}

impl Accuracy {
    pub fn from_counts(correct: usize, total: usize) -> Self {
        Self {
            correct,
            total,
            accuracy: if total == 0 { 0.0 } else { correct as f64 / total as f64 },
        }
    }
}

/// Resolver inputs for every validation entry, gathered once.
pub struct PreparedValidation {
    items: Vec<(String, AttributeType, Vec<Candidate>, Option<Value>)>,
}

impl PreparedValidation {
    pub fn new(set: &FusionValidationSet, inputs: &FusionInputs, target: &TargetSchema) -> Result<Self, FusionError> {
        let mut items = Vec::with_capacity(set.entries.len());
        for e in &set.entries {
            let cluster = inputs
                .cluster_of(&e.cluster_id)
                .ok_or_else(|| FusionError::UnknownCluster(e.cluster_id.clone()))?;
            let attr = target
                .attribute(&e.attribute)
                .ok_or_else(|| FusionError::UnknownAttribute(e.attribute.clone()))?;
            items.push((
                e.attribute.clone(),
                attr.declared_type,
                inputs.candidates(cluster, &e.attribute)?,
                e.value.clone(),
            ));
        }
        Ok(Self { items })
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn evaluate(&self, strategy: &FusionStrategy, ctx: &FusionContext) -> Accuracy {
        let correct = self
            .items
            .iter()
            .filter(|(attr, t, cands, truth)| {
                let Some(spec) = strategy.resolvers.get(attr) else {
                    return false;
                };
                values_equal(resolve(cands, spec, ctx, attr, *t).value.as_ref(), truth.as_ref())
            })
            .count();
        Accuracy::from_counts(correct, self.items.len())
    }
}

pub const REFINEMENT_SWEEPS: usize = 3;

/// Hill climbing over single-attribute resolver swaps, in attribute order,
/// keeping only swaps that raise validation accuracy.
pub fn refine_strategy(
    start: &FusionStrategy,
    validation: &PreparedValidation,
    target: &TargetSchema,
    ctx: &FusionContext,
) -> FusionStrategy {
    let mut current = start.clone();
    current.origin = StrategyOrigin::Refined;
    let mut best = validation.evaluate(&current, ctx).correct;
    for _ in 0..REFINEMENT_SWEEPS {
        let mut changed = false;
        for attr in target.value_attributes() {
            let mut alternatives: Vec<ResolverSpec> = Resolver::ALL
                .iter()
                .filter(|r| applicable(**r, attr.declared_type, ctx))
                .map(|r| ResolverSpec::new(*r))
                .collect();
            alternatives.push(ResolverSpec::voting_longest());
            for alt in alternatives {
                if current.resolvers.get(&attr.name) == Some(&alt) {
                    continue;
                }
                let mut trial = current.clone();
                trial.resolvers.insert(attr.name.clone(), alt);
                let score = validation.evaluate(&trial, ctx).correct;
                if score > best {
                    best = score;
                    current = trial;
                    changed = true;
                }
            }
        }
        if !changed {
            break;
        }
    }
    current.validation_accuracy = Some(validation.evaluate(&current, ctx).accuracy);
    current
}

/// Highest validation accuracy; ties keep heuristic over oracle over
/// refined, then the earlier candidate.
pub fn select_strategy(candidates: &[FusionStrategy]) -> Option<&FusionStrategy> {
    candidates.iter().reduce(|best, c| {
        let (a, b) = (
            c.validation_accuracy.unwrap_or(0.0),
            best.validation_accuracy.unwrap_or(0.0),
        );
        if a > b + 1e-12 || ((a - b).abs() <= 1e-12 && c.origin < best.origin) {
            c
        } else {
            best
        }
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StrategySearch {
    pub candidates: Vec<FusionStrategy>,
    pub selected: FusionStrategy,
    pub validation_entries: usize,
}

/// Heuristic and (optionally) oracle candidates, refinement of the better
/// one, and selection. Without validation entries the heuristic is kept.
pub fn search_strategy(
    target: &TargetSchema,
    ctx: &FusionContext,
    validation: &PreparedValidation,
    oracle: Option<&Oracle>,
) -> Result<StrategySearch, FusionError> {
    let mut candidates = vec![heuristic_strategy(target, ctx)];
    if let Some(o) = oracle {
        candidates.push(oracle_strategy(target, ctx, o)?);
    }
    for c in &mut candidates {
        c.validation_accuracy = Some(validation.evaluate(c, ctx).accuracy);
    }
    if !validation.is_empty() {
        let base = select_strategy(&candidates).expect("non-empty").clone();
        candidates.push(refine_strategy(&base, validation, target, ctx));
    }
    let selected = select_strategy(&candidates).expect("non-empty").clone();
    Ok(StrategySearch {
        candidates,
        selected,
        validation_entries: validation.len(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AttributeProvenance {
    pub sources: Vec<String>,
    pub resolver: String,
    pub conflict: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProvenanceLine {
    pub fused_id: String,
    pub cluster_id: String,
    pub members: Vec<String>,
    pub attributes: BTreeMap<String, AttributeProvenance>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct FusionStats {
    pub clusters: usize,
    pub non_singleton: usize,
    pub size_histogram: BTreeMap<usize, usize>,
    pub conflicts: BTreeMap<String, usize>,
}

#[derive(Debug, Clone)]
pub struct FusionOutput {
    pub dataset: Dataset,
    pub provenance: Vec<ProvenanceLine>,
    pub stats: FusionStats,
}

pub const FUSED_DATASET: &str = "fused";

/// One output record per cluster, in cluster order, ids `fused-<n>`.
pub fn fuse(
    inputs: &FusionInputs,
    strategy: &FusionStrategy,
    target: &TargetSchema,
    ctx: &FusionContext,
) -> Result<FusionOutput, FusionError> {
    strategy.check(target, ctx)?;
    let rows: Vec<(Record, ProvenanceLine)> = inputs
        .clusters()
        .par_iter()
        .enumerate()
        .map(|(n, cluster)| {
            let fused_id = format!("fused-{}", n + 1);
            let mut values = Vec::with_capacity(target.attributes.len());
            let mut attributes = BTreeMap::new();
            for attr in &target.attributes {
                if attr.name == target.id_attribute {
                    values.push(Some(Value::Str(fused_id.clone())));
                    continue;
                }
                let spec = &strategy.resolvers[&attr.name];
                let cands = inputs.candidates(cluster, &attr.name)?;
                let r = resolve(&cands, spec, ctx, &attr.name, attr.declared_type);
                attributes.insert(
                    attr.name.clone(),
                    AttributeProvenance {
                        sources: r.sources,
                        resolver: spec.label(),
                        conflict: r.conflict,
                    },
                );
                values.push(r.value);
            }
            Ok((
                Record {
                    id: fused_id.clone(),
                    source: FUSED_DATASET.into(),
                    values,
                },
                ProvenanceLine {
                    fused_id,
                    cluster_id: cluster.id(),
                    members: cluster.members.iter().map(|m| m.to_string()).collect(),
                    attributes,
                },
            ))
        })
        .collect::<Result<_, FusionError>>()?;
    let mut stats = FusionStats {
        clusters: rows.len(),
        ..Default::default()
    };
    for c in inputs.clusters() {
        *stats.size_histogram.entry(c.len()).or_default() += 1;
        if c.len() > 1 {
            stats.non_singleton += 1;
        }
    }
    let (records, provenance): (Vec<Record>, Vec<ProvenanceLine>) = rows.into_iter().unzip();
    for p in &provenance {
        for (a, ap) in &p.attributes {
            if ap.conflict {
                *stats.conflicts.entry(a.clone()).or_default() += 1;
            }
        }
    }
    let dataset = Dataset::new(
        FUSED_DATASET,
        target.attributes.clone(),
        Some(target.id_attribute.clone()),
        records,
    )?;
    Ok(FusionOutput {
        dataset,
        provenance,
        stats,
    })
}

pub fn write_provenance(path: &Path, lines: &[ProvenanceLine]) -> Result<(), FusionError> {
    let io = |source| FusionError::Io {
        path: path.to_path_buf(),
        source,
    };
    let mut w = std::io::BufWriter::new(std::fs::File::create(path).map_err(io)?);
    for l in lines {
        writeln!(w, "{}", serde_json::to_string(l).expect("provenance serializes")).map_err(io)?;
    }
    w.flush().map_err(io)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::datamodel::AttributeDescriptor;

    fn c(v: Value, s: &str) -> Candidate {
        Candidate {
            value: v,
            source: s.into(),
        }
    }

    fn s(x: &str) -> Value {
        Value::Str(x.into())
    }

    fn ctx() -> FusionContext {
        FusionContext {
            source_order: [("x".to_string(), vec!["a".into(), "b".into(), "c".into()])].into(),
            snapshot_dates: BTreeMap::new(),
        }
    }

    fn run(inputs: &[Candidate], spec: ResolverSpec, t: AttributeType) -> Option<Value> {
        resolve(inputs, &spec, &ctx(), "x", t).value
    }

    #[test]
    fn voting_takes_majority_and_breaks_ties_by_priority() {
        let v = [c(s("A"), "c"), c(s("A"), "b"), c(s("B"), "a")];
        assert_eq!(
            run(&v, ResolverSpec::new(Resolver::Voting), AttributeType::String),
            Some(s("A"))
        );
        let v = [c(s("X"), "b"), c(s("Y"), "a")];
        assert_eq!(
            run(&v, ResolverSpec::new(Resolver::Voting), AttributeType::String),
            Some(s("Y"))
        );
        assert_eq!(
            run(&v, ResolverSpec::voting_longest(), AttributeType::String),
            Some(s("Y"))
        );
        let v = [c(s("PS4"), "a"), c(s("PlayStation 4"), "b")];
        assert_eq!(
            run(&v, ResolverSpec::voting_longest(), AttributeType::String),
            Some(s("PlayStation 4"))
        );
    }

    #[test]
    fn numeric_resolvers() {
        let v = [
            c(Value::Num(1.0), "a"),
            c(Value::Num(2.0), "b"),
            c(Value::Num(10.0), "c"),
        ];
        assert_eq!(
            run(&v, ResolverSpec::new(Resolver::Median), AttributeType::Number),
            Some(Value::Num(2.0))
        );
        assert_eq!(
            run(&v, ResolverSpec::new(Resolver::Average), AttributeType::Number),
            Some(Value::Num(13.0 / 3.0))
        );
        assert_eq!(
            run(&v, ResolverSpec::new(Resolver::Average), AttributeType::Integer),
            Some(Value::Num(4.0))
        );
    }

    #[test]
    fn string_length_resolvers() {
        let v = [c(s("PS4"), "a"), c(s("PlayStation 4"), "b")];
        assert_eq!(
            run(&v, ResolverSpec::new(Resolver::LongestString), AttributeType::String),
            Some(s("PlayStation 4"))
        );
        assert_eq!(
            run(&v, ResolverSpec::new(Resolver::ShortestString), AttributeType::String),
            Some(s("PS4"))
        );
    }

    #[test]
    fn most_recent_uses_snapshot_dates() {
        let mut cx = ctx();
        cx.snapshot_dates
            .insert("b".into(), NaiveDate::from_ymd_opt(2024, 1, 1).unwrap());
        cx.snapshot_dates
            .insert("a".into(), NaiveDate::from_ymd_opt(2020, 1, 1).unwrap());
        let v = [c(s("old"), "a"), c(s("new"), "b"), c(s("undated"), "c")];
        let r = resolve(
            &v,
            &ResolverSpec::new(Resolver::MostRecent),
            &cx,
            "x",
            AttributeType::String,
        );
        assert_eq!(r.value, Some(s("new")));
        assert_eq!(r.sources, vec!["b".to_string()]);
    }

    #[test]
    fn union_list_dedups_in_priority_order() {
        let v = [
            c(Value::List(vec!["RPG".into(), "Action".into()]), "b"),
            c(Value::List(vec!["action".into(), "Shooter".into()]), "a"),
        ];
        assert_eq!(
            run(&v, ResolverSpec::new(Resolver::UnionList), AttributeType::List),
            Some(Value::List(vec!["action".into(), "Shooter".into(), "RPG".into()]))
        );
    }

    #[test]
    fn favour_non_null_skips_nulls() {
        let v = [c(s("b-value"), "b")];
        let r = resolve(
            &v,
            &ResolverSpec::new(Resolver::FavourNonNull),
            &ctx(),
            "x",
            AttributeType::String,
        );
        assert_eq!(r.value, Some(s("b-value")));
        assert_eq!(r.sources, vec!["b".to_string()]);
        assert!(!r.conflict);
        assert_eq!(
            run(&[], ResolverSpec::new(Resolver::FavourNonNull), AttributeType::String),
            None
        );
    }

    #[test]
    fn unanimous_inputs_are_resolver_independent() {
        let v = [
            c(Value::Num(0.1), "a"),
            c(Value::Num(0.1), "b"),
            c(Value::Num(0.1), "c"),
        ];
        for r in Resolver::ALL {
            assert_eq!(
                run(&v, ResolverSpec::new(r), AttributeType::Number),
                Some(Value::Num(0.1)),
                "{r:?}"
            );
        }
    }

    #[test]
    fn equality_rule() {
        assert!(values_equal(Some(&s("PlayStation 4")), Some(&s("playstation 4"))));
        assert!(values_equal(Some(&Value::Num(100.0)), Some(&Value::Num(100.9))));
        assert!(!values_equal(Some(&Value::Num(100.0)), Some(&Value::Num(102.0))));
        assert!(!values_equal(None, Some(&s("x"))));
        assert!(values_equal(None, None));
        let l = |xs: &[&str]| Value::List(xs.iter().map(|x| x.to_string()).collect());
        assert!(values_equal(
            Some(&l(&["a", "b", "c", "d", "e"])),
            Some(&l(&["a", "b", "c", "d"]))
        ));
        assert!(!values_equal(Some(&l(&["a", "b"])), Some(&l(&["a", "c"]))));
    }

    #[test]
    fn selection_prefers_accuracy_then_origin() {
        let mk = |origin, acc| FusionStrategy {
            resolvers: BTreeMap::new(),
            origin,
            validation_accuracy: Some(acc),
        };
        let c = [mk(StrategyOrigin::Heuristic, 0.709), mk(StrategyOrigin::Oracle, 0.744)];
        assert_eq!(select_strategy(&c).unwrap().origin, StrategyOrigin::Oracle);
        let c = [
            mk(StrategyOrigin::Refined, 0.866),
            mk(StrategyOrigin::Oracle, 0.866),
            mk(StrategyOrigin::Heuristic, 0.866),
        ];
        assert_eq!(select_strategy(&c).unwrap().origin, StrategyOrigin::Heuristic);
        assert!(select_strategy(&[]).is_none());
    }

    #[test]
    fn heuristic_rules_by_type() {
        let target = TargetSchema::new(
            "id",
            vec![
                AttributeDescriptor::new("id", AttributeType::String),
                AttributeDescriptor::new("p", AttributeType::Number),
                AttributeDescriptor::new("q", AttributeType::Number),
            ],
        )
        .unwrap();
        let h = heuristic_strategy(&target, &FusionContext::default());
        assert!(h.resolvers.values().all(|r| r.resolver == Resolver::Median));
        h.check(&target, &FusionContext::default()).unwrap();
        let mut bad = h.clone();
        bad.resolvers.insert("p".into(), ResolverSpec::new(Resolver::UnionList));
        assert!(matches!(
            bad.check(&target, &FusionContext::default()),
            Err(FusionError::Inapplicable { .. })
        ));
    }
}
