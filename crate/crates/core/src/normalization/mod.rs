//! Value normalization into target-schema formats.
//!
//! Code-based normalizers are picked per mapped column from the target
//! attribute type and the column profile. Categorical attributes with a value
//! set are normalized through oracle-generated taxonomy mappings instead.

pub mod countries;
pub mod values;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::datamodel::{
    AttributeDescriptor, AttributeType, ColumnProfile, DataError, Dataset, Record, SemanticType, TargetSchema, Value,
};
use crate::oracle::prompts::{self, TaxonomyPayload, TaxonomyReply};
use crate::oracle::{Oracle, OracleError};
use crate::schema_matching::SchemaCorrespondence;
pub use values::NumberLocale;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NormalizerKind {
    NumericScale,
    Date,
    Duration,
    Country,
    PhoneLikePassthrough,
    ListSplit,
    Taxonomy,
    None,
}

impl NormalizerKind {
    pub fn method(self) -> Option<Method> {
        match self {
            NormalizerKind::None => None,
            NormalizerKind::Taxonomy => Some(Method::Taxonomy),
            _ => Some(Method::Code),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Code,
    Taxonomy,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormalizerAssignment {
    pub dataset: String,
    pub column: String,
    pub target_attribute: Option<String>,
    pub normalizer: NormalizerKind,
    pub target_type: Option<AttributeType>,
}

/// Parsing conventions of one source.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct NormalizationHints {
    pub number_locale: NumberLocale,
    pub day_first: bool,
    /// Characters that separate list items in raw cells.
    pub list_delimiters: String,
}

impl Default for NormalizationHints {
    fn default() -> Self {
        Self {
            number_locale: NumberLocale::Dot,
            day_first: false,
            list_delimiters: "|;,".into(),
        }
    }
}

/// Picks one normalizer per source column. Unmapped columns get `None`.
pub fn assign_normalizers(
    dataset: &str,
    profiles: &[ColumnProfile],
    correspondences: &[SchemaCorrespondence],
    target: &TargetSchema,
) -> Vec<NormalizerAssignment> {
    profiles
        .iter()
        .map(|p| {
            let target_attr = correspondences
                .iter()
                .find(|c| c.source_dataset == dataset && c.source_attribute == p.column)
                .and_then(|c| c.target_attribute.as_deref())
                .and_then(|t| target.attribute(t))
                .filter(|a| a.name != target.id_attribute);
            let normalizer = match target_attr {
                None => NormalizerKind::None,
                Some(a) => normalizer_for(a, p),
            };
            NormalizerAssignment {
                dataset: dataset.to_string(),
                column: p.column.clone(),
                target_attribute: target_attr.map(|a| a.name.clone()),
                normalizer,
                target_type: target_attr.map(|a| a.declared_type),
            }
        })
        .collect()
}

fn normalizer_for(attr: &AttributeDescriptor, profile: &ColumnProfile) -> NormalizerKind {
    if attr.value_set.is_some() {
        return NormalizerKind::Taxonomy;
    }
    match attr.declared_type {
        AttributeType::Number | AttributeType::Integer => NormalizerKind::NumericScale,
        AttributeType::Date => NormalizerKind::Date,
        AttributeType::Duration => NormalizerKind::Duration,
        AttributeType::List => NormalizerKind::ListSplit,
        AttributeType::String | AttributeType::Categorical => match profile.detected_type {
            SemanticType::Country => NormalizerKind::Country,
            _ => NormalizerKind::None,
        },
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Normalized {
    Value(Value),
    /// The raw value could not be parsed and is kept as is.
    Unparsed,
}

/// Normalizes one non-null value. Already-typed values pass through, which
/// makes every normalizer idempotent.
pub fn normalize_value(raw: &Value, kind: NormalizerKind, hints: &NormalizationHints) -> Normalized {
    let s = match raw {
        Value::Str(s) => s.trim(),
        typed => {
            let compatible = matches!(
                (kind, typed),
                (NormalizerKind::NumericScale | NormalizerKind::Duration, Value::Num(_))
                    | (NormalizerKind::Date, Value::Date(_))
                    | (NormalizerKind::ListSplit, Value::List(_))
            );
            return if compatible {
                Normalized::Value(typed.clone())
            } else {
                Normalized::Unparsed
            };
        }
    };
    let parsed = match kind {
        NormalizerKind::NumericScale => values::parse_number(s, hints.number_locale).map(Value::Num),
        NormalizerKind::Date => values::parse_date(s, hints.day_first).map(Value::Date),
        NormalizerKind::Duration => values::parse_duration(s).map(Value::Num),
        NormalizerKind::Country => values::country_code(s).map(|c| Value::Str(c.to_string())),
        NormalizerKind::ListSplit => {
            let items = split_list(s, &hints.list_delimiters);
            (!items.is_empty()).then_some(Value::List(items))
        }
        NormalizerKind::PhoneLikePassthrough | NormalizerKind::None | NormalizerKind::Taxonomy => {
            Some(Value::Str(s.to_string()))
        }
    };
    parsed.map(Normalized::Value).unwrap_or(Normalized::Unparsed)
}

fn split_list(s: &str, delimiters: &str) -> Vec<String> {
    let mut seen = BTreeSet::new();
    s.split(|c: char| delimiters.contains(c))
        .map(str::trim)
        .filter(|item| !item.is_empty())
        .filter(|item| seen.insert(item.to_string()))
        .map(str::to_string)
        .collect()
}

/// Raw value → value-set member, or `None` to retain the raw value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TaxonomyMapping {
    pub dataset: String,
    pub column: String,
    pub attribute: String,
    pub entries: BTreeMap<String, Option<String>>,
}

impl TaxonomyMapping {
    pub fn load(path: &Path) -> Result<Self, DataError> {
        let text = std::fs::read_to_string(path).map_err(|source| DataError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        serde_json::from_str(&text).map_err(|source| DataError::Json {
            path: path.to_path_buf(),
            source,
        })
    }

    pub fn save(&self, path: &Path) -> Result<(), DataError> {
        let io = |source| DataError::Io {
            path: path.to_path_buf(),
            source,
        };
        if let Some(parent) = path.parent() {
            std::fs::create_dir_all(parent).map_err(io)?;
        }
        let text = serde_json::to_string_pretty(self).expect("mapping serializes");
        std::fs::write(path, text + "\n").map_err(io)
    }

    pub fn file_name(&self) -> String {
        format!("{}__{}.json", sanitize(&self.dataset), sanitize(&self.column))
    }
}

pub fn sanitize(s: &str) -> String {
    s.chars()
        .map(|c| {
            if c.is_alphanumeric() || c == '-' || c == '.' {
                c
            } else {
                '_'
            }
        })
        .collect()
}

/// Maximum distinct values sent in one taxonomy request.
pub const TAXONOMY_BATCH: usize = 200;

/// Builds the taxonomy mapping of one column. Entries in `existing` are kept
/// as given and not re-asked; values already in the value set map to their
/// set member without an oracle call.
pub fn map_taxonomy(
    dataset: &Dataset,
    column: &str,
    attribute: &AttributeDescriptor,
    oracle: &Oracle,
    existing: Option<&TaxonomyMapping>,
) -> Result<TaxonomyMapping, OracleError> {
    let value_set = attribute.value_set.clone().unwrap_or_default();
    let by_lower: BTreeMap<String, &String> = value_set.iter().map(|v| (v.to_lowercase(), v)).collect();
    let distinct: BTreeSet<String> = dataset
        .column_values(column)
        .into_iter()
        .flatten()
        .flatten()
        .map(Value::render)
        .collect();
    let mut entries = BTreeMap::new();
    let mut ask = Vec::new();
    for raw in distinct {
        if let Some(prior) = existing.and_then(|m| m.entries.get(&raw)) {
            entries.insert(raw, prior.clone());
        } else if let Some(member) = by_lower.get(&raw.trim().to_lowercase()) {
            entries.insert(raw, Some((*member).clone()));
        } else {
            ask.push(raw);
        }
    }
    for batch in ask.chunks(TAXONOMY_BATCH) {
        let request = prompts::taxonomy_map(&TaxonomyPayload {
            dataset: dataset.name().to_string(),
            column: column.to_string(),
            attribute: attribute.name.clone(),
            values: batch.to_vec(),
            value_set: value_set.clone(),
        });
        let reply: TaxonomyReply = match serde_json::from_value(oracle.invoke(&request)?) {
            Ok(r) => r,
            Err(e) => {
                log::warn!("unusable taxonomy reply for {}.{column}: {e}", dataset.name());
                TaxonomyReply { mappings: vec![] }
            }
        };
        let mut answered: BTreeMap<String, Option<String>> = BTreeMap::new();
        for item in reply.mappings {
            let target = match item.target {
                None => None,
                Some(t) => match by_lower.get(&t.trim().to_lowercase()) {
                    Some(member) => Some((*member).clone()),
                    None => {
                        log::warn!(
                            "taxonomy target `{t}` for `{}` is outside the value set; retaining",
                            item.value
                        );
                        None
                    }
                },
            };
            answered.entry(item.value).or_insert(target);
        }
        for raw in batch {
            entries.insert(raw.clone(), answered.get(raw).cloned().flatten());
        }
    }
    Ok(TaxonomyMapping {
        dataset: dataset.name().to_string(),
        column: column.to_string(),
        attribute: attribute.name.clone(),
        entries,
    })
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct NormalizationCounts {
    pub columns_touched: usize,
    pub values_normalized: usize,
    pub values_total: usize,
}

impl NormalizationCounts {
    fn add(&mut self, other: &NormalizationCounts) {
        self.columns_touched += other.columns_touched;
        self.values_normalized += other.values_normalized;
        self.values_total += other.values_total;
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormalizationStats {
    pub dataset: String,
    pub method: Method,
    #[serde(flatten)]
    pub counts: NormalizationCounts,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct NormalizationReport {
    pub entries: Vec<NormalizationStats>,
}

impl NormalizationReport {
    pub fn merge(&mut self, other: NormalizationReport) {
        self.entries.extend(other.entries);
    }

    pub fn get(&self, dataset: &str, method: Method) -> NormalizationCounts {
        let mut total = NormalizationCounts::default();
        for e in self
            .entries
            .iter()
            .filter(|e| e.dataset == dataset && e.method == method)
        {
            total.add(&e.counts);
        }
        total
    }

    pub fn total(&self, method: Method) -> NormalizationCounts {
        let mut total = NormalizationCounts::default();
        for e in self.entries.iter().filter(|e| e.method == method) {
            total.add(&e.counts);
        }
        total
    }

    pub fn datasets(&self) -> Vec<String> {
        let mut seen = Vec::new();
        for e in &self.entries {
            if !seen.contains(&e.dataset) {
                seen.push(e.dataset.clone());
            }
        }
        seen
    }

    /// Text table with one row per dataset and method columns.
    pub fn render_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "{:<16}{:>6}{:>10}{:>10}{:>6}{:>10}{:>10}",
            "Dataset", "Col.", "Norm.", "Total", "Col.", "Norm.", "Total"
        );
        let row = |out: &mut String, name: &str, code: NormalizationCounts, tax: NormalizationCounts| {
            let _ = writeln!(
                out,
                "{:<16}{:>6}{:>10}{:>10}{:>6}{:>10}{:>10}",
                name,
                code.columns_touched,
                code.values_normalized,
                code.values_total,
                tax.columns_touched,
                tax.values_normalized,
                tax.values_total
            );
        };
        for ds in self.datasets() {
            row(
                &mut out,
                &ds,
                self.get(&ds, Method::Code),
                self.get(&ds, Method::Taxonomy),
            );
        }
        row(
            &mut out,
            "Total",
            self.total(Method::Code),
            self.total(Method::Taxonomy),
        );
        out
    }
}

/// Applies the assignments column by column. Unassigned columns are copied
/// verbatim; normalized columns take the target type.
pub fn apply_normalization(
    dataset: &Dataset,
    assignments: &[NormalizerAssignment],
    mappings: &[TaxonomyMapping],
    hints: &NormalizationHints,
) -> Result<(Dataset, NormalizationReport), DataError> {
    let mut attributes = dataset.attributes().to_vec();
    let mut records: Vec<Record> = dataset.records().to_vec();
    let mut counts: BTreeMap<Method, NormalizationCounts> = BTreeMap::new();
    for a in assignments.iter().filter(|a| a.dataset == dataset.name()) {
        let Some(method) = a.normalizer.method() else {
            continue;
        };
        let col = dataset
            .column(&a.column)
            .ok_or_else(|| DataError::UnknownColumn(a.column.clone()))?;
        let mapping = if a.normalizer == NormalizerKind::Taxonomy {
            Some(
                mappings
                    .iter()
                    .find(|m| m.dataset == a.dataset && m.column == a.column)
                    .ok_or_else(|| DataError::Schema(format!("no taxonomy mapping for {}.{}", a.dataset, a.column)))?,
            )
        } else {
            None
        };
        let c = counts.entry(method).or_default();
        c.columns_touched += 1;
        for r in records.iter_mut() {
            let Some(raw) = r.values[col].take() else {
                continue;
            };
            c.values_total += 1;
            let out = match mapping {
                Some(m) => match m.entries.get(&raw.render()).cloned().flatten() {
                    Some(target) => {
                        c.values_normalized += 1;
                        Value::Str(target)
                    }
                    None => raw,
                },
                None => match normalize_value(&raw, a.normalizer, hints) {
                    Normalized::Value(v) => {
                        c.values_normalized += 1;
                        v
                    }
                    Normalized::Unparsed => raw,
                },
            };
            r.values[col] = Some(out);
        }
        if let Some(t) = a.target_type {
            attributes[col].declared_type = t;
        }
    }
    let report = NormalizationReport {
        entries: counts
            .into_iter()
            .map(|(method, counts)| NormalizationStats {
                dataset: dataset.name().to_string(),
                method,
                counts,
            })
            .collect(),
    };
    let out = Dataset::new(
        dataset.name(),
        attributes,
        dataset.id_attribute().map(str::to_string),
        records,
    )?;
    Ok((out, report))
}

/// Rewrites a source dataset into target-schema layout. The id attribute
/// holds the source record id; target attributes without a corresponding
/// column are null. Values that do not fit the target type are dropped.
pub fn project_to_target(
    dataset: &Dataset,
    correspondences: &[SchemaCorrespondence],
    target: &TargetSchema,
) -> Result<Dataset, DataError> {
    let sources: Vec<Option<usize>> = target
        .attributes
        .iter()
        .map(|attr| {
            if attr.name == target.id_attribute {
                return None;
            }
            correspondences
                .iter()
                .filter(|c| c.source_dataset == dataset.name())
                .find(|c| c.target_attribute.as_deref() == Some(attr.name.as_str()))
                .and_then(|c| dataset.column(&c.source_attribute))
        })
        .collect();
    let records = dataset
        .records()
        .iter()
        .map(|r| {
            let values = target
                .attributes
                .iter()
                .zip(&sources)
                .map(|(attr, src)| {
                    if attr.name == target.id_attribute {
                        return Some(Value::Str(r.id.clone()));
                    }
                    src.and_then(|c| r.values[c].clone())
                        .and_then(|v| fit_type(v, attr.declared_type))
                })
                .collect();
            Record {
                id: r.id.clone(),
                source: dataset.name().to_string(),
                values,
            }
        })
        .collect();
    Dataset::new(
        dataset.name(),
        target.attributes.clone(),
        Some(target.id_attribute.clone()),
        records,
    )
}

fn fit_type(v: Value, t: AttributeType) -> Option<Value> {
    match (t, v) {
        (AttributeType::Number | AttributeType::Integer | AttributeType::Duration, v @ Value::Num(_)) => Some(v),
        (AttributeType::Number | AttributeType::Integer | AttributeType::Duration, _) => None,
        (AttributeType::Date, v @ Value::Date(_)) => Some(v),
        (AttributeType::Date, _) => None,
        (AttributeType::List, v @ Value::List(_)) => Some(v),
        (AttributeType::List, Value::Str(s)) => Some(Value::List(vec![s])),
        (AttributeType::List, _) => None,
        (_, Value::Str(s)) => Some(Value::Str(s)),
        (_, other) => Some(Value::Str(other.render())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::datamodel::profile_dataset;
    use crate::oracle::mock::{MockTables, MockTransport};
    use crate::oracle::{HashedNgramEmbedder, OracleSettings};
    use crate::schema_matching::Matcher;

    fn hints() -> NormalizationHints {
        NormalizationHints::default()
    }

    fn s(v: &str) -> Value {
        Value::Str(v.to_string())
    }

    #[test]
    fn numeric_scale_words() {
        assert_eq!(
            normalize_value(&s("3.2 million"), NormalizerKind::NumericScale, &hints()),
            Normalized::Value(Value::Num(3_200_000.0))
        );
    }

    #[test]
    fn comma_locale() {
        let h = NormalizationHints {
            number_locale: NumberLocale::Comma,
            ..hints()
        };
        assert_eq!(
            normalize_value(&s("1.234,56"), NormalizerKind::NumericScale, &h),
            Normalized::Value(Value::Num(1234.56))
        );
    }

    #[test]
    fn implausible_duration_is_kept_as_is() {
        assert_eq!(
            normalize_value(&s("2000"), NormalizerKind::Duration, &hints()),
            Normalized::Value(Value::Num(2000.0))
        );
    }

    #[test]
    fn unparsable_number_is_unparsed() {
        assert_eq!(
            normalize_value(&s("soon"), NormalizerKind::NumericScale, &hints()),
            Normalized::Unparsed
        );
    }

    #[test]
    fn every_normalizer_is_idempotent_on_samples() {
        let samples = [
            "3.2 million",
            "2004-05-06",
            "1:30:00",
            "Germany",
            "a, b; c",
            "hello",
            "12/31/1999",
        ];
        let kinds = [
            NormalizerKind::NumericScale,
            NormalizerKind::Date,
            NormalizerKind::Duration,
            NormalizerKind::Country,
            NormalizerKind::ListSplit,
            NormalizerKind::PhoneLikePassthrough,
            NormalizerKind::None,
        ];
        for kind in kinds {
            for raw in samples {
                if let Normalized::Value(once) = normalize_value(&s(raw), kind, &hints()) {
                    assert_eq!(
                        normalize_value(&once, kind, &hints()),
                        Normalized::Value(once.clone()),
                        "{kind:?} {raw}"
                    );
                }
            }
        }
    }

    fn one_column(name: &str, cells: &[Option<&str>]) -> Dataset {
        let records = cells
            .iter()
            .enumerate()
            .map(|(i, c)| Record {
                id: format!("r{i}"),
                source: "d".into(),
                values: vec![c.map(s)],
            })
            .collect();
        Dataset::new(
            "d",
            vec![AttributeDescriptor::new(name, AttributeType::String)],
            None,
            records,
        )
        .unwrap()
    }

    fn assignment(col: &str, kind: NormalizerKind) -> NormalizerAssignment {
        NormalizerAssignment {
            dataset: "d".into(),
            column: col.into(),
            target_attribute: Some(col.into()),
            normalizer: kind,
            target_type: Some(AttributeType::Number),
        }
    }

    #[test]
    fn report_counts_parsed_cells() {
        let mut cells: Vec<Option<&str>> = vec![Some("1"); 8];
        cells.extend([Some("x"), Some("y"), None]);
        let ds = one_column("n", &cells);
        let (out, report) =
            apply_normalization(&ds, &[assignment("n", NormalizerKind::NumericScale)], &[], &hints()).unwrap();
        let c = report.get("d", Method::Code);
        assert_eq!((c.columns_touched, c.values_normalized, c.values_total), (1, 8, 10));
        assert_eq!(out.value(8, "n"), Some(&s("x")));
        assert_eq!(out.value(0, "n"), Some(&Value::Num(1.0)));
    }

    #[test]
    fn all_null_column_counts_zero() {
        let ds = one_column("n", &[None, None]);
        let (_, report) =
            apply_normalization(&ds, &[assignment("n", NormalizerKind::NumericScale)], &[], &hints()).unwrap();
        let c = report.get("d", Method::Code);
        assert_eq!((c.values_normalized, c.values_total), (0, 0));
    }

    #[test]
    fn assignment_rules() {
        let ds = one_column("platform", &[Some("PS4")]);
        let mut target_attr = AttributeDescriptor::new("platform", AttributeType::Categorical);
        target_attr.value_set = Some(vec!["PlayStation 4".into()]);
        let target = TargetSchema::new(
            "id",
            vec![
                AttributeDescriptor::new("id", AttributeType::String),
                target_attr,
                AttributeDescriptor::new("score", AttributeType::Number),
            ],
        )
        .unwrap();
        let corr = |col: &str, t: &str| SchemaCorrespondence {
            source_dataset: "d".into(),
            source_attribute: col.into(),
            target_attribute: Some(t.into()),
            score: 1.0,
            matcher: Matcher::Manual,
        };
        let profiles = profile_dataset(&ds);
        let a = assign_normalizers("d", &profiles, &[corr("platform", "platform")], &target);
        assert_eq!(a[0].normalizer, NormalizerKind::Taxonomy);
        let a = assign_normalizers("d", &profiles, &[], &target);
        assert_eq!(a[0].normalizer, NormalizerKind::None);
        let a = assign_normalizers("d", &profiles, &[corr("platform", "score")], &target);
        assert_eq!(a[0].normalizer, NormalizerKind::NumericScale);
    }

    fn mock_oracle(tables: MockTables) -> Oracle {
        Oracle::new(
            Box::new(MockTransport::new(tables)),
            Box::new(HashedNgramEmbedder::default()),
            OracleSettings::default(),
        )
    }

    #[test]
    fn taxonomy_mapping_identity_known_and_retain() {
        let ds = one_column(
            "platform",
            &[Some("PS4"), Some("PlayStation 4"), Some("???"), Some("PS4")],
        );
        let mut attr = AttributeDescriptor::new("platform", AttributeType::Categorical);
        attr.value_set = Some(vec!["PlayStation 4".into(), "Xbox One".into()]);
        let mut tables = MockTables::default();
        tables.taxonomy.insert(
            "platform".into(),
            [
                ("PS4".to_string(), "PlayStation 4".to_string()),
                ("???".to_string(), "Atari Jaguar".to_string()),
            ]
            .into(),
        );
        let oracle = mock_oracle(tables);
        let m = map_taxonomy(&ds, "platform", &attr, &oracle, None).unwrap();
        assert_eq!(m.entries.len(), 3);
        assert_eq!(m.entries["PS4"].as_deref(), Some("PlayStation 4"));
        assert_eq!(m.entries["PlayStation 4"].as_deref(), Some("PlayStation 4"));
        // out-of-set answer is retained
        assert_eq!(m.entries["???"], None);
        let a = NormalizerAssignment {
            dataset: "d".into(),
            column: "platform".into(),
            target_attribute: Some("platform".into()),
            normalizer: NormalizerKind::Taxonomy,
            target_type: Some(AttributeType::Categorical),
        };
        let (out, report) = apply_normalization(&ds, &[a], &[m], &hints()).unwrap();
        let c = report.get("d", Method::Taxonomy);
        assert_eq!((c.values_normalized, c.values_total), (3, 4));
        assert_eq!(out.value(0, "platform"), Some(&s("PlayStation 4")));
        assert_eq!(out.value(2, "platform"), Some(&s("???")));
    }

    #[test]
    fn taxonomy_batches_of_at_most_200() {
        let cells: Vec<String> = (0..450).map(|i| format!("v{i}")).collect();
        let refs: Vec<Option<&str>> = cells.iter().map(|c| Some(c.as_str())).collect();
        let ds = one_column("g", &refs);
        let mut attr = AttributeDescriptor::new("g", AttributeType::Categorical);
        attr.value_set = Some(vec!["A".into()]);
        let oracle = mock_oracle(MockTables::default());
        let m = map_taxonomy(&ds, "g", &attr, &oracle, None).unwrap();
        assert_eq!(m.entries.len(), 450);
        assert_eq!(oracle.ledger().len(), 3);
    }

    #[test]
    fn existing_mapping_overrides_oracle() {
        let ds = one_column("platform", &[Some("PS4")]);
        let mut attr = AttributeDescriptor::new("platform", AttributeType::Categorical);
        attr.value_set = Some(vec!["PlayStation 4".into()]);
        let prior = TaxonomyMapping {
            dataset: "d".into(),
            column: "platform".into(),
            attribute: "platform".into(),
            entries: [("PS4".to_string(), None)].into(),
        };
        let oracle = mock_oracle(MockTables::default());
        let m = map_taxonomy(&ds, "platform", &attr, &oracle, Some(&prior)).unwrap();
        assert_eq!(m.entries["PS4"], None);
        assert!(oracle.ledger().is_empty());
    }

    #[test]
    fn report_is_additive() {
        let mut r = NormalizationReport::default();
        for (ds, n, t) in [("a", 3, 4), ("b", 5, 5)] {
            r.entries.push(NormalizationStats {
                dataset: ds.into(),
                method: Method::Code,
                counts: NormalizationCounts {
                    columns_touched: 1,
                    values_normalized: n,
                    values_total: t,
                },
            });
        }
        let total = r.total(Method::Code);
        assert_eq!((total.values_normalized, total.values_total), (8, 9));
        assert!(r.render_text().contains("Total"));
    }
}
