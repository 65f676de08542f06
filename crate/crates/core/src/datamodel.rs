//! Tabular datasets, target schemas and column profiles.
//!
//! A [`Dataset`] is immutable once loaded. Values are stored column-aligned
//! with [`Dataset::attributes`]; raw loads produce string values only, typed
//! values appear after normalization.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::normalization::values::{self, NumberLocale};

/// Cell markers that load as null in addition to the empty string.
pub const NULL_MARKERS: [&str; 4] = ["null", "NULL", "NaN", "-"];

/// Separator used when list values are written to delimited text.
pub const LIST_SEPARATOR: char = '|';

#[derive(Debug, Error)]
pub enum DataError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("malformed delimited file {path}: {source}")]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },
    #[error("duplicate header name `{0}`")]
    DuplicateHeader(String),
    #[error("duplicate record id `{0}`")]
    DuplicateId(String),
    #[error("empty record id in row {0}")]
    EmptyId(usize),
    #[error("unknown column `{0}`")]
    UnknownColumn(String),
    #[error("invalid schema: {0}")]
    Schema(String),
    #[error("invalid json in {path}: {source}")]
    Json {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },
}

/// A single cell value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Value {
    Num(f64),
    Date(NaiveDate),
    List(Vec<String>),
    Str(String),
}

impl Value {
    pub fn as_str(&self) -> Option<&str> {
        match self {
            Value::Str(s) => Some(s),
            _ => None,
        }
    }

    pub fn as_num(&self) -> Option<f64> {
        match self {
            Value::Num(n) => Some(*n),
            _ => None,
        }
    }

    pub fn as_date(&self) -> Option<NaiveDate> {
        match self {
            Value::Date(d) => Some(*d),
            _ => None,
        }
    }

    pub fn as_list(&self) -> Option<&[String]> {
        match self {
            Value::List(l) => Some(l),
            _ => None,
        }
    }

    /// Text form used for delimited files and prompts.
    pub fn render(&self) -> String {
        match self {
            Value::Str(s) => s.clone(),
            Value::Num(n) => format_number(*n),
            Value::Date(d) => d.format("%Y-%m-%d").to_string(),
            Value::List(items) => items.join(&LIST_SEPARATOR.to_string()),
        }
    }

    /// Case, punctuation and whitespace insensitive key for grouping equal values.
    pub fn group_key(&self) -> String {
        match self {
            Value::Str(s) => canonical_text(s),
            Value::List(items) => {
                let set: BTreeSet<String> = items.iter().map(|i| canonical_text(i)).collect();
                set.into_iter().collect::<Vec<_>>().join("|")
            }
            other => other.render(),
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

/// Lowercases, drops punctuation and collapses whitespace.
pub fn canonical_text(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    let mut pending_space = false;
    for ch in s.chars() {
        if ch.is_alphanumeric() {
            if pending_space && !out.is_empty() {
                out.push(' ');
            }
            pending_space = false;
            out.extend(ch.to_lowercase());
        } else if ch.is_whitespace() {
            pending_space = true;
        }
    }
    out
}

pub fn format_number(n: f64) -> String {
    if n.fract() == 0.0 && n.abs() < 1e15 {
        format!("{n:.0}")
    } else {
        format!("{n}")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AttributeType {
    String,
    Number,
    Integer,
    Date,
    Duration,
    List,
    Categorical,
}

impl AttributeType {
    pub fn is_numeric(self) -> bool {
        matches!(
            self,
            AttributeType::Number | AttributeType::Integer | AttributeType::Duration
        )
    }

    pub fn is_textual(self) -> bool {
        matches!(self, AttributeType::String | AttributeType::Categorical)
    }

    pub fn name(self) -> &'static str {
        match self {
            AttributeType::String => "string",
            AttributeType::Number => "number",
            AttributeType::Integer => "integer",
            AttributeType::Date => "date",
            AttributeType::Duration => "duration",
            AttributeType::List => "list",
            AttributeType::Categorical => "categorical",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AttributeDescriptor {
    pub name: String,
    #[serde(rename = "type")]
    pub declared_type: AttributeType,
    #[serde(default)]
    pub description: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub value_set: Option<Vec<String>>,
}

impl AttributeDescriptor {
    pub fn new(name: impl Into<String>, declared_type: AttributeType) -> Self {
        Self {
            name: name.into(),
            declared_type,
            description: String::new(),
            value_set: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TargetSchema {
    pub id_attribute: String,
    pub attributes: Vec<AttributeDescriptor>,
}

impl TargetSchema {
    pub fn new(id_attribute: impl Into<String>, attributes: Vec<AttributeDescriptor>) -> Result<Self, DataError> {
        let schema = Self {
            id_attribute: id_attribute.into(),
            attributes,
        };
        schema.validate()?;
        Ok(schema)
    }

    pub fn load(path: &Path) -> Result<Self, DataError> {
        let text = fs::read_to_string(path).map_err(|source| DataError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        let schema: TargetSchema = serde_json::from_str(&text).map_err(|source| DataError::Json {
            path: path.to_path_buf(),
            source,
        })?;
        schema.validate()?;
        Ok(schema)
    }

    pub fn validate(&self) -> Result<(), DataError> {
        let mut seen = BTreeSet::new();
        for attr in &self.attributes {
            if !seen.insert(attr.name.as_str()) {
                return Err(DataError::Schema(format!("attribute `{}` declared twice", attr.name)));
            }
            if attr.value_set.is_some() && attr.declared_type != AttributeType::Categorical {
                return Err(DataError::Schema(format!(
                    "attribute `{}` has a value set but is not categorical",
                    attr.name
                )));
            }
        }
        if !seen.contains(self.id_attribute.as_str()) {
            return Err(DataError::Schema(format!(
                "id attribute `{}` is not among the attributes",
                self.id_attribute
            )));
        }
        Ok(())
    }

    pub fn attribute(&self, name: &str) -> Option<&AttributeDescriptor> {
        self.attributes.iter().find(|a| a.name == name)
    }

    pub fn attribute_names(&self) -> Vec<String> {
        self.attributes.iter().map(|a| a.name.clone()).collect()
    }

    /// Target attributes other than the id attribute.
    pub fn value_attributes(&self) -> impl Iterator<Item = &AttributeDescriptor> {
        self.attributes.iter().filter(move |a| a.name != self.id_attribute)
    }

    /// JSON Schema rendering handed to the oracle.
    pub fn json_schema(&self) -> serde_json::Value {
        let mut props = serde_json::Map::new();
        for attr in &self.attributes {
            let json_type = match attr.declared_type {
                AttributeType::Number | AttributeType::Duration => "number",
                AttributeType::Integer => "integer",
                AttributeType::List => "array",
                _ => "string",
            };
            let mut prop = serde_json::json!({ "type": json_type, "description": attr.description });
            if attr.declared_type == AttributeType::Date {
                prop["format"] = "date".into();
            }
            if let Some(values) = &attr.value_set {
                prop["enum"] = serde_json::json!(values);
            }
            props.insert(attr.name.clone(), prop);
        }
        serde_json::json!({
            "type": "object",
            "properties": props,
            "required": [self.id_attribute],
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Record {
    pub id: String,
    pub source: String,
    /// One slot per dataset attribute, in attribute order.
    pub values: Vec<Option<Value>>,
}

/// How record ids are obtained when loading a file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum IdSpec {
    Column(String),
    /// Ids become `<dataset>-<row index>`.
    Synthesize,
}

impl IdSpec {
    pub fn parse(s: &str) -> Self {
        if s == "synthesize" {
            IdSpec::Synthesize
        } else {
            IdSpec::Column(s.to_string())
        }
    }
}

#[derive(Debug, Clone)]
pub struct LoadOptions {
    pub delimiter: u8,
    /// Dataset name; defaults to the file stem.
    pub name: Option<String>,
}

impl Default for LoadOptions {
    fn default() -> Self {
        Self {
            delimiter: b',',
            name: None,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Dataset {
    name: String,
    attributes: Vec<AttributeDescriptor>,
    id_attribute: Option<String>,
    records: Vec<Record>,
    column_index: HashMap<String, usize>,
    id_index: HashMap<String, usize>,
}

impl Dataset {
    pub fn new(
        name: impl Into<String>,
        attributes: Vec<AttributeDescriptor>,
        id_attribute: Option<String>,
        records: Vec<Record>,
    ) -> Result<Self, DataError> {
        let name = name.into();
        let mut column_index = HashMap::with_capacity(attributes.len());
        for (i, attr) in attributes.iter().enumerate() {
            if column_index.insert(attr.name.clone(), i).is_some() {
                return Err(DataError::DuplicateHeader(attr.name.clone()));
            }
        }
        if let Some(id_attr) = &id_attribute {
            if !column_index.contains_key(id_attr) {
                return Err(DataError::UnknownColumn(id_attr.clone()));
            }
        }
        let mut id_index = HashMap::with_capacity(records.len());
        for (row, record) in records.iter().enumerate() {
            if record.id.is_empty() {
                return Err(DataError::EmptyId(row));
            }
            if record.values.len() != attributes.len() {
                return Err(DataError::Schema(format!(
                    "record `{}` has {} values for {} attributes",
                    record.id,
                    record.values.len(),
                    attributes.len()
                )));
            }
            if id_index.insert(record.id.clone(), row).is_some() {
                return Err(DataError::DuplicateId(record.id.clone()));
            }
        }
        Ok(Self {
            name,
            attributes,
            id_attribute,
            records,
            column_index,
            id_index,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn attributes(&self) -> &[AttributeDescriptor] {
        &self.attributes
    }

    pub fn attribute_names(&self) -> Vec<String> {
        self.attributes.iter().map(|a| a.name.clone()).collect()
    }

    pub fn id_attribute(&self) -> Option<&str> {
        self.id_attribute.as_deref()
    }

    pub fn records(&self) -> &[Record] {
        &self.records
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.column_index.get(name).copied()
    }

    pub fn has_column(&self, name: &str) -> bool {
        self.column_index.contains_key(name)
    }

    pub fn position(&self, id: &str) -> Option<usize> {
        self.id_index.get(id).copied()
    }

    pub fn record(&self, id: &str) -> Option<&Record> {
        self.position(id).map(|i| &self.records[i])
    }

    pub fn value(&self, row: usize, column: &str) -> Option<&Value> {
        let col = self.column(column)?;
        self.records[row].values[col].as_ref()
    }

    /// Iterates the values of one column, nulls included.
    pub fn column_values<'a>(&'a self, column: &str) -> Option<impl Iterator<Item = Option<&'a Value>> + 'a> {
        let col = self.column(column)?;
        Some(self.records.iter().map(move |r| r.values[col].as_ref()))
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        for r in &mut self.records {
            r.source = self.name.clone();
        }
        self
    }

    /// Writes the dataset as delimited text with a header row.
    pub fn write_csv(&self, path: &Path) -> Result<(), DataError> {
        if let Some(parent) = path.parent() {
            fs::create_dir_all(parent).map_err(|source| DataError::Io {
                path: parent.to_path_buf(),
                source,
            })?;
        }
        let csv_err = |source| DataError::Csv {
            path: path.to_path_buf(),
            source,
        };
        let mut writer = csv::Writer::from_path(path).map_err(csv_err)?;
        let synthesized = self.id_attribute.is_none();
        let mut header: Vec<&str> = Vec::new();
        if synthesized {
            header.push("_id");
        }
        header.extend(self.attributes.iter().map(|a| a.name.as_str()));
        writer.write_record(&header).map_err(csv_err)?;
        for record in &self.records {
            let mut row: Vec<String> = Vec::with_capacity(header.len());
            if synthesized {
                row.push(record.id.clone());
            }
            row.extend(
                record
                    .values
                    .iter()
                    .map(|v| v.as_ref().map(Value::render).unwrap_or_default()),
            );
            writer.write_record(&row).map_err(csv_err)?;
        }
        writer.flush().map_err(|source| DataError::Io {
            path: path.to_path_buf(),
            source,
        })
    }
}

fn is_null_cell(cell: &str) -> bool {
    let trimmed = cell.trim();
    trimmed.is_empty() || NULL_MARKERS.contains(&trimmed)
}

fn read_rows(path: &Path, delimiter: u8) -> Result<(Vec<String>, Vec<Vec<String>>), DataError> {
    if !path.exists() {
        return Err(DataError::Io {
            path: path.to_path_buf(),
            source: std::io::Error::new(std::io::ErrorKind::NotFound, "file not found"),
        });
    }
    let csv_err = |source| DataError::Csv {
        path: path.to_path_buf(),
        source,
    };
    let mut reader = csv::ReaderBuilder::new()
        .delimiter(delimiter)
        .has_headers(true)
        .flexible(false)
        .from_path(path)
        .map_err(csv_err)?;
    let header: Vec<String> = reader
        .headers()
        .map_err(csv_err)?
        .iter()
        .map(|h| h.trim().to_string())
        .collect();
    let mut seen = BTreeSet::new();
    for h in &header {
        if !seen.insert(h.as_str()) {
            return Err(DataError::DuplicateHeader(h.clone()));
        }
    }
    let mut rows = Vec::new();
    for row in reader.records() {
        let row = row.map_err(csv_err)?;
        rows.push(row.iter().map(str::to_string).collect());
    }
    Ok((header, rows))
}

fn dataset_name(path: &Path, options: &LoadOptions) -> String {
    options.name.clone().unwrap_or_else(|| {
        path.file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| "dataset".to_string())
    })
}

/// Loads a delimited text file with a header row. Every column becomes a
/// string attribute; empty cells and null markers become nulls.
pub fn load_dataset(path: &Path, id: &IdSpec, options: &LoadOptions) -> Result<Dataset, DataError> {
    let (header, rows) = read_rows(path, options.delimiter)?;
    let name = dataset_name(path, options);
    let id_col = match id {
        IdSpec::Column(c) => Some(
            header
                .iter()
                .position(|h| h == c)
                .ok_or_else(|| DataError::UnknownColumn(c.clone()))?,
        ),
        IdSpec::Synthesize => None,
    };
    let attributes: Vec<AttributeDescriptor> = header
        .iter()
        .map(|h| AttributeDescriptor::new(h.clone(), AttributeType::String))
        .collect();
    let mut records = Vec::with_capacity(rows.len());
    for (row_idx, row) in rows.into_iter().enumerate() {
        let record_id = match id_col {
            Some(c) => {
                let raw = row[c].trim();
                if raw.is_empty() {
                    return Err(DataError::EmptyId(row_idx));
                }
                raw.to_string()
            }
            None => format!("{name}-{row_idx}"),
        };
        let values = row
            .into_iter()
            .map(|cell| {
                if is_null_cell(&cell) {
                    None
                } else {
                    Some(Value::Str(cell))
                }
            })
            .collect();
        records.push(Record {
            id: record_id,
            source: name.clone(),
            values,
        });
    }
    let id_attribute = id_col.map(|c| header[c].clone());
    Dataset::new(name, attributes, id_attribute, records)
}

/// Loads a file written in target-schema layout, parsing each column into
/// its declared type. Columns absent from the file are all-null.
pub fn load_typed(path: &Path, name: &str, schema: &TargetSchema) -> Result<Dataset, DataError> {
    let (header, rows) = read_rows(path, b',')?;
    let positions: Vec<Option<usize>> = schema
        .attributes
        .iter()
        .map(|a| header.iter().position(|h| *h == a.name))
        .collect();
    let id_pos = header
        .iter()
        .position(|h| *h == schema.id_attribute)
        .ok_or_else(|| DataError::UnknownColumn(schema.id_attribute.clone()))?;
    let mut records = Vec::with_capacity(rows.len());
    for (row_idx, row) in rows.iter().enumerate() {
        let id = row[id_pos].trim();
        if id.is_empty() {
            return Err(DataError::EmptyId(row_idx));
        }
        let values = schema
            .attributes
            .iter()
            .zip(&positions)
            .map(|(attr, pos)| {
                let cell = pos.map(|p| row[p].as_str()).unwrap_or("");
                if is_null_cell(cell) {
                    None
                } else {
                    Some(parse_typed(cell, attr.declared_type))
                }
            })
            .collect();
        records.push(Record {
            id: id.to_string(),
            source: name.to_string(),
            values,
        });
    }
    Dataset::new(
        name,
        schema.attributes.clone(),
        Some(schema.id_attribute.clone()),
        records,
    )
}

/// Parses a rendered cell back into the value of a declared type. Cells that
/// do not parse stay strings.
pub fn parse_typed(cell: &str, declared: AttributeType) -> Value {
    match declared {
        AttributeType::Number | AttributeType::Integer | AttributeType::Duration => cell
            .trim()
            .parse::<f64>()
            .map(Value::Num)
            .unwrap_or_else(|_| Value::Str(cell.to_string())),
        AttributeType::Date => NaiveDate::parse_from_str(cell.trim(), "%Y-%m-%d")
            .map(Value::Date)
            .unwrap_or_else(|_| Value::Str(cell.to_string())),
        AttributeType::List => Value::List(
            cell.split(LIST_SEPARATOR)
                .map(str::trim)
                .filter(|s| !s.is_empty())
                .map(str::to_string)
                .collect(),
        ),
        _ => Value::Str(cell.to_string()),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SemanticType {
    Number,
    Date,
    Duration,
    Country,
    String,
    List,
    Categorical,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ColumnProfile {
    pub column: String,
    pub detected_type: SemanticType,
    pub unique_count: usize,
    pub null_fraction: f64,
    pub examples: Vec<String>,
}

const MAX_PROFILE_EXAMPLES: usize = 10;

fn sniff(value: &Value) -> SemanticType {
    match value {
        Value::Num(_) => SemanticType::Number,
        Value::Date(_) => SemanticType::Date,
        Value::List(_) => SemanticType::List,
        Value::Str(s) => {
            let s = s.trim();
            if values::parse_number(s, NumberLocale::Dot).is_some() {
                SemanticType::Number
            } else if values::parse_date(s, false).is_some() {
                SemanticType::Date
            } else if values::parse_duration(s).is_some() {
                SemanticType::Duration
            } else if values::country_code(s).is_some() {
                SemanticType::Country
            } else {
                SemanticType::String
            }
        }
    }
}

/// Detects the semantic type of a column by majority vote over per-value
/// sniffers. String columns with few distinct values are categorical.
pub fn profile_column(dataset: &Dataset, column: &str) -> Result<ColumnProfile, DataError> {
    let values = dataset
        .column_values(column)
        .ok_or_else(|| DataError::UnknownColumn(column.to_string()))?;
    let rows = dataset.len();
    let mut nulls = 0usize;
    let mut votes: BTreeMap<SemanticType, usize> = BTreeMap::new();
    let mut distinct: BTreeSet<String> = BTreeSet::new();
    let mut examples = Vec::new();
    for value in values {
        match value {
            None => nulls += 1,
            Some(v) => {
                *votes.entry(sniff(v)).or_default() += 1;
                let rendered = v.render();
                if distinct.insert(rendered.clone()) && examples.len() < MAX_PROFILE_EXAMPLES {
                    examples.push(rendered);
                }
            }
        }
    }
    // Ties resolve to the type listed first in `SemanticType`.
    let mut detected = votes
        .iter()
        .max_by(|a, b| a.1.cmp(b.1).then(b.0.cmp(a.0)))
        .map(|(t, _)| *t)
        .unwrap_or(SemanticType::String);
    let unique_count = distinct.len();
    let categorical_limit = 20usize.max(rows / 20);
    if detected == SemanticType::String && unique_count > 0 && unique_count <= categorical_limit {
        detected = SemanticType::Categorical;
    }
    Ok(ColumnProfile {
        column: column.to_string(),
        detected_type: detected,
        unique_count,
        null_fraction: if rows == 0 { 0.0 } else { nulls as f64 / rows as f64 },
        examples,
    })
}

pub fn profile_dataset(dataset: &Dataset) -> Vec<ColumnProfile> {
    dataset
        .attributes()
        .iter()
        .map(|a| profile_column(dataset, &a.name).expect("attribute of the dataset"))
        .collect()
}

/// Share of non-null cells over rows x attributes. Attributes missing from
/// the dataset count as all-null; an empty dataset has density 0.
pub fn density(dataset: &Dataset, attributes: &[String]) -> f64 {
    if dataset.is_empty() || attributes.is_empty() {
        return 0.0;
    }
    let filled: usize = attributes
        .iter()
        .filter_map(|a| dataset.column(a))
        .map(|col| dataset.records().iter().filter(|r| r.values[col].is_some()).count())
        .sum();
    filled as f64 / (dataset.len() * attributes.len()) as f64
}
