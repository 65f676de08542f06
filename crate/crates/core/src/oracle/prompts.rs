//! Request builders and reply formats for every oracle task.
//!
//! Each request carries its content twice: as prose for a language model in
//! `user_text`, and as a structured `payload` that the mock oracle reads.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{OracleRequest, ResponseContract, TaskTag};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ColumnSummary {
    pub name: String,
    pub unique_count: usize,
    /// Most frequent distinct values, most frequent first.
    pub examples: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SchemaMatchPayload {
    pub dataset: String,
    pub columns: Vec<ColumnSummary>,
    pub target_attributes: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SchemaMatchItem {
    pub source_column: String,
    pub target_attribute: Option<String>,
}

pub fn schema_match(
    payload: &SchemaMatchPayload,
    sample_grid: &str,
    target_schema: &serde_json::Value,
) -> OracleRequest {
    let mut user = format!("Source dataset: {}\n\nColumns:\n", payload.dataset);
    for c in &payload.columns {
        user.push_str(&format!(
            "- {} ({} unique values; examples: {})\n",
            c.name,
            c.unique_count,
            c.examples.join(" | ")
        ));
    }
    user.push_str("\nSample rows (most complete first):\n");
    user.push_str(sample_grid);
    user.push_str("\n\nTarget schema (JSON Schema):\n");
    user.push_str(&serde_json::to_string_pretty(target_schema).unwrap_or_default());
    user.push_str(
        "\n\nFor every source column, name the target attribute it corresponds to, or null \
         when none fits. Column headers may be non-descriptive; infer attribute semantics \
         from the data values. Use each target attribute at most once.",
    );
    OracleRequest {
        task_tag: TaskTag::SchemaMatch,
        system_text: "You match columns of a source table to the attributes of a target schema.".into(),
        user_text: user,
        response_contract: ResponseContract::array(
            "a JSON array of objects {\"source_column\": string, \"target_attribute\": string or null}",
            &["source_column", "target_attribute"],
        ),
        payload: serde_json::to_value(payload).expect("payload serializes"),
        grounded: false,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TaxonomyPayload {
    pub dataset: String,
    pub column: String,
    pub attribute: String,
    pub values: Vec<String>,
    pub value_set: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TaxonomyItem {
    pub value: String,
    pub target: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TaxonomyReply {
    pub mappings: Vec<TaxonomyItem>,
}

pub fn taxonomy_map(payload: &TaxonomyPayload) -> OracleRequest {
    let user = format!(
        "Attribute: {}\n\nAllowed target values:\n{}\n\nSource values:\n{}\n\n\
         Map each source value to the allowed target value it denotes, using a super-concept \
         where no exact entry exists. Use null when no allowed value is suitable; the original \
         value is then retained.",
        payload.attribute,
        payload.value_set.join("\n"),
        payload.values.join("\n"),
    );
    OracleRequest {
        task_tag: TaskTag::TaxonomyMap,
        system_text: "You map free-form categorical values onto a closed target taxonomy.".into(),
        user_text: user,
        response_contract: ResponseContract::object(
            "a JSON object {\"mappings\": [{\"value\": string, \"target\": string or null}]}",
            &["mappings"],
        ),
        payload: serde_json::to_value(payload).expect("payload serializes"),
        grounded: false,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecordView {
    pub dataset: String,
    pub id: String,
    pub values: BTreeMap<String, String>,
}

impl RecordView {
    pub fn key(&self) -> String {
        format!("{}:{}", self.dataset, self.id)
    }

    fn render(&self) -> String {
        let mut s = String::new();
        for (k, v) in &self.values {
            s.push_str(&format!("  {k}: {v}\n"));
        }
        s
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairLabelPayload {
    pub record_a: RecordView,
    pub record_b: RecordView,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairLabelReply {
    pub label: String,
}

pub fn pair_label(payload: &PairLabelPayload) -> OracleRequest {
    let user = format!(
        "Record A ({}):\n{}\nRecord B ({}):\n{}\nDo both records describe the same real-world entity? \
         Answer \"match\" or \"non-match\".",
        payload.record_a.dataset,
        payload.record_a.render(),
        payload.record_b.dataset,
        payload.record_b.render(),
    );
    OracleRequest {
        task_tag: TaskTag::PairLabel,
        system_text: "You decide whether two records refer to the same entity.".into(),
        user_text: user,
        response_contract: ResponseContract::object("a JSON object {\"label\": \"match\" | \"non-match\"}", &["label"]),
        payload: serde_json::to_value(payload).expect("payload serializes"),
        grounded: false,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupView {
    pub group_id: String,
    pub records: Vec<RecordView>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FusionSelectPayload {
    pub groups: Vec<GroupView>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FusionSelectReply {
    pub selected: Vec<String>,
}

pub fn fusion_select(payload: &FusionSelectPayload) -> OracleRequest {
    let mut user = String::from("Entity groups:\n");
    for g in &payload.groups {
        user.push_str(&format!("Group {}:\n", g.group_id));
        for r in &g.records {
            user.push_str(&format!(" Record {}:\n{}", r.key(), r.render()));
        }
    }
    user.push_str(
        "\nSelect the groups describing entities well known enough that you can state their true attribute values.",
    );
    OracleRequest {
        task_tag: TaskTag::FusionSelectEntities,
        system_text: "You pick entities whose facts you know reliably.".into(),
        user_text: user,
        response_contract: ResponseContract::object("a JSON object {\"selected\": [group id strings]}", &["selected"]),
        payload: serde_json::to_value(payload).expect("payload serializes"),
        grounded: false,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FusionGroundtruthPayload {
    pub group_id: String,
    pub records: Vec<RecordView>,
    pub attributes: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FusionGroundtruthReply {
    pub values: BTreeMap<String, Option<serde_json::Value>>,
}

pub fn fusion_groundtruth(payload: &FusionGroundtruthPayload, grounded: bool) -> OracleRequest {
    let mut user = format!("Entity group {}:\n", payload.group_id);
    for r in &payload.records {
        user.push_str(&format!(" Record {}:\n{}", r.key(), r.render()));
    }
    user.push_str(&format!(
        "\nThe records disagree on: {}.\nGive the value you believe is correct for each of these attributes (null if unknown).",
        payload.attributes.join(", ")
    ));
    OracleRequest {
        task_tag: TaskTag::FusionGroundtruth,
        system_text: "You state the correct attribute values of a real-world entity.".into(),
        user_text: user,
        response_contract: ResponseContract::object(
            "a JSON object {\"values\": {attribute: value or null}}",
            &["values"],
        ),
        payload: serde_json::to_value(payload).expect("payload serializes"),
        grounded,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AttributeInfo {
    pub name: String,
    #[serde(rename = "type")]
    pub type_name: String,
    pub description: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FusionStrategyPayload {
    pub attributes: Vec<AttributeInfo>,
    pub resolvers: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FusionStrategyReply {
    pub assignments: BTreeMap<String, String>,
}

pub fn fusion_strategy(payload: &FusionStrategyPayload) -> OracleRequest {
    let mut user = String::from("Attributes to fuse:\n");
    for a in &payload.attributes {
        user.push_str(&format!(
            "- {} ({}){}\n",
            a.name,
            a.type_name,
            a.description.as_deref().map(|d| format!(": {d}")).unwrap_or_default()
        ));
    }
    user.push_str(&format!(
        "\nAvailable conflict resolution functions: {}.\nAssign one function to each attribute.",
        payload.resolvers.join(", ")
    ));
    OracleRequest {
        task_tag: TaskTag::FusionStrategy,
        system_text: "You choose conflict resolution functions for data fusion.".into(),
        user_text: user,
        response_contract: ResponseContract::object(
            "a JSON object {\"assignments\": {attribute: function name}}",
            &["assignments"],
        ),
        payload: serde_json::to_value(payload).expect("payload serializes"),
        grounded: false,
    }
}
