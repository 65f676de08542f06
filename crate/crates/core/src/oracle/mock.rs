//! Deterministic offline oracle answering from lookup tables.

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::prompts::{
    FusionGroundtruthPayload, FusionGroundtruthReply, FusionSelectPayload, FusionSelectReply, FusionStrategyPayload,
    FusionStrategyReply, PairLabelPayload, PairLabelReply, RecordView, SchemaMatchItem, SchemaMatchPayload,
    TaxonomyItem, TaxonomyPayload, TaxonomyReply,
};
use super::{estimate_units, Completion, OracleRequest, TaskTag, Transport, TransportError};
use crate::similarity::jaro_winkler;

/// Name similarity at or above which unknown record pairs are labeled a match.
pub const NAME_MATCH_THRESHOLD: f64 = 0.95;

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct MockTables {
    /// Lowercase `column` or `dataset.column` → target attribute.
    pub schema_synonyms: BTreeMap<String, String>,
    /// Target attribute → raw value → value-set member.
    pub taxonomy: BTreeMap<String, BTreeMap<String, String>>,
    /// `dataset:id` → entity id.
    pub entities: BTreeMap<String, String>,
    /// Entity id → attribute → true value.
    pub entity_values: BTreeMap<String, BTreeMap<String, serde_json::Value>>,
    /// Entities the oracle claims to know; `None` means every entity with
    /// recorded values.
    pub well_known: Option<BTreeSet<String>>,
    /// Target attribute → resolver name.
    pub fusion_strategy: BTreeMap<String, String>,
    /// Attribute compared when neither record is in `entities`.
    pub name_attribute: Option<String>,
}

impl MockTables {
    pub fn load(path: &Path) -> std::io::Result<Self> {
        let text = std::fs::read_to_string(path)?;
        serde_json::from_str(&text).map_err(|e| std::io::Error::new(std::io::ErrorKind::InvalidData, e))
    }

    fn name_attribute(&self) -> &str {
        self.name_attribute.as_deref().unwrap_or("name")
    }

    fn entity_of(&self, r: &RecordView) -> Option<&String> {
        self.entities.get(&r.key())
    }

    /// Majority entity of a group, ties to the smallest id.
    fn group_entity(&self, records: &[RecordView]) -> Option<String> {
        let mut counts: BTreeMap<&String, usize> = BTreeMap::new();
        for r in records {
            if let Some(e) = self.entity_of(r) {
                *counts.entry(e).or_default() += 1;
            }
        }
        let best = counts.values().copied().max()?;
        counts.into_iter().find(|(_, c)| *c == best).map(|(e, _)| e.clone())
    }

    fn is_well_known(&self, entity: &str) -> bool {
        match &self.well_known {
            Some(set) => set.contains(entity),
            None => self.entity_values.contains_key(entity),
        }
    }
}

/// Lowercase, alphanumeric-only, single-spaced.
pub fn normalize_name(s: &str) -> String {
    let cleaned: String = s
        .to_lowercase()
        .chars()
        .map(|c| if c.is_alphanumeric() { c } else { ' ' })
        .collect();
    cleaned.split_whitespace().collect::<Vec<_>>().join(" ")
}

#[derive(Debug, Clone, Default)]
pub struct MockTransport {
    tables: MockTables,
}

impl MockTransport {
    pub fn new(tables: MockTables) -> Self {
        Self { tables }
    }

    pub fn tables(&self) -> &MockTables {
        &self.tables
    }

    fn schema_match(&self, p: SchemaMatchPayload) -> serde_json::Value {
        let targets: BTreeMap<String, &String> = p.target_attributes.iter().map(|t| (t.to_lowercase(), t)).collect();
        let mut used = BTreeSet::new();
        let items: Vec<SchemaMatchItem> = p
            .columns
            .iter()
            .map(|c| {
                let col = c.name.to_lowercase();
                let qualified = format!("{}.{}", p.dataset.to_lowercase(), col);
                let target = self
                    .tables
                    .schema_synonyms
                    .get(&qualified)
                    .or_else(|| self.tables.schema_synonyms.get(&col))
                    .map(|t| t.to_lowercase())
                    .or_else(|| targets.contains_key(&col).then(|| col.clone()))
                    .and_then(|t| targets.get(&t).map(|s| s.to_string()))
                    .filter(|t| used.insert(t.clone()));
                SchemaMatchItem {
                    source_column: c.name.clone(),
                    target_attribute: target,
                }
            })
            .collect();
        serde_json::to_value(items).expect("reply serializes")
    }

    fn taxonomy(&self, p: TaxonomyPayload) -> serde_json::Value {
        let table = self.tables.taxonomy.get(&p.attribute);
        let mappings = p
            .values
            .iter()
            .map(|v| {
                let target = table.and_then(|t| {
                    t.get(v)
                        .or_else(|| t.iter().find(|(k, _)| k.eq_ignore_ascii_case(v)).map(|(_, t)| t))
                        .cloned()
                });
                TaxonomyItem {
                    value: v.clone(),
                    target,
                }
            })
            .collect();
        serde_json::to_value(TaxonomyReply { mappings }).expect("reply serializes")
    }

    fn pair_label(&self, p: PairLabelPayload) -> serde_json::Value {
        let is_match = match (self.tables.entity_of(&p.record_a), self.tables.entity_of(&p.record_b)) {
            (Some(a), Some(b)) => a == b,
            _ => {
                let attr = self.tables.name_attribute();
                match (p.record_a.values.get(attr), p.record_b.values.get(attr)) {
                    (Some(a), Some(b)) => jaro_winkler(&normalize_name(a), &normalize_name(b)) >= NAME_MATCH_THRESHOLD,
                    _ => false,
                }
            }
        };
        let label = if is_match { "match" } else { "non-match" };
        serde_json::to_value(PairLabelReply { label: label.into() }).expect("reply serializes")
    }

    fn fusion_select(&self, p: FusionSelectPayload) -> serde_json::Value {
        let selected = p
            .groups
            .iter()
            .filter(|g| {
                self.tables
                    .group_entity(&g.records)
                    .is_some_and(|e| self.tables.is_well_known(&e))
            })
            .map(|g| g.group_id.clone())
            .collect();
        serde_json::to_value(FusionSelectReply { selected }).expect("reply serializes")
    }

    fn fusion_groundtruth(&self, p: FusionGroundtruthPayload) -> serde_json::Value {
        let truth = self
            .tables
            .group_entity(&p.records)
            .and_then(|e| self.tables.entity_values.get(&e));
        let values = p
            .attributes
            .iter()
            .map(|a| {
                let v = truth.and_then(|t| t.get(a)).filter(|v| !v.is_null()).cloned();
                (a.clone(), v)
            })
            .collect();
        serde_json::to_value(FusionGroundtruthReply { values }).expect("reply serializes")
    }

    fn fusion_strategy(&self, p: FusionStrategyPayload) -> serde_json::Value {
        let assignments = p
            .attributes
            .iter()
            .filter_map(|a| {
                self.tables
                    .fusion_strategy
                    .get(&a.name)
                    .filter(|r| p.resolvers.contains(r))
                    .map(|r| (a.name.clone(), r.clone()))
            })
            .collect();
        serde_json::to_value(FusionStrategyReply { assignments }).expect("reply serializes")
    }

    pub fn answer(&self, request: &OracleRequest) -> Result<serde_json::Value, TransportError> {
        fn parse<T: serde::de::DeserializeOwned>(v: &serde_json::Value) -> Result<T, TransportError> {
            serde_json::from_value(v.clone()).map_err(|e| TransportError::fatal(format!("mock payload: {e}")))
        }
        let p = &request.payload;
        Ok(match request.task_tag {
            TaskTag::SchemaMatch => self.schema_match(parse(p)?),
            TaskTag::TaxonomyMap => self.taxonomy(parse(p)?),
            TaskTag::PairLabel => self.pair_label(parse(p)?),
            TaskTag::FusionSelectEntities => self.fusion_select(parse(p)?),
            TaskTag::FusionGroundtruth => self.fusion_groundtruth(parse(p)?),
            TaskTag::FusionStrategy => self.fusion_strategy(parse(p)?),
        })
    }
}

impl Transport for MockTransport {
    fn complete(&self, request: &OracleRequest) -> Result<Completion, TransportError> {
        let reply = self.answer(request)?;
        let text = serde_json::to_string(&reply).expect("reply serializes");
        Ok(Completion {
            input_units: estimate_units(&request.system_text) + estimate_units(&request.user_text),
            output_units: estimate_units(&text),
            text,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::prompts;

    fn record(ds: &str, id: &str, name: &str) -> RecordView {
        RecordView {
            dataset: ds.into(),
            id: id.into(),
            values: [("name".to_string(), name.to_string())].into(),
        }
    }

    fn label(t: &MockTransport, a: RecordView, b: RecordView) -> String {
        let req = prompts::pair_label(&PairLabelPayload {
            record_a: a,
            record_b: b,
        });
        t.answer(&req).unwrap()["label"].as_str().unwrap().to_string()
    }

    #[test]
    fn equal_names_match() {
        let t = MockTransport::default();
        assert_eq!(
            label(&t, record("a", "1", "Halo 3"), record("b", "9", "HALO 3!")),
            "match"
        );
        assert_eq!(
            label(&t, record("a", "1", "Halo 3"), record("b", "9", "Fable")),
            "non-match"
        );
    }

    #[test]
    fn truth_table_overrides_names() {
        let mut tables = MockTables::default();
        tables.entities.insert("a:1".into(), "e1".into());
        tables.entities.insert("b:9".into(), "e2".into());
        let t = MockTransport::new(tables);
        assert_eq!(
            label(&t, record("a", "1", "Halo 3"), record("b", "9", "Halo 3")),
            "non-match"
        );
    }

    #[test]
    fn schema_match_uses_synonyms_then_exact_names() {
        let mut tables = MockTables::default();
        tables.schema_synonyms.insert("meta.attribute_1".into(), "name".into());
        let t = MockTransport::new(tables);
        let payload = SchemaMatchPayload {
            dataset: "meta".into(),
            columns: ["Attribute_1", "developer", "junk"]
                .iter()
                .map(|n| prompts::ColumnSummary {
                    name: n.to_string(),
                    unique_count: 1,
                    examples: vec![],
                })
                .collect(),
            target_attributes: vec!["name".into(), "developer".into()],
        };
        let reply = t
            .answer(&prompts::schema_match(&payload, "", &serde_json::json!({})))
            .unwrap();
        let items: Vec<SchemaMatchItem> = serde_json::from_value(reply).unwrap();
        assert_eq!(items[0].target_attribute.as_deref(), Some("name"));
        assert_eq!(items[1].target_attribute.as_deref(), Some("developer"));
        assert_eq!(items[2].target_attribute, None);
    }

    #[test]
    fn unknown_taxonomy_value_is_retained() {
        let mut tables = MockTables::default();
        tables.taxonomy.insert(
            "platform".into(),
            [("PS4".to_string(), "PlayStation 4".to_string())].into(),
        );
        let t = MockTransport::new(tables);
        let req = prompts::taxonomy_map(&TaxonomyPayload {
            dataset: "d".into(),
            column: "c".into(),
            attribute: "platform".into(),
            values: vec!["PS4".into(), "???".into()],
            value_set: vec!["PlayStation 4".into()],
        });
        let reply: TaxonomyReply = serde_json::from_value(t.answer(&req).unwrap()).unwrap();
        assert_eq!(reply.mappings[0].target.as_deref(), Some("PlayStation 4"));
        assert_eq!(reply.mappings[1].target, None);
    }

    #[test]
    fn replies_are_stable_text() {
        let t = MockTransport::default();
        let req = prompts::pair_label(&PairLabelPayload {
            record_a: record("a", "1", "x"),
            record_b: record("b", "2", "y"),
        });
        assert_eq!(t.complete(&req).unwrap(), t.complete(&req).unwrap());
    }
}
