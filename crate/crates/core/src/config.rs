//! Run configuration, read from TOML. Every key has a default except the
//! sources and the target schema.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::clustering::FilterAlgorithm;
use crate::matching::learners::{default_committee, LearnerSpec};
use crate::metrics::DensityWeighting;
use crate::normalization::NormalizationHints;
use crate::oracle::remote::RemoteSettings;
use crate::oracle::PriceTable;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read config {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("invalid config {path}: {source}")]
    Parse {
        path: PathBuf,
        #[source]
        source: toml::de::Error,
    },
    #[error("{0}")]
    Invalid(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SourceConfig {
    pub name: String,
    pub path: PathBuf,
    /// Column holding record ids, or `synthesize`.
    #[serde(default = "default_id_column")]
    pub id_column: String,
    #[serde(default = "default_delimiter")]
    pub delimiter: char,
    #[serde(default)]
    pub snapshot_date: Option<NaiveDate>,
    #[serde(default)]
    pub hints: NormalizationHints,
}

fn default_id_column() -> String {
    "synthesize".into()
}

fn default_delimiter() -> char {
    ','
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OracleKind {
    #[default]
    Mock,
    Remote,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OracleConfig {
    pub kind: OracleKind,
    /// Lookup tables answering mock requests.
    pub mock_tables: Option<PathBuf>,
    pub remote: RemoteSettings,
    pub prices: PriceTable,
    /// Spending limit in currency units.
    pub budget: Option<f64>,
    /// Keep replies in the output directory and reuse them on reruns.
    pub cache: bool,
    pub retries: u32,
    pub backoff_ms: u64,
    pub max_in_flight: usize,
    /// Dimension of the offline embedder used with the mock oracle.
    pub mock_embedding_dim: usize,
}

impl Default for OracleConfig {
    fn default() -> Self {
        Self {
            kind: OracleKind::Mock,
            mock_tables: None,
            remote: RemoteSettings::default(),
            prices: PriceTable::default(),
            budget: None,
            cache: true,
            retries: 2,
            backoff_ms: 500,
            max_in_flight: 4,
            mock_embedding_dim: 256,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SchemaMethod {
    #[default]
    Oracle,
    Label,
    Instance,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SchemaMatchingConfig {
    pub method: SchemaMethod,
    pub label_threshold: f64,
    pub instance_threshold: f64,
    /// Reference source for instance matching, already in target layout.
    pub reference: Option<PathBuf>,
    /// Hand-written correspondences used instead of matching.
    pub correspondences: Option<PathBuf>,
    /// Gold correspondences for evaluation.
    pub gold: Option<PathBuf>,
}

impl Default for SchemaMatchingConfig {
    fn default() -> Self {
        Self {
            method: SchemaMethod::Oracle,
            label_threshold: 0.8,
            instance_threshold: 0.3,
            reference: None,
            correspondences: None,
            gold: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BlockingConfig {
    pub k: usize,
    pub embed_batch: usize,
}

impl Default for BlockingConfig {
    fn default() -> Self {
        Self {
            k: 20,
            embed_batch: 512,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MatchingSettings {
    pub seed_target: usize,
    pub per_query_bottom: usize,
    pub batch: usize,
    pub target: usize,
    pub augment_fraction: f64,
    pub validation_size: usize,
    pub threshold_step: f64,
    pub search_budget: usize,
    pub label_budget: Option<usize>,
    /// Committee members; defaults to five members over three families.
    pub committee: Option<Vec<LearnerSpec>>,
    /// Directory of gold test pair files named `<a>__<b>.csv`.
    pub gold_dir: Option<PathBuf>,
}

impl Default for MatchingSettings {
    fn default() -> Self {
        Self {
            seed_target: 100,
            per_query_bottom: 2,
            batch: 100,
            target: 600,
            augment_fraction: 0.2,
            validation_size: 200,
            threshold_step: 0.05,
            search_budget: 4,
            label_budget: None,
            committee: None,
            gold_dir: None,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ClusteringConfig {
    pub algorithm: FilterAlgorithm,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FusionConfig {
    pub sample_groups: usize,
    pub rag: bool,
    pub oracle_strategy: bool,
    /// Human-written validation set used instead of oracle generation.
    pub validation_file: Option<PathBuf>,
    /// Held-out test set for accuracy reporting.
    pub test_file: Option<PathBuf>,
    /// Fixed resolver per attribute, skipping the strategy search.
    pub strategy_file: Option<PathBuf>,
}

impl Default for FusionConfig {
    fn default() -> Self {
        Self {
            sample_groups: 100,
            rag: false,
            oracle_strategy: true,
            validation_file: None,
            test_file: None,
            strategy_file: None,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ReportConfig {
    pub weighting: DensityWeighting,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default = "default_out")]
    pub out: PathBuf,
    pub target_schema: PathBuf,
    pub sources: Vec<SourceConfig>,
    #[serde(default)]
    pub oracle: OracleConfig,
    #[serde(default)]
    pub schema_matching: SchemaMatchingConfig,
    #[serde(default)]
    pub blocking: BlockingConfig,
    #[serde(default)]
    pub matching: MatchingSettings,
    #[serde(default)]
    pub clustering: ClusteringConfig,
    #[serde(default)]
    pub fusion: FusionConfig,
    #[serde(default)]
    pub report: ReportConfig,
}

fn default_seed() -> u64 {
    42
}

fn default_out() -> PathBuf {
    PathBuf::from("out")
}

fn resolve(base: &Path, p: &mut PathBuf) {
    if p.is_relative() {
        *p = base.join(&*p);
    }
}

fn resolve_opt(base: &Path, p: &mut Option<PathBuf>) {
    if let Some(p) = p {
        resolve(base, p);
    }
}

impl RunConfig {
    pub fn from_toml(text: &str, path: &Path) -> Result<Self, ConfigError> {
        toml::from_str(text).map_err(|source| ConfigError::Parse {
            path: path.to_path_buf(),
            source,
        })
    }

    /// Reads a config file; relative paths are taken from the file's directory.
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        let mut cfg = Self::from_toml(&text, path)?;
        let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
        cfg.resolve_paths(&base);
        Ok(cfg)
    }

    pub fn resolve_paths(&mut self, base: &Path) {
        resolve(base, &mut self.out);
        resolve(base, &mut self.target_schema);
        for s in &mut self.sources {
            resolve(base, &mut s.path);
        }
        resolve_opt(base, &mut self.oracle.mock_tables);
        resolve_opt(base, &mut self.schema_matching.reference);
        resolve_opt(base, &mut self.schema_matching.correspondences);
        resolve_opt(base, &mut self.schema_matching.gold);
        resolve_opt(base, &mut self.matching.gold_dir);
        resolve_opt(base, &mut self.fusion.validation_file);
        resolve_opt(base, &mut self.fusion.test_file);
        resolve_opt(base, &mut self.fusion.strategy_file);
    }

    /// Checks values and that every referenced input file exists.
    pub fn validate(&self) -> Result<(), ConfigError> {
        let bad = |m: String| Err(ConfigError::Invalid(m));
        if self.sources.is_empty() {
            return bad("at least one source is required".into());
        }
        let mut names = std::collections::BTreeSet::new();
        for s in &self.sources {
            if s.name.is_empty() || s.name.contains([':', '/', '\\']) || s.name.contains("__") {
                return bad(format!(
                    "source name `{}` must be non-empty without `:`, `/` or `__`",
                    s.name
                ));
            }
            if !names.insert(&s.name) {
                return bad(format!("duplicate source name `{}`", s.name));
            }
            if !s.delimiter.is_ascii() {
                return bad(format!("delimiter of `{}` must be ASCII", s.name));
            }
        }
        let m = &self.matching;
        if !(0.0..1.0).contains(&m.threshold_step) || m.threshold_step <= 0.0 {
            return bad("matching.threshold_step must be in (0, 1)".into());
        }
        if m.batch == 0 || self.blocking.k == 0 || self.blocking.embed_batch == 0 {
            return bad("matching.batch, blocking.k and blocking.embed_batch must be positive".into());
        }
        if !(0.0..=1.0).contains(&m.augment_fraction) {
            return bad("matching.augment_fraction must be in [0, 1]".into());
        }
        if let Some(c) = &m.committee {
            let families: std::collections::BTreeSet<_> = c.iter().map(|s| s.family).collect();
            if c.len() < 3 || families.len() < 2 {
                return bad("the committee needs at least 3 members from at least 2 families".into());
            }
        }
        if matches!(self.oracle.budget, Some(b) if b < 0.0 || !b.is_finite()) {
            return bad("oracle.budget must be a non-negative amount".into());
        }
        if self.oracle.kind == OracleKind::Mock && self.oracle.mock_tables.is_none() {
            log::warn!("mock oracle without tables answers every request with empty results");
        }
        let mut required: Vec<&Path> = vec![&self.target_schema];
        required.extend(self.sources.iter().map(|s| s.path.as_path()));
        for p in [
            &self.oracle.mock_tables,
            &self.schema_matching.reference,
            &self.schema_matching.correspondences,
            &self.schema_matching.gold,
            &self.matching.gold_dir,
            &self.fusion.validation_file,
            &self.fusion.test_file,
            &self.fusion.strategy_file,
        ]
        .into_iter()
        .flatten()
        {
            required.push(p);
        }
        for p in required {
            if !p.exists() {
                return bad(format!("{} does not exist", p.display()));
            }
        }
        Ok(())
    }

    pub fn committee(&self) -> Vec<LearnerSpec> {
        self.matching
            .committee
            .clone()
            .unwrap_or_else(|| default_committee(self.seed))
    }

    pub fn budget_micro(&self) -> Option<u64> {
        self.oracle
            .budget
            .map(|b| (b * crate::oracle::ledger::MICROS_PER_UNIT as f64).round() as u64)
    }

    pub fn snapshot_dates(&self) -> BTreeMap<String, NaiveDate> {
        self.sources
            .iter()
            .filter_map(|s| s.snapshot_date.map(|d| (s.name.clone(), d)))
            .collect()
    }

    pub fn source(&self, name: &str) -> Option<&SourceConfig> {
        self.sources.iter().find(|s| s.name == name)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_fill_everything_but_sources() {
        let cfg = RunConfig::from_toml(
            r#"
target_schema = "t.json"
[[sources]]
name = "a"
path = "a.csv"
"#,
            Path::new("x.toml"),
        )
        .unwrap();
        assert_eq!(cfg.blocking.k, 20);
        assert_eq!(cfg.matching.batch, 100);
        assert_eq!(cfg.matching.target, 600);
        assert_eq!(cfg.matching.augment_fraction, 0.2);
        assert_eq!(cfg.fusion.sample_groups, 100);
        assert_eq!(cfg.matching.threshold_step, 0.05);
        assert_eq!(cfg.committee().len(), 5);
        assert_eq!(cfg.sources[0].id_column, "synthesize");
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let err = RunConfig::from_toml("target_schema = 't'\nsources = []\nbogus = 1\n", Path::new("x.toml"));
        assert!(err.is_err());
    }

    #[test]
    fn validation_reports_missing_files() {
        let mut cfg = RunConfig::from_toml(
            "target_schema = 'missing.json'\n[[sources]]\nname = 'a'\npath = 'a.csv'\n",
            Path::new("x.toml"),
        )
        .unwrap();
        cfg.resolve_paths(Path::new("/nonexistent"));
        assert!(matches!(cfg.validate(), Err(ConfigError::Invalid(m)) if m.contains("does not exist")));
    }
}
