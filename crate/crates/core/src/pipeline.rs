//! Stepwise orchestration. Every step reads its inputs from the output
//! directory and writes its artifacts there, so `all` and a sequence of
//! single steps produce the same files.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::blocking::{embed_records, generate_candidates, pool_file_name, write_pool};
use crate::clustering::{
    build_clusters, filter_all, read_clusters, write_clusters, ClusterError, Correspondence, RecordRef,
};
use crate::config::{ConfigError, OracleKind, RunConfig, SchemaMethod};
use crate::datamodel::{
    load_dataset, load_typed, profile_dataset, ColumnProfile, DataError, Dataset, IdSpec, LoadOptions, TargetSchema,
};
use crate::fusion::{
    fuse, generate_validation_set, read_validation_set, search_strategy, write_provenance, write_validation_set,
    Accuracy, FusionContext, FusionError, FusionInputs, FusionStrategy, PreparedValidation, StrategySearch,
    ValidationOrigin, ValidationSettings, FUSED_DATASET,
};
use crate::matching::active::{ActiveLearningConfig, OracleLabeler};
use crate::matching::{
    evaluate_matching, match_pair, pair_file_name, read_pairs, save_model, write_pairs, MatchingConfig, MatchingError,
    MatchingEvaluation,
};
use crate::metrics::{compute_report, render_report, ReportFormat, Timings};
use crate::normalization::{
    apply_normalization, assign_normalizers, map_taxonomy, project_to_target, NormalizationReport, NormalizerKind,
    TaxonomyMapping,
};
use crate::oracle::mock::{MockTables, MockTransport};
use crate::oracle::remote::{RemoteEmbedder, RemoteTransport};
use crate::oracle::{HashedNgramEmbedder, Oracle, OracleError, OracleSettings};
use crate::schema_matching::{
    evaluate_correspondences, load_correspondences, match_instances, match_labels, match_with_oracle,
    save_correspondences, select_label_metric, SchemaCorrespondence,
};
use crate::similarity::StringMetric;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Step {
    Profile,
    MatchSchema,
    Normalize,
    MatchEntities,
    Cluster,
    Fuse,
    Report,
    All,
}

impl Step {
    pub const ORDER: [Step; 7] = [
        Step::Profile,
        Step::MatchSchema,
        Step::Normalize,
        Step::MatchEntities,
        Step::Cluster,
        Step::Fuse,
        Step::Report,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Step::Profile => "profile",
            Step::MatchSchema => "match-schema",
            Step::Normalize => "normalize",
            Step::MatchEntities => "match-entities",
            Step::Cluster => "cluster",
            Step::Fuse => "fuse",
            Step::Report => "report",
            Step::All => "all",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ORDER.into_iter().chain([Step::All]).find(|x| x.name() == s)
    }
}

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("`{step}` needs {}, which does not exist; run the earlier steps first", path.display())]
    Missing { step: &'static str, path: PathBuf },
    #[error(transparent)]
    Data(#[from] DataError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error(transparent)]
    Matching(#[from] MatchingError),
    #[error(transparent)]
    Cluster(#[from] ClusterError),
    #[error(transparent)]
    Fusion(#[from] FusionError),
}

impl PipelineError {
    pub fn is_budget(&self) -> bool {
        let budget = |e: &OracleError| matches!(e, OracleError::BudgetExhausted { .. });
        match self {
            PipelineError::Oracle(e) | PipelineError::Matching(MatchingError::Oracle(e)) => budget(e),
            PipelineError::Fusion(FusionError::Oracle(e)) => budget(e),
            _ => false,
        }
    }

    /// 1 validation or other failure, 2 missing prerequisite, 3 budget.
    pub fn exit_code(&self) -> i32 {
        match self {
            PipelineError::Missing { .. } => 2,
            e if e.is_budget() => 3,
            _ => 1,
        }
    }
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> DataError + '_ {
    move |source| DataError::Io {
        path: path.to_path_buf(),
        source,
    }
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), DataError> {
    let text = serde_json::to_string_pretty(value).expect("artifact serializes");
    fs::write(path, text + "\n").map_err(io_err(path))
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, DataError> {
    let text = fs::read_to_string(path).map_err(io_err(path))?;
    serde_json::from_str(&text).map_err(|source| DataError::Json {
        path: path.to_path_buf(),
        source,
    })
}

#[derive(Serialize, Deserialize)]
struct MatchRow {
    a: String,
    b: String,
    score: f64,
}

fn write_matches(path: &Path, cs: &[Correspondence]) -> Result<(), DataError> {
    let err = |source| DataError::Csv {
        path: path.to_path_buf(),
        source,
    };
    let mut w = csv::Writer::from_path(path).map_err(err)?;
    for c in cs {
        w.serialize(MatchRow {
            a: c.a.to_string(),
            b: c.b.to_string(),
            score: c.score,
        })
        .map_err(err)?;
    }
    w.flush().map_err(io_err(path))
}

fn read_matches(path: &Path) -> Result<Vec<Correspondence>, DataError> {
    let err = |source| DataError::Csv {
        path: path.to_path_buf(),
        source,
    };
    let mut r = csv::Reader::from_path(path).map_err(err)?;
    let mut out = Vec::new();
    for row in r.deserialize::<MatchRow>() {
        let row = row.map_err(err)?;
        let parse = |t: &str| {
            RecordRef::parse(t)
                .ok_or_else(|| DataError::Schema(format!("bad record token `{t}` in {}", path.display())))
        };
        out.push(Correspondence {
            a: parse(&row.a)?,
            b: parse(&row.b)?,
            score: row.score,
        });
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairSummary {
    pub pool_size: usize,
    pub labels_used: usize,
    pub core_labels: usize,
    pub augmented_labels: usize,
    pub validation_labels: usize,
    pub rounds: usize,
    pub exhausted: bool,
    pub member: String,
    pub training_variant: String,
    pub threshold: f64,
    pub validation_f1: f64,
    pub predicted_matches: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FusionEvaluation {
    pub validation_entries: usize,
    pub selected_validation_accuracy: Option<f64>,
    pub test: Option<Accuracy>,
}

/// Runs steps of one configuration against its output directory.
pub struct Pipeline {
    cfg: RunConfig,
    target: TargetSchema,
}

impl Pipeline {
    pub fn new(cfg: RunConfig) -> Result<Self, PipelineError> {
        cfg.validate()?;
        if cfg.oracle.kind == OracleKind::Remote {
            let var = &cfg.oracle.remote.api_key_env;
            if std::env::var(var).map_or(true, |v| v.is_empty()) {
                return Err(ConfigError::Invalid(format!("the remote oracle needs an API key in ${var}")).into());
            }
        }
        let target = TargetSchema::load(&cfg.target_schema)?;
        fs::create_dir_all(&cfg.out).map_err(io_err(&cfg.out))?;
        Ok(Self { cfg, target })
    }

    pub fn config(&self) -> &RunConfig {
        &self.cfg
    }

    pub fn target(&self) -> &TargetSchema {
        &self.target
    }

    pub fn out(&self, rel: &str) -> PathBuf {
        self.cfg.out.join(rel)
    }

    fn require(&self, step: Step, rel: &str) -> Result<PathBuf, PipelineError> {
        let path = self.out(rel);
        if path.exists() {
            Ok(path)
        } else {
            Err(PipelineError::Missing {
                step: step.name(),
                path,
            })
        }
    }

    fn ensure_dir(&self, rel: &str) -> Result<PathBuf, PipelineError> {
        let p = self.out(rel);
        fs::create_dir_all(&p).map_err(io_err(&p))?;
        Ok(p)
    }

    /// Oracle backed by the cache and ledger files of the output directory.
    pub fn oracle(&self) -> Result<Oracle, PipelineError> {
        let o = &self.cfg.oracle;
        let settings = OracleSettings {
            prices: o.prices.clone(),
            budget_micro: self.cfg.budget_micro(),
            retries: o.retries,
            backoff: Duration::from_millis(o.backoff_ms),
            max_in_flight: o.max_in_flight.max(1),
        };
        let mut oracle = match o.kind {
            OracleKind::Mock => {
                let tables = match &o.mock_tables {
                    Some(p) => MockTables::load(p).map_err(io_err(p))?,
                    None => MockTables::default(),
                };
                let embedder = HashedNgramEmbedder {
                    dimension: o.mock_embedding_dim,
                };
                // the mock answers grounded requests from the same tables
                Oracle::new(
                    Box::new(MockTransport::new(tables.clone())),
                    Box::new(embedder),
                    settings,
                )
                .with_grounded(Box::new(MockTransport::new(tables)))
            }
            OracleKind::Remote => {
                let mut oracle = Oracle::new(
                    Box::new(RemoteTransport::new(&o.remote)),
                    Box::new(RemoteEmbedder::new(&o.remote)),
                    settings,
                );
                if let Some(g) = RemoteTransport::grounded(&o.remote) {
                    oracle = oracle.with_grounded(Box::new(g));
                }
                oracle
            }
        };
        if o.cache {
            oracle = oracle.with_cache_file(&self.out("oracle_cache.jsonl"))?;
        }
        Ok(oracle.with_ledger_file(&self.out("ledger.jsonl"))?)
    }

    /// Raw sources in config order.
    pub fn load_sources(&self) -> Result<Vec<Dataset>, PipelineError> {
        self.cfg
            .sources
            .iter()
            .map(|s| {
                let opts = LoadOptions {
                    delimiter: s.delimiter as u8,
                    name: Some(s.name.clone()),
                };
                Ok(load_dataset(&s.path, &IdSpec::parse(&s.id_column), &opts)?)
            })
            .collect()
    }

    /// Normalized sources in target layout, sorted by name.
    pub fn load_normalized(&self, step: Step) -> Result<Vec<Dataset>, PipelineError> {
        let mut names: Vec<&str> = self.cfg.sources.iter().map(|s| s.name.as_str()).collect();
        names.sort();
        names
            .into_iter()
            .map(|n| {
                let path = self.require(step, &format!("normalized/{n}.csv"))?;
                Ok(load_typed(&path, n, &self.target)?)
            })
            .collect()
    }

    fn record_timing(&self, step: Step, conf: Duration, exec: Duration) -> Result<(), PipelineError> {
        let path = self.out("timings.json");
        let mut t: Timings = if path.exists() {
            read_json(&path)?
        } else {
            Timings::default()
        };
        t.record(step.name(), conf.as_secs_f64(), exec.as_secs_f64());
        write_json(&path, &t)?;
        Ok(())
    }

    /// Runs one step, or every step in order for `all`. Returns the
    /// artifact paths written.
    pub fn run(&self, step: Step) -> Result<Vec<PathBuf>, PipelineError> {
        if step == Step::All {
            let mut out = Vec::new();
            for s in Step::ORDER {
                out.extend(self.run(s)?);
            }
            return Ok(out);
        }
        log::info!("step {}", step.name());
        let (artifacts, conf, exec) = match step {
            Step::Profile => self.profile()?,
            Step::MatchSchema => self.match_schema()?,
            Step::Normalize => self.normalize()?,
            Step::MatchEntities => self.match_entities()?,
            Step::Cluster => self.cluster()?,
            Step::Fuse => self.fusion()?,
            Step::Report => self.report()?,
            Step::All => unreachable!(),
        };
        self.record_timing(step, conf, exec)?;
        let mut artifacts = artifacts;
        artifacts.push(self.out("timings.json"));
        Ok(artifacts)
    }

    fn profile(&self) -> Result<(Vec<PathBuf>, Duration, Duration), PipelineError> {
        let t = Instant::now();
        let profiles: BTreeMap<String, Vec<ColumnProfile>> = self
            .load_sources()?
            .iter()
            .map(|d| (d.name().to_string(), profile_dataset(d)))
            .collect();
        let path = self.out("profiles.json");
        write_json(&path, &profiles)?;
        Ok((vec![path], Duration::ZERO, t.elapsed()))
    }

    fn match_schema(&self) -> Result<(Vec<PathBuf>, Duration, Duration), PipelineError> {
        let t = Instant::now();
        let sm = &self.cfg.schema_matching;
        let sources = self.load_sources()?;
        let gold = sm.gold.as_deref().map(load_correspondences).transpose()?;
        let mut corrs: Vec<SchemaCorrespondence> = match (&sm.correspondences, sm.method) {
            (Some(p), _) => load_correspondences(p)?,
            (None, SchemaMethod::Oracle) => {
                let oracle = self.oracle()?;
                let mut out = Vec::new();
                for s in &sources {
                    out.extend(match_with_oracle(s, &self.target, &oracle)?);
                }
                out
            }
            (None, SchemaMethod::Label) => {
                let metric = match &gold {
                    Some(g) => select_label_metric(&sources, &self.target, g, sm.label_threshold),
                    None => StringMetric::JaroWinkler,
                };
                sources
                    .iter()
                    .flat_map(|s| match_labels(s, &self.target, metric, sm.label_threshold))
                    .collect()
            }
            (None, SchemaMethod::Instance) => {
                let p = sm
                    .reference
                    .as_deref()
                    .ok_or_else(|| ConfigError::Invalid("instance matching needs schema_matching.reference".into()))?;
                let reference = load_typed(p, "reference", &self.target)?;
                sources
                    .iter()
                    .flat_map(|s| match_instances(s, &reference, &self.target, sm.instance_threshold))
                    .collect()
            }
        };
        corrs.sort_by(|a, b| (&a.source_dataset, &a.source_attribute).cmp(&(&b.source_dataset, &b.source_attribute)));
        let path = self.out("correspondences.json");
        save_correspondences(&path, &corrs)?;
        let mut artifacts = vec![path];
        if let Some(g) = gold {
            let p = self.out("schema_eval.json");
            write_json(&p, &evaluate_correspondences(&corrs, &g))?;
            artifacts.push(p);
        }
        Ok((artifacts, t.elapsed(), Duration::ZERO))
    }

    fn normalize(&self) -> Result<(Vec<PathBuf>, Duration, Duration), PipelineError> {
        let profiles: BTreeMap<String, Vec<ColumnProfile>> =
            read_json(&self.require(Step::Normalize, "profiles.json")?)?;
        let corrs = load_correspondences(&self.require(Step::Normalize, "correspondences.json")?)?;
        let mapping_dir = self.ensure_dir("mappings")?;
        let norm_dir = self.ensure_dir("normalized")?;
        let oracle = self.oracle()?;
        let (mut conf, mut exec) = (Duration::ZERO, Duration::ZERO);
        let mut report = NormalizationReport::default();
        let mut all_assignments = Vec::new();
        let mut artifacts = Vec::new();
        for (source, ds) in self.cfg.sources.iter().zip(self.load_sources()?) {
            let t = Instant::now();
            let prof = profiles.get(ds.name()).ok_or_else(|| PipelineError::Missing {
                step: Step::Normalize.name(),
                path: self.out("profiles.json"),
            })?;
            let assignments = assign_normalizers(ds.name(), prof, &corrs, &self.target);
            let mut mappings = Vec::new();
            for a in assignments.iter().filter(|a| a.normalizer == NormalizerKind::Taxonomy) {
                let attr = self
                    .target
                    .attribute(a.target_attribute.as_deref().expect("taxonomy columns are mapped"))
                    .expect("mapped to a target attribute");
                let file = mapping_dir.join(
                    TaxonomyMapping {
                        dataset: a.dataset.clone(),
                        column: a.column.clone(),
                        attribute: attr.name.clone(),
                        entries: BTreeMap::new(),
                    }
                    .file_name(),
                );
                let existing = file.exists().then(|| TaxonomyMapping::load(&file)).transpose()?;
                let m = map_taxonomy(&ds, &a.column, attr, &oracle, existing.as_ref())?;
                m.save(&file)?;
                artifacts.push(file);
                mappings.push(m);
            }
            conf += t.elapsed();
            let t = Instant::now();
            let (normed, r) = apply_normalization(&ds, &assignments, &mappings, &source.hints)?;
            report.merge(r);
            let projected = project_to_target(&normed, &corrs, &self.target)?;
            let path = norm_dir.join(format!("{}.csv", ds.name()));
            projected.write_csv(&path)?;
            artifacts.push(path);
            all_assignments.extend(assignments);
            exec += t.elapsed();
        }
        let p = self.out("normalizers.json");
        write_json(&p, &all_assignments)?;
        artifacts.push(p);
        let p = self.out("normalization_report.json");
        write_json(&p, &report)?;
        artifacts.push(p);
        Ok((artifacts, conf, exec))
    }

    pub fn matching_config(&self) -> MatchingConfig {
        let m = &self.cfg.matching;
        MatchingConfig {
            seed_target: m.seed_target,
            per_query_bottom: m.per_query_bottom,
            active: ActiveLearningConfig {
                target: m.target,
                batch: m.batch,
                augment_fraction: m.augment_fraction,
                search_budget: m.search_budget,
                seed: self.cfg.seed,
            },
            validation_size: m.validation_size,
            threshold_step: m.threshold_step,
            label_budget: m.label_budget,
            committee: self.cfg.committee(),
        }
    }

    /// Unordered dataset pairs with the smaller name first.
    fn pairs(&self) -> Vec<(String, String)> {
        let mut names: Vec<String> = self.cfg.sources.iter().map(|s| s.name.clone()).collect();
        names.sort();
        let mut out = Vec::new();
        for i in 0..names.len() {
            for j in i + 1..names.len() {
                out.push((names[i].clone(), names[j].clone()));
            }
        }
        out
    }

    fn match_entities(&self) -> Result<(Vec<PathBuf>, Duration, Duration), PipelineError> {
        let datasets = self.load_normalized(Step::MatchEntities)?;
        let by_name: BTreeMap<&str, &Dataset> = datasets.iter().map(|d| (d.name(), d)).collect();
        let oracle = self.oracle()?;
        let attrs: Vec<String> = self.target.value_attributes().map(|a| a.name.clone()).collect();
        let config = self.matching_config();
        let (mut conf, mut exec) = (Duration::ZERO, Duration::ZERO);

        let t = Instant::now();
        let mut embeddings = BTreeMap::new();
        for d in &datasets {
            embeddings.insert(
                d.name(),
                embed_records(d, &attrs, &oracle, self.cfg.blocking.embed_batch)?,
            );
        }
        exec += t.elapsed();

        let mut artifacts = Vec::new();
        let mut per_pair_eval = BTreeMap::new();
        let mut summaries = BTreeMap::new();
        for sub in ["pools", "training", "validation", "models", "matches"] {
            self.ensure_dir(sub)?;
        }
        for (na, nb) in self.pairs() {
            let (a, b) = (by_name[na.as_str()], by_name[nb.as_str()]);
            let key = format!("{na}__{nb}");
            let t = Instant::now();
            let pool = generate_candidates(
                a,
                &embeddings[na.as_str()],
                b,
                &embeddings[nb.as_str()],
                self.cfg.blocking.k,
            );
            let pool_path = self.out("pools").join(pool_file_name(&na, &nb));
            write_pool(&pool_path, &pool)?;
            artifacts.push(pool_path);
            exec += t.elapsed();

            let gold = match &self.cfg.matching.gold_dir {
                Some(dir) if dir.join(pair_file_name(&na, &nb)).exists() => {
                    read_pairs(&dir.join(pair_file_name(&na, &nb)), &na, &nb)?
                }
                _ => Vec::new(),
            };
            let t = Instant::now();
            let labeler = OracleLabeler::new(&oracle, &[a, b], attrs.clone());
            let outcome = match_pair(a, b, &self.target, &pool, &labeler, &gold, &config)?;
            conf += t.elapsed();

            let t = Instant::now();
            let file = pair_file_name(&na, &nb);
            let p = self.out("training").join(&file);
            write_pairs(&p, &outcome.training.augmented)?;
            artifacts.push(p);
            let p = self.out("validation").join(&file);
            write_pairs(&p, &outcome.validation)?;
            artifacts.push(p);
            let p = self.out("models").join(format!("{key}.json"));
            save_model(&p, &outcome.model)?;
            artifacts.push(p);
            let p = self.out("matches").join(&file);
            write_matches(&p, &outcome.correspondences)?;
            artifacts.push(p);
            if !gold.is_empty() {
                per_pair_eval.insert(key.clone(), evaluate_matching(&outcome.correspondences, &gold));
            }
            summaries.insert(
                key,
                PairSummary {
                    pool_size: pool.len(),
                    labels_used: outcome.labels_used,
                    core_labels: outcome.training.core.len(),
                    augmented_labels: outcome.training.augmented.len(),
                    validation_labels: outcome.validation.len(),
                    rounds: outcome.training.rounds,
                    exhausted: outcome.exhausted,
                    member: outcome.model.member.clone(),
                    training_variant: serde_json::to_value(outcome.model.training_variant)
                        .ok()
                        .and_then(|v| v.as_str().map(str::to_string))
                        .unwrap_or_default(),
                    threshold: outcome.model.threshold,
                    validation_f1: outcome.model.validation_f1,
                    predicted_matches: outcome.correspondences.len(),
                },
            );
            exec += t.elapsed();
        }
        let p = self.out("matching_summary.json");
        write_json(&p, &summaries)?;
        artifacts.push(p);
        if !per_pair_eval.is_empty() {
            let p = self.out("matching_eval.json");
            write_json(&p, &MatchingEvaluation::from_pairs(per_pair_eval))?;
            artifacts.push(p);
        }
        Ok((artifacts, conf, exec))
    }

    fn cluster(&self) -> Result<(Vec<PathBuf>, Duration, Duration), PipelineError> {
        let t = Instant::now();
        let datasets = self.load_normalized(Step::Cluster)?;
        let mut corrs = Vec::new();
        for (na, nb) in self.pairs() {
            let p = self.require(Step::Cluster, &format!("matches/{}", pair_file_name(&na, &nb)))?;
            corrs.extend(read_matches(&p)?);
        }
        let records: Vec<RecordRef> = datasets
            .iter()
            .flat_map(|d| d.records().iter().map(move |r| RecordRef::new(d.name(), r.id.clone())))
            .collect();
        let filtered = filter_all(&corrs, self.cfg.clustering.algorithm);
        let (clusters, stats) = build_clusters(&filtered, &records)?;
        let p = self.out("clusters.txt");
        write_clusters(&p, &clusters)?;
        let s = self.out("cluster_stats.json");
        write_json(&s, &stats)?;
        Ok((vec![p, s], Duration::ZERO, t.elapsed()))
    }

    fn fusion(&self) -> Result<(Vec<PathBuf>, Duration, Duration), PipelineError> {
        let clusters_path = self.require(Step::Fuse, "clusters.txt")?;
        let datasets = self.load_normalized(Step::Fuse)?;
        let clusters = read_clusters(&clusters_path)?;
        let inputs = FusionInputs::new(&datasets, &clusters);
        let ctx = FusionContext::from_datasets(&datasets, &self.target, self.cfg.snapshot_dates());
        let f = &self.cfg.fusion;
        let mut artifacts = Vec::new();

        let t = Instant::now();
        let oracle = self.oracle()?;
        let validation = match &f.validation_file {
            Some(p) => read_validation_set(p, &inputs, &self.target, ValidationOrigin::HumanFile)?,
            None => {
                let settings = ValidationSettings {
                    sample_groups: f.sample_groups,
                    rag: f.rag,
                    seed: self.cfg.seed,
                };
                let set = generate_validation_set(&inputs, &self.target, &oracle, &settings)?;
                let p = self.out("fusion_validation.csv");
                write_validation_set(&p, &set)?;
                artifacts.push(p);
                set
            }
        };
        let prepared = PreparedValidation::new(&validation, &inputs, &self.target)?;
        let search = match &f.strategy_file {
            Some(p) => {
                let s = FusionStrategy::load(p)?;
                StrategySearch {
                    candidates: vec![s.clone()],
                    selected: s,
                    validation_entries: prepared.len(),
                }
            }
            None => search_strategy(&self.target, &ctx, &prepared, f.oracle_strategy.then_some(&oracle))?,
        };
        let p = self.out("strategy.json");
        write_json(&p, &search)?;
        artifacts.push(p);
        let conf = t.elapsed();

        let t = Instant::now();
        let output = fuse(&inputs, &search.selected, &self.target, &ctx)?;
        let p = self.out("fused.csv");
        output.dataset.write_csv(&p)?;
        artifacts.push(p);
        let p = self.out("fused_provenance.jsonl");
        write_provenance(&p, &output.provenance)?;
        artifacts.push(p);
        let p = self.out("fusion_stats.json");
        write_json(&p, &output.stats)?;
        artifacts.push(p);
        let test = match &f.test_file {
            Some(path) => {
                let set = read_validation_set(path, &inputs, &self.target, ValidationOrigin::HumanFile)?;
                Some(PreparedValidation::new(&set, &inputs, &self.target)?.evaluate(&search.selected, &ctx))
            }
            None => None,
        };
        let p = self.out("fusion_eval.json");
        write_json(
            &p,
            &FusionEvaluation {
                validation_entries: search.validation_entries,
                selected_validation_accuracy: search.selected.validation_accuracy,
                test,
            },
        )?;
        artifacts.push(p);
        Ok((artifacts, conf, t.elapsed()))
    }

    fn report(&self) -> Result<(Vec<PathBuf>, Duration, Duration), PipelineError> {
        let t = Instant::now();
        let fused_path = self.require(Step::Report, "fused.csv")?;
        let clusters = read_clusters(&self.require(Step::Report, "clusters.txt")?)?;
        let datasets = self.load_normalized(Step::Report)?;
        let fused = load_typed(&fused_path, FUSED_DATASET, &self.target)?;
        let sizes: Vec<usize> = clusters.iter().map(|c| c.len()).collect();
        let ledger = self.oracle()?.ledger();
        let report = compute_report(
            &datasets,
            &sizes,
            &fused,
            &self.target,
            Some(&ledger),
            self.cfg.report.weighting,
        );
        let json = self.out("report.json");
        fs::write(&json, render_report(&report, ReportFormat::StructuredDocument)).map_err(io_err(&json))?;
        let text = self.out("report.txt");
        fs::write(&text, render_report(&report, ReportFormat::TextTable)).map_err(io_err(&text))?;
        Ok((vec![json, text], Duration::ZERO, t.elapsed()))
    }
}
