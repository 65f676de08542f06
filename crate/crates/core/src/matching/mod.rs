//! Entity matching over a candidate pool: features, oracle-labeled training
//! data, committee active learning, model selection and prediction.

pub mod active;
pub mod features;
pub mod learners;
pub mod select;

use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::blocking::CandidatePair;
use crate::clustering::{Correspondence, RecordRef};
use crate::datamodel::{DataError, Dataset, TargetSchema};
use crate::oracle::OracleError;
use crate::schema_matching::Prf;

pub use active::{LabelSource, LabeledPair, PairLabeler};
pub use features::FeatureExtractor;
pub use learners::{default_committee, Family, LearnerSpec, Model};
pub use select::{MatcherModel, TrainingVariant};

#[derive(Debug, Error)]
pub enum MatchingError {
    #[error("training data needs both classes ({positives} matches among {examples} labels)")]
    SingleClass { examples: usize, positives: usize },
    #[error("record {0} is not loaded")]
    UnknownRecord(String),
    #[error("unreadable pair label `{0}`")]
    BadLabel(String),
    #[error("no committee members to select from")]
    EmptyCommittee,
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error(transparent)]
    Data(#[from] DataError),
    #[error("cannot write {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("invalid model file {path}: {source}")]
    Json {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },
}

/// Feature rows for every pool pair; the embedding cosine is the pool
/// similarity.
pub fn pool_features(
    extractor: &FeatureExtractor,
    a: &Dataset,
    b: &Dataset,
    pool: &[CandidatePair],
) -> Result<Vec<Vec<f64>>, MatchingError> {
    pool.par_iter()
        .map(|p| {
            let ra = a
                .position(&p.a.id)
                .ok_or_else(|| MatchingError::UnknownRecord(p.a.to_string()))?;
            let rb = b
                .position(&p.b.id)
                .ok_or_else(|| MatchingError::UnknownRecord(p.b.to_string()))?;
            Ok(extractor.compute(a, ra, b, rb, p.similarity))
        })
        .collect()
}

/// Correspondences for pool pairs scoring at or above the threshold.
pub fn predict(model: &MatcherModel, pool: &[CandidatePair], features: &[Vec<f64>]) -> Vec<Correspondence> {
    pool.par_iter()
        .zip(features)
        .filter_map(|(p, x)| {
            let s = model.score(x);
            (s >= model.threshold).then(|| Correspondence {
                a: p.a.clone(),
                b: p.b.clone(),
                score: s,
            })
        })
        .collect()
}

/// Precision, recall and F1 over the gold pairs only; gold pairs without a
/// prediction count as predicted non-matches.
pub fn evaluate_matching(predicted: &[Correspondence], gold: &[LabeledPair]) -> Prf {
    let keys: BTreeSet<(RecordRef, RecordRef)> = predicted
        .iter()
        .flat_map(|c| [(c.a.clone(), c.b.clone()), (c.b.clone(), c.a.clone())])
        .collect();
    let (mut tp, mut fp, mut fn_) = (0, 0, 0);
    for g in gold {
        match (keys.contains(&g.key()), g.label) {
            (true, true) => tp += 1,
            (true, false) => fp += 1,
            (false, true) => fn_ += 1,
            _ => {}
        }
    }
    Prf::from_counts(tp, fp, fn_)
}

#[derive(Serialize, Deserialize)]
struct PairRow {
    id_a: String,
    id_b: String,
    label: String,
    #[serde(default)]
    label_source: Option<String>,
}

pub fn pair_file_name(dataset_a: &str, dataset_b: &str) -> String {
    format!("{dataset_a}__{dataset_b}.csv")
}

pub fn write_pairs(path: &Path, pairs: &[LabeledPair]) -> Result<(), MatchingError> {
    let err = |source| DataError::Csv {
        path: path.to_path_buf(),
        source,
    };
    let mut w = csv::Writer::from_path(path).map_err(err)?;
    for p in pairs {
        w.serialize(PairRow {
            id_a: p.a.id.clone(),
            id_b: p.b.id.clone(),
            label: if p.label { "match" } else { "non-match" }.into(),
            label_source: Some(p.source.name().into()),
        })
        .map_err(err)?;
    }
    w.flush().map_err(|source| MatchingError::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub fn parse_label(s: &str) -> Option<bool> {
    match s.trim().to_lowercase().as_str() {
        "match" | "1" | "true" | "yes" | "y" => Some(true),
        "non-match" | "nonmatch" | "0" | "false" | "no" | "n" => Some(false),
        _ => None,
    }
}

/// Reads a pair file; a missing `label_source` column means gold labels.
pub fn read_pairs(path: &Path, dataset_a: &str, dataset_b: &str) -> Result<Vec<LabeledPair>, MatchingError> {
    let err = |source| DataError::Csv {
        path: path.to_path_buf(),
        source,
    };
    let mut r = csv::Reader::from_path(path).map_err(err)?;
    let mut out = Vec::new();
    for row in r.deserialize::<PairRow>() {
        let row = row.map_err(err)?;
        let label = parse_label(&row.label).ok_or_else(|| MatchingError::BadLabel(row.label.clone()))?;
        let source = match row.label_source.as_deref().filter(|s| !s.is_empty()) {
            Some(s) => LabelSource::parse(s).ok_or_else(|| MatchingError::BadLabel(s.to_string()))?,
            None => LabelSource::Gold,
        };
        out.push(LabeledPair {
            a: RecordRef::new(dataset_a, row.id_a),
            b: RecordRef::new(dataset_b, row.id_b),
            label,
            source,
        });
    }
    Ok(out)
}

pub fn save_model(path: &Path, model: &MatcherModel) -> Result<(), MatchingError> {
    let text = serde_json::to_string_pretty(model).expect("model serializes");
    std::fs::write(path, text).map_err(|source| MatchingError::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub fn load_model(path: &Path) -> Result<MatcherModel, MatchingError> {
    let text = std::fs::read_to_string(path).map_err(|source| MatchingError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    serde_json::from_str(&text).map_err(|source| MatchingError::Json {
        path: path.to_path_buf(),
        source,
    })
}

#[derive(Debug, Clone)]
pub struct MatchingConfig {
    pub seed_target: usize,
    pub per_query_bottom: usize,
    pub active: active::ActiveLearningConfig,
    pub validation_size: usize,
    pub threshold_step: f64,
    /// Limit on training labels (seeds, active and augmentation).
    pub label_budget: Option<usize>,
    pub committee: Vec<LearnerSpec>,
}

impl Default for MatchingConfig {
    fn default() -> Self {
        Self {
            seed_target: 100,
            per_query_bottom: 2,
            active: active::ActiveLearningConfig::default(),
            validation_size: 200,
            threshold_step: 0.05,
            label_budget: None,
            committee: default_committee(42),
        }
    }
}

#[derive(Debug, Clone)]
pub struct PairMatchOutcome {
    pub dataset_a: String,
    pub dataset_b: String,
    pub training: active::TrainingSets,
    pub validation: Vec<LabeledPair>,
    pub model: MatcherModel,
    pub correspondences: Vec<Correspondence>,
    pub labels_used: usize,
    pub exhausted: bool,
}

/// Full matching run for one dataset pair. `pool` must come from
/// [`crate::blocking::generate_candidates`] on the same two datasets.
pub fn match_pair(
    a: &Dataset,
    b: &Dataset,
    target: &TargetSchema,
    pool: &[CandidatePair],
    labeler: &dyn PairLabeler,
    gold_test: &[LabeledPair],
    config: &MatchingConfig,
) -> Result<PairMatchOutcome, MatchingError> {
    if a.name() > b.name() {
        return match_pair(b, a, target, pool, labeler, gold_test, config);
    }
    let extractor = FeatureExtractor::new(a, b, target);
    let features = pool_features(&extractor, a, b, pool)?;
    let gold: BTreeSet<active::PairKey> = gold_test
        .iter()
        .flat_map(|g| [g.key(), (g.b.clone(), g.a.clone())])
        .collect();

    let mut session = active::LabelSession::new(labeler, config.label_budget);
    let seeds = active::seed_labeling(pool, &mut session, config.seed_target, config.per_query_bottom, &gold)?;
    let seeds_exhausted = seeds.exhausted;
    let training = active::run_active_learning(
        pool,
        &features,
        seeds.pairs,
        &mut session,
        &config.committee,
        &config.active,
        &gold,
    )?;

    let mut used: BTreeSet<active::PairKey> = gold.clone();
    used.extend(training.augmented.iter().map(LabeledPair::key));
    let positions = active::sample_validation(pool, config.validation_size, config.active.seed, &used);
    let mut validation_session = active::LabelSession::new(labeler, None);
    let mut validation = Vec::with_capacity(positions.len());
    for i in positions {
        if let Some(l) = validation_session.ask(&pool[i], LabelSource::OracleValidation)? {
            validation.push(l);
        }
    }

    let index = active::pool_index(pool);
    let mut candidates = Vec::new();
    let variants = [
        (TrainingVariant::Core, &training.core),
        (TrainingVariant::Augmented, &training.augmented),
    ];
    for (variant, set) in variants {
        if variant == TrainingVariant::Augmented && set.len() == training.core.len() {
            continue;
        }
        let (x, y) = active::training_matrix(set, &index, &features);
        let members = learners::train_committee(&x, &y, &config.committee, config.active.search_budget)?;
        candidates.extend(
            members
                .into_iter()
                .enumerate()
                .map(|(member_index, member)| select::SelectionCandidate {
                    variant,
                    member_index,
                    member,
                }),
        );
    }
    let (vx, vy) = active::training_matrix(&validation, &index, &features);
    let names = extractor.specs().iter().map(|s| s.name()).collect();
    let model = select::select_model(
        &candidates,
        &vx,
        &vy,
        &select::threshold_grid(config.threshold_step),
        names,
    )
    .ok_or(MatchingError::EmptyCommittee)?;
    let correspondences = predict(&model, pool, &features);
    Ok(PairMatchOutcome {
        dataset_a: a.name().to_string(),
        dataset_b: b.name().to_string(),
        exhausted: seeds_exhausted || training.exhausted,
        labels_used: session.used(),
        training,
        validation,
        model,
        correspondences,
    })
}

/// Per dataset pair evaluation plus the macro average.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatchingEvaluation {
    pub per_pair: BTreeMap<String, Prf>,
    pub macro_f1: f64,
}

impl MatchingEvaluation {
    pub fn from_pairs(per_pair: BTreeMap<String, Prf>) -> Self {
        let f1s: Vec<f64> = per_pair.values().map(|p| p.f1).collect();
        Self {
            macro_f1: crate::metrics::macro_average(&f1s),
            per_pair,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lp(a: &str, b: &str, label: bool) -> LabeledPair {
        LabeledPair {
            a: RecordRef::new("a", a),
            b: RecordRef::new("b", b),
            label,
            source: LabelSource::Gold,
        }
    }

    fn corr(a: &str, b: &str) -> Correspondence {
        Correspondence {
            a: RecordRef::new("a", a),
            b: RecordRef::new("b", b),
            score: 0.9,
        }
    }

    #[test]
    fn evaluation_counts_only_gold_pairs() {
        let mut gold = Vec::new();
        let mut pred = Vec::new();
        for i in 0..10 {
            gold.push(lp(&format!("p{i}"), &format!("p{i}"), true));
            if i < 8 {
                pred.push(corr(&format!("p{i}"), &format!("p{i}")));
            }
        }
        for i in 0..5 {
            gold.push(lp(&format!("n{i}"), &format!("n{i}"), false));
            if i < 2 {
                pred.push(corr(&format!("n{i}"), &format!("n{i}")));
            }
        }
        pred.push(corr("x", "y"));
        let prf = evaluate_matching(&pred, &gold);
        assert!((prf.f1 - 0.8).abs() < 1e-12);
    }

    #[test]
    fn all_non_match_predictions_score_zero() {
        let gold = vec![lp("1", "1", true), lp("2", "2", false)];
        assert_eq!(evaluate_matching(&[], &gold).f1, 0.0);
    }

    #[test]
    fn pair_file_round_trip_and_gold_default() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("x.csv");
        let pairs = vec![lp("1", "2", true), lp("3", "4", false)];
        write_pairs(&p, &pairs).unwrap();
        assert_eq!(read_pairs(&p, "a", "b").unwrap(), pairs);
        std::fs::write(&p, "id_a,id_b,label\n1,2,1\n3,4,0\n").unwrap();
        assert_eq!(read_pairs(&p, "a", "b").unwrap(), pairs);
    }

    #[test]
    fn threshold_boundary_is_inclusive() {
        let model = MatcherModel {
            member: "c".into(),
            family: Family::RegularizedLinear,
            hyperparameters: Default::default(),
            threshold: 0.5,
            training_variant: TrainingVariant::Core,
            validation_f1: 1.0,
            feature_names: vec![],
            model: Model::Constant { probability: 0.5 },
        };
        let pool = vec![CandidatePair {
            a: RecordRef::new("a", "1"),
            b: RecordRef::new("b", "1"),
            similarity: 0.1,
            rank_from_a: 1,
        }];
        assert_eq!(predict(&model, &pool, &[vec![]]).len(), 1);
        assert!(predict(&model, &[], &[]).is_empty());
    }
}
