//! Oracle labeling of candidate pairs: seed labeling, committee active
//! learning with variance sampling, random augmentation and the validation
//! sample.

use std::collections::{BTreeMap, BTreeSet};

use rand::seq::{IndexedRandom, SliceRandom};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::learners::{train_committee, LearnerSpec, Model};
use super::MatchingError;
use crate::blocking::CandidatePair;
use crate::clustering::RecordRef;
use crate::datamodel::{Dataset, Value};
use crate::oracle::prompts::{self, PairLabelPayload, PairLabelReply, RecordView};
use crate::oracle::Oracle;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LabelSource {
    OracleSeed,
    OracleActive,
    OracleRandom,
    OracleValidation,
    Gold,
}

impl LabelSource {
    pub fn name(self) -> &'static str {
        match self {
            LabelSource::OracleSeed => "oracle-seed",
            LabelSource::OracleActive => "oracle-active",
            LabelSource::OracleRandom => "oracle-random",
            LabelSource::OracleValidation => "oracle-validation",
            LabelSource::Gold => "gold",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        [
            LabelSource::OracleSeed,
            LabelSource::OracleActive,
            LabelSource::OracleRandom,
            LabelSource::OracleValidation,
            LabelSource::Gold,
        ]
        .into_iter()
        .find(|l| l.name() == s)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabeledPair {
    pub a: RecordRef,
    pub b: RecordRef,
    pub label: bool,
    pub source: LabelSource,
}

impl LabeledPair {
    pub fn key(&self) -> (RecordRef, RecordRef) {
        (self.a.clone(), self.b.clone())
    }
}

pub type PairKey = (RecordRef, RecordRef);

/// Anything that can decide whether two records match.
pub trait PairLabeler: Sync {
    fn label(&self, a: &RecordRef, b: &RecordRef) -> Result<bool, MatchingError>;
}

/// Non-null values of a record, rendered, keyed by attribute.
pub fn record_view(ds: &Dataset, row: usize, attributes: &[String]) -> RecordView {
    let values = attributes
        .iter()
        .filter_map(|a| {
            ds.value(row, a).map(|v| {
                let s = match v {
                    Value::List(items) => items.join(", "),
                    other => other.render(),
                };
                (a.clone(), s)
            })
        })
        .collect();
    RecordView {
        dataset: ds.name().to_string(),
        id: ds.records()[row].id.clone(),
        values,
    }
}

/// Labels pairs through the oracle's pair-label task.
pub struct OracleLabeler<'a> {
    oracle: &'a Oracle,
    datasets: BTreeMap<String, &'a Dataset>,
    attributes: Vec<String>,
}

impl<'a> OracleLabeler<'a> {
    pub fn new(oracle: &'a Oracle, datasets: &[&'a Dataset], attributes: Vec<String>) -> Self {
        Self {
            oracle,
            datasets: datasets.iter().map(|d| (d.name().to_string(), *d)).collect(),
            attributes,
        }
    }

    fn view(&self, r: &RecordRef) -> Result<RecordView, MatchingError> {
        let ds = self
            .datasets
            .get(&r.dataset)
            .ok_or_else(|| MatchingError::UnknownRecord(r.to_string()))?;
        let row = ds
            .position(&r.id)
            .ok_or_else(|| MatchingError::UnknownRecord(r.to_string()))?;
        Ok(record_view(ds, row, &self.attributes))
    }
}

impl PairLabeler for OracleLabeler<'_> {
    fn label(&self, a: &RecordRef, b: &RecordRef) -> Result<bool, MatchingError> {
        let payload = PairLabelPayload {
            record_a: self.view(a)?,
            record_b: self.view(b)?,
        };
        let reply = self.oracle.invoke(&prompts::pair_label(&payload))?;
        let reply: PairLabelReply =
            serde_json::from_value(reply).map_err(|e| MatchingError::BadLabel(e.to_string()))?;
        match reply.label.trim().to_lowercase().as_str() {
            "match" | "true" | "yes" => Ok(true),
            "non-match" | "nonmatch" | "no-match" | "false" | "no" => Ok(false),
            other => Err(MatchingError::BadLabel(other.to_string())),
        }
    }
}

/// Labeler answering from a fixed table; pairs not present are non-matches.
pub struct TableLabeler {
    matches: BTreeSet<PairKey>,
}

impl TableLabeler {
    pub fn new(matches: impl IntoIterator<Item = PairKey>) -> Self {
        Self {
            matches: matches
                .into_iter()
                .flat_map(|(a, b)| [(a.clone(), b.clone()), (b, a)])
                .collect(),
        }
    }
}

impl PairLabeler for TableLabeler {
    fn label(&self, a: &RecordRef, b: &RecordRef) -> Result<bool, MatchingError> {
        Ok(self.matches.contains(&(a.clone(), b.clone())))
    }
}

/// Counts labels against an optional limit and remembers every answer.
pub struct LabelSession<'l> {
    labeler: &'l dyn PairLabeler,
    limit: Option<usize>,
    used: usize,
}

impl<'l> LabelSession<'l> {
    pub fn new(labeler: &'l dyn PairLabeler, limit: Option<usize>) -> Self {
        Self {
            labeler,
            limit,
            used: 0,
        }
    }

    pub fn used(&self) -> usize {
        self.used
    }

    pub fn remaining(&self) -> usize {
        self.limit.map_or(usize::MAX, |l| l.saturating_sub(self.used))
    }

    /// `None` once the limit is reached.
    pub fn ask(&mut self, pair: &CandidatePair, source: LabelSource) -> Result<Option<LabeledPair>, MatchingError> {
        if self.remaining() == 0 {
            return Ok(None);
        }
        let label = self.labeler.label(&pair.a, &pair.b)?;
        self.used += 1;
        Ok(Some(LabeledPair {
            a: pair.a.clone(),
            b: pair.b.clone(),
            label,
            source,
        }))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SeedOutcome {
    pub pairs: Vec<LabeledPair>,
    /// Set when the label limit stopped labeling before the target.
    pub exhausted: bool,
}

/// Per query record (the `a` side, in order of first appearance in the
/// similarity-sorted pool), labels candidates from the top until one match
/// and two non-matches are found, then the `per_query_bottom` least similar
/// candidates. The target is checked between queries.
pub fn seed_labeling(
    pool: &[CandidatePair],
    session: &mut LabelSession,
    target: usize,
    per_query_bottom: usize,
    exclude: &BTreeSet<PairKey>,
) -> Result<SeedOutcome, MatchingError> {
    let mut order: Vec<&RecordRef> = Vec::new();
    let mut by_query: BTreeMap<&RecordRef, Vec<&CandidatePair>> = BTreeMap::new();
    for p in pool {
        if exclude.contains(&p.key()) {
            continue;
        }
        let entry = by_query.entry(&p.a).or_default();
        if entry.is_empty() {
            order.push(&p.a);
        }
        entry.push(p);
    }
    let mut pairs = Vec::new();
    for q in order {
        if pairs.len() >= target {
            break;
        }
        let candidates = &by_query[q];
        let mut done = vec![false; candidates.len()];
        let (mut pos, mut neg) = (0, 0);
        for (i, c) in candidates.iter().enumerate() {
            if pos >= 1 && neg >= 2 {
                break;
            }
            let Some(l) = session.ask(c, LabelSource::OracleSeed)? else {
                return Ok(SeedOutcome { pairs, exhausted: true });
            };
            if l.label {
                pos += 1;
            } else {
                neg += 1;
            }
            done[i] = true;
            pairs.push(l);
        }
        for i in (0..candidates.len()).rev().filter(|&i| !done[i]).take(per_query_bottom) {
            let Some(l) = session.ask(candidates[i], LabelSource::OracleSeed)? else {
                return Ok(SeedOutcome { pairs, exhausted: true });
            };
            pairs.push(l);
        }
    }
    Ok(SeedOutcome {
        pairs,
        exhausted: false,
    })
}

/// Population variance, summed in sorted order so the result does not depend
/// on the order of the inputs.
pub fn population_variance(xs: &[f64]) -> f64 {
    if xs.is_empty() {
        return 0.0;
    }
    let mut v = xs.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len() as f64;
    let mean = v.iter().sum::<f64>() / n;
    let mut d: Vec<f64> = v.iter().map(|x| (x - mean) * (x - mean)).collect();
    d.sort_by(f64::total_cmp);
    d.iter().sum::<f64>() / n
}

/// Positions of the `n` pairs with the highest variance of scorer outputs,
/// ties by (id_a, id_b).
pub fn select_disagreement_batch(
    pairs: &[&CandidatePair],
    features: &[&[f64]],
    scorers: &[&Model],
    n: usize,
) -> Vec<usize> {
    let variances: Vec<f64> = features
        .iter()
        .map(|x| population_variance(&scorers.iter().map(|m| m.predict(x)).collect::<Vec<_>>()))
        .collect();
    let mut idx: Vec<usize> = (0..pairs.len()).collect();
    idx.sort_by(|&i, &j| {
        variances[j]
            .total_cmp(&variances[i])
            .then_with(|| pairs[i].a.id.cmp(&pairs[j].a.id))
            .then_with(|| pairs[i].b.id.cmp(&pairs[j].b.id))
    });
    idx.truncate(n);
    idx
}

#[derive(Debug, Clone)]
pub struct ActiveLearningConfig {
    pub target: usize,
    pub batch: usize,
    pub augment_fraction: f64,
    pub search_budget: usize,
    pub seed: u64,
}

impl Default for ActiveLearningConfig {
    fn default() -> Self {
        Self {
            target: 600,
            batch: 100,
            augment_fraction: 0.2,
            search_budget: 4,
            seed: 42,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainingSets {
    pub core: Vec<LabeledPair>,
    pub augmented: Vec<LabeledPair>,
    pub rounds: usize,
    pub exhausted: bool,
}

/// Feature rows of labeled pairs, looked up in the pool.
pub fn training_matrix(
    labeled: &[LabeledPair],
    index: &BTreeMap<PairKey, usize>,
    features: &[Vec<f64>],
) -> (Vec<Vec<f64>>, Vec<bool>) {
    labeled
        .iter()
        .filter_map(|l| index.get(&l.key()).map(|&i| (features[i].clone(), l.label)))
        .unzip()
}

pub fn pool_index(pool: &[CandidatePair]) -> BTreeMap<PairKey, usize> {
    pool.iter().enumerate().map(|(i, p)| (p.key(), i)).collect()
}

/// Grows the seed set by variance sampling until `target` labels or the
/// label limit, retraining the committee after every batch, then builds the
/// randomly augmented variant.
#[allow(clippy::too_many_arguments)]
pub fn run_active_learning(
    pool: &[CandidatePair],
    features: &[Vec<f64>],
    seeds: Vec<LabeledPair>,
    session: &mut LabelSession,
    specs: &[LearnerSpec],
    config: &ActiveLearningConfig,
    exclude: &BTreeSet<PairKey>,
) -> Result<TrainingSets, MatchingError> {
    let index = pool_index(pool);
    let mut core = seeds;
    let mut labeled: BTreeSet<PairKey> = core.iter().map(LabeledPair::key).collect();
    let mut rounds = 0;
    let mut exhausted = false;
    while core.len() < config.target {
        let n = config.batch.min(config.target - core.len()).min(session.remaining());
        if n == 0 {
            exhausted = true;
            break;
        }
        let open: Vec<usize> = (0..pool.len())
            .filter(|&i| !labeled.contains(&pool[i].key()) && !exclude.contains(&pool[i].key()))
            .collect();
        if open.is_empty() {
            break;
        }
        let (x, y) = training_matrix(&core, &index, features);
        let chosen: Vec<usize> = match train_committee(&x, &y, specs, config.search_budget) {
            Ok(members) => {
                let scorers: Vec<&Model> = members.iter().map(|m| &m.model).collect();
                let pairs: Vec<&CandidatePair> = open.iter().map(|&i| &pool[i]).collect();
                let feats: Vec<&[f64]> = open.iter().map(|&i| features[i].as_slice()).collect();
                select_disagreement_batch(&pairs, &feats, &scorers, n)
                    .into_iter()
                    .map(|p| open[p])
                    .collect()
            }
            // without both classes there is no committee; take the most
            // similar open pairs, which is where matches are likeliest
            Err(MatchingError::SingleClass { .. }) => open.iter().copied().take(n).collect(),
            Err(e) => return Err(e),
        };
        for i in chosen {
            match session.ask(&pool[i], LabelSource::OracleActive)? {
                Some(l) => {
                    labeled.insert(l.key());
                    core.push(l);
                }
                None => {
                    exhausted = true;
                    break;
                }
            }
        }
        rounds += 1;
        if exhausted {
            break;
        }
    }
    let mut augmented = core.clone();
    let extra = (config.augment_fraction * core.len() as f64).ceil() as usize;
    let open: Vec<usize> = (0..pool.len())
        .filter(|&i| !labeled.contains(&pool[i].key()) && !exclude.contains(&pool[i].key()))
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut picks: Vec<usize> = open.choose_multiple(&mut rng, extra.min(open.len())).copied().collect();
    picks.sort_unstable();
    for i in picks {
        match session.ask(&pool[i], LabelSource::OracleRandom)? {
            Some(l) => augmented.push(l),
            None => {
                exhausted = true;
                break;
            }
        }
    }
    Ok(TrainingSets {
        core,
        augmented,
        rounds,
        exhausted,
    })
}

/// Labels `size` random pool pairs under the same limit, for comparison
/// against active learning at equal label cost.
pub fn random_training_set(
    pool: &[CandidatePair],
    session: &mut LabelSession,
    size: usize,
    seed: u64,
    exclude: &BTreeSet<PairKey>,
) -> Result<Vec<LabeledPair>, MatchingError> {
    let open: Vec<&CandidatePair> = pool.iter().filter(|p| !exclude.contains(&p.key())).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    for p in open.choose_multiple(&mut rng, size.min(open.len())) {
        match session.ask(p, LabelSource::OracleRandom)? {
            Some(l) => out.push(l),
            None => break,
        }
    }
    Ok(out)
}

/// Pool positions for the validation sample: half from the top similarity
/// decile, the rest uniformly from the remaining pairs.
pub fn sample_validation(pool: &[CandidatePair], size: usize, seed: u64, exclude: &BTreeSet<PairKey>) -> Vec<usize> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x7661_6c69);
    let decile = pool.len().div_ceil(10);
    let mut top: Vec<usize> = (0..decile).filter(|&i| !exclude.contains(&pool[i].key())).collect();
    top.shuffle(&mut rng);
    top.truncate(size / 2);
    let taken: BTreeSet<usize> = top.iter().copied().collect();
    let mut rest: Vec<usize> = (0..pool.len())
        .filter(|i| !taken.contains(i) && !exclude.contains(&pool[*i].key()))
        .collect();
    rest.shuffle(&mut rng);
    rest.truncate(size - top.len());
    let mut all: Vec<usize> = top.into_iter().chain(rest).collect();
    all.sort_unstable();
    all
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pair(a: &str, b: &str, sim: f64) -> CandidatePair {
        CandidatePair {
            a: RecordRef::new("a", a),
            b: RecordRef::new("b", b),
            similarity: sim,
            rank_from_a: 1,
        }
    }

    fn truth(matches: &[(&str, &str)]) -> TableLabeler {
        TableLabeler::new(
            matches
                .iter()
                .map(|(a, b)| (RecordRef::new("a", *a), RecordRef::new("b", *b))),
        )
    }

    #[test]
    fn seed_rule_stops_after_one_match_two_non_matches() {
        let pool: Vec<CandidatePair> = (0..8)
            .map(|i| pair("q", &format!("b{i}"), 0.9 - i as f64 * 0.1))
            .collect();
        let labeler = truth(&[("q", "b0")]);
        let mut s = LabelSession::new(&labeler, None);
        let out = seed_labeling(&pool, &mut s, 100, 2, &BTreeSet::new()).unwrap();
        let ids: Vec<&str> = out.pairs.iter().map(|p| p.b.id.as_str()).collect();
        assert_eq!(ids, vec!["b0", "b1", "b2", "b7", "b6"]);
    }

    #[test]
    fn seed_rule_exhausts_short_query_without_duplicates() {
        let pool: Vec<CandidatePair> = (0..5)
            .map(|i| pair("q", &format!("b{i}"), 0.9 - i as f64 * 0.1))
            .collect();
        let labeler = truth(&[]);
        let mut s = LabelSession::new(&labeler, None);
        let out = seed_labeling(&pool, &mut s, 100, 2, &BTreeSet::new()).unwrap();
        assert_eq!(out.pairs.len(), 5);
        let keys: BTreeSet<_> = out.pairs.iter().map(LabeledPair::key).collect();
        assert_eq!(keys.len(), 5);
    }

    #[test]
    fn seed_target_overshoots_by_at_most_one_query_tail() {
        // every query: top candidate matches, so each yields exactly 5 labels
        let mut pool = Vec::new();
        let mut matches = Vec::new();
        for q in 0..40 {
            let qn = format!("q{q:02}");
            for c in 0..6 {
                pool.push(pair(&qn, &format!("{qn}-{c}"), 0.99 - c as f64 * 0.1 - q as f64 * 1e-4));
            }
            matches.push((qn.clone(), format!("{qn}-0")));
        }
        let mut crate_pool = pool.clone();
        crate::blocking::sort_pool(&mut crate_pool);
        let m: Vec<(&str, &str)> = matches.iter().map(|(a, b)| (a.as_str(), b.as_str())).collect();
        let labeler = truth(&m);
        for target in [96, 98, 100, 101] {
            let mut s = LabelSession::new(&labeler, None);
            let out = seed_labeling(&crate_pool, &mut s, target, 2, &BTreeSet::new()).unwrap();
            assert!(
                out.pairs.len() >= target && out.pairs.len() <= target + 4,
                "{}",
                out.pairs.len()
            );
        }
    }

    #[test]
    fn seed_labeling_flags_exhaustion() {
        let pool: Vec<CandidatePair> = (0..8)
            .map(|i| pair("q", &format!("b{i}"), 0.9 - i as f64 * 0.1))
            .collect();
        let labeler = truth(&[]);
        let mut s = LabelSession::new(&labeler, Some(3));
        let out = seed_labeling(&pool, &mut s, 100, 2, &BTreeSet::new()).unwrap();
        assert!(out.exhausted);
        assert_eq!(out.pairs.len(), 3);
    }

    #[test]
    fn variance_examples() {
        assert!((population_variance(&[0.0, 1.0]) - 0.25).abs() < 1e-12);
        assert_eq!(population_variance(&[0.5, 0.5]), 0.0);
        assert!((population_variance(&[0.2, 0.5, 0.8]) - 0.06).abs() < 1e-12);
    }

    #[test]
    fn disagreement_prefers_split_votes() {
        let up = Model::Linear {
            weights: vec![1.0],
            bias: 0.0,
        };
        let down = Model::Linear {
            weights: vec![-1.0],
            bias: 0.0,
        };
        let pairs = [pair("1", "1", 0.5), pair("2", "2", 0.5)];
        let refs: Vec<&CandidatePair> = pairs.iter().collect();
        // pair 1 scores {.5, .5}; pair 2 scores close to {1, 0}
        let feats: [&[f64]; 2] = [&[0.0], &[50.0]];
        assert_eq!(select_disagreement_batch(&refs, &feats, &[&up, &down], 1), vec![1]);
        assert_eq!(select_disagreement_batch(&refs, &feats, &[&down, &up], 1), vec![1]);
        assert_eq!(select_disagreement_batch(&refs, &feats, &[&up, &up], 2), vec![0, 1]);
    }

    #[test]
    fn validation_sample_is_half_top_decile() {
        let pool: Vec<CandidatePair> = (0..1000)
            .map(|i| pair(&format!("{i:04}"), "x", 1.0 - i as f64 / 1000.0))
            .collect();
        let v = sample_validation(&pool, 200, 1, &BTreeSet::new());
        assert_eq!(v.len(), 200);
        assert!(v.iter().filter(|&&i| i < 100).count() >= 100);
        assert_eq!(v.iter().collect::<BTreeSet<_>>().len(), 200);
    }

    fn toy_pool(n: usize) -> (Vec<CandidatePair>, Vec<Vec<f64>>, TableLabeler) {
        let mut pool = Vec::new();
        let mut feats = Vec::new();
        let mut matches = Vec::new();
        for i in 0..n {
            let x = ((i * 37) % n) as f64 / n as f64;
            let id = format!("{i:04}");
            pool.push(pair(&id, &id, x));
            feats.push(vec![x, 1.0 - x]);
            if x > 0.7 {
                matches.push((RecordRef::new("a", id.clone()), RecordRef::new("b", id)));
            }
        }
        crate::blocking::sort_pool(&mut pool);
        let pos: BTreeMap<String, usize> = (0..n).map(|i| (format!("{i:04}"), i)).collect();
        let feats = pool.iter().map(|p| feats[pos[&p.a.id]].clone()).collect();
        (pool, feats, TableLabeler::new(matches))
    }

    fn small_committee() -> Vec<LearnerSpec> {
        super::super::learners::default_committee(1)
    }

    #[test]
    fn active_learning_runs_expected_rounds() {
        let (pool, feats, labeler) = toy_pool(800);
        let mut s = LabelSession::new(&labeler, None);
        let seeds = random_training_set(&pool, &mut s, 100, 3, &BTreeSet::new()).unwrap();
        let config = ActiveLearningConfig {
            target: 300,
            batch: 100,
            search_budget: 1,
            ..Default::default()
        };
        let sets = run_active_learning(
            &pool,
            &feats,
            seeds,
            &mut s,
            &small_committee(),
            &config,
            &BTreeSet::new(),
        )
        .unwrap();
        assert_eq!(sets.rounds, 2);
        assert_eq!(sets.core.len(), 300);
        assert_eq!(sets.augmented.len(), 360);
        assert!(!sets.exhausted);
        let keys: BTreeSet<_> = sets.augmented.iter().map(LabeledPair::key).collect();
        assert_eq!(keys.len(), 360);
    }

    #[test]
    fn label_budget_stops_active_learning() {
        let (pool, feats, labeler) = toy_pool(800);
        let mut s = LabelSession::new(&labeler, Some(150));
        let seeds = random_training_set(&pool, &mut s, 100, 3, &BTreeSet::new()).unwrap();
        let config = ActiveLearningConfig {
            target: 600,
            batch: 100,
            search_budget: 1,
            ..Default::default()
        };
        let sets = run_active_learning(
            &pool,
            &feats,
            seeds,
            &mut s,
            &small_committee(),
            &config,
            &BTreeSet::new(),
        )
        .unwrap();
        assert_eq!(sets.core.len(), 150);
        assert_eq!(sets.rounds, 1);
        assert!(sets.exhausted);
        assert_eq!(s.used(), 150);
    }
}
