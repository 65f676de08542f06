//! Match classifiers: L2-regularized logistic regression, bagged decision
//! trees and gradient-boosted trees, with seeded randomized hyperparameter
//! search under stratified cross-validation.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::MatchingError;

/// Variant order doubles as the family-name tie-break order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    BaggedTrees,
    BoostedTrees,
    RegularizedLinear,
}

impl Family {
    pub fn name(self) -> &'static str {
        match self {
            Family::BaggedTrees => "bagged-trees",
            Family::BoostedTrees => "boosted-trees",
            Family::RegularizedLinear => "regularized-linear",
        }
    }

    fn search_space(self) -> &'static [(&'static str, &'static [f64])] {
        match self {
            Family::RegularizedLinear => &[
                ("l2", &[1e-2, 1e-4, 1e-3, 1e-1, 1.0]),
                ("iterations", &[300.0, 150.0, 600.0]),
            ],
            Family::BaggedTrees => &[
                ("trees", &[40.0, 20.0, 60.0]),
                ("min_leaf", &[1.0, 2.0, 4.0]),
                ("max_features", &[0.6, 0.4, 0.8, 1.0]),
                ("max_depth", &[8.0, 4.0, 12.0]),
            ],
            Family::BoostedTrees => &[
                ("rounds", &[60.0, 30.0, 100.0]),
                ("max_depth", &[3.0, 2.0, 4.0]),
                ("min_leaf", &[1.0, 2.0, 4.0]),
                ("learning_rate", &[0.1, 0.05, 0.3]),
            ],
        }
    }
}

pub type Hyperparameters = BTreeMap<String, f64>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LearnerSpec {
    pub name: String,
    pub family: Family,
    /// Hyperparameters excluded from the search.
    #[serde(default)]
    pub fixed: Hyperparameters,
    pub seed: u64,
}

impl LearnerSpec {
    pub fn new(name: &str, family: Family, fixed: &[(&str, f64)], seed: u64) -> Self {
        Self {
            name: name.to_string(),
            family,
            fixed: fixed.iter().map(|(k, v)| (k.to_string(), *v)).collect(),
            seed,
        }
    }
}

/// Five members over three families; the two tree ensembles of each kind
/// differ in a fixed hyperparameter and their seed.
pub fn default_committee(seed: u64) -> Vec<LearnerSpec> {
    vec![
        LearnerSpec::new("linear", Family::RegularizedLinear, &[], seed),
        LearnerSpec::new(
            "bagged-shallow",
            Family::BaggedTrees,
            &[("max_depth", 6.0)],
            seed.wrapping_add(1),
        ),
        LearnerSpec::new(
            "bagged-deep",
            Family::BaggedTrees,
            &[("max_depth", 12.0)],
            seed.wrapping_add(2),
        ),
        LearnerSpec::new(
            "boosted-slow",
            Family::BoostedTrees,
            &[("learning_rate", 0.1)],
            seed.wrapping_add(3),
        ),
        LearnerSpec::new(
            "boosted-fast",
            Family::BoostedTrees,
            &[("learning_rate", 0.3)],
            seed.wrapping_add(4),
        ),
    ]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Node {
    Leaf {
        value: f64,
    },
    Split {
        feature: usize,
        threshold: f64,
        left: usize,
        right: usize,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Tree {
    pub nodes: Vec<Node>,
}

impl Tree {
    pub fn predict(&self, x: &[f64]) -> f64 {
        let mut i = 0;
        loop {
            match &self.nodes[i] {
                Node::Leaf { value } => return *value,
                Node::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => i = if x[*feature] <= *threshold { *left } else { *right },
            }
        }
    }
}

/// A trained scorer producing match probabilities.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "snake_case")]
pub enum Model {
    Linear {
        weights: Vec<f64>,
        bias: f64,
    },
    Forest {
        trees: Vec<Tree>,
    },
    Boosted {
        base: f64,
        learning_rate: f64,
        trees: Vec<Tree>,
    },
    Constant {
        probability: f64,
    },
}

fn sigmoid(z: f64) -> f64 {
    1.0 / (1.0 + (-z).exp())
}

impl Model {
    pub fn predict(&self, x: &[f64]) -> f64 {
        match self {
            Model::Linear { weights, bias } => sigmoid(bias + weights.iter().zip(x).map(|(w, v)| w * v).sum::<f64>()),
            Model::Forest { trees } => trees.iter().map(|t| t.predict(x)).sum::<f64>() / trees.len().max(1) as f64,
            Model::Boosted {
                base,
                learning_rate,
                trees,
            } => sigmoid(base + learning_rate * trees.iter().map(|t| t.predict(x)).sum::<f64>()),
            Model::Constant { probability } => *probability,
        }
    }

    pub fn predict_all(&self, xs: &[Vec<f64>]) -> Vec<f64> {
        xs.par_iter().map(|x| self.predict(x)).collect()
    }
}

/// Weights `n / (2 n_c)` per class.
pub fn class_weights(y: &[bool]) -> Vec<f64> {
    let n = y.len() as f64;
    let pos = y.iter().filter(|v| **v).count() as f64;
    let neg = n - pos;
    y.iter()
        .map(|&v| {
            let c = if v { pos } else { neg };
            if c == 0.0 {
                1.0
            } else {
                n / (2.0 * c)
            }
        })
        .collect()
}

struct TreeParams {
    max_depth: usize,
    min_leaf: usize,
    max_features: f64,
    lambda: f64,
}

/// Sample statistics summed over a node; the score of a node is
/// `score(s1, s2)`, larger is better.
#[derive(Clone, Copy)]
enum Criterion {
    /// s1 = weighted positives, s2 = weight. Negated weighted Gini impurity.
    Gini,
    /// s1 = gradient sum, s2 = hessian sum. Newton gain.
    Newton,
}

impl Criterion {
    fn score(self, s1: f64, s2: f64, lambda: f64) -> f64 {
        match self {
            Criterion::Gini => {
                if s2 <= 0.0 {
                    0.0
                } else {
                    (s1 * s1 + (s2 - s1) * (s2 - s1)) / s2
                }
            }
            Criterion::Newton => s1 * s1 / (s2 + lambda),
        }
    }

    fn leaf(self, s1: f64, s2: f64, lambda: f64) -> f64 {
        match self {
            Criterion::Gini => {
                if s2 <= 0.0 {
                    0.5
                } else {
                    s1 / s2
                }
            }
            Criterion::Newton => -s1 / (s2 + lambda),
        }
    }
}

struct TreeBuilder<'a> {
    x: &'a [Vec<f64>],
    labels: &'a [bool],
    s1: &'a [f64],
    s2: &'a [f64],
    criterion: Criterion,
    params: &'a TreeParams,
    rng: ChaCha8Rng,
    nodes: Vec<Node>,
}

impl TreeBuilder<'_> {
    fn build(&mut self, idx: &mut [usize], depth: usize) -> usize {
        let t1: f64 = idx.iter().map(|&i| self.s1[i]).sum();
        let t2: f64 = idx.iter().map(|&i| self.s2[i]).sum();
        let me = self.nodes.len();
        self.nodes.push(Node::Leaf {
            value: self.criterion.leaf(t1, t2, self.params.lambda),
        });
        let positives = idx.iter().filter(|&&i| self.labels[i]).count();
        let pure = positives == 0 || positives == idx.len();
        if pure || depth >= self.params.max_depth || idx.len() < 2 * self.params.min_leaf.max(1) {
            return me;
        }
        let d = self.x[0].len();
        let mut features: Vec<usize> = (0..d).collect();
        let k = ((self.params.max_features * d as f64).ceil() as usize).clamp(1, d);
        if k < d {
            features.partial_shuffle(&mut self.rng, k);
            features.truncate(k);
            features.sort_unstable();
        }
        let parent = self.criterion.score(t1, t2, self.params.lambda);
        let mut best: Option<(f64, usize, f64)> = None;
        for &f in &features {
            idx.sort_by(|&a, &b| self.x[a][f].total_cmp(&self.x[b][f]).then(a.cmp(&b)));
            let (mut l1, mut l2) = (0.0, 0.0);
            for pos in 0..idx.len() - 1 {
                let i = idx[pos];
                l1 += self.s1[i];
                l2 += self.s2[i];
                let left_n = pos + 1;
                let (v, next) = (self.x[i][f], self.x[idx[pos + 1]][f]);
                if v == next || left_n < self.params.min_leaf || idx.len() - left_n < self.params.min_leaf {
                    continue;
                }
                let gain = self.criterion.score(l1, l2, self.params.lambda)
                    + self.criterion.score(t1 - l1, t2 - l2, self.params.lambda)
                    - parent;
                // zero-gain splits are allowed on impure nodes so that
                // interactions such as XOR remain learnable
                if gain > -1e-12 && best.is_none_or(|(g, _, _)| gain > g + 1e-12) {
                    best = Some((gain, f, (v + next) / 2.0));
                }
            }
        }
        let Some((_, feature, threshold)) = best else {
            return me;
        };
        idx.sort_by(|&a, &b| {
            (self.x[a][feature] > threshold)
                .cmp(&(self.x[b][feature] > threshold))
                .then(a.cmp(&b))
        });
        let split = idx.iter().take_while(|&&i| self.x[i][feature] <= threshold).count();
        let (left_idx, right_idx) = idx.split_at_mut(split);
        let left = self.build(left_idx, depth + 1);
        let right = self.build(right_idx, depth + 1);
        self.nodes[me] = Node::Split {
            feature,
            threshold,
            left,
            right,
        };
        me
    }
}

#[allow(clippy::too_many_arguments)]
fn grow_tree(
    x: &[Vec<f64>],
    labels: &[bool],
    s1: &[f64],
    s2: &[f64],
    mut idx: Vec<usize>,
    criterion: Criterion,
    params: &TreeParams,
    seed: u64,
) -> Tree {
    let mut b = TreeBuilder {
        x,
        labels,
        s1,
        s2,
        criterion,
        params,
        rng: ChaCha8Rng::seed_from_u64(seed),
        nodes: Vec::new(),
    };
    b.build(&mut idx, 0);
    Tree { nodes: b.nodes }
}

fn get(h: &Hyperparameters, key: &str, default: f64) -> f64 {
    h.get(key).copied().unwrap_or(default)
}

fn fit_linear(x: &[Vec<f64>], y: &[bool], w: &[f64], h: &Hyperparameters) -> Model {
    let d = x[0].len();
    let l2 = get(h, "l2", 1e-2);
    let iterations = get(h, "iterations", 300.0) as usize;
    let total_w: f64 = w.iter().sum();
    let mut weights = vec![0.0; d];
    let mut bias = 0.0;
    let lr = 0.5;
    for _ in 0..iterations {
        let mut grad = vec![0.0; d];
        let mut grad_b = 0.0;
        for ((xi, &yi), &wi) in x.iter().zip(y).zip(w) {
            let p = sigmoid(bias + weights.iter().zip(xi).map(|(a, b)| a * b).sum::<f64>());
            let err = wi * (p - if yi { 1.0 } else { 0.0 });
            for (g, v) in grad.iter_mut().zip(xi) {
                *g += err * v;
            }
            grad_b += err;
        }
        for (wt, g) in weights.iter_mut().zip(&grad) {
            *wt -= lr * (g / total_w + l2 * *wt);
        }
        bias -= lr * grad_b / total_w;
    }
    Model::Linear { weights, bias }
}

fn fit_forest(x: &[Vec<f64>], y: &[bool], w: &[f64], h: &Hyperparameters, seed: u64) -> Model {
    let n = x.len();
    let params = TreeParams {
        max_depth: get(h, "max_depth", 8.0) as usize,
        min_leaf: get(h, "min_leaf", 1.0) as usize,
        max_features: get(h, "max_features", 0.6),
        lambda: 0.0,
    };
    let trees_n = get(h, "trees", 40.0) as usize;
    let s1: Vec<f64> = y.iter().zip(w).map(|(&yi, &wi)| if yi { wi } else { 0.0 }).collect();
    let trees = (0..trees_n)
        .into_par_iter()
        .map(|t| {
            let tree_seed = seed.wrapping_mul(0x9E37_79B9_7F4A_7C15).wrapping_add(t as u64);
            let mut rng = ChaCha8Rng::seed_from_u64(tree_seed);
            let idx: Vec<usize> = (0..n).map(|_| rng.random_range(0..n)).collect();
            grow_tree(x, y, &s1, w, idx, Criterion::Gini, &params, tree_seed ^ 0x5bd1_e995)
        })
        .collect();
    Model::Forest { trees }
}

fn fit_boosted(x: &[Vec<f64>], y: &[bool], w: &[f64], h: &Hyperparameters, seed: u64) -> Model {
    let params = TreeParams {
        max_depth: get(h, "max_depth", 3.0) as usize,
        min_leaf: get(h, "min_leaf", 2.0) as usize,
        max_features: 1.0,
        lambda: 1.0,
    };
    let rounds = get(h, "rounds", 60.0) as usize;
    let learning_rate = get(h, "learning_rate", 0.1);
    let pos: f64 = y.iter().zip(w).filter(|(v, _)| **v).map(|(_, wi)| wi).sum();
    let total: f64 = w.iter().sum();
    let prior = (pos / total).clamp(1e-6, 1.0 - 1e-6);
    let base = (prior / (1.0 - prior)).ln();
    let mut f = vec![base; x.len()];
    let mut trees = Vec::with_capacity(rounds);
    let all: Vec<usize> = (0..x.len()).collect();
    for r in 0..rounds {
        let mut g = Vec::with_capacity(x.len());
        let mut hs = Vec::with_capacity(x.len());
        for i in 0..x.len() {
            let p = sigmoid(f[i]);
            let target = if y[i] { 1.0 } else { 0.0 };
            g.push(w[i] * (p - target));
            hs.push(w[i] * (p * (1.0 - p)).max(1e-12));
        }
        let tree = grow_tree(
            x,
            y,
            &g,
            &hs,
            all.clone(),
            Criterion::Newton,
            &params,
            seed.wrapping_add(r as u64),
        );
        for (fi, xi) in f.iter_mut().zip(x) {
            *fi += learning_rate * tree.predict(xi);
        }
        trees.push(tree);
    }
    Model::Boosted {
        base,
        learning_rate,
        trees,
    }
}

/// Fits one model. Single-class data yields a constant scorer.
pub fn fit(family: Family, h: &Hyperparameters, x: &[Vec<f64>], y: &[bool], seed: u64) -> Model {
    let pos = y.iter().filter(|v| **v).count();
    if x.is_empty() || pos == 0 || pos == y.len() {
        return Model::Constant {
            probability: if pos > 0 { 1.0 } else { 0.0 },
        };
    }
    let w = class_weights(y);
    match family {
        Family::RegularizedLinear => fit_linear(x, y, &w, h),
        Family::BaggedTrees => fit_forest(x, y, &w, h, seed),
        Family::BoostedTrees => fit_boosted(x, y, &w, h, seed),
    }
}

/// F1 of thresholded scores.
pub fn f1_at(scores: &[f64], y: &[bool], threshold: f64) -> f64 {
    let (mut tp, mut fp, mut fn_) = (0usize, 0usize, 0usize);
    for (s, &t) in scores.iter().zip(y) {
        match (*s >= threshold, t) {
            (true, true) => tp += 1,
            (true, false) => fp += 1,
            (false, true) => fn_ += 1,
            _ => {}
        }
    }
    if tp == 0 {
        return 0.0;
    }
    2.0 * tp as f64 / (2 * tp + fp + fn_) as f64
}

/// Fold index per sample, stratified by class.
pub fn stratified_folds(y: &[bool], k: usize, seed: u64) -> Vec<usize> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut folds = vec![0usize; y.len()];
    for class in [true, false] {
        let mut idx: Vec<usize> = (0..y.len()).filter(|&i| y[i] == class).collect();
        idx.shuffle(&mut rng);
        for (pos, i) in idx.into_iter().enumerate() {
            folds[i] = pos % k;
        }
    }
    folds
}

/// Pooled out-of-fold F1 at threshold 0.5.
pub fn cross_validated_f1(family: Family, h: &Hyperparameters, x: &[Vec<f64>], y: &[bool], k: usize, seed: u64) -> f64 {
    let folds = stratified_folds(y, k, seed);
    let mut scores = vec![0.0; x.len()];
    for fold in 0..k {
        let train: Vec<usize> = (0..x.len()).filter(|&i| folds[i] != fold).collect();
        let test: Vec<usize> = (0..x.len()).filter(|&i| folds[i] == fold).collect();
        if test.is_empty() {
            continue;
        }
        let tx: Vec<Vec<f64>> = train.iter().map(|&i| x[i].clone()).collect();
        let ty: Vec<bool> = train.iter().map(|&i| y[i]).collect();
        let model = fit(family, h, &tx, &ty, seed);
        for &i in &test {
            scores[i] = model.predict(&x[i]);
        }
    }
    f1_at(&scores, y, 0.5)
}

/// Hyperparameter draws: the first uses the first value of every range, the
/// rest are sampled. Fixed values override both.
pub fn draw_hyperparameters(spec: &LearnerSpec, budget: usize) -> Vec<Hyperparameters> {
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed ^ 0xA5A5_5A5A);
    let space = spec.family.search_space();
    (0..budget.max(1))
        .map(|d| {
            let mut h: Hyperparameters = space
                .iter()
                .map(|(k, values)| {
                    let v = if d == 0 {
                        values[0]
                    } else {
                        values[rng.random_range(0..values.len())]
                    };
                    (k.to_string(), v)
                })
                .collect();
            for (k, v) in &spec.fixed {
                h.insert(k.clone(), *v);
            }
            h
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainedMember {
    pub name: String,
    pub family: Family,
    pub hyperparameters: Hyperparameters,
    pub cv_f1: f64,
    pub model: Model,
}

pub const CV_FOLDS: usize = 3;

/// Tunes and fits every committee member on the labeled data.
pub fn train_committee(
    x: &[Vec<f64>],
    y: &[bool],
    specs: &[LearnerSpec],
    search_budget: usize,
) -> Result<Vec<TrainedMember>, MatchingError> {
    let pos = y.iter().filter(|v| **v).count();
    if pos == 0 || pos == y.len() {
        return Err(MatchingError::SingleClass {
            examples: y.len(),
            positives: pos,
        });
    }
    let members = specs
        .par_iter()
        .map(|spec| {
            let draws = draw_hyperparameters(spec, search_budget);
            let scored: Vec<(f64, Hyperparameters)> = draws
                .into_par_iter()
                .map(|h| (cross_validated_f1(spec.family, &h, x, y, CV_FOLDS, spec.seed), h))
                .collect();
            let (cv_f1, hyperparameters) = scored
                .into_iter()
                .reduce(|best, cur| if cur.0 > best.0 { cur } else { best })
                .expect("at least one draw");
            let model = fit(spec.family, &hyperparameters, x, y, spec.seed);
            TrainedMember {
                name: spec.name.clone(),
                family: spec.family,
                hyperparameters,
                cv_f1,
                model,
            }
        })
        .collect();
    Ok(members)
}

/// Refits members with their tuned hyperparameters on other data.
pub fn refit(members: &[TrainedMember], specs: &[LearnerSpec], x: &[Vec<f64>], y: &[bool]) -> Vec<TrainedMember> {
    members
        .par_iter()
        .map(|m| {
            let seed = specs.iter().find(|s| s.name == m.name).map(|s| s.seed).unwrap_or(0);
            TrainedMember {
                model: fit(m.family, &m.hyperparameters, x, y, seed),
                ..m.clone()
            }
        })
        .collect()
}
