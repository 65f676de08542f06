//! Choice of training variant, committee member and threshold by F1 on the
//! validation sample.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use super::learners::{f1_at, Family, Hyperparameters, Model, TrainedMember};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum TrainingVariant {
    #[serde(rename = "core")]
    Core,
    #[serde(rename = "core+random-augmented")]
    Augmented,
}

/// A selected scorer with its decision threshold.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatcherModel {
    pub member: String,
    pub family: Family,
    pub hyperparameters: Hyperparameters,
    pub threshold: f64,
    pub training_variant: TrainingVariant,
    pub validation_f1: f64,
    pub feature_names: Vec<String>,
    pub model: Model,
}

impl MatcherModel {
    pub fn score(&self, x: &[f64]) -> f64 {
        self.model.predict(x)
    }

    pub fn is_match(&self, x: &[f64]) -> bool {
        self.score(x) >= self.threshold
    }
}

/// `step, 2·step, …` strictly inside (0, 1), rounded to avoid drift.
pub fn threshold_grid(step: f64) -> Vec<f64> {
    let n = (1.0 / step).round() as usize;
    (1..n).map(|i| ((i as f64 * step) * 1e6).round() / 1e6).collect()
}

/// One trained member under one training variant, in committee order.
#[derive(Debug, Clone)]
pub struct SelectionCandidate {
    pub variant: TrainingVariant,
    pub member_index: usize,
    pub member: TrainedMember,
}

/// Best (F1, threshold) of one score vector; ties go to the higher threshold.
pub fn best_threshold(scores: &[f64], y: &[bool], grid: &[f64]) -> (f64, f64) {
    let mut best = (f64::NEG_INFINITY, 0.5);
    for &t in grid {
        let f = f1_at(scores, y, t);
        if f > best.0 + 1e-12 || ((f - best.0).abs() <= 1e-12 && t > best.1) {
            best = (f, t);
        }
    }
    best
}

/// Argmax of validation F1 over candidates × thresholds. Ties: higher
/// threshold, family name, member index, core before augmented. Without both
/// classes in validation the first candidate is kept at threshold 0.5.
pub fn select_model(
    candidates: &[SelectionCandidate],
    validation_x: &[Vec<f64>],
    validation_y: &[bool],
    grid: &[f64],
    feature_names: Vec<String>,
) -> Option<MatcherModel> {
    let first = candidates.first()?;
    let pos = validation_y.iter().filter(|v| **v).count();
    let build = |c: &SelectionCandidate, threshold: f64, f1: f64| MatcherModel {
        member: c.member.name.clone(),
        family: c.member.family,
        hyperparameters: c.member.hyperparameters.clone(),
        threshold,
        training_variant: c.variant,
        validation_f1: f1,
        feature_names: feature_names.clone(),
        model: c.member.model.clone(),
    };
    if pos == 0 || pos == validation_y.len() {
        log::warn!("validation sample holds a single class; keeping the first model at threshold 0.5");
        let scores = first.member.model.predict_all(validation_x);
        return Some(build(first, 0.5, f1_at(&scores, validation_y, 0.5)));
    }
    let scored: Vec<(f64, f64, &SelectionCandidate)> = candidates
        .iter()
        .map(|c| {
            let scores = c.member.model.predict_all(validation_x);
            let (f1, t) = best_threshold(&scores, validation_y, grid);
            (f1, t, c)
        })
        .collect();
    let better = |x: &(f64, f64, &SelectionCandidate), y: &(f64, f64, &SelectionCandidate)| -> Ordering {
        if (x.0 - y.0).abs() > 1e-12 {
            return x.0.total_cmp(&y.0);
        }
        x.1.total_cmp(&y.1)
            .then_with(|| y.2.member.family.cmp(&x.2.member.family))
            .then_with(|| y.2.member_index.cmp(&x.2.member_index))
            .then_with(|| y.2.variant.cmp(&x.2.variant))
    };
    let best = scored
        .iter()
        .copied()
        .reduce(|a, b| if better(&b, &a) == Ordering::Greater { b } else { a })?;
    Some(build(best.2, best.1, best.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn member(name: &str, family: Family, model: Model) -> TrainedMember {
        TrainedMember {
            name: name.into(),
            family,
            hyperparameters: Hyperparameters::new(),
            cv_f1: 0.0,
            model,
        }
    }

    fn identity() -> Model {
        Model::Linear {
            weights: vec![1.0],
            bias: 0.0,
        }
    }

    #[test]
    fn grid_has_nineteen_points() {
        let g = threshold_grid(0.05);
        assert_eq!(g.len(), 19);
        assert_eq!(g[0], 0.05);
        assert_eq!(g[18], 0.95);
    }

    #[test]
    fn perfect_separation_picks_highest_threshold_in_gap() {
        // linear identity => sigmoid(x); positives score ~.73, negatives .5
        let x = vec![vec![1.0], vec![1.0], vec![0.0], vec![0.0]];
        let y = vec![true, true, false, false];
        let c = vec![SelectionCandidate {
            variant: TrainingVariant::Core,
            member_index: 0,
            member: member("m", Family::RegularizedLinear, identity()),
        }];
        let m = select_model(&c, &x, &y, &threshold_grid(0.05), vec![]).unwrap();
        assert_eq!(m.validation_f1, 1.0);
        assert_eq!(m.threshold, 0.7);
    }

    #[test]
    fn all_positive_on_balanced_validation_is_two_thirds() {
        let scores = vec![0.9, 0.9, 0.9, 0.9];
        let y = vec![true, true, false, false];
        assert!((f1_at(&scores, &y, 0.05) - 2.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn better_variant_wins_and_ties_prefer_core() {
        let x = vec![vec![1.0], vec![0.0], vec![0.0]];
        let y = vec![true, false, true];
        let good = member("g", Family::BoostedTrees, Model::Constant { probability: 0.9 });
        let c = vec![
            SelectionCandidate {
                variant: TrainingVariant::Core,
                member_index: 0,
                member: member("l", Family::RegularizedLinear, identity()),
            },
            SelectionCandidate {
                variant: TrainingVariant::Augmented,
                member_index: 1,
                member: good.clone(),
            },
            SelectionCandidate {
                variant: TrainingVariant::Core,
                member_index: 1,
                member: good,
            },
        ];
        let m = select_model(&c, &x, &y, &threshold_grid(0.05), vec![]).unwrap();
        assert_eq!(m.member, "g");
        assert_eq!(m.training_variant, TrainingVariant::Core);
        assert!((m.validation_f1 - 0.8).abs() < 1e-12);
    }

    #[test]
    fn single_class_validation_falls_back() {
        let c = vec![SelectionCandidate {
            variant: TrainingVariant::Core,
            member_index: 0,
            member: member("m", Family::RegularizedLinear, identity()),
        }];
        let m = select_model(&c, &[vec![1.0]], &[true], &threshold_grid(0.05), vec![]).unwrap();
        assert_eq!(m.threshold, 0.5);
    }
}
