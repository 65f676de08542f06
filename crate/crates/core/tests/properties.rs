use std::collections::BTreeSet;

use proptest::prelude::*;

use autodi::clustering::{build_clusters, filter_all, Correspondence, FilterAlgorithm, RecordRef};
use autodi::datamodel::Value;
use autodi::matching::active::population_variance;
use autodi::metrics::round_half_up;
use autodi::normalization::{normalize_value, NormalizationHints, Normalized, NormalizerKind, NumberLocale};
use autodi::similarity::{levenshtein, monge_elkan, string_similarity, StringMetric};

fn text() -> impl Strategy<Value = String> {
    "[a-c é]{0,10}"
}

/// Dataset offset, partner offset, two record indices and a score.
type Edge = (usize, usize, usize, usize, f64);

fn graph() -> impl Strategy<Value = (Vec<usize>, Vec<Edge>)> {
    (prop::collection::vec(1usize..12, 3), 0usize..80).prop_flat_map(|(sizes, n)| {
        let edge = (0usize..3, 0usize..2, 0usize..12, 0usize..12, 0.0f64..1.0);
        (Just(sizes), prop::collection::vec(edge, n))
    })
}

fn build(sizes: &[usize], edges: &[Edge]) -> (Vec<RecordRef>, Vec<Correspondence>) {
    let names = ["p", "q", "r"];
    let records = sizes
        .iter()
        .enumerate()
        .flat_map(|(d, n)| (0..*n).map(move |i| RecordRef::new(names[d], i.to_string())))
        .collect();
    let corrs = edges
        .iter()
        .map(|&(da, off, ia, ib, score)| {
            let db = (da + 1 + off) % 3;
            Correspondence {
                a: RecordRef::new(names[da], (ia % sizes[da]).to_string()),
                b: RecordRef::new(names[db], (ib % sizes[db]).to_string()),
                score,
            }
        })
        .collect();
    (records, corrs)
}

proptest! {
    #[test]
    fn similarities_stay_in_unit_interval(a in text(), b in text()) {
        for m in StringMetric::ALL {
            let s = string_similarity(&a, &b, m);
            prop_assert!((0.0..=1.0).contains(&s), "{m:?} {s}");
        }
    }

    #[test]
    fn similarities_are_symmetric(a in text(), b in text()) {
        for m in [StringMetric::LevenshteinSim, StringMetric::JaccardToken, StringMetric::CosineChar3] {
            prop_assert_eq!(string_similarity(&a, &b, m), string_similarity(&b, &a, m));
        }
    }

    #[test]
    fn self_similarity_is_one(a in text()) {
        for m in StringMetric::ALL {
            prop_assert_eq!(string_similarity(&a, &a, m), 1.0);
        }
        let tokens: Vec<String> = a.split_whitespace().map(String::from).collect();
        prop_assert_eq!(monge_elkan(&tokens, &tokens, StringMetric::JaroWinkler), 1.0);
    }

    #[test]
    fn levenshtein_triangle(a in text(), b in text(), c in text()) {
        prop_assert!(levenshtein(&a, &c) <= levenshtein(&a, &b) + levenshtein(&b, &c));
    }

    #[test]
    fn filtered_correspondences_are_one_to_one((sizes, edges) in graph()) {
        let (_, corrs) = build(&sizes, &edges);
        for alg in [FilterAlgorithm::Greedy, FilterAlgorithm::Exact] {
            let kept = filter_all(&corrs, alg);
            let mut seen = BTreeSet::new();
            for c in &kept {
                let pair = (c.a.dataset.clone(), c.b.dataset.clone());
                prop_assert!(seen.insert((pair.clone(), c.a.clone())));
                prop_assert!(seen.insert((pair, c.b.clone())));
            }
        }
    }

    #[test]
    fn exact_filter_never_scores_below_greedy((sizes, edges) in graph()) {
        let (_, corrs) = build(&sizes, &edges);
        let sum = |alg| filter_all(&corrs, alg).iter().map(|c| c.score).sum::<f64>();
        prop_assert!(sum(FilterAlgorithm::Exact) + 1e-9 >= sum(FilterAlgorithm::Greedy));
    }

    #[test]
    fn clusters_partition_records_and_conserve_counts((sizes, edges) in graph()) {
        let (records, corrs) = build(&sizes, &edges);
        let (clusters, _) = build_clusters(&filter_all(&corrs, FilterAlgorithm::Greedy), &records).unwrap();
        let members: Vec<&RecordRef> = clusters.iter().flat_map(|c| &c.members).collect();
        let unique: BTreeSet<&RecordRef> = members.iter().copied().collect();
        prop_assert_eq!(members.len(), records.len());
        prop_assert_eq!(unique.len(), records.len());
        let removed: usize = clusters.iter().map(|c| c.len() - 1).sum();
        prop_assert_eq!(clusters.len(), records.len() - removed);
        for c in &clusters {
            prop_assert!(c.len() <= 3);
            let datasets: BTreeSet<&str> = c.members.iter().map(|m| m.dataset.as_str()).collect();
            prop_assert_eq!(datasets.len(), c.len());
        }
    }

    #[test]
    fn numbers_normalize_idempotently(n in -1.0e9f64..1.0e9, comma in any::<bool>()) {
        let hints = NormalizationHints {
            number_locale: if comma { NumberLocale::Comma } else { NumberLocale::Dot },
            ..NormalizationHints::default()
        };
        let raw = Value::Str(autodi::datamodel::format_number((n * 100.0).round() / 100.0).replace('.', if comma { "," } else { "." }));
        assert_idempotent(&raw, NormalizerKind::NumericScale, &hints)?;
    }

    #[test]
    fn dates_normalize_idempotently(y in 1950i32..2030, m in 1u32..13, d in 1u32..29, day_first in any::<bool>()) {
        let hints = NormalizationHints { day_first, ..NormalizationHints::default() };
        let raw = if day_first { format!("{d:02}.{m:02}.{y}") } else { format!("{y}-{m:02}-{d:02}") };
        assert_idempotent(&Value::Str(raw), NormalizerKind::Date, &hints)?;
    }

    #[test]
    fn lists_normalize_idempotently(items in prop::collection::vec("[a-z]{1,6}", 1..5)) {
        let raw = Value::Str(items.join("; "));
        assert_idempotent(&raw, NormalizerKind::ListSplit, &NormalizationHints::default())?;
    }

    #[test]
    fn variance_ignores_order(mut xs in prop::collection::vec(0.0f64..1.0, 0..12)) {
        let v = population_variance(&xs);
        xs.reverse();
        prop_assert_eq!(v, population_variance(&xs));
        prop_assert!(v >= 0.0);
    }

    #[test]
    fn rounding_is_within_half_a_unit(x in -1000.0f64..1000.0, d in 0u32..4) {
        let r = round_half_up(x, d);
        prop_assert!((r - x).abs() <= 0.5 * 10f64.powi(-(d as i32)) + 1e-9);
    }
}

/// Normalizing a normalized value, typed or re-read from its text form,
/// changes nothing.
fn assert_idempotent(raw: &Value, kind: NormalizerKind, hints: &NormalizationHints) -> Result<(), TestCaseError> {
    let Normalized::Value(once) = normalize_value(raw, kind, hints) else {
        return Err(TestCaseError::fail(format!("{raw:?} did not parse")));
    };
    prop_assert_eq!(normalize_value(&once, kind, hints), Normalized::Value(once.clone()));
    let reread = match &once {
        Value::List(items) => Value::Str(items.join("|")),
        other => Value::Str(other.render()),
    };
    let plain = NormalizationHints::default();
    prop_assert_eq!(normalize_value(&reread, kind, &plain), Normalized::Value(once));
    Ok(())
}
