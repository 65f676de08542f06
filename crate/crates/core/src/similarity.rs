//! String similarity measures shared by schema and entity matching.
//!
//! All measures return values in `[0, 1]`. Two empty inputs are identical
//! (1.0); an empty input against a non-empty one scores 0.0.

use std::collections::{BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StringMetric {
    JaccardToken,
    JaroWinkler,
    LevenshteinSim,
    CosineChar3,
}

impl StringMetric {
    pub const ALL: [StringMetric; 4] = [
        StringMetric::JaccardToken,
        StringMetric::JaroWinkler,
        StringMetric::LevenshteinSim,
        StringMetric::CosineChar3,
    ];

    pub fn name(self) -> &'static str {
        match self {
            StringMetric::JaccardToken => "jaccard-token",
            StringMetric::JaroWinkler => "jaro-winkler",
            StringMetric::LevenshteinSim => "levenshtein-sim",
            StringMetric::CosineChar3 => "cosine-char3",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|m| m.name() == s)
    }
}

pub fn string_similarity(a: &str, b: &str, metric: StringMetric) -> f64 {
    match metric {
        StringMetric::JaccardToken => jaccard_tokens(a, b),
        StringMetric::JaroWinkler => jaro_winkler(a, b),
        StringMetric::LevenshteinSim => levenshtein_sim(a, b),
        StringMetric::CosineChar3 => cosine_char3(a, b),
    }
}

/// Edit distance over Unicode scalar values.
pub fn levenshtein(a: &str, b: &str) -> usize {
    let a: Vec<char> = a.chars().collect();
    let b: Vec<char> = b.chars().collect();
    if a.is_empty() {
        return b.len();
    }
    let mut prev: Vec<usize> = (0..=b.len()).collect();
    let mut curr = vec![0usize; b.len() + 1];
    for (i, ca) in a.iter().enumerate() {
        curr[0] = i + 1;
        for (j, cb) in b.iter().enumerate() {
            let substitution = prev[j] + usize::from(ca != cb);
            curr[j + 1] = substitution.min(prev[j + 1] + 1).min(curr[j] + 1);
        }
        std::mem::swap(&mut prev, &mut curr);
    }
    prev[b.len()]
}

/// `1 - distance / max(len)`.
pub fn levenshtein_sim(a: &str, b: &str) -> f64 {
    let longest = a.chars().count().max(b.chars().count());
    if longest == 0 {
        return 1.0;
    }
    1.0 - levenshtein(a, b) as f64 / longest as f64
}

pub fn jaro(a: &str, b: &str) -> f64 {
    let a: Vec<char> = a.chars().collect();
    let b: Vec<char> = b.chars().collect();
    if a.is_empty() && b.is_empty() {
        return 1.0;
    }
    if a.is_empty() || b.is_empty() {
        return 0.0;
    }
    let window = (a.len().max(b.len()) / 2).saturating_sub(1);
    let mut a_matched = vec![false; a.len()];
    let mut b_matched = vec![false; b.len()];
    let mut matches = 0usize;
    for (i, ca) in a.iter().enumerate() {
        let lo = i.saturating_sub(window);
        let hi = (i + window + 1).min(b.len());
        for j in lo..hi {
            if !b_matched[j] && b[j] == *ca {
                a_matched[i] = true;
                b_matched[j] = true;
                matches += 1;
                break;
            }
        }
    }
    if matches == 0 {
        return 0.0;
    }
    let a_seq = a.iter().zip(&a_matched).filter(|(_, m)| **m).map(|(c, _)| c);
    let b_seq = b.iter().zip(&b_matched).filter(|(_, m)| **m).map(|(c, _)| c);
    let half_transpositions = a_seq.zip(b_seq).filter(|(x, y)| x != y).count();
    let m = matches as f64;
    let t = (half_transpositions / 2) as f64;
    (m / a.len() as f64 + m / b.len() as f64 + (m - t) / m) / 3.0
}

/// Jaro-Winkler with prefix scale 0.1 and a common prefix of at most four
/// characters.
pub fn jaro_winkler(a: &str, b: &str) -> f64 {
    let j = jaro(a, b);
    let prefix = a.chars().zip(b.chars()).take_while(|(x, y)| x == y).take(4).count();
    j + prefix as f64 * 0.1 * (1.0 - j)
}

/// Jaccard coefficient over whitespace token sets.
pub fn jaccard_tokens(a: &str, b: &str) -> f64 {
    let ta: BTreeSet<&str> = a.split_whitespace().collect();
    let tb: BTreeSet<&str> = b.split_whitespace().collect();
    jaccard_sets(&ta, &tb)
}

pub fn jaccard_sets<T: Ord>(a: &BTreeSet<T>, b: &BTreeSet<T>) -> f64 {
    if a.is_empty() && b.is_empty() {
        return 1.0;
    }
    let inter = a.intersection(b).count();
    let union = a.len() + b.len() - inter;
    inter as f64 / union as f64
}

fn char_trigrams(s: &str) -> HashMap<Vec<char>, usize> {
    let chars: Vec<char> = s.chars().collect();
    let mut grams = HashMap::new();
    if chars.is_empty() {
        return grams;
    }
    if chars.len() < 3 {
        grams.insert(chars, 1);
        return grams;
    }
    for w in chars.windows(3) {
        *grams.entry(w.to_vec()).or_insert(0) += 1;
    }
    grams
}

/// Cosine over character-trigram frequency vectors. Strings shorter than
/// three characters form a single gram.
pub fn cosine_char3(a: &str, b: &str) -> f64 {
    let ga = char_trigrams(a);
    let gb = char_trigrams(b);
    if ga.is_empty() && gb.is_empty() {
        return 1.0;
    }
    if ga.is_empty() || gb.is_empty() {
        return 0.0;
    }
    let dot: usize = ga.iter().filter_map(|(g, c)| gb.get(g).map(|d| c * d)).sum();
    let na: usize = ga.values().map(|c| c * c).sum();
    let nb: usize = gb.values().map(|c| c * c).sum();
    if ga == gb {
        return 1.0;
    }
    (dot as f64 / ((na * nb) as f64).sqrt()).min(1.0)
}

/// Splits an attribute label into lowercase tokens on whitespace, `_`, `-`
/// and camelCase boundaries.
pub fn label_tokens(label: &str) -> Vec<String> {
    let mut tokens = Vec::new();
    let mut current = String::new();
    let mut prev_lower = false;
    for ch in label.chars() {
        if ch.is_whitespace() || ch == '_' || ch == '-' || ch == '.' {
            if !current.is_empty() {
                tokens.push(std::mem::take(&mut current));
            }
            prev_lower = false;
            continue;
        }
        if ch.is_uppercase() && prev_lower && !current.is_empty() {
            tokens.push(std::mem::take(&mut current));
        }
        prev_lower = ch.is_lowercase() || ch.is_ascii_digit();
        current.extend(ch.to_lowercase());
    }
    if !current.is_empty() {
        tokens.push(current);
    }
    tokens
}

/// Mean over tokens of `a` of the best inner similarity against tokens of
/// `b`. Not symmetric.
pub fn monge_elkan(a: &[String], b: &[String], inner: StringMetric) -> f64 {
    if a.is_empty() && b.is_empty() {
        return 1.0;
    }
    if a.is_empty() || b.is_empty() {
        return 0.0;
    }
    let total: f64 = a
        .iter()
        .map(|ta| b.iter().map(|tb| string_similarity(ta, tb, inner)).fold(0.0, f64::max))
        .sum();
    total / a.len() as f64
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identical_strings_score_one_for_every_metric() {
        for m in StringMetric::ALL {
            assert_eq!(string_similarity("abc", "abc", m), 1.0, "{m:?}");
        }
    }

    #[test]
    fn kitten_sitting() {
        assert_eq!(levenshtein("kitten", "sitting"), 3);
        assert!((levenshtein_sim("kitten", "sitting") - (1.0 - 3.0 / 7.0)).abs() < 1e-12);
    }

    #[test]
    fn jaccard_example() {
        assert_eq!(jaccard_tokens("a b c", "b c d"), 0.5);
    }

    #[test]
    fn empty_inputs() {
        for m in StringMetric::ALL {
            assert_eq!(string_similarity("", "", m), 1.0);
            assert_eq!(string_similarity("", "x", m), 0.0);
        }
    }

    #[test]
    fn jaro_winkler_reference_values() {
        // MARTHA/MARHTA: jaro 0.9444, prefix 3
        assert!((jaro("MARTHA", "MARHTA") - 0.944_444_444_444).abs() < 1e-9);
        assert!((jaro_winkler("MARTHA", "MARHTA") - 0.961_111_111_111).abs() < 1e-9);
        assert!((jaro_winkler("DIXON", "DICKSONX") - 0.813_333_333_333).abs() < 1e-9);
    }

    #[test]
    fn label_tokenizer_splits_all_separators() {
        assert_eq!(label_tokens("tracks_track-name"), vec!["tracks", "track", "name"]);
        assert_eq!(label_tokens("releaseYear"), vec!["release", "year"]);
        assert_eq!(label_tokens("ESRB"), vec!["esrb"]);
        assert_eq!(label_tokens("album length min"), vec!["album", "length", "min"]);
    }

    #[test]
    fn monge_elkan_identity_and_asymmetry() {
        let a = label_tokens("tracks_track-name");
        let b = label_tokens("tracks");
        assert_eq!(monge_elkan(&a, &a, StringMetric::JaroWinkler), 1.0);
        // every token of `b` has an exact partner in `a`, not vice versa
        assert_eq!(monge_elkan(&b, &a, StringMetric::LevenshteinSim), 1.0);
        assert!(monge_elkan(&a, &b, StringMetric::LevenshteinSim) < 1.0);
    }
}
