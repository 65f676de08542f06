//! Entity clusters from pairwise record correspondences.
//!
//! Correspondences are first filtered to a one-to-one matching per dataset
//! pair. Clusters are then grown by merging correspondences in descending
//! score order, skipping any merge that would put two records of the same
//! dataset into one cluster. With three or more sources, per-pair matchings
//! alone can chain such records together (a1-b1, b1-c1, c1-a2).

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::io::{BufRead, Write};
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct RecordRef {
    pub dataset: String,
    pub id: String,
}

impl RecordRef {
    pub fn new(dataset: impl Into<String>, id: impl Into<String>) -> Self {
        Self {
            dataset: dataset.into(),
            id: id.into(),
        }
    }

    /// Parses `dataset:id`, splitting at the first colon.
    pub fn parse(s: &str) -> Option<Self> {
        let (d, i) = s.split_once(':')?;
        Some(Self::new(d, i))
    }
}

impl fmt::Display for RecordRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.dataset, self.id)
    }
}

/// A scored link between records of two different datasets.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Correspondence {
    pub a: RecordRef,
    pub b: RecordRef,
    pub score: f64,
}

impl Correspondence {
    /// Orders the endpoints by dataset name.
    pub fn canonical(mut self) -> Self {
        if self.a.dataset > self.b.dataset {
            std::mem::swap(&mut self.a, &mut self.b);
        }
        self
    }
}

fn by_score_then_ids(x: &Correspondence, y: &Correspondence) -> std::cmp::Ordering {
    y.score
        .total_cmp(&x.score)
        .then_with(|| x.a.cmp(&y.a))
        .then_with(|| x.b.cmp(&y.b))
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FilterAlgorithm {
    #[default]
    Greedy,
    Exact,
}

/// One-to-one filtering of the correspondences of one dataset pair.
pub fn bipartite_filter(correspondences: &[Correspondence], algorithm: FilterAlgorithm) -> Vec<Correspondence> {
    let mut out = match algorithm {
        FilterAlgorithm::Greedy => greedy_matching(correspondences),
        FilterAlgorithm::Exact => exact_matching(correspondences),
    };
    out.sort_by(by_score_then_ids);
    out
}

fn greedy_matching(correspondences: &[Correspondence]) -> Vec<Correspondence> {
    let mut sorted: Vec<&Correspondence> = correspondences.iter().collect();
    sorted.sort_by(|x, y| by_score_then_ids(x, y));
    let mut used_a = std::collections::HashSet::new();
    let mut used_b = std::collections::HashSet::new();
    let mut kept = Vec::new();
    for c in sorted {
        if used_a.contains(&c.a) || used_b.contains(&c.b) {
            continue;
        }
        used_a.insert(c.a.clone());
        used_b.insert(c.b.clone());
        kept.push(c.clone());
    }
    kept
}

/// Maximum-weight matching, solved exactly per connected component.
fn exact_matching(correspondences: &[Correspondence]) -> Vec<Correspondence> {
    let mut a_index: BTreeMap<&RecordRef, usize> = BTreeMap::new();
    let mut b_index: BTreeMap<&RecordRef, usize> = BTreeMap::new();
    for c in correspondences {
        let n = a_index.len();
        a_index.entry(&c.a).or_insert(n);
        let n = b_index.len();
        b_index.entry(&c.b).or_insert(n);
    }
    let na = a_index.len();
    let mut dsu = Dsu::new(na + b_index.len());
    for c in correspondences {
        dsu.union(a_index[&c.a], na + b_index[&c.b]);
    }
    let mut components: BTreeMap<usize, Vec<&Correspondence>> = BTreeMap::new();
    for c in correspondences {
        components.entry(dsu.find(a_index[&c.a])).or_default().push(c);
    }
    let mut kept = Vec::new();
    for edges in components.values() {
        let mut rows: BTreeMap<&RecordRef, usize> = BTreeMap::new();
        let mut cols: BTreeMap<&RecordRef, usize> = BTreeMap::new();
        for c in edges {
            let n = rows.len();
            rows.entry(&c.a).or_insert(n);
            let n = cols.len();
            cols.entry(&c.b).or_insert(n);
        }
        let n = rows.len().max(cols.len());
        let mut weight = vec![vec![0.0f64; n]; n];
        let mut edge_at: HashMap<(usize, usize), &Correspondence> = HashMap::new();
        for c in edges {
            let (i, j) = (rows[&c.a], cols[&c.b]);
            if edge_at.get(&(i, j)).is_none_or(|e| c.score > e.score) {
                weight[i][j] = c.score.max(0.0);
                edge_at.insert((i, j), c);
            }
        }
        let cost: Vec<Vec<f64>> = weight.iter().map(|r| r.iter().map(|w| -w).collect()).collect();
        for (i, j) in hungarian(&cost).into_iter().enumerate() {
            if let Some(c) = edge_at.get(&(i, j)) {
                if c.score > 0.0 {
                    kept.push((*c).clone());
                }
            }
        }
    }
    kept
}

/// Minimum-cost perfect assignment on a square matrix; returns the column
/// assigned to each row.
pub fn hungarian(cost: &[Vec<f64>]) -> Vec<usize> {
    let n = cost.len();
    if n == 0 {
        return Vec::new();
    }
    let inf = f64::INFINITY;
    let mut u = vec![0.0; n + 1];
    let mut v = vec![0.0; n + 1];
    let mut p = vec![0usize; n + 1];
    let mut way = vec![0usize; n + 1];
    for i in 1..=n {
        p[0] = i;
        let mut j0 = 0usize;
        let mut minv = vec![inf; n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[j0] = true;
            let i0 = p[j0];
            let mut delta = inf;
            let mut j1 = 0usize;
            for j in 1..=n {
                if !used[j] {
                    let cur = cost[i0 - 1][j - 1] - u[i0] - v[j];
                    if cur < minv[j] {
                        minv[j] = cur;
                        way[j] = j0;
                    }
                    if minv[j] < delta {
                        delta = minv[j];
                        j1 = j;
                    }
                }
            }
            for j in 0..=n {
                if used[j] {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if p[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }
    let mut assignment = vec![0usize; n];
    for j in 1..=n {
        if p[j] > 0 {
            assignment[p[j] - 1] = j - 1;
        }
    }
    assignment
}

/// Filters every dataset pair independently.
pub fn filter_all(correspondences: &[Correspondence], algorithm: FilterAlgorithm) -> Vec<Correspondence> {
    let mut by_pair: BTreeMap<(String, String), Vec<Correspondence>> = BTreeMap::new();
    for c in correspondences {
        let c = c.clone().canonical();
        by_pair
            .entry((c.a.dataset.clone(), c.b.dataset.clone()))
            .or_default()
            .push(c);
    }
    let groups: Vec<Vec<Correspondence>> = by_pair.into_values().collect();
    let mut out: Vec<Correspondence> = groups
        .par_iter()
        .map(|g| bipartite_filter(g, algorithm))
        .collect::<Vec<_>>()
        .into_iter()
        .flatten()
        .collect();
    out.sort_by(by_score_then_ids);
    out
}

struct Dsu {
    parent: Vec<usize>,
}

impl Dsu {
    fn new(n: usize) -> Self {
        Self {
            parent: (0..n).collect(),
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) -> usize {
        let (ra, rb) = (self.find(a), self.find(b));
        let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
        self.parent[hi] = lo;
        lo
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EntityCluster {
    /// Sorted members.
    pub members: Vec<RecordRef>,
    pub pair_scores: Vec<Correspondence>,
}

impl EntityCluster {
    /// Smallest member, rendered as `dataset:id`.
    pub fn id(&self) -> String {
        self.members[0].to_string()
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }
}

#[derive(Debug, Error)]
pub enum ClusterError {
    #[error("correspondence refers to unknown record {0}")]
    UnknownRecord(RecordRef),
    #[error("cluster {0} holds two records of dataset `{1}`")]
    DuplicateSource(String, String),
    #[error("cluster file {path}: {message}")]
    Format { path: String, message: String },
    #[error("cluster file I/O: {0}")]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ClusterStats {
    pub clusters: usize,
    pub non_singleton: usize,
    /// Cluster size → count.
    pub size_histogram: BTreeMap<usize, usize>,
    /// Share of pairs among non-singleton clusters.
    pub pair_share: Option<f64>,
    /// Correspondences skipped because they would join two records of one
    /// dataset.
    pub rejected_conflicts: usize,
}

/// Connected components over the filtered correspondences, merged in
/// descending score order under the one-record-per-dataset constraint.
/// `records` lists every record of every dataset; unmatched records become
/// singletons.
pub fn build_clusters(
    correspondences: &[Correspondence],
    records: &[RecordRef],
) -> Result<(Vec<EntityCluster>, ClusterStats), ClusterError> {
    let index: HashMap<&RecordRef, usize> = records.iter().enumerate().map(|(i, r)| (r, i)).collect();
    let mut dsu = Dsu::new(records.len());
    // datasets present in each root's component
    let mut datasets: Vec<Vec<&str>> = records.iter().map(|r| vec![r.dataset.as_str()]).collect();
    let mut sorted: Vec<&Correspondence> = correspondences.iter().collect();
    sorted.sort_by(|x, y| by_score_then_ids(x, y));
    let mut accepted: Vec<&Correspondence> = Vec::new();
    let mut rejected = 0usize;
    for c in sorted {
        let ia = *index
            .get(&c.a)
            .ok_or_else(|| ClusterError::UnknownRecord(c.a.clone()))?;
        let ib = *index
            .get(&c.b)
            .ok_or_else(|| ClusterError::UnknownRecord(c.b.clone()))?;
        let (ra, rb) = (dsu.find(ia), dsu.find(ib));
        if ra == rb {
            accepted.push(c);
            continue;
        }
        if datasets[ra].iter().any(|d| datasets[rb].contains(d)) {
            rejected += 1;
            continue;
        }
        let root = dsu.union(ra, rb);
        let other = if root == ra { rb } else { ra };
        let moved = std::mem::take(&mut datasets[other]);
        datasets[root].extend(moved);
        accepted.push(c);
    }
    let mut groups: BTreeMap<usize, Vec<RecordRef>> = BTreeMap::new();
    for (i, r) in records.iter().enumerate() {
        groups.entry(dsu.find(i)).or_default().push(r.clone());
    }
    let mut scores: BTreeMap<usize, Vec<Correspondence>> = BTreeMap::new();
    for c in accepted {
        let root = dsu.find(index[&c.a]);
        scores.entry(root).or_default().push(c.clone());
    }
    let mut clusters: Vec<EntityCluster> = groups
        .into_iter()
        .map(|(root, mut members)| {
            members.sort();
            let mut pair_scores = scores.remove(&root).unwrap_or_default();
            pair_scores.sort_by(by_score_then_ids);
            EntityCluster { members, pair_scores }
        })
        .collect();
    clusters.sort_by(|x, y| x.members[0].cmp(&y.members[0]));
    for c in &clusters {
        let mut seen = std::collections::BTreeSet::new();
        for m in &c.members {
            if !seen.insert(&m.dataset) {
                return Err(ClusterError::DuplicateSource(c.id(), m.dataset.clone()));
            }
        }
    }
    let mut stats = cluster_stats(&clusters);
    stats.rejected_conflicts = rejected;
    Ok((clusters, stats))
}

pub fn cluster_stats(clusters: &[EntityCluster]) -> ClusterStats {
    let mut size_histogram = BTreeMap::new();
    for c in clusters {
        *size_histogram.entry(c.len()).or_insert(0) += 1;
    }
    let non_singleton = clusters.iter().filter(|c| c.len() >= 2).count();
    let pairs = size_histogram.get(&2).copied().unwrap_or(0);
    ClusterStats {
        clusters: clusters.len(),
        non_singleton,
        size_histogram,
        pair_share: (non_singleton > 0).then(|| pairs as f64 / non_singleton as f64),
        rejected_conflicts: 0,
    }
}

/// Solves the pair/triple composition of non-singleton clusters from the
/// group count and the number of records removed by fusion, assuming no
/// cluster exceeds three members.
pub fn pair_triple_composition(groups: usize, removed: usize) -> Option<(usize, usize)> {
    let triples = removed.checked_sub(groups)?;
    let pairs = groups.checked_sub(triples)?;
    Some((pairs, triples))
}

fn escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for ch in s.chars() {
        match ch {
            '%' | ':' | ' ' | '\t' | '\n' | '\r' | '~' | '=' => out.push_str(&format!("%{:02X}", ch as u32)),
            c => out.push(c),
        }
    }
    out
}

fn unescape(s: &str) -> Option<String> {
    let bytes = s.as_bytes();
    let mut out = Vec::with_capacity(bytes.len());
    let mut i = 0;
    while i < bytes.len() {
        if bytes[i] == b'%' {
            let hex = s.get(i + 1..i + 3)?;
            out.push(u8::from_str_radix(hex, 16).ok()?);
            i += 3;
        } else {
            out.push(bytes[i]);
            i += 1;
        }
    }
    String::from_utf8(out).ok()
}

fn token(r: &RecordRef) -> String {
    format!("{}:{}", escape(&r.dataset), escape(&r.id))
}

fn parse_token(t: &str) -> Option<RecordRef> {
    let (d, i) = t.split_once(':')?;
    Some(RecordRef::new(unescape(d)?, unescape(i)?))
}

/// One line per cluster: space-separated members, a tab, then retained
/// pair scores as `a~b=score`.
pub fn write_clusters(path: &Path, clusters: &[EntityCluster]) -> Result<(), ClusterError> {
    let mut w = std::io::BufWriter::new(std::fs::File::create(path)?);
    for c in clusters {
        let members: Vec<String> = c.members.iter().map(token).collect();
        let scores: Vec<String> = c
            .pair_scores
            .iter()
            .map(|p| format!("{}~{}={}", token(&p.a), token(&p.b), p.score))
            .collect();
        writeln!(w, "{}\t{}", members.join(" "), scores.join(" "))?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_clusters(path: &Path) -> Result<Vec<EntityCluster>, ClusterError> {
    let file = std::fs::File::open(path)?;
    let bad = |line: usize, what: &str| ClusterError::Format {
        path: path.display().to_string(),
        message: format!("line {line}: {what}"),
    };
    let mut clusters = Vec::new();
    for (n, line) in std::io::BufReader::new(file).lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let (members, scores) = line.split_once('\t').unwrap_or((&line, ""));
        let members: Vec<RecordRef> = members
            .split(' ')
            .filter(|t| !t.is_empty())
            .map(|t| parse_token(t).ok_or_else(|| bad(n + 1, "bad member token")))
            .collect::<Result<_, _>>()?;
        if members.is_empty() {
            return Err(bad(n + 1, "cluster without members"));
        }
        let pair_scores = scores
            .split(' ')
            .filter(|t| !t.is_empty())
            .map(|t| {
                let (pair, score) = t.rsplit_once('=')?;
                let (a, b) = pair.split_once('~')?;
                Some(Correspondence {
                    a: parse_token(a)?,
                    b: parse_token(b)?,
                    score: score.parse().ok()?,
                })
            })
            .map(|c| c.ok_or_else(|| bad(n + 1, "bad pair score")))
            .collect::<Result<_, _>>()?;
        clusters.push(EntityCluster { members, pair_scores });
    }
    Ok(clusters)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(s: &str) -> RecordRef {
        RecordRef::parse(s).unwrap()
    }

    fn c(a: &str, b: &str, score: f64) -> Correspondence {
        Correspondence {
            a: r(a),
            b: r(b),
            score,
        }
    }

    #[test]
    fn greedy_keeps_best_edge() {
        let out = bipartite_filter(&[c("a:1", "b:1", 0.9), c("a:1", "b:2", 0.8)], FilterAlgorithm::Greedy);
        assert_eq!(out, vec![c("a:1", "b:1", 0.9)]);
    }

    #[test]
    fn one_to_one_input_is_a_fixed_point() {
        let input = vec![c("a:1", "b:1", 0.9), c("a:2", "b:2", 0.7)];
        assert_eq!(bipartite_filter(&input, FilterAlgorithm::Greedy), input);
        assert_eq!(bipartite_filter(&input, FilterAlgorithm::Exact), input);
    }

    #[test]
    fn ties_break_by_ids() {
        let out = bipartite_filter(&[c("a:2", "b:1", 0.9), c("a:1", "b:1", 0.9)], FilterAlgorithm::Greedy);
        assert_eq!(out, vec![c("a:1", "b:1", 0.9)]);
    }

    #[test]
    fn exact_beats_greedy_on_the_classic_trap() {
        // greedy takes a1-b1 (.9) and loses both .8 edges
        let input = vec![c("a:1", "b:1", 0.9), c("a:1", "b:2", 0.8), c("a:2", "b:1", 0.8)];
        let greedy: f64 = bipartite_filter(&input, FilterAlgorithm::Greedy)
            .iter()
            .map(|c| c.score)
            .sum();
        let exact: f64 = bipartite_filter(&input, FilterAlgorithm::Exact)
            .iter()
            .map(|c| c.score)
            .sum();
        assert!((greedy - 0.9).abs() < 1e-12);
        assert!((exact - 1.6).abs() < 1e-12);
    }

    #[test]
    fn transitive_cluster() {
        let records = vec![r("a:1"), r("b:1"), r("c:1")];
        let (clusters, stats) = build_clusters(&[c("a:1", "b:1", 0.9), c("b:1", "c:1", 0.8)], &records).unwrap();
        assert_eq!(clusters.len(), 1);
        assert_eq!(clusters[0].members, records);
        assert_eq!(stats.size_histogram[&3], 1);
    }

    #[test]
    fn no_correspondences_gives_singletons() {
        let records: Vec<RecordRef> = (0..10).map(|i| RecordRef::new("a", i.to_string())).collect();
        let (clusters, stats) = build_clusters(&[], &records).unwrap();
        assert_eq!(clusters.len(), 10);
        assert_eq!(stats.non_singleton, 0);
    }

    #[test]
    fn chain_across_three_sources_is_cut() {
        let records = vec![r("a:1"), r("a:2"), r("b:1"), r("c:1")];
        let corr = vec![c("a:1", "b:1", 0.9), c("b:1", "c:1", 0.8), c("a:2", "c:1", 0.7)];
        let (clusters, stats) = build_clusters(&corr, &records).unwrap();
        assert_eq!(stats.rejected_conflicts, 1);
        assert!(clusters.iter().all(|c| c.len() <= 3));
        assert_eq!(clusters.iter().map(|c| c.len()).sum::<usize>(), 4);
    }

    #[test]
    fn games_scale_composition() {
        assert_eq!(pair_triple_composition(7235, 74951 - 65518), Some((5037, 2198)));
    }

    #[test]
    fn cluster_file_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("clusters.txt");
        let records = vec![r("a:x y"), r("b:1:2"), r("c:%")];
        let (clusters, _) = build_clusters(&[c("a:x y", "b:1:2", 0.5), c("b:1:2", "c:%", 0.25)], &records).unwrap();
        write_clusters(&path, &clusters).unwrap();
        assert_eq!(read_clusters(&path).unwrap(), clusters);
    }

    #[test]
    fn hungarian_small() {
        let cost = vec![vec![4.0, 1.0, 3.0], vec![2.0, 0.0, 5.0], vec![3.0, 2.0, 2.0]];
        let a = hungarian(&cost);
        let total: f64 = a.iter().enumerate().map(|(i, j)| cost[i][*j]).sum();
        assert_eq!(total, 5.0);
    }
}
