//! Neighbourhood graphs over time.
//!
//! Every variant runs the same pipeline: select node occurrences
//! `(word, interval, score-to-target)`, select edge records
//! `(word, word, interval, score)` among those nodes, then merge records
//! referring to the same word (or word pair) across intervals into one
//! graph whose nodes and edges keep per-interval score maps.
//!
//! * `interval`: per interval the target's top-n neighbours, per-node
//!   top-d edge nominations.
//! * `dynamic`: exactly `n` unique words chosen round-robin over the
//!   intervals in chronological order, same edge rule.
//! * `global`: dynamic nodes, and a single edge budget of
//!   `ceil(|nodes| * d / 2)` merged edges pooled over all intervals.
//!
//! Edge nominations are relaxed: a record survives if either endpoint
//! nominates the other, so merged degree may exceed `d`.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::store::Corpus;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Variant {
    #[default]
    Interval,
    Dynamic,
    Global,
}

impl std::str::FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "interval" => Ok(Variant::Interval),
            "dynamic" => Ok(Variant::Dynamic),
            "global" => Ok(Variant::Global),
            other => Err(Error::param("variant", format!("unknown variant {other:?}"))),
        }
    }
}

/// How per-interval edge weights collapse into `aggregate_weight`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Aggregation {
    #[default]
    Sum,
    Max,
    Mean,
}

impl std::str::FromStr for Aggregation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sum" => Ok(Aggregation::Sum),
            "max" => Ok(Aggregation::Max),
            "mean" => Ok(Aggregation::Mean),
            other => Err(Error::param("aggregation", format!("unknown aggregation {other:?}"))),
        }
    }
}

impl Aggregation {
    pub fn apply<'a>(self, weights: impl IntoIterator<Item = &'a f64>) -> f64 {
        let mut count = 0usize;
        let mut sum = 0.0;
        let mut max = f64::NEG_INFINITY;
        for &w in weights {
            count += 1;
            sum += w;
            max = max.max(w);
        }
        match self {
            _ if count == 0 => 0.0,
            Aggregation::Sum => sum,
            Aggregation::Max => max,
            Aggregation::Mean => sum / count as f64,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NgotParams {
    pub target: String,
    pub variant: Variant,
    pub n: usize,
    pub d: usize,
    /// Selected interval indices, ascending.
    pub intervals: Vec<usize>,
    #[serde(default)]
    pub aggregation: Aggregation,
}

impl NgotParams {
    pub fn new(target: impl Into<String>, variant: Variant, n: usize, d: usize, intervals: Vec<usize>) -> Self {
        Self {
            target: target.into(),
            variant,
            n,
            d,
            intervals,
            aggregation: Aggregation::Sum,
        }
    }

    /// Checks ranges and normalises the interval list (sorted, deduplicated).
    pub fn validate(&mut self) -> Result<()> {
        if self.target.trim().is_empty() {
            return Err(Error::param("target", "must not be empty"));
        }
        if self.n == 0 {
            return Err(Error::param("n", "must be at least 1"));
        }
        if self.d == 0 {
            return Err(Error::param("d", "must be at least 1"));
        }
        if self.intervals.is_empty() {
            return Err(Error::param("intervals", "select at least one interval"));
        }
        self.intervals.sort_unstable();
        self.intervals.dedup();
        Ok(())
    }
}

/// Run metadata for the clustering stored in the graph.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClusteringInfo {
    pub seed: u64,
    pub iterations: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NgotNode {
    pub word: String,
    pub present_in: BTreeSet<usize>,
    pub score_by_interval: BTreeMap<usize, f64>,
    pub cluster_id: Option<usize>,
    pub centrality: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NgotEdge {
    /// Lexicographically smaller endpoint.
    pub source: String,
    pub target: String,
    pub weight_by_interval: BTreeMap<usize, f64>,
    pub aggregate_weight: f64,
}

impl NgotEdge {
    pub fn connects(&self, a: &str, b: &str) -> bool {
        (self.source == a && self.target == b) || (self.source == b && self.target == a)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NgotGraph {
    pub params: NgotParams,
    /// Sorted by word.
    pub nodes: Vec<NgotNode>,
    /// Sorted by (source, target).
    pub edges: Vec<NgotEdge>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub clustering: Option<ClusteringInfo>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub warning: Option<String>,
}

impl NgotGraph {
    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn node(&self, word: &str) -> Option<&NgotNode> {
        self.nodes
            .binary_search_by(|n| n.word.as_str().cmp(word))
            .ok()
            .map(|i| &self.nodes[i])
    }

    pub fn edge(&self, a: &str, b: &str) -> Option<&NgotEdge> {
        let (s, t) = if a <= b { (a, b) } else { (b, a) };
        self.edges
            .binary_search_by(|e| (e.source.as_str(), e.target.as_str()).cmp(&(s, t)))
            .ok()
            .map(|i| &self.edges[i])
    }

    /// Splits the graph back into per-interval records.
    pub fn records(&self) -> (Vec<Occurrence>, Vec<EdgeRecord>) {
        let mut occ = Vec::new();
        for node in &self.nodes {
            for &t in &node.present_in {
                occ.push(Occurrence {
                    word: node.word.clone(),
                    interval: t,
                    score: node.score_by_interval.get(&t).copied(),
                });
            }
        }
        let edges = self
            .edges
            .iter()
            .flat_map(|e| {
                e.weight_by_interval.iter().map(|(&t, &w)| EdgeRecord {
                    source: e.source.clone(),
                    target: e.target.clone(),
                    interval: t,
                    score: w,
                })
            })
            .collect();
        (occ, edges)
    }

    /// Re-merges the graph's own records. On a merged graph this is the
    /// identity (up to annotations, which are carried over).
    pub fn remerge(&self) -> NgotGraph {
        let (occ, edges) = self.records();
        let mut merged = merge(self.params.clone(), &occ, &edges);
        for node in &mut merged.nodes {
            if let Some(orig) = self.node(&node.word) {
                node.cluster_id = orig.cluster_id;
                node.centrality = orig.centrality;
            }
        }
        merged.clustering = self.clustering;
        merged.warning = self.warning.clone();
        merged
    }
}

/// One node occurrence in one interval. `score` is the similarity to the
/// target when the target and word have a record there.
#[derive(Debug, Clone, PartialEq)]
pub struct Occurrence {
    pub word: String,
    pub interval: usize,
    pub score: Option<f64>,
}

/// One selected edge in one interval.
#[derive(Debug, Clone, PartialEq)]
pub struct EdgeRecord {
    pub source: String,
    pub target: String,
    pub interval: usize,
    pub score: f64,
}

fn check_intervals(corpus: &Corpus, intervals: &[usize]) -> Result<()> {
    match intervals.iter().find(|t| !corpus.has_interval(**t)) {
        Some(t) => Err(Error::not_found(format!("interval {t} in corpus {}", corpus.id()))),
        None => Ok(()),
    }
}

/// Top-n neighbours of `target` in each interval independently.
pub fn select_nodes_interval(corpus: &Corpus, target: &str, n: usize, intervals: &[usize]) -> Result<Vec<Occurrence>> {
    if n == 0 {
        return Err(Error::param("n", "must be at least 1"));
    }
    check_intervals(corpus, intervals)?;
    let mut out = Vec::new();
    for &t in intervals {
        for (word, score) in corpus.neighbours(target, t)?.iter().take(n) {
            out.push(Occurrence {
                word: word.clone(),
                interval: t,
                score: Some(*score),
            });
        }
    }
    Ok(out)
}

/// `min(n, available)` unique words picked round-robin over `intervals`
/// (taken in the given order), each interval contributing its best unseen
/// neighbour per round. All occurrences of the chosen words across
/// `intervals` are returned.
pub fn select_nodes_dynamic(corpus: &Corpus, target: &str, n: usize, intervals: &[usize]) -> Result<Vec<Occurrence>> {
    if n == 0 {
        return Err(Error::param("n", "must be at least 1"));
    }
    check_intervals(corpus, intervals)?;
    let lists: Vec<&[(String, f64)]> = intervals
        .iter()
        .map(|&t| corpus.neighbours(target, t))
        .collect::<Result<_>>()?;
    let mut cursor = vec![0usize; lists.len()];
    let mut chosen: Vec<&str> = Vec::new();
    let mut seen: HashSet<&str> = HashSet::new();
    'rounds: loop {
        let mut progressed = false;
        for (list, pos) in lists.iter().zip(cursor.iter_mut()) {
            while *pos < list.len() && seen.contains(list[*pos].0.as_str()) {
                *pos += 1;
            }
            if let Some((word, _)) = list.get(*pos) {
                seen.insert(word);
                chosen.push(word);
                *pos += 1;
                progressed = true;
                if chosen.len() == n {
                    break 'rounds;
                }
            }
        }
        if !progressed {
            break;
        }
    }

    let mut out = Vec::new();
    for &t in intervals {
        for word in &chosen {
            if let Some(score) = corpus.pair_score(target, word, t) {
                out.push(Occurrence {
                    word: word.to_string(),
                    interval: t,
                    score: Some(score),
                });
            }
        }
    }
    Ok(out)
}

fn present_by_interval(nodes: &[Occurrence]) -> BTreeMap<usize, HashSet<&str>> {
    let mut out: BTreeMap<usize, HashSet<&str>> = BTreeMap::new();
    for o in nodes {
        out.entry(o.interval).or_default().insert(o.word.as_str());
    }
    out
}

fn ordered(a: &str, b: &str) -> (String, String) {
    if a <= b {
        (a.to_string(), b.to_string())
    } else {
        (b.to_string(), a.to_string())
    }
}

/// Edge records among the selected node occurrences. Only intervals in
/// `intervals` are considered, and both endpoints must occur there.
pub fn select_edges(
    corpus: &Corpus,
    nodes: &[Occurrence],
    d: usize,
    intervals: &[usize],
    variant: Variant,
) -> Result<Vec<EdgeRecord>> {
    if d == 0 {
        return Err(Error::param("d", "must be at least 1"));
    }
    check_intervals(corpus, intervals)?;
    let present = present_by_interval(nodes);
    let selected: BTreeSet<usize> = intervals.iter().copied().collect();

    let mut kept: BTreeMap<(String, String, usize), f64> = BTreeMap::new();
    match variant {
        Variant::Interval | Variant::Dynamic => {
            for (&t, words) in present.iter().filter(|(t, _)| selected.contains(t)) {
                let mut sorted: Vec<&str> = words.iter().copied().collect();
                sorted.sort_unstable();
                for u in sorted {
                    // neighbour lists are already ranked by score, then token
                    let nominees = corpus
                        .neighbours(u, t)?
                        .iter()
                        .filter(|(v, _)| words.contains(v.as_str()))
                        .take(d);
                    for (v, score) in nominees {
                        let (a, b) = ordered(u, v);
                        kept.insert((a, b, t), *score);
                    }
                }
            }
        }
        Variant::Global => {
            let node_count = nodes.iter().map(|o| o.word.as_str()).collect::<HashSet<_>>().len();
            let budget = (node_count * d).div_ceil(2);
            let mut pool: Vec<(String, String, usize, f64)> = Vec::new();
            for (&t, words) in present.iter().filter(|(t, _)| selected.contains(t)) {
                for &u in words {
                    for (v, score) in corpus.neighbours(u, t)? {
                        if u < v.as_str() && words.contains(v.as_str()) {
                            pool.push((u.to_string(), v.clone(), t, *score));
                        }
                    }
                }
            }
            pool.sort_by(|x, y| {
                y.3.total_cmp(&x.3)
                    .then_with(|| (&x.0, &x.1, x.2).cmp(&(&y.0, &y.1, y.2)))
            });
            let mut pairs: BTreeSet<(String, String)> = BTreeSet::new();
            for (a, b, _, _) in &pool {
                if pairs.len() == budget {
                    break;
                }
                pairs.insert((a.clone(), b.clone()));
            }
            for (a, b, t, score) in pool {
                if pairs.contains(&(a.clone(), b.clone())) {
                    kept.insert((a, b, t), score);
                }
            }
        }
    }
    Ok(kept
        .into_iter()
        .map(|((source, target, interval), score)| EdgeRecord {
            source,
            target,
            interval,
            score,
        })
        .collect())
}

/// Merges occurrences and edge records by word identity.
pub fn merge(params: NgotParams, nodes: &[Occurrence], edges: &[EdgeRecord]) -> NgotGraph {
    let mut merged_nodes: BTreeMap<&str, NgotNode> = BTreeMap::new();
    for o in nodes {
        let node = merged_nodes.entry(o.word.as_str()).or_insert_with(|| NgotNode {
            word: o.word.clone(),
            present_in: BTreeSet::new(),
            score_by_interval: BTreeMap::new(),
            cluster_id: None,
            centrality: None,
        });
        node.present_in.insert(o.interval);
        if let Some(score) = o.score {
            node.score_by_interval.insert(o.interval, score);
        }
    }

    let mut merged_edges: BTreeMap<(String, String), BTreeMap<usize, f64>> = BTreeMap::new();
    for e in edges {
        if e.source == e.target {
            continue;
        }
        merged_edges
            .entry(ordered(&e.source, &e.target))
            .or_default()
            .insert(e.interval, e.score);
    }
    let aggregation = params.aggregation;
    NgotGraph {
        params,
        nodes: merged_nodes.into_values().collect(),
        edges: merged_edges
            .into_iter()
            .map(|((source, target), weight_by_interval)| NgotEdge {
                aggregate_weight: aggregation.apply(weight_by_interval.values()),
                source,
                target,
                weight_by_interval,
            })
            .collect(),
        clustering: None,
        warning: None,
    }
}

/// Builds the neighbourhood graph over time for `params.target`.
///
/// A target with no neighbours in any selected interval yields an empty
/// graph carrying a warning rather than an error.
pub fn build_ngot(corpus: &Corpus, params: &NgotParams) -> Result<NgotGraph> {
    let mut params = params.clone();
    params.validate()?;
    check_intervals(corpus, &params.intervals)?;

    let occurrences = match params.variant {
        Variant::Interval => select_nodes_interval(corpus, &params.target, params.n, &params.intervals)?,
        Variant::Dynamic | Variant::Global => {
            select_nodes_dynamic(corpus, &params.target, params.n, &params.intervals)?
        }
    };
    // the ego is never a node
    let occurrences: Vec<Occurrence> = occurrences.into_iter().filter(|o| o.word != params.target).collect();
    if occurrences.is_empty() {
        let warning = format!(
            "target {:?} has no neighbours in the selected intervals of corpus {}",
            params.target,
            corpus.id()
        );
        log::warn!("{warning}");
        let mut graph = merge(params, &[], &[]);
        graph.warning = Some(warning);
        return Ok(graph);
    }
    let edges = select_edges(corpus, &occurrences, params.d, &params.intervals, params.variant)?;
    Ok(merge(params, &occurrences, &edges))
}

/// Word -> index lookup plus adjacency lists, for algorithms that work on
/// dense indices. Node order follows `graph.nodes`.
#[derive(Debug, Clone)]
pub struct Adjacency {
    pub words: Vec<String>,
    pub neighbours: Vec<Vec<(usize, f64)>>,
}

impl Adjacency {
    pub fn of(graph: &NgotGraph) -> Self {
        let index: HashMap<&str, usize> = graph
            .nodes
            .iter()
            .enumerate()
            .map(|(i, n)| (n.word.as_str(), i))
            .collect();
        let mut neighbours = vec![Vec::new(); graph.nodes.len()];
        for e in &graph.edges {
            if let (Some(&a), Some(&b)) = (index.get(e.source.as_str()), index.get(e.target.as_str())) {
                if a != b {
                    neighbours[a].push((b, e.aggregate_weight));
                    neighbours[b].push((a, e.aggregate_weight));
                }
            }
        }
        Self {
            words: graph.nodes.iter().map(|n| n.word.clone()).collect(),
            neighbours,
        }
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }
}
