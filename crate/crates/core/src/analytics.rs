//! Temporal and structural analyses of a built graph.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ngot::{Adjacency, NgotEdge, NgotGraph};

/// Lifecycle of a node relative to a reference interval.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TimeCategory {
    /// Last occurrence before the reference.
    Disappeared,
    /// First occurrence at the reference.
    EmergedIn,
    /// First occurrence after the reference.
    EmergedAfter,
    /// Occurs before and at or after the reference.
    Stable,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimeDiffReport {
    pub reference: usize,
    pub category_by_word: BTreeMap<String, TimeCategory>,
}

impl TimeDiffReport {
    pub fn words_in(&self, category: TimeCategory) -> impl Iterator<Item = &str> {
        self.category_by_word
            .iter()
            .filter(move |(_, &c)| c == category)
            .map(|(w, _)| w.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CentralityReport {
    pub betweenness_by_word: BTreeMap<String, f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntervalSlice {
    pub interval: usize,
    pub nodes: BTreeSet<String>,
    pub edges: Vec<NgotEdge>,
}

fn check_selected(graph: &NgotGraph, interval: usize, what: &str) -> Result<()> {
    if graph.params.intervals.contains(&interval) {
        Ok(())
    } else {
        Err(Error::param(
            what,
            format!("interval {interval} is not among the graph's selected intervals"),
        ))
    }
}

pub fn categorize(first: usize, last: usize, reference: usize) -> TimeCategory {
    if last < reference {
        TimeCategory::Disappeared
    } else if first == reference {
        TimeCategory::EmergedIn
    } else if first > reference {
        TimeCategory::EmergedAfter
    } else {
        TimeCategory::Stable
    }
}

pub fn time_diff(graph: &NgotGraph, reference: usize) -> Result<TimeDiffReport> {
    check_selected(graph, reference, "reference")?;
    let category_by_word = graph
        .nodes
        .iter()
        .filter_map(|node| {
            let first = *node.present_in.first()?;
            let last = *node.present_in.last()?;
            Some((node.word.clone(), categorize(first, last, reference)))
        })
        .collect();
    Ok(TimeDiffReport {
        reference,
        category_by_word,
    })
}

/// Nodes present in `interval` and edges carrying a weight there.
pub fn interval_slice(graph: &NgotGraph, interval: usize) -> Result<IntervalSlice> {
    check_selected(graph, interval, "interval")?;
    Ok(IntervalSlice {
        interval,
        nodes: graph
            .nodes
            .iter()
            .filter(|n| n.present_in.contains(&interval))
            .map(|n| n.word.clone())
            .collect(),
        edges: graph
            .edges
            .iter()
            .filter(|e| e.weight_by_interval.contains_key(&interval))
            .cloned()
            .collect(),
    })
}

/// Unweighted shortest-path betweenness (Brandes), normalised by
/// `(N-1)(N-2)/2`. Graphs with fewer than three nodes score all zeros.
pub fn betweenness(graph: &NgotGraph) -> CentralityReport {
    let adj = Adjacency::of(graph);
    let scores = brandes(&adj);
    CentralityReport {
        betweenness_by_word: adj.words.into_iter().zip(scores).collect(),
    }
}

fn brandes(adj: &Adjacency) -> Vec<f64> {
    let n = adj.len();
    let mut cb = vec![0.0; n];
    if n < 3 {
        return cb;
    }
    let mut stack = Vec::with_capacity(n);
    let mut preds: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut sigma = vec![0.0f64; n];
    let mut dist = vec![-1i64; n];
    let mut delta = vec![0.0f64; n];
    let mut queue = VecDeque::new();

    for s in 0..n {
        stack.clear();
        preds.iter_mut().for_each(Vec::clear);
        sigma.fill(0.0);
        dist.fill(-1);
        delta.fill(0.0);
        sigma[s] = 1.0;
        dist[s] = 0;
        queue.push_back(s);
        while let Some(v) = queue.pop_front() {
            stack.push(v);
            for &(w, _) in &adj.neighbours[v] {
                if dist[w] < 0 {
                    dist[w] = dist[v] + 1;
                    queue.push_back(w);
                }
                if dist[w] == dist[v] + 1 {
                    sigma[w] += sigma[v];
                    preds[w].push(v);
                }
            }
        }
        while let Some(w) = stack.pop() {
            for &v in &preds[w] {
                delta[v] += sigma[v] / sigma[w] * (1.0 + delta[w]);
            }
            if w != s {
                cb[w] += delta[w];
            }
        }
    }
    // each unordered pair was counted from both ends
    let norm = ((n - 1) * (n - 2)) as f64;
    cb.iter_mut().for_each(|b| *b /= norm);
    cb
}

/// Writes betweenness into each node's `centrality`.
pub fn apply_centrality(graph: &mut NgotGraph, report: &CentralityReport) {
    for node in &mut graph.nodes {
        node.centrality = report.betweenness_by_word.get(&node.word).copied();
    }
}

/// A node or an (unordered) edge of the graph.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Element {
    Node(String),
    Edge(String, String),
}

/// Score per selected interval, `None` where the element has no score.
pub fn score_series(graph: &NgotGraph, element: &Element) -> Result<Vec<(usize, Option<f64>)>> {
    let scores = match element {
        Element::Node(word) => {
            &graph
                .node(word)
                .ok_or_else(|| Error::not_found(format!("node {word}")))?
                .score_by_interval
        }
        Element::Edge(a, b) => {
            &graph
                .edge(a, b)
                .ok_or_else(|| Error::not_found(format!("edge {a} -- {b}")))?
                .weight_by_interval
        }
    };
    Ok(graph
        .params
        .intervals
        .iter()
        .map(|&t| (t, scores.get(&t).copied()))
        .collect())
}
