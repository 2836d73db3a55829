//! Independent reference implementations used as test oracles. None of
//! these call into the engine's algorithms; they work from raw records.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet, HashSet};

use sensegraph::ngot::NgotGraph;
use sensegraph::store::Corpus;
use sensegraph::thesaurus::{FeatureTable, IntervalId, SimilarityRecord};

pub fn intervals(count: usize) -> Vec<IntervalId> {
    (0..count)
        .map(|i| IntervalId::new(i, format!("{}-{}", 1900 + 10 * i, 1909 + 10 * i), 1900 + 10 * i as i32, 1909 + 10 * i as i32))
        .collect()
}

pub fn corpus_from(count: usize, records: &[SimilarityRecord]) -> Corpus {
    Corpus::from_parts("c", "c", intervals(count), records.to_vec(), FeatureTable::new(0..count), Vec::new()).unwrap()
}

pub fn rec(a: &str, b: &str, score: f64, interval: usize) -> SimilarityRecord {
    SimilarityRecord {
        word1: a.to_string(),
        word2: b.to_string(),
        interval,
        score,
    }
}

/// Direct evaluation of f * log2(f * N / (fw * fc)).
pub fn lmi_reference(f: u64, fw: u64, fc: u64, n: u64) -> f64 {
    let (f, fw, fc, n) = (f as f64, fw as f64, fc as f64, n as f64);
    f * ((f * n).ln() - (fw * fc).ln()) / std::f64::consts::LN_2
}

/// All-pairs top-k intersection from raw counts `(word, feature, count)`
/// of one interval.
pub fn brute_force_thesaurus(cells: &[(String, String, u64)], k: usize, min_score: usize) -> BTreeMap<(String, String), usize> {
    let total: u64 = cells.iter().map(|c| c.2).sum();
    let mut word_tot: BTreeMap<&str, u64> = BTreeMap::new();
    let mut feat_tot: BTreeMap<&str, u64> = BTreeMap::new();
    let mut joint: BTreeMap<(&str, &str), u64> = BTreeMap::new();
    for (w, f, c) in cells {
        *word_tot.entry(w).or_default() += c;
        *feat_tot.entry(f).or_default() += c;
        *joint.entry((w, f)).or_default() += c;
    }
    let mut per_word: BTreeMap<&str, Vec<(&str, f64)>> = BTreeMap::new();
    for (&(w, f), &c) in &joint {
        per_word.entry(w).or_default().push((f, lmi_reference(c, word_tot[w], feat_tot[f], total)));
    }
    let tops: BTreeMap<&str, HashSet<&str>> = per_word
        .into_iter()
        .map(|(w, mut list)| {
            list.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap().then(a.0.cmp(b.0)));
            (w, list.into_iter().take(k).map(|(f, _)| f).collect())
        })
        .collect();
    let words: Vec<&str> = tops.keys().copied().collect();
    let mut out = BTreeMap::new();
    for i in 0..words.len() {
        for j in i + 1..words.len() {
            let c = tops[words[i]].intersection(&tops[words[j]]).count();
            if c >= min_score && c > 0 {
                out.insert((words[i].to_string(), words[j].to_string()), c);
            }
        }
    }
    out
}

fn ranked_neighbours(records: &[SimilarityRecord], word: &str, interval: usize) -> Vec<(String, f64)> {
    let mut list: Vec<(String, f64)> = records
        .iter()
        .filter(|r| r.interval == interval)
        .filter_map(|r| {
            if r.word1 == word {
                Some((r.word2.clone(), r.score))
            } else if r.word2 == word {
                Some((r.word1.clone(), r.score))
            } else {
                None
            }
        })
        .collect();
    list.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap().then(a.0.cmp(&b.0)));
    list.dedup_by(|a, b| a.0 == b.0);
    list
}

/// Static single-interval neighbourhood graph: top-n neighbours of the
/// target, each node nominating its top-d co-nodes, either nomination
/// keeps the edge. Returns (node -> score, (a, b) -> weight).
pub fn static_graph(
    records: &[SimilarityRecord],
    target: &str,
    n: usize,
    d: usize,
    interval: usize,
) -> (BTreeMap<String, f64>, BTreeMap<(String, String), f64>) {
    let nodes: BTreeMap<String, f64> = ranked_neighbours(records, target, interval)
        .into_iter()
        .filter(|(w, _)| w != target)
        .take(n)
        .collect();
    let mut edges = BTreeMap::new();
    for u in nodes.keys() {
        for (v, s) in ranked_neighbours(records, u, interval)
            .into_iter()
            .filter(|(v, _)| nodes.contains_key(v))
            .take(d)
        {
            let key = if *u < v { (u.clone(), v) } else { (v, u.clone()) };
            edges.insert(key, s);
        }
    }
    (nodes, edges)
}

/// Per-interval top-n of the target, straight from the records.
pub fn top_n_per_interval(records: &[SimilarityRecord], target: &str, n: usize, intervals: &[usize]) -> BTreeSet<(String, usize)> {
    intervals
        .iter()
        .flat_map(|&t| {
            ranked_neighbours(records, target, t)
                .into_iter()
                .take(n)
                .map(move |(w, _)| (w, t))
        })
        .collect()
}

/// Betweenness by enumerating every simple path between each pair.
pub fn brute_force_betweenness(nodes: usize, edges: &[(usize, usize)]) -> Vec<f64> {
    let mut adj = vec![BTreeSet::new(); nodes];
    for &(a, b) in edges {
        if a != b {
            adj[a].insert(b);
            adj[b].insert(a);
        }
    }
    let mut score = vec![0.0; nodes];
    if nodes < 3 {
        return score;
    }
    fn walk(adj: &[BTreeSet<usize>], at: usize, goal: usize, path: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if at == goal {
            out.push(path.clone());
            return;
        }
        for &next in &adj[at] {
            if !path.contains(&next) {
                path.push(next);
                walk(adj, next, goal, path, out);
                path.pop();
            }
        }
    }
    for s in 0..nodes {
        for t in s + 1..nodes {
            let mut paths = Vec::new();
            walk(&adj, s, t, &mut vec![s], &mut paths);
            let Some(shortest) = paths.iter().map(Vec::len).min() else {
                continue;
            };
            let shortest: Vec<&Vec<usize>> = paths.iter().filter(|p| p.len() == shortest).collect();
            let total = shortest.len() as f64;
            for (v, value) in score.iter_mut().enumerate() {
                if v == s || v == t {
                    continue;
                }
                let through = shortest.iter().filter(|p| p.contains(&v)).count() as f64;
                *value += through / total;
            }
        }
    }
    let norm = ((nodes - 1) * (nodes - 2)) as f64 / 2.0;
    score.iter_mut().for_each(|x| *x /= norm);
    score
}

/// Node words and (source, target, weights) of a graph, for comparisons.
pub fn edge_map(graph: &NgotGraph) -> BTreeMap<(String, String), BTreeMap<usize, f64>> {
    graph
        .edges
        .iter()
        .map(|e| ((e.source.clone(), e.target.clone()), e.weight_by_interval.clone()))
        .collect()
}

/// A graph over interval 0 built straight from weighted edges.
pub fn graph_from_edges(words: &[String], edges: &[(usize, usize, f64)]) -> NgotGraph {
    use sensegraph::ngot::{merge, EdgeRecord, NgotParams, Occurrence, Variant};
    let occ: Vec<Occurrence> = words
        .iter()
        .map(|w| Occurrence {
            word: w.clone(),
            interval: 0,
            score: Some(1.0),
        })
        .collect();
    let recs: Vec<EdgeRecord> = edges
        .iter()
        .filter(|(a, b, _)| a != b)
        .map(|&(a, b, w)| {
            let (s, t) = if words[a] < words[b] { (a, b) } else { (b, a) };
            EdgeRecord {
                source: words[s].clone(),
                target: words[t].clone(),
                interval: 0,
                score: w,
            }
        })
        .collect();
    merge(NgotParams::new("ego", Variant::Interval, words.len().max(1), 1, vec![0]), &occ, &recs)
}

pub fn words(prefix: &str, count: usize) -> Vec<String> {
    (0..count).map(|i| format!("{prefix}{i:02}")).collect()
}

/// Two 5-cliques of weight 1.0 joined by one 0.01 bridge. Nodes 0..5 and
/// 5..10 form the cliques.
pub fn two_cliques() -> (Vec<String>, NgotGraph) {
    let w = words("w", 10);
    let mut edges = Vec::new();
    for block in [0, 5] {
        for i in block..block + 5 {
            for j in i + 1..block + 5 {
                edges.push((i, j, 1.0));
            }
        }
    }
    edges.push((4, 5, 0.01));
    let g = graph_from_edges(&w, &edges);
    (w, g)
}

/// True when the clustering splits the two cliques exactly.
pub fn respects_cliques(words: &[String], assignment: &BTreeMap<String, usize>) -> bool {
    let a: BTreeSet<usize> = words[..5].iter().map(|w| assignment[w]).collect();
    let b: BTreeSet<usize> = words[5..].iter().map(|w| assignment[w]).collect();
    a.len() == 1 && b.len() == 1 && a != b && assignment.values().collect::<BTreeSet<_>>().len() == 2
}

pub const TARGET: &str = "x";

/// Deduplicated random similarity records over `words` words (word 0 is
/// the target `x`) and `intervals` intervals.
pub fn random_records(raw: &[(usize, usize, u32, usize)]) -> Vec<SimilarityRecord> {
    let name = |i: usize| if i == 0 { TARGET.to_string() } else { format!("w{i:02}") };
    let mut seen = BTreeMap::new();
    for &(a, b, score, t) in raw {
        if a == b {
            continue;
        }
        let (a, b) = (a.min(b), a.max(b));
        seen.entry((a, b, t)).or_insert(score as f64);
    }
    seen.into_iter().map(|((a, b, t), s)| rec(&name(a), &name(b), s, t)).collect()
}

/// Nodes with the given presence sets over intervals `0..interval_count`,
/// and no edges.
pub fn graph_with_presence(presence: &[BTreeSet<usize>], interval_count: usize) -> NgotGraph {
    use sensegraph::ngot::{merge, NgotParams, Occurrence, Variant};
    let occ: Vec<Occurrence> = presence
        .iter()
        .enumerate()
        .flat_map(|(i, ts)| {
            ts.iter().map(move |&t| Occurrence {
                word: format!("n{i:02}"),
                interval: t,
                score: Some(1.0),
            })
        })
        .collect();
    merge(
        NgotParams::new("ego", Variant::Interval, 1, 1, (0..interval_count).collect()),
        &occ,
        &[],
    )
}
