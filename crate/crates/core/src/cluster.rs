//! Chinese Whispers clustering.
//!
//! Every node starts in its own class. Each sweep visits the nodes in a
//! freshly shuffled order and moves each node, in place, to the class with
//! the highest summed edge weight among its neighbours. Ties are broken
//! uniformly at random. The RNG is seeded, so a run is reproducible.

use std::collections::{BTreeMap, HashMap};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ngot::{Adjacency, ClusteringInfo, NgotGraph};

pub const DEFAULT_ITERATIONS: usize = 15;

/// Relative tolerance for treating two label weights as tied.
const TIE_EPSILON: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Clustering {
    /// Word -> canonical cluster id. Id 0 is the largest cluster; equal
    /// sizes are ordered by their smallest member word.
    pub assignment: BTreeMap<String, usize>,
    pub seed: u64,
    pub iterations: usize,
}

impl Clustering {
    pub fn cluster_count(&self) -> usize {
        self.assignment.values().max().map_or(0, |m| m + 1)
    }

    /// Members of each cluster, indexed by cluster id, each sorted.
    pub fn clusters(&self) -> Vec<Vec<String>> {
        let mut out = vec![Vec::new(); self.cluster_count()];
        for (word, &c) in &self.assignment {
            out[c].push(word.clone());
        }
        out
    }

    pub fn info(&self) -> ClusteringInfo {
        ClusteringInfo {
            seed: self.seed,
            iterations: self.iterations,
        }
    }
}

pub fn chinese_whispers(graph: &NgotGraph, iterations: usize, seed: u64) -> Result<Clustering> {
    if iterations == 0 {
        return Err(Error::param("iterations", "must be at least 1"));
    }
    let adj = Adjacency::of(graph);
    let labels = whisper(&adj, iterations, seed);
    Ok(Clustering {
        assignment: canonicalize(&adj.words, &labels),
        seed,
        iterations,
    })
}

fn whisper(adj: &Adjacency, iterations: usize, seed: u64) -> Vec<usize> {
    let n = adj.len();
    let mut labels: Vec<usize> = (0..n).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut order: Vec<usize> = (0..n).collect();
    let mut votes: HashMap<usize, f64> = HashMap::new();
    let mut best: Vec<usize> = Vec::new();

    for _ in 0..iterations {
        order.shuffle(&mut rng);
        for &node in &order {
            if adj.neighbours[node].is_empty() {
                continue;
            }
            votes.clear();
            for &(other, w) in &adj.neighbours[node] {
                *votes.entry(labels[other]).or_insert(0.0) += w;
            }
            let top = votes.values().copied().fold(f64::NEG_INFINITY, f64::max);
            let tol = TIE_EPSILON * top.abs().max(1.0);
            best.clear();
            best.extend(votes.iter().filter(|(_, &w)| top - w <= tol).map(|(&l, _)| l));
            best.sort_unstable();
            labels[node] = if best.len() == 1 {
                best[0]
            } else {
                best[rng.gen_range(0..best.len())]
            };
        }
    }
    labels
}

fn canonicalize(words: &[String], labels: &[usize]) -> BTreeMap<String, usize> {
    let mut groups: BTreeMap<usize, Vec<&str>> = BTreeMap::new();
    for (word, &l) in words.iter().zip(labels) {
        groups.entry(l).or_default().push(word);
    }
    let mut ordered: Vec<Vec<&str>> = groups
        .into_values()
        .map(|mut members| {
            members.sort_unstable();
            members
        })
        .collect();
    ordered.sort_by(|a, b| b.len().cmp(&a.len()).then_with(|| a[0].cmp(b[0])));
    ordered
        .into_iter()
        .enumerate()
        .flat_map(|(id, members)| members.into_iter().map(move |w| (w.to_string(), id)))
        .collect()
}

/// Runs Chinese Whispers again with `seed`, or a fresh random seed.
/// `previous` must describe the same node set as `graph`.
pub fn recluster(graph: &NgotGraph, previous: &Clustering, seed: Option<u64>) -> Result<Clustering> {
    let same_nodes = previous.assignment.len() == graph.nodes.len()
        && graph.nodes.iter().all(|n| previous.assignment.contains_key(&n.word));
    if !same_nodes {
        return Err(Error::GraphMismatch(
            "previous clustering covers a different node set".to_string(),
        ));
    }
    let seed = seed.unwrap_or_else(|| rand::thread_rng().gen());
    chinese_whispers(graph, previous.iterations.max(1), seed)
}

/// Writes cluster ids and run metadata into the graph.
pub fn apply(graph: &mut NgotGraph, clustering: &Clustering) {
    for node in &mut graph.nodes {
        node.cluster_id = clustering.assignment.get(&node.word).copied();
    }
    graph.clustering = Some(clustering.info());
}
