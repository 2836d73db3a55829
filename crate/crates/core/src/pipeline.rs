//! Build, cluster and annotate a graph in one place, so the CLI and the
//! HTTP service produce the same JSON for the same request and seed.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::analytics;
use crate::cluster::{self, Clustering, DEFAULT_ITERATIONS};
use crate::error::Result;
use crate::ngot::{self, Aggregation, NgotGraph, NgotParams, Variant};
use crate::store::Corpus;

pub const DEFAULT_N: usize = 100;
pub const DEFAULT_D: usize = 30;

fn default_n() -> usize {
    DEFAULT_N
}

fn default_d() -> usize {
    DEFAULT_D
}

fn default_iterations() -> usize {
    DEFAULT_ITERATIONS
}

/// A graph request as accepted by the service and assembled by the CLI.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphRequest {
    pub corpus_id: String,
    pub target: String,
    #[serde(default)]
    pub variant: Variant,
    #[serde(default = "default_n")]
    pub n: usize,
    #[serde(default = "default_d")]
    pub d: usize,
    /// Empty selects every interval of the corpus.
    #[serde(default)]
    pub interval_indices: Vec<usize>,
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default = "default_iterations")]
    pub iterations: usize,
    #[serde(default)]
    pub aggregation: Aggregation,
}

impl GraphRequest {
    pub fn new(corpus_id: impl Into<String>, target: impl Into<String>) -> Self {
        Self {
            corpus_id: corpus_id.into(),
            target: target.into(),
            variant: Variant::Interval,
            n: DEFAULT_N,
            d: DEFAULT_D,
            interval_indices: Vec::new(),
            seed: None,
            iterations: DEFAULT_ITERATIONS,
            aggregation: Aggregation::Sum,
        }
    }

    pub fn params(&self, corpus: &Corpus) -> NgotParams {
        let intervals = if self.interval_indices.is_empty() {
            corpus.intervals().iter().map(|iv| iv.index).collect()
        } else {
            self.interval_indices.clone()
        };
        let mut params = NgotParams::new(self.target.clone(), self.variant, self.n, self.d, intervals);
        params.aggregation = self.aggregation;
        params
    }

    /// The request seed, or a fresh one.
    pub fn seed_or_random(&self) -> u64 {
        self.seed.unwrap_or_else(random_seed)
    }
}

pub fn random_seed() -> u64 {
    rand::thread_rng().gen()
}

/// Builds the graph and fills in betweenness centrality.
pub fn build_graph(corpus: &Corpus, params: &NgotParams) -> Result<NgotGraph> {
    let mut graph = ngot::build_ngot(corpus, params)?;
    let report = analytics::betweenness(&graph);
    analytics::apply_centrality(&mut graph, &report);
    Ok(graph)
}

/// Clusters `graph` in place and returns the clustering.
pub fn cluster_graph(graph: &mut NgotGraph, iterations: usize, seed: u64) -> Result<Clustering> {
    let clustering = cluster::chinese_whispers(graph, iterations, seed)?;
    cluster::apply(graph, &clustering);
    Ok(clustering)
}

/// Build, cluster and centrality for one request.
pub fn run(corpus: &Corpus, request: &GraphRequest, seed: u64) -> Result<NgotGraph> {
    let mut graph = build_graph(corpus, &request.params(corpus))?;
    cluster_graph(&mut graph, request.iterations, seed)?;
    Ok(graph)
}
