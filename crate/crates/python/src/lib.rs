//! Python bindings: a corpus store, graph building and the analyses.
//!
//! Structured results (handles, reports, sentence records) cross the
//! boundary as plain dicts and lists decoded from the engine's JSON.

use std::collections::BTreeSet;
use std::path::PathBuf;
use std::sync::Arc;

use pyo3::exceptions::{PyIOError, PyKeyError, PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use serde::Serialize;

use ::sensegraph::analytics::{self, Element};
use ::sensegraph::evidence::{self, Scope};
use ::sensegraph::ngot::{NgotGraph, Variant};
use ::sensegraph::pipeline::{self, GraphRequest};
use ::sensegraph::store::Store as CoreStore;
use ::sensegraph::synthetic::SenseShift;
use ::sensegraph::{thesaurus, Error};

fn to_py_err(err: Error) -> PyErr {
    let msg = err.to_string();
    match err {
        Error::NotFound(_) => PyKeyError::new_err(msg),
        Error::InvalidInput(_)
        | Error::InvalidParam { .. }
        | Error::ConflictingSymmetry { .. }
        | Error::GraphMismatch(_)
        | Error::Parse { .. }
        | Error::Json(_) => PyValueError::new_err(msg),
        Error::Io(_) => PyIOError::new_err(msg),
    }
}

fn to_py<'py, T: Serialize>(py: Python<'py>, value: &T) -> PyResult<Bound<'py, PyAny>> {
    let text = serde_json::to_string(value).map_err(|e| PyRuntimeError::new_err(e.to_string()))?;
    py.import("json")?.call_method1("loads", (text,))
}

/// LMI of a word-feature pair from raw counts.
#[pyfunction]
fn lmi_score(joint_count: u64, word_count: u64, feature_count: u64, total_count: u64) -> PyResult<f64> {
    thesaurus::lmi_score(joint_count, word_count, feature_count, total_count).map_err(to_py_err)
}

/// Writes a generated corpus whose target changes sense half way.
#[pyfunction]
#[pyo3(signature = (path, target = "crisis/NN"))]
fn write_synthetic_corpus(path: PathBuf, target: &str) -> PyResult<()> {
    SenseShift {
        target: target.to_string(),
        ..SenseShift::default()
    }
    .write(&path)
    .map_err(to_py_err)
}

#[pyclass(module = "sensegraph")]
struct Store {
    inner: Arc<CoreStore>,
}

#[pymethods]
impl Store {
    #[new]
    fn new() -> Self {
        Self {
            inner: Arc::new(CoreStore::new()),
        }
    }

    /// Loads every corpus directory below `data_dir`.
    #[staticmethod]
    fn open(data_dir: PathBuf) -> PyResult<Self> {
        Ok(Self {
            inner: Arc::new(CoreStore::open(&data_dir).map_err(to_py_err)?),
        })
    }

    fn ingest<'py>(&self, py: Python<'py>, path: PathBuf, corpus_id: &str) -> PyResult<Bound<'py, PyAny>> {
        let handle = self.inner.ingest_corpus(&path, corpus_id).map_err(to_py_err)?;
        to_py(py, &handle)
    }

    fn corpora<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        to_py(py, &self.inner.handles())
    }

    #[pyo3(signature = (corpus_id, word, interval, limit = 10))]
    fn neighbours(&self, corpus_id: &str, word: &str, interval: usize, limit: usize) -> PyResult<Vec<(String, f64)>> {
        let corpus = self.inner.corpus(corpus_id).map_err(to_py_err)?;
        corpus.query_neighbours(word, interval, limit).map_err(to_py_err)
    }

    fn edge_scores(&self, corpus_id: &str, word1: &str, word2: &str) -> PyResult<Vec<(usize, f64)>> {
        let corpus = self.inner.corpus(corpus_id).map_err(to_py_err)?;
        Ok(corpus.query_edge_scores(word1, word2).into_iter().collect())
    }

    #[pyo3(signature = (corpus_id, words, scope = "node", interval = None, limit = 50))]
    fn features<'py>(
        &self,
        py: Python<'py>,
        corpus_id: &str,
        words: Vec<String>,
        scope: &str,
        interval: Option<usize>,
        limit: usize,
    ) -> PyResult<Bound<'py, PyAny>> {
        let corpus = self.inner.corpus(corpus_id).map_err(to_py_err)?;
        let scope: Scope = scope.parse().map_err(to_py_err)?;
        let members: BTreeSet<String> = words.into_iter().collect();
        let ranking = evidence::rank_features(corpus.features(), &members, scope, interval, limit).map_err(to_py_err)?;
        to_py(py, &ranking)
    }

    #[pyo3(signature = (corpus_id, word, feature = None, interval = None, limit = 50))]
    fn sentences<'py>(
        &self,
        py: Python<'py>,
        corpus_id: &str,
        word: &str,
        feature: Option<&str>,
        interval: Option<usize>,
        limit: usize,
    ) -> PyResult<Bound<'py, PyAny>> {
        let corpus = self.inner.corpus(corpus_id).map_err(to_py_err)?;
        let found = evidence::fetch_evidence(&corpus, word, feature, interval, limit).map_err(to_py_err)?;
        to_py(py, &found)
    }

    /// Builds, clusters and annotates a graph, as the HTTP service does.
    #[pyo3(signature = (corpus_id, target, variant = "interval", n = 100, d = 30, intervals = None, seed = None, iterations = 15))]
    #[allow(clippy::too_many_arguments)]
    fn build_graph(
        &self,
        corpus_id: &str,
        target: &str,
        variant: &str,
        n: usize,
        d: usize,
        intervals: Option<Vec<usize>>,
        seed: Option<u64>,
        iterations: usize,
    ) -> PyResult<Graph> {
        let corpus = self.inner.corpus(corpus_id).map_err(to_py_err)?;
        let variant: Variant = variant.parse().map_err(to_py_err)?;
        let request = GraphRequest {
            variant,
            n,
            d,
            interval_indices: intervals.unwrap_or_default(),
            seed,
            iterations,
            ..GraphRequest::new(corpus_id, target)
        };
        let seed = request.seed_or_random();
        let graph = pipeline::run(&corpus, &request, seed).map_err(to_py_err)?;
        Ok(Graph { inner: graph })
    }
}

type Slice = (Vec<String>, Vec<(String, String)>);

#[pyclass(module = "sensegraph")]
struct Graph {
    inner: NgotGraph,
}

#[pymethods]
impl Graph {
    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        let inner = serde_json::from_str(text).map_err(|e| PyValueError::new_err(e.to_string()))?;
        Ok(Self { inner })
    }

    fn to_json(&self) -> PyResult<String> {
        serde_json::to_string(&self.inner).map_err(|e| PyRuntimeError::new_err(e.to_string()))
    }

    #[getter]
    fn words(&self) -> Vec<String> {
        self.inner.nodes.iter().map(|n| n.word.clone()).collect()
    }

    #[getter]
    fn edges(&self) -> Vec<(String, String, f64)> {
        self.inner
            .edges
            .iter()
            .map(|e| (e.source.clone(), e.target.clone(), e.aggregate_weight))
            .collect()
    }

    #[getter]
    fn warning(&self) -> Option<String> {
        self.inner.warning.clone()
    }

    /// Word -> cluster id, after the most recent clustering.
    #[getter]
    fn clusters(&self) -> Vec<(String, Option<usize>)> {
        self.inner.nodes.iter().map(|n| (n.word.clone(), n.cluster_id)).collect()
    }

    /// Reclusters in place and returns the seed that was used.
    #[pyo3(signature = (seed = None, iterations = 15))]
    fn cluster(&mut self, seed: Option<u64>, iterations: usize) -> PyResult<u64> {
        let seed = seed.unwrap_or_else(pipeline::random_seed);
        pipeline::cluster_graph(&mut self.inner, iterations, seed).map_err(to_py_err)?;
        Ok(seed)
    }

    fn time_diff<'py>(&self, py: Python<'py>, reference: usize) -> PyResult<Bound<'py, PyAny>> {
        let report = analytics::time_diff(&self.inner, reference).map_err(to_py_err)?;
        to_py(py, &report.category_by_word)
    }

    fn betweenness(&self) -> Vec<(String, f64)> {
        analytics::betweenness(&self.inner).betweenness_by_word.into_iter().collect()
    }

    /// Node words present in `interval`, and the edges weighted there.
    fn interval_slice(&self, interval: usize) -> PyResult<Slice> {
        let slice = analytics::interval_slice(&self.inner, interval).map_err(to_py_err)?;
        Ok((
            slice.nodes.into_iter().collect(),
            slice.edges.into_iter().map(|e| (e.source, e.target)).collect(),
        ))
    }

    #[pyo3(signature = (word, other = None))]
    fn score_series(&self, word: &str, other: Option<&str>) -> PyResult<Vec<(usize, Option<f64>)>> {
        let element = match other {
            Some(o) => Element::Edge(word.to_string(), o.to_string()),
            None => Element::Node(word.to_string()),
        };
        analytics::score_series(&self.inner, &element).map_err(to_py_err)
    }

    fn __len__(&self) -> usize {
        self.inner.nodes.len()
    }

    fn __repr__(&self) -> String {
        format!(
            "Graph(target={:?}, nodes={}, edges={})",
            self.inner.params.target,
            self.inner.nodes.len(),
            self.inner.edges.len()
        )
    }
}

#[pymodule]
#[pyo3(name = "sensegraph")]
fn sensegraph_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(lmi_score, m)?)?;
    m.add_function(wrap_pyfunction!(write_synthetic_corpus, m)?)?;
    m.add_class::<Store>()?;
    m.add_class::<Graph>()?;
    Ok(())
}
