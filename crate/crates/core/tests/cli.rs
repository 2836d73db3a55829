mod common;

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use sensegraph::ngot::NgotGraph;
use sensegraph::synthetic::SenseShift;

fn sensegraph(data_dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sensegraph"))
        .arg("--data-dir")
        .arg(data_dir)
        .args(args)
        .env("RUST_LOG", "warn")
        .output()
        .unwrap()
}

fn ingest_synthetic(root: &Path) -> std::path::PathBuf {
    let source = root.join("source");
    SenseShift::default().write(&source).unwrap();
    let data = root.join("data");
    let out = sensegraph(&data, &["ingest", source.to_str().unwrap(), "--corpus-id", "shift"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    data
}

#[test]
fn ingest_of_empty_directory_fails() {
    let tmp = tempfile::tempdir().unwrap();
    let empty = tmp.path().join("empty");
    fs::create_dir(&empty).unwrap();
    let out = sensegraph(&tmp.path().join("data"), &["ingest", empty.to_str().unwrap(), "--corpus-id", "x"]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("error"));
}

#[test]
fn build_then_cluster_is_deterministic() {
    let tmp = tempfile::tempdir().unwrap();
    let data = ingest_synthetic(tmp.path());
    let graph = tmp.path().join("graph.json");
    let out = sensegraph(
        &data,
        &["build", "--target", "crisis/NN", "--corpus", "shift", "--n", "20", "--d", "5", "-o", graph.to_str().unwrap()],
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let mut outputs = Vec::new();
    for name in ["a.json", "b.json"] {
        let path = tmp.path().join(name);
        let out = sensegraph(&data, &["cluster", graph.to_str().unwrap(), "--seed", "42", "-o", path.to_str().unwrap()]);
        assert!(out.status.success());
        outputs.push(fs::read(path).unwrap());
    }
    assert_eq!(outputs[0], outputs[1]);
    let clustered: NgotGraph = serde_json::from_slice(&outputs[0]).unwrap();
    assert!(clustered.nodes.iter().all(|n| n.cluster_id.is_some()));
}

#[test]
fn single_interval_build_equals_static_graph() {
    let tmp = tempfile::tempdir().unwrap();
    let data = ingest_synthetic(tmp.path());
    let out = sensegraph(
        &data,
        &["build", "--target", "crisis/NN", "--corpus", "shift", "--variant", "interval", "--n", "5", "--d", "2", "--i", "1"],
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let graph: NgotGraph = serde_json::from_slice(&out.stdout).unwrap();

    let records: Vec<_> = fs::read_to_string(data.join("shift").join("similarity.tsv"))
        .unwrap()
        .lines()
        .map(|l| {
            let c: Vec<&str> = l.split('\t').collect();
            common::rec(c[0], c[1], c[2].parse().unwrap(), c[3].parse().unwrap())
        })
        .collect();
    let (nodes, edges) = common::static_graph(&records, "crisis/NN", 5, 2, 1);
    let got_nodes: BTreeMap<String, f64> = graph.nodes.iter().map(|n| (n.word.clone(), n.score_by_interval[&1])).collect();
    assert_eq!(got_nodes, nodes);
    let got_edges: BTreeMap<(String, String), f64> =
        graph.edges.iter().map(|e| ((e.source.clone(), e.target.clone()), e.aggregate_weight)).collect();
    assert_eq!(got_edges, edges);
}

#[test]
fn timediff_tsv_output() {
    let tmp = tempfile::tempdir().unwrap();
    let data = ingest_synthetic(tmp.path());
    let graph = tmp.path().join("graph.json");
    let out = sensegraph(&data, &["build", "--target", "crisis/NN", "--corpus", "shift", "-o", graph.to_str().unwrap()]);
    assert!(out.status.success());
    let out = sensegraph(&data, &["timediff", graph.to_str().unwrap(), "--reference", "2", "--format", "tsv"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().count(), 16);
    assert!(text.contains("doom00/NN\tstable"));
    assert!(text.contains("inflation03/NN\temerged_after"));
}

#[test]
fn config_file_supplies_corpus() {
    let tmp = tempfile::tempdir().unwrap();
    let data = ingest_synthetic(tmp.path());
    let cfg = tmp.path().join("sensegraph.conf");
    fs::write(&cfg, format!("data_dir={}\ncorpus=shift\nn=3\n", data.display())).unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_sensegraph"))
        .args(["--config", cfg.to_str().unwrap(), "build", "--target", "crisis/NN", "--i", "0"])
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let graph: NgotGraph = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(graph.nodes.len(), 3);
}
