use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Parser, Subcommand};

use sensegraph::analytics;
use sensegraph::config::{CliConfig, OutputFormat};
use sensegraph::ngot::{Aggregation, NgotGraph, Variant};
use sensegraph::pipeline::{self, GraphRequest};
use sensegraph::service::{self, ServiceConfig};
use sensegraph::store::{Corpus, IngestOptions, Store};
use sensegraph::synthetic::SenseShift;
use sensegraph::{Error, Result};

#[derive(Debug, Parser)]
#[command(name = "sensegraph", version, about = "Sense clustering over time")]
struct Cli {
    /// key=value configuration file
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Directory holding ingested corpora
    #[arg(long, global = true)]
    data_dir: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Validate a corpus directory and store it under the data directory
    Ingest {
        source: PathBuf,
        #[arg(long)]
        corpus_id: String,
    },
    /// Build a neighbourhood graph over time (with betweenness)
    Build {
        #[arg(long)]
        target: String,
        #[arg(long)]
        corpus: Option<String>,
        #[arg(long)]
        variant: Option<Variant>,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        d: Option<usize>,
        /// Comma-separated interval indices; all intervals when omitted
        #[arg(long, alias = "i", value_delimiter = ',')]
        intervals: Vec<usize>,
        #[arg(long, default_value = "sum")]
        aggregation: Aggregation,
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
    /// Cluster a graph file with Chinese Whispers
    Cluster {
        graph: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        iterations: Option<usize>,
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
    /// Categorise the nodes of a graph file relative to a reference interval
    Timediff {
        graph: PathBuf,
        #[arg(long)]
        reference: usize,
        #[arg(long)]
        format: Option<OutputFormat>,
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
    /// Serve the HTTP API
    Serve {
        #[arg(long)]
        port: Option<u16>,
        #[arg(long)]
        cors_origin: Option<String>,
    },
    /// Write a generated corpus with a known sense shift
    Synth {
        dir: PathBuf,
        #[arg(long, default_value = "crisis/NN")]
        target: String,
    },
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::FAILURE
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    let mut cfg = match &cli.config {
        Some(path) => CliConfig::load(path)?,
        None => CliConfig::default(),
    };
    if let Some(dir) = cli.data_dir {
        cfg.data_dir = dir;
    }

    match cli.command {
        Command::Ingest { source, corpus_id } => {
            let corpus = Corpus::load_dir(&source, &corpus_id, IngestOptions::default())?;
            corpus.write_dir(&cfg.data_dir.join(&corpus_id))?;
            log::info!(
                "ingested {} into {}",
                source.display(),
                cfg.data_dir.join(&corpus_id).display()
            );
            write_output(None, &serde_json::to_string_pretty(corpus.handle())?)
        }
        Command::Build {
            target,
            corpus,
            variant,
            n,
            d,
            intervals,
            aggregation,
            output,
        } => {
            let corpus_id = corpus
                .or(cfg.corpus.clone())
                .ok_or_else(|| Error::InvalidParam {
                    field: "corpus".into(),
                    message: "pass --corpus or set corpus= in the config file".into(),
                })?;
            let corpus = Corpus::load_dir(&cfg.data_dir.join(&corpus_id), &corpus_id, IngestOptions::default())?;
            let request = GraphRequest {
                variant: variant.unwrap_or(cfg.variant),
                n: n.unwrap_or(cfg.n),
                d: d.unwrap_or(cfg.d),
                interval_indices: intervals,
                aggregation,
                ..GraphRequest::new(corpus_id, target)
            };
            let graph = pipeline::build_graph(&corpus, &request.params(&corpus))?;
            if let Some(warning) = &graph.warning {
                eprintln!("warning: {warning}");
            }
            write_output(output.as_deref(), &serde_json::to_string(&graph)?)
        }
        Command::Cluster {
            graph,
            seed,
            iterations,
            output,
        } => {
            let mut g = read_graph(&graph)?;
            let seed = seed.unwrap_or_else(pipeline::random_seed);
            pipeline::cluster_graph(&mut g, iterations.unwrap_or(cfg.iterations), seed)?;
            write_output(output.as_deref(), &serde_json::to_string(&g)?)
        }
        Command::Timediff {
            graph,
            reference,
            format,
            output,
        } => {
            let g = read_graph(&graph)?;
            let report = analytics::time_diff(&g, reference)?;
            let text = match format.unwrap_or(cfg.format) {
                OutputFormat::Json => serde_json::to_string_pretty(&report)?,
                OutputFormat::Tsv => report
                    .category_by_word
                    .iter()
                    .map(|(w, c)| {
                        let c = serde_json::to_value(c).expect("enum serializes");
                        format!("{w}\t{}", c.as_str().unwrap_or_default())
                    })
                    .collect::<Vec<_>>()
                    .join("\n"),
            };
            write_output(output.as_deref(), &text)
        }
        Command::Serve { port, cors_origin } => {
            let store = Arc::new(Store::open(&cfg.data_dir)?);
            let config = ServiceConfig {
                port: port.unwrap_or(cfg.port),
                cors_origin,
            };
            let runtime = tokio::runtime::Runtime::new()?;
            runtime.block_on(service::serve(store, config))?;
            Ok(())
        }
        Command::Synth { dir, target } => {
            SenseShift {
                target,
                ..SenseShift::default()
            }
            .write(&dir)?;
            log::info!("wrote synthetic corpus to {}", dir.display());
            Ok(())
        }
    }
}

fn read_graph(path: &Path) -> Result<NgotGraph> {
    Ok(serde_json::from_slice(&fs::read(path)?)?)
}

fn write_output(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(path) => fs::write(path, format!("{text}\n"))?,
        None => {
            let mut out = std::io::stdout().lock();
            writeln!(out, "{text}")?;
        }
    }
    Ok(())
}
