//! Per-corpus storage: intervals, similarity pairs, ranked features and an
//! example-sentence index.
//!
//! A [`Corpus`] is immutable once built. The [`Store`] maps corpus ids to
//! shared snapshots and swaps a whole snapshot in on ingest, so readers
//! never see a partially loaded corpus.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fs::{self, File};
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;
use std::sync::{Arc, RwLock};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::thesaurus::{
    validate_intervals, CountTable, FeatureScore, FeatureTable, IntervalId, SimilarityRecord, DEFAULT_MIN_SCORE,
    MAX_FEATURES,
};
use crate::tsv;

pub const INTERVALS_FILE: &str = "intervals.tsv";
pub const SIMILARITY_FILE: &str = "similarity.tsv";
pub const FEATURES_FILE: &str = "features.tsv";
pub const COUNTS_FILE: &str = "counts.tsv";
pub const SENTENCES_FILE: &str = "sentences.jsonl";
pub const META_FILE: &str = "corpus.json";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorpusHandle {
    pub corpus_id: String,
    pub name: String,
    pub interval_count: usize,
    pub intervals: Vec<IntervalId>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SentenceRecord {
    pub sentence_id: String,
    pub text: String,
    pub interval: usize,
    pub word_index: BTreeSet<String>,
    pub feature_index: BTreeSet<(String, String)>,
}

impl SentenceRecord {
    /// Indexes whitespace tokens of `text` plus every attested word.
    pub fn new(
        sentence_id: impl Into<String>,
        text: impl Into<String>,
        interval: usize,
        attested: impl IntoIterator<Item = (String, String)>,
    ) -> Self {
        let text = text.into();
        let feature_index: BTreeSet<(String, String)> = attested.into_iter().collect();
        let mut word_index: BTreeSet<String> = text.split_whitespace().map(str::to_string).collect();
        word_index.extend(feature_index.iter().map(|(w, _)| w.clone()));
        Self {
            sentence_id: sentence_id.into(),
            text,
            interval,
            word_index,
            feature_index,
        }
    }

    pub fn matches(&self, word: &str, feature: Option<&str>, interval: Option<usize>) -> bool {
        self.word_index.contains(word)
            && interval.is_none_or(|t| self.interval == t)
            && feature.is_none_or(|f| self.feature_index.contains(&(word.to_string(), f.to_string())))
    }
}

#[derive(Debug, Deserialize, Serialize)]
struct SentenceLine {
    sentence_id: String,
    text: String,
    interval_index: usize,
    #[serde(default)]
    attested: Vec<(String, String)>,
}

#[derive(Debug, Default, Deserialize, Serialize)]
struct CorpusMeta {
    name: Option<String>,
}

/// Thesaurus construction settings used when a corpus ships counts only.
#[derive(Debug, Clone, Copy)]
pub struct IngestOptions {
    pub k: usize,
    pub min_score: usize,
}

impl Default for IngestOptions {
    fn default() -> Self {
        Self {
            k: MAX_FEATURES,
            min_score: DEFAULT_MIN_SCORE,
        }
    }
}

fn pair_key(a: &str, b: &str) -> (String, String) {
    if a <= b {
        (a.to_string(), b.to_string())
    } else {
        (b.to_string(), a.to_string())
    }
}

/// Immutable snapshot of one corpus.
#[derive(Debug)]
pub struct Corpus {
    handle: CorpusHandle,
    // interval -> word -> neighbours sorted by score desc, token asc
    neighbours: BTreeMap<usize, HashMap<String, Vec<(String, f64)>>>,
    pairs: HashMap<(String, String), BTreeMap<usize, f64>>,
    features: FeatureTable,
    sentences: Vec<SentenceRecord>,
    postings: HashMap<String, Vec<usize>>,
}

impl Corpus {
    /// Assembles a corpus, rejecting self-pairs, negative scores, orphan
    /// interval references and (a,b)/(b,a) records that disagree.
    pub fn from_parts(
        corpus_id: impl Into<String>,
        name: impl Into<String>,
        intervals: Vec<IntervalId>,
        similarity: impl IntoIterator<Item = SimilarityRecord>,
        features: FeatureTable,
        sentences: Vec<SentenceRecord>,
    ) -> Result<Self> {
        let intervals = validate_intervals(&intervals)?;
        let count = intervals.len();
        let known = |t: usize| t < count;

        let mut pairs: HashMap<(String, String), BTreeMap<usize, f64>> = HashMap::new();
        for rec in similarity {
            if rec.word1 == rec.word2 {
                return Err(Error::invalid(format!("self-similarity record for {}", rec.word1)));
            }
            if !rec.score.is_finite() || rec.score < 0.0 {
                return Err(Error::invalid(format!(
                    "score for ({}, {}) must be finite and non-negative",
                    rec.word1, rec.word2
                )));
            }
            if !known(rec.interval) {
                return Err(Error::invalid(format!(
                    "similarity record ({}, {}) references unknown interval {}",
                    rec.word1, rec.word2, rec.interval
                )));
            }
            let key = pair_key(&rec.word1, &rec.word2);
            let by_interval = pairs.entry(key).or_default();
            match by_interval.get(&rec.interval) {
                Some(&existing) if existing != rec.score => {
                    return Err(Error::ConflictingSymmetry {
                        word1: rec.word1,
                        word2: rec.word2,
                        interval: rec.interval,
                        first: existing,
                        second: rec.score,
                    });
                }
                _ => {
                    by_interval.insert(rec.interval, rec.score);
                }
            }
        }

        if let Some(bad) = features.intervals().find(|t| !known(*t)) {
            return Err(Error::invalid(format!("feature data references unknown interval {bad}")));
        }
        let mut features = features;
        features.register_intervals(0..count);

        let mut neighbours: BTreeMap<usize, HashMap<String, Vec<(String, f64)>>> =
            (0..count).map(|t| (t, HashMap::new())).collect();
        for ((a, b), by_interval) in &pairs {
            for (&t, &score) in by_interval {
                let slot = neighbours.get_mut(&t).expect("interval checked");
                slot.entry(a.clone()).or_default().push((b.clone(), score));
                slot.entry(b.clone()).or_default().push((a.clone(), score));
            }
        }
        for slot in neighbours.values_mut() {
            for list in slot.values_mut() {
                list.sort_by(|x, y| y.1.total_cmp(&x.1).then_with(|| x.0.cmp(&y.0)));
            }
        }

        let mut sentences = sentences;
        if let Some(bad) = sentences.iter().find(|s| !known(s.interval)) {
            return Err(Error::invalid(format!(
                "sentence {} references unknown interval {}",
                bad.sentence_id, bad.interval
            )));
        }
        sentences.sort_by(|a, b| a.sentence_id.cmp(&b.sentence_id));
        if let Some(pair) = sentences.windows(2).find(|p| p[0].sentence_id == p[1].sentence_id) {
            return Err(Error::invalid(format!("duplicate sentence id {}", pair[0].sentence_id)));
        }
        let mut postings: HashMap<String, Vec<usize>> = HashMap::new();
        for (idx, s) in sentences.iter().enumerate() {
            for w in &s.word_index {
                postings.entry(w.clone()).or_default().push(idx);
            }
        }

        let corpus_id = corpus_id.into();
        Ok(Self {
            handle: CorpusHandle {
                corpus_id,
                name: name.into(),
                interval_count: count,
                intervals,
            },
            neighbours,
            pairs,
            features,
            sentences,
            postings,
        })
    }

    /// Loads a corpus directory. `intervals.tsv` is required, together with
    /// `similarity.tsv` and/or `counts.tsv`. `features.tsv`,
    /// `sentences.jsonl` and `corpus.json` are optional. When no
    /// similarity file exists the thesaurus is computed from the counts.
    pub fn load_dir(dir: &Path, corpus_id: &str, options: IngestOptions) -> Result<Self> {
        if !dir.is_dir() {
            return Err(Error::not_found(format!("corpus directory {}", dir.display())));
        }
        let intervals_path = dir.join(INTERVALS_FILE);
        if !intervals_path.is_file() {
            return Err(Error::invalid(format!("{} is missing {INTERVALS_FILE}", dir.display())));
        }
        let intervals = read_intervals(&intervals_path)?;
        let count = intervals.len();

        let sim_path = dir.join(SIMILARITY_FILE);
        let counts_path = dir.join(COUNTS_FILE);
        let features_path = dir.join(FEATURES_FILE);
        if !sim_path.is_file() && !counts_path.is_file() {
            return Err(Error::invalid(format!(
                "{} needs {SIMILARITY_FILE} or {COUNTS_FILE}",
                dir.display()
            )));
        }

        let counts = if counts_path.is_file() {
            let counts = CountTable::load(&counts_path)?;
            if let Some(bad) = counts.intervals().find(|t| *t >= count) {
                return Err(Error::invalid(format!("{COUNTS_FILE} references unknown interval {bad}")));
            }
            Some(counts)
        } else {
            None
        };

        let features = if features_path.is_file() {
            FeatureTable::from_scores(0..count, read_features(&features_path)?)
        } else if let Some(counts) = &counts {
            FeatureTable::from_counts(0..count, counts)
        } else {
            FeatureTable::new(0..count)
        };

        let similarity = if sim_path.is_file() {
            read_similarity(&sim_path)?
        } else {
            let table = match (&counts, features_path.is_file()) {
                (Some(c), true) => FeatureTable::from_counts(0..count, c),
                _ => features.clone(),
            };
            let mut all = Vec::new();
            for t in 0..count {
                all.extend(table.similarity_records(t, options.k, options.min_score)?);
            }
            all
        };

        let sentences_path = dir.join(SENTENCES_FILE);
        let sentences = if sentences_path.is_file() {
            read_sentences(&sentences_path)?
        } else {
            Vec::new()
        };

        let meta_path = dir.join(META_FILE);
        let meta: CorpusMeta = if meta_path.is_file() {
            serde_json::from_reader(File::open(&meta_path)?)?
        } else {
            CorpusMeta::default()
        };
        let name = meta.name.unwrap_or_else(|| corpus_id.to_string());

        Corpus::from_parts(corpus_id, name, intervals, similarity, features, sentences)
    }

    pub fn handle(&self) -> &CorpusHandle {
        &self.handle
    }

    pub fn id(&self) -> &str {
        &self.handle.corpus_id
    }

    pub fn intervals(&self) -> &[IntervalId] {
        &self.handle.intervals
    }

    pub fn has_interval(&self, interval: usize) -> bool {
        interval < self.handle.interval_count
    }

    pub fn features(&self) -> &FeatureTable {
        &self.features
    }

    fn slot(&self, interval: usize) -> Result<&HashMap<String, Vec<(String, f64)>>> {
        self.neighbours
            .get(&interval)
            .ok_or_else(|| Error::not_found(format!("interval {interval} in corpus {}", self.id())))
    }

    /// Every neighbour of `word` in `interval`, best first.
    pub fn neighbours(&self, word: &str, interval: usize) -> Result<&[(String, f64)]> {
        Ok(self.slot(interval)?.get(word).map(Vec::as_slice).unwrap_or(&[]))
    }

    /// Neighbours sorted by score descending, ties by token; at most `limit`.
    pub fn query_neighbours(&self, word: &str, interval: usize, limit: usize) -> Result<Vec<(String, f64)>> {
        if limit == 0 {
            return Err(Error::param("limit", "must be at least 1"));
        }
        Ok(self.neighbours(word, interval)?.iter().take(limit).cloned().collect())
    }

    pub fn pair_score(&self, word1: &str, word2: &str, interval: usize) -> Option<f64> {
        self.pairs
            .get(&pair_key(word1, word2))
            .and_then(|m| m.get(&interval))
            .copied()
    }

    /// Scores of the pair in every interval where it has a record.
    pub fn query_edge_scores(&self, word1: &str, word2: &str) -> BTreeMap<usize, f64> {
        self.pairs.get(&pair_key(word1, word2)).cloned().unwrap_or_default()
    }

    /// Sentences containing `word`, optionally attesting `(word, feature)`
    /// and restricted to `interval`, ordered by sentence id.
    pub fn query_sentences(
        &self,
        word: &str,
        feature: Option<&str>,
        interval: Option<usize>,
        limit: usize,
    ) -> Result<Vec<SentenceRecord>> {
        if limit == 0 {
            return Err(Error::param("limit", "must be at least 1"));
        }
        let Some(ids) = self.postings.get(word) else {
            return Ok(Vec::new());
        };
        Ok(ids
            .iter()
            .map(|&i| &self.sentences[i])
            .filter(|s| s.matches(word, feature, interval))
            .take(limit)
            .cloned()
            .collect())
    }

    pub fn sentences(&self) -> &[SentenceRecord] {
        &self.sentences
    }

    /// One record per unordered pair and interval, `word1 < word2`, sorted
    /// by interval then pair.
    pub fn similarity_records(&self) -> Vec<SimilarityRecord> {
        let mut out: Vec<SimilarityRecord> = self
            .pairs
            .iter()
            .flat_map(|((a, b), m)| {
                m.iter().map(move |(&t, &score)| SimilarityRecord {
                    word1: a.clone(),
                    word2: b.clone(),
                    interval: t,
                    score,
                })
            })
            .collect();
        out.sort_by(|x, y| (x.interval, &x.word1, &x.word2).cmp(&(y.interval, &y.word1, &y.word2)));
        out
    }

    pub fn write_similarity_tsv<W: Write>(&self, out: &mut W) -> Result<()> {
        for r in self.similarity_records() {
            writeln!(out, "{}\t{}\t{}\t{}", r.word1, r.word2, r.score, r.interval)?;
        }
        Ok(())
    }

    /// Writes the corpus in its canonical file layout. Features are written
    /// pre-scored, so reloading never recomputes LMI.
    pub fn write_dir(&self, dir: &Path) -> Result<()> {
        fs::create_dir_all(dir)?;
        let mut w = BufWriter::new(File::create(dir.join(INTERVALS_FILE))?);
        for iv in self.intervals() {
            writeln!(w, "{}\t{}\t{}\t{}", iv.index, iv.label, iv.start_year, iv.end_year)?;
        }
        w.flush()?;

        let mut w = BufWriter::new(File::create(dir.join(SIMILARITY_FILE))?);
        self.write_similarity_tsv(&mut w)?;
        w.flush()?;

        let mut w = BufWriter::new(File::create(dir.join(FEATURES_FILE))?);
        for t in self.features.intervals() {
            for word in self.features.words(t)? {
                for (feature, lmi) in self.features.ranked(word, t)? {
                    writeln!(w, "{word}\t{feature}\t{lmi}\t{t}")?;
                }
            }
        }
        w.flush()?;

        let mut w = BufWriter::new(File::create(dir.join(SENTENCES_FILE))?);
        for s in &self.sentences {
            let line = SentenceLine {
                sentence_id: s.sentence_id.clone(),
                text: s.text.clone(),
                interval_index: s.interval,
                attested: s.feature_index.iter().cloned().collect(),
            };
            serde_json::to_writer(&mut w, &line)?;
            writeln!(w)?;
        }
        w.flush()?;

        let meta = CorpusMeta {
            name: Some(self.handle.name.clone()),
        };
        fs::write(dir.join(META_FILE), serde_json::to_vec_pretty(&meta)?)?;
        Ok(())
    }
}

fn read_intervals(path: &Path) -> Result<Vec<IntervalId>> {
    let mut intervals = Vec::new();
    tsv::read_file(path, 4, |_, f| {
        intervals.push(IntervalId {
            index: tsv::field(f[0], "interval index")?,
            label: f[1].trim().to_string(),
            start_year: tsv::field(f[2], "start year")?,
            end_year: tsv::field(f[3], "end year")?,
        });
        Ok(())
    })?;
    if intervals.is_empty() {
        return Err(Error::invalid(format!("{} lists no intervals", path.display())));
    }
    validate_intervals(&intervals)
}

fn read_similarity(path: &Path) -> Result<Vec<SimilarityRecord>> {
    let mut out = Vec::new();
    tsv::read_file(path, 4, |_, f| {
        out.push(SimilarityRecord {
            word1: tsv::token(f[0], "word1")?,
            word2: tsv::token(f[1], "word2")?,
            score: tsv::field(f[2], "score")?,
            interval: tsv::field(f[3], "interval index")?,
        });
        Ok(())
    })?;
    Ok(out)
}

fn read_features(path: &Path) -> Result<Vec<FeatureScore>> {
    let mut out = Vec::new();
    tsv::read_file(path, 4, |_, f| {
        let lmi: f64 = tsv::field(f[2], "lmi")?;
        if !lmi.is_finite() {
            return Err("lmi must be finite".to_string());
        }
        out.push(FeatureScore {
            word: tsv::token(f[0], "word")?,
            feature: tsv::token(f[1], "feature")?,
            lmi,
            interval: tsv::field(f[3], "interval index")?,
        });
        Ok(())
    })?;
    Ok(out)
}

fn read_sentences(path: &Path) -> Result<Vec<SentenceRecord>> {
    let reader = BufReader::new(File::open(path)?);
    let mut out = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let parsed: SentenceLine = serde_json::from_str(&line).map_err(|e| Error::Parse {
            file: path.to_path_buf(),
            line: idx + 1,
            message: e.to_string(),
        })?;
        out.push(SentenceRecord::new(
            parsed.sentence_id,
            parsed.text,
            parsed.interval_index,
            parsed.attested,
        ));
    }
    Ok(out)
}

/// Shared registry of corpus snapshots.
#[derive(Debug, Default)]
pub struct Store {
    corpora: RwLock<BTreeMap<String, Arc<Corpus>>>,
    options: IngestOptions,
}

impl Store {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_options(options: IngestOptions) -> Self {
        Self {
            corpora: RwLock::default(),
            options,
        }
    }

    /// Loads every subdirectory of `data_dir` as a corpus named after it.
    pub fn open(data_dir: &Path) -> Result<Self> {
        let store = Store::new();
        if !data_dir.is_dir() {
            return Err(Error::not_found(format!("data directory {}", data_dir.display())));
        }
        let mut dirs: Vec<_> = fs::read_dir(data_dir)?
            .filter_map(|e| e.ok())
            .map(|e| e.path())
            .filter(|p| p.join(INTERVALS_FILE).is_file())
            .collect();
        dirs.sort();
        for dir in dirs {
            let id = dir
                .file_name()
                .and_then(|n| n.to_str())
                .ok_or_else(|| Error::invalid(format!("non UTF-8 corpus dir {}", dir.display())))?
                .to_string();
            store.ingest_corpus(&dir, &id)?;
        }
        Ok(store)
    }

    /// Loads `dir` and replaces any corpus with the same id.
    pub fn ingest_corpus(&self, dir: &Path, corpus_id: &str) -> Result<CorpusHandle> {
        let corpus = Corpus::load_dir(dir, corpus_id, self.options)?;
        Ok(self.insert(corpus))
    }

    pub fn insert(&self, corpus: Corpus) -> CorpusHandle {
        let handle = corpus.handle().clone();
        self.corpora
            .write()
            .expect("store lock poisoned")
            .insert(handle.corpus_id.clone(), Arc::new(corpus));
        handle
    }

    pub fn corpus(&self, corpus_id: &str) -> Result<Arc<Corpus>> {
        self.corpora
            .read()
            .expect("store lock poisoned")
            .get(corpus_id)
            .cloned()
            .ok_or_else(|| Error::not_found(format!("corpus {corpus_id}")))
    }

    pub fn handles(&self) -> Vec<CorpusHandle> {
        self.corpora
            .read()
            .expect("store lock poisoned")
            .values()
            .map(|c| c.handle().clone())
            .collect()
    }
}
