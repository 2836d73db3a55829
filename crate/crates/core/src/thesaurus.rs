//! Distributional thesaurus computation.
//!
//! Word-feature associations are ranked by Lexicographer's Mutual
//! Information, `f(w,c) * log2(f(w,c) * N / (f(w) * f(c)))`, and each word
//! keeps at most [`MAX_FEATURES`] features per interval. Word similarity is
//! the number of shared features among the two words' top-k lists.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::io::Read;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tsv;

/// Features retained per (word, interval).
pub const MAX_FEATURES: usize = 1000;

/// Default minimum overlap for a pair to enter the thesaurus.
pub const DEFAULT_MIN_SCORE: usize = 2;

/// A time slice of the corpus.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct IntervalId {
    pub index: usize,
    pub label: String,
    pub start_year: i32,
    pub end_year: i32,
}

impl IntervalId {
    pub fn new(index: usize, label: impl Into<String>, start_year: i32, end_year: i32) -> Self {
        Self {
            index,
            label: label.into(),
            start_year,
            end_year,
        }
    }
}

/// Checks that interval indices are dense and unique, years are ordered
/// within an interval, and start years do not decrease with the index.
/// Returns the intervals sorted by index.
pub fn validate_intervals(intervals: &[IntervalId]) -> Result<Vec<IntervalId>> {
    let mut sorted = intervals.to_vec();
    sorted.sort_by_key(|iv| iv.index);
    for pair in sorted.windows(2) {
        if pair[0].index == pair[1].index {
            return Err(Error::invalid(format!("duplicate interval index {}", pair[0].index)));
        }
    }
    for (expected, iv) in sorted.iter().enumerate() {
        if iv.index != expected {
            return Err(Error::invalid(format!(
                "interval indices must be dense from 0; missing {expected}"
            )));
        }
        if iv.start_year > iv.end_year {
            return Err(Error::invalid(format!(
                "interval {} starts after it ends ({} > {})",
                iv.index, iv.start_year, iv.end_year
            )));
        }
    }
    for pair in sorted.windows(2) {
        if pair[1].start_year < pair[0].start_year {
            return Err(Error::invalid(format!(
                "interval {} starts before interval {}",
                pair[1].index, pair[0].index
            )));
        }
    }
    Ok(sorted)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureScore {
    pub word: String,
    pub feature: String,
    pub interval: usize,
    pub lmi: f64,
}

/// Word-word similarity within one interval.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimilarityRecord {
    pub word1: String,
    pub word2: String,
    pub interval: usize,
    pub score: f64,
}

/// Lexicographer's Mutual Information of a word-feature pair.
pub fn lmi_score(joint_count: u64, word_count: u64, feature_count: u64, total_count: u64) -> Result<f64> {
    if joint_count == 0 || word_count == 0 || feature_count == 0 || total_count == 0 {
        return Err(Error::invalid("LMI counts must all be at least 1"));
    }
    if joint_count > word_count || joint_count > feature_count {
        return Err(Error::invalid(format!(
            "joint count {joint_count} exceeds a marginal ({word_count}, {feature_count})"
        )));
    }
    if word_count > total_count || feature_count > total_count {
        return Err(Error::invalid(format!(
            "marginal count exceeds total {total_count}"
        )));
    }
    let joint = joint_count as f64;
    let ratio = (joint * total_count as f64) / (word_count as f64 * feature_count as f64);
    Ok(joint * ratio.log2())
}

/// Raw co-occurrence counts, keyed by interval, word and feature.
#[derive(Debug, Clone, Default)]
pub struct CountTable {
    counts: BTreeMap<usize, BTreeMap<String, BTreeMap<String, u64>>>,
}

impl CountTable {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds `count` to the (word, feature) cell of `interval`.
    pub fn add(&mut self, word: &str, feature: &str, interval: usize, count: u64) {
        *self
            .counts
            .entry(interval)
            .or_default()
            .entry(word.to_string())
            .or_default()
            .entry(feature.to_string())
            .or_insert(0) += count;
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    pub fn intervals(&self) -> impl Iterator<Item = usize> + '_ {
        self.counts.keys().copied()
    }

    /// Parses `word TAB feature TAB count TAB interval_index` lines.
    pub fn read_tsv<R: Read>(reader: R, source: &Path) -> Result<Self> {
        let mut table = CountTable::new();
        tsv::for_each_row(reader, source, 4, |_, f| {
            let word = tsv::token(f[0], "word")?;
            let feature = tsv::token(f[1], "feature")?;
            let count: u64 = tsv::field(f[2], "count")?;
            if count == 0 {
                return Err("count must be at least 1".to_string());
            }
            let interval: usize = tsv::field(f[3], "interval index")?;
            table.add(&word, &feature, interval, count);
            Ok(())
        })?;
        Ok(table)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let file = std::fs::File::open(path)?;
        Self::read_tsv(file, path)
    }

    /// LMI for every (word, feature) cell of one interval. Marginals and the
    /// total are taken over that interval only.
    pub fn score_interval(&self, interval: usize) -> Vec<FeatureScore> {
        let Some(words) = self.counts.get(&interval) else {
            return Vec::new();
        };
        let mut feature_totals: HashMap<&str, u64> = HashMap::new();
        let mut total = 0u64;
        for features in words.values() {
            for (feature, &c) in features {
                *feature_totals.entry(feature.as_str()).or_insert(0) += c;
                total += c;
            }
        }
        let mut out = Vec::new();
        for (word, features) in words {
            let word_total: u64 = features.values().sum();
            for (feature, &joint) in features {
                let lmi = lmi_score(joint, word_total, feature_totals[feature.as_str()], total)
                    .expect("marginals derived from the same table");
                out.push(FeatureScore {
                    word: word.clone(),
                    feature: feature.clone(),
                    interval,
                    lmi,
                });
            }
        }
        out
    }
}

fn by_lmi_then_feature(a: &(String, f64), b: &(String, f64)) -> Ordering {
    b.1.total_cmp(&a.1).then_with(|| a.0.cmp(&b.0))
}

/// Per-interval ranked feature lists. Each list is sorted by LMI descending
/// with ties broken by feature string, and holds at most [`MAX_FEATURES`].
#[derive(Debug, Clone, Default)]
pub struct FeatureTable {
    by_interval: BTreeMap<usize, HashMap<String, Vec<(String, f64)>>>,
}

impl FeatureTable {
    /// An empty table that recognises the given intervals.
    pub fn new(intervals: impl IntoIterator<Item = usize>) -> Self {
        Self {
            by_interval: intervals.into_iter().map(|i| (i, HashMap::new())).collect(),
        }
    }

    /// Builds a table from scored features. Intervals named by the scores are
    /// registered in addition to `intervals`. Duplicate (word, feature,
    /// interval) scores are summed.
    pub fn from_scores(
        intervals: impl IntoIterator<Item = usize>,
        scores: impl IntoIterator<Item = FeatureScore>,
    ) -> Self {
        let mut table = Self::new(intervals);
        let mut acc: BTreeMap<(usize, String), BTreeMap<String, f64>> = BTreeMap::new();
        for s in scores {
            *acc.entry((s.interval, s.word)).or_default().entry(s.feature).or_insert(0.0) += s.lmi;
        }
        for ((interval, word), feats) in acc {
            let mut list: Vec<(String, f64)> = feats.into_iter().collect();
            list.sort_by(by_lmi_then_feature);
            list.truncate(MAX_FEATURES);
            table.by_interval.entry(interval).or_default().insert(word, list);
        }
        table
    }

    /// Scores every interval of `counts` with LMI.
    pub fn from_counts(intervals: impl IntoIterator<Item = usize>, counts: &CountTable) -> Self {
        let scores = counts.intervals().flat_map(|t| counts.score_interval(t));
        Self::from_scores(intervals, scores)
    }

    pub fn register_intervals(&mut self, intervals: impl IntoIterator<Item = usize>) {
        for t in intervals {
            self.by_interval.entry(t).or_default();
        }
    }

    pub fn has_interval(&self, interval: usize) -> bool {
        self.by_interval.contains_key(&interval)
    }

    pub fn intervals(&self) -> impl Iterator<Item = usize> + '_ {
        self.by_interval.keys().copied()
    }

    fn interval(&self, interval: usize) -> Result<&HashMap<String, Vec<(String, f64)>>> {
        self.by_interval
            .get(&interval)
            .ok_or_else(|| Error::not_found(format!("interval {interval}")))
    }

    /// Words with at least one feature in `interval`, sorted.
    pub fn words(&self, interval: usize) -> Result<Vec<&str>> {
        let mut words: Vec<&str> = self.interval(interval)?.keys().map(String::as_str).collect();
        words.sort_unstable();
        Ok(words)
    }

    /// Full ranked list for a word, empty if the word has no features there.
    pub fn ranked(&self, word: &str, interval: usize) -> Result<&[(String, f64)]> {
        Ok(self
            .interval(interval)?
            .get(word)
            .map(Vec::as_slice)
            .unwrap_or(&[]))
    }

    /// The `k` best-ranked features of `word` in `interval`.
    pub fn top_features(&self, word: &str, interval: usize, k: usize) -> Result<Vec<FeatureScore>> {
        if k == 0 {
            return Err(Error::param("k", "must be at least 1"));
        }
        Ok(self
            .ranked(word, interval)?
            .iter()
            .take(k)
            .map(|(feature, lmi)| FeatureScore {
                word: word.to_string(),
                feature: feature.clone(),
                interval,
                lmi: *lmi,
            })
            .collect())
    }

    fn top_set(&self, word: &str, interval: usize, k: usize) -> Result<HashSet<&str>> {
        Ok(self
            .ranked(word, interval)?
            .iter()
            .take(k)
            .map(|(f, _)| f.as_str())
            .collect())
    }

    /// Number of features shared by the top-k lists of the two words.
    pub fn overlap_similarity(&self, word1: &str, word2: &str, interval: usize, k: usize) -> Result<usize> {
        if k == 0 {
            return Err(Error::param("k", "must be at least 1"));
        }
        let a = self.top_set(word1, interval, k)?;
        let b = self.top_set(word2, interval, k)?;
        let (small, large) = if a.len() <= b.len() { (&a, &b) } else { (&b, &a) };
        Ok(small.iter().filter(|f| large.contains(*f)).count())
    }

    /// One record per unordered word pair (word1 < word2) whose overlap is
    /// at least `min_score`, sorted by (word1, word2).
    pub fn similarity_records(&self, interval: usize, k: usize, min_score: usize) -> Result<Vec<SimilarityRecord>> {
        if k == 0 {
            return Err(Error::param("k", "must be at least 1"));
        }
        let words = self.words(interval)?;
        let word_ids: HashMap<&str, usize> = words.iter().enumerate().map(|(i, w)| (*w, i)).collect();

        // Inverted index over top-k features.
        let mut postings: HashMap<&str, Vec<usize>> = HashMap::new();
        for word in &words {
            for (feature, _) in self.ranked(word, interval)?.iter().take(k) {
                postings.entry(feature.as_str()).or_default().push(word_ids[word]);
            }
        }

        let mut overlap: HashMap<(usize, usize), usize> = HashMap::new();
        for ids in postings.values() {
            for (pos, &a) in ids.iter().enumerate() {
                for &b in &ids[pos + 1..] {
                    let key = if a < b { (a, b) } else { (b, a) };
                    *overlap.entry(key).or_insert(0) += 1;
                }
            }
        }

        let mut records: Vec<SimilarityRecord> = overlap
            .into_iter()
            .filter(|&(_, c)| c >= min_score.max(1))
            .map(|((a, b), c)| SimilarityRecord {
                word1: words[a].to_string(),
                word2: words[b].to_string(),
                interval,
                score: c as f64,
            })
            .collect();
        records.sort_by(|x, y| (&x.word1, &x.word2).cmp(&(&y.word1, &y.word2)));
        Ok(records)
    }
}

/// Computes the thesaurus of one interval directly from counts.
pub fn build_thesaurus(counts: &CountTable, interval: usize, k: usize, min_score: usize) -> Result<Vec<SimilarityRecord>> {
    if counts.is_empty() {
        return Err(Error::invalid("count table is empty"));
    }
    let scores = counts.score_interval(interval);
    let known: BTreeSet<usize> = counts.intervals().collect();
    if !known.contains(&interval) {
        return Err(Error::not_found(format!("interval {interval}")));
    }
    FeatureTable::from_scores([interval], scores).similarity_records(interval, k, min_score)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn table(rows: &[(&str, &str, f64)]) -> FeatureTable {
        FeatureTable::from_scores(
            [0],
            rows.iter().map(|(w, f, l)| FeatureScore {
                word: w.to_string(),
                feature: f.to_string(),
                interval: 0,
                lmi: *l,
            }),
        )
    }

    #[test]
    fn lmi_hand_evaluated() {
        let v = lmi_score(10, 100, 50, 10_000).unwrap();
        assert!((v - 43.219_280_948_873_62).abs() < 1e-9, "{v}");
        assert_eq!(lmi_score(1, 1, 1, 1).unwrap(), 0.0);
        // joint * N == w * f
        assert_eq!(lmi_score(5, 10, 50, 100).unwrap(), 0.0);
    }

    #[test]
    fn lmi_rejects_bad_counts() {
        assert!(lmi_score(0, 1, 1, 1).is_err());
        assert!(lmi_score(1, 0, 1, 1).is_err());
        assert!(lmi_score(5, 4, 10, 100).is_err());
        assert!(lmi_score(5, 10, 4, 100).is_err());
        assert!(lmi_score(5, 200, 10, 100).is_err());
    }

    #[test]
    fn top_features_sorted_with_lexicographic_ties() {
        let t = table(&[("w", "c", 1.0), ("w", "b", 5.0), ("w", "a", 5.0)]);
        let top = t.top_features("w", 0, 1000).unwrap();
        let names: Vec<&str> = top.iter().map(|f| f.feature.as_str()).collect();
        assert_eq!(names, ["a", "b", "c"]);
        let first = t.top_features("w", 0, 1).unwrap();
        assert_eq!(first[0].feature, "a");
    }

    #[test]
    fn top_features_unknown_word_and_interval() {
        let t = table(&[("w", "a", 1.0)]);
        assert!(t.top_features("nope", 0, 10).unwrap().is_empty());
        assert!(matches!(t.top_features("w", 7, 10), Err(Error::NotFound(_))));
        assert!(t.top_features("w", 0, 0).is_err());
    }

    #[test]
    fn truncation_keeps_best_thousand() {
        let rows: Vec<FeatureScore> = (0..1500)
            .map(|i| FeatureScore {
                word: "w".into(),
                feature: format!("f{i:04}"),
                interval: 0,
                lmi: i as f64,
            })
            .collect();
        let t = FeatureTable::from_scores([0], rows);
        let ranked = t.ranked("w", 0).unwrap();
        assert_eq!(ranked.len(), MAX_FEATURES);
        assert_eq!(ranked[0].0, "f1499");
        assert_eq!(ranked.last().unwrap().0, "f0500");
    }

    #[test]
    fn overlap_self_and_disjoint() {
        let mut rows = Vec::new();
        for i in 0..200 {
            rows.push(("a", format!("f{i}"), 1.0));
            rows.push(("b", format!("f{i}"), 2.0));
            rows.push(("c", format!("g{i}"), 1.0));
        }
        let rows: Vec<(&str, &str, f64)> = rows.iter().map(|(w, f, l)| (*w, f.as_str(), *l)).collect();
        let t = table(&rows);
        assert_eq!(t.overlap_similarity("a", "b", 0, 1000).unwrap(), 200);
        assert_eq!(t.overlap_similarity("a", "a", 0, 1000).unwrap(), 200);
        assert_eq!(t.overlap_similarity("a", "a", 0, 50).unwrap(), 50);
        assert_eq!(t.overlap_similarity("a", "c", 0, 1000).unwrap(), 0);
    }

    #[test]
    fn thesaurus_from_counts() {
        let mut counts = CountTable::new();
        for f in ["f1", "f2", "f3", "f4", "f5"] {
            counts.add("x", f, 0, 3);
            counts.add("y", f, 0, 2);
        }
        counts.add("x", "only-x", 0, 1);
        counts.add("z", "only-z", 0, 4);
        let recs = build_thesaurus(&counts, 0, 1000, 1).unwrap();
        assert_eq!(recs.len(), 1);
        assert_eq!((recs[0].word1.as_str(), recs[0].word2.as_str(), recs[0].score), ("x", "y", 5.0));

        assert!(build_thesaurus(&counts, 0, 1000, 6).unwrap().is_empty());
        assert!(matches!(build_thesaurus(&counts, 3, 1000, 1), Err(Error::NotFound(_))));
        assert!(build_thesaurus(&CountTable::new(), 0, 1000, 1).is_err());

        let mut single = CountTable::new();
        single.add("solo", "f", 0, 1);
        assert!(build_thesaurus(&single, 0, 1000, 1).unwrap().is_empty());
    }

    #[test]
    fn count_tsv_errors_carry_line_numbers() {
        let data = "a\tf\t3\t0\nb\tf\tthree\t0\n";
        let err = CountTable::read_tsv(data.as_bytes(), Path::new("counts.tsv")).unwrap_err();
        match err {
            Error::Parse { line, .. } => assert_eq!(line, 2),
            other => panic!("unexpected {other:?}"),
        }
        let zero = "a\tf\t0\t0\n";
        assert!(CountTable::read_tsv(zero.as_bytes(), Path::new("c")).is_err());
    }

    #[test]
    fn interval_validation() {
        let ok = vec![IntervalId::new(1, "b", 1950, 1960), IntervalId::new(0, "a", 1900, 1949)];
        let sorted = validate_intervals(&ok).unwrap();
        assert_eq!(sorted[0].index, 0);
        let dup = vec![IntervalId::new(0, "a", 1900, 1949), IntervalId::new(0, "b", 1950, 1960)];
        assert!(validate_intervals(&dup).is_err());
        let gap = vec![IntervalId::new(0, "a", 1900, 1949), IntervalId::new(2, "b", 1950, 1960)];
        assert!(validate_intervals(&gap).is_err());
        let backwards = vec![IntervalId::new(0, "a", 1960, 1950)];
        assert!(validate_intervals(&backwards).is_err());
    }
}
