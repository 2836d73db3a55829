//! Generated corpora with a known sense shift, for demos and tests.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use serde_json::json;

use crate::error::Result;
use crate::store::{COUNTS_FILE, INTERVALS_FILE, META_FILE, SENTENCES_FILE};

/// A target word whose neighbours are `old_sense` words before `shift_at`
/// and `new_sense` words from `shift_at` on. The two sets share no
/// features, and words within a set share most of theirs.
#[derive(Debug, Clone)]
pub struct SenseShift {
    pub target: String,
    pub old_sense: Vec<String>,
    pub new_sense: Vec<String>,
    pub intervals: usize,
    pub shift_at: usize,
    /// Shared features per sense; members keep between 75% and 100%.
    pub features_per_sense: usize,
}

impl Default for SenseShift {
    fn default() -> Self {
        Self::new("crisis/NN", 8, 8, 6, 3)
    }
}

impl SenseShift {
    pub fn new(target: &str, old: usize, new: usize, intervals: usize, shift_at: usize) -> Self {
        Self {
            target: target.to_string(),
            old_sense: (0..old).map(|i| format!("doom{i:02}/NN")).collect(),
            new_sense: (0..new).map(|i| format!("inflation{i:02}/NN")).collect(),
            intervals,
            shift_at,
            features_per_sense: 12,
        }
    }

    fn sense_features(&self, prefix: &str, member: usize) -> Vec<String> {
        let keep = self.features_per_sense - member % (self.features_per_sense / 4).max(1);
        (0..keep).map(|j| format!("-nn/{prefix}{j:02}/NN")).collect()
    }

    /// Writes `intervals.tsv`, `counts.tsv`, `sentences.jsonl` and
    /// `corpus.json` into `dir`.
    pub fn write(&self, dir: &Path) -> Result<()> {
        fs::create_dir_all(dir)?;
        let mut intervals = String::new();
        for t in 0..self.intervals {
            let start = 1800 + 30 * t as i32;
            let end = start + 29;
            writeln!(intervals, "{t}\t{start}-{end}\t{start}\t{end}").unwrap();
        }
        fs::write(dir.join(INTERVALS_FILE), intervals)?;

        let mut counts = String::new();
        let mut sentences = String::new();
        let mut sentence_no = 0usize;
        for t in 0..self.intervals {
            let (members, prefix) = if t < self.shift_at {
                (&self.old_sense, "old")
            } else {
                (&self.new_sense, "new")
            };
            let all: Vec<String> = (0..self.features_per_sense)
                .map(|j| format!("-nn/{prefix}{j:02}/NN"))
                .collect();
            for f in &all {
                writeln!(counts, "{}\t{f}\t5\t{t}", self.target).unwrap();
            }
            for (i, word) in members.iter().enumerate() {
                for (j, f) in self.sense_features(prefix, i).iter().enumerate() {
                    writeln!(counts, "{word}\t{f}\t{}\t{t}", 1 + (i + j) % 3).unwrap();
                }
                // a private feature keeps each word distinct
                writeln!(counts, "{word}\t-amod/own{i:02}{prefix}/JJ\t1\t{t}").unwrap();

                let feature = &self.sense_features(prefix, i)[0];
                let line = json!({
                    "sentence_id": format!("s{sentence_no:05}"),
                    "text": format!("the {} was like {}", self.target, word),
                    "interval_index": t,
                    "attested": [[word, feature], [self.target.as_str(), feature]],
                });
                sentence_no += 1;
                writeln!(sentences, "{line}").unwrap();
            }
        }
        fs::write(dir.join(COUNTS_FILE), counts)?;
        fs::write(dir.join(SENTENCES_FILE), sentences)?;
        fs::write(
            dir.join(META_FILE),
            serde_json::to_vec_pretty(&json!({"name": "synthetic sense shift"}))?,
        )?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::store::{Corpus, IngestOptions};

    #[test]
    fn neighbours_follow_the_shift() {
        let tmp = tempfile::tempdir().unwrap();
        let shift = SenseShift::default();
        shift.write(tmp.path()).unwrap();
        let c = Corpus::load_dir(tmp.path(), "s", IngestOptions::default()).unwrap();
        for t in 0..6 {
            let ns: Vec<String> = c.neighbours(&shift.target, t).unwrap().iter().map(|(w, _)| w.clone()).collect();
            let expected = if t < 3 { &shift.old_sense } else { &shift.new_sense };
            let mut sorted = ns.clone();
            sorted.sort();
            assert_eq!(&sorted, expected, "interval {t}");
        }
        assert!(c.pair_score(&shift.old_sense[0], &shift.new_sense[0], 0).is_none());
        assert!(c.pair_score(&shift.old_sense[0], &shift.old_sense[1], 0).unwrap() >= 9.0);
    }
}
