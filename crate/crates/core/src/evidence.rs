//! Feature drill-down and example sentences.
//!
//! LMI is aggregated by summation, across members and across intervals.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::store::{Corpus, SentenceRecord};
use crate::thesaurus::FeatureTable;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scope {
    Node,
    Edge,
    Cluster,
}

impl std::str::FromStr for Scope {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "node" => Ok(Scope::Node),
            "edge" => Ok(Scope::Edge),
            "cluster" => Ok(Scope::Cluster),
            other => Err(Error::param("scope", format!("unknown scope {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureRanking {
    pub scope: Scope,
    pub members: BTreeSet<String>,
    pub interval: Option<usize>,
    /// `(feature, aggregate lmi)`, best first, ties by feature.
    pub ranked: Vec<(String, f64)>,
}

/// Summed LMI per feature for one word over the selected intervals.
fn word_features(table: &FeatureTable, word: &str, intervals: &[usize]) -> Result<BTreeMap<String, f64>> {
    let mut acc = BTreeMap::new();
    for &t in intervals {
        for (feature, lmi) in table.ranked(word, t)? {
            *acc.entry(feature.clone()).or_insert(0.0) += lmi;
        }
    }
    Ok(acc)
}

/// Ranks features for a node (one word), an edge (two words, shared
/// features only) or a cluster (any number of words, union of features).
pub fn rank_features(
    table: &FeatureTable,
    members: &BTreeSet<String>,
    scope: Scope,
    interval: Option<usize>,
    limit: usize,
) -> Result<FeatureRanking> {
    if members.is_empty() {
        return Err(Error::param("words", "at least one member word is required"));
    }
    if limit == 0 {
        return Err(Error::param("limit", "must be at least 1"));
    }
    match scope {
        Scope::Node if members.len() != 1 => {
            return Err(Error::param("words", "node scope takes exactly one word"));
        }
        Scope::Edge if members.len() != 2 => {
            return Err(Error::param("words", "edge scope takes exactly two words"));
        }
        _ => {}
    }
    let intervals: Vec<usize> = match interval {
        Some(t) if !table.has_interval(t) => return Err(Error::not_found(format!("interval {t}"))),
        Some(t) => vec![t],
        None => table.intervals().collect(),
    };

    let per_member: Vec<BTreeMap<String, f64>> = members
        .iter()
        .map(|w| word_features(table, w, &intervals))
        .collect::<Result<_>>()?;

    let mut combined: BTreeMap<String, f64> = BTreeMap::new();
    match scope {
        Scope::Node | Scope::Cluster => {
            for feats in &per_member {
                for (f, lmi) in feats {
                    *combined.entry(f.clone()).or_insert(0.0) += lmi;
                }
            }
        }
        Scope::Edge => {
            let (a, b) = (&per_member[0], &per_member[1]);
            for (f, lmi) in a {
                if let Some(other) = b.get(f) {
                    combined.insert(f.clone(), lmi + other);
                }
            }
        }
    }
    let mut ranked: Vec<(String, f64)> = combined.into_iter().collect();
    ranked.sort_by(|x, y| y.1.total_cmp(&x.1).then_with(|| x.0.cmp(&y.0)));
    ranked.truncate(limit);
    Ok(FeatureRanking {
        scope,
        members: members.clone(),
        interval,
        ranked,
    })
}

/// Example sentences for a (word, feature) pair, ordered by sentence id.
pub fn fetch_evidence(
    corpus: &Corpus,
    word: &str,
    feature: Option<&str>,
    interval: Option<usize>,
    limit: usize,
) -> Result<Vec<SentenceRecord>> {
    corpus.query_sentences(word, feature, interval, limit)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::thesaurus::FeatureScore;

    fn table() -> FeatureTable {
        let rows = [
            ("a", "f", 3.0, 0),
            ("b", "f", 4.0, 0),
            ("a", "g", 1.0, 0),
            ("c", "h", 2.0, 0),
            ("a", "f", 2.0, 1),
        ];
        FeatureTable::from_scores(
            [0, 1],
            rows.iter().map(|(w, f, l, t)| FeatureScore {
                word: w.to_string(),
                feature: f.to_string(),
                interval: *t,
                lmi: *l,
            }),
        )
    }

    fn set(words: &[&str]) -> BTreeSet<String> {
        words.iter().map(|w| w.to_string()).collect()
    }

    #[test]
    fn cluster_scope_sums_members() {
        let r = rank_features(&table(), &set(&["a", "b"]), Scope::Cluster, Some(0), 10).unwrap();
        assert_eq!(r.ranked, vec![("f".to_string(), 7.0), ("g".to_string(), 1.0)]);
    }

    #[test]
    fn node_scope_sums_intervals_unless_filtered() {
        let all = rank_features(&table(), &set(&["a"]), Scope::Node, None, 10).unwrap();
        assert_eq!(all.ranked[0], ("f".to_string(), 5.0));
        let one = rank_features(&table(), &set(&["a"]), Scope::Node, Some(1), 10).unwrap();
        assert_eq!(one.ranked, vec![("f".to_string(), 2.0)]);
    }

    #[test]
    fn edge_scope_keeps_shared_features() {
        let r = rank_features(&table(), &set(&["a", "b"]), Scope::Edge, None, 10).unwrap();
        assert_eq!(r.ranked, vec![("f".to_string(), 9.0)]);
        let disjoint = rank_features(&table(), &set(&["a", "c"]), Scope::Edge, None, 10).unwrap();
        assert!(disjoint.ranked.is_empty());
    }

    #[test]
    fn argument_errors() {
        let t = table();
        assert!(rank_features(&t, &set(&[]), Scope::Cluster, None, 10).is_err());
        assert!(rank_features(&t, &set(&["a", "b"]), Scope::Node, None, 10).is_err());
        assert!(rank_features(&t, &set(&["a"]), Scope::Edge, None, 10).is_err());
        assert!(rank_features(&t, &set(&["a"]), Scope::Node, None, 0).is_err());
        assert!(matches!(
            rank_features(&t, &set(&["a"]), Scope::Node, Some(5), 10),
            Err(Error::NotFound(_))
        ));
    }

    #[test]
    fn limit_truncates() {
        let r = rank_features(&table(), &set(&["a", "b", "c"]), Scope::Cluster, None, 2).unwrap();
        assert_eq!(r.ranked.len(), 2);
        assert_eq!(r.ranked[0].0, "f");
    }
}
