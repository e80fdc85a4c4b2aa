use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use symtree_core::render::Messages;

use super::{sha256_hex, GatewayError};

/// A prompt plus the completions to rank, e.g. every entity as a tail.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CandidateQuery {
    pub messages: Messages,
    pub candidates: Vec<String>,
}

impl CandidateQuery {
    pub fn new(messages: Messages, candidates: Vec<String>) -> Result<Self, GatewayError> {
        if candidates.is_empty() {
            return Err(GatewayError::NoCandidates);
        }
        Ok(CandidateQuery { messages, candidates })
    }

    pub fn fingerprint(&self) -> String {
        sha256_hex(&serde_json::to_vec(self).expect("query serializes"))
    }
}

pub trait CandidateScorer {
    /// One score per candidate, higher is more likely.
    fn scores(&self, query: &CandidateQuery) -> Result<Vec<f64>, GatewayError>;
}

/// Chat endpoints without log-probabilities cannot score.
pub struct NoScorer;

impl CandidateScorer for NoScorer {
    fn scores(&self, query: &CandidateQuery) -> Result<Vec<f64>, GatewayError> {
        Err(GatewayError::ScorerUnavailable(query.fingerprint()))
    }
}

/// Precomputed scores keyed by query fingerprint.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct FixtureScorer {
    pub entries: BTreeMap<String, Vec<f64>>,
}

impl FixtureScorer {
    pub fn insert(&mut self, query: &CandidateQuery, scores: Vec<f64>) {
        self.entries.insert(query.fingerprint(), scores);
    }
}

impl CandidateScorer for FixtureScorer {
    fn scores(&self, query: &CandidateQuery) -> Result<Vec<f64>, GatewayError> {
        let fp = query.fingerprint();
        self.entries.get(&fp).cloned().ok_or(GatewayError::ScorerUnavailable(fp))
    }
}

/// Candidates by descending score; ties keep their original order.
pub fn score_candidates(
    query: &CandidateQuery,
    scorer: &dyn CandidateScorer,
) -> Result<Vec<(String, f64)>, GatewayError> {
    let scores = scorer.scores(query)?;
    if scores.len() != query.candidates.len() {
        return Err(GatewayError::ScoreCount { expected: query.candidates.len(), got: scores.len() });
    }
    let mut ranked: Vec<(String, f64)> = query.candidates.iter().cloned().zip(scores).collect();
    ranked.sort_by(|a, b| b.1.total_cmp(&a.1));
    Ok(ranked)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn query(cands: &[&str]) -> CandidateQuery {
        CandidateQuery::new(Messages::new("s", "who?"), cands.iter().map(|s| s.to_string()).collect()).unwrap()
    }

    #[test]
    fn ranking_is_descending_and_stable() {
        let q = query(&["a", "b", "c"]);
        let mut f = FixtureScorer::default();
        f.insert(&q, vec![0.5, 0.9, 0.5]);
        let ranked = score_candidates(&q, &f).unwrap();
        let names: Vec<&str> = ranked.iter().map(|(c, _)| c.as_str()).collect();
        assert_eq!(names, ["b", "a", "c"]);
    }

    #[test]
    fn single_candidate_and_errors() {
        let q = query(&["only"]);
        let mut f = FixtureScorer::default();
        f.insert(&q, vec![-3.0]);
        assert_eq!(score_candidates(&q, &f).unwrap()[0].0, "only");
        assert!(matches!(score_candidates(&query(&["x"]), &f), Err(GatewayError::ScorerUnavailable(_))));
        assert!(matches!(score_candidates(&q, &NoScorer), Err(GatewayError::ScorerUnavailable(_))));
        assert!(matches!(CandidateQuery::new(Messages::new("s", "u"), vec![]), Err(GatewayError::NoCandidates)));
        f.insert(&q, vec![1.0, 2.0]);
        assert!(matches!(score_candidates(&q, &f), Err(GatewayError::ScoreCount { expected: 1, got: 2 })));
    }
}
