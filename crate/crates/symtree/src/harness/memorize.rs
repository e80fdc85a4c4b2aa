use std::collections::{BTreeMap, BTreeSet};

use symtree_core::eval::{filtered_mrr, RankedQuery};
use symtree_core::kb::Theory;
use symtree_core::render::Messages;

use super::HarnessError;
use crate::gateway::{score_candidates, CandidateQuery, CandidateScorer};

/// A tail-prediction probe `r(h, ?)` for one head and binary relation.
#[derive(Debug, Clone, PartialEq)]
pub struct MemorizationQuery {
    pub query: CandidateQuery,
    /// Every stated tail; the best-ranked one counts.
    pub gold: BTreeSet<String>,
    /// True tails that are not asked about and are filtered from the ranking.
    pub known_true: BTreeSet<String>,
}

/// One probe per head and binary relation among the basic facts, with every
/// entity as a candidate tail.
pub fn memorization_queries(theory: &Theory) -> Vec<MemorizationQuery> {
    let mut entities: Vec<_> = theory.entities.iter().collect();
    entities.sort_by_key(|e| e.id);
    let candidates: Vec<String> = entities.iter().map(|e| e.name.clone()).collect();
    let mut tails: BTreeMap<(&str, &str), BTreeSet<String>> = BTreeMap::new();
    for a in theory.basic_atoms().filter(|a| a.args.len() == 2) {
        if let (Some(h), Some(t)) = (a.arg(0), a.arg(1)) {
            tails.entry((a.relation.as_str(), h)).or_default().insert(t.to_string());
        }
    }
    tails
        .into_iter()
        .map(|((relation, head), gold)| {
            let messages =
                Messages::new("Complete the fact with the name of one entity.", format!("{relation}({head}, ?)"));
            MemorizationQuery {
                query: CandidateQuery { messages, candidates: candidates.clone() },
                gold,
                known_true: BTreeSet::new(),
            }
        })
        .collect()
}

/// Filtered MRR of the scorer's rankings.
pub fn score_memorization(queries: &[MemorizationQuery], scorer: &dyn CandidateScorer) -> Result<f64, HarnessError> {
    let ranked = queries
        .iter()
        .map(|q| {
            let ranking = score_candidates(&q.query, scorer)
                .map_err(|source| HarnessError::Gateway { context: q.query.messages.user().to_string(), source })?;
            Ok(RankedQuery {
                ranking: ranking.into_iter().map(|(c, _)| c).collect(),
                gold: q.gold.clone(),
                known_true: q.known_true.clone(),
            })
        })
        .collect::<Result<Vec<_>, HarnessError>>()?;
    filtered_mrr(&ranked).map_err(|source| HarnessError::Eval { context: "memorization".into(), source })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gateway::FixtureScorer;
    use symtree_core::kb::kinship::reference_theory;

    #[test]
    fn perfect_and_shuffled_scorers() {
        let theory = reference_theory();
        let queries = memorization_queries(&theory);
        assert!(!queries.is_empty());
        assert_eq!(queries[0].query.candidates.len(), theory.entities.len());
        let score_with = |f: &dyn Fn(&MemorizationQuery, &str) -> f64| {
            let mut fixture = FixtureScorer::default();
            for q in &queries {
                fixture.insert(&q.query, q.query.candidates.iter().map(|c| f(q, c)).collect());
            }
            score_memorization(&queries, &fixture).unwrap()
        };
        assert_eq!(score_with(&|q, c| if q.gold.contains(c) { 1.0 } else { 0.0 }), 1.0);
        // golds ranked last behind every other entity
        let worst = score_with(&|q, c| if q.gold.contains(c) { 0.0 } else { 1.0 });
        let expected: f64 = queries
            .iter()
            .map(|q| 1.0 / (q.query.candidates.len() - q.gold.len() + 1) as f64)
            .sum::<f64>()
            / queries.len() as f64;
        assert!((worst - expected).abs() < 1e-12);
    }
}
