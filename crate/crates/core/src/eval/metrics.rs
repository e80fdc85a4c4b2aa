use alloc::collections::BTreeSet;
use alloc::string::String;
use alloc::vec::Vec;

use super::{BoolAnswer, EvalError, ProofAnswer};
use crate::reasoner::Proof;

fn check_len(a: usize, b: usize) -> Result<(), EvalError> {
    if a != b {
        return Err(EvalError::LengthMismatch { answers: a, gold: b });
    }
    if a == 0 {
        return Err(EvalError::Empty);
    }
    Ok(())
}

fn percent(hits: usize, n: usize) -> f64 {
    100.0 * hits as f64 / n as f64
}

/// Percentage of answers equal to the gold label; `Undetermined` is wrong.
pub fn accuracy(answers: &[BoolAnswer], gold: &[bool]) -> Result<f64, EvalError> {
    check_len(answers.len(), gold.len())?;
    let hits = answers
        .iter()
        .zip(gold)
        .filter(|(a, g)| matches!((a, g), (BoolAnswer::True, true) | (BoolAnswer::False, false)))
        .count();
    Ok(percent(hits, gold.len()))
}

/// Percentage of correct predictions, e.g. induced rules equal to the truth.
pub fn precision(correct: &[bool]) -> Result<f64, EvalError> {
    check_len(correct.len(), correct.len())?;
    Ok(percent(correct.iter().filter(|&&c| c).count(), correct.len()))
}

/// Whether the selection equals some gold proof exactly (set equality on
/// fact labels).
pub fn proof_matches(answer: &ProofAnswer, gold: &[Proof]) -> bool {
    gold.iter().any(|p| p.rule_label == answer.rule_label && p.fact_labels == answer.fact_labels)
}

/// Percentage of observations whose parsed selection matches a gold proof;
/// `None` (nothing parsed) counts as wrong.
pub fn proof_accuracy(answers: &[Option<ProofAnswer>], gold: &[Vec<Proof>]) -> Result<f64, EvalError> {
    check_len(answers.len(), gold.len())?;
    let hits = answers.iter().zip(gold).filter(|(a, g)| a.as_ref().is_some_and(|a| proof_matches(a, g))).count();
    Ok(percent(hits, gold.len()))
}

/// One link-prediction query: candidates in ranked order (best first), the
/// gold tails, and every other tail known to be true for the same head and
/// relation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RankedQuery {
    pub ranking: Vec<String>,
    pub gold: BTreeSet<String>,
    pub known_true: BTreeSet<String>,
}

impl RankedQuery {
    /// 1-based rank of the best-ranked gold tail after removing the other
    /// true tails that precede it.
    pub fn filtered_rank(&self) -> Result<usize, EvalError> {
        let mut rank = 0;
        for c in &self.ranking {
            if self.gold.contains(c) {
                return Ok(rank + 1);
            }
            if !self.known_true.contains(c) {
                rank += 1;
            }
        }
        Err(EvalError::GoldMissing)
    }
}

/// Mean reciprocal filtered rank, in (0, 1].
pub fn filtered_mrr(queries: &[RankedQuery]) -> Result<f64, EvalError> {
    if queries.is_empty() {
        return Err(EvalError::Empty);
    }
    let mut sum = 0.0;
    for q in queries {
        sum += 1.0 / q.filtered_rank()? as f64;
    }
    Ok(sum / queries.len() as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::ToString;
    use alloc::vec;

    fn set(xs: &[&str]) -> BTreeSet<String> {
        xs.iter().map(|s| s.to_string()).collect()
    }

    fn query(ranking: &[&str], gold: &[&str], known: &[&str]) -> RankedQuery {
        RankedQuery { ranking: ranking.iter().map(|s| s.to_string()).collect(), gold: set(gold), known_true: set(known) }
    }

    #[test]
    fn mrr_fixtures() {
        assert_eq!(filtered_mrr(&[query(&["a", "b"], &["a"], &[])]).unwrap(), 1.0);
        assert_eq!(filtered_mrr(&[query(&["b", "a"], &["a"], &[])]).unwrap(), 0.5);
        let three = [
            query(&["a", "b", "c", "d"], &["a"], &[]),
            query(&["b", "a", "c", "d"], &["a"], &[]),
            query(&["b", "c", "d", "a"], &["a"], &[]),
        ];
        assert!((filtered_mrr(&three).unwrap() - 0.583_333_333_333).abs() < 1e-9);
    }

    #[test]
    fn filtering_and_multiple_golds() {
        // another true tail ahead of the gold is skipped
        assert_eq!(query(&["x", "a"], &["a"], &["x"]).filtered_rank().unwrap(), 1);
        // best-ranked gold counts
        assert_eq!(query(&["z", "b", "a"], &["a", "b"], &[]).filtered_rank().unwrap(), 2);
        assert_eq!(query(&["z"], &["a"], &[]).filtered_rank(), Err(EvalError::GoldMissing));
        assert_eq!(query(&["a"], &["a"], &[]).filtered_rank().unwrap(), 1);
    }

    #[test]
    fn accuracy_rules() {
        use BoolAnswer::*;
        assert_eq!(accuracy(&[True, False], &[true, false]).unwrap(), 100.0);
        assert_eq!(accuracy(&[Undetermined, Undetermined], &[true, false]).unwrap(), 0.0);
        assert_eq!(accuracy(&[True], &[true, false]), Err(EvalError::LengthMismatch { answers: 1, gold: 2 }));
        assert_eq!(precision(&[true, false, true, true]).unwrap(), 75.0);
    }

    #[test]
    fn proof_set_semantics() {
        let gold = vec![Proof {
            rule_label: "L1".into(),
            fact_labels: set(&["F2", "F3", "F40"]),
            binding: Default::default(),
        }];
        let ans = ProofAnswer { rule_label: "L1".into(), fact_labels: set(&["F40", "F3", "F2"]) };
        assert_eq!(proof_accuracy(&[Some(ans.clone())], core::slice::from_ref(&gold)).unwrap(), 100.0);
        let superset = ProofAnswer { fact_labels: set(&["F2", "F3", "F40", "F1"]), ..ans };
        assert_eq!(proof_accuracy(&[Some(superset), None], &[gold.clone(), gold]).unwrap(), 0.0);
    }
}
