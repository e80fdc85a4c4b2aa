//! Answer parsing, metrics and report tables.

mod metrics;
mod parse;
mod report;

use thiserror::Error;

pub use metrics::{accuracy, filtered_mrr, precision, proof_accuracy, proof_matches, RankedQuery};
pub use parse::{parse_boolean_answer, parse_proof_answer, parse_rule_answer, BoolAnswer, ParsedAnswer, ProofAnswer};
pub use report::{seed_span, Metric, MetricReport, ReportRow, Setting, REPORT_FORMAT_VERSION};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("{answers} answers for {gold} gold labels")]
    LengthMismatch { answers: usize, gold: usize },
    #[error("nothing to score")]
    Empty,
    #[error("gold candidate missing from the ranking")]
    GoldMissing,
    #[error("no filled-in rule found in the answer")]
    NoRuleFound,
    #[error("no rule/fact selection found in the answer")]
    NoSelectionFound,
}
