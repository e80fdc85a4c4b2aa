//! The benchmark document shared by generated trees and ingested ProofWriter
//! records: problems, each a context plus labeled questions.

use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::kb::{Atom, Theory};
use crate::reasoner::Proof;

pub const DATASET_FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Dataset {
    pub version: u32,
    /// `treegen` or `proofwriter`.
    pub source: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub problems: Vec<Problem>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Problem {
    pub id: String,
    pub context: Context,
    pub questions: Vec<Question>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum Context {
    Theory { theory: Theory },
    Text { sentences: Vec<String> },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Question {
    pub id: String,
    pub query: Query,
    pub answer: bool,
    /// Every gold proof; empty for negatives and text questions.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub proofs: Vec<Proof>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Query {
    Atom(Atom),
    Text(String),
}

impl Query {
    pub fn as_atom(&self) -> Option<&Atom> {
        match self {
            Query::Atom(a) => Some(a),
            Query::Text(_) => None,
        }
    }
}

impl Problem {
    pub fn theory(&self) -> Option<&Theory> {
        match &self.context {
            Context::Theory { theory } => Some(theory),
            Context::Text { .. } => None,
        }
    }

    pub fn positives(&self) -> impl Iterator<Item = &Question> {
        self.questions.iter().filter(|q| q.answer)
    }

    pub fn negatives(&self) -> impl Iterator<Item = &Question> {
        self.questions.iter().filter(|q| !q.answer)
    }
}

impl Dataset {
    pub fn question_count(&self) -> usize {
        self.problems.iter().map(|p| p.questions.len()).sum()
    }
}
