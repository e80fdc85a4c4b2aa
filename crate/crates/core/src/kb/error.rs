use alloc::string::String;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum KbError {
    #[error("unbound variable {0}")]
    UnboundVariable(String),
    #[error("malformed rule {rule}: {reason}")]
    MalformedRule { rule: String, reason: String },
    #[error("unknown relation {0}")]
    UnknownRelation(String),
    #[error("unknown entity {0}")]
    UnknownEntity(String),
    #[error("relation {relation} has arity {expected}, atom has {found} arguments")]
    ArityMismatch { relation: String, expected: usize, found: usize },
    #[error("duplicate entity {0}")]
    DuplicateEntity(String),
    #[error("duplicate relation {0}")]
    DuplicateRelation(String),
    #[error("entity and relation names must be non-empty")]
    EmptyName,
    #[error("fact {0} is not ground")]
    NonGroundFact(String),
    #[error("expected label {expected}, found {found}")]
    BadLabel { expected: String, found: String },
    #[error("invalid schema: {0}")]
    InvalidSchema(String),
    #[error("unsupported theory format version {0}")]
    UnsupportedVersion(u32),
}
