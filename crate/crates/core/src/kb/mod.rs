//! Logic vocabulary: terms, atoms, labeled facts and rules, theories.
//!
//! Atoms refer to relations and entities by name. A [`Theory`] is the unit
//! handed to the reasoners and the prompt renderers; it is also the JSON
//! interchange document used by the CLI.

mod canon;
mod error;
pub mod kinship;
mod matching;
mod parse;
mod schema;
mod subst;

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use serde::{Deserialize, Serialize};

pub use canon::{canonicalize_rule, canonicalize_rule_in, CanonicalRule};
pub(crate) use matching::match_body;
pub use error::KbError;
pub use matching::{match_rule, Distinctness, FactIndex};
pub use parse::{parse_atom, parse_fact_atom, parse_rule, ParseError};
pub use schema::{Arity, Gender, Relation, RelationKind, Schema};
pub use subst::apply_substitution;

/// Current version of the theory JSON document.
pub const THEORY_FORMAT_VERSION: u32 = 1;

/// A person (or any individual) of a theory.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Entity {
    pub id: u32,
    pub name: String,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Term {
    Var(String),
    Entity(String),
}

impl Term {
    pub fn var(name: impl Into<String>) -> Self {
        Term::Var(name.into())
    }

    pub fn entity(name: impl Into<String>) -> Self {
        Term::Entity(name.into())
    }

    pub fn as_var(&self) -> Option<&str> {
        match self {
            Term::Var(v) => Some(v),
            Term::Entity(_) => None,
        }
    }

    pub fn as_entity(&self) -> Option<&str> {
        match self {
            Term::Entity(e) => Some(e),
            Term::Var(_) => None,
        }
    }

    pub fn name(&self) -> &str {
        match self {
            Term::Var(s) | Term::Entity(s) => s,
        }
    }
}

/// A relation applied to an ordered list of terms.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Atom {
    pub relation: String,
    pub args: Vec<Term>,
}

impl Atom {
    pub fn new(relation: impl Into<String>, args: Vec<Term>) -> Self {
        Atom { relation: relation.into(), args }
    }

    /// Ground atom over entity names.
    pub fn ground(relation: impl Into<String>, entities: &[&str]) -> Self {
        Atom {
            relation: relation.into(),
            args: entities.iter().map(|e| Term::entity(*e)).collect(),
        }
    }

    pub fn is_ground(&self) -> bool {
        self.args.iter().all(|t| matches!(t, Term::Entity(_)))
    }

    pub fn vars(&self) -> impl Iterator<Item = &str> {
        self.args.iter().filter_map(Term::as_var)
    }

    pub fn entities(&self) -> impl Iterator<Item = &str> {
        self.args.iter().filter_map(Term::as_entity)
    }

    pub fn arg(&self, i: usize) -> Option<&str> {
        self.args.get(i).map(Term::name)
    }
}

impl fmt::Display for Atom {
    /// Logic notation with `", "` between arguments.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}(", self.relation)?;
        for (i, t) in self.args.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            f.write_str(t.name())?;
        }
        f.write_str(")")
    }
}

/// A labeled ground atom (`F1`, `F2`, ...).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Fact {
    pub label: String,
    pub atom: Atom,
}

/// A labeled Horn clause: conjunctive body implies a single head atom.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Rule {
    pub label: String,
    pub body: Vec<Atom>,
    pub head: Atom,
}

impl Rule {
    pub fn new(label: impl Into<String>, body: Vec<Atom>, head: Atom) -> Self {
        Rule { label: label.into(), body, head }
    }

    /// Distinct variables, sorted by name.
    pub fn variables(&self) -> Vec<String> {
        let set: BTreeSet<&str> = self
            .body
            .iter()
            .chain(core::iter::once(&self.head))
            .flat_map(Atom::vars)
            .collect();
        set.into_iter().map(String::from).collect()
    }

    /// Range restriction plus a nonempty body.
    pub fn check_well_formed(&self) -> Result<(), KbError> {
        if self.body.is_empty() {
            return Err(KbError::MalformedRule {
                rule: self.label.clone(),
                reason: "empty body".to_string(),
            });
        }
        let body_vars: BTreeSet<&str> = self.body.iter().flat_map(Atom::vars).collect();
        if let Some(v) = self.head.vars().find(|v| !body_vars.contains(v)) {
            return Err(KbError::MalformedRule {
                rule: self.label.clone(),
                reason: format!("head variable {v} does not occur in the body"),
            });
        }
        Ok(())
    }
}

/// Variable name to entity name.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Binding(pub BTreeMap<String, String>);

impl Binding {
    pub fn new() -> Self {
        Binding(BTreeMap::new())
    }

    pub fn get(&self, var: &str) -> Option<&str> {
        self.0.get(var).map(String::as_str)
    }

    pub fn insert(&mut self, var: impl Into<String>, entity: impl Into<String>) {
        self.0.insert(var.into(), entity.into());
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl<const N: usize> From<[(&str, &str); N]> for Binding {
    fn from(pairs: [(&str, &str); N]) -> Self {
        Binding(pairs.iter().map(|(v, e)| (v.to_string(), e.to_string())).collect())
    }
}

/// Entities, labeled basic facts and labeled rules over a relation schema.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Theory {
    pub version: u32,
    pub schema: Schema,
    pub entities: Vec<Entity>,
    pub facts: Vec<Fact>,
    pub rules: Vec<Rule>,
}

impl Theory {
    /// Builds a theory, labeling facts `F1..` and rules `L1..` in order.
    pub fn from_parts(
        schema: Schema,
        entities: Vec<Entity>,
        facts: Vec<Atom>,
        rules: Vec<Rule>,
    ) -> Result<Self, KbError> {
        let facts = facts
            .into_iter()
            .enumerate()
            .map(|(i, atom)| Fact { label: format!("F{}", i + 1), atom })
            .collect();
        let rules = rules
            .into_iter()
            .enumerate()
            .map(|(i, r)| Rule { label: format!("L{}", i + 1), ..r })
            .collect();
        let theory = Theory {
            version: THEORY_FORMAT_VERSION,
            schema,
            entities,
            facts,
            rules,
        };
        theory.validate()?;
        Ok(theory)
    }

    /// Checks every structural invariant of the document.
    pub fn validate(&self) -> Result<(), KbError> {
        if self.version != THEORY_FORMAT_VERSION {
            return Err(KbError::UnsupportedVersion(self.version));
        }
        self.schema.validate()?;
        let mut ids = BTreeSet::new();
        let mut names = BTreeSet::new();
        for e in &self.entities {
            if e.name.is_empty() {
                return Err(KbError::EmptyName);
            }
            if !ids.insert(e.id) {
                return Err(KbError::DuplicateEntity(format!("id {}", e.id)));
            }
            if !names.insert(e.name.as_str()) {
                return Err(KbError::DuplicateEntity(e.name.clone()));
            }
        }
        for (i, fact) in self.facts.iter().enumerate() {
            let expected = format!("F{}", i + 1);
            if fact.label != expected {
                return Err(KbError::BadLabel { expected, found: fact.label.clone() });
            }
            if !fact.atom.is_ground() {
                return Err(KbError::NonGroundFact(fact.label.clone()));
            }
            self.check_atom(&fact.atom)?;
            for e in fact.atom.entities() {
                if !names.contains(e) {
                    return Err(KbError::UnknownEntity(e.to_string()));
                }
            }
        }
        for (i, rule) in self.rules.iter().enumerate() {
            let expected = format!("L{}", i + 1);
            if rule.label != expected {
                return Err(KbError::BadLabel { expected, found: rule.label.clone() });
            }
            rule.check_well_formed()?;
            for atom in rule.body.iter().chain(core::iter::once(&rule.head)) {
                self.check_atom(atom)?;
            }
            let head = self.schema.relation(&rule.head.relation).expect("checked above");
            if head.kind != RelationKind::Derived {
                return Err(KbError::MalformedRule {
                    rule: rule.label.clone(),
                    reason: format!("head relation {} is not a derived relation", head.name),
                });
            }
        }
        Ok(())
    }

    fn check_atom(&self, atom: &Atom) -> Result<(), KbError> {
        let rel = self
            .schema
            .relation(&atom.relation)
            .ok_or_else(|| KbError::UnknownRelation(atom.relation.clone()))?;
        if rel.arity.get() != atom.args.len() {
            return Err(KbError::ArityMismatch {
                relation: rel.name.clone(),
                expected: rel.arity.get(),
                found: atom.args.len(),
            });
        }
        Ok(())
    }

    pub fn entity(&self, name: &str) -> Option<&Entity> {
        self.entities.iter().find(|e| e.name == name)
    }

    pub fn rule(&self, label: &str) -> Option<&Rule> {
        self.rules.iter().find(|r| r.label == label)
    }

    pub fn fact(&self, label: &str) -> Option<&Fact> {
        self.facts.iter().find(|f| f.label == label)
    }

    /// Label of the basic fact equal to `atom`, if any.
    pub fn label_of(&self, atom: &Atom) -> Option<&str> {
        self.facts.iter().find(|f| &f.atom == atom).map(|f| f.label.as_str())
    }

    pub fn basic_atoms(&self) -> impl Iterator<Item = &Atom> {
        self.facts.iter().map(|f| &f.atom)
    }

    /// Checks that a query atom only uses known symbols.
    pub fn check_query(&self, atom: &Atom) -> Result<(), KbError> {
        self.check_atom(atom)?;
        for t in &atom.args {
            match t {
                Term::Entity(e) if self.entity(e).is_none() => {
                    return Err(KbError::UnknownEntity(e.clone()))
                }
                Term::Var(v) => return Err(KbError::UnboundVariable(v.clone())),
                Term::Entity(_) => {}
            }
        }
        Ok(())
    }

    /// Keeps only the facts whose labels are listed (in theory order) and
    /// relabels them densely. Returns the old-label to new-label map.
    pub fn select_facts(&self, keep: &BTreeSet<String>) -> (Theory, BTreeMap<String, String>) {
        let mut relabel = BTreeMap::new();
        let mut facts = Vec::new();
        for fact in self.facts.iter().filter(|f| keep.contains(&f.label)) {
            let label = format!("F{}", facts.len() + 1);
            relabel.insert(fact.label.clone(), label.clone());
            facts.push(Fact { label, atom: fact.atom.clone() });
        }
        let theory = Theory { facts, ..self.clone() };
        (theory, relabel)
    }
}
