//! Exact reasoners over a [`Theory`]: forward closure with provenance,
//! closed-world classification, abductive proof search, chain normalization
//! and template-based rule induction.

mod abduce;
mod chain;
mod induce;

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::kb::{apply_substitution, match_body, Atom, Binding, Distinctness, FactIndex, KbError, Rule, Theory};

pub use abduce::{abduce_proofs, Proof};
pub use chain::{chain_normalize, is_chain, RuleTemplate, Slot, GENDER_HOLE, RELATION_HOLE};
pub use induce::{evaluate_candidates, induce_rule, Candidate, InducedRule};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ReasonError {
    #[error("schema violation: {0}")]
    SchemaViolation(String),
    #[error("unknown symbol: {0}")]
    UnknownSymbol(KbError),
    #[error("{0} is not a derived relation")]
    NotDerived(String),
    #[error("rule {0} cannot be written as a chain")]
    NotChainable(String),
    #[error("no target facts")]
    NoTargetFacts,
    #[error("target fact {0} does not match the template head")]
    TargetMismatch(String),
    #[error("no filling of the {0} template is exact")]
    NoConsistentRule(String),
}

/// One way a rule derives an atom.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Derivation {
    pub rule: String,
    pub binding: Binding,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
struct ClosureEntry {
    atom: Atom,
    derivations: BTreeSet<Derivation>,
}

/// Derived atoms, each with every derivation that produces it.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(from = "Vec<ClosureEntry>", into = "Vec<ClosureEntry>")]
pub struct Closure {
    provenance: BTreeMap<Atom, BTreeSet<Derivation>>,
}

impl From<Vec<ClosureEntry>> for Closure {
    fn from(v: Vec<ClosureEntry>) -> Self {
        Closure { provenance: v.into_iter().map(|e| (e.atom, e.derivations)).collect() }
    }
}

impl From<Closure> for Vec<ClosureEntry> {
    fn from(c: Closure) -> Self {
        c.provenance.into_iter().map(|(atom, derivations)| ClosureEntry { atom, derivations }).collect()
    }
}

impl Closure {
    pub fn len(&self) -> usize {
        self.provenance.len()
    }

    pub fn is_empty(&self) -> bool {
        self.provenance.is_empty()
    }

    pub fn contains(&self, atom: &Atom) -> bool {
        self.provenance.contains_key(atom)
    }

    /// Derived atoms in sorted order.
    pub fn atoms(&self) -> impl Iterator<Item = &Atom> {
        self.provenance.keys()
    }

    pub fn derivations(&self, atom: &Atom) -> Option<&BTreeSet<Derivation>> {
        self.provenance.get(atom)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Atom, &BTreeSet<Derivation>)> {
        self.provenance.iter()
    }

    /// Number of (atom, derivation) pairs.
    pub fn derivation_count(&self) -> usize {
        self.provenance.values().map(BTreeSet::len).sum()
    }

    /// Rebuilds the closure with every atom and binding passed through `f`.
    pub fn map(&self, mut f: impl FnMut(&Atom) -> Atom, mut g: impl FnMut(&Binding) -> Binding) -> Closure {
        let provenance = self
            .provenance
            .iter()
            .map(|(a, ds)| {
                let ds = ds.iter().map(|d| Derivation { rule: d.rule.clone(), binding: g(&d.binding) }).collect();
                (f(a), ds)
            })
            .collect();
        Closure { provenance }
    }
}

/// Rejects rule sets where some head relation also occurs in a body.
pub fn check_stratified(theory: &Theory) -> Result<(), ReasonError> {
    let heads: BTreeSet<&str> = theory.rules.iter().map(|r| r.head.relation.as_str()).collect();
    for r in &theory.rules {
        for a in &r.body {
            let base = theory.schema.to_base_form(a);
            if heads.contains(a.relation.as_str()) || heads.contains(base.relation.as_str()) {
                return Err(ReasonError::SchemaViolation(alloc::format!(
                    "{}: head relation {} is used in a rule body",
                    r.label,
                    a.relation
                )));
            }
        }
    }
    Ok(())
}

/// Least fixpoint of the theory's rules over its basic facts.
pub fn forward_closure(theory: &Theory, distinctness: Distinctness) -> Result<Closure, ReasonError> {
    check_stratified(theory)?;
    Ok(saturate(&theory.rules, FactIndex::for_theory(theory), distinctness))
}

/// Semi-naive evaluation. Each round only considers bindings that use at
/// least one atom first seen in the previous round; atom `i` of a body reads
/// the delta while atoms before it read the older facts and atoms after it
/// read everything, so each binding is found exactly once.
pub(crate) fn saturate(rules: &[Rule], base: FactIndex, distinctness: Distinctness) -> Closure {
    let mut provenance: BTreeMap<Atom, BTreeSet<Derivation>> = BTreeMap::new();
    let mut old = base.empty_like();
    let mut full = base.clone();
    let mut delta = base;
    while !delta.is_empty() {
        let mut fresh: BTreeSet<Atom> = BTreeSet::new();
        for rule in rules {
            for i in 0..rule.body.len() {
                let sources: Vec<&FactIndex> = (0..rule.body.len())
                    .map(|j| match j.cmp(&i) {
                        core::cmp::Ordering::Less => &old,
                        core::cmp::Ordering::Equal => &delta,
                        core::cmp::Ordering::Greater => &full,
                    })
                    .collect();
                for binding in match_body(rule, &sources, distinctness, &Binding::new()) {
                    let head = apply_substitution(&rule.head, &binding).expect("range-restricted rule");
                    if !full.contains(&head) || provenance.contains_key(&head) {
                        if !full.contains(&head) {
                            fresh.insert(head.clone());
                        }
                        provenance
                            .entry(head)
                            .or_default()
                            .insert(Derivation { rule: rule.label.clone(), binding });
                    }
                }
            }
        }
        old = full.clone();
        let mut next = full.empty_like();
        for a in &fresh {
            full.insert(a);
            next.insert(a);
        }
        delta = next;
    }
    Closure { provenance }
}

/// True iff `query` is a basic fact or in the closure.
pub fn classify_hypothesis(theory: &Theory, query: &Atom) -> Result<bool, ReasonError> {
    Solver::new(theory.clone(), Distinctness::default())?.classify(query)
}

/// A theory with its closure computed once, for answering many queries.
#[derive(Debug, Clone)]
pub struct Solver {
    theory: Theory,
    distinctness: Distinctness,
    basic: FactIndex,
    closure: Closure,
}

impl Solver {
    pub fn new(theory: Theory, distinctness: Distinctness) -> Result<Self, ReasonError> {
        let closure = forward_closure(&theory, distinctness)?;
        let basic = FactIndex::for_theory(&theory);
        Ok(Solver { theory, distinctness, basic, closure })
    }

    pub fn theory(&self) -> &Theory {
        &self.theory
    }

    pub fn closure(&self) -> &Closure {
        &self.closure
    }

    pub fn distinctness(&self) -> Distinctness {
        self.distinctness
    }

    pub(crate) fn basic(&self) -> &FactIndex {
        &self.basic
    }

    /// Closed-world truth value.
    pub fn classify(&self, query: &Atom) -> Result<bool, ReasonError> {
        self.theory.check_query(query).map_err(ReasonError::UnknownSymbol)?;
        Ok(self.basic.contains(query) || self.closure.contains(&self.theory.schema.to_base_form(query)) || self.closure.contains(query))
    }

    pub fn abduce(&self, observation: &Atom) -> Result<Vec<Proof>, ReasonError> {
        abduce::abduce_with(self, observation)
    }

    /// Deduction by walking parent edges from the head entity along each
    /// rule's chain form; agrees with [`Solver::classify`] on derived atoms.
    pub fn path_entails(&self, query: &Atom) -> Result<bool, ReasonError> {
        abduce::path_entails(self, query)
    }
}
