use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::{chain_normalize, ReasonError, Solver};
use crate::kb::{apply_substitution, match_body, Atom, Binding, Distinctness, RelationKind, Term, Theory};

/// A rule plus the basic facts that ground its body for one observation.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Proof {
    pub rule_label: String,
    pub fact_labels: BTreeSet<String>,
    pub binding: Binding,
}

impl Proof {
    /// `L2, F27, F28, F47` with facts in numeric order.
    pub fn selection_text(&self) -> String {
        let mut facts: Vec<&String> = self.fact_labels.iter().collect();
        facts.sort_by_key(|l| label_number(l));
        let mut out = self.rule_label.clone();
        for f in facts {
            out.push_str(", ");
            out.push_str(f);
        }
        out
    }
}

pub(crate) fn label_number(label: &str) -> u64 {
    label.trim_start_matches(|c: char| c.is_ascii_alphabetic()).parse().unwrap_or(u64::MAX)
}

/// All proofs of `observation` from the theory's basic facts.
pub fn abduce_proofs(theory: &Theory, observation: &Atom) -> Result<Vec<Proof>, ReasonError> {
    Solver::new(theory.clone(), Distinctness::default())?.abduce(observation)
}

pub(super) fn abduce_with(solver: &Solver, observation: &Atom) -> Result<Vec<Proof>, ReasonError> {
    let theory = solver.theory();
    theory.check_query(observation).map_err(ReasonError::UnknownSymbol)?;
    let rel = theory.schema.relation(&observation.relation).expect("checked");
    if rel.kind != RelationKind::Derived {
        return Err(ReasonError::NotDerived(rel.name.clone()));
    }
    let labels: BTreeMap<Atom, &str> = theory
        .facts
        .iter()
        .map(|f| (theory.schema.to_base_form(&f.atom), f.label.as_str()))
        .collect();
    let mut proofs = Vec::new();
    for rule in theory.rules.iter().filter(|r| r.head.relation == observation.relation) {
        let Some(seed) = unify(&rule.head, observation) else { continue };
        let sources: Vec<_> = rule.body.iter().map(|_| solver.basic()).collect();
        for binding in match_body(rule, &sources, solver.distinctness(), &seed) {
            let fact_labels = rule
                .body
                .iter()
                .map(|a| {
                    let g = apply_substitution(a, &binding).expect("total binding");
                    String::from(labels[&theory.schema.to_base_form(&g)])
                })
                .collect();
            proofs.push(Proof { rule_label: rule.label.clone(), fact_labels, binding });
        }
    }
    proofs.sort_by_cached_key(|p| {
        let mut facts: Vec<u64> = p.fact_labels.iter().map(|l| label_number(l)).collect();
        facts.sort_unstable();
        (label_number(&p.rule_label), facts, p.binding.clone())
    });
    Ok(proofs)
}

fn unify(head: &Atom, ground: &Atom) -> Option<Binding> {
    if head.relation != ground.relation || head.args.len() != ground.args.len() {
        return None;
    }
    let mut b = Binding::new();
    for (t, g) in head.args.iter().zip(&ground.args) {
        let g = g.as_entity()?;
        match t {
            Term::Entity(e) if e != g => return None,
            Term::Entity(_) => {}
            Term::Var(v) => match b.get(v) {
                Some(prev) if prev != g => return None,
                Some(_) => {}
                None => b.insert(v.clone(), g),
            },
        }
    }
    Some(b)
}

pub(super) fn path_entails(solver: &Solver, query: &Atom) -> Result<bool, ReasonError> {
    let theory = solver.theory();
    theory.check_query(query).map_err(ReasonError::UnknownSymbol)?;
    if solver.basic().contains(query) {
        return Ok(true);
    }
    let (Some(h), Some(t)) = (query.arg(0), query.arg(1)) else {
        return Ok(false);
    };
    for rule in theory.rules.iter().filter(|r| r.head.relation == query.relation) {
        let chain = chain_normalize(&theory.schema, rule)?;
        let steps: Vec<&Atom> = chain.body.iter().filter(|a| a.args.len() == 2).collect();
        let units: Vec<&Atom> = chain.body.iter().filter(|a| a.args.len() == 1).collect();
        let start = chain.head.args[0].as_var().unwrap_or_default();
        let genders_hold = units.iter().all(|u| {
            u.args[0].as_var() == Some(start) && solver.basic().contains(&Atom::ground(u.relation.clone(), &[h]))
        });
        if !genders_hold {
            continue;
        }
        let mut path = alloc::vec![String::from(h)];
        if walk(solver, &steps, &mut path, t) {
            return Ok(true);
        }
    }
    Ok(false)
}

/// Follows the chain's edge labels from the last node of `path`.
fn walk(solver: &Solver, steps: &[&Atom], path: &mut Vec<String>, target: &str) -> bool {
    let Some((step, rest)) = steps.split_first() else {
        let (h, t) = (path[0].as_str(), path[path.len() - 1].as_str());
        return t == target
            && match solver.distinctness() {
                Distinctness::None => true,
                Distinctness::HeadVarsDistinct => h != t,
                Distinctness::AllPairwiseDistinct => {
                    let set: BTreeSet<&String> = path.iter().collect();
                    set.len() == path.len()
                }
            };
    };
    let cur = path[path.len() - 1].clone();
    let nexts: Vec<String> = solver
        .theory()
        .entities
        .iter()
        .map(|e| e.name.clone())
        .filter(|e| solver.basic().contains(&Atom::ground(step.relation.clone(), &[&cur, e])))
        .collect();
    for n in nexts {
        path.push(n);
        if walk(solver, rest, path, target) {
            return true;
        }
        path.pop();
    }
    false
}
