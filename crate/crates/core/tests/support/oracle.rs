//! Brute-force fixpoint used as a reference for the forward closure: every
//! rule variable is enumerated over every entity, and the model is rebuilt
//! until nothing changes. Slow, but small enough to trust.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use symtree_core::kb::{Atom, Distinctness, Rule, Term, Theory};

pub type GroundAtom = (String, Vec<String>);
pub type OracleBinding = BTreeMap<String, String>;
pub type OracleClosure = BTreeMap<GroundAtom, BTreeSet<(String, OracleBinding)>>;

fn rule_vars(rule: &Rule) -> Vec<String> {
    let mut seen = Vec::new();
    for atom in rule.body.iter().chain(std::iter::once(&rule.head)) {
        for t in &atom.args {
            if let Term::Var(v) = t {
                if !seen.contains(v) {
                    seen.push(v.clone());
                }
            }
        }
    }
    seen
}

fn ground(atom: &Atom, b: &OracleBinding) -> Option<GroundAtom> {
    let args = atom
        .args
        .iter()
        .map(|t| match t {
            Term::Var(v) => b.get(v).cloned(),
            Term::Entity(e) => Some(e.clone()),
        })
        .collect::<Option<Vec<_>>>()?;
    Some((atom.relation.clone(), args))
}

struct Model<'a> {
    theory: &'a Theory,
    atoms: BTreeSet<GroundAtom>,
}

impl Model<'_> {
    fn holds(&self, (rel, args): &GroundAtom) -> bool {
        let inverse = self.theory.schema.relations().iter().find(|r| &r.name == rel).and_then(|r| r.inverse_of.clone());
        match inverse {
            Some(base) => self.atoms.contains(&(base, args.iter().rev().cloned().collect())),
            None => self.atoms.contains(&(rel.clone(), args.clone())),
        }
    }
}

fn distinct_ok(rule: &Rule, b: &OracleBinding, mode: Distinctness) -> bool {
    let vars: Vec<&String> = match mode {
        Distinctness::None => return true,
        Distinctness::HeadVarsDistinct => rule
            .head
            .args
            .iter()
            .filter_map(|t| match t {
                Term::Var(v) => Some(v),
                Term::Entity(_) => None,
            })
            .collect(),
        Distinctness::AllPairwiseDistinct => b.keys().collect(),
    };
    let values: Vec<&String> = vars.iter().filter_map(|v| b.get(*v)).collect();
    let unique: BTreeSet<&&String> = values.iter().collect();
    unique.len() == values.len()
}

fn enumerate(
    model: &Model<'_>,
    rule: &Rule,
    vars: &[String],
    entities: &[String],
    mode: Distinctness,
    b: &mut OracleBinding,
    out: &mut Vec<OracleBinding>,
) {
    // prune on every body atom that is already fully bound
    for atom in &rule.body {
        if let Some(g) = ground(atom, b) {
            if !model.holds(&g) {
                return;
            }
        }
    }
    if !distinct_ok(rule, b, mode) {
        return;
    }
    let Some(var) = vars.iter().find(|v| !b.contains_key(*v)) else {
        out.push(b.clone());
        return;
    };
    for e in entities {
        b.insert(var.clone(), e.clone());
        enumerate(model, rule, vars, entities, mode, b, out);
        b.remove(var);
    }
}

/// Every derived atom with every (rule, binding) that yields it. Heads that
/// are already basic facts are left out.
pub fn oracle_closure(theory: &Theory, mode: Distinctness) -> OracleClosure {
    let entities: Vec<String> = theory.entities.iter().map(|e| e.name.clone()).collect();
    let basic: BTreeSet<GroundAtom> = theory
        .facts
        .iter()
        .map(|f| ground(&f.atom, &OracleBinding::new()).expect("facts are ground"))
        .collect();
    let mut model = Model { theory, atoms: basic.clone() };
    loop {
        let mut closure = OracleClosure::new();
        for rule in &theory.rules {
            let vars = rule_vars(rule);
            let mut found = Vec::new();
            enumerate(&model, rule, &vars, &entities, mode, &mut OracleBinding::new(), &mut found);
            for b in found {
                let head = ground(&rule.head, &b).expect("range-restricted");
                if !basic.contains(&head) {
                    closure.entry(head).or_default().insert((rule.label.clone(), b));
                }
            }
        }
        let before = model.atoms.len();
        model.atoms.extend(closure.keys().cloned());
        if model.atoms.len() == before {
            return closure;
        }
    }
}

/// The library closure in the oracle's shape.
pub fn library_closure(closure: &symtree_core::reasoner::Closure) -> OracleClosure {
    closure
        .iter()
        .map(|(atom, ds)| {
            let key = ground(atom, &OracleBinding::new()).expect("closure atoms are ground");
            let ds = ds.iter().map(|d| (d.rule.clone(), d.binding.0.clone())).collect();
            (key, ds)
        })
        .collect()
}
