//! Body matching against an indexed set of ground atoms.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::{Atom, Binding, Entity, RelationKind, Rule, Schema, Term, Theory};

/// Which variables of a rule must bind to different entities.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Distinctness {
    None,
    HeadVarsDistinct,
    #[default]
    AllPairwiseDistinct,
}

type Tuple = Vec<String>;

/// Ground atoms indexed by relation and by (relation, position, entity).
///
/// Atoms over an inverse relation are answered from the base relation with
/// swapped arguments, so only base facts need to be stored.
#[derive(Debug, Clone, Default)]
pub struct FactIndex {
    tuples: BTreeMap<String, BTreeSet<Tuple>>,
    by_pos: BTreeMap<(String, usize, String), Vec<Tuple>>,
    inverses: BTreeMap<String, String>,
    rank: BTreeMap<String, u32>,
    len: usize,
}

impl FactIndex {
    pub fn new() -> Self {
        Self::default()
    }

    /// Empty index that resolves the schema's inverse relations.
    pub fn with_schema(schema: &Schema) -> Self {
        let mut idx = Self::new();
        for r in schema.by_kind(RelationKind::Inverse) {
            if let Some(base) = &r.inverse_of {
                idx.inverses.insert(r.name.clone(), base.clone());
            }
        }
        idx
    }

    /// Orders bindings by entity id instead of entity name.
    pub fn with_entity_order(mut self, entities: &[Entity]) -> Self {
        self.rank = entities.iter().map(|e| (e.name.clone(), e.id)).collect();
        self
    }

    /// The basic facts of a theory.
    pub fn for_theory(theory: &Theory) -> Self {
        let mut idx = Self::with_schema(&theory.schema).with_entity_order(&theory.entities);
        idx.extend(theory.basic_atoms().cloned());
        idx
    }

    pub fn from_atoms(atoms: impl IntoIterator<Item = Atom>) -> Self {
        let mut idx = Self::new();
        idx.extend(atoms);
        idx
    }

    /// Same inverse table and entity order, no atoms.
    pub fn empty_like(&self) -> Self {
        FactIndex {
            inverses: self.inverses.clone(),
            rank: self.rank.clone(),
            ..Self::default()
        }
    }

    pub fn extend(&mut self, atoms: impl IntoIterator<Item = Atom>) {
        for a in atoms {
            self.insert(&a);
        }
    }

    /// Adds a ground atom; returns false if it was already present.
    pub fn insert(&mut self, atom: &Atom) -> bool {
        let (rel, tuple) = self.resolve(atom);
        let set = self.tuples.entry(rel.clone()).or_default();
        if !set.insert(tuple.clone()) {
            return false;
        }
        for (i, e) in tuple.iter().enumerate() {
            self.by_pos.entry((rel.clone(), i, e.clone())).or_default().push(tuple.clone());
        }
        self.len += 1;
        true
    }

    pub fn contains(&self, atom: &Atom) -> bool {
        if !atom.is_ground() {
            return false;
        }
        let (rel, tuple) = self.resolve(atom);
        self.tuples.get(&rel).is_some_and(|s| s.contains(&tuple))
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Every stored atom, sorted.
    pub fn atoms(&self) -> impl Iterator<Item = Atom> + '_ {
        self.tuples.iter().flat_map(|(rel, set)| {
            set.iter().map(move |t| Atom::ground(rel.clone(), &t.iter().map(String::as_str).collect::<Vec<_>>()))
        })
    }

    pub(crate) fn rank_key(&self, entity: &str) -> (u32, String) {
        (self.rank.get(entity).copied().unwrap_or(u32::MAX), String::from(entity))
    }

    fn base_of<'a>(&'a self, rel: &'a str) -> Option<&'a str> {
        self.inverses.get(rel).map(String::as_str)
    }

    fn resolve(&self, atom: &Atom) -> (String, Tuple) {
        let mut tuple: Tuple = atom.args.iter().map(|t| String::from(term_name(t))).collect();
        match self.base_of(&atom.relation) {
            Some(base) => {
                tuple.reverse();
                (String::from(base), tuple)
            }
            None => (atom.relation.clone(), tuple),
        }
    }

    /// Candidate tuples (in the atom's own argument order) consistent with
    /// the bound positions in `pattern`.
    fn candidates(&self, relation: &str, pattern: &[Option<&str>]) -> Vec<Tuple> {
        let (rel, inverse) = match self.base_of(relation) {
            Some(b) => (b, true),
            None => (relation, false),
        };
        let map_pos = |i: usize| if inverse { pattern.len() - 1 - i } else { i };
        let bound = pattern.iter().enumerate().find_map(|(i, p)| p.map(|e| (i, e)));
        let mut out: Vec<Tuple> = match bound {
            Some((i, e)) => self
                .by_pos
                .get(&(String::from(rel), map_pos(i), String::from(e)))
                .cloned()
                .unwrap_or_default(),
            None => self.tuples.get(rel).map(|s| s.iter().cloned().collect()).unwrap_or_default(),
        };
        if inverse {
            for t in &mut out {
                t.reverse();
            }
        }
        out.retain(|t| t.len() == pattern.len() && pattern.iter().zip(t).all(|(p, e)| p.is_none_or(|p| p == e)));
        out
    }
}

fn term_name(t: &Term) -> &str {
    match t {
        Term::Var(s) | Term::Entity(s) => s,
    }
}

/// All bindings of `rule`'s variables that satisfy its body over `facts`,
/// sorted by variable name and then entity id.
pub fn match_rule(rule: &Rule, facts: &FactIndex, distinctness: Distinctness) -> Vec<Binding> {
    let sources: Vec<&FactIndex> = rule.body.iter().map(|_| facts).collect();
    match_body(rule, &sources, distinctness, &Binding::new())
}

/// Matching where body atom `i` is looked up in `sources[i]`, starting from
/// a partial binding.
pub(crate) fn match_body(
    rule: &Rule,
    sources: &[&FactIndex],
    distinctness: Distinctness,
    seed: &Binding,
) -> Vec<Binding> {
    debug_assert_eq!(sources.len(), rule.body.len());
    let head_vars: BTreeSet<&str> = rule.head.vars().collect();
    let mut out = Vec::new();
    let mut binding = seed.clone();
    let mut done = alloc::vec![false; rule.body.len()];
    search(rule, sources, distinctness, &head_vars, &mut binding, &mut done, &mut out);
    let order = sources.first().copied();
    out.sort_by_cached_key(|b| {
        b.0.values().map(|e| order.map_or((0, e.clone()), |o| o.rank_key(e))).collect::<Vec<_>>()
    });
    out.dedup();
    out
}

fn conflicts(
    binding: &Binding,
    var: &str,
    entity: &str,
    distinctness: Distinctness,
    head_vars: &BTreeSet<&str>,
) -> bool {
    match distinctness {
        Distinctness::None => false,
        Distinctness::AllPairwiseDistinct => binding.0.iter().any(|(v, e)| v != var && e == entity),
        Distinctness::HeadVarsDistinct => {
            head_vars.contains(var)
                && binding.0.iter().any(|(v, e)| v != var && e == entity && head_vars.contains(v.as_str()))
        }
    }
}

fn search(
    rule: &Rule,
    sources: &[&FactIndex],
    distinctness: Distinctness,
    head_vars: &BTreeSet<&str>,
    binding: &mut Binding,
    done: &mut [bool],
    out: &mut Vec<Binding>,
) {
    // Most-constrained atom first.
    let next = (0..rule.body.len()).filter(|&i| !done[i]).max_by_key(|&i| {
        let atom = &rule.body[i];
        let bound = atom.args.iter().filter(|t| is_bound(t, binding)).count();
        (bound * 4 + usize::from(bound == atom.args.len()), core::cmp::Reverse(i))
    });
    let Some(i) = next else {
        out.push(binding.clone());
        return;
    };
    let atom = &rule.body[i];
    let pattern: Vec<Option<&str>> = atom
        .args
        .iter()
        .map(|t| match t {
            Term::Entity(e) => Some(e.as_str()),
            Term::Var(v) => binding.get(v),
        })
        .collect();
    let pattern: Vec<Option<String>> = pattern.into_iter().map(|p| p.map(String::from)).collect();
    let pattern_ref: Vec<Option<&str>> = pattern.iter().map(|p| p.as_deref()).collect();
    done[i] = true;
    for tuple in sources[i].candidates(&atom.relation, &pattern_ref) {
        let mut added: Vec<&str> = Vec::new();
        let mut ok = true;
        for (t, e) in atom.args.iter().zip(&tuple) {
            let Term::Var(v) = t else { continue };
            match binding.get(v) {
                Some(b) if b == e => {}
                Some(_) => {
                    ok = false;
                    break;
                }
                None => {
                    if conflicts(binding, v, e, distinctness, head_vars) {
                        ok = false;
                        break;
                    }
                    binding.insert(v.clone(), e.clone());
                    added.push(v);
                }
            }
        }
        if ok {
            search(rule, sources, distinctness, head_vars, binding, done, out);
        }
        for v in added {
            binding.0.remove(v);
        }
    }
    done[i] = false;
}

fn is_bound(t: &Term, binding: &Binding) -> bool {
    match t {
        Term::Entity(_) => true,
        Term::Var(v) => binding.get(v).is_some(),
    }
}
