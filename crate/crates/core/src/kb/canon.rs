//! Canonical text form of a rule, invariant under variable renaming and body
//! reordering.
//!
//! Head variables are renamed first, in order of appearance. The remaining
//! variables are tried in every order and the lexicographically smallest
//! rendering (sorted, deduplicated body) wins, which makes the form a total
//! invariant even when two body atoms tie under a fixed sort.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use serde::{Deserialize, Serialize};

use super::{Atom, KbError, Rule, Schema, Term};

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct CanonicalRule(pub String);

impl fmt::Display for CanonicalRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

fn var_name(i: usize) -> String {
    if i < 26 {
        String::from(char::from(b'A' + i as u8))
    } else {
        format!("V{i}")
    }
}

fn render(atom: &Atom, names: &BTreeMap<&str, String>) -> String {
    let args: Vec<String> = atom
        .args
        .iter()
        .map(|t| match t {
            Term::Var(v) => names[v.as_str()].clone(),
            Term::Entity(e) => format!("'{e}'"),
        })
        .collect();
    format!("{}({})", atom.relation, args.join(","))
}

/// Canonical form of `rule` as written.
pub fn canonicalize_rule(rule: &Rule) -> Result<CanonicalRule, KbError> {
    rule.check_well_formed()?;
    let mut head_vars: Vec<&str> = Vec::new();
    for v in rule.head.vars() {
        if !head_vars.contains(&v) {
            head_vars.push(v);
        }
    }
    let mut rest: Vec<&str> = Vec::new();
    for v in rule.body.iter().flat_map(Atom::vars) {
        if !head_vars.contains(&v) && !rest.contains(&v) {
            rest.push(v);
        }
    }
    let mut best: Option<String> = None;
    let mut perm: Vec<usize> = (0..rest.len()).collect();
    loop {
        let mut names: BTreeMap<&str, String> = BTreeMap::new();
        for (i, v) in head_vars.iter().enumerate() {
            names.insert(v, var_name(i));
        }
        for (slot, &p) in perm.iter().enumerate() {
            names.insert(rest[p], var_name(head_vars.len() + slot));
        }
        let mut body: Vec<String> = rule.body.iter().map(|a| render(a, &names)).collect();
        body.sort();
        body.dedup();
        let text = format!("{} :- {}", render(&rule.head, &names), body.join(", "));
        if best.as_ref().is_none_or(|b| text < *b) {
            best = Some(text);
        }
        if !next_permutation(&mut perm) {
            break;
        }
    }
    Ok(CanonicalRule(best.expect("at least one permutation")))
}

/// Canonical form after rewriting inverse atoms onto their base relation, so
/// `inverse_parentOf(A,B)` and `parentOf(B,A)` compare equal.
pub fn canonicalize_rule_in(schema: &Schema, rule: &Rule) -> Result<CanonicalRule, KbError> {
    let based = Rule {
        label: rule.label.clone(),
        body: rule.body.iter().map(|a| schema.to_base_form(a)).collect(),
        head: schema.to_base_form(&rule.head),
    };
    canonicalize_rule(&based)
}

fn next_permutation(p: &mut [usize]) -> bool {
    if p.len() < 2 {
        return false;
    }
    let mut i = p.len() - 1;
    while i > 0 && p[i - 1] >= p[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = p.len() - 1;
    while p[j] <= p[i - 1] {
        j -= 1;
    }
    p.swap(i - 1, j);
    p[i..].reverse();
    true
}
