use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::ReasonError;
use crate::kb::{Atom, Gender, Rule, Schema, Term};

/// Placeholder written in a template for a relation slot.
pub const RELATION_HOLE: &str = "##";
/// Placeholder written in a template for a gender slot.
pub const GENDER_HOLE: &str = "++";

fn letter(i: usize) -> String {
    if i < 26 {
        char::from(b'A' + i as u8).to_string()
    } else {
        alloc::format!("V{i}")
    }
}

/// Rewrites a rule so its binary atoms form one path from the head's first
/// argument to its second, using the inverse relation for edges walked
/// backwards. Unary atoms follow the path. Variables become `A, B, C, ...`
/// in path order.
pub fn chain_normalize(schema: &Schema, rule: &Rule) -> Result<Rule, ReasonError> {
    let fail = || ReasonError::NotChainable(rule.label.clone());
    let (Some(Term::Var(start)), Some(Term::Var(end))) = (rule.head.args.first(), rule.head.args.get(1)) else {
        return Err(fail());
    };
    // Edges in base orientation: (base relation, from, to).
    let mut edges: Vec<(String, String, String)> = Vec::new();
    let mut units: Vec<&Atom> = Vec::new();
    for a in &rule.body {
        match a.args.len() {
            1 => units.push(a),
            2 => {
                let b = schema.to_base_form(a);
                let (Some(x), Some(y)) = (b.args[0].as_var(), b.args[1].as_var()) else {
                    return Err(fail());
                };
                edges.push((b.relation, x.to_string(), y.to_string()));
            }
            _ => return Err(fail()),
        }
    }
    let mut used = alloc::vec![false; edges.len()];
    let mut steps: Vec<(String, String, String)> = Vec::new();
    if !extend(schema, &edges, &mut used, &mut steps, start, end) {
        return Err(fail());
    }
    let mut names: BTreeMap<String, String> = BTreeMap::new();
    names.insert(start.clone(), letter(0));
    for (_, _, to) in &steps {
        let n = names.len();
        names.entry(to.clone()).or_insert_with(|| letter(n));
    }
    let rename = |v: &str| names.get(v).cloned().ok_or_else(fail);
    let mut body = Vec::new();
    for (rel, from, to) in &steps {
        body.push(Atom::new(rel.clone(), alloc::vec![Term::Var(rename(from)?), Term::Var(rename(to)?)]));
    }
    for u in units {
        let v = u.args[0].as_var().ok_or_else(fail)?;
        body.push(Atom::new(u.relation.clone(), alloc::vec![Term::Var(rename(v)?)]));
    }
    let head = Atom::new(rule.head.relation.clone(), alloc::vec![Term::Var(rename(start)?), Term::Var(rename(end)?)]);
    Ok(Rule { label: rule.label.clone(), body, head })
}

/// Depth-first search for an ordering that uses every edge exactly once.
fn extend(
    schema: &Schema,
    edges: &[(String, String, String)],
    used: &mut [bool],
    steps: &mut Vec<(String, String, String)>,
    cur: &str,
    end: &str,
) -> bool {
    if used.iter().all(|u| *u) {
        return cur == end;
    }
    for i in 0..edges.len() {
        if used[i] {
            continue;
        }
        let (rel, x, y) = &edges[i];
        let step = if x == cur {
            Some((rel.clone(), y.clone()))
        } else if y == cur {
            schema.inverse_of(rel).map(|inv| (inv.name.clone(), x.clone()))
        } else {
            None
        };
        let Some((r, next)) = step else { continue };
        // A chain never revisits a variable.
        if next == steps.first().map_or(cur, |s| s.1.as_str()) || steps.iter().any(|s| s.2 == next) {
            continue;
        }
        used[i] = true;
        steps.push((r, cur.to_string(), next.clone()));
        if extend(schema, edges, used, steps, &next, end) {
            return true;
        }
        steps.pop();
        used[i] = false;
    }
    false
}

/// Whether the rule already has chain shape: binary atoms link the head's
/// first variable to its second through fresh variables, followed only by
/// unary atoms on the head's first variable.
pub fn is_chain(rule: &Rule) -> bool {
    let Some(mut cur) = rule.head.args.first().and_then(Term::as_var) else {
        return false;
    };
    let start = cur;
    let mut seen = alloc::vec![cur];
    let mut in_units = false;
    for a in &rule.body {
        match a.args.len() {
            2 if !in_units => {
                if a.args[0].as_var() != Some(cur) {
                    return false;
                }
                let Some(next) = a.args[1].as_var() else { return false };
                if seen.contains(&next) {
                    return false;
                }
                seen.push(next);
                cur = next;
            }
            1 => {
                in_units = true;
                if a.args[0].as_var() != Some(start) {
                    return false;
                }
            }
            _ => return false,
        }
    }
    rule.head.args.get(1).and_then(Term::as_var) == Some(cur)
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "slot", rename_all = "kebab-case")]
pub enum Slot {
    Relation { from: String, to: String },
    Gender { var: String },
}

/// A chain rule with every relation left open: each binary slot takes the
/// parent relation or its inverse, each unary slot a gender.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RuleTemplate {
    pub head: Atom,
    pub slots: Vec<Slot>,
    pub relation_choices: [String; 2],
    pub gender_choices: [String; 2],
}

impl RuleTemplate {
    /// Template of the chain form of the rule defining `relation`.
    pub fn for_relation(schema: &Schema, rules: &[Rule], relation: &str) -> Result<Self, ReasonError> {
        let rule = rules
            .iter()
            .find(|r| r.head.relation == relation)
            .ok_or_else(|| ReasonError::NotDerived(relation.to_string()))?;
        Self::from_chain(schema, &chain_normalize(schema, rule)?)
    }

    pub fn from_chain(schema: &Schema, chain: &Rule) -> Result<Self, ReasonError> {
        if !is_chain(chain) {
            return Err(ReasonError::NotChainable(chain.label.clone()));
        }
        let parent = schema.parent().name.clone();
        let inverse = schema
            .inverse_of(&parent)
            .map(|r| r.name.clone())
            .ok_or_else(|| ReasonError::SchemaViolation("no inverse of the parent relation".into()))?;
        let slots = chain
            .body
            .iter()
            .map(|a| {
                let v = |i: usize| a.args[i].as_var().unwrap_or_default().to_string();
                if a.args.len() == 2 {
                    Slot::Relation { from: v(0), to: v(1) }
                } else {
                    Slot::Gender { var: v(0) }
                }
            })
            .collect();
        Ok(RuleTemplate {
            head: chain.head.clone(),
            slots,
            relation_choices: [parent, inverse],
            gender_choices: [schema.gender(Gender::Female).name.clone(), schema.gender(Gender::Male).name.clone()],
        })
    }

    pub fn relation_slots(&self) -> usize {
        self.slots.iter().filter(|s| matches!(s, Slot::Relation { .. })).count()
    }

    pub fn gender_slots(&self) -> usize {
        self.slots.len() - self.relation_slots()
    }

    /// `2^slots` fillings, first slot most significant, first choice first.
    pub fn candidate_count(&self) -> usize {
        1usize << self.slots.len()
    }

    /// The rule with each slot set to choice `bits[i]` (0 or 1).
    pub fn fill(&self, bits: &[usize]) -> Rule {
        let body = self
            .slots
            .iter()
            .zip(bits)
            .map(|(s, &b)| match s {
                Slot::Relation { from, to } => Atom::new(
                    self.relation_choices[b].clone(),
                    alloc::vec![Term::var(from.clone()), Term::var(to.clone())],
                ),
                Slot::Gender { var } => Atom::new(self.gender_choices[b].clone(), alloc::vec![Term::var(var.clone())]),
            })
            .collect();
        Rule::new("", body, self.head.clone())
    }

    pub fn candidates(&self) -> Vec<Rule> {
        let n = self.slots.len();
        (0..self.candidate_count())
            .map(|mask| {
                let bits: Vec<usize> = (0..n).map(|i| (mask >> (n - 1 - i)) & 1).collect();
                self.fill(&bits)
            })
            .collect()
    }

    /// The template as a rule whose slots read `##` and `++`.
    pub fn skeleton(&self) -> Rule {
        let body = self
            .slots
            .iter()
            .map(|s| match s {
                Slot::Relation { from, to } => {
                    Atom::new(RELATION_HOLE, alloc::vec![Term::var(from.clone()), Term::var(to.clone())])
                }
                Slot::Gender { var } => Atom::new(GENDER_HOLE, alloc::vec![Term::var(var.clone())]),
            })
            .collect();
        Rule::new("", body, self.head.clone())
    }

    /// Renames the fill choices and the head relation.
    pub fn rename(&self, f: impl Fn(&str) -> String) -> RuleTemplate {
        RuleTemplate {
            head: Atom { relation: f(&self.head.relation), ..self.head.clone() },
            slots: self.slots.clone(),
            relation_choices: self.relation_choices.clone().map(|s| f(&s)),
            gender_choices: self.gender_choices.clone().map(|s| f(&s)),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kb::{canonicalize_rule, kinship, parse_rule};

    #[test]
    fn sister_becomes_chain() {
        let s = kinship::schema();
        let got = chain_normalize(&s, &kinship::rules()[0]).unwrap();
        let want = parse_rule("inverse_parentOf(A, B) ∧ parentOf(B, C) ∧ female(A) → sisterOf(A,C)").unwrap();
        assert_eq!(got.body, want.body);
        assert_eq!(got.head, want.head);
    }

    #[test]
    fn mother_is_a_fixed_point() {
        let s = kinship::schema();
        let l3 = &kinship::rules()[2];
        let got = chain_normalize(&s, l3).unwrap();
        assert_eq!(canonicalize_rule(&got).unwrap(), canonicalize_rule(l3).unwrap());
    }

    #[test]
    fn every_rule_normalizes() {
        let s = kinship::schema();
        for r in kinship::rules() {
            let c = chain_normalize(&s, &r).unwrap();
            assert!(is_chain(&c), "{}", r.label);
            assert_eq!(c.body.len(), r.body.len());
        }
    }

    #[test]
    fn disconnected_body_is_not_chainable() {
        let s = kinship::schema();
        let r = parse_rule("parentOf(A, B) ∧ parentOf(C, D) ∧ female(A) → auntOf(A,D)").unwrap();
        assert!(matches!(chain_normalize(&s, &r), Err(ReasonError::NotChainable(_))));
    }

    #[test]
    fn template_counts() {
        let s = kinship::schema();
        let rules = kinship::rules();
        let t = RuleTemplate::for_relation(&s, &rules, "grandmotherOf").unwrap();
        assert_eq!((t.relation_slots(), t.gender_slots()), (2, 1));
        assert_eq!(t.candidates().len(), 8);
        let aunt = RuleTemplate::for_relation(&s, &rules, "auntOf").unwrap();
        assert_eq!((aunt.relation_slots(), aunt.candidates().len()), (3, 16));
    }
}
