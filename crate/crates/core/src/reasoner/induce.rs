use alloc::collections::BTreeSet;
use alloc::string::ToString;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::{ReasonError, RuleTemplate};
use crate::kb::{apply_substitution, canonicalize_rule_in, match_rule, Atom, CanonicalRule, Distinctness, FactIndex, Rule, Theory};

/// One template filling scored against the target facts.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Candidate {
    pub rule: Rule,
    pub canonical: CanonicalRule,
    /// Target facts the rule derives.
    pub support: usize,
    /// Derived heads that are not target facts.
    pub false_positives: usize,
    pub exact: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InducedRule {
    pub rule: Rule,
    pub support: usize,
    pub exact: bool,
}

/// Scores every filling of `template` over the theory's basic facts.
/// `targets` is taken as the complete extension of the head relation.
pub fn evaluate_candidates(
    theory: &Theory,
    targets: &[Atom],
    template: &RuleTemplate,
    distinctness: Distinctness,
) -> Result<Vec<Candidate>, ReasonError> {
    if targets.is_empty() {
        return Err(ReasonError::NoTargetFacts);
    }
    if let Some(bad) = targets.iter().find(|a| a.relation != template.head.relation || !a.is_ground()) {
        return Err(ReasonError::TargetMismatch(bad.to_string()));
    }
    let goal: BTreeSet<&Atom> = targets.iter().collect();
    let index = FactIndex::for_theory(theory);
    let mut out = Vec::with_capacity(template.candidate_count());
    for rule in template.candidates() {
        let heads: BTreeSet<Atom> = match_rule(&rule, &index, distinctness)
            .iter()
            .map(|b| apply_substitution(&rule.head, b).expect("range-restricted"))
            .collect();
        let support = heads.iter().filter(|h| goal.contains(h)).count();
        let false_positives = heads.len() - support;
        let canonical = canonicalize_rule_in(&theory.schema, &rule).expect("template fillings are well formed");
        out.push(Candidate { exact: support == goal.len() && false_positives == 0, rule, canonical, support, false_positives });
    }
    Ok(out)
}

/// The exact filling with the smallest canonical form.
pub fn induce_rule(
    theory: &Theory,
    targets: &[Atom],
    template: &RuleTemplate,
    distinctness: Distinctness,
) -> Result<InducedRule, ReasonError> {
    let candidates = evaluate_candidates(theory, targets, template, distinctness)?;
    candidates
        .into_iter()
        .filter(|c| c.exact)
        .min_by(|a, b| a.canonical.cmp(&b.canonical))
        .map(|c| InducedRule { rule: c.rule, support: c.support, exact: true })
        .ok_or_else(|| ReasonError::NoConsistentRule(template.head.relation.clone()))
}
