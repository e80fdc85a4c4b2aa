//! Answer extraction from free-form completions.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::EvalError;
use crate::kb::{Atom, Rule, Term};
use crate::reasoner::RuleTemplate;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BoolAnswer {
    True,
    False,
    Undetermined,
}

/// One rule label plus a set of fact labels.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ProofAnswer {
    pub rule_label: String,
    pub fact_labels: BTreeSet<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ParsedAnswer {
    Boolean { value: BoolAnswer },
    Rule { rule: Rule },
    Proof { proof: ProofAnswer },
    /// The completion held nothing recognizable.
    Unparsed { reason: String },
}

const UNDETERMINED: [&str; 6] = [
    "cannot be determined",
    "can't be determined",
    "can not be determined",
    "undetermined",
    "unknown",
    "not enough information",
];

fn words(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.char_indices()
        .filter(|&(i, c)| c.is_alphanumeric() && !text[..i].chars().next_back().is_some_and(char::is_alphanumeric))
        .map(move |(i, _)| {
            let end = text[i..].find(|c: char| !c.is_alphanumeric()).map_or(text.len(), |e| i + e);
            (i, &text[i..end])
        })
}

/// Last True/False in the completion; YES/NO count only when neither word
/// occurs. A "cannot be determined" style phrase after the last marker, or
/// no marker at all, yields `Undetermined`.
pub fn parse_boolean_answer(text: &str) -> BoolAnswer {
    let lower = text.to_lowercase();
    let mut tf: Option<(usize, BoolAnswer)> = None;
    let mut yn: Option<(usize, BoolAnswer)> = None;
    for (i, w) in words(&lower) {
        match w {
            "true" => tf = Some((i, BoolAnswer::True)),
            "false" => tf = Some((i, BoolAnswer::False)),
            "yes" => yn = Some((i, BoolAnswer::True)),
            "no" => yn = Some((i, BoolAnswer::False)),
            _ => {}
        }
    }
    let undetermined = UNDETERMINED.iter().filter_map(|p| lower.rfind(p)).max();
    match (tf.or(yn), undetermined) {
        (Some((i, _)), Some(u)) if u > i => BoolAnswer::Undetermined,
        (Some((_, a)), _) => a,
        (None, _) => BoolAnswer::Undetermined,
    }
}

fn label_number(word: &str, prefix: char) -> Option<&str> {
    let rest = word.strip_prefix(prefix)?;
    (!rest.is_empty() && rest.chars().all(|c| c.is_ascii_digit())).then_some(rest)
}

/// The last `L<n>, F<a>, F<b>, ...` selection in the completion. Fact
/// labels may be separated by commas, spaces or "and".
pub fn parse_proof_answer(text: &str) -> Result<ProofAnswer, EvalError> {
    let ws: Vec<(usize, &str)> = words(text).collect();
    let mut last = None;
    let mut i = 0;
    while i < ws.len() {
        if label_number(ws[i].1, 'L').is_none() {
            i += 1;
            continue;
        }
        let mut facts = BTreeSet::new();
        let mut j = i + 1;
        let mut end_prev = ws[i].0 + ws[i].1.len();
        while j < ws.len() {
            let (pos, w) = ws[j];
            let gap = &text[end_prev..pos];
            let sep_ok = gap.chars().all(|c| c == ',' || c.is_whitespace() || c == '{' || c == '}');
            if label_number(w, 'F').is_some() && sep_ok {
                facts.insert(w.to_string());
                end_prev = pos + w.len();
                j += 1;
            } else if w == "and" && sep_ok && ws.get(j + 1).is_some_and(|n| label_number(n.1, 'F').is_some()) {
                end_prev = pos + w.len();
                j += 1;
            } else {
                break;
            }
        }
        if !facts.is_empty() {
            last = Some(ProofAnswer { rule_label: ws[i].1.to_string(), fact_labels: facts });
        }
        i = j.max(i + 1);
    }
    last.ok_or(EvalError::NoSelectionFound)
}

const ARROWS: [&str; 5] = ["→", "->", "=>", "⇒", "\\rightarrow"];

fn is_ident_char(c: char) -> bool {
    c.is_alphanumeric() || c == '_' || c == '#' || c == '+'
}

/// `name(arg, arg)` occurrences with their byte offsets.
fn scan_atoms(line: &str) -> Vec<(usize, Atom)> {
    let mut out = Vec::new();
    let bytes = line.as_bytes();
    let mut i = 0;
    while i < line.len() {
        if bytes[i] == b'(' {
            let name_start = line[..i].char_indices().rev().take_while(|&(_, c)| is_ident_char(c)).last().map(|(k, _)| k);
            if let (Some(s), Some(close)) = (name_start, line[i..].find(')')) {
                let name = &line[s..i];
                let inner = &line[i + 1..i + close];
                let args: Vec<Term> = inner.split(',').map(|a| Term::var(a.trim())).collect();
                let ok = !name.is_empty()
                    && !name.chars().next().is_some_and(|c| c.is_ascii_digit())
                    && args.iter().all(|a| a.name().chars().all(is_ident_char) && !a.name().is_empty());
                if ok {
                    out.push((s, Atom::new(name, args)));
                    i += close + 1;
                    continue;
                }
            }
        }
        i += line[i..].chars().next().map_or(1, char::len_utf8);
    }
    out
}

fn logic_rule(line: &str) -> Option<Rule> {
    let line = line.replace('$', "");
    if let Some(pos) = line.find(":-") {
        let atoms = scan_atoms(&line);
        let (head, body): (Vec<_>, Vec<_>) = atoms.into_iter().partition(|(p, _)| *p < pos);
        let head = head.into_iter().last()?.1;
        let body: Vec<Atom> = body.into_iter().map(|(_, a)| a).collect();
        return (!body.is_empty()).then(|| Rule::new("", body, head));
    }
    let pos = ARROWS.iter().filter_map(|a| line.rfind(a)).max()?;
    let atoms = scan_atoms(&line);
    let (body, head): (Vec<_>, Vec<_>) = atoms.into_iter().partition(|(p, _)| *p < pos);
    let head = head.into_iter().next()?.1;
    let body: Vec<Atom> = body.into_iter().map(|(_, a)| a).collect();
    (!body.is_empty()).then(|| Rule::new("", body, head))
}

/// `X is p of Y` / `X is p`, with the phrase mapped back to a relation.
fn natural_atom(clause: &str, phrases: &BTreeMap<String, String>) -> Option<Atom> {
    let clause = clause.trim().trim_end_matches('.');
    let (subject, rest) = clause.split_once(" is ")?;
    let subject = subject.trim().rsplit(' ').next()?;
    match rest.rsplit_once(" of ") {
        Some((p, object)) => {
            let rel = phrases.get(p.trim())?;
            Some(Atom::new(rel.clone(), alloc::vec![Term::var(subject), Term::var(object.trim())]))
        }
        None => {
            let rel = phrases.get(rest.trim())?;
            Some(Atom::new(rel.clone(), alloc::vec![Term::var(subject)]))
        }
    }
}

fn natural_rule(line: &str, phrases: &BTreeMap<String, String>) -> Option<Rule> {
    let start = line.rfind("If ")?;
    let (body, head) = line[start + 3..].split_once(", then ")?;
    let body = body.split(" and ").map(|c| natural_atom(c, phrases)).collect::<Option<Vec<_>>>()?;
    let head = natural_atom(head, phrases)?;
    Some(Rule::new("", body, head))
}

fn variable_like(rule: &Rule) -> bool {
    rule.body.iter().chain(core::iter::once(&rule.head)).flat_map(|a| a.args.iter()).all(|t| t.name().chars().count() <= 2)
}

fn phrase_of(name: &str) -> String {
    match name.strip_suffix("Of") {
        Some(stem) if !stem.is_empty() => stem.to_string(),
        _ => name.to_string(),
    }
}

/// The last filled-in rule for the template's head relation, written in
/// logic notation (any arrow or `:-`) or as "If ..., then ...". Rules whose
/// arguments look like variables win over ground restatements.
pub fn parse_rule_answer(text: &str, template: &RuleTemplate) -> Result<Rule, EvalError> {
    let names = template.relation_choices.iter().chain(template.gender_choices.iter()).chain(core::iter::once(&template.head.relation));
    let phrases: BTreeMap<String, String> = names.map(|n| (phrase_of(n), n.clone())).collect();
    let mut found: Vec<Rule> = Vec::new();
    for line in text.lines() {
        if let Some(r) = logic_rule(line).or_else(|| natural_rule(line, &phrases)) {
            found.push(r);
        }
    }
    let head = &template.head.relation;
    found
        .iter()
        .rev()
        .find(|r| &r.head.relation == head && variable_like(r))
        .or_else(|| found.iter().rev().find(|r| &r.head.relation == head))
        .cloned()
        .ok_or(EvalError::NoRuleFound)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kb::{canonicalize_rule_in, kinship, parse_rule};
    use crate::reasoner::chain_normalize;

    #[test]
    fn boolean_markers() {
        assert_eq!(parse_boolean_answer("Therefore, the answer is True."), BoolAnswer::True);
        assert_eq!(parse_boolean_answer("Cannot be determined."), BoolAnswer::Undetermined);
        assert_eq!(parse_boolean_answer("False"), BoolAnswer::False);
        assert_eq!(parse_boolean_answer("YES"), BoolAnswer::True);
        assert_eq!(parse_boolean_answer("The answer (YES or NO) is: NO"), BoolAnswer::False);
        assert_eq!(parse_boolean_answer("It is true that... so the answer is false."), BoolAnswer::False);
        assert_eq!(parse_boolean_answer("No fact says so, hence True."), BoolAnswer::True);
        assert_eq!(parse_boolean_answer("True at first, but it cannot be determined."), BoolAnswer::Undetermined);
        assert_eq!(parse_boolean_answer(""), BoolAnswer::Undetermined);
        assert_eq!(parse_boolean_answer("untrue? falsehood?"), BoolAnswer::Undetermined);
    }

    #[test]
    fn proof_selection() {
        let p = parse_proof_answer("Therefore, the selected rule and facts are L3, F2, F37.").unwrap();
        assert_eq!(p.rule_label, "L3");
        assert_eq!(p.fact_labels, ["F2", "F37"].iter().map(|s| s.to_string()).collect());
        let p = parse_proof_answer("are L2, F27, F28, F47 or L2, F32, F33, F47.").unwrap();
        assert_eq!(p.fact_labels.len(), 3);
        assert!(p.fact_labels.contains("F32"));
        let p = parse_proof_answer("Using L21, F20 and F43, we can conclude").unwrap();
        assert_eq!(p.fact_labels.len(), 2);
        assert_eq!(parse_proof_answer("no labels here"), Err(EvalError::NoSelectionFound));
        assert_eq!(parse_proof_answer("We use L5 only."), Err(EvalError::NoSelectionFound));
    }

    #[test]
    fn rule_in_logic_notation() {
        let s = kinship::schema();
        let tpl = RuleTemplate::for_relation(&s, &kinship::rules(), "grandmotherOf").unwrap();
        let text = "After filling in the template, the generated rule is: parentOf(x,y) ∧ parentOf(y,z) ∧ female(x) → grandmotherOf(x,z)";
        let r = parse_rule_answer(text, &tpl).unwrap();
        let truth = chain_normalize(&s, &kinship::rules()[4]).unwrap();
        assert_eq!(canonicalize_rule_in(&s, &r), canonicalize_rule_in(&s, &truth));
        assert_eq!(parse_rule_answer("I am not sure.", &tpl), Err(EvalError::NoRuleFound));
    }

    #[test]
    fn rule_variants() {
        let s = kinship::schema();
        let tpl = RuleTemplate::for_relation(&s, &kinship::rules(), "sisterOf").unwrap();
        let want = canonicalize_rule_in(&s, &parse_rule("inverse_parentOf(A, B) ∧ parentOf(B, C) ∧ female(A) → sisterOf(A,C)").unwrap());
        for text in [
            "$∀A,B,C: inverse_parentOf(A, B) \\land parentOf(B, C) \\land female(A) \\rightarrow sisterOf(A,C)$",
            "sisterOf(A, C) :- female(A), parentOf(B, C), inverse_parentOf(A, B).",
            "If A is inverse_parent of B and B is parent of C and A is female, then A is sister of C.",
            "Step: parentOf(Laura, Fabian) → sisterOf(Laura, Fabian)\nSo the rule is: ∀A,B,C: inverse_parentOf(A, B) ∧ parentOf(B, C) ∧ female(A) → sisterOf(A,C)",
        ] {
            let r = parse_rule_answer(text, &tpl).unwrap();
            assert_eq!(canonicalize_rule_in(&s, &r), want, "{text}");
        }
    }
}
