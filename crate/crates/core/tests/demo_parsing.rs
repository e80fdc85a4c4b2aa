//! The bundled worked examples must read back as the answers they argue for.

use std::collections::BTreeSet;

use symtree_core::eval::{parse_boolean_answer, parse_proof_answer, parse_rule_answer, BoolAnswer};
use symtree_core::kb::kinship::{id_symbols, reference_theory, IdPreset};
use symtree_core::kb::{canonicalize_rule, Atom, Rule, Term};
use symtree_core::reasoner::RuleTemplate;
use symtree_core::render::{DemoBank, Task};

#[test]
fn deduction_demos() {
    let bank = DemoBank::builtin(Task::Deduce);
    let got: Vec<BoolAnswer> = bank.demos.iter().map(|d| parse_boolean_answer(&d.answer)).collect();
    use BoolAnswer::{False, True};
    assert_eq!(got, [True, True, True, True, False]);
}

#[test]
fn abduction_demos() {
    let bank = DemoBank::builtin(Task::Abduce);
    let expected: [(&str, &[&str]); 5] = [
        ("L3", &["F2", "F37"]),
        // two alternatives are listed; the last one counts
        ("L2", &["F32", "F33", "F47"]),
        ("L6", &["F28", "F7", "F45"]),
        ("L21", &["F20", "F43"]),
        ("L1", &["F3", "F2", "F40"]),
    ];
    assert_eq!(bank.demos.len(), expected.len());
    for (demo, (rule, facts)) in bank.demos.iter().zip(expected) {
        let parsed = parse_proof_answer(&demo.answer).unwrap();
        assert_eq!(parsed.rule_label, rule, "{}", demo.query);
        let facts: BTreeSet<String> = facts.iter().map(|s| s.to_string()).collect();
        assert_eq!(parsed.fact_labels, facts, "{}", demo.query);
    }
}

fn v(name: &str) -> Term {
    Term::var(name)
}

#[test]
fn induction_demos() {
    let theory = reference_theory();
    let ids = id_symbols(IdPreset::Induction);
    let rename = |n: &str| ids.get(n).cloned().unwrap_or_else(|| n.to_string());
    let bank = DemoBank::builtin(Task::Induce);
    let expected = [
        ("motherOf", Rule::new("", vec![Atom::new("r1", vec![v("A"), v("B")]), Atom::new("r44", vec![v("A")])], Atom::new("r4", vec![v("A"), v("B")]))),
        (
            "brotherOf",
            Rule::new(
                "",
                vec![
                    Atom::new("r45", vec![v("A"), v("B")]),
                    Atom::new("r1", vec![v("B"), v("C")]),
                    Atom::new("r43", vec![v("A")]),
                ],
                Atom::new("r3", vec![v("A"), v("C")]),
            ),
        ),
    ];
    assert_eq!(bank.demos.len(), expected.len());
    for (demo, (relation, rule)) in bank.demos.iter().zip(expected) {
        let template = RuleTemplate::for_relation(&theory.schema, &theory.rules, relation).unwrap().rename(rename);
        let parsed = parse_rule_answer(&demo.answer, &template).unwrap();
        assert_eq!(canonicalize_rule(&parsed).unwrap(), canonicalize_rule(&rule).unwrap(), "{relation}");
    }
}
