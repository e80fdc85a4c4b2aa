//! The kinship vocabulary: 3 base relations, 28 derived relations with their
//! defining rules, the inverse of `parentOf`, and a 27-person reference tree.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::{parse_fact_atom, parse_rule, Arity, Atom, Entity, Gender, Relation, RelationKind, Rule, Schema, Theory};

pub const MALE: &str = "male";
pub const FEMALE: &str = "female";
pub const PARENT: &str = "parentOf";
pub const INVERSE_PARENT: &str = "inverse_parentOf";

/// Rules L1..L28, in label order.
pub const RULES: [&str; 28] = [
    "∀A,B,C: parentOf(B, A) ∧ parentOf(B, C) ∧ female(A) → sisterOf(A,C)",
    "∀A,B,C: parentOf(B, A) ∧ parentOf(B, C) ∧ male(A) → brotherOf(A,C)",
    "∀A,B: parentOf(A, B) ∧ female(A) → motherOf(A,B)",
    "∀A,B: parentOf(A, B) ∧ male(A) → fatherOf(A,B)",
    "∀A,B,C: parentOf(A, B) ∧ parentOf(B, C) ∧ female(A) → grandmotherOf(A,C)",
    "∀A,B,C: parentOf(A, B) ∧ parentOf(B, C) ∧ male(A) → grandfatherOf(A,C)",
    "∀A,B,C,D: parentOf(A, B) ∧ parentOf(B, C) ∧ parentOf(C, D) ∧ female(A) → greatGrandmotherOf(A,D)",
    "∀A,B,C,D: parentOf(A, B) ∧ parentOf(B, C) ∧ parentOf(C, D) ∧ male(A) → greatGrandfatherOf(A,D)",
    "∀A,B,C,D: parentOf(B, A) ∧ parentOf(B, C) ∧ parentOf(C, D) ∧ female(A) → auntOf(A,D)",
    "∀A,B,C,D: parentOf(B, A) ∧ parentOf(B, C) ∧ parentOf(C, D) ∧ male(A) → uncleOf(A,D)",
    "∀A,B,C,D,E: parentOf(B, A) ∧ parentOf(B, C) ∧ parentOf(C, D) ∧ parentOf(D, E) ∧ female(A) → greatAuntOf(A,E)",
    "∀A,B,C,D,E: parentOf(B, A) ∧ parentOf(B, C) ∧ parentOf(C, D) ∧ parentOf(D, E) ∧ male(A) → greatUncleOf(A,E)",
    "∀A,B,C,D,E,F: parentOf(B, A) ∧ parentOf(C, B) ∧ parentOf(C, D) ∧ parentOf(D, E) ∧ parentOf(E, F) ∧ female(A) → secondAuntOf(A,F)",
    "∀A,B,C,D,E,F: parentOf(B, A) ∧ parentOf(C, B) ∧ parentOf(C, D) ∧ parentOf(D, E) ∧ parentOf(E, F) ∧ male(A) → secondUncleOf(A,F)",
    "∀A,B,C,D,E: parentOf(B, A) ∧ parentOf(C, B) ∧ parentOf(C, D) ∧ parentOf(D, E) ∧ female(A) → girlCousinOf(A,E)",
    "∀A,B,C,D,E: parentOf(B, A) ∧ parentOf(C, B) ∧ parentOf(C, D) ∧ parentOf(D, E) ∧ male(A) → boyCousinOf(A,E)",
    "∀A,B,C,D,E,F,G: parentOf(B, A) ∧ parentOf(C, B) ∧ parentOf(D, C) ∧ parentOf(D, E) ∧ parentOf(E, F) ∧ parentOf(F, G) ∧ female(A) → girlSecondCousinOf(A,G)",
    "∀A,B,C,D,E,F,G: parentOf(B, A) ∧ parentOf(C, B) ∧ parentOf(D, C) ∧ parentOf(D, E) ∧ parentOf(E, F) ∧ parentOf(F, G) ∧ male(A) → boySecondCousinOf(A,G)",
    "∀A,B,C,D,E,F: parentOf(B, A) ∧ parentOf(C, B) ∧ parentOf(D, C) ∧ parentOf(D, E) ∧ parentOf(E, F) ∧ female(A) → girlFirstCousinOnceRemovedOf(A,F)",
    "∀A,B,C,D,E,F: parentOf(B, A) ∧ parentOf(C, B) ∧ parentOf(D, C) ∧ parentOf(D, E) ∧ parentOf(E, F) ∧ male(A) → boyFirstCousinOnceRemovedOf(A,F)",
    "∀A,B: parentOf(B, A) ∧ female(A) → daughterOf(A,B)",
    "∀A,B: parentOf(B, A) ∧ male(A) → sonOf(A,B)",
    "∀A,B,C: parentOf(B, A) ∧ parentOf(C, B) ∧ female(A) → granddaughterOf(A,C)",
    "∀A,B,C: parentOf(B, A) ∧ parentOf(C, B) ∧ male(A) → grandsonOf(A,C)",
    "∀A,B,C,D: parentOf(B, A) ∧ parentOf(C, B) ∧ parentOf(D, C) ∧ female(A) → greatGranddaughterOf(A,D)",
    "∀A,B,C,D: parentOf(B, A) ∧ parentOf(C, B) ∧ parentOf(D, C) ∧ male(A) → greatGrandsonOf(A,D)",
    "∀A,B,C,D: parentOf(B, A) ∧ parentOf(C, B) ∧ parentOf(C, D) ∧ female(A) → nieceOf(A,D)",
    "∀A,B,C,D: parentOf(B, A) ∧ parentOf(C, B) ∧ parentOf(C, D) ∧ male(A) → nephewOf(A,D)",
];

/// Names of the 28 derived relations, in rule order.
pub fn derived_names() -> Vec<String> {
    rules().into_iter().map(|r| r.head.relation).collect()
}

/// The semantic schema: `male`, `female`, `parentOf`, the derived relations
/// in rule order, then `inverse_parentOf`. Relation ids are 1-based positions.
pub fn schema() -> Schema {
    let mut rels = Vec::with_capacity(32);
    let mut push = |name: &str, arity, kind, gender, inverse_of: Option<&str>| {
        rels.push(Relation {
            id: rels.len() as u32 + 1,
            name: name.to_string(),
            arity,
            kind,
            gender,
            inverse_of: inverse_of.map(String::from),
        })
    };
    push(MALE, Arity::Unary, RelationKind::GenderBase, Some(Gender::Male), None);
    push(FEMALE, Arity::Unary, RelationKind::GenderBase, Some(Gender::Female), None);
    push(PARENT, Arity::Binary, RelationKind::ParentBase, None, None);
    for name in derived_names() {
        push(&name, Arity::Binary, RelationKind::Derived, None, None);
    }
    push(INVERSE_PARENT, Arity::Binary, RelationKind::Inverse, None, Some(PARENT));
    Schema::new(rels).expect("kinship schema is valid")
}

/// L1..L28 parsed and labeled.
pub fn rules() -> Vec<Rule> {
    RULES
        .iter()
        .enumerate()
        .map(|(i, text)| {
            let mut r = parse_rule(text).expect("built-in rule parses");
            r.label = format!("L{}", i + 1);
            r
        })
        .collect()
}

/// Which numbering the `r<k>` symbols follow.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum IdPreset {
    /// r1=male, r2=female, r3=parentOf, r4..r31 derived, r32=inverse_parentOf.
    Deduction,
    /// r1=parentOf, r2..r29 derived, r43=male, r44=female, r45=inverse_parentOf.
    Induction,
}

/// Relation-name to `r<k>` map for the kinship schema.
pub fn id_symbols(preset: IdPreset) -> BTreeMap<String, String> {
    let derived = derived_names();
    let mut map = BTreeMap::new();
    match preset {
        IdPreset::Deduction => {
            for r in schema().relations() {
                map.insert(r.name.clone(), format!("r{}", r.id));
            }
        }
        IdPreset::Induction => {
            map.insert(PARENT.to_string(), "r1".to_string());
            for (i, name) in derived.into_iter().enumerate() {
                map.insert(name, format!("r{}", i + 2));
            }
            map.insert(MALE.to_string(), "r43".to_string());
            map.insert(FEMALE.to_string(), "r44".to_string());
            map.insert(INVERSE_PARENT.to_string(), "r45".to_string());
        }
    }
    map
}

const REFERENCE_GENDERS: [(&str, Gender); 27] = [
    ("Laura", Gender::Female),
    ("Elias", Gender::Male),
    ("Fabian", Gender::Male),
    ("Claudia", Gender::Female),
    ("Elena", Gender::Female),
    ("Thomas", Gender::Male),
    ("Amelie", Gender::Female),
    ("Luisa", Gender::Female),
    ("Patrick", Gender::Male),
    ("Emilia", Gender::Female),
    ("Samuel", Gender::Male),
    ("Alina", Gender::Female),
    ("Jonathan", Gender::Male),
    ("Philipp", Gender::Male),
    ("Nico", Gender::Male),
    ("David", Gender::Male),
    ("Emily", Gender::Female),
    ("Konstantin", Gender::Male),
    ("Florian", Gender::Male),
    ("Helga", Gender::Female),
    ("Nina", Gender::Female),
    ("Lea", Gender::Female),
    ("Felix", Gender::Male),
    ("Leonie", Gender::Female),
    ("Stefan", Gender::Male),
    ("Gabriel", Gender::Male),
    ("Tobias", Gender::Male),
];

const REFERENCE_PARENTS: [(&str, &str); 36] = [
    ("Laura", "Fabian"),
    ("Laura", "Felix"),
    ("Laura", "Claudia"),
    ("Elias", "Fabian"),
    ("Elias", "Felix"),
    ("Elias", "Claudia"),
    ("Alina", "David"),
    ("Alina", "Lea"),
    ("Nico", "David"),
    ("Nico", "Lea"),
    ("Emily", "Nico"),
    ("Konstantin", "Nico"),
    ("Fabian", "Thomas"),
    ("Fabian", "Amelie"),
    ("Nina", "Tobias"),
    ("Leonie", "Emily"),
    ("Stefan", "Emily"),
    ("Gabriel", "Tobias"),
    ("Elena", "Thomas"),
    ("Elena", "Amelie"),
    ("Thomas", "Helga"),
    ("Thomas", "Nina"),
    ("Thomas", "Patrick"),
    ("Luisa", "Helga"),
    ("Luisa", "Nina"),
    ("Luisa", "Patrick"),
    ("Patrick", "Samuel"),
    ("Patrick", "Alina"),
    ("Patrick", "Jonathan"),
    ("Patrick", "Philipp"),
    ("Patrick", "Florian"),
    ("Emilia", "Samuel"),
    ("Emilia", "Alina"),
    ("Emilia", "Jonathan"),
    ("Emilia", "Philipp"),
    ("Emilia", "Florian"),
];

/// Builds a kinship theory (with L1..L28) from gender and parent lists.
/// Facts are laid out genders first, then parent edges, in the given order.
pub fn theory_from_family(
    genders: &[(&str, Gender)],
    parents: &[(&str, &str)],
) -> Result<Theory, super::KbError> {
    let entities = genders
        .iter()
        .enumerate()
        .map(|(i, (n, _))| Entity { id: i as u32 + 1, name: n.to_string() })
        .collect();
    let mut facts: Vec<Atom> = genders
        .iter()
        .map(|(n, g)| {
            let rel = match g {
                Gender::Female => FEMALE,
                Gender::Male => MALE,
            };
            Atom::ground(rel, &[n])
        })
        .collect();
    facts.extend(parents.iter().map(|(p, c)| Atom::ground(PARENT, &[p, c])));
    Theory::from_parts(schema(), entities, facts, rules())
}

/// The 27-person, 63-fact family used as the fixed reference instance.
pub fn reference_theory() -> Theory {
    theory_from_family(&REFERENCE_GENDERS, &REFERENCE_PARENTS).expect("reference tree is valid")
}

/// Parses `rel(a, b)` against the reference conventions; test helper.
pub fn fact(text: &str) -> Atom {
    parse_fact_atom(text).expect("well-formed fact")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reference_shape() {
        let t = reference_theory();
        assert_eq!(t.entities.len(), 27);
        assert_eq!(t.facts.len(), 63);
        assert_eq!(t.rules.len(), 28);
        assert_eq!(t.fact("F1").unwrap().atom, fact("female(Laura)"));
        assert_eq!(t.fact("F28").unwrap().atom, fact("parentOf(Laura, Fabian)"));
        assert_eq!(t.fact("F63").unwrap().atom, fact("parentOf(Emilia, Florian)"));
    }

    #[test]
    fn schema_has_thirty_two_relations() {
        let s = schema();
        assert_eq!(s.relations().len(), 32);
        assert_eq!(s.by_kind(RelationKind::Derived).count(), 28);
        assert_eq!(s.relation("motherOf").unwrap().id, 6);
        assert_eq!(s.inverse_of(PARENT).unwrap().name, INVERSE_PARENT);
    }

    #[test]
    fn presets() {
        let d = id_symbols(IdPreset::Deduction);
        assert_eq!(d["male"], "r1");
        assert_eq!(d["female"], "r2");
        assert_eq!(d["parentOf"], "r3");
        assert_eq!(d["nephewOf"], "r31");
        let i = id_symbols(IdPreset::Induction);
        assert_eq!(i["parentOf"], "r1");
        assert_eq!(i["sisterOf"], "r2");
        assert_eq!(i["female"], "r44");
        assert_eq!(i["inverse_parentOf"], "r45");
        assert_eq!(d.len(), 32);
        assert_eq!(i.len(), 32);
    }
}
