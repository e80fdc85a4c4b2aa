use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::KbError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "u8", into = "u8")]
pub enum Arity {
    Unary,
    Binary,
}

impl Arity {
    pub fn get(self) -> usize {
        match self {
            Arity::Unary => 1,
            Arity::Binary => 2,
        }
    }
}

impl TryFrom<u8> for Arity {
    type Error = String;

    fn try_from(v: u8) -> Result<Self, Self::Error> {
        match v {
            1 => Ok(Arity::Unary),
            2 => Ok(Arity::Binary),
            n => Err(format!("arity must be 1 or 2, got {n}")),
        }
    }
}

impl From<Arity> for u8 {
    fn from(a: Arity) -> u8 {
        a.get() as u8
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RelationKind {
    /// `female` / `male`.
    GenderBase,
    /// `parentOf`.
    ParentBase,
    Derived,
    Inverse,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Relation {
    pub id: u32,
    pub name: String,
    pub arity: Arity,
    pub kind: RelationKind,
    /// Set for the two gender relations: `"female"` or `"male"`. Survives
    /// renaming, so symbolized schemas still know which is which.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gender: Option<Gender>,
    /// Name of the relation this one inverts (inverse relations only).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub inverse_of: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Gender {
    Female,
    Male,
}

/// The ordered relation list of a theory.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Schema {
    relations: Vec<Relation>,
}

impl Schema {
    pub fn new(relations: Vec<Relation>) -> Result<Self, KbError> {
        let schema = Schema { relations };
        schema.validate()?;
        Ok(schema)
    }

    pub fn relations(&self) -> &[Relation] {
        &self.relations
    }

    pub fn relation(&self, name: &str) -> Option<&Relation> {
        self.relations.iter().find(|r| r.name == name)
    }

    pub fn by_kind(&self, kind: RelationKind) -> impl Iterator<Item = &Relation> {
        self.relations.iter().filter(move |r| r.kind == kind)
    }

    pub fn parent(&self) -> &Relation {
        self.by_kind(RelationKind::ParentBase).next().expect("validated schema has a parent relation")
    }

    pub fn gender(&self, g: Gender) -> &Relation {
        self.relations
            .iter()
            .find(|r| r.gender == Some(g))
            .expect("validated schema has both gender relations")
    }

    /// The inverse relation declared for `base`, if any.
    pub fn inverse_of(&self, base: &str) -> Option<&Relation> {
        self.relations
            .iter()
            .find(|r| r.kind == RelationKind::Inverse && r.inverse_of.as_deref() == Some(base))
    }

    /// Rewrites every inverse atom `inv(x, y)` to `base(y, x)`.
    pub fn to_base_form(&self, atom: &super::Atom) -> super::Atom {
        match self.relation(&atom.relation) {
            Some(Relation { kind: RelationKind::Inverse, inverse_of: Some(base), .. }) => {
                let mut args = atom.args.clone();
                args.reverse();
                super::Atom { relation: base.clone(), args }
            }
            _ => atom.clone(),
        }
    }

    /// Renames relations through `f`, keeping ids, kinds and inverse links.
    pub fn rename(&self, mut f: impl FnMut(&str) -> Option<String>) -> Result<Schema, String> {
        let mut relations = Vec::with_capacity(self.relations.len());
        for r in &self.relations {
            let name = f(&r.name).ok_or_else(|| r.name.clone())?;
            let inverse_of = match &r.inverse_of {
                Some(b) => Some(f(b).ok_or_else(|| b.clone())?),
                None => None,
            };
            relations.push(Relation { name, inverse_of, ..r.clone() });
        }
        Ok(Schema { relations })
    }

    pub fn validate(&self) -> Result<(), KbError> {
        let invalid = |m: String| Err(KbError::InvalidSchema(m));
        let mut seen = alloc::collections::BTreeSet::new();
        for r in &self.relations {
            if r.name.is_empty() {
                return Err(KbError::EmptyName);
            }
            if !seen.insert(r.name.as_str()) {
                return Err(KbError::DuplicateRelation(r.name.clone()));
            }
        }
        let parents = self.by_kind(RelationKind::ParentBase).count();
        if parents != 1 {
            return invalid(format!("expected exactly one parent relation, found {parents}"));
        }
        if self.parent().arity != Arity::Binary {
            return invalid(format!("parent relation {} must be binary", self.parent().name));
        }
        let genders: Vec<&Relation> = self.by_kind(RelationKind::GenderBase).collect();
        let has = |g| genders.iter().filter(|r| r.gender == Some(g)).count() == 1;
        if genders.len() != 2 || !has(Gender::Female) || !has(Gender::Male) {
            return invalid("gender relations must be exactly one female/male pair".into());
        }
        for r in &self.relations {
            match r.kind {
                RelationKind::GenderBase if r.arity != Arity::Unary => {
                    return invalid(format!("gender relation {} must be unary", r.name))
                }
                RelationKind::Inverse => {
                    let Some(base) = r.inverse_of.as_deref().and_then(|b| self.relation(b)) else {
                        return invalid(format!("inverse relation {} has no base relation", r.name));
                    };
                    if base.kind == RelationKind::Inverse || base.arity != Arity::Binary {
                        return invalid(format!("{} must invert a binary non-inverse relation", r.name));
                    }
                }
                _ if r.inverse_of.is_some() => {
                    return invalid(format!("{} declares inverse_of but is not an inverse", r.name))
                }
                _ => {}
            }
            if r.gender.is_some() && r.kind != RelationKind::GenderBase {
                return invalid(format!("{} has a gender tag but is not a gender relation", r.name));
            }
        }
        Ok(())
    }
}
