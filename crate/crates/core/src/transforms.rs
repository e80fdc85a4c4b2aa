//! Bijective renamings of relation and entity names.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dataset::{Context, Dataset, Query};
use crate::kb::kinship::{self, IdPreset};
use crate::kb::{Atom, Binding, Entity, Fact, RelationKind, Rule, Term, Theory};
use crate::reasoner::{Closure, Proof};

pub const SYMBOL_MAP_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TransformError {
    #[error("no mapping for {0}")]
    UnmappedName(String),
    #[error("map is not injective: {0} has two preimages")]
    NotBijective(String),
    #[error("wordlist has {have} usable entries, {need} needed")]
    WordlistTooSmall { need: usize, have: usize },
    #[error("cannot build the map: {0}")]
    Infeasible(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    Identity,
    IdSymbols,
    Garbled,
    SingleToken,
    CounterCommonsense,
    EntityIds,
}

impl Mode {
    pub fn parse(s: &str) -> Option<Mode> {
        Some(match s {
            "identity" => Mode::Identity,
            "id-symbols" => Mode::IdSymbols,
            "garbled" => Mode::Garbled,
            "single-token" => Mode::SingleToken,
            "counter-cs" | "counter-commonsense" => Mode::CounterCommonsense,
            "entity-ids" => Mode::EntityIds,
            _ => return None,
        })
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Mode::Identity => "identity",
            Mode::IdSymbols => "id-symbols",
            Mode::Garbled => "garbled",
            Mode::SingleToken => "single-token",
            Mode::CounterCommonsense => "counter-commonsense",
            Mode::EntityIds => "entity-ids",
        }
    }
}

/// Short subword-like names for the single-token mode.
pub const DEFAULT_WORDLIST: [&str; 40] = [
    "iance", "inely", "atis", "lesai", "icers", "indr", "uitka", "reib", "ousel", "anth",
    "ebra", "olin", "umpt", "irco", "essa", "ault", "eming", "orpt", "ulse", "adic",
    "ospe", "itza", "ergy", "obar", "ynth", "avel", "ismo", "udge", "elph", "arni",
    "ocyt", "iffe", "umen", "oquy", "astr", "evin", "ilty", "onga", "ufte", "epho",
];

/// Knobs for [`build_symbol_map`]; the defaults suit the kinship schema.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MapOptions {
    pub preset: IdPreset,
    /// Also replace entity names with `e1, e2, ...` in id-symbols mode.
    pub id_entities: bool,
    /// Permute `female`/`male` in counter-commonsense mode.
    pub shuffle_genders: bool,
    pub wordlist: Option<Vec<String>>,
}

impl Default for MapOptions {
    fn default() -> Self {
        MapOptions { preset: IdPreset::Deduction, id_entities: false, shuffle_genders: true, wordlist: None }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SymbolMap {
    pub version: u32,
    pub mode: Mode,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub relations: BTreeMap<String, String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub entities: Option<BTreeMap<String, String>>,
}

fn identity_relations(theory: &Theory) -> BTreeMap<String, String> {
    theory.schema.relations().iter().map(|r| (r.name.clone(), r.name.clone())).collect()
}

fn entity_ids(entities: &[Entity]) -> BTreeMap<String, String> {
    let mut sorted: Vec<&Entity> = entities.iter().collect();
    sorted.sort_by_key(|e| e.id);
    sorted.iter().enumerate().map(|(i, e)| (e.name.clone(), format!("e{}", i + 1))).collect()
}

/// Builds the map for `mode` over the theory's schema (and entities).
pub fn build_symbol_map(
    theory: &Theory,
    mode: Mode,
    seed: u64,
    options: &MapOptions,
) -> Result<SymbolMap, TransformError> {
    let schema = &theory.schema;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (relations, entities, seed) = match mode {
        Mode::Identity => (identity_relations(theory), None, None),
        Mode::EntityIds => (identity_relations(theory), Some(entity_ids(&theory.entities)), None),
        Mode::IdSymbols => {
            let preset = kinship::id_symbols(options.preset);
            let mut used: BTreeSet<String> = preset.values().cloned().collect();
            let mut next = used.len() as u32 + 1;
            let mut map = BTreeMap::new();
            for r in schema.relations() {
                let image = match preset.get(&r.name) {
                    Some(s) => s.clone(),
                    None => loop {
                        let cand = format!("r{next}");
                        next += 1;
                        if used.insert(cand.clone()) {
                            break cand;
                        }
                    },
                };
                map.insert(r.name.clone(), image);
            }
            let ents = options.id_entities.then(|| entity_ids(&theory.entities));
            (map, ents, None)
        }
        Mode::Garbled => {
            let mut taken: BTreeSet<String> = schema.relations().iter().map(|r| r.name.to_lowercase()).collect();
            taken.extend(theory.entities.iter().map(|e| e.name.to_lowercase()));
            let mut map = BTreeMap::new();
            for r in schema.relations() {
                let name = loop {
                    let len = rng.random_range(4..=8);
                    let s: String = (0..len).map(|_| char::from(b'a' + rng.random_range(0..26u8))).collect();
                    if taken.insert(s.clone()) {
                        break s;
                    }
                };
                map.insert(r.name.clone(), name);
            }
            (map, None, Some(seed))
        }
        Mode::SingleToken => {
            let words: Vec<String> = match &options.wordlist {
                Some(w) => w.clone(),
                None => DEFAULT_WORDLIST.iter().map(|s| s.to_string()).collect(),
            };
            let taken: BTreeSet<String> = schema.relations().iter().map(|r| r.name.clone()).collect();
            let mut words: Vec<String> = words.into_iter().collect::<BTreeSet<_>>().into_iter().filter(|w| !taken.contains(w)).collect();
            let need = schema.relations().len();
            if words.len() < need {
                return Err(TransformError::WordlistTooSmall { need, have: words.len() });
            }
            words.shuffle(&mut rng);
            let map = schema.relations().iter().zip(words).map(|(r, w)| (r.name.clone(), w)).collect();
            (map, None, Some(seed))
        }
        Mode::CounterCommonsense => {
            let map = counter_commonsense_map(theory, &BTreeMap::new(), options.shuffle_genders, &mut rng)?;
            (map, None, Some(seed))
        }
    };
    let m = SymbolMap { version: SYMBOL_MAP_VERSION, mode, seed, relations, entities };
    m.check_bijective()?;
    Ok(m)
}

/// Counter-commonsense map that honours the given pairs and deranges the
/// rest of each arity class.
pub fn counter_commonsense_shuffle(
    theory: &Theory,
    fixed: &[(&str, &str)],
    seed: u64,
    shuffle_genders: bool,
) -> Result<SymbolMap, TransformError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let fixed: BTreeMap<String, String> = fixed.iter().map(|(a, b)| (a.to_string(), b.to_string())).collect();
    let relations = counter_commonsense_map(theory, &fixed, shuffle_genders, &mut rng)?;
    let m = SymbolMap {
        version: SYMBOL_MAP_VERSION,
        mode: Mode::CounterCommonsense,
        seed: Some(seed),
        relations,
        entities: None,
    };
    m.check_bijective()?;
    Ok(m)
}

fn counter_commonsense_map(
    theory: &Theory,
    fixed: &BTreeMap<String, String>,
    shuffle_genders: bool,
    rng: &mut ChaCha8Rng,
) -> Result<BTreeMap<String, String>, TransformError> {
    let schema = &theory.schema;
    let genders: Vec<String> = schema.by_kind(RelationKind::GenderBase).map(|r| r.name.clone()).collect();
    let binary: Vec<String> = schema
        .relations()
        .iter()
        .filter(|r| matches!(r.kind, RelationKind::ParentBase | RelationKind::Derived))
        .map(|r| r.name.clone())
        .collect();
    for (from, to) in fixed {
        let same_class = (genders.contains(from) && genders.contains(to)) || (binary.contains(from) && binary.contains(to));
        if !same_class {
            return Err(TransformError::Infeasible(format!("{from} and {to} are in different arity classes")));
        }
    }
    let mut map = BTreeMap::new();
    if shuffle_genders || genders.iter().any(|g| fixed.contains_key(g)) {
        map.extend(derange(&genders, fixed, rng)?);
    } else {
        map.extend(genders.iter().map(|g| (g.clone(), g.clone())));
    }
    map.extend(derange(&binary, fixed, rng)?);
    for r in schema.by_kind(RelationKind::Inverse) {
        let base = r.inverse_of.as_deref().unwrap_or_default();
        let image = map.get(base).ok_or_else(|| TransformError::UnmappedName(base.to_string()))?;
        map.insert(r.name.clone(), format!("inverse_{image}"));
    }
    Ok(map)
}

/// A fixed-point-free permutation of `class` extending `fixed`.
fn derange(
    class: &[String],
    fixed: &BTreeMap<String, String>,
    rng: &mut ChaCha8Rng,
) -> Result<BTreeMap<String, String>, TransformError> {
    let pinned: BTreeMap<&String, &String> = fixed.iter().filter(|(k, _)| class.contains(k)).collect();
    let images: BTreeSet<&String> = pinned.values().copied().collect();
    if images.len() != pinned.len() {
        return Err(TransformError::Infeasible("two names pinned to the same image".into()));
    }
    let free: Vec<&String> = class.iter().filter(|c| !pinned.contains_key(c)).collect();
    let mut targets: Vec<&String> = class.iter().filter(|c| !images.contains(c)).collect();
    for _ in 0..10_000 {
        targets.shuffle(rng);
        if free.iter().zip(&targets).all(|(a, b)| a != b) {
            let mut out: BTreeMap<String, String> = pinned.iter().map(|(a, b)| ((*a).clone(), (*b).clone())).collect();
            out.extend(free.iter().zip(&targets).map(|(a, b)| ((*a).clone(), (*b).clone())));
            return Ok(out);
        }
    }
    Err(TransformError::Infeasible("no derangement extends the pinned pairs".into()))
}

fn check_injective(map: &BTreeMap<String, String>) -> Result<(), TransformError> {
    let mut seen = BTreeSet::new();
    for v in map.values() {
        if !seen.insert(v) {
            return Err(TransformError::NotBijective(v.clone()));
        }
    }
    Ok(())
}

impl SymbolMap {
    pub fn identity(theory: &Theory) -> SymbolMap {
        SymbolMap {
            version: SYMBOL_MAP_VERSION,
            mode: Mode::Identity,
            seed: None,
            relations: identity_relations(theory),
            entities: None,
        }
    }

    pub fn check_bijective(&self) -> Result<(), TransformError> {
        check_injective(&self.relations)?;
        if let Some(e) = &self.entities {
            check_injective(e)?;
        }
        Ok(())
    }

    pub fn inverse(&self) -> SymbolMap {
        let flip = |m: &BTreeMap<String, String>| m.iter().map(|(a, b)| (b.clone(), a.clone())).collect();
        SymbolMap {
            version: self.version,
            mode: self.mode,
            seed: self.seed,
            relations: flip(&self.relations),
            entities: self.entities.as_ref().map(flip),
        }
    }

    pub fn relation(&self, name: &str) -> Result<String, TransformError> {
        self.relations.get(name).cloned().ok_or_else(|| TransformError::UnmappedName(name.to_string()))
    }

    pub fn entity(&self, name: &str) -> Result<String, TransformError> {
        match &self.entities {
            None => Ok(name.to_string()),
            Some(m) => m.get(name).cloned().ok_or_else(|| TransformError::UnmappedName(name.to_string())),
        }
    }

    pub fn atom(&self, atom: &Atom) -> Result<Atom, TransformError> {
        let args = atom
            .args
            .iter()
            .map(|t| match t {
                Term::Var(v) => Ok(Term::Var(v.clone())),
                Term::Entity(e) => self.entity(e).map(Term::Entity),
            })
            .collect::<Result<_, _>>()?;
        Ok(Atom { relation: self.relation(&atom.relation)?, args })
    }

    pub fn binding(&self, b: &Binding) -> Result<Binding, TransformError> {
        let m = b.0.iter().map(|(v, e)| Ok((v.clone(), self.entity(e)?))).collect::<Result<_, _>>()?;
        Ok(Binding(m))
    }

    pub fn rule(&self, r: &Rule) -> Result<Rule, TransformError> {
        Ok(Rule {
            label: r.label.clone(),
            body: r.body.iter().map(|a| self.atom(a)).collect::<Result<_, _>>()?,
            head: self.atom(&r.head)?,
        })
    }

    pub fn theory(&self, t: &Theory) -> Result<Theory, TransformError> {
        let schema = t.schema.rename(|n| self.relations.get(n).cloned()).map_err(TransformError::UnmappedName)?;
        let entities = t
            .entities
            .iter()
            .map(|e| Ok(Entity { id: e.id, name: self.entity(&e.name)? }))
            .collect::<Result<_, _>>()?;
        let facts = t
            .facts
            .iter()
            .map(|f| Ok(Fact { label: f.label.clone(), atom: self.atom(&f.atom)? }))
            .collect::<Result<_, _>>()?;
        let rules = t.rules.iter().map(|r| self.rule(r)).collect::<Result<_, _>>()?;
        Ok(Theory { version: t.version, schema, entities, facts, rules })
    }

    pub fn closure(&self, c: &Closure) -> Result<Closure, TransformError> {
        // Validate first so the infallible closure map below cannot miss.
        for (a, ds) in c.iter() {
            self.atom(a)?;
            for d in ds {
                self.binding(&d.binding)?;
            }
        }
        Ok(c.map(|a| self.atom(a).expect("checked"), |b| self.binding(b).expect("checked")))
    }

    pub fn proof(&self, p: &Proof) -> Result<Proof, TransformError> {
        Ok(Proof { binding: self.binding(&p.binding)?, ..p.clone() })
    }

    /// Whole-word replacement of entity names inside free text.
    pub fn text(&self, s: &str) -> Result<String, TransformError> {
        match &self.entities {
            None => Ok(s.to_string()),
            Some(m) => Ok(replace_words(s, |w| m.get(w).cloned())),
        }
    }

    pub fn dataset(&self, d: &Dataset) -> Result<Dataset, TransformError> {
        let mut out = d.clone();
        for p in &mut out.problems {
            p.context = match &p.context {
                Context::Theory { theory } => Context::Theory { theory: self.theory(theory)? },
                Context::Text { sentences } => Context::Text {
                    sentences: sentences.iter().map(|s| self.text(s)).collect::<Result<_, _>>()?,
                },
            };
            for q in &mut p.questions {
                q.query = match &q.query {
                    Query::Atom(a) => Query::Atom(self.atom(a)?),
                    Query::Text(t) => Query::Text(self.text(t)?),
                };
                q.proofs = q.proofs.iter().map(|pr| self.proof(pr)).collect::<Result<_, _>>()?;
            }
        }
        Ok(out)
    }
}

/// Replaces maximal alphanumeric words for which `f` returns a value.
pub fn replace_words(s: &str, mut f: impl FnMut(&str) -> Option<String>) -> String {
    let mut out = String::with_capacity(s.len());
    let mut word = String::new();
    let flush = |word: &mut String, out: &mut String, f: &mut dyn FnMut(&str) -> Option<String>| {
        if !word.is_empty() {
            match f(word) {
                Some(r) => out.push_str(&r),
                None => out.push_str(word),
            }
            word.clear();
        }
    };
    for c in s.chars() {
        if c.is_alphanumeric() || c == '_' {
            word.push(c);
        } else {
            flush(&mut word, &mut out, &mut f);
            out.push(c);
        }
    }
    flush(&mut word, &mut out, &mut f);
    out
}
