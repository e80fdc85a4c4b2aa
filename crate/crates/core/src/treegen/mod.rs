//! Random family trees over the kinship schema, closed-world negatives, and
//! dataset assembly.

mod names;

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dataset::{Context, Dataset, Problem, Query, Question, DATASET_FORMAT_VERSION};
use crate::kb::kinship::{self, PARENT};
use crate::kb::{Atom, Distinctness, FactIndex, Gender, RelationKind, Theory};
use crate::reasoner::{forward_closure, Closure, Solver};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TreeGenError {
    #[error("invalid config: {0}")]
    InvalidConfig(String),
    #[error("no tree satisfies the config after {0} attempts")]
    InfeasibleConfig(u32),
    #[error("only {available} corruptions available, {requested} requested")]
    ExhaustedCorruptions { available: usize, requested: usize },
}

/// Which generated trees are accepted.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Coverage {
    /// Restart until every derived relation has at least one instance.
    pub require_all_relations: bool,
    /// Restart until the number of inferred facts is in this range.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub inferred_range: Option<(usize, usize)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TreeConfig {
    pub entity_count: usize,
    /// Generations, counting the founders as the first.
    pub max_depth: usize,
    /// Inclusive bounds on the number of children per couple.
    pub children_per_couple: (usize, usize),
    /// Chance that a child below the last generation marries in a spouse and
    /// starts a new couple.
    pub couple_probability: f64,
    pub seed: u64,
    pub coverage: Coverage,
    pub max_attempts: u32,
}

impl Default for TreeConfig {
    fn default() -> Self {
        TreeConfig {
            entity_count: 26,
            max_depth: 5,
            children_per_couple: (1, 3),
            couple_probability: 0.5,
            seed: 0,
            coverage: Coverage { require_all_relations: true, inferred_range: None },
            max_attempts: 1000,
        }
    }
}

impl TreeConfig {
    pub fn with_seed(seed: u64) -> Self {
        TreeConfig { seed, ..Self::default() }
    }

    pub fn validate(&self) -> Result<(), TreeGenError> {
        let bad = |m: &str| Err(TreeGenError::InvalidConfig(m.to_string()));
        if self.entity_count == 0 {
            return bad("entity_count must be positive");
        }
        if self.max_depth == 0 {
            return bad("max_depth must be positive");
        }
        let (lo, hi) = self.children_per_couple;
        if lo > hi || hi == 0 {
            return bad("children_per_couple must be a nonempty range with a positive maximum");
        }
        if !(0.0..=1.0).contains(&self.couple_probability) {
            return bad("couple_probability must be in [0, 1]");
        }
        if self.max_attempts == 0 {
            return bad("max_attempts must be positive");
        }
        Ok(())
    }
}

/// A generated family: basic facts plus L1..L28.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TreeInstance {
    pub config: TreeConfig,
    /// Attempts used, including the accepted one.
    pub attempts: u32,
    pub theory: Theory,
}

impl TreeInstance {
    pub fn parent_edges(&self) -> impl Iterator<Item = (&str, &str)> {
        self.theory
            .basic_atoms()
            .filter(|a| a.relation == PARENT)
            .map(|a| (a.arg(0).unwrap_or_default(), a.arg(1).unwrap_or_default()))
    }

    /// Number of people on the longest parent chain.
    pub fn depth(&self) -> usize {
        longest_chain(&self.theory)
    }
}

/// Number of nodes on the longest `parentOf` path, or `None` on a cycle.
pub fn longest_chain_checked(theory: &Theory) -> Option<usize> {
    let parent = theory.schema.parent().name.clone();
    let mut children: BTreeMap<&str, Vec<&str>> = BTreeMap::new();
    let mut indeg: BTreeMap<&str, usize> = theory.entities.iter().map(|e| (e.name.as_str(), 0)).collect();
    for a in theory.basic_atoms().filter(|a| a.relation == parent) {
        let (p, c) = (a.arg(0)?, a.arg(1)?);
        children.entry(p).or_default().push(c);
        *indeg.entry(c).or_default() += 1;
    }
    let mut depth: BTreeMap<&str, usize> = BTreeMap::new();
    let mut queue: Vec<&str> = indeg.iter().filter(|(_, d)| **d == 0).map(|(n, _)| *n).collect();
    for n in &queue {
        depth.insert(n, 1);
    }
    let mut seen = 0;
    while let Some(n) = queue.pop() {
        seen += 1;
        let d = depth[n];
        for &c in children.get(n).map(Vec::as_slice).unwrap_or_default() {
            let e = depth.entry(c).or_insert(0);
            *e = (*e).max(d + 1);
            let k = indeg.get_mut(c)?;
            *k -= 1;
            if *k == 0 {
                queue.push(c);
            }
        }
    }
    if seen != indeg.len() {
        return None;
    }
    Some(depth.values().copied().max().unwrap_or(0))
}

fn longest_chain(theory: &Theory) -> usize {
    longest_chain_checked(theory).unwrap_or(usize::MAX)
}

struct Person {
    gender: Gender,
    generation: usize,
}

/// People plus (parent, child) index pairs.
type Family = (Vec<Person>, Vec<(usize, usize)>);

fn sample_family(cfg: &TreeConfig, rng: &mut ChaCha8Rng) -> Option<Family> {
    let gender = |rng: &mut ChaCha8Rng| if rng.random_bool(0.5) { Gender::Female } else { Gender::Male };
    let mut people: Vec<Person> = Vec::new();
    let mut edges = Vec::new();
    if cfg.entity_count == 1 {
        people.push(Person { gender: gender(rng), generation: 1 });
        return Some((people, edges));
    }
    people.push(Person { gender: Gender::Male, generation: 1 });
    people.push(Person { gender: Gender::Female, generation: 1 });
    let mut frontier: Vec<(usize, usize)> = if cfg.max_depth >= 2 { alloc::vec![(0, 1)] } else { Vec::new() };
    let (lo, hi) = cfg.children_per_couple;
    while !frontier.is_empty() && people.len() < cfg.entity_count {
        let mut next = Vec::new();
        for (a, b) in frontier {
            let kids = rng.random_range(lo..=hi);
            for _ in 0..kids {
                if people.len() >= cfg.entity_count {
                    break;
                }
                let generation = people[a].generation + 1;
                let c = people.len();
                let g = gender(rng);
                people.push(Person { gender: g, generation });
                edges.push((a, c));
                edges.push((b, c));
                let marries = rng.random_bool(cfg.couple_probability);
                if generation < cfg.max_depth && marries && people.len() < cfg.entity_count {
                    let s = people.len();
                    let sg = match g {
                        Gender::Female => Gender::Male,
                        Gender::Male => Gender::Female,
                    };
                    people.push(Person { gender: sg, generation });
                    next.push((c, s));
                }
            }
        }
        frontier = next;
    }
    (people.len() == cfg.entity_count).then_some((people, edges))
}

fn assign_names(people: &[Person], rng: &mut ChaCha8Rng) -> Vec<String> {
    let mut female: Vec<&str> = names::FEMALE.to_vec();
    let mut male: Vec<&str> = names::MALE.to_vec();
    female.shuffle(rng);
    male.shuffle(rng);
    let (mut fi, mut mi) = (0usize, 0usize);
    let pick = |pool: &[&str], i: &mut usize| {
        let base = pool[*i % pool.len()];
        let round = *i / pool.len();
        *i += 1;
        if round == 0 {
            base.to_string()
        } else {
            format!("{base}{}", round + 1)
        }
    };
    people
        .iter()
        .map(|p| match p.gender {
            Gender::Female => pick(&female, &mut fi),
            Gender::Male => pick(&male, &mut mi),
        })
        .collect()
}

fn accepts(cfg: &TreeConfig, theory: &Theory) -> bool {
    let cov = &cfg.coverage;
    if !cov.require_all_relations && cov.inferred_range.is_none() {
        return true;
    }
    let Ok(closure) = forward_closure(theory, Distinctness::default()) else {
        return false;
    };
    if cov.require_all_relations {
        let present: BTreeSet<&str> = closure.atoms().map(|a| a.relation.as_str()).collect();
        if theory.schema.by_kind(RelationKind::Derived).any(|r| !present.contains(r.name.as_str())) {
            return false;
        }
    }
    cov.inferred_range.is_none_or(|(lo, hi)| (lo..=hi).contains(&closure.len()))
}

/// Samples a tree; the same config always yields the same tree.
pub fn generate_tree(config: &TreeConfig) -> Result<TreeInstance, TreeGenError> {
    config.validate()?;
    let mut master = ChaCha8Rng::seed_from_u64(config.seed);
    for attempt in 1..=config.max_attempts {
        let mut rng = ChaCha8Rng::seed_from_u64(master.random());
        let Some((people, edges)) = sample_family(config, &mut rng) else { continue };
        let names = assign_names(&people, &mut rng);
        let genders: Vec<(&str, Gender)> = names.iter().map(String::as_str).zip(people.iter().map(|p| p.gender)).collect();
        let parents: Vec<(&str, &str)> = edges.iter().map(|&(p, c)| (names[p].as_str(), names[c].as_str())).collect();
        let theory = kinship::theory_from_family(&genders, &parents).expect("generated family is well formed");
        if accepts(config, &theory) {
            return Ok(TreeInstance { config: config.clone(), attempts: attempt, theory });
        }
    }
    Err(TreeGenError::InfeasibleConfig(config.max_attempts))
}

/// Corrupts one argument of randomly chosen positives until `count` atoms
/// outside `known` are collected.
pub fn sample_negatives(
    positives: &[Atom],
    known: &FactIndex,
    entities: &[String],
    seed: u64,
    count: usize,
) -> Result<Vec<Atom>, TreeGenError> {
    if count == 0 {
        return Ok(Vec::new());
    }
    let mut available: BTreeSet<Atom> = BTreeSet::new();
    for p in positives {
        for i in 0..p.args.len() {
            for e in entities {
                let mut a = p.clone();
                a.args[i] = crate::kb::Term::entity(e.clone());
                if !known.contains(&a) && &a != p {
                    available.insert(a);
                }
            }
        }
    }
    if available.len() < count {
        return Err(TreeGenError::ExhaustedCorruptions { available: available.len(), requested: count });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut chosen: BTreeSet<Atom> = BTreeSet::new();
    let mut out = Vec::with_capacity(count);
    let budget = count.saturating_mul(1000).max(10_000);
    for _ in 0..budget {
        if out.len() == count {
            break;
        }
        let p = &positives[rng.random_range(0..positives.len())];
        let i = rng.random_range(0..p.args.len());
        let e = &entities[rng.random_range(0..entities.len())];
        let mut a = p.clone();
        a.args[i] = crate::kb::Term::entity(e.clone());
        if available.contains(&a) && chosen.insert(a.clone()) {
            out.push(a);
        }
    }
    if out.len() < count {
        return Err(TreeGenError::ExhaustedCorruptions { available: out.len(), requested: count });
    }
    Ok(out)
}

/// One-problem dataset: every inferred fact as a positive with its gold
/// proofs, followed by the negatives.
pub fn assemble_dataset(tree: &TreeInstance, closure: &Closure, negatives: &[Atom]) -> Dataset {
    let solver = Solver::new(tree.theory.clone(), Distinctness::default()).expect("kinship rules are stratified");
    let mut questions = Vec::with_capacity(closure.len() + negatives.len());
    for atom in closure.atoms() {
        let proofs = solver.abduce(atom).expect("closure atoms are derived and known");
        questions.push(Question {
            id: format!("Q{}", questions.len() + 1),
            query: Query::Atom(atom.clone()),
            answer: true,
            proofs,
        });
    }
    for atom in negatives {
        questions.push(Question {
            id: format!("Q{}", questions.len() + 1),
            query: Query::Atom(atom.clone()),
            answer: false,
            proofs: Vec::new(),
        });
    }
    Dataset {
        version: DATASET_FORMAT_VERSION,
        source: "treegen".to_string(),
        seed: Some(tree.config.seed),
        problems: alloc::vec![Problem {
            id: format!("tree-{}", tree.config.seed),
            context: Context::Theory { theory: tree.theory.clone() },
            questions,
        }],
    }
}

/// Generates a tree and its balanced dataset in one step.
pub fn build_dataset(config: &TreeConfig) -> Result<(TreeInstance, Closure, Dataset), TreeGenError> {
    let tree = generate_tree(config)?;
    let closure = forward_closure(&tree.theory, Distinctness::default()).expect("kinship rules are stratified");
    let mut known = FactIndex::for_theory(&tree.theory);
    known.extend(closure.atoms().cloned());
    let positives: Vec<Atom> = closure.atoms().cloned().collect();
    let entities: Vec<String> = tree.theory.entities.iter().map(|e| e.name.clone()).collect();
    let negatives = sample_negatives(&positives, &known, &entities, config.seed ^ 0x6e65_6761_7469_7665, positives.len())?;
    let dataset = assemble_dataset(&tree, &closure, &negatives);
    Ok((tree, closure, dataset))
}
