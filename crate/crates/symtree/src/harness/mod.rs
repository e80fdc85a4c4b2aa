//! Experiment orchestration: load or generate data, rename, render prompts,
//! ask a backend, parse the answers and score them.

mod config;
mod memorize;
mod rundir;

use std::borrow::Cow;
use std::collections::BTreeMap;
use std::sync::Arc;
use std::time::Duration;

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use symtree_core::dataset::{Context, Dataset, Problem, Question};
use symtree_core::eval::{
    accuracy, parse_boolean_answer, parse_proof_answer, parse_rule_answer, precision, proof_accuracy, proof_matches,
    BoolAnswer, EvalError, Metric, MetricReport, ParsedAnswer, ReportRow,
};
use symtree_core::kb::kinship::{self, IdPreset};
use symtree_core::kb::{canonicalize_rule_in, Atom, CanonicalRule, Distinctness, RelationKind, Theory};
use symtree_core::proofwriter::{depersonalize, filter_unknowns, to_dataset};
use symtree_core::reasoner::{chain_normalize, induce_rule, Proof, ReasonError, RuleTemplate, Solver};
use symtree_core::render::{
    after_selection, build_prompt, build_text_prompt, Demo, DemoBank, Messages, PromptOptions, PromptQuestion, Regime,
    RenderError, Renderer, RenderStyle, Task,
};
use symtree_core::transforms::{build_symbol_map, SymbolMap, TransformError};
use symtree_core::treegen::{build_dataset, TreeConfig, TreeGenError};
use thiserror::Error;

pub use config::{
    BackendConfig, DemoSource, ExperimentConfig, SourceConfig, TransformConfig, EXPERIMENT_FORMAT_VERSION,
};
pub use memorize::{memorization_queries, score_memorization, MemorizationQuery};
pub use rundir::{load_report, run_to_dir, Artifact, Manifest, MANIFEST_VERSION};

use crate::gateway::{ChatEndpoint, ChatRequest, Gateway, GatewayError, HttpEndpoint, TranscriptStore};
use crate::io::{read_proofwriter, IoError};

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("config: {0}")]
    Config(String),
    #[error(transparent)]
    Io(#[from] IoError),
    #[error("tree seed {seed}: {source}")]
    TreeGen { seed: u64, source: TreeGenError },
    #[error("{context}: {source}")]
    Transform { context: String, source: TransformError },
    #[error("{context}: {source}")]
    Render { context: String, source: RenderError },
    #[error("{context}: {source}")]
    Reason { context: String, source: ReasonError },
    #[error("{context}: {source}")]
    Gateway { context: String, source: GatewayError },
    #[error("{context}: {source}")]
    Eval { context: String, source: EvalError },
}

/// Things a run needs that do not belong in the config file.
#[derive(Clone, Default)]
pub struct RunContext {
    pub api_key: Option<String>,
    /// Replaces the HTTP client, e.g. with an in-process fake.
    pub endpoint: Option<Arc<dyn ChatEndpoint>>,
}

impl RunContext {
    pub fn from_env() -> Self {
        let api_key = std::env::var(crate::gateway::API_KEY_ENV).ok().filter(|k| !k.is_empty());
        RunContext { api_key, endpoint: None }
    }
}

/// One scored question.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnswerRecord {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub problem: String,
    pub question: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fingerprint: Option<String>,
    pub completion: String,
    pub parsed: ParsedAnswer,
    pub correct: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunOutput {
    pub report: MetricReport,
    pub answers: Vec<AnswerRecord>,
}

/// A dataset as the backend will see it, with the map that produced it.
struct Unit {
    seed: Option<u64>,
    dataset: Dataset,
    map: Option<SymbolMap>,
}

enum Gold {
    Bool(bool),
    Proofs(Vec<Proof>),
    Rule(CanonicalRule),
}

enum ItemQuery {
    Atom(Atom),
    Text,
    Template { template: RuleTemplate, targets: Vec<Atom> },
}

struct Item<'a> {
    problem: &'a str,
    id: String,
    theory: Option<Cow<'a, Theory>>,
    query: ItemQuery,
    prompt: Messages,
    gold: Gold,
}

fn ctx(seed: Option<u64>, problem: &str, question: &str) -> String {
    match seed {
        Some(s) => format!("seed {s}, {problem}, {question}"),
        None => format!("{problem}, {question}"),
    }
}

pub fn run_experiment(config: &ExperimentConfig, run: &RunContext) -> Result<RunOutput, HarnessError> {
    config.validate()?;
    let gateway = build_gateway(config, run)?;
    let units = load_units(config)?;
    let mut rows = Vec::new();
    let mut answers = Vec::new();
    for unit in &units {
        let demos = demo_bank(config, unit, gateway.as_ref())?;
        let items = build_items(config, unit, demos.as_ref())?;
        let completions = complete(config, unit, &items, gateway.as_ref())?;
        let (row, mut recs) = score(config, unit, &items, completions)?;
        rows.push(row);
        answers.append(&mut recs);
    }
    let mut report = MetricReport::default();
    if matches!(config.source, SourceConfig::Treegen { .. }) {
        report.push_with_average(rows);
    } else {
        report.rows.extend(rows);
    }
    Ok(RunOutput { report, answers })
}

fn build_gateway(config: &ExperimentConfig, run: &RunContext) -> Result<Option<Gateway>, HarnessError> {
    let BackendConfig::Gateway { settings, policy, transcripts, parallelism, min_interval_ms, timeout_secs, retry } =
        &config.backend
    else {
        return Ok(None);
    };
    let gw_err = |source| HarnessError::Gateway { context: "transcript store".into(), source };
    let mut g = Gateway::new(settings.clone(), *policy)
        .with_store(TranscriptStore::open(transcripts).map_err(gw_err)?)
        .with_parallelism(*parallelism)
        .with_retry(*retry)
        .with_min_interval(Duration::from_millis(*min_interval_ms));
    g = match &run.endpoint {
        Some(ep) => g.with_endpoint(ep.clone()),
        None => g.with_endpoint(HttpEndpoint::new(
            settings.endpoint.clone(),
            run.api_key.clone(),
            Duration::from_secs(*timeout_secs),
        )),
    };
    Ok(Some(g))
}

fn load_units(config: &ExperimentConfig) -> Result<Vec<Unit>, HarnessError> {
    match &config.source {
        SourceConfig::Treegen { seeds, entities, depth } => seeds
            .iter()
            .map(|&seed| {
                let tc = TreeConfig { entity_count: *entities, max_depth: *depth, ..TreeConfig::with_seed(seed) };
                let (tree, _, dataset) = build_dataset(&tc).map_err(|source| HarnessError::TreeGen { seed, source })?;
                let Some(t) = &config.transform else {
                    return Ok(Unit { seed: Some(seed), dataset, map: None });
                };
                let context = format!("seed {seed}, {} map", t.mode.as_str());
                let terr = |source| HarnessError::Transform { context: context.clone(), source };
                let map = build_symbol_map(&tree.theory, t.mode, t.seed.wrapping_add(seed), &t.options).map_err(terr)?;
                let dataset = map.dataset(&dataset).map_err(terr)?;
                Ok(Unit { seed: Some(seed), dataset, map: Some(map) })
            })
            .collect(),
        SourceConfig::Proofwriter { path, limit, depersonalize: dep } => {
            let mut records = read_proofwriter(path)?;
            if let Some(n) = limit {
                records.truncate(*n);
            }
            let mut records = filter_unknowns(records);
            if *dep {
                records = records
                    .iter()
                    .map(|r| depersonalize(r, &r.entity_map()))
                    .collect::<Result<_, _>>()
                    .map_err(|e| HarnessError::Config(format!("{}: {e}", path.display())))?;
            }
            Ok(vec![Unit { seed: None, dataset: to_dataset(&records), map: None }])
        }
    }
}

/// The bundled demos are written with `r<k>` ids; this rewrites them into
/// the names the experiment's map produces (or the plain kinship names).
pub fn retarget_builtin(bank: &DemoBank, map: Option<&SymbolMap>) -> DemoBank {
    let preset = match bank.vocabulary.as_str() {
        "id-deduction" => IdPreset::Deduction,
        "id-induction" => IdPreset::Induction,
        _ => return bank.clone(),
    };
    let names: BTreeMap<String, String> = kinship::id_symbols(preset).into_iter().map(|(k, v)| (v, k)).collect();
    let vocabulary = map.map_or("semantic", |m| m.mode.as_str());
    bank.retarget(vocabulary, |w| {
        let name = names.get(w)?;
        Some(map.and_then(|m| m.relations.get(name).cloned()).unwrap_or_else(|| name.clone()))
    })
}

fn demo_bank(config: &ExperimentConfig, unit: &Unit, gateway: Option<&Gateway>) -> Result<Option<DemoBank>, HarnessError> {
    if !config.prompt.regime.uses_demos() {
        return Ok(None);
    }
    match &config.demos {
        DemoSource::Builtin => Ok(Some(retarget_builtin(&DemoBank::builtin(config.task), unit.map.as_ref()))),
        DemoSource::File { path } => {
            let text = std::fs::read_to_string(path)
                .map_err(|source| IoError::Fs { path: path.clone(), source })?;
            DemoBank::parse(&text)
                .map(Some)
                .map_err(|source| HarnessError::Render { context: path.display().to_string(), source })
        }
        DemoSource::Generated { count, seed } => {
            let gateway = gateway.ok_or_else(|| HarnessError::Config("generated demos need a gateway".into()))?;
            generate_demos(config, unit, gateway, *count, *seed).map(Some)
        }
    }
}

/// Zero-shot chain-of-thought answers on sampled questions, kept verbatim
/// as demonstrations.
fn generate_demos(
    config: &ExperimentConfig,
    unit: &Unit,
    gateway: &Gateway,
    count: usize,
    seed: u64,
) -> Result<DemoBank, HarnessError> {
    let all: Vec<(&Problem, &Question)> =
        unit.dataset.problems.iter().flat_map(|p| p.questions.iter().map(move |q| (p, q))).collect();
    let picked = sample_indices(all.len(), Some(count), seed ^ unit.seed.unwrap_or(0));
    let options = PromptOptions { regime: Regime::ZeroShotCot, ..config.prompt };
    let mut statements = Vec::new();
    let mut prompts = Vec::new();
    for i in picked {
        let (p, q) = all[i];
        let rerr = |source| HarnessError::Render { context: ctx(unit.seed, &p.id, &q.id), source };
        let (statement, prompt) = match (&p.context, &q.query) {
            (Context::Theory { theory }, query) => {
                let atom = query.as_atom().expect("theory questions are atoms");
                let shown = Renderer::new(&theory.schema, config.prompt.style).fact(atom).map_err(rerr)?;
                (shown, build_prompt(Task::Deduce, theory, PromptQuestion::Statement(atom), options, None).map_err(rerr)?)
            }
            (Context::Text { sentences }, symtree_core::dataset::Query::Text(text)) => {
                (text.clone(), build_text_prompt(sentences, text, Regime::ZeroShotCot, None).map_err(rerr)?)
            }
            _ => return Err(HarnessError::Config(format!("{}: atom question over text", q.id))),
        };
        statements.push(statement);
        prompts.push(prompt);
    }
    let mut demos = Vec::new();
    for (statement, result) in statements.into_iter().zip(gateway.complete_all(&prompts)) {
        let answer = result.map_err(|source| HarnessError::Gateway { context: "demo generation".into(), source })?;
        demos.push(Demo { query: statement, answer: answer.trim().to_string() });
    }
    let vocabulary = unit.map.as_ref().map_or("semantic", |m| m.mode.as_str()).to_string();
    Ok(DemoBank { version: symtree_core::render::DEMO_BANK_FORMAT_VERSION, task: Task::Deduce, vocabulary, demos })
}

/// `cap` indices out of `n`, sorted; all of them when `cap` is `None` or
/// at least `n`.
fn sample_indices(n: usize, cap: Option<usize>, seed: u64) -> Vec<usize> {
    match cap {
        Some(k) if k < n => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut picked = sample(&mut rng, n, k).into_vec();
            picked.sort_unstable();
            picked
        }
        _ => (0..n).collect(),
    }
}

fn build_items<'a>(
    config: &ExperimentConfig,
    unit: &'a Unit,
    demos: Option<&DemoBank>,
) -> Result<Vec<Item<'a>>, HarnessError> {
    let sample_seed = config.sample_seed ^ unit.seed.unwrap_or(0);
    let mut items = Vec::new();
    for problem in &unit.dataset.problems {
        let rerr = |q: &str| {
            let c = ctx(unit.seed, &problem.id, q);
            move |source| HarnessError::Render { context: c, source }
        };
        match (&problem.context, config.task) {
            (Context::Text { sentences }, _) => {
                for i in sample_indices(problem.questions.len(), config.max_questions, sample_seed) {
                    let q = &problem.questions[i];
                    let symtree_core::dataset::Query::Text(text) = &q.query else {
                        return Err(HarnessError::Config(format!("{}: atom question over text", q.id)));
                    };
                    let prompt = build_text_prompt(sentences, text, config.prompt.regime, demos).map_err(rerr(&q.id))?;
                    items.push(Item {
                        problem: &problem.id,
                        id: q.id.clone(),
                        theory: None,
                        query: ItemQuery::Text,
                        prompt,
                        gold: Gold::Bool(q.answer),
                    });
                }
            }
            (Context::Theory { theory }, Task::Deduce | Task::Abduce) => {
                let pool: Vec<&Question> = match config.task {
                    Task::Abduce => problem.positives().collect(),
                    _ => problem.questions.iter().collect(),
                };
                for i in sample_indices(pool.len(), config.max_questions, sample_seed) {
                    let q = pool[i];
                    let atom = q.query.as_atom().expect("theory questions are atoms").clone();
                    let (shown, proofs) = if config.after_selection {
                        let (t, p) = after_selection(theory, &q.proofs);
                        (Cow::Owned(t), p)
                    } else {
                        (Cow::Borrowed(theory), q.proofs.clone())
                    };
                    let prompt =
                        build_prompt(config.task, &shown, PromptQuestion::Statement(&atom), config.prompt, demos)
                            .map_err(rerr(&q.id))?;
                    let gold = match config.task {
                        Task::Abduce => Gold::Proofs(proofs),
                        _ => Gold::Bool(q.answer),
                    };
                    items.push(Item {
                        problem: &problem.id,
                        id: q.id.clone(),
                        theory: Some(shown),
                        query: ItemQuery::Atom(atom),
                        prompt,
                        gold,
                    });
                }
            }
            (Context::Theory { theory }, Task::Induce) => {
                let schema = &theory.schema;
                let relations: Vec<&str> = schema.by_kind(RelationKind::Derived).map(|r| r.name.as_str()).collect();
                let mut candidates = Vec::new();
                for rel in relations {
                    let targets: Vec<Atom> = problem
                        .positives()
                        .filter_map(|q| q.query.as_atom())
                        .filter(|a| a.relation == rel)
                        .cloned()
                        .collect();
                    if !targets.is_empty() {
                        candidates.push((rel, targets));
                    }
                }
                for i in sample_indices(candidates.len(), config.max_questions, sample_seed) {
                    let (rel, targets) = &candidates[i];
                    let reason = |source| HarnessError::Reason { context: ctx(unit.seed, &problem.id, rel), source };
                    let template = RuleTemplate::for_relation(schema, &theory.rules, rel).map_err(reason)?;
                    let rule = theory.rules.iter().find(|r| r.head.relation == *rel).expect("template found the rule");
                    let truth = canonicalize_rule_in(schema, &chain_normalize(schema, rule).map_err(reason)?)
                        .map_err(|e| HarnessError::Reason { context: ctx(unit.seed, &problem.id, rel), source: ReasonError::UnknownSymbol(e) })?;
                    let question = PromptQuestion::Template { template: &template, targets };
                    let prompt = build_prompt(Task::Induce, theory, question, config.prompt, demos).map_err(rerr(rel))?;
                    items.push(Item {
                        problem: &problem.id,
                        id: rel.to_string(),
                        theory: Some(Cow::Borrowed(theory)),
                        query: ItemQuery::Template { template, targets: targets.clone() },
                        prompt,
                        gold: Gold::Rule(truth),
                    });
                }
            }
        }
    }
    Ok(items)
}

fn complete(
    config: &ExperimentConfig,
    unit: &Unit,
    items: &[Item<'_>],
    gateway: Option<&Gateway>,
) -> Result<Vec<(String, Option<String>)>, HarnessError> {
    match (&config.backend, gateway) {
        (BackendConfig::Gateway { .. }, Some(g)) => {
            let prompts: Vec<Messages> = items.iter().map(|i| i.prompt.clone()).collect();
            let mut out = Vec::with_capacity(items.len());
            let mut first_err = None;
            for (item, r) in items.iter().zip(g.complete_all(&prompts)) {
                let fp = ChatRequest::new(&item.prompt, g.settings()).fingerprint();
                match r {
                    Ok(text) => out.push((text, Some(fp))),
                    Err(source) => {
                        first_err.get_or_insert(HarnessError::Gateway { context: ctx(unit.seed, item.problem, &item.id), source });
                    }
                }
            }
            match first_err {
                Some(e) => Err(e),
                None => Ok(out),
            }
        }
        (BackendConfig::Solver, _) => {
            // one solver per problem; reduced after-selection theories get their own
            let mut shared: BTreeMap<&str, Solver> = BTreeMap::new();
            items
                .iter()
                .map(|item| {
                    let reason = |source| HarnessError::Reason { context: ctx(unit.seed, item.problem, &item.id), source };
                    let text = match &item.theory {
                        Some(Cow::Borrowed(theory)) => {
                            if !shared.contains_key(item.problem) {
                                let solver = Solver::new((*theory).clone(), Distinctness::default()).map_err(reason)?;
                                shared.insert(item.problem, solver);
                            }
                            solver_answer(config.task, &shared[item.problem], &item.query)
                        }
                        Some(Cow::Owned(theory)) => {
                            let solver = Solver::new(theory.clone(), Distinctness::default()).map_err(reason)?;
                            solver_answer(config.task, &solver, &item.query)
                        }
                        None => return Err(HarnessError::Config("the solver backend needs a theory".into())),
                    };
                    Ok((text.map_err(reason)?, None))
                })
                .collect()
        }
        (BackendConfig::Random { seed }, _) => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_mul(0x9e37_79b9_7f4a_7c15) ^ unit.seed.unwrap_or(0));
            Ok(items.iter().map(|item| (random_answer(config.task, item, &mut rng), None)).collect())
        }
        (BackendConfig::Gateway { .. }, None) => Err(HarnessError::Config("gateway backend without a gateway".into())),
    }
}

fn render_logic(theory: &Theory, rule: &symtree_core::kb::Rule) -> String {
    Renderer::new(&theory.schema, RenderStyle::Logic)
        .rule(rule)
        .expect("induced and filled rules use schema relations")
}

fn solver_answer(task: Task, solver: &Solver, query: &ItemQuery) -> Result<String, ReasonError> {
    Ok(match (task, query) {
        (Task::Deduce, ItemQuery::Atom(a)) => {
            let verdict = if solver.classify(a)? { "True" } else { "False" };
            format!("Therefore, the answer is {verdict}.")
        }
        (Task::Abduce, ItemQuery::Atom(a)) => match solver.abduce(a)?.first() {
            Some(p) => format!("Therefore, the selected rule and facts are {}.", p.selection_text()),
            None => "No proof found.".to_string(),
        },
        (Task::Induce, ItemQuery::Template { template, targets }) => {
            let induced = induce_rule(solver.theory(), targets, template, solver.distinctness())?;
            format!("After filling in the template, the generated rule is: {}", render_logic(solver.theory(), &induced.rule))
        }
        _ => "Cannot be determined.".to_string(),
    })
}

fn random_answer(task: Task, item: &Item<'_>, rng: &mut ChaCha8Rng) -> String {
    match (task, &item.query, item.theory.as_deref()) {
        (Task::Abduce, ItemQuery::Atom(_), Some(theory)) if !theory.rules.is_empty() && !theory.facts.is_empty() => {
            let rule = &theory.rules[rng.random_range(0..theory.rules.len())];
            let k = rng.random_range(1..=theory.facts.len().min(4));
            let mut picks = sample(rng, theory.facts.len(), k).into_vec();
            picks.sort_unstable();
            let facts: Vec<&str> = picks.iter().map(|&i| theory.facts[i].label.as_str()).collect();
            format!("Therefore, the selected rule and facts are {}, {}.", rule.label, facts.join(", "))
        }
        (Task::Induce, ItemQuery::Template { template, .. }, Some(theory)) => {
            let bits: Vec<usize> = (0..template.slots.len()).map(|_| rng.random_range(0..2)).collect();
            format!("After filling in the template, the generated rule is: {}", render_logic(theory, &template.fill(&bits)))
        }
        _ => if rng.random_bool(0.5) { "True" } else { "False" }.to_string(),
    }
}

fn score(
    config: &ExperimentConfig,
    unit: &Unit,
    items: &[Item<'_>],
    completions: Vec<(String, Option<String>)>,
) -> Result<(ReportRow, Vec<AnswerRecord>), HarnessError> {
    let mut records = Vec::with_capacity(items.len());
    let mut bools = (Vec::new(), Vec::new());
    let mut proofs = (Vec::new(), Vec::new());
    let mut hits = Vec::new();
    for (item, (completion, fingerprint)) in items.iter().zip(completions) {
        let (parsed, correct) = match (&item.gold, &item.query) {
            (Gold::Bool(g), _) => {
                let v = parse_boolean_answer(&completion);
                bools.0.push(v);
                bools.1.push(*g);
                (ParsedAnswer::Boolean { value: v }, matches!((v, g), (BoolAnswer::True, true) | (BoolAnswer::False, false)))
            }
            (Gold::Proofs(gold), _) => {
                let parsed = parse_proof_answer(&completion);
                let p = parsed.as_ref().ok().cloned();
                let ok = p.as_ref().is_some_and(|p| proof_matches(p, gold));
                let parsed = match parsed {
                    Ok(proof) => ParsedAnswer::Proof { proof },
                    Err(e) => ParsedAnswer::Unparsed { reason: e.to_string() },
                };
                proofs.0.push(p);
                proofs.1.push(gold.clone());
                (parsed, ok)
            }
            (Gold::Rule(truth), ItemQuery::Template { template, .. }) => {
                let schema = &item.theory.as_deref().expect("induce items carry a theory").schema;
                match parse_rule_answer(&completion, template) {
                    Ok(rule) => {
                        let ok = canonicalize_rule_in(schema, &rule).is_ok_and(|c| &c == truth);
                        (ParsedAnswer::Rule { rule }, ok)
                    }
                    Err(e) => (ParsedAnswer::Unparsed { reason: e.to_string() }, false),
                }
            }
            (Gold::Rule(_), _) => (ParsedAnswer::Unparsed { reason: "no template".into() }, false),
        };
        hits.push(correct);
        records.push(AnswerRecord {
            seed: unit.seed,
            problem: item.problem.to_string(),
            question: item.id.clone(),
            fingerprint,
            completion,
            parsed,
            correct,
        });
    }
    let label = unit.seed.map_or_else(|| "dataset".to_string(), |s| format!("seed {s}"));
    let eval = |source| HarnessError::Eval { context: label.clone(), source };
    let value = match config.task {
        Task::Deduce => accuracy(&bools.0, &bools.1).map_err(eval)?,
        Task::Abduce => proof_accuracy(&proofs.0, &proofs.1).map_err(eval)?,
        Task::Induce => precision(&hits).map_err(eval)?,
    };
    let row = ReportRow {
        task: config.task,
        setting: config.setting(),
        regime: config.prompt.regime,
        style: config.prompt.style,
        backend: config.backend.label(),
        metric: Metric::for_task(config.task),
        seed: unit.seed,
        seeds: unit.seed.into_iter().collect(),
        value,
        n: items.len(),
    };
    Ok((row, records))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn config(task: Task, backend: BackendConfig) -> ExperimentConfig {
        ExperimentConfig {
            version: EXPERIMENT_FORMAT_VERSION,
            name: "t".into(),
            source: SourceConfig::Treegen { seeds: vec![1, 2], entities: 26, depth: 5 },
            transform: None,
            task,
            prompt: PromptOptions::default(),
            after_selection: false,
            backend,
            demos: DemoSource::Builtin,
            max_questions: Some(40),
            sample_seed: 0,
        }
    }

    #[test]
    fn solver_scores_full_marks() {
        for task in Task::ALL {
            let out = run_experiment(&config(task, BackendConfig::Solver), &RunContext::default()).unwrap();
            let avg = out.report.averages().next().unwrap();
            assert_eq!(avg.value, 100.0, "{task}: {:?}", out.answers.iter().find(|a| !a.correct));
            assert_eq!(out.report.rows.len(), 3);
        }
    }

    #[test]
    fn after_selection_keeps_solver_exact() {
        for task in [Task::Deduce, Task::Abduce] {
            let mut c = config(task, BackendConfig::Solver);
            c.after_selection = true;
            let out = run_experiment(&c, &RunContext::default()).unwrap();
            assert_eq!(out.report.averages().next().unwrap().value, 100.0);
        }
    }

    #[test]
    fn random_backend_is_seeded() {
        let c = config(Task::Deduce, BackendConfig::Random { seed: 7 });
        let a = run_experiment(&c, &RunContext::default()).unwrap();
        let b = run_experiment(&c, &RunContext::default()).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn builtin_demos_follow_the_map() {
        let bank = DemoBank::builtin(Task::Deduce);
        let semantic = retarget_builtin(&bank, None);
        assert_eq!(semantic.vocabulary, "semantic");
        assert!(!semantic.render().contains("r3("));
        assert!(semantic.render().contains("parentOf("));
    }

    #[test]
    fn sampling_is_sorted_and_capped() {
        let s = sample_indices(100, Some(10), 3);
        assert_eq!(s.len(), 10);
        assert!(s.windows(2).all(|w| w[0] < w[1]));
        assert_eq!(sample_indices(5, Some(10), 3), vec![0, 1, 2, 3, 4]);
    }
}
