//! End-to-end acceptance checks. Each criterion prints one PASS/FAIL line;
//! the test fails if any asserted criterion fails. 6b (per-tree inferred
//! count near 300) is reported but not asserted; see the decisions ledger.

#[path = "../../core/tests/support/oracle.rs"]
mod oracle;

use std::collections::{BTreeMap, BTreeSet};
use std::io::Write;
use std::path::PathBuf;
use std::sync::Arc;
use std::time::{Duration, Instant};

use symtree::core::dataset::Dataset;
use symtree::core::eval::{
    filtered_mrr, parse_boolean_answer, parse_proof_answer, parse_rule_answer, BoolAnswer, MetricReport, RankedQuery,
};
use symtree::core::kb::kinship::{id_symbols, reference_theory, IdPreset};
use symtree::core::kb::{
    canonicalize_rule, canonicalize_rule_in, parse_fact_atom, Atom, Distinctness, RelationKind, Rule, Term, Theory,
};
use symtree::core::proofwriter::{depersonalize, filter_unknowns, restore, PwAnswer};
use symtree::core::reasoner::{chain_normalize, forward_closure, induce_rule, Closure, RuleTemplate, Solver};
use symtree::core::render::{
    build_prompt, build_text_prompt, DemoBank, PromptOptions, PromptQuestion, Regime, RenderStyle, Task,
    ZeroShotVariant,
};
use symtree::core::transforms::{build_symbol_map, MapOptions, Mode};
use symtree::core::treegen::{build_dataset, generate_tree, Coverage, TreeConfig, TreeInstance};
use symtree::gateway::{ChatEndpoint, GatewayError};
use symtree::harness::{
    run_experiment, run_to_dir, BackendConfig, ExperimentConfig, RunContext, SourceConfig, TransformConfig,
};
use symtree::io::read_proofwriter;

// Pinned tolerances and budgets.
const SEEDS: std::ops::RangeInclusive<u64> = 1..=10;
const DEDUCE_BUDGET: Duration = Duration::from_secs(10);
const ABDUCE_BUDGET: Duration = Duration::from_secs(30);
const ORACLE_SEEDS: u64 = 20;
const ORACLE_ENTITIES: usize = 12;
const RENAME_SEEDS: [u64; 3] = [1, 2, 3];
const TARGET_INFERRED: f64 = 300.0;
const INFERRED_TOLERANCE: f64 = 0.20;
const MRR_EPS: f64 = 1e-12;
const RANDOM_TARGET: f64 = 50.0;
const RANDOM_TOLERANCE: f64 = 3.0;
const POPULATION_SEEDS: std::ops::RangeInclusive<u64> = 1..=100;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn fail(detail: impl Into<String>) -> Outcome {
    outcome(false, detail)
}

type Tree = (TreeInstance, Closure, Dataset);

fn default_trees() -> Vec<(u64, Tree)> {
    SEEDS.map(|s| (s, build_dataset(&TreeConfig::with_seed(s)).expect("default tree"))).collect()
}

fn theory_of(tree: &Tree) -> &Theory {
    &tree.0.theory
}

fn solver_config(task: Task, seeds: Vec<u64>) -> ExperimentConfig {
    ExperimentConfig {
        version: 1,
        name: "acceptance".into(),
        source: SourceConfig::Treegen { seeds, entities: 26, depth: 5 },
        transform: None,
        task,
        prompt: PromptOptions::default(),
        after_selection: false,
        backend: BackendConfig::Solver,
        demos: Default::default(),
        max_questions: None,
        sample_seed: 0,
    }
}

fn c1_deduction(trees: &[(u64, Tree)]) -> Outcome {
    let start = Instant::now();
    let mut wrong = Vec::new();
    let mut total = 0;
    for (seed, tree) in trees {
        let solver = Solver::new(theory_of(tree).clone(), Distinctness::default()).unwrap();
        for q in &tree.2.problems[0].questions {
            total += 1;
            let atom = q.query.as_atom().unwrap();
            if solver.classify(atom).unwrap() != q.answer {
                wrong.push(format!("seed {seed} {atom}"));
            }
        }
    }
    let report = run_experiment(&solver_config(Task::Deduce, SEEDS.collect()), &RunContext::default()).unwrap();
    let avg = report.report.averages().next().map(|r| r.value);
    let elapsed = start.elapsed();
    let pass = wrong.is_empty() && avg == Some(100.0) && elapsed < DEDUCE_BUDGET;
    outcome(pass, format!("{total} questions, {} wrong, harness avg {avg:?}, {elapsed:.1?}", wrong.len()))
}

fn substitute(atom: &Atom, binding: &BTreeMap<String, String>) -> Option<Atom> {
    let args = atom
        .args
        .iter()
        .map(|t| match t {
            Term::Var(v) => binding.get(v).map(|e| Term::entity(e.clone())),
            Term::Entity(e) => Some(Term::entity(e.clone())),
        })
        .collect::<Option<Vec<_>>>()?;
    Some(Atom::new(atom.relation.clone(), args))
}

/// `inv(x, y)` as `base(y, x)`, read from the schema directly.
fn base_form(theory: &Theory, atom: &Atom) -> Atom {
    match theory.schema.relation(&atom.relation) {
        Some(r) if r.kind == RelationKind::Inverse => {
            let mut args = atom.args.clone();
            args.reverse();
            Atom::new(r.inverse_of.clone().unwrap(), args)
        }
        _ => atom.clone(),
    }
}

fn c2_abduction(trees: &[(u64, Tree)]) -> Outcome {
    let start = Instant::now();
    let mut bad = Vec::new();
    let mut observations = 0;
    for (seed, tree) in trees {
        let theory = theory_of(tree);
        let solver = Solver::new(theory.clone(), Distinctness::default()).unwrap();
        let by_label: BTreeMap<&str, &Atom> = theory.facts.iter().map(|f| (f.label.as_str(), &f.atom)).collect();
        for atom in tree.1.atoms() {
            observations += 1;
            let proofs = solver.abduce(atom).unwrap();
            if proofs.is_empty() {
                bad.push(format!("seed {seed}: no proof of {atom}"));
            }
            for p in &proofs {
                let rule = theory.rule(&p.rule_label).unwrap();
                let b = &p.binding.0;
                let head_ok = substitute(&rule.head, b).as_ref() == Some(atom);
                let grounded: Option<BTreeSet<String>> = rule
                    .body
                    .iter()
                    .map(|a| {
                        let g = base_form(theory, &substitute(a, b)?);
                        by_label.iter().find(|(_, f)| **f == &g).map(|(l, _)| l.to_string())
                    })
                    .collect();
                if !head_ok || grounded.as_ref() != Some(&p.fact_labels) {
                    bad.push(format!("seed {seed}: {} does not replay for {atom}", p.selection_text()));
                }
            }
        }
    }
    let report = run_experiment(&solver_config(Task::Abduce, SEEDS.collect()), &RunContext::default()).unwrap();
    let avg = report.report.averages().next().map(|r| r.value);
    let elapsed = start.elapsed();
    let pass = bad.is_empty() && avg == Some(100.0) && elapsed < ABDUCE_BUDGET;
    let first = bad.first().cloned().unwrap_or_default();
    outcome(pass, format!("{observations} observations, {} failures {first}, harness avg {avg:?}, {elapsed:.1?}", bad.len()))
}

fn c3_induction(trees: &[(u64, Tree)]) -> Outcome {
    let mut per_tree = Vec::new();
    for (seed, tree) in trees {
        let theory = theory_of(tree);
        let mut recovered = 0;
        for rule in &theory.rules {
            let relation = &rule.head.relation;
            let targets: Vec<Atom> = tree.1.atoms().filter(|a| &a.relation == relation).cloned().collect();
            let truth = canonicalize_rule_in(&theory.schema, &chain_normalize(&theory.schema, rule).unwrap()).unwrap();
            let ok = RuleTemplate::for_relation(&theory.schema, &theory.rules, relation)
                .and_then(|t| induce_rule(theory, &targets, &t, Distinctness::default()))
                .map(|ind| canonicalize_rule_in(&theory.schema, &ind.rule).unwrap() == truth)
                .unwrap_or(false);
            recovered += usize::from(ok);
        }
        per_tree.push((*seed, recovered, theory.rules.len()));
    }
    let pass = per_tree.iter().all(|&(_, r, n)| n == 28 && r == 28);
    let summary: Vec<String> = per_tree.iter().map(|(s, r, n)| format!("s{s}:{r}/{n}")).collect();
    outcome(pass, summary.join(" "))
}

fn c4_oracle() -> Outcome {
    let mut mismatches = Vec::new();
    for seed in 0..ORACLE_SEEDS {
        let config = TreeConfig {
            entity_count: ORACLE_ENTITIES,
            max_depth: 4,
            seed,
            coverage: Coverage { require_all_relations: false, inferred_range: None },
            ..TreeConfig::default()
        };
        let theory = generate_tree(&config).unwrap().theory;
        let lib = forward_closure(&theory, Distinctness::default()).unwrap();
        if oracle::library_closure(&lib) != oracle::oracle_closure(&theory, Distinctness::default()) {
            mismatches.push(seed);
        }
    }
    outcome(mismatches.is_empty(), format!("{ORACLE_SEEDS} trees of {ORACLE_ENTITIES} entities, mismatching seeds {mismatches:?}"))
}

fn values(report: &MetricReport) -> Vec<(Option<u64>, String, u64, usize)> {
    report.rows.iter().map(|r| (r.seed, r.metric.as_str().to_string(), r.value.to_bits(), r.n)).collect()
}

fn c5_renaming() -> Outcome {
    let modes = [Mode::IdSymbols, Mode::Garbled, Mode::CounterCommonsense, Mode::EntityIds];
    let mut bad = Vec::new();
    for seed in RENAME_SEEDS {
        let (tree, closure, _) = build_dataset(&TreeConfig::with_seed(seed)).unwrap();
        for mode in modes {
            let map = build_symbol_map(&tree.theory, mode, seed, &MapOptions::default()).unwrap();
            let renamed = forward_closure(&map.theory(&tree.theory).unwrap(), Distinctness::default()).unwrap();
            if renamed != map.closure(&closure).unwrap() {
                bad.push(format!("closure seed {seed} {}", mode.as_str()));
            }
        }
    }
    for task in [Task::Deduce, Task::Abduce, Task::Induce] {
        let plain = run_experiment(&solver_config(task, RENAME_SEEDS.to_vec()), &RunContext::default()).unwrap();
        for mode in modes {
            let mut config = solver_config(task, RENAME_SEEDS.to_vec());
            config.transform = Some(TransformConfig { mode, seed: 0, options: MapOptions::default() });
            let renamed = run_experiment(&config, &RunContext::default()).unwrap();
            if values(&renamed.report) != values(&plain.report) {
                bad.push(format!("report {} {}", task.as_str(), mode.as_str()));
            }
        }
    }
    outcome(bad.is_empty(), format!("4 modes x {} seeds, mismatches {bad:?}", RENAME_SEEDS.len()))
}

fn c6_scale(trees: &[(u64, Tree)]) -> (Outcome, Outcome) {
    let mut structural = Vec::new();
    let mut counts = Vec::new();
    for (seed, (tree, closure, dataset)) in trees {
        let q = &dataset.problems[0];
        let negatives: Vec<&Atom> = q.negatives().map(|n| n.query.as_atom().unwrap()).collect();
        let basic: BTreeSet<&Atom> = tree.theory.basic_atoms().collect();
        let disjoint = negatives.iter().all(|n| !closure.contains(n) && !basic.contains(n));
        if tree.depth() > 5 || tree.theory.entities.len() != 26 || negatives.len() != closure.len() || !disjoint {
            structural.push(*seed);
        }
        counts.push(closure.len());
    }
    let (lo, hi) = (TARGET_INFERRED * (1.0 - INFERRED_TOLERANCE), TARGET_INFERRED * (1.0 + INFERRED_TOLERANCE));
    let outside: Vec<(u64, usize)> = trees
        .iter()
        .zip(&counts)
        .filter(|(_, &c)| (c as f64) < lo || (c as f64) > hi)
        .map(|((s, _), &c)| (*s, c))
        .collect();
    let mean = counts.iter().sum::<usize>() as f64 / counts.len() as f64;
    let in_range = POPULATION_SEEDS
        .filter(|&s| {
            let tree = generate_tree(&TreeConfig::with_seed(s)).unwrap();
            let n = forward_closure(&tree.theory, Distinctness::default()).unwrap().len() as f64;
            (lo..=hi).contains(&n)
        })
        .count();
    let population = POPULATION_SEEDS.count();
    (
        outcome(structural.is_empty(), format!("depth <= 5, 26 entities, negatives = positives and disjoint; bad seeds {structural:?}")),
        outcome(
            outside.is_empty(),
            format!(
                "inferred per tree {counts:?} (mean {mean:.1}); outside [{lo:.0}, {hi:.0}]: {outside:?}; \
                 {in_range}/{population} of seeds {POPULATION_SEEDS:?} in range"
            ),
        ),
    )
}

fn golden(name: &str) -> Option<String> {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../core/tests/golden").join(format!("{name}.txt"));
    std::fs::read_to_string(path).ok()
}

fn c7_prompts() -> Outcome {
    let theory = reference_theory();
    let closure = forward_closure(&theory, Distinctness::default()).unwrap();
    let targets: Vec<Atom> = closure.atoms().filter(|a| a.relation == "grandmotherOf").cloned().collect();
    let template = RuleTemplate::for_relation(&theory.schema, &theory.rules, "grandmotherOf").unwrap();
    let regimes = [Regime::ZeroShot, Regime::ZeroShotCot, Regime::FewShotCot, Regime::ZeroPlusFewShotCot];
    let mut cases = Vec::new();
    for task in [Task::Deduce, Task::Induce, Task::Abduce] {
        for regime in regimes {
            for style in [RenderStyle::Logic, RenderStyle::Natural] {
                let name = format!("{}-{}-{}", task.as_str(), regime.as_str(), style.as_str());
                cases.push((name, task, PromptOptions { regime, style, ..Default::default() }));
            }
        }
    }
    for (variant, n) in [(ZeroShotVariant::Predict, 2), (ZeroShotVariant::YesNo, 3)] {
        for style in [RenderStyle::Logic, RenderStyle::Natural] {
            let options = PromptOptions { regime: Regime::ZeroShot, style, variant, omit_context: false };
            cases.push((format!("deduce-zero-shot-v{n}-{}", style.as_str()), Task::Deduce, options));
        }
    }
    let mut bad = Vec::new();
    for (name, task, options) in &cases {
        let demos = options.regime.uses_demos().then(|| DemoBank::builtin(*task));
        let rendered = match task {
            Task::Induce => {
                let q = PromptQuestion::Template { template: &template, targets: &targets };
                build_prompt(*task, &theory, q, *options, demos.as_ref())
            }
            _ => {
                let text = if *task == Task::Deduce { "boyCousinOf(Tobias, David)" } else { "uncleOf(Gabriel, Lea)" };
                let atom = parse_fact_atom(text).unwrap();
                build_prompt(*task, &theory, PromptQuestion::Statement(&atom), *options, demos.as_ref())
            }
        };
        if rendered.map(|m| m.to_text()).ok() != golden(name) {
            bad.push(name.clone());
        }
    }
    outcome(bad.is_empty(), format!("{} golden prompts, mismatches {bad:?}", cases.len()))
}

fn c8_parsers() -> Outcome {
    let mut errors = Vec::new();
    let deduce = DemoBank::builtin(Task::Deduce);
    let bools: Vec<BoolAnswer> = deduce.demos.iter().map(|d| parse_boolean_answer(&d.answer)).collect();
    use BoolAnswer::{False, True};
    if bools != [True, True, True, True, False] {
        errors.push(format!("deduction demos read as {bools:?}"));
    }
    for (text, want) in [
        ("Therefore, the answer is True.", True),
        ("Cannot be determined.", BoolAnswer::Undetermined),
        ("False", False),
    ] {
        if parse_boolean_answer(text) != want {
            errors.push(format!("{text:?}"));
        }
    }

    let abduce = DemoBank::builtin(Task::Abduce);
    let want: [(&str, &[&str]); 5] = [
        ("L3", &["F2", "F37"]),
        ("L2", &["F32", "F33", "F47"]),
        ("L6", &["F28", "F7", "F45"]),
        ("L21", &["F20", "F43"]),
        ("L1", &["F3", "F2", "F40"]),
    ];
    for (d, (rule, facts)) in abduce.demos.iter().zip(want) {
        let facts: BTreeSet<String> = facts.iter().map(|f| f.to_string()).collect();
        match parse_proof_answer(&d.answer) {
            Ok(p) if p.rule_label == rule && p.fact_labels == facts => {}
            other => errors.push(format!("abduction demo {}: {other:?}", d.query)),
        }
    }
    if abduce.demos.len() != want.len() {
        errors.push("abduction demo count".into());
    }

    let theory = reference_theory();
    let ids = id_symbols(IdPreset::Induction);
    let rename = |n: &str| ids.get(n).cloned().unwrap_or_else(|| n.to_string());
    let induce = DemoBank::builtin(Task::Induce);
    for (d, relation) in induce.demos.iter().zip(["motherOf", "brotherOf"]) {
        let rule = theory.rules.iter().find(|r| r.head.relation == relation).unwrap();
        let template = RuleTemplate::for_relation(&theory.schema, &theory.rules, relation).unwrap();
        let truth = chain_normalize(&theory.schema, rule).unwrap();
        let renamed_truth = Rule::new(
            "",
            truth.body.iter().map(|a| Atom::new(rename(&a.relation), a.args.clone())).collect(),
            Atom::new(rename(&truth.head.relation), truth.head.args.clone()),
        );
        match parse_rule_answer(&d.answer, &template.rename(rename)) {
            Ok(r) if canonicalize_rule(&r).ok() == canonicalize_rule(&renamed_truth).ok() => {}
            other => errors.push(format!("induction demo {relation}: {other:?}")),
        }
    }
    // logic-form answer over the plain names, body permuted
    let l5 = RuleTemplate::for_relation(&theory.schema, &theory.rules, "grandmotherOf").unwrap();
    let text = "So the rule is female(x) ∧ parentOf(y,z) ∧ parentOf(x,y) → grandmotherOf(x,z)";
    let gold = canonicalize_rule_in(&theory.schema, &chain_normalize(&theory.schema, &theory.rules[4]).unwrap()).unwrap();
    match parse_rule_answer(text, &l5) {
        Ok(r) if canonicalize_rule_in(&theory.schema, &r).ok() == Some(gold) => {}
        other => errors.push(format!("permuted L5: {other:?}")),
    }
    let n = bools.len() + abduce.demos.len() + induce.demos.len();
    outcome(errors.is_empty(), format!("{n} demonstrations plus fixtures, errors {errors:?}"))
}

struct CoinEndpoint;

impl ChatEndpoint for CoinEndpoint {
    fn post(&self, body: &[u8]) -> Result<String, GatewayError> {
        let sum: u64 = body.iter().map(|&b| u64::from(b)).sum();
        let content = if sum.is_multiple_of(3) { "Therefore, the answer is True." } else { "The answer is False." };
        Ok(serde_json::json!({"choices": [{"message": {"role": "assistant", "content": content}}]}).to_string())
    }
}

fn c9_metrics() -> Outcome {
    let q = |rank: usize| {
        let ranking: Vec<String> = (1..=5).map(|i| format!("e{i}")).collect();
        RankedQuery { ranking, gold: BTreeSet::from([format!("e{rank}")]), known_true: BTreeSet::new() }
    };
    let one = filtered_mrr(&[q(1)]).unwrap();
    let half = filtered_mrr(&[q(2)]).unwrap();
    let mixed = filtered_mrr(&[q(1), q(2), q(4)]).unwrap();
    let mrr_ok = (one - 1.0).abs() < MRR_EPS && (half - 0.5).abs() < MRR_EPS && (mixed - 7.0 / 12.0).abs() < MRR_EPS;

    let mut config = solver_config(Task::Deduce, SEEDS.collect());
    config.backend = BackendConfig::Random { seed: 0 };
    let random = run_experiment(&config, &RunContext::default()).unwrap();
    let avg = random.report.averages().next().unwrap().value;
    let random_ok = (avg - RANDOM_TARGET).abs() <= RANDOM_TOLERANCE;
    outcome(
        mrr_ok && random_ok,
        format!("MRR {one} / {half} / {mixed:.4}; random deduction avg {avg:.2} (target {RANDOM_TARGET} ± {RANDOM_TOLERANCE})"),
    )
}

fn c10_proofwriter() -> Outcome {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/data/proofwriter-appendix.jsonl");
    let records = read_proofwriter(&path).unwrap();
    let had_unknown = records.iter().any(|r| r.questions.iter().any(|q| q.answer == PwAnswer::Unknown));
    let kept = filter_unknowns(records.clone());
    let mut errors = Vec::new();
    if !had_unknown || kept.iter().any(|r| r.questions.iter().any(|q| q.answer == PwAnswer::Unknown)) {
        errors.push("unknowns not removed".to_string());
    }
    if kept.len() != 1 || kept[0].questions.len() != 2 {
        errors.push(format!("kept {} records", kept.len()));
    }
    let record = &kept[0];

    // the lexicon numbering used in the appendix listing
    let listing: BTreeMap<String, String> =
        [("cold", "e1"), ("round", "e2"), ("bear", "e4"), ("dog", "e5"), ("cow", "e14"), ("squirrel", "e26")]
            .into_iter()
            .map(|(a, b)| (a.to_string(), b.to_string()))
            .collect();
    let expected = "The e4 likes the e5.\nThe e14 is e2.\nThe e14 likes the e4.\nThe e14 needs the e4.\nThe e5 needs the e26.\nThe e5 sees the e14.\nThe e26 needs the e5.\nIf someone is e2 then they like the e26.\nIf the e4 is e2 and the e4 likes the e26 then the e26 needs the e4.\nIf the e14 needs the e5 then the e14 is e1.\nDoes it imply that the statement \"The e14 likes the e26.\" is True?";
    match depersonalize(record, &listing) {
        Ok(d) => {
            let prompt = build_text_prompt(&d.sentences, &d.questions[0].text, Regime::ZeroShot, None).unwrap();
            if !prompt.user().starts_with(expected) {
                errors.push(format!("listing mismatch: {}", prompt.user()));
            }
            if restore(&d, &listing) != *record {
                errors.push("listing map does not round-trip".into());
            }
        }
        Err(e) => errors.push(e.to_string()),
    }
    let own = record.entity_map();
    let d = depersonalize(record, &own).unwrap();
    let style = d.sentences[0].strip_prefix("The e").and_then(|s| s.split_once(" likes the e")).is_some();
    if !style || restore(&d, &own) != *record {
        errors.push("per-record map".into());
    }
    outcome(errors.is_empty(), format!("first sentence {:?}; errors {errors:?}", d.sentences[0]))
}

fn c11_replay() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let store = dir.path().join("transcripts");
    let mut config = solver_config(Task::Deduce, vec![1, 2]);
    config.prompt.regime = Regime::ZeroShotCot;
    config.transform = Some(TransformConfig { mode: Mode::IdSymbols, seed: 0, options: MapOptions::default() });
    config.max_questions = Some(40);
    config.backend = BackendConfig::Gateway {
        settings: Default::default(),
        policy: symtree::gateway::CachePolicy::Record,
        transcripts: store.clone(),
        parallelism: 4,
        min_interval_ms: 0,
        timeout_secs: 5,
        retry: Default::default(),
    };
    let live = RunContext { api_key: None, endpoint: Some(Arc::new(CoinEndpoint)) };
    let recorded = run_to_dir(&config, &live, &dir.path().join("record")).unwrap();

    if let BackendConfig::Gateway { policy, .. } = &mut config.backend {
        *policy = symtree::gateway::CachePolicy::Replay;
    }
    let files = ["report.json", "report.csv", "report.md", "answers.jsonl", "manifest.json"];
    let mut runs = Vec::new();
    for i in 0..2 {
        let out = dir.path().join(format!("replay{i}"));
        if let Err(e) = run_to_dir(&config, &RunContext::default(), &out) {
            return fail(format!("replay failed: {e}"));
        }
        runs.push(files.map(|f| std::fs::read(out.join(f)).unwrap()));
    }
    let record_report = std::fs::read(dir.path().join("record/report.json")).unwrap();
    let pass = runs[0] == runs[1] && runs[0][0] == record_report;
    outcome(pass, format!("{} answers replayed twice, {} files byte-identical: {pass}", recorded.answers.len(), files.len()))
}

#[test]
fn acceptance() {
    let trees = default_trees();
    let (c6a, c6b) = c6_scale(&trees);
    let results: Vec<(&str, Outcome, bool)> = vec![
        ("1 rule-based deduction", c1_deduction(&trees), true),
        ("2 rule-based abduction", c2_abduction(&trees), true),
        ("3 template induction", c3_induction(&trees), true),
        ("4 closure oracle", c4_oracle(), true),
        ("5 renaming commutation", c5_renaming(), true),
        ("6a tree shape and negatives", c6a, true),
        ("6b inferred count near 300", c6b, false),
        ("7 prompt fidelity", c7_prompts(), true),
        ("8 parser fidelity", c8_parsers(), true),
        ("9 metric arithmetic", c9_metrics(), true),
        ("10 ProofWriter pipeline", c10_proofwriter(), true),
        ("11 offline determinism", c11_replay(), true),
    ];
    // written to the stdout handle so the table shows without --nocapture
    let mut table = String::from("\nacceptance criteria\n");
    let mut failed = Vec::new();
    for (name, o, asserted) in &results {
        let tag = if o.pass { "PASS" } else { "FAIL" };
        let note = if *asserted { "" } else { " (reported, not asserted)" };
        table.push_str(&format!("{tag} {name}{note}: {}\n", o.detail));
        if *asserted && !o.pass {
            failed.push(*name);
        }
    }
    let mut out = std::io::stdout().lock();
    out.write_all(table.as_bytes()).unwrap();
    out.flush().unwrap();
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
