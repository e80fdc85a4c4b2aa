//! The `symtree` command line.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context as _, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::Value;
use symtree_core::dataset::Dataset;
use symtree_core::kb::kinship::{self, IdPreset};
use symtree_core::kb::{parse_fact_atom, Distinctness, RelationKind, Theory};
use symtree_core::proofwriter::{depersonalize, filter_unknowns, to_dataset};
use symtree_core::reasoner::{forward_closure, induce_rule, RuleTemplate, Solver};
use symtree_core::render::{
    after_selection, build_prompt, DemoBank, PromptOptions, PromptQuestion, Regime, RenderStyle, Renderer, Task,
    ZeroShotVariant,
};
use symtree_core::transforms::{build_symbol_map, MapOptions, Mode, SymbolMap};
use symtree_core::treegen::{build_dataset, TreeConfig};

use crate::gateway::{CachePolicy, API_KEY_ENV, ENDPOINT_ENV};
use crate::harness::{load_report, retarget_builtin, run_to_dir, BackendConfig, ExperimentConfig, RunContext};
use crate::io::{read_dataset, read_json, read_proofwriter, read_symbol_map, read_theory, write_json};

#[derive(Debug, Parser)]
#[command(name = "symtree", version, about = "Symbolic kinship trees, exact reasoners and LLM evaluation")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a family tree, its closure and a balanced dataset.
    Gen(GenArgs),
    /// Rename relations and/or entities of a theory or dataset.
    Transform(TransformArgs),
    /// Print the chat prompt for one question.
    Render(RenderArgs),
    /// Run an exact reasoner on a theory.
    Solve(SolveArgs),
    /// Convert a ProofWriter JSONL shard into a dataset.
    IngestProofwriter(IngestArgs),
    /// Run an experiment config into a run directory.
    Run(RunArgs),
    /// Print the report of a run directory.
    Report(ReportArgs),
}

#[derive(Debug, Args)]
pub struct GenArgs {
    #[arg(long)]
    seed: u64,
    #[arg(long, default_value_t = 26)]
    entities: usize,
    #[arg(long, default_value_t = 5)]
    depth: usize,
    #[arg(long)]
    out: PathBuf,
    /// Accept trees that miss some derived relation.
    #[arg(long)]
    allow_missing_relations: bool,
}

#[derive(Debug, Args)]
pub struct TransformArgs {
    #[arg(long, value_parser = parse_mode)]
    mode: Option<Mode>,
    /// A theory.json or dataset.json.
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Apply this symbol map instead of building one.
    #[arg(long, conflicts_with = "mode")]
    map: Option<PathBuf>,
    /// Apply the inverse of `--map`.
    #[arg(long, requires = "map")]
    invert: bool,
    #[arg(long, value_enum, default_value_t = PresetArg::Deduction)]
    preset: PresetArg,
    /// In id-symbols mode, rename entities to e1, e2, ... as well.
    #[arg(long)]
    id_entities: bool,
    /// In counter-commonsense mode, keep female/male in place.
    #[arg(long)]
    keep_genders: bool,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum PresetArg {
    Deduction,
    Induction,
}

#[derive(Debug, Args)]
pub struct RenderArgs {
    #[arg(long, value_parser = parse_task)]
    task: Task,
    #[arg(long, value_parser = parse_regime, default_value = "zero-shot")]
    regime: Regime,
    #[arg(long, value_parser = parse_style, default_value = "logic")]
    style: RenderStyle,
    /// Defaults to the built-in reference family.
    #[arg(long)]
    theory: Option<PathBuf>,
    /// Statement to classify or explain, e.g. `motherOf(Laura, Fabian)`.
    #[arg(long)]
    query: Option<String>,
    /// Relation whose rule is induced.
    #[arg(long)]
    relation: Option<String>,
    /// Zero-shot deduction wording: 1, 2 or 3.
    #[arg(long, value_parser = parse_variant, default_value = "1")]
    variant: ZeroShotVariant,
    /// Demo bank file; the bundled bank is used otherwise.
    #[arg(long)]
    demos: Option<PathBuf>,
    /// Symbol map the theory was renamed with, for rewriting bundled demos.
    #[arg(long)]
    map: Option<PathBuf>,
    #[arg(long)]
    omit_context: bool,
    #[arg(long)]
    after_selection: bool,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum SolveMode {
    Closure,
    Classify,
    Abduce,
    Induce,
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    #[arg(value_enum)]
    mode: SolveMode,
    #[arg(long)]
    theory: Option<PathBuf>,
    #[arg(long)]
    query: Option<String>,
    #[arg(long)]
    relation: Option<String>,
    #[arg(long, value_enum, default_value_t = DistinctArg::All)]
    distinct: DistinctArg,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum DistinctArg {
    None,
    Head,
    All,
}

#[derive(Debug, Args)]
pub struct IngestArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    depersonalize: bool,
    /// Where to write the per-record entity maps.
    #[arg(long, requires = "depersonalize")]
    maps: Option<PathBuf>,
    #[arg(long)]
    limit: Option<usize>,
}

#[derive(Debug, Args)]
pub struct RunArgs {
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    out: PathBuf,
    /// Override the gateway cache policy.
    #[arg(long, value_parser = parse_policy)]
    policy: Option<CachePolicy>,
    /// Override the endpoint URL (also read from the environment).
    #[arg(long, env = ENDPOINT_ENV)]
    endpoint: Option<String>,
    #[arg(long, env = API_KEY_ENV, hide_env_values = true)]
    api_key: Option<String>,
    /// Override the transcript directory.
    #[arg(long)]
    transcripts: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ReportFormat {
    Markdown,
    Csv,
    Json,
}

#[derive(Debug, Args)]
pub struct ReportArgs {
    /// Run directory or report.json.
    #[arg(long)]
    run: PathBuf,
    #[arg(long, value_enum, default_value_t = ReportFormat::Markdown)]
    format: ReportFormat,
}

fn parse_mode(s: &str) -> Result<Mode, String> {
    Mode::parse(s).ok_or_else(|| format!("unknown mode {s:?}"))
}

fn parse_task(s: &str) -> Result<Task, String> {
    Task::parse(s).ok_or_else(|| format!("unknown task {s:?}"))
}

fn parse_regime(s: &str) -> Result<Regime, String> {
    Regime::parse(s).ok_or_else(|| format!("unknown regime {s:?}"))
}

fn parse_style(s: &str) -> Result<RenderStyle, String> {
    RenderStyle::parse(s).ok_or_else(|| format!("unknown style {s:?}"))
}

fn parse_variant(s: &str) -> Result<ZeroShotVariant, String> {
    ZeroShotVariant::parse(s).ok_or_else(|| format!("unknown variant {s:?}"))
}

fn parse_policy(s: &str) -> Result<CachePolicy, String> {
    CachePolicy::parse(s).ok_or_else(|| format!("unknown cache policy {s:?}"))
}

pub fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Gen(a) => gen(a),
        Command::Transform(a) => transform(a),
        Command::Render(a) => render(a),
        Command::Solve(a) => solve(a),
        Command::IngestProofwriter(a) => ingest(a),
        Command::Run(a) => run_cmd(a),
        Command::Report(a) => report(a),
    }
}

fn gen(a: GenArgs) -> Result<()> {
    let mut config = TreeConfig { entity_count: a.entities, max_depth: a.depth, ..TreeConfig::with_seed(a.seed) };
    config.coverage.require_all_relations = !a.allow_missing_relations;
    let (tree, closure, dataset) = build_dataset(&config)?;
    write_json(&a.out.join("tree.json"), &tree)?;
    write_json(&a.out.join("theory.json"), &tree.theory)?;
    write_json(&a.out.join("closure.json"), &closure)?;
    write_json(&a.out.join("dataset.json"), &dataset)?;
    let negatives = dataset.problems[0].negatives().count();
    println!(
        "seed {}: {} entities, {} basic facts, depth {}, {} inferred facts, {} negatives ({} attempts)",
        a.seed,
        tree.theory.entities.len(),
        tree.theory.facts.len(),
        tree.depth(),
        closure.len(),
        negatives,
        tree.attempts
    );
    Ok(())
}

enum Doc {
    Theory(Theory),
    Dataset(Dataset),
}

fn read_doc(path: &Path) -> Result<Doc> {
    let value: Value = read_json(path)?;
    if value.get("problems").is_some() {
        Ok(Doc::Dataset(read_dataset(path)?))
    } else if value.get("rules").is_some() {
        Ok(Doc::Theory(read_theory(path)?))
    } else {
        bail!("{} is neither a theory nor a dataset", path.display())
    }
}

fn first_theory(doc: &Doc) -> Result<&Theory> {
    match doc {
        Doc::Theory(t) => Ok(t),
        Doc::Dataset(d) => d
            .problems
            .iter()
            .find_map(|p| p.theory())
            .ok_or_else(|| anyhow!("dataset has no theory context to build a map from")),
    }
}

fn transform(a: TransformArgs) -> Result<()> {
    let doc = read_doc(&a.input)?;
    let map: SymbolMap = match (&a.map, a.mode) {
        (Some(path), _) => {
            let m = read_symbol_map(path)?;
            if a.invert {
                m.inverse()
            } else {
                m
            }
        }
        (None, Some(mode)) => {
            let options = MapOptions {
                preset: match a.preset {
                    PresetArg::Deduction => IdPreset::Deduction,
                    PresetArg::Induction => IdPreset::Induction,
                },
                id_entities: a.id_entities,
                shuffle_genders: !a.keep_genders,
                wordlist: None,
            };
            build_symbol_map(first_theory(&doc)?, mode, a.seed, &options)?
        }
        (None, None) => bail!("either --mode or --map is required"),
    };
    let name = a.input.file_name().ok_or_else(|| anyhow!("input has no file name"))?;
    match &doc {
        Doc::Theory(t) => write_json(&a.out.join(name), &map.theory(t)?)?,
        Doc::Dataset(d) => write_json(&a.out.join(name), &map.dataset(d)?)?,
    }
    write_json(&a.out.join("symbol-map.json"), &map)?;
    println!(
        "{} map: {} relations, {} entities renamed",
        map.mode.as_str(),
        map.relations.iter().filter(|(k, v)| k != v).count(),
        map.entities.as_ref().map_or(0, |e| e.len())
    );
    Ok(())
}

fn load_theory(path: &Option<PathBuf>) -> Result<Theory> {
    match path {
        Some(p) => Ok(read_theory(p)?),
        None => Ok(kinship::reference_theory()),
    }
}

fn query_atom(theory: &Theory, query: &Option<String>, default_positive: bool) -> Result<symtree_core::kb::Atom> {
    if let Some(q) = query {
        let atom = parse_fact_atom(q)?;
        theory.check_query(&atom)?;
        return Ok(atom);
    }
    let closure = forward_closure(theory, Distinctness::default())?;
    let first = closure.atoms().next().cloned().ok_or_else(|| anyhow!("the theory derives nothing"))?;
    if !default_positive {
        eprintln!("no --query given; using {first}");
    }
    Ok(first)
}

fn relation_targets(theory: &Theory, relation: &Option<String>) -> Result<(RuleTemplate, Vec<symtree_core::kb::Atom>)> {
    let closure = forward_closure(theory, Distinctness::default())?;
    let relation = match relation {
        Some(r) => r.clone(),
        None => theory
            .schema
            .by_kind(RelationKind::Derived)
            .map(|r| r.name.clone())
            .find(|r| closure.atoms().any(|a| &a.relation == r))
            .ok_or_else(|| anyhow!("the theory derives nothing"))?,
    };
    let template = RuleTemplate::for_relation(&theory.schema, &theory.rules, &relation)?;
    let targets: Vec<_> = closure.atoms().filter(|a| a.relation == relation).cloned().collect();
    if targets.is_empty() {
        bail!("no {relation} facts follow from this theory");
    }
    Ok((template, targets))
}

fn render(a: RenderArgs) -> Result<()> {
    let theory = load_theory(&a.theory)?;
    let options = PromptOptions { regime: a.regime, style: a.style, variant: a.variant, omit_context: a.omit_context };
    let demos = if a.regime.uses_demos() {
        Some(match &a.demos {
            Some(p) => DemoBank::parse(&std::fs::read_to_string(p).with_context(|| p.display().to_string())?)?,
            None => {
                let map = a.map.as_deref().map(read_symbol_map).transpose()?;
                retarget_builtin(&DemoBank::builtin(a.task), map.as_ref())
            }
        })
    } else {
        None
    };
    let messages = match a.task {
        Task::Induce => {
            let (template, targets) = relation_targets(&theory, &a.relation)?;
            let q = PromptQuestion::Template { template: &template, targets: &targets };
            build_prompt(a.task, &theory, q, options, demos.as_ref())?
        }
        Task::Deduce | Task::Abduce => {
            let atom = query_atom(&theory, &a.query, false)?;
            if a.after_selection {
                let proofs = Solver::new(theory.clone(), Distinctness::default())?.abduce(&atom).unwrap_or_default();
                let (shown, _) = after_selection(&theory, &proofs);
                build_prompt(a.task, &shown, PromptQuestion::Statement(&atom), options, demos.as_ref())?
            } else {
                build_prompt(a.task, &theory, PromptQuestion::Statement(&atom), options, demos.as_ref())?
            }
        }
    };
    print!("{}", messages.to_text());
    Ok(())
}

fn solve(a: SolveArgs) -> Result<()> {
    let theory = load_theory(&a.theory)?;
    let distinctness = match a.distinct {
        DistinctArg::None => Distinctness::None,
        DistinctArg::Head => Distinctness::HeadVarsDistinct,
        DistinctArg::All => Distinctness::AllPairwiseDistinct,
    };
    match a.mode {
        SolveMode::Closure => {
            let closure = forward_closure(&theory, distinctness)?;
            for (atom, ds) in closure.iter() {
                println!("{atom}\t{}", ds.len());
            }
            eprintln!("{} inferred facts, {} derivations", closure.len(), closure.derivation_count());
        }
        SolveMode::Classify => {
            let atom = query_atom(&theory, &a.query, true)?;
            let solver = Solver::new(theory, distinctness)?;
            println!("{}", if solver.classify(&atom)? { "True" } else { "False" });
        }
        SolveMode::Abduce => {
            let atom = query_atom(&theory, &a.query, false)?;
            let solver = Solver::new(theory, distinctness)?;
            let proofs = solver.abduce(&atom)?;
            for p in &proofs {
                println!("{}", p.selection_text());
            }
            eprintln!("{} proofs of {atom}", proofs.len());
        }
        SolveMode::Induce => {
            let (template, targets) = relation_targets(&theory, &a.relation)?;
            let induced = induce_rule(&theory, &targets, &template, distinctness)?;
            let shown = Renderer::new(&theory.schema, RenderStyle::Logic).rule(&induced.rule)?;
            println!("{shown}");
            eprintln!("covers {} of {} targets", induced.support, targets.len());
        }
    }
    Ok(())
}

fn ingest(a: IngestArgs) -> Result<()> {
    let mut records = read_proofwriter(&a.input)?;
    if let Some(n) = a.limit {
        records.truncate(n);
    }
    let total: usize = records.iter().map(|r| r.questions.len()).sum();
    let mut records = filter_unknowns(records);
    let mut maps: BTreeMap<String, BTreeMap<String, String>> = BTreeMap::new();
    if a.depersonalize {
        records = records
            .iter()
            .map(|r| {
                let m = r.entity_map();
                let out = depersonalize(r, &m);
                maps.insert(r.id.clone(), m);
                out
            })
            .collect::<Result<_, _>>()?;
    }
    let dataset = to_dataset(&records);
    write_json(&a.out, &dataset)?;
    if let Some(path) = &a.maps {
        write_json(path, &maps)?;
    }
    println!(
        "{} records, {} of {total} questions kept after removing Unknowns",
        records.len(),
        dataset.question_count()
    );
    Ok(())
}

fn run_cmd(a: RunArgs) -> Result<()> {
    let mut config: ExperimentConfig = read_json(&a.config)?;
    let base = a.config.parent().map(Path::to_path_buf).unwrap_or_default();
    config.resolve_paths(&base);
    if let BackendConfig::Gateway { settings, policy, transcripts, .. } = &mut config.backend {
        if let Some(p) = a.policy {
            *policy = p;
        }
        if let Some(e) = &a.endpoint {
            settings.endpoint = e.clone();
        }
        if let Some(t) = &a.transcripts {
            *transcripts = t.clone();
        }
    }
    let ctx = RunContext { api_key: a.api_key.clone(), endpoint: None };
    let out = run_to_dir(&config, &ctx, &a.out)?;
    print!("{}", out.report.to_markdown());
    eprintln!("{} answers written to {}", out.answers.len(), a.out.display());
    Ok(())
}

fn report(a: ReportArgs) -> Result<()> {
    let report = load_report(&a.run)?;
    match a.format {
        ReportFormat::Markdown => print!("{}", report.to_markdown()),
        ReportFormat::Csv => print!("{}", report.to_csv()),
        ReportFormat::Json => println!("{}", serde_json::to_string_pretty(&report)?),
    }
    Ok(())
}
