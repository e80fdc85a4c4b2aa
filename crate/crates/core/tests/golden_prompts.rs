//! Renders the reference family under every task, regime and style and
//! compares against checked-in prompt files byte for byte.

use std::path::PathBuf;

use symtree_core::kb::kinship::reference_theory;
use symtree_core::kb::{parse_fact_atom, Distinctness, Theory};
use symtree_core::reasoner::{forward_closure, RuleTemplate};
use symtree_core::render::{
    build_prompt, DemoBank, PromptOptions, PromptQuestion, Regime, RenderStyle, Task, ZeroShotVariant,
};

const REGIMES: [Regime; 4] = [Regime::ZeroShot, Regime::ZeroShotCot, Regime::FewShotCot, Regime::ZeroPlusFewShotCot];
const STYLES: [RenderStyle; 2] = [RenderStyle::Logic, RenderStyle::Natural];

fn golden(name: &str) -> String {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(format!("{name}.txt"));
    std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()))
}

fn render(theory: &Theory, task: Task, options: PromptOptions) -> String {
    let demos = options.regime.uses_demos().then(|| DemoBank::builtin(task));
    let messages = match task {
        Task::Induce => {
            let closure = forward_closure(theory, Distinctness::default()).unwrap();
            let targets: Vec<_> = closure.atoms().filter(|a| a.relation == "grandmotherOf").cloned().collect();
            let template = RuleTemplate::for_relation(&theory.schema, &theory.rules, "grandmotherOf").unwrap();
            let q = PromptQuestion::Template { template: &template, targets: &targets };
            build_prompt(task, theory, q, options, demos.as_ref())
        }
        Task::Deduce | Task::Abduce => {
            let query = if task == Task::Deduce { "boyCousinOf(Tobias, David)" } else { "uncleOf(Gabriel, Lea)" };
            let atom = parse_fact_atom(query).unwrap();
            build_prompt(task, theory, PromptQuestion::Statement(&atom), options, demos.as_ref())
        }
    };
    messages.unwrap().to_text()
}

fn check(name: &str, actual: &str) -> Result<(), String> {
    let expected = golden(name);
    if actual == expected {
        return Ok(());
    }
    let line = actual.lines().zip(expected.lines()).position(|(a, b)| a != b);
    Err(format!("{name}: first differing line {line:?}"))
}

#[test]
fn every_task_regime_and_style() {
    let theory = reference_theory();
    let mut failures = Vec::new();
    for task in [Task::Deduce, Task::Induce, Task::Abduce] {
        for regime in REGIMES {
            for style in STYLES {
                let options = PromptOptions { regime, style, ..Default::default() };
                let name = format!("{}-{}-{}", task.as_str(), regime.as_str(), style.as_str());
                failures.extend(check(&name, &render(&theory, task, options)).err());
            }
        }
    }
    assert!(failures.is_empty(), "{failures:#?}");
}

#[test]
fn zero_shot_deduction_wordings() {
    let theory = reference_theory();
    for (variant, n) in [(ZeroShotVariant::Predict, 2), (ZeroShotVariant::YesNo, 3)] {
        for style in STYLES {
            let options = PromptOptions { regime: Regime::ZeroShot, style, variant, omit_context: false };
            let name = format!("deduce-zero-shot-v{n}-{}", style.as_str());
            check(&name, &render(&theory, Task::Deduce, options)).unwrap();
        }
    }
}
