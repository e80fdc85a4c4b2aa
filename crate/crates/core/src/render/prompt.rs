use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use serde::{Deserialize, Serialize};

use super::{DemoBank, RenderError, RenderStyle, Renderer};
use crate::kb::{Atom, Theory};
use crate::reasoner::{Proof, RuleTemplate};

const COT: &str = "Let's think step by step.";

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Task {
    Deduce,
    Induce,
    Abduce,
}

impl Task {
    pub const ALL: [Task; 3] = [Task::Deduce, Task::Induce, Task::Abduce];

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "deduce" | "deduction" => Some(Task::Deduce),
            "induce" | "induction" => Some(Task::Induce),
            "abduce" | "abduction" => Some(Task::Abduce),
            _ => None,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Task::Deduce => "deduce",
            Task::Induce => "induce",
            Task::Abduce => "abduce",
        }
    }
}

impl fmt::Display for Task {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Regime {
    #[default]
    ZeroShot,
    ZeroShotCot,
    FewShotCot,
    ZeroPlusFewShotCot,
}

impl Regime {
    pub const ALL: [Regime; 4] = [Regime::ZeroShot, Regime::ZeroShotCot, Regime::FewShotCot, Regime::ZeroPlusFewShotCot];

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "zero-shot" => Some(Regime::ZeroShot),
            "zero-shot-cot" => Some(Regime::ZeroShotCot),
            "few-shot-cot" => Some(Regime::FewShotCot),
            "zero-plus-few-shot-cot" => Some(Regime::ZeroPlusFewShotCot),
            _ => None,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Regime::ZeroShot => "zero-shot",
            Regime::ZeroShotCot => "zero-shot-cot",
            Regime::FewShotCot => "few-shot-cot",
            Regime::ZeroPlusFewShotCot => "zero-plus-few-shot-cot",
        }
    }

    pub fn uses_demos(self) -> bool {
        matches!(self, Regime::FewShotCot | Regime::ZeroPlusFewShotCot)
    }
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Wording of the zero-shot deduction prompt. `Select` is the default; the
/// other two drop the rule/fact selection instruction.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ZeroShotVariant {
    #[default]
    Select,
    Predict,
    YesNo,
}

impl ZeroShotVariant {
    pub const ALL: [ZeroShotVariant; 3] = [ZeroShotVariant::Select, ZeroShotVariant::Predict, ZeroShotVariant::YesNo];

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "1" | "select" => Some(ZeroShotVariant::Select),
            "2" | "predict" => Some(ZeroShotVariant::Predict),
            "3" | "yes-no" => Some(ZeroShotVariant::YesNo),
            _ => None,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            ZeroShotVariant::Select => "select",
            ZeroShotVariant::Predict => "predict",
            ZeroShotVariant::YesNo => "yes-no",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Role {
    System,
    User,
}

impl Role {
    pub fn as_str(self) -> &'static str {
        match self {
            Role::System => "system",
            Role::User => "user",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Message {
    pub role: Role,
    pub content: String,
}

/// A system message followed by one user message.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Messages(Vec<Message>);

impl Messages {
    pub fn new(system: impl Into<String>, user: impl Into<String>) -> Self {
        Messages(alloc::vec![
            Message { role: Role::System, content: system.into() },
            Message { role: Role::User, content: user.into() },
        ])
    }

    pub fn as_slice(&self) -> &[Message] {
        &self.0
    }

    pub fn system(&self) -> &str {
        &self.0[0].content
    }

    pub fn user(&self) -> &str {
        &self.0[1].content
    }

    /// `system: ...` then `user: ...`, newline-terminated; the golden-file layout.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for m in &self.0 {
            out.push_str(m.role.as_str());
            out.push_str(": ");
            out.push_str(&m.content);
            out.push('\n');
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PromptQuestion<'a> {
    /// A ground atom to classify (deduce) or explain (abduce).
    Statement(&'a Atom),
    /// A rule template plus the facts G1.. the filled rule must entail.
    Template { template: &'a RuleTemplate, targets: &'a [Atom] },
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PromptOptions {
    pub regime: Regime,
    pub style: RenderStyle,
    #[serde(default)]
    pub variant: ZeroShotVariant,
    /// Leave out the rule listing (deduce, abduce) or the basic facts
    /// (induce), so the model has to rely on what it already knows.
    #[serde(default)]
    pub omit_context: bool,
}

fn numbered(items: impl IntoIterator<Item = (String, String)>) -> String {
    let lines: Vec<String> = items.into_iter().map(|(l, t)| format!("{l}: {t}")).collect();
    lines.join("\n")
}

fn listings(theory: &Theory, r: &Renderer) -> Result<(String, String), RenderError> {
    let rules = theory
        .rules
        .iter()
        .map(|rule| Ok((rule.label.clone(), r.rule(rule)?)))
        .collect::<Result<Vec<_>, RenderError>>()?;
    let facts = theory
        .facts
        .iter()
        .map(|f| Ok((f.label.clone(), r.fact(&f.atom)?)))
        .collect::<Result<Vec<_>, RenderError>>()?;
    Ok((numbered(rules), numbered(facts)))
}

fn demos_for(task: Task, regime: Regime, demos: Option<&DemoBank>) -> Result<String, RenderError> {
    let bank = demos.filter(|b| !b.demos.is_empty()).ok_or(RenderError::EmptyDemoBank(regime))?;
    if bank.task != task {
        return Err(RenderError::TaskMismatch(task));
    }
    Ok(bank.render())
}

fn answer_cue(regime: Regime) -> String {
    match regime {
        Regime::ZeroPlusFewShotCot => format!("Answer: {COT}"),
        _ => "Answer:".to_string(),
    }
}

/// Assembles the chat messages for one question.
pub fn build_prompt(
    task: Task,
    theory: &Theory,
    question: PromptQuestion<'_>,
    options: PromptOptions,
    demos: Option<&DemoBank>,
) -> Result<Messages, RenderError> {
    let r = Renderer::new(&theory.schema, options.style);
    match (task, question) {
        (Task::Deduce, PromptQuestion::Statement(atom)) => deduce(theory, &r, atom, options, demos),
        (Task::Abduce, PromptQuestion::Statement(atom)) => abduce(theory, &r, atom, options, demos),
        (Task::Induce, PromptQuestion::Template { template, targets }) => {
            induce(theory, &r, template, targets, options, demos)
        }
        _ => Err(RenderError::TaskMismatch(task)),
    }
}

fn deduce(
    theory: &Theory,
    r: &Renderer,
    atom: &Atom,
    options: PromptOptions,
    demos: Option<&DemoBank>,
) -> Result<Messages, RenderError> {
    let (rules, facts) = listings(theory, r)?;
    let rules = if options.omit_context { String::new() } else { format!("\nLogical rules:\n{rules}") };
    let some_rules = rules.replacen("Logical rules:", "Here are some rules:", 1);
    let statement = r.fact(atom)?;
    let (nr, nf) = (theory.rules.len(), theory.facts.len());
    let intro = format!("I will provide a set of logical rules L1 to L{nr} and facts F1 to F{nf}.");
    let select = format!("Please select one single logical rule from L1 to L{nr} and a few facts from F1 to F{nf}");
    let system = "You are a helpful assistant with deductive reasoning abilities.";
    let system_cot = format!(
        "{system} Please select one single logical rule and a few facts to predict True/False of the following statement."
    );
    Ok(match options.regime {
        Regime::ZeroShot => {
            let user = match options.variant {
                ZeroShotVariant::Select => format!(
                    "{intro} {select} to predict True/False of the unknown fact using deductive reasoning.{rules}\nFacts:\n{facts}\nUnknown fact: {statement}\nThe answer (True or False) is:"
                ),
                ZeroShotVariant::Predict => format!(
                    "{intro} Please predict True/False of the unknown fact using deductive reasoning.{rules}\nFacts:\n{facts}\nUnknown fact: {statement}\nThe answer (True or False) is:"
                ),
                ZeroShotVariant::YesNo => format!(
                    "Given a set of rules and facts, you have to reason whether a statement is True or False.{some_rules}\nHere are some facts:\n{facts}\nDoes it imply that the statement \"{statement}\" is True?\nThe answer (YES or NO) is:"
                ),
            };
            Messages::new(system, user)
        }
        Regime::ZeroShotCot => Messages::new(
            system_cot,
            format!(
                "{intro} {select} to predict True/False of the following statement using deductive reasoning.{rules}\nFacts:\n{facts}\nStatement: {statement}\nAnswer with True or False? {COT}"
            ),
        ),
        Regime::FewShotCot | Regime::ZeroPlusFewShotCot => {
            let demos = demos_for(Task::Deduce, options.regime, demos)?;
            Messages::new(
                system_cot,
                format!(
                    "{intro}{rules}\nFacts:\n{facts}\n{select} to predict True/False of the following statement using deductive reasoning.\n{demos}\nStatement: {statement}\n{}",
                    answer_cue(options.regime)
                ),
            )
        }
    })
}

fn abduce(
    theory: &Theory,
    r: &Renderer,
    atom: &Atom,
    options: PromptOptions,
    demos: Option<&DemoBank>,
) -> Result<Messages, RenderError> {
    let regime = options.regime;
    let (rules, facts) = listings(theory, r)?;
    let rules = if options.omit_context { String::new() } else { format!("\nRules:\n{rules}") };
    let statement = r.fact(atom)?;
    let (nr, nf) = (theory.rules.len(), theory.facts.len());
    let system = "You are a helpful assistant with abductive reasoning abilities. Please select one single logical rule and a few facts to explain the following statement.";
    let head = format!(
        "I will provide a set of logical rules L1 to L{nr} and facts F1 to F{nf}. Please select one single logical rule from L1 to L{nr} and a few facts from F1 to F{nf} to explain the following statement.{rules}\nFacts:\n{facts}"
    );
    let ask = "Answer with the numbers of the selected rule and facts. The selected rule and facts are:";
    let user = match regime {
        Regime::ZeroShot => format!("{head}\nStatement: {statement}\n{ask}"),
        Regime::ZeroShotCot => format!("{head}\nStatement: {statement}\n{ask} {COT}"),
        Regime::FewShotCot | Regime::ZeroPlusFewShotCot => {
            let demos = demos_for(Task::Abduce, regime, demos)?;
            format!("{head}\n{demos}\nStatement: {statement}\n{}", answer_cue(regime))
        }
    };
    Ok(Messages::new(system, user))
}

fn induce(
    theory: &Theory,
    r: &Renderer,
    template: &RuleTemplate,
    targets: &[Atom],
    options: PromptOptions,
    demos: Option<&DemoBank>,
) -> Result<Messages, RenderError> {
    let regime = options.regime;
    let (_, facts) = listings(theory, r)?;
    let facts = if options.omit_context { String::new() } else { format!("\n{facts}") };
    let goals = targets
        .iter()
        .enumerate()
        .map(|(i, a)| Ok((format!("G{}", i + 1), r.fact(a)?)))
        .collect::<Result<Vec<_>, RenderError>>()?;
    let goals = numbered(goals);
    let shape = r.template(template)?;
    let (nf, ng) = (theory.facts.len(), targets.len());
    let [parent, inverse] = &template.relation_choices;
    let [female, male] = &template.gender_choices;
    let note = format!(
        "Note that the symbol '##' in the template should be filled with either '{parent}' or '{inverse}', while the symbol '++' should be filled with either '{male}' or '{female}'."
    );
    let system = format!(
        "You are a helpful assistant with inductive reasoning abilities. Please generate one single rule to match the template and logically entail the facts. {note}"
    );
    let head = format!(
        "I will give you a set of facts F1 to F{nf}, facts G1 to G{ng} and a template for a logical rule. Please generate one single rule to match the template and logically entail the facts G1 to G{ng} based on facts F1 to F{nf}.\nFacts:{facts}\n{goals}"
    );
    let ask = "After filling in the template, the generated rule is:";
    let user = match regime {
        Regime::ZeroShot => format!("{head}\nTemplate: {shape}\n{note}\n{ask}"),
        Regime::ZeroShotCot => format!("{head}\nTemplate: {shape}\n{note}\n{ask} {COT}"),
        Regime::FewShotCot | Regime::ZeroPlusFewShotCot => {
            let demos = demos_for(Task::Induce, regime, demos)?;
            let cue = if regime == Regime::ZeroPlusFewShotCot { format!("{ask} {COT}") } else { ask.to_string() };
            format!("{head}\n{note}\n{demos}\nTemplate: {shape}\n{cue}")
        }
    };
    Ok(Messages::new(system, user))
}

/// Prompt for a natural-language rulebase (ProofWriter): the sentences, then
/// the question. Few-shot regimes need a deduction demo bank.
pub fn build_text_prompt(
    sentences: &[String],
    statement: &str,
    regime: Regime,
    demos: Option<&DemoBank>,
) -> Result<Messages, RenderError> {
    let system = "You are a helpful assistant with deductive reasoning abilities.";
    let context = sentences.join("\n");
    let ask = format!("Does it imply that the statement \"{statement}\" is True?");
    let user = match regime {
        Regime::ZeroShot => format!("{context}\n{ask}\nThe answer (True or False) is:"),
        Regime::ZeroShotCot => format!("{context}\n{ask}\nAnswer with True or False? {COT}"),
        Regime::FewShotCot | Regime::ZeroPlusFewShotCot => {
            let demos = demos_for(Task::Deduce, regime, demos)?;
            format!("{demos}\n{context}\n{ask}\n{}", answer_cue(regime))
        }
    };
    Ok(Messages::new(system, user))
}

/// Keeps only the facts used by some gold proof, relabeled F1.. in theory
/// order, and rewrites the proofs to the new labels. Rules are untouched.
pub fn after_selection(theory: &Theory, proofs: &[Proof]) -> (Theory, Vec<Proof>) {
    let keep: BTreeSet<String> = proofs.iter().flat_map(|p| p.fact_labels.iter().cloned()).collect();
    let (selected, relabel): (Theory, BTreeMap<String, String>) = theory.select_facts(&keep);
    let proofs = proofs
        .iter()
        .map(|p| Proof {
            fact_labels: p.fact_labels.iter().filter_map(|l| relabel.get(l).cloned()).collect(),
            ..p.clone()
        })
        .collect();
    (selected, proofs)
}
