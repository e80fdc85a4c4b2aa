//! Text renderings of facts, rules and rule templates, and the prompt
//! builders for the three reasoning tasks.
//!
//! Logic style prints atoms as `rel(a, b)` and rules as
//! `∀A,B: body ∧ body → head(A,B)`. Natural style goes through a
//! [`Phrasebook`] that maps each relation to an English phrase.

mod demos;
mod prompt;

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::kb::{Atom, Rule, Schema, Term};
use crate::reasoner::{RuleTemplate, GENDER_HOLE, RELATION_HOLE};

pub use demos::{Demo, DemoBank, DEMO_BANK_FORMAT_VERSION};
pub use prompt::{
    after_selection, build_prompt, build_text_prompt, Message, Messages, PromptOptions, PromptQuestion, Regime, Role,
    Task, ZeroShotVariant,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RenderError {
    #[error("no natural-language phrase for relation {0}")]
    MissingTemplate(String),
    #[error("malformed rule {0}: empty body")]
    MalformedRule(String),
    #[error("atom {0} is not ground")]
    NotGround(String),
    #[error("the {0} regime needs at least one demonstration")]
    EmptyDemoBank(Regime),
    #[error("question does not fit the {0} task")]
    TaskMismatch(Task),
    #[error("demo bank line {line}: {reason}")]
    BadDemoBank { line: usize, reason: String },
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RenderStyle {
    #[default]
    Logic,
    Natural,
}

impl RenderStyle {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "logic" => Some(RenderStyle::Logic),
            "natural" => Some(RenderStyle::Natural),
            _ => None,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            RenderStyle::Logic => "logic",
            RenderStyle::Natural => "natural",
        }
    }
}

impl fmt::Display for RenderStyle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// English phrase per relation: `X is <phrase> of Y.` for binary relations,
/// `X is <phrase>.` for unary ones.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Phrasebook {
    pub phrases: BTreeMap<String, String>,
}

impl Phrasebook {
    /// Derives a phrase for every relation of the schema: a trailing `Of` is
    /// dropped (`motherOf` reads "mother"), other names are used as is.
    pub fn for_schema(schema: &Schema) -> Self {
        let phrases = schema.relations().iter().map(|r| (r.name.clone(), default_phrase(&r.name))).collect();
        Phrasebook { phrases }
    }

    pub fn phrase<'a>(&'a self, relation: &'a str) -> Result<&'a str, RenderError> {
        match relation {
            RELATION_HOLE | GENDER_HOLE => Ok(relation),
            _ => self
                .phrases
                .get(relation)
                .map(String::as_str)
                .ok_or_else(|| RenderError::MissingTemplate(relation.to_string())),
        }
    }

    /// Fails on the first schema relation without a phrase.
    pub fn check_total(&self, schema: &Schema) -> Result<(), RenderError> {
        for r in schema.relations() {
            self.phrase(&r.name)?;
        }
        Ok(())
    }
}

fn default_phrase(name: &str) -> String {
    match name.strip_suffix("Of") {
        Some(stem) if !stem.is_empty() => stem.to_string(),
        _ => name.to_string(),
    }
}

/// Renders atoms and rules of one schema in one style.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Renderer {
    style: RenderStyle,
    phrases: Phrasebook,
}

impl Renderer {
    pub fn new(schema: &Schema, style: RenderStyle) -> Self {
        Renderer { style, phrases: Phrasebook::for_schema(schema) }
    }

    /// Uses explicit phrases; natural style requires one per schema relation.
    pub fn with_phrasebook(schema: &Schema, style: RenderStyle, phrases: Phrasebook) -> Result<Self, RenderError> {
        if style == RenderStyle::Natural {
            phrases.check_total(schema)?;
        }
        Ok(Renderer { style, phrases })
    }

    pub fn style(&self) -> RenderStyle {
        self.style
    }

    /// A ground fact or query statement.
    pub fn fact(&self, atom: &Atom) -> Result<String, RenderError> {
        if !atom.is_ground() {
            return Err(RenderError::NotGround(atom.to_string()));
        }
        match self.style {
            RenderStyle::Logic => Ok(atom.to_string()),
            RenderStyle::Natural => Ok(format!("{}.", self.natural_atom(atom, None)?)),
        }
    }

    pub fn rule(&self, rule: &Rule) -> Result<String, RenderError> {
        if rule.body.is_empty() {
            return Err(RenderError::MalformedRule(rule.label.clone()));
        }
        match self.style {
            RenderStyle::Logic => Ok(logic_rule(rule)),
            RenderStyle::Natural => self.natural_rule(rule),
        }
    }

    /// The template with its slots printed as `##` and `++`.
    pub fn template(&self, template: &RuleTemplate) -> Result<String, RenderError> {
        self.rule(&template.skeleton())
    }

    fn natural_atom(&self, atom: &Atom, object: Option<&str>) -> Result<String, RenderError> {
        let phrase = self.phrases.phrase(&atom.relation)?;
        let subject = atom.args.first().map(Term::name).unwrap_or_default();
        Ok(match atom.args.get(1) {
            Some(t) => format!("{} is {} of {}", subject, phrase, object.unwrap_or(t.name())),
            None => format!("{subject} is {phrase}"),
        })
    }

    // The head's object is printed as the first letter the rule does not use
    // ("then A is mother of C" for a rule over A and B), matching the
    // reference natural-language listings.
    fn natural_rule(&self, rule: &Rule) -> Result<String, RenderError> {
        let used: BTreeSet<String> = rule.variables().into_iter().collect();
        let fresh = ('A'..='Z').map(String::from).find(|v| !used.contains(v)).unwrap_or_else(|| "Z".into());
        let body = rule
            .body
            .iter()
            .map(|a| self.natural_atom(a, None))
            .collect::<Result<Vec<_>, _>>()?
            .join(" and ");
        let head = self.natural_atom(&rule.head, Some(&fresh))?;
        Ok(format!("If {body}, then {head}."))
    }
}

fn logic_rule(rule: &Rule) -> String {
    let body: Vec<String> = rule.body.iter().map(ToString::to_string).collect();
    let head_args: Vec<&str> = rule.head.args.iter().map(Term::name).collect();
    format!(
        "∀{}: {} → {}({})",
        rule.variables().join(","),
        body.join(" ∧ "),
        rule.head.relation,
        head_args.join(",")
    )
}

/// [`Renderer::fact`] for a one-off call.
pub fn render_fact(schema: &Schema, atom: &Atom, style: RenderStyle) -> Result<String, RenderError> {
    Renderer::new(schema, style).fact(atom)
}

/// [`Renderer::rule`] for a one-off call.
pub fn render_rule(schema: &Schema, rule: &Rule, style: RenderStyle) -> Result<String, RenderError> {
    Renderer::new(schema, style).rule(rule)
}
