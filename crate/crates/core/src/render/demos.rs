use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::{RenderError, Task};
use crate::transforms::replace_words;

pub const DEMO_BANK_FORMAT_VERSION: u32 = 1;

const MAGIC: &str = "symtree-demo-bank";
const SEPARATOR: &str = "====";

/// One worked example: the query line and the answer text that follows
/// `Answer: `.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Demo {
    pub query: String,
    pub answer: String,
}

/// Few-shot demonstrations for one task.
///
/// Text layout: a `symtree-demo-bank <version>` line, `key: value` headers
/// (`task`, `vocabulary`), then entries each introduced by a `====` line.
/// An entry is `Statement: ...` (or `Template: ...` for induction) followed
/// by `Answer: ...`, which may run over several lines.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DemoBank {
    pub version: u32,
    pub task: Task,
    /// Names the relation vocabulary the demos are written in, e.g.
    /// `id-deduction`, `id-induction` or `semantic`.
    pub vocabulary: String,
    pub demos: Vec<Demo>,
}

fn query_key(task: Task) -> &'static str {
    match task {
        Task::Induce => "Template",
        Task::Deduce | Task::Abduce => "Statement",
    }
}

impl DemoBank {
    /// The banks shipped with the crate.
    pub fn builtin(task: Task) -> DemoBank {
        let text = match task {
            Task::Deduce => include_str!("../../data/demos/deduce.txt"),
            Task::Induce => include_str!("../../data/demos/induce.txt"),
            Task::Abduce => include_str!("../../data/demos/abduce.txt"),
        };
        DemoBank::parse(text).expect("bundled demo bank parses")
    }

    pub fn parse(text: &str) -> Result<DemoBank, RenderError> {
        let bad = |line: usize, reason: &str| RenderError::BadDemoBank { line, reason: reason.to_string() };
        let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l)).peekable();
        let version = match lines.next() {
            Some((_, first)) => first
                .strip_prefix(MAGIC)
                .and_then(|v| v.trim().parse::<u32>().ok())
                .ok_or_else(|| bad(1, "missing header line"))?,
            None => return Err(bad(1, "empty input")),
        };
        if version != DEMO_BANK_FORMAT_VERSION {
            return Err(bad(1, "unsupported version"));
        }
        let (mut task, mut vocabulary) = (None, None);
        while let Some(&(n, line)) = lines.peek() {
            if line == SEPARATOR {
                break;
            }
            lines.next();
            if line.trim().is_empty() {
                continue;
            }
            match line.split_once(": ") {
                Some(("task", v)) => task = Some(Task::parse(v.trim()).ok_or_else(|| bad(n, "unknown task"))?),
                Some(("vocabulary", v)) => vocabulary = Some(v.trim().to_string()),
                _ => return Err(bad(n, "expected `key: value` header")),
            }
        }
        let task = task.ok_or_else(|| bad(1, "missing task header"))?;
        let key = query_key(task);
        let mut demos = Vec::new();
        while let Some((start, _)) = lines.next() {
            let mut body: Vec<&str> = Vec::new();
            while let Some(&(_, line)) = lines.peek() {
                if line == SEPARATOR {
                    break;
                }
                body.push(line);
                lines.next();
            }
            let entry = body.join("\n");
            let entry = entry.trim();
            let rest = entry
                .strip_prefix(key)
                .and_then(|r| r.strip_prefix(": "))
                .ok_or_else(|| bad(start + 1, "entry must start with its query line"))?;
            let (query, answer) =
                rest.split_once("\nAnswer: ").ok_or_else(|| bad(start + 1, "entry has no `Answer: ` line"))?;
            demos.push(Demo { query: query.to_string(), answer: answer.to_string() });
        }
        Ok(DemoBank { version, task, vocabulary: vocabulary.unwrap_or_else(|| "semantic".into()), demos })
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("{MAGIC} {}\ntask: {}\nvocabulary: {}\n", self.version, self.task, self.vocabulary);
        for d in &self.demos {
            out.push_str(SEPARATOR);
            out.push('\n');
            out.push_str(&self.entry(d));
            out.push('\n');
        }
        out
    }

    fn entry(&self, d: &Demo) -> String {
        format!("{}: {}\nAnswer: {}", query_key(self.task), d.query, d.answer)
    }

    /// All entries separated by blank lines, as they appear in a prompt.
    pub fn render(&self) -> String {
        self.demos.iter().map(|d| self.entry(d)).collect::<Vec<_>>().join("\n\n")
    }

    /// Whole-word rewrite of every demo, e.g. from the id vocabulary to the
    /// relation names of an experiment.
    pub fn retarget(&self, vocabulary: &str, mut f: impl FnMut(&str) -> Option<String>) -> DemoBank {
        let demos = self
            .demos
            .iter()
            .map(|d| Demo { query: replace_words(&d.query, &mut f), answer: replace_words(&d.answer, &mut f) })
            .collect();
        DemoBank { vocabulary: vocabulary.to_string(), demos, ..self.clone() }
    }
}
