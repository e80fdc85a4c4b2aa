use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use symtree_core::eval::Setting;
use symtree_core::render::{DemoBank, PromptOptions, Task};
use symtree_core::transforms::{MapOptions, Mode};

use super::HarnessError;
use crate::gateway::{CachePolicy, GenerationSettings, RetryPolicy};

pub const EXPERIMENT_FORMAT_VERSION: u32 = 1;

/// One experiment: a data source, an optional renaming, a task, a prompt
/// setup and a backend. Relative paths resolve against the config file's
/// directory.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub version: u32,
    #[serde(default)]
    pub name: String,
    pub source: SourceConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub transform: Option<TransformConfig>,
    pub task: Task,
    #[serde(default)]
    pub prompt: PromptOptions,
    /// Show only the facts some gold proof uses (deduce, abduce).
    #[serde(default)]
    pub after_selection: bool,
    pub backend: BackendConfig,
    #[serde(default)]
    pub demos: DemoSource,
    /// Per-problem cap, sampled with `sample_seed`; `None` keeps all.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_questions: Option<usize>,
    #[serde(default)]
    pub sample_seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum SourceConfig {
    Treegen {
        seeds: Vec<u64>,
        #[serde(default = "default_entities")]
        entities: usize,
        #[serde(default = "default_depth")]
        depth: usize,
    },
    Proofwriter {
        path: PathBuf,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        limit: Option<usize>,
        /// Replace entity words with `e1, e2, ...` per record.
        #[serde(default)]
        depersonalize: bool,
    },
}

fn default_entities() -> usize {
    26
}

fn default_depth() -> usize {
    5
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TransformConfig {
    pub mode: Mode,
    /// Added to each tree's seed to seed that tree's map.
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub options: MapOptions,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum BackendConfig {
    /// The exact reasoners answer every question.
    Solver,
    /// Seeded coin flips (deduce) or random selections and fillings.
    Random { seed: u64 },
    Gateway {
        #[serde(default)]
        settings: GenerationSettings,
        #[serde(default)]
        policy: CachePolicy,
        transcripts: PathBuf,
        #[serde(default = "default_parallelism")]
        parallelism: usize,
        #[serde(default)]
        min_interval_ms: u64,
        #[serde(default = "default_timeout")]
        timeout_secs: u64,
        #[serde(default)]
        retry: RetryPolicy,
    },
}

fn default_parallelism() -> usize {
    4
}

fn default_timeout() -> u64 {
    120
}

impl BackendConfig {
    pub fn label(&self) -> String {
        match self {
            BackendConfig::Solver => "solver".into(),
            BackendConfig::Random { .. } => "random".into(),
            BackendConfig::Gateway { settings, .. } => settings.model.clone(),
        }
    }
}

/// Where few-shot demonstrations come from.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum DemoSource {
    /// The bundled banks, rewritten into the experiment's vocabulary.
    #[default]
    Builtin,
    File { path: PathBuf },
    /// Zero-shot chain-of-thought answers from the backend on `count`
    /// sampled questions of each problem (deduce only).
    Generated { count: usize, seed: u64 },
}

impl ExperimentConfig {
    pub fn setting(&self) -> Setting {
        if self.after_selection {
            return Setting::AfterSelection;
        }
        if self.prompt.omit_context {
            return Setting::RemoveRulesFacts;
        }
        match (&self.source, self.transform.as_ref().map(|t| t.mode)) {
            (SourceConfig::Proofwriter { depersonalize: true, .. }, _) => Setting::Symbols,
            (_, None | Some(Mode::Identity)) => Setting::Semantics,
            (_, Some(Mode::CounterCommonsense)) => Setting::CounterCommonsense,
            (_, Some(Mode::EntityIds)) => Setting::EntityIds,
            (_, Some(_)) => Setting::Symbols,
        }
    }

    /// Rewrites relative paths against `base`.
    pub fn resolve_paths(&mut self, base: &Path) {
        let fix = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        if let SourceConfig::Proofwriter { path, .. } = &mut self.source {
            fix(path);
        }
        if let BackendConfig::Gateway { transcripts, .. } = &mut self.backend {
            fix(transcripts);
        }
        if let DemoSource::File { path } = &mut self.demos {
            fix(path);
        }
    }

    /// Checks everything that can be checked before a request is sent.
    pub fn validate(&self) -> Result<(), HarnessError> {
        let bad = |m: String| Err(HarnessError::Config(m));
        if self.version != EXPERIMENT_FORMAT_VERSION {
            return bad(format!("config version {} is not supported", self.version));
        }
        match &self.source {
            SourceConfig::Treegen { seeds, entities, depth } => {
                if seeds.is_empty() {
                    return bad("treegen source needs at least one seed".into());
                }
                if *entities == 0 || *depth == 0 {
                    return bad("entities and depth must be positive".into());
                }
            }
            SourceConfig::Proofwriter { path, .. } => {
                if !path.is_file() {
                    return bad(format!("proofwriter shard {} not found", path.display()));
                }
                if self.task != Task::Deduce {
                    return bad("proofwriter records only support the deduce task".into());
                }
                if self.transform.is_some() || self.after_selection || self.prompt.omit_context {
                    return bad("proofwriter records take no transform, selection or omitted context".into());
                }
                if matches!(self.backend, BackendConfig::Solver) {
                    return bad("the solver backend needs a logical theory, not text".into());
                }
                if self.prompt.regime.uses_demos() && matches!(self.demos, DemoSource::Builtin) {
                    return bad("few-shot prompts over proofwriter need a demo file or generated demos".into());
                }
            }
        }
        if self.after_selection && self.task == Task::Induce {
            return bad("after-selection applies to deduce and abduce only".into());
        }
        if self.after_selection && self.prompt.omit_context {
            return bad("after-selection and omitted context are exclusive".into());
        }
        match &self.demos {
            DemoSource::Builtin => {}
            DemoSource::File { path } => {
                let text = std::fs::read_to_string(path)
                    .map_err(|e| HarnessError::Config(format!("demo bank {}: {e}", path.display())))?;
                let bank = DemoBank::parse(&text)
                    .map_err(|e| HarnessError::Config(format!("demo bank {}: {e}", path.display())))?;
                if bank.task != self.task {
                    return bad(format!("demo bank {} is for {}, not {}", path.display(), bank.task, self.task));
                }
            }
            DemoSource::Generated { count, .. } => {
                if self.task != Task::Deduce {
                    return bad("generated demos are only supported for deduce".into());
                }
                if *count == 0 {
                    return bad("generated demo count must be positive".into());
                }
                if !matches!(self.backend, BackendConfig::Gateway { .. }) {
                    return bad("generated demos need the gateway backend".into());
                }
            }
        }
        if let BackendConfig::Gateway { policy: CachePolicy::Replay, transcripts, .. } = &self.backend {
            if !transcripts.is_dir() {
                return bad(format!("replay needs the transcript store {}", transcripts.display()));
            }
        }
        if self.max_questions == Some(0) {
            return bad("max_questions must be positive".into());
        }
        Ok(())
    }
}
