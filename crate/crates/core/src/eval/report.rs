use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::render::{Regime, RenderStyle, Task};

pub const REPORT_FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Setting {
    Semantics,
    Symbols,
    CounterCommonsense,
    /// Relations keep their names, entities become `e1, e2, ...`.
    EntityIds,
    /// Rules (deduce, abduce) or basic facts (induce) left out of the prompt.
    RemoveRulesFacts,
    AfterSelection,
}

impl Setting {
    pub fn label(self) -> &'static str {
        match self {
            Setting::Semantics => "Semantics",
            Setting::Symbols => "Symbols",
            Setting::CounterCommonsense => "Counter-CS",
            Setting::EntityIds => "Entity IDs",
            Setting::RemoveRulesFacts => "Remove R/F",
            Setting::AfterSelection => "After selection",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Metric {
    Accuracy,
    Precision,
    ProofAccuracy,
    FilteredMrr,
}

impl Metric {
    pub fn for_task(task: Task) -> Metric {
        match task {
            Task::Deduce => Metric::Accuracy,
            Task::Induce => Metric::Precision,
            Task::Abduce => Metric::ProofAccuracy,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Metric::Accuracy => "accuracy",
            Metric::Precision => "precision",
            Metric::ProofAccuracy => "proof-accuracy",
            Metric::FilteredMrr => "filtered-mrr",
        }
    }
}

/// One value; `seed: None` marks the average over the seeds listed in
/// `seeds`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub task: Task,
    pub setting: Setting,
    pub regime: Regime,
    pub style: RenderStyle,
    pub backend: String,
    pub metric: Metric,
    pub seed: Option<u64>,
    pub seeds: Vec<u64>,
    /// Percent, or a reciprocal rank in (0, 1] for `filtered-mrr`.
    pub value: f64,
    pub n: usize,
}

impl ReportRow {
    fn group(&self) -> (Task, Setting, Regime, RenderStyle, &str, Metric) {
        (self.task, self.setting, self.regime, self.style, &self.backend, self.metric)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricReport {
    pub version: u32,
    pub rows: Vec<ReportRow>,
}

impl Default for MetricReport {
    fn default() -> Self {
        MetricReport { version: REPORT_FORMAT_VERSION, rows: Vec::new() }
    }
}

impl MetricReport {
    /// Appends per-seed rows followed by their average row.
    pub fn push_with_average(&mut self, per_seed: Vec<ReportRow>) {
        let Some(first) = per_seed.first().cloned() else { return };
        let seeds: Vec<u64> = per_seed.iter().filter_map(|r| r.seed).collect();
        let mean = per_seed.iter().map(|r| r.value).sum::<f64>() / per_seed.len() as f64;
        let n = per_seed.iter().map(|r| r.n).sum();
        self.rows.extend(per_seed);
        self.rows.push(ReportRow { seed: None, seeds, value: mean, n, ..first });
    }

    pub fn averages(&self) -> impl Iterator<Item = &ReportRow> {
        self.rows.iter().filter(|r| r.seed.is_none())
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("task,setting,regime,style,backend,metric,seed,value,n\n");
        for r in &self.rows {
            let seed = r.seed.map_or_else(|| "avg".to_string(), |s| s.to_string());
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{},{},{}",
                r.task,
                r.setting.label(),
                r.regime,
                r.style,
                r.backend,
                r.metric.as_str(),
                seed,
                r.value,
                r.n
            );
        }
        out
    }

    /// A summary table (one column per task, averages) followed by a
    /// per-seed table.
    pub fn to_markdown(&self) -> String {
        let mut out = String::new();
        let tasks: BTreeSet<Task> = self.rows.iter().map(|r| r.task).collect();
        let _ = write!(out, "| Backend | Setting | Regime | Style |");
        for t in &tasks {
            let _ = write!(out, " {} ({}) |", t, Metric::for_task(*t).as_str());
        }
        out.push_str("\n|---|---|---|---|");
        for _ in &tasks {
            out.push_str("---:|");
        }
        out.push('\n');
        let mut summary: BTreeMap<(&str, Setting, Regime, RenderStyle), BTreeMap<Task, f64>> = BTreeMap::new();
        for r in self.averages() {
            summary.entry((&r.backend, r.setting, r.regime, r.style)).or_default().insert(r.task, r.value);
        }
        for ((backend, setting, regime, style), values) in &summary {
            let _ = write!(out, "| {} | {} | {} | {} |", backend, setting.label(), regime, style);
            for t in &tasks {
                match values.get(t) {
                    Some(v) => {
                        let _ = write!(out, " {v:.1} |");
                    }
                    None => out.push_str(" - |"),
                }
            }
            out.push('\n');
        }
        let max_seeds = self.averages().map(|r| r.seeds.len()).max().unwrap_or(0);
        if max_seeds > 0 {
            out.push_str("\n| Task | Backend | Setting | Regime | Style |");
            for i in 1..=max_seeds {
                let _ = write!(out, " S{i} |");
            }
            out.push_str(" Avg |\n|---|---|---|---|---|");
            for _ in 0..=max_seeds {
                out.push_str("---:|");
            }
            out.push('\n');
            for avg in self.averages() {
                let _ = write!(
                    out,
                    "| {} | {} | {} | {} | {} |",
                    avg.task,
                    avg.backend,
                    avg.setting.label(),
                    avg.regime,
                    avg.style
                );
                let per: Vec<&ReportRow> =
                    self.rows.iter().filter(|r| r.seed.is_some() && r.group() == avg.group()).collect();
                for i in 0..max_seeds {
                    match per.get(i) {
                        Some(r) => {
                            let _ = write!(out, " {:.1} |", r.value);
                        }
                        None => out.push_str(" - |"),
                    }
                }
                let _ = writeln!(out, " {:.1} |", avg.value);
            }
        }
        out
    }
}

/// Formats a seed list as `1-10` when contiguous.
pub fn seed_span(seeds: &[u64]) -> String {
    match (seeds.first(), seeds.last()) {
        (Some(a), Some(b)) if seeds.windows(2).all(|w| w[1] == w[0] + 1) && seeds.len() > 1 => format!("{a}-{b}"),
        _ => seeds.iter().map(u64::to_string).collect::<Vec<_>>().join(","),
    }
}
