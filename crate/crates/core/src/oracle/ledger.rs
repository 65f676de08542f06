//! Usage and cost accounting in integer micro-units of currency.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::TaskTag;

/// One micro-unit is 1e-6 of the configured currency.
pub const MICROS_PER_UNIT: u64 = 1_000_000;

/// Pipeline step a ledger entry is reported under.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PipelineStep {
    SchemaMatching,
    Normalization,
    TrainingSetGeneration,
    FusionValidationLlm,
    FusionValidationRag,
}

impl PipelineStep {
    pub const ALL: [PipelineStep; 5] = [
        PipelineStep::SchemaMatching,
        PipelineStep::Normalization,
        PipelineStep::TrainingSetGeneration,
        PipelineStep::FusionValidationLlm,
        PipelineStep::FusionValidationRag,
    ];

    pub fn label(self) -> &'static str {
        match self {
            PipelineStep::SchemaMatching => "Schema Matching",
            PipelineStep::Normalization => "Normalization",
            PipelineStep::TrainingSetGeneration => "Training Set Generation",
            PipelineStep::FusionValidationLlm => "Fusion Validation LLM",
            PipelineStep::FusionValidationRag => "Fusion Validation RAG",
        }
    }

    pub fn of(task: TaskTag, grounded: bool) -> Self {
        match task {
            TaskTag::SchemaMatch => PipelineStep::SchemaMatching,
            TaskTag::TaxonomyMap => PipelineStep::Normalization,
            TaskTag::PairLabel => PipelineStep::TrainingSetGeneration,
            TaskTag::FusionGroundtruth if grounded => PipelineStep::FusionValidationRag,
            TaskTag::FusionSelectEntities | TaskTag::FusionGroundtruth | TaskTag::FusionStrategy => {
                PipelineStep::FusionValidationLlm
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LedgerEntry {
    pub task_tag: TaskTag,
    #[serde(default)]
    pub grounded: bool,
    pub input_units: u64,
    pub output_units: u64,
    pub cost_micro: u64,
}

impl LedgerEntry {
    pub fn step(&self) -> PipelineStep {
        PipelineStep::of(self.task_tag, self.grounded)
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct TaskUsage {
    pub calls: u64,
    pub input_units: u64,
    pub output_units: u64,
    pub cost_micro: u64,
}

impl TaskUsage {
    fn add(&mut self, e: &LedgerEntry) {
        self.calls += 1;
        self.input_units += e.input_units;
        self.output_units += e.output_units;
        self.cost_micro += e.cost_micro;
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct LedgerSummary {
    pub per_task: BTreeMap<TaskTag, TaskUsage>,
    pub per_step: BTreeMap<PipelineStep, TaskUsage>,
    pub total: TaskUsage,
}

impl LedgerSummary {
    pub fn total_micro(&self) -> u64 {
        self.total.cost_micro
    }

    pub fn step_micro(&self, step: PipelineStep) -> u64 {
        self.per_step.get(&step).map(|u| u.cost_micro).unwrap_or(0)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct UsageLedger {
    entries: Vec<LedgerEntry>,
}

impl UsageLedger {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_entries(entries: Vec<LedgerEntry>) -> Self {
        Self { entries }
    }

    pub fn record(&mut self, entry: LedgerEntry) {
        self.entries.push(entry);
    }

    pub fn entries(&self) -> &[LedgerEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn total_micro(&self) -> u64 {
        self.entries.iter().map(|e| e.cost_micro).sum()
    }

    pub fn summary(&self) -> LedgerSummary {
        let mut summary = LedgerSummary::default();
        for e in &self.entries {
            summary.per_task.entry(e.task_tag).or_default().add(e);
            summary.per_step.entry(e.step()).or_default().add(e);
            summary.total.add(e);
        }
        summary
    }
}

/// Per-call price, in micro-units per million input/output units.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Price {
    pub input_per_million_micro: u64,
    pub output_per_million_micro: u64,
}

impl Price {
    /// Cost of one call, rounded half-up to whole micro-units.
    pub fn cost_micro(&self, input_units: u64, output_units: u64) -> u64 {
        let scaled = input_units as u128 * self.input_per_million_micro as u128
            + output_units as u128 * self.output_per_million_micro as u128;
        ((scaled + 500_000) / 1_000_000) as u64
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct PriceTable {
    #[serde(default)]
    pub default: Price,
    #[serde(default)]
    pub embedding: Price,
    /// Overrides keyed by task tag; grounded calls use the `grounded` entry
    /// when present.
    #[serde(default)]
    pub per_task: BTreeMap<TaskTag, Price>,
    #[serde(default)]
    pub grounded: Option<Price>,
}

impl PriceTable {
    pub fn for_task(&self, task: TaskTag, grounded: bool) -> Price {
        if grounded {
            if let Some(p) = self.grounded {
                return p;
            }
        }
        self.per_task.get(&task).copied().unwrap_or(self.default)
    }
}

/// Renders micro-units as a currency amount with cents, e.g. `$9.16`.
pub fn format_currency(micro: u64) -> String {
    let cents = (micro + 5_000) / 10_000;
    format!("${}.{:02}", cents / 100, cents % 100)
}

/// Cost table across use cases: one row per pipeline step, one column per
/// use case, plus row and column totals.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CostTable {
    pub use_cases: Vec<String>,
    pub rows: Vec<CostRow>,
    pub totals: Vec<u64>,
    pub grand_total: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CostRow {
    pub step: PipelineStep,
    pub costs: Vec<u64>,
    pub total: u64,
}

impl CostTable {
    pub fn from_ledgers(ledgers: &[(&str, &UsageLedger)]) -> Self {
        let summaries: Vec<LedgerSummary> = ledgers.iter().map(|(_, l)| l.summary()).collect();
        let rows = PipelineStep::ALL
            .iter()
            .map(|&step| {
                let costs: Vec<u64> = summaries.iter().map(|s| s.step_micro(step)).collect();
                let total = costs.iter().sum();
                CostRow { step, costs, total }
            })
            .collect();
        let totals: Vec<u64> = summaries.iter().map(|s| s.total_micro()).collect();
        let grand_total = totals.iter().sum();
        Self {
            use_cases: ledgers.iter().map(|(n, _)| n.to_string()).collect(),
            rows,
            totals,
            grand_total,
        }
    }

    pub fn render_text(&self) -> String {
        let mut out = String::new();
        let _ = write!(out, "{:<26}", "Pipeline Step");
        for uc in &self.use_cases {
            let _ = write!(out, "{uc:>12}");
        }
        let _ = writeln!(out, "{:>12}", "Total");
        for row in &self.rows {
            let _ = write!(out, "{:<26}", row.step.label());
            for c in &row.costs {
                let _ = write!(out, "{:>12}", format_currency(*c));
            }
            let _ = writeln!(out, "{:>12}", format_currency(row.total));
        }
        let _ = write!(out, "{:<26}", "Total per Use Case");
        for t in &self.totals {
            let _ = write!(out, "{:>12}", format_currency(*t));
        }
        let _ = writeln!(out, "{:>12}", format_currency(self.grand_total));
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn entry(task: TaskTag, cost: u64) -> LedgerEntry {
        LedgerEntry {
            task_tag: task,
            grounded: false,
            input_units: 10,
            output_units: 5,
            cost_micro: cost,
        }
    }

    #[test]
    fn empty_ledger_totals_zero() {
        let ledger = UsageLedger::new();
        assert_eq!(ledger.summary().total_micro(), 0);
        assert!(ledger.summary().per_task.is_empty());
    }

    #[test]
    fn per_task_sums() {
        let mut ledger = UsageLedger::new();
        ledger.record(entry(TaskTag::SchemaMatch, 1));
        ledger.record(entry(TaskTag::TaxonomyMap, 2));
        ledger.record(entry(TaskTag::PairLabel, 3));
        let s = ledger.summary();
        assert_eq!(s.per_task[&TaskTag::SchemaMatch].cost_micro, 1);
        assert_eq!(s.per_task[&TaskTag::TaxonomyMap].cost_micro, 2);
        assert_eq!(s.per_task[&TaskTag::PairLabel].cost_micro, 3);
        assert_eq!(s.total_micro(), 6);
        assert_eq!(s.total.calls, 3);
    }

    #[test]
    fn price_rounds_half_up() {
        let p = Price {
            input_per_million_micro: 1_750_000,
            output_per_million_micro: 14_000_000,
        };
        // 1000 in -> 1750 micro, 100 out -> 1400 micro
        assert_eq!(p.cost_micro(1000, 100), 3150);
        assert_eq!(p.cost_micro(1, 0), 2);
    }

    #[test]
    fn currency_formatting() {
        assert_eq!(format_currency(9_160_000), "$9.16");
        assert_eq!(format_currency(0), "$0.00");
        assert_eq!(format_currency(27_250_000), "$27.25");
    }

    #[test]
    fn grounded_groundtruth_is_its_own_step() {
        assert_eq!(
            PipelineStep::of(TaskTag::FusionGroundtruth, true),
            PipelineStep::FusionValidationRag
        );
        assert_eq!(
            PipelineStep::of(TaskTag::FusionGroundtruth, false),
            PipelineStep::FusionValidationLlm
        );
        assert_eq!(
            PipelineStep::of(TaskTag::FusionSelectEntities, true),
            PipelineStep::FusionValidationLlm
        );
    }
}
