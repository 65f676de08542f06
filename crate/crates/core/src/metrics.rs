//! End-to-end integration metrics and report rendering.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::datamodel::{density, Dataset, TargetSchema};
use crate::oracle::{LedgerSummary, UsageLedger};

/// Rounds half away from zero at `decimals` places. A small epsilon absorbs
/// binary representation error so that e.g. 0.8935 rounds to 0.894.
pub fn round_half_up(x: f64, decimals: u32) -> f64 {
    let factor = 10f64.powi(decimals as i32);
    let scaled = x * factor;
    let eps = 1e-9 * scaled.abs().max(1.0);
    (scaled.abs() + 0.5 + eps).floor().copysign(scaled) / factor
}

/// Unweighted mean; 0 for an empty slice.
pub fn macro_average(values: &[f64]) -> f64 {
    if values.is_empty() {
        return 0.0;
    }
    values.iter().sum::<f64>() / values.len() as f64
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DensityWeighting {
    #[default]
    Unweighted,
    RowWeighted,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InputSummary {
    pub name: String,
    pub records: usize,
    pub density: Option<f64>,
}

/// Counts a report is computed from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportInputs {
    pub inputs: Vec<InputSummary>,
    pub output_records: usize,
    pub fused_groups: usize,
    pub output_density: Option<f64>,
    #[serde(default)]
    pub cluster_sizes: BTreeMap<usize, usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntegrationReport {
    pub data_sources: usize,
    pub inputs: Vec<InputSummary>,
    pub total_input_records: usize,
    pub largest_input: usize,
    pub output_records: usize,
    pub fused_groups: usize,
    pub fusion_ratio: Option<f64>,
    pub row_gain_abs: Option<i64>,
    pub row_gain_pct: Option<f64>,
    pub avg_input_density: Option<f64>,
    pub output_density: Option<f64>,
    pub density_change_pp: Option<f64>,
    /// Cluster size → number of clusters.
    pub cluster_sizes: BTreeMap<usize, usize>,
    pub oracle_usage: Option<LedgerSummary>,
}

pub fn compute_report_from_counts(inputs: &ReportInputs, weighting: DensityWeighting) -> IntegrationReport {
    let total: usize = inputs.inputs.iter().map(|i| i.records).sum();
    let largest = inputs.inputs.iter().map(|i| i.records).max().unwrap_or(0);
    let output = inputs.output_records;
    let row_gain_abs = (largest > 0).then(|| output as i64 - largest as i64);
    let row_gain_pct = row_gain_abs.map(|g| g as f64 / largest as f64);
    let fusion_ratio = (output > 0).then(|| inputs.fused_groups as f64 / output as f64);
    let densities: Option<Vec<(f64, usize)>> = inputs
        .inputs
        .iter()
        .map(|i| i.density.map(|d| (d, i.records)))
        .collect();
    let avg_input_density = densities.filter(|d| !d.is_empty()).and_then(|d| match weighting {
        DensityWeighting::Unweighted => Some(d.iter().map(|(x, _)| x).sum::<f64>() / d.len() as f64),
        DensityWeighting::RowWeighted => {
            let rows: usize = d.iter().map(|(_, r)| r).sum();
            (rows > 0).then(|| d.iter().map(|(x, r)| x * *r as f64).sum::<f64>() / rows as f64)
        }
    });
    let density_change_pp = match (avg_input_density, inputs.output_density) {
        (Some(a), Some(o)) => Some((o - a) * 100.0),
        _ => None,
    };
    IntegrationReport {
        data_sources: inputs.inputs.len(),
        inputs: inputs.inputs.clone(),
        total_input_records: total,
        largest_input: largest,
        output_records: output,
        fused_groups: inputs.fused_groups,
        fusion_ratio,
        row_gain_abs,
        row_gain_pct,
        avg_input_density,
        output_density: inputs.output_density,
        density_change_pp,
        cluster_sizes: inputs.cluster_sizes.clone(),
        oracle_usage: None,
    }
}

/// Report over the schema-mapped inputs, the cluster sizes and the fused
/// output. Densities use the target attributes other than the id.
pub fn compute_report(
    inputs: &[Dataset],
    cluster_sizes: &[usize],
    fused: &Dataset,
    target: &TargetSchema,
    ledger: Option<&UsageLedger>,
    weighting: DensityWeighting,
) -> IntegrationReport {
    let attrs: Vec<String> = target.value_attributes().map(|a| a.name.clone()).collect();
    let mut histogram = BTreeMap::new();
    for &s in cluster_sizes {
        *histogram.entry(s).or_insert(0) += 1;
    }
    let counts = ReportInputs {
        inputs: inputs
            .iter()
            .map(|d| InputSummary {
                name: d.name().to_string(),
                records: d.len(),
                density: (!d.is_empty()).then(|| density(d, &attrs)),
            })
            .collect(),
        output_records: fused.len(),
        fused_groups: cluster_sizes.iter().filter(|s| **s >= 2).count(),
        output_density: (!fused.is_empty()).then(|| density(fused, &attrs)),
        cluster_sizes: histogram,
    };
    let mut report = compute_report_from_counts(&counts, weighting);
    report.oracle_usage = ledger.map(UsageLedger::summary);
    report
}

/// `74951` → `74,951`.
pub fn thousands(n: i64) -> String {
    let digits = n.unsigned_abs().to_string();
    let mut out = String::new();
    for (i, ch) in digits.chars().enumerate() {
        if i > 0 && (digits.len() - i).is_multiple_of(3) {
            out.push(',');
        }
        out.push(ch);
    }
    if n < 0 {
        format!("-{out}")
    } else {
        out
    }
}

fn signed(x: f64, decimals: u32) -> String {
    let r = round_half_up(x, decimals);
    let body = format!("{:.*}", decimals as usize, r.abs());
    if r < 0.0 {
        format!("-{body}")
    } else {
        format!("+{body}")
    }
}

pub fn format_percent(ratio: Option<f64>) -> String {
    ratio
        .map(|r| format!("{:.1}%", round_half_up(r * 100.0, 1)))
        .unwrap_or_else(|| "n/a".into())
}

impl IntegrationReport {
    /// One row per metric, in the order of the end-to-end table.
    pub fn rows(&self) -> Vec<(&'static str, String)> {
        vec![
            ("Data Sources", self.data_sources.to_string()),
            ("Total Input Records", thousands(self.total_input_records as i64)),
            ("Fused Record Groups", thousands(self.fused_groups as i64)),
            ("Output Records", thousands(self.output_records as i64)),
            ("Fusion Ratio", format_percent(self.fusion_ratio)),
            (
                "Row Gain vs. Largest",
                self.row_gain_abs
                    .map(|g| {
                        if g >= 0 {
                            format!("+{}", thousands(g))
                        } else {
                            thousands(g)
                        }
                    })
                    .unwrap_or_else(|| "n/a".into()),
            ),
            (
                "Row Gain %",
                self.row_gain_pct
                    .map(|p| format!("{}%", signed(p * 100.0, 1)))
                    .unwrap_or_else(|| "n/a".into()),
            ),
            ("Avg. Input Density", format_percent(self.avg_input_density)),
            ("Output Density", format_percent(self.output_density)),
            (
                "Density Change",
                self.density_change_pp
                    .map(|d| format!("{}pp", signed(d, 1)))
                    .unwrap_or_else(|| "n/a".into()),
            ),
        ]
    }

    pub fn render_text(&self) -> String {
        let mut out = String::new();
        for (label, value) in self.rows() {
            let _ = writeln!(out, "{label:<24}{value:>12}");
        }
        if !self.cluster_sizes.is_empty() {
            let _ = writeln!(out, "\nCluster sizes");
            for (size, count) in &self.cluster_sizes {
                let _ = writeln!(out, "{size:<24}{:>12}", thousands(*count as i64));
            }
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ReportFormat {
    TextTable,
    StructuredDocument,
}

impl std::str::FromStr for ReportFormat {
    type Err = MetricsError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "text-table" | "text" => Ok(ReportFormat::TextTable),
            "structured-document" | "json" => Ok(ReportFormat::StructuredDocument),
            other => Err(MetricsError::UnknownFormat(other.to_string())),
        }
    }
}

#[derive(Debug, Error)]
pub enum MetricsError {
    #[error("unknown report format `{0}`")]
    UnknownFormat(String),
}

pub fn render_report(report: &IntegrationReport, format: ReportFormat) -> Vec<u8> {
    match format {
        ReportFormat::TextTable => report.render_text().into_bytes(),
        ReportFormat::StructuredDocument => {
            let mut s = serde_json::to_string_pretty(report).expect("report serializes");
            s.push('\n');
            s.into_bytes()
        }
    }
}

/// Wall-clock seconds per pipeline step, split into configuration-artifact
/// generation and data processing.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Timings {
    pub steps: BTreeMap<String, StepTiming>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct StepTiming {
    pub configuration_secs: f64,
    pub execution_secs: f64,
}

impl Timings {
    pub fn record(&mut self, step: &str, configuration_secs: f64, execution_secs: f64) {
        let t = self.steps.entry(step.to_string()).or_default();
        t.configuration_secs += configuration_secs;
        t.execution_secs += execution_secs;
    }

    pub fn totals(&self) -> StepTiming {
        let mut total = StepTiming::default();
        for t in self.steps.values() {
            total.configuration_secs += t.configuration_secs;
            total.execution_secs += t.execution_secs;
        }
        total
    }
}
