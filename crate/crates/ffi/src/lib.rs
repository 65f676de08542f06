//! C ABI over the integration pipeline.
//!
//! Every fallible function returns an [`AutodiStatus`]; on failure the
//! message is available from [`autodi_last_error`] on the same thread.
//! Objects are opaque handles released with their `_free` function. Strings
//! returned through `char **` out-parameters are owned by the caller and
//! released with [`autodi_string_free`].

#![allow(clippy::missing_safety_doc)]

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::ptr;

use autodi::config::RunConfig;
use autodi::datamodel::{load_dataset, profile_dataset, Dataset, IdSpec, LoadOptions};
use autodi::metrics::{compute_report_from_counts, DensityWeighting, InputSummary, ReportInputs};
use autodi::oracle::ledger::format_currency;
use autodi::oracle::{LedgerEntry, UsageLedger};
use autodi::pipeline::{Pipeline, PipelineError, Step};
use autodi::similarity::{string_similarity, StringMetric};

/// Result code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AutodiStatus {
    Ok = 0,
    NullArgument = 1,
    InvalidUtf8 = 2,
    InvalidArgument = 3,
    Io = 4,
    Config = 5,
    MissingPrerequisite = 6,
    BudgetExhausted = 7,
    Pipeline = 8,
    Panic = 9,
}

/// A run configuration bound to its output directory.
pub struct AutodiPipeline {
    inner: Pipeline,
}

/// A delimited source file loaded into memory.
pub struct AutodiDataset {
    inner: Dataset,
}

/// Oracle usage entries read from a ledger file.
pub struct AutodiLedger {
    inner: UsageLedger,
}

/// Integration metrics computed from counts. Ratios are fractions; fields
/// that are undefined for the inputs are NaN.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AutodiReportMetrics {
    pub total_input_records: u64,
    pub largest_input: u64,
    pub fusion_ratio: f64,
    pub row_gain_abs: i64,
    pub row_gain_pct: f64,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(message: impl Into<String>) {
    let message = message.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(message).ok());
}

struct Failure(AutodiStatus, String);

impl Failure {
    fn new(status: AutodiStatus, message: impl Into<String>) -> Self {
        Self(status, message.into())
    }
}

impl From<PipelineError> for Failure {
    fn from(e: PipelineError) -> Self {
        let status = match &e {
            PipelineError::Config(_) => AutodiStatus::Config,
            PipelineError::Missing { .. } => AutodiStatus::MissingPrerequisite,
            e if e.is_budget() => AutodiStatus::BudgetExhausted,
            _ => AutodiStatus::Pipeline,
        };
        Failure(status, e.to_string())
    }
}

/// Runs `f`, turning errors and panics into a status plus the thread's last
/// error message.
fn guard(f: impl FnOnce() -> Result<(), Failure>) -> AutodiStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|e| *e.borrow_mut() = None);
            AutodiStatus::Ok
        }
        Ok(Err(Failure(status, message))) => {
            set_error(message);
            status
        }
        Err(panic) => {
            let message = panic
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| panic.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            set_error(format!("internal error: {message}"));
            AutodiStatus::Panic
        }
    }
}

unsafe fn text<'a>(p: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(Failure::new(AutodiStatus::NullArgument, format!("{what} is null")));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Failure::new(AutodiStatus::InvalidUtf8, format!("{what} is not UTF-8")))
}

unsafe fn out<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, Failure> {
    p.as_mut()
        .ok_or_else(|| Failure::new(AutodiStatus::NullArgument, format!("{what} is null")))
}

fn owned_string(s: String) -> *mut c_char {
    CString::new(s.replace('\0', " ")).expect("no interior nul").into_raw()
}

fn to_json<T: serde::Serialize + ?Sized>(value: &T) -> Result<*mut c_char, Failure> {
    serde_json::to_string(value)
        .map(owned_string)
        .map_err(|e| Failure::new(AutodiStatus::Pipeline, e.to_string()))
}

/// Message of the last failed call on this thread, or null. Valid until the
/// next call into the library on this thread.
#[no_mangle]
pub extern "C" fn autodi_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Library version, static.
#[no_mangle]
pub extern "C" fn autodi_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Releases a string returned by this library. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn autodi_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// String similarity in [0, 1]. `metric` is one of `jaccard-token`,
/// `jaro-winkler`, `levenshtein-sim`, `cosine-char3`.
#[no_mangle]
pub unsafe extern "C" fn autodi_string_similarity(
    a: *const c_char,
    b: *const c_char,
    metric: *const c_char,
    result: *mut f64,
) -> AutodiStatus {
    guard(|| {
        let (a, b) = (text(a, "a")?, text(b, "b")?);
        let name = text(metric, "metric")?;
        let metric = StringMetric::parse(name)
            .ok_or_else(|| Failure::new(AutodiStatus::InvalidArgument, format!("unknown metric `{name}`")))?;
        *out(result, "result")? = string_similarity(a, b, metric);
        Ok(())
    })
}

/// Loads a run configuration. A non-null `out_dir` overrides the configured
/// output directory.
#[no_mangle]
pub unsafe extern "C" fn autodi_pipeline_open(
    config_path: *const c_char,
    out_dir: *const c_char,
    pipeline: *mut *mut AutodiPipeline,
) -> AutodiStatus {
    guard(|| {
        let slot = out(pipeline, "pipeline")?;
        let path = text(config_path, "config_path")?;
        let mut cfg =
            RunConfig::load(Path::new(path)).map_err(|e| Failure::new(AutodiStatus::Config, e.to_string()))?;
        if !out_dir.is_null() {
            cfg.out = text(out_dir, "out_dir")?.into();
        }
        let inner = Pipeline::new(cfg)?;
        *slot = Box::into_raw(Box::new(AutodiPipeline { inner }));
        Ok(())
    })
}

/// Runs one step (`profile`, `match-schema`, `normalize`, `match-entities`,
/// `cluster`, `fuse`, `report` or `all`). On success `artifacts` receives a
/// JSON array of the written paths; it may be null if not wanted.
#[no_mangle]
pub unsafe extern "C" fn autodi_pipeline_run(
    pipeline: *const AutodiPipeline,
    step: *const c_char,
    artifacts: *mut *mut c_char,
) -> AutodiStatus {
    guard(|| {
        let p = pipeline
            .as_ref()
            .ok_or_else(|| Failure::new(AutodiStatus::NullArgument, "pipeline is null"))?;
        let name = text(step, "step")?;
        let step = Step::parse(name)
            .ok_or_else(|| Failure::new(AutodiStatus::InvalidArgument, format!("unknown step `{name}`")))?;
        let paths = p.inner.run(step)?;
        if let Some(slot) = artifacts.as_mut() {
            let list: Vec<String> = paths.iter().map(|p| p.display().to_string()).collect();
            *slot = to_json(&list)?;
        }
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn autodi_pipeline_free(pipeline: *mut AutodiPipeline) {
    if !pipeline.is_null() {
        drop(Box::from_raw(pipeline));
    }
}

/// Loads a delimited file. `id_column` names the id column, or is null to
/// synthesize ids.
#[no_mangle]
pub unsafe extern "C" fn autodi_dataset_load(
    path: *const c_char,
    id_column: *const c_char,
    delimiter: u8,
    dataset: *mut *mut AutodiDataset,
) -> AutodiStatus {
    guard(|| {
        let slot = out(dataset, "dataset")?;
        let path = text(path, "path")?;
        let id = if id_column.is_null() {
            IdSpec::Synthesize
        } else {
            IdSpec::Column(text(id_column, "id_column")?.to_string())
        };
        let options = LoadOptions { delimiter, name: None };
        let inner =
            load_dataset(Path::new(path), &id, &options).map_err(|e| Failure::new(AutodiStatus::Io, e.to_string()))?;
        *slot = Box::into_raw(Box::new(AutodiDataset { inner }));
        Ok(())
    })
}

/// Number of records; 0 for a null handle.
#[no_mangle]
pub unsafe extern "C" fn autodi_dataset_len(dataset: *const AutodiDataset) -> usize {
    dataset.as_ref().map_or(0, |d| d.inner.len())
}

/// Column profiles as a JSON array.
#[no_mangle]
pub unsafe extern "C" fn autodi_dataset_profile(dataset: *const AutodiDataset, json: *mut *mut c_char) -> AutodiStatus {
    guard(|| {
        let d = dataset
            .as_ref()
            .ok_or_else(|| Failure::new(AutodiStatus::NullArgument, "dataset is null"))?;
        *out(json, "json")? = to_json(&profile_dataset(&d.inner))?;
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn autodi_dataset_free(dataset: *mut AutodiDataset) {
    if !dataset.is_null() {
        drop(Box::from_raw(dataset));
    }
}

/// Fusion ratio and row gain from record counts of `n_inputs` sources, the
/// output size and the number of fused groups.
#[no_mangle]
pub unsafe extern "C" fn autodi_report_from_counts(
    input_records: *const u64,
    n_inputs: usize,
    output_records: u64,
    fused_groups: u64,
    metrics: *mut AutodiReportMetrics,
) -> AutodiStatus {
    guard(|| {
        if input_records.is_null() && n_inputs > 0 {
            return Err(Failure::new(AutodiStatus::NullArgument, "input_records is null"));
        }
        let counts: &[u64] = if n_inputs == 0 {
            &[]
        } else {
            std::slice::from_raw_parts(input_records, n_inputs)
        };
        let inputs = ReportInputs {
            inputs: counts
                .iter()
                .enumerate()
                .map(|(i, &records)| InputSummary {
                    name: format!("input-{i}"),
                    records: records as usize,
                    density: None,
                })
                .collect(),
            output_records: output_records as usize,
            fused_groups: fused_groups as usize,
            output_density: None,
            cluster_sizes: Default::default(),
        };
        let r = compute_report_from_counts(&inputs, DensityWeighting::Unweighted);
        *out(metrics, "metrics")? = AutodiReportMetrics {
            total_input_records: r.total_input_records as u64,
            largest_input: r.largest_input as u64,
            fusion_ratio: r.fusion_ratio.unwrap_or(f64::NAN),
            row_gain_abs: r.row_gain_abs.unwrap_or(0),
            row_gain_pct: r.row_gain_pct.unwrap_or(f64::NAN),
        };
        Ok(())
    })
}

/// Reads a JSON-lines ledger file as written by a pipeline run.
#[no_mangle]
pub unsafe extern "C" fn autodi_ledger_open(path: *const c_char, ledger: *mut *mut AutodiLedger) -> AutodiStatus {
    guard(|| {
        let slot = out(ledger, "ledger")?;
        let path = text(path, "path")?;
        let entries = autodi::oracle::cache::read_jsonl::<LedgerEntry>(Path::new(path))
            .map_err(|e| Failure::new(AutodiStatus::Io, e.to_string()))?;
        *slot = Box::into_raw(Box::new(AutodiLedger {
            inner: UsageLedger::from_entries(entries),
        }));
        Ok(())
    })
}

/// Total cost in micro-units of currency; 0 for a null handle.
#[no_mangle]
pub unsafe extern "C" fn autodi_ledger_total_micro(ledger: *const AutodiLedger) -> u64 {
    ledger.as_ref().map_or(0, |l| l.inner.total_micro())
}

/// Per-task and per-step usage as JSON.
#[no_mangle]
pub unsafe extern "C" fn autodi_ledger_summary(ledger: *const AutodiLedger, json: *mut *mut c_char) -> AutodiStatus {
    guard(|| {
        let l = ledger
            .as_ref()
            .ok_or_else(|| Failure::new(AutodiStatus::NullArgument, "ledger is null"))?;
        *out(json, "json")? = to_json(&l.inner.summary())?;
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn autodi_ledger_free(ledger: *mut AutodiLedger) {
    if !ledger.is_null() {
        drop(Box::from_raw(ledger));
    }
}

/// Renders micro-units as `$d.cc`. Never fails; the result must be freed.
#[no_mangle]
pub extern "C" fn autodi_format_currency(micro: u64) -> *mut c_char {
    owned_string(format_currency(micro))
}
