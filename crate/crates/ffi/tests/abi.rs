use std::ffi::{CStr, CString};
use std::path::Path;
use std::process::Command;
use std::ptr;

use autodi_ffi::*;

fn c(s: &str) -> CString {
    CString::new(s).unwrap()
}

unsafe fn take(s: *mut std::ffi::c_char) -> String {
    let out = CStr::from_ptr(s).to_str().unwrap().to_string();
    autodi_string_free(s);
    out
}

unsafe fn last_error() -> String {
    let p = autodi_last_error();
    assert!(!p.is_null());
    CStr::from_ptr(p).to_string_lossy().into_owned()
}

#[test]
fn similarity_and_error_codes() {
    unsafe {
        let mut v = 0.0;
        let st = autodi_string_similarity(
            c("kitten").as_ptr(),
            c("sitting").as_ptr(),
            c("levenshtein-sim").as_ptr(),
            &mut v,
        );
        assert_eq!(st, AutodiStatus::Ok);
        assert!((v - 4.0 / 7.0).abs() < 1e-12);
        assert!(autodi_last_error().is_null());

        let st = autodi_string_similarity(c("a").as_ptr(), c("b").as_ptr(), c("soundex").as_ptr(), &mut v);
        assert_eq!(st, AutodiStatus::InvalidArgument);
        assert!(last_error().contains("soundex"));

        let st = autodi_string_similarity(ptr::null(), c("b").as_ptr(), c("jaro-winkler").as_ptr(), &mut v);
        assert_eq!(st, AutodiStatus::NullArgument);

        let bad = [0xffu8, 0];
        let st = autodi_string_similarity(bad.as_ptr().cast(), c("b").as_ptr(), c("jaro-winkler").as_ptr(), &mut v);
        assert_eq!(st, AutodiStatus::InvalidUtf8);
    }
}

#[test]
fn report_metrics_from_counts() {
    let inputs = [46_580u64, 20_494, 7_877];
    let mut m = AutodiReportMetrics {
        total_input_records: 0,
        largest_input: 0,
        fusion_ratio: 0.0,
        row_gain_abs: 0,
        row_gain_pct: 0.0,
    };
    let st = unsafe { autodi_report_from_counts(inputs.as_ptr(), inputs.len(), 65_518, 7_235, &mut m) };
    assert_eq!(st, AutodiStatus::Ok);
    assert_eq!(m.total_input_records, 74_951);
    assert_eq!(m.row_gain_abs, 18_938);
    assert!((m.fusion_ratio - 7_235.0 / 65_518.0).abs() < 1e-12);
    let st = unsafe { autodi_report_from_counts(ptr::null(), 0, 0, 0, &mut m) };
    assert_eq!(st, AutodiStatus::Ok);
    assert!(m.fusion_ratio.is_nan());
}

#[test]
fn currency_and_version() {
    unsafe {
        assert_eq!(take(autodi_format_currency(27_250_000)), "$27.25");
        assert_eq!(
            CStr::from_ptr(autodi_version()).to_str().unwrap(),
            env!("CARGO_PKG_VERSION")
        );
    }
}

#[test]
fn pipeline_dataset_and_ledger_handles() {
    let dir = tempfile::tempdir().unwrap();
    let fixture = dir.path().join("fx");
    autodi::synth::generate_fixture(&fixture, &autodi::synth::FixtureSpec { seed: 3, entities: 200 }).unwrap();
    let config = c(fixture.join("config.toml").to_str().unwrap());
    let out = dir.path().join("out");
    let out_c = c(out.to_str().unwrap());
    unsafe {
        let mut p = ptr::null_mut();
        assert_eq!(
            autodi_pipeline_open(config.as_ptr(), out_c.as_ptr(), &mut p),
            AutodiStatus::Ok
        );
        let mut artifacts = ptr::null_mut();
        assert_eq!(
            autodi_pipeline_run(p, c("cluster").as_ptr(), &mut artifacts),
            AutodiStatus::MissingPrerequisite
        );
        assert!(last_error().contains("run the earlier steps"));
        assert_eq!(
            autodi_pipeline_run(p, c("all").as_ptr(), &mut artifacts),
            AutodiStatus::Ok
        );
        let list: Vec<String> = serde_json::from_str(&take(artifacts)).unwrap();
        assert!(list.iter().any(|a| a.ends_with("fused.csv")));
        assert_eq!(
            autodi_pipeline_run(p, c("sideways").as_ptr(), ptr::null_mut()),
            AutodiStatus::InvalidArgument
        );
        autodi_pipeline_free(p);

        let mut d = ptr::null_mut();
        let fused = c(out.join("fused.csv").to_str().unwrap());
        assert_eq!(
            autodi_dataset_load(fused.as_ptr(), c("id").as_ptr(), b',', &mut d),
            AutodiStatus::Ok
        );
        assert!(autodi_dataset_len(d) > 100);
        let mut json = ptr::null_mut();
        assert_eq!(autodi_dataset_profile(d, &mut json), AutodiStatus::Ok);
        let profiles: serde_json::Value = serde_json::from_str(&take(json)).unwrap();
        assert_eq!(profiles.as_array().unwrap().len(), 9);
        autodi_dataset_free(d);

        let mut l = ptr::null_mut();
        let ledger = c(out.join("ledger.jsonl").to_str().unwrap());
        assert_eq!(autodi_ledger_open(ledger.as_ptr(), &mut l), AutodiStatus::Ok);
        let total = autodi_ledger_total_micro(l);
        let mut json = ptr::null_mut();
        assert_eq!(autodi_ledger_summary(l, &mut json), AutodiStatus::Ok);
        let summary: serde_json::Value = serde_json::from_str(&take(json)).unwrap();
        assert_eq!(summary["total"]["cost_micro"].as_u64().unwrap(), total);
        assert!(summary["total"]["calls"].as_u64().unwrap() > 0);
        autodi_ledger_free(l);

        let mut bad = ptr::null_mut();
        assert_eq!(
            autodi_pipeline_open(c("/nonexistent/config.toml").as_ptr(), ptr::null(), &mut bad),
            AutodiStatus::Config
        );
        assert!(bad.is_null());
    }
}

#[test]
fn header_compiles_as_c() {
    let header = Path::new(env!("CARGO_MANIFEST_DIR")).join("include/autodi.h");
    let text = std::fs::read_to_string(&header).unwrap();
    for symbol in [
        "autodi_pipeline_open",
        "autodi_dataset_free",
        "autodi_ledger_total_micro",
        "AUTODI_STATUS_BUDGET_EXHAUSTED",
    ] {
        assert!(text.contains(symbol), "{symbol}");
    }
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("probe.c");
    std::fs::write(
        &src,
        "#include \"autodi.h\"\nint main(void) { AutodiPipeline *p = 0; return (int)autodi_pipeline_run(p, \"all\", 0); }\n",
    )
    .unwrap();
    match Command::new("cc")
        .args(["-std=c99", "-Wall", "-Werror", "-fsyntax-only", "-I"])
        .arg(header.parent().unwrap())
        .arg(&src)
        .output()
    {
        Ok(out) => assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr)),
        Err(e) => eprintln!("no C compiler, syntax check skipped: {e}"),
    }
}
