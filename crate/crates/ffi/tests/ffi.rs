use std::ffi::{CStr, CString};
use std::path::PathBuf;
use std::process::Command;
use std::ptr;

use qsig_ffi::*;

fn last_error() -> String {
    let p = qsig_last_error();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

#[test]
fn hanaoka_round_trip() {
    unsafe {
        let mut h = ptr::null_mut();
        assert_eq!(qsig_hanaoka_new(4, 1, 1, 101, 3, &mut h), QsigStatus::Ok);
        let mut ok = false;
        assert_eq!(
            qsig_hanaoka_sign_verify(h, 0, 2, 17, &mut ok),
            QsigStatus::Ok
        );
        assert!(ok);
        assert_eq!(
            qsig_hanaoka_sign_verify(h, 0, 9, 17, &mut ok),
            QsigStatus::IndexOutOfRange
        );
        qsig_hanaoka_free(h);

        assert_eq!(
            qsig_hanaoka_new(4, 1, 1, 15, 3, &mut h),
            QsigStatus::InvalidArgument
        );
        assert!(last_error().contains("not a prime"));
        assert_eq!(
            qsig_hanaoka_new(4, 1, 1, 101, 3, ptr::null_mut()),
            QsigStatus::NullPointer
        );
    }
}

#[test]
fn experiment_reports() {
    let cfg = CString::new(
        r#"{"spec":{"params":{"protocol":"p2","L":32,"s_a":0,"s_v":0.1},"attack":"repudiate","trials":2000,"seed":5}}"#,
    )
    .unwrap();
    unsafe {
        let mut r = ptr::null_mut();
        assert_eq!(
            qsig_run_experiment_json(cfg.as_ptr(), &mut r),
            QsigStatus::Ok
        );
        assert_eq!(qsig_report_count(r), 1);
        let (mut e, mut b, mut has) = (0.0, 0.0, false);
        assert_eq!(
            qsig_report_stats(r, 0, &mut e, &mut b, &mut has),
            QsigStatus::Ok
        );
        assert!(has && e <= b);
        assert_eq!(
            qsig_report_stats(r, 1, &mut e, &mut b, &mut has),
            QsigStatus::IndexOutOfRange
        );
        let mut violated = true;
        assert_eq!(qsig_report_violates_bound(r, &mut violated), QsigStatus::Ok);
        assert!(!violated);
        let mut s = ptr::null_mut();
        assert_eq!(qsig_report_to_jsonl(r, &mut s), QsigStatus::Ok);
        let text = CStr::from_ptr(s).to_str().unwrap().to_owned();
        qsig_string_free(s);
        assert_eq!(text.lines().count(), 2);
        assert!(text.contains(r#""bound_tag":"p2-repudiation""#));
        qsig_report_free(r);

        let bad = CString::new(r#"{"spec":{}}"#).unwrap();
        assert_eq!(
            qsig_run_experiment_json(bad.as_ptr(), &mut r),
            QsigStatus::InvalidArgument
        );
        assert_eq!(
            qsig_run_experiment_json(ptr::null(), &mut r),
            QsigStatus::NullPointer
        );
        assert_eq!(qsig_report_count(ptr::null()), 0);
    }
}

#[test]
fn bounds_and_disputes() {
    unsafe {
        let mut x = 0.0;
        assert_eq!(qsig_p2_repudiation_bound(0.1, 64, &mut x), QsigStatus::Ok);
        assert!(x > 0.0 && x < 1.0);
        assert_eq!(qsig_p2_forging_bound(0.1, 64, &mut x), QsigStatus::Ok);
        assert!((x - (-(0.4f64 * 0.4) * 64.0).exp()).abs() < 1e-15);
        let (pu, pm) = (1.0 - (-2.0f64).exp(), 0.004_600_070_369_588_713);
        assert_eq!(
            qsig_mqds_forging_bound(pm, pu, 0.0, 0.01, 1000, &mut x),
            QsigStatus::VacuousBound
        );
        assert_eq!(
            qsig_mqds_repudiation_bound(pu, 0.0, 0.05, 1000, &mut x),
            QsigStatus::Ok
        );
        assert_eq!(
            qsig_p2_forging_bound(0.6, 64, &mut x),
            QsigStatus::InvalidArgument
        );

        let mut v = QsigVerdict::Tie;
        let votes = [true, false, true];
        assert_eq!(
            qsig_resolve_dispute(votes.as_ptr(), 3, &mut v),
            QsigStatus::Ok
        );
        assert_eq!(v, QsigVerdict::Valid);
        let votes = [true, false, true, false];
        assert_eq!(
            qsig_resolve_dispute(votes.as_ptr(), 4, &mut v),
            QsigStatus::Ok
        );
        assert_eq!(v, QsigVerdict::Tie);
        assert_eq!(
            qsig_resolve_dispute(votes.as_ptr(), 2, &mut v),
            QsigStatus::InvalidArgument
        );
    }
}

#[test]
fn version_matches_crate() {
    let v = unsafe { CStr::from_ptr(qsig_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}

fn header() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("include/qsig.h")
}

#[test]
fn header_declares_every_export() {
    let h = std::fs::read_to_string(header()).unwrap();
    let src = std::fs::read_to_string(PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("src/lib.rs"))
        .unwrap();
    let exports: Vec<&str> = src
        .split("extern \"C\" fn ")
        .skip(1)
        .map(|s| s.split('(').next().unwrap())
        .collect();
    assert!(exports.len() >= 15);
    for name in exports {
        assert!(
            h.contains(&format!("{name}(")),
            "{name} missing from header"
        );
    }
    assert!(h.contains("typedef struct QsigReport QsigReport;"));
}

/// Compiles a C program against the header and the static library when a C
/// compiler is present.
#[test]
fn c_program_links_against_static_library() {
    let target = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../target");
    let lib = ["debug", "release"]
        .iter()
        .map(|p| target.join(p).join("libqsig_ffi.a"))
        .find(|p| p.exists());
    let (Some(lib), Ok(cc)) = (lib, Command::new("cc").arg("--version").output()) else {
        eprintln!("skipping: no static library or C compiler");
        return;
    };
    if !cc.status.success() {
        return;
    }
    let dir = tempfile::tempdir().unwrap();
    let c = dir.path().join("main.c");
    std::fs::write(
        &c,
        r#"
#include <stdio.h>
#include "qsig.h"
int main(void) {
    QsigHanaoka *h = NULL;
    bool ok = false;
    if (qsig_hanaoka_new(3, 1, 1, 11, 1, &h) != QSIG_STATUS_OK) return 1;
    if (qsig_hanaoka_sign_verify(h, 1, 2, 5, &ok) != QSIG_STATUS_OK || !ok) return 2;
    qsig_hanaoka_free(h);
    double b = 0.0;
    if (qsig_p2_forging_bound(0.6, 16, &b) != QSIG_STATUS_INVALID_ARGUMENT) return 3;
    if (qsig_last_error() == NULL) return 4;
    printf("%s\n", qsig_version());
    return 0;
}
"#,
    )
    .unwrap();
    let exe = dir.path().join("main");
    let status = Command::new("cc")
        .arg(&c)
        .arg("-I")
        .arg(header().parent().unwrap())
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&exe)
        .status()
        .unwrap();
    assert!(status.success(), "C compile failed");
    let out = Command::new(&exe).output().unwrap();
    assert!(
        out.status.success(),
        "C program exited with {:?}",
        out.status
    );
    assert_eq!(
        String::from_utf8_lossy(&out.stdout).trim(),
        env!("CARGO_PKG_VERSION")
    );
}
