use std::ffi::{CStr, CString};
use std::process::Command;
use std::ptr;

use qpainleve_ffi::*;

fn c(s: &str) -> CString {
    CString::new(s).unwrap()
}

unsafe fn task(kind: &str, kv: &[(&str, &str)]) -> *mut QpTask {
    let mut t = ptr::null_mut();
    assert_eq!(qp_task_new(c(kind).as_ptr(), &mut t), QpStatus::Ok);
    for (k, v) in kv {
        assert_eq!(qp_task_set(t, c(k).as_ptr(), c(v).as_ptr()), QpStatus::Ok, "{k}={v}");
    }
    t
}

unsafe fn last_error() -> String {
    CStr::from_ptr(qp_last_error()).to_string_lossy().into_owned()
}

#[test]
fn weyl_report_round_trip() {
    unsafe {
        let t = task("weyl", &[("N", "1")]);
        let mut r = ptr::null_mut();
        assert_eq!(qp_task_run(t, &mut r), QpStatus::Ok);
        assert_eq!(qp_report_outcome(r), QpOutcome::Pass);
        assert_eq!(qp_report_check_count(r), 10);
        assert_eq!(qp_report_failed_count(r), 0);
        let json: serde_json::Value = serde_json::from_str(CStr::from_ptr(qp_report_json(r)).to_str().unwrap()).unwrap();
        assert_eq!(json["schema"], 1);
        assert_eq!(json["task"]["kind"], "weyl");
        qp_report_free(r);
        qp_task_free(t);
    }
}

#[test]
fn failing_identity_is_reported_not_raised() {
    unsafe {
        let t = task("weyl", &[("N", "2")]);
        let mut r = ptr::null_mut();
        assert_eq!(qp_task_run(t, &mut r), QpStatus::Ok);
        assert_eq!(qp_report_outcome(r), QpOutcome::Fail);
        assert_eq!(qp_report_failed_count(r), 1);
        qp_report_free(r);
        qp_task_free(t);
    }
}

#[test]
fn error_codes() {
    unsafe {
        let mut t = ptr::null_mut();
        assert_eq!(qp_task_new(c("nonsense").as_ptr(), &mut t), QpStatus::Usage);
        assert!(last_error().contains("unknown task"));
        assert_eq!(qp_task_new(ptr::null(), &mut t), QpStatus::NullPointer);
        let t = task("pde-symbolic", &[("family", "V"), ("N", "1"), ("m", "1")]);
        assert_eq!(qp_task_set(t, c("hbar").as_ptr(), c("0").as_ptr()), QpStatus::Usage);
        assert_eq!(qp_task_set(t, c("b").as_ptr(), c("1/x").as_ptr()), QpStatus::Parse);
        let mut r = ptr::null_mut();
        assert_eq!(qp_task_run(t, &mut r), QpStatus::Usage);
        let msg = last_error();
        assert!(msg.contains("hbar") && msg.contains("b") && msg.contains("c"), "{msg}");
        assert!(r.is_null());
        qp_task_free(t);
        let t = task("oracle-moments", &[("family", "V"), ("b", "1/3"), ("c", "-1/5"), ("t", "1/2")]);
        assert_eq!(qp_task_run(t, &mut r), QpStatus::Domain);
        qp_task_free(t);
        qp_task_free(ptr::null_mut());
        qp_report_free(ptr::null_mut());
        assert_eq!(qp_report_check_count(ptr::null()), 0);
    }
}

#[test]
fn symbolic_schrodinger_through_the_c_api() {
    unsafe {
        let t = task("pde-symbolic", &[("family", "IV"), ("N", "1"), ("m", "2"), ("hbar", "1"), ("b", "-1/3")]);
        let mut r = ptr::null_mut();
        assert_eq!(qp_task_run(t, &mut r), QpStatus::Ok);
        assert_eq!(qp_report_outcome(r), QpOutcome::Pass);
        assert_eq!(qp_report_check_count(r), 3);
        qp_report_free(r);
        qp_task_free(t);
    }
}

#[test]
fn acceptance_subset() {
    unsafe {
        let mut r = ptr::null_mut();
        let which = [1u32, 4];
        assert_eq!(qp_suite_acceptance(which.as_ptr(), which.len(), 42, 192, &mut r), QpStatus::Ok);
        assert_eq!(qp_report_outcome(r), QpOutcome::Pass);
        qp_report_free(r);
        let bad = [12u32];
        assert_eq!(qp_suite_acceptance(bad.as_ptr(), 1, 42, 192, &mut r), QpStatus::Usage);
    }
}

#[test]
fn version_string() {
    let v = unsafe { CStr::from_ptr(qp_version()) }.to_str().unwrap();
    assert_eq!(v, env!("CARGO_PKG_VERSION"));
}

#[test]
fn header_compiles_as_c_and_cpp() {
    let dir = std::path::Path::new(env!("CARGO_MANIFEST_DIR"));
    let header = dir.join("include/qpainleve.h");
    assert!(header.exists());
    let src = std::env::temp_dir().join("qpainleve_header_check.c");
    std::fs::write(
        &src,
        "#include \"qpainleve.h\"\nint main(void) { QpTask *t = 0; QpReport *r = 0;\n\
         if (qp_task_new(\"weyl\", &t) != QP_STATUS_OK) return 1;\n\
         qp_task_set(t, \"N\", \"2\"); qp_task_run(t, &r); qp_report_outcome(r);\n\
         qp_report_free(r); qp_task_free(t); return 0; }\n",
    )
    .unwrap();
    for (compiler, lang) in [("cc", "c"), ("c++", "c++")] {
        let status = match Command::new(compiler)
            .args(["-fsyntax-only", "-Wall", "-Werror", "-x", lang, "-I"])
            .arg(dir.join("include"))
            .arg(&src)
            .status()
        {
            Ok(s) => s,
            Err(_) => {
                eprintln!("{compiler} not available; skipping");
                continue;
            }
        };
        assert!(status.success(), "{compiler} rejected the header");
    }
}
