use std::ffi::{CStr, CString};
use std::path::PathBuf;
use std::process::Command;
use std::ptr;

use chi2qec_ffi::*;

fn cstr(s: &str) -> CString {
    CString::new(s).unwrap()
}

fn new_code(name: &str, size: u32) -> *mut Chi2Code {
    let mut code = ptr::null_mut();
    let s = unsafe { chi2qec_code_new(cstr(name).as_ptr(), size, &mut code) };
    assert_eq!(s, Chi2Status::Ok);
    assert!(!code.is_null());
    code
}

fn last_error() -> String {
    let p = chi2qec_last_error();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_str().unwrap().to_owned()
}

unsafe fn take(p: *mut std::ffi::c_char) -> String {
    assert!(!p.is_null());
    let s = CStr::from_ptr(p).to_str().unwrap().to_owned();
    chi2qec_string_free(p);
    s
}

#[test]
fn code_parameters() {
    let code = new_code("eecc", 2);
    let mut p = Chi2CodeParams::default();
    let (mut dim, mut rate) = (0u32, 0f64);
    unsafe {
        assert_eq!(chi2qec_code_params(code, &mut p), Chi2Status::Ok);
        assert_eq!(chi2qec_code_summary(code, &mut dim, &mut rate), Chi2Status::Ok);
        chi2qec_code_free(code);
    }
    assert_eq!((p.size, p.n, p.q, p.b, p.k), (2, 1, 3, 2, 1));
    assert_eq!(dim, 2);
    assert!((rate - 1.0 / 3f64.log2()).abs() < 1e-15);
}

#[test]
fn kl_check_pass_and_fail() {
    let pcc = new_code("pcc", 2);
    let bc2 = new_code("bc2mode", 2);
    let mut sum = Chi2KlSummary::default();
    let mut json = ptr::null_mut();
    unsafe {
        let s = chi2qec_kl_check(pcc, cstr("lowest-order").as_ptr(), 0.01, 1e-12, &mut sum, &mut json);
        assert_eq!(s, Chi2Status::Ok);
        assert!(sum.passed);
        assert!(sum.error_count >= 4);
        let v: serde_json::Value = serde_json::from_str(&take(json)).unwrap();
        let a00 = v["sets"][0]["report"]["alpha"][0][0][0].as_f64().unwrap();
        assert!((a00 - 0.97).abs() < 1e-12);

        let s = chi2qec_kl_check(bc2, cstr("ad").as_ptr(), 0.01, 1e-9, &mut sum, ptr::null_mut());
        assert_eq!(s, Chi2Status::VerificationFailed);
        assert!(!sum.passed);
        assert!((sum.max_distortion_residual.max(sum.max_offdiag_residual) - 1.5 * 0.01 * 0.99f64.powi(2)).abs() < 1e-9);

        let s = chi2qec_kl_check(pcc, cstr("xi").as_ptr(), 0.01, 1e-12, &mut sum, ptr::null_mut());
        assert_eq!(s, Chi2Status::InvalidArgument);
        chi2qec_code_free(pcc);
        chi2qec_code_free(bc2);
    }
}

#[test]
fn errors_set_the_last_message() {
    let mut code = ptr::null_mut();
    unsafe {
        assert_eq!(chi2qec_code_new(cstr("nosuch").as_ptr(), 2, &mut code), Chi2Status::UnknownName);
        assert!(code.is_null());
        assert!(last_error().contains("nosuch"));
        assert_eq!(chi2qec_code_new(ptr::null(), 2, &mut code), Chi2Status::NullPointer);
        assert_eq!(chi2qec_code_new(cstr("pcc").as_ptr(), 2, ptr::null_mut()), Chi2Status::NullPointer);
        let bad = [0xffu8, 0];
        assert_eq!(chi2qec_code_new(bad.as_ptr().cast(), 2, &mut code), Chi2Status::InvalidUtf8);
        let mut n = 0;
        assert_eq!(chi2qec_rotation_min_n(3, 2, 1, 1, 64, &mut n), Chi2Status::Ok);
        assert!(chi2qec_last_error().is_null());
        assert_eq!(n, 4);
        let mut json = ptr::null_mut();
        assert_eq!(chi2qec_report(10, 1, &mut json), Chi2Status::InvalidArgument);
        assert!(json.is_null());
        chi2qec_code_free(ptr::null_mut());
        chi2qec_string_free(ptr::null_mut());
    }
}

#[test]
fn syndromes_and_recovery() {
    let code = new_code("eecc", 2);
    let mut csv = ptr::null_mut();
    let mut f = 0.0;
    unsafe {
        assert_eq!(chi2qec_syndrome_table_csv(code, &mut csv), Chi2Status::Ok);
        let s = take(csv);
        assert_eq!(s.lines().next(), Some("error_label,p,q"));
        assert_eq!(s.lines().count(), 7);
        assert_eq!(chi2qec_recovery_trials(code, cstr("a_i").as_ptr(), 20, 3, 1e-10, &mut f), Chi2Status::Ok);
        assert!(f > 1.0 - 1e-10);
        assert_eq!(chi2qec_recovery_trials(code, cstr("a_x").as_ptr(), 20, 3, 1e-10, &mut f), Chi2Status::UnknownName);
        chi2qec_code_free(code);
    }
}

#[test]
fn bounds_and_report() {
    let mut holds = false;
    let mut json = ptr::null_mut();
    unsafe {
        assert_eq!(chi2qec_loss_bound_holds(2, 3, 3, 1, &mut holds), Chi2Status::Ok);
        assert!(holds);
        assert_eq!(chi2qec_loss_bound_holds(1, 3, 3, 1, &mut holds), Chi2Status::Ok);
        assert!(!holds);
        assert_eq!(chi2qec_report(5, 2024, &mut json), Chi2Status::Ok);
        let v: serde_json::Value = serde_json::from_str(&take(json)).unwrap();
        assert_eq!(v[0]["id"], 5);
        assert_eq!(chi2qec_report(4, 2024, &mut json), Chi2Status::VerificationFailed);
        chi2qec_string_free(json);
    }
}

fn find_tool(names: &[&str]) -> Option<&'static str> {
    names.iter().copied().find(|n| Command::new(n).arg("--version").output().is_ok()).map(|n| -> &'static str {
        Box::leak(n.to_owned().into_boxed_str())
    })
}

#[test]
fn c_program_links_against_header() {
    let Some(cc) = find_tool(&["cc", "gcc", "clang"]) else {
        eprintln!("no C compiler, skipping");
        return;
    };
    let manifest = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    let profile_dir = std::env::current_exe().unwrap().parent().unwrap().parent().unwrap().to_path_buf();
    let lib = profile_dir.join("libchi2qec_ffi.a");
    if !lib.exists() {
        eprintln!("{} not built, skipping", lib.display());
        return;
    }
    let exe = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("chi2qec_smoke");
    let status = Command::new(cc)
        .arg("-std=c99")
        .arg("-Wall")
        .arg("-Werror")
        .arg("-I")
        .arg(manifest.join("include"))
        .arg(manifest.join("tests/c/smoke.c"))
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&exe)
        .status()
        .unwrap();
    assert!(status.success());
    let out = Command::new(&exe).output().unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(String::from_utf8_lossy(&out.stdout).starts_with("chi2qec "));
}
