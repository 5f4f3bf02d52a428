use std::ffi::{CStr, CString};
use std::process::Command;
use std::ptr;

use ktaa_ffi::*;

fn c(s: &str) -> CString {
    CString::new(s).unwrap()
}

fn last_error() -> String {
    unsafe { CStr::from_ptr(ktaa_last_error()).to_string_lossy().into_owned() }
}

fn trace(sys: *mut KtaaSystem, ap: &str) -> String {
    let mut out = ptr::null_mut();
    assert_eq!(unsafe { ktaa_trace(sys, c(ap).as_ptr(), &mut out) }, KtaaStatus::Ok);
    let s = unsafe { CStr::from_ptr(out) }.to_str().unwrap().to_string();
    unsafe { ktaa_string_free(out) };
    s
}

#[test]
fn full_flow_through_the_c_abi() {
    let mut sys = ptr::null_mut();
    unsafe {
        assert_eq!(ktaa_system_new(c("toy-27").as_ptr(), 3, &mut sys), KtaaStatus::Ok);
        assert_eq!(ktaa_ap_setup(sys, c("shop").as_ptr(), 2), KtaaStatus::Ok);
        let mut tau = 0u64;
        for u in ["alice", "bob"] {
            assert_eq!(ktaa_join(sys, c(u).as_ptr(), &mut tau), KtaaStatus::Ok);
            assert!(tau > 0);
            assert_eq!(ktaa_grant(sys, c(u).as_ptr(), c("shop").as_ptr()), KtaaStatus::Ok);
        }
        let mut out = KtaaAuthOutcome::InvalidProof;
        for _ in 0..2 {
            for u in ["alice", "bob"] {
                assert_eq!(ktaa_authenticate(sys, c(u).as_ptr(), c("shop").as_ptr(), false, &mut out), KtaaStatus::Ok);
                assert_eq!(out, KtaaAuthOutcome::Accepted);
            }
        }
        assert_eq!(
            ktaa_authenticate(sys, c("alice").as_ptr(), c("shop").as_ptr(), false, &mut out),
            KtaaStatus::LimitReached
        );
        assert!(!last_error().is_empty());
        assert_eq!(trace(sys, "shop"), "");
        assert_eq!(ktaa_authenticate(sys, c("alice").as_ptr(), c("shop").as_ptr(), true, &mut out), KtaaStatus::Ok);
        assert_eq!(out, KtaaAuthOutcome::DuplicateTag);
        assert_eq!(trace(sys, "shop"), "alice");
        ktaa_system_free(sys);
    }
}

#[test]
fn revoked_user_is_rejected() {
    let mut sys = ptr::null_mut();
    unsafe {
        assert_eq!(ktaa_system_new(c("toy-27").as_ptr(), 4, &mut sys), KtaaStatus::Ok);
        assert_eq!(ktaa_ap_setup(sys, c("a").as_ptr(), 3), KtaaStatus::Ok);
        for u in ["x", "y"] {
            assert_eq!(ktaa_join(sys, c(u).as_ptr(), ptr::null_mut()), KtaaStatus::Ok);
            assert_eq!(ktaa_grant(sys, c(u).as_ptr(), c("a").as_ptr()), KtaaStatus::Ok);
        }
        assert_eq!(ktaa_revoke(sys, c("x").as_ptr(), c("a").as_ptr()), KtaaStatus::Ok);
        let mut out = KtaaAuthOutcome::Accepted;
        // the honest prover refuses a stale accumulator witness
        assert_eq!(ktaa_authenticate(sys, c("x").as_ptr(), c("a").as_ptr(), false, &mut out), KtaaStatus::Rejected);
        assert!(last_error().contains("witness"));
        assert_eq!(ktaa_authenticate(sys, c("y").as_ptr(), c("a").as_ptr(), false, &mut out), KtaaStatus::Ok);
        assert_eq!(out, KtaaAuthOutcome::Accepted);
        ktaa_system_free(sys);
    }
}

#[test]
fn bad_arguments_map_to_status_codes() {
    let mut sys = ptr::null_mut();
    unsafe {
        assert_eq!(ktaa_system_new(ptr::null(), 1, &mut sys), KtaaStatus::NullPointer);
        assert!(sys.is_null());
        assert_eq!(ktaa_system_new(c("paper-80").as_ptr(), 1, &mut sys), KtaaStatus::InvalidArgument);
        assert!(last_error().contains("estimator-only"));
        assert_eq!(ktaa_system_new(c("nope").as_ptr(), 1, &mut sys), KtaaStatus::InvalidArgument);
        let bad = [0xffu8, 0];
        assert_eq!(ktaa_system_new(bad.as_ptr().cast(), 1, &mut sys), KtaaStatus::InvalidUtf8);

        assert_eq!(ktaa_system_new(c("toy-27").as_ptr(), 1, &mut sys), KtaaStatus::Ok);
        assert_eq!(ktaa_grant(sys, c("ghost").as_ptr(), c("shop").as_ptr()), KtaaStatus::NotFound);
        assert_eq!(ktaa_ap_setup(sys, c("shop").as_ptr(), 0), KtaaStatus::InvalidArgument);
        assert_eq!(ktaa_join(ptr::null_mut(), c("u").as_ptr(), ptr::null_mut()), KtaaStatus::NullPointer);
        assert_eq!(ktaa_join(sys, c("u").as_ptr(), ptr::null_mut()), KtaaStatus::Ok);
        assert_eq!(ktaa_join(sys, c("u").as_ptr(), ptr::null_mut()), KtaaStatus::InvalidArgument);
        assert_eq!(last_error(), "user `u` already exists");
        ktaa_system_free(sys);
        ktaa_system_free(ptr::null_mut());
        ktaa_string_free(ptr::null_mut());
    }
}

#[test]
fn estimate_levels() {
    let mut e = KtaaEstimate::default();
    unsafe {
        assert_eq!(ktaa_estimate(80, &mut e), KtaaStatus::Ok);
        assert!(e.pi1_bytes > 4.0e8 && e.ratio > 1.0e4);
        assert_eq!(ktaa_estimate(81, &mut e), KtaaStatus::InvalidArgument);
        assert_eq!(ktaa_estimate(80, ptr::null_mut()), KtaaStatus::NullPointer);
    }
}

#[test]
fn header_is_valid_c_and_declares_the_api() {
    let header = concat!(env!("CARGO_MANIFEST_DIR"), "/include/ktaa.h");
    let text = std::fs::read_to_string(header).unwrap();
    for f in [
        "ktaa_system_new",
        "ktaa_system_free",
        "ktaa_ap_setup",
        "ktaa_join",
        "ktaa_grant",
        "ktaa_revoke",
        "ktaa_authenticate",
        "ktaa_trace",
        "ktaa_string_free",
        "ktaa_estimate",
        "ktaa_last_error",
    ] {
        assert!(text.contains(&format!("{f}(")), "{f} missing from header");
    }
    assert!(text.contains("typedef struct KtaaSystem KtaaSystem;"));
    let src = std::env::temp_dir().join(format!("ktaa_header_{}.c", std::process::id()));
    std::fs::write(&src, "#include \"ktaa.h\"\nint main(void) { KtaaEstimate e; return ktaa_estimate(80, &e) == KTAA_STATUS_OK ? 0 : 1; }\n")
        .unwrap();
    let Ok(status) = Command::new("cc")
        .args(["-std=c99", "-Wall", "-Werror", "-fsyntax-only", "-I"])
        .arg(concat!(env!("CARGO_MANIFEST_DIR"), "/include"))
        .arg(&src)
        .status()
    else {
        eprintln!("no C compiler on PATH; syntax check skipped");
        return;
    };
    let _ = std::fs::remove_file(&src);
    assert!(status.success());
}
