use std::ffi::{c_char, CString};
use std::ptr;

use nullforge_ffi::*;

fn last_error() -> String {
    let n = unsafe { nf_last_error(ptr::null_mut(), 0) };
    let mut buf = vec![0 as c_char; n];
    unsafe { nf_last_error(buf.as_mut_ptr(), n) };
    let bytes: Vec<u8> = buf[..n - 1].iter().map(|&c| c as u8).collect();
    String::from_utf8(bytes).unwrap()
}

fn take_string(f: impl Fn(*mut c_char, usize, *mut usize) -> NfStatus) -> String {
    let mut needed = 0;
    assert_eq!(f(ptr::null_mut(), 0, &mut needed), NfStatus::BufferTooSmall);
    let mut buf = vec![0 as c_char; needed];
    assert_eq!(f(buf.as_mut_ptr(), needed, &mut needed), NfStatus::Ok);
    let bytes: Vec<u8> = buf[..needed - 1].iter().map(|&c| c as u8).collect();
    String::from_utf8(bytes).unwrap()
}

#[test]
fn plane_handle_evaluates_and_round_trips() {
    let mut h = ptr::null_mut();
    assert_eq!(unsafe { nf_immersion_plane(4, 2.0, &mut h) }, NfStatus::Ok);
    assert_eq!(unsafe { nf_immersion_dim(h) }, 4);
    let mut x = [f64::NAN; 4];
    assert_eq!(unsafe { nf_immersion_eval(h, 0.3, -0.4, x.as_mut_ptr(), 4) }, NfStatus::Ok);
    assert!((x[0] - 0.6).abs() < 1e-12 && (x[1] + 0.8).abs() < 1e-12);
    assert_eq!(&x[2..], &[0.0, 0.0]);
    let mut lam = 0.0;
    assert_eq!(unsafe { nf_conformal_factor(h, 0.1, 0.2, &mut lam) }, NfStatus::Ok);
    assert!((lam - 2.0).abs() < 1e-12, "{lam}");

    let json = take_string(|b, l, n| unsafe { nf_immersion_to_json(h, b, l, n) });
    let c = CString::new(json).unwrap();
    let mut g = ptr::null_mut();
    assert_eq!(unsafe { nf_immersion_from_json(c.as_ptr(), &mut g) }, NfStatus::Ok);
    let mut y = [0.0; 4];
    assert_eq!(unsafe { nf_immersion_eval(g, 0.3, -0.4, y.as_mut_ptr(), 4) }, NfStatus::Ok);
    assert_eq!(x, y);
    unsafe {
        nf_immersion_free(h);
        nf_immersion_free(g);
    }
}

#[test]
fn catenoid_flux_is_vertical() {
    let mut h = ptr::null_mut();
    assert_eq!(unsafe { nf_immersion_catenoid(&mut h) }, NfStatus::Ok);
    let mut f = [0.0; 3];
    assert_eq!(unsafe { nf_flux(h, 0.5, f.as_mut_ptr(), 3) }, NfStatus::Ok);
    assert!(f[0].abs() < 1e-9 && f[1].abs() < 1e-9);
    assert!((f[2].abs() - 2.0 * std::f64::consts::PI).abs() < 1e-9, "{f:?}");
    unsafe { nf_immersion_free(h) };
}

#[test]
fn errors_carry_a_status_and_a_message() {
    let mut h = ptr::null_mut();
    assert_eq!(unsafe { nf_immersion_plane(2, 1.0, &mut h) }, NfStatus::Config);
    assert!(h.is_null());
    assert!(last_error().contains("n ≥ 3"));

    let bad = CString::new("{not json").unwrap();
    assert_ne!(unsafe { nf_immersion_from_json(bad.as_ptr(), &mut h) }, NfStatus::Ok);
    assert!(!last_error().is_empty());

    assert_eq!(unsafe { nf_immersion_from_json(ptr::null(), &mut h) }, NfStatus::NullPointer);
    let mut x = [0.0; 3];
    assert_eq!(unsafe { nf_immersion_eval(ptr::null(), 0.0, 0.0, x.as_mut_ptr(), 3) }, NfStatus::NullPointer);
    assert_eq!(unsafe { nf_immersion_dim(ptr::null()) }, 0);

    let mut p = ptr::null_mut();
    unsafe { nf_immersion_plane(3, 1.0, &mut p) };
    assert_eq!(unsafe { nf_immersion_eval(p, 0.0, 0.0, x.as_mut_ptr(), 2) }, NfStatus::BufferTooSmall);
    assert_eq!(unsafe { nf_immersion_eval(p, 2.0, 0.0, x.as_mut_ptr(), 3) }, NfStatus::Domain);
    unsafe {
        nf_immersion_free(p);
        nf_immersion_free(ptr::null_mut());
    }

    let cfg = CString::new(r#"{"experiment":"rh3","immersion":{"preset":"plane"},"rh":{"rho0":1.5}}"#).unwrap();
    let mut run = ptr::null_mut();
    assert_eq!(unsafe { nf_run(cfg.as_ptr(), &mut run) }, NfStatus::Config);
    assert!(last_error().contains("rh.rho0"), "{}", last_error());
    assert!(run.is_null());
}

#[test]
fn pipeline_run_reports_json() {
    let src = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/../../configs/rh3_spinor_disc.json")).unwrap();
    let cfg = CString::new(src).unwrap();
    let mut run = ptr::null_mut();
    assert_eq!(unsafe { nf_run(cfg.as_ptr(), &mut run) }, NfStatus::Ok, "{}", last_error());
    assert_eq!(unsafe { nf_run_passed(run) }, 1);
    let json = take_string(|b, l, n| unsafe { nf_run_report_json(run, b, l, n) });
    let v: serde_json::Value = serde_json::from_str(&json).unwrap();
    assert_eq!(v["experiment"], "rh3");
    assert_eq!(v["pass"], true);
    unsafe { nf_run_free(run) };
}

#[test]
fn header_declares_the_interface_and_compiles() {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/include/nullforge.h");
    let header = std::fs::read_to_string(path).unwrap();
    for name in [
        "nf_last_error",
        "nf_immersion_plane",
        "nf_immersion_catenoid",
        "nf_immersion_from_json",
        "nf_immersion_to_json",
        "nf_immersion_free",
        "nf_immersion_dim",
        "nf_immersion_eval",
        "nf_conformal_factor",
        "nf_flux",
        "nf_run",
        "nf_run_passed",
        "nf_run_report_json",
        "nf_run_free",
        "NF_STATUS_BUFFER_TOO_SMALL",
        "typedef struct NfImmersion NfImmersion",
    ] {
        assert!(header.contains(name), "{name} missing from header");
    }
    let Ok(out) = std::process::Command::new("cc").args(["-std=c99", "-fsyntax-only", "-x", "c", path]).output() else {
        eprintln!("no C compiler; syntax check skipped");
        return;
    };
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
}
