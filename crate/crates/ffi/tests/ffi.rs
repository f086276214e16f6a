use std::ffi::{CStr, CString};
use std::path::{Path, PathBuf};
use std::process::Command;
use std::ptr;
use surface7_ffi::*;

fn last_error() -> String {
    unsafe { CStr::from_ptr(s7_last_error()).to_string_lossy().into_owned() }
}

fn model(level: u8) -> (*mut S7Device, *mut S7Model) {
    let mut d = ptr::null_mut();
    let mut m = ptr::null_mut();
    let spec = CString::new("builtin:table-s1").unwrap();
    unsafe {
        assert_eq!(s7_device_load(spec.as_ptr(), &mut d), S7Status::Ok);
        assert_eq!(s7_model_new(d, level, 0.0, &mut m), S7Status::Ok);
    }
    (d, m)
}

#[test]
fn status_codes_and_messages() {
    unsafe {
        let mut m = ptr::null_mut();
        assert_eq!(s7_model_new(ptr::null(), 1, 0.0, &mut m), S7Status::NullPointer);
        assert!(m.is_null());
        assert!(last_error().contains("device"));

        let (d, good) = model(1);
        assert_eq!(last_error(), "");
        assert_eq!(s7_model_new(d, 9, 0.0, &mut m), S7Status::InvalidArgument);
        assert!(!last_error().is_empty());

        let missing = CString::new("/no/such/device.json").unwrap();
        let mut d2 = ptr::null_mut();
        assert_ne!(s7_device_load(missing.as_ptr(), &mut d2), S7Status::Ok);
        assert!(d2.is_null());

        let mut rec = ptr::null_mut();
        let bad_state = CString::new("2").unwrap();
        assert_eq!(s7_stabilize(good, S7Scheme::Pipelined, bad_state.as_ptr(), b'Z' as _, 3, &mut rec), S7Status::InvalidArgument);
        let zero = CString::new("0").unwrap();
        assert_eq!(s7_stabilize(good, S7Scheme::Pipelined, zero.as_ptr(), b'Q' as _, 3, &mut rec), S7Status::InvalidArgument);

        let p = [0.5, 0.0, 0.2];
        let (mut a, mut g) = (0.0, 0.0);
        assert_eq!(s7_fit_decay(p.as_ptr(), 3, &mut a, &mut g), S7Status::Numerical);
        assert_eq!(s7_fit_decay(ptr::null(), 3, &mut a, &mut g), S7Status::NullPointer);

        let bad = CString::new("{\"experiment\": \"stabilize\", \"noise\": ").unwrap();
        assert_eq!(s7_run_config(bad.as_ptr()), S7Status::Parse);

        s7_model_free(good);
        s7_device_free(d);
        s7_model_free(ptr::null_mut());
        s7_record_free(ptr::null_mut());
        assert_eq!(s7_record_len(ptr::null()), 0);
    }
}

#[test]
fn results_match_the_library() {
    unsafe {
        let (d, m) = model(1);
        let mut rec = ptr::null_mut();
        let plus = CString::new("+").unwrap();
        assert_eq!(s7_stabilize(m, S7Scheme::Parallel, plus.as_ptr(), b'X' as _, 4, &mut rec), S7Status::Ok);
        let mut buf = [0.0; 4];
        let mut n = 0;
        assert_eq!(s7_record_series(rec, S7Series::PostSelected, buf.as_mut_ptr(), 4, &mut n), S7Status::Ok);

        let model = surface7::noise::NoiseModel::new(1, surface7::noise::DeviceParams::table_s1(), 0.0).unwrap();
        let prep = surface7::tomography::cardinal_preps()[2].1;
        let (r, _) = surface7::experiments::run_stabilization(&model, surface7::circuits::Scheme::Parallel, &prep, surface7::code::LogicalPauli::X, 4).unwrap();
        assert_eq!(buf.to_vec(), r.post_selected(surface7::code::LogicalPauli::X));
        let mut ex = [0.0; 4];
        assert_eq!(s7_record_series(rec, S7Series::Expectation, ex.as_mut_ptr(), 4, &mut n), S7Status::Ok);
        assert_eq!(ex.to_vec(), r.expectations(surface7::code::LogicalPauli::X));

        let mut ratio = 0.0;
        assert_eq!(s7_scheme_ratio(m, 5, &mut ratio), S7Status::Ok);
        assert!(ratio > 0.0 && ratio < 1.0, "{ratio}");
        assert_eq!(s7_scheme_ratio(m, 2, &mut ratio), S7Status::InvalidArgument);

        s7_record_free(rec);
        s7_model_free(m);
        s7_device_free(d);
    }
}

#[test]
fn run_config_writes_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = serde_json::json!({ "experiment": "stabilize", "noise": 0, "cycles": 3, "out": dir.path() });
    let c = CString::new(cfg.to_string()).unwrap();
    assert_eq!(unsafe { s7_run_config(c.as_ptr()) }, S7Status::Ok);
    assert!(dir.path().join("fig4d.csv").is_file() && dir.path().join("manifest.json").is_file());
}

fn crate_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
}

#[test]
fn header_declares_every_export() {
    let src = std::fs::read_to_string(crate_dir().join("src/lib.rs")).unwrap();
    let header = std::fs::read_to_string(crate_dir().join("include/surface7.h")).unwrap();
    let mut n = 0;
    for line in src.lines() {
        if let Some(rest) = line.split("extern \"C\" fn ").nth(1) {
            let name = rest.split('(').next().unwrap();
            assert!(header.contains(&format!("{name}(")), "{name} missing from header");
            n += 1;
        }
    }
    assert!(n >= 12, "{n}");
    for t in ["typedef struct S7Device S7Device;", "typedef struct S7Model S7Model;", "typedef struct S7Record S7Record;", "S7_STATUS_PANIC = 7"] {
        assert!(header.contains(t), "{t}");
    }
}

/// Directory holding the library artifacts next to this test binary.
fn artifact_dir() -> PathBuf {
    let exe = std::env::current_exe().unwrap();
    exe.parent().and_then(Path::parent).unwrap().to_path_buf()
}

#[test]
fn c_program_links_and_runs() {
    let lib = artifact_dir().join("libsurface7_ffi.a");
    assert!(lib.is_file(), "{} not built", lib.display());
    let tmp = tempfile::tempdir().unwrap();
    let exe = tmp.path().join("smoke");
    let cc = std::env::var("CC").unwrap_or_else(|_| "cc".into());
    let st = Command::new(&cc)
        .args(["-std=c99", "-Wall", "-Werror", "-I"])
        .arg(crate_dir().join("include"))
        .arg(crate_dir().join("tests/c/smoke.c"))
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&exe)
        .status()
        .unwrap();
    assert!(st.success(), "C compile failed");
    let out = Command::new(&exe).output().unwrap();
    assert!(out.status.success(), "exit {:?}: {}", out.status.code(), String::from_utf8_lossy(&out.stderr));
    assert!(String::from_utf8_lossy(&out.stdout).starts_with("ok "));
}
