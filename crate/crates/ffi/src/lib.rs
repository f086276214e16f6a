//! C ABI for the surface7 lab.
//!
//! Conventions: every fallible function returns an [`S7Status`] and writes results
//! through out-pointers. On failure [`s7_last_error`] holds a message for the calling
//! thread. Handles are opaque; each `*_new`/`*_load` has a matching `*_free`, and
//! freeing NULL is a no-op. Enum arguments must hold one of their declared values. No
//! Rust panic crosses the boundary.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;
use std::sync::OnceLock;
use surface7::calibration::fit_series;
use surface7::circuits::{LogicalGate, Scheme};
use surface7::code::LogicalPauli;
use surface7::experiments::{compare_schemes, run_stabilization};
use surface7::noise::{DeviceParams, NoiseModel};
use surface7::tomography::{cardinal_preps, logical_process_tomography, TomoMode};
use surface7::Error;

/// Result of every fallible call.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum S7Status {
    Ok = 0,
    /// A required pointer was NULL.
    NullPointer = 1,
    /// Bad enumeration value, range or string argument.
    InvalidArgument = 2,
    /// File could not be read or written.
    Io = 3,
    /// Malformed JSON or CSV.
    Parse = 4,
    /// Fit, optimizer or simulation failure.
    Numerical = 5,
    /// Caller buffer shorter than the result; the required length is reported.
    BufferTooSmall = 6,
    /// Internal panic, caught at the boundary.
    Panic = 7,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum S7Scheme {
    Pipelined = 0,
    Parallel = 1,
}

impl From<S7Scheme> for Scheme {
    fn from(s: S7Scheme) -> Self {
        match s {
            S7Scheme::Pipelined => Scheme::Pipelined,
            S7Scheme::Parallel => Scheme::Parallel,
        }
    }
}

/// Device parameter table.
pub struct S7Device {
    inner: DeviceParams,
}

/// Noise model (level, device and leakage).
pub struct S7Model {
    inner: NoiseModel,
}

/// Outcome of a repeated-stabilization run.
pub struct S7Record {
    post_selected: Vec<f64>,
    expectation: Vec<f64>,
    time_ns: Vec<f64>,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

struct Fail(S7Status, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        let s = match &e {
            Error::Io(_) => S7Status::Io,
            Error::Json(_) | Error::Csv(_) => S7Status::Parse,
            e if e.is_config() => S7Status::InvalidArgument,
            _ => S7Status::Numerical,
        };
        Fail(s, e.to_string())
    }
}

fn null(what: &str) -> Fail {
    Fail(S7Status::NullPointer, format!("{what} is NULL"))
}

fn invalid(msg: impl Into<String>) -> Fail {
    Fail(S7Status::InvalidArgument, msg.into())
}

fn guard<F: FnOnce() -> Result<(), Fail>>(f: F) -> S7Status {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error("");
            S7Status::Ok
        }
        Ok(Err(Fail(s, m))) => {
            set_error(&m);
            s
        }
        Err(p) => {
            let m = p
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| p.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_error(&format!("internal panic: {m}"));
            S7Status::Panic
        }
    }
}

unsafe fn str_arg<'a>(p: *const c_char, what: &str) -> Result<&'a str, Fail> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p).to_str().map_err(|_| invalid(format!("{what} is not UTF-8")))
}

unsafe fn out<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, Fail> {
    p.as_mut().ok_or_else(|| null(what))
}

/// Message of the last failed call on this thread ("" after a success). The pointer
/// stays valid until the next call into the library from the same thread.
#[no_mangle]
pub extern "C" fn s7_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version (package version plus git describe), a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn s7_version() -> *const c_char {
    static V: OnceLock<CString> = OnceLock::new();
    V.get_or_init(|| CString::new(surface7::cli::VERSION).unwrap_or_default()).as_ptr()
}

/// Loads a device table. `spec` is `builtin:table-s1`, `builtin:example` or a JSON path.
///
/// # Safety
/// `spec` must be a NUL-terminated string; `device` a valid out-pointer.
#[no_mangle]
pub unsafe extern "C" fn s7_device_load(spec: *const c_char, device: *mut *mut S7Device) -> S7Status {
    guard(|| {
        let o = out(device, "device")?;
        *o = ptr::null_mut();
        let d = DeviceParams::resolve(str_arg(spec, "spec")?)?;
        *o = Box::into_raw(Box::new(S7Device { inner: d }));
        Ok(())
    })
}

/// # Safety
/// `device` must come from [`s7_device_load`] and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn s7_device_free(device: *mut S7Device) {
    if !device.is_null() {
        drop(Box::from_raw(device));
    }
}

/// Noise model at `level` (0 to 5) on a copy of `device`; `l1` is used at level 5.
///
/// # Safety
/// `device` must be a live handle; `model` a valid out-pointer.
#[no_mangle]
pub unsafe extern "C" fn s7_model_new(device: *const S7Device, level: u8, l1: f64, model: *mut *mut S7Model) -> S7Status {
    guard(|| {
        let o = out(model, "model")?;
        *o = ptr::null_mut();
        let d = device.as_ref().ok_or_else(|| null("device"))?;
        let m = NoiseModel::new(level, d.inner.clone(), l1)?;
        *o = Box::into_raw(Box::new(S7Model { inner: m }));
        Ok(())
    })
}

/// # Safety
/// `model` must come from [`s7_model_new`] and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn s7_model_free(model: *mut S7Model) {
    if !model.is_null() {
        drop(Box::from_raw(model));
    }
}

fn basis(b: c_char) -> Result<LogicalPauli, Fail> {
    match b as u8 {
        b'X' | b'x' => Ok(LogicalPauli::X),
        b'Y' | b'y' => Ok(LogicalPauli::Y),
        b'Z' | b'z' => Ok(LogicalPauli::Z),
        _ => Err(invalid("basis must be 'X', 'Y' or 'Z'")),
    }
}

/// Repeated stabilization of a cardinal `state` ("0", "1", "+", "-", "+i", "-i") read
/// out in `basis` after each of `cycles` rounds.
///
/// # Safety
/// `model` must be live, `state` NUL-terminated, `record` a valid out-pointer.
#[no_mangle]
pub unsafe extern "C" fn s7_stabilize(
    model: *const S7Model,
    scheme: S7Scheme,
    state: *const c_char,
    basis_char: c_char,
    cycles: usize,
    record: *mut *mut S7Record,
) -> S7Status {
    guard(|| {
        let o = out(record, "record")?;
        *o = ptr::null_mut();
        let m = model.as_ref().ok_or_else(|| null("model"))?;
        let s = str_arg(state, "state")?;
        let prep = cardinal_preps().into_iter().find(|(n, _)| *n == s).map(|(_, p)| p).ok_or_else(|| invalid(format!("unknown state {s:?}")))?;
        let b = basis(basis_char)?;
        let (rec, rows) = run_stabilization(&m.inner, scheme.into(), &prep, b, cycles)?;
        *o = Box::into_raw(Box::new(S7Record {
            post_selected: rec.post_selected(b),
            expectation: rec.expectations(b),
            time_ns: rows.iter().map(|r| r.time_ns).collect(),
        }));
        Ok(())
    })
}

/// Number of cycles in `record` (0 for NULL).
///
/// # Safety
/// `record` must be NULL or live.
#[no_mangle]
pub unsafe extern "C" fn s7_record_len(record: *const S7Record) -> usize {
    record.as_ref().map_or(0, |r| r.post_selected.len())
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum S7Series {
    /// P(n), the post-selected fraction.
    PostSelected = 0,
    /// Logical expectation value after post-selection.
    Expectation = 1,
    /// End of the final readout, ns.
    TimeNs = 2,
}

/// Copies one series into `buf` (capacity `len`). `written` receives the series length;
/// with a short buffer nothing is copied and `BufferTooSmall` is returned.
///
/// # Safety
/// `record` live; `buf` valid for `len` doubles (may be NULL when `len` is 0).
#[no_mangle]
pub unsafe extern "C" fn s7_record_series(record: *const S7Record, series: S7Series, buf: *mut f64, len: usize, written: *mut usize) -> S7Status {
    guard(|| {
        let r = record.as_ref().ok_or_else(|| null("record"))?;
        let w = out(written, "written")?;
        let v = match series {
            S7Series::PostSelected => &r.post_selected,
            S7Series::Expectation => &r.expectation,
            S7Series::TimeNs => &r.time_ns,
        };
        *w = v.len();
        if len < v.len() {
            return Err(Fail(S7Status::BufferTooSmall, format!("need {} doubles, got {len}", v.len())));
        }
        if buf.is_null() {
            return Err(null("buf"));
        }
        ptr::copy_nonoverlapping(v.as_ptr(), buf, v.len());
        Ok(())
    })
}

/// # Safety
/// `record` must come from [`s7_stabilize`] and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn s7_record_free(record: *mut S7Record) {
    if !record.is_null() {
        drop(Box::from_raw(record));
    }
}

/// Fits P(n) = A(1−γ)^n to `p[0..n]` taken at cycles 1..=n.
///
/// # Safety
/// `p` valid for `n` doubles; `amplitude` and `gamma` valid out-pointers.
#[no_mangle]
pub unsafe extern "C" fn s7_fit_decay(p: *const f64, n: usize, amplitude: *mut f64, gamma: *mut f64) -> S7Status {
    guard(|| {
        if p.is_null() {
            return Err(null("p"));
        }
        let (a, g) = (out(amplitude, "amplitude")?, out(gamma, "gamma")?);
        let f = fit_series(std::slice::from_raw_parts(p, n))?;
        *a = f.amplitude;
        *g = f.gamma;
        Ok(())
    })
}

/// Logical process tomography of `gate` (ZL, XL, TL, XL90, Z:<rad>, X:<rad>) with exact
/// readout. `ptm` may be NULL; otherwise it receives the TPCP-projected 4×4 Pauli transfer
/// matrix, row-major with rows indexing the output Pauli.
///
/// # Safety
/// `model` live, `gate` NUL-terminated, `fidelity` valid, `ptm` NULL or valid for 16 doubles.
#[no_mangle]
pub unsafe extern "C" fn s7_gate_tomography(model: *const S7Model, scheme: S7Scheme, gate: *const c_char, fidelity: *mut f64, ptm: *mut f64) -> S7Status {
    guard(|| {
        let m = model.as_ref().ok_or_else(|| null("model"))?;
        let f = out(fidelity, "fidelity")?;
        let g = LogicalGate::parse(str_arg(gate, "gate")?)?;
        let pt = logical_process_tomography(&g, &m.inner, scheme.into(), TomoMode::Exact)?;
        *f = pt.fidelity;
        if !ptm.is_null() {
            let flat: Vec<f64> = pt.projected.0.iter().flatten().copied().collect();
            ptr::copy_nonoverlapping(flat.as_ptr(), ptm, 16);
        }
        Ok(())
    })
}

/// Mean γ_pipelined/γ_parallel over the four cardinal Z and X inputs (`cycles` ≥ 5).
///
/// # Safety
/// `model` live; `ratio` a valid out-pointer.
#[no_mangle]
pub unsafe extern "C" fn s7_scheme_ratio(model: *const S7Model, cycles: usize, ratio: *mut f64) -> S7Status {
    guard(|| {
        let m = model.as_ref().ok_or_else(|| null("model"))?;
        let r = out(ratio, "ratio")?;
        let cmp = compare_schemes(cycles, &m.inner)?;
        *r = cmp.mean_ratio.ok_or_else(|| Fail(S7Status::Numerical, "parallel detection rate is zero".into()))?;
        Ok(())
    })
}

/// Runs a CLI configuration given as JSON (the `experiment` field selects the
/// subcommand) and writes its outputs and manifest to the configured directory.
///
/// # Safety
/// `config_json` must be NUL-terminated.
#[no_mangle]
pub unsafe extern "C" fn s7_run_config(config_json: *const c_char) -> S7Status {
    guard(|| {
        let text = str_arg(config_json, "config_json")?;
        let cfg: surface7::cli::RunConfig = serde_json::from_str(text).map_err(Error::from)?;
        cfg.validate()?;
        surface7::cli::run_config(&cfg)?;
        Ok(())
    })
}
