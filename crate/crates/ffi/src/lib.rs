//! C interface to the `mno` crate.
//!
//! Every function returns an [`MnoStatus`]; results go through out-pointers.
//! On failure the message is available from [`mno_last_error_message`] on the
//! same thread. Models and data sets are opaque handles released with their
//! `_free` function.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;

use mno::bounds::{generalization_bound_rhs, log_net_covering, rate_schedule, Budgets};
use mno::harness::empirical_risk;
use mno::mno::{mno_forward, MnoParams};
use mno::relu_net::{clip_scalar, NetClassSpec};
use mno::sampling::HierarchicalDataset;
use mno::zoo::green_kernel;
use mno::Error;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MnoStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Config = 3,
    Numerical = 4,
    Io = 5,
    Panic = 6,
}

/// A trained model.
pub struct MnoModel {
    params: MnoParams,
}

/// A hierarchical data set.
pub struct MnoDataset {
    data: HierarchicalDataset,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

enum Fail {
    Null(&'static str),
    Lib(Error),
    Arg(String),
}

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail::Lib(e)
    }
}

fn status_of(e: &Error) -> MnoStatus {
    match e {
        _ if e.is_numerical() => MnoStatus::Numerical,
        Error::Io(_) => MnoStatus::Io,
        Error::Config(_) | Error::Json(_) | Error::Csv(_) => MnoStatus::Config,
        Error::Indexed { source, .. } => status_of(source),
        _ => MnoStatus::InvalidArgument,
    }
}

fn guard(f: impl FnOnce() -> Result<(), Fail>) -> MnoStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error("");
            MnoStatus::Ok
        }
        Ok(Err(Fail::Null(name))) => {
            set_error(&format!("null pointer: {name}"));
            MnoStatus::NullPointer
        }
        Ok(Err(Fail::Arg(msg))) => {
            set_error(&msg);
            MnoStatus::InvalidArgument
        }
        Ok(Err(Fail::Lib(e))) => {
            set_error(&e.to_string());
            status_of(&e)
        }
        Err(_) => {
            set_error("internal panic");
            MnoStatus::Panic
        }
    }
}

fn out<'a, T>(p: *mut T, name: &'static str) -> Result<&'a mut T, Fail> {
    // SAFETY: caller passes a valid, aligned, writable pointer or null.
    unsafe { p.as_mut() }.ok_or(Fail::Null(name))
}

fn slice<'a>(p: *const f64, len: usize, name: &'static str) -> Result<&'a [f64], Fail> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(Fail::Null(name));
    }
    // SAFETY: caller guarantees `p` points to `len` readable doubles.
    Ok(unsafe { std::slice::from_raw_parts(p, len) })
}

fn string(p: *const c_char, name: &'static str) -> Result<String, Fail> {
    if p.is_null() {
        return Err(Fail::Null(name));
    }
    // SAFETY: caller guarantees a NUL-terminated string.
    let s = unsafe { CStr::from_ptr(p) };
    s.to_str()
        .map(str::to_owned)
        .map_err(|_| Fail::Arg(format!("{name} is not valid UTF-8")))
}

fn read_file(path: &str) -> Result<String, Fail> {
    std::fs::read_to_string(Path::new(path)).map_err(|e| Fail::Lib(Error::Io(e)))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn mno_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Message of the last failed call on this thread; empty after a success.
/// Valid until the next call into the library on the same thread.
#[no_mangle]
pub extern "C" fn mno_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// `min(max(v, −a), a)`.
#[no_mangle]
pub extern "C" fn mno_clip(a: f64, v: f64, result: *mut f64) -> MnoStatus {
    guard(|| {
        *out(result, "result")? = clip_scalar(a, v)?;
        Ok(())
    })
}

/// Dirichlet Green kernel `K_a(x, y)` on `[0, a]`.
#[no_mangle]
pub extern "C" fn mno_green_kernel(a: f64, x: f64, y: f64, result: *mut f64) -> MnoStatus {
    guard(|| {
        *out(result, "result")? = green_kernel(a, x, y)?;
        Ok(())
    })
}

/// Natural log of the sup-norm covering number of a ReLU network class with
/// scalar output. `-inf` encodes a covering number of 0.
#[no_mangle]
pub extern "C" fn mno_log_net_covering(
    d_in: usize,
    depth: usize,
    width: usize,
    sparsity: usize,
    kappa: f64,
    output_r: f64,
    x_inf_norm: f64,
    eta: f64,
    result: *mut f64,
) -> MnoStatus {
    guard(|| {
        let spec = NetClassSpec::new(d_in, 1, depth, width, sparsity, kappa, output_r)?;
        *out(result, "result")? = log_net_covering(&spec, x_inf_norm, eta)?.value.ln();
        Ok(())
    })
}

/// Right-hand side of the expected generalization-error bound.
#[no_mangle]
pub extern "C" fn mno_generalization_bound_rhs(
    eps: f64,
    eta: f64,
    n_alpha: f64,
    n_u: f64,
    n_x: f64,
    sigma: f64,
    beta_v: f64,
    ln_n_eta: f64,
    ln_n_scaled: f64,
    result: *mut f64,
) -> MnoStatus {
    guard(|| {
        let budgets = Budgets {
            n_alpha,
            n_u,
            n_x,
            sigma,
        };
        *out(result, "result")? = generalization_bound_rhs(eps, eta, &budgets, beta_v, ln_n_eta, ln_n_scaled)?.total;
        Ok(())
    })
}

/// Accuracy `ε`, scale `η` and rate `4ε²` as functions of `n_alpha`.
#[no_mangle]
pub extern "C" fn mno_rate_schedule(
    n_alpha: f64,
    d_w: usize,
    d_u: usize,
    d_v: usize,
    beta_v: f64,
    eps: *mut f64,
    eta: *mut f64,
    rate: *mut f64,
) -> MnoStatus {
    guard(|| {
        let (e, h, r) = (out(eps, "eps")?, out(eta, "eta")?, out(rate, "rate")?);
        let s = rate_schedule(n_alpha, d_w, d_u, d_v, beta_v)?;
        (*e, *h, *r) = (s.eps, s.eta, s.rate);
        Ok(())
    })
}

fn model_from_str(text: &str) -> Result<Box<MnoModel>, Fail> {
    let params: MnoParams = serde_json::from_str(text).map_err(Error::from)?;
    params.spec.validate()?;
    params.check_shapes()?;
    Ok(Box::new(MnoModel { params }))
}

/// Parses a model from its JSON text.
#[no_mangle]
pub extern "C" fn mno_model_from_json(json: *const c_char, model: *mut *mut MnoModel) -> MnoStatus {
    guard(|| {
        let slot = out(model, "model")?;
        *slot = Box::into_raw(model_from_str(&string(json, "json")?)?);
        Ok(())
    })
}

/// Loads a model from a JSON file.
#[no_mangle]
pub extern "C" fn mno_model_load(path: *const c_char, model: *mut *mut MnoModel) -> MnoStatus {
    guard(|| {
        let slot = out(model, "model")?;
        *slot = Box::into_raw(model_from_str(&read_file(&string(path, "path")?)?)?);
        Ok(())
    })
}

/// Releases a model; null is ignored.
///
/// # Safety
/// `model` must come from `mno_model_from_json` or `mno_model_load` and not
/// have been freed already.
#[no_mangle]
pub unsafe extern "C" fn mno_model_free(model: *mut MnoModel) {
    if !model.is_null() {
        // SAFETY: per the contract above.
        drop(unsafe { Box::from_raw(model) });
    }
}

fn model_ref<'a>(m: *const MnoModel) -> Result<&'a MnoModel, Fail> {
    // SAFETY: handles are only created by this library.
    unsafe { m.as_ref() }.ok_or(Fail::Null("model"))
}

/// Input sizes `(n_cW, n_cU, d_V)` the model expects.
#[no_mangle]
pub extern "C" fn mno_model_dims(
    model: *const MnoModel,
    n_cw: *mut usize,
    n_cu: *mut usize,
    d_v: *mut usize,
) -> MnoStatus {
    guard(|| {
        let s = &model_ref(model)?.params.spec;
        *out(n_cw, "n_cw")? = s.n_cw();
        *out(n_cu, "n_cu")? = s.n_cu();
        *out(d_v, "d_v")? = s.d_v();
        Ok(())
    })
}

/// Model output at one `(ᾱ, ū, x)`; clipped unless `clipped` is 0.
#[no_mangle]
pub extern "C" fn mno_model_forward(
    model: *const MnoModel,
    alpha: *const f64,
    alpha_len: usize,
    u: *const f64,
    u_len: usize,
    x: *const f64,
    x_len: usize,
    clipped: i32,
    result: *mut f64,
) -> MnoStatus {
    guard(|| {
        let m = model_ref(model)?;
        let (a, b, c) = (
            slice(alpha, alpha_len, "alpha")?,
            slice(u, u_len, "u")?,
            slice(x, x_len, "x")?,
        );
        *out(result, "result")? = mno_forward(&m.params, a, b, c, clipped != 0)?;
        Ok(())
    })
}

/// Loads a data set from a JSON file.
#[no_mangle]
pub extern "C" fn mno_dataset_load(path: *const c_char, dataset: *mut *mut MnoDataset) -> MnoStatus {
    guard(|| {
        let slot = out(dataset, "dataset")?;
        let data = HierarchicalDataset::from_json(&read_file(&string(path, "path")?)?)?;
        *slot = Box::into_raw(Box::new(MnoDataset { data }));
        Ok(())
    })
}

/// Releases a data set; null is ignored.
///
/// # Safety
/// `dataset` must come from `mno_dataset_load` and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn mno_dataset_free(dataset: *mut MnoDataset) {
    if !dataset.is_null() {
        // SAFETY: per the contract above.
        drop(unsafe { Box::from_raw(dataset) });
    }
}

fn dataset_ref<'a>(d: *const MnoDataset) -> Result<&'a MnoDataset, Fail> {
    // SAFETY: handles are only created by this library.
    unsafe { d.as_ref() }.ok_or(Fail::Null("dataset"))
}

/// Number of observations `n_α n_u n_x`.
#[no_mangle]
pub extern "C" fn mno_dataset_len(dataset: *const MnoDataset, len: *mut usize) -> MnoStatus {
    guard(|| {
        let d = dataset_ref(dataset)?;
        *out(len, "len")? = d.data.total_points();
        Ok(())
    })
}

/// Mean clipped squared loss of the model on the data set.
#[no_mangle]
pub extern "C" fn mno_model_empirical_risk(
    model: *const MnoModel,
    dataset: *const MnoDataset,
    result: *mut f64,
) -> MnoStatus {
    guard(|| {
        let m = model_ref(model)?;
        let d = dataset_ref(dataset)?;
        *out(result, "result")? = empirical_risk(&m.params, &d.data)?;
        Ok(())
    })
}
