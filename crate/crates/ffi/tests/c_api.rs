use std::ffi::{CStr, CString};
use std::ptr;

use mno::harness::{empirical_risk, Config};
use mno::mno::{mno_forward, MnoParams};
use mno::sampling::generate_dataset;
use mno_ffi::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn last_error() -> String {
    unsafe { CStr::from_ptr(mno_last_error_message()) }
        .to_string_lossy()
        .into_owned()
}

fn scratch(name: &str) -> std::path::PathBuf {
    let dir = std::env::temp_dir().join(format!("mno-ffi-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

fn small_model() -> (Config, MnoParams) {
    let cfg = Config::default();
    let plan = cfg.plan().unwrap();
    let spec = cfg.model_spec(&plan).unwrap();
    let params = MnoParams::init(spec, &mut ChaCha8Rng::seed_from_u64(3)).unwrap();
    (cfg, params)
}

#[test]
fn version_is_crate_version() {
    let v = unsafe { CStr::from_ptr(mno_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}

#[test]
fn clip_and_green_kernel() {
    let mut out = 0.0;
    assert_eq!(mno_clip(1.0, 2.5, &mut out), MnoStatus::Ok);
    assert_eq!(out, 1.0);
    assert_eq!(mno_clip(1.0, -0.25, &mut out), MnoStatus::Ok);
    assert_eq!(out, -0.25);
    assert_eq!(mno_green_kernel(1.0, 0.25, 0.5, &mut out), MnoStatus::Ok);
    // min(x,y)(a − max(x,y))/a
    assert!((out - 0.125).abs() < 1e-15);
}

#[test]
fn null_out_pointer_is_reported() {
    assert_eq!(mno_clip(1.0, 0.0, ptr::null_mut()), MnoStatus::NullPointer);
    assert!(last_error().contains("result"));
    let mut out = 0.0;
    assert_eq!(mno_clip(1.0, 0.0, &mut out), MnoStatus::Ok);
    assert!(last_error().is_empty());
}

#[test]
fn domain_errors_map_to_invalid_argument() {
    let mut out = 0.0;
    assert_eq!(mno_clip(-1.0, 0.0, &mut out), MnoStatus::InvalidArgument);
    assert!(!last_error().is_empty());
    assert_eq!(mno_green_kernel(1.0, 2.0, 0.5, &mut out), MnoStatus::InvalidArgument);
}

#[test]
fn covering_of_single_constant_net() {
    // a finer scale never needs fewer balls
    let (mut a, mut b) = (0.0, 0.0);
    assert_eq!(
        mno_log_net_covering(1, 1, 1, 1, 1.0, 1.0, 1.0, 0.5, &mut a),
        MnoStatus::Ok
    );
    assert_eq!(
        mno_log_net_covering(1, 1, 1, 1, 1.0, 1.0, 1.0, 0.25, &mut b),
        MnoStatus::Ok
    );
    assert!(a.is_finite() && b >= a);
}

#[test]
fn bound_rhs_matches_library() {
    let mut out = 0.0;
    let st = mno_generalization_bound_rhs(0.5, 0.1, 10.0, 2.0, 3.0, 0.0, 1.0, 1.0, 1.0, &mut out);
    assert_eq!(st, MnoStatus::Ok);
    // 4ε² + 6η + 112/(3·10)
    let expect = 1.0 + 0.6 + 112.0 / 30.0;
    assert!((out - expect).abs() < 1e-12);
    assert_eq!(
        mno_generalization_bound_rhs(0.5, 0.1, 0.0, 2.0, 3.0, 0.0, 1.0, 1.0, 1.0, &mut out),
        MnoStatus::InvalidArgument
    );
}

#[test]
fn rate_schedule_eta() {
    let (mut eps, mut eta, mut rate) = (0.0, 0.0, 0.0);
    assert_eq!(
        mno_rate_schedule(1e8, 1, 1, 1, 0.5, &mut eps, &mut eta, &mut rate),
        MnoStatus::Ok
    );
    assert_eq!(eta, 4.0 * 0.5 / 1e8);
    assert!((rate - 4.0 * eps * eps).abs() < 1e-15);
    assert_eq!(
        mno_rate_schedule(2.0, 1, 1, 1, 0.5, &mut eps, &mut eta, &mut rate),
        MnoStatus::InvalidArgument
    );
}

#[test]
fn model_round_trip_and_forward() {
    let (_, params) = small_model();
    let json = CString::new(serde_json::to_string(&params).unwrap()).unwrap();
    let mut model: *mut MnoModel = ptr::null_mut();
    assert_eq!(mno_model_from_json(json.as_ptr(), &mut model), MnoStatus::Ok);
    assert!(!model.is_null());

    let (mut n_cw, mut n_cu, mut d_v) = (0, 0, 0);
    assert_eq!(mno_model_dims(model, &mut n_cw, &mut n_cu, &mut d_v), MnoStatus::Ok);
    assert_eq!(
        (n_cw, n_cu, d_v),
        (params.spec.n_cw(), params.spec.n_cu(), params.spec.d_v())
    );

    let alpha = vec![0.7; n_cw];
    let u: Vec<f64> = (0..n_cu).map(|i| (i as f64 * 0.3).sin()).collect();
    let x = vec![0.4; d_v];
    for clipped in [0, 1] {
        let mut out = f64::NAN;
        let st = mno_model_forward(
            model,
            alpha.as_ptr(),
            n_cw,
            u.as_ptr(),
            n_cu,
            x.as_ptr(),
            d_v,
            clipped,
            &mut out,
        );
        assert_eq!(st, MnoStatus::Ok);
        let expect = mno_forward(&params, &alpha, &u, &x, clipped != 0).unwrap();
        assert_eq!(out, expect);
    }

    let mut out = 0.0;
    let st = mno_model_forward(
        model,
        alpha.as_ptr(),
        n_cw + 1,
        u.as_ptr(),
        n_cu,
        x.as_ptr(),
        d_v,
        1,
        &mut out,
    );
    assert_eq!(st, MnoStatus::InvalidArgument);
    unsafe { mno_model_free(model) };
}

#[test]
fn bad_json_is_a_config_error() {
    let json = CString::new("{not json").unwrap();
    let mut model: *mut MnoModel = ptr::null_mut();
    assert_eq!(mno_model_from_json(json.as_ptr(), &mut model), MnoStatus::Config);
    assert!(model.is_null());
    assert_eq!(mno_model_from_json(ptr::null(), &mut model), MnoStatus::NullPointer);
}

#[test]
fn missing_file_is_io_error() {
    let path = CString::new(scratch("absent.json").to_str().unwrap()).unwrap();
    let mut model: *mut MnoModel = ptr::null_mut();
    assert_eq!(mno_model_load(path.as_ptr(), &mut model), MnoStatus::Io);
}

#[test]
fn dataset_and_risk_match_library() {
    let (cfg, params) = small_model();
    let data = generate_dataset(&cfg.plan().unwrap()).unwrap();
    let data_path = scratch("data.json");
    let model_path = scratch("model.json");
    std::fs::write(&data_path, data.to_json().unwrap()).unwrap();
    std::fs::write(&model_path, serde_json::to_string(&params).unwrap()).unwrap();

    let dp = CString::new(data_path.to_str().unwrap()).unwrap();
    let mp = CString::new(model_path.to_str().unwrap()).unwrap();
    let mut ds: *mut MnoDataset = ptr::null_mut();
    let mut model: *mut MnoModel = ptr::null_mut();
    assert_eq!(mno_dataset_load(dp.as_ptr(), &mut ds), MnoStatus::Ok);
    assert_eq!(mno_model_load(mp.as_ptr(), &mut model), MnoStatus::Ok);

    let mut len = 0;
    assert_eq!(mno_dataset_len(ds, &mut len), MnoStatus::Ok);
    assert_eq!(len, data.total_points());

    let mut risk = 0.0;
    assert_eq!(mno_model_empirical_risk(model, ds, &mut risk), MnoStatus::Ok);
    assert_eq!(risk, empirical_risk(&params, &data).unwrap());

    unsafe {
        mno_model_free(model);
        mno_dataset_free(ds);
        mno_model_free(ptr::null_mut());
        mno_dataset_free(ptr::null_mut());
    }
}

#[test]
fn header_declares_every_export() {
    let header = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/include/mno.h")).unwrap();
    for name in [
        "MnoStatus",
        "MNO_STATUS_OK",
        "typedef struct MnoModel MnoModel",
        "typedef struct MnoDataset MnoDataset",
        "mno_version",
        "mno_last_error_message",
        "mno_clip",
        "mno_green_kernel",
        "mno_log_net_covering",
        "mno_generalization_bound_rhs",
        "mno_rate_schedule",
        "mno_model_from_json",
        "mno_model_load",
        "mno_model_free",
        "mno_model_dims",
        "mno_model_forward",
        "mno_dataset_load",
        "mno_dataset_free",
        "mno_dataset_len",
        "mno_model_empirical_risk",
    ] {
        assert!(header.contains(name), "header lacks {name}");
    }
}
