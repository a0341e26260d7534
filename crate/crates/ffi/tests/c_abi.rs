use std::ffi::CStr;
use std::path::PathBuf;
use std::process::Command;
use std::ptr;

use qlink_ffi::*;

fn link(gt: f64, d: f64) -> *mut QlinkLink {
    let mut l = ptr::null_mut();
    assert_eq!(
        unsafe { qlink_link_from_scaled(gt, d, &mut l) },
        QlinkStatus::Ok
    );
    l
}

#[test]
fn link_accessors_and_validation() {
    let l = link(0.3, 2.5);
    let (mut phi, mut fsr) = (0.0, 0.0);
    unsafe {
        assert_eq!(qlink_link_phi(l, &mut phi), QlinkStatus::Ok);
        assert_eq!(qlink_link_fsr(l, &mut fsr), QlinkStatus::Ok);
        qlink_link_free(l);
    }
    assert!((phi - 2.5 * std::f64::consts::PI).abs() < 1e-14);
    assert!((fsr - std::f64::consts::PI).abs() < 1e-15);

    let mut bad = ptr::null_mut();
    let s = unsafe { qlink_link_new(1.0, 0.0, 0.0, &mut bad) };
    assert_eq!(s, QlinkStatus::InvalidParameter);
    assert!(bad.is_null());
    let msg = unsafe { CStr::from_ptr(qlink_last_error()) }
        .to_str()
        .unwrap();
    assert!(msg.contains("tau"), "{msg}");
}

#[test]
fn trajectory_matches_series() {
    let l = link(0.5, 50.0);
    let mut t = ptr::null_mut();
    unsafe {
        assert_eq!(qlink_evolve_single(l, 6.0, 200, &mut t), QlinkStatus::Ok);
        let n = qlink_trajectory_len(t);
        assert_eq!(n, 1201);
        assert_eq!(qlink_trajectory_emitters(t), 1);
        let mut times = vec![0.0; n];
        let (mut re, mut im) = (vec![0.0; n], vec![0.0; n]);
        assert_eq!(
            qlink_trajectory_times(t, times.as_mut_ptr(), n),
            QlinkStatus::Ok
        );
        assert_eq!(
            qlink_trajectory_amplitudes(t, 0, re.as_mut_ptr(), im.as_mut_ptr(), n),
            QlinkStatus::Ok
        );
        assert_eq!(
            qlink_trajectory_amplitudes(t, 0, re.as_mut_ptr(), im.as_mut_ptr(), n - 1),
            QlinkStatus::BufferTooSmall
        );
        assert_eq!(
            qlink_trajectory_amplitudes(t, 1, re.as_mut_ptr(), im.as_mut_ptr(), n),
            QlinkStatus::InvalidParameter
        );
        // An end emitter sees echoes every 2τ with phase 2φ.
        for i in [0, 400, 777, n - 1] {
            let (mut sr, mut si) = (0.0, 0.0);
            let s = qlink_series(
                0.5,
                2.0,
                100.0 * std::f64::consts::PI,
                times[i],
                &mut sr,
                &mut si,
            );
            assert_eq!(s, QlinkStatus::Ok);
            assert!(
                (re[i] - sr).abs() < 1e-8 && (im[i] - si).abs() < 1e-8,
                "t = {}",
                times[i]
            );
        }
        qlink_trajectory_free(t);
        qlink_link_free(l);
    }
}

#[test]
fn protocol_run_and_fidelity_agree() {
    let l = link(0.1, 50.0);
    let mut r = QlinkRunResult::default();
    let mut t = ptr::null_mut();
    let dur = std::f64::consts::PI / 0.1f64.sqrt();
    unsafe {
        let s = qlink_run_protocol(l, QlinkProtocol::Swap, dur, 100, 0.01, &mut r, &mut t);
        assert_eq!(s, QlinkStatus::Ok);
        let mut f = 0.0;
        assert_eq!(qlink_fidelity(t, dur, &mut f), QlinkStatus::Ok);
        assert_eq!(f, r.fidelity);
        assert_eq!(qlink_trajectory_emitters(t), 2);
        assert_eq!(
            qlink_fidelity(t, dur + 1.0, &mut f),
            QlinkStatus::OutOfRange
        );
        qlink_trajectory_free(t);
        qlink_link_free(l);
    }
    assert!((r.infidelity - (1.0 - r.fidelity)).abs() < 1e-15);
    assert!(r.loss_error > 0.0 && r.loss_error < 0.01 * r.photon_integral + 1e-15);
}

#[test]
fn eigenfrequency_buffer_protocol() {
    let l = link(0.15, 50.0);
    let fsr = std::f64::consts::PI;
    let mut count = 0usize;
    unsafe {
        let s = qlink_eigenfrequencies(l, 49.5 * fsr, 52.5 * fsr, ptr::null_mut(), 0, &mut count);
        assert_eq!(s, QlinkStatus::BufferTooSmall);
        let mut buf = vec![0.0; count];
        let s = qlink_eigenfrequencies(
            l,
            49.5 * fsr,
            52.5 * fsr,
            buf.as_mut_ptr(),
            count,
            &mut count,
        );
        assert_eq!(s, QlinkStatus::Ok);
        assert!(buf.windows(2).all(|w| w[0] < w[1]));
        qlink_link_free(l);
    }
}

#[test]
fn czkm_error_is_above_bound() {
    let mut e = 0.0;
    let s = unsafe { qlink_czkm_exact_error(0.5, 1.0, 12.0, &mut e) };
    assert_eq!(s, QlinkStatus::Ok);
    assert!(e >= (-0.5f64 * 11.0).exp() && e < 1.0);
    let s = unsafe { qlink_czkm_exact_error(0.5, 1.0, 0.5, &mut e) };
    assert_eq!(s, QlinkStatus::InvalidParameter);
}

#[test]
fn version_string() {
    let v = unsafe { CStr::from_ptr(qlink_version()) }.to_str().unwrap();
    assert_eq!(v, env!("CARGO_PKG_VERSION"));
}

/// Compiles `tests/smoke.c` against the generated header and the static
/// library when a C compiler and the archive are present.
#[test]
fn c_program_links_and_runs() {
    let crate_dir = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    let exe = std::env::current_exe().unwrap();
    let profile_dir = exe.parent().and_then(|p| p.parent()).unwrap();
    let lib = profile_dir.join("libqlink_ffi.a");
    if !lib.exists() || Command::new("cc").arg("--version").output().is_err() {
        eprintln!("skipping: no C compiler or {} missing", lib.display());
        return;
    }
    let out = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("qlink_smoke");
    let status = Command::new("cc")
        .arg(crate_dir.join("tests/smoke.c"))
        .arg("-I")
        .arg(crate_dir.join("include"))
        .arg(&lib)
        .args(["-lm", "-lpthread", "-ldl", "-o"])
        .arg(&out)
        .status()
        .unwrap();
    assert!(status.success());
    let run = Command::new(&out).output().unwrap();
    assert!(
        run.status.success(),
        "{}",
        String::from_utf8_lossy(&run.stderr)
    );
    let text = String::from_utf8(run.stdout).unwrap();
    let fields: Vec<&str> = text.split_whitespace().collect();
    assert_eq!(fields[0], env!("CARGO_PKG_VERSION"));
    assert!(fields[1].parse::<f64>().unwrap() < 1e-8);
    assert!(fields[2].parse::<f64>().unwrap() > 0.9);
    assert_eq!(fields[3], "2");
}
