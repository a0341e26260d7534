//! C ABI over the `qlink` simulator.
//!
//! Links and trajectories are opaque heap handles released with their
//! `*_free` function. Every fallible call returns a [`QlinkStatus`]; on
//! failure [`qlink_last_error`] describes the problem for the calling thread.
//! Panics never cross the boundary and are reported as
//! [`QlinkStatus::Panic`].

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use qlink::analytic::{eigenfrequencies, series_solution, SeriesParams};
use qlink::protocols::{czkm_exact_error, fidelity, run_protocol, ProtocolKind, ProtocolSpec};
use qlink::{
    evolve_single, Complex64, Error, LinkParams, PulseProfile, RoundTrip, TimeGrid, Trajectory,
};

/// Result codes.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QlinkStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidParameter = 2,
    GridMisaligned = 3,
    OutOfRange = 4,
    Truncation = 5,
    StepTooCoarse = 6,
    Optimization = 7,
    BufferTooSmall = 8,
    Io = 9,
    Panic = 10,
}

/// State-transfer protocol families.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QlinkProtocol {
    Swap = 0,
    Stirap = 1,
    Czkm = 2,
}

/// Scalar outcome of one protocol run.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct QlinkRunResult {
    pub fidelity: f64,
    pub infidelity: f64,
    pub loss_error: f64,
    pub photon_integral: f64,
}

/// Opaque link parameters.
pub struct QlinkLink(LinkParams);

/// Opaque sampled trajectory.
pub struct QlinkTrajectory(Trajectory);

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status_of(e: &Error) -> QlinkStatus {
    match e {
        Error::InvalidParameter { .. }
        | Error::LadderCrossesZero { .. }
        | Error::DensityNotNormalized(_) => QlinkStatus::InvalidParameter,
        Error::GridMisaligned(_) => QlinkStatus::GridMisaligned,
        Error::OutOfRange { .. } => QlinkStatus::OutOfRange,
        Error::Truncation { .. } => QlinkStatus::Truncation,
        Error::StepTooCoarse(_) => QlinkStatus::StepTooCoarse,
        Error::Optimization(_) => QlinkStatus::Optimization,
        Error::Io(_) | Error::Json(_) => QlinkStatus::Io,
    }
}

struct Fail(QlinkStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail(status_of(&e), e.to_string())
    }
}

fn null(name: &str) -> Fail {
    Fail(QlinkStatus::NullPointer, format!("`{name}` is null"))
}

fn guard(f: impl FnOnce() -> Result<(), Fail>) -> QlinkStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => QlinkStatus::Ok,
        Ok(Err(Fail(code, msg))) => {
            set_error(msg);
            code
        }
        Err(p) => {
            let msg = p
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| p.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".to_string());
            set_error(format!("panic: {msg}"));
            QlinkStatus::Panic
        }
    }
}

unsafe fn deref<'a, T>(p: *const T, name: &str) -> Result<&'a T, Fail> {
    p.as_ref().ok_or_else(|| null(name))
}

unsafe fn write_out<T>(out: *mut T, value: T, name: &str) -> Result<(), Fail> {
    if out.is_null() {
        return Err(null(name));
    }
    out.write(value);
    Ok(())
}

/// Copies `src` into `dst[..cap]`, failing when it does not fit.
unsafe fn fill(
    dst: *mut f64,
    cap: usize,
    src: impl ExactSizeIterator<Item = f64>,
) -> Result<(), Fail> {
    let n = src.len();
    if n > cap {
        return Err(Fail(
            QlinkStatus::BufferTooSmall,
            format!("need {n} elements, buffer holds {cap}"),
        ));
    }
    if n > 0 && dst.is_null() {
        return Err(null("buffer"));
    }
    for (i, x) in src.enumerate() {
        dst.add(i).write(x);
    }
    Ok(())
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn qlink_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Message of the last failed call on this thread. The pointer stays valid
/// until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn qlink_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Creates a link with decay scale `gamma0`, traversal time `tau` and
/// emitter frequency `delta`.
///
/// # Safety
/// `out` must be a valid pointer to writable storage for one handle.
#[no_mangle]
pub unsafe extern "C" fn qlink_link_new(
    gamma0: f64,
    tau: f64,
    delta: f64,
    out: *mut *mut QlinkLink,
) -> QlinkStatus {
    guard(|| {
        let link = LinkParams::new(gamma0, tau, delta)?;
        write_out(out, Box::into_raw(Box::new(QlinkLink(link))), "out")
    })
}

/// Creates a link from `γ₀τ` and `Δ/δω_FSR` with `τ = 1`.
///
/// # Safety
/// `out` must be a valid pointer to writable storage for one handle.
#[no_mangle]
pub unsafe extern "C" fn qlink_link_from_scaled(
    gamma0_tau: f64,
    delta_over_fsr: f64,
    out: *mut *mut QlinkLink,
) -> QlinkStatus {
    guard(|| {
        let link = LinkParams::from_scaled(gamma0_tau, delta_over_fsr)?;
        write_out(out, Box::into_raw(Box::new(QlinkLink(link))), "out")
    })
}

/// Releases a link. Null is ignored.
///
/// # Safety
/// `link` must come from a `qlink_link_*` constructor and not be used again.
#[no_mangle]
pub unsafe extern "C" fn qlink_link_free(link: *mut QlinkLink) {
    if !link.is_null() {
        drop(Box::from_raw(link));
    }
}

/// Single-traversal phase `φ = Δτ`.
///
/// # Safety
/// `link` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn qlink_link_phi(link: *const QlinkLink, out: *mut f64) -> QlinkStatus {
    guard(|| write_out(out, deref(link, "link")?.0.phi(), "out"))
}

/// Free spectral range `π/τ`.
///
/// # Safety
/// `link` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn qlink_link_fsr(link: *const QlinkLink, out: *mut f64) -> QlinkStatus {
    guard(|| write_out(out, deref(link, "link")?.0.fsr(), "out"))
}

/// One emitter at an end of the link, excited at `t = 0` and coupled at
/// the link's `γ₀` until `t_end`.
///
/// # Safety
/// `link` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn qlink_evolve_single(
    link: *const QlinkLink,
    t_end: f64,
    steps_per_tau: usize,
    out: *mut *mut QlinkTrajectory,
) -> QlinkStatus {
    guard(|| {
        let link = &deref(link, "link")?.0;
        let grid = TimeGrid::new(link.tau(), steps_per_tau, t_end)?;
        let pulse = PulseProfile::constant(link.gamma0(), 0.0, t_end)?;
        let traj = evolve_single(
            &pulse,
            Complex64::new(1.0, 0.0),
            &grid,
            RoundTrip::two_ended(link),
        )?;
        write_out(out, Box::into_raw(Box::new(QlinkTrajectory(traj))), "out")
    })
}

fn kind(p: QlinkProtocol) -> ProtocolKind {
    match p {
        QlinkProtocol::Swap => ProtocolKind::Swap,
        QlinkProtocol::Stirap => ProtocolKind::Stirap,
        QlinkProtocol::Czkm => ProtocolKind::Czkm,
    }
}

/// Runs a protocol of length `duration` from `c = (1, 0)`. `result` and
/// `trajectory` are each optional (null to skip).
///
/// # Safety
/// `link` must be a live handle; non-null outputs must be writable.
#[no_mangle]
pub unsafe extern "C" fn qlink_run_protocol(
    link: *const QlinkLink,
    protocol: QlinkProtocol,
    duration: f64,
    steps_per_tau: usize,
    kappa: f64,
    result: *mut QlinkRunResult,
    trajectory: *mut *mut QlinkTrajectory,
) -> QlinkStatus {
    guard(|| {
        let link = &deref(link, "link")?.0;
        let spec = ProtocolSpec::new(kind(protocol), link.gamma0(), duration)?;
        let run = run_protocol(&spec, link, steps_per_tau, kappa)?;
        if !result.is_null() {
            result.write(QlinkRunResult {
                fidelity: run.fidelity,
                infidelity: run.infidelity,
                loss_error: run.loss_error,
                photon_integral: run.photon_integral,
            });
        }
        if !trajectory.is_null() {
            trajectory.write(Box::into_raw(Box::new(QlinkTrajectory(run.trajectory))));
        }
        Ok(())
    })
}

/// Releases a trajectory. Null is ignored.
///
/// # Safety
/// `traj` must come from this library and not be used again.
#[no_mangle]
pub unsafe extern "C" fn qlink_trajectory_free(traj: *mut QlinkTrajectory) {
    if !traj.is_null() {
        drop(Box::from_raw(traj));
    }
}

/// Number of time samples, or 0 for null.
///
/// # Safety
/// `traj` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn qlink_trajectory_len(traj: *const QlinkTrajectory) -> usize {
    traj.as_ref().map_or(0, |t| t.0.len())
}

/// Number of emitters, or 0 for null.
///
/// # Safety
/// `traj` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn qlink_trajectory_emitters(traj: *const QlinkTrajectory) -> usize {
    traj.as_ref().map_or(0, |t| t.0.emitters())
}

/// Copies the sample times into `buf`, which must hold
/// `qlink_trajectory_len` values.
///
/// # Safety
/// `traj` must be a live handle and `buf` valid for `cap` writes.
#[no_mangle]
pub unsafe extern "C" fn qlink_trajectory_times(
    traj: *const QlinkTrajectory,
    buf: *mut f64,
    cap: usize,
) -> QlinkStatus {
    guard(|| fill(buf, cap, deref(traj, "traj")?.0.times().iter().copied()))
}

/// Copies the real and imaginary parts of `c_emitter(t_i)`.
///
/// # Safety
/// `traj` must be a live handle; `re` and `im` valid for `cap` writes.
#[no_mangle]
pub unsafe extern "C" fn qlink_trajectory_amplitudes(
    traj: *const QlinkTrajectory,
    emitter: usize,
    re: *mut f64,
    im: *mut f64,
    cap: usize,
) -> QlinkStatus {
    guard(|| {
        let t = &deref(traj, "traj")?.0;
        if emitter >= t.emitters() {
            return Err(Fail(
                QlinkStatus::InvalidParameter,
                format!("emitter {emitter} out of range"),
            ));
        }
        let c = t.amplitudes(emitter);
        fill(re, cap, c.iter().map(|z| z.re))?;
        fill(im, cap, c.iter().map(|z| z.im))
    })
}

/// Transfer fidelity `|c₂(t)|²` of a two-emitter trajectory.
///
/// # Safety
/// `traj` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn qlink_fidelity(
    traj: *const QlinkTrajectory,
    t: f64,
    out: *mut f64,
) -> QlinkStatus {
    guard(|| write_out(out, fidelity(&deref(traj, "traj")?.0, t)?, "out"))
}

/// Eigenfrequencies of the single-emitter link in `[lo, hi]`. `count`
/// always receives the number of roots; the call fails with
/// `BufferTooSmall` when `cap` is less.
///
/// # Safety
/// `link` must be a live handle, `count` writable, `buf` valid for `cap`
/// writes.
#[no_mangle]
pub unsafe extern "C" fn qlink_eigenfrequencies(
    link: *const QlinkLink,
    lo: f64,
    hi: f64,
    buf: *mut f64,
    cap: usize,
    count: *mut usize,
) -> QlinkStatus {
    guard(|| {
        let roots = eigenfrequencies(&deref(link, "link")?.0, (lo, hi))?;
        write_out(count, roots.len(), "count")?;
        fill(buf, cap, roots.into_iter())
    })
}

/// Exact single-emitter amplitude at `t` for decay `gamma`, echo delay
/// `delay` and echo phase `phi`, starting from `c(0) = 1`.
///
/// # Safety
/// `re` and `im` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qlink_series(
    gamma: f64,
    delay: f64,
    phi: f64,
    t: f64,
    re: *mut f64,
    im: *mut f64,
) -> QlinkStatus {
    guard(|| {
        let p = SeriesParams::new(gamma, delay, phi, t.max(0.0))?;
        let c = series_solution(&p, t)?;
        write_out(re, c.re, "re")?;
        write_out(im, c.im, "im")
    })
}

/// Exact infidelity of the resonant `tanh`-ramp protocol of length
/// `duration`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qlink_czkm_exact_error(
    gamma0: f64,
    tau: f64,
    duration: f64,
    out: *mut f64,
) -> QlinkStatus {
    guard(|| write_out(out, czkm_exact_error(gamma0, tau, duration)?, "out"))
}
