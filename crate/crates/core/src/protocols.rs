//! State-transfer protocols between the two emitters: pulse generators,
//! fidelity, photon loss, and the exact error of the tanh-shaped protocol.

use std::io::Write;

use log::warn;
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::dde::{evolve_pair, evolve_single, RoundTrip};
use crate::error::{invalid, Error, Result};
use crate::grid::TimeGrid;
use crate::io::{write_metadata, write_row};
use crate::link::LinkParams;
use crate::pulse::{PulseProfile, PulseShape};
use crate::trajectory::Trajectory;

/// Floor applied to `1 − ∫|ψ|²` when deriving couplings from a wavepacket.
pub const DENOMINATOR_FLOOR: f64 = 1e-12;

/// Sampled photon wavepacket density `|ψ(t)|²`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Wavepacket {
    pub times: Vec<f64>,
    pub density: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ProtocolKind {
    /// Both couplings held at `γ₀`.
    Swap,
    /// Counterintuitive `sin²` ramps: the receiver opens first.
    Stirap,
    /// `tanh` ramps that emit and absorb a `sech` wavepacket.
    Czkm,
    /// Couplings derived from a user wavepacket, capped at `γ₀`.
    Shaped { wavepacket: Wavepacket },
}

impl ProtocolKind {
    pub fn name(&self) -> &'static str {
        match self {
            ProtocolKind::Swap => "swap",
            ProtocolKind::Stirap => "stirap",
            ProtocolKind::Czkm => "czkm",
            ProtocolKind::Shaped { .. } => "shaped",
        }
    }
}

/// A protocol family with its resource cap `γ₀` and duration `T`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProtocolSpec {
    pub kind: ProtocolKind,
    pub gamma0: f64,
    pub duration: f64,
}

impl ProtocolSpec {
    pub fn new(kind: ProtocolKind, gamma0: f64, duration: f64) -> Result<Self> {
        if !(gamma0.is_finite() && gamma0 >= 0.0) {
            return Err(invalid("gamma0", "must be finite and >= 0"));
        }
        if !(duration.is_finite() && duration > 0.0) {
            return Err(invalid(
                "duration",
                format!("must be finite and > 0, got {duration}"),
            ));
        }
        Ok(Self {
            kind,
            gamma0,
            duration,
        })
    }

    /// Center of the receiver's `tanh` ramp, `T/2 + τ/2`.
    pub fn t_c(&self, link: &LinkParams) -> f64 {
        0.5 * (self.duration + link.tau())
    }
}

/// Sender and receiver couplings for `spec`, both supported on `[0, T]`.
///
/// STIRAP: `γ₁ = γ₀ sin²(πt/2T)`, `γ₂(t) = γ₁(T − t)`.
/// CZKM: the sender ramp is centered at `(T − τ)/2` and the receiver is its
/// mirror image about `T/2`, centered at `t_c = (T + τ)/2`, so the receiver
/// sees the sender's wavepacket after the traversal delay.
pub fn make_pulses(spec: &ProtocolSpec, link: &LinkParams) -> Result<(PulseProfile, PulseProfile)> {
    let g = spec.gamma0;
    let t = spec.duration;
    match &spec.kind {
        ProtocolKind::Swap => Ok((
            PulseProfile::constant(g, 0.0, t)?,
            PulseProfile::constant(g, 0.0, t)?,
        )),
        ProtocolKind::Stirap => {
            let p = PulseProfile::sin_sq(g, t)?;
            Ok((p.clone(), p.mirrored(0.5 * t)?))
        }
        ProtocolKind::Czkm => {
            if t <= link.tau() {
                return Err(invalid("duration", "CZKM needs T > τ"));
            }
            let p = PulseProfile::tanh_czkm(g, 0.5 * (t - link.tau()), 0.0, t)?;
            Ok((p.clone(), p.mirrored(0.5 * t)?))
        }
        ProtocolKind::Shaped { wavepacket } => {
            let sender = shaped_pulse(wavepacket, wavepacket.times[0], g)?;
            let receiver = shaped_receiver(wavepacket, link.tau(), g)?;
            Ok((clip(sender, t)?, clip(receiver, t)?))
        }
    }
}

fn clip(p: PulseProfile, t_end: f64) -> Result<PulseProfile> {
    let (a, b) = p.support();
    let end = b.min(t_end);
    PulseProfile::new(p.shape().clone(), a.min(end), end)
}

fn cumulative(times: &[f64], density: &[f64]) -> Vec<f64> {
    let mut acc = Vec::with_capacity(times.len());
    let mut s = 0.0;
    acc.push(0.0);
    for i in 1..times.len() {
        s += 0.5 * (density[i] + density[i - 1]) * (times[i] - times[i - 1]);
        acc.push(s);
    }
    acc
}

fn check_wavepacket(w: &Wavepacket) -> Result<()> {
    if w.times.len() < 2 || w.times.len() != w.density.len() {
        return Err(invalid("wavepacket", "need >= 2 samples of equal length"));
    }
    if w.times.windows(2).any(|x| x[1] <= x[0]) {
        return Err(invalid(
            "wavepacket",
            "time axis must be strictly increasing",
        ));
    }
    if w.density.iter().any(|d| !(d.is_finite() && *d >= 0.0)) {
        return Err(invalid("wavepacket", "density must be finite and >= 0"));
    }
    Ok(())
}

fn shaped_values(density: &[f64], cum: &[f64], gamma_max: f64) -> (Vec<f64>, bool) {
    let mut saturated = false;
    let values = density
        .iter()
        .zip(cum)
        .map(|(&d, &c)| {
            let den = 1.0 - c;
            if den < DENOMINATOR_FLOOR && d > 0.0 {
                saturated = true;
            }
            let v = d / den.max(DENOMINATOR_FLOOR);
            if v > gamma_max {
                saturated = true;
                gamma_max
            } else {
                v
            }
        })
        .collect();
    (values, saturated)
}

/// Sender coupling that emits the wavepacket `|ψ|²`:
/// `γ₁(t) = |ψ(t)|² / (1 − ∫_{t0}^{t} |ψ|²)`, capped at `gamma_max`.
pub fn shaped_pulse(w: &Wavepacket, t0: f64, gamma_max: f64) -> Result<PulseProfile> {
    check_wavepacket(w)?;
    if !(gamma_max.is_finite() && gamma_max > 0.0) {
        return Err(invalid("gamma_max", "must be finite and > 0"));
    }
    let start = w.times.partition_point(|&t| t < t0);
    if start >= w.times.len() - 1 {
        return Err(invalid("t0", "no samples after t0"));
    }
    let times = w.times[start..].to_vec();
    let density = w.density[start..].to_vec();
    let cum = cumulative(&times, &density);
    let total = *cum.last().unwrap();
    if total > 1.0 + 1e-9 {
        return Err(Error::DensityNotNormalized(total));
    }
    let (values, saturated) = shaped_values(&density, &cum, gamma_max);
    if saturated {
        warn!("shaped pulse saturated at gamma_max = {gamma_max}");
    }
    let (a, b) = (times[0], times[times.len() - 1]);
    PulseProfile::new(
        PulseShape::Shaped {
            times,
            density,
            values,
            gamma_max,
            saturated,
        },
        a,
        b,
    )
}

/// Receiver coupling that absorbs the wavepacket after a delay:
/// `γ₂(t) = |ψ(t−d)|² / ∫^{t−d} |ψ|²`, capped at `gamma_max`.
pub fn shaped_receiver(w: &Wavepacket, delay: f64, gamma_max: f64) -> Result<PulseProfile> {
    check_wavepacket(w)?;
    if !(gamma_max.is_finite() && gamma_max > 0.0) {
        return Err(invalid("gamma_max", "must be finite and > 0"));
    }
    let times: Vec<f64> = w.times.iter().map(|t| t + delay).collect();
    let cum = cumulative(&w.times, &w.density);
    let total = *cum.last().unwrap();
    if total > 1.0 + 1e-9 {
        return Err(Error::DensityNotNormalized(total));
    }
    // Time-reversed sender: the "remaining" norm is the norm already received.
    let received: Vec<f64> = cum.iter().map(|c| 1.0 - c).collect();
    let (values, saturated) = shaped_values(&w.density, &received, gamma_max);
    if saturated {
        warn!("shaped receiver saturated at gamma_max = {gamma_max}");
    }
    let (a, b) = (times[0], times[times.len() - 1]);
    PulseProfile::new(
        PulseShape::Shaped {
            times,
            density: w.density.clone(),
            values,
            gamma_max,
            saturated,
        },
        a,
        b,
    )
}

/// `|c₂(T)|²`.
pub fn fidelity(traj: &Trajectory, t: f64) -> Result<f64> {
    if traj.emitters() < 2 {
        return Err(invalid("trajectory", "fidelity needs two emitters"));
    }
    Ok(traj.amplitude_at(1, t)?.norm_sqr().min(1.0))
}

/// `∫ n(t) dt` over the whole trajectory by the trapezoid rule.
pub fn photon_integral(traj: &Trajectory) -> f64 {
    let t = traj.times();
    (1..t.len())
        .map(|i| 0.5 * (traj.photon_number(i) + traj.photon_number(i - 1)) * (t[i] - t[i - 1]))
        .sum()
}

/// `1 − exp(−κ ∫ n dt)` over the trajectory.
pub fn loss_error(traj: &Trajectory, kappa: f64) -> Result<f64> {
    if !(kappa.is_finite() && kappa >= 0.0) {
        return Err(invalid("kappa", "must be finite and >= 0"));
    }
    Ok(-(-kappa * photon_integral(traj)).exp_m1())
}

/// `exp(−γ₀ (T − τ))`, the smallest error any protocol with couplings
/// capped at `γ₀` can reach.
pub fn czkm_bound(gamma0: f64, tau: f64, duration: f64) -> Result<f64> {
    if duration < tau {
        return Err(invalid("duration", "need T >= τ"));
    }
    Ok((-gamma0 * (duration - tau)).exp())
}

/// Exact infidelity of the CZKM protocol on a resonant link, from the
/// bright-mode reduction. See [`czkm_exact_error_with`].
pub fn czkm_exact_error(gamma0: f64, tau: f64, duration: f64) -> Result<f64> {
    let link = LinkParams::new(gamma0, tau, 0.0)?;
    czkm_exact_error_with(&link, duration, crate::grid::DEFAULT_STEPS_PER_TAU)
}

/// Exact CZKM infidelity for `link`.
///
/// In the rotated variables `d = (√γ̄₂ c₁ − √γ₁ c̄₂)/√γ₀` and
/// `b = (√γ₁ c₁ + √γ̄₂ c̄₂)/√γ₀`, with `c̄₂(t) = e^{−iφ} c₂(t+τ)`, the dark
/// amplitude is conserved and `b = √b̃ β` where `β` obeys the single-emitter
/// equation with constant coupling `γ₀`, round trip `2τ` and phase `2φ`,
/// run for `T_eff = T − τ` from `β = 1`. With `u = tanh(γ₀ T_eff / 4)`,
/// `a = (1+u)/2` and `b̃ = (1−u)/2`,
///
/// ```text
/// ε = 1 − |a − b̃ β(T_eff)|² = b̃ [(1 + a) + 2a Re β − b̃ |β|²]
/// ```
///
/// The second form avoids the cancellation in `1 − F` for large `γ₀ T_eff`.
pub fn czkm_exact_error_with(
    link: &LinkParams,
    duration: f64,
    steps_per_tau: usize,
) -> Result<f64> {
    let tau = link.tau();
    if duration <= tau {
        return Err(invalid("duration", "CZKM needs T > τ"));
    }
    let g = link.gamma0();
    let t_eff = duration - tau;
    let beta = czkm_beta(link, t_eff, steps_per_tau)?;
    let u = (0.25 * g * t_eff).tanh();
    let a = 0.5 * (1.0 + u);
    let bt = 1.0 / (1.0 + (0.5 * g * t_eff).exp());
    Ok((bt * ((1.0 + a) + 2.0 * a * beta.re - bt * beta.norm_sqr())).clamp(0.0, 1.0))
}

/// Large-`γ₀ T_eff` form `2 e^{−γ₀ T_eff/2} [1 + Re β(T_eff)]`.
pub fn czkm_asymptotic_error(
    link: &LinkParams,
    duration: f64,
    steps_per_tau: usize,
) -> Result<f64> {
    let t_eff = duration - link.tau();
    let beta = czkm_beta(link, t_eff, steps_per_tau)?;
    Ok(2.0 * (-0.5 * link.gamma0() * t_eff).exp() * (1.0 + beta.re))
}

/// `β(T_eff)`: single emitter with constant `γ₀`, round trip `2τ`.
pub fn czkm_beta(link: &LinkParams, t_eff: f64, steps_per_tau: usize) -> Result<C64> {
    let pulse = PulseProfile::constant(link.gamma0(), 0.0, t_eff)?;
    let grid = TimeGrid::new(link.tau(), steps_per_tau, t_eff)?;
    let tr = evolve_single(
        &pulse,
        C64::new(1.0, 0.0),
        &grid,
        RoundTrip::two_ended(link),
    )?;
    Ok(*tr.amplitudes(0).last().unwrap())
}

/// Dark and bright amplitudes of a two-emitter trajectory.
#[derive(Debug, Clone, Serialize)]
pub struct DarkBrightState {
    pub times: Vec<f64>,
    pub d: Vec<C64>,
    pub b: Vec<C64>,
    /// `tanh(γ₀ T_eff / 4)`.
    pub u: f64,
    /// `T − τ`.
    pub t_eff: f64,
}

impl DarkBrightState {
    /// Largest `|d(t) − d(0)|`.
    pub fn dark_drift(&self) -> f64 {
        let d0 = self.d.first().copied().unwrap_or_default();
        self.d.iter().map(|d| (d - d0).norm()).fold(0.0, f64::max)
    }

    pub fn write_csv<W: Write>(&self, w: &mut W, meta: &[(&str, String)]) -> Result<()> {
        write_metadata(w, meta)?;
        writeln!(w, "t,re_d,im_d,re_b,im_b")?;
        for i in 0..self.times.len() {
            write_row(
                w,
                &[
                    self.times[i],
                    self.d[i].re,
                    self.d[i].im,
                    self.b[i].re,
                    self.b[i].im,
                ],
            )?;
        }
        Ok(())
    }
}

/// Rotates `(c₁(t), c̄₂(t))` into dark and bright amplitudes, using
/// `γ̄₂(t) = γ₂(t+τ)` and `c̄₂(t) = e^{−iφ} c₂(t+τ)`. Nodes with `t + τ`
/// past the end of the trajectory are omitted.
pub fn dark_bright(
    traj: &Trajectory,
    pulses: (&PulseProfile, &PulseProfile),
    link: &LinkParams,
) -> Result<DarkBrightState> {
    if traj.emitters() < 2 {
        return Err(invalid("trajectory", "needs two emitters"));
    }
    let g0 = link.gamma0();
    if g0 <= 0.0 {
        return Err(invalid("gamma0", "must be > 0"));
    }
    let shift = traj.grid().steps_for(link.tau())?;
    let back = link.phase(1).conj();
    let times = traj.times();
    let c1 = traj.amplitudes(0);
    let c2 = traj.amplitudes(1);
    let full = traj.grid().full_steps();
    let mut out_t = Vec::new();
    let mut d = Vec::new();
    let mut b = Vec::new();
    let sq = g0.sqrt();
    for i in 0..=full.saturating_sub(shift) {
        if i + shift > full {
            break;
        }
        let t = times[i];
        let s1 = pulses.0.sqrt_eval(t);
        let s2 = pulses.1.sqrt_eval(times[i + shift]);
        let cb = back * c2[i + shift];
        out_t.push(t);
        d.push((s2 * c1[i] - s1 * cb) / sq);
        b.push((s1 * c1[i] + s2 * cb) / sq);
    }
    let t_eff = traj.t_end() - link.tau();
    Ok(DarkBrightState {
        times: out_t,
        d,
        b,
        u: (0.25 * g0 * t_eff).tanh(),
        t_eff,
    })
}

/// Outcome of one protocol run.
#[derive(Debug, Clone, Serialize)]
pub struct ProtocolRun {
    pub spec: ProtocolSpec,
    pub gamma0_tau: f64,
    pub duration: f64,
    pub fidelity: f64,
    pub infidelity: f64,
    pub loss_error: f64,
    pub photon_integral: f64,
    pub kappa: f64,
    #[serde(skip)]
    pub trajectory: Trajectory,
}

/// Runs `spec` on `link` from `c = (1, 0)` and evaluates fidelity and loss.
pub fn run_protocol(
    spec: &ProtocolSpec,
    link: &LinkParams,
    steps_per_tau: usize,
    kappa: f64,
) -> Result<ProtocolRun> {
    let (p1, p2) = make_pulses(spec, link)?;
    let grid = TimeGrid::new(link.tau(), steps_per_tau, spec.duration)?;
    let traj = evolve_pair(
        link,
        [&p1, &p2],
        [C64::new(1.0, 0.0), C64::new(0.0, 0.0)],
        &grid,
    )?;
    let f = fidelity(&traj, spec.duration)?;
    let loss = loss_error(&traj, kappa)?;
    Ok(ProtocolRun {
        spec: spec.clone(),
        gamma0_tau: spec.gamma0 * link.tau(),
        duration: spec.duration,
        fidelity: f,
        infidelity: 1.0 - f,
        loss_error: loss,
        photon_integral: photon_integral(&traj),
        kappa,
        trajectory: traj,
    })
}
