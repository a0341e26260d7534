//! Explicit multimode simulation of the emitters and a finite ladder of
//! link modes, used as an independent check of the delay equations.
//!
//! In the frame rotating at the emitter frequency `Δ_e`,
//!
//! ```text
//! dc_l/dt = −i G_l(t) Σ_k s_k^{l−1} e^{−i(ω_k−Δ_e)t} α_k
//! dα_k/dt = −i e^{+i(ω_k−Δ_e)t} Σ_l s_k^{l−1} G_l(t) c_l
//! ```
//!
//! with `G_l = √(γ_l / 2τ)`, `ω_k = k π/τ` and `s_k = (−1)^k`: standing waves
//! of a closed link have antinodes of alternating sign at the two ends.

use std::f64::consts::PI;
use std::io::Write;

use num_complex::Complex64 as C64;

use crate::error::{invalid, Error, Result};
use crate::grid::TimeGrid;
use crate::io::{write_metadata, write_row};
use crate::link::LinkParams;
use crate::pulse::PulseProfile;
use crate::trajectory::Trajectory;

const ZERO: C64 = C64::new(0.0, 0.0);

/// Largest accepted `h · max|ω_k − Δ_e|` for the internal step.
pub const MAX_PHASE_PER_STEP: f64 = 0.5;

/// Phase per internal step used when the substep count is chosen
/// automatically.
const AUTO_PHASE_PER_STEP: f64 = 0.2;

/// A finite ladder of link modes `ω_k = k π/τ`.
#[derive(Debug, Clone, PartialEq)]
pub struct ModeSet {
    indices: Vec<i64>,
    omegas: Vec<f64>,
    parity: Vec<f64>,
    tau: f64,
}

impl ModeSet {
    /// `n_modes` (odd, ≥ 3) modes centered on the mode nearest `Δ`. The
    /// ladder must stay above zero frequency.
    pub fn centered(link: &LinkParams, n_modes: usize) -> Result<Self> {
        if n_modes < 3 || n_modes % 2 == 0 {
            return Err(invalid(
                "n_modes",
                format!("must be odd and >= 3, got {n_modes}"),
            ));
        }
        let k0 = (link.delta() / link.fsr()).round() as i64;
        let half = (n_modes as i64 - 1) / 2;
        let lowest = k0 - half;
        if lowest < 1 {
            return Err(Error::LadderCrossesZero { lowest });
        }
        Ok(Self::from_indices(link.tau(), lowest..=k0 + half))
    }

    /// The lowest `n_modes` modes, `k = 1..=n_modes`.
    pub fn from_cutoff(link: &LinkParams, n_modes: usize) -> Result<Self> {
        if n_modes == 0 {
            return Err(invalid("n_modes", "must be >= 1"));
        }
        Ok(Self::from_indices(link.tau(), 1..=n_modes as i64))
    }

    fn from_indices(tau: f64, ks: std::ops::RangeInclusive<i64>) -> Self {
        let indices: Vec<i64> = ks.collect();
        let omegas = indices.iter().map(|&k| k as f64 * PI / tau).collect();
        let parity = indices
            .iter()
            .map(|&k| if k % 2 == 0 { 1.0 } else { -1.0 })
            .collect();
        Self {
            indices,
            omegas,
            parity,
            tau,
        }
    }

    pub fn len(&self) -> usize {
        self.omegas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.omegas.is_empty()
    }

    pub fn indices(&self) -> &[i64] {
        &self.indices
    }

    pub fn omegas(&self) -> &[f64] {
        &self.omegas
    }

    /// Mode amplitude at emitter 2 relative to emitter 1.
    pub fn parity(&self) -> &[f64] {
        &self.parity
    }

    /// `G = √(γ / 2τ)` for coupling rate `γ`.
    pub fn coupling(&self, gamma: f64) -> f64 {
        (gamma / (2.0 * self.tau)).sqrt()
    }
}

/// Link with the emitter frequency moved by whole round-trip periods
/// (`2π/τ` per step, so `e^{iφ}` is unchanged) until a centered ladder of
/// `n_modes` fits above zero frequency.
///
/// The delay equations only see `φ mod 2π`, so the shifted link describes
/// the same emitter dynamics while leaving room for wide ladders.
pub fn equivalent_link(link: &LinkParams, n_modes: usize) -> Result<LinkParams> {
    let half = (n_modes.saturating_sub(1) / 2) as f64;
    let d = link.delta() / link.fsr();
    let need = half + 1.0 - d.round();
    let m = if need > 0.0 { (need / 2.0).ceil() } else { 0.0 };
    link.with_delta(link.delta() + 2.0 * m * link.fsr())
}

/// Integration settings.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct WwOptions {
    /// Internal RK4 steps per grid step; `None` picks the smallest count with
    /// a phase advance of at most 0.2 rad per step for the fastest mode.
    pub substeps: Option<usize>,
    /// Added to `Δ` to form the emitter frequency; compensates the Lamb
    /// shift of a truncated ladder. Zero by default.
    pub lamb_offset: f64,
}

impl WwOptions {
    /// Options with the emitter frequency moved by minus
    /// [`lamb_shift_estimate`].
    pub fn lamb_corrected(link: &LinkParams, modes: &ModeSet) -> Self {
        Self {
            substeps: None,
            lamb_offset: -lamb_shift_estimate(link, modes),
        }
    }
}

/// Multimode trajectory plus the final mode amplitudes.
#[derive(Debug, Clone)]
pub struct WwResult {
    pub trajectory: Trajectory,
    pub modes: ModeSet,
    pub final_alpha: Vec<C64>,
    pub substeps: usize,
}

impl WwResult {
    /// Snapshot of the final mode amplitudes: `k,omega,re_alpha,im_alpha`.
    pub fn write_modes_csv<W: Write>(&self, w: &mut W, meta: &[(&str, String)]) -> Result<()> {
        write_metadata(w, meta)?;
        writeln!(w, "k,omega,re_alpha,im_alpha")?;
        for ((k, om), a) in self
            .modes
            .indices()
            .iter()
            .zip(self.modes.omegas())
            .zip(&self.final_alpha)
        {
            write_row(w, &[*k as f64, *om, a.re, a.im])?;
        }
        Ok(())
    }
}

/// Integrates the emitter and mode amplitudes on `grid`, starting from
/// empty modes. `pulses` holds one or two couplings.
pub fn evolve_ww(
    link: &LinkParams,
    modes: &ModeSet,
    pulses: &[&PulseProfile],
    c0: &[C64],
    grid: &TimeGrid,
    opts: WwOptions,
) -> Result<WwResult> {
    let ne = pulses.len();
    if ne == 0 || ne > 2 || c0.len() != ne {
        return Err(invalid("pulses", "need one or two pulses with matching c0"));
    }
    let norm: f64 = c0.iter().map(|z| z.norm_sqr()).sum();
    if !(norm <= 1.0 + 1e-12) {
        return Err(invalid("c0", format!("total population {norm} exceeds 1")));
    }
    if modes.is_empty() {
        return Err(invalid("modes", "empty ladder"));
    }
    let delta_e = link.delta() + opts.lamb_offset;
    let detunings: Vec<f64> = modes.omegas().iter().map(|w| w - delta_e).collect();
    let max_det = detunings.iter().fold(0.0f64, |m, d| m.max(d.abs()));
    let h_grid = grid.h();
    let substeps = match opts.substeps {
        Some(0) => return Err(invalid("substeps", "must be >= 1")),
        Some(s) => s,
        None => ((h_grid * max_det / AUTO_PHASE_PER_STEP).ceil() as usize).max(1),
    };
    let h_int = h_grid / substeps as f64;
    if h_int * max_det > MAX_PHASE_PER_STEP {
        return Err(Error::StepTooCoarse(h_int * max_det));
    }

    let nm = modes.len();
    let parity = modes.parity();
    let mut c: Vec<C64> = c0.to_vec();
    let mut alpha = vec![ZERO; nm];
    let times = grid.times();
    let mut out_c: Vec<Vec<C64>> = vec![Vec::with_capacity(times.len()); ne];
    let mut photons = Vec::with_capacity(times.len());
    let record = |c: &[C64], alpha: &[C64], out_c: &mut Vec<Vec<C64>>, photons: &mut Vec<f64>| {
        for l in 0..ne {
            out_c[l].push(c[l]);
        }
        photons.push(alpha.iter().map(|a| a.norm_sqr()).sum());
    };
    record(&c, &alpha, &mut out_c, &mut photons);

    let mut st = Stepper::new(nm, ne);
    for i in 0..times.len() - 1 {
        let (ta, tb) = (times[i], times[i + 1]);
        let n_sub = if (tb - ta - h_grid).abs() <= 1e-12 * h_grid {
            substeps
        } else {
            (((tb - ta) / h_int).ceil() as usize).max(1)
        };
        let hs = (tb - ta) / n_sub as f64;
        let half: Vec<C64> = detunings
            .iter()
            .map(|d| C64::from_polar(1.0, -d * 0.5 * hs))
            .collect();
        // Phases restart from the exact value at every grid node.
        let mut p: Vec<C64> = detunings
            .iter()
            .map(|d| C64::from_polar(1.0, -(d * ta).rem_euclid(2.0 * PI)))
            .collect();
        for s in 0..n_sub {
            let t = ta + s as f64 * hs;
            let g = |tt: f64| -> [f64; 2] {
                let mut out = [0.0; 2];
                for l in 0..ne {
                    out[l] = modes.coupling(pulses[l].eval(tt));
                }
                out
            };
            let (g0, gm, g1) = (g(t), g(t + 0.5 * hs), g(t + hs));
            st.step(&mut c, &mut alpha, &mut p, &half, parity, [g0, gm, g1], hs);
        }
        record(&c, &alpha, &mut out_c, &mut photons);
    }

    let gamma = pulses
        .iter()
        .map(|p| times.iter().map(|&t| p.eval(t)).collect())
        .collect();
    let trajectory = Trajectory::new(*grid, out_c, gamma).with_photons(photons);
    Ok(WwResult {
        trajectory,
        modes: modes.clone(),
        final_alpha: alpha,
        substeps,
    })
}

/// Scratch space for the RK4 stages.
struct Stepper {
    kc: [Vec<C64>; 4],
    ka: [Vec<C64>; 4],
    tc: Vec<C64>,
    ta: Vec<C64>,
    pm: Vec<C64>,
    p1: Vec<C64>,
}

impl Stepper {
    fn new(nm: usize, ne: usize) -> Self {
        let vc = || vec![ZERO; ne];
        let va = || vec![ZERO; nm];
        Self {
            kc: [vc(), vc(), vc(), vc()],
            ka: [va(), va(), va(), va()],
            tc: vc(),
            ta: va(),
            pm: va(),
            p1: va(),
        }
    }

    #[allow(clippy::too_many_arguments)]
    fn step(
        &mut self,
        c: &mut [C64],
        alpha: &mut [C64],
        p: &mut [C64],
        half: &[C64],
        parity: &[f64],
        g: [[f64; 2]; 3],
        h: f64,
    ) {
        for k in 0..p.len() {
            self.pm[k] = p[k] * half[k];
            self.p1[k] = self.pm[k] * half[k];
        }
        let ne = c.len();
        // Stage 1.
        rhs(
            c,
            alpha,
            p,
            parity,
            g[0],
            ne,
            &mut self.kc[0],
            &mut self.ka[0],
        );
        for l in 0..ne {
            self.tc[l] = c[l] + 0.5 * h * self.kc[0][l];
        }
        for k in 0..alpha.len() {
            self.ta[k] = alpha[k] + 0.5 * h * self.ka[0][k];
        }
        // Stage 2.
        let (kc1, ka1) = (&mut self.kc[1], &mut self.ka[1]);
        rhs(&self.tc, &self.ta, &self.pm, parity, g[1], ne, kc1, ka1);
        for l in 0..ne {
            self.tc[l] = c[l] + 0.5 * h * self.kc[1][l];
        }
        for k in 0..alpha.len() {
            self.ta[k] = alpha[k] + 0.5 * h * self.ka[1][k];
        }
        // Stage 3.
        let (kc2, ka2) = (&mut self.kc[2], &mut self.ka[2]);
        rhs(&self.tc, &self.ta, &self.pm, parity, g[1], ne, kc2, ka2);
        for l in 0..ne {
            self.tc[l] = c[l] + h * self.kc[2][l];
        }
        for k in 0..alpha.len() {
            self.ta[k] = alpha[k] + h * self.ka[2][k];
        }
        // Stage 4.
        let (kc3, ka3) = (&mut self.kc[3], &mut self.ka[3]);
        rhs(&self.tc, &self.ta, &self.p1, parity, g[2], ne, kc3, ka3);
        let w = h / 6.0;
        for l in 0..ne {
            c[l] += w * (self.kc[0][l] + 2.0 * self.kc[1][l] + 2.0 * self.kc[2][l] + self.kc[3][l]);
        }
        for k in 0..alpha.len() {
            alpha[k] +=
                w * (self.ka[0][k] + 2.0 * self.ka[1][k] + 2.0 * self.ka[2][k] + self.ka[3][k]);
        }
        p.copy_from_slice(&self.p1);
    }
}

#[allow(clippy::too_many_arguments)]
fn rhs(
    c: &[C64],
    alpha: &[C64],
    p: &[C64],
    parity: &[f64],
    g: [f64; 2],
    ne: usize,
    dc: &mut [C64],
    da: &mut [C64],
) {
    let mi = C64::new(0.0, -1.0);
    let mut s1 = ZERO;
    let mut s2 = ZERO;
    for k in 0..alpha.len() {
        let x = p[k] * alpha[k];
        s1 += x;
        s2 += parity[k] * x;
    }
    dc[0] = mi * g[0] * s1;
    if ne == 2 {
        dc[1] = mi * g[1] * s2;
    }
    let src0 = g[0] * c[0];
    let src1 = if ne == 2 { g[1] * c[1] } else { ZERO };
    for k in 0..alpha.len() {
        da[k] = mi * p[k].conj() * (src0 + parity[k] * src1);
    }
}

/// Photons in the link at grid time `t`: `Σ_k |α_k|²` for multimode
/// trajectories, `1 − Σ_l |c_l|²` otherwise.
pub fn photon_number(traj: &Trajectory, t: f64) -> Result<f64> {
    let i = traj.index_of(t)?;
    Ok(traj.photon_number(i))
}

/// First-order estimate of the emitter frequency shift produced by
/// truncating the ladder: the principal-value self-energy of the retained
/// modes minus that of the infinite ladder, evaluated at `Δ`.
pub fn lamb_shift_estimate(link: &LinkParams, modes: &ModeSet) -> f64 {
    let d = link.delta() / link.fsr();
    let frac = d - d.round();
    if frac.abs() < 1e-12 {
        // Δ on a mode: the pole terms cancel symmetrically; sum the rest.
        let k0 = d.round() as i64;
        let partial: f64 = modes
            .indices()
            .iter()
            .filter(|&&k| k != k0)
            .map(|&k| 1.0 / (d - k as f64))
            .sum();
        return link.gamma0() / (2.0 * PI) * partial;
    }
    let partial: f64 = modes.indices().iter().map(|&k| 1.0 / (d - k as f64)).sum();
    link.gamma0() / (2.0 * PI) * (partial - PI / (PI * d).tan())
}
