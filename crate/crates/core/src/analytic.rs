//! Exact single-emitter results: the echo series, derivative jumps,
//! eigenfrequencies of the emitter-link system and its output spectrum.

use std::f64::consts::PI;
use std::io::Write;

use num_complex::Complex64 as C64;
use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::io::{write_metadata, write_row};
use crate::link::{phase_factor, LinkParams};

/// Largest echo order the series evaluator accepts.
pub const SERIES_ORDER_CAP: usize = 500;

/// Parameters of the single-delay echo series.
///
/// `delay` and `phi` are the echo delay `τ̃` and per-echo phase; the emitter
/// frequency in the rotating frame is `ω_e = phi / delay`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesParams {
    pub gamma: f64,
    pub delay: f64,
    pub phi: f64,
    pub n_max: usize,
}

impl SeriesParams {
    /// Parameters with `n_max` large enough for `t <= t_end`.
    pub fn new(gamma: f64, delay: f64, phi: f64, t_end: f64) -> Result<Self> {
        if !(gamma.is_finite() && gamma >= 0.0) {
            return Err(invalid("gamma", "must be finite and >= 0"));
        }
        if !(delay.is_finite() && delay > 0.0) {
            return Err(invalid("delay", "must be finite and > 0"));
        }
        if !phi.is_finite() {
            return Err(invalid("phi", "must be finite"));
        }
        let n_max = (t_end / delay).floor().max(0.0) as usize;
        Ok(Self {
            gamma,
            delay,
            phi,
            n_max,
        })
    }

    pub fn omega_e(&self) -> f64 {
        self.phi / self.delay
    }

    /// `α = i ω_e + γ/2`.
    pub fn alpha(&self) -> C64 {
        C64::new(0.5 * self.gamma, self.omega_e())
    }
}

/// Amplitude `c(t)` of an emitter with `c(0) = 1` obeying the single-delay
/// equation, from the exact echo series.
///
/// Echo order `n` contributes `e^{inφ} e^{−x/2} Σ_m P_{n,m}` with
/// `x = γ(t − nτ̃)` and `P_{n,m} = C(n−1, m−1) (−x)^m / m!`. The growing and
/// decaying exponentials are combined before evaluation. The inner sum is the
/// Laguerre polynomial `L_n^{(−1)}(x) = −(x/n) L_{n−1}^{(1)}(x)`, evaluated by
/// its three-term recurrence; summing the alternating terms directly loses
/// all precision once `x` reaches a few tens.
pub fn series_solution(p: &SeriesParams, t: f64) -> Result<C64> {
    if !(t >= 0.0) {
        return Err(invalid("t", format!("must be >= 0, got {t}")));
    }
    let orders = (t / p.delay).floor() as usize;
    if orders > SERIES_ORDER_CAP {
        return Err(Error::Truncation {
            needed: orders,
            cap: SERIES_ORDER_CAP,
        });
    }
    if orders > p.n_max {
        return Err(Error::Truncation {
            needed: orders,
            cap: p.n_max,
        });
    }
    let mut c = C64::new((-0.5 * p.gamma * t).exp(), 0.0);
    for n in 1..=orders {
        let x = p.gamma * (t - n as f64 * p.delay);
        if x <= 0.0 {
            continue;
        }
        c += phase_factor(n as u32, p.phi) * echo_term(n, x);
    }
    Ok(c)
}

/// `e^{−x/2} L_n^{(−1)}(x)` for `n >= 1`.
fn echo_term(n: usize, x: f64) -> f64 {
    const RESCALE: f64 = 1e200;
    // L_k^{(1)} for k = n − 1, with a running log scale against overflow.
    let (mut l0, mut l1) = (1.0, 2.0 - x);
    let mut log_scale = 0.0;
    let l = if n == 1 {
        l0
    } else {
        for k in 1..n - 1 {
            let kf = k as f64;
            let l2 = ((2.0 * kf + 2.0 - x) * l1 - (kf + 1.0) * l0) / (kf + 1.0);
            l0 = l1;
            l1 = l2;
            if l1.abs() > RESCALE {
                l0 /= RESCALE;
                l1 /= RESCALE;
                log_scale += RESCALE.ln();
            }
        }
        l1
    };
    -(x / n as f64) * l * (log_scale - 0.5 * x).exp()
}

/// Exact jump of `ċ` at the `n`-th echo arrival: `−γ e^{inφ} c(0)`.
pub fn jump_formula(n: u32, gamma: f64, phi: f64, c0: C64) -> C64 {
    -gamma * phase_factor(n, phi) * c0
}

/// Eigenfrequencies and sampled output spectrum for one link.
#[derive(Debug, Clone, Serialize)]
pub struct SpectralResult {
    pub eigenfrequencies: Vec<f64>,
    pub omegas: Vec<f64>,
    /// `|A_out(ω)|²` normalized to a maximum of 1; `+inf` marks samples that
    /// hit a pole.
    pub spectrum: Vec<f64>,
}

/// `λ − Δ − (γ/2) cot(λτ)`.
pub fn eigen_residual(link: &LinkParams, lambda: f64) -> f64 {
    let (_, x) = branch_coordinate(link.tau(), lambda);
    lambda - link.delta() - 0.5 * link.gamma0() / (x * link.tau()).tan()
}

/// Splits `λ` into a branch index `k` and the offset `x = λ − kπ/τ`.
fn branch_coordinate(tau: f64, lambda: f64) -> (i64, f64) {
    let fsr = PI / tau;
    let k = (lambda / fsr).floor();
    (k as i64, lambda - k * fsr)
}

/// Real solutions of `λ = Δ + (γ/2) cot(λτ)`, one per branch
/// `kπ/τ < λ < (k+1)π/τ` that intersects `window`, in increasing order.
///
/// Within a branch the right-hand side falls monotonically from `+∞` to
/// `−∞`, so each branch holds exactly one root. Roots of branches that only
/// touch the window may lie slightly outside it. For `γ = 0` the solutions
/// are `Δ` and the bare mode frequencies `kπ/τ` inside the window.
pub fn eigenfrequencies(link: &LinkParams, window: (f64, f64)) -> Result<Vec<f64>> {
    let (lo, hi) = window;
    if !(lo.is_finite() && hi.is_finite() && lo < hi) {
        return Err(invalid(
            "window",
            format!("empty or non-finite [{lo}, {hi}]"),
        ));
    }
    let tau = link.tau();
    let fsr = link.fsr();
    let gamma = link.gamma0();
    let delta = link.delta();

    if gamma == 0.0 {
        let mut out: Vec<f64> = ((lo / fsr).ceil() as i64..=(hi / fsr).floor() as i64)
            .map(|k| k as f64 * fsr)
            .collect();
        if (lo..=hi).contains(&delta) && !out.iter().any(|&w| (w - delta).abs() < 1e-12 * fsr) {
            out.push(delta);
        }
        out.sort_by(f64::total_cmp);
        return Ok(out);
    }

    let k_lo = (lo / fsr).floor() as i64;
    let k_hi = ((hi / fsr).ceil() as i64 - 1).max(k_lo);
    let mut roots = Vec::with_capacity((k_hi - k_lo + 1) as usize);
    for k in k_lo..=k_hi {
        let offset = k as f64 * fsr;
        let d = delta - offset;
        let g = |x: f64| x - d - 0.5 * gamma / (x * tau).tan();
        let x = branch_root(g, fsr)?;
        roots.push(polish(link, offset + x));
    }
    Ok(roots)
}

/// Picks the representable neighbour of `λ` with the smallest residual.
fn polish(link: &LinkParams, lambda: f64) -> f64 {
    let mut best = lambda;
    let mut best_res = eigen_residual(link, lambda).abs();
    for dir in [-1.0, 1.0] {
        let mut l = lambda;
        for _ in 0..4 {
            l = if dir > 0.0 {
                l.next_up()
            } else {
                l.next_down()
            };
            let r = eigen_residual(link, l).abs();
            if r < best_res {
                best = l;
                best_res = r;
            }
        }
    }
    best
}

/// Root of a function increasing from `−∞` at `0⁺` to `+∞` at `width⁻`.
fn branch_root(g: impl Fn(f64) -> f64, width: f64) -> Result<f64> {
    let mut shrink = 1e-9;
    let (mut a, mut b) = loop {
        let a = shrink * width;
        let b = width - shrink * width;
        if g(a) < 0.0 && g(b) > 0.0 {
            break (a, b);
        }
        shrink *= 1e-3;
        if shrink < 1e-300 {
            return Err(Error::Optimization(
                "no sign change inside branch".to_string(),
            ));
        }
    };
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if m <= a || m >= b {
            break;
        }
        if g(m) < 0.0 {
            a = m;
        } else {
            b = m;
        }
    }
    let (ga, gb) = (g(a), g(b));
    let mut x = if ga.abs() < gb.abs() { a } else { b };
    // Secant step from the final bracket; kept only if it improves |g|.
    if gb != ga {
        let s = a - ga * (b - a) / (gb - ga);
        if s > 0.0 && s < width && g(s).abs() < g(x).abs() {
            x = s;
        }
    }
    Ok(x)
}

/// Spacing of the two roots closest to `Δ`, one on each side.
pub fn resonant_splitting(link: &LinkParams) -> Result<f64> {
    let fsr = link.fsr();
    let delta = link.delta();
    let roots = eigenfrequencies(link, (delta - 1.5 * fsr, delta + 1.5 * fsr))?;
    let below = roots
        .iter()
        .copied()
        .filter(|&r| r <= delta)
        .fold(f64::NEG_INFINITY, f64::max);
    let above = roots
        .iter()
        .copied()
        .filter(|&r| r > delta)
        .fold(f64::INFINITY, f64::min);
    Ok(above - below)
}

/// Integrated weight of the spectral line at eigenfrequency `λ`:
/// `γ sin²(λτ) / (2 sin²(λτ) + γτ)²`, in units where a Lorentzian of the
/// broadened spectrum `|A_out|²` integrates to `2π w / η`.
pub fn spectral_weight(link: &LinkParams, lambda: f64) -> f64 {
    let (_, x) = branch_coordinate(link.tau(), lambda);
    let s2 = (x * link.tau()).sin().powi(2);
    let g = link.gamma0();
    let den = 2.0 * s2 + g * link.tau();
    g * s2 / (den * den)
}

/// Unnormalized `|A_out(ω)|²` with `s = −i(ω − Δ) + η/2`.
///
/// `η` adds a phenomenological linewidth; for `η = 0` the closed link has
/// real poles exactly at the eigenfrequencies.
pub fn spectral_density(link: &LinkParams, omega: f64, linewidth: f64) -> f64 {
    let g = link.gamma0();
    let tau = link.tau();
    let s = C64::new(0.5 * linewidth, -(omega - link.delta()));
    // e^{i2φ − 2sτ} = e^{2iωτ} e^{−ητ}; use the reduced phase.
    let e = phase_factor(2, omega * tau) * (-linewidth * tau).exp();
    let den = (s + 0.5 * g) * (1.0 - e) + g * e;
    let d2 = den.norm_sqr();
    if d2 == 0.0 {
        f64::INFINITY
    } else {
        g / d2
    }
}

/// Eigenfrequencies inside the grid range and `|A_out|²` on `omegas`,
/// normalized so the largest finite sample is 1. Pole hits are `+inf`.
pub fn output_spectrum(
    link: &LinkParams,
    omegas: &[f64],
    linewidth: f64,
) -> Result<SpectralResult> {
    if omegas.is_empty() {
        return Err(invalid("omega_grid", "empty"));
    }
    if omegas.iter().any(|w| !w.is_finite()) || omegas.windows(2).any(|w| w[1] < w[0]) {
        return Err(invalid("omega_grid", "must be finite and sorted"));
    }
    if !(linewidth.is_finite() && linewidth >= 0.0) {
        return Err(invalid("linewidth", "must be finite and >= 0"));
    }
    let mut spectrum: Vec<f64> = omegas
        .iter()
        .map(|&w| spectral_density(link, w, linewidth))
        .collect();
    let peak = spectrum
        .iter()
        .copied()
        .filter(|x| x.is_finite())
        .fold(0.0, f64::max);
    if peak > 0.0 {
        for x in spectrum.iter_mut().filter(|x| x.is_finite()) {
            *x /= peak;
        }
    }
    let (lo, hi) = (omegas[0], omegas[omegas.len() - 1]);
    let eigenfrequencies = if hi > lo {
        eigenfrequencies(link, (lo, hi))?
            .into_iter()
            .filter(|l| (lo..=hi).contains(l))
            .collect()
    } else {
        Vec::new()
    };
    Ok(SpectralResult {
        eigenfrequencies,
        omegas: omegas.to_vec(),
        spectrum,
    })
}

impl SpectralResult {
    /// CSV with columns `omega,power`.
    pub fn write_csv<W: Write>(&self, w: &mut W, meta: &[(&str, String)]) -> Result<()> {
        write_metadata(w, meta)?;
        writeln!(w, "omega,power")?;
        for (o, p) in self.omegas.iter().zip(&self.spectrum) {
            write_row(w, &[*o, *p])?;
        }
        Ok(())
    }
}

/// Spectrum as a function of the emitter frequency, `Δ` swept over
/// `deltas`, normalized over the whole map.
#[derive(Debug, Clone, Serialize)]
pub struct SpectrumMap {
    pub deltas: Vec<f64>,
    pub omegas: Vec<f64>,
    /// Row-major, one row per `Δ`.
    pub power: Vec<Vec<f64>>,
    /// Eigenfrequencies inside the ω range, per `Δ`.
    pub eigenfrequencies: Vec<Vec<f64>>,
}

pub fn spectrum_map(
    gamma0: f64,
    tau: f64,
    deltas: &[f64],
    omegas: &[f64],
    linewidth: f64,
) -> Result<SpectrumMap> {
    let mut power = Vec::with_capacity(deltas.len());
    let mut eig = Vec::with_capacity(deltas.len());
    for &d in deltas {
        let link = LinkParams::new(gamma0, tau, d)?;
        let r = output_spectrum(&link, omegas, linewidth)?;
        let row: Vec<f64> = omegas
            .iter()
            .map(|&w| spectral_density(&link, w, linewidth))
            .collect();
        power.push(row);
        eig.push(r.eigenfrequencies);
    }
    let peak = power
        .iter()
        .flatten()
        .copied()
        .filter(|x: &f64| x.is_finite())
        .fold(0.0, f64::max);
    if peak > 0.0 {
        for x in power.iter_mut().flatten().filter(|x| x.is_finite()) {
            *x /= peak;
        }
    }
    Ok(SpectrumMap {
        deltas: deltas.to_vec(),
        omegas: omegas.to_vec(),
        power,
        eigenfrequencies: eig,
    })
}

impl SpectrumMap {
    /// Long-format CSV with columns `delta,omega,power`.
    pub fn write_csv<W: Write>(&self, w: &mut W, meta: &[(&str, String)]) -> Result<()> {
        write_metadata(w, meta)?;
        writeln!(w, "delta,omega,power")?;
        for (d, row) in self.deltas.iter().zip(&self.power) {
            for (o, p) in self.omegas.iter().zip(row) {
                write_row(w, &[*d, *o, *p])?;
            }
        }
        Ok(())
    }

    /// CSV with columns `delta,lambda`, one row per eigenfrequency.
    pub fn write_eigen_csv<W: Write>(&self, w: &mut W, meta: &[(&str, String)]) -> Result<()> {
        write_metadata(w, meta)?;
        writeln!(w, "delta,lambda")?;
        for (d, roots) in self.deltas.iter().zip(&self.eigenfrequencies) {
            for r in roots {
                write_row(w, &[*d, *r])?;
            }
        }
        Ok(())
    }
}
