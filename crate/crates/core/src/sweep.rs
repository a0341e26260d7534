//! Protocol-duration optimization, scans over `γ₀τ` and scaling fits.
//!
//! Everything here works in units of `τ = 1`: the link is built from
//! `γ₀τ` and `Δ/δω_FSR`, and durations are reported as `T/τ`.

use std::io::Write;

use log::{info, warn};
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::grid::{TimeGrid, DEFAULT_STEPS_PER_TAU};
use crate::io::{fmt_num, write_metadata};
use crate::link::LinkParams;
use crate::protocols::{
    czkm_bound, czkm_exact_error_with, make_pulses, run_protocol, ProtocolKind, ProtocolRun,
    ProtocolSpec,
};
use crate::ww::{evolve_ww, ModeSet, WwOptions};

/// Points whose infidelity falls below this are left out of power-law fits.
pub const FIT_FLOOR: f64 = 1e-9;

const SWAP_COARSE_POINTS: usize = 41;
const SWAP_REL_TOL: f64 = 1e-4;
const STIRAP_REL_TOL: f64 = 1e-6;
/// A valley counts once the curve climbs this fraction of its depth.
const VALLEY_RISE: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepOptions {
    pub steps_per_tau: usize,
    pub delta_over_fsr: f64,
    /// Link loss rate `κτ` used for the loss column.
    pub kappa: f64,
}

impl Default for SweepOptions {
    fn default() -> Self {
        Self {
            steps_per_tau: DEFAULT_STEPS_PER_TAU,
            delta_over_fsr: 50.0,
            kappa: 0.0,
        }
    }
}

/// One optimized protocol point.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScanRecord {
    pub protocol: String,
    pub gamma0_tau: f64,
    /// Duration `T/τ`.
    pub t_opt: f64,
    pub infidelity: f64,
    pub loss_error: f64,
    pub photon_integral: f64,
    /// The optimum sits on the edge of the search range.
    pub at_boundary: bool,
    /// Same protocol and duration in the multimode model, when requested.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ww_infidelity: Option<f64>,
}

impl ScanRecord {
    fn from_run(run: &ProtocolRun, infidelity: f64, at_boundary: bool) -> Self {
        Self {
            protocol: run.spec.kind.name().to_string(),
            gamma0_tau: run.gamma0_tau,
            t_opt: run.duration,
            infidelity,
            loss_error: run.loss_error,
            photon_integral: run.photon_integral,
            at_boundary,
            ww_infidelity: None,
        }
    }
}

/// `γ₀τ` grid used when none is given: 13 log-spaced points from 0.01 to
/// 1.44, then 1.6, 2, 3, 5 and 8.
pub fn default_grid() -> Vec<f64> {
    let mut g: Vec<f64> = (0..13)
        .map(|i| 0.01 * 144f64.powf(i as f64 / 12.0))
        .collect();
    g[12] = 1.44;
    g.extend([1.6, 2.0, 3.0, 5.0, 8.0]);
    g
}

/// Minimizes `f` on `[a, b]` by golden-section search until the bracket is
/// narrower than `rel_tol · |x|`. Returns the best point evaluated.
pub fn golden_section<F>(mut f: F, a: f64, b: f64, rel_tol: f64) -> Result<(f64, f64)>
where
    F: FnMut(f64) -> Result<f64>,
{
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let (mut a, mut b) = (a.min(b), a.max(b));
    let mut x1 = b - INV_PHI * (b - a);
    let mut x2 = a + INV_PHI * (b - a);
    let mut f1 = f(x1)?;
    let mut f2 = f(x2)?;
    let mut best = if f1 <= f2 { (x1, f1) } else { (x2, f2) };
    for _ in 0..200 {
        if b - a <= rel_tol * 0.5 * (a.abs() + b.abs()).max(f64::MIN_POSITIVE) {
            break;
        }
        if f1 <= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - INV_PHI * (b - a);
            f1 = f(x1)?;
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + INV_PHI * (b - a);
            f2 = f(x2)?;
        }
        for (x, fx) in [(x1, f1), (x2, f2)] {
            if fx < best.1 {
                best = (x, fx);
            }
        }
    }
    Ok(best)
}

fn scaled_link(gamma0_tau: f64, opts: &SweepOptions) -> Result<LinkParams> {
    if !(gamma0_tau.is_finite() && gamma0_tau > 0.0) {
        return Err(invalid(
            "gamma0_tau",
            format!("must be > 0, got {gamma0_tau}"),
        ));
    }
    LinkParams::from_scaled(gamma0_tau, opts.delta_over_fsr)
}

fn run(kind: ProtocolKind, link: &LinkParams, t: f64, opts: &SweepOptions) -> Result<ProtocolRun> {
    let spec = ProtocolSpec::new(kind, link.gamma0(), t)?;
    run_protocol(&spec, link, opts.steps_per_tau, opts.kappa)
}

/// Refines a coarse minimum at index `i` of `(ts, eps)` by golden section
/// on the neighbouring bracket, keeping the coarse point if it stays better.
fn refine<F>(f: F, ts: &[f64], eps: &[f64], i: usize, rel_tol: f64) -> Result<(f64, f64)>
where
    F: FnMut(f64) -> Result<f64>,
{
    let (lo, hi) = (ts[i.saturating_sub(1)], ts[(i + 1).min(ts.len() - 1)]);
    let (t, e) = golden_section(f, lo, hi, rel_tol)?;
    Ok(if e <= eps[i] { (t, e) } else { (ts[i], eps[i]) })
}

/// Best SWAP duration for `γ₀τ`: a 41-point scan of
/// `T ∈ [0.5, 1.5] π/Ω` with `Ω = √(γ₀/τ)`, then golden-section refinement.
pub fn optimal_swap(gamma0_tau: f64, opts: &SweepOptions) -> Result<ScanRecord> {
    let link = scaled_link(gamma0_tau, opts)?;
    let t_rabi = std::f64::consts::PI / (link.gamma0() / link.tau()).sqrt();
    let ts: Vec<f64> = (0..SWAP_COARSE_POINTS)
        .map(|i| t_rabi * (0.5 + i as f64 / (SWAP_COARSE_POINTS - 1) as f64))
        .collect();
    let mut eps = Vec::with_capacity(ts.len());
    for &t in &ts {
        eps.push(run(ProtocolKind::Swap, &link, t, opts)?.infidelity);
    }
    let i = argmin(&eps);
    let at_boundary = i == 0 || i == ts.len() - 1;
    if at_boundary {
        warn!("swap optimum at the edge of the scan for gamma0_tau = {gamma0_tau}");
    }
    let (t, _) = refine(
        |t| Ok(run(ProtocolKind::Swap, &link, t, opts)?.infidelity),
        &ts,
        &eps,
        i,
        SWAP_REL_TOL,
    )?;
    let r = run(ProtocolKind::Swap, &link, t, opts)?;
    Ok(ScanRecord::from_run(&r, r.infidelity, at_boundary))
}

fn argmin(v: &[f64]) -> usize {
    v.iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .map_or(0, |(i, _)| i)
}

/// Index of the first valley of `eps` that is followed by a rise of at least
/// 5% of its depth, once the scan has seen enough of the curve.
pub fn first_valley(eps: &[f64]) -> Option<usize> {
    let mut peak = *eps.first()?;
    let mut cand: Option<usize> = None;
    for j in 1..eps.len() {
        match cand {
            None => {
                if eps[j] > eps[j - 1] && j >= 2 {
                    cand = Some(j - 1);
                } else {
                    peak = peak.max(eps[j]);
                }
            }
            Some(c) => {
                if eps[j] < eps[c] {
                    cand = None;
                    continue;
                }
                let depth = peak - eps[c];
                if eps[j] - eps[c] >= VALLEY_RISE * depth {
                    return Some(c);
                }
            }
        }
    }
    None
}

/// STIRAP at the first infidelity valley: `T` scanned upward from `2τ` in
/// steps of `τ/4` up to `100 √(τ/γ₀)`, then golden-section refinement.
pub fn optimal_stirap(gamma0_tau: f64, opts: &SweepOptions) -> Result<ScanRecord> {
    let link = scaled_link(gamma0_tau, opts)?;
    let tau = link.tau();
    let t_max = 100.0 * (tau / link.gamma0()).sqrt();
    let step = 0.25 * tau;
    let mut ts = Vec::new();
    let mut eps = Vec::new();
    let mut t = 2.0 * tau;
    let valley = loop {
        if t > t_max {
            break None;
        }
        ts.push(t);
        eps.push(run(ProtocolKind::Stirap, &link, t, opts)?.infidelity);
        if let Some(v) = first_valley(&eps) {
            break Some(v);
        }
        t += step;
    };
    let Some(i) = valley else {
        return Err(Error::Optimization(format!(
            "no STIRAP valley below T = {t_max:.3} for gamma0_tau = {gamma0_tau}"
        )));
    };
    let (t, _) = refine(
        |t| Ok(run(ProtocolKind::Stirap, &link, t, opts)?.infidelity),
        &ts,
        &eps,
        i,
        STIRAP_REL_TOL,
    )?;
    let r = run(ProtocolKind::Stirap, &link, t, opts)?;
    Ok(ScanRecord::from_run(&r, r.infidelity, false))
}

/// `T = 9 √(τ/γ₀)`, the duration shared by STIRAP and CZKM comparisons.
pub fn shared_duration(gamma0_tau: f64) -> f64 {
    9.0 / gamma0_tau.sqrt()
}

/// CZKM at `T = 9 √(τ/γ₀)`. The infidelity comes from the exact bright-mode
/// reduction and is checked against the full two-emitter run.
pub fn czkm_record(gamma0_tau: f64, opts: &SweepOptions) -> Result<ScanRecord> {
    let link = scaled_link(gamma0_tau, opts)?;
    let t = shared_duration(gamma0_tau) * link.tau();
    let r = run(ProtocolKind::Czkm, &link, t, opts)?;
    let exact = czkm_exact_error_with(&link, t, opts.steps_per_tau)?;
    if (exact - r.infidelity).abs() > 1e-6 {
        warn!(
            "czkm exact error {exact:e} differs from the two-emitter run {:e}",
            r.infidelity
        );
    }
    Ok(ScanRecord::from_run(&r, exact, false))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Protocol {
    Swap,
    Stirap,
    Czkm,
}

impl Protocol {
    pub const ALL: [Protocol; 3] = [Protocol::Swap, Protocol::Stirap, Protocol::Czkm];

    pub fn name(self) -> &'static str {
        match self {
            Protocol::Swap => "swap",
            Protocol::Stirap => "stirap",
            Protocol::Czkm => "czkm",
        }
    }

    pub fn optimize(self, gamma0_tau: f64, opts: &SweepOptions) -> Result<ScanRecord> {
        match self {
            Protocol::Swap => optimal_swap(gamma0_tau, opts),
            Protocol::Stirap => optimal_stirap(gamma0_tau, opts),
            Protocol::Czkm => czkm_record(gamma0_tau, opts),
        }
    }
}

/// One cell of a scan: the record, or why that point failed.
#[derive(Debug)]
pub struct ScanOutcome {
    pub protocol: Protocol,
    pub gamma0_tau: f64,
    pub result: Result<ScanRecord>,
}

/// Every protocol in `protocols` at every `γ₀τ` in `grid`, in input order,
/// keeping failures in place.
pub fn scan_each(grid: &[f64], protocols: &[Protocol], opts: &SweepOptions) -> Vec<ScanOutcome> {
    let mut out = Vec::with_capacity(grid.len() * protocols.len());
    for &g in grid {
        for &p in protocols {
            let result = p.optimize(g, opts);
            match &result {
                Ok(r) => info!(
                    "{} gamma0_tau={g} T={} eps={:e}",
                    p.name(),
                    r.t_opt,
                    r.infidelity
                ),
                Err(e) => warn!("{} gamma0_tau={g}: {e}", p.name()),
            }
            out.push(ScanOutcome {
                protocol: p,
                gamma0_tau: g,
                result,
            });
        }
    }
    out
}

/// Like [`scan_each`], failing on the first bad point.
pub fn scan_protocols(
    grid: &[f64],
    protocols: &[Protocol],
    opts: &SweepOptions,
) -> Result<Vec<ScanRecord>> {
    if grid.is_empty() {
        return Err(invalid("grid", "empty"));
    }
    scan_each(grid, protocols, opts)
        .into_iter()
        .map(|o| o.result)
        .collect()
}

/// Smallest `γ₀τ` at which `better`'s infidelity drops below `baseline`'s.
pub fn crossover(records: &[ScanRecord], better: Protocol, baseline: Protocol) -> Option<f64> {
    sorted_gammas(records).into_iter().find(|&g| {
        match (find(records, better, g), find(records, baseline, g)) {
            (Some(a), Some(b)) => a.infidelity < b.infidelity,
            _ => false,
        }
    })
}

/// Smallest `γ₀τ` at which the dark-state bound `e^{−γ₀(T*−τ)}`, taken at
/// STIRAP's own optimal duration, falls below STIRAP's infidelity.
pub fn bound_crossover(records: &[ScanRecord]) -> Option<f64> {
    sorted_gammas(records).into_iter().find(|&g| {
        find(records, Protocol::Stirap, g)
            .is_some_and(|r| czkm_bound(g, 1.0, r.t_opt).is_ok_and(|b| b < r.infidelity))
    })
}

fn sorted_gammas(records: &[ScanRecord]) -> Vec<f64> {
    let mut gs: Vec<f64> = records.iter().map(|r| r.gamma0_tau).collect();
    gs.sort_by(f64::total_cmp);
    gs.dedup();
    gs
}

fn find(records: &[ScanRecord], p: Protocol, g: f64) -> Option<&ScanRecord> {
    records
        .iter()
        .find(|r| r.protocol == p.name() && r.gamma0_tau == g)
}

/// Infidelity of `record`'s protocol and duration in the multimode model at
/// `Δ/δω_FSR = delta_over_fsr`, using the lowest `n_modes` link modes and
/// the Lamb-shift-corrected emitter frequency.
pub fn ww_infidelity(
    record: &ScanRecord,
    delta_over_fsr: f64,
    n_modes: usize,
    steps_per_tau: usize,
) -> Result<f64> {
    let kind = match record.protocol.as_str() {
        "swap" => ProtocolKind::Swap,
        "stirap" => ProtocolKind::Stirap,
        "czkm" => ProtocolKind::Czkm,
        other => return Err(invalid("protocol", format!("unknown `{other}`"))),
    };
    let link = LinkParams::from_scaled(record.gamma0_tau, delta_over_fsr)?;
    let spec = ProtocolSpec::new(kind, link.gamma0(), record.t_opt)?;
    let (p1, p2) = make_pulses(&spec, &link)?;
    let grid = TimeGrid::new(link.tau(), steps_per_tau, record.t_opt)?;
    let modes = ModeSet::from_cutoff(&link, n_modes)?;
    let opts = WwOptions::lamb_corrected(&link, &modes);
    let one = Complex64::new(1.0, 0.0);
    let zero = Complex64::new(0.0, 0.0);
    let res = evolve_ww(&link, &modes, &[&p1, &p2], &[one, zero], &grid, opts)?;
    Ok(1.0 - res.trajectory.amplitude_at(1, record.t_opt)?.norm_sqr())
}

/// `y = a x^b` fitted by least squares on `(ln x, ln y)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PowerLaw {
    pub a: f64,
    pub b: f64,
    /// Root-mean-square residual in `ln y`.
    pub residual: f64,
}

pub fn fit_power_law(points: &[(f64, f64)]) -> Result<PowerLaw> {
    if points.len() < 3 {
        return Err(invalid(
            "points",
            format!("need >= 3, got {}", points.len()),
        ));
    }
    if points
        .iter()
        .any(|&(x, y)| !(x > 0.0 && y > 0.0 && x.is_finite() && y.is_finite()))
    {
        return Err(invalid("points", "all x and y must be positive and finite"));
    }
    let logs: Vec<(f64, f64)> = points.iter().map(|&(x, y)| (x.ln(), y.ln())).collect();
    let (slope, intercept) = least_squares(&logs);
    let n = logs.len() as f64;
    let ss: f64 = logs
        .iter()
        .map(|&(x, y)| (y - intercept - slope * x).powi(2))
        .sum();
    Ok(PowerLaw {
        a: intercept.exp(),
        b: slope,
        residual: (ss / n).sqrt(),
    })
}

/// Ordinary least squares line `y = slope x + intercept`.
pub fn least_squares(points: &[(f64, f64)]) -> (f64, f64) {
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let slope = sxy / sxx;
    (slope, my - slope * mx)
}

/// Power law of infidelity against `γ₀τ` for one protocol, skipping points
/// below [`FIT_FLOOR`].
pub fn fit_infidelity(records: &[ScanRecord], protocol: Protocol) -> Result<PowerLaw> {
    let mut skipped = 0;
    let pts: Vec<(f64, f64)> = records
        .iter()
        .filter(|r| r.protocol == protocol.name())
        .filter(|r| {
            let keep = r.infidelity >= FIT_FLOOR;
            skipped += usize::from(!keep);
            keep
        })
        .map(|r| (r.gamma0_tau, r.infidelity))
        .collect();
    if skipped > 0 {
        info!("{}: {skipped} points below the fit floor", protocol.name());
    }
    fit_power_law(&pts)
}

/// Power law of the loss error against `T/τ` for one protocol.
pub fn fit_loss(records: &[ScanRecord], protocol: Protocol) -> Result<PowerLaw> {
    let pts: Vec<(f64, f64)> = records
        .iter()
        .filter(|r| r.protocol == protocol.name() && r.loss_error > 0.0)
        .map(|r| (r.t_opt, r.loss_error))
        .collect();
    fit_power_law(&pts)
}

/// `γ₀τ` range used for the SWAP infidelity fits.
pub const SWAP_FIT_RANGE: (f64, f64) = (0.01, 0.5);
/// `γ₀τ` range used for the STIRAP infidelity fit.
pub const STIRAP_FIT_RANGE: (f64, f64) = (0.05, 1.4);
/// `γ₀τ` range used for the loss fits.
pub const LOSS_FIT_RANGE: (f64, f64) = (0.01, 1.44);

fn within(records: &[ScanRecord], (lo, hi): (f64, f64)) -> Vec<ScanRecord> {
    let tol = 1e-9;
    records
        .iter()
        .filter(|r| r.gamma0_tau >= lo * (1.0 - tol) && r.gamma0_tau <= hi * (1.0 + tol))
        .cloned()
        .collect()
}

/// Fits and crossovers derived from a scan. Each fit only uses records
/// inside its `*_FIT_RANGE`; entries are `None` when too few remain.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScanSummary {
    pub swap_linear_slope: Option<f64>,
    pub swap_fit: Option<PowerLaw>,
    pub stirap_fit: Option<PowerLaw>,
    pub loss_fits: Vec<(String, PowerLaw)>,
    pub crossover: Option<f64>,
    pub bound_crossover: Option<f64>,
    pub kappa: f64,
}

impl ScanSummary {
    pub fn new(records: &[ScanRecord], kappa: f64) -> Self {
        let swap_recs = within(records, SWAP_FIT_RANGE);
        let stirap_recs = within(records, STIRAP_FIT_RANGE);
        let loss_recs = within(records, LOSS_FIT_RANGE);
        let swap: Vec<(f64, f64)> = swap_recs
            .iter()
            .filter(|r| r.protocol == Protocol::Swap.name())
            .map(|r| (r.gamma0_tau, r.infidelity))
            .collect();
        let loss_fits = if kappa > 0.0 {
            Protocol::ALL
                .iter()
                .filter_map(|&p| {
                    fit_loss(&loss_recs, p)
                        .ok()
                        .map(|f| (p.name().to_string(), f))
                })
                .collect()
        } else {
            Vec::new()
        };
        Self {
            swap_linear_slope: (swap.len() >= 2).then(|| least_squares(&swap).0),
            swap_fit: fit_infidelity(&swap_recs, Protocol::Swap).ok(),
            stirap_fit: fit_infidelity(&stirap_recs, Protocol::Stirap).ok(),
            loss_fits,
            crossover: crossover(records, Protocol::Czkm, Protocol::Stirap),
            bound_crossover: bound_crossover(records),
            kappa,
        }
    }
}

/// CSV with columns `protocol,gamma0_tau,t_opt,infidelity,loss_error`,
/// then `ww_infidelity` when any record carries one, then `status`.
/// Failed points keep their row with empty values and the error in `status`.
pub fn write_scan_csv<W: Write>(
    w: &mut W,
    outcomes: &[ScanOutcome],
    meta: &[(&str, String)],
) -> Result<()> {
    let with_ww = outcomes
        .iter()
        .any(|o| matches!(&o.result, Ok(r) if r.ww_infidelity.is_some()));
    write_metadata(w, meta)?;
    let ww_head = if with_ww { ",ww_infidelity" } else { "" };
    writeln!(
        w,
        "protocol,gamma0_tau,t_opt,infidelity,loss_error{ww_head},status"
    )?;
    for o in outcomes {
        match &o.result {
            Ok(r) => {
                let ww = match (with_ww, r.ww_infidelity) {
                    (false, _) => String::new(),
                    (true, Some(x)) => format!(",{}", fmt_num(x)),
                    (true, None) => ",".to_string(),
                };
                writeln!(
                    w,
                    "{},{},{},{},{}{ww},ok",
                    r.protocol,
                    fmt_num(r.gamma0_tau),
                    fmt_num(r.t_opt),
                    fmt_num(r.infidelity),
                    fmt_num(r.loss_error)
                )?
            }
            Err(e) => writeln!(
                w,
                "{},{},,,{},error: {}",
                o.protocol.name(),
                fmt_num(o.gamma0_tau),
                if with_ww { "," } else { "" },
                e.to_string().replace([',', '\n'], ";")
            )?,
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn golden_finds_parabola_minimum() {
        let (x, fx) = golden_section(|x| Ok((x - 1.3).powi(2) + 2.0), 0.0, 4.0, 1e-8).unwrap();
        assert!((x - 1.3).abs() < 1e-7);
        assert!((fx - 2.0).abs() < 1e-14);
    }

    #[test]
    fn power_law_exact_data() {
        let pts: Vec<(f64, f64)> = (1..8)
            .map(|i| (i as f64, 3.0 * (i as f64).powi(2)))
            .collect();
        let f = fit_power_law(&pts).unwrap();
        assert!((f.a - 3.0).abs() < 1e-12);
        assert!((f.b - 2.0).abs() < 1e-12);
        assert!(f.residual < 1e-12);
        assert!(fit_power_law(&pts[..2]).is_err());
        assert!(fit_power_law(&[(1.0, 1.0), (2.0, 0.0), (3.0, 1.0)]).is_err());
    }

    #[test]
    fn valley_needs_a_real_rise() {
        let eps = [1.0, 0.8, 0.5, 0.2, 0.21, 0.1, 0.05, 0.3, 0.6];
        // The 0.2 → 0.21 wiggle is below 5% of the depth; the valley is 0.05.
        assert_eq!(first_valley(&eps), Some(6));
        assert_eq!(first_valley(&[1.0, 0.5, 0.2]), None);
    }

    #[test]
    fn crossover_picks_first_win() {
        let rec = |p: &str, g: f64, e: f64| ScanRecord {
            protocol: p.into(),
            gamma0_tau: g,
            t_opt: 1.0,
            infidelity: e,
            loss_error: 0.0,
            photon_integral: 0.0,
            at_boundary: false,
            ww_infidelity: None,
        };
        let r = vec![
            rec("stirap", 1.0, 1e-5),
            rec("czkm", 1.0, 1e-3),
            rec("stirap", 2.0, 1e-4),
            rec("czkm", 2.0, 1e-5),
        ];
        assert_eq!(crossover(&r, Protocol::Czkm, Protocol::Stirap), Some(2.0));
        assert_eq!(crossover(&[], Protocol::Czkm, Protocol::Stirap), None);
    }
}
