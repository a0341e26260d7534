//! The `qlink` command-line tool.
//!
//! Every flag takes a dimensionless group (`γ₀τ`, `Δ/δω_FSR`, `κτ`, `T/τ`);
//! `τ` is fixed to 1. Output goes to `--out`, else to
//! `$QLINK_OUT_DIR/<command>.<ext>`, else to stdout.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use log::info;
use num_complex::Complex64 as C64;
use serde::Serialize;

use crate::analytic::{spectrum_map, SpectrumMap};
use crate::dde::{evolve_single, RoundTrip};
use crate::error::{invalid, Result};
use crate::grid::{TimeGrid, DEFAULT_STEPS_PER_TAU};
use crate::io::write_row;
use crate::link::LinkParams;
use crate::protocols::{
    czkm_bound, czkm_exact_error_with, dark_bright, make_pulses, run_protocol, DarkBrightState,
    ProtocolKind, ProtocolRun, ProtocolSpec,
};
use crate::pulse::PulseProfile;
use crate::sweep::{
    default_grid, scan_each, shared_duration, write_scan_csv, ww_infidelity, Protocol, ScanOutcome,
    ScanSummary, SweepOptions,
};
use crate::ww::{equivalent_link, evolve_ww, ModeSet, WwOptions};

pub const OUT_DIR_ENV: &str = "QLINK_OUT_DIR";

#[derive(Debug, Parser)]
#[command(
    name = "qlink",
    version,
    about = "Emitters coupled through a short quantum link"
)]
pub struct Cli {
    /// Output file; overrides the output directory.
    #[arg(long, short, global = true)]
    pub out: Option<PathBuf>,
    /// Directory for `<command>.<ext>` outputs when --out is not given.
    #[arg(long, global = true, env = OUT_DIR_ENV)]
    pub out_dir: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    fn ext(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Single emitter at one end of the link, initially excited.
    #[command(allow_negative_numbers = true)]
    Simulate(SimulateArgs),
    /// Output spectrum as the emitter frequency sweeps across the ladder.
    #[command(allow_negative_numbers = true)]
    Spectrum(SpectrumArgs),
    /// One state-transfer protocol run.
    #[command(allow_negative_numbers = true)]
    Protocol(ProtocolArgs),
    /// Optimized protocols over a grid of couplings, with fits.
    #[command(allow_negative_numbers = true)]
    Scan(ScanArgs),
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Simulate(_) => "simulate",
            Command::Spectrum(_) => "spectrum",
            Command::Protocol(_) => "protocol",
            Command::Scan(_) => "scan",
        }
    }
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[arg(long, default_value_t = 0.1)]
    pub gamma_tau: f64,
    #[arg(long, default_value_t = 50.0)]
    pub delta_fsr: f64,
    /// Final time `t/τ`.
    #[arg(long, default_value_t = 12.0)]
    pub t_end: f64,
    #[arg(long, default_value_t = DEFAULT_STEPS_PER_TAU)]
    pub steps_per_tau: usize,
    /// Add multimode populations for comparison.
    #[arg(long)]
    pub ww: bool,
    #[arg(long, default_value_t = 401)]
    pub n_modes: usize,
}

#[derive(Debug, Args)]
pub struct SpectrumArgs {
    #[arg(long, default_value_t = 0.15)]
    pub gamma_tau: f64,
    /// First emitter frequency of the sweep, in units of the FSR.
    #[arg(long, default_value_t = 50.0)]
    pub delta_fsr: f64,
    /// Sweep width in FSR.
    #[arg(long, default_value_t = 1.0)]
    pub span_fsr: f64,
    #[arg(long, default_value_t = 201)]
    pub delta_points: usize,
    #[arg(long, default_value_t = 401)]
    pub omega_points: usize,
    /// Lorentzian broadening `ητ` of the lines.
    #[arg(long, default_value_t = 0.02)]
    pub linewidth: f64,
}

#[derive(Debug, Args)]
pub struct ProtocolArgs {
    #[arg(value_enum)]
    pub protocol: Protocol,
    #[arg(long, default_value_t = 0.1)]
    pub gamma_tau: f64,
    /// Duration `T/τ`; defaults to π/√(γ₀τ) for SWAP and 9/√(γ₀τ) otherwise.
    #[arg(long)]
    pub t: Option<f64>,
    /// Use the optimized duration (CZKM keeps 9/√(γ₀τ)).
    #[arg(long, conflicts_with = "t")]
    pub optimize: bool,
    /// Tabulate the error against `T` instead of running once.
    #[arg(long)]
    pub scan_t: bool,
    #[arg(long, requires = "scan_t")]
    pub t_min: Option<f64>,
    #[arg(long, requires = "scan_t")]
    pub t_max: Option<f64>,
    #[arg(long, default_value_t = 201)]
    pub t_points: usize,
    #[arg(long, default_value_t = 0.0)]
    pub kappa_tau: f64,
    #[arg(long, default_value_t = 50.0)]
    pub delta_fsr: f64,
    #[arg(long, default_value_t = DEFAULT_STEPS_PER_TAU)]
    pub steps_per_tau: usize,
}

#[derive(Debug, Args)]
pub struct ScanArgs {
    /// Comma-separated `γ₀τ` values.
    #[arg(long, value_delimiter = ',')]
    pub grid: Option<Vec<f64>>,
    #[arg(long, value_enum, value_delimiter = ',', default_values_t = Protocol::ALL)]
    pub protocols: Vec<Protocol>,
    /// Evaluate the photon-loss error and fit it against `T/τ`.
    #[arg(long)]
    pub loss: bool,
    #[arg(long, default_value_t = 0.01)]
    pub kappa_tau: f64,
    /// Recheck every optimum in the multimode model at --delta-fsr.
    #[arg(long)]
    pub ww: bool,
    #[arg(long, default_value_t = 50.0)]
    pub delta_fsr: f64,
    #[arg(long, default_value_t = 201)]
    pub n_modes: usize,
    #[arg(long, default_value_t = DEFAULT_STEPS_PER_TAU)]
    pub steps_per_tau: usize,
}

/// Where a command writes. Secondary outputs go next to a file target and
/// are skipped on stdout.
struct Sink {
    path: Option<PathBuf>,
}

impl Sink {
    fn resolve(cli: &Cli) -> Result<Self> {
        let path = match (&cli.out, &cli.out_dir) {
            (Some(p), _) => Some(p.clone()),
            (None, Some(dir)) => {
                std::fs::create_dir_all(dir)?;
                Some(dir.join(format!("{}.{}", cli.command.name(), cli.format.ext())))
            }
            (None, None) => None,
        };
        Ok(Self { path })
    }

    fn open(&self) -> Result<Box<dyn Write>> {
        Ok(match &self.path {
            Some(p) => Box::new(BufWriter::new(File::create(p)?)),
            None => Box::new(BufWriter::new(io::stdout().lock())),
        })
    }

    /// `<stem>_<suffix>.<ext>` beside the main file.
    fn sibling(&self, suffix: &str, ext: &str) -> Option<PathBuf> {
        let p = self.path.as_ref()?;
        let stem = p.file_stem()?.to_string_lossy();
        Some(p.with_file_name(format!("{stem}_{suffix}.{ext}")))
    }
}

fn write_json<W: Write, T: Serialize>(w: &mut W, value: &T) -> Result<()> {
    serde_json::to_writer_pretty(&mut *w, value)?;
    writeln!(w)?;
    Ok(())
}

fn write_file(path: &Path, body: impl FnOnce(&mut BufWriter<File>) -> Result<()>) -> Result<()> {
    info!("writing {}", path.display());
    let mut w = BufWriter::new(File::create(path)?);
    body(&mut w)?;
    w.flush()?;
    Ok(())
}

/// Runs the parsed command. `Ok(false)` means some scan rows failed.
pub fn run(cli: &Cli) -> Result<bool> {
    let sink = Sink::resolve(cli)?;
    match &cli.command {
        Command::Simulate(a) => simulate(a, cli.format, &sink).map(|_| true),
        Command::Spectrum(a) => spectrum(a, cli.format, &sink).map(|_| true),
        Command::Protocol(a) => protocol(a, cli.format, &sink).map(|_| true),
        Command::Scan(a) => scan(a, cli.format, &sink),
    }
}

fn check_positive(name: &'static str, x: f64) -> Result<()> {
    if x.is_finite() && x > 0.0 {
        Ok(())
    } else {
        Err(invalid(name, format!("must be finite and > 0, got {x}")))
    }
}

#[derive(Serialize)]
struct SimulationOut<'a> {
    gamma_tau: f64,
    delta_fsr: f64,
    times: &'a [f64],
    population: Vec<f64>,
    dpop_dt: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    population_ww: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    photons_ww: Option<Vec<f64>>,
}

/// Central differences inside, one-sided at the ends.
fn derivative(y: &[f64], h: f64) -> Vec<f64> {
    let n = y.len();
    (0..n)
        .map(|i| match i {
            _ if n < 2 => 0.0,
            0 => (y[1] - y[0]) / h,
            _ if i == n - 1 => (y[i] - y[i - 1]) / h,
            _ => (y[i + 1] - y[i - 1]) / (2.0 * h),
        })
        .collect()
}

fn simulate(a: &SimulateArgs, format: Format, sink: &Sink) -> Result<()> {
    let link = LinkParams::from_scaled(a.gamma_tau, a.delta_fsr)?;
    let grid = TimeGrid::new(link.tau(), a.steps_per_tau, a.t_end)?;
    let pulse = PulseProfile::constant(link.gamma0(), 0.0, a.t_end)?;
    let one = C64::new(1.0, 0.0);
    let traj = evolve_single(&pulse, one, &grid, RoundTrip::two_ended(&link))?;
    let ww = if a.ww {
        let el = equivalent_link(&link, a.n_modes)?;
        let modes = ModeSet::centered(&el, a.n_modes)?;
        Some(evolve_ww(&el, &modes, &[&pulse], &[one], &grid, WwOptions::default())?.trajectory)
    } else {
        None
    };
    let pop: Vec<f64> = (0..traj.len()).map(|i| traj.population(0, i)).collect();
    let out = SimulationOut {
        gamma_tau: a.gamma_tau,
        delta_fsr: a.delta_fsr,
        times: traj.times(),
        dpop_dt: derivative(&pop, grid.h()),
        population: pop,
        population_ww: ww
            .as_ref()
            .map(|w| (0..w.len()).map(|i| w.population(0, i)).collect()),
        photons_ww: ww
            .as_ref()
            .map(|w| (0..w.len()).map(|i| w.photon_number(i)).collect()),
    };
    let mut w = sink.open()?;
    match format {
        Format::Json => write_json(&mut w, &out)?,
        Format::Csv => {
            crate::io::write_metadata(
                &mut w,
                &[
                    ("gamma_tau", a.gamma_tau.to_string()),
                    ("delta_fsr", a.delta_fsr.to_string()),
                    ("steps_per_tau", a.steps_per_tau.to_string()),
                    (
                        "n_modes",
                        if a.ww {
                            a.n_modes.to_string()
                        } else {
                            "-".into()
                        },
                    ),
                ],
            )?;
            let ww_head = if a.ww { ",abs2_c_ww,n_photon_ww" } else { "" };
            writeln!(w, "t,abs2_c,dpop_dt,re_c,im_c{ww_head}")?;
            let c = traj.amplitudes(0);
            for i in 0..traj.len() {
                let mut row = vec![
                    out.times[i],
                    out.population[i],
                    out.dpop_dt[i],
                    c[i].re,
                    c[i].im,
                ];
                if let (Some(p), Some(n)) = (&out.population_ww, &out.photons_ww) {
                    row.extend([p[i], n[i]]);
                }
                write_row(&mut w, &row)?;
            }
        }
    }
    w.flush()?;
    Ok(())
}

fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![a],
        _ => (0..n)
            .map(|i| a + (b - a) * i as f64 / (n - 1) as f64)
            .collect(),
    }
}

fn spectrum(a: &SpectrumArgs, format: Format, sink: &Sink) -> Result<()> {
    if a.delta_points == 0 || a.omega_points < 2 {
        return Err(invalid("points", "need >= 1 delta and >= 2 omega points"));
    }
    let link = LinkParams::from_scaled(a.gamma_tau, a.delta_fsr)?;
    let fsr = link.fsr();
    let d0 = a.delta_fsr * fsr;
    let deltas = linspace(d0, d0 + a.span_fsr * fsr, a.delta_points);
    let omegas = linspace(
        d0 - 0.5 * fsr,
        d0 + (a.span_fsr + 0.5) * fsr,
        a.omega_points,
    );
    let map: SpectrumMap = spectrum_map(link.gamma0(), link.tau(), &deltas, &omegas, a.linewidth)?;
    let meta = [
        ("gamma_tau", a.gamma_tau.to_string()),
        ("linewidth", a.linewidth.to_string()),
    ];
    let mut w = sink.open()?;
    match format {
        Format::Json => write_json(&mut w, &map)?,
        Format::Csv => {
            map.write_csv(&mut w, &meta)?;
            match sink.sibling("eigen", "csv") {
                Some(p) => write_file(&p, |w| map.write_eigen_csv(w, &meta))?,
                None => info!("eigenfrequency table skipped on stdout; use --out or json"),
            }
        }
    }
    w.flush()?;
    Ok(())
}

fn kind_of(p: Protocol) -> ProtocolKind {
    match p {
        Protocol::Swap => ProtocolKind::Swap,
        Protocol::Stirap => ProtocolKind::Stirap,
        Protocol::Czkm => ProtocolKind::Czkm,
    }
}

fn default_duration(p: Protocol, gamma0_tau: f64) -> f64 {
    match p {
        Protocol::Swap => std::f64::consts::PI / gamma0_tau.sqrt(),
        Protocol::Stirap | Protocol::Czkm => shared_duration(gamma0_tau),
    }
}

#[derive(Serialize)]
struct ProtocolOut<'a> {
    run: &'a ProtocolRun,
    #[serde(skip_serializing_if = "Option::is_none")]
    czkm_exact_error: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    czkm_bound: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    dark_bright: Option<DarkBrightState>,
}

#[derive(Serialize)]
struct TScanRow {
    t: f64,
    infidelity: f64,
    loss_error: f64,
    photon_integral: f64,
}

fn protocol(a: &ProtocolArgs, format: Format, sink: &Sink) -> Result<()> {
    check_positive("gamma_tau", a.gamma_tau)?;
    let link = LinkParams::from_scaled(a.gamma_tau, a.delta_fsr)?;
    let kind = kind_of(a.protocol);
    let mut w = sink.open()?;
    if a.scan_t {
        let t0 = default_duration(a.protocol, a.gamma_tau);
        let (lo, hi) = match a.protocol {
            Protocol::Swap => (0.5 * t0, 1.5 * t0),
            Protocol::Stirap => (2.0, 2.0 * t0),
            Protocol::Czkm => (1.5, 2.0 * t0),
        };
        let ts = linspace(a.t_min.unwrap_or(lo), a.t_max.unwrap_or(hi), a.t_points);
        let mut rows = Vec::with_capacity(ts.len());
        for t in ts {
            let spec = ProtocolSpec::new(kind.clone(), link.gamma0(), t)?;
            let r = run_protocol(&spec, &link, a.steps_per_tau, a.kappa_tau)?;
            rows.push(TScanRow {
                t,
                infidelity: r.infidelity,
                loss_error: r.loss_error,
                photon_integral: r.photon_integral,
            });
        }
        match format {
            Format::Json => write_json(&mut w, &rows)?,
            Format::Csv => {
                crate::io::write_metadata(
                    &mut w,
                    &[
                        ("protocol", a.protocol.name().to_string()),
                        ("gamma_tau", a.gamma_tau.to_string()),
                        ("kappa_tau", a.kappa_tau.to_string()),
                    ],
                )?;
                writeln!(w, "t,infidelity,loss_error,photon_integral")?;
                for r in &rows {
                    write_row(
                        &mut w,
                        &[r.t, r.infidelity, r.loss_error, r.photon_integral],
                    )?;
                }
            }
        }
        w.flush()?;
        return Ok(());
    }

    let t = match (a.t, a.optimize) {
        (Some(t), _) => t,
        (None, true) => {
            let opts = SweepOptions {
                steps_per_tau: a.steps_per_tau,
                delta_over_fsr: a.delta_fsr,
                kappa: a.kappa_tau,
            };
            a.protocol.optimize(a.gamma_tau, &opts)?.t_opt
        }
        (None, false) => default_duration(a.protocol, a.gamma_tau),
    };
    let spec = ProtocolSpec::new(kind, link.gamma0(), t)?;
    let run = run_protocol(&spec, &link, a.steps_per_tau, a.kappa_tau)?;
    let (exact, bound, db) = if a.protocol == Protocol::Czkm {
        let (p1, p2) = make_pulses(&spec, &link)?;
        (
            Some(czkm_exact_error_with(&link, t, a.steps_per_tau)?),
            Some(czkm_bound(link.gamma0(), link.tau(), t)?),
            Some(dark_bright(&run.trajectory, (&p1, &p2), &link)?),
        )
    } else {
        (None, None, None)
    };
    match format {
        Format::Json => write_json(
            &mut w,
            &ProtocolOut {
                run: &run,
                czkm_exact_error: exact,
                czkm_bound: bound,
                dark_bright: db,
            },
        )?,
        Format::Csv => {
            let meta = run_meta(&run);
            run.trajectory.write_csv(&mut w, &meta)?;
            if let Some(db) = &db {
                match sink.sibling("dark_bright", "csv") {
                    Some(p) => write_file(&p, |w| db.write_csv(w, &meta))?,
                    None => info!("dark/bright table skipped on stdout; use --out or json"),
                }
            }
        }
    }
    w.flush()?;
    Ok(())
}

fn run_meta(run: &ProtocolRun) -> Vec<(&'static str, String)> {
    vec![
        ("protocol", run.spec.kind.name().to_string()),
        ("gamma_tau", run.gamma0_tau.to_string()),
        ("t", run.duration.to_string()),
        ("fidelity", run.fidelity.to_string()),
        ("loss_error", run.loss_error.to_string()),
        ("photon_integral", run.photon_integral.to_string()),
    ]
}

#[derive(Serialize)]
#[serde(untagged)]
enum RowOut<'a> {
    Ok(&'a crate::sweep::ScanRecord),
    Err {
        protocol: &'static str,
        gamma0_tau: f64,
        error: String,
    },
}

#[derive(Serialize)]
struct ScanOut<'a> {
    records: Vec<RowOut<'a>>,
    summary: &'a ScanSummary,
}

fn scan(a: &ScanArgs, format: Format, sink: &Sink) -> Result<bool> {
    let grid = a.grid.clone().unwrap_or_else(default_grid);
    if grid.is_empty() {
        return Err(invalid("grid", "empty"));
    }
    for &g in &grid {
        check_positive("grid", g)?;
    }
    let kappa = if a.loss { a.kappa_tau } else { 0.0 };
    let opts = SweepOptions {
        steps_per_tau: a.steps_per_tau,
        delta_over_fsr: a.delta_fsr,
        kappa,
    };
    let mut outcomes: Vec<ScanOutcome> = scan_each(&grid, &a.protocols, &opts);
    if a.ww {
        for o in &mut outcomes {
            if let Ok(r) = &mut o.result {
                match ww_infidelity(r, a.delta_fsr, a.n_modes, a.steps_per_tau) {
                    Ok(e) => r.ww_infidelity = Some(e),
                    Err(e) => o.result = Err(e),
                }
            }
        }
    }
    let ok = outcomes.iter().all(|o| o.result.is_ok());
    let records: Vec<_> = outcomes
        .iter()
        .filter_map(|o| o.result.as_ref().ok().cloned())
        .collect();
    let summary = ScanSummary::new(&records, kappa);
    let mut w = sink.open()?;
    match format {
        Format::Json => {
            let rows = outcomes
                .iter()
                .map(|o| match &o.result {
                    Ok(r) => RowOut::Ok(r),
                    Err(e) => RowOut::Err {
                        protocol: o.protocol.name(),
                        gamma0_tau: o.gamma0_tau,
                        error: e.to_string(),
                    },
                })
                .collect();
            write_json(
                &mut w,
                &ScanOut {
                    records: rows,
                    summary: &summary,
                },
            )?;
        }
        Format::Csv => {
            let meta = [
                ("steps_per_tau", a.steps_per_tau.to_string()),
                ("delta_fsr", a.delta_fsr.to_string()),
                ("kappa_tau", kappa.to_string()),
            ];
            write_scan_csv(&mut w, &outcomes, &meta)?;
            match sink.sibling("summary", "json") {
                Some(p) => write_file(&p, |w| write_json(w, &summary))?,
                None => info!("fit summary skipped on stdout; use --out or json"),
            }
        }
    }
    w.flush()?;
    Ok(ok)
}
