//! Method-of-steps integrator for the emitter delay equations.
//!
//! Two emitters at the ends of a link obey
//!
//! ```text
//! dc_l/dt = −(γ_l/2) c_l − √γ_l [e^{i2φ} b_l(t−2τ) + e^{iφ} b_{3−l}(t−τ)]
//! b_l(t)  = √γ_l(t) c_l(t) + e^{i2φ} b_l(t−2τ),     b_l(t < 0) = 0
//! ```
//!
//! The grid step divides τ, so every delayed stage time falls at the same
//! fraction of an earlier step as the stage itself. Echo arrivals (the
//! Heaviside guards) only switch on at grid nodes; stages at the start of a
//! step read right limits and stages at its end read left limits, so no step
//! ever integrates across a kink. Midpoint history values come from cubic
//! Hermite interpolation with one-sided derivatives.

use num_complex::Complex64 as C64;

use crate::error::{invalid, Result};
use crate::grid::TimeGrid;
use crate::link::{phase_factor, LinkParams};
use crate::pulse::PulseProfile;
use crate::trajectory::{EchoRecord, Trajectory};

const ZERO: C64 = C64::new(0.0, 0.0);

/// Echo delay and per-echo phase of a single emitter.
///
/// An emitter at one end of a link sees its own emission again after a
/// round trip `2τ` with phase `2φ`; the reduced single-delay convention uses
/// `τ` and `φ`. Both are representable; pick the one matching the geometry.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RoundTrip {
    pub delay: f64,
    pub phase: f64,
}

impl RoundTrip {
    /// Round trip of an emitter at the end of `link`: delay `2τ`, phase `2φ`.
    pub fn two_ended(link: &LinkParams) -> Self {
        Self {
            delay: 2.0 * link.tau(),
            phase: 2.0 * link.phi(),
        }
    }

    /// Delay `τ` with phase `φ`.
    pub fn single_delay(link: &LinkParams) -> Self {
        Self {
            delay: link.tau(),
            phase: link.phi(),
        }
    }
}

/// Delayed coupling from emitter `source`'s output field, `lag` steps back.
#[derive(Debug, Clone, Copy)]
struct Term {
    source: usize,
    lag: usize,
    phase: C64,
}

/// Where inside step `q` a stage (or a delayed stage) sits.
#[derive(Debug, Clone, Copy)]
enum Stage {
    /// Left end, right limit.
    Start,
    /// Midpoint of a full step.
    Mid,
    /// Right end, left limit.
    End,
    /// Arbitrary fraction of `h`, strictly inside the step.
    Frac(f64),
}

/// History of the output fields, kept for the whole integration.
///
/// `b_right[i]` and `b_left[i]` are the right and left limits of
/// `b^out` at node `i`; they differ only at echo arrivals. `b_mid[q]` is the
/// field at the midpoint of step `q`. The recursion
/// `b(t) = √γ(t) c(t) + phase · b(t − period)` is applied on each of the
/// three stencils separately.
#[derive(Debug, Clone)]
pub struct EchoBuffer {
    period: usize,
    phase: C64,
    c: Vec<Vec<C64>>,
    d_right: Vec<Vec<C64>>,
    d_left: Vec<Vec<C64>>,
    b_right: Vec<Vec<C64>>,
    b_left: Vec<Vec<C64>>,
    b_mid: Vec<Vec<C64>>,
}

impl EchoBuffer {
    fn new(emitters: usize, nodes: usize, period: usize, phase: C64) -> Self {
        let mk = || vec![Vec::with_capacity(nodes); emitters];
        Self {
            period,
            phase,
            c: mk(),
            d_right: mk(),
            d_left: mk(),
            b_right: mk(),
            b_left: mk(),
            b_mid: mk(),
        }
    }

    /// Number of retained steps.
    pub fn horizon(&self) -> usize {
        self.c.first().map_or(0, Vec::len)
    }

    fn field(&self, l: usize, q: isize, stage: Stage, ctx: &Context) -> C64 {
        if q < 0 {
            return ZERO;
        }
        let q = q as usize;
        match stage {
            Stage::Start => self.b_right[l][q],
            Stage::Mid => self.b_mid[l][q],
            Stage::End => self.b_left[l][q + 1],
            Stage::Frac(f) => {
                // Explicit echo sum; only used by the closing partial step.
                let mut acc = ZERO;
                let mut weight = C64::new(1.0, 0.0);
                let mut k = q as isize;
                while k >= 0 {
                    let ku = k as usize;
                    let t = ctx.node_time(ku) + f * ctx.h;
                    let sg = ctx.pulses[l].sqrt_eval(t);
                    acc += weight * sg * self.hermite(l, ku, f, ctx.h);
                    weight *= self.phase;
                    k -= self.period as isize;
                }
                acc
            }
        }
    }

    fn hermite(&self, l: usize, q: usize, f: f64, h: f64) -> C64 {
        let (c0, c1) = (self.c[l][q], self.c[l][q + 1]);
        let (d0, d1) = (self.d_right[l][q], self.d_left[l][q + 1]);
        let f2 = f * f;
        let f3 = f2 * f;
        c0 * (2.0 * f3 - 3.0 * f2 + 1.0)
            + d0 * (h * (f3 - 2.0 * f2 + f))
            + c1 * (-2.0 * f3 + 3.0 * f2)
            + d1 * (h * (f3 - f2))
    }
}

struct Context<'a> {
    pulses: Vec<&'a PulseProfile>,
    grid: TimeGrid,
    h: f64,
    terms: Vec<Vec<Term>>,
}

impl Context<'_> {
    fn node_time(&self, i: usize) -> f64 {
        i as f64 * self.h
    }
}

struct Engine<'a> {
    ctx: Context<'a>,
    buf: EchoBuffer,
    /// `√γ_l` at nodes and at full-step midpoints.
    sg: Vec<Vec<f64>>,
    sg_mid: Vec<Vec<f64>>,
}

impl<'a> Engine<'a> {
    fn new(
        pulses: Vec<&'a PulseProfile>,
        grid: TimeGrid,
        period: usize,
        echo_phase: C64,
        terms: Vec<Vec<Term>>,
    ) -> Self {
        let n = pulses.len();
        let nodes = grid.len();
        let h = grid.h();
        let full = grid.full_steps();
        let sg = pulses
            .iter()
            .map(|p| (0..nodes).map(|i| p.sqrt_eval(grid.time(i))).collect())
            .collect();
        let sg_mid = pulses
            .iter()
            .map(|p| {
                (0..full)
                    .map(|q| p.sqrt_eval((q as f64 + 0.5) * h))
                    .collect()
            })
            .collect();
        Self {
            ctx: Context {
                pulses,
                grid,
                h,
                terms,
            },
            buf: EchoBuffer::new(n, nodes, period, echo_phase),
            sg,
            sg_mid,
        }
    }

    fn emitters(&self) -> usize {
        self.ctx.pulses.len()
    }

    /// Right-hand side for all emitters at stage `stage` of step `j`.
    fn rhs(&self, j: usize, stage: Stage, sg: &[f64], c: &[C64], out: &mut [C64]) {
        for l in 0..self.emitters() {
            let s = sg[l];
            if s == 0.0 {
                out[l] = ZERO;
                continue;
            }
            let mut echo = ZERO;
            for term in &self.ctx.terms[l] {
                let q = j as isize - term.lag as isize;
                echo += term.phase * self.buf.field(term.source, q, stage, &self.ctx);
            }
            out[l] = -0.5 * s * s * c[l] - s * echo;
        }
    }

    fn push_node(&mut self, c: &[C64]) {
        let i = self.buf.c[0].len();
        let p = self.buf.period;
        for l in 0..self.emitters() {
            let e = self.sg[l][i] * c[l];
            let right = if i >= p {
                e + self.buf.phase * self.buf.b_right[l][i - p]
            } else {
                e
            };
            let left = if i > p {
                e + self.buf.phase * self.buf.b_left[l][i - p]
            } else if i == 0 {
                ZERO
            } else {
                e
            };
            self.buf.c[l].push(c[l]);
            self.buf.b_right[l].push(right);
            self.buf.b_left[l].push(left);
        }
    }

    fn finish_interval(&mut self, q: usize) {
        let h = self.ctx.h;
        let p = self.buf.period;
        for l in 0..self.emitters() {
            let cm = self.buf.hermite(l, q, 0.5, h);
            let e = self.sg_mid[l][q] * cm;
            let b = if q >= p {
                e + self.buf.phase * self.buf.b_mid[l][q - p]
            } else {
                e
            };
            self.buf.b_mid[l].push(b);
        }
    }

    fn run(mut self, c0: &[C64]) -> Trajectory {
        let n = self.emitters();
        let h = self.ctx.h;
        let full = self.ctx.grid.full_steps();
        let mut c: Vec<C64> = c0.to_vec();
        let (mut k1, mut k2, mut k3, mut k4) =
            (vec![ZERO; n], vec![ZERO; n], vec![ZERO; n], vec![ZERO; n]);
        let mut tmp = vec![ZERO; n];
        let mut sg_a = vec![0.0; n];
        let mut sg_m = vec![0.0; n];
        let mut sg_b = vec![0.0; n];

        self.push_node(&c);
        for l in 0..n {
            self.buf.d_left[l].push(ZERO);
        }

        for j in 0..full {
            for l in 0..n {
                sg_a[l] = self.sg[l][j];
                sg_m[l] = self.sg_mid[l][j];
                sg_b[l] = self.sg[l][j + 1];
            }
            self.rhs(j, Stage::Start, &sg_a, &c, &mut k1);
            for l in 0..n {
                self.buf.d_right[l].push(k1[l]);
                tmp[l] = c[l] + 0.5 * h * k1[l];
            }
            self.rhs(j, Stage::Mid, &sg_m, &tmp, &mut k2);
            for l in 0..n {
                tmp[l] = c[l] + 0.5 * h * k2[l];
            }
            self.rhs(j, Stage::Mid, &sg_m, &tmp, &mut k3);
            for l in 0..n {
                tmp[l] = c[l] + h * k3[l];
            }
            self.rhs(j, Stage::End, &sg_b, &tmp, &mut k4);
            for l in 0..n {
                c[l] += h / 6.0 * (k1[l] + 2.0 * k2[l] + 2.0 * k3[l] + k4[l]);
            }
            self.push_node(&c);
            self.rhs(j, Stage::End, &sg_b, &c, &mut tmp);
            for l in 0..n {
                self.buf.d_left[l].push(tmp[l]);
            }
            self.finish_interval(j);
        }

        let frac = self.ctx.grid.final_fraction();
        let mut last_field = None;
        if frac > 0.0 {
            let j = full;
            let hf = frac * h;
            let t0 = self.ctx.node_time(j);
            let t_end = self.ctx.grid.t_end();
            for l in 0..n {
                sg_a[l] = self.sg[l][j];
                sg_m[l] = self.ctx.pulses[l].sqrt_eval(t0 + 0.5 * hf);
                sg_b[l] = self.sg[l][j + 1];
            }
            let mid = Stage::Frac(0.5 * frac);
            let end = Stage::Frac(frac);
            self.rhs(j, Stage::Start, &sg_a, &c, &mut k1);
            for l in 0..n {
                tmp[l] = c[l] + 0.5 * hf * k1[l];
            }
            self.rhs(j, mid, &sg_m, &tmp, &mut k2);
            for l in 0..n {
                tmp[l] = c[l] + 0.5 * hf * k2[l];
            }
            self.rhs(j, mid, &sg_m, &tmp, &mut k3);
            for l in 0..n {
                tmp[l] = c[l] + hf * k3[l];
            }
            self.rhs(j, end, &sg_b, &tmp, &mut k4);
            for l in 0..n {
                c[l] += hf / 6.0 * (k1[l] + 2.0 * k2[l] + 2.0 * k3[l] + k4[l]);
            }
            // Output field at t_end: the node itself plus the echoes, read
            // at the same fraction of earlier steps.
            let p = self.buf.period as isize;
            let fields: Vec<C64> = (0..n)
                .map(|l| {
                    let e = self.ctx.pulses[l].sqrt_eval(t_end) * c[l];
                    e + self.buf.phase * self.buf.field(l, j as isize - p, end, &self.ctx)
                })
                .collect();
            for l in 0..n {
                self.buf.c[l].push(c[l]);
            }
            last_field = Some(fields);
        }

        let grid = self.ctx.grid;
        let gamma: Vec<Vec<f64>> = self
            .sg
            .iter()
            .map(|v| v.iter().map(|s| s * s).collect())
            .collect();
        let mut field = self.buf.b_right;
        if let Some(last) = last_field {
            for (l, b) in last.into_iter().enumerate() {
                field[l].push(b);
            }
        }
        let mut traj = Trajectory::new(grid, self.buf.c, gamma);
        traj.echo = Some(EchoRecord {
            period: self.buf.period,
            field,
        });
        traj
    }
}

fn check_grid_matches(grid: &TimeGrid, tau: f64) -> Result<usize> {
    if (grid.tau() - tau).abs() > 1e-12 * tau {
        return grid.steps_for(tau);
    }
    Ok(grid.steps_per_tau())
}

/// Integrates the two-emitter delay equations on `grid`, which must be
/// aligned to the link's traversal time.
pub fn evolve_pair(
    link: &LinkParams,
    pulses: [&PulseProfile; 2],
    c0: [C64; 2],
    grid: &TimeGrid,
) -> Result<Trajectory> {
    let norm = c0[0].norm_sqr() + c0[1].norm_sqr();
    if !(norm <= 1.0 + 1e-12) {
        return Err(invalid("c0", format!("|c1|² + |c2|² = {norm} exceeds 1")));
    }
    let m = check_grid_matches(grid, link.tau())?;
    let p1 = link.phase(1);
    let p2 = link.phase(2);
    let terms = vec![
        vec![
            Term {
                source: 0,
                lag: 2 * m,
                phase: p2,
            },
            Term {
                source: 1,
                lag: m,
                phase: p1,
            },
        ],
        vec![
            Term {
                source: 1,
                lag: 2 * m,
                phase: p2,
            },
            Term {
                source: 0,
                lag: m,
                phase: p1,
            },
        ],
    ];
    let engine = Engine::new(pulses.to_vec(), *grid, 2 * m, p2, terms);
    Ok(engine.run(&c0))
}

/// Integrates `dc/dt = −(γ/2) c − √γ e^{iΦ} b(t − T_rt)` with
/// `b(t) = √γ c(t) + e^{iΦ} b(t − T_rt)`.
pub fn evolve_single(
    pulse: &PulseProfile,
    c0: C64,
    grid: &TimeGrid,
    round_trip: RoundTrip,
) -> Result<Trajectory> {
    if !(c0.norm_sqr() <= 1.0 + 1e-12) {
        return Err(invalid("c0", "|c0| exceeds 1"));
    }
    if !(round_trip.phase.is_finite() && round_trip.delay.is_finite()) {
        return Err(invalid("round_trip", "must be finite"));
    }
    let r = grid.steps_for(round_trip.delay)?;
    let ph = phase_factor(1, round_trip.phase);
    let terms = vec![vec![Term {
        source: 0,
        lag: r,
        phase: ph,
    }]];
    let engine = Engine::new(vec![pulse], *grid, r, ph, terms);
    Ok(engine.run(&[c0]))
}

/// `b_l^out(t)` at a grid node, from the buffer recursion. Zero for `t < 0`.
pub fn output_field(traj: &Trajectory, l: usize, t: f64) -> Result<C64> {
    let echo = traj
        .echo
        .as_ref()
        .ok_or_else(|| invalid("trajectory", "no output-field record"))?;
    if l >= traj.emitters() {
        return Err(invalid("emitter", format!("index {l} out of range")));
    }
    if t < 0.0 {
        return Ok(ZERO);
    }
    let i = traj.index_of(t)?;
    Ok(echo.field[l][i])
}

/// Measured derivative discontinuity at an echo arrival.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Kink {
    /// Arrival time `N T_rt`.
    pub time: f64,
    /// Echo order `N`.
    pub order: usize,
    /// `ċ(t⁺) − ċ(t⁻)`.
    pub jump: C64,
    /// Jump of `d|c|²/dt`.
    pub population_jump: f64,
}

/// Estimates the one-sided derivative jumps of a single-emitter trajectory
/// at each echo arrival, using second-order one-sided differences.
pub fn derivative_kinks(traj: &Trajectory) -> Vec<Kink> {
    let Some(echo) = traj.echo.as_ref() else {
        return Vec::new();
    };
    let p = echo.period;
    let full = traj.grid().full_steps();
    let h = traj.grid().h();
    if p < 3 {
        return Vec::new();
    }
    let c = traj.amplitudes(0);
    let pop: Vec<f64> = c.iter().map(|z| z.norm_sqr()).collect();
    let mut out = Vec::new();
    let mut order = 1;
    while order * p + 2 <= full {
        let i = order * p;
        let left = (3.0 * c[i] - 4.0 * c[i - 1] + c[i - 2]) / (2.0 * h);
        let right = (-3.0 * c[i] + 4.0 * c[i + 1] - c[i + 2]) / (2.0 * h);
        let pl = (3.0 * pop[i] - 4.0 * pop[i - 1] + pop[i - 2]) / (2.0 * h);
        let pr = (-3.0 * pop[i] + 4.0 * pop[i + 1] - pop[i + 2]) / (2.0 * h);
        out.push(Kink {
            time: traj.times()[i],
            order,
            jump: right - left,
            population_jump: pr - pl,
        });
        order += 1;
    }
    out
}
