//! Sampled emitter amplitudes on a time grid.

use std::io::Write;

use num_complex::Complex64 as C64;

use crate::error::{invalid, Error, Result};
use crate::grid::TimeGrid;
use crate::io::{write_metadata, write_row};

/// Output-field samples recorded by the delay engine.
#[derive(Debug, Clone)]
pub(crate) struct EchoRecord {
    /// Echo period in grid steps (the round trip).
    pub period: usize,
    /// `b_l^out(t_i)` per emitter, right-continuous at the echo arrivals.
    pub field: Vec<Vec<C64>>,
}

/// Emitter amplitudes `c_l(t_i)` and couplings `γ_l(t_i)` on a grid.
#[derive(Debug, Clone)]
pub struct Trajectory {
    grid: TimeGrid,
    times: Vec<f64>,
    c: Vec<Vec<C64>>,
    gamma: Vec<Vec<f64>>,
    pub(crate) echo: Option<EchoRecord>,
    photons: Option<Vec<f64>>,
}

impl Trajectory {
    pub(crate) fn new(grid: TimeGrid, c: Vec<Vec<C64>>, gamma: Vec<Vec<f64>>) -> Self {
        let times = grid.times();
        debug_assert!(c.iter().all(|v| v.len() == times.len()));
        Self {
            grid,
            times,
            c,
            gamma,
            echo: None,
            photons: None,
        }
    }

    pub(crate) fn with_photons(mut self, photons: Vec<f64>) -> Self {
        self.photons = Some(photons);
        self
    }

    pub fn grid(&self) -> &TimeGrid {
        &self.grid
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn emitters(&self) -> usize {
        self.c.len()
    }

    pub fn t_end(&self) -> f64 {
        self.grid.t_end()
    }

    /// Amplitudes of emitter `l` (zero-based).
    pub fn amplitudes(&self, l: usize) -> &[C64] {
        &self.c[l]
    }

    /// Coupling samples of emitter `l`.
    pub fn couplings(&self, l: usize) -> &[f64] {
        &self.gamma[l]
    }

    pub fn population(&self, l: usize, i: usize) -> f64 {
        self.c[l][i].norm_sqr()
    }

    /// `Σ_l |c_l(t_i)|²`.
    pub fn emitter_population(&self, i: usize) -> f64 {
        self.c.iter().map(|c| c[i].norm_sqr()).sum()
    }

    /// Photons in the link at node `i`. Uses the recorded mode population
    /// when available, otherwise `1 − Σ_l |c_l|²`.
    pub fn photon_number(&self, i: usize) -> f64 {
        match &self.photons {
            Some(n) => n[i],
            None => 1.0 - self.emitter_population(i),
        }
    }

    /// Whether the photon number comes from explicit mode amplitudes.
    pub fn has_mode_photons(&self) -> bool {
        self.photons.is_some()
    }

    /// Node index of time `t`, or an error when `t` is not a node.
    pub fn index_of(&self, t: f64) -> Result<usize> {
        self.grid.node_index(t).ok_or(Error::OutOfRange {
            t,
            t_end: self.t_end(),
        })
    }

    /// `c_l(t)`: the node value when `t` is a node, otherwise cubic
    /// Lagrange interpolation through the four surrounding nodes.
    pub fn amplitude_at(&self, l: usize, t: f64) -> Result<C64> {
        if l >= self.emitters() {
            return Err(invalid("emitter", format!("index {l} out of range")));
        }
        if let Some(i) = self.grid.node_index(t) {
            return Ok(self.c[l][i]);
        }
        if !(0.0..=self.t_end()).contains(&t) {
            return Err(Error::OutOfRange {
                t,
                t_end: self.t_end(),
            });
        }
        let hi = self.times.partition_point(|&x| x <= t);
        let n = self.times.len();
        let lo = hi.saturating_sub(2).min(n.saturating_sub(4));
        let idx: Vec<usize> = (lo..(lo + 4).min(n)).collect();
        let mut acc = C64::new(0.0, 0.0);
        for &j in &idx {
            let mut w = 1.0;
            for &k in &idx {
                if k != j {
                    w *= (t - self.times[k]) / (self.times[j] - self.times[k]);
                }
            }
            acc += self.c[l][j] * w;
        }
        Ok(acc)
    }

    /// Writes the trajectory as CSV with columns
    /// `t,re_c1,im_c1,re_c2,im_c2,abs2_c1,abs2_c2,n_photon`.
    /// A single-emitter trajectory reports zeros for the second emitter.
    pub fn write_csv<W: Write>(&self, w: &mut W, meta: &[(&str, String)]) -> Result<()> {
        write_metadata(w, meta)?;
        writeln!(w, "t,re_c1,im_c1,re_c2,im_c2,abs2_c1,abs2_c2,n_photon")?;
        let zero = C64::new(0.0, 0.0);
        for i in 0..self.len() {
            let c1 = self.c[0][i];
            let c2 = self.c.get(1).map_or(zero, |c| c[i]);
            write_row(
                w,
                &[
                    self.times[i],
                    c1.re,
                    c1.im,
                    c2.re,
                    c2.im,
                    c1.norm_sqr(),
                    c2.norm_sqr(),
                    self.photon_number(i),
                ],
            )?;
        }
        Ok(())
    }
}
