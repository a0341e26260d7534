//! Physical configuration of a closed link with emitters at both ends.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

/// Decay-rate scale, single-traversal time and emitter frequency of a link.
///
/// The traversal phase `phi = delta * tau` and the free spectral range
/// `pi / tau` are always recomputed from the stored fields.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinkParams {
    gamma0: f64,
    tau: f64,
    delta: f64,
}

impl LinkParams {
    pub fn new(gamma0: f64, tau: f64, delta: f64) -> Result<Self> {
        if !tau.is_finite() || tau <= 0.0 {
            return Err(invalid("tau", format!("must be finite and > 0, got {tau}")));
        }
        if !gamma0.is_finite() || gamma0 < 0.0 {
            return Err(invalid(
                "gamma0",
                format!("must be finite and >= 0, got {gamma0}"),
            ));
        }
        if !delta.is_finite() {
            return Err(invalid("delta", format!("must be finite, got {delta}")));
        }
        Ok(Self { gamma0, tau, delta })
    }

    /// Builds a link from the dimensionless groups `gamma0 * tau` and
    /// `delta / fsr`, with `tau = 1`.
    pub fn from_scaled(gamma0_tau: f64, delta_over_fsr: f64) -> Result<Self> {
        Self::new(gamma0_tau, 1.0, delta_over_fsr * PI)
    }

    pub fn gamma0(&self) -> f64 {
        self.gamma0
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    /// Single-traversal phase, not reduced modulo 2π.
    pub fn phi(&self) -> f64 {
        self.delta * self.tau
    }

    /// Free spectral range `π / τ`.
    pub fn fsr(&self) -> f64 {
        PI / self.tau
    }

    pub fn gamma_tau(&self) -> f64 {
        self.gamma0 * self.tau
    }

    /// `e^{i n φ}` with the argument reduced modulo 2π before evaluation.
    pub fn phase(&self, n: u32) -> C64 {
        phase_factor(n, self.phi())
    }

    pub fn with_gamma0(&self, gamma0: f64) -> Result<Self> {
        Self::new(gamma0, self.tau, self.delta)
    }

    pub fn with_delta(&self, delta: f64) -> Result<Self> {
        Self::new(self.gamma0, self.tau, delta)
    }
}

/// Free-function form of [`LinkParams::new`].
pub fn make_link(gamma0: f64, tau: f64, delta: f64) -> Result<LinkParams> {
    LinkParams::new(gamma0, tau, delta)
}

/// `e^{i n θ}` evaluated from `(n θ) mod 2π`.
pub fn phase_factor(n: u32, theta: f64) -> C64 {
    let reduced = reduce_angle(theta) * f64::from(n);
    C64::from_polar(1.0, reduce_angle(reduced))
}

fn reduce_angle(x: f64) -> f64 {
    x.rem_euclid(TAU)
}
