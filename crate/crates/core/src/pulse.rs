//! Time-dependent emitter couplings `γ_l(t)`.
//!
//! A [`PulseProfile`] is a tagged shape evaluated on a closed support
//! interval, optionally time-reversed about a mirror point. Outside the
//! support the coupling is zero. Profiles serialize to a JSON object of the
//! form
//!
//! ```json
//! {"shape": "sin_sq", "params": {"gamma0": 0.1, "duration": 20.0},
//!  "support": [0.0, 20.0], "mirror": 10.0}
//! ```
//!
//! where `mirror` is optional. See `docs/pulse-schema.md` for every shape.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

/// Functional form of a coupling profile.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "shape", content = "params", rename_all = "snake_case")]
pub enum PulseShape {
    /// `γ(t) = γ₀`.
    Constant { gamma0: f64 },
    /// `γ(t) = γ₀ sin²(π t / 2T)`.
    SinSq { gamma0: f64, duration: f64 },
    /// `γ(t) = γ₀/2 [1 + tanh(γ₀ (t − center) / 2)]`.
    TanhCzkm { gamma0: f64, center: f64 },
    /// Coupling derived from a sampled wavepacket density, see
    /// [`crate::protocols::shaped_pulse`]. `values` holds the derived
    /// coupling on `times` and is linearly interpolated.
    Shaped {
        times: Vec<f64>,
        density: Vec<f64>,
        values: Vec<f64>,
        gamma_max: f64,
        saturated: bool,
    },
    /// Linearly interpolated samples.
    Sampled { times: Vec<f64>, values: Vec<f64> },
}

impl PulseShape {
    fn raw(&self, t: f64) -> f64 {
        match self {
            PulseShape::Constant { gamma0 } => *gamma0,
            PulseShape::SinSq { gamma0, duration } => {
                let s = (PI * t / (2.0 * duration)).sin();
                gamma0 * s * s
            }
            PulseShape::TanhCzkm { gamma0, center } => {
                0.5 * gamma0 * (1.0 + (0.5 * gamma0 * (t - center)).tanh())
            }
            PulseShape::Shaped { times, values, .. } | PulseShape::Sampled { times, values } => {
                interpolate(times, values, t)
            }
        }
    }

    /// Upper bound of the coupling, the resource cap `γ₀` for analytic shapes.
    pub fn cap(&self) -> f64 {
        match self {
            PulseShape::Constant { gamma0 }
            | PulseShape::SinSq { gamma0, .. }
            | PulseShape::TanhCzkm { gamma0, .. } => *gamma0,
            PulseShape::Shaped { gamma_max, .. } => *gamma_max,
            PulseShape::Sampled { values, .. } => values.iter().copied().fold(0.0, f64::max),
        }
    }

    fn validate(&self) -> Result<()> {
        let finite_nonneg = |name, x: f64| {
            if x.is_finite() && x >= 0.0 {
                Ok(())
            } else {
                Err(invalid(name, format!("must be finite and >= 0, got {x}")))
            }
        };
        match self {
            PulseShape::Constant { gamma0 } => finite_nonneg("gamma0", *gamma0),
            PulseShape::SinSq { gamma0, duration } => {
                finite_nonneg("gamma0", *gamma0)?;
                if !(duration.is_finite() && *duration > 0.0) {
                    return Err(invalid("duration", "must be finite and > 0"));
                }
                Ok(())
            }
            PulseShape::TanhCzkm { gamma0, center } => {
                finite_nonneg("gamma0", *gamma0)?;
                if !center.is_finite() {
                    return Err(invalid("center", "must be finite"));
                }
                Ok(())
            }
            PulseShape::Shaped { times, values, .. } | PulseShape::Sampled { times, values } => {
                validate_samples(times, values)
            }
        }
    }
}

fn validate_samples(times: &[f64], values: &[f64]) -> Result<()> {
    if times.len() < 2 || times.len() != values.len() {
        return Err(invalid(
            "samples",
            format!(
                "need >= 2 time/value pairs of equal length, got {} and {}",
                times.len(),
                values.len()
            ),
        ));
    }
    if times.iter().chain(values).any(|x| !x.is_finite()) {
        return Err(invalid("samples", "non-finite entry"));
    }
    if times.windows(2).any(|w| w[1] <= w[0]) {
        return Err(invalid("samples", "time axis must be strictly increasing"));
    }
    Ok(())
}

fn interpolate(times: &[f64], values: &[f64], t: f64) -> f64 {
    let last = times.len() - 1;
    if t <= times[0] {
        return values[0];
    }
    if t >= times[last] {
        return values[last];
    }
    let hi = times.partition_point(|&x| x <= t);
    let lo = hi - 1;
    let w = (t - times[lo]) / (times[hi] - times[lo]);
    values[lo] + w * (values[hi] - values[lo])
}

/// A coupling shape restricted to a support interval.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawPulse", into = "RawPulse")]
pub struct PulseProfile {
    shape: PulseShape,
    support: [f64; 2],
    mirror: Option<f64>,
}

#[derive(Serialize, Deserialize)]
struct RawPulse {
    #[serde(flatten)]
    shape: PulseShape,
    support: [f64; 2],
    #[serde(default, skip_serializing_if = "Option::is_none")]
    mirror: Option<f64>,
}

impl TryFrom<RawPulse> for PulseProfile {
    type Error = Error;

    fn try_from(raw: RawPulse) -> Result<Self> {
        let p = PulseProfile::new(raw.shape, raw.support[0], raw.support[1])?;
        match raw.mirror {
            Some(m) => p.mirrored(m),
            None => Ok(p),
        }
    }
}

impl From<PulseProfile> for RawPulse {
    fn from(p: PulseProfile) -> Self {
        RawPulse {
            shape: p.shape,
            support: p.support,
            mirror: p.mirror,
        }
    }
}

impl PulseProfile {
    pub fn new(shape: PulseShape, start: f64, end: f64) -> Result<Self> {
        shape.validate()?;
        if !(start.is_finite() && end.is_finite() && start <= end) {
            return Err(invalid(
                "support",
                format!("need finite start <= end, got [{start}, {end}]"),
            ));
        }
        Ok(Self {
            shape,
            support: [start, end],
            mirror: None,
        })
    }

    pub fn constant(gamma0: f64, start: f64, end: f64) -> Result<Self> {
        Self::new(PulseShape::Constant { gamma0 }, start, end)
    }

    pub fn sin_sq(gamma0: f64, duration: f64) -> Result<Self> {
        Self::new(PulseShape::SinSq { gamma0, duration }, 0.0, duration)
    }

    pub fn tanh_czkm(gamma0: f64, center: f64, start: f64, end: f64) -> Result<Self> {
        Self::new(PulseShape::TanhCzkm { gamma0, center }, start, end)
    }

    /// Linearly interpolated samples, supported on the sampled time range.
    pub fn sampled(times: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        validate_samples(&times, &values)?;
        let (start, end) = (times[0], times[times.len() - 1]);
        Self::new(PulseShape::Sampled { times, values }, start, end)
    }

    /// Time-reversed copy: `p'(t) = p(2 m − t)`, keeping the support.
    pub fn mirrored(mut self, about: f64) -> Result<Self> {
        if !about.is_finite() {
            return Err(invalid("mirror", "must be finite"));
        }
        self.mirror = Some(about);
        Ok(self)
    }

    pub fn shape(&self) -> &PulseShape {
        &self.shape
    }

    pub fn support(&self) -> (f64, f64) {
        (self.support[0], self.support[1])
    }

    pub fn mirror(&self) -> Option<f64> {
        self.mirror
    }

    pub fn cap(&self) -> f64 {
        self.shape.cap()
    }

    /// Coupling rate at `t`; zero outside the support, never negative.
    pub fn eval(&self, t: f64) -> f64 {
        if t < self.support[0] || t > self.support[1] {
            return 0.0;
        }
        let s = match self.mirror {
            Some(m) => 2.0 * m - t,
            None => t,
        };
        self.shape.raw(s).clamp(0.0, self.shape.cap().max(0.0))
    }

    /// `√γ(t)`, with `√0 = 0`.
    pub fn sqrt_eval(&self, t: f64) -> f64 {
        self.eval(t).sqrt()
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }
}

/// Free-function form of [`PulseProfile::eval`].
pub fn eval_pulse(p: &PulseProfile, t: f64) -> f64 {
    p.eval(t)
}
