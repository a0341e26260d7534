//! Simulation of one or two quantum emitters coupled through a short
//! waveguide link.
//!
//! The emitters obey delay differential equations whose memory terms are the
//! photon echoes bouncing between the closed ends of the link. This crate
//! integrates them ([`dde`]), checks them against the exact single-emitter
//! series and spectral results ([`analytic`]) and an explicit multimode
//! simulation ([`ww`]), and benchmarks state-transfer protocols
//! ([`protocols`], [`sweep`]).
//!
//! Units: everything is expressed in terms of the traversal time `τ`; the
//! command-line tool fixes `τ = 1`.

pub mod analytic;
pub mod cli;
pub mod dde;
pub mod error;
pub mod grid;
pub mod io;
pub mod link;
pub mod protocols;
pub mod pulse;
pub mod sweep;
pub mod trajectory;
pub mod ww;

pub use dde::{derivative_kinks, evolve_pair, evolve_single, output_field, Kink, RoundTrip};
pub use error::{Error, Result};
pub use grid::{TimeGrid, DEFAULT_STEPS_PER_TAU};
pub use link::{make_link, LinkParams};
pub use num_complex::Complex64;
pub use pulse::{eval_pulse, PulseProfile, PulseShape};
pub use trajectory::Trajectory;
