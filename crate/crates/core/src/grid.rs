use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

/// Default resolution of the delay-aligned grid.
pub const DEFAULT_STEPS_PER_TAU: usize = 200;

/// Relative tolerance used to decide whether a time sits on a grid node.
const NODE_TOL: f64 = 1e-9;

/// Fixed-step time grid aligned to a delay unit `tau`: `h = tau / M`.
///
/// Nodes sit at `i h` for `i = 0..=n_full`. When `t_end` is not a multiple
/// of `h`, one extra node at `t_end` closes the grid with a shorter final
/// step, so `t_end` is always a node.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TimeGrid {
    tau: f64,
    steps_per_tau: usize,
    t_end: f64,
}

impl TimeGrid {
    pub fn new(tau: f64, steps_per_tau: usize, t_end: f64) -> Result<Self> {
        if !(tau.is_finite() && tau > 0.0) {
            return Err(invalid("tau", "must be finite and > 0"));
        }
        if steps_per_tau == 0 {
            return Err(invalid("steps_per_tau", "must be >= 1"));
        }
        if !(t_end.is_finite() && t_end >= 0.0) {
            return Err(invalid(
                "t_end",
                format!("must be finite and >= 0, got {t_end}"),
            ));
        }
        Ok(Self {
            tau,
            steps_per_tau,
            t_end,
        })
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn steps_per_tau(&self) -> usize {
        self.steps_per_tau
    }

    pub fn h(&self) -> f64 {
        self.tau / self.steps_per_tau as f64
    }

    pub fn t_end(&self) -> f64 {
        self.t_end
    }

    /// Number of full steps of size `h`.
    pub fn full_steps(&self) -> usize {
        let r = self.t_end / self.h();
        let n = r.round();
        if (r - n).abs() <= NODE_TOL * n.max(1.0) {
            n as usize
        } else {
            r.floor() as usize
        }
    }

    /// Length of the closing step as a fraction of `h`, zero when `t_end`
    /// is itself a multiple of `h`.
    pub fn final_fraction(&self) -> f64 {
        let n = self.full_steps();
        let rest = (self.t_end - n as f64 * self.h()) / self.h();
        if rest <= NODE_TOL {
            0.0
        } else {
            rest
        }
    }

    pub fn len(&self) -> usize {
        self.full_steps() + 1 + usize::from(self.final_fraction() > 0.0)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn time(&self, i: usize) -> f64 {
        let n = self.full_steps();
        if i == n && self.final_fraction() == 0.0 {
            self.t_end
        } else if i <= n {
            i as f64 * self.h()
        } else {
            self.t_end
        }
    }

    pub fn times(&self) -> Vec<f64> {
        (0..self.len()).map(|i| self.time(i)).collect()
    }

    /// Integer number of steps spanned by `delay`, which must be a multiple of `h`.
    pub fn steps_for(&self, delay: f64) -> Result<usize> {
        let r = delay / self.h();
        let n = r.round();
        if n < 1.0 || (r - n).abs() > NODE_TOL * n.max(1.0) {
            return Err(Error::GridMisaligned(format!(
                "delay {delay} is not a positive multiple of h = {}",
                self.h()
            )));
        }
        Ok(n as usize)
    }

    /// Index of the node at time `t`, if `t` is a node.
    pub fn node_index(&self, t: f64) -> Option<usize> {
        if !(0.0..=self.t_end * (1.0 + NODE_TOL) + NODE_TOL).contains(&t) {
            return None;
        }
        let last = self.len() - 1;
        if (t - self.t_end).abs() <= NODE_TOL * self.h() {
            return Some(last);
        }
        let r = t / self.h();
        let n = r.round();
        if (r - n).abs() <= NODE_TOL && (n as usize) <= last {
            Some(n as usize)
        } else {
            None
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn aligned_grid() {
        let g = TimeGrid::new(1.0, 200, 12.0).unwrap();
        assert_eq!(g.full_steps(), 2400);
        assert_eq!(g.final_fraction(), 0.0);
        assert_eq!(g.len(), 2401);
        assert_eq!(g.time(2400), 12.0);
        assert_eq!(g.steps_for(2.0).unwrap(), 400);
        assert!(g.steps_for(0.0025).is_err());
        assert_eq!(g.node_index(1.0), Some(200));
        assert_eq!(g.node_index(1.0025), None);
        assert_eq!(g.node_index(12.0), Some(2400));
        assert_eq!(g.node_index(-1.0), None);
    }

    #[test]
    fn partial_final_step() {
        let g = TimeGrid::new(1.0, 4, 2.1).unwrap();
        assert_eq!(g.full_steps(), 8);
        assert!((g.final_fraction() - 0.4).abs() < 1e-12);
        assert_eq!(g.len(), 10);
        assert_eq!(g.time(9), 2.1);
        assert_eq!(g.node_index(2.1), Some(9));
        assert_eq!(g.node_index(2.0), Some(8));
    }

    #[test]
    fn rejects_bad_grids() {
        assert!(TimeGrid::new(0.0, 10, 1.0).is_err());
        assert!(TimeGrid::new(1.0, 0, 1.0).is_err());
        assert!(TimeGrid::new(1.0, 10, -1.0).is_err());
    }
}
