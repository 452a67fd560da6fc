// SPDX-License-Identifier: Apache-2.0

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// How vehicle and solo costs combine into the objective.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "lowercase")]
pub enum Objective {
    /// Vehicle cost plus the sum of solo legs.
    #[default]
    Unweighted,
    /// `r5 * vehicle + (1 - r5) * solo`.
    Weighted { r5: f64 },
}

impl Objective {
    #[inline]
    pub fn vehicle_weight(self) -> f64 {
        match self {
            Objective::Unweighted => 1.0,
            Objective::Weighted { r5 } => r5,
        }
    }

    #[inline]
    pub fn solo_weight(self) -> f64 {
        match self {
            Objective::Unweighted => 1.0,
            Objective::Weighted { r5 } => 1.0 - r5,
        }
    }

    pub fn combine(self, vehicle: f64, solo: f64) -> f64 {
        match self {
            Objective::Unweighted => vehicle + solo,
            Objective::Weighted { r5 } => r5 * vehicle + (1.0 - r5) * solo,
        }
    }
}

/// Ride constraints. `None` means the constraint is off.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Constraints {
    /// Longest allowed solo leg.
    pub r1: Option<f64>,
    /// Vehicle route may be at most `r2 * SPC(st, en)`.
    pub r2: Option<f64>,
    /// Each intermediate stop needs at least this many boardings plus alightings.
    pub r3: u32,
    /// Most stops allowed, endpoints included.
    pub r4: Option<usize>,
    pub objective: Objective,
}

impl Constraints {
    pub fn none() -> Self {
        Constraints::default()
    }

    pub fn with_r1(mut self, r1: f64) -> Self {
        self.r1 = Some(r1);
        self
    }

    pub fn with_r2(mut self, r2: f64) -> Self {
        self.r2 = Some(r2);
        self
    }

    pub fn with_r3(mut self, r3: u32) -> Self {
        self.r3 = r3;
        self
    }

    pub fn with_r4(mut self, r4: usize) -> Self {
        self.r4 = Some(r4);
        self
    }

    pub fn weighted(mut self, r5: f64) -> Self {
        self.objective = Objective::Weighted { r5 };
        self
    }

    /// R3 values of 0 and 1 never bind: a stop with no activity is never useful.
    pub fn r3_active(&self) -> bool {
        self.r3 >= 2
    }

    /// Range checks for a query set of size `q`.
    pub fn validate(&self, _q: usize) -> Result<()> {
        if let Some(r1) = self.r1 {
            if !(r1 >= 0.0) {
                return Err(Error::InvalidConstraint(format!("R1 must be >= 0, got {r1}")));
            }
        }
        if let Some(r2) = self.r2 {
            if !(r2 >= 1.0) {
                return Err(Error::InvalidConstraint(format!("R2 must be >= 1, got {r2}")));
            }
        }
        if let Some(r4) = self.r4 {
            if r4 < 2 {
                return Err(Error::InvalidConstraint(format!("R4 must be >= 2, got {r4}")));
            }
        }
        if let Objective::Weighted { r5 } = self.objective {
            if !(1.0 / 3.0 - 1e-12..=1.0).contains(&r5) {
                return Err(Error::InvalidConstraint(format!("R5 must lie in [1/3, 1], got {r5}")));
            }
        }
        // R3 above 2q is allowed: no intermediate stop can reach it, so only
        // plans stopping at st and en remain.
        Ok(())
    }

    /// Penalty standing in for a solo leg longer than R1. It exceeds the
    /// cost of any plan without such legs: a plan visits at most `2q + 2`
    /// stops, so its vehicle part is at most `(2q + 1) W` and its solo part at
    /// most `2q W`, where `W` is the total edge cost.
    pub fn penalty(q: usize, total_edge_cost: f64) -> f64 {
        (4 * q + 2) as f64 * (1.0 + total_edge_cost)
    }

    /// Objective contribution of one solo leg of raw cost `x`.
    #[inline]
    pub fn leg_cost(&self, x: f64, penalty: f64) -> f64 {
        if !x.is_finite() {
            f64::INFINITY
        } else if self.r1.is_some_and(|r| x > r) {
            penalty
        } else {
            self.objective.solo_weight() * x
        }
    }

    pub fn leg_ok(&self, x: f64) -> bool {
        x.is_finite() && self.r1.is_none_or(|r| x <= r)
    }

    /// Longest vehicle route allowed, infinite when R2 is off.
    pub fn route_limit(&self, direct: f64) -> f64 {
        match self.r2 {
            Some(r2) => r2 * direct + 1e-9 * direct.abs().max(1.0),
            None => f64::INFINITY,
        }
    }
}
