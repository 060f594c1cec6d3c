//! Checks of the standing hypotheses: distinct lengths of lattice vectors,
//! unit flux, the field-strength bound and non-vanishing cosines.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::fields::{check_cosine_condition, check_field_condition, ScalarField};
use crate::lattice::{LengthViolation, Vec2};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HypothesisConfig {
    pub length_radius: f64,
    pub cosine_radius: f64,
    pub cosine_threshold: f64,
}

impl Default for HypothesisConfig {
    fn default() -> Self {
        Self {
            length_radius: 5.0,
            cosine_radius: 6.0,
            cosine_threshold: 1e-3,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HypothesisReport {
    pub length_violations: Vec<LengthViolation>,
    /// `b0 |D| - 2 pi`.
    pub flux_error: f64,
    /// `|b0| - max |B - b0|`.
    pub field_margin: f64,
    /// Lattice coordinates of `d` with `|cos(a0.d)|` below threshold.
    pub cosine_violations: Vec<(i64, i64)>,
}

impl HypothesisReport {
    pub fn check(b: &ScalarField, a0: &Vec2, config: &HypothesisConfig) -> Self {
        let lat = b.lattice();
        Self {
            length_violations: lat.length_violations(config.length_radius),
            flux_error: b.mean() * lat.area() - 2.0 * std::f64::consts::PI,
            field_margin: check_field_condition(b),
            cosine_violations: check_cosine_condition(a0, lat, config.cosine_radius, config.cosine_threshold),
        }
    }

    pub fn flux_ok(&self) -> bool {
        self.flux_error.abs() <= 1e-9
    }

    pub fn passes(&self) -> bool {
        self.length_violations.is_empty()
            && self.flux_ok()
            && self.field_margin > 0.0
            && self.cosine_violations.is_empty()
    }

    /// The first failed hypothesis as an error.
    pub fn into_result(self) -> Result<Self> {
        if !self.flux_ok() {
            return Err(Error::FluxNotQuantized {
                flux: self.flux_error + 2.0 * std::f64::consts::PI,
            });
        }
        let reason = if let Some(v) = self.length_violations.first() {
            format!("lattice vectors {:?} and {:?} have equal length {}", v.d, v.d_prime, v.length)
        } else if self.field_margin <= 0.0 {
            format!("|B - b0| reaches |b0| (margin {:e})", self.field_margin)
        } else if let Some(d) = self.cosine_violations.first() {
            format!("cos(a0.d) vanishes at d = {d:?}")
        } else {
            return Ok(self);
        };
        Err(Error::HypothesisViolation { reason })
    }
}
