use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::fields::DirectionalData;
use crate::lattice::PrimitiveDirection;
use crate::quad::centered_grid;
use crate::roots::invert_increasing;

/// Default number of samples of the inverse map.
pub const DEFAULT_COV_POINTS: usize = 1024;

const NEWTON_TOL: f64 = 1e-14;

/// The monotone reparameterization `y(s) = s + A^1_delta(s)` of one direction
/// together with its inverse `s(y)` sampled on the uniform grid
/// `y_j = -1/2 + j/n`.
///
/// `y(s + 1) = y(s) + 1` and `y` is odd, so `s(y)` inherits both properties and
/// `s'(y)` is even and 1-periodic.
#[derive(Debug, Clone)]
pub struct ChangeOfVariables {
    data: DirectionalData,
    s_of_y: Vec<f64>,
    sprime: Vec<f64>,
}

impl ChangeOfVariables {
    pub fn build(dd: &DirectionalData, n: usize) -> Result<Self> {
        if n < 4 {
            return Err(Error::InvalidInput(format!("need at least 4 samples, got {n}")));
        }
        let min_derivative = centered_grid(4 * n)
            .map(|s| 1.0 + dd.potential_derivative(s))
            .fold(f64::INFINITY, f64::min);
        if !(min_derivative > 0.0) {
            return Err(Error::NonMonotone {
                dir: dd.dir,
                min_derivative,
            });
        }
        let bound = dd.potential_bound() + 1e-12;
        let mut s_of_y = Vec::with_capacity(n);
        let mut sprime = Vec::with_capacity(n);
        for y in centered_grid(n) {
            let s = invert_increasing(
                |s| (s + dd.potential(s), 1.0 + dd.potential_derivative(s)),
                y,
                y - bound,
                y + bound,
                NEWTON_TOL,
            )
            .ok_or(Error::NonMonotone {
                dir: dd.dir,
                min_derivative,
            })?;
            s_of_y.push(s);
            sprime.push(1.0 / (1.0 + dd.potential_derivative(s)));
        }
        Ok(Self {
            data: dd.clone(),
            s_of_y,
            sprime,
        })
    }

    pub fn dir(&self) -> PrimitiveDirection {
        self.data.dir
    }

    pub fn data(&self) -> &DirectionalData {
        &self.data
    }

    pub fn len(&self) -> usize {
        self.s_of_y.len()
    }

    pub fn is_empty(&self) -> bool {
        self.s_of_y.is_empty()
    }

    pub fn grid(&self) -> impl Iterator<Item = f64> + Clone {
        centered_grid(self.len())
    }

    pub fn y_of_s(&self, s: f64) -> f64 {
        s + self.data.potential(s)
    }

    pub fn s_samples(&self) -> &[f64] {
        &self.s_of_y
    }

    pub fn sprime_samples(&self) -> &[f64] {
        &self.sprime
    }

    /// Periodic remainder `e(y_j) = s(y_j) - y_j`.
    pub fn remainder(&self) -> Vec<f64> {
        self.grid().zip(&self.s_of_y).map(|(y, s)| s - y).collect()
    }

    /// `s(y)` at an arbitrary point, by Newton inversion.
    pub fn s_of_y(&self, y: f64) -> f64 {
        let bound = self.data.potential_bound() + 1e-12;
        invert_increasing(
            |s| (self.y_of_s(s), 1.0 + self.data.potential_derivative(s)),
            y,
            y - bound,
            y + bound,
            NEWTON_TOL,
        )
        .expect("monotone map checked at construction")
    }

    /// `int_{-1/2}^{1/2} cos(2 pi k y) s'(y) dy` by the periodic trapezoid rule.
    pub fn cosine_moment(&self, k: u32) -> f64 {
        self.weighted_cosine_moment(k, |_| 1.0)
    }

    /// `int_{-1/2}^{1/2} sin(2 pi k y) s'(y) dy`; zero for even `s'`.
    pub fn sine_moment(&self, k: u32) -> f64 {
        let n = self.len() as f64;
        self.grid()
            .zip(&self.sprime)
            .map(|(y, sp)| (2.0 * PI * k as f64 * y).sin() * sp)
            .sum::<f64>()
            / n
    }

    /// `int_{-1/2}^{1/2} w(s(y)) s'(y) cos(2 pi k y) dy`.
    pub fn weighted_cosine_moment<W: Fn(f64) -> f64>(&self, k: u32, w: W) -> f64 {
        let n = self.len() as f64;
        self.grid()
            .zip(self.s_of_y.iter().zip(&self.sprime))
            .map(|(y, (&s, &sp))| w(s) * sp * (2.0 * PI * k as f64 * y).cos())
            .sum::<f64>()
            / n
    }
}
