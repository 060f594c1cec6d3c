//! Defining integrals over the fundamental cell, evaluated by 2-D trapezoid
//! quadrature with analytic per-mode line integrals.

use std::f64::consts::PI;

use nalgebra::Vector2;
use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fields::{MagneticPotential, ScalarField};
use crate::lattice::{perp, Vec2};
use crate::quad::{centered_grid, phi1, phi1_with_derivatives, SegmentRule};

type CVec2 = Vector2<Complex64>;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

/// Phase `Phi(x) = -A^0(d).x + int_0^1 A(x + s d).d ds` of the raw integrands.
pub fn raw_phase(a: &MagneticPotential, x: &Vec2, d: &Vec2) -> f64 {
    -a.linear(d).dot(x) + a.line_integral(x, d)
}

/// `I(d) = int_D exp(i Phi(x)) dx` on an `n x n` grid.
pub fn i_raw(a: &MagneticPotential, d: &Vec2, n: usize) -> Complex64 {
    cell_integral(a, n, |x| Complex64::from_polar(1.0, raw_phase(a, x, d)))
}

/// `phi(x, y) = int_0^1 (x - y).A(y + s(x - y)) ds`.
pub fn m0_phase(a: &MagneticPotential, x: &Vec2, y: &Vec2) -> f64 {
    a.line_integral(y, &(x - y))
}

fn cdot(u: &CVec2, v: &CVec2) -> Complex64 {
    u.x * v.x + u.y * v.y
}

fn cdot_real(u: &CVec2, v: &Vec2) -> Complex64 {
    u.x * v.x + u.y * v.y
}

fn lift(v: &Vec2) -> CVec2 {
    CVec2::new(v.x.into(), v.y.into())
}

/// Amplitude term `b(x, y) = sum_j (d_j phi - A_j(x))^2 - i d_j (d_j phi - A_j(x))`,
/// derivatives in `x`, evaluated mode by mode.
pub fn b_term(a: &MagneticPotential, x: &Vec2, y: &Vec2) -> Complex64 {
    let w = x - y;
    let mut g = lift(&(-perp(&w) * (0.5 * a.b0())));
    let mut l = ZERO;
    for m in a.modes() {
        let theta = 2.0 * PI * m.beta.dot(&w);
        let (f0, f1, f2) = phi1_with_derivatives(theta);
        let at_y = Complex64::from_polar(1.0, 2.0 * PI * m.beta.dot(y));
        let at_x = Complex64::from_polar(1.0, 2.0 * PI * m.beta.dot(x));
        let wa = cdot_real(&m.coeff, &w);
        let ba = cdot_real(&m.coeff, &m.beta);
        g += m.coeff * (at_y * f0 - at_x) + lift(&m.beta) * (at_y * wa * f1 * (2.0 * PI));
        l += at_y * (4.0 * PI * ba * f1 + (2.0 * PI).powi(2) * m.beta.norm_squared() * wa * f2)
            - 2.0 * PI * I * ba * at_x;
    }
    cdot(&g, &g) - I * l
}

/// `int_0^1 V(x + s d) ds` from the cosine coefficients of `V`.
pub fn v_line(v: &ScalarField, x: &Vec2, d: &Vec2) -> f64 {
    let lat = v.lattice();
    v.coeffs()
        .iter()
        .map(|(&(p, q), &c)| {
            let beta = lat.dual_point(p as i64, q as i64);
            (c * Complex64::from_polar(1.0, 2.0 * PI * beta.dot(x)) * phi1(2.0 * PI * beta.dot(d))).re
        })
        .sum()
}

/// Number of Gauss-Legendre panels that resolve the segment oscillations of
/// every product of two modes along `d`.
pub fn segment_panels(a: &MagneticPotential, d: &Vec2) -> usize {
    let max_turns = a
        .modes()
        .iter()
        .map(|m| m.beta.dot(d).abs())
        .fold(0.0, f64::max);
    (2.0 * max_turns).ceil().max(2.0) as usize
}

/// Segment rule used for `int_0^1 b(x + s d, x) ds`.
pub fn segment_rule(a: &MagneticPotential, d: &Vec2) -> SegmentRule {
    SegmentRule::composite(segment_panels(a, d), 12)
}

/// Raw `J(d)` split into its potential part `J_1` and amplitude part `J_2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RawJ {
    pub v_part: Complex64,
    pub b_part: Complex64,
}

impl RawJ {
    pub fn total(&self) -> Complex64 {
        self.v_part + self.b_part
    }
}

/// `J(d) = int_D (V_line(x) + b_line(x)) exp(i Phi(x)) dx` on an `n x n` grid.
pub fn j_raw(a: &MagneticPotential, v: &ScalarField, d: &Vec2, n: usize) -> Result<RawJ> {
    if v.mean() != 0.0 {
        return Err(Error::NonzeroMeanPotential { mean: v.mean() });
    }
    let rule = segment_rule(a, d);
    let v_part = cell_integral(a, n, |x| v_line(v, x, d) * Complex64::from_polar(1.0, raw_phase(a, x, d)));
    let b_part = cell_integral(a, n, |x| {
        let bl: Complex64 = rule.integrate(|s| b_term(a, &(x + d * s), x));
        bl * Complex64::from_polar(1.0, raw_phase(a, x, d))
    });
    Ok(RawJ { v_part, b_part })
}

/// Trapezoid rule over the cell `x = s e1 + t e2`, `(s, t)` on the centered grid.
fn cell_integral<F>(a: &MagneticPotential, n: usize, f: F) -> Complex64
where
    F: Fn(&Vec2) -> Complex64 + Sync,
{
    let lat = a.lattice();
    let nodes: Vec<f64> = centered_grid(n).collect();
    let sum: Complex64 = nodes
        .par_iter()
        .map(|&t| nodes.iter().map(|&s| f(&lat.from_coords(s, t))).sum::<Complex64>())
        .collect::<Vec<_>>()
        .into_iter()
        .sum();
    sum * (lat.area() / (n * n) as f64)
}
