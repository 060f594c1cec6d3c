//! Even real periodic fields, the canonical magnetic potential built from a
//! field, and directional restrictions of a field to a single dual ray.
//!
//! A field is `F(x) = sum_beta f_beta e^{2 pi i beta.x}` with `beta` running over
//! dual-lattice indices `(p, q)`. Evenness and realness force
//! `f_{-beta} = f_beta` real, so `F(x) = sum_beta f_beta cos(2 pi beta.x)`.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use nalgebra::Vector2;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::lattice::{is_canonical, perp, Lattice, PrimitiveDirection, Vec2};
use crate::quad::{centered_grid, phi1};

pub type DualIndex = (i32, i32);

/// Default resolution of grid-based field checks.
pub const DEFAULT_GRID: usize = 256;

#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField {
    lattice: Lattice,
    coeffs: BTreeMap<DualIndex, f64>,
}

impl ScalarField {
    /// Builds a field from its full coefficient table. With `normalize_flux`
    /// the mean is overwritten by `2 pi / area` (one flux quantum per cell).
    pub fn new<I>(lattice: Lattice, coeffs: I, normalize_flux: bool) -> Result<Self>
    where
        I: IntoIterator<Item = (DualIndex, f64)>,
    {
        let mut table: BTreeMap<DualIndex, f64> = BTreeMap::new();
        for (idx, v) in coeffs {
            if !v.is_finite() {
                return Err(Error::InvalidInput(format!(
                    "coefficient at {idx:?} is not finite"
                )));
            }
            if table.insert(idx, v).is_some() {
                return Err(Error::InvalidInput(format!("duplicate coefficient at {idx:?}")));
            }
        }
        for (&(p, q), &v) in &table {
            let mirror = table.get(&(-p, -q)).copied().unwrap_or(0.0);
            if (v - mirror).abs() > 1e-12 * v.abs().max(mirror.abs()).max(1.0) {
                return Err(Error::SymmetryViolation {
                    p,
                    q,
                    value: v,
                    mirror,
                });
            }
        }
        if normalize_flux {
            table.insert((0, 0), lattice.unit_flux_field());
        }
        table.retain(|_, v| *v != 0.0);
        Ok(Self {
            lattice,
            coeffs: table,
        })
    }

    /// Builds `mean + sum 2 c cos(2 pi beta.x)` from one representative `beta`
    /// per `+-beta` pair.
    pub fn from_cosine_modes(lattice: Lattice, mean: f64, modes: &[(DualIndex, f64)]) -> Result<Self> {
        let mut table = BTreeMap::new();
        table.insert((0, 0), mean);
        for &((p, q), c) in modes {
            if (p, q) == (0, 0) {
                return Err(Error::InvalidInput("mode (0, 0) is the mean".into()));
            }
            for idx in [(p, q), (-p, -q)] {
                if table.insert(idx, c).is_some() {
                    return Err(Error::InvalidInput(format!("duplicate mode {idx:?}")));
                }
            }
        }
        Self::new(lattice, table, false)
    }

    /// Field with only a mean term.
    pub fn constant(lattice: Lattice, mean: f64) -> Self {
        Self::new(lattice, [((0, 0), mean)], false).expect("constant field is symmetric")
    }

    pub fn lattice(&self) -> &Lattice {
        &self.lattice
    }

    pub fn coeffs(&self) -> &BTreeMap<DualIndex, f64> {
        &self.coeffs
    }

    pub fn coeff(&self, idx: DualIndex) -> f64 {
        self.coeffs.get(&idx).copied().unwrap_or(0.0)
    }

    pub fn mean(&self) -> f64 {
        self.coeff((0, 0))
    }

    /// `max(|p|, |q|)` over stored coefficients.
    pub fn cutoff(&self) -> i32 {
        self.coeffs
            .keys()
            .map(|&(p, q)| p.abs().max(q.abs()))
            .max()
            .unwrap_or(0)
    }

    /// `int_D F dx`.
    pub fn flux(&self) -> f64 {
        self.mean() * self.lattice.area()
    }

    pub fn with_mean(&self, mean: f64) -> Self {
        let mut out = self.clone();
        out.coeffs.insert((0, 0), mean);
        out.coeffs.retain(|_, v| *v != 0.0);
        out
    }

    pub fn eval(&self, x: &Vec2) -> f64 {
        let (s, t) = self.lattice.coords(x);
        self.eval_coords(s, t)
    }

    /// Value at `x = s e1 + t e2`.
    pub fn eval_coords(&self, s: f64, t: f64) -> f64 {
        self.coeffs
            .iter()
            .map(|(&(p, q), &c)| c * (2.0 * PI * (p as f64 * s + q as f64 * t)).cos())
            .sum()
    }

    /// Samples on the `n x n` cell grid `s, t in {-1/2 + j/n}`, row-major in `s`.
    pub fn sample_grid(&self, n: usize) -> Vec<f64> {
        let mut out = Vec::with_capacity(n * n);
        for s in centered_grid(n) {
            for t in centered_grid(n) {
                out.push(self.eval_coords(s, t));
            }
        }
        out
    }

    /// `max |F(x) - mean|` over the `n x n` grid.
    pub fn max_deviation(&self, n: usize) -> f64 {
        let mean = self.mean();
        self.sample_grid(n)
            .into_iter()
            .map(|v| (v - mean).abs())
            .fold(0.0, f64::max)
    }
}

/// Discrete Fourier analysis of grid samples (as produced by
/// [`ScalarField::sample_grid`]) for all indices with `|p|, |q| <= cutoff`.
pub fn analyze_grid(samples: &[f64], n: usize, cutoff: i32) -> BTreeMap<DualIndex, Complex64> {
    assert_eq!(samples.len(), n * n);
    let grid: Vec<f64> = centered_grid(n).collect();
    let mut out = BTreeMap::new();
    for p in -cutoff..=cutoff {
        for q in -cutoff..=cutoff {
            let mut acc = Complex64::new(0.0, 0.0);
            for (i, &s) in grid.iter().enumerate() {
                for (j, &t) in grid.iter().enumerate() {
                    let phase = -2.0 * PI * (p as f64 * s + q as f64 * t);
                    acc += samples[i * n + j] * Complex64::from_polar(1.0, phase);
                }
            }
            out.insert((p, q), acc / (n * n) as f64);
        }
    }
    out
}

/// One Fourier mode `a_beta e^{2 pi i beta.x}` of the periodic part of a
/// magnetic potential.
#[derive(Debug, Clone, PartialEq)]
pub struct PotentialMode {
    pub index: DualIndex,
    pub beta: Vec2,
    pub coeff: Vector2<Complex64>,
}

/// `A(x) = (b0/2)(-x2, x1) + a0 + sum_{beta != 0} a_beta e^{2 pi i beta.x}` with
/// `a_beta = b_beta (2 pi i)^{-1} |beta|^{-2} (-beta2, beta1)`, so that
/// `curl A = B`.
#[derive(Debug, Clone, PartialEq)]
pub struct MagneticPotential {
    field: ScalarField,
    b0: f64,
    a0: Vec2,
    modes: Vec<PotentialMode>,
}

impl MagneticPotential {
    pub fn from_field(field: &ScalarField, a0: Vec2) -> Result<Self> {
        let b0 = field.mean();
        if b0 == 0.0 {
            return Err(Error::ZeroMeanField);
        }
        let lat = field.lattice();
        let modes = field
            .coeffs()
            .iter()
            .filter(|(&idx, _)| idx != (0, 0))
            .map(|(&(p, q), &b)| {
                let beta = lat.dual_point(p as i64, q as i64);
                let scale = Complex64::new(0.0, -b / (2.0 * PI * beta.norm_squared()));
                let dir = perp(&beta);
                PotentialMode {
                    index: (p, q),
                    beta,
                    coeff: Vector2::new(scale * dir.x, scale * dir.y),
                }
            })
            .collect();
        Ok(Self {
            field: field.clone(),
            b0,
            a0,
            modes,
        })
    }

    pub fn field(&self) -> &ScalarField {
        &self.field
    }

    pub fn lattice(&self) -> &Lattice {
        self.field.lattice()
    }

    pub fn b0(&self) -> f64 {
        self.b0
    }

    pub fn a0(&self) -> Vec2 {
        self.a0
    }

    pub fn modes(&self) -> &[PotentialMode] {
        &self.modes
    }

    pub fn with_a0(&self, a0: Vec2) -> Self {
        Self { a0, ..self.clone() }
    }

    /// `A^0(x) = (b0/2)(-x2, x1)`.
    pub fn linear(&self, x: &Vec2) -> Vec2 {
        perp(x) * (0.5 * self.b0)
    }

    /// Periodic part `A^1(x)`.
    pub fn periodic(&self, x: &Vec2) -> Vec2 {
        let mut acc = Vector2::new(Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0));
        for m in &self.modes {
            acc += m.coeff * Complex64::from_polar(1.0, 2.0 * PI * m.beta.dot(x));
        }
        Vec2::new(acc.x.re, acc.y.re)
    }

    pub fn eval(&self, x: &Vec2) -> Vec2 {
        self.linear(x) + self.a0 + self.periodic(x)
    }

    /// `int_0^1 A(x + s v) . v ds`, exact: the linear part is evaluated at the
    /// midpoint and each periodic mode is averaged along the segment.
    pub fn line_integral(&self, x: &Vec2, v: &Vec2) -> f64 {
        0.5 * self.b0 * perp(x).dot(v) + self.a0.dot(v) + self.periodic_line_integral(x, v)
    }

    /// Periodic part of [`Self::line_integral`].
    pub fn periodic_line_integral(&self, x: &Vec2, v: &Vec2) -> f64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for m in &self.modes {
            let av = m.coeff.x * v.x + m.coeff.y * v.y;
            acc += av
                * Complex64::from_polar(1.0, 2.0 * PI * m.beta.dot(x))
                * phi1(2.0 * PI * m.beta.dot(v));
        }
        acc.re
    }
}

/// Restriction of a field to the dual ray `{p delta}` of one direction:
/// `B_delta(s) = sum_{p != 0} b_{p delta} e^{2 pi i p s}` and the directional
/// potential `A^1_delta(s) = sum_{p != 0} b_{p delta} / (2 pi i p b0) e^{2 pi i p s}`.
#[derive(Debug, Clone, PartialEq)]
pub struct DirectionalData {
    pub dir: PrimitiveDirection,
    pub b0: f64,
    /// `ray[p - 1] = b_{p delta}` for `p >= 1`; the ray is even in `p`.
    pub ray: Vec<f64>,
}

impl DirectionalData {
    pub fn new(dir: PrimitiveDirection, b0: f64, mut ray: Vec<f64>) -> Self {
        while ray.last() == Some(&0.0) {
            ray.pop();
        }
        Self { dir, b0, ray }
    }

    pub fn coeff(&self, p: i64) -> f64 {
        if p == 0 {
            return 0.0;
        }
        self.ray
            .get(p.unsigned_abs() as usize - 1)
            .copied()
            .unwrap_or(0.0)
    }

    pub fn is_zero(&self) -> bool {
        self.ray.iter().all(|&b| b == 0.0)
    }

    /// `B_delta(s) = sum_{p >= 1} 2 b_p cos(2 pi p s)`.
    pub fn field(&self, s: f64) -> f64 {
        self.ray
            .iter()
            .enumerate()
            .map(|(i, &b)| 2.0 * b * (2.0 * PI * (i + 1) as f64 * s).cos())
            .sum()
    }

    /// `A^1_delta(s) = sum_{p >= 1} b_p / (pi p b0) sin(2 pi p s)`.
    pub fn potential(&self, s: f64) -> f64 {
        self.ray
            .iter()
            .enumerate()
            .map(|(i, &b)| {
                let p = (i + 1) as f64;
                b / (PI * p * self.b0) * (2.0 * PI * p * s).sin()
            })
            .sum()
    }

    /// `d/ds A^1_delta = B_delta / b0`.
    pub fn potential_derivative(&self, s: f64) -> f64 {
        self.field(s) / self.b0
    }

    /// Upper bound `sum |b_p| / (pi p |b0|)` on `|A^1_delta|`.
    pub fn potential_bound(&self) -> f64 {
        self.ray
            .iter()
            .enumerate()
            .map(|(i, b)| b.abs() / (PI * (i + 1) as f64 * self.b0.abs()))
            .sum()
    }

    pub fn max_abs_field(&self, n: usize) -> f64 {
        centered_grid(n)
            .map(|s| self.field(s).abs())
            .fold(0.0, f64::max)
    }

    /// Largest deviation between the coefficient series and the line average
    /// `int_{-1/2}^{1/2} (B(x + s d0) - b0) ds` at `samples` points `x = s gamma`.
    pub fn line_average_deviation(&self, field: &ScalarField, samples: usize) -> f64 {
        let lat = field.lattice();
        let gamma = lat.dual_pair(self.dir).gamma;
        centered_grid(samples)
            .map(|s| {
                let avg = line_average(field, self.dir, &(gamma * s), 256);
                (avg - self.field(s)).abs()
            })
            .fold(0.0, f64::max)
    }
}

/// Extracts the ray `b_{p delta}` of `field` along `dir`.
pub fn directional(field: &ScalarField, dir: PrimitiveDirection) -> DirectionalData {
    let cutoff = field.cutoff() as i64;
    let ray = (1..=cutoff)
        .map(|p| {
            let (a, b) = dir.ray_index(p);
            if a.abs() > cutoff || b.abs() > cutoff {
                0.0
            } else {
                field.coeff((a as i32, b as i32))
            }
        })
        .collect();
    DirectionalData::new(dir, field.mean(), ray)
}

/// `int_{-1/2}^{1/2} (F(x + s d0) - mean) ds` by the periodic trapezoid rule.
pub fn line_average(field: &ScalarField, dir: PrimitiveDirection, x: &Vec2, n: usize) -> f64 {
    let d0 = dir.d0(field.lattice());
    let mean = field.mean();
    centered_grid(n)
        .map(|s| field.eval(&(x + d0 * s)) - mean)
        .sum::<f64>()
        / n as f64
}

/// `|b0| - max |B(x) - b0|` over the default grid; positive when the
/// field-strength hypothesis `|B - b0| < |b0|` holds.
pub fn check_field_condition(field: &ScalarField) -> f64 {
    field.mean().abs() - field.max_deviation(DEFAULT_GRID)
}

/// Lattice vectors `0 < |d| <= radius` (canonical sign) with
/// `|cos(a0.d)| < threshold`.
pub fn check_cosine_condition(a0: &Vec2, lat: &Lattice, radius: f64, threshold: f64) -> Vec<(i64, i64)> {
    let alpha = (a0.dot(&lat.e1()), a0.dot(&lat.e2()));
    lat.enumerate(radius)
        .into_iter()
        .filter(|&(m, n)| {
            debug_assert!(is_canonical(m, n));
            (m as f64 * alpha.0 + n as f64 * alpha.1).cos().abs() < threshold
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn identity() -> Lattice {
        Lattice::new(Vec2::new(1.0, 0.0), Vec2::new(0.0, 1.0)).unwrap()
    }

    fn oblique() -> Lattice {
        Lattice::new(Vec2::new(1.0, 0.0), Vec2::new(0.4, 1.1)).unwrap()
    }

    fn two_mode(lat: Lattice) -> ScalarField {
        let b0 = lat.unit_flux_field();
        ScalarField::from_cosine_modes(lat, b0, &[((1, 0), 0.6), ((1, 1), -0.3), ((0, 2), 0.2)]).unwrap()
    }

    #[test]
    fn constant_field_flux() {
        let lat = oblique();
        let f = ScalarField::new(lat.clone(), [((0, 0), 0.0)], true).unwrap();
        assert!((f.flux() - 2.0 * PI).abs() < 1e-14);
        assert!((f.eval(&Vec2::new(0.3, -2.0)) - 2.0 * PI / 1.1).abs() < 1e-14);
    }

    #[test]
    fn single_cosine_mode() {
        let f = ScalarField::new(identity(), [((0, 0), 2.0 * PI), ((1, 0), 0.5), ((-1, 0), 0.5)], false).unwrap();
        assert!((f.eval(&Vec2::zeros()) - (2.0 * PI + 1.0)).abs() < 1e-14);
        let x = Vec2::new(0.2, 0.7);
        assert!((f.eval(&x) - (2.0 * PI + (2.0 * PI * 0.2).cos())).abs() < 1e-14);
    }

    #[test]
    fn rejects_asymmetric_coefficients() {
        let err = ScalarField::new(identity(), [((1, 0), 0.5), ((-1, 0), 0.4)], false).unwrap_err();
        assert!(matches!(err, Error::SymmetryViolation { .. }));
        let err = ScalarField::new(identity(), [((2, 1), 0.5)], false).unwrap_err();
        assert!(matches!(err, Error::SymmetryViolation { .. }));
    }

    #[test]
    fn normalized_flux_by_quadrature() {
        let f = two_mode(oblique());
        let n = 64;
        let flux = f.sample_grid(n).iter().sum::<f64>() / (n * n) as f64 * f.lattice().area();
        assert!((flux - 2.0 * PI).abs() < 1e-10);
    }

    #[test]
    fn evaluation_is_even() {
        let f = two_mode(oblique());
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..100 {
            let x = Vec2::new(rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0));
            assert!((f.eval(&x) - f.eval(&-x)).abs() < 1e-12);
        }
    }

    #[test]
    fn parseval_round_trip() {
        let f = two_mode(oblique());
        let n = 16;
        let got = analyze_grid(&f.sample_grid(n), n, 3);
        for (idx, c) in got {
            assert!((c.re - f.coeff(idx)).abs() < 1e-10);
            assert!(c.im.abs() < 1e-10);
        }
    }

    #[test]
    fn constant_field_potential_has_no_modes() {
        let f = ScalarField::constant(oblique(), 2.0);
        let a = MagneticPotential::from_field(&f, Vec2::new(0.1, 0.2)).unwrap();
        assert!(a.modes().is_empty());
        let x = Vec2::new(0.5, -0.25);
        assert!((a.eval(&x) - (a.linear(&x) + a.a0())).norm() < 1e-15);
        let zero = ScalarField::new(oblique(), [((1, 0), 1.0), ((-1, 0), 1.0)], false).unwrap();
        assert_eq!(MagneticPotential::from_field(&zero, Vec2::zeros()), Err(Error::ZeroMeanField));
    }

    fn curl(a: &MagneticPotential, x: &Vec2) -> f64 {
        let d = |h: f64| {
            let ex = Vec2::new(h, 0.0);
            let ey = Vec2::new(0.0, h);
            let d2x = (a.eval(&(x + ex)).y - a.eval(&(x - ex)).y) / (2.0 * h);
            let d1y = (a.eval(&(x + ey)).x - a.eval(&(x - ey)).x) / (2.0 * h);
            d2x - d1y
        };
        let h = 1e-4;
        (4.0 * d(h / 2.0) - d(h)) / 3.0
    }

    #[test]
    fn curl_reproduces_field() {
        for lat in [identity(), oblique()] {
            let f = two_mode(lat);
            let a = MagneticPotential::from_field(&f, Vec2::new(0.3, 0.7)).unwrap();
            for s in centered_grid(7) {
                for t in centered_grid(5) {
                    let x = f.lattice().from_coords(s, t);
                    assert!((curl(&a, &x) - f.eval(&x)).abs() < 1e-8);
                }
            }
        }
    }

    #[test]
    fn single_mode_potential_coefficient() {
        let f = ScalarField::new(identity(), [((0, 0), 2.0 * PI), ((1, 0), 1.0), ((-1, 0), 1.0)], false).unwrap();
        let a = MagneticPotential::from_field(&f, Vec2::zeros()).unwrap();
        let m = a.modes().iter().find(|m| m.index == (1, 0)).unwrap();
        // (2 pi i)^{-1} (0, 1)
        assert!(m.coeff.x.norm() < 1e-16);
        assert!((m.coeff.y - Complex64::new(0.0, -1.0 / (2.0 * PI))).norm() < 1e-16);
    }

    #[test]
    fn periodic_part_is_odd() {
        let a = MagneticPotential::from_field(&two_mode(oblique()), Vec2::zeros()).unwrap();
        let x = Vec2::new(0.37, -0.81);
        assert!((a.periodic(&x) + a.periodic(&-x)).norm() < 1e-14);
    }

    #[test]
    fn gauge_shift_preserves_holonomies() {
        let lat = oblique();
        let a0 = Vec2::new(0.3, 0.7);
        let shifted = a0 + lat.dual_point(2, -1) * (2.0 * PI);
        for (m, n) in lat.enumerate(4.0) {
            let d = lat.point(m, n);
            let diff = (a0.dot(&d) - shifted.dot(&d)) / (2.0 * PI);
            assert!((diff - diff.round()).abs() < 1e-12);
        }
    }

    #[test]
    fn linear_part_on_lattice() {
        let lat = oblique();
        let a = MagneticPotential::from_field(&ScalarField::constant(lat.clone(), lat.unit_flux_field()), Vec2::zeros()).unwrap();
        assert!((a.linear(&lat.e1()).dot(&lat.e2()) - PI).abs() < 1e-14);
        assert!((a.linear(&lat.e2()).dot(&lat.e1()) + PI).abs() < 1e-14);
        for (m, n) in lat.enumerate(5.0) {
            let d = lat.point(m, n);
            assert!(a.linear(&d).dot(&d).abs() < 1e-12);
            let (k, dir) = lat.primitive_decompose(m, n).unwrap();
            let sign = if dir.multiple(k as i64) == (m, n) { 1.0 } else { -1.0 };
            let want = dir.delta(&lat) * (PI * k as f64 * sign);
            assert!((a.linear(&d) - want).norm() < 1e-12);
        }
    }

    #[test]
    fn ray_pairing_with_lattice_vector() {
        let lat = oblique();
        let f = two_mode(lat.clone());
        let a = MagneticPotential::from_field(&f, Vec2::zeros()).unwrap();
        for m in a.modes() {
            let (mult, dir) = PrimitiveDirection::of_dual_index(m.index.0 as i64, m.index.1 as i64).unwrap();
            for k in 1..4 {
                let (dm, dn) = dir.multiple(k);
                let d = lat.point(dm, dn);
                let lhs = m.coeff.x * d.x + m.coeff.y * d.y;
                let b = f.coeff(m.index);
                // d . a_{p delta} = -k b / (i p b0): delta^perp = -d0 / area
                let rhs = Complex64::new(0.0, k as f64 * b / (mult as f64 * a.b0()));
                assert!((lhs - rhs).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn line_integral_matches_quadrature() {
        let a = MagneticPotential::from_field(&two_mode(oblique()), Vec2::new(0.3, 0.7)).unwrap();
        let x = Vec2::new(0.2, -0.4);
        let v = Vec2::new(1.3, 0.9);
        let rule = crate::quad::SegmentRule::composite(32, 8);
        let want: f64 = rule.integrate(|s| a.eval(&(x + v * s)).dot(&v));
        assert!((a.line_integral(&x, &v) - want).abs() < 1e-12);
    }

    #[test]
    fn directional_of_constant_field_vanishes() {
        let f = ScalarField::constant(oblique(), 3.0);
        let dd = directional(&f, PrimitiveDirection::new(1, 0).unwrap());
        assert!(dd.is_zero());
        assert_eq!(dd.field(0.3), 0.0);
    }

    #[test]
    fn directional_single_axis_mode() {
        let lat = oblique();
        let eps = 0.4;
        let f = ScalarField::from_cosine_modes(lat.clone(), lat.unit_flux_field(), &[((1, 0), eps)]).unwrap();
        // delta of (0,1) is -e1*, so the ray carries p = -1 -> (1, 0)
        let dd = directional(&f, PrimitiveDirection::new(0, 1).unwrap());
        assert_eq!(dd.coeff(1), eps);
        for s in centered_grid(9) {
            assert!((dd.field(s) - 2.0 * eps * (2.0 * PI * s).cos()).abs() < 1e-14);
        }
        assert!(dd.line_average_deviation(&f, 32) < 1e-9);
    }

    #[test]
    fn off_ray_mode_does_not_contribute() {
        let lat = identity();
        let f = ScalarField::from_cosine_modes(lat, 2.0 * PI, &[((1, 1), 0.5)]).unwrap();
        let dir = PrimitiveDirection::new(1, 0).unwrap();
        let dd = directional(&f, dir);
        assert!(dd.is_zero());
        assert!(dd.line_average_deviation(&f, 32) < 1e-9);
    }

    #[test]
    fn directional_matches_line_average() {
        let f = two_mode(oblique());
        for dir in PrimitiveDirection::all_within(2) {
            let dd = directional(&f, dir);
            assert!(dd.line_average_deviation(&f, 32) < 1e-9, "{dir}");
        }
    }

    #[test]
    fn directional_potential_derivative() {
        let f = two_mode(oblique());
        let dd = directional(&f, PrimitiveDirection::new(0, 1).unwrap());
        assert!(!dd.is_zero());
        for s in centered_grid(11) {
            let h = 1e-5;
            let fd = (dd.potential(s + h) - dd.potential(s - h)) / (2.0 * h);
            assert!((fd - dd.potential_derivative(s)).abs() < 1e-9);
        }
    }

    #[test]
    fn field_condition_margins() {
        let lat = identity();
        let b0 = 2.0 * PI;
        let c = ScalarField::constant(lat.clone(), b0);
        assert!((check_field_condition(&c) - b0).abs() < 1e-12);
        let half = ScalarField::from_cosine_modes(lat.clone(), b0, &[((1, 0), 0.25 * b0)]).unwrap();
        assert!((check_field_condition(&half) - 0.5 * b0).abs() < 1e-9);
        let strong = ScalarField::from_cosine_modes(lat, b0, &[((1, 0), 0.75 * b0)]).unwrap();
        assert!(check_field_condition(&strong) < 0.0);
    }

    #[test]
    fn directional_field_bounded_by_deviation() {
        let f = two_mode(oblique());
        let bound = f.max_deviation(DEFAULT_GRID) + 1e-9;
        for dir in PrimitiveDirection::all_within(3) {
            assert!(directional(&f, dir).max_abs_field(512) <= bound);
        }
    }

    #[test]
    fn cosine_condition_examples() {
        let lat = identity();
        assert!(check_cosine_condition(&Vec2::zeros(), &lat, 6.0, 1e-3).is_empty());
        let bad = check_cosine_condition(&Vec2::new(PI / 2.0, 0.0), &lat, 2.0, 1e-3);
        assert!(bad.contains(&(1, 0)));
        assert!(check_cosine_condition(&Vec2::new(0.3, 0.7), &lat, 6.0, 1e-3).is_empty());
    }

    #[test]
    fn cosine_condition_exhaustive_scan() {
        // independent scan over a generous integer box
        let lat = identity();
        let a0 = Vec2::new(0.3, 0.7);
        let mut worst = f64::INFINITY;
        for m in -7i64..=7 {
            for n in -7i64..=7 {
                let d = lat.point(m, n);
                if (m, n) != (0, 0) && d.norm() <= 6.0 {
                    worst = worst.min(a0.dot(&d).cos().abs());
                }
            }
        }
        assert!(worst >= 1e-3);
    }
}
