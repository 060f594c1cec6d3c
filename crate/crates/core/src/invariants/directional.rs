//! Reduced one-dimensional formulas along a primitive direction.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use num_complex::Complex64;

use super::cov::ChangeOfVariables;
use super::raw::{raw_phase, segment_rule};
use crate::fields::{DirectionalData, DualIndex, MagneticPotential};
use crate::lattice::{perp, PrimitiveDirection, Vec2};
use crate::quad::{phi1_with_derivatives, SegmentRule};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// `2 c0 cos(k a0.d0) int cos(2 pi k y) s'(y) dy`.
pub fn i_directional(cov: &ChangeOfVariables, k: u32, cosine: f64, c0: f64) -> f64 {
    2.0 * c0 * cosine * cov.cosine_moment(k)
}

/// `2 c0 cos(k a0.d0) int V_delta(s(y)) s'(y) cos(2 pi k y) dy`, where `v_dir`
/// holds the ray coefficients of the electric potential.
pub fn j1_directional(v_dir: &DirectionalData, cov: &ChangeOfVariables, k: u32, cosine: f64, c0: f64) -> f64 {
    2.0 * c0 * cosine * cov.weighted_cosine_moment(k, |s| v_dir.field(s))
}

/// Fourier coefficients `B_mu` of `b_line(x) = int_0^1 b(x + s d, x) ds`,
/// restricted to the modes accepted by `keep`.
///
/// Writing `b(x + s d, x) = G.G - i L` with `G, L` expanded in the modes of the
/// periodic potential, each coefficient is a segment integral of products of
/// at most two modes.
pub fn line_amplitude_modes<K>(
    a: &MagneticPotential,
    d: &Vec2,
    rule: &SegmentRule,
    keep: K,
) -> BTreeMap<DualIndex, Complex64>
where
    K: Fn(DualIndex) -> bool,
{
    let modes = a.modes();
    let add = |x: DualIndex, y: DualIndex| (x.0 + y.0, x.1 + y.1);
    let singles: Vec<usize> = (0..modes.len()).filter(|&i| keep(modes[i].index)).collect();
    let pairs: Vec<(usize, usize, DualIndex)> = (0..modes.len())
        .flat_map(|i| (0..modes.len()).map(move |j| (i, j)))
        .map(|(i, j)| (i, j, add(modes[i].index, modes[j].index)))
        .filter(|&(_, _, mu)| keep(mu))
        .collect();

    let mut out: BTreeMap<DualIndex, Complex64> = BTreeMap::new();
    let keep_zero = keep((0, 0));
    let dperp = perp(d);
    let da: Vec<Complex64> = modes.iter().map(|m| m.coeff.x * d.x + m.coeff.y * d.y).collect();
    let ba: Vec<Complex64> = modes.iter().map(|m| m.coeff.x * m.beta.x + m.coeff.y * m.beta.y).collect();
    let thetas: Vec<f64> = modes.iter().map(|m| 2.0 * PI * m.beta.dot(d)).collect();

    let mut g = vec![nalgebra::Vector2::<Complex64>::zeros(); modes.len()];
    let mut l = vec![Complex64::new(0.0, 0.0); modes.len()];
    for (&sigma, &w) in rule.nodes.iter().zip(&rule.weights) {
        let g0 = dperp * (-0.5 * a.b0() * sigma);
        for (i, m) in modes.iter().enumerate() {
            let th = sigma * thetas[i];
            let (f0, f1, f2) = phi1_with_derivatives(th);
            let e = Complex64::from_polar(1.0, th);
            g[i] = m.coeff * (f0 - e)
                + nalgebra::Vector2::new(m.beta.x.into(), m.beta.y.into()) * (2.0 * PI * sigma * da[i] * f1);
            l[i] = 4.0 * PI * ba[i] * f1
                + (2.0 * PI).powi(2) * m.beta.norm_squared() * sigma * da[i] * f2
                - 2.0 * PI * I * ba[i] * e;
        }
        if keep_zero {
            *out.entry((0, 0)).or_default() += w * g0.norm_squared();
        }
        for &i in &singles {
            let g0g = g[i].x * g0.x + g[i].y * g0.y;
            *out.entry(modes[i].index).or_default() += w * (2.0 * g0g - I * l[i]);
        }
        for &(i, j, mu) in &pairs {
            *out.entry(mu).or_default() += w * (g[i].x * g[j].x + g[i].y * g[j].y);
        }
    }
    out
}

/// Amplitude part `J_2(d)` for `d = k d0` (signed `k`), from the ray-projected
/// coefficients of `b_line` and a 1-D trapezoid in `s = delta.x` with `n`
/// points.
pub fn j2_fourier(a: &MagneticPotential, dir: PrimitiveDirection, k: i64, n: usize) -> Complex64 {
    let lat = a.lattice();
    let (mk, nk) = dir.multiple(k);
    let d = lat.point(mk, nk);
    let rule = segment_rule(a, &d);
    let on_ray = |(p, q): DualIndex| dir.pair_with((p as i64, q as i64)) == 0;
    let coeffs = line_amplitude_modes(a, &d, &rule, on_ray);
    let gamma = lat.dual_pair(dir).gamma;
    let delta = dir.delta_index();
    // mu = q delta  =>  mu.(s gamma) = q s
    let ray_multiple = |(p, q): DualIndex| {
        if delta.0 != 0 {
            p as i64 / delta.0
        } else {
            q as i64 / delta.1
        }
    };
    let samples: Vec<(f64, Complex64)> = crate::quad::centered_grid(n)
        .map(|s| (s, Complex64::from_polar(1.0, raw_phase(a, &(gamma * s), &d))))
        .collect();
    let mut total = Complex64::new(0.0, 0.0);
    for (&mu, &bmu) in &coeffs {
        let q = ray_multiple(mu) as f64;
        let avg: Complex64 = samples
            .iter()
            .map(|&(s, e)| e * Complex64::from_polar(1.0, 2.0 * PI * q * s))
            .sum::<Complex64>()
            / n as f64;
        total += bmu * avg;
    }
    total * lat.area()
}

/// `J_2(d) + J_2(-d)` for `d = k d0`, `k >= 1`, returned with its parts
/// `X_+ = J_2(d) e^{-i k a0.d0}` and `X_- = J_2(-d) e^{i k a0.d0}`, which do not
/// depend on `a0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AmplitudeSum {
    pub x_plus: Complex64,
    pub x_minus: Complex64,
}

impl AmplitudeSum {
    pub fn compute(a: &MagneticPotential, dir: PrimitiveDirection, k: u32, n: usize) -> Self {
        let bare = a.with_a0(Vec2::zeros());
        Self {
            x_plus: j2_fourier(&bare, dir, k as i64, n),
            x_minus: j2_fourier(&bare, dir, -(k as i64), n),
        }
    }

    /// `J_2(d) + J_2(-d)` for a given angle `k a0.d0`.
    pub fn sum_at_angle(&self, angle: f64) -> Complex64 {
        Complex64::from_polar(1.0, angle) * self.x_plus + Complex64::from_polar(1.0, -angle) * self.x_minus
    }

    /// `J_2(d) + J_2(-d)` from the cosine alone, valid when `X_+ = X_-`.
    pub fn sum_from_cosine(&self, cosine: f64) -> f64 {
        (cosine * (self.x_plus + self.x_minus)).re
    }

    /// `|X_+ - X_-|`, zero when the amplitude sum depends on `a0` only through
    /// the cosine.
    pub fn asymmetry(&self) -> f64 {
        (self.x_plus - self.x_minus).norm()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::ScalarField;
    use crate::invariants::raw::{b_term, j_raw};
    use crate::lattice::Lattice;

    fn setup() -> MagneticPotential {
        let lat = Lattice::new(Vec2::new(1.0, 0.0), Vec2::new(0.4, 1.1)).unwrap();
        let b = ScalarField::from_cosine_modes(
            lat.clone(),
            lat.unit_flux_field(),
            &[((1, 0), 0.5), ((0, 1), 0.3), ((1, 1), 0.2)],
        )
        .unwrap();
        MagneticPotential::from_field(&b, Vec2::new(0.3, 0.7)).unwrap()
    }

    #[test]
    fn line_amplitude_series_matches_pointwise_quadrature() {
        let a = setup();
        let d = a.lattice().point(1, 1);
        let rule = segment_rule(&a, &d);
        let coeffs = line_amplitude_modes(&a, &d, &rule, |_| true);
        let lat = a.lattice();
        for x in [Vec2::new(0.1, 0.3), Vec2::new(-0.7, 0.2)] {
            let series: Complex64 = coeffs
                .iter()
                .map(|(&(p, q), &c)| c * Complex64::from_polar(1.0, 2.0 * PI * lat.dual_point(p as i64, q as i64).dot(&x)))
                .sum();
            let direct: Complex64 = rule.integrate(|s| b_term(&a, &(x + d * s), &x));
            assert!((series - direct).norm() < 1e-10, "{series} vs {direct}");
        }
    }

    #[test]
    fn j2_fourier_matches_raw_b_part() {
        let a = setup();
        let v = ScalarField::constant(a.lattice().clone(), 0.0);
        let dir = PrimitiveDirection::new(1, 0).unwrap();
        for k in [1i64, -1, 2] {
            let d = a.lattice().point(dir.multiple(k).0, dir.multiple(k).1);
            let raw = j_raw(&a, &v, &d, 64).unwrap().b_part;
            let fast = j2_fourier(&a, dir, k, 256);
            assert!((raw - fast).norm() < 1e-9, "k={k}: {raw} vs {fast}");
        }
    }

    #[test]
    fn amplitude_sum_depends_on_cosine_only() {
        let a = setup();
        for dir in [PrimitiveDirection::new(1, 0).unwrap(), PrimitiveDirection::new(1, 1).unwrap()] {
            for k in 1..4 {
                let s = AmplitudeSum::compute(&a, dir, k, 256);
                assert!(s.asymmetry() < 1e-10 * s.x_plus.norm().max(1.0));
                assert!((s.sum_at_angle(0.8).im).abs() < 1e-10);
                assert!((s.sum_at_angle(0.8).re - s.sum_from_cosine(0.8f64.cos())).abs() < 1e-10);
            }
        }
    }
}
